//! Error channels that compete with trap-directed transfer: phonon
//! scattering and decoherence, the finite-temperature feasibility bound,
//! the impurity band shift, exciton formation from free carriers at the
//! trap, and exciton-exciton annihilation.

use crate::search::{closed_form_times, HbarReading, SearchError, SearchProblem};
use crate::units::{thermal_energy, Dimension, Quantity, Unit, UnitsError, HBAR};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RatesError {
    #[error("invalid carrier parameters: {0}")]
    BadParams(String),
    #[error("temperature must be positive")]
    ZeroTemperature,
    #[error("scattering vanishes at zero coupling; no finite scattering time")]
    NoScattering,
    #[error("zero group velocity gives no coherence length")]
    ZeroGroupVelocity,
    #[error(transparent)]
    Units(#[from] UnitsError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// Crystal and carrier parameters for the formation and annihilation rates.
#[derive(Debug, Clone, Copy)]
pub struct CarrierParams {
    /// Electron effective mass m_e*.
    pub electron_mass: Quantity,
    /// Free-carrier concentration n_i.
    pub carrier_density: Quantity,
    /// Free-exciton concentration n_ex.
    pub exciton_density: Quantity,
    /// Transport gap E_T.
    pub transport_gap: Quantity,
    /// Exciton binding energy E_b.
    pub binding_energy: Quantity,
    /// Host mass density ξ.
    pub mass_density: Quantity,
    /// Unit-cell edge N*·d₀ (number of sites on an edge times their
    /// spacing, entering the rates only as this product).
    pub cell_edge: Quantity,
}

impl CarrierParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        electron_mass: Quantity,
        carrier_density: Quantity,
        exciton_density: Quantity,
        transport_gap: Quantity,
        binding_energy: Quantity,
        mass_density: Quantity,
        cell_edge: Quantity,
    ) -> Result<Self, RatesError> {
        let m = electron_mass.si_in(Dimension::Mass)?;
        let ni = carrier_density.si_in(Dimension::NumberDensity)?;
        let nex = exciton_density.si_in(Dimension::NumberDensity)?;
        let et = transport_gap.si_in(Dimension::Energy)?;
        let eb = binding_energy.si_in(Dimension::Energy)?;
        let xi = mass_density.si_in(Dimension::MassDensity)?;
        let edge = cell_edge.si_in(Dimension::Length)?;
        for (name, v) in [
            ("electron mass", m),
            ("carrier density", ni),
            ("exciton density", nex),
            ("transport gap", et),
            ("binding energy", eb),
            ("mass density", xi),
            ("cell edge", edge),
        ] {
            if v <= 0.0 {
                return Err(RatesError::BadParams(format!("{name} must be positive")));
            }
        }
        if et <= eb {
            return Err(RatesError::BadParams(
                "transport gap must exceed the binding energy".into(),
            ));
        }
        Ok(CarrierParams {
            electron_mass,
            carrier_density,
            exciton_density,
            transport_gap,
            binding_energy,
            mass_density,
            cell_edge,
        })
    }
}

/// T_scat = ħB/(E_LR·k_B·T).
pub fn scattering_time(
    bandwidth: Quantity,
    e_lr: Quantity,
    temperature: Quantity,
) -> Result<Quantity, RatesError> {
    let t = temperature.si_in(Dimension::Temperature)?;
    if t <= 0.0 {
        return Err(RatesError::ZeroTemperature);
    }
    scattering_time_with_thermal_energy(bandwidth, e_lr, thermal_energy(temperature)?)
}

/// Same expression with k_B·T supplied directly, for reproducing published
/// figures whose quoted thermal energy differs from k_B times the quoted
/// temperature. The library never substitutes one for the other silently.
pub fn scattering_time_with_thermal_energy(
    bandwidth: Quantity,
    e_lr: Quantity,
    kbt: Quantity,
) -> Result<Quantity, RatesError> {
    let b = bandwidth.si_in(Dimension::Energy)?;
    let elr = e_lr.si_in(Dimension::Energy)?;
    let kt = kbt.si_in(Dimension::Energy)?;
    if b <= 0.0 || kt <= 0.0 {
        return Err(RatesError::BadParams(
            "bandwidth and thermal energy must be positive".into(),
        ));
    }
    if elr <= 0.0 {
        return Err(RatesError::NoScattering);
    }
    Ok(Quantity::seconds(HBAR * b / (elr * kt)))
}

/// N² < 3πΔp³/(k_B T·(ħω_D)²): the size bound under which downward
/// relaxation does not outrun the search.
#[derive(Debug, Clone, Copy)]
pub struct FeasibilityCheck {
    /// N².
    pub lhs: f64,
    /// 3πΔp³/(k_B T·(ħω_D)²).
    pub rhs: f64,
    pub feasible: bool,
    /// Largest admissible site count ⌊√rhs⌋.
    pub max_sites: usize,
}

pub fn feasibility_condition(
    n_sites: usize,
    trap_depth: Quantity,
    temperature: Quantity,
    debye_energy: Quantity,
) -> Result<FeasibilityCheck, RatesError> {
    let dp = trap_depth.si_in(Dimension::Energy)?;
    let wd = debye_energy.si_in(Dimension::Energy)?;
    let kt = thermal_energy(temperature)?.si();
    if dp <= 0.0 || wd <= 0.0 {
        return Err(RatesError::BadParams(
            "trap depth and Debye energy must be positive".into(),
        ));
    }
    if kt <= 0.0 {
        return Err(RatesError::ZeroTemperature);
    }
    let lhs = (n_sites as f64) * (n_sites as f64);
    let rhs = 3.0 * PI * dp * dp * dp / (kt * wd * wd);
    Ok(FeasibilityCheck {
        lhs,
        rhs,
        feasible: lhs < rhs,
        max_sites: rhs.sqrt().floor() as usize,
    })
}

/// Band displacement √(B² + Δp²) − B from hybridization with the trap.
pub fn band_shift(bandwidth: Quantity, trap_depth: Quantity) -> Result<Quantity, RatesError> {
    let b = bandwidth.si_in(Dimension::Energy)?;
    let dp = trap_depth.si_in(Dimension::Energy)?;
    if b < 0.0 || dp < 0.0 {
        return Err(RatesError::BadParams("band shift needs B, Δp >= 0".into()));
    }
    Ok(Quantity::joules((b * b + dp * dp).sqrt() - b))
}

/// Damping wavevector k′ = 1/(v_g·T_scat) and the coherence length 1/k′
/// over which site phases survive scattering.
#[derive(Debug, Clone, Copy)]
pub struct CoherenceDamping {
    /// 1/m.
    pub k_prime: f64,
    pub coherence_length: Quantity,
}

pub fn coherence_damping(
    t_scat: Quantity,
    group_velocity: Quantity,
) -> Result<CoherenceDamping, RatesError> {
    let t = t_scat.si_in(Dimension::Time)?;
    let v = group_velocity.si_in(Dimension::Velocity)?;
    if t <= 0.0 {
        return Err(RatesError::BadParams("scattering time must be positive".into()));
    }
    if v <= 0.0 {
        return Err(RatesError::ZeroGroupVelocity);
    }
    let k_prime = 1.0 / (v * t);
    Ok(CoherenceDamping {
        k_prime,
        coherence_length: Quantity::new(1.0 / k_prime, Unit::Meter),
    })
}

/// Exciton formation at the trap from free carriers:
/// 1/T_f = 2·n_i·m_e*·(N*d₀)/(ħ²ξv)·[(E_T−E_b)² + Δp²].
pub fn formation_time(
    carriers: &CarrierParams,
    trap_depth: Quantity,
    sound_velocity: Quantity,
) -> Result<Quantity, RatesError> {
    let ni = carriers.carrier_density.si();
    let m = carriers.electron_mass.si();
    let edge = carriers.cell_edge.si();
    let xi = carriers.mass_density.si();
    let v = sound_velocity.si_in(Dimension::Velocity)?;
    let gap = carriers.transport_gap.si() - carriers.binding_energy.si();
    let dp = trap_depth.si_in(Dimension::Energy)?;
    if v <= 0.0 {
        return Err(RatesError::BadParams("sound velocity must be positive".into()));
    }
    let rate = 2.0 * ni * m * edge / (HBAR * HBAR * xi * v) * (gap * gap + dp * dp);
    if rate <= 0.0 {
        return Ok(Quantity::seconds(f64::INFINITY));
    }
    Ok(Quantity::seconds(1.0 / rate))
}

/// Exciton-exciton annihilation:
/// 1/T_an = (10·n_ex/ħ⁴)·m_e*^{3/2}·E_T^{5/2}·(N*d₀)⁶.
pub fn annihilation_time(carriers: &CarrierParams) -> Result<Quantity, RatesError> {
    let nex = carriers.exciton_density.si();
    let m = carriers.electron_mass.si();
    let et = carriers.transport_gap.si();
    let edge = carriers.cell_edge.si();
    let hbar4 = HBAR * HBAR * HBAR * HBAR;
    let rate = 10.0 * nex / hbar4 * m.powf(1.5) * et.powf(2.5) * edge.powi(6);
    if rate <= 0.0 {
        return Ok(Quantity::seconds(f64::INFINITY));
    }
    Ok(Quantity::seconds(1.0 / rate))
}

/// All competing timescales next to the trapping times.
#[derive(Debug, Clone)]
pub struct CompetingReport {
    pub t0: Quantity,
    pub tn: Quantity,
    pub ts: Quantity,
    pub t_scat: Quantity,
    pub t_f: Quantity,
    pub t_an: Quantity,
    pub feasibility: FeasibilityCheck,
    pub band_shift: Quantity,
    /// The search must finish before coherence is lost.
    pub search_outruns_scattering: bool,
    pub notes: Vec<String>,
}

/// Assemble every channel for one parameter set at one temperature.
pub fn compete_report(
    problem: &SearchProblem,
    carriers: &CarrierParams,
    temperature: Quantity,
    reading: HbarReading,
) -> Result<CompetingReport, RatesError> {
    let times = closed_form_times(problem, reading)?;
    let bandwidth = problem.band.e0.convert(Unit::Joule)?;
    let half_band = Quantity::joules(bandwidth.si() / 2.0);
    let t_scat = scattering_time(half_band, problem.phonons.lattice_relaxation, temperature)?;
    let t_f = formation_time(carriers, problem.trap_depth, problem.phonons.sound_velocity)?;
    let t_an = annihilation_time(carriers)?;
    let feasibility = feasibility_condition(
        problem.lattice.n(),
        problem.trap_depth,
        temperature,
        problem.phonons.debye_energy,
    )?;
    let shift = band_shift(half_band, problem.trap_depth)?;
    let mut notes = problem.warnings();
    notes.push(
        "triplet fusion and fission are a further density-dependent loss channel; published \
         estimates for naphthalene-like systems sit in the 1-10 ps range, with no closed-form \
         rate evaluated here"
            .to_string(),
    );
    Ok(CompetingReport {
        t0: times.t0,
        tn: times.tn,
        ts: times.ts,
        t_scat,
        t_f,
        t_an,
        feasibility,
        band_shift: shift,
        search_outruns_scattering: times.tn.si() < t_scat.si(),
        notes,
    })
}
