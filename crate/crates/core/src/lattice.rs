//! Lattice models and exciton dispersion.
//!
//! Two graph families are supported: a chain whose transfer element falls off
//! as J/|l−m|^μ (summed around the ring through both arcs, so the band is the
//! full n = 1..N cosine sum), and the long-range interacting cycle (LRIC)
//! where every pair of sites at ring distance m gains an extra edge.

use crate::fit::{log_log_fit, LineFit};
use crate::specfun::{self, SeriesParams, SpecFunError};
use crate::units::{Dimension, Quantity, UnitsError};
use num_complex::Complex64;
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("invalid lattice: {0}")]
    BadSpec(String),
    #[error("k = {k} lies outside the zone for N = {n}")]
    OutOfZone { k: i64, n: usize },
    #[error("size grid needs >= {need} points spanning >= two decades, got {got} over [{min}, {max}]")]
    InsufficientGrid { need: usize, got: usize, min: usize, max: usize },
    #[error("band-edge deficit underflows at N = {0}; fit is degenerate")]
    DegenerateFit(usize),
    #[error("bandwidth must be positive")]
    ZeroBandwidth,
    #[error(transparent)]
    Series(#[from] SpecFunError),
    #[error(transparent)]
    Units(#[from] UnitsError),
}

/// Chain with power-law transfer J/n^μ, μ > 1.
#[derive(Debug, Clone, Copy)]
pub struct PowerLawChain {
    pub n: usize,
    /// Intersite energy J ≥ 0.
    pub coupling: Quantity,
    /// On-site excitation energy ΔE (spectral offset only).
    pub on_site: Quantity,
    /// Fall-off exponent μ > 1.
    pub exponent: f64,
}

impl PowerLawChain {
    pub fn new(
        n: usize,
        coupling: Quantity,
        on_site: Quantity,
        exponent: f64,
    ) -> Result<Self, LatticeError> {
        if n < 2 {
            return Err(LatticeError::BadSpec(format!("need N >= 2 sites, got {n}")));
        }
        if !(exponent > 1.0) {
            return Err(LatticeError::BadSpec(format!(
                "power-law exponent must exceed 1, got {exponent}"
            )));
        }
        let j = coupling.si_in(Dimension::Energy)?;
        if j < 0.0 {
            return Err(LatticeError::BadSpec("coupling J must be >= 0".into()));
        }
        on_site.si_in(Dimension::Energy)?;
        Ok(PowerLawChain { n, coupling, on_site, exponent })
    }
}

/// Long-range interacting cycle: ring plus shortcut edges at distance m.
#[derive(Debug, Clone, Copy)]
pub struct LricRing {
    pub n: usize,
    pub coupling: Quantity,
    pub on_site: Quantity,
    /// Shortcut stride, 2 ≤ m ≤ N/2.
    pub stride: usize,
}

impl LricRing {
    pub fn new(
        n: usize,
        coupling: Quantity,
        on_site: Quantity,
        stride: usize,
    ) -> Result<Self, LatticeError> {
        if n < 4 {
            return Err(LatticeError::BadSpec(format!("need N >= 4 sites, got {n}")));
        }
        // stride 1 would duplicate the nearest-neighbor edges
        if stride < 2 || stride > n / 2 {
            return Err(LatticeError::BadSpec(format!(
                "shortcut stride must satisfy 2 <= m <= N/2, got m = {stride}, N = {n}"
            )));
        }
        let j = coupling.si_in(Dimension::Energy)?;
        if j < 0.0 {
            return Err(LatticeError::BadSpec("coupling J must be >= 0".into()));
        }
        on_site.si_in(Dimension::Energy)?;
        Ok(LricRing { n, coupling, on_site, stride })
    }
}

#[derive(Debug, Clone, Copy)]
pub enum LatticeSpec {
    PowerLaw(PowerLawChain),
    Lric(LricRing),
}

impl LatticeSpec {
    pub fn n(&self) -> usize {
        match self {
            LatticeSpec::PowerLaw(c) => c.n,
            LatticeSpec::Lric(r) => r.n,
        }
    }

    pub fn coupling_si(&self) -> f64 {
        match self {
            LatticeSpec::PowerLaw(c) => c.coupling.si(),
            LatticeSpec::Lric(r) => r.coupling.si(),
        }
    }

    pub fn on_site_si(&self) -> f64 {
        match self {
            LatticeSpec::PowerLaw(c) => c.on_site.si(),
            LatticeSpec::Lric(r) => r.on_site.si(),
        }
    }

    fn zone_check(&self, k: i64) -> Result<(), LatticeError> {
        let n = self.n() as i64;
        let ok = match self {
            LatticeSpec::PowerLaw(_) => 2 * k.abs() <= n,
            LatticeSpec::Lric(_) => k >= 1 && k <= n,
        };
        if ok {
            Ok(())
        } else {
            Err(LatticeError::OutOfZone { k, n: self.n() })
        }
    }

    /// Canonical zone grid carrying each mode exactly once.
    pub fn zone(&self) -> Vec<i64> {
        let n = self.n() as i64;
        match self {
            LatticeSpec::PowerLaw(_) => {
                // (−N/2, N/2] for even N, symmetric for odd N
                let lo = -(n - 1) / 2;
                let hi = n / 2;
                (lo..=hi).collect()
            }
            LatticeSpec::Lric(_) => (1..=n).collect(),
        }
    }
}

/// E(K) for a single zone index k, by direct finite summation.
///
/// Power-law chain: E = 2J Σ_{n=1}^{N} cos(Kn)/n^μ (the on-site offset is not
/// included; it only shifts the band). LRIC ring: E = ΔE + 2J(cos K + cos mK).
pub fn dispersion_direct(spec: &LatticeSpec, k: i64) -> Result<Quantity, LatticeError> {
    spec.zone_check(k)?;
    let n = spec.n();
    let big_k = TAU * k as f64 / n as f64;
    let e = match spec {
        LatticeSpec::PowerLaw(c) => {
            let j = c.coupling.si();
            let mut sum = 0.0;
            let mut comp = 0.0;
            for m in 1..=n {
                let term = (big_k * m as f64).cos() * (m as f64).powf(-c.exponent);
                let y = term - comp;
                let t = sum + y;
                comp = (t - sum) - y;
                sum = t;
            }
            2.0 * j * sum
        }
        LatticeSpec::Lric(r) => {
            let j = r.coupling.si();
            r.on_site.si() + 2.0 * j * (big_k.cos() + (r.stride as f64 * big_k).cos())
        }
    };
    Ok(Quantity::joules(e))
}

/// E(K) through the polylogarithm/Lerch split: 2J·Re[Li_μ(z) − z^{N+1}Φ(z, μ, N+1)]
/// with z = e^{iK}. Agrees with [`dispersion_direct`] to rounding.
pub fn dispersion_closed(chain: &PowerLawChain, k: i64, _tol: f64) -> Result<Quantity, LatticeError> {
    let spec = LatticeSpec::PowerLaw(*chain);
    spec.zone_check(k)?;
    let big_k = TAU * k as f64 / chain.n as f64;
    let z = Complex64::from_polar(1.0, big_k);
    let split = specfun::polylog_minus_lerch(chain.exponent, z, chain.n + 1)?;
    Ok(Quantity::joules(2.0 * chain.coupling.si() * split.re))
}

/// Sampled band over the canonical zone.
#[derive(Debug, Clone)]
pub struct DispersionCurve {
    pub k_indices: Vec<i64>,
    /// K = 2πk/N.
    pub k_values: Vec<f64>,
    /// Energies in joules, ordered as `k_indices`.
    pub energies: Vec<f64>,
}

impl DispersionCurve {
    /// Evaluate the whole zone with a shared weight table (O(N²) but no
    /// repeated powf).
    pub fn sample(spec: &LatticeSpec) -> DispersionCurve {
        let n = spec.n();
        let ks = spec.zone();
        let k_values: Vec<f64> = ks.iter().map(|&k| TAU * k as f64 / n as f64).collect();
        let energies = match spec {
            LatticeSpec::PowerLaw(c) => {
                let j = c.coupling.si();
                let weights: Vec<f64> =
                    (1..=n).map(|m| (m as f64).powf(-c.exponent)).collect();
                k_values
                    .iter()
                    .map(|&bk| {
                        let mut sum = 0.0;
                        let mut comp = 0.0;
                        for (m, &w) in weights.iter().enumerate() {
                            let term = (bk * (m + 1) as f64).cos() * w;
                            let y = term - comp;
                            let t = sum + y;
                            comp = (t - sum) - y;
                            sum = t;
                        }
                        2.0 * j * sum
                    })
                    .collect()
            }
            LatticeSpec::Lric(r) => {
                let j = r.coupling.si();
                let de = r.on_site.si();
                k_values
                    .iter()
                    .map(|&bk| de + 2.0 * j * (bk.cos() + (r.stride as f64 * bk).cos()))
                    .collect()
            }
        };
        DispersionCurve {
            k_indices: ks,
            k_values,
            energies,
        }
    }

    /// Half band width B = (max − min)/2.
    pub fn bandwidth(&self) -> Quantity {
        let (min, max) = self.min_max();
        Quantity::joules(0.5 * (max - min))
    }

    /// Upper band-edge energy.
    pub fn band_edge(&self) -> Quantity {
        Quantity::joules(self.min_max().1)
    }

    /// Arithmetic mean of the band energies.
    pub fn mean_energy(&self) -> Quantity {
        Quantity::joules(self.energies.iter().sum::<f64>() / self.energies.len() as f64)
    }

    fn min_max(&self) -> (f64, f64) {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &e in &self.energies {
            min = min.min(e);
            max = max.max(e);
        }
        (min, max)
    }
}

/// Finite-size law of the upper band edge.
#[derive(Debug, Clone, Copy)]
pub struct BandEdgeFit {
    /// N→∞ band-edge energy E₀(μ) = 2J·ζ(μ).
    pub e0: Quantity,
    /// Dimensionless deficit amplitude A′ in E(N) ≈ E₀(1 − A′·N^{1−μ}).
    pub a_prime: f64,
    /// Fitted log-log exponent of the deficit (expected 1 − μ).
    pub fitted_exponent: f64,
    /// RMS residual of the log-log regression.
    pub residual: f64,
}

/// Fit the band-edge deficit E₀ − E(K=0, N) against N on `n_grid`.
///
/// The limit E₀ is evaluated as 2J·ζ(μ); the deficit is then the exact tail
/// of the K = 0 cosine sum, which falls off as N^{1−μ}.
pub fn bandwidth_scaling_fit(
    mu: f64,
    coupling: Quantity,
    n_grid: &[usize],
) -> Result<BandEdgeFit, LatticeError> {
    let (min, max) = match (n_grid.iter().min(), n_grid.iter().max()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => (0, 0),
    };
    if n_grid.len() < 4 || min == 0 || (max as f64) < 100.0 * min as f64 {
        return Err(LatticeError::InsufficientGrid {
            need: 4,
            got: n_grid.len(),
            min,
            max,
        });
    }
    if !(mu > 1.0) {
        return Err(LatticeError::BadSpec(format!(
            "band-edge fit needs exponent > 1, got {mu}"
        )));
    }
    let j = coupling.si_in(Dimension::Energy)?;
    let e0 = 2.0 * j * specfun::zeta(mu, SeriesParams::with_tol(1e-13))?;

    // Partial sums up to the largest N, reused across the grid.
    let mut sorted: Vec<usize> = n_grid.to_vec();
    sorted.sort_unstable();
    let mut deficits = Vec::with_capacity(sorted.len());
    let mut partial = 0.0;
    let mut next = 1usize;
    for &n in &sorted {
        while next <= n {
            partial += (next as f64).powf(-mu);
            next += 1;
        }
        let deficit = e0 - 2.0 * j * partial;
        if deficit <= f64::EPSILON * e0.abs() * 1e3 {
            return Err(LatticeError::DegenerateFit(n));
        }
        deficits.push(deficit);
    }

    let xs: Vec<f64> = sorted.iter().map(|&n| n as f64).collect();
    let fit: LineFit = log_log_fit(&xs, &deficits).ok_or(LatticeError::InsufficientGrid {
        need: 4,
        got: n_grid.len(),
        min,
        max,
    })?;
    Ok(BandEdgeFit {
        e0: Quantity::joules(e0),
        a_prime: fit.intercept.exp() / e0,
        fitted_exponent: fit.slope,
        residual: fit.rms_residual,
    })
}

/// Scattering-regime measure γ = E_LR/B.
pub fn coupling_regime(e_lr: Quantity, bandwidth: Quantity) -> Result<f64, LatticeError> {
    let e = e_lr.si_in(Dimension::Energy)?;
    let b = bandwidth.si_in(Dimension::Energy)?;
    if b <= 0.0 {
        return Err(LatticeError::ZeroBandwidth);
    }
    Ok(e / b)
}
