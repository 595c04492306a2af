//! Scenario configuration: a TOML file with one section per subsystem.
//! Every physical value is a string carrying an explicit unit suffix
//! ("50 cm^-1", "0.004 eV", "1e4 cm/s"), parsed through the units module so
//! that mixed-unit mistakes stop at the boundary.

use exciton_search::lattice::{LatticeSpec, LricRing, PowerLawChain};
use exciton_search::rates::CarrierParams;
use exciton_search::search::{BandEdge, HbarReading, PhononModel, SearchProblem};
use exciton_search::specfun::{self, SeriesParams};
use exciton_search::units::{Quantity, Unit, ELECTRON_MASS};
use serde::Deserialize;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("field {field}: {message}")]
    Field { field: String, message: String },
    #[error("missing section [{0}] required by this command")]
    MissingSection(&'static str),
}

fn field_err(field: &str, message: impl ToString) -> ConfigError {
    ConfigError::Field {
        field: field.to_string(),
        message: message.to_string(),
    }
}

fn parse_quantity(field: &str, raw: &str) -> Result<Quantity, ConfigError> {
    Quantity::parse(raw).map_err(|e| field_err(field, e))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    pub kind: String,
    pub sites: usize,
    pub coupling: String,
    #[serde(default = "zero_energy")]
    pub on_site: String,
    pub exponent: Option<f64>,
    pub stride: Option<usize>,
}

fn zero_energy() -> String {
    "0 J".to_string()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandSection {
    pub edge: String,
    pub a_prime: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhononSection {
    pub debye_energy: String,
    pub sound_velocity: String,
    pub lattice_relaxation: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapSection {
    pub depth: String,
    #[serde(default)]
    pub site: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarrierSection {
    pub electron_mass: Option<String>,
    pub carrier_density: String,
    pub exciton_density: String,
    pub transport_gap: String,
    pub binding_energy: String,
    pub mass_density: String,
    pub cell_edge: String,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub temperature: Option<String>,
    pub mean_band_energy: Option<String>,
    pub hbar_reading: Option<String>,
    pub broadening: Option<String>,
    pub convention: Option<String>,
    pub grid_points: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// One of "N", "mu", "T", "m", "p".
    pub variable: String,
    pub grid: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub lattice: LatticeSection,
    pub band: Option<BandSection>,
    pub phonons: PhononSection,
    pub trap: TrapSection,
    pub carriers: Option<CarrierSection>,
    #[serde(default)]
    pub run: RunSection,
    pub sweep: Option<SweepSection>,
}

impl ScenarioConfig {
    pub fn from_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_str(&text)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        match self.lattice.kind.as_str() {
            "power-law" => {
                if self.lattice.exponent.is_none() {
                    return Err(field_err("lattice.exponent", "required for kind = \"power-law\""));
                }
            }
            "lric" => {
                if self.lattice.stride.is_none() {
                    return Err(field_err("lattice.stride", "required for kind = \"lric\""));
                }
            }
            other => {
                return Err(field_err(
                    "lattice.kind",
                    format!("expected \"power-law\" or \"lric\", got {other:?}"),
                ))
            }
        }
        if let Some(sweep) = &self.sweep {
            if !["N", "mu", "T", "m", "p"].contains(&sweep.variable.as_str()) {
                return Err(field_err(
                    "sweep.variable",
                    format!("expected one of N, mu, T, m, p, got {:?}", sweep.variable),
                ));
            }
            if sweep.grid.is_empty() {
                return Err(field_err("sweep.grid", "must be non-empty"));
            }
            if sweep.grid.windows(2).any(|w| w[1] <= w[0]) {
                return Err(field_err("sweep.grid", "must be strictly increasing"));
            }
        }
        Ok(())
    }

    /// Lattice with the configured size (or an override for sweeps).
    pub fn lattice_spec(&self, sites: Option<usize>) -> Result<LatticeSpec, ConfigError> {
        let n = sites.unwrap_or(self.lattice.sites);
        let coupling = parse_quantity("lattice.coupling", &self.lattice.coupling)?;
        let on_site = parse_quantity("lattice.on_site", &self.lattice.on_site)?;
        match self.lattice.kind.as_str() {
            "power-law" => {
                let mu = self.lattice.exponent.unwrap();
                PowerLawChain::new(n, coupling, on_site, mu)
                    .map(LatticeSpec::PowerLaw)
                    .map_err(|e| field_err("lattice", e))
            }
            _ => {
                let m = self.lattice.stride.unwrap();
                LricRing::new(n, coupling, on_site, m)
                    .map(LatticeSpec::Lric)
                    .map_err(|e| field_err("lattice", e))
            }
        }
    }

    pub fn phonons(&self) -> Result<PhononModel, ConfigError> {
        PhononModel::new(
            parse_quantity("phonons.debye_energy", &self.phonons.debye_energy)?,
            parse_quantity("phonons.sound_velocity", &self.phonons.sound_velocity)?,
            parse_quantity("phonons.lattice_relaxation", &self.phonons.lattice_relaxation)?,
        )
        .map_err(|e| field_err("phonons", e))
    }

    pub fn trap_depth(&self) -> Result<Quantity, ConfigError> {
        parse_quantity("trap.depth", &self.trap.depth)
    }

    /// Band edge and deficit amplitude: the [band] section when present,
    /// otherwise the infinite-size limit of the configured chain
    /// (E₀ = 2J·ζ(μ), A′ = 1/((μ−1)·ζ(μ)) from the tail of the edge sum).
    pub fn band_edge(&self, mu_override: Option<f64>) -> Result<BandEdge, ConfigError> {
        if let Some(band) = &self.band {
            if mu_override.is_none() {
                return BandEdge::new(parse_quantity("band.edge", &band.edge)?, band.a_prime)
                    .map_err(|e| field_err("band", e));
            }
        }
        let mu = mu_override
            .or(self.lattice.exponent)
            .ok_or_else(|| field_err("band", "no band section and no power-law exponent"))?;
        let coupling = parse_quantity("lattice.coupling", &self.lattice.coupling)?;
        let zeta = specfun::zeta(mu, SeriesParams::with_tol(1e-13))
            .map_err(|e| field_err("band", e))?;
        let e0 = 2.0 * coupling.si() * zeta;
        BandEdge::new(Quantity::joules(e0), 1.0 / ((mu - 1.0) * zeta))
            .map_err(|e| field_err("band", e))
    }

    pub fn mean_band_energy(&self) -> Result<Quantity, ConfigError> {
        match &self.run.mean_band_energy {
            Some(raw) => parse_quantity("run.mean_band_energy", raw),
            None => Ok(Quantity::joules(0.0)),
        }
    }

    pub fn search_problem(
        &self,
        sites: Option<usize>,
        mu_override: Option<f64>,
    ) -> Result<SearchProblem, ConfigError> {
        SearchProblem::new(
            self.lattice_spec(sites)?,
            self.phonons()?,
            self.trap_depth()?,
            self.mean_band_energy()?,
            self.band_edge(mu_override)?,
        )
        .map_err(|e| field_err("scenario", e))
    }

    pub fn carriers(&self) -> Result<CarrierParams, ConfigError> {
        let c = self
            .carriers
            .as_ref()
            .ok_or(ConfigError::MissingSection("carriers"))?;
        let electron_mass = match &c.electron_mass {
            Some(raw) => parse_quantity("carriers.electron_mass", raw)?,
            None => Quantity::new(ELECTRON_MASS, Unit::Kilogram),
        };
        CarrierParams::new(
            electron_mass,
            parse_quantity("carriers.carrier_density", &c.carrier_density)?,
            parse_quantity("carriers.exciton_density", &c.exciton_density)?,
            parse_quantity("carriers.transport_gap", &c.transport_gap)?,
            parse_quantity("carriers.binding_energy", &c.binding_energy)?,
            parse_quantity("carriers.mass_density", &c.mass_density)?,
            parse_quantity("carriers.cell_edge", &c.cell_edge)?,
        )
        .map_err(|e| field_err("carriers", e))
    }

    pub fn temperature(&self) -> Result<Quantity, ConfigError> {
        match &self.run.temperature {
            Some(raw) => parse_quantity("run.temperature", raw),
            None => Ok(Quantity::new(30.0, Unit::Kelvin)),
        }
    }

    pub fn hbar_reading(&self, flag: Option<&str>) -> Result<HbarReading, ConfigError> {
        let raw = flag.or(self.run.hbar_reading.as_deref()).unwrap_or("A");
        match raw {
            "A" | "a" => Ok(HbarReading::EnergyForm),
            "B" | "b" => Ok(HbarReading::RateCalibrated),
            other => Err(field_err(
                "run.hbar_reading",
                format!("expected A or B, got {other:?}"),
            )),
        }
    }

    pub fn broadening(&self, flag: Option<&str>) -> Result<Quantity, ConfigError> {
        let raw = flag.or(self.run.broadening.as_deref()).unwrap_or("0.5 cm^-1");
        parse_quantity("run.broadening", raw)
    }

    pub fn grid_points(&self) -> usize {
        self.run.grid_points.unwrap_or(10_000)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[lattice]
kind = "power-law"
sites = 100
coupling = "37.4356 cm^-1"
exponent = 3.0

[phonons]
debye_energy = "90 cm^-1"
sound_velocity = "1e4 cm/s"
lattice_relaxation = "0.004 eV"

[trap]
depth = "50 cm^-1"
"#;

    #[test]
    fn minimal_config_parses() {
        let cfg = ScenarioConfig::from_str(MINIMAL).unwrap();
        let spec = cfg.lattice_spec(None).unwrap();
        assert_eq!(spec.n(), 100);
        let band = cfg.band_edge(None).unwrap();
        // 2·J·ζ(3) with J tuned for a 90 cm⁻¹ edge
        let edge_cm = band.e0.convert(Unit::InvCm).unwrap().magnitude();
        assert!((edge_cm - 90.0).abs() < 1e-3, "edge = {edge_cm}");
        assert!(cfg.search_problem(None, None).is_ok());
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = MINIMAL.replace("[trap]", "[trap]\nmystery = 3");
        match ScenarioConfig::from_str(&text) {
            Err(ConfigError::Toml(_)) => {}
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn kind_specific_fields_enforced() {
        let text = MINIMAL.replace("exponent = 3.0", "");
        assert!(matches!(
            ScenarioConfig::from_str(&text),
            Err(ConfigError::Field { .. })
        ));
    }

    #[test]
    fn sweep_grid_must_increase() {
        let text = format!("{MINIMAL}\n[sweep]\nvariable = \"N\"\ngrid = [100, 100]\n");
        assert!(ScenarioConfig::from_str(&text).is_err());
        let text = format!("{MINIMAL}\n[sweep]\nvariable = \"Q\"\ngrid = [100, 200]\n");
        assert!(ScenarioConfig::from_str(&text).is_err());
    }

    #[test]
    fn bad_unit_reports_field() {
        let text = MINIMAL.replace("50 cm^-1", "50 parsecs");
        let cfg = ScenarioConfig::from_str(&text).unwrap();
        match cfg.trap_depth() {
            Err(ConfigError::Field { field, .. }) => assert_eq!(field, "trap.depth"),
            other => panic!("expected field error, got {other:?}"),
        }
    }

    #[test]
    fn missing_carriers_section_reported() {
        let cfg = ScenarioConfig::from_str(MINIMAL).unwrap();
        assert!(matches!(
            cfg.carriers(),
            Err(ConfigError::MissingSection("carriers"))
        ));
    }
}
