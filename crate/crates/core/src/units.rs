//! Physical quantities with explicit unit tags.
//!
//! Spectroscopy literature mixes cm⁻¹, eV, meV, ps and Kelvin freely; every
//! formula in this crate therefore computes in SI internally (joules, seconds,
//! meters) and converts at the boundaries. Conversions use fixed constants so
//! round trips are exact to within a couple of ulps.

use std::fmt;
use thiserror::Error;

/// Reduced Planck constant (J·s), CODATA 2018.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant (J/K), exact by SI definition.
pub const K_BOLTZMANN: f64 = 1.380_649e-23;
/// One electron volt in joules, exact by SI definition.
pub const EV_TO_JOULE: f64 = 1.602_176_634e-19;
/// One wavenumber (cm⁻¹) in joules: h·c·100.
pub const INV_CM_TO_JOULE: f64 = 1.986_445_857e-23;
/// Free electron mass (kg), CODATA 2018.
pub const ELECTRON_MASS: f64 = 9.109_383_7015e-31;

#[derive(Debug, Error, PartialEq)]
pub enum UnitsError {
    #[error("cannot convert {from} ({from_dim:?}) to {to} ({to_dim:?})")]
    DimensionMismatch {
        from: Unit,
        to: Unit,
        from_dim: Dimension,
        to_dim: Dimension,
    },
    #[error("temperature must be non-negative, got {0} K")]
    NegativeTemperature(f64),
    #[error("cannot parse quantity from {0:?}")]
    Parse(String),
}

/// Dimension classes used by the formulas in this crate. Temperature is its
/// own class; it becomes an energy only through [`thermal_energy`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dimension {
    Energy,
    EnergySquared,
    Temperature,
    Time,
    Length,
    Mass,
    Velocity,
    NumberDensity,
    MassDensity,
    AngularFrequency,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    Joule,
    ElectronVolt,
    MilliElectronVolt,
    /// Wavenumber used as an energy (h·c·ν̃).
    InvCm,
    JouleSquared,
    Kelvin,
    Second,
    Picosecond,
    Meter,
    Centimeter,
    Kilogram,
    MeterPerSecond,
    CentimeterPerSecond,
    PerCubicMeter,
    PerCubicCentimeter,
    KilogramPerCubicMeter,
    RadianPerSecond,
}

impl Unit {
    pub fn dimension(self) -> Dimension {
        use Unit::*;
        match self {
            Joule | ElectronVolt | MilliElectronVolt | InvCm => Dimension::Energy,
            JouleSquared => Dimension::EnergySquared,
            Kelvin => Dimension::Temperature,
            Second | Picosecond => Dimension::Time,
            Meter | Centimeter => Dimension::Length,
            Kilogram => Dimension::Mass,
            MeterPerSecond | CentimeterPerSecond => Dimension::Velocity,
            PerCubicMeter | PerCubicCentimeter => Dimension::NumberDensity,
            KilogramPerCubicMeter => Dimension::MassDensity,
            RadianPerSecond => Dimension::AngularFrequency,
        }
    }

    /// Multiplicative factor taking a magnitude in `self` to the SI unit of
    /// its dimension class.
    fn si_factor(self) -> f64 {
        use Unit::*;
        match self {
            Joule | Kelvin | Second | Meter | Kilogram | MeterPerSecond | PerCubicMeter
            | KilogramPerCubicMeter | RadianPerSecond | JouleSquared => 1.0,
            ElectronVolt => EV_TO_JOULE,
            MilliElectronVolt => 1e-3 * EV_TO_JOULE,
            InvCm => INV_CM_TO_JOULE,
            Picosecond => 1e-12,
            Centimeter => 1e-2,
            CentimeterPerSecond => 1e-2,
            PerCubicCentimeter => 1e6,
        }
    }

    pub fn symbol(self) -> &'static str {
        use Unit::*;
        match self {
            Joule => "J",
            ElectronVolt => "eV",
            MilliElectronVolt => "meV",
            InvCm => "cm^-1",
            JouleSquared => "J^2",
            Kelvin => "K",
            Second => "s",
            Picosecond => "ps",
            Meter => "m",
            Centimeter => "cm",
            Kilogram => "kg",
            MeterPerSecond => "m/s",
            CentimeterPerSecond => "cm/s",
            PerCubicMeter => "m^-3",
            PerCubicCentimeter => "cm^-3",
            KilogramPerCubicMeter => "kg/m^3",
            RadianPerSecond => "rad/s",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Unit> {
        use Unit::*;
        Some(match s {
            "J" => Joule,
            "eV" => ElectronVolt,
            "meV" => MilliElectronVolt,
            "cm^-1" | "cm-1" | "1/cm" => InvCm,
            "J^2" => JouleSquared,
            "K" => Kelvin,
            "s" => Second,
            "ps" => Picosecond,
            "m" => Meter,
            "cm" => Centimeter,
            "kg" => Kilogram,
            "m/s" => MeterPerSecond,
            "cm/s" => CentimeterPerSecond,
            "m^-3" | "1/m^3" => PerCubicMeter,
            "cm^-3" | "1/cm^3" => PerCubicCentimeter,
            "kg/m^3" => KilogramPerCubicMeter,
            "rad/s" => RadianPerSecond,
            _ => return None,
        })
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A magnitude with a unit tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    magnitude: f64,
    unit: Unit,
}

impl Quantity {
    pub fn new(magnitude: f64, unit: Unit) -> Self {
        Quantity { magnitude, unit }
    }

    /// Shorthand for an energy in joules.
    pub fn joules(magnitude: f64) -> Self {
        Quantity::new(magnitude, Unit::Joule)
    }

    /// Shorthand for a time in seconds.
    pub fn seconds(magnitude: f64) -> Self {
        Quantity::new(magnitude, Unit::Second)
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn dimension(&self) -> Dimension {
        self.unit.dimension()
    }

    /// Magnitude expressed in the SI unit of this quantity's dimension class.
    pub fn si(&self) -> f64 {
        self.magnitude * self.unit.si_factor()
    }

    /// Rescale to `target` within the same dimension class.
    pub fn convert(&self, target: Unit) -> Result<Quantity, UnitsError> {
        if self.unit.dimension() != target.dimension() {
            return Err(UnitsError::DimensionMismatch {
                from: self.unit,
                to: target,
                from_dim: self.unit.dimension(),
                to_dim: target.dimension(),
            });
        }
        Ok(Quantity::new(
            self.magnitude * (self.unit.si_factor() / target.si_factor()),
            target,
        ))
    }

    /// SI magnitude, checked against an expected dimension class.
    pub fn si_in(&self, dim: Dimension) -> Result<f64, UnitsError> {
        if self.dimension() != dim {
            // Reuse the mismatch error with the SI representative of `dim`.
            let target = match dim {
                Dimension::Energy => Unit::Joule,
                Dimension::EnergySquared => Unit::JouleSquared,
                Dimension::Temperature => Unit::Kelvin,
                Dimension::Time => Unit::Second,
                Dimension::Length => Unit::Meter,
                Dimension::Mass => Unit::Kilogram,
                Dimension::Velocity => Unit::MeterPerSecond,
                Dimension::NumberDensity => Unit::PerCubicMeter,
                Dimension::MassDensity => Unit::KilogramPerCubicMeter,
                Dimension::AngularFrequency => Unit::RadianPerSecond,
            };
            return Err(UnitsError::DimensionMismatch {
                from: self.unit,
                to: target,
                from_dim: self.dimension(),
                to_dim: dim,
            });
        }
        Ok(self.si())
    }

    /// Parse `"50 cm^-1"`, `"0.004 eV"`, `"1e4 cm/s"`, ...
    pub fn parse(s: &str) -> Result<Quantity, UnitsError> {
        let t = s.trim();
        let (num, sym) = t
            .split_once(char::is_whitespace)
            .ok_or_else(|| UnitsError::Parse(s.to_string()))?;
        let magnitude: f64 = num
            .parse()
            .map_err(|_| UnitsError::Parse(s.to_string()))?;
        let unit = Unit::from_symbol(sym.trim()).ok_or_else(|| UnitsError::Parse(s.to_string()))?;
        Ok(Quantity::new(magnitude, unit))
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6e} {}", self.magnitude, self.unit)
    }
}

/// k_B·T in joules. Temperature is never converted to energy implicitly.
pub fn thermal_energy(temperature: Quantity) -> Result<Quantity, UnitsError> {
    let t = temperature.si_in(Dimension::Temperature)?;
    if t < 0.0 {
        return Err(UnitsError::NegativeTemperature(t));
    }
    Ok(Quantity::joules(K_BOLTZMANN * t))
}

/// Recover the angular frequency (rad/s) of a quantum stored as an energy.
pub fn energy_to_angular_frequency(energy: Quantity) -> Result<Quantity, UnitsError> {
    let e = energy.si_in(Dimension::Energy)?;
    Ok(Quantity::new(e / HBAR, Unit::RadianPerSecond))
}
