//! Frenkel-exciton trapping as a continuous-time quantum search.
//!
//! A photoexcited molecular crystal starts in an equal-weight superposition
//! over its sites; an isotopic impurity one phonon below the host band marks
//! the searched site, and acoustic phonons drain the exciton into it. This
//! crate evaluates that picture end to end at desk scale:
//!
//! * [`units`] — quantities with explicit unit tags and exact conversions;
//! * [`specfun`] — polylogarithm, Lerch transcendent and zeta on the unit
//!   circle, the closed-form backbone of the dispersion;
//! * [`lattice`] — power-law chains and long-range interacting cycles,
//!   dispersion both as a finite sum and through the special functions,
//!   finite-size band-edge laws;
//! * [`oracle`] — dense Hamiltonians, eigensolves and wavepacket evolution:
//!   the brute-force check on every closed form;
//! * [`search`] — exciton-phonon coupling, Green's-function damping and the
//!   trapping-time decomposition 1/T_s = 1/T_0 + 1/T_N;
//! * [`rates`] — the competing channels: phonon scattering, band shift,
//!   exciton formation at the trap, exciton-exciton annihilation;
//! * [`fit`] — the log-log regressions behind every scaling-law claim.

pub mod fit;
pub mod lattice;
pub mod oracle;
pub mod rates;
pub mod search;
pub mod specfun;
pub mod units;
