//! One function per subcommand. Every command returns the process exit code:
//! 0 success, 2 configuration problems, 3 failed checks.

use crate::config::{ConfigError, ScenarioConfig};
use crate::output::{emit, sci, Format, Table};
use exciton_search::fit::log_log_fit;
use exciton_search::lattice::{
    dispersion_closed, dispersion_direct, DispersionCurve, LatticeSpec, LricRing, PowerLawChain,
};
use exciton_search::oracle::{
    build_hamiltonian, eigendecompose, evolve, level_spacing_scaling, BandEnd, Convention,
    WalkState,
};
use exciton_search::rates::{
    band_shift, compete_report, feasibility_condition, scattering_time,
    scattering_time_with_thermal_energy,
};
use exciton_search::search::{
    closed_form_times, golden_rule_rate, golden_rule_rate_converged, lric_component_time,
    lric_search_time, HbarReading, ResonanceRule, SearchProblem, TpOutcome,
};
use exciton_search::units::{Quantity, Unit, HBAR};
use rayon::prelude::*;
use std::path::Path;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CHECK: i32 = 3;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Invalid(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("check failed: {0}")]
    CheckFailed(String),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::CheckFailed(_) => EXIT_CHECK,
            _ => EXIT_CONFIG,
        }
    }
}

fn invalid(e: impl ToString) -> CommandError {
    CommandError::Invalid(e.to_string())
}

/// Band sampled as k, K, E_direct, E_closed, |diff| rows; nonzero exit when
/// the two dispersion routes disagree beyond 1e-9 of the band scale.
pub fn run_dispersion(
    cfg: &ScenarioConfig,
    out: Option<&Path>,
    format: Format,
) -> Result<i32, CommandError> {
    let spec = cfg.lattice_spec(None)?;
    let n = spec.n() as i64;
    let ks: Vec<i64> = match &spec {
        LatticeSpec::PowerLaw(_) => (-n / 2..=n / 2).collect(),
        LatticeSpec::Lric(_) => (1..=n).collect(),
    };
    let mut table = Table::new(vec!["k", "K", "E_direct", "E_closed", "abs_diff"]);
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for &k in &ks {
        let direct = dispersion_direct(&spec, k).map_err(invalid)?.si();
        let closed = match &spec {
            LatticeSpec::PowerLaw(chain) => dispersion_closed(chain, k, 1e-10)
                .map_err(invalid)?
                .si(),
            // the cycle band is already closed form; both columns coincide
            LatticeSpec::Lric(_) => direct,
        };
        let diff = (direct - closed).abs();
        worst = worst.max(diff);
        scale = scale.max(direct.abs());
        table.push(vec![
            k.to_string(),
            sci(std::f64::consts::TAU * k as f64 / n as f64),
            sci(direct),
            sci(closed),
            sci(diff),
        ]);
    }
    emit(&table.render(format), out)?;
    if scale > 0.0 && worst > 1e-9 * scale {
        return Err(CommandError::CheckFailed(format!(
            "dispersion routes disagree: max |diff| {worst:.3e} J over scale {scale:.3e} J"
        )));
    }
    Ok(EXIT_OK)
}

/// Single-point trapping-time breakdown plus the regularized golden rule.
pub fn run_search(
    cfg: &ScenarioConfig,
    reading: HbarReading,
    broadening: Quantity,
    out: Option<&Path>,
    format: Format,
) -> Result<i32, CommandError> {
    let problem = cfg.search_problem(None, None)?;
    let times = closed_form_times(&problem, reading).map_err(invalid)?;
    let mut table = Table::new(vec!["quantity", "value"]);
    table.push(vec!["t0_s".into(), sci(times.t0.si())]);
    table.push(vec!["tn_s".into(), sci(times.tn.si())]);
    table.push(vec!["ts_s".into(), sci(times.ts.si())]);
    table.push(vec!["regime".into(), format!("{:?}", times.regime)]);
    match golden_rule_rate(
        &problem,
        None,
        broadening,
        ResonanceRule::DebyeShortcut,
        cfg.grid_points(),
    ) {
        Ok(rate) => {
            table.push(vec!["rate_per_s".into(), sci(rate.magnitude())]);
            let (converged, sigma) = golden_rule_rate_converged(
                &problem,
                broadening,
                ResonanceRule::DebyeShortcut,
                cfg.grid_points(),
            )
            .map_err(invalid)?;
            table.push(vec!["rate_converged_per_s".into(), sci(converged.magnitude())]);
            table.push(vec!["final_broadening_j".into(), sci(sigma.si())]);
        }
        Err(e) => table.push(vec!["rate_per_s".into(), format!("unavailable: {e}")]),
    }
    for (i, w) in problem.warnings().iter().enumerate() {
        table.push(vec![format!("warning_{i}"), w.clone()]);
    }
    emit(&table.render(format), out)?;
    Ok(EXIT_OK)
}

const SWEEP_COLUMNS: [&str; 12] = [
    "value", "t0_s", "tn_s", "ts_s", "tp_s", "t_scat_s", "t_f_s", "t_an_s", "bandwidth_j",
    "e0_j", "a_prime", "flags",
];

struct SweepRow {
    value: f64,
    t0: f64,
    tn: f64,
    ts: f64,
    tp: f64,
    t_scat: f64,
    t_f: f64,
    t_an: f64,
    bandwidth: f64,
    e0: f64,
    a_prime: f64,
    flags: Vec<String>,
}

impl SweepRow {
    fn blank(value: f64) -> Self {
        SweepRow {
            value,
            t0: f64::NAN,
            tn: f64::NAN,
            ts: f64::NAN,
            tp: f64::NAN,
            t_scat: f64::NAN,
            t_f: f64::NAN,
            t_an: f64::NAN,
            bandwidth: f64::NAN,
            e0: f64::NAN,
            a_prime: f64::NAN,
            flags: Vec::new(),
        }
    }

    fn cells(&self) -> Vec<String> {
        vec![
            sci(self.value),
            sci(self.t0),
            sci(self.tn),
            sci(self.ts),
            sci(self.tp),
            sci(self.t_scat),
            sci(self.t_f),
            sci(self.t_an),
            sci(self.bandwidth),
            sci(self.e0),
            sci(self.a_prime),
            self.flags.join(";"),
        ]
    }
}

fn branch_deficit_exponent(mu: f64) -> Option<f64> {
    if mu > 1.0 && mu <= 1.5 {
        Some(mu - 1.0)
    } else if mu >= 3.0 {
        Some(2.0)
    } else {
        None
    }
}

fn fill_common(row: &mut SweepRow, cfg: &ScenarioConfig, problem: &SearchProblem) {
    row.e0 = problem.band.e0.si();
    row.a_prime = problem.band.a_prime;
    if let LatticeSpec::PowerLaw(c) = &problem.lattice {
        if let Some(x) = branch_deficit_exponent(c.exponent) {
            row.bandwidth =
                row.e0 * (1.0 - row.a_prime * (problem.lattice.n() as f64).powf(-x));
        }
    } else {
        row.bandwidth = DispersionCurve::sample(&problem.lattice).bandwidth().si();
    }
    if let Ok(temperature) = cfg.temperature() {
        // the half-band enters scattering; the band edge is twice it
        let half_band = Quantity::joules(row.e0 / 2.0);
        if let Ok(t) = scattering_time(half_band, problem.phonons.lattice_relaxation, temperature)
        {
            row.t_scat = t.si();
        }
    }
    if let Ok(carriers) = cfg.carriers() {
        if let Ok(tf) = exciton_search::rates::formation_time(
            &carriers,
            problem.trap_depth,
            problem.phonons.sound_velocity,
        ) {
            row.t_f = tf.si();
        }
        if let Ok(tan) = exciton_search::rates::annihilation_time(&carriers) {
            row.t_an = tan.si();
        }
    }
}

fn sweep_row(
    cfg: &ScenarioConfig,
    variable: &str,
    value: f64,
    reading: HbarReading,
) -> SweepRow {
    let mut row = SweepRow::blank(value);
    let problem = match variable {
        "N" => cfg.search_problem(Some(value as usize), None),
        "mu" => cfg.search_problem(None, Some(value)),
        _ => cfg.search_problem(None, None),
    };
    let problem = match problem {
        Ok(p) => p,
        Err(e) => {
            row.flags.push(format!("config: {e}"));
            return row;
        }
    };
    match variable {
        "N" | "mu" | "T" => {
            let mut cfg_point = cfg.clone();
            if variable == "T" {
                cfg_point.run.temperature = Some(format!("{value} K"));
            }
            fill_common(&mut row, &cfg_point, &problem);
            match closed_form_times(&problem, reading) {
                Ok(times) => {
                    row.t0 = times.t0.si();
                    row.tn = times.tn.si();
                    row.ts = times.ts.si();
                    row.flags.push(format!("{:?}", times.regime));
                }
                Err(e) => row.flags.push(format!("closed-form: {e}")),
            }
        }
        "m" => {
            let stride = value as usize;
            let ring = match &problem.lattice {
                LatticeSpec::Lric(r) => {
                    LricRing::new(r.n, r.coupling, r.on_site, stride).map(LatticeSpec::Lric)
                }
                LatticeSpec::PowerLaw(_) => {
                    row.flags.push("m sweeps need an lric lattice".into());
                    return row;
                }
            };
            let spec = match ring {
                Ok(s) => s,
                Err(e) => {
                    row.flags.push(format!("lattice: {e}"));
                    return row;
                }
            };
            let mut p2 = problem.clone();
            p2.lattice = spec;
            fill_common(&mut row, cfg, &p2);
            let n = p2.lattice.n();
            if n % stride == 0 {
                match lric_search_time(&p2, (n / stride) as u64, reading) {
                    Ok(lt) => {
                        row.t0 = lt.t0.si();
                        row.tn = lt.tn.si();
                        match lt.tp {
                            TpOutcome::Finite(tp) => row.tp = tp.si(),
                            TpOutcome::Divergent => row.flags.push("tp-divergent".into()),
                            TpOutcome::Unphysical(c) => {
                                row.flags.push(format!("tp-unphysical cos={c:.3}"))
                            }
                        }
                        match lt.ts {
                            Some(ts) => row.ts = ts.si(),
                            None => row.flags.push("ts-rejected".into()),
                        }
                        row.flags.push("rate-difference-combination".into());
                    }
                    Err(e) => row.flags.push(format!("lric: {e}")),
                }
            } else {
                row.flags.push("N not divisible by m".into());
            }
        }
        "p" => {
            fill_common(&mut row, cfg, &problem);
            let t0 = match closed_form_times(&problem, reading) {
                Ok(times) => {
                    row.t0 = times.t0.si();
                    times.t0
                }
                Err(_) => {
                    // cycle lattices have no branch exponent; derive the
                    // coherent time from the band edge directly
                    match lric_search_time(&problem, value as u64, reading) {
                        Ok(lt) => {
                            row.t0 = lt.t0.si();
                            row.tn = lt.tn.si();
                            lt.t0
                        }
                        Err(e) => {
                            row.flags.push(format!("lric: {e}"));
                            return row;
                        }
                    }
                }
            };
            match lric_component_time(t0, value as u64) {
                Ok(TpOutcome::Finite(tp)) => row.tp = tp.si(),
                Ok(TpOutcome::Divergent) => row.flags.push("tp-divergent".into()),
                Ok(TpOutcome::Unphysical(c)) => {
                    row.flags.push(format!("tp-unphysical cos={c:.3}"))
                }
                Err(e) => row.flags.push(format!("tp: {e}")),
            }
        }
        _ => unreachable!("validated variable"),
    }
    row
}

/// Sweep one variable over its grid: a fixed-schema CSV plus a JSON summary
/// with the fitted size exponent where the sweep is over N.
pub fn run_sweep(
    cfg: &ScenarioConfig,
    reading: HbarReading,
    broadening: Quantity,
    out: Option<&Path>,
    format: Format,
) -> Result<i32, CommandError> {
    let sweep = cfg
        .sweep
        .clone()
        .ok_or(ConfigError::MissingSection("sweep"))?;
    if sweep.grid.len() < 5 && sweep.variable == "N" {
        return Err(invalid("size sweeps need at least 5 grid points"));
    }
    let rows: Vec<SweepRow> = sweep
        .grid
        .par_iter()
        .map(|&v| sweep_row(cfg, &sweep.variable, v, reading))
        .collect();

    let mut table = Table::new(SWEEP_COLUMNS.to_vec());
    for row in &rows {
        table.push(row.cells());
    }

    let mut summary = serde_json::json!({
        "variable": sweep.variable,
        "points": sweep.grid.len(),
    });
    if sweep.variable == "N" {
        let xs: Vec<f64> = rows.iter().map(|r| r.value).collect();
        let tn: Vec<f64> = rows.iter().map(|r| r.tn).collect();
        if tn.iter().all(|v| v.is_finite() && *v > 0.0) {
            if let Some(fit) = log_log_fit(&xs, &tn) {
                summary["tn_slope"] = serde_json::json!(fit.slope);
                summary["tn_slope_stderr"] = serde_json::json!(fit.slope_stderr);
            }
        }
        // numeric route: the same exponent out of the regularized golden
        // rule, using a far larger lattice as the size-independent reference
        let numeric: Option<Vec<f64>> = xs
            .iter()
            .map(|&n| {
                let p = cfg.search_problem(Some(n as usize), None).ok()?;
                golden_rule_rate(&p, None, broadening, ResonanceRule::DebyeShortcut, cfg.grid_points())
                    .ok()
                    .map(|r| r.magnitude())
            })
            .collect();
        if let Some(rates) = numeric {
            if let Ok(p_inf) = cfg.search_problem(Some(1_000_000_000_000), None) {
                if let Ok(r_inf) = golden_rule_rate(
                    &p_inf,
                    None,
                    broadening,
                    ResonanceRule::DebyeShortcut,
                    cfg.grid_points(),
                ) {
                    let tn_num: Vec<f64> = rates
                        .iter()
                        .map(|r| 1.0 / (r - r_inf.magnitude()))
                        .collect();
                    if tn_num.iter().all(|v| v.is_finite() && *v > 0.0) {
                        if let Some(fit) = log_log_fit(&xs, &tn_num) {
                            summary["tn_slope_numeric"] = serde_json::json!(fit.slope);
                        }
                    }
                }
            }
        }
    }
    let mut summary_text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    summary_text.push('\n');

    match out {
        Some(path) => {
            emit(&table.render(format), Some(path))?;
            let summary_path = path.with_extension("summary.json");
            emit(&summary_text, Some(&summary_path))?;
        }
        None => {
            emit(&table.render(format), None)?;
            emit(&summary_text, None)?;
        }
    }
    Ok(EXIT_OK)
}

/// Every competing channel for the configured scenario and temperature.
pub fn run_rates(
    cfg: &ScenarioConfig,
    reading: HbarReading,
    out: Option<&Path>,
    format: Format,
) -> Result<i32, CommandError> {
    let problem = cfg.search_problem(None, None)?;
    let carriers = cfg.carriers()?;
    let report = compete_report(&problem, &carriers, cfg.temperature()?, reading)
        .map_err(invalid)?;
    let mut table = Table::new(vec!["quantity", "value"]);
    table.push(vec!["t0_s".into(), sci(report.t0.si())]);
    table.push(vec!["tn_s".into(), sci(report.tn.si())]);
    table.push(vec!["ts_s".into(), sci(report.ts.si())]);
    table.push(vec!["t_scat_s".into(), sci(report.t_scat.si())]);
    table.push(vec!["t_f_s".into(), sci(report.t_f.si())]);
    table.push(vec!["t_an_s".into(), sci(report.t_an.si())]);
    table.push(vec!["band_shift_j".into(), sci(report.band_shift.si())]);
    table.push(vec!["feasibility_lhs".into(), sci(report.feasibility.lhs)]);
    table.push(vec!["feasibility_rhs".into(), sci(report.feasibility.rhs)]);
    table.push(vec![
        "feasible".into(),
        report.feasibility.feasible.to_string(),
    ]);
    table.push(vec![
        "max_sites".into(),
        report.feasibility.max_sites.to_string(),
    ]);
    table.push(vec![
        "search_outruns_scattering".into(),
        report.search_outruns_scattering.to_string(),
    ]);
    for (i, note) in report.notes.iter().enumerate() {
        table.push(vec![format!("note_{i}"), note.clone()]);
    }
    emit(&table.render(format), out)?;
    Ok(EXIT_OK)
}

fn decade(x: f64) -> i64 {
    x.abs().log10().round() as i64
}

fn order_of_magnitude_status(computed: f64, reference: f64) -> &'static str {
    if (decade(computed) - decade(reference)).abs() <= 1 {
        "pass"
    } else {
        "fail"
    }
}

/// Reproduction report for the doped-naphthalene reference scenario: each
/// published figure next to the value this library computes, with the ratio
/// and a pass/flag/fail status at order-of-magnitude (decade) tolerance.
pub fn run_report(
    cfg: &ScenarioConfig,
    reading: HbarReading,
    out: Option<&Path>,
    format: Format,
) -> Result<i32, CommandError> {
    let problem = cfg.search_problem(None, None)?;
    let carriers = cfg.carriers()?;
    let times = closed_form_times(&problem, reading).map_err(invalid)?;
    let mut table = Table::new(vec!["quantity", "computed", "reference", "ratio", "status"]);
    let mut failures = Vec::new();

    let mut row = |name: &str, computed: f64, reference: f64, status: &str| {
        if status == "fail" {
            failures.push(name.to_string());
        }
        table.push(vec![
            name.into(),
            sci(computed),
            sci(reference),
            sci(computed / reference),
            status.into(),
        ]);
    };

    let t0 = times.t0.si();
    row("t0_s", t0, 1e-14, order_of_magnitude_status(t0, 1e-14));
    let tn = times.tn.si();
    let tn_status = if tn >= 1e-11 && tn <= 1e-10 {
        "pass"
    } else if (decade(tn) - decade(1e-10)).abs() <= 1 || (decade(tn) - decade(1e-11)).abs() <= 1 {
        "pass"
    } else {
        "fail"
    };
    row("tn_s", tn, 1e-10, tn_status);

    // scattering rows are published-vs-formula discrepancies: flagged, never
    // failed, with the deviation visible in the ratio column
    let b_scat = Quantity::new(100.0, Unit::InvCm);
    let t_scat_30 = scattering_time_with_thermal_energy(
        b_scat,
        problem.phonons.lattice_relaxation,
        Quantity::new(3.7, Unit::MilliElectronVolt),
    )
    .map_err(invalid)?
    .si();
    row("t_scat_30k_s", t_scat_30, 50e-12, "flag");
    let t_scat_5 = scattering_time(
        b_scat,
        problem.phonons.lattice_relaxation,
        Quantity::new(5.0, Unit::Kelvin),
    )
    .map_err(invalid)?
    .si();
    row("t_scat_5k_s", t_scat_5, 500e-12, "flag");

    let shift = band_shift(Quantity::new(300.0, Unit::InvCm), Quantity::new(100.0, Unit::InvCm))
        .map_err(invalid)?
        .convert(Unit::InvCm)
        .map_err(invalid)?
        .magnitude();
    row(
        "band_shift_cm",
        shift,
        16.0,
        if (shift - 16.2).abs() <= 0.5 { "pass" } else { "fail" },
    );

    let t_f = exciton_search::rates::formation_time(
        &carriers,
        problem.trap_depth,
        problem.phonons.sound_velocity,
    )
    .map_err(invalid)?
    .si();
    row("t_f_s", t_f, 1e-9, order_of_magnitude_status(t_f, 1e-9));

    let t_an = exciton_search::rates::annihilation_time(&carriers)
        .map_err(invalid)?
        .si();
    row("t_an_s", t_an, 1e-11, order_of_magnitude_status(t_an, 1e-11));

    // largest feasible size at 5 K sits far below the 100-site examples;
    // reported as a flag, the tension is in the inputs, not the arithmetic
    let feas = feasibility_condition(
        problem.lattice.n(),
        problem.trap_depth,
        Quantity::new(5.0, Unit::Kelvin),
        problem.phonons.debye_energy,
    )
    .map_err(invalid)?;
    row("max_sites_5k", feas.max_sites as f64, 100.0, "flag");

    emit(&table.render(format), out)?;
    if failures.is_empty() {
        Ok(EXIT_OK)
    } else {
        Err(CommandError::CheckFailed(format!(
            "report rows failed: {}",
            failures.join(", ")
        )))
    }
}

/// Property suite: closed forms against the dense brute-force engine.
pub fn run_verify(
    cfg: &ScenarioConfig,
    convention: Convention,
    out: Option<&Path>,
) -> Result<i32, CommandError> {
    let mut lines = Vec::new();
    let mut all_ok = true;
    let check = |name: &str, ok: bool, detail: String, lines: &mut Vec<String>| {
        lines.push(format!("[{}] {name}: {detail}", if ok { "ok" } else { "FAIL" }));
        ok
    };

    // 1. the two dispersion routes agree
    {
        let mut worst = 0.0f64;
        for (mu, n) in [(1.25, 64usize), (3.0, 256)] {
            let chain =
                PowerLawChain::new(n, Quantity::joules(1.0), Quantity::joules(0.0), mu).unwrap();
            let spec = LatticeSpec::PowerLaw(chain);
            let scale = dispersion_direct(&spec, 0).map_err(invalid)?.si();
            for k in -(n as i64) / 2..=(n as i64) / 2 {
                let d = dispersion_direct(&spec, k).map_err(invalid)?.si();
                let c = dispersion_closed(&chain, k, 1e-10).map_err(invalid)?.si();
                worst = worst.max((d - c).abs() / scale);
            }
        }
        let ok = worst <= 1e-9;
        all_ok &= check(
            "dispersion-equivalence",
            ok,
            format!("max rel diff {worst:.2e} (tol 1e-9)"),
            &mut lines,
        );
    }

    // 2. dense spectra match the analytic circulant bands
    {
        let mut worst = 0.0f64;
        let specs = vec![
            LatticeSpec::PowerLaw(
                PowerLawChain::new(128, Quantity::joules(1.0), Quantity::joules(0.0), 1.25)
                    .unwrap(),
            ),
            LatticeSpec::PowerLaw(
                PowerLawChain::new(64, Quantity::joules(1.0), Quantity::joules(0.0), 3.0).unwrap(),
            ),
            LatticeSpec::Lric(
                LricRing::new(32, Quantity::joules(1.0), Quantity::joules(0.0), 4).unwrap(),
            ),
            LatticeSpec::Lric(
                LricRing::new(64, Quantity::joules(1.0), Quantity::joules(0.0), 8).unwrap(),
            ),
        ];
        for spec in specs {
            let h = build_hamiltonian(&spec, None, convention).map_err(invalid)?;
            let eig = eigendecompose(&h).map_err(invalid)?.eigenvalues;
            let mut reference = circulant_band(&spec, convention);
            reference.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let scale = reference.iter().fold(0.0f64, |m, e| m.max(e.abs()));
            for (e, d) in eig.iter().zip(&reference) {
                worst = worst.max((e - d).abs() / scale);
            }
        }
        let ok = worst <= 1e-8;
        all_ok &= check(
            "spectrum-multiset",
            ok,
            format!("max rel diff {worst:.2e} (tol 1e-8), convention {convention:?}"),
            &mut lines,
        );
    }

    // 3. norm and energy conservation under trap-free evolution
    {
        let chain =
            PowerLawChain::new(48, Quantity::joules(1.0), Quantity::joules(0.0), 1.5).unwrap();
        let h = build_hamiltonian(&LatticeSpec::PowerLaw(chain), None, convention)
            .map_err(invalid)?;
        let psi0 = WalkState::localized(48, 7);
        let psi = evolve(&h, &psi0, 1e3 * HBAR, None).map_err(invalid)?;
        let drift = (psi.norm_squared() - 1.0).abs();
        let ok = drift <= 1e-10;
        all_ok &= check(
            "unitarity",
            ok,
            format!("norm drift {drift:.2e} over 10^3 hbar/J (tol 1e-10)"),
            &mut lines,
        );
    }

    // 4. every cycle site has degree 4, and the uniform state is the
    //    band-edge eigenmode
    {
        let ring = LricRing::new(64, Quantity::joules(1.0), Quantity::joules(0.0), 8).unwrap();
        let spec = LatticeSpec::Lric(ring);
        let h = build_hamiltonian(&spec, None, convention).map_err(invalid)?;
        let degree_ok = (0..64).all(|r| h.row_degree(r) == 4);
        let psi0 = WalkState::uniform(64);
        let psi = evolve(&h, &psi0, 11.0 * HBAR, None).map_err(invalid)?;
        let overlap: f64 = psi
            .amplitudes
            .iter()
            .zip(&psi0.amplitudes)
            .map(|(a, b)| (a.conj() * b).norm())
            .sum::<f64>();
        let mode_ok = (overlap - 1.0).abs() <= 1e-9;
        all_ok &= check(
            "lric-structure",
            degree_ok && mode_ok,
            format!("degree-4 {degree_ok}, uniform band-edge mode {mode_ok}"),
            &mut lines,
        );
    }

    // 5. top-band level-spacing exponent
    {
        let fit = level_spacing_scaling(
            1.25,
            Quantity::joules(1.0),
            &[128, 256, 512],
            BandEnd::Top,
        )
        .map_err(invalid)?;
        let ok = (fit.slope + 0.25).abs() <= 0.1;
        all_ok &= check(
            "level-spacing",
            ok,
            format!("top slope {:.4} (expect -0.25 +/- 0.1)", fit.slope),
            &mut lines,
        );
    }

    // 6. an absorber at the configured trap site drains the uniform state
    {
        let spec = cfg.lattice_spec(None)?;
        let n = spec.n();
        let site = cfg.trap.site;
        if site >= n {
            return Err(invalid(format!("trap.site {site} outside lattice of {n} sites")));
        }
        let h = build_hamiltonian(&spec, None, convention).map_err(invalid)?;
        let rate = Quantity::joules(0.5 * spec.coupling_si());
        let psi0 = WalkState::uniform(n);
        let mut last = 1.0;
        let mut monotone = true;
        for step in 1..=4 {
            let t = step as f64 * 20.0 * HBAR / spec.coupling_si();
            let s = evolve(
                &h,
                &psi0,
                t,
                Some(exciton_search::oracle::Absorber { site, rate }),
            )
            .map_err(invalid)?
            .norm_squared();
            monotone &= s < last && s > 0.0;
            last = s;
        }
        all_ok &= check(
            "absorbing-decay",
            monotone,
            format!("survival falls to {last:.4} at the trap site {site}"),
            &mut lines,
        );
    }

    let mut text = lines.join("\n");
    text.push('\n');
    emit(&text, out)?;
    if all_ok {
        Ok(EXIT_OK)
    } else {
        Err(CommandError::CheckFailed("verification suite failed".into()))
    }
}

/// Analytic circulant eigenvalues matching the matrix construction, used as
/// the independent reference in `verify`.
fn circulant_band(spec: &LatticeSpec, convention: Convention) -> Vec<f64> {
    let n = spec.n();
    match spec {
        LatticeSpec::PowerLaw(c) => {
            let j = c.coupling.si();
            let de = c.on_site.si();
            (0..n)
                .map(|k| {
                    let bk = std::f64::consts::TAU * k as f64 / n as f64;
                    let sum: f64 = match convention {
                        Convention::PaperSum => (1..=n)
                            .map(|d| (bk * d as f64).cos() * (d as f64).powf(-c.exponent))
                            .sum(),
                        Convention::MinimalImage => (1..n)
                            .map(|d| {
                                let dist = d.min(n - d) as f64;
                                0.5 * (bk * d as f64).cos() * dist.powf(-c.exponent)
                            })
                            .sum(),
                    };
                    de + 2.0 * j * sum
                })
                .collect()
        }
        LatticeSpec::Lric(r) => {
            let j = r.coupling.si();
            let de = r.on_site.si();
            (1..=n)
                .map(|k| {
                    let bk = std::f64::consts::TAU * k as f64 / n as f64;
                    de + 2.0 * j * (bk.cos() + (r.stride as f64 * bk).cos())
                })
                .collect()
        }
    }
}

/// Cycle-specific search components for the configured ring.
pub fn run_lric(
    cfg: &ScenarioConfig,
    reading: HbarReading,
    out: Option<&Path>,
    format: Format,
) -> Result<i32, CommandError> {
    let problem = cfg.search_problem(None, None)?;
    let ring = match &problem.lattice {
        LatticeSpec::Lric(r) => *r,
        LatticeSpec::PowerLaw(_) => {
            return Err(invalid("the lric command needs lattice.kind = \"lric\""))
        }
    };
    if ring.n % ring.stride != 0 {
        return Err(invalid(format!(
            "network extension p = N/m must be an integer; N = {}, m = {}",
            ring.n, ring.stride
        )));
    }
    let p = (ring.n / ring.stride) as u64;
    let lt = lric_search_time(&problem, p, reading).map_err(invalid)?;
    let mut table = Table::new(vec!["quantity", "value"]);
    table.push(vec!["sites".into(), ring.n.to_string()]);
    table.push(vec!["stride".into(), ring.stride.to_string()]);
    table.push(vec!["extension_p".into(), p.to_string()]);
    table.push(vec!["t0_s".into(), sci(lt.t0.si())]);
    match lt.tp {
        TpOutcome::Finite(tp) => table.push(vec!["tp_s".into(), sci(tp.si())]),
        TpOutcome::Divergent => table.push(vec!["tp_s".into(), "divergent (p = 4)".into()]),
        TpOutcome::Unphysical(c) => {
            table.push(vec!["tp_s".into(), format!("unphysical (cos = {c:.3})")])
        }
    }
    table.push(vec!["tn_s".into(), sci(lt.tn.si())]);
    match lt.ts {
        Some(ts) => table.push(vec!["ts_s".into(), sci(ts.si())]),
        None => table.push(vec![
            "ts_s".into(),
            "rejected (1/T_0 - 1/T_N not positive)".into(),
        ]),
    }
    table.push(vec![
        "combination".into(),
        "rate difference 1/T_s = 1/T_0 - 1/T_N (unlike the chain's sum)".into(),
    ]);
    emit(&table.render(format), out)?;
    Ok(EXIT_OK)
}
