//! Protocol runs: event generation over the measurement-time grid and the
//! three output files.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use kaon_core::analytic::{self, teleport_coeffs, Observable};
use kaon_core::montecarlo::{self, estimate_asymmetry, estimate_xi, run_ensemble_from, sort_subensembles, ObservableEstimate};
use kaon_core::protocols::{self, outcome_probabilities, Mode, OutcomeProbabilities};
use kaon_core::qstate::PROB_FLOOR;
use kaon_core::{EventRecord, EventSampler, Label, PairBasisVector, ProjectionOutcome, ProtocolSetup};

use crate::config::RunConfig;
use crate::format::{self, num};
use crate::CliError;

pub const EVENTS_FILE: &str = "events.csv";
pub const OBSERVABLES_FILE: &str = "observables.csv";
pub const SUMMARY_FILE: &str = "summary.txt";

/// Width of the acceptance band for MC estimates, in standard errors.
pub const SIGMA_BAND: f64 = 4.0;
/// Significance level of the outcome χ² test.
pub const CHI2_ALPHA: f64 = 1e-3;

const SUBENSEMBLES: [&str; 5] = ["all", "phi1", "phi2", "phi3", "phi4"];

/// Exact and printed-approximation values of the mode's observable for one
/// measurement time, in [`SUBENSEMBLES`] order.
#[derive(Debug, Clone, Copy)]
pub struct ObservableRow {
    pub exact: Observable,
    pub paper: Observable,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

pub fn prepare_out_dir(dir: &Path, force: bool) -> Result<(), CliError> {
    if dir.exists() && !force {
        return Err(CliError::OutputExists(dir.to_path_buf()));
    }
    fs::create_dir_all(dir).map_err(io_err(dir))
}

/// Weighted surviving-component sums of a partner state: ([K⁰, K̄⁰] of b)
/// for teleportation, ([diff, same]) for the pair protocols.
fn partner_weights(setup: &ProtocolSetup, v: PairBasisVector, t_m: f64) -> Result<(f64, f64), CliError> {
    let s = protocols::partner_at(setup, v, t_m)?;
    let a = s.amps();
    Ok(match setup.mode {
        Mode::Teleport { .. } => (a[0].norm_sqr(), a[1].norm_sqr()),
        _ => (a[1].norm_sqr() + a[2].norm_sqr(), a[0].norm_sqr() + a[3].norm_sqr()),
    })
}

/// Exact observables from the state-vector pipeline and the printed
/// approximations, for the unconditioned ensemble and each φ subensemble.
pub fn exact_observables(setup: &ProtocolSetup, probs: &OutcomeProbabilities, t_m: f64) -> Result<[ObservableRow; 5], CliError> {
    let (kin, c) = (&setup.kin, &setup.constants);
    let dt = t_m - kin.t_x;
    let tau_b = kin.proper_time_of(Label::B, dt)?;
    let tau_d = kin.proper_time_of(Label::D, dt)?;
    let undefined = ObservableRow { exact: Observable::Undefined, paper: Observable::Undefined };
    let mut rows = [undefined; 5];
    let (mut num_all, mut den_all) = (0.0, 0.0);
    for v in PairBasisVector::ALL {
        let p = probs.phi[v.index()];
        if p < PROB_FLOOR {
            continue;
        }
        let (x, y) = partner_weights(setup, v, t_m)?;
        num_all += p * x;
        den_all += p * y;
        let row = &mut rows[v.index() + 1];
        match setup.mode {
            Mode::Teleport { alpha, beta } => {
                row.exact = Observable::ratio(x, y);
                let tc = teleport_coeffs(alpha, beta, kin.t_x, kin, c)?;
                let b = analytic::post_projection_b(&tc, v)?;
                row.paper = analytic::xi_paper(b.f, b.g, tau_b, c)?;
            }
            Mode::Swap | Mode::General(_) => {
                row.exact = Observable::ratio(x - y, x + y);
                row.paper = match setup.mode {
                    Mode::Swap => analytic::asym_paper(v, tau_d, tau_b, c)?,
                    _ => Observable::Undefined,
                };
            }
        }
    }
    rows[0] = match setup.mode {
        Mode::Teleport { .. } => ObservableRow { exact: Observable::ratio(num_all, den_all), paper: Observable::Value(1.0) },
        _ => ObservableRow { exact: Observable::ratio(num_all - den_all, num_all + den_all), paper: Observable::Value(0.0) },
    };
    Ok(rows)
}

/// MC estimates for one measurement time, in [`SUBENSEMBLES`] order.
pub fn estimates(setup: &ProtocolSetup, events: &[EventRecord]) -> [ObservableEstimate; 5] {
    let teleport = matches!(setup.mode, Mode::Teleport { .. });
    let est = |ev: &[EventRecord]| if teleport { estimate_xi(ev) } else { estimate_asymmetry(ev) };
    let parts = sort_subensembles(events);
    let t_m = events.first().map_or(f64::NAN, |e| e.t_m);
    let empty = |_: usize| ObservableEstimate { value: Observable::Undefined, stderr: f64::INFINITY, n_used: 0, t_m };
    let mut out: [ObservableEstimate; 5] = std::array::from_fn(empty);
    out[0] = est(events);
    for v in PairBasisVector::ALL {
        if let Some(part) = parts.get(&ProjectionOutcome::from_basis(v)) {
            out[v.index() + 1] = est(part);
        }
    }
    out
}

/// Whether an estimate agrees with its exact value. Estimates resting on no
/// events carry no information and are not counted against the run.
pub fn estimate_agrees(est: &ObservableEstimate, exact: Observable) -> bool {
    est.n_used == 0 || est.within(exact, SIGMA_BAND)
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub lines: Vec<(String, String)>,
    pub out_dir: PathBuf,
}

impl RunSummary {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

fn pass(ok: bool) -> String {
    if ok { "pass" } else { "fail" }.into()
}

pub fn run_protocol(cfg: &RunConfig, force: bool) -> Result<RunSummary, CliError> {
    let setup = cfg.setup().ok_or_else(|| CliError::Config("verify mode does not generate events".into()))?;
    setup.validate()?;
    let probs = outcome_probabilities(&setup)?;
    let teleport = matches!(setup.mode, Mode::Teleport { .. });
    let grid = cfg.grid.points();
    // build every sampler before touching the file system
    let samplers = grid
        .iter()
        .map(|&t| EventSampler::new(&setup, t, cfg.retain))
        .collect::<Result<Vec<_>, _>>()?;

    prepare_out_dir(&cfg.out_dir, force)?;
    let events_path = cfg.out_dir.join(EVENTS_FILE);
    let obs_path = cfg.out_dir.join(OBSERVABLES_FILE);
    let mut events_out = BufWriter::new(File::create(&events_path).map_err(io_err(&events_path))?);
    let mut obs_out = BufWriter::new(File::create(&obs_path).map_err(io_err(&obs_path))?);
    writeln!(events_out, "{}", format::EVENTS_HEADER).map_err(io_err(&events_path))?;
    writeln!(obs_out, "{}", format::observables_header(teleport)).map_err(io_err(&obs_path))?;

    let mut counts = [0u64; 7];
    let mut all_agree = true;
    for (j, sampler) in samplers.iter().enumerate() {
        let first = (j as u64)
            .checked_mul(cfg.n_runs)
            .ok_or_else(|| CliError::Config("key `n_runs`: run indices overflow".into()))?;
        let events = run_ensemble_from(sampler, first, cfg.n_runs, cfg.seed, cfg.workers)?;
        for e in &events {
            format::write_event(&mut events_out, e).map_err(io_err(&events_path))?;
        }
        for (slot, k) in counts.iter_mut().zip(montecarlo::outcome_counts(&events)) {
            *slot += k;
        }
        let exact = exact_observables(&setup, &probs, sampler.t_m())?;
        let mc = estimates(&setup, &events);
        for ((name, row), est) in SUBENSEMBLES.iter().zip(&exact).zip(&mc) {
            all_agree &= estimate_agrees(est, row.exact);
            writeln!(
                obs_out,
                "{},{},{},{},{},{},{}",
                num(sampler.t_m()),
                name,
                format::observable(row.exact),
                format::observable(row.paper),
                format::observable(est.value),
                num(est.stderr),
                est.n_used
            )
            .map_err(io_err(&obs_path))?;
        }
    }
    events_out.flush().map_err(io_err(&events_path))?;
    obs_out.flush().map_err(io_err(&obs_path))?;

    let total: u64 = counts.iter().sum();
    let chi2 = montecarlo::chi_square_from_counts(&counts, &probs);
    let mut lines: Vec<(String, String)> = vec![
        ("mode".into(), cfg.mode.as_str().into()),
        ("seed".into(), cfg.seed.to_string()),
        ("n_runs".into(), cfg.n_runs.to_string()),
        ("grid_points".into(), grid.len().to_string()),
        ("total_events".into(), total.to_string()),
        ("rng".into(), "chacha8 key=seed_from_u64(seed) stream=run_index".into()),
    ];
    for (o, k) in OutcomeProbabilities::ORDER.iter().zip(counts) {
        lines.push((format!("prob.analytic.{}", o.name()), num(probs.get(*o))));
        lines.push((format!("prob.empirical.{}", o.name()), num(k as f64 / total.max(1) as f64)));
    }
    let mut phi4_fidelity = f64::NAN;
    for v in PairBasisVector::ALL {
        let f = if probs.phi[v.index()] < PROB_FLOOR { f64::NAN } else { protocols::teleport_fidelity(&setup, v)? };
        if v == PairBasisVector::Phi4 {
            phi4_fidelity = f;
        }
        lines.push((format!("fidelity.{}", v.name()), num(f)));
    }
    lines.push(("chi2.statistic".into(), num(chi2.statistic)));
    lines.push(("chi2.dof".into(), chi2.dof.to_string()));
    lines.push(("chi2.p_value".into(), num(chi2.p_value())));
    lines.push(("check.probability_total".into(), pass((probs.total() - 1.0).abs() < 1e-12)));
    lines.push(("check.outcome_chi2".into(), pass(chi2.p_value() >= CHI2_ALPHA)));
    lines.push(("check.observables_4sigma".into(), pass(all_agree)));
    // the protocol is exact only without CP violation
    let fid_check = if setup.constants.epsilon.norm() == 0.0 && probs.phi[3] >= PROB_FLOOR {
        pass((phi4_fidelity - 1.0).abs() < 1e-12)
    } else {
        "skipped".into()
    };
    lines.push(("check.fidelity_phi4".into(), fid_check));
    for (k, v) in cfg.entries() {
        lines.push((format!("config.{k}"), v));
    }

    let summary_path = cfg.out_dir.join(SUMMARY_FILE);
    let mut text = String::new();
    for (k, v) in &lines {
        text.push_str(k);
        text.push('=');
        text.push_str(v);
        text.push('\n');
    }
    fs::write(&summary_path, text).map_err(io_err(&summary_path))?;
    Ok(RunSummary { lines, out_dir: cfg.out_dir.clone() })
}

/// Recover the configuration echoed in a summary file.
pub fn config_from_summary(text: &str) -> Result<RunConfig, CliError> {
    let echoed: String = text
        .lines()
        .filter_map(|l| l.strip_prefix("config."))
        .map(|l| format!("{}\n", l.replacen('=', " = ", 1)))
        .collect();
    RunConfig::parse(&echoed, None)
}
