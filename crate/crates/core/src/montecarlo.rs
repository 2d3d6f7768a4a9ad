//! Event generation and subensemble estimators.
//!
//! Each run draws, in order: the collision outcome (including the spoiled
//! branches), then the strangeness measurement of Bob's kaon(s) at lab time
//! `t_m`, where every kaon is found as K⁰, K̄⁰ or already decayed.
//!
//! # Reproducibility
//!
//! Run `k` of an ensemble with master seed `s` uses its own ChaCha8 stream:
//! the key is `ChaCha8Rng::seed_from_u64(s)` and the stream id is `k`. An event
//! is therefore a pure function of `(setup, t_m, s, k)`, and ensembles are
//! identical however many worker threads generate them.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::analytic::Observable;
use crate::error::{Error, Result};
use crate::kaon;
use crate::protocols::{self, bob_retain, Mode, OutcomeProbabilities, ProjectionOutcome, ProtocolSetup, RetainPolicy};
use crate::qstate::{Label, MultiKaonState, PairBasisVector, PROB_FLOOR};

/// Result of a strangeness measurement on one kaon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Detection {
    K0,
    K0bar,
    Decayed,
}

impl Detection {
    const ALL: [Detection; 3] = [Detection::K0, Detection::K0bar, Detection::Decayed];

    pub fn name(self) -> &'static str {
        match self {
            Detection::K0 => "K0",
            Detection::K0bar => "K0bar",
            Detection::Decayed => "decayed",
        }
    }

    fn strangeness(self) -> Option<u8> {
        match self {
            Detection::K0 => Some(0),
            Detection::K0bar => Some(1),
            Detection::Decayed => None,
        }
    }
}

/// One protocol run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRecord {
    pub run_index: u64,
    pub outcome: ProjectionOutcome,
    pub retained: bool,
    /// `None` for spoiled runs.
    pub b_result: Option<Detection>,
    /// Only set for the four-kaon protocols, and `None` for spoiled runs.
    pub d_result: Option<Detection>,
    pub t_m: f64,
}

/// Cumulative measurement table for one collision outcome: (d, b, cdf).
type MeasurementTable = Vec<(Option<Detection>, Detection, f64)>;

/// Everything needed to draw events for a fixed setup and measurement time.
#[derive(Debug, Clone)]
pub struct EventSampler {
    setup: ProtocolSetup,
    t_m: f64,
    policy: RetainPolicy,
    probs: OutcomeProbabilities,
    outcome_cdf: [f64; 7],
    tables: [Option<MeasurementTable>; 4],
}

impl EventSampler {
    pub fn new(setup: &ProtocolSetup, t_m: f64, policy: RetainPolicy) -> Result<Self> {
        setup.validate()?;
        if !(t_m >= setup.kin.t_x) {
            return Err(Error::NegativeTime(t_m - setup.kin.t_x));
        }
        let probs = protocols::outcome_probabilities(setup)?;
        let mut outcome_cdf = [0.0; 7];
        let mut acc = 0.0;
        for (slot, o) in outcome_cdf.iter_mut().zip(OutcomeProbabilities::ORDER) {
            acc += probs.get(o).max(0.0);
            *slot = acc;
        }
        let state = protocols::build_state_at_collision(setup)?;
        let mut tables: [Option<MeasurementTable>; 4] = Default::default();
        for v in PairBasisVector::ALL {
            let proj = protocols::collide_project(&state, v)?;
            if let Some(post) = proj.post {
                tables[v.index()] = Some(measurement_table(setup, &post, t_m)?);
            }
        }
        Ok(EventSampler { setup: *setup, t_m, policy, probs, outcome_cdf, tables })
    }

    pub fn setup(&self) -> &ProtocolSetup {
        &self.setup
    }

    pub fn t_m(&self) -> f64 {
        self.t_m
    }

    pub fn probabilities(&self) -> &OutcomeProbabilities {
        &self.probs
    }

    /// Per-outcome joint detection probabilities, `(d, b, p)`.
    pub fn detection_probabilities(&self, v: PairBasisVector) -> Option<Vec<(Option<Detection>, Detection, f64)>> {
        let table = self.tables[v.index()].as_ref()?;
        let mut prev = 0.0;
        Some(
            table
                .iter()
                .map(|&(d, b, cdf)| {
                    let p = cdf - prev;
                    prev = cdf;
                    (d, b, p)
                })
                .collect(),
        )
    }

    /// Draw the collision outcome only.
    fn draw_outcome<R: Rng>(&self, rng: &mut R) -> ProjectionOutcome {
        let u = rng.random::<f64>() * self.outcome_cdf[6];
        // the cdf is non-decreasing, so a zero-weight category is never the first hit
        let idx = self.outcome_cdf.iter().position(|&c| u < c).unwrap_or_else(|| {
            OutcomeProbabilities::ORDER.iter().rposition(|&o| self.probs.get(o) > 0.0).unwrap_or(6)
        });
        OutcomeProbabilities::ORDER[idx]
    }

    fn measure<R: Rng>(&self, run_index: u64, outcome: ProjectionOutcome, rng: &mut R) -> EventRecord {
        let retained = bob_retain(outcome, &self.policy);
        let (d_result, b_result) = match outcome.basis().and_then(|v| self.tables[v.index()].as_ref()) {
            None => (None, None),
            Some(table) => {
                let u = rng.random::<f64>() * table.last().map_or(1.0, |t| t.2);
                let &(d, b, _) = table.iter().find(|t| u < t.2).unwrap_or(table.last().expect("table is non-empty"));
                (d, Some(b))
            }
        };
        EventRecord { run_index, outcome, retained, b_result, d_result, t_m: self.t_m }
    }

    pub fn sample_with<R: Rng>(&self, run_index: u64, rng: &mut R) -> EventRecord {
        let outcome = self.draw_outcome(rng);
        self.measure(run_index, outcome, rng)
    }

    /// Run `run_index` on its own stream of `master_seed`.
    pub fn sample(&self, master_seed: u64, run_index: u64) -> EventRecord {
        self.sample_with(run_index, &mut event_rng(master_seed, run_index))
    }

    /// Like [`sample`](Self::sample) but Bob acts when the outcome arrives:
    /// runs whose outcome fails `keep` are dropped before measurement. The
    /// kept runs are identical to the corresponding post-hoc sorted runs.
    pub fn sample_conditioned(&self, master_seed: u64, run_index: u64, keep: impl Fn(ProjectionOutcome) -> bool) -> Option<EventRecord> {
        let mut rng = event_rng(master_seed, run_index);
        let outcome = self.draw_outcome(&mut rng);
        keep(outcome).then(|| self.measure(run_index, outcome, &mut rng))
    }
}

/// The per-run random stream.
pub fn event_rng(master_seed: u64, run_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(run_index);
    rng
}

fn cumulative(entries: Vec<(Option<Detection>, Detection, f64)>) -> MeasurementTable {
    let mut acc = 0.0;
    entries
        .into_iter()
        .map(|(d, b, p)| {
            acc += p.max(0.0);
            (d, b, acc)
        })
        .collect()
}

fn measurement_table(setup: &ProtocolSetup, post: &MultiKaonState, t_m: f64) -> Result<MeasurementTable> {
    let (kin, c) = (&setup.kin, &setup.constants);
    let dt = t_m - kin.t_x;
    match setup.mode {
        Mode::Teleport { .. } => {
            let evolved = kaon::evolve_state(post, dt, kin, c)?;
            let p0 = evolved.amp(&[0]).norm_sqr();
            let p1 = evolved.amp(&[1]).norm_sqr();
            Ok(cumulative(vec![
                (None, Detection::K0, p0),
                (None, Detection::K0bar, p1),
                (None, Detection::Decayed, 1.0 - p0 - p1),
            ]))
        }
        Mode::Swap | Mode::General(_) => {
            // labels are [d, b]
            let u_d = kaon::evolution_matrix(kin.proper_time_of(Label::D, dt)?, c)?;
            let u_b = kaon::evolution_matrix(kin.proper_time_of(Label::B, dt)?, c)?;
            let both = post.apply_single(Label::D, &u_d)?.apply_single(Label::B, &u_b)?;
            let d_only = post.apply_single(Label::D, &u_d)?;
            let b_only = post.apply_single(Label::B, &u_b)?;
            let joint = |x: u8, y: u8| both.amp(&[x, y]).norm_sqr();
            let d_marg = |x: u8| d_only.amp(&[x, 0]).norm_sqr() + d_only.amp(&[x, 1]).norm_sqr();
            let b_marg = |y: u8| b_only.amp(&[0, y]).norm_sqr() + b_only.amp(&[1, y]).norm_sqr();
            let mut entries = Vec::with_capacity(9);
            let mut total = 0.0;
            for d in Detection::ALL {
                for b in Detection::ALL {
                    let p = match (d.strangeness(), b.strangeness()) {
                        (Some(x), Some(y)) => joint(x, y),
                        (Some(x), None) => d_marg(x) - joint(x, 0) - joint(x, 1),
                        (None, Some(y)) => b_marg(y) - joint(0, y) - joint(1, y),
                        (None, None) => continue,
                    };
                    let p = p.max(0.0);
                    total += p;
                    entries.push((Some(d), b, p));
                }
            }
            entries.push((Some(Detection::Decayed), Detection::Decayed, (1.0 - total).max(0.0)));
            Ok(cumulative(entries))
        }
    }
}

/// Draw one event for a given setup; builds a fresh [`EventSampler`].
pub fn sample_event<R: Rng>(setup: &ProtocolSetup, t_m: f64, run_index: u64, rng: &mut R) -> Result<EventRecord> {
    Ok(EventSampler::new(setup, t_m, RetainPolicy::default())?.sample_with(run_index, rng))
}

/// `n_runs` events ordered by run index. `workers = None` uses every core.
pub fn run_ensemble_with(sampler: &EventSampler, n_runs: u64, master_seed: u64, workers: Option<usize>) -> Result<Vec<EventRecord>> {
    run_ensemble_from(sampler, 0, n_runs, master_seed, workers)
}

/// Runs `first_index .. first_index + n_runs`, e.g. one block per point of a
/// measurement-time grid.
pub fn run_ensemble_from(sampler: &EventSampler, first_index: u64, n_runs: u64, master_seed: u64, workers: Option<usize>) -> Result<Vec<EventRecord>> {
    if n_runs == 0 {
        return Err(Error::InvalidSetup("n_runs must be at least 1".into()));
    }
    let end = first_index
        .checked_add(n_runs)
        .ok_or_else(|| Error::InvalidSetup("run index range overflows u64".into()))?;
    let generate = || (first_index..end).into_par_iter().map(|k| sampler.sample(master_seed, k)).collect();
    match workers {
        None => Ok(generate()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::InvalidSetup(format!("thread pool: {e}")))?;
            Ok(pool.install(generate))
        }
    }
}

pub fn run_ensemble(setup: &ProtocolSetup, t_m: f64, n_runs: u64, master_seed: u64) -> Result<Vec<EventRecord>> {
    run_ensemble_with(&EventSampler::new(setup, t_m, RetainPolicy::default())?, n_runs, master_seed, None)
}

/// Partition events by collision outcome, keeping run order inside each part.
pub fn sort_subensembles(events: &[EventRecord]) -> BTreeMap<ProjectionOutcome, Vec<EventRecord>> {
    let mut parts: BTreeMap<ProjectionOutcome, Vec<EventRecord>> = BTreeMap::new();
    for e in events {
        parts.entry(e.outcome).or_default().push(*e);
    }
    parts
}

/// A Monte Carlo estimate of ξ or A.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableEstimate {
    pub value: Observable,
    /// Binomial standard error; infinite when `value` is not finite.
    pub stderr: f64,
    pub n_used: u64,
    pub t_m: f64,
}

impl ObservableEstimate {
    /// `|value − expected| ≤ k·stderr`, with a small absolute slack for
    /// degenerate (zero-variance) estimates.
    pub fn within(&self, expected: Observable, k: f64) -> bool {
        match (self.value, expected) {
            (Observable::Value(v), Observable::Value(e)) => (v - e).abs() <= k * self.stderr + 1e-12,
            (a, b) => a == b,
        }
    }
}

fn t_m_of(events: &[EventRecord]) -> f64 {
    events.first().map_or(f64::NAN, |e| e.t_m)
}

/// ξ = N(K⁰)/N(K̄⁰) over surviving b kaons.
pub fn estimate_xi(events: &[EventRecord]) -> ObservableEstimate {
    let (mut n0, mut n1) = (0u64, 0u64);
    for e in events {
        match e.b_result {
            Some(Detection::K0) => n0 += 1,
            Some(Detection::K0bar) => n1 += 1,
            _ => {}
        }
    }
    let n = n0 + n1;
    let t_m = t_m_of(events);
    if n1 == 0 {
        let value = if n0 == 0 { Observable::Undefined } else { Observable::Infinite };
        return ObservableEstimate { value, stderr: f64::INFINITY, n_used: n, t_m };
    }
    let p = n0 as f64 / n as f64;
    let stderr = (p * (1.0 - p) / n as f64).sqrt() / (1.0 - p).powi(2);
    ObservableEstimate { value: Observable::Value(n0 as f64 / n1 as f64), stderr, n_used: n, t_m }
}

/// A = (N_diff − N_same)/(N_diff + N_same) over runs where d and b both survive.
pub fn estimate_asymmetry(events: &[EventRecord]) -> ObservableEstimate {
    let (mut diff, mut same) = (0u64, 0u64);
    for e in events {
        let pair = (e.d_result.and_then(Detection::strangeness), e.b_result.and_then(Detection::strangeness));
        if let (Some(x), Some(y)) = pair {
            if x == y {
                same += 1;
            } else {
                diff += 1;
            }
        }
    }
    let n = diff + same;
    let t_m = t_m_of(events);
    if n == 0 {
        return ObservableEstimate { value: Observable::Undefined, stderr: f64::INFINITY, n_used: 0, t_m };
    }
    let p = diff as f64 / n as f64;
    ObservableEstimate {
        value: Observable::Value((diff as f64 - same as f64) / n as f64),
        stderr: 2.0 * (p * (1.0 - p) / n as f64).sqrt(),
        n_used: n,
        t_m,
    }
}

/// Pearson χ² of observed outcome counts against expected probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
}

impl ChiSquare {
    pub fn p_value(&self) -> f64 {
        if self.dof == 0 {
            return if self.statistic == 0.0 { 1.0 } else { 0.0 };
        }
        if !self.statistic.is_finite() {
            return 0.0;
        }
        ChiSquared::new(self.dof as f64).map(|d| d.sf(self.statistic)).unwrap_or(0.0)
    }
}

/// χ² over the seven outcome categories; categories with zero expected
/// probability contribute no degree of freedom but make the statistic
/// infinite if any event lands in them.
pub fn outcome_chi_square(events: &[EventRecord], probs: &OutcomeProbabilities) -> ChiSquare {
    chi_square_from_counts(&outcome_counts(events), probs)
}

/// Number of events per outcome, in [`OutcomeProbabilities::ORDER`].
pub fn outcome_counts(events: &[EventRecord]) -> [u64; 7] {
    let mut counts = [0u64; 7];
    for e in events {
        if let Some(i) = OutcomeProbabilities::ORDER.iter().position(|&o| o == e.outcome) {
            counts[i] += 1;
        }
    }
    counts
}

/// As [`outcome_chi_square`], from counts accumulated elsewhere.
pub fn chi_square_from_counts(counts: &[u64; 7], probs: &OutcomeProbabilities) -> ChiSquare {
    let n = counts.iter().sum::<u64>() as f64;
    let mut statistic = 0.0;
    let mut categories = 0usize;
    for (o, &k) in OutcomeProbabilities::ORDER.iter().zip(counts) {
        let expected = n * probs.get(*o);
        if probs.get(*o) < PROB_FLOOR {
            if k > 0 {
                statistic = f64::INFINITY;
            }
            continue;
        }
        categories += 1;
        statistic += (k as f64 - expected).powi(2) / expected;
    }
    ChiSquare { statistic, dof: categories.saturating_sub(1) }
}

/// Empirical frequency of each outcome, in [`OutcomeProbabilities::ORDER`].
pub fn outcome_frequencies(events: &[EventRecord]) -> [f64; 7] {
    let n = events.len().max(1) as f64;
    outcome_counts(events).map(|k| k as f64 / n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kaon::{Constants, Kinematics};
    use crate::protocols::DecayedSubsystem;
    use num_complex::Complex64 as C64;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn teleport_setup(t_x: f64) -> ProtocolSetup {
        let mode = Mode::Teleport { alpha: c(0.6, 0.0), beta: c(0.0, 0.8) };
        ProtocolSetup::new(mode, Kinematics { t_x, ..Kinematics::default() }, Constants::paper()).unwrap()
    }

    fn record(run_index: u64, outcome: ProjectionOutcome) -> EventRecord {
        EventRecord { run_index, outcome, retained: false, b_result: None, d_result: None, t_m: 0.0 }
    }

    #[test]
    fn phi1_at_collision_time_is_k0bar() {
        let s = teleport_setup(0.0);
        let sampler = EventSampler::new(&s, 0.0, RetainPolicy::default()).unwrap();
        let table = sampler.detection_probabilities(PairBasisVector::Phi1).unwrap();
        assert_eq!(table.len(), 3);
        assert!((table[1].2 - 1.0).abs() < 1e-15);
        let events = run_ensemble_with(&sampler, 2000, 7, Some(2)).unwrap();
        for e in events.iter().filter(|e| e.outcome == ProjectionOutcome::Phi1) {
            assert_eq!(e.b_result, Some(Detection::K0bar));
        }
    }

    #[test]
    fn swap_singlet_outcome_is_anticorrelated_at_collision() {
        let s = ProtocolSetup::new(Mode::Swap, Kinematics { t_x: 0.3, ..Kinematics::default() }, Constants::paper()).unwrap();
        let sampler = EventSampler::new(&s, 0.3, RetainPolicy::default()).unwrap();
        let events = run_ensemble_with(&sampler, 4000, 11, None).unwrap();
        let mut seen = 0;
        for e in events.iter().filter(|e| e.outcome == ProjectionOutcome::Phi4) {
            let (d, b) = (e.d_result.unwrap(), e.b_result.unwrap());
            assert_ne!(d, b);
            assert!(e.retained);
            seen += 1;
        }
        assert!(seen > 500);
    }

    #[test]
    fn spoiled_events_carry_no_measurement() {
        let s = teleport_setup(2.0);
        let events = run_ensemble(&s, 2.5, 3000, 5).unwrap();
        let spoiled: Vec<_> = events.iter().filter(|e| e.outcome.is_spoiled()).collect();
        assert!(!spoiled.is_empty());
        for e in spoiled {
            assert!(e.b_result.is_none() && e.d_result.is_none() && !e.retained);
        }
    }

    #[test]
    fn determinism_across_workers() {
        let s = teleport_setup(0.4);
        let sampler = EventSampler::new(&s, 1.0, RetainPolicy::default()).unwrap();
        let one = run_ensemble_with(&sampler, 5000, 99, Some(1)).unwrap();
        let many = run_ensemble_with(&sampler, 5000, 99, Some(8)).unwrap();
        assert_eq!(one, many);
        let other = run_ensemble_with(&sampler, 5000, 100, Some(8)).unwrap();
        assert_ne!(one.iter().map(|e| e.outcome).collect::<Vec<_>>(), other.iter().map(|e| e.outcome).collect::<Vec<_>>());
        assert!(one.iter().enumerate().all(|(i, e)| e.run_index == i as u64));
    }

    #[test]
    fn zero_runs_rejected() {
        assert!(run_ensemble(&teleport_setup(0.0), 0.0, 0, 1).is_err());
    }

    #[test]
    fn measurement_before_collision_rejected() {
        assert!(EventSampler::new(&teleport_setup(1.0), 0.5, RetainPolicy::default()).is_err());
    }

    #[test]
    fn sorting_partitions() {
        assert!(sort_subensembles(&[]).is_empty());
        let evs = [
            record(0, ProjectionOutcome::Phi4),
            record(1, ProjectionOutcome::Spoiled(DecayedSubsystem::Pair)),
            record(2, ProjectionOutcome::Phi4),
        ];
        let parts = sort_subensembles(&evs);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[&ProjectionOutcome::Phi4].iter().map(|e| e.run_index).collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(parts[&ProjectionOutcome::Spoiled(DecayedSubsystem::Pair)].len(), 1);
    }

    #[test]
    fn xi_estimator_markers_and_error() {
        let mut evs = vec![record(0, ProjectionOutcome::Phi2); 3];
        for e in &mut evs {
            e.b_result = Some(Detection::K0);
        }
        let est = estimate_xi(&evs);
        assert_eq!(est.value, Observable::Infinite);
        assert_eq!(est.n_used, 3);
        evs[0].b_result = Some(Detection::K0bar);
        evs[1].b_result = Some(Detection::Decayed);
        let est = estimate_xi(&evs);
        assert_eq!(est.value, Observable::Value(1.0));
        assert_eq!(est.n_used, 2);
        assert!((est.stderr - (0.25f64 / 2.0).sqrt() / 0.25).abs() < 1e-15);
        assert_eq!(estimate_xi(&[]).value, Observable::Undefined);
    }

    #[test]
    fn asymmetry_estimator() {
        let mk = |d, b| EventRecord { d_result: Some(d), b_result: Some(b), ..record(0, ProjectionOutcome::Phi4) };
        let evs = [
            mk(Detection::K0, Detection::K0bar),
            mk(Detection::K0bar, Detection::K0),
            mk(Detection::K0, Detection::K0),
            mk(Detection::Decayed, Detection::K0),
        ];
        let est = estimate_asymmetry(&evs);
        assert_eq!(est.n_used, 3);
        assert!((est.value.value().unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(estimate_asymmetry(&evs[3..]).value, Observable::Undefined);
    }

    #[test]
    fn conditioned_generation_matches_sorting() {
        let h = FRAC_1_SQRT_2;
        let mode = Mode::Teleport { alpha: c(h, 0.0), beta: c(h, 0.0) };
        let s = ProtocolSetup::new(mode, Kinematics { t_x: 0.2, ..Kinematics::default() }, Constants::paper()).unwrap();
        let sampler = EventSampler::new(&s, 1.2, RetainPolicy::default()).unwrap();
        let all = run_ensemble_with(&sampler, 3000, 3, None).unwrap();
        let sorted = sort_subensembles(&all).remove(&ProjectionOutcome::Phi3).unwrap();
        let live: Vec<_> = (0..3000).filter_map(|k| sampler.sample_conditioned(3, k, |o| o == ProjectionOutcome::Phi3)).collect();
        assert_eq!(sorted, live);
    }

    #[test]
    fn pair_detection_table_sums_to_one() {
        let kin = Kinematics { t_x: 0.5, t_z: 0.1, gamma_b: 2.0, gamma_d: 1.5, ..Kinematics::default() };
        let s = ProtocolSetup::new(Mode::Swap, kin, Constants::paper().with_epsilon(c(0.002, 0.001))).unwrap();
        let sampler = EventSampler::new(&s, 1.4, RetainPolicy::default()).unwrap();
        for v in PairBasisVector::ALL {
            let t = sampler.detection_probabilities(v).unwrap();
            assert_eq!(t.len(), 9);
            assert!(t.iter().all(|x| x.2 >= 0.0));
            assert!((t.iter().map(|x| x.2).sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn chi_square_flags_impossible_category() {
        let s = teleport_setup(0.0);
        let probs = protocols::outcome_probabilities(&s).unwrap();
        let evs = vec![record(0, ProjectionOutcome::Spoiled(DecayedSubsystem::Both))];
        let chi = outcome_chi_square(&evs, &probs);
        assert!(chi.statistic.is_infinite());
        assert_eq!(chi.p_value(), 0.0);
    }
}
