//! `verify` mode: the invariant suite, analytic and state-vector only.

use std::f64::consts::FRAC_1_SQRT_2;

use kaon_core::analytic::{self, closed_form_evolve, swap_coeffs, teleport_coeffs, Observable};
use kaon_core::kaon::{self, mass_eigenstates};
use kaon_core::protocols::{self, build_state_at_collision, collide_project, collide_project_with, outcome_probabilities, CollisionUnitary, GeneralSource, Mode};
use kaon_core::{Constants, Kinematics, Label, Matrix2, PairBasisVector, ProtocolSetup, SingleKaon, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::format::num;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Largest deviation seen, or another short note.
    pub detail: String,
}

impl Check {
    fn max_err(name: &'static str, err: f64, tol: f64) -> Check {
        Check { name, passed: err < tol, detail: format!("max_err={err:.3e} tol={tol:.0e}") }
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn unit(rng: &mut ChaCha8Rng) -> SingleKaon {
    loop {
        let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        if let Ok(k) = SingleKaon::new(c(v[0], v[1]), c(v[2], v[3])).normalized() {
            return k;
        }
    }
}

/// exp(−iHτ) of the effective generator by scaling and squaring a Taylor
/// series, a route that never diagonalizes anything.
fn series_propagator(tau: f64, k: &Constants) -> Matrix2 {
    let (p, q) = (k.p(), k.q());
    let sigma = (k.lambda_s() + k.lambda_l()) / 2.0;
    let delta = (k.lambda_s() - k.lambda_l()) / 2.0;
    let f = -C64::i() * tau;
    let a = Matrix2::new(sigma * f, delta * p / q * f, delta * q / p * f, sigma * f);
    let squarings = (a.max_abs().max(1.0).log2().ceil() as i32 + 4).max(0);
    let s = 0.5f64.powi(squarings);
    let a = Matrix2::new(a.0[0][0] * s, a.0[0][1] * s, a.0[1][0] * s, a.0[1][1] * s);
    let mut term = Matrix2::IDENTITY;
    let mut sum = Matrix2::IDENTITY;
    for n in 1..30 {
        let t = term.mul(&a);
        let inv = 1.0 / f64::from(n);
        term = Matrix2::new(t.0[0][0] * inv, t.0[0][1] * inv, t.0[1][0] * inv, t.0[1][1] * inv);
        sum = Matrix2::new(sum.0[0][0] + term.0[0][0], sum.0[0][1] + term.0[0][1], sum.0[1][0] + term.0[1][0], sum.0[1][1] + term.0[1][1]);
    }
    for _ in 0..squarings {
        sum = sum.mul(&sum);
    }
    sum
}

type CheckResult = kaon_core::Result<Check>;

fn constants_check() -> CheckResult {
    let k = Constants::paper();
    let rel_l = (k.gamma_l / 1.7507e-3 - 1.0).abs();
    let rel_m = (k.delta_m / 0.4738 - 1.0).abs();
    Ok(Check {
        name: "constants",
        passed: rel_l < 1e-3 && rel_m < 5e-3,
        detail: format!("gamma_l={} delta_m={}", num(k.gamma_l), num(k.delta_m)),
    })
}

fn closed_form_check(rng: &mut ChaCha8Rng) -> CheckResult {
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let k = Constants::paper().with_epsilon(c(rng.random_range(0.0..0.01), 0.0));
        let s = unit(rng);
        let tau = rng.random_range(0.0..10.0);
        let [f, g] = series_propagator(tau, &k).apply(s.as_array());
        let cf = closed_form_evolve(s.f, s.g, tau, &k)?;
        let mx = kaon::evolve(&s, tau, &k)?;
        worst = worst.max((cf.f - f).norm()).max((cf.g - g).norm()).max((mx.f - f).norm()).max((mx.g - g).norm());
    }
    Ok(Check::max_err("closed_form_vs_series", worst, 1e-10))
}

fn r_identity_check() -> CheckResult {
    let mut worst: f64 = 0.0;
    for eps in [0.0, 0.002, 0.01] {
        let k = Constants::paper().with_epsilon(c(eps, 0.0));
        let (ks, kl) = mass_eigenstates(&k);
        let lk = kl.state(Label::A).tensor(&ks.state(Label::B))?;
        let kk = ks.state(Label::A).tensor(&kl.state(Label::B))?;
        let singlet = kaon::epr_singlet(Label::A, Label::B)?;
        for (i, amp) in singlet.amps().iter().enumerate() {
            let mass = k.r() * (lk.amps()[i] - kk.amps()[i]) * FRAC_1_SQRT_2;
            worst = worst.max((amp - mass).norm());
        }
    }
    Ok(Check::max_err("singlet_r_identity", worst, 1e-12))
}

fn random_teleport(rng: &mut ChaCha8Rng, eps: f64) -> kaon_core::Result<ProtocolSetup> {
    let s = unit(rng);
    let g = rng.random_range(1.0..4.0);
    let t_z = rng.random_range(0.0..2.0);
    let kin = Kinematics {
        gamma_a: g,
        gamma_b: g,
        gamma_c: rng.random_range(1.0..10.0),
        t_z,
        t_x: t_z + rng.random_range(0.0..3.0),
        ..Kinematics::default()
    };
    ProtocolSetup::new(Mode::Teleport { alpha: s.f, beta: s.g }, kin, Constants::paper().with_epsilon(c(eps, 0.0)))
}

fn projection_check(rng: &mut ChaCha8Rng) -> CheckResult {
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let eps = rng.random_range(0.0..0.01);
        let s = random_teleport(rng, eps)?;
        let Mode::Teleport { alpha, beta } = s.mode else { unreachable!() };
        let state = build_state_at_collision(&s)?;
        let probs = analytic::projection_probs(&teleport_coeffs(alpha, beta, s.kin.t_x, &s.kin, &s.constants)?);
        let mut total = 0.0;
        for v in PairBasisVector::ALL {
            let p = collide_project(&state, v)?.prob;
            worst = worst.max((p - probs[v.index()]).abs());
            total += p;
        }
        worst = worst.max((total - state.norm2()).abs());
    }
    Ok(Check::max_err("projection_probabilities", worst, 1e-12))
}

fn fidelity_check(rng: &mut ChaCha8Rng) -> CheckResult {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let s = unit(rng);
        let kin = Kinematics { gamma_c: rng.random_range(1.0..10.0), t_x: rng.random_range(0.0..5.0), ..Kinematics::default() };
        let setup = ProtocolSetup::new(Mode::Teleport { alpha: s.f, beta: s.g }, kin, Constants::paper())?;
        worst = worst.max((protocols::teleport_fidelity(&setup, PairBasisVector::Phi4)? - 1.0).abs());
    }
    Ok(Check::max_err("teleport_fidelity_phi4", worst, 1e-12))
}

fn swap_check(rng: &mut ChaCha8Rng) -> CheckResult {
    let swap0 = ProtocolSetup::new(Mode::Swap, Kinematics::default(), Constants::paper())?;
    let mut worst = (protocols::teleport_fidelity(&swap0, PairBasisVector::Phi4)? - 1.0).abs();
    for _ in 0..200 {
        let k = Constants::paper().with_epsilon(c(rng.random_range(0.0..0.01), 0.0));
        let (gdc, gab) = (rng.random_range(1.0..3.0), rng.random_range(1.0..3.0));
        let t_z = rng.random_range(0.0..1.0);
        let kin = Kinematics { gamma_a: gab, gamma_b: gab, gamma_c: gdc, gamma_d: gdc, t_z, t_x: t_z + rng.random_range(0.0..1.0), ..Kinematics::default() };
        let setup = ProtocolSetup::new(Mode::Swap, kin, k)?;
        let t_m = kin.t_x + rng.random_range(0.0..4.0);
        let (td, tb) = (gdc * (t_m - kin.t_x), gab * (t_m - kin.t_x));
        for v in [PairBasisVector::Phi3, PairBasisVector::Phi4] {
            let state = protocols::partner_at(&setup, v, t_m)?;
            let sc = swap_coeffs(v, td, tb, &k)?;
            // d first in g₁…g₄; index d | b << 1 in the state
            let g = [sc.g1, sc.g3, sc.g2, sc.g4];
            let ip: C64 = state.amps().iter().zip(&g).map(|(x, y)| x.conj() * y).sum();
            let ph = if ip.norm() > 0.0 { ip / ip.norm() } else { c(1.0, 0.0) };
            for (x, y) in state.amps().iter().zip(&g) {
                worst = worst.max((x * ph - y).norm());
            }
            if v == PairBasisVector::Phi4 {
                worst = worst.max((sc.g3.norm() - sc.g2.norm()).abs());
            }
        }
    }
    Ok(Check::max_err("swap_coefficients", worst, 1e-12))
}

fn grid() -> impl Iterator<Item = f64> {
    (0..20).map(|i| f64::from(i) * 0.5)
}

fn reconciliation_check() -> CheckResult {
    let k = Constants::paper();
    let k0 = k.with_delta_m(0.0);
    let mut worst_zero: f64 = 0.0;
    let mut worst_cos: f64 = 0.0;
    let diff = |a: Observable, b: Observable| match (a, b) {
        (Observable::Value(x), Observable::Value(y)) => (x - y).abs(),
        (x, y) if x == y => 0.0,
        _ => f64::INFINITY,
    };
    for (i, tb) in grid().enumerate() {
        let td = 0.25 * i as f64;
        for v in [PairBasisVector::Phi1, PairBasisVector::Phi2, PairBasisVector::Phi3] {
            let tdv = if v == PairBasisVector::Phi3 { td } else { tb };
            worst_zero = worst_zero.max(diff(analytic::asym_exact(&swap_coeffs(v, tdv, tb, &k0)?), analytic::asym_paper(v, tdv, tb, &k0)?));
        }
        let (a, b) = (c(0.6, 0.0), c(0.0, 0.8));
        let (xe, xp) = (analytic::xi_exact(a, b, tb, &k0)?, analytic::xi_paper(a, b, tb, &k0)?);
        worst_zero = worst_zero.max(diff(xe, xp) / xe.value().unwrap_or(1.0).max(1.0));
        let e = analytic::asym_exact(&swap_coeffs(PairBasisVector::Phi3, td, tb, &k)?);
        let p = analytic::asym_paper(PairBasisVector::Phi3, td, tb, &k)?;
        if let (Some(e), Some(p)) = (e.value(), p.value()) {
            worst_cos = worst_cos.max((e - p * (k.delta_m * (td + tb)).cos()).abs());
        }
    }
    Ok(Check {
        name: "paper_reconciliation",
        passed: worst_zero < 1e-12 && worst_cos < 1e-10,
        detail: format!("dm0_err={worst_zero:.3e} cos_err={worst_cos:.3e}"),
    })
}

fn limits_check() -> CheckResult {
    let k = Constants::paper();
    let mut worst: f64 = 0.0;
    for t in grid() {
        worst = worst.max((analytic::xi_unconditioned(t, &k)?.value().unwrap_or(f64::NAN) - 1.0).abs());
        worst = worst.max(analytic::asym_unconditioned(t, 0.5 * t, &k)?.value().unwrap_or(f64::NAN).abs());
    }
    let a = |v| analytic::asym_exact(&swap_coeffs(v, 0.0, 0.0, &k).expect("zero times are valid")).value().unwrap_or(f64::NAN);
    worst = worst.max((a(PairBasisVector::Phi4) - 1.0).abs());
    worst = worst.max((a(PairBasisVector::Phi1) + 1.0).abs());
    worst = worst.max((a(PairBasisVector::Phi2) + 1.0).abs());
    Ok(Check::max_err("limiting_values", if worst.is_nan() { f64::INFINITY } else { worst }, 1e-12))
}

fn bookkeeping_check(rng: &mut ChaCha8Rng) -> CheckResult {
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let eps = rng.random_range(0.0..0.01);
        let s = random_teleport(rng, eps)?;
        let swap = ProtocolSetup { mode: Mode::Swap, ..s };
        for setup in [s, swap] {
            worst = worst.max((outcome_probabilities(&setup)?.total() - 1.0).abs());
        }
    }
    Ok(Check::max_err("probability_bookkeeping", worst, 1e-12))
}

fn reduction_check(rng: &mut ChaCha8Rng) -> CheckResult {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let k = Constants::paper().with_epsilon(c(rng.random_range(0.0..0.01), 0.0));
        let t_x = rng.random_range(0.0..3.0);
        let g = rng.random_range(1.0..3.0);
        let kin = Kinematics { gamma_a: g, gamma_b: g, t_z: t_x, t_x, ..Kinematics::default() };
        let (w, ab) = (unit(rng), unit(rng));
        let general = ProtocolSetup::new(Mode::General(GeneralSource { c1: ab.f, w1: w, c2: ab.g, w2: w }), kin, k)?;
        let pure = ProtocolSetup::new(Mode::Teleport { alpha: ab.f, beta: ab.g }, kin, k)?;
        let gs = ProtocolSetup::new(Mode::General(GeneralSource::singlet()), kin, k)?;
        let swap = ProtocolSetup::new(Mode::Swap, kin, k)?;
        for v in PairBasisVector::ALL {
            let expected = w.state(Label::D).tensor(&protocols::partner_after_collision(&pure, v)?)?;
            worst = worst.max(protocols::partner_after_collision(&general, v)?.phase_aligned_distance(&expected, false)?);
            let a = protocols::partner_after_collision(&gs, v)?;
            worst = worst.max(a.phase_aligned_distance(&protocols::partner_after_collision(&swap, v)?, false)?);
        }
    }
    Ok(Check::max_err("general_reductions", worst, 1e-12))
}

fn evolution_check(rng: &mut ChaCha8Rng) -> CheckResult {
    let mut worst: f64 = 0.0;
    let mut monotone = true;
    for _ in 0..500 {
        let k = Constants::paper().with_epsilon(c(rng.random_range(0.0..0.01), 0.0));
        let s = unit(rng);
        let (t1, t2) = (rng.random_range(0.0..10.0), rng.random_range(0.0..10.0));
        let once = kaon::evolve(&s, t1 + t2, &k)?;
        let first = kaon::evolve(&s, t1, &k)?;
        let twice = kaon::evolve(&first, t2, &k)?;
        worst = worst.max((once.f - twice.f).norm()).max((once.g - twice.g).norm());
        monotone &= t2 <= 0.0 || once.survival() < first.survival();
    }
    Ok(Check { name: "evolution_semigroup", passed: worst < 1e-12 && monotone, detail: format!("max_err={worst:.3e} norm_decay={monotone}") })
}

fn collision_check(rng: &mut ChaCha8Rng) -> CheckResult {
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let s = random_teleport(rng, 0.0)?;
        let state = build_state_at_collision(&s)?;
        let u = CollisionUnitary { phases: std::array::from_fn(|_| rng.random_range(-3.2..3.2)) };
        for v in PairBasisVector::ALL {
            let a = collide_project(&state, v)?;
            let b = collide_project_with(&state, v, &u)?;
            worst = worst.max((a.prob - b.prob).abs());
            if let (Some(x), Some(y)) = (&a.post, &b.post) {
                worst = worst.max(x.phase_aligned_distance(y, false)?);
            }
        }
    }
    Ok(Check::max_err("collision_block_invariance", worst, 1e-12))
}

/// Run the whole suite with draws from `seed`.
pub fn run_checks(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let results: Vec<CheckResult> = vec![
        constants_check(),
        closed_form_check(&mut rng),
        r_identity_check(),
        projection_check(&mut rng),
        fidelity_check(&mut rng),
        swap_check(&mut rng),
        reconciliation_check(),
        limits_check(),
        bookkeeping_check(&mut rng),
        reduction_check(&mut rng),
        evolution_check(&mut rng),
        collision_check(&mut rng),
    ];
    results
        .into_iter()
        .map(|r| r.unwrap_or_else(|e| Check { name: "internal_error", passed: false, detail: e.to_string() }))
        .collect()
}

pub fn render(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for ch in checks {
        out.push_str(&format!("{:<width$}  {}  {}\n", ch.name, if ch.passed { "PASS" } else { "FAIL" }, ch.detail));
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    out.push_str(&format!("{} checks, {} failed\n", checks.len(), failed));
    out
}
