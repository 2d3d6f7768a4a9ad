//! Closed-form expressions for the protocol observables.
//!
//! Everything here is written out term by term from the printed formulas and
//! does not go through the state-vector machinery, so it can serve as an
//! oracle for [`crate::protocols`] and [`crate::montecarlo`]. The `*_paper`
//! functions are the published approximations (pure exponential decay, no Δm
//! interference); the other functions are exact.

use std::f64::consts::SQRT_2;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::kaon::{Constants, Kinematics, SingleKaon};
use crate::qstate::{PairBasisVector, PROB_FLOOR};

/// Tolerance on |α|² + |β|² = 1 for inputs that must be normalized.
pub const NORM_TOL: f64 = 1e-9;

/// Below this, a denominator counts as zero.
const DENOM_FLOOR: f64 = 1e-300;

/// A ratio-type observable that may be infinite or undefined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observable {
    Value(f64),
    /// Finite numerator over a vanishing denominator.
    Infinite,
    /// Numerator and denominator both vanish.
    Undefined,
}

impl Observable {
    pub fn value(self) -> Option<f64> {
        match self {
            Observable::Value(v) => Some(v),
            _ => None,
        }
    }

    pub fn ratio(num: f64, den: f64) -> Observable {
        if den.abs() < DENOM_FLOOR {
            if num.abs() < DENOM_FLOOR {
                Observable::Undefined
            } else {
                Observable::Infinite
            }
        } else {
            Observable::Value(num / den)
        }
    }

    /// Approximate equality; markers only match themselves.
    pub fn close_to(self, other: Observable, tol: f64) -> bool {
        match (self, other) {
            (Observable::Value(a), Observable::Value(b)) => (a - b).abs() <= tol,
            (a, b) => a == b,
        }
    }
}

/// F(t), G(t) of the source kaon and the pair decay factor M(t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TeleportCoeffs {
    pub f: C64,
    pub g: C64,
    pub m: C64,
}

impl TeleportCoeffs {
    pub fn source(&self) -> SingleKaon {
        SingleKaon::new(self.f, self.g)
    }
}

/// d–b amplitudes on |K⁰K⁰⟩, |K⁰K̄⁰⟩, |K̄⁰K⁰⟩, |K̄⁰K̄⁰⟩ (d first).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapCoeffs {
    pub g1: C64,
    pub g2: C64,
    pub g3: C64,
    pub g4: C64,
}

impl SwapCoeffs {
    pub fn as_array(&self) -> [C64; 4] {
        [self.g1, self.g2, self.g3, self.g4]
    }
}

fn phase(lambda: C64, tau: f64) -> C64 {
    (-C64::i() * lambda * tau).exp()
}

/// `α|K⁰⟩ + β|K̄⁰⟩` after proper time `tau`, term by term:
/// F = [(α + βp/q)e_S + (α − βp/q)e_L]/2, G = [(αq/p + β)e_S − (αq/p − β)e_L]/2.
pub fn closed_form_evolve(alpha: C64, beta: C64, tau: f64, c: &Constants) -> Result<SingleKaon> {
    if tau < 0.0 {
        return Err(Error::NegativeTime(tau));
    }
    let (p, q) = (c.p(), c.q());
    let e_s = phase(c.lambda_s(), tau);
    let e_l = phase(c.lambda_l(), tau);
    let f = ((alpha + beta * p / q) * e_s + (alpha - beta * p / q) * e_l) / 2.0;
    let g = ((alpha * q / p + beta) * e_s - (alpha * q / p - beta) * e_l) / 2.0;
    Ok(SingleKaon::new(f, g))
}

/// M over proper time `tau`: exp[−i(λ̃_S + λ̃_L)τ].
pub fn pair_factor(tau: f64, c: &Constants) -> C64 {
    phase(c.lambda_s() + c.lambda_l(), tau)
}

/// F, G, M at lab time `t` for a source prepared as α|K⁰⟩ + β|K̄⁰⟩ at t_z.
pub fn teleport_coeffs(alpha: C64, beta: C64, t: f64, kin: &Kinematics, c: &Constants) -> Result<TeleportCoeffs> {
    if t < kin.t_z {
        return Err(Error::NegativeTime(t - kin.t_z));
    }
    let tau_c = kin.proper_time(kin.gamma_c, t - kin.t_z)?;
    let tau_pair = kin.proper_time(kin.gamma_b, t - Kinematics::T_Y)?;
    let src = closed_form_evolve(alpha, beta, tau_c, c)?;
    Ok(TeleportCoeffs { f: src.f, g: src.g, m: pair_factor(tau_pair, c) })
}

/// Probabilities of the four collision outcomes, in φ₁…φ₄ order.
pub fn projection_probs(tc: &TeleportCoeffs) -> [f64; 4] {
    let m2 = tc.m.norm_sqr();
    let (f2, g2) = (tc.f.norm_sqr(), tc.g.norm_sqr());
    [m2 * f2 / 2.0, m2 * g2 / 2.0, m2 * (f2 + g2) / 4.0, m2 * (f2 + g2) / 4.0]
}

/// Normalized state of b after the collision projected onto `outcome`.
pub fn post_projection_b(tc: &TeleportCoeffs, outcome: PairBasisVector) -> Result<SingleKaon> {
    if projection_probs(tc)[outcome.index()] < PROB_FLOOR {
        return Err(Error::ZeroProbability);
    }
    let n = (tc.f.norm_sqr() + tc.g.norm_sqr()).sqrt();
    Ok(match outcome {
        PairBasisVector::Phi1 => SingleKaon::k0bar(),
        PairBasisVector::Phi2 => SingleKaon::k0(),
        PairBasisVector::Phi3 => SingleKaon::new(tc.f / n, -tc.g / n),
        PairBasisVector::Phi4 => SingleKaon::new(tc.f / n, tc.g / n),
    })
}

fn check_normalized(alpha: C64, beta: C64) -> Result<()> {
    let n2 = alpha.norm_sqr() + beta.norm_sqr();
    if (n2 - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(n2));
    }
    Ok(())
}

/// Strangeness ratio |f|²/|g|² of a kaon.
pub fn strangeness_ratio(k: &SingleKaon) -> Observable {
    Observable::ratio(k.f.norm_sqr(), k.g.norm_sqr())
}

/// ξ after proper time `tau` for b starting in α_x|K⁰⟩ + β_x|K̄⁰⟩, with the
/// full complex evolution.
pub fn xi_exact(alpha_x: C64, beta_x: C64, tau: f64, c: &Constants) -> Result<Observable> {
    check_normalized(alpha_x, beta_x)?;
    Ok(strangeness_ratio(&closed_form_evolve(alpha_x, beta_x, tau, c)?))
}

/// ξ as published: real exponentials only, Δm and ε dropped.
pub fn xi_paper(alpha_x: C64, beta_x: C64, tau: f64, c: &Constants) -> Result<Observable> {
    check_normalized(alpha_x, beta_x)?;
    if tau < 0.0 {
        return Err(Error::NegativeTime(tau));
    }
    let s = (-c.gamma_s * tau / 2.0).exp();
    let l = (-c.gamma_l * tau / 2.0).exp();
    let num = (alpha_x * (s + l) + beta_x * (s - l)).norm_sqr();
    let den = (alpha_x * (s - l) + beta_x * (s + l)).norm_sqr();
    Ok(Observable::ratio(num, den))
}

/// ξ of b with no conditioning on the collision outcome.
///
/// Averaged over the four outcomes b is maximally mixed at the collision, so
/// the ratio is (|U₀₀|² + |U₀₁|²)/(|U₁₀|² + |U₁₁|²) for the propagator U.
pub fn xi_unconditioned(tau: f64, c: &Constants) -> Result<Observable> {
    let (r0, r1) = mixed_row_weights(tau, c)?;
    Ok(Observable::ratio(r0, r1))
}

fn mixed_row_weights(tau: f64, c: &Constants) -> Result<(f64, f64)> {
    let col0 = closed_form_evolve(C64::new(1.0, 0.0), C64::new(0.0, 0.0), tau, c)?;
    let col1 = closed_form_evolve(C64::new(0.0, 0.0), C64::new(1.0, 0.0), tau, c)?;
    Ok((col0.f.norm_sqr() + col1.f.norm_sqr(), col0.g.norm_sqr() + col1.g.norm_sqr()))
}

/// d–b amplitudes at proper times (τ_d, τ_b) after the collision, given the
/// collision outcome.
///
/// Ψ₋ and Ψ₊ use the printed g₁…g₄. For φ₁ (d–b left in |K̄⁰K̄⁰⟩) and φ₂
/// (|K⁰K⁰⟩) each kaon is propagated with [`closed_form_evolve`].
pub fn swap_coeffs(outcome: PairBasisVector, tau_d: f64, tau_b: f64, c: &Constants) -> Result<SwapCoeffs> {
    if tau_d < 0.0 {
        return Err(Error::NegativeTime(tau_d));
    }
    if tau_b < 0.0 {
        return Err(Error::NegativeTime(tau_b));
    }
    let (p, q) = (c.p(), c.q());
    let (ls, ll) = (c.lambda_s(), c.lambda_l());
    let k = 2.0 * SQRT_2;
    Ok(match outcome {
        PairBasisVector::Phi4 => {
            let e1 = (-C64::i() * (ll * tau_d + ls * tau_b)).exp();
            let e2 = (-C64::i() * (ls * tau_d + ll * tau_b)).exp();
            let g2 = (e1 + e2) / k;
            SwapCoeffs { g1: (e1 - e2) * p / (k * q), g2, g3: -g2, g4: -(e1 - e2) * q / (k * p) }
        }
        PairBasisVector::Phi3 => {
            let es = phase(ls, tau_d + tau_b);
            let el = phase(ll, tau_d + tau_b);
            let g2 = (es + el) / k;
            SwapCoeffs { g1: (es - el) * p / (k * q), g2, g3: g2, g4: (es - el) * q / (k * p) }
        }
        PairBasisVector::Phi1 | PairBasisVector::Phi2 => {
            let (a0, b0) = if outcome == PairBasisVector::Phi1 {
                (C64::new(0.0, 0.0), C64::new(1.0, 0.0))
            } else {
                (C64::new(1.0, 0.0), C64::new(0.0, 0.0))
            };
            let d = closed_form_evolve(a0, b0, tau_d, c)?;
            let b = closed_form_evolve(a0, b0, tau_b, c)?;
            SwapCoeffs { g1: d.f * b.f, g2: d.f * b.g, g3: d.g * b.f, g4: d.g * b.g }
        }
    })
}

/// A = (p_diff − p_same)/(p_diff + p_same) for the given amplitudes.
pub fn asym_exact(sc: &SwapCoeffs) -> Observable {
    let diff = sc.g2.norm_sqr() + sc.g3.norm_sqr();
    let same = sc.g1.norm_sqr() + sc.g4.norm_sqr();
    if diff + same < DENOM_FLOOR {
        return Observable::Undefined;
    }
    Observable::Value((diff - same) / (diff + same))
}

/// The published approximate asymmetries.
///
/// Ψ₋ uses the denominator e^{−(Γ_Lτ_d+Γ_Sτ_b)} + e^{−(Γ_Sτ_d+Γ_Lτ_b)}; as printed
/// the same exponential appears twice, which only agrees with g₁…g₄ when
/// τ_d = τ_b. The φ₁/φ₂ form exists only for τ_d = τ_b and is `Undefined`
/// otherwise.
pub fn asym_paper(outcome: PairBasisVector, tau_d: f64, tau_b: f64, c: &Constants) -> Result<Observable> {
    if tau_d < 0.0 || tau_b < 0.0 {
        return Err(Error::NegativeTime(tau_d.min(tau_b)));
    }
    let (gs, gl) = (c.gamma_s, c.gamma_l);
    let sum = tau_d + tau_b;
    let cross = 2.0 * (-(gs + gl) * sum / 2.0).exp();
    Ok(match outcome {
        PairBasisVector::Phi4 => {
            Observable::ratio(cross, (-(gl * tau_d + gs * tau_b)).exp() + (-(gs * tau_d + gl * tau_b)).exp())
        }
        PairBasisVector::Phi3 => Observable::ratio(cross, (-gs * sum).exp() + (-gl * sum).exp()),
        PairBasisVector::Phi1 | PairBasisVector::Phi2 => {
            if (tau_d - tau_b).abs() > 1e-12 * sum.max(1.0) {
                return Ok(Observable::Undefined);
            }
            let t = tau_b;
            let mixed = (-(gs + gl) * t).exp();
            Observable::ratio(-4.0 * mixed, (-2.0 * gs * t).exp() + 2.0 * mixed + (-2.0 * gl * t).exp())
        }
    })
}

/// A with no conditioning on the collision outcome: the d–b pair is an equal
/// mixture of the four partner states, i.e. maximally mixed.
pub fn asym_unconditioned(tau_d: f64, tau_b: f64, c: &Constants) -> Result<Observable> {
    let (d0, d1) = mixed_row_weights(tau_d, c)?;
    let (b0, b1) = mixed_row_weights(tau_b, c)?;
    let diff = d0 * b1 + d1 * b0;
    let same = d0 * b0 + d1 * b1;
    Ok(Observable::ratio(diff - same, diff + same))
}

/// Probability of each of the four swap outcomes, |M'(t_x − t_z)M(t_x)|²/4.
pub fn swap_projection_prob(kin: &Kinematics, c: &Constants) -> Result<f64> {
    let tau_dc = kin.proper_time(kin.gamma_d, kin.t_x - kin.t_z)?;
    let tau_ab = kin.proper_time(kin.gamma_b, kin.t_x - Kinematics::T_Y)?;
    Ok((pair_factor(tau_dc, c) * pair_factor(tau_ab, c)).norm_sqr() / 4.0)
}
