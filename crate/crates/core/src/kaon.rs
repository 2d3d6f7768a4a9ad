//! Neutral-kaon physics: constants, mass eigenstates, non-unitary decay
//! evolution, EPR pairs and regeneration.
//!
//! Times are in units of the K_S lifetime τ_S, so Γ_S = 1. The eigenvalues are
//! stored in reduced form, λ̃_S = −iΓ_S/2 and λ̃_L = Δm − iΓ_L/2: the common
//! phase e^{−i m_S τ} of each kaon is dropped since it is global and cancels
//! from every observable.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::qstate::{Label, Matrix2, MultiKaonState, PairBasisVector};

/// K_S mean lifetime in seconds.
pub const TAU_S_SECONDS: f64 = 0.8953e-10;
/// K_L mean lifetime in seconds.
pub const TAU_L_SECONDS: f64 = 5.114e-8;
/// m_L − m_S in MeV.
pub const DELTA_M_MEV: f64 = 3.483e-12;
/// ħ in MeV·s. Used only to express Δm in units of Γ_S.
pub const HBAR_MEV_S: f64 = 6.58212e-22;

/// Decay and mixing parameters, in units where Γ_S = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub gamma_s: f64,
    pub gamma_l: f64,
    /// m_L − m_S in units of ħΓ_S.
    pub delta_m: f64,
    /// CP-violation parameter ε.
    pub epsilon: C64,
}

impl Constants {
    /// Measured lifetimes and mass splitting, CP violation neglected (ε = 0).
    pub fn paper() -> Self {
        Constants {
            gamma_s: 1.0,
            gamma_l: TAU_S_SECONDS / TAU_L_SECONDS,
            delta_m: DELTA_M_MEV / (HBAR_MEV_S / TAU_S_SECONDS),
            epsilon: C64::new(0.0, 0.0),
        }
    }

    pub fn with_epsilon(mut self, epsilon: C64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_delta_m(mut self, delta_m: f64) -> Self {
        self.delta_m = delta_m;
        self
    }

    pub fn with_gamma_l(mut self, gamma_l: f64) -> Self {
        self.gamma_l = gamma_l;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma_s != 1.0 {
            return Err(Error::InvalidConstants(format!("gamma_s must be 1 (time unit is τ_S), got {}", self.gamma_s)));
        }
        if !(self.gamma_l > 0.0 && self.gamma_l < 1.0) {
            return Err(Error::InvalidConstants(format!("gamma_l must lie in (0, 1), got {}", self.gamma_l)));
        }
        if !self.delta_m.is_finite() {
            return Err(Error::InvalidConstants(format!("delta_m must be finite, got {}", self.delta_m)));
        }
        if !(self.epsilon.norm() < 0.1) {
            return Err(Error::InvalidConstants(format!("|epsilon| must be below 0.1, got {}", self.epsilon.norm())));
        }
        Ok(())
    }

    pub fn p(&self) -> C64 {
        1.0 + self.epsilon
    }

    pub fn q(&self) -> C64 {
        1.0 - self.epsilon
    }

    /// r = (|p|² + |q|²)/(2pq); the singlet is r times the mass-basis singlet.
    pub fn r(&self) -> C64 {
        let (p, q) = (self.p(), self.q());
        (p.norm_sqr() + q.norm_sqr()) / (2.0 * p * q)
    }

    /// Reduced K_S eigenvalue −iΓ_S/2.
    pub fn lambda_s(&self) -> C64 {
        C64::new(0.0, -self.gamma_s / 2.0)
    }

    /// Reduced K_L eigenvalue Δm − iΓ_L/2.
    pub fn lambda_l(&self) -> C64 {
        C64::new(self.delta_m, -self.gamma_l / 2.0)
    }
}

impl Default for Constants {
    fn default() -> Self {
        Self::paper()
    }
}

/// How a lab-frame duration maps onto a kaon's proper time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeConvention {
    /// τ = γ·Δt, the form used in the original closed-form results.
    #[default]
    Paper,
    /// τ = Δt/γ, ordinary time dilation.
    Standard,
}

impl TimeConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            TimeConvention::Paper => "paper",
            TimeConvention::Standard => "standard",
        }
    }
}

impl std::str::FromStr for TimeConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "paper" => Ok(TimeConvention::Paper),
            "standard" => Ok(TimeConvention::Standard),
            other => Err(format!("unknown time convention `{other}` (expected paper|standard)")),
        }
    }
}

/// Lorentz factors and lab-frame event times (τ_S units).
///
/// The a–b pair is created at t_y = 0, the source of c (and d) at `t_z`, and c
/// collides with a at `t_x`. The collision itself takes no time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kinematics {
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub gamma_c: f64,
    pub gamma_d: f64,
    pub t_z: f64,
    pub t_x: f64,
    pub convention: TimeConvention,
}

impl Default for Kinematics {
    fn default() -> Self {
        Kinematics {
            gamma_a: 1.0,
            gamma_b: 1.0,
            gamma_c: 1.0,
            gamma_d: 1.0,
            t_z: 0.0,
            t_x: 0.0,
            convention: TimeConvention::Paper,
        }
    }
}

impl Kinematics {
    /// Emission time of the a–b pair.
    pub const T_Y: f64 = 0.0;

    pub fn validate(&self) -> Result<()> {
        for (name, g) in [("gamma_a", self.gamma_a), ("gamma_b", self.gamma_b), ("gamma_c", self.gamma_c), ("gamma_d", self.gamma_d)] {
            if !(g.is_finite() && g >= 1.0) {
                return Err(Error::InvalidKinematics(format!("{name} must be a finite Lorentz factor >= 1, got {g}")));
            }
        }
        if !self.t_z.is_finite() || !self.t_x.is_finite() {
            return Err(Error::InvalidKinematics("t_x and t_z must be finite".into()));
        }
        if self.t_x < Self::T_Y || self.t_x < self.t_z {
            return Err(Error::InvalidKinematics(format!(
                "collision time t_x = {} precedes an emission (t_y = 0, t_z = {})",
                self.t_x, self.t_z
            )));
        }
        Ok(())
    }

    pub fn gamma(&self, label: Label) -> Result<f64> {
        match label {
            Label::A => Ok(self.gamma_a),
            Label::B => Ok(self.gamma_b),
            Label::C => Ok(self.gamma_c),
            Label::D => Ok(self.gamma_d),
            other => Err(Error::MissingLabel(other)),
        }
    }

    pub fn proper_time(&self, gamma: f64, lab_duration: f64) -> Result<f64> {
        if lab_duration < 0.0 {
            return Err(Error::NegativeTime(lab_duration));
        }
        Ok(match self.convention {
            TimeConvention::Paper => gamma * lab_duration,
            TimeConvention::Standard => lab_duration / gamma,
        })
    }

    pub fn proper_time_of(&self, label: Label, lab_duration: f64) -> Result<f64> {
        self.proper_time(self.gamma(label)?, lab_duration)
    }
}

/// One kaon, `f |K⁰⟩ + g |K̄⁰⟩`; |f|² + |g|² is its survival probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleKaon {
    pub f: C64,
    pub g: C64,
}

impl SingleKaon {
    pub fn new(f: C64, g: C64) -> Self {
        SingleKaon { f, g }
    }

    pub fn k0() -> Self {
        SingleKaon::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0))
    }

    pub fn k0bar() -> Self {
        SingleKaon::new(C64::new(0.0, 0.0), C64::new(1.0, 0.0))
    }

    pub fn survival(&self) -> f64 {
        self.f.norm_sqr() + self.g.norm_sqr()
    }

    pub fn normalized(&self) -> Result<SingleKaon> {
        let s = self.survival();
        if s < crate::qstate::PROB_FLOOR {
            return Err(Error::ZeroProbability);
        }
        let k = 1.0 / s.sqrt();
        Ok(SingleKaon::new(self.f * k, self.g * k))
    }

    pub fn inner(&self, other: &SingleKaon) -> C64 {
        self.f.conj() * other.f + self.g.conj() * other.g
    }

    pub fn as_array(&self) -> [C64; 2] {
        [self.f, self.g]
    }

    pub fn state(&self, label: Label) -> MultiKaonState {
        MultiKaonState::ket(label, self.as_array())
    }

    pub fn is_finite(&self) -> bool {
        self.f.is_finite() && self.g.is_finite()
    }
}

/// K_S and K_L in strangeness components.
pub fn mass_eigenstates(c: &Constants) -> (SingleKaon, SingleKaon) {
    let (p, q) = (c.p(), c.q());
    let n = 1.0 / (p.norm_sqr() + q.norm_sqr()).sqrt();
    (SingleKaon::new(p * n, q * n), SingleKaon::new(p * n, -q * n))
}

/// Non-unitary propagator over proper time `tau`, built as V·diag(e_S, e_L)·V⁻¹
/// with V the matrix of mass eigenvectors.
pub fn evolution_matrix(tau: f64, c: &Constants) -> Result<Matrix2> {
    if tau < 0.0 {
        return Err(Error::NegativeTime(tau));
    }
    let (ks, kl) = mass_eigenstates(c);
    let v = Matrix2::new(ks.f, kl.f, ks.g, kl.g);
    let i = C64::i();
    let e_s = (-i * c.lambda_s() * tau).exp();
    let e_l = (-i * c.lambda_l() * tau).exp();
    Ok(v.mul(&Matrix2::diag(e_s, e_l)).mul(&v.inverse()?))
}

pub fn evolve(k: &SingleKaon, tau: f64, c: &Constants) -> Result<SingleKaon> {
    let [f, g] = evolution_matrix(tau, c)?.apply(k.as_array());
    Ok(SingleKaon::new(f, g))
}

/// (|K⁰K̄⁰⟩ − |K̄⁰K⁰⟩)/√2 on `(first, second)`.
pub fn epr_singlet(first: Label, second: Label) -> Result<MultiKaonState> {
    PairBasisVector::Phi4.state(first, second)
}

/// (|K⁰K̄⁰⟩ + |K̄⁰K⁰⟩)/√2 on `(first, second)`.
pub fn psi_plus(first: Label, second: Label) -> Result<MultiKaonState> {
    PairBasisVector::Phi3.state(first, second)
}

/// Evolve every kaon of `s` over the same lab-frame duration, each with its
/// own proper time.
pub fn evolve_state(s: &MultiKaonState, lab_duration: f64, kin: &Kinematics, c: &Constants) -> Result<MultiKaonState> {
    if lab_duration < 0.0 {
        return Err(Error::NegativeTime(lab_duration));
    }
    s.labels().iter().try_fold(s.clone(), |acc, &label| {
        let tau = kin.proper_time_of(label, lab_duration)?;
        acc.apply_single(label, &evolution_matrix(tau, c)?)
    })
}

/// Evolve a two-kaon state. For the singlet with equal Lorentz factors this is
/// multiplication by M = exp[−i(λ̃_S + λ̃_L)τ].
pub fn pair_evolve(s: &MultiKaonState, lab_duration: f64, kin: &Kinematics, c: &Constants) -> Result<MultiKaonState> {
    if s.n_kaons() != 2 {
        return Err(Error::InvalidSetup(format!("pair_evolve needs 2 kaons, got {}", s.n_kaons())));
    }
    evolve_state(s, lab_duration, kin, c)
}

/// Pass a kaon through regenerator material with transfer matrix `r`.
pub fn regenerate(k: &SingleKaon, r: &Matrix2, normalize: bool) -> Result<SingleKaon> {
    r.inverse()?;
    let [f, g] = r.apply(k.as_array());
    let out = SingleKaon::new(f, g);
    if normalize {
        out.normalized()
    } else {
        Ok(out)
    }
}
