//! Teleportation, entanglement swapping and general teleportation as exact
//! state-vector pipelines.
//!
//! Kaon ordering is `[c, a, b]` for teleportation and `[d, c, a, b]` for the
//! four-kaon protocols. The collision projects (c, a) onto the φ basis; the
//! strong-interaction unitary 𝒮 is the identity unless a [`CollisionUnitary`]
//! is injected explicitly.

use num_complex::Complex64 as C64;

use crate::analytic::{self, Observable, NORM_TOL};
use crate::error::{Error, Result};
use crate::kaon::{self, Constants, Kinematics, SingleKaon};
use crate::qstate::{Label, Matrix2, MultiKaonState, PairBasisVector, PairOperator, Projection};

/// The kaon pair that collides.
pub const COLLIDING: (Label, Label) = (Label::C, Label::A);

/// An entangled d–c source c₁|w₁⟩_d|K⁰⟩_c + c₂|w₂⟩_d|K̄⁰⟩_c, given at the
/// collision time. w₁ and w₂ need not be orthogonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralSource {
    pub c1: C64,
    pub w1: SingleKaon,
    pub c2: C64,
    pub w2: SingleKaon,
}

impl GeneralSource {
    pub fn validate(&self) -> Result<()> {
        for (name, w) in [("w1", &self.w1), ("w2", &self.w2)] {
            if (w.survival() - 1.0).abs() > NORM_TOL {
                return Err(Error::InvalidSetup(format!("{name} must be normalized, norm² = {}", w.survival())));
            }
        }
        // the c-kaon components are orthogonal, so no ⟨w₁|w₂⟩ cross term
        let n2 = self.c1.norm_sqr() + self.c2.norm_sqr();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidSetup(format!("|c1|² + |c2|² must be 1, got {n2}")));
        }
        Ok(())
    }

    /// The d–c state, labels `[d, c]`.
    pub fn state(&self) -> MultiKaonState {
        let a = self.w1.as_array().map(|x| x * self.c1);
        let b = self.w2.as_array().map(|x| x * self.c2);
        // index = d | c << 1
        MultiKaonState::new(vec![Label::D, Label::C], vec![a[0], a[1], b[0], b[1]])
            .expect("two distinct labels, four amplitudes")
    }

    /// The singlet (|K⁰⟩_d|K̄⁰⟩_c − |K̄⁰⟩_d|K⁰⟩_c)/√2 in this form.
    pub fn singlet() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        GeneralSource { c1: C64::new(-h, 0.0), w1: SingleKaon::k0bar(), c2: C64::new(h, 0.0), w2: SingleKaon::k0() }
    }

    /// Prepare a source by sending the kaons of a d–c singlet through
    /// regenerators `r_d` and `r_c`, then renormalizing.
    pub fn from_regenerated_singlet(r_d: &Matrix2, r_c: &Matrix2) -> Result<Self> {
        r_d.inverse()?;
        r_c.inverse()?;
        let s = kaon::epr_singlet(Label::D, Label::C)?
            .apply_single(Label::D, r_d)?
            .apply_single(Label::C, r_c)?
            .normalized()?;
        let split = |c_bit: u8| -> (C64, SingleKaon) {
            let v = SingleKaon::new(s.amp(&[0, c_bit]), s.amp(&[1, c_bit]));
            let n = v.survival().sqrt();
            if n < 1e-15 {
                (C64::new(0.0, 0.0), SingleKaon::k0())
            } else {
                (C64::new(n, 0.0), SingleKaon::new(v.f / n, v.g / n))
            }
        };
        let (c1, w1) = split(0);
        let (c2, w2) = split(1);
        Ok(GeneralSource { c1, w1, c2, w2 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    /// Teleport α|K⁰⟩ + β|K̄⁰⟩ prepared at t_z.
    Teleport { alpha: C64, beta: C64 },
    /// Swap entanglement between a d–c singlet created at t_z and the a–b singlet.
    Swap,
    /// Teleport c out of an arbitrary d–c state.
    General(GeneralSource),
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Teleport { .. } => "teleport",
            Mode::Swap => "swap",
            Mode::General(_) => "general",
        }
    }

    /// Kaons left with Bob after the collision.
    pub fn partner_labels(&self) -> &'static [Label] {
        match self {
            Mode::Teleport { .. } => &[Label::B],
            Mode::Swap | Mode::General(_) => &[Label::D, Label::B],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolSetup {
    pub mode: Mode,
    pub kin: Kinematics,
    pub constants: Constants,
}

impl ProtocolSetup {
    pub fn new(mode: Mode, kin: Kinematics, constants: Constants) -> Result<Self> {
        let s = ProtocolSetup { mode, kin, constants };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.kin.validate()?;
        self.constants.validate()?;
        match &self.mode {
            Mode::Teleport { alpha, beta } => {
                let n2 = alpha.norm_sqr() + beta.norm_sqr();
                if (n2 - 1.0).abs() > NORM_TOL {
                    return Err(Error::InvalidSetup(format!("|alpha|² + |beta|² must be 1, got {n2}")));
                }
                Ok(())
            }
            Mode::Swap => Ok(()),
            Mode::General(src) => src.validate(),
        }
    }
}

/// Which part of the apparatus lost a kaon before the collision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DecayedSubsystem {
    /// c (teleportation) or the d–c pair.
    Source,
    /// The a–b pair.
    Pair,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProjectionOutcome {
    Phi1,
    Phi2,
    Phi3,
    Phi4,
    /// A kaon decayed before reaching the collision; no projection happened.
    Spoiled(DecayedSubsystem),
}

impl ProjectionOutcome {
    pub fn from_basis(v: PairBasisVector) -> Self {
        match v {
            PairBasisVector::Phi1 => Self::Phi1,
            PairBasisVector::Phi2 => Self::Phi2,
            PairBasisVector::Phi3 => Self::Phi3,
            PairBasisVector::Phi4 => Self::Phi4,
        }
    }

    pub fn basis(self) -> Option<PairBasisVector> {
        match self {
            Self::Phi1 => Some(PairBasisVector::Phi1),
            Self::Phi2 => Some(PairBasisVector::Phi2),
            Self::Phi3 => Some(PairBasisVector::Phi3),
            Self::Phi4 => Some(PairBasisVector::Phi4),
            Self::Spoiled(_) => None,
        }
    }

    pub fn is_spoiled(self) -> bool {
        matches!(self, Self::Spoiled(_))
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Spoiled(DecayedSubsystem::Source) => "spoiled_source",
            Self::Spoiled(DecayedSubsystem::Pair) => "spoiled_pair",
            Self::Spoiled(DecayedSubsystem::Both) => "spoiled_both",
            other => other.basis().map(PairBasisVector::name).unwrap_or_default(),
        }
    }
}

/// Outcomes for which Bob keeps his kaon(s).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetainPolicy {
    pub keep: [bool; 4],
}

impl Default for RetainPolicy {
    /// Keep only Ψ₋ (φ₄), the outcome that reproduces the source state.
    fn default() -> Self {
        RetainPolicy { keep: [false, false, false, true] }
    }
}

impl RetainPolicy {
    pub fn only(outcomes: &[PairBasisVector]) -> Self {
        let mut keep = [false; 4];
        for v in outcomes {
            keep[v.index()] = true;
        }
        RetainPolicy { keep }
    }

    pub fn kept(&self) -> impl Iterator<Item = PairBasisVector> + '_ {
        PairBasisVector::ALL.into_iter().filter(|v| self.keep[v.index()])
    }
}

pub fn bob_retain(outcome: ProjectionOutcome, policy: &RetainPolicy) -> bool {
    outcome.basis().is_some_and(|v| policy.keep[v.index()])
}

/// Block-diagonal collision unitary: since S and P separate all four φ
/// states, each conserved block is one-dimensional and 𝒮 reduces to a phase
/// per φ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionUnitary {
    pub phases: [f64; 4],
}

impl CollisionUnitary {
    pub const IDENTITY: CollisionUnitary = CollisionUnitary { phases: [0.0; 4] };

    pub fn operator(&self) -> PairOperator {
        let mut op = [[C64::new(0.0, 0.0); 4]; 4];
        for v in PairBasisVector::ALL {
            let ph = C64::from_polar(1.0, self.phases[v.index()]);
            let amps = v.amps();
            for (r, row) in op.iter_mut().enumerate() {
                for (col, cell) in row.iter_mut().enumerate() {
                    *cell += ph * amps[r] * amps[col].conj();
                }
            }
        }
        op
    }
}

fn source_state_at_collision(setup: &ProtocolSetup) -> Result<MultiKaonState> {
    let (kin, c) = (&setup.kin, &setup.constants);
    let dt = kin.t_x - kin.t_z;
    match setup.mode {
        Mode::Teleport { alpha, beta } => {
            let k = kaon::evolve(&SingleKaon::new(alpha, beta), kin.proper_time_of(Label::C, dt)?, c)?;
            Ok(k.state(Label::C))
        }
        Mode::Swap => kaon::pair_evolve(&kaon::epr_singlet(Label::D, Label::C)?, dt, kin, c),
        Mode::General(src) => Ok(src.state()),
    }
}

fn pair_state_at_collision(setup: &ProtocolSetup) -> Result<MultiKaonState> {
    let ab = kaon::epr_singlet(Label::A, Label::B)?;
    kaon::pair_evolve(&ab, setup.kin.t_x - Kinematics::T_Y, &setup.kin, &setup.constants)
}

/// The full (unnormalized, decay-included) state just before the collision.
pub fn build_state_at_collision(setup: &ProtocolSetup) -> Result<MultiKaonState> {
    setup.validate()?;
    source_state_at_collision(setup)?.tensor(&pair_state_at_collision(setup)?)
}

/// Survival probabilities of the source subsystem and of the a–b pair up to
/// the collision. They are independent, the two being in a product state.
pub fn pre_collision_survival(setup: &ProtocolSetup) -> Result<(f64, f64)> {
    setup.validate()?;
    Ok((source_state_at_collision(setup)?.norm2(), pair_state_at_collision(setup)?.norm2()))
}

/// Probabilities of every outcome, summing to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeProbabilities {
    pub phi: [f64; 4],
    /// Indexed Source, Pair, Both.
    pub spoiled: [f64; 3],
}

impl OutcomeProbabilities {
    pub fn get(&self, outcome: ProjectionOutcome) -> f64 {
        match outcome {
            ProjectionOutcome::Spoiled(DecayedSubsystem::Source) => self.spoiled[0],
            ProjectionOutcome::Spoiled(DecayedSubsystem::Pair) => self.spoiled[1],
            ProjectionOutcome::Spoiled(DecayedSubsystem::Both) => self.spoiled[2],
            other => other.basis().map(|v| self.phi[v.index()]).unwrap_or_default(),
        }
    }

    pub fn spoiled_total(&self) -> f64 {
        self.spoiled.iter().sum()
    }

    pub fn total(&self) -> f64 {
        self.phi.iter().sum::<f64>() + self.spoiled_total()
    }

    /// Outcomes in sampling order.
    pub const ORDER: [ProjectionOutcome; 7] = [
        ProjectionOutcome::Phi1,
        ProjectionOutcome::Phi2,
        ProjectionOutcome::Phi3,
        ProjectionOutcome::Phi4,
        ProjectionOutcome::Spoiled(DecayedSubsystem::Source),
        ProjectionOutcome::Spoiled(DecayedSubsystem::Pair),
        ProjectionOutcome::Spoiled(DecayedSubsystem::Both),
    ];
}

pub fn outcome_probabilities(setup: &ProtocolSetup) -> Result<OutcomeProbabilities> {
    let state = build_state_at_collision(setup)?;
    let mut phi = [0.0; 4];
    for v in PairBasisVector::ALL {
        phi[v.index()] = collide_project(&state, v)?.prob;
    }
    let (s, p) = pre_collision_survival(setup)?;
    Ok(OutcomeProbabilities { phi, spoiled: [(1.0 - s) * p, s * (1.0 - p), (1.0 - s) * (1.0 - p)] })
}

/// Project the colliding pair onto `outcome`; 𝒮 is the identity.
pub fn collide_project(state: &MultiKaonState, outcome: PairBasisVector) -> Result<Projection> {
    state.project_pair(COLLIDING, outcome)
}

/// As [`collide_project`], with an explicit collision unitary applied first.
pub fn collide_project_with(state: &MultiKaonState, outcome: PairBasisVector, s: &CollisionUnitary) -> Result<Projection> {
    state.apply_pair(COLLIDING, &s.operator())?.project_pair(COLLIDING, outcome)
}

/// Normalized state of Bob's kaon(s) right after the collision.
pub fn partner_after_collision(setup: &ProtocolSetup, outcome: PairBasisVector) -> Result<MultiKaonState> {
    let state = build_state_at_collision(setup)?;
    Ok(collide_project(&state, outcome)?.post_state()?.clone())
}

/// Bob's kaon(s) at lab time `t_m ≥ t_x`, including decay after the collision.
pub fn partner_at(setup: &ProtocolSetup, outcome: PairBasisVector, t_m: f64) -> Result<MultiKaonState> {
    let post = partner_after_collision(setup, outcome)?;
    kaon::evolve_state(&post, t_m - setup.kin.t_x, &setup.kin, &setup.constants)
}

/// The state the protocol aims to deliver to Bob.
pub fn target_state(setup: &ProtocolSetup) -> Result<MultiKaonState> {
    setup.validate()?;
    match setup.mode {
        Mode::Teleport { alpha, beta } => {
            let tc = analytic::teleport_coeffs(alpha, beta, setup.kin.t_x, &setup.kin, &setup.constants)?;
            tc.source().normalized().map(|k| k.state(Label::B))
        }
        Mode::Swap => kaon::epr_singlet(Label::D, Label::B),
        Mode::General(src) => src.state().relabel(&[Label::D, Label::B])?.normalized(),
    }
}

/// |⟨target|partner⟩|² for the given outcome.
pub fn teleport_fidelity(setup: &ProtocolSetup, outcome: PairBasisVector) -> Result<f64> {
    let partner = partner_after_collision(setup, outcome)?;
    target_state(setup)?.fidelity(&partner)
}

/// Strangeness asymmetry between the two kaons of a pair state (surviving
/// components only).
pub fn pair_asymmetry(state: &MultiKaonState) -> Result<Observable> {
    if state.n_kaons() != 2 {
        return Err(Error::InvalidSetup(format!("asymmetry needs 2 kaons, got {}", state.n_kaons())));
    }
    let a = state.amps();
    let same = a[0].norm_sqr() + a[3].norm_sqr();
    let diff = a[1].norm_sqr() + a[2].norm_sqr();
    if same + diff < 1e-300 {
        return Ok(Observable::Undefined);
    }
    Ok(Observable::Value((diff - same) / (diff + same)))
}
