//! Benchmark fixtures shared by the criterion targets.

use kaon_core::{Constants, Kinematics, Mode, ProtocolSetup, C64};

/// A teleportation setup with a collision after one K_S lifetime.
pub fn teleport_setup() -> ProtocolSetup {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mode = Mode::Teleport { alpha: C64::new(h, 0.0), beta: C64::new(0.0, h) };
    ProtocolSetup::new(mode, Kinematics { t_x: 1.0, t_z: 0.2, ..Kinematics::default() }, Constants::paper())
        .expect("valid fixture")
}

pub fn swap_setup() -> ProtocolSetup {
    ProtocolSetup::new(Mode::Swap, Kinematics { t_x: 0.5, t_z: 0.1, ..Kinematics::default() }, Constants::paper())
        .expect("valid fixture")
}
