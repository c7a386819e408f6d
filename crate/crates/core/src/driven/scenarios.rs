use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::{evolve_master, DriveEnvelope, StateTrajectory};
use crate::error::{JqfError, JqfResult};
use crate::model::{derive_couplings, drive_amplitude_for_rabi, ReferenceFrequency, SystemParameters};

/// Drive amplitude whose free-DQ Rabi frequency makes a π rotation in
/// `duration`. The JQF is ignored in the calibration.
pub fn pi_pulse_amplitude(p: &SystemParameters, duration: f64) -> JqfResult<f64> {
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(JqfError::InvalidParameter { name: "duration", reason: format!("{duration} must be positive") });
    }
    drive_amplitude_for_rabi(p.gamma1, PI / duration)
}

/// Single resonant square π-pulse on [0, duration).
pub fn scenario_pi_pulse(p: &SystemParameters, duration: f64, times: &[f64]) -> JqfResult<StateTrajectory> {
    let e = pi_pulse_amplitude(p, duration)?;
    let drive = DriveEnvelope::square_pulse(C64::new(e, 0.0), p.omega1, duration)?;
    let c = derive_couplings(p, ReferenceFrequency::Dq)?;
    evolve_master(p, &c, &drive, times)
}

/// `n_pulses` π-pulses, one every `period`.
pub fn scenario_pulse_train(
    p: &SystemParameters,
    duration: f64,
    period: f64,
    n_pulses: usize,
    times: &[f64],
) -> JqfResult<StateTrajectory> {
    let e = pi_pulse_amplitude(p, duration)?;
    let drive = DriveEnvelope::pulse_train(C64::new(e, 0.0), p.omega1, duration, period, n_pulses)?;
    let c = derive_couplings(p, ReferenceFrequency::Dq)?;
    evolve_master(p, &c, &drive, times)
}
