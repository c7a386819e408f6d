//! C ABI over `jqf-core`.
//!
//! Every fallible call returns a [`JqfStatus`]; on failure the message is
//! available from [`jqf_last_error_message`] on the same thread. Objects
//! handed out through `out` pointers are owned by the caller and released
//! with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use jqf_core::delay::{compare_with_approximation, compare_with_step};
use jqf_core::driven::{evolve_master, free_rabi, scenario_pi_pulse, scenario_pulse_train, DriveEnvelope, StateTrajectory};
use jqf_core::model::{drive_amplitude_for_rabi, radiative_lifetime};
use jqf_core::single_excitation::{decay_amplitudes, AmplitudeTrajectory};
use jqf_core::{derive_couplings, DerivedCouplings, JqfError, ReferenceFrequency, SystemParameters};
use num_complex::Complex64 as C64;

/// Result of every fallible call. `JQF_STATUS_OK` is zero.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JqfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    DivergentLifetime = 3,
    ZeroCoupling = 4,
    ResonantCavity = 5,
    BranchMismatch = 6,
    NotColocated = 7,
    StepTooLarge = 8,
    NonFinite = 9,
    Unphysical = 10,
    InvalidTimes = 11,
    InvalidDrive = 12,
    BufferTooSmall = 13,
    Panic = 14,
}

impl From<&JqfError> for JqfStatus {
    fn from(e: &JqfError) -> Self {
        match e {
            JqfError::InvalidParameter { .. } => JqfStatus::InvalidParameter,
            JqfError::DivergentLifetime { .. } => JqfStatus::DivergentLifetime,
            JqfError::ZeroCoupling { .. } => JqfStatus::ZeroCoupling,
            JqfError::ResonantCavity { .. } => JqfStatus::ResonantCavity,
            JqfError::BranchMismatch { .. } => JqfStatus::BranchMismatch,
            JqfError::NotColocated { .. } => JqfStatus::NotColocated,
            JqfError::StepTooLarge { .. } => JqfStatus::StepTooLarge,
            JqfError::NonFinite { .. } => JqfStatus::NonFinite,
            JqfError::Unphysical { .. } => JqfStatus::Unphysical,
            JqfError::InvalidTimes(_) => JqfStatus::InvalidTimes,
            JqfError::InvalidDrive(_) => JqfStatus::InvalidDrive,
        }
    }
}

/// System parameters in SI angular units (rad/s, m, m/s).
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JqfParams {
    pub omega1: f64,
    pub omega2: f64,
    pub l1: f64,
    pub l2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma_i1: f64,
    pub gamma_i2: f64,
    pub velocity: f64,
}

impl From<SystemParameters> for JqfParams {
    fn from(p: SystemParameters) -> Self {
        Self {
            omega1: p.omega1,
            omega2: p.omega2,
            l1: p.l1,
            l2: p.l2,
            gamma1: p.gamma1,
            gamma2: p.gamma2,
            gamma_i1: p.gamma_i1,
            gamma_i2: p.gamma_i2,
            velocity: p.velocity,
        }
    }
}

impl From<JqfParams> for SystemParameters {
    fn from(p: JqfParams) -> Self {
        Self {
            omega1: p.omega1,
            omega2: p.omega2,
            l1: p.l1,
            l2: p.l2,
            gamma1: p.gamma1,
            gamma2: p.gamma2,
            gamma_i1: p.gamma_i1,
            gamma_i2: p.gamma_i2,
            velocity: p.velocity,
        }
    }
}

/// Validated parameters together with their couplings referenced to the DQ
/// frequency. Opaque.
pub struct JqfSystem {
    params: SystemParameters,
    couplings: DerivedCouplings,
}

/// Sampled populations. Opaque.
pub struct JqfTrajectory {
    times: Vec<f64>,
    p1: Vec<f64>,
    p2: Vec<f64>,
    purity: Vec<f64>,
}

impl From<AmplitudeTrajectory> for JqfTrajectory {
    /// Single-excitation states leave the reduced DQ state diagonal.
    fn from(t: AmplitudeTrajectory) -> Self {
        let purity = t.p1.iter().map(|p| p * p + (1.0 - p) * (1.0 - p)).collect();
        Self { times: t.times, p1: t.p1, p2: t.p2, purity }
    }
}

impl From<StateTrajectory> for JqfTrajectory {
    fn from(t: StateTrajectory) -> Self {
        Self { times: t.times, p1: t.p1, p2: t.p2, purity: t.purity }
    }
}

/// Column selector for [`jqf_trajectory_copy`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JqfColumn {
    Time = 0,
    P1 = 1,
    P2 = 2,
    Purity = 3,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), (JqfStatus, String)>) -> JqfStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => JqfStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            JqfStatus::Panic
        }
    }
}

fn core(e: JqfError) -> (JqfStatus, String) {
    ((&e).into(), e.to_string())
}

fn null(what: &str) -> (JqfStatus, String) {
    (JqfStatus::NullPointer, format!("`{what}` is NULL"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (JqfStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn slice<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], (JqfStatus, String)> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn hand_out(out: *mut *mut JqfTrajectory, t: JqfTrajectory) -> Result<(), (JqfStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(t));
    Ok(())
}

/// Message of the last failed call on this thread, or NULL after a success.
/// The pointer stays valid until the next call into this library on the same
/// thread.
#[no_mangle]
pub extern "C" fn jqf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn jqf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Reference parameters: 5 GHz qubits, λ = 20 mm, DQ at the end, JQF at λ/2.
///
/// # Safety
/// `out` must be NULL or point to writable memory for one `JqfParams`.
#[no_mangle]
pub unsafe extern "C" fn jqf_params_default(out: *mut JqfParams) -> JqfStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = SystemParameters::default().into();
        Ok(())
    })
}

/// Validates `params` and derives the couplings.
///
/// # Safety
/// `params` must point to a valid `JqfParams`; `out` to writable storage for
/// one pointer. Release the result with [`jqf_system_free`].
#[no_mangle]
pub unsafe extern "C" fn jqf_system_new(params: *const JqfParams, out: *mut *mut JqfSystem) -> JqfStatus {
    guard(|| {
        let p: SystemParameters = (*deref(params, "params")?).into();
        if out.is_null() {
            return Err(null("out"));
        }
        let couplings = derive_couplings(&p, ReferenceFrequency::Dq).map_err(core)?;
        *out = Box::into_raw(Box::new(JqfSystem { params: p, couplings }));
        Ok(())
    })
}

/// # Safety
/// `sys` must be NULL or a pointer from [`jqf_system_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn jqf_system_free(sys: *mut JqfSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Copies the parameters the system was built from.
///
/// # Safety
/// `sys` must be a live system; `out` writable for one `JqfParams`.
#[no_mangle]
pub unsafe extern "C" fn jqf_system_params(sys: *const JqfSystem, out: *mut JqfParams) -> JqfStatus {
    guard(|| {
        let sys = deref(sys, "sys")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = sys.params.into();
        Ok(())
    })
}

/// ξ in row-major order as interleaved (re, im) pairs: 8 doubles.
///
/// # Safety
/// `sys` must be a live system; `out` writable for 8 doubles.
#[no_mangle]
pub unsafe extern "C" fn jqf_system_xi(sys: *const JqfSystem, out: *mut f64) -> JqfStatus {
    guard(|| {
        let sys = deref(sys, "sys")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let out = std::slice::from_raw_parts_mut(out, 8);
        for r in 0..2 {
            for c in 0..2 {
                let z = sys.couplings.xi[(r, c)];
                out[2 * (2 * r + c)] = z.re;
                out[2 * (2 * r + c) + 1] = z.im;
            }
        }
        Ok(())
    })
}

/// DQ drive coupling η = √(2γ₁) cos θ₁.
///
/// # Safety
/// `sys` must be a live system; `out` writable for one double.
#[no_mangle]
pub unsafe extern "C" fn jqf_system_eta(sys: *const JqfSystem, out: *mut f64) -> JqfStatus {
    guard(|| {
        let sys = deref(sys, "sys")?;
        *out.as_mut().ok_or_else(|| null("out"))? = sys.couplings.eta;
        Ok(())
    })
}

/// Radiative lifetime of the protected DQ (seconds).
///
/// # Safety
/// `sys` must be a live system; `out` writable for one double.
#[no_mangle]
pub unsafe extern "C" fn jqf_system_lifetime(sys: *const JqfSystem, out: *mut f64) -> JqfStatus {
    guard(|| {
        let sys = deref(sys, "sys")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = radiative_lifetime(&sys.params).map_err(core)?;
        Ok(())
    })
}

/// Free decay of the excited DQ at `times` (seconds, non-decreasing).
///
/// # Safety
/// `sys` must be a live system, `times` readable for `n` doubles, `out`
/// writable for one pointer.
#[no_mangle]
pub unsafe extern "C" fn jqf_decay(sys: *const JqfSystem, times: *const f64, n: usize, out: *mut *mut JqfTrajectory) -> JqfStatus {
    guard(|| {
        let sys = deref(sys, "sys")?;
        let times = slice(times, n, "times")?;
        let t = decay_amplitudes(&sys.couplings, times).map_err(core)?;
        hand_out(out, t.into())
    })
}

/// Retarded decay up to `t_end`. `step <= 0` picks the default step. The
/// largest deviation from the free-evolution model goes to `max_dev` when it
/// is not NULL.
///
/// # Safety
/// `sys` must be a live system, `out` writable for one pointer, `max_dev`
/// NULL or writable for one double.
#[no_mangle]
pub unsafe extern "C" fn jqf_dde(sys: *const JqfSystem, t_end: f64, step: f64, max_dev: *mut f64, out: *mut *mut JqfTrajectory) -> JqfStatus {
    guard(|| {
        let sys = deref(sys, "sys")?;
        let cmp = if step > 0.0 {
            compare_with_step(&sys.params, t_end, step)
        } else {
            compare_with_approximation(&sys.params, t_end)
        }
        .map_err(core)?;
        if let Some(d) = max_dev.as_mut() {
            *d = cmp.max_dev;
        }
        hand_out(out, cmp.rigorous.into())
    })
}

/// Continuous resonant drive whose free-DQ Rabi frequency is `rabi` (rad/s).
///
/// # Safety
/// As for [`jqf_decay`].
#[no_mangle]
pub unsafe extern "C" fn jqf_rabi(sys: *const JqfSystem, rabi: f64, times: *const f64, n: usize, out: *mut *mut JqfTrajectory) -> JqfStatus {
    guard(|| {
        let sys = deref(sys, "sys")?;
        let times = slice(times, n, "times")?;
        let e = drive_amplitude_for_rabi(sys.params.gamma1, rabi).map_err(core)?;
        let drive = DriveEnvelope::continuous(C64::new(e, 0.0), sys.params.omega1);
        let t = evolve_master(&sys.params, &sys.couplings, &drive, times).map_err(core)?;
        hand_out(out, t.into())
    })
}

/// One square π-pulse of length `duration` starting at t = 0.
///
/// # Safety
/// As for [`jqf_decay`].
#[no_mangle]
pub unsafe extern "C" fn jqf_pi_pulse(sys: *const JqfSystem, duration: f64, times: *const f64, n: usize, out: *mut *mut JqfTrajectory) -> JqfStatus {
    guard(|| {
        let sys = deref(sys, "sys")?;
        let times = slice(times, n, "times")?;
        let t = scenario_pi_pulse(&sys.params, duration, times).map_err(core)?;
        hand_out(out, t.into())
    })
}

/// `n_pulses` π-pulses of length `duration`, one every `period`.
///
/// # Safety
/// As for [`jqf_decay`].
#[no_mangle]
pub unsafe extern "C" fn jqf_pulse_train(
    sys: *const JqfSystem,
    duration: f64,
    period: f64,
    n_pulses: usize,
    times: *const f64,
    n: usize,
    out: *mut *mut JqfTrajectory,
) -> JqfStatus {
    guard(|| {
        let sys = deref(sys, "sys")?;
        let times = slice(times, n, "times")?;
        let t = scenario_pulse_train(&sys.params, duration, period, n_pulses, times).map_err(core)?;
        hand_out(out, t.into())
    })
}

/// Driven DQ on its own (no JQF): P₁ at `times` written to `p1_out`.
///
/// # Safety
/// `times` readable and `p1_out` writable for `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn jqf_free_rabi(gamma1: f64, amplitude: f64, times: *const f64, n: usize, p1_out: *mut f64) -> JqfStatus {
    guard(|| {
        let times = slice(times, n, "times")?;
        if n > 0 && p1_out.is_null() {
            return Err(null("p1_out"));
        }
        if !(gamma1 > 0.0 && gamma1.is_finite() && amplitude.is_finite()) {
            return Err((JqfStatus::InvalidParameter, format!("gamma1 = {gamma1}, amplitude = {amplitude}")));
        }
        let p1 = free_rabi(gamma1, amplitude, times);
        if n > 0 {
            std::slice::from_raw_parts_mut(p1_out, n).copy_from_slice(&p1);
        }
        Ok(())
    })
}

/// Number of samples, 0 for NULL.
///
/// # Safety
/// `traj` must be NULL or a live trajectory.
#[no_mangle]
pub unsafe extern "C" fn jqf_trajectory_len(traj: *const JqfTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.times.len())
}

/// Copies one column into `buf`, which must hold at least
/// [`jqf_trajectory_len`] doubles.
///
/// # Safety
/// `traj` must be a live trajectory; `buf` writable for `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn jqf_trajectory_copy(traj: *const JqfTrajectory, column: JqfColumn, buf: *mut f64, capacity: usize) -> JqfStatus {
    guard(|| {
        let t = deref(traj, "traj")?;
        let src = match column {
            JqfColumn::Time => &t.times,
            JqfColumn::P1 => &t.p1,
            JqfColumn::P2 => &t.p2,
            JqfColumn::Purity => &t.purity,
        };
        if capacity < src.len() {
            return Err((JqfStatus::BufferTooSmall, format!("need {} doubles, got {capacity}", src.len())));
        }
        if !src.is_empty() {
            if buf.is_null() {
                return Err(null("buf"));
            }
            std::slice::from_raw_parts_mut(buf, src.len()).copy_from_slice(src);
        }
        Ok(())
    })
}

/// # Safety
/// `traj` must be NULL or a trajectory from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn jqf_trajectory_free(traj: *mut JqfTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}
