use thiserror::Error;

/// Errors raised by the physics modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum JqfError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// DQ sits at a node of the standing wave, so it neither decays nor
    /// couples to the control field.
    #[error("radiative lifetime diverges: DQ sits at a standing-wave node (cos θ₁ = {cos_theta1:e})")]
    DivergentLifetime { cos_theta1: f64 },

    #[error("DQ is decoupled from the control line (η = {eta:e})")]
    ZeroCoupling { eta: f64 },

    /// JQF is (close to) a node of the standing wave, so it does not decay fast
    /// enough to be eliminated adiabatically.
    #[error(
        "adiabatic elimination breaks down: JQF rate {jqf_rate:e} rad/s does not exceed \
         DQ rate {dq_rate:e} rad/s (l₂ near an odd multiple of λ/4)"
    )]
    ResonantCavity { jqf_rate: f64, dq_rate: f64 },

    #[error("branch {branch} requires {requirement}")]
    BranchMismatch { branch: &'static str, requirement: &'static str },

    #[error("the super/sub-radiant decomposition requires l₁ = l₂ = 0 (got l₁ = {l1} m, l₂ = {l2} m)")]
    NotColocated { l1: f64, l2: f64 },

    #[error("step {h:e} s exceeds the stability bound {bound:e} s ({reason})")]
    StepTooLarge { h: f64, bound: f64, reason: &'static str },

    #[error("non-finite state encountered at t = {t:e} s")]
    NonFinite { t: f64 },

    #[error(
        "density matrix left the physical set at t = {t:e} s ({what} = {value:e}); reduce the step"
    )]
    Unphysical { t: f64, what: &'static str, value: f64 },

    #[error("invalid time grid: {0}")]
    InvalidTimes(String),

    #[error("invalid drive envelope: {0}")]
    InvalidDrive(String),
}

pub type JqfResult<T> = Result<T, JqfError>;

pub(crate) fn check_times(times: &[f64]) -> JqfResult<()> {
    for (k, &t) in times.iter().enumerate() {
        if !t.is_finite() || t < 0.0 {
            return Err(JqfError::InvalidTimes(format!("times[{k}] = {t} is negative or non-finite")));
        }
        if k > 0 && t < times[k - 1] {
            return Err(JqfError::InvalidTimes(format!("times[{k}] = {t} precedes times[{}]", k - 1)));
        }
    }
    Ok(())
}
