//! Dynamics under a classical coherent drive: the two-qubit Lindblad master
//! equation and the closed set of nine moment equations, plus the scenario
//! helpers built on them.

pub mod drive;
pub mod master;
pub mod moments;
pub mod rabi;
pub mod scenarios;

use nalgebra::Matrix4;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{check_times, JqfError, JqfResult};
use crate::model::{DerivedCouplings, SystemParameters};
pub use drive::{DriveEnvelope, DriveSegment};
pub use master::{evolve_master, evolve_master_with, lindblad_rhs, moments_from_rho};
pub use moments::{evolve_moments, evolve_moments_with, MomentSystem};
pub use rabi::free_rabi;
pub use scenarios::{pi_pulse_amplitude, scenario_pi_pulse, scenario_pulse_train};

/// Frequency the integration frame rotates at.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Frame {
    /// Carrier of the first drive segment (ω_ref when the drive is off).
    #[default]
    Drive,
    /// The coupling reference ω_ref.
    Reference,
    Fixed(f64),
}

impl Frame {
    pub fn resolve(self, c: &DerivedCouplings, drive: &DriveEnvelope) -> f64 {
        match self {
            Frame::Drive => drive.carrier().unwrap_or(c.omega_ref),
            Frame::Reference => c.omega_ref,
            Frame::Fixed(w) => w,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub enum InitialState {
    /// Both qubits in |g⟩.
    #[default]
    Ground,
    /// σ₁†|g g⟩.
    DqExcited,
    Density(Matrix4<C64>),
}

impl InitialState {
    pub fn density(&self) -> Matrix4<C64> {
        match self {
            InitialState::Ground => basis_projector(0),
            InitialState::DqExcited => basis_projector(2),
            InitialState::Density(rho) => *rho,
        }
    }
}

fn basis_projector(k: usize) -> Matrix4<C64> {
    let mut m = Matrix4::zeros();
    m[(k, k)] = C64::new(1.0, 0.0);
    m
}

/// How thoroughly the density matrix is checked along the way.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Validation {
    /// Trace, Hermiticity, diagonal and 2×2-minor tests every step; full
    /// spectrum at the recorded samples.
    #[default]
    Sampled,
    /// Full spectrum at every step.
    Strict,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EvolveOptions {
    pub initial: InitialState,
    pub frame: Frame,
    /// Overrides the automatic step bound (it is still capped by the grid).
    pub max_step: Option<f64>,
    pub validation: Validation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Representation {
    DensityMatrix,
    Moments,
}

/// Indices into the nine moments.
pub mod moment {
    /// ⟨σ₁⟩
    pub const S1: usize = 0;
    /// ⟨σ₂⟩
    pub const S2: usize = 1;
    /// ⟨σ₁†σ₁⟩
    pub const N1: usize = 2;
    /// ⟨σ₂†σ₂⟩
    pub const N2: usize = 3;
    /// ⟨σ₂†σ₁⟩
    pub const S2D_S1: usize = 4;
    /// ⟨σ₁σ₂⟩
    pub const S1_S2: usize = 5;
    /// ⟨σ₁†σ₁σ₂⟩
    pub const N1_S2: usize = 6;
    /// ⟨σ₂†σ₁σ₂⟩
    pub const N2_S1: usize = 7;
    /// ⟨σ₁†σ₂†σ₁σ₂⟩
    pub const N1_N2: usize = 8;
}

/// Sampled solution of a driven run. Coherences live in the frame rotating
/// at `frame`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateTrajectory {
    pub times: Vec<f64>,
    pub representation: Representation,
    pub frame: f64,
    /// Present for [`Representation::DensityMatrix`].
    pub rho: Vec<Matrix4<C64>>,
    /// The nine moments at every sample (extracted from ρ for master runs).
    pub moments: Vec<[C64; 9]>,
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    pub purity: Vec<f64>,
}

impl StateTrajectory {
    fn from_moments(times: Vec<f64>, representation: Representation, frame: f64, rho: Vec<Matrix4<C64>>, moments: Vec<[C64; 9]>) -> Self {
        let p1 = moments.iter().map(|m| m[moment::N1].re).collect();
        let p2 = moments.iter().map(|m| m[moment::N2].re).collect();
        let purity = moments.iter().map(|m| dq_purity(m[moment::N1].re, m[moment::S1])).collect();
        Self { times, representation, frame, rho, moments, p1, p2, purity }
    }
}

fn dq_purity(p: f64, coherence: C64) -> f64 {
    p * p + (1.0 - p) * (1.0 - p) + 2.0 * coherence.norm_sqr()
}

/// Purity Tr ρ₁² of the reduced DQ state at every sample.
pub fn purity(traj: &StateTrajectory) -> Vec<f64> {
    traj.moments.iter().map(|m| dq_purity(m[moment::N1].re, m[moment::S1])).collect()
}

/// An interval with a fixed drive segment (or none).
#[derive(Clone, Copy, Debug)]
struct Piece {
    t0: f64,
    t1: f64,
    segment: Option<DriveSegment>,
}

/// Cuts [0, max(times)] at every drive edge and sample.
fn schedule(drive: &DriveEnvelope, times: &[f64]) -> Vec<Piece> {
    let t_max = times.last().copied().unwrap_or(0.0);
    let mut stops: Vec<f64> = drive.edges(t_max).into_iter().chain(times.iter().copied()).filter(|&t| t > 0.0).collect();
    stops.push(0.0);
    stops.sort_by(f64::total_cmp);
    stops.dedup();
    stops
        .windows(2)
        .map(|w| Piece { t0: w[0], t1: w[1], segment: drive.segment_at(0.5 * (w[0] + w[1])).copied() })
        .collect()
}

/// Largest RK4 step for a piece: 1/(100κ) with κ the fastest rate in play,
/// and at most a twentieth of the drive segment.
fn step_bound(c: &DerivedCouplings, frame: f64, segment: Option<&DriveSegment>) -> f64 {
    let p = &c.params;
    let mut kappa = [p.gamma1, p.gamma2, p.gamma_i1, p.gamma_i2, c.j[(0, 1)].abs()]
        .into_iter()
        .chain([0, 1].map(|m| (c.detuning()[m] + c.omega_ref - frame + c.j[(m, m)]).abs()))
        .fold(0.0, f64::max);
    let mut bound = f64::INFINITY;
    if let Some(s) = segment {
        let e = s.amplitude.norm();
        kappa = kappa.max((8.0 * p.gamma1).sqrt() * e).max((8.0 * p.gamma2).sqrt() * e);
        if e > 0.0 {
            kappa = kappa.max((s.carrier - frame).abs());
        }
        bound = (s.t_end - s.t_start) / 20.0;
    }
    if kappa > 0.0 {
        bound = bound.min(1.0 / (100.0 * kappa));
    }
    bound
}

fn check_inputs(p: &SystemParameters, c: &DerivedCouplings, times: &[f64]) -> JqfResult<()> {
    p.validate()?;
    if c.params != *p {
        return Err(JqfError::InvalidParameter { name: "couplings", reason: "derived from different parameters".into() });
    }
    if times.is_empty() {
        return Err(JqfError::InvalidTimes("no sample times".into()));
    }
    check_times(times)
}

/// ν_m(t) = s_m E(t) in the frame rotating at `frame`.
fn frame_drive(c: &DerivedCouplings, segment: Option<&DriveSegment>, frame: f64, t: f64) -> [C64; 2] {
    match segment {
        None => [C64::new(0.0, 0.0); 2],
        Some(s) => {
            let e = s.amplitude * C64::from_polar(1.0, -(s.carrier - frame) * t);
            [e * c.s_coeff[0], e * c.s_coeff[1]]
        }
    }
}
