//! The closed set of nine moment equations. Two-level algebra (σ² = 0,
//! σσ† = 1 − σ†σ) closes the hierarchy exactly, so these carry the same
//! information as the density matrix.

use num_complex::Complex64 as C64;

use super::master::moments_from_rho;
use super::{check_inputs, frame_drive, moment, schedule, step_bound, DriveEnvelope, EvolveOptions, Representation, StateTrajectory};
use crate::error::{JqfError, JqfResult};
use crate::model::{DerivedCouplings, SystemParameters};
use crate::numerics::rk4_step;

const TOL: f64 = 1e-9;

/// Constant coefficients of the moment equations in a given frame.
#[derive(Clone, Copy, Debug)]
pub struct MomentSystem {
    /// ω_m − ω_frame.
    pub detuning: [f64; 2],
    pub x11: C64,
    pub x22: C64,
    pub x12: C64,
    pub loss: [f64; 2],
}

impl MomentSystem {
    pub fn new(c: &DerivedCouplings, frame: f64) -> Self {
        let det = c.detuning();
        Self {
            detuning: [det[0] + c.omega_ref - frame, det[1] + c.omega_ref - frame],
            x11: c.xi[(0, 0)],
            x22: c.xi[(1, 1)],
            x12: c.xi[(0, 1)],
            loss: c.intrinsic(),
        }
    }

    /// Time derivative of the moments for drive amplitudes ν = (s₁E, s₂E).
    pub fn rhs(&self, m: &[C64; 9], nu: [C64; 2]) -> [C64; 9] {
        let i = C64::i();
        let [d1, d2] = self.detuning;
        let [gi1, gi2] = self.loss;
        let (x11, x22, x12) = (self.x11, self.x22, self.x12);
        let x12c = x12.conj();
        let (r1, r2) = (2.0 * x11.re, 2.0 * x22.re);
        let [n1, n2] = nu;
        let (a, b, p, q, c, d, e, f, g) = (m[0], m[1], m[2], m[3], m[4], m[5], m[6], m[7], m[8]);
        let one = C64::new(1.0, 0.0);
        [
            -(i * d1 + x11 + 0.5 * gi1) * a - x12 * b + 2.0 * x12 * e + i * n1 * (one - 2.0 * p),
            -(i * d2 + x22 + 0.5 * gi2) * b - x12 * a + 2.0 * x12 * f + i * n2 * (one - 2.0 * q),
            -(r1 + gi1) * p - x12 * c.conj() - x12c * c + i * n1 * a.conj() - i * n1.conj() * a,
            -(r2 + gi2) * q - x12 * c - x12c * c.conj() + i * n2 * b.conj() - i * n2.conj() * b,
            -(i * (d1 - d2) + x11 + x22.conj() + 0.5 * (gi1 + gi2)) * c + x12 * (2.0 * g - q) + x12c * (2.0 * g - p)
                - i * n1 * (2.0 * e.conj() - b.conj())
                - i * n2.conj() * (a - 2.0 * f),
            -(i * (d1 + d2) + x11 + x22 + 0.5 * (gi1 + gi2)) * d - i * n1 * (2.0 * e - b) - i * n2 * (2.0 * f - a),
            -(i * d2 + r1 + x22 + gi1 + 0.5 * gi2) * e - x12c * f + i * n1 * c.conj() - i * n1.conj() * d
                - i * n2 * (2.0 * g - p),
            -(i * d1 + r2 + x11 + gi2 + 0.5 * gi1) * f - x12c * e + i * n2 * c - i * n2.conj() * d - i * n1 * (2.0 * g - q),
            -(r1 + r2 + gi1 + gi2) * g + i * n1 * f.conj() - i * n1.conj() * f + i * n2 * e.conj() - i * n2.conj() * e,
        ]
    }
}

fn check_moments(m: &[C64; 9], t: f64) -> JqfResult<()> {
    if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(JqfError::NonFinite { t });
    }
    let (p, q, g) = (m[moment::N1].re, m[moment::N2].re, m[moment::N1_N2].re);
    for (what, v) in [("⟨σ₁†σ₁⟩", p), ("⟨σ₂†σ₂⟩", q)] {
        if !(-TOL..=1.0 + TOL).contains(&v) {
            return Err(JqfError::Unphysical { t, what, value: v });
        }
    }
    if g < -TOL || g > p.min(q) + TOL {
        return Err(JqfError::Unphysical { t, what: "⟨σ₁†σ₂†σ₁σ₂⟩", value: g });
    }
    Ok(())
}

/// Moment evolution from the joint ground state in the drive frame.
pub fn evolve_moments(p: &SystemParameters, c: &DerivedCouplings, drive: &DriveEnvelope, times: &[f64]) -> JqfResult<StateTrajectory> {
    evolve_moments_with(p, c, drive, times, &EvolveOptions::default())
}

pub fn evolve_moments_with(
    p: &SystemParameters,
    c: &DerivedCouplings,
    drive: &DriveEnvelope,
    times: &[f64],
    opts: &EvolveOptions,
) -> JqfResult<StateTrajectory> {
    check_inputs(p, c, times)?;
    let frame = opts.frame.resolve(c, drive);
    let sys = MomentSystem::new(c, frame);
    let mut m = moments_from_rho(&opts.initial.density());
    check_moments(&m, 0.0)?;

    let mut out = Vec::with_capacity(times.len());
    let mut next = 0;
    while next < times.len() && times[next] == 0.0 {
        out.push(m);
        next += 1;
    }
    for piece in schedule(drive, times) {
        let seg = piece.segment;
        let mut bound = step_bound(c, frame, seg.as_ref());
        if let Some(h) = opts.max_step {
            bound = bound.min(h);
        }
        let span = piece.t1 - piece.t0;
        let n = (span / bound).ceil().max(1.0) as usize;
        let h = span / n as f64;
        let mut f = |t: f64, y: &[C64; 9]| sys.rhs(y, frame_drive(c, seg.as_ref(), frame, t));
        for k in 0..n {
            let t = piece.t0 + k as f64 * h;
            m = rk4_step(&mut f, t, h, &m);
            check_moments(&m, t + h)?;
        }
        while next < times.len() && times[next] == piece.t1 {
            out.push(m);
            next += 1;
        }
    }
    Ok(StateTrajectory::from_moments(times.to_vec(), Representation::Moments, frame, Vec::new(), out))
}
