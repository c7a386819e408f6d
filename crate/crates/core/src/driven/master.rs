//! Two-qubit Lindblad master equation. Basis index 2·q₁ + q₂ with q = 1
//! excited, so index 0 is the joint ground state.

use std::collections::HashMap;

use nalgebra::{Matrix4, SMatrix, SVector};
use num_complex::Complex64 as C64;

use super::{
    check_inputs, frame_drive, schedule, step_bound, DriveEnvelope, DriveSegment, EvolveOptions, Representation,
    StateTrajectory, Validation,
};
use crate::error::{JqfError, JqfResult};
use crate::model::{DerivedCouplings, SystemParameters};

type Super = SMatrix<C64, 16, 16>;
type Vec16 = SVector<C64, 16>;

const TRACE_TOL: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-12;
const POSITIVITY_TOL: f64 = 1e-9;

/// Lowering operators σ₁ = σ ⊗ 1 and σ₂ = 1 ⊗ σ.
pub fn lowering() -> [Matrix4<C64>; 2] {
    let one = C64::new(1.0, 0.0);
    let mut s1 = Matrix4::zeros();
    s1[(0, 2)] = one;
    s1[(1, 3)] = one;
    let mut s2 = Matrix4::zeros();
    s2[(0, 1)] = one;
    s2[(2, 3)] = one;
    [s1, s2]
}

/// Expectations of the nine moment operators.
pub fn moments_from_rho(rho: &Matrix4<C64>) -> [C64; 9] {
    let [s1, s2] = lowering();
    let (d1, d2) = (s1.adjoint(), s2.adjoint());
    let ops = [s1, s2, d1 * s1, d2 * s2, d2 * s1, s1 * s2, d1 * s1 * s2, d2 * s2 * s1, d1 * d2 * s1 * s2];
    ops.map(|op| (rho * op).trace())
}

fn flatten(rho: &Matrix4<C64>) -> Vec16 {
    Vec16::from_fn(|k, _| rho[(k / 4, k % 4)])
}

fn unflatten(v: &Vec16) -> Matrix4<C64> {
    Matrix4::from_fn(|i, j| v[4 * i + j])
}

fn superoperator(f: impl Fn(&Matrix4<C64>) -> Matrix4<C64>) -> Super {
    let mut out = Super::zeros();
    for k in 0..16 {
        let mut e = Matrix4::zeros();
        e[(k / 4, k % 4)] = C64::new(1.0, 0.0);
        out.set_column(k, &flatten(&f(&e)));
    }
    out
}

/// Liouvillian pieces L(t) = L₀ + E(t)·D + E*(t)·D̄ in a frame rotating at ω_f.
struct Liouvillian {
    l0: Super,
    d: Super,
    d_bar: Super,
}

impl Liouvillian {
    fn new(c: &DerivedCouplings, frame: f64) -> Self {
        let [s1, s2] = lowering();
        let sig = [s1, s2];
        let i = C64::i();
        let det = c.detuning();
        let mut h = Matrix4::<C64>::zeros();
        for m in 0..2 {
            let w = det[m] + c.omega_ref - frame + c.j[(m, m)];
            h += sig[m].adjoint() * sig[m] * C64::new(w, 0.0);
        }
        h += (s1.adjoint() * s2 + s2.adjoint() * s1) * C64::new(c.j[(0, 1)], 0.0);
        let s = s1 * C64::new(c.s_coeff[0], 0.0) + s2 * C64::new(c.s_coeff[1], 0.0);
        let sd = s.adjoint();
        let sds = sd * s;
        let loss = c.intrinsic();
        let l0 = superoperator(|r| {
            let mut out = (h * r - r * h) * (-i) + s * r * sd - (sds * r + r * sds) * C64::new(0.5, 0.0);
            for m in 0..2 {
                let n = sig[m].adjoint() * sig[m];
                out += (sig[m] * r * sig[m].adjoint() - (n * r + r * n) * C64::new(0.5, 0.0)) * C64::new(loss[m], 0.0);
            }
            out
        });
        // H_d = −(E S† + E* S)
        let d = superoperator(|r| (sd * r - r * sd) * i);
        let d_bar = superoperator(|r| (s * r - r * s) * i);
        Self { l0, d, d_bar }
    }

    fn at(&self, e: C64) -> Super {
        if e == C64::new(0.0, 0.0) {
            self.l0
        } else {
            self.l0 + self.d * e + self.d_bar * e.conj()
        }
    }
}

/// Σ_{k≤4} (hL)^k/k!, the RK4 update for a constant generator.
fn rk4_propagator(l: &Super, h: f64) -> Super {
    let hl = l * C64::new(h, 0.0);
    let mut term = Super::identity();
    let mut out = Super::identity();
    for k in 1..=4 {
        term = term * hl / C64::new(k as f64, 0.0);
        out += term;
    }
    out
}

fn frame_amplitude(segment: Option<&DriveSegment>, frame: f64, t: f64) -> C64 {
    segment.map_or(C64::new(0.0, 0.0), |s| s.amplitude * C64::from_polar(1.0, -(s.carrier - frame) * t))
}

fn check_cheap(rho: &Matrix4<C64>, t: f64) -> JqfResult<()> {
    let tr = rho.trace();
    if !(tr.re.is_finite() && tr.im.is_finite()) {
        return Err(JqfError::NonFinite { t });
    }
    let dev = (tr - C64::new(1.0, 0.0)).norm();
    if dev > TRACE_TOL {
        return Err(JqfError::Unphysical { t, what: "|Tr ρ − 1|", value: dev });
    }
    let mut herm = 0.0f64;
    for i in 0..4 {
        for j in i..4 {
            herm = herm.max((rho[(i, j)] - rho[(j, i)].conj()).norm());
        }
    }
    if herm > HERMITIAN_TOL {
        return Err(JqfError::Unphysical { t, what: "‖ρ − ρ†‖", value: herm });
    }
    for i in 0..4 {
        if rho[(i, i)].re < -POSITIVITY_TOL {
            return Err(JqfError::Unphysical { t, what: "diagonal element", value: rho[(i, i)].re });
        }
        for j in i + 1..4 {
            let excess = rho[(i, j)].norm_sqr() - rho[(i, i)].re * rho[(j, j)].re;
            if excess > POSITIVITY_TOL {
                return Err(JqfError::Unphysical { t, what: "2×2 principal minor", value: -excess });
            }
        }
    }
    Ok(())
}

fn check_spectrum(rho: &Matrix4<C64>, t: f64) -> JqfResult<()> {
    let herm = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
    let min = herm.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
    if min < -POSITIVITY_TOL {
        return Err(JqfError::Unphysical { t, what: "smallest eigenvalue", value: min });
    }
    Ok(())
}

/// Master-equation evolution from the joint ground state in the drive frame.
pub fn evolve_master(p: &SystemParameters, c: &DerivedCouplings, drive: &DriveEnvelope, times: &[f64]) -> JqfResult<StateTrajectory> {
    evolve_master_with(p, c, drive, times, &EvolveOptions::default())
}

pub fn evolve_master_with(
    p: &SystemParameters,
    c: &DerivedCouplings,
    drive: &DriveEnvelope,
    times: &[f64],
    opts: &EvolveOptions,
) -> JqfResult<StateTrajectory> {
    check_inputs(p, c, times)?;
    let frame = opts.frame.resolve(c, drive);
    let liou = Liouvillian::new(c, frame);
    let rho0 = opts.initial.density();
    check_cheap(&rho0, 0.0)?;
    check_spectrum(&rho0, 0.0)?;

    let mut state = flatten(&rho0);
    let mut rho_out = Vec::with_capacity(times.len());
    let mut next = 0;
    let mut record = |t: f64, rho: &Matrix4<C64>, next: &mut usize| {
        while *next < times.len() && times[*next] == t {
            rho_out.push(*rho);
            *next += 1;
        }
    };
    record(0.0, &rho0, &mut next);

    let mut cache: HashMap<(u64, u64, u64), Super> = HashMap::new();
    for piece in schedule(drive, times) {
        let seg = piece.segment.as_ref();
        let mut bound = step_bound(c, frame, seg);
        if let Some(h) = opts.max_step {
            bound = bound.min(h);
        }
        let span = piece.t1 - piece.t0;
        let n = (span / bound).ceil().max(1.0) as usize;
        let h = span / n as f64;
        let autonomous = seg.is_none_or(|s| s.carrier == frame || s.amplitude == C64::new(0.0, 0.0));
        let prop = if autonomous {
            let e = frame_amplitude(seg, frame, 0.0);
            let key = (e.re.to_bits(), e.im.to_bits(), h.to_bits());
            Some(*cache.entry(key).or_insert_with(|| rk4_propagator(&liou.at(e), h)))
        } else {
            None
        };
        for k in 0..n {
            let t = piece.t0 + k as f64 * h;
            state = match &prop {
                Some(pm) => pm * state,
                None => {
                    let l = |tt: f64| liou.at(frame_amplitude(seg, frame, tt));
                    let lm = l(t + 0.5 * h);
                    let k1 = l(t) * state;
                    let k2 = lm * (state + k1 * C64::new(0.5 * h, 0.0));
                    let k3 = lm * (state + k2 * C64::new(0.5 * h, 0.0));
                    let k4 = l(t + h) * (state + k3 * C64::new(h, 0.0));
                    state + (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(h / 6.0, 0.0)
                }
            };
            let t_next = if k + 1 == n { piece.t1 } else { t + h };
            let rho = unflatten(&state);
            check_cheap(&rho, t_next)?;
            if opts.validation == Validation::Strict {
                check_spectrum(&rho, t_next)?;
            }
        }
        let rho = unflatten(&state);
        if next < times.len() && times[next] == piece.t1 {
            check_spectrum(&rho, piece.t1)?;
        }
        record(piece.t1, &rho, &mut next);
    }
    let moments = rho_out.iter().map(moments_from_rho).collect();
    Ok(StateTrajectory::from_moments(times.to_vec(), Representation::DensityMatrix, frame, rho_out, moments))
}

/// dρ/dt for a drive amplitude `e` already expressed in the frame.
pub fn lindblad_rhs(c: &DerivedCouplings, frame: f64, e: C64, rho: &Matrix4<C64>) -> Matrix4<C64> {
    unflatten(&(Liouvillian::new(c, frame).at(e) * flatten(rho)))
}

/// ν_m(t) in the integration frame, exposed for diagnostics.
pub fn drive_in_frame(c: &DerivedCouplings, drive: &DriveEnvelope, frame: f64, t: f64) -> [C64; 2] {
    frame_drive(c, drive.segment_at(t), frame, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driven::moment;
    use crate::model::{derive_couplings, ReferenceFrequency};

    #[test]
    fn operators() {
        let [s1, s2] = lowering();
        assert_eq!(s1 * s1, Matrix4::zeros());
        assert_eq!(s1 * s2, s2 * s1);
        let n1 = s1.adjoint() * s1;
        assert_eq!(n1[(2, 2)], C64::new(1.0, 0.0));
        assert_eq!(n1[(3, 3)], C64::new(1.0, 0.0));
        assert_eq!(n1.trace(), C64::new(2.0, 0.0));
    }

    #[test]
    fn moments_of_basis_states() {
        let mut rho = Matrix4::zeros();
        rho[(3, 3)] = C64::new(1.0, 0.0);
        let m = moments_from_rho(&rho);
        assert_eq!(m[moment::N1], C64::new(1.0, 0.0));
        assert_eq!(m[moment::N1_N2], C64::new(1.0, 0.0));
        assert_eq!(m[moment::S1], C64::new(0.0, 0.0));
    }

    #[test]
    fn liouvillian_is_trace_preserving() {
        let p = SystemParameters { gamma_i1: 1e5, gamma_i2: 3e6, ..SystemParameters::default().with_l2_wavelengths(0.31) };
        let c = derive_couplings(&p, ReferenceFrequency::Dq).unwrap();
        let l = Liouvillian::new(&c, p.omega1 + 1e6).at(C64::new(3e4, -2e4));
        for k in 0..16 {
            let tr: C64 = (0..4).map(|i| l[(5 * i, k)]).sum();
            assert!(tr.norm() < 1e-3, "{tr}");
        }
    }

    #[test]
    fn ground_state_is_stationary_without_drive() {
        let p = SystemParameters::default();
        let c = derive_couplings(&p, ReferenceFrequency::Dq).unwrap();
        let tr = evolve_master(&p, &c, &DriveEnvelope::off(), &[0.0, 1e-6]).unwrap();
        assert_eq!(tr.p1, vec![0.0, 0.0]);
        assert_eq!(tr.purity[1], 1.0);
    }
}
