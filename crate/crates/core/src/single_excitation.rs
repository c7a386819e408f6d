//! One excitation shared by DQ, JQF and the emitted photon, within the
//! free-evolution (Markov) approximation.
//!
//! Amplitudes are kept as envelopes ᾱ_j(t) = α_j(t) e^{iω_ref t}; the carrier
//! is stored alongside so lab-frame values can be recovered.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{check_times, JqfError, JqfResult};
use crate::model::{derive_couplings, DerivedCouplings, ReferenceFrequency, SystemParameters};
use crate::numerics::trapezoid;

/// Roots closer than this (relative) are merged into the confluent form.
const DEGENERACY_TOLERANCE: f64 = 1e-8;

/// Exact solution of dᾱ/dt = −M ᾱ with ᾱ(0) = (1, 0).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoModeSolution {
    pub generator: Matrix2<C64>,
    /// Roots of (z + M₁₁)(z + M₂₂) − M₁₂M₂₁, ordered by decreasing real part
    /// (μ₁ is the slow, subradiant root).
    pub mu: [C64; 2],
    pub confluent: bool,
}

impl TwoModeSolution {
    pub fn new(generator: Matrix2<C64>, scale: f64) -> Self {
        let mu = characteristic_roots(&generator);
        let spread = (mu[0] - mu[1]).norm();
        let confluent = spread < DEGENERACY_TOLERANCE * (mu[0].norm() + mu[1].norm() + scale);
        Self { generator, mu, confluent }
    }

    pub fn from_couplings(c: &DerivedCouplings) -> Self {
        Self::new(c.single_excitation_generator(), c.params.gamma2)
    }

    /// Envelopes (ᾱ₁, ᾱ₂) at time `t`.
    pub fn envelopes(&self, t: f64) -> [C64; 2] {
        let m11 = self.generator[(0, 0)];
        let m21 = self.generator[(1, 0)];
        let [mu1, mu2] = self.mu;
        if self.confluent {
            let mu = 0.5 * (mu1 + mu2);
            let e = (mu * t).exp();
            return [e * (1.0 - (mu + m11) * t), -m21 * t * e];
        }
        let (e1, e2) = ((mu1 * t).exp(), (mu2 * t).exp());
        let d = mu2 - mu1;
        [((mu2 + m11) * e1 - (mu1 + m11) * e2) / d, m21 * (e1 - e2) / d]
    }
}

/// Roots of z² + (M₁₁+M₂₂) z + det M, computed without cancellation in the
/// small root.
pub fn characteristic_roots(m: &Matrix2<C64>) -> [C64; 2] {
    let b = m[(0, 0)] + m[(1, 1)];
    let c = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let sq = (b * b - 4.0 * c).sqrt();
    let sq = if (b.conj() * sq).re >= 0.0 { sq } else { -sq };
    let q = -0.5 * (b + sq);
    let (r1, r2) = if q.norm() == 0.0 { (C64::new(0.0, 0.0), C64::new(0.0, 0.0)) } else { (q, c / q) };
    if r1.re >= r2.re {
        [r1, r2]
    } else {
        [r2, r1]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeTrajectory {
    pub times: Vec<f64>,
    /// Envelope of α₁ in the frame rotating at `carrier`.
    pub alpha1: Vec<C64>,
    pub alpha2: Vec<C64>,
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    /// (μ₁, μ₂) when the trajectory comes from the closed form.
    pub roots: Option<[C64; 2]>,
    pub carrier: f64,
}

impl AmplitudeTrajectory {
    pub(crate) fn from_envelopes(times: Vec<f64>, envelopes: Vec<[C64; 2]>, roots: Option<[C64; 2]>, carrier: f64) -> Self {
        let alpha1: Vec<C64> = envelopes.iter().map(|a| a[0]).collect();
        let alpha2: Vec<C64> = envelopes.iter().map(|a| a[1]).collect();
        let p1 = alpha1.iter().map(|a| a.norm_sqr()).collect();
        let p2 = alpha2.iter().map(|a| a.norm_sqr()).collect();
        Self { times, alpha1, alpha2, p1, p2, roots, carrier }
    }

    /// Lab-frame α₁(t_k) = ᾱ₁ e^{−iω t_k}.
    pub fn lab_alpha1(&self, k: usize) -> C64 {
        self.alpha1[k] * C64::from_polar(1.0, -self.carrier * self.times[k])
    }

    pub fn lab_alpha2(&self, k: usize) -> C64 {
        self.alpha2[k] * C64::from_polar(1.0, -self.carrier * self.times[k])
    }

    /// Envelopes at an arbitrary time inside the trajectory, by linear
    /// interpolation between samples.
    pub fn interpolate(&self, t: f64) -> Option<[C64; 2]> {
        let n = self.times.len();
        if n == 0 || t < self.times[0] || t > self.times[n - 1] {
            return None;
        }
        let k = self.times.partition_point(|&s| s < t);
        if k < n && self.times[k] == t {
            return Some([self.alpha1[k], self.alpha2[k]]);
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let w = (t - t0) / (t1 - t0);
        Some([
            self.alpha1[k - 1] * (1.0 - w) + self.alpha1[k] * w,
            self.alpha2[k - 1] * (1.0 - w) + self.alpha2[k] * w,
        ])
    }
}

/// α₁, α₂ for DQ initially excited, from the two-exponential closed form.
pub fn decay_amplitudes(c: &DerivedCouplings, times: &[f64]) -> JqfResult<AmplitudeTrajectory> {
    check_times(times)?;
    let sol = TwoModeSolution::from_couplings(c);
    let env = times.iter().map(|&t| sol.envelopes(t)).collect();
    Ok(AmplitudeTrajectory::from_envelopes(times.to_vec(), env, Some(sol.mu), c.omega_ref))
}

/// P₁(t) = |α₁(t)|².
pub fn survival_probability(c: &DerivedCouplings, t: f64) -> JqfResult<f64> {
    check_times(&[t])?;
    Ok(TwoModeSolution::from_couplings(c).envelopes(t)[0].norm_sqr())
}

/// (γ₂/(γ₁+γ₂))², the long-time survival probability at optimal positions.
pub fn stationary_survival_optimal(gamma1: f64, gamma2: f64) -> f64 {
    let r = gamma2 / (gamma1 + gamma2);
    r * r
}

/// Position of DQ relative to JQF.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DqBranch {
    /// l₁ ≤ l₂: DQ between the waveguide end and JQF.
    Inside,
    /// l₁ ≥ l₂: DQ beyond JQF.
    Outside,
}

fn check_adiabatic(c: &DerivedCouplings) -> JqfResult<()> {
    let jqf_rate = c.xi[(1, 1)].re;
    let dq_rate = c.params.gamma1;
    if !(jqf_rate > dq_rate) {
        return Err(JqfError::ResonantCavity { jqf_rate, dq_rate });
    }
    Ok(())
}

/// DQ complex frequency after adiabatic elimination of JQF; the DQ decay rate
/// is −2 Im of the result.
pub fn adiabatic_complex_frequency(c: &DerivedCouplings, branch: DqBranch) -> JqfResult<C64> {
    let p = &c.params;
    let [t1, t2] = c.phases;
    match branch {
        DqBranch::Inside if p.l1 > p.l2 => {
            return Err(JqfError::BranchMismatch { branch: "inside", requirement: "l₁ ≤ l₂" })
        }
        DqBranch::Outside if p.l1 < p.l2 => {
            return Err(JqfError::BranchMismatch { branch: "outside", requirement: "l₁ ≥ l₂" })
        }
        _ => {}
    }
    check_adiabatic(c)?;
    let w = C64::new(c.omega_ref, 0.0);
    Ok(match branch {
        DqBranch::Inside => w - p.gamma1 * t1.cos() * (t2 - t1).sin() / t2.cos(),
        DqBranch::Outside => w - p.gamma1 * C64::from_polar(1.0, t1 - t2) * (t1 - t2).sin(),
    })
}

/// ω_ref + i(M₁₂M₂₁/M₂₂ − M₁₁): adiabatic DQ frequency for arbitrary
/// positions, including detuning and intrinsic losses.
pub fn adiabatic_frequency_general(c: &DerivedCouplings) -> JqfResult<C64> {
    let m = c.single_excitation_generator();
    let denom = m[(1, 1)];
    if denom.norm() <= 1e-12 * (c.params.gamma2 + c.params.gamma1) {
        return Err(JqfError::ResonantCavity { jqf_rate: denom.re, dq_rate: c.params.gamma1 });
    }
    let shift = m[(0, 1)] * m[(1, 0)] / denom - m[(0, 0)];
    Ok(C64::new(c.omega_ref, 0.0) + C64::i() * shift)
}

/// Total DQ decay rate γ_DQ with intrinsic losses and JQF detuning δω = ω₂ − ω₁,
/// in the frame of DQ.
pub fn decay_rate_with_loss(p: &SystemParameters) -> JqfResult<f64> {
    let c = derive_couplings(p, ReferenceFrequency::Dq)?;
    let [t1, t2] = c.phases;
    if t1.sin().abs() < 1e-9 && t2.sin().abs() < 1e-9 {
        let g2 = p.gamma2 + 0.5 * p.gamma_i2;
        let dw = p.omega2 - p.omega1;
        let denom = g2 * g2 + dw * dw;
        let radiative = if denom > 0.0 { 2.0 * p.gamma1 * (1.0 - p.gamma2 * g2 / denom) } else { 2.0 * p.gamma1 };
        return Ok(p.gamma_i1 + radiative.max(0.0));
    }
    let w = adiabatic_frequency_general(&c)?;
    Ok((-2.0 * w.im).max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubradiantDecomposition {
    /// |⟨sup|σ₁†|v⟩|².
    pub sup_weight: f64,
    /// |⟨sub|σ₁†|v⟩|².
    pub sub_weight: f64,
    /// Decay rate of the superradiant state, 2(γ₁+γ₂).
    pub sup_rate: f64,
}

/// Decomposes the excited DQ into super- and sub-radiant states for qubits
/// co-located at the waveguide end.
pub fn subradiant_decomposition(c: &DerivedCouplings) -> JqfResult<SubradiantDecomposition> {
    let p = &c.params;
    let tol = 1e-12 * p.wavelength();
    if p.l1.abs() > tol || p.l2.abs() > tol {
        return Err(JqfError::NotColocated { l1: p.l1, l2: p.l2 });
    }
    let total = p.gamma1 + p.gamma2;
    if !(total > 0.0) {
        return Err(JqfError::InvalidParameter { name: "gamma1 + gamma2", reason: "must be positive".into() });
    }
    let norm = total.sqrt();
    let sup = [p.gamma1.sqrt() / norm, p.gamma2.sqrt() / norm];
    let sub = [p.gamma2.sqrt() / norm, -p.gamma1.sqrt() / norm];
    // σ₁†|v⟩ = (1, 0) in the (σ₁†, σ₂†) basis
    Ok(SubradiantDecomposition {
        sup_weight: sup[0] * sup[0],
        sub_weight: sub[0] * sub[0],
        sup_rate: 2.0 * (c.xi[(0, 0)].re + c.xi[(1, 1)].re),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhotonWavepacket {
    /// Distance from the waveguide end expressed as time of flight r/v (s);
    /// covers [0, t].
    pub delays: Vec<f64>,
    /// Same grid in metres.
    pub positions: Vec<f64>,
    /// f(r, t) in √(1/s), so that ∫|f|² d(r/v) is a probability.
    pub amplitude: Vec<C64>,
    pub t: f64,
}

impl PhotonWavepacket {
    /// ∫₀ᵗ |f(r,t)|² d(r/v) by the trapezoidal rule.
    pub fn norm(&self) -> f64 {
        let dens: Vec<f64> = self.amplitude.iter().map(|f| f.norm_sqr()).collect();
        trapezoid(&self.delays, &dens)
    }
}

/// Wavepacket of the photon emitted by time `t`:
/// f(r,t) = −i s₁ α₁(t − r) − i s₂ α₂(t − r) on 0 ≤ r ≤ t.
pub fn photon_wavepacket(c: &DerivedCouplings, traj: &AmplitudeTrajectory, t: f64) -> JqfResult<PhotonWavepacket> {
    let (first, last) = match (traj.times.first(), traj.times.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(JqfError::InvalidTimes("empty trajectory".into())),
    };
    if !(t >= first && t <= last) || t < 0.0 {
        return Err(JqfError::InvalidTimes(format!("t = {t} outside trajectory [{first}, {last}]")));
    }
    let v = c.params.velocity;
    if t == 0.0 {
        return Ok(PhotonWavepacket { delays: vec![0.0], positions: vec![0.0], amplitude: vec![C64::new(0.0, 0.0)], t });
    }
    let mut step = t / 1000.0;
    if c.params.gamma2 > 0.0 {
        step = step.min(1.0 / (50.0 * c.params.gamma2));
    }
    let n = (t / step).ceil() as usize;
    let closed = traj.roots.map(|_| TwoModeSolution::from_couplings(c));
    let s = c.s_coeff;
    let mut delays = Vec::with_capacity(n + 1);
    let mut amplitude = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let r = if k == n { t } else { k as f64 * t / n as f64 };
        let emitted = t - r;
        let a = match &closed {
            Some(sol) => sol.envelopes(emitted),
            None => traj
                .interpolate(emitted)
                .ok_or_else(|| JqfError::InvalidTimes(format!("trajectory does not cover t = {emitted}")))?,
        };
        let env = -C64::i() * (s[0] * a[0] + s[1] * a[1]);
        delays.push(r);
        amplitude.push(env * C64::from_polar(1.0, -traj.carrier * emitted));
    }
    let positions = delays.iter().map(|r| r * v).collect();
    Ok(PhotonWavepacket { delays, positions, amplitude, t })
}

/// First `n_max` eigenfrequencies (½ + n)πv/l₂ of the cavity formed between
/// the waveguide end and a JQF acting as a mirror.
pub fn effective_cavity_frequencies(l2: f64, velocity: f64, n_max: usize) -> JqfResult<Vec<f64>> {
    if !(l2 > 0.0) || !l2.is_finite() {
        return Err(JqfError::InvalidParameter { name: "l2", reason: format!("{l2} must be positive") });
    }
    if !(velocity > 0.0) {
        return Err(JqfError::InvalidParameter { name: "velocity", reason: "must be positive".into() });
    }
    Ok((0..n_max).map(|n| (0.5 + n as f64) * PI * velocity / l2).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rk4_span;
    use approx::assert_relative_eq;
    use std::f64::consts::TAU;

    fn couplings(p: &SystemParameters) -> DerivedCouplings {
        derive_couplings(p, ReferenceFrequency::Dq).unwrap()
    }

    #[test]
    fn optimal_position_reduces_to_printed_form() {
        let p = SystemParameters::default();
        let c = couplings(&p);
        let (g1, g2) = (p.gamma1, p.gamma2);
        let times: Vec<f64> = (0..200).map(|k| k as f64 * 0.1e-9).collect();
        let traj = decay_amplitudes(&c, &times).unwrap();
        let [mu1, mu2] = traj.roots.unwrap();
        assert!(mu1.norm() < 1e-6 * g2);
        assert!((mu2 + (g1 + g2)).norm() < 1e-6 * g2);
        for (k, &t) in times.iter().enumerate() {
            let want = (g2 + g1 * (-(g1 + g2) * t).exp()) / (g1 + g2);
            assert!((traj.alpha1[k] - want).norm() < 1e-12);
            // n = 1 ⇒ (−)^{n+1} = +
            let want2 = (g1 * g2).sqrt() / (g1 + g2) * (1.0 - (-(g1 + g2) * t).exp());
            assert!((traj.alpha2[k] - want2).norm() < 1e-12);
        }
        assert_eq!(traj.alpha1[0], C64::new(1.0, 0.0));
        assert_eq!(traj.alpha2[0], C64::new(0.0, 0.0));
    }

    #[test]
    fn stationary_survival() {
        let p = SystemParameters::default();
        let c = couplings(&p);
        let p1 = survival_probability(&c, 1e-6).unwrap();
        let want = stationary_survival_optimal(p.gamma1, p.gamma2);
        assert!((p1 - want).abs() < 1e-12);
        assert!((want - 0.99996).abs() < 5e-6);
    }

    #[test]
    fn without_jqf_is_exponential() {
        for l1 in [0.0, 1.7e-3, 4.2e-3] {
            let p = SystemParameters { l1, ..SystemParameters::default().without_jqf() };
            let c = couplings(&p);
            let rate = 2.0 * p.gamma1 * c.phases[0].cos().powi(2);
            for t in [0.0, 1e-6, 1e-5, 4e-5] {
                assert_relative_eq!(survival_probability(&c, t).unwrap(), (-rate * t).exp(), max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn closed_form_matches_numeric_integration() {
        for frac in [0.5, 0.35, 0.245, 0.8, 0.25] {
            let p = SystemParameters { l1: 0.7e-3, ..SystemParameters::default().with_l2_wavelengths(frac) };
            let c = couplings(&p);
            let m = c.single_excitation_generator();
            let mut f = |_t: f64, y: &[C64; 2]| {
                [-(m[(0, 0)] * y[0] + m[(0, 1)] * y[1]), -(m[(1, 0)] * y[0] + m[(1, 1)] * y[1])]
            };
            let t_end = 10.0 / p.gamma2;
            let steps = 20_000;
            let mut y = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
            let sol = TwoModeSolution::from_couplings(&c);
            for k in 0..10 {
                let (a, b) = (k as f64 * t_end / 10.0, (k + 1) as f64 * t_end / 10.0);
                y = rk4_span(&mut f, a, b, steps / 10, y);
                let exact = sol.envelopes(b);
                assert!((y[0] - exact[0]).norm() < 1e-9, "frac {frac}");
                assert!((y[1] - exact[1]).norm() < 1e-9, "frac {frac}");
            }
        }
    }

    #[test]
    fn confluent_roots() {
        // (ξ₁₁ − ξ₂₂)² + 4ξ₁₂ξ₂₁ = 0 ⇒ double root
        let g = 1.0e6;
        let m = Matrix2::new(C64::new(3.0 * g, 0.0), C64::new(0.0, g), C64::new(0.0, g), C64::new(g, 0.0));
        let sol = TwoModeSolution::new(m, g);
        assert!(sol.confluent);
        let mut f = |_t: f64, y: &[C64; 2]| {
            [-(m[(0, 0)] * y[0] + m[(0, 1)] * y[1]), -(m[(1, 0)] * y[0] + m[(1, 1)] * y[1])]
        };
        let t = 3.0 / g;
        let y = rk4_span(&mut f, 0.0, t, 30_000, [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let e = sol.envelopes(t);
        assert!((y[0] - e[0]).norm() < 1e-10 && (y[1] - e[1]).norm() < 1e-10);
    }

    #[test]
    fn adiabatic_frequencies() {
        let p = SystemParameters::default().with_l2_wavelengths(0.35);
        let w = adiabatic_complex_frequency(&couplings(&p), DqBranch::Inside).unwrap();
        assert_eq!(w.im, 0.0);
        let general = adiabatic_frequency_general(&couplings(&p)).unwrap();
        assert!((general - w).norm() < 1e-9 * p.gamma2);

        let lam = p.wavelength();
        let half = SystemParameters { l1: lam / 2.0, l2: 0.0, ..p };
        let w = adiabatic_complex_frequency(&couplings(&half), DqBranch::Outside).unwrap();
        assert!(w.im.abs() < 1e-9 * p.gamma1);

        let eighth = SystemParameters { l1: lam / 8.0, l2: 0.0, ..p };
        let c = couplings(&eighth);
        let w = adiabatic_complex_frequency(&c, DqBranch::Outside).unwrap();
        assert_relative_eq!(-2.0 * w.im, p.gamma1, max_relative = 1e-9);
        let general = adiabatic_frequency_general(&c).unwrap();
        assert!((general - w).norm() < 1e-6 * p.gamma1);

        assert!(matches!(
            adiabatic_complex_frequency(&c, DqBranch::Inside),
            Err(JqfError::BranchMismatch { .. })
        ));
        let quarter = couplings(&SystemParameters::default().with_l2_wavelengths(0.25));
        assert!(matches!(
            adiabatic_complex_frequency(&quarter, DqBranch::Inside),
            Err(JqfError::ResonantCavity { .. })
        ));
    }

    #[test]
    fn loss_and_detuning_rate() {
        let p = SystemParameters::default();
        assert_eq!(decay_rate_with_loss(&p).unwrap(), 0.0);
        let detuned = p.with_detuning(p.gamma2);
        assert_relative_eq!(decay_rate_with_loss(&detuned).unwrap(), p.gamma1, max_relative = 1e-12);
        // full width at half depth: γ_DQ(δω) = γ₁ exactly at δω = ±γ₂
        assert_relative_eq!(2.0 * p.gamma2, TAU * 200e6, max_relative = 1e-12);

        let lossy = SystemParameters { gamma_i2: 1e-3 * p.gamma2, ..p };
        let rad = decay_rate_with_loss(&lossy).unwrap();
        assert_relative_eq!(rad, p.gamma1 * lossy.gamma_i2 / p.gamma2, max_relative = 1e-3);

        let with_i1 = SystemParameters { gamma_i1: 123.0, ..p };
        assert_relative_eq!(decay_rate_with_loss(&with_i1).unwrap(), 123.0, max_relative = 1e-12);

        // the general adiabatic route agrees with the fast path off the fast path's grid
        let nearly = SystemParameters { l2: p.l2 * (1.0 + 1e-7), ..detuned };
        let c = couplings(&nearly);
        let general = -2.0 * adiabatic_frequency_general(&c).unwrap().im;
        assert_relative_eq!(general, p.gamma1, max_relative = 1e-3);
    }

    #[test]
    fn subradiance() {
        let base = SystemParameters { l2: 0.0, ..Default::default() };
        let sym = SystemParameters { gamma2: base.gamma1, ..base };
        let d = subradiant_decomposition(&couplings(&sym)).unwrap();
        assert_relative_eq!(d.sup_weight, 0.5);
        assert_relative_eq!(d.sub_weight, 0.5);
        let d = subradiant_decomposition(&couplings(&base)).unwrap();
        assert_relative_eq!(d.sub_weight, base.gamma2 / (base.gamma1 + base.gamma2));
        assert!((d.sub_weight - 0.99998).abs() < 1e-6);
        assert_relative_eq!(d.sup_rate / TAU, 200.004e6, max_relative = 1e-9);
        assert!(matches!(
            subradiant_decomposition(&couplings(&SystemParameters::default())),
            Err(JqfError::NotColocated { .. })
        ));
    }

    #[test]
    fn wavepacket_normalisation() {
        let p = SystemParameters::default();
        let c = couplings(&p);
        let t = 10.0 / p.gamma2;
        let traj = decay_amplitudes(&c, &[0.0, t]).unwrap();
        let w = photon_wavepacket(&c, &traj, t).unwrap();
        let total = traj.p1[1] + traj.p2[1] + w.norm();
        assert!((total - 1.0).abs() < 1e-6, "{total}");
        // everything not left in the DQ-JQF dark state has been emitted
        let expect = p.gamma1 / (p.gamma1 + p.gamma2);
        assert!((w.norm() - expect).abs() < 1e-6);
        assert!(w.delays.windows(2).all(|d| d[1] - d[0] <= 1.0 / (50.0 * p.gamma2) * (1.0 + 1e-12)));

        let zero = photon_wavepacket(&c, &traj, 0.0).unwrap();
        assert!(zero.amplitude.iter().all(|f| f.norm() == 0.0));
        assert!(photon_wavepacket(&c, &traj, 2.0 * t).is_err());

        let free = SystemParameters::default().without_jqf();
        let c = couplings(&free);
        let t = 20.0 / free.gamma1;
        let traj = decay_amplitudes(&c, &[0.0, t]).unwrap();
        let w = photon_wavepacket(&c, &traj, t).unwrap();
        assert!((w.norm() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn cavity_frequencies() {
        let p = SystemParameters::default();
        let lam = p.wavelength();
        let f = effective_cavity_frequencies(lam / 2.0, p.velocity, 3).unwrap();
        assert_relative_eq!(f[0], p.omega1 / 2.0, max_relative = 1e-12);
        let f = effective_cavity_frequencies(lam / 4.0, p.velocity, 4).unwrap();
        assert_relative_eq!(f[0], p.omega1, max_relative = 1e-12);
        assert_relative_eq!(f[3] - f[2], f[1] - f[0], max_relative = 1e-12);
        assert!(effective_cavity_frequencies(0.0, p.velocity, 1).is_err());
    }
}
