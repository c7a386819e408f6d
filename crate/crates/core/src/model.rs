//! Physical parameters of the DQ + JQF + semi-infinite waveguide system and
//! the coupling quantities derived from them.
//!
//! All frequencies and rates are angular (rad/s). Positions are measured from
//! the open end of the waveguide and converted to phases with θ = ω l / v.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{JqfError, JqfResult};

/// Below this |cos θ₁| DQ is treated as sitting exactly on a node.
const NODE_TOLERANCE: f64 = 1e-9;

/// Effective QED parameters of the two qubits and the line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParameters {
    /// DQ transition frequency (rad/s).
    pub omega1: f64,
    /// JQF transition frequency (rad/s).
    pub omega2: f64,
    /// DQ coupling position (m).
    pub l1: f64,
    /// JQF coupling position (m).
    pub l2: f64,
    /// DQ radiative rate into an infinite waveguide (rad/s).
    pub gamma1: f64,
    /// JQF radiative rate into an infinite waveguide (rad/s).
    pub gamma2: f64,
    /// DQ intrinsic (non-radiative) decay rate (rad/s).
    pub gamma_i1: f64,
    /// JQF intrinsic (non-radiative) decay rate (rad/s).
    pub gamma_i2: f64,
    /// Microwave velocity in the line (m/s).
    pub velocity: f64,
}

impl Default for SystemParameters {
    /// 5 GHz qubits, v = 10⁸ m/s (λ = 20 mm), DQ at the end, JQF at λ/2,
    /// γ₁/2π = 2 kHz, γ₂/2π = 100 MHz, no intrinsic loss.
    fn default() -> Self {
        Self {
            omega1: TAU * 5e9,
            omega2: TAU * 5e9,
            l1: 0.0,
            l2: 10e-3,
            gamma1: TAU * 2e3,
            gamma2: TAU * 100e6,
            gamma_i1: 0.0,
            gamma_i2: 0.0,
            velocity: 1e8,
        }
    }
}

impl SystemParameters {
    pub fn validate(&self) -> JqfResult<()> {
        let finite = [
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("l1", self.l1),
            ("l2", self.l2),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("gamma_i1", self.gamma_i1),
            ("gamma_i2", self.gamma_i2),
            ("velocity", self.velocity),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(JqfError::InvalidParameter { name, reason: format!("{value} is not finite") });
            }
        }
        for (name, value) in [
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("gamma_i1", self.gamma_i1),
            ("gamma_i2", self.gamma_i2),
        ] {
            if value < 0.0 {
                return Err(JqfError::InvalidParameter { name, reason: format!("{value} is negative") });
            }
        }
        if self.velocity <= 0.0 {
            return Err(JqfError::InvalidParameter {
                name: "velocity",
                reason: format!("{} must be positive", self.velocity),
            });
        }
        if self.l1 < 0.0 {
            return Err(JqfError::InvalidParameter {
                name: "l1",
                reason: format!("{} lies outside the waveguide", self.l1),
            });
        }
        Ok(())
    }

    /// Resonance wavelength λ = 2πv/ω₁ of DQ.
    pub fn wavelength(&self) -> f64 {
        TAU * self.velocity / self.omega1
    }

    /// Places JQF at `fraction` DQ wavelengths from the end of the line.
    pub fn with_l2_wavelengths(mut self, fraction: f64) -> Self {
        self.l2 = fraction * self.wavelength();
        self
    }

    /// Detunes JQF by `delta` (rad/s) from DQ.
    pub fn with_detuning(mut self, delta: f64) -> Self {
        self.omega2 = self.omega1 + delta;
        self
    }

    /// The "free" baseline: JQF decoupled from the line.
    pub fn without_jqf(mut self) -> Self {
        self.gamma2 = 0.0;
        self
    }
}

/// Which transition frequency sets the phases ω l / v.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceFrequency {
    #[default]
    Dq,
    Jqf,
    Mean,
}

impl ReferenceFrequency {
    pub fn resolve(self, p: &SystemParameters) -> f64 {
        match self {
            Self::Dq => p.omega1,
            Self::Jqf => p.omega2,
            Self::Mean => 0.5 * (p.omega1 + p.omega2),
        }
    }
}

/// Waveguide-mediated couplings.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivedCouplings {
    pub params: SystemParameters,
    /// Reference frequency ω_q used for every phase factor.
    pub omega_ref: f64,
    /// θ_m = ω_ref l_m / v.
    pub phases: [f64; 2],
    /// ξ_mn: real part dissipative, imaginary part the exchange interaction.
    pub xi: Matrix2<C64>,
    /// J_mn from its own closed form; equals Im ξ.
    pub j: Matrix2<f64>,
    /// √(2γ_m) cos θ_m, the weights of σ_m in the collective jump operator.
    pub s_coeff: Vector2<f64>,
    /// Lamb-shifted DQ frequency ω_ref + (γ₁/2) sin 2θ₁.
    pub omega_bar: f64,
    /// √(2γ₁) cos θ₁: DQ decay amplitude and drive coupling at once.
    pub eta: f64,
}

impl DerivedCouplings {
    pub fn gamma(&self) -> [f64; 2] {
        [self.params.gamma1, self.params.gamma2]
    }

    pub fn intrinsic(&self) -> [f64; 2] {
        [self.params.gamma_i1, self.params.gamma_i2]
    }

    /// ω_m − ω_ref.
    pub fn detuning(&self) -> [f64; 2] {
        [self.params.omega1 - self.omega_ref, self.params.omega2 - self.omega_ref]
    }

    /// Generator M of the single-excitation envelopes in the frame rotating
    /// at ω_ref: dᾱ/dt = −M ᾱ. Adds detuning and intrinsic loss to ξ.
    pub fn single_excitation_generator(&self) -> Matrix2<C64> {
        let mut m = self.xi;
        let det = self.detuning();
        let loss = self.intrinsic();
        for k in 0..2 {
            m[(k, k)] += C64::new(0.5 * loss[k], det[k]);
        }
        m
    }

    /// Local radiative rate 2γ_m cos²θ_m of each qubit on its own.
    pub fn local_rates(&self) -> [f64; 2] {
        [2.0 * self.xi[(0, 0)].re, 2.0 * self.xi[(1, 1)].re]
    }
}

/// ξ_mn = (√(γ_m γ_n)/2)(e^{i(θ_m+θ_n)} + e^{i|θ_m−θ_n|}).
pub fn xi_matrix(gamma: [f64; 2], phases: [f64; 2]) -> Matrix2<C64> {
    Matrix2::from_fn(|m, n| {
        let amp = 0.5 * (gamma[m] * gamma[n]).sqrt();
        let sum = C64::from_polar(1.0, phases[m] + phases[n]);
        let diff = C64::from_polar(1.0, (phases[m] - phases[n]).abs());
        amp * (sum + diff)
    })
}

/// J_mn = √(γ_m γ_n) cos[min(θ_m, θ_n)] sin[max(θ_m, θ_n)].
pub fn exchange_matrix(gamma: [f64; 2], phases: [f64; 2]) -> Matrix2<f64> {
    Matrix2::from_fn(|m, n| {
        let lo = phases[m].min(phases[n]);
        let hi = phases[m].max(phases[n]);
        (gamma[m] * gamma[n]).sqrt() * lo.cos() * hi.sin()
    })
}

pub fn derive_couplings(p: &SystemParameters, reference: ReferenceFrequency) -> JqfResult<DerivedCouplings> {
    p.validate()?;
    let omega_ref = reference.resolve(p);
    let phases = [omega_ref * p.l1 / p.velocity, omega_ref * p.l2 / p.velocity];
    let gamma = [p.gamma1, p.gamma2];
    let s_coeff = Vector2::new(
        (2.0 * p.gamma1).sqrt() * phases[0].cos(),
        (2.0 * p.gamma2).sqrt() * phases[1].cos(),
    );
    Ok(DerivedCouplings {
        params: *p,
        omega_ref,
        phases,
        xi: xi_matrix(gamma, phases),
        j: exchange_matrix(gamma, phases),
        s_coeff,
        omega_bar: omega_ref + 0.5 * p.gamma1 * (2.0 * phases[0]).sin(),
        eta: s_coeff[0],
    })
}

fn dq_coupling(p: &SystemParameters) -> JqfResult<DerivedCouplings> {
    derive_couplings(p, ReferenceFrequency::Dq)
}

/// T_r = 1/η², the DQ lifetime without JQF.
pub fn radiative_lifetime(p: &SystemParameters) -> JqfResult<f64> {
    let c = dq_coupling(p)?;
    let cos_theta1 = c.phases[0].cos();
    if cos_theta1.abs() < NODE_TOLERANCE || p.gamma1 == 0.0 {
        return Err(JqfError::DivergentLifetime { cos_theta1 });
    }
    Ok(1.0 / (c.eta * c.eta))
}

/// π-pulse duration T_g = π / (2η|E_d|) for a drive of `drive_amplitude`
/// √(photons/s).
pub fn gate_time(p: &SystemParameters, drive_amplitude: f64) -> JqfResult<f64> {
    let c = dq_coupling(p)?;
    if !(drive_amplitude.abs() > 0.0) {
        return Err(JqfError::InvalidParameter {
            name: "drive_amplitude",
            reason: "must be non-zero".into(),
        });
    }
    if c.phases[0].cos().abs() < NODE_TOLERANCE || p.gamma1 == 0.0 {
        return Err(JqfError::ZeroCoupling { eta: c.eta });
    }
    Ok(PI / (2.0 * c.eta.abs() * drive_amplitude.abs()))
}

/// Upper bound on T₁/T_g² for a given drive amplitude: 4|E_d|²/π².
pub fn tradeoff_bound(drive_amplitude: f64) -> JqfResult<f64> {
    if !(drive_amplitude.abs() > 0.0) {
        return Err(JqfError::InvalidParameter {
            name: "drive_amplitude",
            reason: "must be non-zero".into(),
        });
    }
    Ok(4.0 * drive_amplitude * drive_amplitude / (PI * PI))
}

/// Rabi frequency √(8γ)|E_d| of a qubit at an antinode.
pub fn rabi_frequency(gamma: f64, drive_amplitude: f64) -> f64 {
    (8.0 * gamma).sqrt() * drive_amplitude.abs()
}

/// Inverse of [`rabi_frequency`].
pub fn drive_amplitude_for_rabi(gamma: f64, rabi: f64) -> JqfResult<f64> {
    if !(gamma > 0.0) {
        return Err(JqfError::ZeroCoupling { eta: 0.0 });
    }
    Ok(rabi / (8.0 * gamma).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn approx_c(a: C64, b: C64, tol: f64) {
        assert!((a - b).norm() <= tol, "{a} vs {b}");
    }

    #[test]
    fn optimal_positions() {
        let p = SystemParameters::default();
        let c = derive_couplings(&p, ReferenceFrequency::Dq).unwrap();
        let (g1, g2) = (p.gamma1, p.gamma2);
        let tol = 1e-9 * g2;
        approx_c(c.xi[(0, 0)], C64::new(g1, 0.0), tol);
        approx_c(c.xi[(1, 1)], C64::new(g2, 0.0), tol);
        approx_c(c.xi[(0, 1)], C64::new(-(g1 * g2).sqrt(), 0.0), tol);
    }

    /// PV ∫ dk cos(k L)/(ω − k) over the whole k axis, by quadrature in
    /// x = (k − ω)L, truncated at x = X (tail ~ 1/X).
    fn pv_cosine_transform(phase: f64) -> f64 {
        if phase == 0.0 {
            return 0.0;
        }
        let x_max = 4000.0 * PI;
        let n = 400_000;
        let h = x_max / n as f64;
        let f = |x: f64| {
            if x == 0.0 {
                2.0 * phase.sin()
            } else {
                -((phase + x).cos() - (phase - x).cos()) / x
            }
        };
        let mut acc = f(0.0) + f(x_max);
        for k in 1..n {
            acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn xi_against_mode_function_integrals() {
        // ξ_mn = ∫dk g_mk g_nk [πδ(ω−k) + i PV 1/(ω−k)] with g_mk = √(γ_m/π) cos(k l_m).
        for frac in [0.5, 0.35, 0.245, 0.8] {
            let p = SystemParameters { l1: 1.3e-3, ..SystemParameters::default().with_l2_wavelengths(frac) };
            let c = derive_couplings(&p, ReferenceFrequency::Dq).unwrap();
            let g = c.gamma();
            let th = c.phases;
            for m in 0..2 {
                for n in 0..2 {
                    let amp = (g[m] * g[n]).sqrt();
                    let re = amp * th[m].cos() * th[n].cos();
                    let im = amp / PI
                        * 0.5
                        * (pv_cosine_transform(th[m] + th[n]) + pv_cosine_transform((th[m] - th[n]).abs()));
                    assert!((c.xi[(m, n)].re - re).abs() <= 1e-9 * amp, "re {m}{n}");
                    assert!((c.xi[(m, n)].im - im).abs() <= 1e-3 * amp, "im {m}{n} {} {}", c.xi[(m, n)].im, im);
                }
            }
        }
    }

    #[test]
    fn colocated_at_the_end() {
        let p = SystemParameters { l2: 0.0, ..Default::default() };
        let c = derive_couplings(&p, ReferenceFrequency::Dq).unwrap();
        let g12 = (p.gamma1 * p.gamma2).sqrt();
        approx_c(c.xi[(0, 1)], C64::new(g12, 0.0), 1e-9);
        approx_c(c.xi[(1, 0)], C64::new(g12, 0.0), 1e-9);
        assert_eq!(c.j, Matrix2::zeros());
    }

    #[test]
    fn quarter_wave_decouples_jqf() {
        let p = SystemParameters::default().with_l2_wavelengths(0.25);
        let c = derive_couplings(&p, ReferenceFrequency::Dq).unwrap();
        assert!(c.xi[(1, 1)].re.abs() < 1e-6);
        assert!(c.s_coeff[1].abs() < 1e-4);
    }

    #[test]
    fn lifetime_and_gate_time() {
        let p = SystemParameters::default();
        let tr = radiative_lifetime(&p).unwrap();
        assert_relative_eq!(tr, 1.0 / (2.0 * p.gamma1), max_relative = 1e-12);
        assert!((tr - 39.8e-6).abs() < 0.05e-6);

        let node = SystemParameters { l1: p.wavelength() / 4.0, ..p };
        assert!(matches!(radiative_lifetime(&node), Err(JqfError::DivergentLifetime { .. })));
        assert!(matches!(gate_time(&node, 1.0), Err(JqfError::ZeroCoupling { .. })));

        let half = SystemParameters { l1: p.wavelength() / 2.0, ..p };
        assert_relative_eq!(radiative_lifetime(&half).unwrap(), tr, max_relative = 1e-9);

        // Ω₁/2π = 25 MHz gives a 20 ns π-pulse.
        let e = drive_amplitude_for_rabi(p.gamma1, TAU * 25e6).unwrap();
        assert_relative_eq!(gate_time(&p, e).unwrap(), 20e-9, max_relative = 1e-12);
        assert_relative_eq!(gate_time(&p, 2.0 * e).unwrap(), 10e-9, max_relative = 1e-12);
        assert!(gate_time(&p, 0.0).is_err());
    }

    #[test]
    fn photon_rate_for_fig3_rabi() {
        let p = SystemParameters::default();
        let e = drive_amplitude_for_rabi(p.gamma1, TAU * 25e6).unwrap();
        assert!((e * e / p.gamma2 - 390.625).abs() < 1e-6);
        let weak = drive_amplitude_for_rabi(p.gamma1, TAU * 2.5e6).unwrap();
        assert!((weak * weak / p.gamma2 - 3.91).abs() < 0.01);
    }

    #[test]
    fn tradeoff_holds_at_equality_without_other_losses() {
        let p = SystemParameters::default();
        let e = 3e4;
        let t1 = radiative_lifetime(&p).unwrap();
        let tg = gate_time(&p, e).unwrap();
        assert_relative_eq!(t1 / (tg * tg), tradeoff_bound(e).unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        let bad = SystemParameters { velocity: 0.0, ..Default::default() };
        assert!(derive_couplings(&bad, ReferenceFrequency::Dq).is_err());
        let bad = SystemParameters { gamma2: -1.0, ..Default::default() };
        assert!(derive_couplings(&bad, ReferenceFrequency::Dq).is_err());
        let bad = SystemParameters { l1: -1e-3, ..Default::default() };
        assert!(derive_couplings(&bad, ReferenceFrequency::Dq).is_err());
    }

    #[test]
    fn reference_choice() {
        let p = SystemParameters::default().with_detuning(TAU * 50e6);
        let mean = derive_couplings(&p, ReferenceFrequency::Mean).unwrap();
        assert_relative_eq!(mean.omega_ref, 0.5 * (p.omega1 + p.omega2));
        let jqf = derive_couplings(&p, ReferenceFrequency::Jqf).unwrap();
        assert_eq!(jqf.omega_ref, p.omega2);
        assert_eq!(jqf.detuning()[1], 0.0);
    }
}
