/// Damped Rabi oscillation of a lone DQ at an antinode driven on resonance:
/// P_1f(t) = Ω²/(2(Ω²+2γ²))·[1 − e^{−3γt/2}(cos Ω̃t + (3γ/2Ω̃) sin Ω̃t)]
/// with Ω² = 8γ|E|² and Ω̃² = Ω² − γ²/4. Below Ω̃ = 0 the trigonometric
/// functions turn hyperbolic.
pub fn free_rabi(gamma1: f64, drive_amplitude: f64, times: &[f64]) -> Vec<f64> {
    let omega2 = 8.0 * gamma1 * drive_amplitude * drive_amplitude;
    if omega2 == 0.0 {
        return vec![0.0; times.len()];
    }
    let plateau = omega2 / (2.0 * (omega2 + 2.0 * gamma1 * gamma1));
    let tilde2 = omega2 - 0.25 * gamma1 * gamma1;
    let tilde = tilde2.abs().sqrt();
    let damping = 1.5 * gamma1;
    times
        .iter()
        .map(|&t| {
            let osc = if tilde2 > 0.0 {
                (tilde * t).cos() + damping * (tilde * t).sin() / tilde
            } else if tilde2 < 0.0 {
                (tilde * t).cosh() + damping * (tilde * t).sinh() / tilde
            } else {
                1.0 + damping * t
            };
            plateau * (1.0 - (-damping * t).exp() * osc)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rk4_span;
    use num_complex::Complex64 as C64;

    /// Optical Bloch equations of a single driven, decaying qubit.
    fn bloch(gamma: f64, e: f64, t: f64) -> f64 {
        let nu = (2.0 * gamma).sqrt() * e;
        let i = C64::i();
        let mut f = |_t: f64, y: &[C64; 2]| {
            let (a, p) = (y[0], y[1]);
            [-gamma * a + i * nu * (1.0 - 2.0 * p), -2.0 * gamma * p + i * nu * a.conj() - i * nu * a]
        };
        rk4_span(&mut f, 0.0, t, 20_000, [C64::new(0.0, 0.0); 2])[1].re
    }

    #[test]
    fn matches_bloch_equations_in_every_regime() {
        let gamma = 1.0;
        // under-, critically and over-damped
        for omega in [20.0, 0.5, 0.2] {
            let e = omega / (8.0 * gamma as f64).sqrt();
            for t in [0.3, 2.0, 7.0] {
                let want = bloch(gamma, e, t);
                let got = free_rabi(gamma, e, &[t])[0];
                assert!((got - want).abs() < 1e-9, "Ω={omega} t={t}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn limits() {
        let gamma = 2.0;
        let e = 50.0;
        let omega2 = 8.0 * gamma * e * e;
        let late = free_rabi(gamma, e, &[100.0])[0];
        assert!((late - omega2 / (2.0 * (omega2 + 2.0 * gamma * gamma))).abs() < 1e-12);
        assert!((late - 0.5).abs() < 1e-4);
        assert_eq!(free_rabi(gamma, e, &[0.0])[0], 0.0);
        assert_eq!(free_rabi(gamma, 0.0, &[1.0]), vec![0.0]);
    }
}
