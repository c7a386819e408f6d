//! Reference checks against published numbers and derived identities. Each
//! check runs on its own and reports the measured values next to the
//! verdict.

use std::f64::consts::TAU;
use std::time::Instant;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::delay::{compare_with_approximation, max_stable_step, solve_dde};
use crate::driven::{
    evolve_master, evolve_master_with, evolve_moments, free_rabi, DriveEnvelope, EvolveOptions, InitialState,
    StateTrajectory, Validation,
};
use crate::error::JqfResult;
use crate::model::{derive_couplings, drive_amplitude_for_rabi, ReferenceFrequency, SystemParameters};
use crate::numerics::{fit_exponential_rate, linear_fit, local_extrema};
use crate::single_excitation::{decay_amplitudes, decay_rate_with_loss, photon_wavepacket, stationary_survival_optimal};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    /// Operation that produced the value.
    pub source: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub metrics: Vec<Metric>,
    pub elapsed_s: f64,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {} [{}] {}: {} ({:.2} s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.detail,
            self.elapsed_s
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RegressionReport {
    pub outcomes: Vec<CriterionOutcome>,
}

impl RegressionReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }
}

struct Check {
    metrics: Vec<Metric>,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Self { metrics: Vec::new(), failures: Vec::new(), notes: Vec::new() }
    }

    fn metric(&mut self, name: &str, value: f64, source: &'static str) -> f64 {
        self.metrics.push(Metric { name: name.into(), value, source });
        value
    }

    fn expect(&mut self, ok: bool, what: String) {
        if ok {
            self.notes.push(what);
        } else {
            self.failures.push(what);
        }
    }
}

fn run(id: u8, title: &'static str, budget_s: Option<f64>, body: impl FnOnce(&mut Check) -> JqfResult<()>) -> CriterionOutcome {
    let start = Instant::now();
    let mut check = Check::new();
    if let Err(e) = body(&mut check) {
        check.failures.push(format!("error: {e}"));
    }
    let elapsed_s = start.elapsed().as_secs_f64();
    if let Some(b) = budget_s {
        check.expect(elapsed_s < b, format!("runtime {elapsed_s:.2} s < {b} s"));
    }
    let passed = check.failures.is_empty();
    let detail = if passed { check.notes.join("; ") } else { check.failures.join("; ") };
    CriterionOutcome { id, title, passed, detail, metrics: check.metrics, elapsed_s }
}

fn grid(t_end: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| t_end * k as f64 / n as f64).collect()
}

fn dq_couplings(p: &SystemParameters) -> JqfResult<crate::model::DerivedCouplings> {
    derive_couplings(p, ReferenceFrequency::Dq)
}

/// Optimal spacing: the stationary survival equals (γ₂/(γ₁+γ₂))².
pub fn criterion_1() -> CriterionOutcome {
    run(1, "optimal decay", Some(1.0), |ck| {
        let p = SystemParameters::default().with_l2_wavelengths(0.5);
        let c = dq_couplings(&p)?;
        let want = stationary_survival_optimal(p.gamma1, p.gamma2);
        let closed = *decay_amplitudes(&c, &[0.0, 200e-9])?.p1.last().unwrap();
        let opts = EvolveOptions { initial: InitialState::DqExcited, ..Default::default() };
        let master = *evolve_master_with(&p, &c, &DriveEnvelope::off(), &[0.0, 200e-9], &opts)?.p1.last().unwrap();
        ck.metric("p1_stationary_closed_form", closed, "decay_amplitudes");
        ck.metric("p1_stationary_master", master, "evolve_master");
        ck.metric("p1_expected", want, "stationary_survival_optimal");
        ck.expect((closed - want).abs() < 1e-9, format!("closed form {closed:.9} vs {want:.9}"));
        ck.expect((master - want).abs() < 1e-9, format!("master {master:.9} vs {want:.9}"));
        ck.expect((want - 0.99996).abs() < 5e-6, format!("value {want:.6} ≈ 0.99996"));
        Ok(())
    })
}

/// Quarter-wave spacing: no protection, and a slower decay just off it.
pub fn criterion_2() -> CriterionOutcome {
    run(2, "quarter-wave failure", None, |ck| {
        let base = SystemParameters::default();
        let times = grid(40e-6, 8000);
        let free = decay_amplitudes(&dq_couplings(&base.without_jqf())?, &times)?;
        let quarter = decay_amplitudes(&dq_couplings(&base.with_l2_wavelengths(0.25))?, &times)?;
        let dev = quarter.p1.iter().zip(&free.p1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ck.metric("max_abs_dp1_quarter_wave", dev, "decay_amplitudes");
        ck.expect(dev < 1e-3, format!("l₂=0.25λ max |ΔP₁| = {dev:.3e} (< 1e-3 required)"));

        let near = decay_amplitudes(&dq_couplings(&base.with_l2_wavelengths(0.245))?, &times)?;
        let (ts, ps): (Vec<f64>, Vec<f64>) =
            times.iter().zip(&near.p1).filter(|(t, _)| **t >= 5e-6).map(|(t, p)| (*t, *p)).unzip();
        let rate = fit_exponential_rate(&ts, &ps);
        let free_rate = 2.0 * base.gamma1;
        ck.metric("decay_rate_0p245", rate, "decay_amplitudes + fit_exponential_rate");
        ck.expect(
            rate.is_finite() && rate > 0.0 && rate < free_rate,
            format!("l₂=0.245λ rate {:.3e} s⁻¹ finite and below 2γ₁ = {free_rate:.3e}", rate),
        );
        Ok(())
    })
}

/// Retarded equations against the free-evolution model.
pub fn criterion_3() -> CriterionOutcome {
    run(3, "delay-equation validation", Some(10.0), |ck| {
        let base = SystemParameters::default();
        let near = compare_with_approximation(&base.with_l2_wavelengths(0.5), 200e-9)?;
        let far = compare_with_approximation(&base.with_l2_wavelengths(2.5), 200e-9)?;
        ck.metric("stationary_dev_0p5", near.stationary_dev, "compare_with_approximation");
        ck.metric("stationary_dev_2p5", far.stationary_dev, "compare_with_approximation");
        ck.expect(
            (1e-6..=4e-6).contains(&near.stationary_dev),
            format!("l₂=0.5λ deviation {:.3e} in [1e-6, 4e-6]", near.stationary_dev),
        );
        ck.expect(
            far.stationary_dev > near.stationary_dev,
            format!("l₂=2.5λ deviation {:.3e} larger", far.stationary_dev),
        );
        Ok(())
    })
}

fn rabi_25mhz(p: &SystemParameters) -> JqfResult<f64> {
    drive_amplitude_for_rabi(p.gamma1, TAU * 25e6)
}

/// Continuous drive barely perturbed by the JQF.
pub fn criterion_4() -> CriterionOutcome {
    run(4, "Rabi overlap", None, |ck| {
        let p = SystemParameters::default();
        let e = rabi_25mhz(&p)?;
        let ratio = ck.metric("photon_rate_over_gamma2", e * e / p.gamma2, "drive_amplitude_for_rabi");
        ck.expect((ratio - 391.0).abs() <= 1.0, format!("|E|²/γ₂ = {ratio:.3}"));
        let times = grid(200e-9, 4000);
        let drive = DriveEnvelope::continuous(C64::new(e, 0.0), p.omega1);
        let tr = evolve_master(&p, &dq_couplings(&p)?, &drive, &times)?;
        let free = free_rabi(p.gamma1, e, &times);
        let dev = tr.p1.iter().zip(&free).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ck.metric("max_abs_p1_minus_p1f", dev, "evolve_master + free_rabi");
        ck.expect(dev < 0.01, format!("max |P₁ − P_1f| = {dev:.3e}"));
        Ok(())
    })
}

/// P₁ after a 20 ns π-pulse, read at 1 µs.
pub fn pi_pulse_survival(p: &SystemParameters) -> JqfResult<f64> {
    let tr = crate::driven::scenario_pi_pulse(p, 20e-9, &[0.0, 20e-9, 1e-6])?;
    Ok(tr.p1[2])
}

pub fn criterion_5() -> CriterionOutcome {
    run(5, "π-pulse protection", None, |ck| {
        let p = SystemParameters::default();
        let p1 = ck.metric("p1_stationary", pi_pulse_survival(&p)?, "scenario_pi_pulse");
        let unexcited = ck.metric("unexcited", 1.0 - p1, "scenario_pi_pulse");
        let p1_35 = ck.metric("p1_stationary_0p35", pi_pulse_survival(&p.with_l2_wavelengths(0.35))?, "scenario_pi_pulse");
        ck.expect((p1 - 0.9997).abs() <= 2e-4, format!("P₁ = {p1:.5}"));
        ck.expect((unexcited - 0.00032).abs() <= 1e-4, format!("unexcited {unexcited:.5}"));
        ck.expect((p1_35 - 0.9994).abs() <= 3e-4, format!("l₂=0.35λ P₁ = {p1_35:.5}"));
        Ok(())
    })
}

/// Exponential DQ decay rate fitted to ln P₁ of the exact two-mode solution,
/// after the JQF transient has died out.
pub fn fitted_decay_rate(p: &SystemParameters) -> JqfResult<f64> {
    let c = dq_couplings(p)?;
    let t0 = 100e-9;
    let t1 = t0 + 1.0 / (2.0 * p.gamma1.max(1e-300));
    let times: Vec<f64> = (0..=400).map(|k| t0 + (t1 - t0) * k as f64 / 400.0).collect();
    let traj = decay_amplitudes(&c, &times)?;
    Ok(fit_exponential_rate(&times, &traj.p1))
}

fn half_depth_edge(base: &SystemParameters, sign: f64, half: f64) -> JqfResult<f64> {
    let (mut lo, mut hi) = (0.0, 10.0 * base.gamma2);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if fitted_decay_rate(&base.with_detuning(sign * mid))? < half {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(sign * 0.5 * (lo + hi))
}

/// Full width at half depth of the rate-versus-detuning dip, from fitted rates.
pub fn dip_width(base: &SystemParameters) -> JqfResult<f64> {
    let half = 0.5 * (fitted_decay_rate(&base.with_detuning(1e3 * base.gamma2))? + fitted_decay_rate(base)?);
    Ok(half_depth_edge(base, 1.0, half)? - half_depth_edge(base, -1.0, half)?)
}

pub fn criterion_6() -> CriterionOutcome {
    run(6, "detuning dip", None, |ck| {
        let base = SystemParameters::default();
        let depth = 2.0 * base.gamma1;
        for mhz in [0.0, 50.0, 100.0, 200.0] {
            let p = base.with_detuning(TAU * mhz * 1e6);
            let fitted = ck.metric(&format!("fitted_rate_{mhz}MHz"), fitted_decay_rate(&p)?, "decay_amplitudes + fit");
            let formula = ck.metric(&format!("formula_rate_{mhz}MHz"), decay_rate_with_loss(&p)?, "decay_rate_with_loss");
            let err = (fitted - formula).abs();
            let ok = if mhz == 0.0 { err <= 0.05 * depth } else { err <= 0.05 * formula };
            ck.expect(ok, format!("δω/2π={mhz} MHz fitted {fitted:.4e} vs {formula:.4e}"));
        }
        let width = ck.metric("dip_fwhm", dip_width(&base)?, "fitted_decay_rate bisection");
        let want = 2.0 * base.gamma2;
        ck.expect(
            (width / want - 1.0).abs() <= 0.05,
            format!("width/2π = {:.2} MHz vs {:.2} MHz", width / TAU / 1e6, want / TAU / 1e6),
        );
        Ok(())
    })
}

/// P₁ at 5.02 µs under π-pulses of 20 ns every `period`.
pub fn pulse_train_survival(p: &SystemParameters, period: f64) -> JqfResult<f64> {
    let t_read = 5.02e-6;
    let n = (5.0e-6 / period + 1e-9).floor() as usize + 1;
    let tr = crate::driven::scenario_pulse_train(p, 20e-9, period, n, &[0.0, t_read])?;
    Ok(tr.p1[1])
}

pub fn criterion_7() -> CriterionOutcome {
    run(7, "pulse trains", None, |ck| {
        let p = SystemParameters::default();
        let cases: [(f64, bool, f64); 4] = [(100e-9, false, 0.9828), (100e-9, true, 0.9436), (500e-9, false, 0.9968), (500e-9, true, 0.9417)];
        for (period, free, want) in cases {
            let q = if free { p.without_jqf() } else { p };
            let name = format!("p1_5p02us_tau{}ns_{}", (period * 1e9).round(), if free { "without" } else { "with" });
            let got = ck.metric(&name, pulse_train_survival(&q, period)?, "scenario_pulse_train");
            ck.expect((got - want).abs() <= 0.002, format!("{name} = {got:.4} vs {want}"));
        }
        Ok(())
    })
}

/// Envelope decay rate of a free DQ's Rabi oscillation, fitted to the local
/// maxima of P₁ − P∞ from a master-equation run.
pub fn rabi_envelope_rate(p: &SystemParameters, rabi: f64, t_end: f64) -> JqfResult<f64> {
    let e = drive_amplitude_for_rabi(p.gamma1, rabi)?;
    let period = TAU / rabi;
    let n = (t_end / period * 24.0).ceil() as usize;
    let times = grid(t_end, n);
    let tr: StateTrajectory =
        evolve_master(p, &dq_couplings(p)?, &DriveEnvelope::continuous(C64::new(e, 0.0), p.omega1), &times)?;
    let w2 = rabi * rabi;
    let plateau = w2 / (2.0 * (w2 + 2.0 * p.gamma1 * p.gamma1));
    let (ts, logs): (Vec<f64>, Vec<f64>) = local_extrema(&times, &tr.p1)
        .into_iter()
        .filter(|x| x.is_max && x.value > plateau)
        .map(|x| (x.t, (x.value - plateau).ln()))
        .unzip();
    Ok(-linear_fit(&ts, &logs).0)
}

pub fn criterion_8() -> CriterionOutcome {
    run(8, "continuous-drive damping", None, |ck| {
        let p = SystemParameters::default().without_jqf();
        let rate = ck.metric("envelope_rate", rabi_envelope_rate(&p, TAU * 25e6, 100e-6)?, "evolve_master + fit");
        let want = 1.5 * p.gamma1;
        ck.expect((rate / want - 1.0).abs() <= 0.02, format!("envelope rate {rate:.4e} vs 3γ₁/2 = {want:.4e}"));
        Ok(())
    })
}

fn moments_oracle(rng: &mut ChaCha8Rng) -> JqfResult<f64> {
    let base = SystemParameters::default();
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let p = base.with_l2_wavelengths(rng.gen_range(0.0..1.0));
        let c = dq_couplings(&p)?;
        let photons = 10f64.powf(rng.gen_range(-1.0..500f64.log10())) * p.gamma2;
        let drive = DriveEnvelope::continuous(C64::from_polar(photons.sqrt(), rng.gen_range(0.0..TAU)), p.omega1);
        let times = grid(5e-9, 25);
        let a = evolve_master(&p, &c, &drive, &times)?;
        let b = evolve_moments(&p, &c, &drive, &times)?;
        for (ma, mb) in a.moments.iter().zip(&b.moments) {
            for k in 0..9 {
                worst = worst.max((ma[k] - mb[k]).norm());
            }
        }
    }
    Ok(worst)
}

fn coupling_identities(rng: &mut ChaCha8Rng) -> JqfResult<f64> {
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let p = SystemParameters {
            omega1: TAU * rng.gen_range(1e9..10e9),
            omega2: TAU * rng.gen_range(1e9..10e9),
            l1: rng.gen_range(0.0..0.1),
            l2: rng.gen_range(0.0..0.1),
            gamma1: TAU * rng.gen_range(0.0..1e7),
            gamma2: TAU * rng.gen_range(0.0..1e9),
            ..SystemParameters::default()
        };
        let c = dq_couplings(&p)?;
        let scale = p.gamma1.max(p.gamma2).max(1.0);
        let sym = (c.xi[(0, 1)] - c.xi[(1, 0)]).norm();
        let mut gram = 0.0f64;
        let mut j = 0.0f64;
        for m in 0..2 {
            for n in 0..2 {
                gram = gram.max((c.xi[(m, n)].re - 0.5 * c.s_coeff[m] * c.s_coeff[n]).abs());
                j = j.max((c.xi[(m, n)].im - c.j[(m, n)]).abs());
            }
        }
        let det = c.xi[(0, 0)].re * c.xi[(1, 1)].re - c.xi[(0, 1)].re * c.xi[(1, 0)].re;
        let psd = (-det).max(0.0) / (scale * scale) + (-c.xi[(0, 0)].re).max(0.0) / scale + (-c.xi[(1, 1)].re).max(0.0) / scale;
        worst = worst.max(sym / scale).max(gram / scale).max(j / scale).max(psd);
    }
    Ok(worst)
}

fn dde_order() -> JqfResult<f64> {
    let p = SystemParameters { gamma1: TAU * 60e6, ..SystemParameters::default().with_l2_wavelengths(0.5) };
    let h0 = max_stable_step(&p)?;
    let end = |h: f64| -> JqfResult<[C64; 2]> {
        let tr = solve_dde(&p, 3e-9, h)?;
        Ok([*tr.alpha1.last().unwrap(), *tr.alpha2.last().unwrap()])
    };
    let (a, b, c) = (end(h0)?, end(h0 / 2.0)?, end(h0 / 4.0)?);
    let dist = |x: [C64; 2], y: [C64; 2]| ((x[0] - y[0]).norm_sqr() + (x[1] - y[1]).norm_sqr()).sqrt();
    Ok(dist(a, b) / dist(b, c))
}

pub fn criterion_9() -> CriterionOutcome {
    run(9, "property suites", None, |ck| {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let oracle = ck.metric("moments_vs_master_max_abs", moments_oracle(&mut rng)?, "evolve_moments vs evolve_master");
        ck.expect(oracle < 1e-8, format!("moment oracle {oracle:.2e}"));

        let p = SystemParameters::default().with_l2_wavelengths(0.35);
        let e = rabi_25mhz(&p)?;
        let opts = EvolveOptions { validation: Validation::Strict, ..Default::default() };
        let drive = DriveEnvelope::square_pulse(C64::new(e, 0.0), p.omega1, 20e-9)?;
        let strict = evolve_master_with(&p, &dq_couplings(&p)?, &drive, &grid(60e-9, 60), &opts);
        ck.expect(strict.is_ok(), "ρ physical at every step".into());

        let p = SystemParameters::default();
        let c = dq_couplings(&p)?;
        let t = 10.0 / p.gamma2;
        let traj = decay_amplitudes(&c, &[0.0, t])?;
        let total = traj.p1[1] + traj.p2[1] + photon_wavepacket(&c, &traj, t)?.norm();
        ck.metric("wavepacket_total_probability", total, "photon_wavepacket");
        ck.expect((total - 1.0).abs() <= 1e-6, format!("norm {total:.9}"));

        let ident = ck.metric("coupling_identity_worst", coupling_identities(&mut rng)?, "derive_couplings");
        ck.expect(ident < 1e-12, format!("ξ identities {ident:.1e}"));

        let ratio = ck.metric("rk4_convergence_ratio", dde_order()?, "solve_dde");
        ck.expect((ratio - 16.0).abs() <= 2.0, format!("RK4 ratio {ratio:.2}"));
        Ok(())
    })
}

pub const CRITERIA: [fn() -> CriterionOutcome; 9] =
    [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9];

/// Runs every criterion; independent criteria run concurrently on the
/// current rayon pool.
pub fn regression_suite() -> RegressionReport {
    use rayon::prelude::*;
    let outcomes = CRITERIA.par_iter().map(|f| f()).collect();
    RegressionReport { outcomes }
}
