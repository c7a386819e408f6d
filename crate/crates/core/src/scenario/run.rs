use std::time::Instant;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use super::{physics, Scenario, ScenarioConfig, ScenarioError, SystemConfig, Table};
use crate::delay::{compare_with_approximation, compare_with_step};
use crate::driven::{evolve_master, free_rabi, scenario_pi_pulse, scenario_pulse_train, DriveEnvelope};
use crate::model::{derive_couplings, drive_amplitude_for_rabi, DerivedCouplings, ReferenceFrequency, SystemParameters};
use crate::regression::{dip_width, fitted_decay_rate, Metric};
use crate::single_excitation::{decay_amplitudes, decay_rate_with_loss};

/// Couplings in plain arrays for serialisation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CouplingSummary {
    pub omega_ref: f64,
    pub phases: [f64; 2],
    /// ξ_mn as [re, im].
    pub xi: [[[f64; 2]; 2]; 2],
    pub j: [[f64; 2]; 2],
    pub s_coeff: [f64; 2],
    pub omega_bar: f64,
    pub eta: f64,
}

impl From<&DerivedCouplings> for CouplingSummary {
    fn from(c: &DerivedCouplings) -> Self {
        Self {
            omega_ref: c.omega_ref,
            phases: c.phases,
            xi: [0, 1].map(|m| [0, 1].map(|n| [c.xi[(m, n)].re, c.xi[(m, n)].im])),
            j: [0, 1].map(|m| [0, 1].map(|n| c.j[(m, n)])),
            s_coeff: [c.s_coeff[0], c.s_coeff[1]],
            omega_bar: c.omega_bar,
            eta: c.eta,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub scenario: &'static str,
    /// Parameters actually used, in rad/s, m and m/s.
    pub parameters: SystemParameters,
    pub couplings: CouplingSummary,
    pub metrics: Vec<Metric>,
    /// Where the table was written, if anywhere.
    pub table_path: Option<String>,
    pub wall_clock_s: f64,
    /// Config that reproduces this run exactly.
    pub resolved: ScenarioConfig,
}

impl RunReport {
    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|m| m.name == name).map(|m| m.value)
    }
}

struct Metrics(Vec<Metric>);

impl Metrics {
    fn add(&mut self, name: &str, value: f64, source: &'static str) {
        self.0.push(Metric { name: name.into(), value, source });
    }
}

fn grid(t_end: f64, n: usize) -> Result<Vec<f64>, ScenarioError> {
    if !(t_end > 0.0 && t_end.is_finite()) || n == 0 {
        return Err(ScenarioError::Config(format!("need t_end > 0 and samples ≥ 1 (got {t_end} s, {n})")));
    }
    Ok((0..=n).map(|k| t_end * k as f64 / n as f64).collect())
}

fn linspace(a: f64, b: f64, n: usize) -> Result<Vec<f64>, ScenarioError> {
    match n {
        0 => Err(ScenarioError::Config("a sweep needs at least one point".into())),
        1 => Ok(vec![a]),
        _ => Ok((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()),
    }
}

fn couplings(p: &SystemParameters) -> Result<DerivedCouplings, ScenarioError> {
    physics("core-model", derive_couplings(p, ReferenceFrequency::Dq))
}

fn dq_purity(p1: f64) -> f64 {
    p1 * p1 + (1.0 - p1) * (1.0 - p1)
}

const TRAJECTORY_COLUMNS: [&str; 5] = ["time_s", "p1", "p2", "purity", "p1_free"];

/// Runs one scenario. Output depends only on the config.
pub fn run(config: &ScenarioConfig) -> Result<(RunReport, Table), ScenarioError> {
    let start = Instant::now();
    let scenario = config.scenario.ok_or_else(|| ScenarioError::Config("no scenario given".into()))?;
    let p = config.system.resolve()?;
    let c = couplings(&p)?;
    let mut m = Metrics(Vec::new());
    let mut table = Table::new(&TRAJECTORY_COLUMNS);

    match scenario {
        Scenario::Decay(s) => {
            let times = grid(s.t_end.0, s.samples)?;
            let traj = physics("single-excitation", decay_amplitudes(&c, &times))?;
            let free = physics("single-excitation", decay_amplitudes(&couplings(&p.without_jqf())?, &times))?;
            for k in 0..times.len() {
                table.push(vec![Some(times[k]), Some(traj.p1[k]), Some(traj.p2[k]), Some(dq_purity(traj.p1[k])), Some(free.p1[k])]);
            }
            m.add("p1_final", *traj.p1.last().unwrap(), "decay_amplitudes");
            m.add("p2_final", *traj.p2.last().unwrap(), "decay_amplitudes");
            m.add("p1_free_final", *free.p1.last().unwrap(), "decay_amplitudes");
        }
        Scenario::DdeCompare(s) => {
            let cmp = match s.step {
                Some(h) => physics("delay-rigorous", compare_with_step(&p, s.t_end.0, h.0))?,
                None => physics("delay-rigorous", compare_with_approximation(&p, s.t_end.0))?,
            };
            let r = &cmp.rigorous;
            for k in 0..r.times.len() {
                table.push(vec![Some(r.times[k]), Some(r.p1[k]), Some(r.p2[k]), None, None]);
            }
            m.add("max_dev", cmp.max_dev, "compare_with_approximation");
            m.add("stationary_dev", cmp.stationary_dev, "compare_with_approximation");
            m.add("step_s", cmp.step, "compare_with_approximation");
            m.add("p1_final_rigorous", *r.p1.last().unwrap(), "solve_dde");
            m.add("p1_final_approx", *cmp.approximate.p1.last().unwrap(), "decay_amplitudes");
        }
        Scenario::Rabi(s) => {
            let times = grid(s.t_end.0, s.samples)?;
            let e = physics("core-model", drive_amplitude_for_rabi(p.gamma1, s.rabi_frequency.0))?;
            let drive = DriveEnvelope::continuous(C64::new(e, 0.0), p.omega1);
            let tr = physics("driven-dynamics", evolve_master(&p, &c, &drive, &times))?;
            let free = free_rabi(p.gamma1, e, &times);
            for k in 0..times.len() {
                table.push(vec![Some(times[k]), Some(tr.p1[k]), Some(tr.p2[k]), Some(tr.purity[k]), Some(free[k])]);
            }
            let dev = tr.p1.iter().zip(&free).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if p.gamma2 > 0.0 {
                m.add("photon_rate_over_gamma2", e * e / p.gamma2, "drive_amplitude_for_rabi");
            }
            m.add("max_abs_p1_minus_p1_free", dev, "evolve_master + free_rabi");
            m.add("p1_final", *tr.p1.last().unwrap(), "evolve_master");
        }
        Scenario::PiPulse(s) => {
            let times = grid(s.t_end.0, s.samples)?;
            let tr = physics("driven-dynamics", scenario_pi_pulse(&p, s.duration.0, &times))?;
            let free = physics("driven-dynamics", scenario_pi_pulse(&p.without_jqf(), s.duration.0, &times))?;
            for k in 0..times.len() {
                table.push(vec![Some(times[k]), Some(tr.p1[k]), Some(tr.p2[k]), Some(tr.purity[k]), Some(free.p1[k])]);
            }
            let p1 = *tr.p1.last().unwrap();
            m.add("p1_final", p1, "scenario_pi_pulse");
            m.add("unexcited_final", 1.0 - p1, "scenario_pi_pulse");
            m.add("p1_free_final", *free.p1.last().unwrap(), "scenario_pi_pulse");
        }
        Scenario::PulseTrain(s) => {
            let times = grid(s.t_end.0, s.samples)?;
            if !(s.period.0 > 0.0) {
                return Err(ScenarioError::Config("period must be positive".into()));
            }
            let n = s.n_pulses.unwrap_or((s.t_end.0 / s.period.0).ceil() as usize);
            let tr = physics("driven-dynamics", scenario_pulse_train(&p, s.duration.0, s.period.0, n, &times))?;
            let free = physics("driven-dynamics", scenario_pulse_train(&p.without_jqf(), s.duration.0, s.period.0, n, &times))?;
            for k in 0..times.len() {
                table.push(vec![Some(times[k]), Some(tr.p1[k]), Some(tr.p2[k]), Some(tr.purity[k]), Some(free.p1[k])]);
            }
            m.add("n_pulses", n as f64, "scenario_pulse_train");
            m.add("p1_final", *tr.p1.last().unwrap(), "scenario_pulse_train");
            m.add("p1_free_final", *free.p1.last().unwrap(), "scenario_pulse_train");
            m.add("purity_final", *tr.purity.last().unwrap(), "scenario_pulse_train");
        }
        Scenario::DetuningSweep(s) => {
            let deltas = linspace(s.from.0, s.to.0, s.points)?;
            let rows: Result<Vec<_>, ScenarioError> = deltas
                .par_iter()
                .map(|&d| {
                    let q = p.with_detuning(d);
                    let fitted = physics("single-excitation", fitted_decay_rate(&q))?;
                    let formula = decay_rate_with_loss(&q).ok();
                    Ok(vec![Some(d / std::f64::consts::TAU), Some(fitted), formula])
                })
                .collect();
            table = Table::new(&["detuning_hz", "rate_fitted", "rate_formula"]);
            for row in rows? {
                table.push(row);
            }
            m.add("dip_fwhm_hz", physics("single-excitation", dip_width(&p))? / std::f64::consts::TAU, "fitted_decay_rate");
        }
        Scenario::PositionSweep(s) => {
            let wavelength = p.wavelength();
            let positions = linspace(s.from.metres(wavelength), s.to.metres(wavelength), s.points)?;
            let t_read = s.t_read.0;
            let rows: Result<Vec<_>, ScenarioError> = positions
                .par_iter()
                .map(|&l2| {
                    let q = SystemParameters { l2, ..p };
                    let traj = physics("single-excitation", decay_amplitudes(&couplings(&q)?, &[t_read]))?;
                    Ok(vec![Some(l2 / wavelength), Some(traj.p1[0]), decay_rate_with_loss(&q).ok()])
                })
                .collect();
            table = Table::new(&["l2_over_lambda", "p1", "rate_formula"]);
            let rows = rows?;
            let best = rows.iter().filter_map(|r| r[1]).fold(0.0, f64::max);
            for row in rows {
                table.push(row);
            }
            m.add("p1_best", best, "decay_amplitudes");
        }
    }

    let resolved = ScenarioConfig { system: SystemConfig::from_parameters(&p), scenario: Some(scenario), output: config.output.clone() };
    let report = RunReport {
        scenario: scenario.kind(),
        parameters: p,
        couplings: (&c).into(),
        metrics: m.0,
        table_path: None,
        wall_clock_s: start.elapsed().as_secs_f64(),
        resolved,
    };
    Ok((report, table))
}
