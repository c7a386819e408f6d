//! Exact single-excitation dynamics with retardation: the amplitudes obey
//! delay differential equations whose delays are the photon round trips
//! between the qubits and the mirrored waveguide end.
//!
//! Integration is fixed-step RK4 on the envelopes ᾱ_j = α_j e^{iω_q t}, so the
//! carrier only appears through the constant phases e^{iω_q τ} of the retarded
//! terms. The step grid contains every point where a retarded argument
//! crosses t = 0 (and their sums up to third order), which keeps the scheme
//! fourth order despite the jump of the history at the origin.

use std::collections::VecDeque;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{JqfError, JqfResult};
use crate::model::{derive_couplings, ReferenceFrequency, SystemParameters};
use crate::single_excitation::{decay_amplitudes, AmplitudeTrajectory};

/// One term `coefficient · ᾱ_source(t − delay)` in the equation for ᾱ_target.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RetardedTerm {
    pub target: usize,
    pub source: usize,
    /// Retardation (s); zero for the instantaneous terms.
    pub delay: f64,
    /// Complex rate (rad/s) including the carrier phase e^{iω_q·delay}.
    pub coefficient: C64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelaySystem {
    /// Round trips {2l₁/v, 2l₂/v, (l₁+l₂)/v, |l₁−l₂|/v}.
    pub delays: [f64; 4],
    pub terms: Vec<RetardedTerm>,
    pub omega_q: f64,
}

impl DelaySystem {
    pub fn new(p: &SystemParameters) -> JqfResult<Self> {
        p.validate()?;
        let omega_q = p.omega1;
        let v = p.velocity;
        let delays = [2.0 * p.l1 / v, 2.0 * p.l2 / v, (p.l1 + p.l2) / v, (p.l1 - p.l2).abs() / v];
        let [self1, self2, sum, diff] = delays;
        let cross = -0.5 * (p.gamma1 * p.gamma2).sqrt();
        let phase = |tau: f64| C64::from_polar(1.0, omega_q * tau);
        let local = |m: usize| {
            let (g, gi, w) = if m == 0 { (p.gamma1, p.gamma_i1, p.omega1) } else { (p.gamma2, p.gamma_i2, p.omega2) };
            RetardedTerm { target: m, source: m, delay: 0.0, coefficient: -C64::new(0.5 * g + 0.5 * gi, w - omega_q) }
        };
        let terms = vec![
            local(0),
            RetardedTerm { target: 0, source: 0, delay: self1, coefficient: -0.5 * p.gamma1 * phase(self1) },
            RetardedTerm { target: 0, source: 1, delay: sum, coefficient: cross * phase(sum) },
            RetardedTerm { target: 0, source: 1, delay: diff, coefficient: cross * phase(diff) },
            local(1),
            RetardedTerm { target: 1, source: 1, delay: self2, coefficient: -0.5 * p.gamma2 * phase(self2) },
            RetardedTerm { target: 1, source: 0, delay: sum, coefficient: cross * phase(sum) },
            RetardedTerm { target: 1, source: 0, delay: diff, coefficient: cross * phase(diff) },
        ];
        Ok(Self { delays, terms, omega_q })
    }

    /// Delays carried by a term with non-zero coefficient.
    pub fn active_delays(&self) -> Vec<f64> {
        self.terms.iter().filter(|t| t.coefficient != C64::new(0.0, 0.0)).map(|t| t.delay).collect()
    }

    pub fn min_positive_delay(&self) -> Option<f64> {
        self.active_delays().into_iter().filter(|&d| d > 0.0).reduce(f64::min)
    }

    pub fn max_delay(&self) -> f64 {
        self.active_delays().into_iter().fold(0.0, f64::max)
    }

    fn rhs(&self, t: f64, y: &[C64; 2], history: &HistoryBuffer, side: Side) -> [C64; 2] {
        let mut out = [C64::new(0.0, 0.0); 2];
        for term in self.terms.iter().filter(|t| t.coefficient != C64::new(0.0, 0.0)) {
            let value = if term.delay == 0.0 { y[term.source] } else { history.query(t - term.delay, side)[term.source] };
            out[term.target] += term.coefficient * value;
        }
        out
    }
}

/// Which one-sided limit to take where the history jumps (at the origin).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Segment {
    t0: f64,
    t1: f64,
    y0: [C64; 2],
    y1: [C64; 2],
    /// Right derivative at t0.
    d0: [C64; 2],
    /// Left derivative at t1.
    d1: [C64; 2],
}

/// Past envelopes as a chain of cubic Hermite segments (one per step),
/// trimmed to the longest delay. Zero before t = 0.
#[derive(Clone, Debug, Default)]
pub struct HistoryBuffer {
    segments: VecDeque<Segment>,
    horizon: f64,
}

impl HistoryBuffer {
    pub const INTERPOLATION_ORDER: usize = 3;

    pub fn new(horizon: f64) -> Self {
        Self { segments: VecDeque::new(), horizon }
    }

    fn push(&mut self, seg: Segment) {
        let newest = seg.t1;
        self.segments.push_back(seg);
        while let Some(front) = self.segments.front() {
            if front.t1 < newest - self.horizon && self.segments.len() > 1 {
                self.segments.pop_front();
            } else {
                break;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Oldest time still stored.
    pub fn start(&self) -> Option<f64> {
        self.segments.front().map(|s| s.t0)
    }

    pub fn max_spacing(&self) -> f64 {
        self.segments.iter().map(|s| s.t1 - s.t0).fold(0.0, f64::max)
    }

    pub fn query(&self, s: f64, side: Side) -> [C64; 2] {
        let zero = [C64::new(0.0, 0.0); 2];
        if s < 0.0 || (s == 0.0 && side == Side::Left) {
            return zero;
        }
        let idx = self.segments.partition_point(|seg| seg.t1 < s);
        let Some(seg) = self.segments.get(idx) else {
            debug_assert!(false, "history queried ahead of the solution at {s}");
            return self.segments.back().map_or(zero, |seg| seg.y1);
        };
        debug_assert!(s >= seg.t0 - 1e-18, "history pruned too early");
        let h = seg.t1 - seg.t0;
        let u = (s - seg.t0) / h;
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = (u3 - 2.0 * u2 + u) * h;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = (u3 - u2) * h;
        let mut out = zero;
        for j in 0..2 {
            out[j] = seg.y0[j] * h00 + seg.d0[j] * h10 + seg.y1[j] * h01 + seg.d1[j] * h11;
        }
        out
    }
}

/// Sums of up to three positive delays below `t_end`: the points where the
/// solution or its first two derivatives can jump.
fn breakpoints(delays: &[f64], t_end: f64) -> Vec<f64> {
    let mut base: Vec<f64> = delays.iter().copied().filter(|&d| d > 0.0).collect();
    base.sort_by(f64::total_cmp);
    base.dedup();
    let mut out = Vec::new();
    for (i, &a) in base.iter().enumerate() {
        out.push(a);
        for (j, &b) in base.iter().enumerate().skip(i) {
            out.push(a + b);
            for &c in base.iter().skip(j) {
                out.push(a + b + c);
            }
        }
    }
    out.retain(|&t| t < t_end);
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

fn step_grid(t_end: f64, h: f64, breaks: &[f64], samples: &[f64]) -> Vec<f64> {
    let n = (t_end / h).ceil() as usize;
    let mut pinned: Vec<f64> = breaks.iter().chain(samples).copied().filter(|&t| t > 0.0 && t < t_end).collect();
    pinned.push(t_end);
    pinned.sort_by(f64::total_cmp);
    pinned.dedup();
    let mut grid = vec![0.0];
    let mut next_pin = 0;
    for k in 1..=n {
        let nominal = if k == n { t_end } else { k as f64 * h };
        while next_pin < pinned.len() && pinned[next_pin] <= nominal + 1e-6 * h {
            let p = pinned[next_pin];
            if p > *grid.last().unwrap() {
                grid.push(p);
            }
            next_pin += 1;
        }
        if nominal > *grid.last().unwrap() + 1e-6 * h {
            grid.push(nominal);
        }
    }
    grid
}

/// Upper bound on the step: a quarter of the shortest non-zero delay and
/// 1/(50 γ) for the fastest rate.
pub fn max_stable_step(p: &SystemParameters) -> JqfResult<f64> {
    let sys = DelaySystem::new(p)?;
    let rate = [p.gamma1, p.gamma2, p.gamma_i1, p.gamma_i2].into_iter().fold(0.0, f64::max);
    let mut bound = f64::INFINITY;
    if let Some(d) = sys.min_positive_delay() {
        bound = bound.min(d / 4.0);
    }
    if rate > 0.0 {
        bound = bound.min(1.0 / (50.0 * rate));
    }
    Ok(bound)
}

/// Solves the retarded amplitude equations on [0, t_end] with DQ initially
/// excited, returning every grid point.
pub fn solve_dde(p: &SystemParameters, t_end: f64, h: f64) -> JqfResult<AmplitudeTrajectory> {
    solve_dde_sampled(p, t_end, h, None)
}

/// As [`solve_dde`], but pins the grid to `samples` and records only those.
pub fn solve_dde_sampled(p: &SystemParameters, t_end: f64, h: f64, samples: Option<&[f64]>) -> JqfResult<AmplitudeTrajectory> {
    let sys = DelaySystem::new(p)?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(JqfError::InvalidTimes(format!("t_end = {t_end} must be positive")));
    }
    if let Some(s) = samples {
        crate::error::check_times(s)?;
        if s.last().is_some_and(|&last| last > t_end) {
            return Err(JqfError::InvalidTimes("sample beyond t_end".into()));
        }
    }
    if !(h > 0.0) {
        return Err(JqfError::InvalidParameter { name: "h", reason: "step must be positive".into() });
    }
    if let Some(d) = sys.min_positive_delay() {
        if h > d / 4.0 {
            return Err(JqfError::StepTooLarge { h, bound: d / 4.0, reason: "h > min(delay)/4" });
        }
    }
    let rate = [p.gamma1, p.gamma2, p.gamma_i1, p.gamma_i2].into_iter().fold(0.0, f64::max);
    if rate > 0.0 && h > 1.0 / (50.0 * rate) {
        return Err(JqfError::StepTooLarge { h, bound: 1.0 / (50.0 * rate), reason: "h > 1/(50γ)" });
    }

    let grid = step_grid(t_end, h, &breakpoints(&sys.active_delays(), t_end), samples.unwrap_or(&[]));
    let mut history = HistoryBuffer::new(sys.max_delay() + 2.0 * h);
    let mut y = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];

    let (mut times, mut env) = (Vec::new(), Vec::new());
    let mut sample_iter = samples.map(|s| s.iter().peekable());
    let mut record = |t: f64, y: [C64; 2]| match sample_iter.as_mut() {
        None => {
            times.push(t);
            env.push(y);
        }
        Some(it) => {
            while it.peek().is_some_and(|&&s| s == t) {
                times.push(t);
                env.push(y);
                it.next();
            }
        }
    };
    record(0.0, y);

    let add = |y: &[C64; 2], a: f64, k: &[C64; 2]| [y[0] + k[0] * a, y[1] + k[1] * a];
    for w in grid.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let dt = t1 - t0;
        let k1 = sys.rhs(t0, &y, &history, Side::Right);
        let k2 = sys.rhs(t0 + 0.5 * dt, &add(&y, 0.5 * dt, &k1), &history, Side::Right);
        let k3 = sys.rhs(t0 + 0.5 * dt, &add(&y, 0.5 * dt, &k2), &history, Side::Right);
        let k4 = sys.rhs(t1, &add(&y, dt, &k3), &history, Side::Left);
        let mut y1 = y;
        for j in 0..2 {
            y1[j] += (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) * (dt / 6.0);
        }
        if !(y1[0].re.is_finite() && y1[0].im.is_finite() && y1[1].re.is_finite() && y1[1].im.is_finite()) {
            return Err(JqfError::NonFinite { t: t1 });
        }
        let d1 = sys.rhs(t1, &y1, &history, Side::Left);
        history.push(Segment { t0, t1, y0: y, y1, d0: k1, d1 });
        y = y1;
        record(t1, y);
    }
    Ok(AmplitudeTrajectory::from_envelopes(times, env, None, sys.omega_q))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DdeComparison {
    /// max_t |P₁^rigorous − P₁^approx| on the shared grid.
    pub max_dev: f64,
    /// |P₁^rigorous − P₁^approx| at t_end.
    pub stationary_dev: f64,
    pub step: f64,
    pub rigorous: AmplitudeTrajectory,
    pub approximate: AmplitudeTrajectory,
}

/// Default step for [`compare_with_approximation`].
pub fn default_step(p: &SystemParameters, t_end: f64) -> JqfResult<f64> {
    Ok(max_stable_step(p)?.min(t_end / 1000.0))
}

/// Runs the retarded and the free-evolution solutions on a shared grid and
/// reports how far apart their survival probabilities are.
pub fn compare_with_approximation(p: &SystemParameters, t_end: f64) -> JqfResult<DdeComparison> {
    let step = default_step(p, t_end)?;
    compare_with_step(p, t_end, step)
}

pub fn compare_with_step(p: &SystemParameters, t_end: f64, step: f64) -> JqfResult<DdeComparison> {
    let rigorous = solve_dde(p, t_end, step)?;
    let c = derive_couplings(p, ReferenceFrequency::Dq)?;
    let approximate = decay_amplitudes(&c, &rigorous.times)?;
    let max_dev = rigorous.p1.iter().zip(&approximate.p1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let stationary_dev = (rigorous.p1.last().unwrap() - approximate.p1.last().unwrap()).abs();
    Ok(DdeComparison { max_dev, stationary_dev, step, rigorous, approximate })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delays_and_coefficients() {
        let p = SystemParameters { l1: 2e-3, ..SystemParameters::default() };
        let sys = DelaySystem::new(&p).unwrap();
        let v = p.velocity;
        assert_eq!(sys.delays, [4e-3 / v, 20e-3 / v, 12e-3 / v, 8e-3 / v]);
        // Setting every retarded ᾱ(t − τ) = ᾱ(t) recovers −ξ.
        let c = derive_couplings(&p, ReferenceFrequency::Dq).unwrap();
        let mut m = [[C64::new(0.0, 0.0); 2]; 2];
        for t in &sys.terms {
            m[t.target][t.source] += t.coefficient;
        }
        for i in 0..2 {
            for j in 0..2 {
                assert!((m[i][j] + c.xi[(i, j)]).norm() < 1e-9 * p.gamma2);
            }
        }
    }

    #[test]
    fn history_is_zero_before_start() {
        let mut h = HistoryBuffer::new(1.0);
        let one = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        h.push(Segment { t0: 0.0, t1: 0.1, y0: one, y1: one, d0: [C64::new(0.0, 0.0); 2], d1: [C64::new(0.0, 0.0); 2] });
        assert_eq!(h.query(-1e-30, Side::Right)[0], C64::new(0.0, 0.0));
        assert_eq!(h.query(0.0, Side::Left)[0], C64::new(0.0, 0.0));
        assert_eq!(h.query(0.0, Side::Right)[0], C64::new(1.0, 0.0));
        assert_eq!(h.query(0.05, Side::Left)[0], C64::new(1.0, 0.0));
    }

    #[test]
    fn hermite_reproduces_cubics() {
        let f = |t: f64| C64::new(t * t * t - 2.0 * t, 0.5 * t * t);
        let df = |t: f64| C64::new(3.0 * t * t - 2.0, t);
        let mut h = HistoryBuffer::new(10.0);
        for k in 0..4 {
            let (a, b) = (k as f64 * 0.3, (k + 1) as f64 * 0.3);
            h.push(Segment { t0: a, t1: b, y0: [f(a); 2], y1: [f(b); 2], d0: [df(a); 2], d1: [df(b); 2] });
        }
        for s in [0.01, 0.31, 0.77, 1.19] {
            assert!((h.query(s, Side::Right)[0] - f(s)).norm() < 1e-13);
        }
        assert!(h.max_spacing() <= 0.3 + 1e-15);
    }

    #[test]
    fn history_is_trimmed_to_horizon() {
        let mut h = HistoryBuffer::new(0.25);
        let z = [C64::new(0.0, 0.0); 2];
        for k in 0..100 {
            h.push(Segment { t0: k as f64 * 0.01, t1: (k + 1) as f64 * 0.01, y0: z, y1: z, d0: z, d1: z });
        }
        assert!(h.start().unwrap() >= 1.0 - 0.25 - 0.011);
        assert!(h.len() < 30);
    }

    #[test]
    fn breakpoint_set() {
        let b = breakpoints(&[0.0, 1.0, 3.0, 3.0], 6.5);
        assert_eq!(b, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    }

    #[test]
    fn grid_contains_pins_and_respects_step() {
        let g = step_grid(1.0, 0.1, &[0.25, 0.3], &[0.55]);
        for t in [0.25, 0.3, 0.55, 1.0] {
            assert!(g.contains(&t));
        }
        assert!(g.windows(2).all(|w| w[1] > w[0] && w[1] - w[0] <= 0.1 + 1e-15));
    }

    #[test]
    fn rejects_oversized_steps() {
        let p = SystemParameters::default();
        let bound = max_stable_step(&p).unwrap();
        assert!(matches!(solve_dde(&p, 1e-9, 1.01 * bound), Err(JqfError::StepTooLarge { .. })));
        assert!(solve_dde(&p, 1e-9, bound).is_ok());
    }
}
