//! Small numerical kernels shared by the solvers: fixed-step RK4 on complex
//! state arrays, trapezoidal quadrature, least-squares line fits and extremum
//! location.

use num_complex::Complex64 as C64;

fn axpy<const N: usize>(y: &[C64; N], a: f64, k: &[C64; N]) -> [C64; N] {
    let mut out = *y;
    for (o, kk) in out.iter_mut().zip(k) {
        *o += kk * a;
    }
    out
}

/// One classical RK4 step of dy/dt = f(t, y) from `t` to `t + h`.
pub fn rk4_step<const N: usize, F>(f: &mut F, t: f64, h: f64, y: &[C64; N]) -> [C64; N]
where
    F: FnMut(f64, &[C64; N]) -> [C64; N],
{
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k1));
    let k3 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k2));
    let k4 = f(t + h, &axpy(y, h, &k3));
    let mut out = *y;
    for i in 0..N {
        out[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
    }
    out
}

/// Integrates from `t0` to `t1` in `n` equal RK4 steps.
pub fn rk4_span<const N: usize, F>(f: &mut F, t0: f64, t1: f64, n: usize, mut y: [C64; N]) -> [C64; N]
where
    F: FnMut(f64, &[C64; N]) -> [C64; N],
{
    let h = (t1 - t0) / n as f64;
    for k in 0..n {
        y = rk4_step(f, t0 + k as f64 * h, h, &y);
    }
    y
}

pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Ordinary least squares y ≈ slope·x + intercept.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Rate κ of y ≈ A e^{−κt}, fitted on ln y.
pub fn fit_exponential_rate(times: &[f64], values: &[f64]) -> f64 {
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    -linear_fit(times, &logs).0
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extremum {
    pub t: f64,
    pub value: f64,
    pub is_max: bool,
}

/// Interior local extrema of a sampled curve on a uniform grid, refined by a
/// parabola through the three surrounding samples.
pub fn local_extrema(times: &[f64], values: &[f64]) -> Vec<Extremum> {
    let mut out = Vec::new();
    for i in 1..values.len().saturating_sub(1) {
        let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
        let is_max = b > a && b >= c;
        let is_min = b < a && b <= c;
        if !(is_max || is_min) {
            continue;
        }
        let h = times[i + 1] - times[i];
        let denom = a - 2.0 * b + c;
        let (dt, value) = if denom != 0.0 {
            let off = 0.5 * (a - c) / denom;
            (off * h, b - 0.25 * (a - c) * off)
        } else {
            (0.0, b)
        };
        out.push(Extremum { t: times[i] + dt, value, is_max });
    }
    out
}
