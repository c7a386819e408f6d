use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{JqfError, JqfResult};

/// E_in(t) = amplitude · e^{−i carrier t} on [t_start, t_end).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveSegment {
    pub t_start: f64,
    /// May be +∞ for a drive that never switches off.
    pub t_end: f64,
    /// √(photons/s); |amplitude|² is the incoming photon rate.
    pub amplitude: C64,
    /// ω_d (rad/s).
    pub carrier: f64,
}

impl DriveSegment {
    pub fn contains(&self, t: f64) -> bool {
        t >= self.t_start && t < self.t_end
    }
}

/// Piecewise-constant classical drive.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DriveEnvelope {
    segments: Vec<DriveSegment>,
}

impl DriveEnvelope {
    pub fn new(segments: Vec<DriveSegment>) -> JqfResult<Self> {
        for (k, s) in segments.iter().enumerate() {
            if !(s.t_start.is_finite() && s.t_start >= 0.0) {
                return Err(JqfError::InvalidDrive(format!("segment {k} starts at {}", s.t_start)));
            }
            if !(s.t_end > s.t_start) {
                return Err(JqfError::InvalidDrive(format!("segment {k} is empty ({} .. {})", s.t_start, s.t_end)));
            }
            if !(s.amplitude.re.is_finite() && s.amplitude.im.is_finite() && s.carrier.is_finite()) {
                return Err(JqfError::InvalidDrive(format!("segment {k} has a non-finite amplitude or carrier")));
            }
            if k > 0 && s.t_start < segments[k - 1].t_end {
                return Err(JqfError::InvalidDrive(format!("segment {k} overlaps or precedes segment {}", k - 1)));
            }
        }
        Ok(Self { segments })
    }

    pub fn off() -> Self {
        Self::default()
    }

    pub fn continuous(amplitude: C64, carrier: f64) -> Self {
        Self { segments: vec![DriveSegment { t_start: 0.0, t_end: f64::INFINITY, amplitude, carrier }] }
    }

    /// Square pulse on [0, duration).
    pub fn square_pulse(amplitude: C64, carrier: f64, duration: f64) -> JqfResult<Self> {
        Self::new(vec![DriveSegment { t_start: 0.0, t_end: duration, amplitude, carrier }])
    }

    /// `n_pulses` square pulses of length `duration` starting at k·period.
    pub fn pulse_train(amplitude: C64, carrier: f64, duration: f64, period: f64, n_pulses: usize) -> JqfResult<Self> {
        if !(period >= duration) {
            return Err(JqfError::InvalidDrive(format!("period {period} shorter than the pulse {duration}")));
        }
        let segments = (0..n_pulses)
            .map(|k| {
                let t0 = k as f64 * period;
                DriveSegment { t_start: t0, t_end: t0 + duration, amplitude, carrier }
            })
            .collect();
        Self::new(segments)
    }

    pub fn segments(&self) -> &[DriveSegment] {
        &self.segments
    }

    pub fn is_off(&self) -> bool {
        self.segments.iter().all(|s| s.amplitude == C64::new(0.0, 0.0))
    }

    /// Carrier of the first segment, used as the default rotating frame.
    pub fn carrier(&self) -> Option<f64> {
        self.segments.first().map(|s| s.carrier)
    }

    pub fn segment_at(&self, t: f64) -> Option<&DriveSegment> {
        let k = self.segments.partition_point(|s| s.t_end <= t);
        self.segments.get(k).filter(|s| s.contains(t))
    }

    /// Lab-frame E_in(t).
    pub fn value(&self, t: f64) -> C64 {
        self.segment_at(t).map_or(C64::new(0.0, 0.0), |s| s.amplitude * C64::from_polar(1.0, -s.carrier * t))
    }

    /// Switching times inside (0, t_max].
    pub fn edges(&self, t_max: f64) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .segments
            .iter()
            .flat_map(|s| [s.t_start, s.t_end])
            .filter(|&t| t > 0.0 && t <= t_max)
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Same switching pattern, amplitudes multiplied by `factor`.
    pub fn scaled(&self, factor: C64) -> Self {
        let segments = self.segments.iter().map(|s| DriveSegment { amplitude: s.amplitude * factor, ..*s }).collect();
        Self { segments }
    }
}
