//! Longitudinal-acceleration consistency check.
//!
//! An attack that pins the lateral acceleration at zero still leaves both
//! `vy` and `r` nonzero, so the longitudinal accelerometer reads
//! `ax = -vy r != 0` (constant `vx`). A quiet `ay` channel co-occurring with an
//! active `ax` channel for a sustained window is the alarm.

use crate::error::{Error, Result};
use crate::sim::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    /// `|ay|` below this counts as zero (m/s^2).
    pub ay_quiet_threshold: f64,
    /// `|ax|` above this counts as active (m/s^2).
    pub ax_alarm_threshold: f64,
    /// Minimum dwell time of the joint condition (s).
    pub window: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            ay_quiet_threshold: 1e-3,
            ax_alarm_threshold: 1e-3,
            window: 1e-3,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        for (field, value) in [
            ("ay_quiet", self.ay_quiet_threshold),
            ("ax_alarm", self.ax_alarm_threshold),
            ("window", self.window),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidParameter {
                    field,
                    value,
                    reason: "detector settings must be strictly positive",
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorVerdict {
    pub attacked: bool,
    /// End of the first window in which the joint condition held.
    pub first_alarm_time: Option<f64>,
    /// Largest `|ax|` seen (m/s^2).
    pub peak_ax: f64,
}

/// Sample-by-sample detector state. [`detect`] drives it over a whole
/// trajectory; it can equally be fed live samples.
#[derive(Debug, Clone)]
pub struct StreamingDetector {
    cfg: DetectorConfig,
    run_start: Option<f64>,
    first_alarm_time: Option<f64>,
    peak_ax: f64,
}

impl StreamingDetector {
    pub fn new(cfg: DetectorConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(StreamingDetector {
            cfg,
            run_start: None,
            first_alarm_time: None,
            peak_ax: 0.0,
        })
    }

    /// Feeds one sample; returns true once an alarm has been raised.
    pub fn push(&mut self, t: f64, ay: f64, ax: f64) -> bool {
        self.peak_ax = self.peak_ax.max(ax.abs());
        let suspicious =
            ay.abs() < self.cfg.ay_quiet_threshold && ax.abs() > self.cfg.ax_alarm_threshold;
        if !suspicious {
            self.run_start = None;
        } else {
            let start = *self.run_start.get_or_insert(t);
            // sample times carry rounding; allow a relative sliver on the window
            if self.first_alarm_time.is_none() && t - start >= self.cfg.window * (1.0 - 1e-9) {
                self.first_alarm_time = Some(t);
            }
        }
        self.first_alarm_time.is_some()
    }

    pub fn verdict(&self) -> DetectorVerdict {
        DetectorVerdict {
            attacked: self.first_alarm_time.is_some(),
            first_alarm_time: self.first_alarm_time,
            peak_ax: self.peak_ax,
        }
    }
}

/// Batch detection over a recorded trajectory.
pub fn detect(traj: &Trajectory, cfg: &DetectorConfig) -> Result<DetectorVerdict> {
    detect_series(&traj.t, &traj.ay, &traj.ax, cfg)
}

pub fn detect_series(t: &[f64], ay: &[f64], ax: &[f64], cfg: &DetectorConfig) -> Result<DetectorVerdict> {
    cfg.validate()?;
    if t.len() != ay.len() || t.len() != ax.len() {
        return Err(Error::config("detector channels have different lengths"));
    }
    let span = match (t.first(), t.last()) {
        (Some(first), Some(last)) => last - first,
        _ => return Err(Error::config("trajectory is empty")),
    };
    if cfg.window > span {
        return Err(Error::config(format!(
            "detector window {} s is longer than the trajectory ({} s)",
            cfg.window, span
        )));
    }
    let mut detector = StreamingDetector::new(*cfg)?;
    for ((&t, &ay), &ax) in t.iter().zip(ay).zip(ax) {
        detector.push(t, ay, ax);
    }
    Ok(detector.verdict())
}
