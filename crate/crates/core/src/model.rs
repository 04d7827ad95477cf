//! Linear single-track (bicycle) lateral dynamics
//!
//! ```text
//! x' = A x + B Mz + E delta,   x = [vy, r]
//! ```
//!
//! with the yaw moment `Mz` as the actuated (and attackable) input and the
//! steering angle `delta` as the driver's command. The longitudinal speed `vx`
//! is a fixed scenario constant, so a [`LateralModel`] is built once and never
//! mutated.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical vehicle constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleParams {
    /// Total mass (kg).
    pub mass: f64,
    /// Yaw moment of inertia about the vertical axis (kg m^2).
    pub yaw_inertia: f64,
    /// CG to front axle (m).
    pub front_axle: f64,
    /// CG to rear axle (m).
    pub rear_axle: f64,
    /// Front cornering stiffness (N/rad).
    pub front_stiffness: f64,
    /// Rear cornering stiffness (N/rad).
    pub rear_stiffness: f64,
}

impl VehicleParams {
    /// Mid-size SUV used throughout the reproduction scenarios.
    pub const SUV: VehicleParams = VehicleParams {
        mass: 2270.0,
        yaw_inertia: 4600.0,
        front_axle: 1.421,
        rear_axle: 1.438,
        front_stiffness: 69800.0,
        rear_stiffness: 69600.0,
    };

    /// Checks that every field is finite and strictly positive. The error
    /// names the scenario-file key of the first offending field.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("m", self.mass),
            ("Iz", self.yaw_inertia),
            ("a", self.front_axle),
            ("b", self.rear_axle),
            ("Cf", self.front_stiffness),
            ("Cr", self.rear_stiffness),
        ];
        for (field, value) in fields {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    field,
                    value,
                    reason: "must be finite",
                });
            }
            if value <= 0.0 {
                return Err(Error::InvalidParameter {
                    field,
                    value,
                    reason: "must be strictly positive",
                });
            }
        }
        Ok(())
    }

    pub fn wheelbase(&self) -> f64 {
        self.front_axle + self.rear_axle
    }

    /// `a Cf - b Cr` (N m/rad). Negative means understeer-like balance; its sign
    /// decides whether the lateral-acceleration invariant zero is stable.
    pub fn stiffness_moment_balance(&self) -> f64 {
        self.front_axle * self.front_stiffness - self.rear_axle * self.rear_stiffness
    }
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self::SUV
    }
}

/// State-space coefficients of the lateral model at one longitudinal speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LateralModel {
    pub vx: f64,
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
    /// Yaw-moment gain, `1/Iz`.
    pub b2: f64,
    /// Steering gain into the lateral-velocity row.
    pub e1: f64,
    /// Steering gain into the yaw-rate row.
    pub e2: f64,
    pub params: VehicleParams,
}

impl LateralModel {
    pub fn params(&self) -> &VehicleParams {
        &self.params
    }

    /// `a12 + vx`, the yaw-rate coefficient of the lateral-acceleration output.
    pub fn ay_yaw_gain(&self) -> f64 {
        self.a12 + self.vx
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn determinant(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }
}

/// Assembles the lateral model for `params` at longitudinal speed `vx`.
pub fn build_model(params: VehicleParams, vx: f64) -> Result<LateralModel> {
    params.validate()?;
    if !vx.is_finite() || vx <= 0.0 {
        return Err(Error::InvalidParameter {
            field: "vx",
            value: vx,
            reason: "longitudinal speed must be strictly positive",
        });
    }
    let VehicleParams {
        mass: m,
        yaw_inertia: iz,
        front_axle: a,
        rear_axle: b,
        front_stiffness: cf,
        rear_stiffness: cr,
    } = params;

    Ok(LateralModel {
        vx,
        a11: -2.0 * (cf + cr) / (vx * m),
        a12: 2.0 * (b * cr - a * cf) / (vx * m) - vx,
        a21: 2.0 * (b * cr - a * cf) / (vx * iz),
        a22: -2.0 * (a * a * cf + b * b * cr) / (vx * iz),
        b2: 1.0 / iz,
        e1: 2.0 * cf / m,
        e2: 2.0 * a * cf / iz,
        params,
    })
}

/// Which IMU channels are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputCase {
    /// `y = r`
    YawRate,
    /// `y = ay = vy' + vx r`
    LateralAccel,
    /// `y = [r, ay]`
    Both,
}

impl OutputCase {
    pub const ALL: [OutputCase; 3] = [
        OutputCase::YawRate,
        OutputCase::LateralAccel,
        OutputCase::Both,
    ];

    /// Scenario-file spelling.
    pub fn as_str(self) -> &'static str {
        match self {
            OutputCase::YawRate => "yaw_rate",
            OutputCase::LateralAccel => "lateral_accel",
            OutputCase::Both => "both",
        }
    }

    pub fn output_dim(self) -> usize {
        match self {
            OutputCase::Both => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for OutputCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for OutputCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "yaw_rate" => Ok(OutputCase::YawRate),
            "lateral_accel" => Ok(OutputCase::LateralAccel),
            "both" => Ok(OutputCase::Both),
            other => Err(Error::config(format!(
                "unknown output case `{other}` (expected yaw_rate, lateral_accel or both)"
            ))),
        }
    }
}

/// One measured channel: `y_k = c . x + d_delta * delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputRow {
    pub c: [f64; 2],
    pub d_delta: f64,
}

/// Output equation `y = C x + D delta` for one [`OutputCase`].
#[derive(Debug, Clone, PartialEq)]
pub struct OutputModel {
    pub case: OutputCase,
    pub rows: Vec<OutputRow>,
}

impl OutputModel {
    pub fn c(&self) -> Vec<[f64; 2]> {
        self.rows.iter().map(|row| row.c).collect()
    }

    pub fn d_delta(&self) -> Vec<f64> {
        self.rows.iter().map(|row| row.d_delta).collect()
    }

    /// Evaluates `C x + D delta`.
    pub fn apply(&self, vy: f64, r: f64, delta: f64) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.c[0] * vy + row.c[1] * r + row.d_delta * delta)
            .collect()
    }
}

fn yaw_rate_row() -> OutputRow {
    OutputRow {
        c: [0.0, 1.0],
        d_delta: 0.0,
    }
}

fn lateral_accel_row(model: &LateralModel) -> OutputRow {
    OutputRow {
        c: [model.a11, model.ay_yaw_gain()],
        d_delta: model.e1,
    }
}

pub fn output_model(model: &LateralModel, case: OutputCase) -> OutputModel {
    let rows = match case {
        OutputCase::YawRate => vec![yaw_rate_row()],
        OutputCase::LateralAccel => vec![lateral_accel_row(model)],
        OutputCase::Both => vec![yaw_rate_row(), lateral_accel_row(model)],
    };
    OutputModel { case, rows }
}

/// `(a+b)^2 - m (a Cf - b Cr) vx^2 / (Cr Cf)` in m^2. Positive is the
/// textbook sufficient condition for `A` to be Hurwitz.
pub fn a_stability_margin(model: &LateralModel) -> f64 {
    let p = &model.params;
    p.wheelbase().powi(2)
        - p.mass * p.stiffness_moment_balance() / (p.rear_stiffness * p.front_stiffness)
            * model.vx.powi(2)
}

/// Both eigenvalues of the 2x2 state matrix, ascending by real part (then by
/// imaginary part).
pub fn eigenvalues_a(model: &LateralModel) -> [Complex64; 2] {
    let half_trace = 0.5 * model.trace();
    let disc = half_trace * half_trace - model.determinant();
    let mut roots = if disc >= 0.0 {
        let root = disc.sqrt();
        // Pair the larger-magnitude root with the product to avoid cancellation.
        let big = half_trace + root.copysign(half_trace);
        let small = if big != 0.0 {
            model.determinant() / big
        } else {
            half_trace - root.copysign(half_trace)
        };
        [Complex64::new(big, 0.0), Complex64::new(small, 0.0)]
    } else {
        let im = (-disc).sqrt();
        [
            Complex64::new(half_trace, -im),
            Complex64::new(half_trace, im),
        ]
    };
    roots.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    roots
}
