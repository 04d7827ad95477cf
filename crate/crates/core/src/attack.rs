//! Zero-dynamics attack on the yaw-moment channel.
//!
//! The generator is open loop: it carries the attacked-minus-attack-free
//! difference state `xi`, which evolves as `xi(t) = xi(t0) exp(s0 (t - t0))`,
//! and evaluates the output-zeroing feedback law on that internal state. By
//! linearity, injecting the resulting `Mz(t)` into the plant produces exactly
//! the same measurements as an attack-free plant started from `x0 - xi(t0)`.

use crate::analysis::lateral_accel_zero;
use crate::error::{Error, Result};
use crate::model::{LateralModel, OutputCase};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackGenerator {
    case: OutputCase,
    model: LateralModel,
    xi_vy: f64,
    xi_r: f64,
    t0: f64,
    s0: f64,
    /// Feedback gains `Mz = kv vy + kr r` of the output-zeroing law.
    gain_vy: f64,
    gain_r: f64,
}

impl AttackGenerator {
    /// Attack that keeps the yaw rate at zero. The difference state slides
    /// laterally, `vy' = a11 vy`, with `r = 0`.
    pub fn init_case1(model: &LateralModel, delta_vy0: f64, t0: f64) -> Self {
        AttackGenerator {
            case: OutputCase::YawRate,
            model: *model,
            xi_vy: delta_vy0,
            xi_r: 0.0,
            t0,
            s0: model.a11,
            gain_vy: -model.a21 / model.b2,
            gain_r: 0.0,
        }
    }

    /// Attack that keeps the lateral acceleration at zero. The initial
    /// difference state is placed on `a11 vy + (a12 + vx) r = 0` from `r0`.
    pub fn init_case2(model: &LateralModel, r0: f64, t0: f64) -> Result<Self> {
        let s0 = lateral_accel_zero(model)?;
        let k = model.ay_yaw_gain();
        if model.a11 == 0.0 {
            return Err(Error::DegenerateGeometry);
        }
        let scale = -1.0 / (model.b2 * k);
        Ok(AttackGenerator {
            case: OutputCase::LateralAccel,
            model: *model,
            xi_vy: -k * r0 / model.a11,
            xi_r: r0,
            t0,
            s0,
            gain_vy: scale * (model.a11 * model.a11 + model.a21 * k),
            gain_r: scale * (model.a11 * model.a12 + k * model.a22),
        })
    }

    pub fn case(&self) -> OutputCase {
        self.case
    }

    pub fn model(&self) -> &LateralModel {
        &self.model
    }

    /// Difference state at onset, `(vy, r)`.
    pub fn initial_state(&self) -> (f64, f64) {
        (self.xi_vy, self.xi_r)
    }

    pub fn onset(&self) -> f64 {
        self.t0
    }

    /// The excited invariant zero (1/s).
    pub fn zero(&self) -> f64 {
        self.s0
    }

    /// Unstable zero: the difference state grows without bound.
    pub fn is_disruptive(&self) -> bool {
        self.s0 > 0.0
    }

    /// `(kv, kr)` such that `Mz = kv vy + kr r` on the difference state.
    pub fn gains(&self) -> (f64, f64) {
        (self.gain_vy, self.gain_r)
    }

    /// Difference state at time `t`; zero before onset.
    pub fn zero_dynamics_solution(&self, t: f64) -> (f64, f64) {
        if t < self.t0 {
            return (0.0, 0.0);
        }
        let growth = (self.s0 * (t - self.t0)).exp();
        (self.xi_vy * growth, self.xi_r * growth)
    }

    /// Injected yaw moment `Mz^a(t)` (N m); zero before onset.
    pub fn attack_signal(&self, t: f64) -> f64 {
        if t < self.t0 {
            return 0.0;
        }
        let (vy, r) = self.zero_dynamics_solution(t);
        self.gain_vy * vy + self.gain_r * r
    }
}
