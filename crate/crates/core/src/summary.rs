//! Threat summary per sensor set: does an undetectable zero-dynamics attack
//! exist, and is it disruptive?

use crate::analysis::{classify, disruptive_condition};
use crate::attack::AttackGenerator;
use crate::detect::{detect, DetectorConfig};
use crate::error::Result;
use crate::model::{LateralModel, OutputCase};
use crate::sim::{integrate, Scenario, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SensorSet {
    YawRate,
    LateralAccel,
    /// Lateral accelerometer plus the longitudinal-acceleration detector.
    LateralAndLongitudinalAccel,
    YawRateAndLateralAccel,
}

impl SensorSet {
    pub const ALL: [SensorSet; 4] = [
        SensorSet::YawRate,
        SensorSet::LateralAccel,
        SensorSet::LateralAndLongitudinalAccel,
        SensorSet::YawRateAndLateralAccel,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SensorSet::YawRate => "r",
            SensorSet::LateralAccel => "a_y",
            SensorSet::LateralAndLongitudinalAccel => "a_y, a_x",
            SensorSet::YawRateAndLateralAccel => "r, a_y",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreatAssessment {
    pub sensors: SensorSet,
    /// `a Cf - b Cr` of the assessed vehicle (N m/rad).
    pub balance: f64,
    /// An attack exists that the sensor set cannot tell apart from normal driving.
    pub threat: bool,
    pub disruptive: bool,
}

pub fn assess(model: &LateralModel, sensors: SensorSet) -> Result<ThreatAssessment> {
    let balance = disruptive_condition(model.params());
    let (threat, disruptive) = match sensors {
        SensorSet::YawRate => report_flags(model, OutputCase::YawRate)?,
        SensorSet::LateralAccel => report_flags(model, OutputCase::LateralAccel)?,
        SensorSet::YawRateAndLateralAccel => report_flags(model, OutputCase::Both)?,
        SensorSet::LateralAndLongitudinalAccel => {
            let (exists, disruptive) = report_flags(model, OutputCase::LateralAccel)?;
            let caught = !exists || detector_catches_case2(model)?;
            (!caught, !caught && disruptive)
        }
    };
    Ok(ThreatAssessment {
        sensors,
        balance,
        threat,
        disruptive,
    })
}

/// All four sensor sets for one vehicle.
pub fn threat_summary(model: &LateralModel) -> Vec<Result<ThreatAssessment>> {
    SensorSet::ALL.iter().map(|&s| assess(model, s)).collect()
}

fn report_flags(model: &LateralModel, case: OutputCase) -> Result<(bool, bool)> {
    let report = classify(model, case)?;
    Ok((report.attack_exists, report.disruptive))
}

/// Runs a lateral-acceleration attack sized so that `|ax(0)| = 1 m/s^2`
/// through the default detector.
fn detector_catches_case2(model: &LateralModel) -> Result<bool> {
    let cfg = DetectorConfig::default();
    let probe = AttackGenerator::init_case2(model, 1.0, 0.0)?;
    let (vy1, _) = probe.initial_state();
    // ax(0) = -vy r scales with r0^2
    let r0 = (1.0 / vy1.abs()).sqrt();
    let gen = AttackGenerator::init_case2(model, r0, 0.0)?;
    let dt = (0.01 / gen.zero().abs()).min(1e-5);
    let duration = 5.0 * cfg.window;
    let scenario = Scenario::new(
        *model,
        OutputCase::LateralAccel,
        State::from(gen.initial_state()),
        duration,
        dt,
    )
    .with_attack(gen);
    let traj = integrate(&scenario)?;
    Ok(detect(&traj, &cfg)?.attacked)
}
