//! TOML scenario files and the built-in reproduction presets.
//!
//! ```toml
//! [vehicle]      # m, Iz, a, b, Cf, Cr
//! [run]          # vx, case, duration, dt, vy0, r0, steering, t_on, omega, amplitude, state_ceiling
//! [attack]       # enabled, kind, delta_vy0, r0, t0
//! [detector]     # ay_quiet, ax_alarm, window
//! ```
//!
//! Every key is optional and falls back to the SUV / yaw-rate experiment
//! defaults. Unknown sections or keys are rejected.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::attack::AttackGenerator;
use crate::detect::DetectorConfig;
use crate::error::{Error, Result};
use crate::model::{build_model, LateralModel, OutputCase, VehicleParams};
use crate::sim::{Scenario, State, SteeringProfile, DEFAULT_STATE_CEILING};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioFile {
    pub vehicle: VehicleSection,
    pub run: RunSection,
    pub attack: AttackSection,
    pub detector: DetectorSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VehicleSection {
    pub m: f64,
    #[serde(rename = "Iz")]
    pub iz: f64,
    pub a: f64,
    pub b: f64,
    #[serde(rename = "Cf")]
    pub cf: f64,
    #[serde(rename = "Cr")]
    pub cr: f64,
}

impl Default for VehicleSection {
    fn default() -> Self {
        VehicleSection::from(VehicleParams::SUV)
    }
}

impl From<VehicleParams> for VehicleSection {
    fn from(p: VehicleParams) -> Self {
        VehicleSection {
            m: p.mass,
            iz: p.yaw_inertia,
            a: p.front_axle,
            b: p.rear_axle,
            cf: p.front_stiffness,
            cr: p.rear_stiffness,
        }
    }
}

impl From<VehicleSection> for VehicleParams {
    fn from(v: VehicleSection) -> Self {
        VehicleParams {
            mass: v.m,
            yaw_inertia: v.iz,
            front_axle: v.a,
            rear_axle: v.b,
            front_stiffness: v.cf,
            rear_stiffness: v.cr,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SteeringKind {
    Zero,
    DelayedSine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub vx: f64,
    pub case: OutputCase,
    pub duration: f64,
    pub dt: f64,
    pub vy0: f64,
    pub r0: f64,
    pub steering: SteeringKind,
    pub t_on: f64,
    pub omega: f64,
    pub amplitude: f64,
    pub state_ceiling: f64,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            vx: 25.0,
            case: OutputCase::YawRate,
            duration: 1.0,
            dt: 1e-4,
            vy0: 5.0,
            r0: 0.0,
            steering: SteeringKind::Zero,
            t_on: 0.1,
            omega: 10.0,
            amplitude: 1.0,
            state_ceiling: DEFAULT_STATE_CEILING,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackKind {
    /// Yaw-rate zeroing, seeded by a lateral-velocity offset.
    Case1,
    /// Lateral-acceleration zeroing, seeded by a yaw-rate offset.
    Case2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AttackSection {
    pub enabled: bool,
    pub kind: AttackKind,
    pub delta_vy0: f64,
    pub r0: f64,
    pub t0: f64,
}

impl Default for AttackSection {
    fn default() -> Self {
        AttackSection {
            enabled: false,
            kind: AttackKind::Case1,
            delta_vy0: 5.0,
            r0: 1.0,
            t0: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorSection {
    pub ay_quiet: f64,
    pub ax_alarm: f64,
    pub window: f64,
}

impl Default for DetectorSection {
    fn default() -> Self {
        let cfg = DetectorConfig::default();
        DetectorSection {
            ay_quiet: cfg.ay_quiet_threshold,
            ax_alarm: cfg.ax_alarm_threshold,
            window: cfg.window,
        }
    }
}

impl From<DetectorSection> for DetectorConfig {
    fn from(d: DetectorSection) -> Self {
        DetectorConfig {
            ay_quiet_threshold: d.ay_quiet,
            ax_alarm_threshold: d.ax_alarm,
            window: d.window,
        }
    }
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            path: "<scenario>".into(),
            message: e.to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario sections serialize")
    }

    pub fn params(&self) -> VehicleParams {
        self.vehicle.into()
    }

    pub fn model(&self) -> Result<LateralModel> {
        build_model(self.params(), self.run.vx)
    }

    pub fn detector_config(&self) -> DetectorConfig {
        self.detector.into()
    }

    pub fn steering(&self) -> SteeringProfile {
        match self.run.steering {
            SteeringKind::Zero => SteeringProfile::Zero,
            SteeringKind::DelayedSine => SteeringProfile::DelayedSine {
                t_on: self.run.t_on,
                omega: self.run.omega,
                amplitude: self.run.amplitude,
            },
        }
    }

    /// The configured attack generator, if enabled.
    pub fn attack(&self, model: &LateralModel) -> Result<Option<AttackGenerator>> {
        if !self.attack.enabled {
            return Ok(None);
        }
        let a = &self.attack;
        for (field, value) in [("delta_vy0", a.delta_vy0), ("r0", a.r0), ("t0", a.t0)] {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    field,
                    value,
                    reason: "must be finite",
                });
            }
        }
        if a.t0 < 0.0 {
            return Err(Error::InvalidParameter {
                field: "t0",
                value: a.t0,
                reason: "attack onset cannot precede the run",
            });
        }
        let gen = match a.kind {
            AttackKind::Case1 => AttackGenerator::init_case1(model, a.delta_vy0, a.t0),
            AttackKind::Case2 => AttackGenerator::init_case2(model, a.r0, a.t0)?,
        };
        Ok(Some(gen))
    }

    pub fn to_scenario(&self) -> Result<Scenario> {
        let model = self.model()?;
        let mut scenario = Scenario::new(
            model,
            self.run.case,
            State::new(self.run.vy0, self.run.r0),
            self.run.duration,
            self.run.dt,
        )
        .with_steering(self.steering());
        scenario.attack = self.attack(&model)?;
        scenario.state_ceiling = self.run.state_ceiling;
        scenario.validate()?;
        Ok(scenario)
    }
}

/// Built-in scenarios reproducing the four published simulation figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Yaw-rate attack at 25 m/s from vy = 5 m/s; r stays at zero.
    Fig3,
    /// Attacked (vy = 5) and attack-free (vy = -5) runs under sine steering.
    Fig4,
    /// Lateral-acceleration attack at 5 m/s, stable zero.
    Fig5,
    /// Lateral-acceleration attack with a = 1.521 m, unstable zero.
    Fig6,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Fig3, Preset::Fig4, Preset::Fig5, Preset::Fig6];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
        }
    }

    pub fn scenario_file(self) -> ScenarioFile {
        match self {
            Preset::Fig3 => ScenarioFile {
                attack: AttackSection {
                    enabled: true,
                    kind: AttackKind::Case1,
                    delta_vy0: 5.0,
                    ..AttackSection::default()
                },
                ..ScenarioFile::default()
            },
            Preset::Fig4 => ScenarioFile {
                run: RunSection {
                    steering: SteeringKind::DelayedSine,
                    ..RunSection::default()
                },
                attack: AttackSection {
                    enabled: true,
                    kind: AttackKind::Case1,
                    // attacked vy0 = 5, attack-free vy0 = -5
                    delta_vy0: 10.0,
                    ..AttackSection::default()
                },
                ..ScenarioFile::default()
            },
            Preset::Fig5 => lateral_accel_preset(VehicleParams::SUV, 0.02, 1e-6),
            Preset::Fig6 => lateral_accel_preset(
                VehicleParams {
                    front_axle: 1.521,
                    ..VehicleParams::SUV
                },
                0.2,
                1e-6,
            ),
        }
    }
}

/// Case-2 attack at 5 m/s from r = 1 rad/s, with vy placed on the zero-output
/// manifold.
fn lateral_accel_preset(params: VehicleParams, duration: f64, dt: f64) -> ScenarioFile {
    let r0 = 1.0;
    let model = build_model(params, 5.0).expect("preset vehicle is valid");
    ScenarioFile {
        vehicle: params.into(),
        run: RunSection {
            vx: 5.0,
            case: OutputCase::LateralAccel,
            duration,
            dt,
            vy0: -model.ay_yaw_gain() * r0 / model.a11,
            r0,
            ..RunSection::default()
        },
        attack: AttackSection {
            enabled: true,
            kind: AttackKind::Case2,
            r0,
            ..AttackSection::default()
        },
        detector: DetectorSection::default(),
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::config(format!("unknown preset `{s}` (expected fig3..fig6)")))
    }
}

impl std::fmt::Display for Preset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}
