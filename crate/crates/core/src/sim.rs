//! Fixed-step RK4 simulation of the full lateral model with optional attack
//! injection on the yaw-moment channel.

use crate::attack::AttackGenerator;
use crate::error::{Error, Result};
use crate::model::{output_model, LateralModel, OutputCase};

/// Largest `|s0| dt` allowed for attacked lateral-acceleration runs.
pub const STIFFNESS_GUARD: f64 = 0.05;

/// Integration stops once `|x|` exceeds this.
pub const DEFAULT_STATE_CEILING: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State {
    /// Lateral velocity (m/s).
    pub vy: f64,
    /// Yaw rate (rad/s).
    pub r: f64,
}

impl State {
    pub const ZERO: State = State { vy: 0.0, r: 0.0 };

    pub fn new(vy: f64, r: f64) -> Self {
        State { vy, r }
    }

    pub fn norm(&self) -> f64 {
        self.vy.hypot(self.r)
    }

    fn axpy(self, h: f64, d: State) -> State {
        State {
            vy: self.vy + h * d.vy,
            r: self.r + h * d.r,
        }
    }
}

impl From<(f64, f64)> for State {
    fn from((vy, r): (f64, f64)) -> Self {
        State { vy, r }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SteeringProfile {
    Zero,
    /// Zero up to and including `t_on`, then `amplitude * sin(omega t)`.
    DelayedSine { t_on: f64, omega: f64, amplitude: f64 },
    /// `(t, delta)` samples, linearly interpolated and held flat outside.
    Custom(Vec<(f64, f64)>),
}

impl SteeringProfile {
    /// Steering used for the two-trajectory yaw-rate experiment.
    pub const STEP_SINE: SteeringProfile = SteeringProfile::DelayedSine {
        t_on: 0.1,
        omega: 10.0,
        amplitude: 1.0,
    };

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            SteeringProfile::Zero => 0.0,
            SteeringProfile::DelayedSine {
                t_on,
                omega,
                amplitude,
            } => {
                if t <= *t_on {
                    0.0
                } else {
                    amplitude * (omega * t).sin()
                }
            }
            SteeringProfile::Custom(table) => interpolate(table, t),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            SteeringProfile::Zero => Ok(()),
            SteeringProfile::DelayedSine {
                t_on,
                omega,
                amplitude,
            } => {
                for (field, v) in [("t_on", t_on), ("omega", omega), ("amplitude", amplitude)] {
                    if !v.is_finite() {
                        return Err(Error::InvalidParameter {
                            field,
                            value: *v,
                            reason: "must be finite",
                        });
                    }
                }
                Ok(())
            }
            SteeringProfile::Custom(table) => {
                if table.is_empty() {
                    return Err(Error::config("custom steering table is empty"));
                }
                if table.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::config(
                        "custom steering table times must be strictly increasing",
                    ));
                }
                Ok(())
            }
        }
    }
}

fn interpolate(table: &[(f64, f64)], t: f64) -> f64 {
    let Some(&(t_first, d_first)) = table.first() else {
        return 0.0;
    };
    if t <= t_first {
        return d_first;
    }
    let idx = table.partition_point(|&(ti, _)| ti <= t);
    if idx >= table.len() {
        return table[table.len() - 1].1;
    }
    let (t0, d0) = table[idx - 1];
    let (t1, d1) = table[idx];
    d0 + (d1 - d0) * (t - t0) / (t1 - t0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub model: LateralModel,
    pub case: OutputCase,
    pub steering: SteeringProfile,
    pub attack: Option<AttackGenerator>,
    pub x0: State,
    pub duration: f64,
    pub dt: f64,
    pub state_ceiling: f64,
}

impl Scenario {
    pub fn new(model: LateralModel, case: OutputCase, x0: State, duration: f64, dt: f64) -> Self {
        Scenario {
            model,
            case,
            steering: SteeringProfile::Zero,
            attack: None,
            x0,
            duration,
            dt,
            state_ceiling: DEFAULT_STATE_CEILING,
        }
    }

    pub fn with_steering(mut self, steering: SteeringProfile) -> Self {
        self.steering = steering;
        self
    }

    pub fn with_attack(mut self, attack: AttackGenerator) -> Self {
        self.attack = Some(attack);
        self
    }

    /// Number of samples including `t = 0`.
    pub fn sample_count(&self) -> usize {
        // tolerate duration/dt landing a hair under an integer
        (self.duration / self.dt + 1e-9).floor() as usize + 1
    }

    pub fn validate(&self) -> Result<()> {
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(Error::InvalidParameter {
                field: "dt",
                value: self.dt,
                reason: "time step must be strictly positive",
            });
        }
        if !self.duration.is_finite() || self.duration < self.dt {
            return Err(Error::InvalidParameter {
                field: "duration",
                value: self.duration,
                reason: "duration must be at least one time step",
            });
        }
        if !self.x0.vy.is_finite() || !self.x0.r.is_finite() {
            return Err(Error::config("initial state must be finite"));
        }
        if !(self.state_ceiling > 0.0) {
            return Err(Error::InvalidParameter {
                field: "state_ceiling",
                value: self.state_ceiling,
                reason: "must be strictly positive",
            });
        }
        self.steering.validate()?;
        if let Some(attack) = &self.attack {
            if attack.case() == OutputCase::LateralAccel {
                let stiffness = attack.zero().abs() * self.dt;
                if stiffness > STIFFNESS_GUARD {
                    return Err(Error::config(format!(
                        "time step too large for the excited zero s0 = {:.4}: |s0|*dt = {:.4} \
                         exceeds {STIFFNESS_GUARD}; use dt <= {:.3e}",
                        attack.zero(),
                        stiffness,
                        STIFFNESS_GUARD / attack.zero().abs()
                    )));
                }
            }
        }
        Ok(())
    }

    fn yaw_moment(&self, t: f64) -> f64 {
        self.attack.as_ref().map_or(0.0, |a| a.attack_signal(t))
    }
}

/// Uniformly sampled simulation output.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub vy: Vec<f64>,
    pub r: Vec<f64>,
    /// Lateral acceleration, including the steering feedthrough.
    pub ay: Vec<f64>,
    /// Longitudinal acceleration at constant `vx`, `-vy r`.
    pub ax: Vec<f64>,
    pub delta: Vec<f64>,
    pub mz_attack: Vec<f64>,
    /// Measured outputs for the scenario's case.
    pub y: Vec<Vec<f64>>,
    /// Time of the first step whose state norm exceeded the ceiling; that
    /// step is not recorded.
    pub diverged_at: Option<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn diverged(&self) -> bool {
        self.diverged_at.is_some()
    }

    pub fn state(&self, i: usize) -> State {
        State::new(self.vy[i], self.r[i])
    }

    fn push(&mut self, t: f64, x: State, delta: f64, mz: f64, m: Measurement) {
        self.t.push(t);
        self.vy.push(x.vy);
        self.r.push(x.r);
        self.ay.push(m.ay);
        self.ax.push(m.ax);
        self.delta.push(delta);
        self.mz_attack.push(mz);
        self.y.push(m.y);
    }
}

/// `x' = A x + B Mz + E delta`.
pub fn derivative(model: &LateralModel, x: State, mz: f64, delta: f64) -> State {
    State {
        vy: model.a11 * x.vy + model.a12 * x.r + model.e1 * delta,
        r: model.a21 * x.vy + model.a22 * x.r + model.b2 * mz + model.e2 * delta,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub y: Vec<f64>,
    pub ay: f64,
    pub ax: f64,
}

/// Sensor readings at state `x`: the case's output vector plus the lateral
/// and longitudinal acceleration channels.
pub fn measure(model: &LateralModel, case: OutputCase, x: State, delta: f64) -> Measurement {
    let y = output_model(model, case).apply(x.vy, x.r, delta);
    Measurement {
        y,
        ay: model.a11 * x.vy + model.ay_yaw_gain() * x.r + model.e1 * delta,
        ax: -x.vy * x.r,
    }
}

fn rk4_step(scenario: &Scenario, t: f64, x: State, h: f64) -> State {
    let f = |t: f64, x: State| {
        derivative(
            &scenario.model,
            x,
            scenario.yaw_moment(t),
            scenario.steering.eval(t),
        )
    };
    let k1 = f(t, x);
    let k2 = f(t + 0.5 * h, x.axpy(0.5 * h, k1));
    let k3 = f(t + 0.5 * h, x.axpy(0.5 * h, k2));
    let k4 = f(t + h, x.axpy(h, k3));
    State {
        vy: x.vy + h / 6.0 * (k1.vy + 2.0 * k2.vy + 2.0 * k3.vy + k4.vy),
        r: x.r + h / 6.0 * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r),
    }
}

pub fn integrate(scenario: &Scenario) -> Result<Trajectory> {
    scenario.validate()?;
    let n = scenario.sample_count();
    let dt = scenario.dt;
    let mut traj = Trajectory::default();
    let mut x = scenario.x0;

    let record = |traj: &mut Trajectory, t: f64, x: State| {
        let delta = scenario.steering.eval(t);
        let m = measure(&scenario.model, scenario.case, x, delta);
        traj.push(t, x, delta, scenario.yaw_moment(t), m);
    };

    record(&mut traj, 0.0, x);
    for k in 1..n {
        let t_prev = (k - 1) as f64 * dt;
        let t = k as f64 * dt;
        x = rk4_step(scenario, t_prev, x, t - t_prev);
        if !(x.norm() <= scenario.state_ceiling) {
            traj.diverged_at = Some(t);
            break;
        }
        record(&mut traj, t, x);
    }
    Ok(traj)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairRun {
    pub attacked: Trajectory,
    pub free: Trajectory,
    /// Largest Euclidean norm of `y_attacked - y_free` over the common samples.
    pub max_output_gap: f64,
}

/// Runs the attacked scenario next to an attack-free twin started from
/// `x0 - xi(t0)`, under the same steering.
pub fn run_pair(scenario: &Scenario) -> Result<PairRun> {
    let attack = scenario
        .attack
        .as_ref()
        .ok_or_else(|| Error::config("pair run needs an attack (attack.enabled = true)"))?;
    if attack.onset() != 0.0 {
        return Err(Error::config(format!(
            "pair runs start at the attack onset; attack t0 must be 0 (got {})",
            attack.onset()
        )));
    }
    let (dvy, dr) = attack.initial_state();
    let attacked = integrate(scenario)?;

    let mut free_scenario = scenario.clone();
    free_scenario.attack = None;
    free_scenario.x0 = State::new(scenario.x0.vy - dvy, scenario.x0.r - dr);
    let free = integrate(&free_scenario)?;

    let max_output_gap = attacked
        .y
        .iter()
        .zip(&free.y)
        .map(|(a, b)| {
            a.iter()
                .zip(b)
                .map(|(p, q)| (p - q) * (p - q))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max);

    Ok(PairRun {
        attacked,
        free,
        max_output_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{a_stability_margin, build_model, VehicleParams};
    use approx::assert_relative_eq;

    fn suv(vx: f64) -> LateralModel {
        build_model(VehicleParams::SUV, vx).unwrap()
    }

    #[test]
    fn derivative_examples() {
        let model = suv(25.0);
        assert_eq!(derivative(&model, State::ZERO, 0.0, 0.0), State::ZERO);

        let mz = -(model.a21 / model.b2) * 5.0;
        let d = derivative(&model, State::new(5.0, 0.0), mz, 0.0);
        assert!(d.r.abs() <= 1e-15, "{}", d.r);

        let d = derivative(&model, State::new(1.0, 0.0), 0.0, 0.0);
        assert_eq!(d, State::new(model.a11, model.a21));
        assert!((d.vy + 4.9128).abs() < 1e-4);
        assert!((d.r - 0.015635).abs() < 1e-6);
    }

    #[test]
    fn measure_examples() {
        let model = suv(5.0);
        let r = 1.0;
        let vy = -model.ay_yaw_gain() * r / model.a11;
        let m = measure(&model, OutputCase::LateralAccel, State::new(vy, r), 0.0);
        assert!(m.y[0].abs() < 1e-15);
        assert_eq!(m.ax, -vy * r);
        assert!(m.ax.abs() > 1e-3);

        let m = measure(&suv(25.0), OutputCase::YawRate, State::new(3.0, 0.0), 0.4);
        assert_eq!(m.y, vec![0.0]);

        let model = suv(25.0);
        let m = measure(&model, OutputCase::LateralAccel, State::ZERO, 0.1);
        assert_relative_eq!(m.y[0], model.e1 * 0.1);
        assert!((m.y[0] - 6.150).abs() < 1e-3);

        let m = measure(&model, OutputCase::Both, State::new(0.2, 0.3), 0.1);
        assert_eq!(m.y.len(), 2);
        assert_eq!(m.y[0], 0.3);
        assert_eq!(m.y[1], m.ay);
    }

    #[test]
    fn steering_profile() {
        let s = SteeringProfile::STEP_SINE;
        assert_eq!(s.eval(0.0), 0.0);
        assert_eq!(s.eval(0.1), 0.0);
        assert_eq!(s.eval(0.2), (2.0f64).sin());
        assert_eq!(SteeringProfile::Zero.eval(3.0), 0.0);

        let table = SteeringProfile::Custom(vec![(0.0, 0.0), (1.0, 2.0), (2.0, 0.0)]);
        assert_eq!(table.eval(-1.0), 0.0);
        assert_eq!(table.eval(0.5), 1.0);
        assert_eq!(table.eval(1.0), 2.0);
        assert_eq!(table.eval(1.75), 0.5);
        assert_eq!(table.eval(5.0), 0.0);
    }

    #[test]
    fn equilibrium_stays_put() {
        let scenario = Scenario::new(suv(25.0), OutputCase::Both, State::ZERO, 0.5, 1e-3);
        let traj = integrate(&scenario).unwrap();
        assert_eq!(traj.len(), 501);
        assert!(traj.vy.iter().chain(&traj.r).chain(&traj.ay).all(|&v| v == 0.0));
        assert!(!traj.diverged());
    }

    #[test]
    fn sample_grid() {
        let scenario = Scenario::new(suv(25.0), OutputCase::YawRate, State::ZERO, 1.0, 0.04);
        let traj = integrate(&scenario).unwrap();
        assert_eq!(traj.len(), 26);
        assert!(traj.t.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(traj.t[25], 1.0);
        assert_eq!(traj.y.len(), traj.len());
        assert_eq!(traj.mz_attack.len(), traj.len());
    }

    #[test]
    fn invalid_scenarios() {
        let base = Scenario::new(suv(5.0), OutputCase::LateralAccel, State::ZERO, 0.01, 1e-6);
        let mut s = base.clone();
        s.dt = 0.0;
        assert!(matches!(integrate(&s), Err(Error::InvalidParameter { field: "dt", .. })));
        let mut s = base.clone();
        s.duration = 1e-7;
        assert!(matches!(
            integrate(&s),
            Err(Error::InvalidParameter { field: "duration", .. })
        ));

        let gen = AttackGenerator::init_case2(&suv(5.0), 1.0, 0.0).unwrap();
        let mut s = base.with_attack(gen);
        s.dt = 1e-4;
        let err = integrate(&s).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(err.to_string().contains("dt <="), "{err}");
        s.dt = 6e-5;
        assert!(integrate(&s).is_ok());
    }

    #[test]
    fn pair_requires_attack() {
        let s = Scenario::new(suv(25.0), OutputCase::YawRate, State::ZERO, 0.1, 1e-3);
        assert!(matches!(run_pair(&s), Err(Error::Config(_))));
    }

    #[test]
    fn zero_attack_pair_is_identical() {
        let model = suv(25.0);
        let s = Scenario::new(model, OutputCase::YawRate, State::new(1.0, 0.1), 0.2, 1e-3)
            .with_steering(SteeringProfile::STEP_SINE)
            .with_attack(AttackGenerator::init_case1(&model, 0.0, 0.0));
        let pair = run_pair(&s).unwrap();
        assert_eq!(pair.max_output_gap, 0.0);
        assert_eq!(pair.attacked.vy, pair.free.vy);
        assert_eq!(pair.attacked.r, pair.free.r);
    }

    #[test]
    fn case1_attack_hides_lateral_slide() {
        let model = suv(25.0);
        let gen = AttackGenerator::init_case1(&model, 5.0, 0.0);
        let s = Scenario::new(model, OutputCase::YawRate, State::new(5.0, 0.0), 1.0, 1e-4)
            .with_attack(gen);
        let traj = integrate(&s).unwrap();
        let max_r = traj.r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(max_r <= 1e-9, "{max_r}");
        assert!((traj.vy.last().unwrap() - 0.0367).abs() < 1e-4);
    }

    #[test]
    fn superposition_matches_closed_form() {
        let model = suv(25.0);
        let gen = AttackGenerator::init_case1(&model, 10.0, 0.0);
        let s = Scenario::new(model, OutputCase::YawRate, State::new(5.0, 0.0), 1.0, 1e-4)
            .with_steering(SteeringProfile::STEP_SINE)
            .with_attack(gen);
        let pair = run_pair(&s).unwrap();
        for i in 0..pair.attacked.len() {
            let (zv, zr) = gen.zero_dynamics_solution(pair.attacked.t[i]);
            let dv = pair.attacked.vy[i] - pair.free.vy[i];
            let dr = pair.attacked.r[i] - pair.free.r[i];
            assert!((dv - zv).abs() <= 1e-7 * zv.abs().max(1e-2), "i={i} {dv} {zv}");
            assert!((dr - zr).abs() <= 1e-9, "i={i} {dr}");
        }
    }

    #[test]
    fn case2_stable_pair_output_gap() {
        let model = suv(5.0);
        let gen = AttackGenerator::init_case2(&model, 1.0, 0.0).unwrap();
        let s = Scenario::new(model, OutputCase::LateralAccel, State::new(0.5, 0.2), 0.02, 1e-6)
            .with_steering(SteeringProfile::STEP_SINE)
            .with_attack(gen);
        let pair = run_pair(&s).unwrap();
        assert!(pair.max_output_gap <= 1e-6, "{}", pair.max_output_gap);
    }

    #[test]
    fn unstable_case2_hits_ceiling() {
        let model = build_model(
            VehicleParams {
                front_axle: 1.521,
                ..VehicleParams::SUV
            },
            5.0,
        )
        .unwrap();
        let gen = AttackGenerator::init_case2(&model, 1.0, 0.0).unwrap();
        let (vy0, r0) = gen.initial_state();
        let mut s = Scenario::new(model, OutputCase::LateralAccel, State::new(vy0, r0), 1.0, 1e-5)
            .with_attack(gen);
        s.state_ceiling = 1e3;
        let traj = integrate(&s).unwrap();
        let t_div = traj.diverged_at.expect("diverges");
        // |x(t)| = |x0| e^{s0 t} crosses 1e3 near ln(1e3 / |x0|) / s0
        let expect = (1e3 / State::new(vy0, r0).norm()).ln() / gen.zero();
        assert!((t_div - expect).abs() < 2e-5, "{t_div} vs {expect}");
        assert!(traj.len() < s.sample_count());
        assert!(traj.vy.iter().zip(&traj.r).all(|(v, r)| v.hypot(*r) <= 1e3));
    }

    #[test]
    fn unattacked_stable_plant_settles() {
        let model = suv(25.0);
        assert!(a_stability_margin(&model) > 0.0);
        let s = Scenario::new(model, OutputCase::Both, State::new(2.0, -0.5), 2.0, 1e-3);
        let traj = integrate(&s).unwrap();
        let norms: Vec<f64> = (0..traj.len()).map(|i| traj.state(i).norm()).collect();
        let tail = &norms[norms.len() / 2..];
        assert!(tail.windows(2).all(|w| w[1] <= w[0]));
        assert!(norms.last().unwrap() < &(1e-3 * norms[0]));
    }
}
