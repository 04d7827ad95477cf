//! Acceptance suite. Each test prints one `PASS`/`FAIL` line; run with
//! `cargo test --test acceptance -- --nocapture --test-threads=1` to see them.

use std::path::Path;
use std::process::Command;

use lateral_zda::analysis::{invariant_zeros, rank_sweep_check};
use lateral_zda::attack::AttackGenerator;
use lateral_zda::model::{build_model, eigenvalues_a, LateralModel, OutputCase, VehicleParams};
use lateral_zda::scenario::Preset;
use lateral_zda::sim::{integrate, run_pair, Trajectory};
use lateral_zda::summary::{assess, SensorSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(name: &str, ok: bool, detail: String) {
    println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{name}: {detail}");
}

fn suv5() -> LateralModel {
    build_model(VehicleParams::SUV, 5.0).unwrap()
}

fn unstable5() -> LateralModel {
    let params = VehicleParams {
        front_axle: 1.521,
        ..VehicleParams::SUV
    };
    build_model(params, 5.0).unwrap()
}

fn preset_run(p: Preset) -> Trajectory {
    integrate(&p.scenario_file().to_scenario().unwrap()).unwrap()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lateral-zda"))
}

fn exit_code(cmd: &mut Command) -> i32 {
    let out = cmd.output().unwrap();
    out.status.code().unwrap()
}

#[test]
fn stable_lateral_accel_zero() {
    let z = invariant_zeros(&suv5(), OutputCase::LateralAccel).unwrap();
    let s0 = z[0].value.re;
    report(
        "lateral-accel zero, SUV at 5 m/s",
        z.len() == 1 && (s0 + 775.3).abs() <= 0.1 && z[0].stable,
        format!("s0 = {s0:.3} (want -775.3 +/- 0.1)"),
    );
}

#[test]
fn unstable_lateral_accel_zero() {
    let z = invariant_zeros(&unstable5(), OutputCase::LateralAccel).unwrap();
    let s0 = z[0].value.re;
    report(
        "lateral-accel zero, a = 1.521 m",
        z.len() == 1 && (s0 - 114.6).abs() <= 0.1 && !z[0].stable,
        format!("s0 = {s0:.3} (want +114.6 +/- 0.1)"),
    );
}

#[test]
fn plant_poles() {
    let p = eigenvalues_a(&unstable5());
    let ok = (p[0].re + 27.6).abs() <= 0.1
        && (p[1].re + 23.5).abs() <= 0.1
        && p.iter().all(|z| z.im == 0.0);
    report(
        "plant poles, a = 1.521 m",
        ok,
        format!("{:.3}, {:.3} (want -27.6, -23.5 +/- 0.1)", p[0], p[1]),
    );
}

#[test]
fn consistency_constraint() {
    let gen = AttackGenerator::init_case2(&suv5(), 1.0, 0.0).unwrap();
    let (vy, r) = gen.initial_state();
    report(
        "case-2 initial state",
        (vy - 6.4e-3).abs() <= 0.1e-3 && r == 1.0,
        format!("xi_vy = {vy:.4e} (want 6.4e-3 +/- 1e-4)"),
    );
}

#[test]
fn yaw_rate_attack_hidden() {
    let scenario = Preset::Fig3.scenario_file().to_scenario().unwrap();
    let traj = integrate(&scenario).unwrap();
    let a11 = scenario.model.a11;
    let r_max = max_abs(&traj.r);
    let end = traj.len() - 1;
    let vy_err = (traj.vy[end] - 5.0 * (a11 * traj.t[end]).exp()).abs();
    report(
        "fig3 yaw rate stays zero",
        (traj.t[end] - 1.0).abs() < 1e-9 && r_max <= 1e-9 && vy_err <= 1e-4,
        format!("max|r| = {r_max:.2e}, |vy(1) - 5e^a11| = {vy_err:.2e}"),
    );
}

#[test]
fn yaw_rate_attack_undetectable_under_steering() {
    let scenario = Preset::Fig4.scenario_file().to_scenario().unwrap();
    let pair = run_pair(&scenario).unwrap();
    let (att, free) = (&pair.attacked, &pair.free);
    let r_gap = att
        .r
        .iter()
        .zip(&free.r)
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    let gap0 = (att.vy[0] - free.vy[0]).abs();
    // transients: skip the first 10 ms
    let gaps: Vec<f64> = att
        .t
        .iter()
        .zip(att.vy.iter().zip(&free.vy))
        .filter(|(t, _)| **t >= 0.01)
        .map(|(_, (a, b))| (a - b).abs())
        .collect();
    let monotone = gaps.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
    report(
        "fig4 pair run",
        r_gap <= 1e-6 && (gap0 - 10.0).abs() < 1e-12 && monotone && pair.max_output_gap <= 1e-6,
        format!("max r gap = {r_gap:.2e}, vy gap at 0 = {gap0}, monotone = {monotone}"),
    );
}

#[test]
fn stable_lateral_accel_attack() {
    let traj = preset_run(Preset::Fig5);
    let s0 = invariant_zeros(&suv5(), OutputCase::LateralAccel).unwrap()[0].value.re;
    let ay_max = max_abs(&traj.ay);
    let horizon = 10.0 / s0.abs();
    let k = traj.t.iter().position(|&t| t >= horizon).unwrap();
    let bound = (-10.0_f64).exp();
    let vy_ratio = (traj.vy[k] / traj.vy[0]).abs();
    let r_ratio = (traj.r[k] / traj.r[0]).abs();
    report(
        "fig5 stable lateral-accel attack",
        ay_max <= 1e-6 && vy_ratio <= bound && r_ratio <= bound && !traj.diverged(),
        format!("max|ay| = {ay_max:.2e}, decay vy {vy_ratio:.2e}, r {r_ratio:.2e} (want <= {bound:.2e})"),
    );
}

/// Least-squares slope of `ln|x|` against `t`.
fn log_slope(t: &[f64], x: &[f64]) -> f64 {
    let n = t.len() as f64;
    let ly: Vec<f64> = x.iter().map(|v| v.abs().ln()).collect();
    let mt = t.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = t.iter().zip(&ly).map(|(a, b)| (a - mt) * (b - my)).sum();
    let var: f64 = t.iter().map(|a| (a - mt) * (a - mt)).sum();
    cov / var
}

#[test]
fn unstable_lateral_accel_attack() {
    let traj = preset_run(Preset::Fig6);
    let ay_max = max_abs(&traj.ay);
    let vy_rate = log_slope(&traj.t, &traj.vy);
    let r_rate = log_slope(&traj.t, &traj.r);
    let within = |rate: f64| (rate - 114.6).abs() <= 0.01 * 114.6;
    report(
        "fig6 unstable lateral-accel attack",
        traj.diverged() && ay_max <= 1e-6 && within(vy_rate) && within(r_rate),
        format!(
            "diverged at {:?}, max|ay| = {ay_max:.2e}, growth vy {vy_rate:.2}, r {r_rate:.2}",
            traj.diverged_at
        ),
    );
}

#[test]
fn threat_table() {
    let stable = suv5();
    let unstable = unstable5();
    let rows = [
        (assess(&stable, SensorSet::YawRate).unwrap(), (true, false)),
        (assess(&unstable, SensorSet::LateralAccel).unwrap(), (true, true)),
        (assess(&stable, SensorSet::LateralAccel).unwrap(), (true, false)),
        (assess(&unstable, SensorSet::LateralAndLongitudinalAccel).unwrap(), (false, false)),
        (assess(&stable, SensorSet::YawRateAndLateralAccel).unwrap(), (false, false)),
    ];
    let bad: Vec<&str> = rows
        .iter()
        .filter(|(row, want)| (row.threat, row.disruptive) != *want)
        .map(|(row, _)| row.sensors.label())
        .collect();
    let signs_ok = rows[1].0.balance > 0.0 && rows[2].0.balance < 0.0;
    report(
        "threat table",
        bad.is_empty() && signs_ok,
        format!("mismatched rows: {bad:?}"),
    );
}

#[test]
fn both_outputs_full_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE);
    let mut failures = Vec::new();
    for _ in 0..200 {
        let params = VehicleParams {
            mass: rng.random_range(500.0..5000.0),
            yaw_inertia: rng.random_range(300.0..10000.0),
            front_axle: rng.random_range(0.5..2.5),
            rear_axle: rng.random_range(0.5..2.5),
            front_stiffness: rng.random_range(1e4..2e5),
            rear_stiffness: rng.random_range(1e4..2e5),
        };
        let vx = rng.random_range(1.0..60.0);
        let model = build_model(params, vx).unwrap();
        if !rank_sweep_check(&model, OutputCase::Both, 100) {
            failures.push((params, vx));
        }
    }
    report(
        "both outputs full rank, 200 vehicles",
        failures.is_empty(),
        format!("{} failing parameter sets", failures.len()),
    );
}

fn fig3_error(dt: f64) -> f64 {
    let mut scenario = Preset::Fig3.scenario_file().to_scenario().unwrap();
    scenario.dt = dt;
    let traj = integrate(&scenario).unwrap();
    let gen = scenario.attack.unwrap();
    traj.t
        .iter()
        .zip(&traj.vy)
        .map(|(&t, &vy)| (vy - gen.zero_dynamics_solution(t).0).abs())
        .fold(0.0, f64::max)
}

#[test]
fn integrator_order() {
    // largest steps the stiffness guard allows at 25 m/s
    let errs: Vec<f64> = [0.01, 0.005, 0.0025].iter().map(|&dt| fig3_error(dt)).collect();
    let ratios = [errs[0] / errs[1], errs[1] / errs[2]];
    let ok = ratios.iter().all(|q| (q - 16.0).abs() <= 0.25 * 16.0);
    report(
        "fourth-order convergence",
        ok,
        format!("errors {:.3e} {:.3e} {:.3e}, ratios {:.2} {:.2} (want 16 +/- 25%)", errs[0], errs[1], errs[2], ratios[0], ratios[1]),
    );
}

#[test]
fn detector_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let fig5 = dir.path().join("fig5.csv");
    let prefix = dir.path().join("fig4");
    let sim = exit_code(bin().args(["simulate", "--preset", "fig5", "--out"]).arg(&fig5));
    let pair = exit_code(bin().args(["pair", "--preset", "fig4", "--out"]).arg(&prefix));
    let free = dir.path().join("fig4_free.csv");
    let on_attack = exit_code(bin().arg("detect").arg(&fig5));
    let on_free = exit_code(bin().arg("detect").arg(&free));
    report(
        "detector exit codes",
        sim == 0 && pair == 0 && on_attack == 2 && on_free == 0,
        format!("fig5 -> {on_attack} (want 2), fig4 free -> {on_free} (want 0)"),
    );
}

fn sign_flip_cell(out_csv: &Path) -> (f64, f64) {
    let out = bin()
        .args(["sweep", "--preset", "fig5", "--param", "a"])
        .args(["--from", "1.40", "--to", "1.50", "--steps", "101", "--out"])
        .arg(out_csv)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text
        .lines()
        .find(|l| l.contains("changes sign"))
        .expect("no sign change reported");
    let inner = &line[line.find('[').unwrap() + 1..line.find(']').unwrap()];
    let (lo, hi) = inner.split_once(',').unwrap();
    (lo.trim().parse().unwrap(), hi.trim().parse().unwrap())
}

#[test]
fn disruptiveness_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let (lo, hi) = sign_flip_cell(&dir.path().join("sweep.csv"));
    let p = VehicleParams::SUV;
    let root = p.rear_axle * p.rear_stiffness / p.front_stiffness;
    let cell = 0.1 / 100.0;
    report(
        "sign flip of aCf - bCr",
        lo <= root && root <= hi && hi - lo <= cell * (1.0 + 1e-6),
        format!("flip in [{lo}, {hi}], root {root:.5}"),
    );
}
