//! Invariant zeros of the yaw-moment channel and what they imply.
//!
//! The attacker only touches `Mz`, so everything here works on the reduced
//! system `x' = A x + B Mz`, `y = C x`. Zeros come from closed forms; the
//! Rosenbrock matrix and its numerical rank are kept for cross-checking.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{output_model, LateralModel, OutputCase, VehicleParams};

/// Singular values below this fraction of the largest one count as zero.
pub const RANK_RELATIVE_TOL: f64 = 1e-9;

const SWEEP_SEED: u64 = 0x5eed0f2e70;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantZero {
    pub value: Complex64,
    pub stable: bool,
}

impl InvariantZero {
    pub fn new(value: Complex64) -> Self {
        InvariantZero {
            value,
            stable: value.re < 0.0,
        }
    }

    pub fn real(value: f64) -> Self {
        Self::new(Complex64::new(value, 0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservabilityClass {
    /// No invariant zeros: the state is recoverable despite the unknown input.
    StronglyObservable,
    /// Zeros exist and are all stable.
    StronglyDetectableOnly,
    /// At least one unstable zero.
    NotStronglyDetectable,
}

impl ObservabilityClass {
    pub fn from_zeros(zeros: &[InvariantZero]) -> Self {
        if zeros.is_empty() {
            ObservabilityClass::StronglyObservable
        } else if zeros.iter().all(|z| z.stable) {
            ObservabilityClass::StronglyDetectableOnly
        } else {
            ObservabilityClass::NotStronglyDetectable
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            ObservabilityClass::StronglyObservable => "strongly observable",
            ObservabilityClass::StronglyDetectableOnly => {
                "strongly detectable (not strongly observable)"
            }
            ObservabilityClass::NotStronglyDetectable => "NOT strongly detectable",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantZeroReport {
    pub case: OutputCase,
    pub zeros: Vec<InvariantZero>,
    pub classification: ObservabilityClass,
    /// An undetectable zero-dynamics attack exists.
    pub attack_exists: bool,
    /// That attack drives the state unbounded.
    pub disruptive: bool,
}

/// `P(s) = [sI - A, -B; C, 0]` for the yaw-moment channel. 3x3 for single
/// outputs, 4x3 when both channels are measured.
pub fn rosenbrock(model: &LateralModel, case: OutputCase, s: Complex64) -> DMatrix<Complex64> {
    let re = |v: f64| Complex64::new(v, 0.0);
    let outputs = output_model(model, case);
    let mut p = DMatrix::<Complex64>::zeros(2 + outputs.rows.len(), 3);
    p[(0, 0)] = s - model.a11;
    p[(0, 1)] = re(-model.a12);
    p[(1, 0)] = re(-model.a21);
    p[(1, 1)] = s - model.a22;
    p[(1, 2)] = re(-model.b2);
    for (i, row) in outputs.rows.iter().enumerate() {
        p[(2 + i, 0)] = re(row.c[0]);
        p[(2 + i, 1)] = re(row.c[1]);
    }
    p
}

/// Numerical rank of `P(s)` from its singular values.
pub fn rosenbrock_rank(model: &LateralModel, case: OutputCase, s: Complex64) -> usize {
    numerical_rank(rosenbrock(model, case, s))
}

/// Rank after scaling every nonzero column to unit norm. The input column is
/// `O(1/Iz)` while the dynamics columns grow with `|s|`; without equilibration
/// the relative threshold misreads that spread as rank loss.
fn numerical_rank(mut p: DMatrix<Complex64>) -> usize {
    for mut col in p.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col.unscale_mut(norm);
        }
    }
    let sv = p.singular_values();
    let largest = sv.max();
    if largest == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&v| v > RANK_RELATIVE_TOL * largest).count()
}

/// `a Cf - b Cr` (N m/rad). Negative means the lateral-acceleration zero is
/// stable and the attack on that channel is not disruptive.
pub fn disruptive_condition(params: &VehicleParams) -> f64 {
    params.stiffness_moment_balance()
}

/// Closed-form invariant zeros.
///
/// * yaw rate: `a11`
/// * lateral acceleration: `(Cf + Cr) vx / (a Cf - b Cr)`
/// * both: none
pub fn invariant_zeros(model: &LateralModel, case: OutputCase) -> Result<Vec<InvariantZero>> {
    match case {
        OutputCase::YawRate => Ok(vec![InvariantZero::real(model.a11)]),
        OutputCase::LateralAccel => {
            Ok(vec![InvariantZero::real(lateral_accel_zero(model)?)])
        }
        OutputCase::Both => Ok(Vec::new()),
    }
}

pub(crate) fn lateral_accel_zero(model: &LateralModel) -> Result<f64> {
    let p = model.params();
    let balance = disruptive_condition(p);
    if balance == 0.0 || model.ay_yaw_gain() == 0.0 {
        return Err(Error::DegenerateGeometry);
    }
    Ok((p.front_stiffness + p.rear_stiffness) * model.vx / balance)
}

pub fn classify(model: &LateralModel, case: OutputCase) -> Result<InvariantZeroReport> {
    let zeros = invariant_zeros(model, case)?;
    Ok(report_from_zeros(case, zeros))
}

fn report_from_zeros(case: OutputCase, zeros: Vec<InvariantZero>) -> InvariantZeroReport {
    let classification = ObservabilityClass::from_zeros(&zeros);
    InvariantZeroReport {
        case,
        attack_exists: !zeros.is_empty(),
        disruptive: zeros.iter().any(|z| !z.stable),
        zeros,
        classification,
    }
}

/// Confirms the closed-form zeros numerically: `P(s)` must be full column rank
/// at `samples` pseudo-random points away from the zeros, and rank deficient
/// at each closed-form zero.
pub fn rank_sweep_check(model: &LateralModel, case: OutputCase, samples: usize) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(SWEEP_SEED);
    rank_sweep_check_with(model, case, samples, &mut rng)
}

pub fn rank_sweep_check_with<R: Rng + ?Sized>(
    model: &LateralModel,
    case: OutputCase,
    samples: usize,
    rng: &mut R,
) -> bool {
    if samples == 0 {
        return false;
    }
    let zeros = match invariant_zeros(model, case) {
        Ok(z) => z,
        Err(_) => return false,
    };
    let scale = zeros
        .iter()
        .map(|z| z.value.norm())
        .fold(model.a11.abs().max(model.a22.abs()), f64::max)
        * 2.0;

    for z in &zeros {
        if rosenbrock_rank(model, case, z.value) >= 3 {
            return false;
        }
    }

    let mut checked = 0;
    while checked < samples {
        let s = Complex64::new(
            rng.random_range(-scale..scale),
            rng.random_range(-scale..scale),
        );
        let near_zero = zeros
            .iter()
            .any(|z| (s - z.value).norm() <= 1e-6 * (1.0 + z.value.norm()));
        if near_zero {
            continue;
        }
        if rosenbrock_rank(model, case, s) != 3 {
            return false;
        }
        checked += 1;
    }
    true
}
