//! One-parameter sweeps of the invariant zero, the Hurwitz margin and the
//! stiffness balance `a Cf - b Cr`.

use std::io::Write;
use std::str::FromStr;

use crate::analysis::{classify, disruptive_condition};
use crate::error::{Error, Result};
use crate::model::{a_stability_margin, build_model, OutputCase, VehicleParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Mass,
    YawInertia,
    FrontAxle,
    RearAxle,
    FrontStiffness,
    RearStiffness,
    Speed,
}

impl SweepParam {
    pub fn key(self) -> &'static str {
        match self {
            SweepParam::Mass => "m",
            SweepParam::YawInertia => "Iz",
            SweepParam::FrontAxle => "a",
            SweepParam::RearAxle => "b",
            SweepParam::FrontStiffness => "Cf",
            SweepParam::RearStiffness => "Cr",
            SweepParam::Speed => "vx",
        }
    }

    fn apply(self, params: &mut VehicleParams, vx: &mut f64, value: f64) {
        match self {
            SweepParam::Mass => params.mass = value,
            SweepParam::YawInertia => params.yaw_inertia = value,
            SweepParam::FrontAxle => params.front_axle = value,
            SweepParam::RearAxle => params.rear_axle = value,
            SweepParam::FrontStiffness => params.front_stiffness = value,
            SweepParam::RearStiffness => params.rear_stiffness = value,
            SweepParam::Speed => *vx = value,
        }
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use SweepParam::*;
        [Mass, YawInertia, FrontAxle, RearAxle, FrontStiffness, RearStiffness, Speed]
            .into_iter()
            .find(|p| p.key() == s)
            .ok_or_else(|| {
                Error::config(format!(
                    "unknown sweep parameter `{s}` (expected m, Iz, a, b, Cf, Cr or vx)"
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    /// Real invariant zero for the case, `None` if there is none or the
    /// geometry is degenerate.
    pub zero: Option<f64>,
    pub margin: f64,
    /// `a Cf - b Cr`.
    pub balance: f64,
    pub disruptive: bool,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl SweepRange {
    /// Evenly spaced grid including both ends.
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.steps < 2 || !(self.to > self.from) || !self.from.is_finite() || !self.to.is_finite()
        {
            return Err(Error::config(format!(
                "empty sweep range: need from < to and at least 2 steps (got {}..{} in {} steps)",
                self.from, self.to, self.steps
            )));
        }
        let span = self.to - self.from;
        let last = (self.steps - 1) as f64;
        Ok((0..self.steps)
            .map(|k| {
                if k == self.steps - 1 {
                    self.to
                } else {
                    self.from + span * k as f64 / last
                }
            })
            .collect())
    }
}

pub fn sweep(
    base: VehicleParams,
    vx: f64,
    case: OutputCase,
    param: SweepParam,
    range: SweepRange,
) -> Result<Vec<SweepRow>> {
    range
        .values()?
        .into_iter()
        .map(|value| {
            let mut params = base;
            let mut speed = vx;
            param.apply(&mut params, &mut speed, value);
            let model = build_model(params, speed)?;
            let (zero, disruptive, degenerate) = match classify(&model, case) {
                Ok(report) => (
                    report.zeros.first().map(|z| z.value.re),
                    report.disruptive,
                    false,
                ),
                Err(Error::DegenerateGeometry) => (None, false, true),
                Err(e) => return Err(e),
            };
            Ok(SweepRow {
                value,
                zero,
                margin: a_stability_margin(&model),
                balance: disruptive_condition(&params),
                disruptive,
                degenerate,
            })
        })
        .collect()
}

/// Grid cells `[value_k, value_k+1]` where `a Cf - b Cr` changes sign or hits zero.
pub fn balance_sign_changes(rows: &[SweepRow]) -> Vec<(f64, f64)> {
    rows.windows(2)
        .filter(|w| w[0].balance == 0.0 || w[0].balance.signum() != w[1].balance.signum())
        .map(|w| (w[0].value, w[1].value))
        .collect()
}

pub fn write_sweep_csv<W: Write>(param: SweepParam, rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    // first column is named after the swept key
    writeln!(out, "{},zero,margin,balance,disruptive", param.key())?;
    for row in rows {
        let zero = match (row.zero, row.degenerate) {
            (_, true) => "degenerate".to_string(),
            (Some(z), _) => format!("{z:.8e}"),
            (None, _) => String::new(),
        };
        writeln!(
            out,
            "{:.8e},{},{:.8e},{:.8e},{}",
            row.value, zero, row.margin, row.balance, row.disruptive
        )?;
    }
    Ok(())
}
