//! Command-line front end. Exit codes: 0 clean, 1 configuration or I/O
//! error, 2 attack detected.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::{classify, disruptive_condition};
use crate::detect::{detect, DetectorConfig};
use crate::error::{Error, Result};
use crate::model::{a_stability_margin, eigenvalues_a};
use crate::scenario::{Preset, ScenarioFile};
use crate::sim::{integrate, run_pair};
use crate::summary::{threat_summary, SensorSet};
use crate::sweep::{balance_sign_changes, sweep, write_sweep_csv, SweepParam, SweepRange};
use crate::trajectory_csv::{load_trajectory, save_trajectory};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_ATTACK: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "lateral-zda",
    version,
    about = "Zero-dynamics attack analysis for vehicle lateral dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Invariant zeros, observability class and threat summary.
    Analyze(Source),
    /// Simulate the scenario (attacked run if an attack is enabled) to CSV.
    Simulate {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: PathBuf,
    },
    /// Attacked and attack-free runs side by side; writes PREFIX_attacked.csv
    /// and PREFIX_free.csv.
    Pair {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the longitudinal-acceleration detector over a trajectory CSV.
    Detect {
        csv: PathBuf,
        /// Take detector settings from this scenario's [detector] section.
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[command(flatten)]
        flags: DetectorFlags,
    },
    /// Sweep one vehicle parameter (or vx) and tabulate zero, margin and balance.
    Sweep {
        #[command(flatten)]
        source: Source,
        /// m, Iz, a, b, Cf, Cr or vx
        #[arg(long)]
        param: String,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long, default_value_t = 101)]
        steps: usize,
        /// Output CSV; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct Source {
    #[arg(long, conflicts_with = "preset")]
    scenario: Option<PathBuf>,
    /// fig3, fig4, fig5 or fig6
    #[arg(long)]
    preset: Option<String>,
}

impl Source {
    fn load(&self) -> Result<ScenarioFile> {
        match (&self.scenario, &self.preset) {
            (Some(path), _) => ScenarioFile::load(path),
            (None, Some(name)) => Ok(name.parse::<Preset>()?.scenario_file()),
            (None, None) => Ok(ScenarioFile::default()),
        }
    }
}

#[derive(Debug, Args)]
struct DetectorFlags {
    #[arg(long)]
    ay_quiet: Option<f64>,
    #[arg(long)]
    ax_alarm: Option<f64>,
    #[arg(long)]
    window: Option<f64>,
}

/// Parses `args` (including the program name) and runs the command. Returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_CONFIG;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_CONFIG
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Analyze(source) => cmd_analyze(&source.load()?, out),
        Command::Simulate { source, out: path } => cmd_simulate(&source.load()?, &path, out),
        Command::Pair { source, out: prefix } => cmd_pair(&source.load()?, &prefix, out),
        Command::Detect {
            csv,
            scenario,
            flags,
        } => {
            let mut cfg = match scenario {
                Some(path) => ScenarioFile::load(path)?.detector_config(),
                None => DetectorConfig::default(),
            };
            if let Some(v) = flags.ay_quiet {
                cfg.ay_quiet_threshold = v;
            }
            if let Some(v) = flags.ax_alarm {
                cfg.ax_alarm_threshold = v;
            }
            if let Some(v) = flags.window {
                cfg.window = v;
            }
            cmd_detect(&csv, &cfg, out)
        }
        Command::Sweep {
            source,
            param,
            from,
            to,
            steps,
            out: path,
        } => {
            let param: SweepParam = param.parse()?;
            cmd_sweep(
                &source.load()?,
                param,
                SweepRange { from, to, steps },
                path.as_deref(),
                out,
            )
        }
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

pub fn cmd_analyze(file: &ScenarioFile, out: &mut dyn Write) -> Result<i32> {
    let model = file.model()?;
    let params = model.params;
    let case = file.run.case;
    let report = classify(&model, case)?;
    let balance = disruptive_condition(&params);
    let margin = a_stability_margin(&model);
    let poles = eigenvalues_a(&model);

    let mut w = |s: String| writeln!(out, "{s}").map_err(io_err);
    w(format!(
        "vehicle: m={} kg, Iz={} kg m^2, a={} m, b={} m, Cf={} N/rad, Cr={} N/rad",
        params.mass,
        params.yaw_inertia,
        params.front_axle,
        params.rear_axle,
        params.front_stiffness,
        params.rear_stiffness
    ))?;
    w(format!("speed: vx = {} m/s, output: {case}", model.vx))?;
    w(format!(
        "model: a11={:.6} a12={:.6} a21={:.6} a22={:.6} b2={:.6e} e1={:.6} e2={:.6}",
        model.a11, model.a12, model.a21, model.a22, model.b2, model.e1, model.e2
    ))?;
    w(format!(
        "plant poles: {:.4}{:+.4}i, {:.4}{:+.4}i",
        poles[0].re, poles[0].im, poles[1].re, poles[1].im
    ))?;
    w(format!(
        "Hurwitz margin (a+b)^2 - m(aCf-bCr)vx^2/(CfCr): {margin:.4} m^2 ({})",
        if margin > 0.0 { "positive, A is Hurwitz" } else { "NOT positive" }
    ))?;
    w(format!(
        "stiffness balance aCf - bCr: {balance:.1} N m/rad ({})",
        if balance < 0.0 {
            "negative, lateral-acceleration zero is stable"
        } else {
            "NOT negative, lateral-acceleration zero is unstable"
        }
    ))?;
    if report.zeros.is_empty() {
        w("invariant zeros: none, no invariant zeros - strongly observable".to_string())?;
    } else {
        for z in &report.zeros {
            w(format!(
                "invariant zero: s0 = {:.1} 1/s ({})",
                z.value.re,
                if z.stable { "stable" } else { "unstable" }
            ))?;
        }
    }
    w(format!("classification: {}", report.classification.describe()))?;
    let verdict = match (report.attack_exists, report.disruptive) {
        (false, _) => "no zero-dynamics attack possible",
        (true, false) => "undetectable attack exists, non-disruptive",
        (true, true) => "undetectable attack exists, DISRUPTIVE",
    };
    w(format!("zero-dynamics attack: {verdict}"))?;

    w(String::new())?;
    w(format!("threat summary at vx = {} m/s", model.vx))?;
    w(format!("  {:<10} {:<8} {}", "sensors", "threat", "disruptive"))?;
    for (set, row) in SensorSet::ALL.iter().zip(threat_summary(&model)) {
        let line = match row {
            Ok(row) => format!(
                "  {:<10} {:<8} {}",
                set.label(),
                yes_no(row.threat),
                yes_no(row.disruptive)
            ),
            Err(e) => format!("  {:<10} {e}", set.label()),
        };
        w(line)?;
    }
    Ok(EXIT_OK)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn cmd_simulate(file: &ScenarioFile, path: &Path, out: &mut dyn Write) -> Result<i32> {
    let scenario = file.to_scenario()?;
    let traj = integrate(&scenario)?;
    save_trajectory(&traj, path)?;
    writeln!(out, "wrote {} samples to {}", traj.len(), path.display()).map_err(io_err)?;
    if let Some(t) = traj.diverged_at {
        writeln!(
            out,
            "diverged at t = {t:.6} s: state norm exceeded {:e}, run stopped",
            scenario.state_ceiling
        )
        .map_err(io_err)?;
    }
    Ok(EXIT_OK)
}

/// `PREFIX_attacked.csv` and `PREFIX_free.csv`.
pub fn pair_paths(prefix: &Path) -> (PathBuf, PathBuf) {
    let with = |suffix: &str| {
        let mut name = prefix.as_os_str().to_owned();
        name.push(suffix);
        PathBuf::from(name)
    };
    (with("_attacked.csv"), with("_free.csv"))
}

pub fn cmd_pair(file: &ScenarioFile, prefix: &Path, out: &mut dyn Write) -> Result<i32> {
    let scenario = file.to_scenario()?;
    let pair = run_pair(&scenario)?;
    let (attacked_path, free_path) = pair_paths(prefix);
    save_trajectory(&pair.attacked, &attacked_path)?;
    save_trajectory(&pair.free, &free_path)?;
    writeln!(out, "attacked: {}", attacked_path.display()).map_err(io_err)?;
    writeln!(out, "free: {}", free_path.display()).map_err(io_err)?;
    writeln!(out, "max_output_gap = {:.3e}", pair.max_output_gap).map_err(io_err)?;
    Ok(EXIT_OK)
}

pub fn cmd_detect(csv: &Path, cfg: &DetectorConfig, out: &mut dyn Write) -> Result<i32> {
    let traj = load_trajectory(csv)?;
    let verdict = detect(&traj, cfg)?;
    let alarm = verdict
        .first_alarm_time
        .map_or_else(|| "none".to_string(), |t| format!("{t:.6} s"));
    writeln!(
        out,
        "attacked={} first_alarm_time={alarm} peak_ax={:.3e}",
        verdict.attacked, verdict.peak_ax
    )
    .map_err(io_err)?;
    Ok(if verdict.attacked { EXIT_ATTACK } else { EXIT_OK })
}

pub fn cmd_sweep(
    file: &ScenarioFile,
    param: SweepParam,
    range: SweepRange,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32> {
    let rows = sweep(file.params(), file.run.vx, file.run.case, param, range)?;
    match path {
        Some(path) => {
            let mut buf = Vec::new();
            write_sweep_csv(param, &rows, &mut buf).map_err(io_err)?;
            std::fs::write(path, buf).map_err(|e| Error::io(path, e))?;
            writeln!(out, "wrote {} rows to {}", rows.len(), path.display()).map_err(io_err)?;
            for (lo, hi) in balance_sign_changes(&rows) {
                writeln!(
                    out,
                    "aCf - bCr changes sign for {} in [{lo:.6}, {hi:.6}]",
                    param.key()
                )
                .map_err(io_err)?;
            }
        }
        None => write_sweep_csv(param, &rows, out).map_err(io_err)?,
    }
    Ok(EXIT_OK)
}
