//! Plot-ready CSV for trajectories: header `t,vy,r,ay,ax,delta,mz_attack`,
//! one row per sample, values in scientific notation with 9 significant
//! digits.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sim::Trajectory;

pub const HEADER: [&str; 7] = ["t", "vy", "r", "ay", "ax", "delta", "mz_attack"];

fn fmt(v: f64) -> String {
    format!("{v:.8e}")
}

pub fn write_trajectory<W: Write>(traj: &Trajectory, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let to_err = |e: csv::Error| Error::config(format!("csv write failed: {e}"));
    w.write_record(HEADER).map_err(to_err)?;
    for i in 0..traj.len() {
        let row = [
            traj.t[i],
            traj.vy[i],
            traj.r[i],
            traj.ay[i],
            traj.ax[i],
            traj.delta[i],
            traj.mz_attack[i],
        ];
        w.write_record(row.iter().map(|&v| fmt(v))).map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::config(format!("csv write failed: {e}")))?;
    Ok(())
}

pub fn save_trajectory(traj: &Trajectory, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut buf = std::io::BufWriter::new(file);
    write_trajectory(traj, &mut buf)?;
    buf.flush().map_err(|e| Error::io(path, e))
}

/// Reads a trajectory CSV. The per-case output vectors are not stored in the
/// file, so `y` comes back empty.
pub fn read_trajectory<R: Read>(input: R) -> Result<Trajectory> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let parse_err = |msg: String| Error::Parse {
        path: "<csv>".into(),
        message: msg,
    };
    let headers = rdr
        .headers()
        .map_err(|e| parse_err(e.to_string()))?
        .clone();
    if headers.iter().ne(HEADER) {
        return Err(parse_err(format!(
            "unexpected header `{}` (expected `{}`)",
            headers.iter().collect::<Vec<_>>().join(","),
            HEADER.join(",")
        )));
    }
    let mut traj = Trajectory::default();
    for (line, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| parse_err(e.to_string()))?;
        let mut values = [0.0; 7];
        for (slot, (name, field)) in values.iter_mut().zip(HEADER.iter().zip(record.iter())) {
            *slot = field.trim().parse().map_err(|_| {
                parse_err(format!("row {}: bad `{name}` value `{field}`", line + 2))
            })?;
        }
        let [t, vy, r, ay, ax, delta, mz] = values;
        if let Some(&prev) = traj.t.last() {
            if t <= prev {
                return Err(parse_err(format!(
                    "row {}: t column must be strictly increasing",
                    line + 2
                )));
            }
        }
        traj.t.push(t);
        traj.vy.push(vy);
        traj.r.push(r);
        traj.ay.push(ay);
        traj.ax.push(ax);
        traj.delta.push(delta);
        traj.mz_attack.push(mz);
    }
    Ok(traj)
}

pub fn load_trajectory(path: impl AsRef<Path>) -> Result<Trajectory> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_trajectory(std::io::BufReader::new(file)).map_err(|e| match e {
        Error::Parse { message, .. } => Error::Parse {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}
