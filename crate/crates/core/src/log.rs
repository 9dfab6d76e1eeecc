//! Trajectory and summary output.
//!
//! The trajectory CSV is the canonical artifact: one row per step, floats
//! printed to nine significant digits so identical runs produce identical
//! bytes on any platform.

use std::fmt::Write as _;
use std::path::Path;

use crate::control::FlightMode;
use crate::dynamics::{ControlCommand, LongitudinalState};
use crate::error::SimError;
use crate::mission::{MissionStatus, MissionSummary, TrajectoryRecord};
use crate::sensing::{Filtered, Measurement};

pub const TRAJECTORY_HEADER: &str = "k,t,Z,Z_dot,X,X_dot,theta,theta_dot,beta,\
Z_m,Xdot_m,theta_m,Z_f,Xdot_f,theta_f,Z_d,Xdot_d,theta_d,\
T1,T2,delta_e,beta_dot,mode,sat_flags";

/// Format with nine significant digits. Values in [1e-4, 1e15) print in
/// fixed notation, everything else in scientific; zero prints as "0".
pub fn fmt_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let ax = x.abs();
    if (1e-4..1e15).contains(&ax) {
        let exponent = ax.log10().floor() as i32;
        let decimals = (8 - exponent).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.8e}")
    }
}

const DEG: f64 = 180.0 / std::f64::consts::PI;

/// Render the trajectory as CSV text. With `degrees` set, angle and angular
/// rate columns are converted from radians on output.
pub fn trajectory_csv(records: &[TrajectoryRecord], degrees: bool) -> String {
    let ang = if degrees { DEG } else { 1.0 };
    let mut out = String::with_capacity(64 + records.len() * 256);
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for r in records {
        let s = &r.state;
        let cols = [
            fmt_sig9(r.t),
            fmt_sig9(s.z),
            fmt_sig9(s.z_dot),
            fmt_sig9(s.x),
            fmt_sig9(s.x_dot),
            fmt_sig9(s.theta * ang),
            fmt_sig9(s.theta_dot * ang),
            fmt_sig9(s.beta * ang),
            fmt_sig9(r.meas.z_m),
            fmt_sig9(r.meas.x_dot_m),
            fmt_sig9(r.meas.theta_m * ang),
            fmt_sig9(r.filt.z_f),
            fmt_sig9(r.filt.x_dot_f),
            fmt_sig9(r.filt.theta_f * ang),
            fmt_sig9(r.z_d),
            fmt_sig9(r.x_dot_d),
            fmt_sig9(r.theta_d * ang),
            fmt_sig9(r.cmd.t1),
            fmt_sig9(r.cmd.t2),
            fmt_sig9(r.cmd.delta_e * ang),
            fmt_sig9(r.cmd.beta_dot * ang),
        ];
        let _ = write!(out, "{}", r.k);
        for c in cols {
            out.push(',');
            out.push_str(&c);
        }
        let _ = write!(out, ",{},{}", r.mode.label(), r.sat_flags);
        out.push('\n');
    }
    out
}

pub fn write_trajectory_csv(
    path: &Path,
    records: &[TrajectoryRecord],
    degrees: bool,
) -> Result<(), SimError> {
    std::fs::write(path, trajectory_csv(records, degrees))
        .map_err(|e| SimError::io("writing trajectory", path, e))
}

/// Parse a trajectory CSV produced by [`trajectory_csv`] (radians output
/// only). Used to verify the log round-trips.
pub fn parse_trajectory_csv(text: &str) -> Result<Vec<TrajectoryRecord>, SimError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == TRAJECTORY_HEADER => {}
        _ => return Err(SimError::Parse("trajectory header mismatch".into())),
    }
    let mut records = Vec::new();
    for (n, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 24 {
            return Err(SimError::Parse(format!(
                "trajectory line {}: expected 24 fields, found {}",
                n + 2,
                fields.len()
            )));
        }
        let bad = |what: &str| SimError::Parse(format!("trajectory line {}: {what}", n + 2));
        let float = |i: usize, what: &str| -> Result<f64, SimError> {
            fields[i].parse::<f64>().map_err(|_| bad(what))
        };
        records.push(TrajectoryRecord {
            k: fields[0].parse().map_err(|_| bad("bad step index"))?,
            t: float(1, "bad t")?,
            state: LongitudinalState {
                z: float(2, "bad Z")?,
                z_dot: float(3, "bad Z_dot")?,
                x: float(4, "bad X")?,
                x_dot: float(5, "bad X_dot")?,
                theta: float(6, "bad theta")?,
                theta_dot: float(7, "bad theta_dot")?,
                beta: float(8, "bad beta")?,
            },
            meas: Measurement {
                z_m: float(9, "bad Z_m")?,
                x_dot_m: float(10, "bad Xdot_m")?,
                theta_m: float(11, "bad theta_m")?,
            },
            filt: Filtered {
                z_f: float(12, "bad Z_f")?,
                x_dot_f: float(13, "bad Xdot_f")?,
                theta_f: float(14, "bad theta_f")?,
            },
            z_d: float(15, "bad Z_d")?,
            x_dot_d: float(16, "bad Xdot_d")?,
            theta_d: float(17, "bad theta_d")?,
            cmd: ControlCommand {
                t1: float(18, "bad T1")?,
                t2: float(19, "bad T2")?,
                delta_e: float(20, "bad delta_e")?,
                beta_dot: float(21, "bad beta_dot")?,
            },
            mode: FlightMode::from_label(fields[22]).ok_or_else(|| bad("bad mode label"))?,
            sat_flags: fields[23].parse().map_err(|_| bad("bad sat_flags"))?,
        });
    }
    Ok(records)
}

/// Render the mission summary as human-readable text.
pub fn summary_text(summary: &MissionSummary) -> String {
    let mut out = String::new();
    match &summary.status {
        MissionStatus::Completed => out.push_str("status: completed\n"),
        MissionStatus::Failed { step, reason, .. } => {
            let _ = writeln!(out, "status: failed at step {step}: {reason}");
        }
    }

    out.push_str("\nmode switches:\n");
    if summary.switches.is_empty() {
        out.push_str("  (none)\n");
    }
    for (t, from, to) in &summary.switches {
        let _ = writeln!(
            out,
            "  t={} {} -> {}",
            fmt_sig9(*t),
            from.label(),
            to.label()
        );
    }

    out.push_str("\nmode windows:\n");
    for w in &summary.windows {
        let settle = match w.settle_t {
            Some(t) => format!("settled at t={}", fmt_sig9(t)),
            None => "never settled".to_string(),
        };
        let _ = writeln!(
            out,
            "  {} [{} .. {}] max |Z - Z_d| = {} m, {}",
            w.mode.label(),
            fmt_sig9(w.t_start),
            fmt_sig9(w.t_end),
            fmt_sig9(w.max_z_dev),
            settle
        );
    }

    out.push_str("\nthrust usage:\n");
    for s in &summary.thrust {
        let _ = writeln!(
            out,
            "  {}: mean total {} N, peak {} N over {} s",
            s.mode.label(),
            fmt_sig9(s.mean_total),
            fmt_sig9(s.peak_total),
            fmt_sig9(s.time)
        );
    }

    out.push_str("\ntouchdown: ");
    match summary.touchdown {
        Some(td) => {
            let _ = writeln!(
                out,
                "t={} with sink rate {} m/s",
                fmt_sig9(td.t),
                fmt_sig9(td.sink_rate)
            );
        }
        None => out.push_str("none\n"),
    }
    out
}

pub fn write_summary(path: &Path, summary: &MissionSummary) -> Result<(), SimError> {
    std::fs::write(path, summary_text(summary))
        .map_err(|e| SimError::io("writing summary", path, e))
}
