//! Mission plans, the closed-loop simulation driver, and summary statistics.
//!
//! A plan is an ordered list of segments. Each segment supplies the mode
//! directive and setpoints; the next segment arms and takes over when its
//! entry condition fires (a time, a filtered-speed threshold, or reaching a
//! flight mode). Setpoints optionally ramp toward their targets at a fixed
//! rate instead of stepping.

use crate::aero::free_wing_local_flow;
use crate::control::laws::{LawInputs, LawSet};
use crate::control::{mode_switch, saturate, AxisPids, FlightMode, GainSet, PlanDirective, SwitchThresholds};
use crate::dynamics::{
    accelerations, advance, apply_ground_contact, check_envelope, earth_frame_forces,
    total_body_forces, ControlCommand, LongitudinalState,
};
use crate::error::SimError;
use crate::params::AircraftParams;
use crate::rng::NoiseRng;
use crate::sensing::{measure, FilterBank, Filtered, Measurement, NoiseModel};

/// When the next segment becomes active.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentEntry {
    /// Active from mission start; only valid for the first segment.
    Start,
    /// Fires once mission time reaches this value (s).
    AtTime(f64),
    /// Fires once filtered horizontal speed drops below this value (m/s).
    XdotBelow(f64),
    /// Fires once filtered horizontal speed exceeds this value (m/s).
    XdotAbove(f64),
    /// Fires once the mode machine reaches this mode.
    OnMode(FlightMode),
}

impl SegmentEntry {
    fn fires(&self, t: f64, x_dot_f: f64, mode: FlightMode) -> bool {
        match *self {
            SegmentEntry::Start => false,
            SegmentEntry::AtTime(t0) => t >= t0 - 1e-9,
            SegmentEntry::XdotBelow(v) => x_dot_f < v,
            SegmentEntry::XdotAbove(v) => x_dot_f > v,
            SegmentEntry::OnMode(m) => mode == m,
        }
    }
}

/// One leg of the mission plan.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub directive: PlanDirective,
    /// Altitude target (m).
    pub z_d: f64,
    /// Horizontal speed target (m/s).
    pub x_dot_d: f64,
    /// Pitch setpoint handed to transition laws (rad).
    pub theta_d: f64,
    /// Optional altitude-target slew rate (m/s); absent means step change.
    pub z_ramp: Option<f64>,
    /// Optional speed-target slew rate (m/s^2); absent means step change.
    pub x_dot_ramp: Option<f64>,
    pub entry: SegmentEntry,
}

/// Ordered mission segments.
#[derive(Debug, Clone, PartialEq)]
pub struct MissionPlan {
    pub segments: Vec<Segment>,
}

impl MissionPlan {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.segments.is_empty() {
            return Err(SimError::Validation(
                "mission.segments must not be empty".into(),
            ));
        }
        for (i, seg) in self.segments.iter().enumerate() {
            if i == 0 && seg.entry != SegmentEntry::Start {
                return Err(SimError::Validation(
                    "mission.segments[0] must not carry an entry condition".into(),
                ));
            }
            if i > 0 && seg.entry == SegmentEntry::Start {
                return Err(SimError::Validation(format!(
                    "mission.segments[{i}] needs exactly one entry condition"
                )));
            }
            if !seg.z_d.is_finite() || seg.z_d < 0.0 {
                return Err(SimError::Validation(format!(
                    "mission.segments[{i}].z_d must be finite and >= 0"
                )));
            }
            if !seg.x_dot_d.is_finite() || !seg.theta_d.is_finite() {
                return Err(SimError::Validation(format!(
                    "mission.segments[{i}] setpoints must be finite"
                )));
            }
            if seg.theta_d.abs() >= std::f64::consts::FRAC_PI_2 {
                return Err(SimError::Validation(format!(
                    "mission.segments[{i}].theta_d must lie inside (-pi/2, pi/2)"
                )));
            }
            for (name, ramp) in [("z_ramp", seg.z_ramp), ("x_dot_ramp", seg.x_dot_ramp)] {
                if let Some(r) = ramp {
                    if !r.is_finite() || r <= 0.0 {
                        return Err(SimError::Validation(format!(
                            "mission.segments[{i}].{name} must be finite and > 0"
                        )));
                    }
                }
            }
            match seg.entry {
                SegmentEntry::AtTime(t0) if !t0.is_finite() || t0 < 0.0 => {
                    return Err(SimError::Validation(format!(
                        "mission.segments[{i}].at_t must be finite and >= 0"
                    )));
                }
                SegmentEntry::XdotBelow(v) | SegmentEntry::XdotAbove(v)
                    if !v.is_finite() || v < 0.0 =>
                {
                    return Err(SimError::Validation(format!(
                        "mission.segments[{i}] speed trigger must be finite and >= 0"
                    )));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// The stock mission: climb to altitude, convert to forward flight, cruise,
/// decelerate, convert back (stepping the pitch setpoint up as speed bleeds
/// off so the wing keeps carrying the weight), then land.
///
/// The climb runs in two legs. The altitude loop damps measured climb rate,
/// so it trails a setpoint ramp by kd/kp times the rate; the fast leg does
/// the travel and the slow leg parks that lag inside the hold band before
/// the setpoint stops moving. Descent at 1.0 m/s keeps thrust demand
/// positive all the way down.
pub fn default_plan() -> MissionPlan {
    use PlanDirective::*;
    let seg = |directive, z_d, x_dot_d, theta_d, z_ramp, x_dot_ramp, entry| Segment {
        directive,
        z_d,
        x_dot_d,
        theta_d,
        z_ramp,
        x_dot_ramp,
        entry,
    };
    MissionPlan {
        segments: vec![
            seg(Hold, 44.0, 0.0, 0.0, Some(2.5), None, SegmentEntry::Start),
            seg(
                Hold,
                50.0,
                0.0,
                0.0,
                Some(0.5),
                None,
                SegmentEntry::AtTime(17.6),
            ),
            seg(
                ConvertForward,
                50.0,
                57.0,
                0.0,
                None,
                None,
                SegmentEntry::AtTime(45.0),
            ),
            // A token deceleration leg hands over near cruise speed: the
            // unpowered deceleration during the tilt swing is faster than
            // the swing itself, so the wing must enter the swing with full
            // dynamic pressure in hand or lift collapses before the rotors
            // are back.
            seg(
                Hold,
                50.0,
                56.0,
                0.0,
                None,
                Some(1.5),
                SegmentEntry::AtTime(130.0),
            ),
            // Reverse-conversion pitch schedule: each rung holds the angle
            // of attack that balances weight on the wing at the trigger
            // speed (alpha = m g / (q S_w C_La)), led by about one rung of
            // pitch-tracking lag so the tracked average sits on balance
            // while the rotors swing back and the thrust channel idles. The
            // last rung pitches past balance to brake toward the hover
            // capture speed on the tilted thrust vector.
            seg(
                ConvertReverse,
                50.0,
                0.0,
                0.047,
                None,
                None,
                SegmentEntry::XdotBelow(56.0),
            ),
            seg(
                ConvertReverse,
                50.0,
                0.0,
                0.057,
                None,
                None,
                SegmentEntry::XdotBelow(50.0),
            ),
            seg(
                ConvertReverse,
                50.0,
                0.0,
                0.067,
                None,
                None,
                SegmentEntry::XdotBelow(45.0),
            ),
            seg(
                ConvertReverse,
                50.0,
                0.0,
                0.080,
                None,
                None,
                SegmentEntry::XdotBelow(41.0),
            ),
            seg(
                ConvertReverse,
                50.0,
                0.0,
                0.103,
                None,
                None,
                SegmentEntry::XdotBelow(35.0),
            ),
            seg(
                ConvertReverse,
                50.0,
                0.0,
                0.135,
                None,
                None,
                SegmentEntry::XdotBelow(30.0),
            ),
            seg(
                ConvertReverse,
                50.0,
                0.0,
                0.175,
                None,
                None,
                SegmentEntry::XdotBelow(26.0),
            ),
            seg(
                ConvertReverse,
                50.0,
                0.0,
                0.235,
                None,
                None,
                SegmentEntry::XdotBelow(22.0),
            ),
            seg(
                ConvertReverse,
                50.0,
                0.0,
                0.300,
                None,
                None,
                SegmentEntry::XdotBelow(14.0),
            ),
            seg(
                Hold,
                0.0,
                0.0,
                0.0,
                Some(1.0),
                None,
                SegmentEntry::OnMode(FlightMode::Hover),
            ),
        ],
    }
}

/// Climb to `z_d` and hold position. Same two-leg shape as the default
/// mission: the fast leg stops 6 m short so the slow leg can shed the ramp
/// lag before the setpoint stops moving.
pub fn hover_plan(z_d: f64) -> MissionPlan {
    let hold = |z_d, z_ramp, entry| Segment {
        directive: PlanDirective::Hold,
        z_d,
        x_dot_d: 0.0,
        theta_d: 0.0,
        z_ramp: Some(z_ramp),
        x_dot_ramp: None,
        entry,
    };
    let split = (z_d - 6.0).max(0.0);
    if split > 0.0 {
        MissionPlan {
            segments: vec![
                hold(split, 2.5, SegmentEntry::Start),
                hold(z_d, 0.5, SegmentEntry::AtTime(split / 2.5)),
            ],
        }
    } else {
        MissionPlan {
            segments: vec![hold(z_d, 0.5, SegmentEntry::Start)],
        }
    }
}

/// Walks the plan during a run: advances segments as entry conditions fire
/// and slews the effective setpoints toward segment targets.
struct PlanCursor {
    idx: usize,
    z_d: f64,
    x_dot_d: f64,
}

impl PlanCursor {
    fn new() -> PlanCursor {
        PlanCursor {
            idx: 0,
            z_d: 0.0,
            x_dot_d: 0.0,
        }
    }

    fn update(
        &mut self,
        plan: &MissionPlan,
        t: f64,
        x_dot_f: f64,
        mode: FlightMode,
        dt: f64,
    ) -> (f64, f64, f64, PlanDirective) {
        while self.idx + 1 < plan.segments.len()
            && plan.segments[self.idx + 1].entry.fires(t, x_dot_f, mode)
        {
            self.idx += 1;
        }
        let seg = &plan.segments[self.idx];
        self.z_d = slew(self.z_d, seg.z_d, seg.z_ramp, dt);
        self.x_dot_d = slew(self.x_dot_d, seg.x_dot_d, seg.x_dot_ramp, dt);
        (self.z_d, self.x_dot_d, seg.theta_d, seg.directive)
    }
}

fn slew(current: f64, target: f64, rate: Option<f64>, dt: f64) -> f64 {
    match rate {
        None => target,
        Some(r) => {
            let step = r * dt;
            current + (target - current).clamp(-step, step)
        }
    }
}

/// One logged simulation step: truth before stepping, what the sensors and
/// filters reported, the active setpoints, and the saturated command.
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryRecord {
    pub k: usize,
    pub t: f64,
    pub state: LongitudinalState,
    pub meas: Measurement,
    pub filt: Filtered,
    pub z_d: f64,
    pub x_dot_d: f64,
    pub theta_d: f64,
    pub cmd: ControlCommand,
    pub mode: FlightMode,
    pub sat_flags: u8,
}

/// Terminal status of a mission run.
#[derive(Debug, Clone, PartialEq)]
pub enum MissionStatus {
    Completed,
    Failed {
        step: usize,
        reason: String,
        exit_code: i32,
    },
}

impl MissionStatus {
    pub fn is_completed(&self) -> bool {
        matches!(self, MissionStatus::Completed)
    }
}

/// One contiguous stretch of a single flight mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeWindow {
    pub mode: FlightMode,
    pub t_start: f64,
    pub t_end: f64,
    /// Largest altitude tracking error within the window (m).
    pub max_z_dev: f64,
    /// First time after which |Z - Z_d| stays within 0.5 m for the rest of
    /// the window, if it ever does.
    pub settle_t: Option<f64>,
}

/// Thrust usage aggregated over all windows of one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ThrustStats {
    pub mode: FlightMode,
    /// Total time spent in the mode (s).
    pub time: f64,
    /// Mean of t1 + t2 over the mode's samples (N).
    pub mean_total: f64,
    /// Peak of t1 + t2 (N).
    pub peak_total: f64,
}

/// Touchdown event detected after the reverse conversion captured hover.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Touchdown {
    pub t: f64,
    pub sink_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissionSummary {
    pub status: MissionStatus,
    /// (timestamp, from, to) for every mode change, in order.
    pub switches: Vec<(f64, FlightMode, FlightMode)>,
    pub windows: Vec<ModeWindow>,
    pub thrust: Vec<ThrustStats>,
    pub touchdown: Option<Touchdown>,
}

/// Altitude band that counts as settled for window statistics (m).
pub const SETTLE_BAND: f64 = 0.5;
/// Touchdown declaration thresholds: altitude (m) and absolute sink rate (m/s).
pub const TOUCHDOWN_ALT: f64 = 0.05;
pub const TOUCHDOWN_SINK: f64 = 0.2;

/// Derive summary statistics from a trajectory log. Mode switch timestamps
/// come straight from the records, so they always agree with the log.
pub fn summarize(records: &[TrajectoryRecord]) -> MissionSummary {
    let mut summary = MissionSummary {
        status: MissionStatus::Completed,
        switches: Vec::new(),
        windows: Vec::new(),
        thrust: Vec::new(),
        touchdown: None,
    };
    if records.is_empty() {
        return summary;
    }

    // Mode switches and contiguous windows.
    let mut start = 0usize;
    for i in 1..=records.len() {
        let boundary = i == records.len() || records[i].mode != records[start].mode;
        if !boundary {
            continue;
        }
        if i < records.len() {
            summary
                .switches
                .push((records[i].t, records[start].mode, records[i].mode));
        }
        let window = &records[start..i];
        let mut max_dev = 0.0f64;
        for r in window {
            max_dev = max_dev.max((r.state.z - r.z_d).abs());
        }
        // Settling: the sample after the last out-of-band error.
        let mut settle = Some(window[0].t);
        for (j, r) in window.iter().enumerate().rev() {
            if (r.state.z - r.z_d).abs() > SETTLE_BAND {
                settle = window.get(j + 1).map(|n| n.t);
                break;
            }
        }
        summary.windows.push(ModeWindow {
            mode: records[start].mode,
            t_start: records[start].t,
            t_end: records[i - 1].t,
            max_z_dev: max_dev,
            settle_t: settle,
        });
        start = i;
    }

    // Thrust stats per mode.
    for mode in FlightMode::ALL {
        let samples: Vec<&TrajectoryRecord> =
            records.iter().filter(|r| r.mode == mode).collect();
        if samples.is_empty() {
            continue;
        }
        let n = samples.len() as f64;
        let dt_est = if records.len() > 1 {
            records[1].t - records[0].t
        } else {
            0.0
        };
        let mut sum = 0.0;
        let mut peak = 0.0f64;
        for r in &samples {
            let total = r.cmd.t1 + r.cmd.t2;
            sum += total;
            peak = peak.max(total);
        }
        summary.thrust.push(ThrustStats {
            mode,
            time: n * dt_est,
            mean_total: sum / n,
            peak_total: peak,
        });
    }

    // Touchdown: only armed once the reverse conversion has captured hover.
    let capture = summary
        .switches
        .iter()
        .find(|(_, from, to)| {
            *from == FlightMode::TransitionReverse && *to == FlightMode::Hover
        })
        .map(|(t, _, _)| *t);
    if let Some(t_capture) = capture {
        summary.touchdown = records
            .iter()
            .find(|r| {
                r.t >= t_capture && r.state.z < TOUCHDOWN_ALT && r.state.z_dot.abs() < TOUCHDOWN_SINK
            })
            .map(|r| Touchdown {
                t: r.t,
                sink_rate: r.state.z_dot,
            });
    }
    summary
}

/// Everything a mission run needs besides the plan and timing.
pub struct MissionContext<'a> {
    pub params: &'a AircraftParams,
    pub gains: &'a GainSet,
    pub laws: &'a LawSet,
    pub noise: &'a NoiseModel,
    pub switch: &'a SwitchThresholds,
}

/// Run a mission from rest on the ground at the origin.
pub fn run_mission(
    plan: &MissionPlan,
    ctx: &MissionContext,
    dt: f64,
    duration: f64,
) -> (Vec<TrajectoryRecord>, MissionSummary) {
    run_mission_from(LongitudinalState::default(), plan, ctx, dt, duration)
}

/// Run a mission from an arbitrary initial state.
///
/// Executes ceil(duration / dt) fixed steps. Control faults, solver failures,
/// and envelope departures stop the run early; the log up to the failing step
/// is returned with a failure status naming that step.
pub fn run_mission_from(
    initial: LongitudinalState,
    plan: &MissionPlan,
    ctx: &MissionContext,
    dt: f64,
    duration: f64,
) -> (Vec<TrajectoryRecord>, MissionSummary) {
    let steps = ((duration / dt) - 1e-9).ceil().max(0.0) as usize;
    let mut records = Vec::with_capacity(steps);
    let mut failure: Option<(usize, SimError)> = None;

    let mut state = initial;
    let mut mode = FlightMode::Hover;
    let mut pids = AxisPids::default();
    let mut filters = FilterBank::default();
    let mut rng = NoiseRng::new(ctx.noise.seed);
    let mut cursor = PlanCursor::new();
    let mut prev_cmd = ControlCommand::default();

    for k in 0..steps {
        let t = k as f64 * dt;
        let meas = measure(&state, ctx.noise, &mut rng);
        let om = ctx.gains.for_mode(mode);
        let filt = filters.step(&meas, (om.omega_z, om.omega_x, om.omega_theta), dt);
        let (z_d, x_dot_d, theta_d_plan, directive) =
            cursor.update(plan, t, filt.x_dot_f, mode, dt);

        let next_mode = mode_switch(mode, filt.x_dot_f, state.beta, directive, ctx.switch);
        if next_mode != mode {
            pids.reset_all();
            mode = next_mode;
        }

        // Controller-side flow estimate from the previously commanded
        // thrusts: the measurement of this step cannot see this step's
        // command yet.
        let step_result = (|| -> Result<(ControlCommand, u8, f64, LongitudinalState), SimError> {
            let flow1 =
                free_wing_local_flow(state.z_dot, filt.x_dot_f, state.beta, prev_cmd.t1, ctx.params)?;
            let flow2 =
                free_wing_local_flow(state.z_dot, filt.x_dot_f, state.beta, prev_cmd.t2, ctx.params)?;
            let inputs = LawInputs {
                z_f: filt.z_f,
                x_dot_f: filt.x_dot_f,
                theta_f: filt.theta_f,
                theta_m: meas.theta_m,
                z_d,
                x_dot_d,
                theta_d_plan,
                state: &state,
                flow1: &flow1,
                flow2: &flow2,
                dt,
            };
            let law = ctx.laws.for_mode(mode);
            let out = law.step(&inputs, &mut pids, ctx.gains.for_mode(mode), ctx.params)?;
            let (cmd, flags) = saturate(&out.cmd, ctx.params);

            let body = total_body_forces(&state, &cmd, ctx.params)?;
            let earth = earth_frame_forces(&body, state.theta, ctx.params);
            let acc = accelerations(&earth, body.tau_theta, ctx.params);
            let next = apply_ground_contact(advance(&state, acc, cmd.beta_dot, dt), earth.f_ze);
            check_envelope(&next)?;
            Ok((cmd, flags, out.theta_d, next))
        })();

        match step_result {
            Ok((cmd, flags, theta_d, next)) => {
                records.push(TrajectoryRecord {
                    k,
                    t,
                    state,
                    meas,
                    filt,
                    z_d,
                    x_dot_d,
                    theta_d,
                    cmd,
                    mode,
                    sat_flags: flags,
                });
                state = next;
                prev_cmd = cmd;
            }
            Err(e) => {
                failure = Some((k, e));
                break;
            }
        }
    }

    let mut summary = summarize(&records);
    if let Some((step, e)) = failure {
        summary.status = MissionStatus::Failed {
            step,
            exit_code: e.exit_code(),
            reason: e.to_string(),
        };
    }
    (records, summary)
}
