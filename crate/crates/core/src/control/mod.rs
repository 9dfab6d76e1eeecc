//! Per-axis PID loops, virtual force mapping, actuator saturation, and the
//! flight-mode state machine. The mode-specific control laws live in
//! [`laws`] behind a common trait.

pub mod laws;

use crate::dynamics::ControlCommand;
use crate::params::AircraftParams;

/// Discrete flight modes managed by the mode state machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FlightMode {
    Hover,
    TransitionForward,
    Forward,
    TransitionReverse,
}

impl FlightMode {
    pub const ALL: [FlightMode; 4] = [
        FlightMode::Hover,
        FlightMode::TransitionForward,
        FlightMode::Forward,
        FlightMode::TransitionReverse,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            FlightMode::Hover => "hover",
            FlightMode::TransitionForward => "transition_forward",
            FlightMode::Forward => "forward",
            FlightMode::TransitionReverse => "transition_reverse",
        }
    }

    pub fn from_label(s: &str) -> Option<FlightMode> {
        FlightMode::ALL.iter().copied().find(|m| m.label() == s)
    }
}

/// What the mission plan currently asks of the mode machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanDirective {
    /// Stay in the current steady mode.
    Hold,
    /// Begin (or continue) conversion to forward flight.
    ConvertForward,
    /// Begin (or continue) conversion back to hover.
    ConvertReverse,
}

/// Speed thresholds consulted by the mode machine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchThresholds {
    /// Filtered horizontal speed above which forward conversion completes (m/s).
    pub forward_speed: f64,
    /// Filtered horizontal speed below which hover capture completes (m/s).
    pub capture_speed: f64,
}

impl Default for SwitchThresholds {
    fn default() -> Self {
        SwitchThresholds {
            forward_speed: 57.0,
            capture_speed: 5.0,
        }
    }
}

/// Mode transition function. Modes advance only around the cycle
/// hover -> transition-forward -> forward -> transition-reverse -> hover:
/// conversions start on a plan directive and complete on measured state
/// (speed for forward, tilt fully recovered plus low speed for capture).
pub fn mode_switch(
    mode: FlightMode,
    x_dot_f: f64,
    beta: f64,
    directive: PlanDirective,
    th: &SwitchThresholds,
) -> FlightMode {
    match mode {
        FlightMode::Hover => {
            if directive == PlanDirective::ConvertForward {
                FlightMode::TransitionForward
            } else {
                FlightMode::Hover
            }
        }
        FlightMode::TransitionForward => {
            if x_dot_f > th.forward_speed {
                FlightMode::Forward
            } else {
                FlightMode::TransitionForward
            }
        }
        FlightMode::Forward => {
            if directive == PlanDirective::ConvertReverse {
                FlightMode::TransitionReverse
            } else {
                FlightMode::Forward
            }
        }
        FlightMode::TransitionReverse => {
            if beta == 0.0 && x_dot_f < th.capture_speed {
                FlightMode::Hover
            } else {
                FlightMode::TransitionReverse
            }
        }
    }
}

/// PID gains for one controlled axis plus the anti-windup clamp on the
/// integral accumulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    pub i_max: f64,
}

/// Per-loop cap on the standing offset a railed integral may hold, indexed
/// [z, x, theta] in the error's own units (m, m/s, rad). A railed integral
/// parks the loop ki*i_max/kp off its target, so the hover and transition
/// caps sit inside the hold tolerances; those loops carry their trim in
/// feedforward and need the integral only for fine trim. The forward loops
/// carry real aerodynamic trim (cruise drag on the speed loop, elevator
/// balance in pitch) and get room to work.
pub const HOVER_TRIM_OFFSET: [f64; 3] = [0.05, 0.02, 0.01];
pub const TRANSITION_TRIM_OFFSET: [f64; 3] = [0.05, 0.02, 0.01];
pub const FORWARD_TRIM_OFFSET: [f64; 3] = [0.5, f64::INFINITY, 0.05];

/// Anti-windup default: the offset cap scaled by kp/ki, never exceeding the
/// authority ceiling of half a g of translational acceleration (half a
/// rad/s^2 about pitch) that the integral term alone may command.
pub fn default_i_max(kp: f64, ki: f64, offset_cap: f64, translational: bool, g: f64) -> f64 {
    let authority = if translational { 0.5 * g } else { 0.5 };
    if ki > 0.0 {
        (offset_cap * kp).min(authority) / ki
    } else {
        f64::INFINITY
    }
}

/// Gains and filter cutoffs for one flight mode. Transition modes control
/// no horizontal axis, hence the optional x entry.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeGains {
    pub z: AxisGains,
    pub x: Option<AxisGains>,
    pub theta: AxisGains,
    pub omega_z: f64,
    pub omega_x: f64,
    pub omega_theta: f64,
}

/// Full gain schedule; both transition directions share one set.
#[derive(Debug, Clone, PartialEq)]
pub struct GainSet {
    pub hover: ModeGains,
    pub transition: ModeGains,
    pub forward: ModeGains,
}

impl GainSet {
    pub fn for_mode(&self, mode: FlightMode) -> &ModeGains {
        match mode {
            FlightMode::Hover => &self.hover,
            FlightMode::Forward => &self.forward,
            FlightMode::TransitionForward | FlightMode::TransitionReverse => &self.transition,
        }
    }
}

impl Default for GainSet {
    fn default() -> Self {
        let g = 9.81;
        let ax = |kp: f64, ki: f64, kd: f64, cap: f64, translational: bool| AxisGains {
            kp,
            ki,
            kd,
            i_max: default_i_max(kp, ki, cap, translational, g),
        };
        GainSet {
            hover: ModeGains {
                z: ax(2.0, 0.05, 8.0, HOVER_TRIM_OFFSET[0], true),
                x: Some(ax(0.6, 0.02, 2.0, HOVER_TRIM_OFFSET[1], true)),
                theta: ax(7.0, 0.5, 7.0, HOVER_TRIM_OFFSET[2], false),
                omega_z: 3.0,
                omega_x: 3.5,
                omega_theta: 1.0,
            },
            transition: ModeGains {
                z: ax(2.4, 0.02, 3.0, TRANSITION_TRIM_OFFSET[0], true),
                x: None,
                theta: ax(9.0, 0.085, 9.0, TRANSITION_TRIM_OFFSET[2], false),
                omega_z: 3.0,
                // No transition-specific cutoff is defined for the speed
                // channel; it keeps the hover value so the forward-switch
                // condition still sees a filtered speed.
                omega_x: 3.5,
                omega_theta: 1.0,
            },
            forward: ModeGains {
                z: ax(0.94, 0.03, 3.0, FORWARD_TRIM_OFFSET[0], true),
                x: Some(ax(1.4, 0.3, 2.0, FORWARD_TRIM_OFFSET[1], true)),
                theta: ax(1.75, 0.01, 2.5, FORWARD_TRIM_OFFSET[2], false),
                omega_z: 3.25,
                omega_x: 1.0,
                omega_theta: 6.2,
            },
        }
    }
}

/// PID memory for one axis. `primed` marks whether `prev_error` holds a real
/// previous sample; split-path updates emit a zero derivative until it does,
/// so a reset never manufactures a derivative spike from an absolute signal.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PidState {
    pub integral: f64,
    pub prev_error: f64,
    pub primed: bool,
}

impl PidState {
    pub fn reset(&mut self) {
        *self = PidState::default();
    }
}

/// PID memory for all axes of the active mode.
#[derive(Debug, Clone, Copy, Default)]
pub struct AxisPids {
    pub z: PidState,
    pub x: PidState,
    pub theta: PidState,
}

impl AxisPids {
    pub fn reset_all(&mut self) {
        self.z.reset();
        self.x.reset();
        self.theta.reset();
    }
}

/// One discrete PID update on setpoint `r_d` and response `r`. Integral is
/// rectangular and clamped to `±i_max`; derivative is the backward
/// difference of the error, contributing `kd * e / dt` on the very first
/// step. Returns a commanded acceleration.
pub fn pid_step(ps: &mut PidState, r_d: f64, r: f64, g: &AxisGains, dt: f64) -> f64 {
    let e = r_d - r;
    let e_dot = (e - ps.prev_error) / dt;
    ps.integral = (ps.integral + e * dt).clamp(-g.i_max, g.i_max);
    ps.prev_error = e;
    ps.primed = true;
    g.kp * e + g.ki * ps.integral + g.kd * e_dot
}

/// PID update with the derivative tapped from a separate signal `d_src`:
/// proportional and integral act on the tracking error `e`, the derivative
/// backward-differences `d_src` (whose previous sample is what `ps` stores).
/// Lets a loop damp the measured motion of its channel, free of setpoint
/// rates, and take that damping from a less-lagged signal than the tracking
/// path uses. Until `ps` holds a real previous sample the derivative is
/// zero; `d_src` may be an absolute signal, so differencing it against a
/// reset-cleared zero would fabricate a spike.
pub fn pid_step_split(ps: &mut PidState, e: f64, d_src: f64, g: &AxisGains, dt: f64) -> f64 {
    if !ps.primed {
        ps.prev_error = d_src;
        ps.primed = true;
    }
    let e_dot = (d_src - ps.prev_error) / dt;
    ps.integral = (ps.integral + e * dt).clamp(-g.i_max, g.i_max);
    ps.prev_error = d_src;
    g.kp * e + g.ki * ps.integral + g.kd * e_dot
}

/// Controlled axis selector for the acceleration-to-force mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Z,
    X,
    Theta,
}

/// Convert a commanded acceleration into a virtual force (or moment). The
/// vertical axis carries a gravity feedforward so a zero commanded
/// acceleration asks for exact weight compensation.
pub fn virtual_force(accel: f64, axis: Axis, p: &AircraftParams) -> f64 {
    match axis {
        Axis::Z => p.m * (accel + p.g),
        Axis::X => p.m * accel,
        Axis::Theta => p.j_y * accel,
    }
}

/// Saturation flag bits in the `sat_flags` log column.
pub const SAT_T1: u8 = 0b0001;
pub const SAT_T2: u8 = 0b0010;
pub const SAT_DELTA_E: u8 = 0b0100;
pub const SAT_BETA_DOT: u8 = 0b1000;

/// Clamp a raw command to actuator limits, reporting which components hit
/// them. Pair thrusts clamp to [0, t_max], elevator and tilt rate to their
/// symmetric limits.
pub fn saturate(cmd: &ControlCommand, p: &AircraftParams) -> (ControlCommand, u8) {
    let mut flags = 0u8;
    let t1 = cmd.t1.clamp(0.0, p.t_max);
    if t1 != cmd.t1 {
        flags |= SAT_T1;
    }
    let t2 = cmd.t2.clamp(0.0, p.t_max);
    if t2 != cmd.t2 {
        flags |= SAT_T2;
    }
    let delta_e = cmd.delta_e.clamp(-p.delta_e_max, p.delta_e_max);
    if delta_e != cmd.delta_e {
        flags |= SAT_DELTA_E;
    }
    let beta_dot = cmd.beta_dot.clamp(-p.beta_rate, p.beta_rate);
    if beta_dot != cmd.beta_dot {
        flags |= SAT_BETA_DOT;
    }
    (
        ControlCommand {
            t1,
            t2,
            delta_e,
            beta_dot,
        },
        flags,
    )
}

/// Split a total pair-thrust demand into fore/aft pair thrusts producing the
/// demanded pitch moment `u_theta` through the tilted differential:
/// `t1 + t2 = t_t` and `(t1 l1 - t2 l2) cos(beta) = u_theta` hold exactly.
pub fn allocate_pair(t_t: f64, u_theta: f64, beta: f64, p: &AircraftParams) -> (f64, f64) {
    let t2 = (t_t * p.l1 - u_theta / beta.cos()) / p.delta_x;
    (t_t - t2, t2)
}
