//! Mode-specific control laws behind a common trait.
//!
//! Each law is registered under a stable name and selected at runtime from
//! the `[laws]` config table, so variants can be swapped per mode without
//! touching the mission loop.

mod forward;
mod hover;
mod transition;

pub use forward::{forward_law, forward_thrust_and_pitch, ForwardLaw, ALPHA_D_LIMIT};
pub use hover::{hover_law, hover_thrust_and_pitch, HoverLaw};
pub use transition::{transition_law, TiltDirection, TransitionLaw};

use crate::aero::{free_wing_lift_drag_raw, FreeWingLocalFlow};
use crate::control::{AxisPids, FlightMode, ModeGains};
use crate::dynamics::{ControlCommand, LongitudinalState};
use crate::error::SimError;
use crate::params::AircraftParams;
use std::f64::consts::PI;

/// Everything a law may consult for one control step. Measured channels
/// arrive filtered; the pitch channel additionally gets the raw measurement
/// because its damping term cannot tolerate the filter lag (see the pitch
/// PID wiring in each law). Sink rate and tilt come from the state directly.
#[derive(Debug, Clone, Copy)]
pub struct LawInputs<'a> {
    pub z_f: f64,
    pub x_dot_f: f64,
    pub theta_f: f64,
    /// Measured pitch before filtering; derivative source for the pitch PID.
    pub theta_m: f64,
    /// Altitude setpoint.
    pub z_d: f64,
    /// Horizontal speed setpoint.
    pub x_dot_d: f64,
    /// Pitch setpoint supplied by the mission plan; used by transition laws,
    /// ignored by laws that derive their own pitch demand.
    pub theta_d_plan: f64,
    pub state: &'a LongitudinalState,
    /// Local flow at the fore free wing, from the previous commanded thrust.
    pub flow1: &'a FreeWingLocalFlow,
    /// Local flow at the aft free wing, from the previous commanded thrust.
    pub flow2: &'a FreeWingLocalFlow,
    pub dt: f64,
}

/// Raw (pre-saturation) command plus the pitch setpoint the law tracked.
#[derive(Debug, Clone, Copy)]
pub struct LawOutput {
    pub cmd: ControlCommand,
    pub theta_d: f64,
}

/// One mode's control algorithm: run the per-axis PID updates it needs and
/// produce a raw actuator command.
pub trait ControlLaw {
    fn name(&self) -> &'static str;
    fn step(
        &self,
        inp: &LawInputs,
        pids: &mut AxisPids,
        gains: &ModeGains,
        p: &AircraftParams,
    ) -> Result<LawOutput, SimError>;
}

/// Registered law names, in registry order.
pub fn law_names() -> &'static [&'static str] {
    &["hover", "transition-forward", "forward", "transition-reverse"]
}

/// Instantiate a law by registry name.
pub fn create_law(name: &str) -> Option<Box<dyn ControlLaw>> {
    match name {
        "hover" => Some(Box::new(HoverLaw)),
        "transition-forward" => Some(Box::new(TransitionLaw {
            dir: TiltDirection::Forward,
        })),
        "transition-reverse" => Some(Box::new(TransitionLaw {
            dir: TiltDirection::Reverse,
        })),
        "forward" => Some(Box::new(ForwardLaw)),
        _ => None,
    }
}

/// The four laws bound to the four flight modes for a run.
pub struct LawSet {
    hover: Box<dyn ControlLaw>,
    transition_forward: Box<dyn ControlLaw>,
    forward: Box<dyn ControlLaw>,
    transition_reverse: Box<dyn ControlLaw>,
}

impl LawSet {
    /// Resolve law names against the registry; unknown names are a
    /// validation error listing what is available.
    pub fn from_names(
        hover: &str,
        transition_forward: &str,
        forward: &str,
        transition_reverse: &str,
    ) -> Result<LawSet, SimError> {
        let get = |name: &str| {
            create_law(name).ok_or_else(|| {
                SimError::Validation(format!(
                    "laws: unknown control law {name:?}; registered laws: {}",
                    law_names().join(", ")
                ))
            })
        };
        Ok(LawSet {
            hover: get(hover)?,
            transition_forward: get(transition_forward)?,
            forward: get(forward)?,
            transition_reverse: get(transition_reverse)?,
        })
    }

    pub fn for_mode(&self, mode: FlightMode) -> &dyn ControlLaw {
        match mode {
            FlightMode::Hover => self.hover.as_ref(),
            FlightMode::TransitionForward => self.transition_forward.as_ref(),
            FlightMode::Forward => self.forward.as_ref(),
            FlightMode::TransitionReverse => self.transition_reverse.as_ref(),
        }
    }
}

impl Default for LawSet {
    fn default() -> Self {
        LawSet::from_names("hover", "transition-forward", "forward", "transition-reverse")
            .expect("registry names are valid")
    }
}

/// Elevator deflection whose resulting net free-wing pitch moment equals
/// `target_moment`, solved in closed form.
///
/// The net moment is exactly quadratic in the aft lift coefficient (linear
/// lift, induced drag going as lift squared), so the balance reduces to one
/// quadratic equation. The numerically stable root on the physical branch is
/// taken; if the target moment is beyond what any deflection reaches (no
/// real root), the vertex (closest approach) is returned. The caller clamps
/// to hardware limits.
pub fn elevator_balance(
    target_moment: f64,
    flow1: &FreeWingLocalFlow,
    flow2: &FreeWingLocalFlow,
    beta: f64,
    p: &AircraftParams,
) -> f64 {
    let (sb, cb) = beta.sin_cos();
    let (l1f, d1f) = free_wing_lift_drag_raw(flow1, 0.0, p);
    // Fore-surface contribution, unaffected by the elevator.
    let fore = p.l4 * (sb * l1f + cb * d1f);

    let q2s = 0.5 * p.rho * flow2.v_r * flow2.v_r * p.s_f;
    let e_inv = 1.0 / (PI * p.ar * p.e_oswald);
    // Net moment as a function of the aft lift coefficient u:
    // tau(u) = fore - l3 q2s (sb u + cb c_d0 + cb e_inv u^2).
    let a = p.l3 * q2s * cb * e_inv;
    let b = p.l3 * q2s * sb;
    let c = target_moment - fore + p.l3 * q2s * cb * p.c_d0;

    let u = if a.abs() < 1e-300 {
        -c / b
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            // No deflection reaches the target; return the closest approach.
            -b / (2.0 * a)
        } else {
            // Stable small root: continuous with the linear (a -> 0) case.
            let qq = -0.5 * (b + disc.sqrt());
            c / qq
        }
    };
    let alpha_component = p.c_l0 + p.c_l_alpha * flow2.alpha_f;
    (u - alpha_component) / p.c_l_delta_e
}
