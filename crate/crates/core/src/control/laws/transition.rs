//! Transition control: constant-rate tilt between rotor-borne and wing-borne
//! flight. Altitude stays on the thrust channel, pitch tracks a planned
//! setpoint through the thrust differential, the elevator continuously
//! cancels the net free-wing moment, and the horizontal axis is uncontrolled.

use super::{elevator_balance, ControlLaw, LawInputs, LawOutput};
use crate::aero::FreeWingLocalFlow;
use crate::control::{allocate_pair, pid_step_split, virtual_force, Axis, AxisPids, ModeGains};
use crate::dynamics::ControlCommand;
use crate::error::SimError;
use crate::params::AircraftParams;
use std::f64::consts::FRAC_PI_2;

/// Which way the rotors are tilting during the transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TiltDirection {
    /// Hover toward forward flight: tilt grows to pi/2.
    Forward,
    /// Forward flight back toward hover: tilt shrinks to 0.
    Reverse,
}

/// Tilt angle above which a reverse transition flies thrust-idle. Rotors
/// this far from vertical buy almost no altitude authority per newton, but
/// the same newtons push straight into the deceleration and pump airspeed
/// back into wing lift; the craft rides the wing and the planned pitch
/// schedule until the rotors are back inside this cone.
pub const REVERSE_THRUST_GATE: f64 = 0.35;

/// Transition control law on precomputed virtual forces.
///
/// Near-horizontal rotors have almost no vertical authority: when
/// `cos(theta) cos(beta)` falls below the guard while attitude itself is
/// healthy, the pair thrusts idle at zero instead of chasing an unreachable
/// vertical demand (the wing carries the craft through that leg). A reverse
/// transition additionally idles until the tilt passes the gate above. Loss
/// of pitch attitude is a genuine fault.
#[allow(clippy::too_many_arguments)]
pub fn transition_law(
    u_z: f64,
    u_theta: f64,
    theta: f64,
    beta: f64,
    flow1: &FreeWingLocalFlow,
    flow2: &FreeWingLocalFlow,
    dir: TiltDirection,
    p: &AircraftParams,
) -> Result<ControlCommand, SimError> {
    let ct = theta.cos();
    let cc = ct * beta.cos();
    let idle = cc <= 0.05 || (dir == TiltDirection::Reverse && beta > REVERSE_THRUST_GATE);
    let (t1, t2) = if idle {
        if ct <= 0.05 {
            return Err(SimError::ControlFault(format!(
                "transition law: pitch attitude lost, cos(theta) = {ct:.4}"
            )));
        }
        (0.0, 0.0)
    } else {
        allocate_pair(u_z / cc, u_theta, beta, p)
    };
    // With the pairs idle the thrust differential is gone and the elevator
    // is the only pitch effector left, so it tracks the pitch demand instead
    // of merely cancelling the free-wing moment.
    let delta_e = if beta.sin() > 0.05 && flow2.v_r > 1.0 {
        let target = if idle { u_theta } else { 0.0 };
        elevator_balance(target, flow1, flow2, beta, p).clamp(-p.delta_e_max, p.delta_e_max)
    } else {
        0.0
    };
    let beta_dot = match dir {
        TiltDirection::Forward => {
            if beta < FRAC_PI_2 {
                p.beta_rate
            } else {
                0.0
            }
        }
        TiltDirection::Reverse => {
            if beta > 0.0 {
                -p.beta_rate
            } else {
                0.0
            }
        }
    };
    Ok(ControlCommand {
        t1,
        t2,
        delta_e,
        beta_dot,
    })
}

pub struct TransitionLaw {
    pub dir: TiltDirection,
}

impl ControlLaw for TransitionLaw {
    fn name(&self) -> &'static str {
        match self.dir {
            TiltDirection::Forward => "transition-forward",
            TiltDirection::Reverse => "transition-reverse",
        }
    }

    fn step(
        &self,
        inp: &LawInputs,
        pids: &mut AxisPids,
        gains: &ModeGains,
        p: &AircraftParams,
    ) -> Result<LawOutput, SimError> {
        // Derivative paths damp measured motion only; see the hover law.
        let u_z = virtual_force(
            pid_step_split(&mut pids.z, inp.z_d - inp.z_f, -inp.z_f, &gains.z, inp.dt),
            Axis::Z,
            p,
        );
        let theta_d = inp.theta_d_plan;
        let u_theta = virtual_force(
            pid_step_split(
                &mut pids.theta,
                theta_d - inp.theta_f,
                -inp.theta_m,
                &gains.theta,
                inp.dt,
            ),
            Axis::Theta,
            p,
        );
        let cmd = transition_law(
            u_z,
            u_theta,
            inp.theta_f,
            inp.state.beta,
            inp.flow1,
            inp.flow2,
            self.dir,
            p,
        )?;
        Ok(LawOutput { cmd, theta_d })
    }
}
