//! Hover control: thrust-borne flight on vertical-ish rotors. Altitude maps
//! to total thrust, horizontal speed to a pitch setpoint (tilting the thrust
//! vector), and the pitch moment to the fore/aft thrust differential.

use super::{ControlLaw, LawInputs, LawOutput};
use crate::control::{allocate_pair, pid_step_split, virtual_force, Axis, AxisPids, ModeGains};
use crate::dynamics::ControlCommand;
use crate::error::SimError;
use crate::params::AircraftParams;

/// Total thrust and pitch setpoint from the vertical and horizontal virtual
/// forces. Faults when the thrust direction is too far from vertical for the
/// small-angle inversion to be meaningful.
pub fn hover_thrust_and_pitch(
    u_z: f64,
    u_x: f64,
    theta: f64,
    beta: f64,
    p: &AircraftParams,
) -> Result<(f64, f64), SimError> {
    let cc = theta.cos() * beta.cos();
    if cc <= 0.05 {
        return Err(SimError::ControlFault(format!(
            "hover law singular: cos(theta) cos(beta) = {cc:.4} <= 0.05"
        )));
    }
    let t_t = u_z / cc;
    // The pitch setpoint redirects the thrust vector; the inversion divides
    // by the thrust that will carry it. During a descent transient the
    // vertical demand dips to or below zero, and the raw quotient would rail
    // the setpoint to +-pi/2 (and flip its sign) on any small horizontal
    // demand. Steering is therefore referenced against no less than weight.
    let t_ref = t_t.max(p.m * p.g);
    let theta_d = (-u_x / t_ref).clamp(-1.0, 1.0).asin();
    Ok((t_t, theta_d))
}

/// Full hover law on precomputed virtual forces: thrust, pitch setpoint, and
/// the moment-exact differential allocation. Elevator and tilt stay at zero.
pub fn hover_law(
    u_z: f64,
    u_x: f64,
    u_theta: f64,
    theta: f64,
    beta: f64,
    p: &AircraftParams,
) -> Result<(ControlCommand, f64), SimError> {
    let (t_t, theta_d) = hover_thrust_and_pitch(u_z, u_x, theta, beta, p)?;
    let (t1, t2) = allocate_pair(t_t, u_theta, beta, p);
    Ok((
        ControlCommand {
            t1,
            t2,
            delta_e: 0.0,
            beta_dot: 0.0,
        },
        theta_d,
    ))
}

pub struct HoverLaw;

impl ControlLaw for HoverLaw {
    fn name(&self) -> &'static str {
        "hover"
    }

    fn step(
        &self,
        inp: &LawInputs,
        pids: &mut AxisPids,
        gains: &ModeGains,
        p: &AircraftParams,
    ) -> Result<LawOutput, SimError> {
        // All three loops damp measured motion: the derivative path carries
        // the measurement alone, so setpoint ramps and the pitch-demand
        // inversion never feed the kd terms. Pitch damping additionally
        // differences the raw measurement, because the filter lag at the
        // pitch cutoff destabilizes the loop at the scheduled gains.
        let u_z = virtual_force(
            pid_step_split(&mut pids.z, inp.z_d - inp.z_f, -inp.z_f, &gains.z, inp.dt),
            Axis::Z,
            p,
        );
        let gx = gains.x.as_ref().ok_or_else(|| {
            SimError::ControlFault("hover law needs x-axis gains, none configured".into())
        })?;
        let u_x = virtual_force(
            pid_step_split(
                &mut pids.x,
                inp.x_dot_d - inp.x_dot_f,
                -inp.x_dot_f,
                gx,
                inp.dt,
            ),
            Axis::X,
            p,
        );
        let (t_t, theta_d) = hover_thrust_and_pitch(u_z, u_x, inp.theta_f, inp.state.beta, p)?;
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
        let (t1, t2) = allocate_pair(t_t, u_theta, inp.state.beta, p);
        Ok(LawOutput {
            cmd: ControlCommand {
                t1,
                t2,
                delta_e: 0.0,
                beta_dot: 0.0,
            },
            theta_d,
        })
    }
}
