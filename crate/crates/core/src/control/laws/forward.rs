//! Forward-flight control: wing-borne cruise on horizontal rotors. Speed
//! maps to total thrust, altitude to an angle-of-attack demand carried by
//! the pitch loop, and the pitch moment demand to elevator deflection.

use super::{elevator_balance, ControlLaw, LawInputs, LawOutput};
use crate::aero::FreeWingLocalFlow;
use crate::control::{pid_step_split, virtual_force, Axis, AxisPids, ModeGains};
use crate::dynamics::ControlCommand;
use crate::error::SimError;
use crate::params::AircraftParams;
use std::f64::consts::{FRAC_PI_2, PI};

/// Angle-of-attack demand limit: the small-angle lift inversion is only
/// trusted to ten degrees.
pub const ALPHA_D_LIMIT: f64 = PI / 18.0;

/// Thrust and pitch setpoint for wing-borne flight.
///
/// Returns `(t_t, theta_d, alpha_d)`. Faults when dynamic pressure is too
/// low for the wing to hold altitude or the thrust line is too far from
/// horizontal for the speed channel to act through it.
pub fn forward_thrust_and_pitch(
    u_z: f64,
    u_x: f64,
    theta: f64,
    beta: f64,
    z_dot: f64,
    x_dot_f: f64,
    p: &AircraftParams,
) -> Result<(f64, f64, f64), SimError> {
    let q = 0.5 * p.rho * (z_dot * z_dot + x_dot_f * x_dot_f);
    if q <= 50.0 {
        return Err(SimError::ControlFault(format!(
            "forward law: dynamic pressure {q:.1} Pa too low for wing-borne altitude control"
        )));
    }
    let cs = theta.cos() * beta.sin();
    if cs <= 0.05 {
        return Err(SimError::ControlFault(format!(
            "forward law: cos(theta) sin(beta) = {cs:.4} <= 0.05, thrust line not near-horizontal"
        )));
    }
    let t_t = (u_x / cs).clamp(0.0, 2.0 * p.t_max);
    let gamma = z_dot.atan2(x_dot_f);
    let mut denom = q * p.s_w * p.c_l_alpha;
    if p.literal_lift_inversion {
        // Literal form keeps a trailing current-alpha factor in the divisor.
        denom *= theta - gamma;
    }
    let raw = (u_z - t_t * theta.sin() * beta.sin()) / denom;
    let alpha_d = if raw.is_finite() {
        raw.clamp(-ALPHA_D_LIMIT, ALPHA_D_LIMIT)
    } else {
        0.0
    };
    Ok((t_t, alpha_d + gamma, alpha_d))
}

/// Full forward law on precomputed virtual forces: thrust split evenly
/// across the pairs, elevator carrying the pitch moment demand.
#[allow(clippy::too_many_arguments)]
pub fn forward_law(
    u_z: f64,
    u_x: f64,
    u_theta: f64,
    theta: f64,
    beta: f64,
    z_dot: f64,
    x_dot_f: f64,
    flow1: &FreeWingLocalFlow,
    flow2: &FreeWingLocalFlow,
    p: &AircraftParams,
) -> Result<(ControlCommand, f64), SimError> {
    let (t_t, theta_d, _) = forward_thrust_and_pitch(u_z, u_x, theta, beta, z_dot, x_dot_f, p)?;
    let delta_e = if beta.sin() > 0.05 && flow2.v_r > 1.0 {
        elevator_balance(u_theta, flow1, flow2, beta, p).clamp(-p.delta_e_max, p.delta_e_max)
    } else {
        0.0
    };
    let beta_dot = if beta < FRAC_PI_2 { p.beta_rate } else { 0.0 };
    Ok((
        ControlCommand {
            t1: 0.5 * t_t,
            t2: 0.5 * t_t,
            delta_e,
            beta_dot,
        },
        theta_d,
    ))
}

pub struct ForwardLaw;

impl ControlLaw for ForwardLaw {
    fn name(&self) -> &'static str {
        "forward"
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
        let gx = gains.x.as_ref().ok_or_else(|| {
            SimError::ControlFault("forward law needs x-axis gains, none configured".into())
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
        let (t_t, theta_d, _) = forward_thrust_and_pitch(
            u_z,
            u_x,
            inp.theta_f,
            inp.state.beta,
            inp.state.z_dot,
            inp.x_dot_f,
            p,
        )?;
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
        let delta_e = if inp.state.beta.sin() > 0.05 && inp.flow2.v_r > 1.0 {
            elevator_balance(u_theta, inp.flow1, inp.flow2, inp.state.beta, p)
                .clamp(-p.delta_e_max, p.delta_e_max)
        } else {
            0.0
        };
        let beta_dot = if inp.state.beta < FRAC_PI_2 {
            p.beta_rate
        } else {
            0.0
        };
        Ok(LawOutput {
            cmd: ControlCommand {
                t1: 0.5 * t_t,
                t2: 0.5 * t_t,
                delta_e,
                beta_dot,
            },
            theta_d,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aero::{free_wing_local_flow, free_wing_moment_raw};
    use crate::control::laws::transition_law;
    use crate::control::laws::TiltDirection;
    use crate::rng::NoiseRng;

    fn params() -> AircraftParams {
        AircraftParams::default()
    }

    #[test]
    fn guards_fault_outside_envelope() {
        let p = params();
        // 5 m/s: q ~ 15 Pa, far below the wing-borne floor.
        assert!(matches!(
            forward_thrust_and_pitch(100.0, 50.0, 0.0, FRAC_PI_2, 0.0, 5.0, &p),
            Err(SimError::ControlFault(_))
        ));
        // Rotors vertical: no horizontal thrust component to command.
        assert!(matches!(
            forward_thrust_and_pitch(100.0, 50.0, 0.0, 0.0, 0.0, 50.0, &p),
            Err(SimError::ControlFault(_))
        ));
    }

    #[test]
    fn thrust_clamps_to_pair_limits() {
        let p = params();
        let (t_hi, _, _) =
            forward_thrust_and_pitch(100.0, 1e6, 0.0, FRAC_PI_2, 0.0, 50.0, &p).unwrap();
        assert_eq!(t_hi, 2.0 * p.t_max);
        let (t_lo, _, _) =
            forward_thrust_and_pitch(100.0, -500.0, 0.0, FRAC_PI_2, 0.0, 50.0, &p).unwrap();
        assert_eq!(t_lo, 0.0);
    }

    #[test]
    fn alpha_demand_inverts_wing_lift() {
        let p = params();
        let (z_dot, x_dot) = (0.5, 48.0);
        let theta = 0.03;
        let u_z = 140.0;
        let u_x = 45.0;
        let (t_t, theta_d, alpha_d) =
            forward_thrust_and_pitch(u_z, u_x, theta, FRAC_PI_2, z_dot, x_dot, &p).unwrap();
        let q = 0.5 * p.rho * (z_dot * z_dot + x_dot * x_dot);
        // Unclamped regime: the demanded alpha recovers u_z through the wing
        // lift slope after removing the thrust's vertical component.
        assert!(alpha_d.abs() < ALPHA_D_LIMIT);
        let recovered = q * p.s_w * p.c_l_alpha * alpha_d + t_t * theta.sin();
        assert!((recovered - u_z).abs() < 1e-9, "recovered {recovered}");
        let gamma = z_dot.atan2(x_dot);
        assert!((theta_d - (alpha_d + gamma)).abs() < 1e-15);
    }

    #[test]
    fn alpha_demand_clamps_at_ten_degrees() {
        let p = params();
        let (_, _, alpha_d) =
            forward_thrust_and_pitch(5000.0, 45.0, 0.0, FRAC_PI_2, 0.0, 30.0, &p).unwrap();
        assert_eq!(alpha_d, ALPHA_D_LIMIT);
        let (_, _, alpha_lo) =
            forward_thrust_and_pitch(-5000.0, 45.0, 0.0, FRAC_PI_2, 0.0, 30.0, &p).unwrap();
        assert_eq!(alpha_lo, -ALPHA_D_LIMIT);
    }

    #[test]
    fn elevator_reproduces_moment_demand() {
        let p = params();
        let mut rng = NoiseRng::new(14);
        for _ in 0..300 {
            let beta = FRAC_PI_2;
            let x_dot = 35.0 + 25.0 * rng.uniform();
            let z_dot = 2.0 * (rng.uniform() - 0.5);
            let t_pair = 10.0 + 100.0 * rng.uniform();
            let flow1 = free_wing_local_flow(z_dot, x_dot, beta, t_pair, &p).unwrap();
            let flow2 = free_wing_local_flow(z_dot, x_dot, beta, t_pair, &p).unwrap();
            let u_theta = 6.0 * (rng.uniform() - 0.5);
            let (cmd, _) = forward_law(
                100.0, 40.0, u_theta, 0.0, beta, z_dot, x_dot, &flow1, &flow2, &p,
            )
            .unwrap();
            if cmd.delta_e.abs() < p.delta_e_max - 1e-9 {
                let tau = free_wing_moment_raw(&flow1, &flow2, cmd.delta_e, beta, &p);
                assert!(
                    (tau - u_theta).abs() < 1e-6,
                    "moment {tau} for demand {u_theta}"
                );
            }
        }
    }

    /// With zero moment demand the forward elevator equals the transition
    /// law's moment-canceling deflection, state for state.
    #[test]
    fn zero_demand_matches_transition_elevator() {
        let p = params();
        let mut rng = NoiseRng::new(15);
        for _ in 0..200 {
            let beta = 0.4 + 1.1 * rng.uniform();
            let x_dot = 20.0 + 30.0 * rng.uniform();
            let t_pair = 20.0 + 150.0 * rng.uniform();
            let flow1 = free_wing_local_flow(0.0, x_dot, beta, t_pair, &p).unwrap();
            let flow2 = free_wing_local_flow(0.0, x_dot, beta, 0.8 * t_pair, &p).unwrap();
            let (fwd_cmd, _) = forward_law(
                100.0, 40.0, 0.0, 0.0, beta, 0.0, x_dot, &flow1, &flow2, &p,
            )
            .unwrap();
            let tr_cmd = transition_law(
                100.0,
                0.0,
                0.0,
                beta,
                &flow1,
                &flow2,
                TiltDirection::Forward,
                &p,
            )
            .unwrap();
            assert_eq!(fwd_cmd.delta_e.to_bits(), tr_cmd.delta_e.to_bits());
        }
    }

    #[test]
    fn literal_alpha_form_differs_by_current_alpha_factor() {
        let p = params();
        let literal = AircraftParams {
            literal_lift_inversion: true,
            ..params()
        };
        let (z_dot, x_dot, theta) = (0.8, 45.0, 0.05);
        let (_, _, a_corr) =
            forward_thrust_and_pitch(10.0, 40.0, theta, FRAC_PI_2, z_dot, x_dot, &p).unwrap();
        let (_, _, a_lit) =
            forward_thrust_and_pitch(10.0, 40.0, theta, FRAC_PI_2, z_dot, x_dot, &literal)
                .unwrap();
        let alpha = theta - z_dot.atan2(x_dot);
        assert!((a_lit - a_corr / alpha).abs() < 1e-12);
    }
}
