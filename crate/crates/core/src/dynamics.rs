//! Rigid-body state, force assembly, and the explicit Euler integrator.

use crate::aero::{
    fixed_wing_forces, free_wing_forces, free_wing_local_flow, rotor_thrust_forces,
    tilt_reaction_moment, BodyForces,
};
use crate::error::SimError;
use crate::params::AircraftParams;
use std::f64::consts::PI;

/// Longitudinal rigid-body state. `z` is altitude up, `x` horizontal
/// position, `theta` pitch (nose-up positive), `beta` the common rotor tilt.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LongitudinalState {
    pub z: f64,
    pub z_dot: f64,
    pub x: f64,
    pub x_dot: f64,
    pub theta: f64,
    pub theta_dot: f64,
    pub beta: f64,
}

/// Actuator command applied over one step: rotor pair thrusts, aft elevator
/// deflection, and tilt rate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlCommand {
    pub t1: f64,
    pub t2: f64,
    pub delta_e: f64,
    pub beta_dot: f64,
}

/// Net earth-frame specific forces (weight included in `f_ze`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EarthForces {
    pub f_ze: f64,
    pub f_xe: f64,
}

/// Sum of rotor, fixed-wing, free-wing, and tilt-reaction contributions in
/// body axes for the current state and actuator command.
pub fn total_body_forces(
    state: &LongitudinalState,
    cmd: &ControlCommand,
    p: &AircraftParams,
) -> Result<BodyForces, SimError> {
    let rotor = rotor_thrust_forces(cmd.t1, cmd.t2, state.beta, p)?;
    let wing = fixed_wing_forces(state.z_dot, state.x_dot, state.theta, p);
    let flow1 = free_wing_local_flow(state.z_dot, state.x_dot, state.beta, cmd.t1, p)?;
    let flow2 = free_wing_local_flow(state.z_dot, state.x_dot, state.beta, cmd.t2, p)?;
    let free = free_wing_forces(&flow1, &flow2, cmd.delta_e, state.beta, p)?;
    let tilt = BodyForces {
        f_za: 0.0,
        f_xa: 0.0,
        tau_theta: tilt_reaction_moment(cmd.beta_dot, p),
    };
    Ok(rotor + wing + free + tilt)
}

/// Rotate body-axis forces to earth axes and subtract weight.
pub fn earth_frame_forces(body: &BodyForces, theta: f64, p: &AircraftParams) -> EarthForces {
    let (st, ct) = theta.sin_cos();
    EarthForces {
        f_ze: ct * body.f_za + st * body.f_xa - p.m * p.g,
        f_xe: -st * body.f_za + ct * body.f_xa,
    }
}

/// Specific accelerations `(z_ddot, x_ddot, theta_ddot)`.
pub fn accelerations(earth: &EarthForces, tau_theta: f64, p: &AircraftParams) -> (f64, f64, f64) {
    (earth.f_ze / p.m, earth.f_xe / p.m, tau_theta / p.j_y)
}

/// One explicit Euler step: velocities advance on the accelerations, then
/// positions advance on the velocities from before this step. Tilt is a
/// kinematic integrator on the commanded rate, clamped to [0, pi/2].
pub fn advance(
    state: &LongitudinalState,
    acc: (f64, f64, f64),
    beta_dot: f64,
    dt: f64,
) -> LongitudinalState {
    LongitudinalState {
        z: state.z + dt * state.z_dot,
        z_dot: state.z_dot + dt * acc.0,
        x: state.x + dt * state.x_dot,
        x_dot: state.x_dot + dt * acc.1,
        theta: state.theta + dt * state.theta_dot,
        theta_dot: state.theta_dot + dt * acc.2,
        beta: (state.beta + dt * beta_dot).clamp(0.0, PI / 2.0),
    }
}

/// Reject non-finite states and pitch outside the modeled envelope.
pub fn check_envelope(state: &LongitudinalState) -> Result<(), SimError> {
    let finite = state.z.is_finite()
        && state.z_dot.is_finite()
        && state.x.is_finite()
        && state.x_dot.is_finite()
        && state.theta.is_finite()
        && state.theta_dot.is_finite()
        && state.beta.is_finite();
    if !finite {
        return Err(SimError::StateInvalid(format!(
            "non-finite state: {state:?}"
        )));
    }
    if state.theta.abs() >= PI / 2.0 {
        return Err(SimError::StateInvalid(format!(
            "pitch left the modeled envelope: theta = {}",
            state.theta
        )));
    }
    Ok(())
}

/// Full plant step: assemble forces, rotate, accelerate, integrate.
pub fn step(
    state: &LongitudinalState,
    cmd: &ControlCommand,
    dt: f64,
    p: &AircraftParams,
) -> Result<LongitudinalState, SimError> {
    let body = total_body_forces(state, cmd, p)?;
    let earth = earth_frame_forces(&body, state.theta, p);
    let acc = accelerations(&earth, body.tau_theta, p);
    let next = advance(state, acc, cmd.beta_dot, dt);
    check_envelope(&next)?;
    Ok(next)
}

/// Ground clamp applied by the mission loop: when at or below ground with a
/// net downward force, altitude and sink rate pin to zero.
pub fn apply_ground_contact(mut state: LongitudinalState, f_ze: f64) -> LongitudinalState {
    if state.z <= 0.0 && f_ze < 0.0 {
        state.z = 0.0;
        state.z_dot = 0.0;
    }
    state
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> AircraftParams {
        AircraftParams::default()
    }

    /// Airframe with no lifting surfaces: isolates the integrator.
    fn ballistic_params() -> AircraftParams {
        AircraftParams {
            s_w: 0.0,
            s_f: 0.0,
            ..params()
        }
    }

    #[test]
    fn accelerations_match_hand_values() {
        let p = AircraftParams {
            m: 9.8,
            j_y: 2.5,
            ..params()
        };
        let earth = EarthForces {
            f_ze: 49.0,
            f_xe: 98.0,
        };
        let (zdd, xdd, tdd) = accelerations(&earth, 5.0, &p);
        assert_eq!(zdd, 5.0);
        assert_eq!(xdd, 10.0);
        assert_eq!(tdd, 2.0);
    }

    #[test]
    fn free_fall_first_step_exact() {
        let p = params();
        let state = LongitudinalState::default();
        let cmd = ControlCommand::default();
        let next = step(&state, &cmd, 0.1, &p).unwrap();
        assert_eq!(next.z_dot, -(p.g * 0.1));
        assert_eq!(next.z, 0.0);
        assert_eq!(next.x_dot, 0.0);
        assert_eq!(next.theta, 0.0);
    }

    #[test]
    fn ballistic_closed_form_over_many_steps() {
        let p = ballistic_params();
        let dt = 0.1;
        let cmd = ControlCommand::default();
        let mut state = LongitudinalState {
            z: 500.0,
            ..LongitudinalState::default()
        };
        for k in 1..=200usize {
            state = step(&state, &cmd, dt, &p).unwrap();
            let kf = k as f64;
            let z_expect = 500.0 - p.g * dt * dt * kf * (kf - 1.0) / 2.0;
            let zd_expect = -p.g * dt * kf;
            assert!(
                (state.z - z_expect).abs() <= 1e-12 * z_expect.abs().max(1.0),
                "k = {k}: z = {}, expected {z_expect}",
                state.z
            );
            assert!((state.z_dot - zd_expect).abs() <= 1e-12 * zd_expect.abs().max(1.0));
        }
    }

    #[test]
    fn positions_advance_on_previous_velocities() {
        let p = ballistic_params();
        let state = LongitudinalState {
            z: 10.0,
            z_dot: 2.0,
            x: 5.0,
            x_dot: 3.0,
            ..LongitudinalState::default()
        };
        let next = step(&state, &ControlCommand::default(), 0.1, &p).unwrap();
        // Position uses the velocity from before the step, not the updated one.
        assert_eq!(next.z, 10.0 + 0.1 * 2.0);
        assert_eq!(next.x, 5.0 + 0.1 * 3.0);
        assert_eq!(next.z_dot, 2.0 - p.g * 0.1);
    }

    #[test]
    fn beta_integrates_and_clamps() {
        let p = params();
        let mut state = LongitudinalState {
            z: 100.0,
            ..LongitudinalState::default()
        };
        let cmd = ControlCommand {
            beta_dot: p.beta_rate,
            ..ControlCommand::default()
        };
        let dt = 0.1;
        for _ in 0..200 {
            let body = total_body_forces(&state, &cmd, &p).unwrap();
            let earth = earth_frame_forces(&body, state.theta, &p);
            let acc = accelerations(&earth, body.tau_theta, &p);
            state = advance(&state, acc, cmd.beta_dot, dt);
        }
        // 200 steps at 8 deg/s is well past 90 deg; the clamp holds.
        assert_eq!(state.beta, PI / 2.0);

        let down = ControlCommand {
            beta_dot: -p.beta_rate,
            ..ControlCommand::default()
        };
        for _ in 0..200 {
            state = advance(&state, (0.0, 0.0, 0.0), down.beta_dot, dt);
        }
        assert_eq!(state.beta, 0.0);
    }

    #[test]
    fn earth_rotation_at_level_pitch() {
        let p = params();
        let body = BodyForces {
            f_za: p.m * p.g,
            f_xa: 7.0,
            tau_theta: 0.0,
        };
        let earth = earth_frame_forces(&body, 0.0, &p);
        assert!((earth.f_ze - 0.0).abs() < 1e-12);
        assert_eq!(earth.f_xe, 7.0);
    }

    #[test]
    fn earth_rotation_matches_scalar_reevaluation() {
        let p = params();
        let body = BodyForces {
            f_za: 120.0,
            f_xa: -30.0,
            tau_theta: 0.0,
        };
        let theta = 0.2;
        let earth = earth_frame_forces(&body, theta, &p);
        let expect_z = theta.cos() * 120.0 + theta.sin() * -30.0 - p.m * p.g;
        let expect_x = -theta.sin() * 120.0 + theta.cos() * -30.0;
        assert!((earth.f_ze - expect_z).abs() < 1e-12);
        assert!((earth.f_xe - expect_x).abs() < 1e-12);
    }

    #[test]
    fn pitch_envelope_violation_is_an_error() {
        let state = LongitudinalState {
            theta: PI / 2.0,
            ..LongitudinalState::default()
        };
        assert!(check_envelope(&state).is_err());
    }

    #[test]
    fn ground_contact_pins_descending_states() {
        let state = LongitudinalState {
            z: -0.01,
            z_dot: -1.0,
            ..LongitudinalState::default()
        };
        let pinned = apply_ground_contact(state, -10.0);
        assert_eq!(pinned.z, 0.0);
        assert_eq!(pinned.z_dot, 0.0);

        // Net upward force lets the craft leave the ground untouched.
        let lifting = apply_ground_contact(state, 5.0);
        assert_eq!(lifting.z, -0.01);
    }
}
