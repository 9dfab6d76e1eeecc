//! Force models: tilted rotor thrust, fixed-wing lift/drag, free-wing
//! lift/drag in the rotor-frame local flow, rotor induced velocity, and the
//! gyroscopic reaction of tilting rotors.
//!
//! Frames: body z up along the fuselage normal, body x forward. The tilt
//! angle `beta` rotates the rotor pairs (and the free wings carrying them)
//! from thrust-up (`beta = 0`) to thrust-forward (`beta = pi/2`).

use crate::error::SimError;
use crate::params::AircraftParams;
use std::f64::consts::PI;

/// Aerodynamic force resultant in body axes plus pitch moment.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BodyForces {
    pub f_za: f64,
    pub f_xa: f64,
    pub tau_theta: f64,
}

impl std::ops::Add for BodyForces {
    type Output = BodyForces;

    fn add(self, o: BodyForces) -> BodyForces {
        BodyForces {
            f_za: self.f_za + o.f_za,
            f_xa: self.f_xa + o.f_xa,
            tau_theta: self.tau_theta + o.tau_theta,
        }
    }
}

/// Local flow seen by one free-wing surface, in its rotor-fixed frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeWingLocalFlow {
    /// Flow component normal to the rotor axis (rad frame z).
    pub v_beta_z: f64,
    /// Flow component along the rotor axis, positive into the disc.
    pub v_beta_x: f64,
    /// Rotor induced velocity at the disc (m/s).
    pub v_induced: f64,
    /// Resultant local airspeed including induced flow (m/s).
    pub v_r: f64,
    /// Local angle of attack of the free wing (rad).
    pub alpha_f: f64,
}

/// Thrust resultant of both rotor pairs at common tilt `beta`.
///
/// `t1` and `t2` are the fore and aft pair thrusts. The pair thrust line
/// tilts with `beta`; the differential about the center of mass acts on the
/// `l1`/`l2` arms with the `cos beta` projection.
pub fn rotor_thrust_forces(
    t1: f64,
    t2: f64,
    beta: f64,
    p: &AircraftParams,
) -> Result<BodyForces, SimError> {
    if !(t1 >= 0.0 && t2 >= 0.0) {
        return Err(SimError::Domain(format!(
            "rotor thrust must be non-negative, got t1 = {t1}, t2 = {t2}"
        )));
    }
    if !(-1e-12..=PI / 2.0 + 1e-12).contains(&beta) {
        return Err(SimError::Domain(format!(
            "tilt angle out of range [0, pi/2]: {beta}"
        )));
    }
    let (sb, cb) = beta.sin_cos();
    Ok(BodyForces {
        f_za: (t1 + t2) * cb,
        f_xa: (t1 + t2) * sb,
        tau_theta: (t1 * p.l1 - t2 * p.l2) * cb,
    })
}

/// Fixed-wing lift and drag resolved into body axes.
///
/// Angle of attack is pitch minus flight-path angle; below 0.1 m/s airspeed
/// the angle of attack is defined as zero to avoid atan2 chatter at rest,
/// and at exactly zero airspeed the forces vanish identically.
pub fn fixed_wing_forces(z_dot: f64, x_dot: f64, theta: f64, p: &AircraftParams) -> BodyForces {
    let v2 = z_dot * z_dot + x_dot * x_dot;
    if v2 == 0.0 {
        return BodyForces::default();
    }
    let v = v2.sqrt();
    let alpha = if v < 0.1 {
        0.0
    } else {
        theta - z_dot.atan2(x_dot)
    };
    let c_l = p.c_l0 + p.c_l_alpha * alpha;
    let q = 0.5 * p.rho * v2;
    let lift = q * p.s_w * c_l;
    let drag = q * p.s_w * (p.c_d0 + c_l * c_l / (PI * p.ar * p.e_oswald));
    let (sa, ca) = alpha.sin_cos();
    BodyForces {
        f_za: lift * ca - drag * sa,
        f_xa: -lift * sa - drag * ca,
        tau_theta: 0.0,
    }
}

/// Body velocity resolved into the rotor-fixed frame at tilt `beta`.
///
/// Returns `(v_beta_z, v_beta_x)`. The resolution matrix has unit-norm rows
/// (each component is bounded by the speed) but its rows are not orthogonal,
/// so the mapping is not a rotation and the magnitude is not preserved in
/// general.
pub fn rotor_frame_velocities(z_dot: f64, x_dot: f64, beta: f64) -> (f64, f64) {
    let (sb, cb) = beta.sin_cos();
    (-sb * z_dot + cb * x_dot, -cb * z_dot + sb * x_dot)
}

fn quartic_rhs(t_rotor: f64, p: &AircraftParams) -> f64 {
    let m0 = t_rotor / (2.0 * p.rho * p.disc_area());
    if p.literal_induced_rhs {
        m0
    } else {
        m0 * m0
    }
}

/// Induced velocity of one rotor of a pair producing `t_pair` total thrust,
/// in local flow `(v_beta_z, v_beta_x)`.
///
/// Solves the momentum-theory quartic
/// `v^4 + 2 v_bz v^3 + (v_bz^2 + v_bx^2) v^2 = rhs` by Newton-Raphson from
/// the static-hover initial guess, declaring convergence when the relative
/// update drops below 1e-3. Zero thrust short-circuits to zero.
pub fn induced_velocity(
    t_pair: f64,
    v_beta_z: f64,
    v_beta_x: f64,
    p: &AircraftParams,
) -> Result<f64, SimError> {
    if t_pair < 0.0 {
        return Err(SimError::Domain(format!(
            "pair thrust must be non-negative, got {t_pair}"
        )));
    }
    if t_pair == 0.0 {
        return Ok(0.0);
    }
    let t_rotor = 0.5 * t_pair;
    let rhs = quartic_rhs(t_rotor, p);
    let cross = v_beta_z * v_beta_z + v_beta_x * v_beta_x;
    let res = |v: f64| ((v + 2.0 * v_beta_z) * v + cross) * v * v - rhs;
    let slope = |v: f64| ((4.0 * v + 6.0 * v_beta_z) * v + 2.0 * cross) * v;

    // Hover solution of the static quartic, used as the initial iterate.
    let mut v = (t_rotor / (2.0 * p.rho * p.disc_area())).sqrt();
    const MAX_ITER: u32 = 100;
    for _ in 0..MAX_ITER {
        let f = res(v);
        let fp = slope(v);
        if fp == 0.0 || !fp.is_finite() || !f.is_finite() {
            return Err(SimError::Solver {
                iterations: MAX_ITER,
                last: v,
                residual: f,
            });
        }
        let mut next = v - f / fp;
        // The physical root is non-negative; halve back instead of jumping
        // across zero when the tangent overshoots.
        if next <= 0.0 {
            next = 0.5 * v;
        }
        let converged = (v - next).abs() <= 1e-3 * next.abs().max(1e-12);
        v = next;
        if converged {
            return Ok(v);
        }
    }
    Err(SimError::Solver {
        iterations: MAX_ITER,
        last: v,
        residual: res(v),
    })
}

/// Local flow state of the free wing carrying a rotor pair at thrust `t_pair`.
pub fn free_wing_local_flow(
    z_dot: f64,
    x_dot: f64,
    beta: f64,
    t_pair: f64,
    p: &AircraftParams,
) -> Result<FreeWingLocalFlow, SimError> {
    let (v_beta_z, v_beta_x) = rotor_frame_velocities(z_dot, x_dot, beta);
    let v_induced = induced_velocity(t_pair, v_beta_z, v_beta_x, p)?;
    let axial = v_beta_x + v_induced;
    let v_r = (axial * axial + v_beta_z * v_beta_z).sqrt();
    let alpha_f = if v_r == 0.0 {
        0.0
    } else {
        v_beta_z.atan2(axial)
    };
    Ok(FreeWingLocalFlow {
        v_beta_z,
        v_beta_x,
        v_induced,
        v_r,
        alpha_f,
    })
}

/// Lift and drag of one free-wing surface; no deflection-limit check, for
/// internal use by the elevator balance solver which may probe beyond the
/// hardware limit before the caller clamps.
pub(crate) fn free_wing_lift_drag_raw(
    flow: &FreeWingLocalFlow,
    delta_e: f64,
    p: &AircraftParams,
) -> (f64, f64) {
    let c_l = p.c_l0 + p.c_l_alpha * flow.alpha_f + p.c_l_delta_e * delta_e;
    let q = 0.5 * p.rho * flow.v_r * flow.v_r;
    let lift = q * p.s_f * c_l;
    let drag = q * p.s_f * (p.c_d0 + c_l * c_l / (PI * p.ar * p.e_oswald));
    (lift, drag)
}

/// Lift and drag of one free-wing surface with elevator deflection `delta_e`.
pub fn free_wing_lift_drag(
    flow: &FreeWingLocalFlow,
    delta_e: f64,
    p: &AircraftParams,
) -> Result<(f64, f64), SimError> {
    if delta_e.abs() > p.delta_e_max + 1e-12 {
        return Err(SimError::Domain(format!(
            "elevator deflection {delta_e} exceeds limit {}",
            p.delta_e_max
        )));
    }
    Ok(free_wing_lift_drag_raw(flow, delta_e, p))
}

fn free_wing_components(
    flow1: &FreeWingLocalFlow,
    flow2: &FreeWingLocalFlow,
    delta_e: f64,
    beta: f64,
    p: &AircraftParams,
) -> (BodyForces, [f64; 4]) {
    // Elevator acts on the aft surface only; the fore surface is plain.
    let (l1f, d1f) = free_wing_lift_drag_raw(flow1, 0.0, p);
    let (l2f, d2f) = free_wing_lift_drag_raw(flow2, delta_e, p);
    let (sb, cb) = beta.sin_cos();
    let (sa1, ca1) = flow1.alpha_f.sin_cos();
    let (sa2, ca2) = flow2.alpha_f.sin_cos();
    let forces = BodyForces {
        f_za: sb * ca1 * l1f + sb * ca2 * l2f + cb * sa1 * d1f + cb * sa2 * d2f,
        f_xa: cb * sa1 * l1f + cb * sa2 * l2f + sb * ca1 * d1f + sb * ca2 * d2f,
        tau_theta: p.l4 * (sb * l1f + cb * d1f) - p.l3 * (sb * l2f + cb * d2f),
    };
    (forces, [l1f, d1f, l2f, d2f])
}

/// Combined force and pitch moment of both free-wing surfaces.
///
/// The fore surface (arm `l4`) pitches nose-up with positive lift; the aft
/// surface (arm `l3`) nose-down. Only the aft surface carries the elevator.
pub fn free_wing_forces(
    flow1: &FreeWingLocalFlow,
    flow2: &FreeWingLocalFlow,
    delta_e: f64,
    beta: f64,
    p: &AircraftParams,
) -> Result<BodyForces, SimError> {
    if delta_e.abs() > p.delta_e_max + 1e-12 {
        return Err(SimError::Domain(format!(
            "elevator deflection {delta_e} exceeds limit {}",
            p.delta_e_max
        )));
    }
    Ok(free_wing_components(flow1, flow2, delta_e, beta, p).0)
}

/// Net free-wing pitch moment for a trial elevator deflection, without the
/// deflection-limit check. Used by the control-side elevator balance.
pub fn free_wing_moment_raw(
    flow1: &FreeWingLocalFlow,
    flow2: &FreeWingLocalFlow,
    delta_e: f64,
    beta: f64,
    p: &AircraftParams,
) -> f64 {
    free_wing_components(flow1, flow2, delta_e, beta, p).0.tau_theta
}

/// Gyroscopic pitch reaction from tilting the spinning rotors at `beta_dot`.
///
/// Rotors alternate spin direction down the index, so the sum telescopes to
/// zero for equal spin speeds.
pub fn tilt_reaction_moment(beta_dot: f64, p: &AircraftParams) -> f64 {
    let mut alternating = 0.0;
    for (j, omega) in p.rotor_speeds.iter().enumerate() {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        alternating += sign * omega;
    }
    p.j_r * alternating * beta_dot
}
