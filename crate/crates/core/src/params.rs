use crate::error::SimError;
use std::f64::consts::PI;

/// Physical and aerodynamic constants of the airframe.
///
/// Geometry convention: the rotor pairs sit on the free wings, fore pair a
/// distance `l1` ahead of the center of mass and aft pair `l2` behind it
/// (`delta_x = l1 + l2`). `l4`/`l3` are the fore/aft free-wing aerodynamic
/// center arms. Angles are radians, forces Newtons, lengths meters.
#[derive(Debug, Clone, PartialEq)]
pub struct AircraftParams {
    /// Total mass (kg).
    pub m: f64,
    /// Pitch-axis moment of inertia (kg m^2).
    pub j_y: f64,
    /// Single-rotor spin moment of inertia (kg m^2), for the tilt reaction moment.
    pub j_r: f64,
    /// Rotor spin speeds (rad/s). Alternating spin directions are implied by
    /// index: odd-indexed rotors (1-based: 1 and 3) spin positive, the rest
    /// negative, so equal entries cancel exactly in the tilt reaction sum.
    pub rotor_speeds: [f64; 4],
    /// Fore rotor-pair thrust arm (m).
    pub l1: f64,
    /// Aft rotor-pair thrust arm (m).
    pub l2: f64,
    /// Aft free-wing moment arm (m).
    pub l3: f64,
    /// Fore free-wing moment arm (m).
    pub l4: f64,
    /// Rotor pair separation, must equal l1 + l2 (m).
    pub delta_x: f64,
    /// Fixed (main) wing reference area (m^2).
    pub s_w: f64,
    /// Free-wing reference area per surface (m^2).
    pub s_f: f64,
    /// Rotor disc radius (m).
    pub r: f64,
    /// Lift coefficient at zero angle of attack (shared by all surfaces).
    pub c_l0: f64,
    /// Lift-curve slope (1/rad).
    pub c_l_alpha: f64,
    /// Free-wing elevator lift effectiveness (1/rad).
    pub c_l_delta_e: f64,
    /// Parasite drag coefficient.
    pub c_d0: f64,
    /// Wing aspect ratio (induced-drag model).
    pub ar: f64,
    /// Oswald span efficiency, in (0, 1].
    pub e_oswald: f64,
    /// Air density (kg/m^3).
    pub rho: f64,
    /// Gravitational acceleration (m/s^2).
    pub g: f64,
    /// Maximum thrust of one rotor pair (N).
    pub t_max: f64,
    /// Elevator deflection limit (rad).
    pub delta_e_max: f64,
    /// Tilt rate magnitude used by the transition laws (rad/s).
    pub beta_rate: f64,
    /// Keep the induced-velocity quartic right-hand side in its literal
    /// (dimensionally short) form instead of the squared momentum-theory form.
    pub literal_induced_rhs: bool,
    /// Keep the forward-mode lift inversion's trailing current-alpha divisor
    /// instead of the small-angle form.
    pub literal_lift_inversion: bool,
}

impl Default for AircraftParams {
    fn default() -> Self {
        AircraftParams {
            m: 15.0,
            j_y: 8.0,
            j_r: 0.02,
            rotor_speeds: [320.0, 320.0, 320.0, 320.0],
            l1: 1.0,
            l2: 1.0,
            l3: 1.0,
            l4: 1.0,
            delta_x: 2.0,
            s_w: 1.2,
            s_f: 0.004,
            r: 0.5,
            c_l0: 0.0,
            c_l_alpha: 1.8,
            c_l_delta_e: 2.0,
            c_d0: 0.022,
            ar: 3.0,
            e_oswald: 0.7,
            rho: 1.225,
            g: 9.81,
            t_max: 160.0,
            delta_e_max: 25.0_f64.to_radians(),
            beta_rate: 8.0_f64.to_radians(),
            literal_induced_rhs: false,
            literal_lift_inversion: false,
        }
    }
}

impl AircraftParams {
    /// Rotor disc area (m^2).
    pub fn disc_area(&self) -> f64 {
        PI * self.r * self.r
    }

    /// Semantic checks beyond TOML deserialization. Returns the first
    /// violation, naming the offending field.
    pub fn validate(&self) -> Result<(), SimError> {
        let positive: &[(&str, f64)] = &[
            ("m", self.m),
            ("j_y", self.j_y),
            ("l1", self.l1),
            ("l2", self.l2),
            ("l3", self.l3),
            ("l4", self.l4),
            ("delta_x", self.delta_x),
            ("s_w", self.s_w),
            ("s_f", self.s_f),
            ("r", self.r),
            ("rho", self.rho),
            ("g", self.g),
            ("t_max", self.t_max),
            ("delta_e_max", self.delta_e_max),
            ("beta_rate", self.beta_rate),
            ("ar", self.ar),
            ("c_l_alpha", self.c_l_alpha),
        ];
        for (name, v) in positive {
            if !v.is_finite() || *v <= 0.0 {
                return Err(SimError::Validation(format!(
                    "aircraft.{name} must be finite and > 0, got {v}"
                )));
            }
        }
        if !self.j_r.is_finite() || self.j_r < 0.0 {
            return Err(SimError::Validation(format!(
                "aircraft.j_r must be finite and >= 0, got {}",
                self.j_r
            )));
        }
        for (j, w) in self.rotor_speeds.iter().enumerate() {
            if !w.is_finite() || *w < 0.0 {
                return Err(SimError::Validation(format!(
                    "aircraft.rotor_speeds[{j}] must be finite and >= 0, got {w}"
                )));
            }
        }
        if (self.l1 + self.l2 - self.delta_x).abs() > 1e-9 {
            return Err(SimError::Validation(format!(
                "aircraft.delta_x must equal l1 + l2: {} + {} != {}",
                self.l1, self.l2, self.delta_x
            )));
        }
        if !(self.e_oswald > 0.0 && self.e_oswald <= 1.0) {
            return Err(SimError::Validation(format!(
                "aircraft.e_oswald must lie in (0, 1], got {}",
                self.e_oswald
            )));
        }
        if !self.c_l0.is_finite() || !self.c_d0.is_finite() || self.c_d0 < 0.0 {
            return Err(SimError::Validation(
                "aircraft.c_l0 must be finite and c_d0 finite and >= 0".into(),
            ));
        }
        if !self.c_l_delta_e.is_finite() || self.c_l_delta_e <= 0.0 {
            return Err(SimError::Validation(format!(
                "aircraft.c_l_delta_e must be finite and > 0, got {}",
                self.c_l_delta_e
            )));
        }
        // Hover must be reachable: two pairs at t_max outlift the weight.
        if 2.0 * self.t_max <= self.m * self.g {
            return Err(SimError::Validation(format!(
                "aircraft.t_max too small: 2 * {} <= m * g = {}",
                self.t_max,
                self.m * self.g
            )));
        }
        Ok(())
    }
}
