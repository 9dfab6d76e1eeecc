//! Measurement noise injection and the discrete first-order measurement
//! filter that feeds the control loops.
//!
//! Only altitude, horizontal speed, and pitch are measured; sink rate, pitch
//! rate, position, and tilt are available to the controller directly.

use crate::dynamics::LongitudinalState;
use crate::error::SimError;
use crate::rng::{self, NoiseRng};

/// Additive white measurement noise, one gain per measured channel.
/// A gain of zero disables noise on that channel.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    pub kappa_z: f64,
    pub kappa_x_dot: f64,
    pub kappa_theta: f64,
    pub seed: u64,
    /// Pinned generator identifier; runs are only reproducible across builds
    /// when the algorithm stack matches exactly.
    pub algorithm: String,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            kappa_z: 0.05,
            kappa_x_dot: 0.05,
            kappa_theta: 0.005,
            seed: 0,
            algorithm: rng::ALGORITHM.to_string(),
        }
    }
}

impl NoiseModel {
    pub fn validate(&self) -> Result<(), SimError> {
        for (name, k) in [
            ("kappa_z", self.kappa_z),
            ("kappa_x_dot", self.kappa_x_dot),
            ("kappa_theta", self.kappa_theta),
        ] {
            if !k.is_finite() || k < 0.0 {
                return Err(SimError::Validation(format!(
                    "noise.{name} must be finite and >= 0, got {k}"
                )));
            }
        }
        if self.algorithm != rng::ALGORITHM {
            return Err(SimError::Validation(format!(
                "noise.algorithm: unsupported generator {:?}, expected {:?}",
                self.algorithm,
                rng::ALGORITHM
            )));
        }
        Ok(())
    }

    /// True when every channel gain is zero and measurement is exact.
    pub fn silent(&self) -> bool {
        self.kappa_z == 0.0 && self.kappa_x_dot == 0.0 && self.kappa_theta == 0.0
    }

    /// Copy with all noise gains zeroed (the `--no-noise` override).
    pub fn silenced(&self) -> NoiseModel {
        NoiseModel {
            kappa_z: 0.0,
            kappa_x_dot: 0.0,
            kappa_theta: 0.0,
            ..self.clone()
        }
    }
}

/// One sample of the three measured channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub z_m: f64,
    pub x_dot_m: f64,
    pub theta_m: f64,
}

/// Sample the sensors: truth plus white noise per channel. Draw order is
/// fixed (z, then x_dot, then theta). When all gains are zero the generator
/// is not consulted at all, so noise-free runs leave the stream untouched.
pub fn measure(state: &LongitudinalState, noise: &NoiseModel, rng: &mut NoiseRng) -> Measurement {
    if noise.silent() {
        return Measurement {
            z_m: state.z,
            x_dot_m: state.x_dot,
            theta_m: state.theta,
        };
    }
    let nz = rng.randn();
    let nx = rng.randn();
    let nt = rng.randn();
    Measurement {
        z_m: state.z + noise.kappa_z * nz,
        x_dot_m: state.x_dot + noise.kappa_x_dot * nx,
        theta_m: state.theta + noise.kappa_theta * nt,
    }
}

/// One update of the discrete first-order low-pass:
/// `r_f(k) = (r_f(k-1) + dt * omega * r_m(k)) / (1 + dt * omega)`.
/// The normalization makes the DC gain unity for any positive cutoff.
pub fn filter_step(prev: f64, omega: f64, r_measured: f64, dt: f64) -> f64 {
    (prev + dt * omega * r_measured) / (1.0 + dt * omega)
}

/// Filter memory for the three measured channels. Each channel initializes
/// to its first measurement so startup holds no transient.
#[derive(Debug, Clone, Default)]
pub struct FilterBank {
    z: Option<f64>,
    x_dot: Option<f64>,
    theta: Option<f64>,
}

/// Filtered measurements for one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Filtered {
    pub z_f: f64,
    pub x_dot_f: f64,
    pub theta_f: f64,
}

impl FilterBank {
    pub fn step(&mut self, m: &Measurement, omegas: (f64, f64, f64), dt: f64) -> Filtered {
        fn one(slot: &mut Option<f64>, omega: f64, r_m: f64, dt: f64) -> f64 {
            let next = match *slot {
                None => r_m,
                Some(prev) => filter_step(prev, omega, r_m, dt),
            };
            *slot = Some(next);
            next
        }
        Filtered {
            z_f: one(&mut self.z, omegas.0, m.z_m, dt),
            x_dot_f: one(&mut self.x_dot, omegas.1, m.x_dot_m, dt),
            theta_f: one(&mut self.theta, omegas.2, m.theta_m, dt),
        }
    }
}
