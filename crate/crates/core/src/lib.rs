//! Longitudinal (vertical-plane) flight simulator for a quad tilt-rotor VTOL
//! aircraft whose front and rear rotor pairs are mounted on freely configured
//! wing surfaces that tilt with the rotors.
//!
//! The crate models three degrees of freedom: altitude `Z` (up positive),
//! horizontal position `X`, and pitch `theta`, plus the shared rotor tilt
//! angle `beta` (0 = rotors vertical, thrust up; pi/2 = rotors horizontal,
//! thrust forward). Flight is managed by three discrete control modes (hover,
//! transition, forward) selected by a mode state machine and fed by per-axis
//! PID loops on first-order-filtered noisy measurements.
//!
//! Layout:
//! - [`params`]: physical airframe constants
//! - [`aero`]: rotor, fixed-wing and free-wing force models, induced-velocity solver
//! - [`dynamics`]: force assembly, frame rotation, explicit Euler stepping
//! - [`rng`], [`sensing`]: reproducible measurement noise, measurement filter
//! - [`control`]: PID loops, mode machine, saturation, and the control-law registry
//! - [`mission`]: segment plan, closed-loop mission runner, summary statistics
//! - [`config`], [`log`]: TOML configuration and CSV/summary output

pub mod aero;
pub mod config;
pub mod control;
pub mod dynamics;
pub mod error;
pub mod log;
pub mod mission;
pub mod params;
pub mod rng;
pub mod sensing;

pub use error::SimError;
