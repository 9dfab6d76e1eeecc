//! TOML configuration: parsing, defaults, validation, and resolution into
//! the runtime types.
//!
//! Every key is optional and defaults to the stock setup, but unknown keys
//! are rejected so typos cannot silently fall back to defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::control::laws::{law_names, LawSet};
use crate::control::{
    self, default_i_max, AxisGains, FlightMode, GainSet, ModeGains, PlanDirective,
    SwitchThresholds,
};
use crate::error::SimError;
use crate::mission::{default_plan, MissionPlan, Segment, SegmentEntry};
use crate::params::AircraftParams;
use crate::sensing::NoiseModel;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawConfig {
    pub dt: f64,
    pub duration: f64,
    pub output_dir: String,
    pub flags: RawFlags,
    pub aircraft: RawAircraft,
    pub gains: RawGains,
    pub noise: RawNoise,
    pub switch: RawSwitch,
    pub laws: RawLaws,
    pub mission: RawMission,
}

impl Default for RawConfig {
    fn default() -> RawConfig {
        RawConfig {
            dt: 0.1,
            duration: 250.0,
            output_dir: "out".into(),
            flags: RawFlags::default(),
            aircraft: RawAircraft::default(),
            gains: RawGains::default(),
            noise: RawNoise::default(),
            switch: RawSwitch::default(),
            laws: RawLaws::default(),
            mission: RawMission::default(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawFlags {
    /// Keep the literal momentum-theory right-hand side instead of the
    /// dimensionally consistent squared form.
    pub literal_induced_rhs: bool,
    /// Divide the forward-flight lift inversion by the current angle of
    /// attack instead of using the small-angle form.
    pub literal_lift_inversion: bool,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawAircraft {
    pub m: f64,
    pub j_y: f64,
    pub j_r: f64,
    pub rotor_speeds: [f64; 4],
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub l4: f64,
    pub delta_x: f64,
    pub s_w: f64,
    pub s_f: f64,
    pub r: f64,
    pub c_l0: f64,
    pub c_l_alpha: f64,
    pub c_l_delta_e: f64,
    pub c_d0: f64,
    pub ar: f64,
    pub e_oswald: f64,
    pub rho: f64,
    pub g: f64,
    pub t_max: f64,
    pub delta_e_max: f64,
    pub beta_rate: f64,
}

impl Default for RawAircraft {
    fn default() -> RawAircraft {
        let p = AircraftParams::default();
        RawAircraft {
            m: p.m,
            j_y: p.j_y,
            j_r: p.j_r,
            rotor_speeds: p.rotor_speeds,
            l1: p.l1,
            l2: p.l2,
            l3: p.l3,
            l4: p.l4,
            delta_x: p.delta_x,
            s_w: p.s_w,
            s_f: p.s_f,
            r: p.r,
            c_l0: p.c_l0,
            c_l_alpha: p.c_l_alpha,
            c_l_delta_e: p.c_l_delta_e,
            c_d0: p.c_d0,
            ar: p.ar,
            e_oswald: p.e_oswald,
            rho: p.rho,
            g: p.g,
            t_max: p.t_max,
            delta_e_max: p.delta_e_max,
            beta_rate: p.beta_rate,
        }
    }
}

impl RawAircraft {
    fn resolve(&self, flags: &RawFlags) -> AircraftParams {
        AircraftParams {
            m: self.m,
            j_y: self.j_y,
            j_r: self.j_r,
            rotor_speeds: self.rotor_speeds,
            l1: self.l1,
            l2: self.l2,
            l3: self.l3,
            l4: self.l4,
            delta_x: self.delta_x,
            s_w: self.s_w,
            s_f: self.s_f,
            r: self.r,
            c_l0: self.c_l0,
            c_l_alpha: self.c_l_alpha,
            c_l_delta_e: self.c_l_delta_e,
            c_d0: self.c_d0,
            ar: self.ar,
            e_oswald: self.e_oswald,
            rho: self.rho,
            g: self.g,
            t_max: self.t_max,
            delta_e_max: self.delta_e_max,
            beta_rate: self.beta_rate,
            literal_induced_rhs: flags.literal_induced_rhs,
            literal_lift_inversion: flags.literal_lift_inversion,
        }
    }
}

/// Per-mode gain block. The speed-channel gains are optional as a group;
/// a mode with no speed loop (the transitions) leaves them unset.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawModeGains {
    pub k_pz: f64,
    pub k_iz: f64,
    pub k_dz: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_px: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_ix: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_dx: Option<f64>,
    pub k_ptheta: f64,
    pub k_itheta: f64,
    pub k_dtheta: f64,
    pub omega_z: f64,
    pub omega_x: f64,
    pub omega_theta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i_max_z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i_max_x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i_max_theta: Option<f64>,
}

impl RawModeGains {
    fn from_mode_gains(g: &ModeGains) -> RawModeGains {
        RawModeGains {
            k_pz: g.z.kp,
            k_iz: g.z.ki,
            k_dz: g.z.kd,
            k_px: g.x.as_ref().map(|a| a.kp),
            k_ix: g.x.as_ref().map(|a| a.ki),
            k_dx: g.x.as_ref().map(|a| a.kd),
            k_ptheta: g.theta.kp,
            k_itheta: g.theta.ki,
            k_dtheta: g.theta.kd,
            omega_z: g.omega_z,
            omega_x: g.omega_x,
            omega_theta: g.omega_theta,
            i_max_z: None,
            i_max_x: None,
            i_max_theta: None,
        }
    }

    fn resolve(&self, name: &str, caps: [f64; 3], g: f64) -> Result<ModeGains, SimError> {
        let x = match (self.k_px, self.k_ix, self.k_dx) {
            (None, None, None) => None,
            (Some(kp), Some(ki), Some(kd)) => Some(AxisGains {
                kp,
                ki,
                kd,
                i_max: self
                    .i_max_x
                    .unwrap_or_else(|| default_i_max(kp, ki, caps[1], true, g)),
            }),
            _ => {
                return Err(SimError::Validation(format!(
                    "gains.{name}: k_px, k_ix, k_dx must be given together or not at all"
                )))
            }
        };
        Ok(ModeGains {
            z: AxisGains {
                kp: self.k_pz,
                ki: self.k_iz,
                kd: self.k_dz,
                i_max: self
                    .i_max_z
                    .unwrap_or_else(|| default_i_max(self.k_pz, self.k_iz, caps[0], true, g)),
            },
            x,
            theta: AxisGains {
                kp: self.k_ptheta,
                ki: self.k_itheta,
                kd: self.k_dtheta,
                i_max: self.i_max_theta.unwrap_or_else(|| {
                    default_i_max(self.k_ptheta, self.k_itheta, caps[2], false, g)
                }),
            },
            omega_z: self.omega_z,
            omega_x: self.omega_x,
            omega_theta: self.omega_theta,
        })
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawGains {
    pub hover: RawModeGains,
    pub transition: RawModeGains,
    pub forward: RawModeGains,
}

impl Default for RawGains {
    fn default() -> RawGains {
        let g = GainSet::default();
        RawGains {
            hover: RawModeGains::from_mode_gains(&g.hover),
            transition: RawModeGains::from_mode_gains(&g.transition),
            forward: RawModeGains::from_mode_gains(&g.forward),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawNoise {
    pub kappa_z: f64,
    pub kappa_x_dot: f64,
    pub kappa_theta: f64,
    pub seed: u64,
    pub algorithm: String,
}

impl Default for RawNoise {
    fn default() -> RawNoise {
        let n = NoiseModel::default();
        RawNoise {
            kappa_z: n.kappa_z,
            kappa_x_dot: n.kappa_x_dot,
            kappa_theta: n.kappa_theta,
            seed: n.seed,
            algorithm: n.algorithm,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawSwitch {
    pub forward_speed: f64,
    pub capture_speed: f64,
}

impl Default for RawSwitch {
    fn default() -> RawSwitch {
        let s = SwitchThresholds::default();
        RawSwitch {
            forward_speed: s.forward_speed,
            capture_speed: s.capture_speed,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawLaws {
    pub hover: String,
    pub transition_forward: String,
    pub forward: String,
    pub transition_reverse: String,
}

impl Default for RawLaws {
    fn default() -> RawLaws {
        let names = law_names();
        RawLaws {
            hover: names[0].into(),
            transition_forward: names[1].into(),
            forward: names[2].into(),
            transition_reverse: names[3].into(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawMission {
    pub segments: Vec<RawSegment>,
}

impl Default for RawMission {
    fn default() -> RawMission {
        RawMission {
            segments: default_plan()
                .segments
                .iter()
                .map(RawSegment::from_segment)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawSegment {
    pub directive: String,
    pub z_d: f64,
    pub x_dot_d: f64,
    pub theta_d: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_ramp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_dot_ramp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub at_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_dot_below: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_dot_above: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub on_mode: Option<String>,
}

impl RawSegment {
    fn from_segment(s: &Segment) -> RawSegment {
        let mut raw = RawSegment {
            directive: directive_label(s.directive).into(),
            z_d: s.z_d,
            x_dot_d: s.x_dot_d,
            theta_d: s.theta_d,
            z_ramp: s.z_ramp,
            x_dot_ramp: s.x_dot_ramp,
            at_t: None,
            x_dot_below: None,
            x_dot_above: None,
            on_mode: None,
        };
        match s.entry {
            SegmentEntry::Start => {}
            SegmentEntry::AtTime(t) => raw.at_t = Some(t),
            SegmentEntry::XdotBelow(v) => raw.x_dot_below = Some(v),
            SegmentEntry::XdotAbove(v) => raw.x_dot_above = Some(v),
            SegmentEntry::OnMode(m) => raw.on_mode = Some(m.label().into()),
        }
        raw
    }

    fn resolve(&self, index: usize) -> Result<Segment, SimError> {
        let directive = match self.directive.as_str() {
            "hold" => PlanDirective::Hold,
            "convert_forward" => PlanDirective::ConvertForward,
            "convert_reverse" => PlanDirective::ConvertReverse,
            other => {
                return Err(SimError::Validation(format!(
                    "mission.segments[{index}].directive {other:?} is not one of \
                     \"hold\", \"convert_forward\", \"convert_reverse\""
                )))
            }
        };
        let mut entries: Vec<SegmentEntry> = Vec::new();
        if let Some(t) = self.at_t {
            entries.push(SegmentEntry::AtTime(t));
        }
        if let Some(v) = self.x_dot_below {
            entries.push(SegmentEntry::XdotBelow(v));
        }
        if let Some(v) = self.x_dot_above {
            entries.push(SegmentEntry::XdotAbove(v));
        }
        if let Some(m) = &self.on_mode {
            let mode = FlightMode::from_label(m).ok_or_else(|| {
                SimError::Validation(format!(
                    "mission.segments[{index}].on_mode {m:?} is not a flight mode label"
                ))
            })?;
            entries.push(SegmentEntry::OnMode(mode));
        }
        let entry = match (index, entries.len()) {
            (0, 0) => SegmentEntry::Start,
            (0, _) => {
                return Err(SimError::Validation(
                    "mission.segments[0] must not carry an entry condition".into(),
                ))
            }
            (_, 1) => entries[0],
            (_, n) => {
                return Err(SimError::Validation(format!(
                    "mission.segments[{index}] needs exactly one of at_t, x_dot_below, \
                     x_dot_above, on_mode (found {n})"
                )))
            }
        };
        Ok(Segment {
            directive,
            z_d: self.z_d,
            x_dot_d: self.x_dot_d,
            theta_d: self.theta_d,
            z_ramp: self.z_ramp,
            x_dot_ramp: self.x_dot_ramp,
            entry,
        })
    }
}

fn directive_label(d: PlanDirective) -> &'static str {
    match d {
        PlanDirective::Hold => "hold",
        PlanDirective::ConvertForward => "convert_forward",
        PlanDirective::ConvertReverse => "convert_reverse",
    }
}

/// Fully resolved and validated simulation configuration.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub dt: f64,
    pub duration: f64,
    pub output_dir: PathBuf,
    pub params: AircraftParams,
    pub gains: GainSet,
    pub noise: NoiseModel,
    pub switch: SwitchThresholds,
    pub plan: MissionPlan,
    pub law_names: RawLaws,
}

impl Default for SimConfig {
    fn default() -> SimConfig {
        RawConfig::default()
            .resolve()
            .expect("default configuration must resolve")
    }
}

impl SimConfig {
    /// Build the control-law registry entries named by the config.
    pub fn law_set(&self) -> Result<LawSet, SimError> {
        LawSet::from_names(
            &self.law_names.hover,
            &self.law_names.transition_forward,
            &self.law_names.forward,
            &self.law_names.transition_reverse,
        )
    }
}

impl RawConfig {
    pub fn resolve(&self) -> Result<SimConfig, SimError> {
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(SimError::Validation("dt must be finite and > 0".into()));
        }
        if !self.duration.is_finite() || self.duration < 0.0 {
            return Err(SimError::Validation(
                "duration must be finite and >= 0".into(),
            ));
        }
        let params = self.aircraft.resolve(&self.flags);
        params.validate()?;

        let gains = GainSet {
            hover: self
                .gains
                .hover
                .resolve("hover", control::HOVER_TRIM_OFFSET, params.g)?,
            transition: self.gains.transition.resolve(
                "transition",
                control::TRANSITION_TRIM_OFFSET,
                params.g,
            )?,
            forward: self
                .gains
                .forward
                .resolve("forward", control::FORWARD_TRIM_OFFSET, params.g)?,
        };
        validate_gains(&gains)?;
        if gains.hover.x.is_none() {
            return Err(SimError::Validation(
                "gains.hover needs the speed channel (k_px, k_ix, k_dx)".into(),
            ));
        }
        if gains.forward.x.is_none() {
            return Err(SimError::Validation(
                "gains.forward needs the speed channel (k_px, k_ix, k_dx)".into(),
            ));
        }

        let noise = NoiseModel {
            kappa_z: self.noise.kappa_z,
            kappa_x_dot: self.noise.kappa_x_dot,
            kappa_theta: self.noise.kappa_theta,
            seed: self.noise.seed,
            algorithm: self.noise.algorithm.clone(),
        };
        noise.validate()?;

        let switch = SwitchThresholds {
            forward_speed: self.switch.forward_speed,
            capture_speed: self.switch.capture_speed,
        };
        if !switch.forward_speed.is_finite() || switch.forward_speed <= 0.0 {
            return Err(SimError::Validation(
                "switch.forward_speed must be finite and > 0".into(),
            ));
        }
        if !switch.capture_speed.is_finite() || switch.capture_speed <= 0.0 {
            return Err(SimError::Validation(
                "switch.capture_speed must be finite and > 0".into(),
            ));
        }
        if switch.capture_speed >= switch.forward_speed {
            return Err(SimError::Validation(
                "switch.capture_speed must be below switch.forward_speed".into(),
            ));
        }

        let segments: Result<Vec<Segment>, SimError> = self
            .mission
            .segments
            .iter()
            .enumerate()
            .map(|(i, s)| s.resolve(i))
            .collect();
        let plan = MissionPlan {
            segments: segments?,
        };
        plan.validate()?;

        let config = SimConfig {
            dt: self.dt,
            duration: self.duration,
            output_dir: PathBuf::from(&self.output_dir),
            params,
            gains,
            noise,
            switch,
            plan,
            law_names: self.laws.clone(),
        };
        config.law_set()?;
        Ok(config)
    }
}

fn validate_gains(gains: &GainSet) -> Result<(), SimError> {
    for (name, g) in [
        ("hover", &gains.hover),
        ("transition", &gains.transition),
        ("forward", &gains.forward),
    ] {
        let mut axes = vec![("z", &g.z), ("theta", &g.theta)];
        if let Some(x) = &g.x {
            axes.push(("x", x));
        }
        for (axis, a) in axes {
            for (part, v) in [("kp", a.kp), ("ki", a.ki), ("kd", a.kd)] {
                if !v.is_finite() || v < 0.0 {
                    return Err(SimError::Validation(format!(
                        "gains.{name}.{part}{axis} must be finite and >= 0"
                    )));
                }
            }
            // NaN must fail this check too; infinity is a valid clamp.
            if a.i_max.is_nan() || a.i_max <= 0.0 {
                return Err(SimError::Validation(format!(
                    "gains.{name}.i_max_{axis} must be > 0"
                )));
            }
        }
        for (part, v) in [
            ("omega_z", g.omega_z),
            ("omega_x", g.omega_x),
            ("omega_theta", g.omega_theta),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(SimError::Validation(format!(
                    "gains.{name}.{part} must be finite and > 0"
                )));
            }
        }
    }
    Ok(())
}

/// Parse a TOML string into a resolved configuration.
pub fn config_from_str(text: &str) -> Result<SimConfig, SimError> {
    let raw: RawConfig = toml::from_str(text)
        .map_err(|e| SimError::Parse(format!("config parse error: {}", e.message())))?;
    raw.resolve()
}

/// Load a configuration file; `None` loads the built-in defaults.
pub fn load_config(path: Option<&Path>) -> Result<SimConfig, SimError> {
    match path {
        None => RawConfig::default().resolve(),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| SimError::io("reading config", p, e))?;
            config_from_str(&text)
        }
    }
}

/// Command-line overrides applied on top of a loaded configuration.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub dt: Option<f64>,
    pub duration: Option<f64>,
    pub output_dir: Option<PathBuf>,
    pub no_noise: bool,
}

impl Overrides {
    pub fn apply(&self, config: &mut SimConfig) -> Result<(), SimError> {
        if let Some(seed) = self.seed {
            config.noise.seed = seed;
        }
        if let Some(dt) = self.dt {
            if !dt.is_finite() || dt <= 0.0 {
                return Err(SimError::Validation("--dt must be finite and > 0".into()));
            }
            config.dt = dt;
        }
        if let Some(duration) = self.duration {
            if !duration.is_finite() || duration < 0.0 {
                return Err(SimError::Validation(
                    "--duration must be finite and >= 0".into(),
                ));
            }
            config.duration = duration;
        }
        if let Some(dir) = &self.output_dir {
            config.output_dir = dir.clone();
        }
        if self.no_noise {
            config.noise = config.noise.silenced();
        }
        Ok(())
    }
}
