//! End-to-end acceptance checks. Each test prints one `ACCEPTANCE n PASS`
//! or `ACCEPTANCE n FAIL` line (visible with `--nocapture`) and asserts the
//! same verdict, so a failure both fails the build and names the criterion.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use tiltsim::aero::{induced_velocity, tilt_reaction_moment};
use tiltsim::config::SimConfig;
use tiltsim::control::{allocate_pair, FlightMode};
use tiltsim::dynamics::{advance, LongitudinalState};
use tiltsim::mission::{hover_plan, run_mission, MissionContext, MissionSummary, TrajectoryRecord};
use tiltsim::params::AircraftParams;
use tiltsim::sensing::filter_step;

/// Allocation identity tolerance. The pair solve is one multiply, one
/// subtract and one divide, so anything past a few ulps of slack signals a
/// wrong formula rather than roundoff.
const ALLOC_REL_TOL: f64 = 1e-9;

/// Solver cross-check tolerance. Newton-Raphson stops on a 1e-3 relative
/// update, so 0.1% agreement is what the stop rule itself guarantees.
const SOLVER_REL_TOL: f64 = 1e-3;

/// Filter step-response tolerance, matching the six digits of the
/// hand-iterated difference equation below.
const FILTER_STEP_TOL: f64 = 1e-6;

/// Ballistic closed-form tolerance. A few hundred explicit Euler steps
/// accumulate at most a few hundred ulps of like-signed rounding.
const BALLISTIC_REL_TOL: f64 = 1e-12;

/// Hover capture bands and deadline: altitude within 0.1 m and ground speed
/// within 0.05 m/s, both held for the rest of the run, inside 60 s.
const HOVER_Z_BAND: f64 = 0.1;
const HOVER_XDOT_BAND: f64 = 0.05;
const HOVER_SETTLE_DEADLINE: f64 = 60.0;

/// Steady-state RMS bound on the filtered altitude error under default
/// measurement noise, evaluated after the settle deadline.
const HOVER_RMS_LIMIT: f64 = 0.5;

/// Altitude excursion allowed while either conversion is in progress.
const TRANSITION_DEV_LIMIT: f64 = 5.0;

/// Ground speed that hands TransitionForward over to Forward (strict).
const FORWARD_SWITCH_SPEED: f64 = 57.0;

/// Full tilt travel at the fixed tilt rate: 90 deg at 8 deg/s.
const TILT_SWING_TIME: f64 = 11.25;

/// Touchdown sink-rate limit (m/s).
const TOUCHDOWN_SINK_LIMIT: f64 = 0.2;

fn report(n: u32, ok: bool, detail: &str) {
    println!("ACCEPTANCE {n} {}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n}: {detail}");
}

/// Test-local generator so the sampled inputs are independent of the
/// simulator's own RNG.
struct SplitMix64(u64);

impl SplitMix64 {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        lo + (hi - lo) * u
    }
}

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1.0)
}

#[test]
fn acceptance_1_allocation_identity() {
    let p = AircraftParams::default();
    let mut rng = SplitMix64(0x1005);
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut accepted = 0u32;
    while accepted < 10_000 {
        let t_t = rng.range(0.0, 2.0 * p.t_max);
        let u_theta = rng.range(-500.0, 500.0);
        let beta = rng.range(0.0, FRAC_PI_2);
        if beta.cos() <= 0.05 {
            continue;
        }
        accepted += 1;
        let (t1, t2) = allocate_pair(t_t, u_theta, beta, &p);
        worst = worst
            .max(rel_err(t1 + t2, t_t))
            .max(rel_err((t1 * p.l1 - t2 * p.l2) * beta.cos(), u_theta));
    }
    let elapsed = start.elapsed();
    let ok = worst < ALLOC_REL_TOL && elapsed < Duration::from_secs(1);
    report(1, ok, &format!("worst rel err {worst:.3e}, took {elapsed:?}"));
}

/// Independent root find for the induced-velocity momentum balance
/// v^2 ((v + 2 v_bz) v + v_bz^2 + v_bx^2) = (T_rotor / (2 rho A))^2.
/// For v_bz >= 0 the left side is strictly increasing in v > 0, so the
/// expanding bracket holds exactly one root.
fn bisect_induced(t_pair: f64, v_bz: f64, v_bx: f64, p: &AircraftParams) -> f64 {
    let m0 = 0.5 * t_pair / (2.0 * p.rho * PI * p.r * p.r);
    let rhs = m0 * m0;
    let g = |v: f64| ((v + 2.0 * v_bz) * v + v_bz * v_bz + v_bx * v_bx) * v * v - rhs;
    let mut lo = 0.0f64;
    let mut hi = m0.sqrt().max(1.0);
    while g(hi) < 0.0 {
        hi *= 2.0;
    }
    while hi - lo > 1e-9 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn acceptance_2_induced_velocity_solver() {
    let p = AircraftParams::default();
    let mut rng = SplitMix64(0x2005);
    let start = Instant::now();
    let mut worst = 0.0f64;
    // Operating envelope: pair thrust up to twice the rated pair maximum,
    // in-disc flow to 50 m/s, axial flow to 70 m/s. Reversed axial inflow is
    // excluded; momentum theory is multi-rooted there and neither solver is
    // meaningful.
    for _ in 0..1_000 {
        let t_pair = rng.range(1.0, 2.0 * p.t_max);
        let v_bz = rng.range(0.0, 50.0);
        let v_bx = rng.range(0.0, 70.0);
        let nr = induced_velocity(t_pair, v_bz, v_bx, &p).expect("solver diverged in envelope");
        let oracle = bisect_induced(t_pair, v_bz, v_bx, &p);
        worst = worst.max((nr - oracle).abs() / oracle.abs().max(1e-12));
    }
    // Static case against the closed form for one rotor of the pair.
    let mut worst_hover = 0.0f64;
    for t_pair in [1.0, 10.0, 40.0, 160.0, 320.0] {
        let nr = induced_velocity(t_pair, 0.0, 0.0, &p).expect("hover solve failed");
        let closed = (0.5 * t_pair / (2.0 * p.rho * PI * p.r * p.r)).sqrt();
        worst_hover = worst_hover.max((nr - closed).abs() / closed);
    }
    let elapsed = start.elapsed();
    let ok = worst < SOLVER_REL_TOL && worst_hover < SOLVER_REL_TOL && elapsed < Duration::from_secs(1);
    report(
        2,
        ok,
        &format!("oracle worst {worst:.3e}, hover worst {worst_hover:.3e}, took {elapsed:?}"),
    );
}

#[test]
fn acceptance_3_filter_response() {
    let (omega, dt) = (3.0, 0.1);
    // DC gain: a state already equal to a constant input must reproduce it
    // bit for bit, since numerator and denominator share the factor 1 + dt w.
    let dc_exact = [0.0, 1.0, 50.0, -3.2, 1e6, PI, 57.3, 0.1]
        .iter()
        .all(|&c| filter_step(c, omega, c, dt) == c);
    // Unit step from zero state, iterated by hand:
    // r1 = 0.3 / 1.3 = 0.230769..., r2 = (r1 + 0.3) / 1.3 = 0.408284...
    let r1 = filter_step(0.0, omega, 1.0, dt);
    let r2 = filter_step(r1, omega, 1.0, dt);
    let step_ok = (r1 - 0.230769).abs() < FILTER_STEP_TOL && (r2 - 0.408284).abs() < FILTER_STEP_TOL;
    report(3, dc_exact && step_ok, &format!("dc_exact={dc_exact} r1={r1} r2={r2}"));
}

#[test]
fn acceptance_4_integrator_ordering() {
    let p = AircraftParams::default();
    let dt = 0.1;
    let rest = LongitudinalState::default();

    // One free-fall step: position advances on the old (zero) velocity, so
    // altitude is untouched while the velocity picks up exactly -g dt.
    let s1 = advance(&rest, (-p.g, 0.0, 0.0), 0.0, dt);
    let one_step_ok = s1.z == 0.0 && s1.z_dot == dt * -p.g && s1.x == 0.0 && s1.theta == 0.0;

    // k steps against the discrete ballistic closed form
    // z_dot(k) = -g k dt, z(k) = -g dt^2 k (k - 1) / 2.
    let mut s = rest;
    let mut worst = 0.0f64;
    for k in 1..=400u32 {
        s = advance(&s, (-p.g, 0.0, 0.0), 0.0, dt);
        let kf = f64::from(k);
        worst = worst
            .max(rel_err(s.z_dot, -p.g * kf * dt))
            .max(rel_err(s.z, -p.g * dt * dt * kf * (kf - 1.0) / 2.0));
    }
    let ok = one_step_ok && worst < BALLISTIC_REL_TOL;
    report(4, ok, &format!("one_step_ok={one_step_ok} ballistic worst {worst:.3e}"));
}

#[test]
fn acceptance_5_tilt_reaction_cancellation() {
    // Default rotor set spins equal speeds in alternating directions; the
    // reaction sum must vanish identically, not merely get small.
    let p = AircraftParams::default();
    let ok = [-0.5, -0.14, 0.0, 0.14, 0.5]
        .iter()
        .all(|&beta_dot| tilt_reaction_moment(beta_dot, &p) == 0.0);
    report(5, ok, "tilt reaction nonzero for counter-rotating equal speeds");
}

fn hover_ctx_run(
    config: &SimConfig,
    noise: &tiltsim::sensing::NoiseModel,
    duration: f64,
) -> (Vec<TrajectoryRecord>, MissionSummary, Duration) {
    let laws = config.law_set().expect("law registry");
    let ctx = MissionContext {
        params: &config.params,
        gains: &config.gains,
        laws: &laws,
        noise,
        switch: &config.switch,
    };
    let plan = hover_plan(50.0);
    let start = Instant::now();
    let (records, summary) = run_mission(&plan, &ctx, config.dt, duration);
    let wall = start.elapsed();
    (records, summary, wall)
}

#[test]
fn acceptance_6_hover_hold() {
    let config = SimConfig::default();
    let budget = Duration::from_millis(500);

    // Noise-free leg: both bands must hold from some instant before the
    // deadline through the end of the run.
    let silent = config.noise.silenced();
    let (records, summary, wall_a) = hover_ctx_run(&config, &silent, 120.0);
    let mut settle = 0.0f64;
    for r in &records {
        if (r.state.z - 50.0).abs() >= HOVER_Z_BAND || r.state.x_dot.abs() >= HOVER_XDOT_BAND {
            settle = r.t + config.dt;
        }
    }
    let clean_ok = summary.status.is_completed() && settle < HOVER_SETTLE_DEADLINE;

    // Default noise leg: RMS of the filtered altitude error over the settled
    // tail of the run.
    let (noisy, nsummary, wall_b) = hover_ctx_run(&config, &config.noise, 120.0);
    let tail: Vec<f64> = noisy
        .iter()
        .filter(|r| r.t >= HOVER_SETTLE_DEADLINE)
        .map(|r| r.filt.z_f - 50.0)
        .collect();
    let rms = (tail.iter().map(|e| e * e).sum::<f64>() / tail.len() as f64).sqrt();
    let noisy_ok = nsummary.status.is_completed() && rms < HOVER_RMS_LIMIT;

    let ok = clean_ok && noisy_ok && wall_a < budget && wall_b < budget;
    report(
        6,
        ok,
        &format!("settle={settle:.1}s rms={rms:.3}m walls {wall_a:?}/{wall_b:?}"),
    );
}

/// The default mission, run once and shared by the criteria that inspect it.
fn default_mission() -> &'static (Vec<TrajectoryRecord>, MissionSummary, Duration) {
    static MISSION: OnceLock<(Vec<TrajectoryRecord>, MissionSummary, Duration)> = OnceLock::new();
    MISSION.get_or_init(|| {
        let config = SimConfig::default();
        let laws = config.law_set().expect("law registry");
        let ctx = MissionContext {
            params: &config.params,
            gains: &config.gains,
            laws: &laws,
            noise: &config.noise,
            switch: &config.switch,
        };
        let start = Instant::now();
        let (records, summary) = run_mission(&config.plan, &ctx, config.dt, config.duration);
        let wall = start.elapsed();
        (records, summary, wall)
    })
}

#[test]
fn acceptance_7_forward_conversion() {
    let (records, summary, wall) = default_mission();
    let dt = records[1].t - records[0].t;

    // Tilt ramp: from the first TransitionForward sample (still untilted,
    // states log before stepping) the tilt must hit the forward stop in one
    // full swing, quantized up to the next whole step.
    let k_tf = records
        .iter()
        .position(|r| r.mode == FlightMode::TransitionForward)
        .expect("never entered TransitionForward");
    let k_90 = records
        .iter()
        .position(|r| r.state.beta >= FRAC_PI_2 - 1e-12)
        .expect("tilt never reached the forward stop");
    let swing = records[k_90].t - records[k_tf].t;
    let swing_ok = records[k_tf].state.beta == 0.0
        && swing >= TILT_SWING_TIME - 1e-9
        && swing <= TILT_SWING_TIME + dt + 1e-9;
    // Constant-rate ramp: every step but the final clamped one advances by
    // exactly beta_rate dt.
    let p = &SimConfig::default().params;
    let ramp_ok = (k_tf..k_90 - 1).all(|i| {
        (records[i + 1].state.beta - records[i].state.beta - p.beta_rate * dt).abs() < 1e-12
    });

    // Mode handover on the first filtered ground-speed sample beyond the
    // threshold, strictly.
    let k_fwd = records
        .iter()
        .position(|r| r.mode == FlightMode::Forward)
        .expect("never entered Forward");
    let switch_ok = records[k_fwd].filt.x_dot_f > FORWARD_SWITCH_SPEED
        && (k_tf..k_fwd).all(|i| records[i].filt.x_dot_f <= FORWARD_SWITCH_SPEED);

    let tf_dev = summary
        .windows
        .iter()
        .filter(|w| w.mode == FlightMode::TransitionForward)
        .map(|w| w.max_z_dev)
        .fold(0.0f64, f64::max);

    let ok = summary.status.is_completed()
        && swing_ok
        && ramp_ok
        && switch_ok
        && tf_dev <= TRANSITION_DEV_LIMIT
        && *wall < Duration::from_secs(2);
    report(
        7,
        ok,
        &format!(
            "swing={swing:.2}s ramp_ok={ramp_ok} switch_ok={switch_ok} tf_dev={tf_dev:.2}m wall={wall:?}"
        ),
    );
}

#[test]
fn acceptance_8_reverse_conversion_and_landing() {
    let (_, summary, _) = default_mission();
    let tr_dev = summary
        .windows
        .iter()
        .filter(|w| w.mode == FlightMode::TransitionReverse)
        .map(|w| w.max_z_dev)
        .fold(0.0f64, f64::max);
    let touchdown = summary.touchdown;
    let sink_ok = touchdown.is_some_and(|td| td.sink_rate.abs() < TOUCHDOWN_SINK_LIMIT);
    let ok = summary.status.is_completed() && sink_ok && tr_dev <= TRANSITION_DEV_LIMIT;
    report(
        8,
        ok,
        &format!("touchdown={touchdown:?} tr_dev={tr_dev:.2}m status={:?}", summary.status),
    );
}

#[test]
fn acceptance_9_determinism() {
    let exe = env!("CARGO_BIN_EXE_tiltsim");
    let dir = tempfile::tempdir().expect("tempdir");
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let status = Command::new(exe)
            .args(["run", "--seed", "7", "--out"])
            .arg(&out)
            .output()
            .expect("launch simulator");
        assert!(status.status.success(), "run into {name} failed: {status:?}");
        outputs.push(std::fs::read(out.join("trajectory.csv")).expect("read trajectory"));
    }
    let ok = outputs[0] == outputs[1] && !outputs[0].is_empty();
    report(9, ok, "same seed and config produced differing trajectory bytes");
}

#[test]
fn acceptance_10_cruise_thrift() {
    let (_, summary, _) = default_mission();
    let mean_of = |mode: FlightMode| {
        summary
            .thrust
            .iter()
            .find(|s| s.mode == mode)
            .map(|s| s.mean_total)
            .expect("mode missing from thrust stats")
    };
    let hover = mean_of(FlightMode::Hover);
    let forward = mean_of(FlightMode::Forward);
    let ok = forward < hover;
    report(10, ok, &format!("forward mean {forward:.1} N vs hover mean {hover:.1} N"));
}
