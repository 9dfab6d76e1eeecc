use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tiltsim::aero::induced_velocity;
use tiltsim::config::{load_config, Overrides, SimConfig};
use tiltsim::log::{summary_text, write_summary, write_trajectory_csv};
use tiltsim::mission::{hover_plan, run_mission, MissionContext, MissionStatus, MissionSummary};
use tiltsim::SimError;

/// Longitudinal simulation of a quad tilt-rotor tail-sitter hybrid UAV.
#[derive(Parser)]
#[command(name = "tiltsim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Configuration file (TOML); omit for built-in defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for trajectory.csv and summary.txt.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Measurement noise seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Integration step (s).
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Simulated time (s).
    #[arg(long, global = true)]
    duration: Option<f64>,
    /// Write angles and angular rates in degrees instead of radians.
    #[arg(long, global = true)]
    degrees: bool,
    /// Disable measurement noise.
    #[arg(long, global = true)]
    no_noise: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Fly the configured mission plan.
    Run(CommonArgs),
    /// Climb to altitude and hold position (ignores the configured plan).
    Hover {
        #[command(flatten)]
        common: CommonArgs,
        /// Altitude to hold (m).
        #[arg(long, default_value_t = 50.0)]
        alt: f64,
    },
    /// Print the analytic hover trim and exit.
    Trim(CommonArgs),
    /// Re-run the mission over a range of one numeric config key.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Dotted config key, e.g. "gains.hover.k_pz" or "aircraft.m".
        #[arg(long)]
        key: String,
        /// First value of the range.
        #[arg(long)]
        from: f64,
        /// Last value of the range.
        #[arg(long)]
        to: f64,
        /// Number of evenly spaced values (at least 2).
        #[arg(long, default_value_t = 5)]
        steps: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(common) => {
            with_config(&common, |config| fly(config, None, common.degrees))
        }
        Command::Hover { ref common, alt } => {
            with_config(common, |config| fly(config, Some(alt), common.degrees))
        }
        Command::Trim(ref common) => with_config(common, print_trim),
        Command::Sweep {
            ref common,
            ref key,
            from,
            to,
            steps,
        } => sweep(common, key, from, to, steps),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn with_config(
    common: &CommonArgs,
    body: impl FnOnce(SimConfig) -> Result<ExitCode, SimError>,
) -> Result<ExitCode, SimError> {
    let mut config = load_config(common.config.as_deref())?;
    overrides_of(common).apply(&mut config)?;
    body(config)
}

fn overrides_of(common: &CommonArgs) -> Overrides {
    Overrides {
        seed: common.seed,
        dt: common.dt,
        duration: common.duration,
        output_dir: common.out.clone(),
        no_noise: common.no_noise,
    }
}

fn fly(config: SimConfig, hover_alt: Option<f64>, degrees: bool) -> Result<ExitCode, SimError> {
    let laws = config.law_set()?;
    let plan = match hover_alt {
        Some(alt) => hover_plan(alt),
        None => config.plan.clone(),
    };
    plan.validate()?;
    let ctx = MissionContext {
        params: &config.params,
        gains: &config.gains,
        laws: &laws,
        noise: &config.noise,
        switch: &config.switch,
    };
    let (records, summary) = run_mission(&plan, &ctx, config.dt, config.duration);

    std::fs::create_dir_all(&config.output_dir)
        .map_err(|e| SimError::io("creating output directory", &config.output_dir, e))?;
    write_trajectory_csv(&config.output_dir.join("trajectory.csv"), &records, degrees)?;
    write_summary(&config.output_dir.join("summary.txt"), &summary)?;

    print!("{}", summary_text(&summary));
    println!(
        "\n{} steps logged to {}",
        records.len(),
        config.output_dir.display()
    );
    Ok(exit_of(&summary))
}

fn exit_of(summary: &MissionSummary) -> ExitCode {
    match &summary.status {
        MissionStatus::Completed => ExitCode::SUCCESS,
        MissionStatus::Failed { exit_code, .. } => ExitCode::from(*exit_code as u8),
    }
}

fn print_trim(config: SimConfig) -> Result<ExitCode, SimError> {
    let p = &config.params;
    let weight = p.m * p.g;
    let per_pair = weight / 2.0;
    let v_hover = induced_velocity(per_pair, 0.0, 0.0, p)?;
    println!("hover trim (beta = 0, theta = 0):");
    println!("  weight            {weight:.3} N");
    println!("  thrust per pair   {per_pair:.3} N");
    println!("  thrust per rotor  {:.3} N", per_pair / 2.0);
    println!("  induced velocity  {v_hover:.3} m/s");
    println!(
        "  throttle margin   {:.1} % of max",
        100.0 * weight / (2.0 * p.t_max)
    );
    let alpha_max = std::f64::consts::PI / 18.0;
    let v_wing = (2.0 * weight / (p.rho * p.s_w * p.c_l_alpha * alpha_max)).sqrt();
    println!("level flight on the fixed wing at the pitch-demand limit:");
    println!("  minimum airspeed  {v_wing:.3} m/s");
    Ok(ExitCode::SUCCESS)
}

fn sweep(
    common: &CommonArgs,
    key: &str,
    from: f64,
    to: f64,
    steps: usize,
) -> Result<ExitCode, SimError> {
    if steps < 2 {
        return Err(SimError::Validation("--steps must be at least 2".into()));
    }
    let base: toml::Value = match &common.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| SimError::io("reading config", p, e))?;
            text.parse()
                .map_err(|e: toml::de::Error| SimError::Parse(format!("config parse error: {}", e.message())))?
        }
        None => toml::Value::try_from(tiltsim::config::RawConfig::default())
            .map_err(|e| SimError::Parse(format!("default config serialization: {e}")))?,
    };

    println!(
        "{:>14}  {:>10}  {:>12}  {:>12}  {:>10}",
        key, "status", "max|Z-Z_d|", "settle (s)", "final X_dot"
    );
    for i in 0..steps {
        let value = from + (to - from) * i as f64 / (steps - 1) as f64;
        let mut patched = base.clone();
        set_key(&mut patched, key, value)?;
        let raw: tiltsim::config::RawConfig = patched
            .try_into()
            .map_err(|e: toml::de::Error| SimError::Parse(format!("config parse error: {}", e.message())))?;
        let mut config = raw.resolve()?;
        overrides_of(common).apply(&mut config)?;
        let laws = config.law_set()?;
        let ctx = MissionContext {
            params: &config.params,
            gains: &config.gains,
            laws: &laws,
            noise: &config.noise,
            switch: &config.switch,
        };
        let (records, summary) = run_mission(&config.plan, &ctx, config.dt, config.duration);
        let status = match &summary.status {
            MissionStatus::Completed => "completed".to_string(),
            MissionStatus::Failed { step, .. } => format!("failed@{step}"),
        };
        let max_dev = summary
            .windows
            .iter()
            .map(|w| w.max_z_dev)
            .fold(0.0f64, f64::max);
        let settle = summary
            .windows
            .first()
            .and_then(|w| w.settle_t)
            .map(|t| format!("{t:.1}"))
            .unwrap_or_else(|| "-".into());
        let final_xdot = records
            .last()
            .map(|r| format!("{:.2}", r.state.x_dot))
            .unwrap_or_else(|| "-".into());
        println!(
            "{value:>14.6}  {status:>10}  {max_dev:>12.3}  {settle:>12}  {final_xdot:>10}"
        );
    }
    Ok(ExitCode::SUCCESS)
}

/// Set a dotted-path key to a float in a parsed TOML document.
fn set_key(root: &mut toml::Value, path: &str, value: f64) -> Result<(), SimError> {
    let mut node = root;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let table = node.as_table_mut().ok_or_else(|| {
            SimError::Validation(format!("sweep key {path:?}: {part:?} is not a table"))
        })?;
        if i + 1 == parts.len() {
            match table.get(*part) {
                Some(toml::Value::Integer(_)) | Some(toml::Value::Float(_)) | None => {}
                Some(_) => {
                    return Err(SimError::Validation(format!(
                        "sweep key {path:?} is not numeric"
                    )))
                }
            }
            table.insert(part.to_string(), toml::Value::Float(value));
            return Ok(());
        }
        node = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(Default::default()));
    }
    Err(SimError::Validation(format!("sweep key {path:?} is empty")))
}
