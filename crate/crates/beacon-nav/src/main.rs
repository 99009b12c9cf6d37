use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use beacon_nav::formats;
use beacon_nav::report::{render_csv, render_text};
use beacon_nav::robot::{run_robot, RobotConfig};
use beacon_nav::server::{self, ExperimentConfig, ServerConfig};
use beacon_nav::sim::SimRobot;
use beacon_nav_core::beacon::Footprint;
use beacon_nav_core::evalkit::{compare_systems, Alternative, CompareOptions, System};
use beacon_nav_core::geometry::{AnchorPose, Pose};
use beacon_nav_core::navsim::{NavConfig, RobotState};
use clap::{Parser, Subcommand, ValueEnum};
use tokio_util::sync::CancellationToken;

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "beacon-nav", version, about = "Floor-beacon robot navigation server and tools")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum SystemArg {
    #[value(name = "2d")]
    Baseline2d,
    Mr,
}

impl From<SystemArg> for System {
    fn from(s: SystemArg) -> Self {
        match s {
            SystemArg::Baseline2d => System::Baseline2D,
            SystemArg::Mr => System::Mr,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlternativeArg {
    TwoSided,
    Less,
    Greater,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the operator API, simulator and robot bridge.
    Serve(ServeArgs),
    /// Compare the 2D and MR systems from trial logs and questionnaires.
    Report(ReportArgs),
    /// Run a simulated robot that connects to a server's bridge.
    Robot(RobotArgs),
}

#[derive(clap::Args)]
struct ServeArgs {
    #[arg(long)]
    map: PathBuf,
    #[arg(long)]
    stages: PathBuf,
    #[arg(long)]
    db: PathBuf,
    #[arg(long, default_value_t = 8080)]
    http_port: u16,
    #[arg(long, default_value_t = beacon_nav::bridge::DEFAULT_PORT)]
    bridge_port: u16,
    #[arg(long, default_value_t = 20.0)]
    tick_hz: f64,
    #[arg(long, default_value = "127.0.0.1")]
    bind: IpAddr,
    /// Log trial events and score stages.
    #[arg(long, requires_all = ["participant", "system"])]
    experiment: bool,
    #[arg(long)]
    participant: Option<String>,
    #[arg(long, value_enum)]
    system: Option<SystemArg>,
    /// Trial event log path (default: events-<participant>-<system>.jsonl next to the database).
    #[arg(long)]
    event_log: Option<PathBuf>,
    /// Send goals to a robot connected over the bridge instead of the built-in simulator.
    #[arg(long)]
    external_robot: bool,
    /// Anchor pose in the map frame: x y yaw.
    #[arg(long, num_args = 3, value_names = ["X", "Y", "YAW"], allow_negative_numbers = true)]
    anchor: Option<Vec<f64>>,
    /// Robot and beacon footprint: length width height (meters).
    #[arg(long, num_args = 3, value_names = ["L", "W", "H"])]
    footprint: Option<Vec<f64>>,
    /// Simulated robot start pose: x y yaw.
    #[arg(long, num_args = 3, value_names = ["X", "Y", "YAW"], allow_negative_numbers = true)]
    robot_start: Option<Vec<f64>>,
    /// Simulated seconds per wall-clock second.
    #[arg(long, default_value_t = 1.0)]
    sim_speed: f64,
}

#[derive(clap::Args)]
struct ReportArgs {
    /// Trial event logs (any number of files).
    #[arg(long, required = true, num_args = 1..)]
    events: Vec<PathBuf>,
    /// Questionnaire CSV.
    #[arg(long)]
    sus: Option<PathBuf>,
    /// Also write the report as CSV to this path.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "two-sided")]
    alternative: AlternativeArg,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
}

#[derive(clap::Args)]
struct RobotArgs {
    /// Bridge endpoint to connect to.
    #[arg(long, default_value = "127.0.0.1:10000")]
    endpoint: SocketAddr,
    #[arg(long)]
    map: PathBuf,
    #[arg(long, default_value_t = 50.0)]
    tick_hz: f64,
    #[arg(long, default_value_t = 10.0)]
    pose_hz: f64,
    #[arg(long, num_args = 3, value_names = ["X", "Y", "YAW"], allow_negative_numbers = true)]
    start: Option<Vec<f64>>,
    #[arg(long, num_args = 3, value_names = ["L", "W", "H"])]
    footprint: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1.0)]
    sim_speed: f64,
}

fn triple(v: &Option<Vec<f64>>) -> Option<[f64; 3]> {
    v.as_ref().map(|v| [v[0], v[1], v[2]])
}

fn footprint(v: &Option<Vec<f64>>) -> Result<Footprint, String> {
    match triple(v) {
        Some([l, w, h]) => Footprint::new(l, w, h).map_err(|e| e.to_string()),
        None => Ok(Footprint::default()),
    }
}

fn serve_config(args: ServeArgs) -> Result<ServerConfig, String> {
    let mut config = ServerConfig::new(args.map, args.stages, args.db.clone());
    config.http_port = args.http_port;
    config.bridge_port = args.bridge_port;
    config.tick_hz = args.tick_hz;
    config.bind_ip = args.bind;
    config.external_robot = args.external_robot;
    config.sim_speed = args.sim_speed;
    config.footprint = footprint(&args.footprint)?;
    if let Some([x, y, yaw]) = triple(&args.anchor) {
        config.anchor = AnchorPose::new(Pose::planar(x, y, yaw)).map_err(|e| e.to_string())?;
    }
    if let Some([x, y, yaw]) = triple(&args.robot_start) {
        config.robot_start = RobotState::at(x, y, yaw);
    }
    if args.experiment {
        let participant = args.participant.expect("required by clap");
        let system: System = args.system.expect("required by clap").into();
        let event_log = args.event_log.unwrap_or_else(|| {
            let dir = args.db.parent().map(PathBuf::from).unwrap_or_default();
            dir.join(format!("events-{participant}-{}.jsonl", system.as_str()))
        });
        config.experiment = Some(ExperimentConfig { participant, system, event_log });
    }
    Ok(config)
}

fn init_logging() {
    let filter = tracing_subscriber::EnvFilter::try_from_default_env()
        .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info"));
    tracing_subscriber::fmt().with_env_filter(filter).with_writer(std::io::stderr).init();
}

fn runtime() -> tokio::runtime::Runtime {
    tokio::runtime::Builder::new_multi_thread().enable_all().build().expect("tokio runtime")
}

fn cmd_serve(args: ServeArgs) -> ExitCode {
    let config = match serve_config(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match runtime().block_on(server::serve(config)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn cmd_report(args: ReportArgs) -> ExitCode {
    let mut events = Vec::new();
    for path in &args.events {
        match formats::load_event_log(path) {
            Ok(mut e) => events.append(&mut e),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_CONFIG);
            }
        }
    }
    let sus = match args.sus.as_deref().map(formats::load_sus_csv).transpose() {
        Ok(s) => s.unwrap_or_default(),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let alternative = match args.alternative {
        AlternativeArg::TwoSided => Alternative::TwoSided,
        AlternativeArg::Less => Alternative::Less,
        AlternativeArg::Greater => Alternative::Greater,
    };
    let report = match compare_systems(&events, &sus, &CompareOptions { alternative, alpha: args.alpha }) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    print!("{}", render_text(&report));
    if let Some(path) = &args.csv {
        if let Err(e) = std::fs::write(path, render_csv(&report)) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(EXIT_RUNTIME);
        }
    }
    ExitCode::SUCCESS
}

fn cmd_robot(args: RobotArgs) -> ExitCode {
    let map = match formats::load_map(&args.map) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let fp = match footprint(&args.footprint) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let valid_rate = |r: f64| r > 0.0 && r.is_finite();
    if !(valid_rate(args.tick_hz) && valid_rate(args.pose_hz) && valid_rate(args.sim_speed)) {
        eprintln!("error: rates and simulation speed must be positive");
        return ExitCode::from(EXIT_CONFIG);
    }
    let start = triple(&args.start).map_or_else(RobotState::default, |[x, y, yaw]| RobotState::at(x, y, yaw));
    let sim = match SimRobot::new(&map, &fp, NavConfig::default(), start, args.sim_speed / args.tick_hz) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let config = RobotConfig {
        endpoint: args.endpoint,
        tick_hz: args.tick_hz,
        pose_hz: args.pose_hz,
        reconnect_delay: Duration::from_millis(500),
    };
    runtime().block_on(async move {
        let cancel = CancellationToken::new();
        let robot = tokio::spawn(run_robot(sim, config, cancel.clone()));
        let _ = tokio::signal::ctrl_c().await;
        cancel.cancel();
        let _ = robot.await;
    });
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging();
    match cli.command {
        Cmd::Serve(args) => cmd_serve(args),
        Cmd::Report(args) => cmd_report(args),
        Cmd::Robot(args) => cmd_robot(args),
    }
}
