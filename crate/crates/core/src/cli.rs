//! Command-line driver.
//!
//! Exit codes: 0 success, 1 validation / calibration / config error,
//! 2 I/O error, 3 internal invariant violation, 4 verify bound violation.
//! Machine-readable reports go to stdout, diagnostics to stderr.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::config::{load_config, PipelineConfig};
use crate::error::Error;
use crate::ingest::parse_clip;
use crate::metrics::MetricsWindow;
use crate::scene::{reconstruct, SceneTimeline};
use crate::sim::{project_clip, round_trip_report, simulate_rally, GroundTruthRally};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;
pub const EXIT_BOUND: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "rallyforge", version, about = "3-D tennis scene reconstruction from broadcast tracking data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reconstruct a scene timeline from a clip.
    Reconstruct {
        #[arg(long)]
        clip: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Generate a synthetic clip and its ground truth.
    Simulate {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        /// Gaussian pixel noise sigma (default 0).
        #[arg(long = "noise-px")]
        noise_px: Option<f64>,
        /// Probability of dropping each sample (default 0).
        #[arg(long)]
        dropout: Option<f64>,
        /// Round pixel coordinates to integers.
        #[arg(long)]
        quantize: bool,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Reconstruct a simulated clip and compare it with its ground truth.
    Verify {
        #[arg(long)]
        clip: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Print zone metrics from a scene timeline.
    Metrics {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long, value_enum, default_value_t = Window::Match)]
        window: Window,
        /// Point index; defaults to the last point.
        #[arg(long)]
        point: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Window {
    Match,
    Game,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) => EXIT_IO,
            Error::Planning(_) => EXIT_INTERNAL,
            _ => EXIT_VALIDATION,
        };
        Failure::new(code, e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_IO, format!("reading {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::new(EXIT_IO, format!("writing {}: {e}", path.display())))
}

fn config(path: Option<&Path>, err: &mut dyn Write) -> std::result::Result<PipelineConfig, Failure> {
    let Some(path) = path else {
        return Ok(PipelineConfig::default());
    };
    let (cfg, warnings) = load_config(&read(path)?)?;
    for w in warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    Ok(cfg)
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match command {
        Command::Reconstruct { clip, out: path, config: cfg } => {
            let cfg = config(cfg.as_deref(), err)?;
            let started = Instant::now();
            let clip = parse_clip(&read(&clip)?)?;
            let scene = reconstruct(&clip, &cfg)?;
            write(&path, &scene.to_json())?;
            for w in &scene.warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            let summary = json!({
                "points": scene.points.len(),
                "events": scene.events.len(),
                "camera_keyframes": scene.camera.keyframes.len(),
                "wall_time_ms": started.elapsed().as_secs_f64() * 1e3,
            });
            let _ = writeln!(out, "{summary}");
            Ok(())
        }
        Command::Simulate {
            seed,
            points,
            out: clip_path,
            truth,
            noise_px,
            dropout,
            quantize,
            config: cfg,
        } => {
            let mut sim = config(cfg.as_deref(), err)?.simulator;
            if let Some(s) = seed {
                sim.seed = s;
            }
            if let Some(p) = points {
                sim.points = p;
            }
            if let Some(n) = noise_px {
                sim.pixel_noise_sigma_px = n;
            }
            if let Some(d) = dropout {
                sim.dropout_rate = d;
            }
            sim.quantize_pixels |= quantize;
            let rally = simulate_rally(&sim)?;
            let (doc, truth_doc) = project_clip(&rally, &sim)?;
            write(&clip_path, &serde_json::to_string(&doc).expect("clip serializes"))?;
            write(&truth, &serde_json::to_string(&truth_doc).expect("truth serializes"))?;
            let _ = writeln!(
                out,
                "{}",
                json!({"frames": doc.frames.len(), "points": truth_doc.points.len(), "seed": sim.seed})
            );
            Ok(())
        }
        Command::Verify { clip, truth, config: cfg } => {
            let cfg = config(cfg.as_deref(), err)?;
            let clip_text = read(&clip)?;
            let truth: GroundTruthRally = serde_json::from_str(&read(&truth)?).map_err(Error::from_json)?;
            let clip = parse_clip(&clip_text)?;
            let scene = reconstruct(&clip, &cfg)?;
            let report = round_trip_report(&truth, &scene)?;
            let mut failed = Vec::new();
            if !(report.ball_rmse_m <= cfg.verify.max_ball_rmse_m) {
                failed.push("ball_rmse_m");
            }
            if !(report.player_rmse_m <= cfg.verify.max_player_rmse_m) {
                failed.push("player_rmse_m");
            }
            let doc = json!({
                "report": report,
                "bounds": cfg.verify,
                "pass": failed.is_empty(),
                "failed": failed,
            });
            let _ = writeln!(out, "{doc}");
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Failure::new(
                    EXIT_BOUND,
                    format!("bound violated: {}", failed.join(", ")),
                ))
            }
        }
        Command::Metrics { scene, window, point } => {
            let scene = SceneTimeline::from_json(&read(&scene)?)?;
            let window = match window {
                Window::Match => MetricsWindow::MatchStart,
                Window::Game => MetricsWindow::CurrentGame,
            };
            let point = match point {
                Some(p) => p,
                None => scene
                    .points
                    .len()
                    .checked_sub(1)
                    .ok_or_else(|| Failure::new(EXIT_VALIDATION, "scene has no points"))?,
            };
            let m = scene
                .metrics_for(window, point)
                .ok_or_else(|| Failure::new(EXIT_VALIDATION, format!("no metrics for point {point}")))?;
            let _ = writeln!(out, "{}", serde_json::to_string(m).expect("metrics serialize"));
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(args.iter().copied(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_are_validation_errors() {
        let (code, _, err) = run_args(&["rallyforge", "bogus"]);
        assert_eq!(code, EXIT_VALIDATION);
        assert!(!err.is_empty());
        let (code, out, _) = run_args(&["rallyforge", "--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("reconstruct"));
    }

    #[test]
    fn missing_input_is_io() {
        let (code, _, err) = run_args(&["rallyforge", "reconstruct", "--clip", "/nonexistent/c.json", "--out", "/tmp/x"]);
        assert_eq!(code, EXIT_IO);
        assert!(err.contains("/nonexistent/c.json"));
    }
}
