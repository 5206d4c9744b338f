use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{ArgGroup, Parser, Subcommand};
use vocmorph_cli::commands::{self, CommandError, MorphWeights, EXIT_INTERNAL};
use vocmorph_cli::service::{self, AppState};
use vocmorph_core::{AnalysisConfig, WavEncoding};

#[derive(Parser)]
#[command(
    name = "vocmorph",
    version,
    about = "Vocoder analysis, synthesis and voice morphing"
)]
struct Cli {
    /// Seed for the synthesis noise source.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Log progress to standard error.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a mono WAV file into a .vocp parameter file.
    Analyze {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 0.005)]
        frame_period: f64,
        #[arg(long, default_value_t = 60.0)]
        fo_floor: f64,
        #[arg(long, default_value_t = 600.0)]
        fo_ceil: f64,
        #[arg(long)]
        fft_size: Option<usize>,
    },
    /// Synthesize a .vocp file to WAV.
    Synth {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Write 16-bit PCM instead of 32-bit float.
        #[arg(long)]
        pcm16: bool,
    },
    /// Morph a .morb object and synthesize the result.
    #[command(group(ArgGroup::new("w").required(true).args(["rate", "weights"])))]
    Morph {
        object: PathBuf,
        /// Two-instance morphing rate (0 = first instance, 1 = second).
        #[arg(long, allow_negative_numbers = true)]
        rate: Option<f64>,
        /// JSON weight matrix with rows tx, fx, sl, fo, ap.
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        pcm16: bool,
    },
    /// Write a stimulus continuum between the two instances of an object.
    Continuum {
        object: PathBuf,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        to: f64,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        pcm16: bool,
    },
    /// Run the HTTP session service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
        /// Minutes of inactivity before a session expires.
        #[arg(long, default_value_t = 60)]
        idle_minutes: u64,
    },
}

fn encoding(pcm16: bool) -> WavEncoding {
    if pcm16 {
        WavEncoding::Pcm16
    } else {
        WavEncoding::Float32
    }
}

fn run(cli: Cli) -> Result<(), CommandError> {
    match cli.command {
        Command::Analyze {
            input,
            output,
            frame_period,
            fo_floor,
            fo_ceil,
            fft_size,
        } => {
            let cfg = AnalysisConfig {
                frame_period,
                fo_floor,
                fo_ceil,
                fft_size,
            };
            let frames = commands::analyze_file(&input, &output, &cfg)?;
            tracing::info!(frames, output = %output.display(), "analyzed");
        }
        Command::Synth {
            input,
            output,
            pcm16,
        } => {
            commands::synth_file(&input, &output, cli.seed, encoding(pcm16))?;
            tracing::info!(output = %output.display(), "synthesized");
        }
        Command::Morph {
            object,
            rate,
            weights,
            output,
            pcm16,
        } => {
            let w = match (rate, weights) {
                (Some(r), _) => MorphWeights::Rate(r),
                (None, Some(p)) => MorphWeights::File(p),
                (None, None) => unreachable!("clap requires one of --rate/--weights"),
            };
            commands::morph_file(&object, &w, &output, cli.seed, encoding(pcm16))?;
            tracing::info!(output = %output.display(), "morphed");
        }
        Command::Continuum {
            object,
            steps,
            from,
            to,
            output,
            pcm16,
        } => {
            let rates = commands::continuum_rates(steps, from, to)?;
            let files =
                commands::continuum_files(&object, &rates, &output, cli.seed, encoding(pcm16))?;
            for f in files {
                tracing::info!(file = %f.display(), "wrote");
            }
        }
        Command::Serve { addr, idle_minutes } => {
            let rt = tokio::runtime::Runtime::new().map_err(|e| CommandError {
                code: EXIT_INTERNAL,
                message: e.to_string(),
            })?;
            rt.block_on(async {
                let listener = tokio::net::TcpListener::bind(&addr).await?;
                tracing::info!(addr = %listener.local_addr()?, "listening");
                let state = Arc::new(AppState::new(std::time::Duration::from_secs(
                    idle_minutes * 60,
                )));
                service::serve(listener, state).await
            })
            .map_err(|e| CommandError {
                code: EXIT_INTERNAL,
                message: format!("serve: {e}"),
            })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new(level)),
        )
        .with_writer(std::io::stderr)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vocmorph: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
