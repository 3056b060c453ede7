use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use modal_sep::network::NetworkParams;
use modal_sep::pipeline::{
    load_input, preprocess, run_pipeline, run_pipeline_with_params, thread_count_from_env, train_stage,
    PipelineError, RunConfig, RunReport,
};
use modal_sep::record::atomic_write;

#[derive(Parser)]
#[command(name = "modal-sep", version, about = "Output-only modal identification with a self-coding network")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Overrides every seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Write the input record (simulated or ingested) and its reference modes.
    Simulate(Common),
    /// Train the network and write its weights, loss trace and the config
    /// pinned to the kept training window.
    Train(Common),
    /// Identify modes with previously trained weights.
    Identify {
        #[command(flatten)]
        common: Common,
        /// Weights written by `train`.
        #[arg(long)]
        params: PathBuf,
    },
    /// Print the table of an existing report.
    Report {
        /// `report.json` from a previous run.
        report: PathBuf,
    },
    /// Simulate or ingest, train, identify and report.
    Run(Common),
}

fn load_config(common: &Common) -> Result<RunConfig, PipelineError> {
    let mut cfg = RunConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg = cfg.with_seed(seed);
    }
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    cfg.validate()?;
    thread_count_from_env()?;
    Ok(cfg)
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), PipelineError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| PipelineError::Output {
            path: dir.to_path_buf(),
            message: e.to_string(),
        })?;
    }
    atomic_write(path, bytes).map_err(|e| PipelineError::Output {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn execute(cli: Cli) -> Result<(), PipelineError> {
    match cli.command {
        Command::Simulate(common) => {
            let cfg = load_config(&common)?;
            let input = load_input(&cfg)?;
            let record_path = cfg.output_dir.join("record.csv");
            std::fs::create_dir_all(&cfg.output_dir).map_err(|e| PipelineError::Output {
                path: cfg.output_dir.clone(),
                message: e.to_string(),
            })?;
            input.record.write_csv(&record_path)?;
            println!("{}", record_path.display());
            if let Some(truth) = &input.reference {
                let path = cfg.output_dir.join("reference.json");
                let json = serde_json::to_string_pretty(truth).expect("truth serializes");
                write(&path, json.as_bytes())?;
                println!("{}", path.display());
            }
        }
        Command::Train(common) => {
            let cfg = load_config(&common)?;
            let input = load_input(&cfg)?;
            let data = preprocess(&input.record, &cfg.preprocessing);
            let trained = train_stage(&data, &cfg)?;
            let (params, trace) = (trained.params, trained.trace);
            let params_path = cfg.output_dir.join("params.json");
            write(&params_path, params.to_json().as_bytes())?;
            // Pinned to the kept window so `identify` centers the record the same way.
            write(&cfg.output_dir.join("config.json"), trained.window.to_json().as_bytes())?;
            let trace_path = cfg.output_dir.join("loss_trace.csv");
            modal_sep::network::write_trace_csv(&trace, &trace_path).map_err(|e| PipelineError::Output {
                path: trace_path.clone(),
                message: e.to_string(),
            })?;
            if let Some(last) = trace.last() {
                println!("final loss {:.6e}", last.total);
            }
            println!("{}", params_path.display());
        }
        Command::Identify { common, params } => {
            let cfg = load_config(&common)?;
            let text = std::fs::read_to_string(&params)
                .map_err(|e| PipelineError::Config(format!("cannot read {}: {e}", params.display())))?;
            let weights = NetworkParams::<f64>::from_json(&text)?;
            let report = run_pipeline_with_params(&cfg, &weights, Vec::new())?;
            print!("{}", report.render_table());
        }
        Command::Report { report } => {
            let text = std::fs::read_to_string(&report)
                .map_err(|e| PipelineError::Config(format!("cannot read {}: {e}", report.display())))?;
            print!("{}", RunReport::from_json(&text)?.render_table());
        }
        Command::Run(common) => {
            let cfg = load_config(&common)?;
            let report = run_pipeline(&cfg)?;
            print!("{}", report.render_table());
            println!("report: {}", report.artifacts.report.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
