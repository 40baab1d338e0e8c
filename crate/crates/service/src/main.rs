use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use equivalence_service::{App, EngineConfig};
use tracing_subscriber::EnvFilter;

/// Session service for the Equivalence installation engine.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    /// JSON configuration file.
    #[arg(long, env = "EQUIV_CONFIG")]
    config: Option<PathBuf>,
    /// Listen address, overriding service.bind.
    #[arg(long)]
    bind: Option<SocketAddr>,
    /// Data directory, overriding service.data_dir.
    #[arg(long)]
    data_dir: Option<PathBuf>,
}

fn load(args: &Args) -> Result<EngineConfig, equivalence_service::ServiceError> {
    let mut config = match &args.config {
        Some(path) => EngineConfig::load(path)?,
        None => EngineConfig::default(),
    };
    if let Some(bind) = args.bind {
        config.service.bind = bind;
    }
    if let Some(dir) = &args.data_dir {
        config.service.data_dir = dir.clone();
    }
    config.validate()?;
    Ok(config)
}

#[tokio::main]
async fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .with_writer(std::io::stderr)
        .init();

    let args = Args::parse();
    let config = match load(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let listener = match tokio::net::TcpListener::bind(config.service.bind).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: cannot bind {}: {e}", config.service.bind);
            return ExitCode::FAILURE;
        }
    };
    let app = match App::start(config) {
        Ok(app) => app,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    match listener.local_addr() {
        // Scripts wait for this line to learn the port when binding :0.
        Ok(addr) => println!("listening on {addr}"),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    let shutdown = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    match equivalence_service::serve(app, listener, shutdown).await {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
