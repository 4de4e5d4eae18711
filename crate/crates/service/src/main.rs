use std::path::PathBuf;
use std::process::ExitCode;

use dpar_service::{serve, ServiceConfig};

fn usage() -> ExitCode {
    eprintln!("usage: dpar-service [--config <file>]   (DPAR_MODEL_PATH overrides model_path)");
    ExitCode::from(1)
}

#[tokio::main]
async fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .init();

    let args: Vec<String> = std::env::args().skip(1).collect();
    let config = match args.as_slice() {
        [] => Ok(ServiceConfig::new(PathBuf::new())),
        [flag, path] if flag == "--config" => ServiceConfig::load(path.as_ref()),
        _ => return usage(),
    };
    let config = match config.and_then(ServiceConfig::with_env) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("dpar-service: {e}");
            return ExitCode::from(1);
        }
    };
    match serve(config).await {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            tracing::error!("{e:#}");
            ExitCode::from(1)
        }
    }
}
