use std::process::ExitCode;

use clap::Parser;
use orcha::cli::{self, Cli, Command, CliError, SEED_ENV};
use orcha::server::{self, AppState};
use orcha_core::session::{load_dir, Session};

fn fail(lines: Vec<String>) -> ExitCode {
    for line in lines {
        eprintln!("{line}");
    }
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let env_seed = std::env::var(SEED_ENV).ok();
    match cli.command {
        Command::Render(args) => match cli::run_render(&args, env_seed.as_deref()) {
            Ok(stats) => {
                cli::print_stats(&stats, &args.out, std::io::stderr());
                ExitCode::SUCCESS
            }
            Err(e) => fail(e.report()),
        },
        Command::Serve(args) => {
            let config = match cli::resolve_config(&args.config, env_seed.as_deref()) {
                Ok(c) => c,
                Err(e) => return fail(e.report()),
            };
            let spec = match load_dir(&args.data) {
                Ok(s) => s,
                Err(e) => return fail(vec![format!("error: {e}")]),
            };
            let session = match Session::new(spec, config) {
                Ok(s) => s,
                Err(r) if !r.violations.is_empty() => {
                    return fail(CliError::Invalid(r.violations).report())
                }
                Err(r) => return fail(vec![format!("error: {r}")]),
            };
            let runtime = match tokio::runtime::Runtime::new() {
                Ok(rt) => rt,
                Err(e) => return fail(vec![format!("error: {e}")]),
            };
            let result = runtime.block_on(async {
                let listener = server::bind(&args.host, args.port).await?;
                server::serve(listener, AppState::new(session, args.data.clone())).await
            });
            match result {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(vec![format!("error: {e}")]),
            }
        }
    }
}
