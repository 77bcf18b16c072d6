mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Extract(a) => commands::extract(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Grid(a) => commands::grid(a),
        Command::Sfs(a) => commands::sfs(a),
        Command::Reproduce(a) => commands::reproduce(a),
        Command::Synth(a) => commands::synth(a),
    }
}

/// 2 for bad input or configuration, 3 for anything that failed at run time.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<coughgate::Error>() {
        Some(e) if e.is_input_error() => 2,
        _ => 3,
    }
}

/// Error chain joined by ": ", skipping causes already quoted by their parent.
fn describe(err: &anyhow::Error) -> String {
    let mut out = err.to_string();
    let mut last = out.clone();
    for cause in err.chain().skip(1) {
        let text = cause.to_string();
        if !last.contains(&text) {
            out.push_str(": ");
            out.push_str(&text);
        }
        last = text;
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .format_target(false)
        .init();

    let result = match cli.threads {
        Some(0) => Err(coughgate::Error::Config("--threads must be at least 1".into()).into()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(anyhow::Error::from)
            .and_then(|pool| pool.install(|| run(cli))),
        None => run(cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(exit_code(&e))
        }
    }
}
