use clap::Parser;

fn main() -> std::process::ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    metaxfer::cli::run(metaxfer::cli::Cli::parse())
}
