use std::process::ExitCode;

fn main() -> ExitCode {
    let quiet = std::env::args_os().any(|a| a == "--quiet");
    env_logger::Builder::new()
        .filter_level(if quiet {
            log::LevelFilter::Off
        } else {
            log::LevelFilter::Warn
        })
        .parse_default_env()
        .init();
    ExitCode::from(ndsc::cli::run(std::env::args_os()))
}
