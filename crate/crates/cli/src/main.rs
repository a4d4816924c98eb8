use anyhow::{Context, Result};
use clap::{value_parser, Arg, ArgMatches, Command};
use quatrep::experiments::{run, Experiment, ExperimentConfig};
use std::path::PathBuf;
use std::process::ExitCode;

const DEFAULT_OUT: &str = "reports";

fn common_args() -> [Arg; 5] {
    [
        Arg::new("config").long("config").value_name("PATH").value_parser(value_parser!(PathBuf)).help("TOML experiment config"),
        Arg::new("out").long("out").value_name("DIR").value_parser(value_parser!(PathBuf)).help("Report directory [default: reports]"),
        Arg::new("seed").long("seed").value_name("N").value_parser(value_parser!(u64)).help("Random seed"),
        Arg::new("nodes").long("nodes").value_name("N").value_parser(value_parser!(usize)).help("Quadrature nodes per axis"),
        Arg::new("tol").long("tol").value_name("X").allow_negative_numbers(true).value_parser(value_parser!(f64)).help("Main tolerance"),
    ]
}

fn cli() -> Command {
    Command::new("quatrep")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Quaternionic integral representation experiments")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommands(Experiment::ALL.map(|e| Command::new(e.name()).args(common_args())))
}

/// Config file plus command-line overrides.
fn config(m: &ArgMatches) -> Result<ExperimentConfig> {
    let mut cfg = match m.get_one::<PathBuf>("config") {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = m.get_one::<u64>("seed") {
        cfg.seed = *s;
    }
    if let Some(n) = m.get_one::<usize>("nodes") {
        cfg.nodes = Some(*n);
    }
    if let Some(t) = m.get_one::<f64>("tol") {
        cfg.tol = Some(*t);
    }
    if let Some(o) = m.get_one::<PathBuf>("out") {
        cfg.out = Some(o.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(name: &str, m: &ArgMatches) -> Result<bool> {
    let exp: Experiment = name.parse()?;
    let cfg = config(m)?;
    let report = run(exp, &cfg)?;
    print!("{}", report.summary());
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let files = report.write(&dir).with_context(|| format!("writing reports to {}", dir.display()))?;
    println!("{}: {} ({} files in {})", exp, if report.pass { "PASS" } else { "FAIL" }, files.len(), dir.display());
    Ok(report.pass)
}

fn is_usage_error(e: &anyhow::Error) -> bool {
    matches!(e.downcast_ref::<quatrep::Error>(), Some(quatrep::Error::Config(_) | quatrep::Error::Invalid(_)))
}

fn main() -> ExitCode {
    let matches = cli().get_matches();
    let Some((name, sub)) = matches.subcommand() else {
        return ExitCode::from(2);
    };
    match execute(name, sub) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_usage_error(&e) { 2 } else { 1 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_is_well_formed() {
        cli().debug_assert();
    }

    #[test]
    fn overrides_apply() {
        let m = cli().get_matches_from(["quatrep", "jacobi", "--seed", "9", "--nodes", "12", "--tol", "1e-4", "--out", "x"]);
        let (_, sub) = m.subcommand().unwrap();
        let cfg = config(sub).unwrap();
        assert_eq!((cfg.seed, cfg.nodes, cfg.tol), (9, Some(12), Some(1e-4)));
        assert_eq!(cfg.out, Some(PathBuf::from("x")));
    }

    #[test]
    fn bad_tolerance_is_a_usage_error() {
        let m = cli().get_matches_from(["quatrep", "psh", "--tol", "-1"]);
        let (name, sub) = m.subcommand().unwrap();
        assert!(is_usage_error(&execute(name, sub).unwrap_err()));
    }
}
