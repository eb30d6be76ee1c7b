//! Command line entry point: `two-end-lab <config-path> [--out DIR] [--quiet]`.
//!
//! Exit codes: 0 all enabled assertions passed, 1 pipeline failure or failed
//! assertion, 2 usage/config error.

use std::path::PathBuf;
use std::process::ExitCode;
use two_end_lab::config::validate_config;
use two_end_lab::run::run;

const USAGE: &str = "usage: two-end-lab <config-path> [--out DIR] [--quiet]";

fn main() -> ExitCode {
    let mut config_path: Option<PathBuf> = None;
    let mut out_override: Option<PathBuf> = None;
    let mut quiet = false;

    let mut args = std::env::args().skip(1);
    while let Some(arg) = args.next() {
        match arg.as_str() {
            "--out" => match args.next() {
                Some(dir) => out_override = Some(PathBuf::from(dir)),
                None => {
                    eprintln!("--out needs a directory\n{USAGE}");
                    return ExitCode::from(2);
                }
            },
            "--quiet" => quiet = true,
            "--help" | "-h" => {
                println!("{USAGE}");
                return ExitCode::SUCCESS;
            }
            _ if config_path.is_none() && !arg.starts_with('-') => {
                config_path = Some(PathBuf::from(arg));
            }
            _ => {
                eprintln!("unexpected argument `{arg}`\n{USAGE}");
                return ExitCode::from(2);
            }
        }
    }
    let Some(config_path) = config_path else {
        eprintln!("{USAGE}");
        return ExitCode::from(2);
    };

    let text = match std::fs::read_to_string(&config_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", config_path.display());
            return ExitCode::from(2);
        }
    };
    let cfg = match validate_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("invalid config: {e}");
            return ExitCode::from(2);
        }
    };
    let out_dir = out_override.unwrap_or_else(|| PathBuf::from(&cfg.out));

    match run(&cfg, &out_dir, quiet) {
        Ok(outcome) => {
            if !quiet {
                println!(
                    "{}: {} (report: {})",
                    cfg.mode.as_str(),
                    if outcome.pass {
                        "ok"
                    } else {
                        "assertions failed"
                    },
                    out_dir.join("report.json").display()
                );
            }
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            // Pipeline failure: leave a machine-readable trace as well.
            let msg = e.to_string();
            eprintln!("error: {msg}");
            let _ = std::fs::create_dir_all(&out_dir);
            let err_json = format!(
                "{{\n  \"schema\": \"two-end-lab/1\",\n  \"mode\": {:?},\n  \"errors\": [{:?}]\n}}\n",
                cfg.mode.as_str(),
                msg
            );
            let _ = std::fs::write(out_dir.join("report.json"), err_json);
            ExitCode::from(1)
        }
    }
}
