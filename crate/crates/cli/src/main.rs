mod commands;
mod config;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use commands::{CliError, Output};
use config::{Format, RunConfig};

const EXIT_CONFIG: u8 = 2;
const EXIT_CERTIFICATION: u8 = 3;

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("TRACTLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("TRACTLAB_THREADS={v:?} is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn render(config: &RunConfig, out: &Output) -> Result<String, String> {
    let schema = format!("tractlab.v1.{}", config.command.name());
    let echo = serde_json::to_string(config).map_err(|e| e.to_string())?;
    Ok(match config.format {
        Format::Csv => format!("#schema={schema}\n#config={echo}\n{}", out.csv),
        Format::Json => format!(
            "{{\"schema\":\"{schema}\",\"config\":{echo},\"result\":{}}}\n",
            out.json
        ),
    })
}

/// Writes next to the target and renames over it, so readers never see a
/// partial file.
fn write_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn main() -> ExitCode {
    let config = RunConfig::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    let out = match commands::run(&config.command) {
        Ok(out) => out,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_CONFIG);
        }
        Err(CliError::Core(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CERTIFICATION);
        }
    };
    let text = match render(&config, &out) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let written = match &config.out {
        Some(path) => write_atomic(path, &text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::FAILURE;
    }
    if let Some(reason) = out.failure {
        eprintln!("{reason}");
        return ExitCode::from(EXIT_CERTIFICATION);
    }
    ExitCode::SUCCESS
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunConfig {
        RunConfig::try_parse_from(std::iter::once("tractlab").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn json_report_echoes_config() {
        for args in [
            &[
                "eigen",
                "--process",
                "wiener",
                "--r",
                "2",
                "--count",
                "4",
                "--format",
                "json",
            ][..],
            &[
                "scan",
                "--process",
                "euler",
                "--seq",
                "log-euler:a=0.3",
                "--tau",
                "0.7,0.9",
                "--q",
                "0",
                "--format",
                "json",
            ],
            &[
                "complexity",
                "--process",
                "euler",
                "--seq",
                "const:0",
                "--d",
                "1,2",
                "--eps",
                "0.5",
                "--require-certified",
            ],
            &[
                "simulate",
                "--r",
                "1",
                "--samples",
                "3",
                "--seed",
                "9",
                "--out",
                "x.csv",
                "--format",
                "json",
            ],
        ] {
            let config = parse(args);
            let out = Output {
                csv: String::new(),
                json: "null".into(),
                failure: None,
            };
            let text = render(
                &RunConfig {
                    format: Format::Json,
                    ..config.clone()
                },
                &out,
            )
            .unwrap();
            let v: serde_json::Value = serde_json::from_str(&text).unwrap();
            let back: RunConfig = serde_json::from_value(v["config"].clone()).unwrap();
            assert_eq!(
                back,
                RunConfig {
                    format: Format::Json,
                    ..config
                }
            );
        }
    }

    #[test]
    fn csv_report_has_schema_line() {
        let config = parse(&["kernel", "--process", "euler", "--r", "1"]);
        let out = Output {
            csv: "x,y,value\n".into(),
            json: "[]".into(),
            failure: None,
        };
        let text = render(&config, &out).unwrap();
        assert!(text.starts_with("#schema=tractlab.v1.kernel\n#config={"));
    }
}
