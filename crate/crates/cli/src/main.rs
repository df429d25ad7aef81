//! `thincond` — thinning/condensation calculus from the command line.
//!
//! Subcommands: `thin`, `condense`, `split`, `papangelou`, `verify-balance`,
//! `verify-ibp`, `verify-cycle`, `reconstruct`, `pp-exact <action>`,
//! `pp-mc <action>`, `report --job <file>`.
//!
//! Exit codes: 0 all verdicts pass, 1 a verdict failed, 2 invalid input.

mod descriptors;
mod exec;
mod job;
mod report;

use std::collections::BTreeMap;
use std::process::ExitCode;

use job::RawJob;

const USAGE: &str = "\
usage: thincond <command> [args]

commands:
  thin            --dist D --thinning T [--nmax N]
  condense        --dist D --thinning T [--nmax N] [--tol X]
  split           --dist D --thinning T [--nmax N]
  papangelou      --dist D --thinning T [--nmax N] [--mode raw|thinning-normalized]
  verify-balance  --dist D --thinning T [--nmax N] [--tol X]
  verify-ibp      --dist D --thinning T [--nmax N] [--tol X]
  verify-cycle    --dist D --thinning T [--nmax N] [--ncap C] [--tol X]
  reconstruct     --thinning T --condensation-from D [--nmax N] [--tol X]
  pp-exact <condense|palm-check|ibp|cycle|reconstruct>
                  [--sites S] [--site-weights W;W] [--process P] [--pp-thinning T]
                  [--nmax N] [--seed K] [--tol X]
  pp-mc <thin-poisson|ibp>
                  [--process P] [--thinning T] [--rate R] [--q Q] [--g G]
                  [--dim 1|2] [--samples N] [--seed K]
  report          --job FILE.json

common flags: --out PATH, --format json|csv, --seed <u64>, --nmax/-N <int>,
              --samples <int>, --tol <float>

descriptors (kind:key=val,key=val):
  dist:      poisson:lambda=2 | binomial:r=5,p=0.4 | negbinomial:r=2,p=0.3 |
             powerlaw:alpha=2 | pointmass:m=0 | 'custom:weights=0.5;0.25;0.125'
  thinning:  independent:q=0.5 | uniform | almost_nothing:q=0.3 | all_or_nothing:q=0.3
  pp process:   poisson | mixed:alpha=2,len=8 | random:seed=7
  pp thinning:  independent:q=0.5 | binom-inverse
  mc process:   poisson:rate=4 | mixed:alpha=2,len=25,rate=1 |
                interaction:rate=3,phi=1.5;0.5,bin=0.1
  mc thinning:  independent:q=0.5 | binom-inverse | 'piecewise:qs=0.2;0.4;0.6;0.8'

semicolon-separated lists need quoting in a shell.

environment: THINCOND_WORKERS overrides the worker count.
";

fn main() -> ExitCode {
    if let Ok(workers) = std::env::var("THINCOND_WORKERS") {
        match workers.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => {
                eprintln!("error: THINCOND_WORKERS must be a positive integer");
                return ExitCode::from(2);
            }
        }
    }
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(message) => {
            eprintln!("error: {message}");
            eprintln!();
            eprint!("{USAGE}");
            ExitCode::from(2)
        }
    }
}

fn run(args: &[String]) -> Result<bool, String> {
    let Some(command) = args.first() else {
        return Err("missing command".into());
    };
    let (job, out_path) = match command.as_str() {
        "report" => {
            let (flags, _) = collect_flags(&args[1..])?;
            let path = flags
                .get("job")
                .ok_or_else(|| "report needs --job <file>".to_string())?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read job file {path}: {e}"))?;
            let job: RawJob =
                serde_json::from_str(&text).map_err(|e| format!("invalid job file: {e}"))?;
            (job, flags.get("out").cloned())
        }
        "thin" | "condense" | "split" | "papangelou" | "verify-balance" | "verify-ibp"
        | "verify-cycle" | "reconstruct" => {
            let (flags, extra) = collect_flags(&args[1..])?;
            if let Some(stray) = extra.first() {
                return Err(format!("unexpected argument `{stray}`"));
            }
            let out = flags.get("out").cloned();
            (
                RawJob {
                    command: command.clone(),
                    params: params_from_flags(&flags)?,
                },
                out,
            )
        }
        "pp-exact" | "pp-mc" => {
            let Some(action) = args.get(1).filter(|a| !a.starts_with('-')) else {
                return Err(format!("{command} needs an action"));
            };
            let (mut flags, extra) = collect_flags(&args[2..])?;
            if let Some(stray) = extra.first() {
                return Err(format!("unexpected argument `{stray}`"));
            }
            let out = flags.get("out").cloned();
            flags.insert("action".into(), action.clone());
            (
                RawJob {
                    command: command.clone(),
                    params: params_from_flags(&flags)?,
                },
                out,
            )
        }
        "help" | "--help" | "-h" => {
            print!("{USAGE}");
            return Ok(true);
        }
        other => return Err(format!("unknown command `{other}`")),
    };

    let report = exec::execute(&job).map_err(|e| e.to_string())?;
    let rendered = report.render(&job.format())?;
    match out_path {
        Some(path) => std::fs::write(&path, rendered)
            .map_err(|e| format!("cannot write {path}: {e}"))?,
        None => print!("{rendered}"),
    }
    Ok(report.all_pass())
}

/// Splits `--key value`, `--key=value` and `-N value` flags from positional
/// leftovers.
fn collect_flags(args: &[String]) -> Result<(BTreeMap<String, String>, Vec<String>), String> {
    let mut flags = BTreeMap::new();
    let mut extra = Vec::new();
    let mut i = 0;
    while i < args.len() {
        let arg = &args[i];
        if let Some(stripped) = arg.strip_prefix("--") {
            if let Some((key, value)) = stripped.split_once('=') {
                flags.insert(key.to_string(), value.to_string());
            } else {
                let value = args
                    .get(i + 1)
                    .ok_or_else(|| format!("flag --{stripped} needs a value"))?;
                flags.insert(stripped.to_string(), value.clone());
                i += 1;
            }
        } else if arg == "-N" {
            let value = args
                .get(i + 1)
                .ok_or_else(|| "flag -N needs a value".to_string())?;
            flags.insert("nmax".into(), value.clone());
            i += 1;
        } else {
            extra.push(arg.clone());
        }
        i += 1;
    }
    Ok((flags, extra))
}

/// Re-types raw flag strings into a JSON object (numbers where they parse),
/// dropping the output path which is not part of the job.
fn params_from_flags(
    flags: &BTreeMap<String, String>,
) -> Result<serde_json::Value, String> {
    let mut object = serde_json::Map::new();
    for (key, value) in flags {
        if key == "out" {
            continue;
        }
        let typed = match key.as_str() {
            "nmax" | "ncap" | "sites" | "dim" => serde_json::Value::from(
                value
                    .parse::<u64>()
                    .map_err(|_| format!("--{key} expects an integer, got `{value}`"))?,
            ),
            "samples" | "seed" => serde_json::Value::from(
                value
                    .parse::<u64>()
                    .map_err(|_| format!("--{key} expects an integer, got `{value}`"))?,
            ),
            "tol" | "rate" | "q" => serde_json::Value::from(
                value
                    .parse::<f64>()
                    .map_err(|_| format!("--{key} expects a number, got `{value}`"))?,
            ),
            _ => serde_json::Value::from(value.clone()),
        };
        object.insert(key.replace('_', "-"), typed);
    }
    Ok(serde_json::Value::Object(object))
}
