//! Command-line experiments over the flashcodes library: reproducible
//! simulations, bound evaluation, exhaustive adversaries, the optimal-code
//! oracle, and the reference worked example as a golden check.
//!
//! Exit codes: 0 success, 2 invalid configuration, 1 internal failure (and
//! 1 for a golden mismatch in `example-paper`).

use std::fs;
use std::process::ExitCode;
use std::sync::Arc;

use flashcodes::bounds::BoundsReport;
use flashcodes::graph::DataGraph;
use flashcodes::harness::rng::derive_seed;
use flashcodes::harness::run::{run_sequence, RunReport, CSV_HEADER};
use flashcodes::harness::sequence::SequenceSpec;
use flashcodes::harness::stats::{chi_square_uniform, ks_two_sample};
use flashcodes::harness::{balls_in_bins_first_full, optimal_game_value, worst_case_t};
use flashcodes::parametric::RobustCode;
use flashcodes::registers::{SplitCode, TieBreak};
use flashcodes::{CodeSpec, GraphSpec, RewritingCode};

const USAGE: &str = "\
flashcodes: rewriting codes for flash-like storage

USAGE:
  flashcodes <COMMAND> [FLAGS]

COMMANDS:
  simulate       Run a code against rewrite sequences; CSV or JSON report
  bounds         Evaluate closed-form bounds for given parameters
  oracle         Exhaustive optimal-code game value (tiny state spaces)
  adversary      Exact worst-case rewrite count of a code (exhaustive)
  example-paper  Replay the reference n=16, q=4, L=56 worked example
  robust-eval    Robust-code expectation study with uniformity checks

COMMON FLAGS:
  --n N            Cell count
  --q Q            Levels per cell
  --seed S         Master seed (default 0); all randomness derives from it
  --out FMT        csv | json (simulate default: csv for >1 trial)
  --out-path FILE  Write the report to FILE instead of stdout

SIMULATE:
  --code SPEC      modular:L=8 | baserep:L=16 | split:L=56 | trajectory |
                   parametric:theta=identity | robust[:seed=S][,mode=M]
  --graph SPEC     complete:L=56 | hypercube:k=4,l=2 | debruijn:k=3,l=2 |
                   tree:delta=3,L=7
  --seq SPEC       walk[:len=N][,seed=S] | cyclic[:len=N] | list:v1,v2,...
  --trials N       Independent trials (default 1); trial i derives its seed
  --t-target T     Trajectory counter budget (default n(q-1))

BOUNDS:
  --L L [--delta D] [--epsilon E] [--c C]

ORACLE:
  --L L            Caps: q^n <= 64 states, L <= 4

ADVERSARY:
  --code SPEC --graph SPEC [--cap K]   (K: explored-state cap, default 10^7)

EXAMPLE-PAPER:
  [--quiet]               Print only PASS/FAIL
  [--tamper-tie-break]    Validation hook: break raise-set ties the other
                          way; the golden check must then fail

ROBUST-EVAL:
  --L L [--seeds N] [--len LEN]        (default 200 seeds, cyclic load)
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() || args[0] == "--help" || args[0] == "-h" {
        print!("{USAGE}");
        return ExitCode::SUCCESS;
    }
    let command = args[0].clone();
    let flags = match Flags::parse(&args[1..]) {
        Ok(flags) => flags,
        Err(msg) => return config_error(&msg),
    };
    let result = match command.as_str() {
        "simulate" => cmd_simulate(&flags),
        "bounds" => cmd_bounds(&flags),
        "oracle" => cmd_oracle(&flags),
        "adversary" => cmd_adversary(&flags),
        "example-paper" => cmd_example_paper(&flags),
        "robust-eval" => cmd_robust_eval(&flags),
        other => Err(CliError::Config(format!("unknown command '{other}'"))),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Config(msg)) => config_error(&msg),
        Err(CliError::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn config_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}\n\n{USAGE}");
    ExitCode::from(2)
}

enum CliError {
    Config(String),
    Internal(String),
}

#[derive(Debug, Default)]
struct Flags {
    entries: Vec<(String, String)>,
}

impl Flags {
    fn parse(args: &[String]) -> Result<Self, String> {
        let mut entries = Vec::new();
        let mut it = args.iter();
        while let Some(arg) = it.next() {
            let Some(name) = arg.strip_prefix("--") else {
                return Err(format!("expected a --flag, got '{arg}'"));
            };
            // Boolean flags take no value.
            if matches!(name, "quiet" | "tamper-tie-break") {
                entries.push((name.to_string(), "true".to_string()));
                continue;
            }
            let value = it
                .next()
                .ok_or_else(|| format!("missing value for --{name}"))?
                .to_string();
            entries.push((name.to_string(), value));
        }
        Ok(Flags { entries })
    }

    fn get(&self, name: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }

    fn required(&self, name: &str) -> Result<&str, CliError> {
        self.get(name)
            .ok_or_else(|| CliError::Config(format!("missing --{name}")))
    }

    fn u64_or(&self, name: &str, default: u64) -> Result<u64, CliError> {
        match self.get(name) {
            None => Ok(default),
            Some(v) => v
                .parse::<u64>()
                .map_err(|_| CliError::Config(format!("--{name} expects an integer, got '{v}'"))),
        }
    }

    fn required_u64(&self, name: &str) -> Result<u64, CliError> {
        self.required(name)?
            .parse::<u64>()
            .map_err(|_| CliError::Config(format!("--{name} expects an integer")))
    }

    fn f64_or(&self, name: &str, default: f64) -> Result<f64, CliError> {
        match self.get(name) {
            None => Ok(default),
            Some(v) => v
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("--{name} expects a number, got '{v}'"))),
        }
    }

    fn has(&self, name: &str) -> bool {
        self.get(name).is_some()
    }
}

fn emit(flags: &Flags, text: &str) -> Result<(), CliError> {
    match flags.get("out-path") {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError::Internal(format!("writing {path}: {e}")))
        }
    }
}

fn parse_graph(flags: &Flags) -> Result<Arc<DataGraph>, CliError> {
    let spec = flags.required("graph")?;
    let graph = GraphSpec::parse(spec)
        .and_then(|s| s.build())
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(Arc::new(graph))
}

#[derive(serde::Serialize)]
struct ConfigEcho {
    command: String,
    flags: Vec<(String, String)>,
}

impl ConfigEcho {
    fn from_flags(command: &str, flags: &Flags) -> Self {
        // The report destination is not part of the experiment.
        let flags = flags
            .entries
            .iter()
            .filter(|(k, _)| k != "out-path")
            .cloned()
            .collect();
        ConfigEcho {
            command: command.to_string(),
            flags,
        }
    }
}

fn cmd_simulate(flags: &Flags) -> Result<ExitCode, CliError> {
    let n = flags.required_u64("n")? as usize;
    let q = flags.required_u64("q")? as u32;
    if n == 0 || q < 2 {
        return Err(CliError::Config(format!(
            "need n >= 1 and q >= 2, got n={n}, q={q}"
        )));
    }
    let graph = parse_graph(flags)?;
    let code_spec =
        CodeSpec::parse(flags.required("code")?).map_err(|e| CliError::Config(e.to_string()))?;
    let seq_spec =
        SequenceSpec::parse(flags.required("seq")?).map_err(|e| CliError::Config(e.to_string()))?;
    let trials = flags.u64_or("trials", 1)?;
    if trials == 0 {
        return Err(CliError::Config("--trials must be >= 1".into()));
    }
    let master_seed = flags.u64_or("seed", 0)?;
    let cap = flashcodes::bounds::ub_trivial(n as u64, q);
    let t_target = flags.u64_or("t-target", cap)?;

    let mut runs: Vec<(u64, u64, RunReport)> = Vec::new();
    for trial in 0..trials {
        let trial_seed = derive_seed(master_seed, trial);
        let code = code_spec
            .build(n, q, &graph, t_target, trial_seed)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let seq = seq_spec
            .build(&graph, cap, trial_seed)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let report =
            run_sequence(code.as_ref(), &graph, &seq).with_seeds(vec![master_seed, trial_seed]);
        runs.push((trial, trial_seed, report));
    }

    let config = ConfigEcho::from_flags("simulate", flags);
    let default_format = if trials > 1 { "csv" } else { "json" };
    match flags.get("out").unwrap_or(default_format) {
        "csv" => {
            let mut text = format!(
                "# {} config={}\n{CSV_HEADER}\n",
                flashcodes::VERSION,
                serde_json::to_string(&config).expect("config serializes")
            );
            for (trial, seed, report) in &runs {
                text.push_str(&report.csv_row(*trial, *seed));
                text.push('\n');
            }
            emit(flags, &text)?;
        }
        "json" => {
            let doc = serde_json::json!({
                "version": flashcodes::VERSION,
                "config": config,
                "runs": runs.iter().map(|(trial, seed, report)| {
                    serde_json::json!({ "trial": trial, "seed": seed, "report": report })
                }).collect::<Vec<_>>(),
            });
            let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
            text.push('\n');
            emit(flags, &text)?;
        }
        other => return Err(CliError::Config(format!("unknown --out '{other}'"))),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_bounds(flags: &Flags) -> Result<ExitCode, CliError> {
    let n = flags.required_u64("n")?;
    let q = flags.required_u64("q")? as u32;
    let alphabet = flags.required_u64("L")?;
    if n == 0 || q < 2 || alphabet < 2 {
        return Err(CliError::Config(format!(
            "need n >= 1, q >= 2, L >= 2, got n={n}, q={q}, L={alphabet}"
        )));
    }
    let delta = if flags.has("delta") {
        Some(flags.required_u64("delta")?)
    } else {
        None
    };
    let epsilon = flags.f64_or("epsilon", 0.15)?;
    let c = flags.f64_or("c", 1.0)?;
    let report = BoundsReport::evaluate(n, q, alphabet, delta, epsilon, c);
    let mut text = serde_json::to_string_pretty(&report).expect("bounds serialize");
    text.push('\n');
    emit(flags, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle(flags: &Flags) -> Result<ExitCode, CliError> {
    let n = flags.required_u64("n")? as usize;
    let q = flags.required_u64("q")? as u32;
    let alphabet = flags.required_u64("L")? as usize;
    match optimal_game_value(n, q, alphabet) {
        Ok(value) => {
            let doc = serde_json::json!({
                "version": flashcodes::VERSION,
                "n": n, "q": q, "L": alphabet,
                "optimal_worst_case_t": value,
            });
            let mut text = serde_json::to_string_pretty(&doc).expect("serializes");
            text.push('\n');
            emit(flags, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => Err(CliError::Config(e.to_string())),
    }
}

fn cmd_adversary(flags: &Flags) -> Result<ExitCode, CliError> {
    let n = flags.required_u64("n")? as usize;
    let q = flags.required_u64("q")? as u32;
    let graph = parse_graph(flags)?;
    let code_spec =
        CodeSpec::parse(flags.required("code")?).map_err(|e| CliError::Config(e.to_string()))?;
    let master_seed = flags.u64_or("seed", 0)?;
    let cap = flags.u64_or("cap", 10_000_000)? as usize;
    let t_target = flags.u64_or("t-target", flashcodes::bounds::ub_trivial(n as u64, q))?;
    let code = code_spec
        .build(n, q, &graph, t_target, master_seed)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let t =
        worst_case_t(code.as_ref(), &graph, cap).map_err(|e| CliError::Internal(e.to_string()))?;
    let doc = serde_json::json!({
        "version": flashcodes::VERSION,
        "code": code.spec_string(),
        "graph": graph.spec(),
        "n": n, "q": q,
        "worst_case_t": t,
        "guarantee_lb": code.guarantee_floor(),
        "ub_trivial": flashcodes::bounds::ub_trivial(n as u64, q),
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("serializes");
    text.push('\n');
    emit(flags, &text)?;
    Ok(ExitCode::SUCCESS)
}

/// The reference worked example: n=16, q=4, L=56, rewrites
/// 0 -> 23 -> 45 -> 6 -> 27 -> 12, with its exact digit pairs and cell
/// states. Exits 0 only on a bit-exact match.
fn cmd_example_paper(flags: &Flags) -> Result<ExitCode, CliError> {
    let quiet = flags.has("quiet");
    let tie = if flags.has("tamper-tie-break") {
        TieBreak::LexLargest
    } else {
        TieBreak::LexSmallest
    };
    let expected_digits: [(usize, usize); 6] = [(0, 0), (2, 7), (5, 5), (0, 6), (3, 3), (1, 4)];
    let expected_states: [&str; 6] = [
        "0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0",
        "0,0,1,0,0,0,0,0,0,0,0,0,0,0,0,1",
        "0,0,1,1,0,0,0,0,0,0,0,0,0,0,1,1",
        "0,0,1,1,1,0,0,1,0,1,0,0,0,0,1,1",
        "0,0,1,1,1,1,1,1,0,1,0,0,0,1,1,1",
        "1,2,1,1,1,1,1,1,0,1,1,1,1,1,1,1",
    ];
    let values = [0usize, 23, 45, 6, 27, 12];

    let code =
        SplitCode::with_tie_break(16, 4, 56, tie).map_err(|e| CliError::Internal(e.to_string()))?;
    let mut state = code.initial_state();
    let mut pass = true;
    let mut lines = String::new();
    for (i, &v) in values.iter().enumerate() {
        if i > 0 {
            state = match code.update(&state, v) {
                Ok(next) => next,
                Err(e) => return Err(CliError::Internal(format!("rewrite to {v}: {e}"))),
            };
        }
        let digits = code.decode_digits(&state);
        let trace = state.to_trace_string();
        let ok = (digits[0], digits[1]) == expected_digits[i] && trace == expected_states[i];
        pass &= ok;
        lines.push_str(&format!(
            "v={v:<2} digits=({},{}) state=({trace}) {}\n",
            digits[0],
            digits[1],
            if ok { "ok" } else { "MISMATCH" }
        ));
    }
    if !quiet {
        print!("{lines}");
    }
    println!("{}", if pass { "PASS" } else { "FAIL" });
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_robust_eval(flags: &Flags) -> Result<ExitCode, CliError> {
    let n = flags.required_u64("n")? as usize;
    let q = flags.required_u64("q")? as u32;
    let alphabet = flags.required_u64("L")? as usize;
    let seeds = flags.u64_or("seeds", 200)?;
    if seeds == 0 {
        return Err(CliError::Config("--seeds must be >= 1".into()));
    }
    let master_seed = flags.u64_or("seed", 0)?;
    let cap = flashcodes::bounds::ub_trivial(n as u64, q);
    let length = flags.u64_or("len", cap)?.min(cap);

    let graph =
        Arc::new(DataGraph::complete(alphabet).map_err(|e| CliError::Config(e.to_string()))?);
    let seq = flashcodes::harness::cyclic_sequence(&graph, length)
        .map_err(|e| CliError::Config(e.to_string()))?;

    let mut rows = Vec::new();
    let mut ts = Vec::new();
    let mut class_counts = vec![0u64; alphabet];
    let mut lag_counts = vec![0u64; alphabet * alphabet];
    for trial in 0..seeds {
        let seed = derive_seed(master_seed, trial);
        let code = RobustCode::sample(n, q, alphabet, seed, true)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let report = run_sequence(&code, &graph, &seq);
        // Before any super cell saturates, every rewrite raises one cell;
        // its class is the chosen super cell.
        let choices: Vec<usize> = report
            .trace
            .iter()
            .map(|row| code.class_of(row.raised[0].0))
            .collect();
        for &c in &choices {
            class_counts[c] += 1;
        }
        for pair in choices.windows(2) {
            lag_counts[pair[0] * alphabet + pair[1]] += 1;
        }
        let first_saturation = match report.stop_reason {
            flashcodes::harness::StopReason::Exhausted { .. } => Some(report.t),
            _ => None,
        };
        ts.push(report.t);
        rows.push(serde_json::json!({
            "trial": trial,
            "seed": seed,
            "t": report.t,
            "first_saturation_write": first_saturation,
        }));
    }

    let stats = flashcodes::harness::SampleStats::from_samples(ts.clone());
    let (chi_stat, chi_p) = chi_square_uniform(&class_counts);
    let (lag_stat, lag_p) = chi_square_uniform(&lag_counts);
    let capacities = RobustCode::sample(n, q, alphabet, 0, true)
        .map_err(|e| CliError::Config(e.to_string()))?
        .class_capacities();
    let oracle = balls_in_bins_first_full(&capacities, seeds, derive_seed(master_seed, u64::MAX));
    let (ks_d, ks_p) = ks_two_sample(&ts, &oracle.samples);

    let doc = serde_json::json!({
        "version": flashcodes::VERSION,
        "config": ConfigEcho::from_flags("robust-eval", flags),
        "n": n, "q": q, "L": alphabet,
        "sequence": seq.spec(),
        "t": { "mean": stats.mean, "std_dev": stats.std_dev, "min": stats.min, "max": stats.max },
        "super_cell_uniformity": { "chi_square": chi_stat, "p": chi_p },
        "lag1_pair_uniformity": { "chi_square": lag_stat, "p": lag_p },
        "oracle": { "mean": oracle.mean, "std_dev": oracle.std_dev,
                    "ks_d": ks_d, "ks_p": ks_p },
        "trials": rows,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("serializes");
    text.push('\n');
    emit(flags, &text)?;
    Ok(ExitCode::SUCCESS)
}
