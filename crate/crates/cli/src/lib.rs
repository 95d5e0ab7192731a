//! Command-line runner: validated JSON configs in, JSON reports and CSV series out.

#![recursion_limit = "512"]

pub mod compare;
pub mod config;
pub mod json;
pub mod run;
pub mod schema;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use config::Budget;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "fracspec", version, about = "Spectral dimensions and singular traces of fractal spectral triples")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Directory for reports and series (created if missing).
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Eigen-entry budget; caps and entry counts above it are rejected.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Print nothing but errors.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one or more experiment configs.
    Run {
        #[arg(long, required = true)]
        config: Vec<PathBuf>,
    },
    /// Diff the results of two reports.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Allow reports of different kinds and compare their shared fields.
        #[arg(long)]
        cross: bool,
    },
    /// Print the JSON Schema of experiment configs.
    Schema,
}

/// Parses `args` (including the program name) and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let mut budget = Budget::default();
    if let Some(n) = cli.budget {
        budget.entries = n;
    }
    match &cli.command {
        Command::Run { config } => config
            .iter()
            .map(|c| run_one(c, cli.out_dir.as_deref(), budget, cli.quiet))
            .max()
            .unwrap_or(EXIT_OK),
        Command::Compare { a, b, cross } => compare_files(a, b, *cross, cli.out_dir.as_deref(), cli.quiet),
        Command::Schema => {
            let text = pretty(&schema::config_schema());
            emit(&text, "schema.json", cli.out_dir.as_deref(), cli.quiet)
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn emit(text: &str, file: &str, out_dir: Option<&Path>, quiet: bool) -> i32 {
    if let Some(dir) = out_dir {
        if let Err(e) = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(dir.join(file), text)) {
            eprintln!("error: {}: {e}", dir.display());
            return EXIT_INVALID;
        }
        if quiet {
            return EXIT_OK;
        }
    }
    print!("{text}");
    EXIT_OK
}

fn run_one(path: &Path, out_dir: Option<&Path>, budget: Budget, quiet: bool) -> i32 {
    let cfg = match config::load(path, budget) {
        Ok(c) => c,
        Err(issues) => {
            eprintln!("error: invalid config {}", path.display());
            for i in issues {
                eprintln!("  {i}");
            }
            return EXIT_INVALID;
        }
    };
    let name = cfg
        .name
        .clone()
        .or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_else(|| "experiment".into());
    let start = Instant::now();
    let out = match run::run(&cfg, budget) {
        Ok(o) => o,
        Err(e @ run::RunError::Invalid(_)) => {
            eprintln!("error: invalid input for {}\n  {e}", path.display());
            return EXIT_INVALID;
        }
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return EXIT_NUMERIC;
        }
    };
    let wall = start.elapsed().as_secs_f64();
    let dir = out_dir.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
    let report_path = dir.join(format!("{name}.report.json"));
    let write = || -> std::io::Result<()> {
        std::fs::create_dir_all(&dir)?;
        std::fs::write(&report_path, pretty(&out.report))?;
        std::fs::write(
            dir.join(format!("{name}.timing.json")),
            pretty(&json!({ "wall_time_s": json::num(wall) })),
        )?;
        for (suffix, text) in &out.series {
            std::fs::write(dir.join(format!("{name}.{suffix}")), text)?;
        }
        Ok(())
    };
    if let Err(e) = write() {
        eprintln!("error: writing to {}: {e}", dir.display());
        return EXIT_INVALID;
    }
    if !quiet {
        println!("{} {} -> {}", cfg.kind.name(), name, report_path.display());
        for line in summary(&out.report) {
            println!("  {line}");
        }
        println!("  wall time {wall:.2} s");
    }
    EXIT_OK
}

/// One line per top-level estimate in the report.
fn summary(report: &Value) -> Vec<String> {
    let mut lines = Vec::new();
    let Some(results) = report["results"].as_object() else {
        return lines;
    };
    for (section, body) in results {
        let Some(values) = body["values"].as_object() else {
            continue;
        };
        for (k, v) in values {
            if let (Some(x), Some(iv)) = (v.get("value").and_then(json::as_f64), v.get("interval")) {
                let lo = json::as_f64(&iv[0]).unwrap_or(f64::NAN);
                let hi = json::as_f64(&iv[1]).unwrap_or(f64::NAN);
                lines.push(format!("{section}.{k} = {x:.6} [{lo:.6}, {hi:.6}]"));
            }
        }
    }
    lines
}

fn read_report(path: &Path) -> Result<Value, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: invalid JSON: {e}", path.display()))
}

fn compare_files(a: &Path, b: &Path, cross: bool, out_dir: Option<&Path>, quiet: bool) -> i32 {
    let (ra, rb) = match (read_report(a), read_report(b)) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    match compare::compare(&ra, &rb, cross) {
        Ok(diff) => emit(&pretty(&diff), "compare.json", out_dir, quiet),
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}
