//! Command-line surface. Exit codes: 0 success (decomposable / verdict
//! yes), 2 not decomposable, 1 I/O, parse or usage error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use cyclecut_core::{
    apply_script, brute_force_c, ear_script_from_trace, is_double_ear_decomposable, lift_cycles,
    parse_graph, random_script, run, DecompositionResult, Multigraph,
};
use cyclecut::{bench_instance, Report, ScriptJson};

#[derive(Parser)]
#[command(name = "cyclecut", version, about = "Minimum cycle decompositions of treewidth-2 Eulerian multigraphs with degrees in {2,4}")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide decomposability and compute the minimum cycle number
    Decompose {
        /// Input graph in edge-list format
        file: PathBuf,
        /// Emit a JSON report instead of text
        #[arg(long)]
        json: bool,
        /// Include the explicit cycle decomposition
        #[arg(long)]
        cycles: bool,
        /// Include recovered construction scripts (one per component)
        #[arg(long)]
        ears: bool,
    },
    /// Membership test only (degrees, treewidth, connectivity)
    Check {
        file: PathBuf,
    },
    /// Generate a random decomposable instance with known cycle number
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        ears: usize,
        #[arg(long, default_value_t = 0)]
        subdivisions: usize,
        /// Write the graph in edge-list format here
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the construction script as JSON here
        #[arg(long)]
        script: Option<PathBuf>,
    },
    /// Brute-force minimum (small inputs, ground truth)
    Oracle {
        file: PathBuf,
        /// Edge budget; default from CYCLECUT_MAX_ORACLE_EDGES or 16
        #[arg(long)]
        max_edges: Option<usize>,
    },
    /// Time the reduction over generated instances of growing size
    Bench {
        /// Comma-separated edge counts
        #[arg(long, default_value = "10000,100000,1000000")]
        sizes: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::Decompose { file, json, cycles, ears } => cmd_decompose(&file, json, cycles, ears),
        Cmd::Check { file } => cmd_check(&file),
        Cmd::Gen { seed, ears, subdivisions, out, script } => {
            cmd_gen(seed, ears, subdivisions, out.as_deref(), script.as_deref())
        }
        Cmd::Oracle { file, max_edges } => cmd_oracle(&file, max_edges),
        Cmd::Bench { sizes, seed } => cmd_bench(&sizes, seed),
    }
}

fn read_graph(file: &std::path::Path) -> Result<Multigraph, String> {
    let text = fs::read_to_string(file)
        .map_err(|e| format!("cannot read {}: {e}", file.display()))?;
    parse_graph(&text).map_err(|e| format!("{}: {e}", file.display()))
}

fn fail(json: bool, reason: String) -> ExitCode {
    if json {
        println!("{}", serde_json::to_string_pretty(&Report::error(reason.clone())).unwrap());
    }
    eprintln!("error: {reason}");
    ExitCode::from(1)
}

fn cmd_decompose(file: &std::path::Path, json: bool, want_cycles: bool, want_ears: bool) -> ExitCode {
    let g = match read_graph(file) {
        Ok(g) => g,
        Err(e) => return fail(json, e),
    };
    let mut total = 0usize;
    let mut all_cycles: Vec<Vec<u32>> = Vec::new();
    let mut scripts: Vec<ScriptJson> = Vec::new();
    let mut failure: Option<String> = None;
    for (i, (comp, _, edge_map)) in g.connected_components().into_iter().enumerate() {
        match run(&comp) {
            DecompositionResult::Decomposable { c, trace } => {
                total += c;
                if want_cycles {
                    let d = lift_cycles(&comp, &trace);
                    for cycle in d.cycles {
                        all_cycles.push(cycle.iter().map(|&(e, _, _)| edge_map[e.index()].0).collect());
                    }
                }
                if want_ears {
                    match ear_script_from_trace(&comp, &trace) {
                        Ok(s) => scripts.push(ScriptJson::from_script(&s, None)),
                        Err(e) => {
                            failure = Some(format!("component {i}: {e}"));
                            break;
                        }
                    }
                }
            }
            DecompositionResult::NotDecomposable { reason } => {
                failure = Some(if g.is_connected() {
                    reason
                } else {
                    format!("component {i}: {reason}")
                });
                break;
            }
        }
    }
    let report = match failure {
        Some(reason) => Report {
            status: "not-decomposable".into(),
            c: None,
            cycles: None,
            ears: None,
            reason: Some(reason),
        },
        None => Report {
            status: "decomposable".into(),
            c: Some(total),
            cycles: want_cycles.then_some(all_cycles),
            ears: want_ears.then_some(scripts),
            reason: None,
        },
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    } else if report.status == "decomposable" {
        println!("decomposable c={total}");
        if let Some(cycles) = &report.cycles {
            for (k, cy) in cycles.iter().enumerate() {
                let ids: Vec<String> = cy.iter().map(u32::to_string).collect();
                println!("cycle {k}: {}", ids.join(" "));
            }
        }
        if let Some(scripts) = &report.ears {
            for s in scripts {
                println!("{}", serde_json::to_string(s).unwrap());
            }
        }
    } else {
        println!("not-decomposable: {}", report.reason.as_deref().unwrap_or(""));
    }
    if report.status == "decomposable" {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn cmd_check(file: &std::path::Path) -> ExitCode {
    let g = match read_graph(file) {
        Ok(g) => g,
        Err(e) => return fail(false, e),
    };
    let r = is_double_ear_decomposable(&g);
    if r.verdict {
        println!("yes");
        return ExitCode::SUCCESS;
    }
    let reason = if !r.connected {
        "disconnected".to_string()
    } else if let Some(v) = r.bad_degree {
        format!("degree {} at node {v}", g.degree(v))
    } else {
        "treewidth > 2".to_string()
    };
    println!("no: {reason}");
    ExitCode::from(2)
}

fn cmd_gen(
    seed: u64,
    ears: usize,
    subdivisions: usize,
    out: Option<&std::path::Path>,
    script_path: Option<&std::path::Path>,
) -> ExitCode {
    let script = random_script(seed, ears, subdivisions);
    let (g, expected) = apply_script(&script).expect("generated script replays");
    if let Some(path) = out {
        if let Err(e) = fs::write(path, g.serialize()) {
            return fail(false, format!("cannot write {}: {e}", path.display()));
        }
    }
    if let Some(path) = script_path {
        let j = ScriptJson::from_script(&script, Some(seed));
        let text = serde_json::to_string_pretty(&j).unwrap();
        if let Err(e) = fs::write(path, text + "\n") {
            return fail(false, format!("cannot write {}: {e}", path.display()));
        }
    }
    println!("expected_c = {expected}");
    ExitCode::SUCCESS
}

fn cmd_oracle(file: &std::path::Path, max_edges: Option<usize>) -> ExitCode {
    let g = match read_graph(file) {
        Ok(g) => g,
        Err(e) => return fail(false, e),
    };
    let bound = max_edges
        .or_else(|| std::env::var("CYCLECUT_MAX_ORACLE_EDGES").ok()?.parse().ok())
        .unwrap_or(16);
    match brute_force_c(&g, bound) {
        Ok(r) => {
            println!("c_min = {}", r.c_min);
            ExitCode::SUCCESS
        }
        Err(e) => fail(false, e.to_string()),
    }
}

fn cmd_bench(sizes: &str, seed: u64) -> ExitCode {
    let parsed: Result<Vec<usize>, _> = sizes.split(',').map(|s| s.trim().parse()).collect();
    let sizes = match parsed {
        Ok(v) if !v.is_empty() => v,
        _ => return fail(false, format!("bad --sizes value {sizes:?}")),
    };
    println!("m,seconds");
    for m in sizes {
        let g = bench_instance(seed, m);
        let start = Instant::now();
        let result = run(&g);
        let secs = start.elapsed().as_secs_f64();
        assert!(result.is_decomposable(), "bench instance must decompose");
        println!("{m},{secs:.6}");
    }
    ExitCode::SUCCESS
}
