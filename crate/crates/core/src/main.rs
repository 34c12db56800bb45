//! digplan command line: analyze | plan | compare | export-dot.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use digplan::baselines::ClusterConfig;
use digplan::blocking::InterferenceGraph;
use digplan::contact::{default_contact_tol, detect_liaisons, liaisons_for_pairs};
use digplan::error::{Error, Result};
use digplan::export;
use digplan::manifest::{load_manifest, LoadedAssembly};
use digplan::planner::{plan_disassembly, DisassemblyTree, Method, PlanConfig};
use digplan::subassembly::select_base;
use digplan::workcell::{metrics_table, simulate};

#[derive(Parser)]
#[command(
    name = "digplan",
    about = "Disassembly sequence planning from part-access interference",
    version
)]
struct Cli {
    /// Bound on parallel worker threads (interference-graph rows and
    /// subtree planning).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct TuningArgs {
    /// Shell count per part (default 24).
    #[arg(long)]
    shells: Option<usize>,
    /// Direction samples per shell set (default 1024).
    #[arg(long)]
    samples: Option<usize>,
    /// Subassembly acceptance threshold on total blockage (default 0.85).
    #[arg(long)]
    accept: Option<f64>,
    /// Contact tolerance in meters (default: 1e-4 x assembly diagonal).
    #[arg(long)]
    contact_tol: Option<f64>,
    /// Seed for the clustering baseline (fallback: DIGPLAN_SEED, then 0).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the interference graph and blockage report for an assembly.
    Analyze {
        manifest: PathBuf,
        /// Output directory (default: alongside the manifest).
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tuning: TuningArgs,
    },
    /// Plan a disassembly and write the tree, sequence, DOT graph,
    /// schedule, and metrics.
    Plan {
        manifest: PathBuf,
        /// Identification method: dig, morato, or belhadj.
        #[arg(long, default_value = "dig")]
        method: String,
        /// Simulate schedules for 1..=N robots.
        #[arg(long, default_value_t = 3)]
        robots: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tuning: TuningArgs,
    },
    /// Run all three methods and tabulate makespan and speedup.
    Compare {
        manifest: PathBuf,
        #[arg(long, default_value_t = 3)]
        robots: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tuning: TuningArgs,
    },
    /// Re-export a saved tree file as a DOT graph.
    ExportDot {
        tree: PathBuf,
        /// Output file (default: stdout).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .ok();
    }
    let code = match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

/// Seed precedence: flag, then manifest config, then DIGPLAN_SEED, then 0.
fn resolve_seed(flag: Option<u64>, manifest: Option<u64>) -> u64 {
    flag.or(manifest)
        .or_else(|| {
            std::env::var("DIGPLAN_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(0)
}

fn plan_config(loaded: &LoadedAssembly, tuning: &TuningArgs, method: Method) -> PlanConfig {
    let mc = &loaded.config;
    let mut cfg = PlanConfig {
        method,
        seed: resolve_seed(tuning.seed, mc.seed),
        ..PlanConfig::default()
    };
    if let Some(m) = tuning.shells.or(mc.shells) {
        cfg.blocking.shell_count = m;
    }
    if let Some(s) = tuning.samples.or(mc.samples) {
        cfg.blocking.direction_samples = s;
    }
    if let Some(a) = tuning.accept.or(mc.accept) {
        cfg.subid.f_accept = a;
    }
    cfg.contact_tol = tuning.contact_tol.or(mc.contact_tol);
    if let Some(k) = mc.k_dirs {
        cfg.k_dirs = k;
    }
    cfg.cluster = ClusterConfig {
        k: mc.cluster_k,
        seed: cfg.seed,
        ..ClusterConfig::default()
    };
    cfg
}

fn liaison_graph(loaded: &LoadedAssembly, tol: f64) -> Result<digplan::LiaisonGraph> {
    match &loaded.explicit_liaisons {
        Some(pairs) => liaisons_for_pairs(&loaded.assembly, pairs, tol),
        None => detect_liaisons(&loaded.assembly, tol),
    }
}

fn out_dir(manifest: &Path, out: Option<PathBuf>) -> Result<PathBuf> {
    let dir = out.unwrap_or_else(|| {
        manifest
            .parent()
            .unwrap_or_else(|| Path::new("."))
            .to_path_buf()
    });
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Analyze {
            manifest,
            out,
            tuning,
        } => {
            let loaded = load_manifest(&manifest)?;
            let cfg = plan_config(&loaded, &tuning, Method::Dig);
            let tol = cfg
                .contact_tol
                .unwrap_or_else(|| default_contact_tol(&loaded.assembly));
            let liaisons = liaison_graph(&loaded, tol)?;
            let base = select_base(&loaded.assembly);
            let dig = InterferenceGraph::build(&loaded.assembly, base, &liaisons, &cfg.blocking);

            let dir = out_dir(&manifest, out)?;
            std::fs::write(dir.join("dig.csv"), export::dig_csv(&dig))?;
            std::fs::write(
                dir.join("blockage.csv"),
                export::blockage_csv(&dig.blockage_report()),
            )?;
            println!(
                "analyzed {} parts (base {}), {} shell evaluations",
                loaded.assembly.len(),
                base,
                dig.evaluations()
            );
            println!("wrote {}", dir.join("dig.csv").display());
            println!("wrote {}", dir.join("blockage.csv").display());
            Ok(())
        }
        Command::Plan {
            manifest,
            method,
            robots,
            out,
            tuning,
        } => {
            if robots == 0 {
                return Err(Error::InvalidInput("--robots must be at least 1".into()));
            }
            let loaded = load_manifest(&manifest)?;
            let method = Method::from_str(&method)?;
            let cfg = plan_config(&loaded, &tuning, method);
            let tree = plan_disassembly(&loaded.assembly, loaded.floor_z, &cfg)?;

            let dir = out_dir(&manifest, out)?;
            std::fs::write(dir.join("tree.txt"), export::write_tree(&tree))?;
            std::fs::write(dir.join("sequence.txt"), export::sequence_text(&tree))?;
            std::fs::write(dir.join("plan.dot"), export::export_dot(&tree))?;
            let schedule = simulate(&tree, robots);
            std::fs::write(dir.join("schedule.csv"), export::schedule_csv(&schedule))?;
            let rows = metrics_table(&tree, robots);
            std::fs::write(dir.join("metrics.csv"), export::metrics_csv(&rows))?;

            println!(
                "planned {} actions with method {}",
                degree_of_plan(&tree),
                method
            );
            for m in &rows {
                println!(
                    "robots {}: makespan {} speedup {:.2}",
                    m.robots, m.makespan, m.speedup
                );
            }
            for name in ["tree.txt", "sequence.txt", "plan.dot", "schedule.csv", "metrics.csv"] {
                println!("wrote {}", dir.join(name).display());
            }
            Ok(())
        }
        Command::Compare {
            manifest,
            robots,
            out,
            tuning,
        } => {
            if robots == 0 {
                return Err(Error::InvalidInput("--robots must be at least 1".into()));
            }
            let loaded = load_manifest(&manifest)?;
            let mut rows = Vec::new();
            for method in Method::all() {
                let cfg = plan_config(&loaded, &tuning, method);
                match plan_disassembly(&loaded.assembly, loaded.floor_z, &cfg) {
                    Ok(tree) => {
                        for m in metrics_table(&tree, robots) {
                            rows.push(export::CompareRow {
                                method: method.name().to_string(),
                                result: Ok(m),
                            });
                        }
                    }
                    Err(e) => rows.push(export::CompareRow {
                        method: method.name().to_string(),
                        result: Err(e.to_string()),
                    }),
                }
            }
            print!("{}", export::compare_table(&rows));
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                std::fs::write(dir.join("compare.csv"), export::compare_csv(&rows))?;
                println!("wrote {}", dir.join("compare.csv").display());
            }
            Ok(())
        }
        Command::ExportDot { tree, out } => {
            let text = std::fs::read_to_string(&tree)
                .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", tree.display())))?;
            let parsed: DisassemblyTree = export::parse_tree(&text)?;
            let dot = export::export_dot(&parsed);
            match out {
                Some(path) => {
                    std::fs::write(&path, dot)?;
                    println!("wrote {}", path.display());
                }
                None => print!("{dot}"),
            }
            Ok(())
        }
    }
}

fn degree_of_plan(tree: &DisassemblyTree) -> usize {
    tree.root().parts.len().saturating_sub(1)
}
