use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wlap::coarsen::{build_hierarchy, default_threshold};
use wlap::pipeline::{
    cmd_bench, cmd_partition, load_graph, render_table, summarize, write_atomically, write_records,
    write_summary_csv, BenchConfig, RunConfig, DEFAULT_REPEATS,
};
use wlap::refine::DEFAULT_EPSILON;
use wlap::{Error, Strategy};

#[derive(Parser)]
#[command(name = "wlap", version, about = "Multilevel graph partitioning with a weighted Laplacian initial clustering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Partition one METIS graph.
    Partition {
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "weighted-spectral")]
        strategy: Strategy,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Stop coarsening at this many vertices [default: max(30k, 200)].
        #[arg(long)]
        threshold: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        /// Partition file: one 0-based block id per line.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Metrics CSV with a single record.
        #[arg(long)]
        metrics: Option<PathBuf>,
        /// Partition the largest connected component of a disconnected graph.
        #[arg(long)]
        largest_component: bool,
    },
    /// Sweep strategies × k × seeds over one or more graphs.
    Bench {
        #[arg(required = true)]
        graphs: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "4")]
        k: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "random,region-growing,spectral,weighted-spectral")]
        strategies: Vec<Strategy>,
        #[arg(long, default_value_t = DEFAULT_REPEATS)]
        repeats: usize,
        #[arg(long)]
        threshold: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Per-run records.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-cell aggregates, one row per graph, strategy and k.
        #[arg(long)]
        summary: Option<PathBuf>,
        #[arg(long)]
        largest_component: bool,
    },
    /// Print size, connectivity and coarsening depth of a graph.
    Info {
        graph: PathBuf,
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::Io(_) | Error::InvalidGraph(_) | Error::Disconnected { .. } => 2,
        _ => 3,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Partition {
            graph,
            k,
            strategy,
            seed,
            threshold,
            epsilon,
            out,
            metrics,
            largest_component,
        } => {
            let config = RunConfig {
                threshold,
                epsilon,
                partition_out: out,
                metrics_out: metrics,
                largest_component,
                ..RunConfig::new(graph, k, strategy, seed)
            };
            let r = cmd_partition(&config)?.record;
            println!(
                "{} k={} strategy={} seed={} ncut={:.6} edge_cut={} imbalance={:.4} runtime={:.1}ms",
                r.graph, r.k, r.strategy, r.seed, r.ncut, r.edge_cut, r.imbalance, r.runtime_ms
            );
        }
        Command::Bench {
            graphs,
            k,
            strategies,
            repeats,
            threshold,
            epsilon,
            workers,
            out,
            summary,
            largest_component,
        } => {
            let config = BenchConfig {
                graphs,
                strategies,
                ks: k,
                repeats,
                threshold,
                epsilon,
                workers,
                largest_component,
            };
            let outcome = cmd_bench(&config)?;
            for f in &outcome.failures {
                eprintln!("failed: {} {} k={} seed={}: {}", f.graph, f.strategy, f.k, f.seed, f.message);
            }
            let rows = summarize(&outcome);
            print!("{}", render_table(&rows));
            if let Some(path) = out {
                write_atomically(&path, |w| write_records(&outcome.records, w))?;
            }
            if let Some(path) = summary {
                write_atomically(&path, |w| write_summary_csv(&rows, w))?;
            }
        }
        Command::Info { graph, k, seed } => {
            let (g, ids) = load_graph(&graph, true)?;
            if let Some(ids) = ids {
                println!("disconnected; largest component has {} vertices", ids.len());
            }
            println!("vertices {}", g.n());
            println!("edges {}", g.edge_count());
            println!("volume {}", g.total_weight());
            let h = build_hierarchy(&g, default_threshold(k), seed)?;
            let sizes: Vec<String> = h.graphs().iter().map(|l| l.n().to_string()).collect();
            println!("level sizes for k={k}: {}", sizes.join(" -> "));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
