//! Single runs and the benchmark sweep behind the CLI.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cluster::Strategy;
use crate::coarsen::{build_hierarchy, default_threshold};
use crate::error::{Error, Result};
use crate::graph::{DoublyWeightedGraph, Partition};
use crate::io::{read_metis_file, write_partition};
use crate::refine::{vcycle, RefineOptions, DEFAULT_EPSILON, DEFAULT_MAX_PASSES};

/// First line of every metrics file.
pub const SCHEMA_LINE: &str = "#schema=1";
pub const DEFAULT_REPEATS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub k: usize,
    pub strategy: Strategy,
    pub seed: u64,
    /// `None` means `max(30k, 200)`.
    pub threshold: Option<usize>,
    pub epsilon: f64,
    pub repeats: usize,
    pub partition_out: Option<PathBuf>,
    pub metrics_out: Option<PathBuf>,
    /// Partition the largest connected component instead of rejecting
    /// disconnected input.
    pub largest_component: bool,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>, k: usize, strategy: Strategy, seed: u64) -> Self {
        Self {
            input: input.into(),
            k,
            strategy,
            seed,
            threshold: None,
            epsilon: DEFAULT_EPSILON,
            repeats: DEFAULT_REPEATS,
            partition_out: None,
            metrics_out: None,
            largest_component: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::contract("k must be at least 1"));
        }
        if self.repeats == 0 {
            return Err(Error::contract("repeats must be at least 1"));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::contract("epsilon must be nonnegative"));
        }
        Ok(())
    }

    fn threshold(&self) -> usize {
        self.threshold.unwrap_or_else(|| default_threshold(self.k))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    pub graph: String,
    pub strategy: String,
    pub k: usize,
    pub seed: u64,
    pub ncut: f64,
    pub wcut_coarse: f64,
    pub edge_cut: f64,
    pub runtime_ms: f64,
    /// Heaviest block volume over the average block volume.
    pub imbalance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub partition: Partition,
    pub record: BenchmarkRecord,
}

/// `max_i vol(C_i) / (vol(V) / k)`.
pub fn imbalance(g: &DoublyWeightedGraph, p: &Partition) -> Result<f64> {
    let vols: Vec<f64> = {
        let mut v = vec![0.0; p.k()];
        for (u, &b) in p.assignment().iter().enumerate() {
            v[b] += g.degree(u);
        }
        v
    };
    let total: f64 = vols.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidGraph("graph has no edges".into()));
    }
    let max = vols.iter().fold(0.0f64, |a, &b| a.max(b));
    Ok(max / (total / p.k() as f64))
}

/// Coarsens, clusters, refines and measures one graph.
pub fn run_graph(
    g: &DoublyWeightedGraph,
    name: &str,
    strategy: Strategy,
    k: usize,
    seed: u64,
    threshold: usize,
    epsilon: f64,
) -> Result<RunOutput> {
    let start = Instant::now();
    let h = build_hierarchy(g, threshold, seed)?;
    let options = RefineOptions {
        max_passes: DEFAULT_MAX_PASSES,
        epsilon,
    };
    let result = vcycle(&h, strategy, k, seed, options)?;
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    let partition = result.partition;
    let record = BenchmarkRecord {
        graph: name.to_string(),
        strategy: strategy.name().to_string(),
        k,
        seed,
        ncut: g.ncut(&partition)?,
        wcut_coarse: result.coarse_wcut,
        edge_cut: g.edge_cut(&partition)?,
        runtime_ms,
        imbalance: imbalance(g, &partition)?,
    };
    Ok(RunOutput { partition, record })
}

/// The graph to partition plus, when only the largest component is used,
/// the original ids of its vertices.
pub fn load_graph(path: &Path, largest_component: bool) -> Result<(DoublyWeightedGraph, Option<Vec<usize>>)> {
    let g = read_metis_file(path)?;
    if g.is_connected() {
        return Ok((g, None));
    }
    if !largest_component {
        let (_, components) = g.components();
        return Err(Error::Disconnected { components });
    }
    let (sub, ids) = g.largest_component()?;
    Ok((sub, Some(ids)))
}

pub fn graph_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Writes through a temporary file in the destination directory and renames
/// it into place, so a failed run leaves no partial file behind.
pub fn write_atomically(path: &Path, fill: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut w = BufWriter::new(tmp.as_file_mut());
        fill(&mut w)?;
        w.flush()?;
    }
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn write_records<W: Write>(records: &[BenchmarkRecord], mut out: W) -> Result<()> {
    writeln!(out, "{SCHEMA_LINE}")?;
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    if records.is_empty() {
        w.write_record(["graph", "strategy", "k", "seed", "ncut", "wcut_coarse", "edge_cut", "runtime_ms", "imbalance"])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: BufRead>(mut reader: R) -> Result<Vec<BenchmarkRecord>> {
    let mut first = String::new();
    reader.read_line(&mut first)?;
    if first.trim_end() != SCHEMA_LINE {
        return Err(Error::parse(1, format!("expected `{SCHEMA_LINE}`, found `{}`", first.trim_end())));
    }
    let mut r = csv::Reader::from_reader(reader);
    let records = r.deserialize().collect::<std::result::Result<Vec<BenchmarkRecord>, _>>()?;
    Ok(records)
}

/// Runs one partitioning job and writes its outputs. Vertices outside the
/// largest component (when that option is on) are written as block 0.
pub fn cmd_partition(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let (g, ids) = load_graph(&config.input, config.largest_component)?;
    let run = run_graph(
        &g,
        &graph_name(&config.input),
        config.strategy,
        config.k,
        config.seed,
        config.threshold(),
        config.epsilon,
    )?;
    if let Some(path) = &config.partition_out {
        let full = match &ids {
            None => run.partition.clone(),
            Some(ids) => {
                let n = ids.iter().max().map_or(0, |&m| m + 1).max(original_len(&config.input)?);
                let mut assignment = vec![0; n];
                for (sub, &orig) in ids.iter().enumerate() {
                    assignment[orig] = run.partition.block_of(sub);
                }
                Partition::new_allow_empty(run.partition.k(), assignment)?
            }
        };
        write_atomically(path, |w| Ok(write_partition(&full, w)?))?;
    }
    if let Some(path) = &config.metrics_out {
        write_atomically(path, |w| write_records(std::slice::from_ref(&run.record), w))?;
    }
    Ok(run)
}

fn original_len(path: &Path) -> Result<usize> {
    Ok(read_metis_file(path)?.n())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub graphs: Vec<PathBuf>,
    pub strategies: Vec<Strategy>,
    pub ks: Vec<usize>,
    pub repeats: usize,
    pub threshold: Option<usize>,
    pub epsilon: f64,
    /// `0` uses rayon's default.
    pub workers: usize,
    pub largest_component: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub graph: String,
    pub strategy: Strategy,
    pub k: usize,
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub graph: String,
    pub strategy: String,
    pub k: usize,
    pub runs: usize,
    pub failures: usize,
    pub mean_ncut: f64,
    pub std_ncut: f64,
    pub min_ncut: f64,
    pub max_ncut: f64,
    pub mean_runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchOutcome {
    pub records: Vec<BenchmarkRecord>,
    pub failures: Vec<CellFailure>,
}

/// Every graph × strategy × k × seed in `1..=repeats`. Cells run on a
/// thread pool; failures are collected and the sweep continues. Records come
/// back in cross-product order regardless of scheduling.
pub fn cmd_bench(config: &BenchConfig) -> Result<BenchOutcome> {
    if config.repeats == 0 {
        return Err(Error::contract("repeats must be at least 1"));
    }
    if config.ks.contains(&0) {
        return Err(Error::contract("k must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Unsupported(format!("cannot start worker pool: {e}")))?;

    let mut outcome = BenchOutcome::default();
    for path in &config.graphs {
        let name = graph_name(path);
        let g = match load_graph(path, config.largest_component) {
            Ok((g, _)) => g,
            Err(e) => {
                for &strategy in &config.strategies {
                    for &k in &config.ks {
                        for seed in 1..=config.repeats as u64 {
                            outcome.failures.push(CellFailure {
                                graph: name.clone(),
                                strategy,
                                k,
                                seed,
                                message: e.to_string(),
                            });
                        }
                    }
                }
                continue;
            }
        };
        let cells: Vec<(Strategy, usize, u64)> = config
            .strategies
            .iter()
            .flat_map(|&s| {
                config
                    .ks
                    .iter()
                    .flat_map(move |&k| (1..=config.repeats as u64).map(move |seed| (s, k, seed)))
            })
            .collect();
        let results: Vec<Result<BenchmarkRecord>> = pool.install(|| {
            cells
                .par_iter()
                .map(|&(s, k, seed)| {
                    let threshold = config.threshold.unwrap_or_else(|| default_threshold(k));
                    run_graph(&g, &name, s, k, seed, threshold, config.epsilon).map(|r| r.record)
                })
                .collect()
        });
        for (&(strategy, k, seed), result) in cells.iter().zip(results) {
            match result {
                Ok(r) => outcome.records.push(r),
                Err(e) => outcome.failures.push(CellFailure {
                    graph: name.clone(),
                    strategy,
                    k,
                    seed,
                    message: e.to_string(),
                }),
            }
        }
    }
    Ok(outcome)
}

/// One row per (graph, strategy, k) cell that was attempted.
pub fn summarize(outcome: &BenchOutcome) -> Vec<SummaryRow> {
    let mut cells: BTreeMap<(String, String, usize), (Vec<&BenchmarkRecord>, usize)> = BTreeMap::new();
    for r in &outcome.records {
        cells
            .entry((r.graph.clone(), r.strategy.clone(), r.k))
            .or_default()
            .0
            .push(r);
    }
    for f in &outcome.failures {
        cells
            .entry((f.graph.clone(), f.strategy.name().to_string(), f.k))
            .or_default()
            .1 += 1;
    }
    cells
        .into_iter()
        .map(|((graph, strategy, k), (records, failures))| {
            let runs = records.len();
            let ncuts: Vec<f64> = records.iter().map(|r| r.ncut).collect();
            let (mean, std, min, max, rt) = if runs == 0 {
                (f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN)
            } else {
                let mean = ncuts.iter().sum::<f64>() / runs as f64;
                let var = ncuts.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / runs as f64;
                (
                    mean,
                    var.sqrt(),
                    ncuts.iter().copied().fold(f64::INFINITY, f64::min),
                    ncuts.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                    records.iter().map(|r| r.runtime_ms).sum::<f64>() / runs as f64,
                )
            };
            SummaryRow {
                graph,
                strategy,
                k,
                runs,
                failures,
                mean_ncut: mean,
                std_ncut: std,
                min_ncut: min,
                max_ncut: max,
                mean_runtime_ms: rt,
            }
        })
        .collect()
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Mean ncut per graph: strategies down, k across.
pub fn render_table(rows: &[SummaryRow]) -> String {
    let mut graphs: Vec<&str> = rows.iter().map(|r| r.graph.as_str()).collect();
    graphs.dedup();
    let mut out = String::new();
    for graph in graphs {
        let cells: Vec<&SummaryRow> = rows.iter().filter(|r| r.graph == graph).collect();
        let mut ks: Vec<usize> = cells.iter().map(|r| r.k).collect();
        ks.sort_unstable();
        ks.dedup();
        let mut strategies: Vec<&str> = cells.iter().map(|r| r.strategy.as_str()).collect();
        strategies.sort_by_key(|s| {
            s.parse::<Strategy>()
                .map(|st| st as usize)
                .unwrap_or(usize::MAX)
        });
        strategies.dedup();

        out.push_str(&format!("{graph}\n{:<18}", "strategy"));
        for k in &ks {
            out.push_str(&format!("{:>10}", format!("k={k}")));
        }
        out.push('\n');
        for s in strategies {
            out.push_str(&format!("{s:<18}"));
            for &k in &ks {
                let cell = cells.iter().find(|r| r.strategy == s && r.k == k);
                let text = match cell {
                    Some(r) if r.runs > 0 => format!("{:.3}", r.mean_ncut),
                    Some(_) => "failed".to_string(),
                    None => "-".to_string(),
                };
                out.push_str(&format!("{text:>10}"));
            }
            out.push('\n');
        }
    }
    out
}

pub fn read_records_file(path: &Path) -> Result<Vec<BenchmarkRecord>> {
    read_records(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;
    use crate::cluster::Strategy;

    fn toy_file(dir: &tempfile::TempDir) -> PathBuf {
        let path = dir.path().join("toy.graph");
        std::fs::write(&path, "3 2\n2\n1 3\n2\n").unwrap();
        path
    }

    fn record(seed: u64, ncut: f64) -> BenchmarkRecord {
        BenchmarkRecord {
            graph: "g, with comma".into(),
            strategy: "random".into(),
            k: 4,
            seed,
            ncut,
            wcut_coarse: ncut * 0.5,
            edge_cut: 17.0,
            runtime_ms: 0.125,
            imbalance: 1.03,
        }
    }

    #[test]
    fn toy_partition_run() {
        let dir = tempfile::tempdir().unwrap();
        let input = toy_file(&dir);
        let mut config = RunConfig::new(&input, 2, Strategy::WeightedSpectral, 1);
        config.partition_out = Some(dir.path().join("toy.part"));
        config.metrics_out = Some(dir.path().join("toy.csv"));
        let run = cmd_partition(&config).unwrap();
        let text = std::fs::read_to_string(dir.path().join("toy.part")).unwrap();
        assert_eq!(text.lines().count(), 3);
        // only two bipartition shapes exist on a 3-path
        let ncut = run.record.ncut;
        assert!((ncut - 4.0 / 3.0).abs() < 1e-12 || (ncut - 2.0).abs() < 1e-12, "{ncut}");
        let records = read_records_file(&dir.path().join("toy.csv")).unwrap();
        assert_eq!(records, vec![run.record]);

        config.k = 1;
        assert_eq!(cmd_partition(&config).unwrap().record.ncut, 0.0);
    }

    #[test]
    fn disconnected_input_is_rejected_unless_asked() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("two.graph");
        std::fs::write(&input, "5 3\n2\n1 3\n2\n5\n4\n").unwrap();
        let mut config = RunConfig::new(&input, 2, Strategy::Random, 1);
        config.partition_out = Some(dir.path().join("two.part"));
        assert!(matches!(cmd_partition(&config), Err(Error::Disconnected { components: 2 })));
        assert!(!dir.path().join("two.part").exists());
        config.largest_component = true;
        cmd_partition(&config).unwrap();
        let text = std::fs::read_to_string(dir.path().join("two.part")).unwrap();
        assert_eq!(text.lines().count(), 5);
    }

    #[test]
    fn failed_write_leaves_no_file() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("out.txt");
        let r = write_atomically(&target, |w| {
            w.write_all(b"partial")?;
            Err(Error::contract("boom"))
        });
        assert!(r.is_err());
        assert!(!target.exists());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn bench_counts() {
        let dir = tempfile::tempdir().unwrap();
        let input = toy_file(&dir);
        let config = BenchConfig {
            graphs: vec![input],
            strategies: vec![Strategy::Random],
            ks: vec![2],
            repeats: 3,
            threshold: None,
            epsilon: DEFAULT_EPSILON,
            workers: 2,
            largest_component: false,
        };
        let outcome = cmd_bench(&config).unwrap();
        assert_eq!(outcome.records.len(), 3);
        assert!(outcome.failures.is_empty());
        assert_eq!(outcome.records.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![1, 2, 3]);
        let summary = summarize(&outcome);
        assert_eq!(summary.len(), 1);
        assert_eq!(summary[0].runs, 3);
        assert!(render_table(&summary).contains("random"));
    }

    #[test]
    fn bench_records_failures_and_continues() {
        let dir = tempfile::tempdir().unwrap();
        let input = toy_file(&dir);
        let config = BenchConfig {
            graphs: vec![input, dir.path().join("missing.graph")],
            strategies: vec![Strategy::Random, Strategy::WeightedSpectral],
            ks: vec![2, 4],
            repeats: 2,
            threshold: None,
            epsilon: DEFAULT_EPSILON,
            workers: 1,
            largest_component: false,
        };
        let outcome = cmd_bench(&config).unwrap();
        // k = 4 > 3 vertices fails on the toy; the missing graph fails everywhere
        assert_eq!(outcome.records.len(), 4);
        assert_eq!(outcome.failures.len(), 4 + 8);
        assert_eq!(summarize(&outcome).len(), 8);
    }

    #[test]
    fn imbalance_is_at_least_one() {
        let g = fixtures::grid(6, 6);
        for seed in 0..10 {
            let p = fixtures::random_partition(36, 3, seed);
            assert!(imbalance(&g, &p).unwrap() >= 1.0);
        }
    }

    #[test]
    fn rejects_wrong_schema() {
        assert!(read_records("graph,strategy\n".as_bytes()).is_err());
        let mut buf = Vec::new();
        write_records(&[], &mut buf).unwrap();
        assert!(read_records(buf.as_slice()).unwrap().is_empty());
    }

    proptest! {
        #[test]
        fn records_round_trip(values in prop::collection::vec((any::<u64>(), 0.0f64..2.0), 0..20)) {
            let records: Vec<_> = values.iter().map(|&(s, v)| record(s, v)).collect();
            let mut buf = Vec::new();
            write_records(&records, &mut buf).unwrap();
            buf.flush().unwrap();
            prop_assert_eq!(read_records(buf.as_slice()).unwrap(), records);
        }
    }
}
