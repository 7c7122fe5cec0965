//! Configuration-driven runs: one cell per (algorithm, seed) on one game,
//! traces sampled at a fixed cadence, first-hit summaries per accuracy
//! target, and CSV/JSON output.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::efg::{serial, GameTree};
use crate::games::GameSpec;
use crate::joint::{Algorithm, Cfr, CfrJr, CfrS, Solver};
use crate::{Error, Result};

/// Exact CSV header of every trace file.
pub const CSV_HEADER: &str = "iteration,time_s,epsilon,alpha,sw,sw_ratio,support";

pub const DEFAULT_ALPHA_TARGETS: [f64; 3] = [0.05, 0.01, 0.005];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Config(format!("unknown output format `{s}`"))),
        }
    }
}

/// A game given either as a spec string or as a JSON block.
#[derive(Deserialize)]
#[serde(untagged)]
enum GameField {
    Text(String),
    Spec(GameSpec),
}

fn game_field<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<GameSpec, D::Error> {
    match GameField::deserialize(d)? {
        GameField::Text(s) => s.parse().map_err(serde::de::Error::custom),
        GameField::Spec(spec) => Ok(spec),
    }
}

fn game_text<S: serde::Serializer>(spec: &GameSpec, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&spec.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(deserialize_with = "game_field", serialize_with = "game_text")]
    pub game: GameSpec,
    pub algorithm: Algorithm,
    pub iterations: u64,
    /// Reconstruction rate for `cfr-jr-k`.
    #[serde(default = "one")]
    pub k: u64,
    /// Seeds for `cfr-s`; the deterministic algorithms run once.
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_eval_every")]
    pub eval_every: u64,
    #[serde(default = "default_alpha_targets")]
    pub alpha_targets: Vec<f64>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    /// Per-cell wall-clock limit in seconds.
    #[serde(default)]
    pub time_limit_s: Option<f64>,
    #[serde(default = "one_usize")]
    pub workers: usize,
}

fn one() -> u64 {
    1
}

fn one_usize() -> usize {
    1
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn default_eval_every() -> u64 {
    50
}

fn default_alpha_targets() -> Vec<f64> {
    DEFAULT_ALPHA_TARGETS.to_vec()
}

impl ExperimentConfig {
    pub fn new(game: GameSpec, algorithm: Algorithm, iterations: u64) -> Self {
        ExperimentConfig {
            game,
            algorithm,
            iterations,
            k: 1,
            seeds: default_seeds(),
            eval_every: default_eval_every(),
            alpha_targets: default_alpha_targets(),
            out_dir: None,
            format: OutputFormat::Csv,
            time_limit_s: None,
            workers: 1,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let problem = if self.iterations == 0 {
            Some("iterations must be at least 1".to_string())
        } else if self.algorithm == Algorithm::CfrS && self.seeds.is_empty() {
            Some("cfr-s needs at least one seed".into())
        } else if self.k == 0 || (self.algorithm == Algorithm::CfrJrK && self.k > self.iterations) {
            Some(format!("reconstruction rate {} must be in 1..=iterations", self.k))
        } else if let Some(a) = self.alpha_targets.iter().find(|&&a| !(a > 0.0 && a <= 1.0)) {
            Some(format!("alpha target {a} is outside (0, 1]"))
        } else if matches!(self.time_limit_s, Some(t) if !(t > 0.0 && t.is_finite())) {
            Some("time limit must be positive".into())
        } else if self.workers == 0 {
            Some("workers must be at least 1".into())
        } else {
            None
        };
        problem.map_or(Ok(()), |p| Err(Error::Config(p)))
    }

    /// Seeds that define distinct cells: all of them for `cfr-s`, none
    /// otherwise.
    fn cell_seeds(&self) -> Vec<Option<u64>> {
        if self.algorithm == Algorithm::CfrS {
            self.seeds.iter().copied().map(Some).collect()
        } else {
            vec![None]
        }
    }
}

/// One trace line. `time_s` covers solver iterations only; `time_total_s`
/// also includes the evaluation sweeps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: u64,
    pub time_s: f64,
    pub time_total_s: f64,
    pub epsilon: f64,
    pub alpha: f64,
    pub epsilon_i: Vec<f64>,
    pub sw: f64,
    pub sw_ratio: Option<f64>,
    pub support: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstHit {
    pub alpha: f64,
    pub iteration: Option<u64>,
    pub time_s: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub game: String,
    pub algorithm: Algorithm,
    pub seed: Option<u64>,
    pub trace: Vec<TraceRecord>,
    pub first_hits: Vec<FirstHit>,
    pub stopped_by_time_limit: bool,
    pub checkpoint: Option<PathBuf>,
}

impl CellResult {
    /// File stem used for this cell's outputs.
    pub fn stem(&self) -> String {
        let game: String = self
            .game
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
            .collect();
        match self.seed {
            Some(s) => format!("{game}_{}_s{s}", self.algorithm),
            None => format!("{game}_{}", self.algorithm),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetSummary {
    pub alpha: f64,
    pub cells: usize,
    pub hits: usize,
    pub mean_iteration: Option<f64>,
    pub std_iteration: Option<f64>,
    pub mean_time_s: Option<f64>,
    pub std_time_s: Option<f64>,
}

/// Mean and standard deviation across cells at one evaluation iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub iteration: u64,
    pub cells: usize,
    pub alpha_mean: f64,
    pub alpha_std: f64,
    pub sw_mean: f64,
    pub support_mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub game: String,
    pub algorithm: Algorithm,
    pub targets: Vec<TargetSummary>,
    pub aggregate: Vec<AggregateRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub cells: Vec<CellResult>,
    pub summary: Summary,
}

impl RunOutput {
    /// True when some cell hit the time limit before reaching any target.
    pub fn timed_out_without_target(&self) -> bool {
        self.cells
            .iter()
            .any(|c| c.stopped_by_time_limit && c.first_hits.iter().all(|h| h.iteration.is_none()))
    }
}

fn mean_std(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Some((mean, var.sqrt()))
}

/// First trace records whose α is at or below each target.
pub fn first_hits(trace: &[TraceRecord], targets: &[f64]) -> Vec<FirstHit> {
    targets
        .iter()
        .map(|&alpha| {
            let hit = trace.iter().find(|r| r.alpha <= alpha);
            FirstHit {
                alpha,
                iteration: hit.map(|r| r.iteration),
                time_s: hit.map(|r| r.time_s),
            }
        })
        .collect()
}

fn summarize(config: &ExperimentConfig, cells: &[CellResult]) -> Summary {
    let targets = config
        .alpha_targets
        .iter()
        .enumerate()
        .map(|(k, &alpha)| {
            let hits: Vec<&FirstHit> = cells.iter().map(|c| &c.first_hits[k]).filter(|h| h.iteration.is_some()).collect();
            let its: Vec<f64> = hits.iter().map(|h| h.iteration.unwrap() as f64).collect();
            let times: Vec<f64> = hits.iter().map(|h| h.time_s.unwrap()).collect();
            let it = mean_std(&its);
            let tm = mean_std(&times);
            TargetSummary {
                alpha,
                cells: cells.len(),
                hits: hits.len(),
                mean_iteration: it.map(|m| m.0),
                std_iteration: it.map(|m| m.1),
                mean_time_s: tm.map(|m| m.0),
                std_time_s: tm.map(|m| m.1),
            }
        })
        .collect();
    let mut iterations: Vec<u64> = cells.iter().flat_map(|c| c.trace.iter().map(|r| r.iteration)).collect();
    iterations.sort_unstable();
    iterations.dedup();
    let aggregate = iterations
        .into_iter()
        .map(|t| {
            let rows: Vec<&TraceRecord> = cells.iter().filter_map(|c| c.trace.iter().find(|r| r.iteration == t)).collect();
            let alphas: Vec<f64> = rows.iter().map(|r| r.alpha).collect();
            let (alpha_mean, alpha_std) = mean_std(&alphas).unwrap();
            let n = rows.len() as f64;
            AggregateRow {
                iteration: t,
                cells: rows.len(),
                alpha_mean,
                alpha_std,
                sw_mean: rows.iter().map(|r| r.sw).sum::<f64>() / n,
                support_mean: rows.iter().map(|r| r.support as f64).sum::<f64>() / n,
            }
        })
        .collect();
    Summary {
        game: config.game.to_string(),
        algorithm: config.algorithm,
        targets,
        aggregate,
    }
}

fn make_solver<'a>(tree: &'a GameTree, config: &ExperimentConfig, seed: Option<u64>) -> Result<Box<dyn Solver + 'a>> {
    Ok(match config.algorithm {
        Algorithm::Cfr => Box::new(Cfr::new(tree)),
        Algorithm::CfrJr => Box::new(CfrJr::new(tree, 1)?),
        Algorithm::CfrJrK => Box::new(CfrJr::new(tree, config.k)?),
        Algorithm::CfrS => Box::new(CfrS::new(tree, seed.unwrap_or(0))),
    })
}

fn run_cell(tree: &GameTree, config: &ExperimentConfig, seed: Option<u64>) -> Result<CellResult> {
    let mut solver = make_solver(tree, config, seed)?;
    let limit = config.time_limit_s.map(Duration::from_secs_f64);
    let start = Instant::now();
    let mut solve_time = Duration::ZERO;
    let mut trace = Vec::new();
    let mut stopped = false;
    for t in 1..=config.iterations {
        let s = Instant::now();
        solver.step();
        solve_time += s.elapsed();
        let out_of_time = limit.is_some_and(|l| start.elapsed() >= l);
        let due = (config.eval_every > 0 && t % config.eval_every == 0) || t == config.iterations || out_of_time;
        if due {
            if let Some(report) = solver.report() {
                trace.push(TraceRecord {
                    iteration: t,
                    time_s: solve_time.as_secs_f64(),
                    time_total_s: start.elapsed().as_secs_f64(),
                    epsilon: report.epsilon,
                    alpha: report.alpha,
                    epsilon_i: report.epsilon_i,
                    sw: report.sw,
                    sw_ratio: report.sw_ratio,
                    support: solver.support(),
                });
            }
        }
        if out_of_time && t < config.iterations {
            stopped = true;
            break;
        }
    }
    let mut cell = CellResult {
        game: config.game.to_string(),
        algorithm: config.algorithm,
        seed,
        first_hits: first_hits(&trace, &config.alpha_targets),
        trace,
        stopped_by_time_limit: stopped,
        checkpoint: None,
    };
    if stopped {
        if let Some(dir) = &config.out_dir {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            let path = dir.join(format!("{}.checkpoint.json", cell.stem()));
            solver.checkpoint().save(&path)?;
            cell.checkpoint = Some(path);
        }
    }
    Ok(cell)
}

/// Runs every cell of `config` on up to `config.workers` threads. Results
/// are in cell order regardless of scheduling.
pub fn run(config: &ExperimentConfig) -> Result<RunOutput> {
    config.validate()?;
    let tree = config.game.build()?;
    let seeds = config.cell_seeds();
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<CellResult>>>> = Mutex::new((0..seeds.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..config.workers.min(seeds.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&seed) = seeds.get(i) else { break };
                let cell = run_cell(&tree, config, seed);
                results.lock().unwrap()[i] = Some(cell);
            });
        }
    });
    let cells = results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|c| c.expect("every cell ran"))
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(config, &cells);
    Ok(RunOutput { cells, summary })
}

fn csv_cell(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes a trace as CSV with the fixed header.
pub fn write_csv<W: std::io::Write>(trace: &[TraceRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Config(format!("csv output failed: {e}"));
    w.write_record(CSV_HEADER.split(',')).map_err(io)?;
    for r in trace {
        w.write_record([
            r.iteration.to_string(),
            r.time_s.to_string(),
            r.epsilon.to_string(),
            r.alpha.to_string(),
            r.sw.to_string(),
            csv_cell(r.sw_ratio),
            r.support.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))
}

/// Writes one trace file per cell plus `summary.json` into `dir`; returns
/// the written paths.
pub fn emit(output: &RunOutput, format: OutputFormat, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    for cell in &output.cells {
        let path = match format {
            OutputFormat::Csv => {
                let path = dir.join(format!("{}.csv", cell.stem()));
                let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
                write_csv(&cell.trace, std::io::BufWriter::new(file))?;
                path
            }
            OutputFormat::Json => {
                let path = dir.join(format!("{}.json", cell.stem()));
                let text = serde_json::to_string_pretty(&cell.trace)?;
                std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
                path
            }
        };
        written.push(path);
    }
    let path = dir.join("summary.json");
    let text = serde_json::to_string_pretty(&output.summary)?;
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(written)
}

/// Saves a game in the versioned JSON format.
pub fn persist_instance(tree: &GameTree, path: &Path) -> Result<()> {
    serial::save(tree, path)
}

pub fn load_instance(path: &Path) -> Result<GameTree> {
    serial::load(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(iteration: u64, alpha: f64) -> TraceRecord {
        TraceRecord {
            iteration,
            time_s: iteration as f64 * 0.5,
            time_total_s: iteration as f64,
            epsilon: alpha * 2.0,
            alpha,
            epsilon_i: vec![alpha, alpha * 2.0],
            sw: 1.5,
            sw_ratio: Some(0.75),
            support: iteration as usize,
        }
    }

    #[test]
    fn csv_shapes() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));
        let mut buf = Vec::new();
        write_csv(&[record(50, 0.25)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(text.lines().nth(1).unwrap(), "50,25,0.5,0.25,1.5,0.75,50");
    }

    #[test]
    fn json_records_round_trip() {
        let trace = vec![record(1, 0.123456789), record(2, 1.0 / 3.0)];
        let text = serde_json::to_string(&trace).unwrap();
        assert_eq!(serde_json::from_str::<Vec<TraceRecord>>(&text).unwrap(), trace);
    }

    #[test]
    fn first_hits_follow_trace() {
        let trace = vec![record(50, 0.2), record(100, 0.04), record(150, 0.009)];
        let hits = first_hits(&trace, &[0.05, 0.01, 0.005]);
        assert_eq!(hits[0].iteration, Some(100));
        assert_eq!(hits[1].iteration, Some(150));
        assert_eq!(hits[2].iteration, None);
    }

    #[test]
    fn config_json() {
        let c = ExperimentConfig::from_json(r#"{"game":"K3-3","algorithm":"cfr-jr","iterations":10}"#).unwrap();
        assert_eq!(c.game, GameSpec::Kuhn3 { rank: 3 });
        assert_eq!(c.eval_every, 50);
        let c = ExperimentConfig::from_json(
            r#"{"game":{"family":"goofspiel","players":2,"rank":3,"rule":"AL"},"algorithm":"cfr-s","iterations":5,"seeds":[1,2]}"#,
        )
        .unwrap();
        assert_eq!(c.game.to_string(), "G2-3-AL");
        let back = ExperimentConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        for bad in [
            r#"{"game":"K3-3","algorithm":"cfr-jr","iterations":0}"#,
            r#"{"game":"K3-3","algorithm":"cfr-s","iterations":5,"seeds":[]}"#,
            r#"{"game":"K3-3","algorithm":"cfr-jr","iterations":5,"alpha_targets":[1.5]}"#,
            r#"{"game":"K3-3","algorithm":"cfr-jr-k","iterations":5,"k":6}"#,
            r#"{"game":"K9","algorithm":"cfr-jr","iterations":5}"#,
            r#"{"game":"K3-3","algorithm":"dcfr","iterations":5}"#,
            r#"{"game":"K3-3","algorithm":"cfr","iterations":5,"colour":1}"#,
        ] {
            assert!(ExperimentConfig::from_json(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn seeds_fan_out() {
        let mut c = ExperimentConfig::new("M:coordination".parse().unwrap(), Algorithm::CfrS, 100);
        c.seeds = vec![1, 2, 3, 4, 5];
        c.eval_every = 25;
        c.workers = 3;
        let out = run(&c).unwrap();
        assert_eq!(out.cells.len(), 5);
        assert_eq!(out.cells.iter().map(|c| c.seed).collect::<Vec<_>>(), (1..=5).map(Some).collect::<Vec<_>>());
        assert_eq!(out.summary.aggregate.len(), 4);
        assert!(out.summary.aggregate.iter().all(|r| r.cells == 5));
        let again = run(&c).unwrap();
        for (a, b) in out.cells.iter().zip(&again.cells) {
            let strip = |t: &[TraceRecord]| t.iter().map(|r| (r.iteration, r.epsilon, r.support)).collect::<Vec<_>>();
            assert_eq!(strip(&a.trace), strip(&b.trace));
        }
    }

    #[test]
    fn time_limit_stops_and_checkpoints() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = ExperimentConfig::new("K3-4".parse().unwrap(), Algorithm::CfrJr, 10_000_000);
        c.time_limit_s = Some(0.2);
        c.out_dir = Some(dir.path().to_path_buf());
        let out = run(&c).unwrap();
        let cell = &out.cells[0];
        assert!(cell.stopped_by_time_limit);
        let ck = crate::joint::Checkpoint::load(cell.checkpoint.as_ref().unwrap()).unwrap();
        assert_eq!(ck.iteration, cell.trace.last().unwrap().iteration);
    }
}
