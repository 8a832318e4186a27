//! Timing harness comparing the checking strategies on fixed scenarios.
//!
//! A run is a grid: every scenario is checked under every strategy in
//! the configuration, and each cell produces exactly one
//! [`BenchRecord`], timeouts and failures included. Cells time out
//! individually (each iteration gets the full limit; the first
//! iteration to exceed it abandons the cell), so one hopeless
//! strategy cannot stall the rest of the run.

use std::io::{self, Write};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use crate::checker::{
    check_cause, CausalQuery, CausalityResult, CheckError, CheckOptions, Strategy,
};

/// Grid configuration for [`run_bench`].
#[derive(Debug, Clone)]
pub struct BenchConfig {
    /// Strategies to compare; one record per scenario-strategy pair.
    pub strategies: Vec<Strategy>,
    /// Unmeasured iterations before timing starts.
    pub warmup: u32,
    /// Measured iterations (at least one is always run).
    pub measure: u32,
    /// Per-iteration wall-clock limit.
    pub timeout: Duration,
    /// Budget for brute-force subset searches. Benchmarks default to
    /// none: the timeout is the only limit, so a slow cell reads as
    /// `timeout` rather than `error`.
    pub brute_budget: Option<u64>,
    /// Worker threads. Cells are independent; results keep grid order.
    pub jobs: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            strategies: Strategy::ALL.to_vec(),
            warmup: 100,
            measure: 100,
            timeout: Duration::from_secs(300),
            brute_budget: None,
            jobs: 1,
        }
    }
}

/// A named query to measure.
#[derive(Debug, Clone)]
pub struct BenchScenario<'m> {
    pub id: String,
    pub query: CausalQuery<'m>,
}

impl<'m> BenchScenario<'m> {
    pub fn new(id: impl Into<String>, query: CausalQuery<'m>) -> Self {
        BenchScenario { id: id.into(), query }
    }
}

/// How a cell ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BenchOutcome {
    Completed,
    /// Some iteration exceeded the per-iteration limit.
    Timeout,
    /// The check failed outright (budget, invalid input, ...).
    Error(String),
}

/// One cell of the grid.
#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub scenario: String,
    pub strategy: Strategy,
    /// Verdicts from the first measured iteration; absent when no
    /// iteration completed.
    pub ac1: Option<bool>,
    pub ac2: Option<bool>,
    pub ac3: Option<bool>,
    pub w_size: Option<usize>,
    pub mean_ns: Option<u128>,
    /// Sample standard deviation (zero for a single iteration).
    pub stddev_ns: Option<u128>,
    /// Measured iterations that completed.
    pub iters: u32,
    pub outcome: BenchOutcome,
}

fn cell_options(config: &BenchConfig) -> CheckOptions {
    CheckOptions {
        brute_budget: config.brute_budget,
        timeout: Some(config.timeout),
        diagnose: false,
    }
}

fn run_cell(scenario: &BenchScenario, strategy: Strategy, config: &BenchConfig) -> BenchRecord {
    let query = scenario.query.clone().with_strategy(strategy);
    let opts = cell_options(config);
    let mut record = BenchRecord {
        scenario: scenario.id.clone(),
        strategy,
        ac1: None,
        ac2: None,
        ac3: None,
        w_size: None,
        mean_ns: None,
        stddev_ns: None,
        iters: 0,
        outcome: BenchOutcome::Completed,
    };

    let fail = |record: &mut BenchRecord, err: CheckError| {
        record.outcome = match err {
            CheckError::Timeout(_) => BenchOutcome::Timeout,
            other => BenchOutcome::Error(other.to_string()),
        };
    };

    for _ in 0..config.warmup {
        if let Err(err) = check_cause(&query, &opts) {
            fail(&mut record, err);
            return record;
        }
    }

    let mut samples: Vec<u128> = Vec::with_capacity(config.measure.max(1) as usize);
    for _ in 0..config.measure.max(1) {
        let start = Instant::now();
        match check_cause(&query, &opts) {
            Ok(result) => {
                samples.push(start.elapsed().as_nanos());
                record_verdicts(&mut record, &result);
            }
            Err(err) => {
                fail(&mut record, err);
                return record;
            }
        }
    }

    record.iters = samples.len() as u32;
    record.mean_ns = Some(mean(&samples));
    record.stddev_ns = Some(stddev(&samples));
    record
}

fn record_verdicts(record: &mut BenchRecord, result: &CausalityResult) {
    if record.ac1.is_some() {
        return;
    }
    record.ac1 = Some(result.ac1);
    record.ac2 = Some(result.ac2);
    record.ac3 = Some(result.ac3);
    record.w_size = result.w.as_ref().map(Vec::len);
}

fn mean(samples: &[u128]) -> u128 {
    samples.iter().sum::<u128>() / samples.len() as u128
}

fn stddev(samples: &[u128]) -> u128 {
    if samples.len() < 2 {
        return 0;
    }
    let m = mean(samples);
    let spread = samples
        .iter()
        .map(|&x| x.abs_diff(m).pow(2))
        .sum::<u128>()
        / (samples.len() as u128 - 1);
    (spread as f64).sqrt() as u128
}

/// Runs the whole grid. The result has exactly
/// `scenarios.len() * config.strategies.len()` records, in
/// scenario-major order regardless of `jobs`.
pub fn run_bench(scenarios: &[BenchScenario], config: &BenchConfig) -> Vec<BenchRecord> {
    let cells: Vec<(usize, &BenchScenario, Strategy)> = scenarios
        .iter()
        .flat_map(|s| config.strategies.iter().map(move |&strategy| (s, strategy)))
        .enumerate()
        .map(|(i, (s, strategy))| (i, s, strategy))
        .collect();

    let jobs = config.jobs.max(1).min(cells.len().max(1));
    let slots: Mutex<Vec<Option<BenchRecord>>> = Mutex::new(vec![None; cells.len()]);
    let next = AtomicUsize::new(0);

    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(slot, scenario, strategy)) = cells.get(i) else {
                    break;
                };
                let record = run_cell(scenario, strategy, config);
                slots.lock().expect("no panics while holding the lock")[slot] = Some(record);
            });
        }
    });

    slots
        .into_inner()
        .expect("all workers finished")
        .into_iter()
        .map(|r| r.expect("every cell ran"))
        .collect()
}

/// Writes records as CSV with a fixed ten-column header. Missing
/// numbers and verdicts become `N/A`; the `timeout` column is `false`,
/// `true`, or `error`.
pub fn write_csv(records: &[BenchRecord], mut out: impl Write) -> io::Result<()> {
    writeln!(
        out,
        "scenario,strategy,ac1,ac2,ac3,w_size,mean_ns,stddev_ns,iters,timeout"
    )?;
    for r in records {
        let opt_bool = |b: Option<bool>| b.map_or("N/A".to_string(), |b| b.to_string());
        let opt_num = |n: Option<u128>| n.map_or("N/A".to_string(), |n| n.to_string());
        let timeout = match &r.outcome {
            BenchOutcome::Completed => "false",
            BenchOutcome::Timeout => "true",
            BenchOutcome::Error(_) => "error",
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.scenario,
            r.strategy,
            opt_bool(r.ac1),
            opt_bool(r.ac2),
            opt_bool(r.ac3),
            r.w_size.map_or("N/A".to_string(), |w| w.to_string()),
            opt_num(r.mean_ns),
            opt_num(r.stddev_ns),
            r.iters,
            timeout,
        )?;
    }
    Ok(())
}
