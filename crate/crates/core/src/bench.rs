//! Benchmark harness: planted instances × methods × sample counts, scored
//! against the brute-force oracle when it fits the budget.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::time::Instant;

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::instance::{generate_planted_instance, PlantedSpec};
use crate::randomized::randomized_solve;
use crate::rng::SeededRng;
use crate::scalar::losses_agree;
use crate::voronoi::{
    binomial, brute_force_solve_with_budget, voronoi_solve_2d, voronoi_solve_sampled, Method,
    SolveResult, DEFAULT_BUDGET,
};

fn default_budget() -> u128 {
    DEFAULT_BUDGET
}

fn default_trials() -> usize {
    1
}

/// One benchmark suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub seed: u64,
    pub instances: Vec<PlantedSpec>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub methods: Vec<Method>,
    #[serde(default)]
    pub t_grid: Vec<u64>,
    #[serde(default = "default_budget")]
    pub oracle_budget: u128,
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        let sampled = self.methods.iter().any(|m| m.is_sampled());
        if sampled && self.t_grid.is_empty() {
            return Err(Error::InvalidParameter(
                "sampled methods need a nonempty t_grid".into(),
            ));
        }
        if self.t_grid.contains(&0) {
            return Err(Error::InvalidParameter("every T must be >= 1".into()));
        }
        for spec in &self.instances {
            spec.validate()?;
            if self.methods.contains(&Method::Voronoi2d) && (spec.d != 2 || spec.r != 1) {
                return Err(Error::NotPlanar {
                    d: spec.d,
                    r: spec.r,
                });
            }
            if self.methods.contains(&Method::Brute)
                && binomial(spec.n, spec.k) > self.oracle_budget
            {
                return Err(Error::BudgetExceeded {
                    subsets: binomial(spec.n, spec.k),
                    budget: self.oracle_budget,
                });
            }
        }
        Ok(())
    }
}

fn sig17<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return s.serialize_none();
    }
    let raw = RawValue::from_string(format!("{x:.16e}")).map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

/// One solve within a benchmark run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    /// `"<spec index>-<trial>"`.
    pub instance_id: String,
    pub method: Method,
    #[serde(rename = "T")]
    pub t: Option<u64>,
    #[serde(serialize_with = "sig17")]
    pub loss: f64,
    pub match_oracle: Option<bool>,
    pub wall_time_s: f64,
    /// Seed of the instance and of the method's sample stream.
    pub seed: u64,
}

impl BenchRecord {
    pub fn spec_index(&self) -> usize {
        self.instance_id
            .split('-')
            .next()
            .and_then(|s| s.parse().ok())
            .unwrap_or(0)
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

/// Seed of cell `(spec, trial)`, derived from the suite seed.
pub fn cell_seed(suite_seed: u64, cell: u64) -> u64 {
    SeededRng::new(suite_seed).substream(cell).next_u64()
}

/// Runs every (instance, trial) cell in parallel; output order is by spec,
/// trial, then the configured method order and T grid.
pub fn run_benchmark(config: &BenchConfig) -> Result<Vec<BenchRecord>> {
    config.validate()?;
    if config.methods.is_empty() {
        return Ok(Vec::new());
    }
    let cells: Vec<(usize, usize)> = (0..config.instances.len())
        .flat_map(|s| (0..config.trials).map(move |t| (s, t)))
        .collect();
    let per_cell = cells
        .par_iter()
        .enumerate()
        .map(|(idx, &(spec_idx, trial))| run_cell(config, idx as u64, spec_idx, trial))
        .collect::<Result<Vec<_>>>()?;
    Ok(per_cell.into_iter().flatten().collect())
}

fn run_cell(config: &BenchConfig, cell: u64, spec_idx: usize, trial: usize) -> Result<Vec<BenchRecord>> {
    let spec = &config.instances[spec_idx];
    let seed = cell_seed(config.seed, cell);
    let inst = generate_planted_instance::<f64>(spec, seed)?;
    let (x, r, k) = (&inst.data, inst.r, inst.k);
    let oracle = if binomial(spec.n, spec.k) <= config.oracle_budget {
        let started = Instant::now();
        let res = brute_force_solve_with_budget(x, r, k, config.oracle_budget)?;
        Some((res, started.elapsed().as_secs_f64()))
    } else {
        None
    };
    let energy = x.energy();
    let rng = SeededRng::new(seed);
    let instance_id = format!("{spec_idx}-{trial}");
    let mut out = Vec::new();
    let mut push = |method: Method, t: Option<u64>, res: &SolveResult<f64>, secs: f64| {
        out.push(BenchRecord {
            instance_id: instance_id.clone(),
            method,
            t,
            loss: res.loss,
            match_oracle: oracle
                .as_ref()
                .map(|(o, _)| losses_agree(res.loss, o.loss, energy)),
            wall_time_s: secs,
            seed,
        });
    };
    for &method in &config.methods {
        match method {
            Method::Brute => {
                let (res, secs) = oracle.as_ref().expect("validated budget");
                push(method, None, res, *secs);
            }
            Method::Voronoi2d => {
                let started = Instant::now();
                let res = voronoi_solve_2d(x, k)?;
                push(method, None, &res, started.elapsed().as_secs_f64());
            }
            Method::VoronoiSampled | Method::Randomized => {
                for &t in &config.t_grid {
                    let started = Instant::now();
                    let res = if method == Method::Randomized {
                        randomized_solve(x, r, k, t, &rng)?
                    } else {
                        voronoi_solve_sampled(x, r, k, t, &rng)?
                    };
                    push(method, Some(t), &res, started.elapsed().as_secs_f64());
                }
            }
        }
    }
    Ok(out)
}

pub fn write_jsonl<W: Write>(mut writer: W, records: &[BenchRecord]) -> Result<()> {
    for rec in records {
        writeln!(writer, "{}", rec.to_json_line())?;
    }
    Ok(())
}

/// Success rate and mean runtime for one (spec, method, T) group.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuccessRow {
    pub spec_index: usize,
    pub method: Method,
    #[serde(rename = "T")]
    pub t: Option<u64>,
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
    pub mean_wall_time_s: f64,
}

/// Groups records by (spec, method, T). Records without an oracle verdict
/// count as trials but never as successes.
pub fn success_table(records: &[BenchRecord]) -> Vec<SuccessRow> {
    type Key = (usize, Method, Option<u64>);
    let mut groups: BTreeMap<Key, (usize, usize, f64)> = BTreeMap::new();
    for rec in records {
        let e = groups
            .entry((rec.spec_index(), rec.method, rec.t))
            .or_insert((0, 0, 0.0));
        e.0 += 1;
        e.1 += usize::from(rec.match_oracle == Some(true));
        e.2 += rec.wall_time_s;
    }
    groups
        .into_iter()
        .map(|((spec_index, method, t), (trials, successes, time))| SuccessRow {
            spec_index,
            method,
            t,
            trials,
            successes,
            rate: successes as f64 / trials as f64,
            mean_wall_time_s: time / trials as f64,
        })
        .collect()
}

pub fn render_table(rows: &[SuccessRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>5}  {:<16} {:>8} {:>7} {:>9} {:>7} {:>12}",
        "spec", "method", "T", "trials", "successes", "rate", "mean_time_s"
    );
    for row in rows {
        let t = row.t.map_or_else(|| "-".to_string(), |t| t.to_string());
        let _ = writeln!(
            s,
            "{:>5}  {:<16} {:>8} {:>7} {:>9} {:>7.3} {:>12.6}",
            row.spec_index,
            row.method.as_str(),
            t,
            row.trials,
            row.successes,
            row.rate,
            row.mean_wall_time_s
        );
    }
    s
}
