//! Discrete-time growth of an activity-driven network. Each step draws m
//! distinct source nodes uniformly, attaches every source to a destination
//! drawn proportionally to current activity (the source itself excluded),
//! and credits one unit of activity to both endpoints. Multi-edges between
//! the same pair are allowed; self-loops are not.
//!
//! Activities are stored as a fixed per-node base plus an integer count of
//! link participations, so conservation checks hold exactly: after T steps
//! the counts sum to 2mT and `total_links` equals m0 + mT.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Refuse ensemble recordings above this many f64 cells (~1 GiB).
pub const DEFAULT_MAX_SERIES_CELLS: u64 = 128_000_000;

/// One link creation event, recorded only when edge logging is enabled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeEvent {
    pub step: u64,
    pub source: u32,
    pub destination: u32,
}

/// Mutable simulation state for a single network.
#[derive(Debug, Clone)]
pub struct NetworkState {
    /// Initial activity per node; constant after construction.
    base: Vec<f64>,
    /// Link participations gained per node since construction.
    gains: Vec<u64>,
    gain_total: u64,
    base_total: f64,
    total_links: u64,
    step: u64,
    edge_log: Option<Vec<EdgeEvent>>,
}

impl NetworkState {
    fn new(params: &ModelParams, base: Vec<f64>) -> Result<Self> {
        params.validate()?;
        if base.len() != params.n_nodes {
            return Err(Error::Domain(format!(
                "initial activities must cover all {} nodes, got {}",
                params.n_nodes,
                base.len()
            )));
        }
        for (i, &a) in base.iter().enumerate() {
            if !a.is_finite() || a < 0.0 {
                return Err(Error::Domain(format!(
                    "initial activity of node {i} must be finite and non-negative, got {a}"
                )));
            }
        }
        let base_total = base.iter().sum();
        Ok(NetworkState {
            base,
            gains: vec![0; params.n_nodes],
            gain_total: 0,
            base_total,
            total_links: params.m0,
            step: 0,
            edge_log: None,
        })
    }

    /// Uniform start with per-node overrides, used to seed individual nodes
    /// with a different initial activity.
    pub fn with_overrides(params: &ModelParams, overrides: &[(usize, f64)]) -> Result<Self> {
        params.validate()?;
        let mut base = vec![params.k0; params.n_nodes];
        for &(i, a) in overrides {
            if i >= params.n_nodes {
                return Err(Error::Domain(format!(
                    "override node {i} out of range for {} nodes",
                    params.n_nodes
                )));
            }
            base[i] = a;
        }
        Self::new(params, base)
    }

    pub fn n_nodes(&self) -> usize {
        self.base.len()
    }

    pub fn activity(&self, node: usize) -> f64 {
        self.base[node] + self.gains[node] as f64
    }

    pub fn activities(&self) -> Vec<f64> {
        (0..self.base.len()).map(|i| self.activity(i)).collect()
    }

    /// Summed activity over all nodes, exact for integer-valued bases.
    pub fn total_activity(&self) -> f64 {
        self.base_total + self.gain_total as f64
    }

    /// Link participations gained per node since construction.
    pub fn gains(&self) -> &[u64] {
        &self.gains
    }

    /// Total link participations gained; equals 2m per completed step.
    pub fn gain_total(&self) -> u64 {
        self.gain_total
    }

    pub fn total_links(&self) -> u64 {
        self.total_links
    }

    /// Completed steps.
    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn record_edges(&mut self, on: bool) {
        self.edge_log = if on { Some(Vec::new()) } else { None };
    }

    pub fn edges(&self) -> Option<&[EdgeEvent]> {
        self.edge_log.as_deref()
    }

    /// Destination draw for a link from `source`: proportional to current
    /// activity over all other nodes, via the shared roulette kernel with a
    /// running total instead of a fresh O(n) sum.
    fn select_destination<R: Rng + ?Sized>(&self, source: usize, rng: &mut R) -> usize {
        let selectable_total = self.total_activity() - self.activity(source);
        roulette(
            self.base.len(),
            |i| self.base[i] + self.gains[i] as f64,
            selectable_total,
            Some(source),
            rng,
        )
    }
}

/// Fresh state with every node at activity k0.
pub fn init_network(params: &ModelParams) -> Result<NetworkState> {
    NetworkState::with_overrides(params, &[])
}

/// One roulette draw over non-negative weights with an optional excluded
/// index. `total` is the summed weight of the selectable set; when it is not
/// positive every selectable node is weightless and the draw falls back to
/// uniform. Zero-weight nodes are never selected otherwise.
fn roulette<R, W>(n: usize, weight: W, total: f64, exclude: Option<usize>, rng: &mut R) -> usize
where
    R: Rng + ?Sized,
    W: Fn(usize) -> f64,
{
    let selectable = n - usize::from(exclude.is_some());
    debug_assert!(selectable >= 1);
    if total > 0.0 {
        let mut u = rng.gen_range(0.0..total);
        let mut last_positive = None;
        for i in 0..n {
            if Some(i) == exclude {
                continue;
            }
            let w = weight(i);
            if w <= 0.0 {
                continue;
            }
            if u < w {
                return i;
            }
            u -= w;
            last_positive = Some(i);
        }
        // Summation dust can leave u a hair past the final weight; clamp to
        // the last eligible node. No eligible node at all means `total` was
        // itself dust, which the uniform branch handles.
        if let Some(i) = last_positive {
            return i;
        }
    }
    let k = rng.gen_range(0..selectable);
    let mut seen = 0;
    for i in 0..n {
        if Some(i) == exclude {
            continue;
        }
        if seen == k {
            return i;
        }
        seen += 1;
    }
    unreachable!("selectable count was validated above")
}

/// Activity-proportional draw over a weight slice. `exclude` removes one
/// index from the selectable set; an all-zero selectable set falls back to a
/// uniform draw.
pub fn preferential_select<R: Rng + ?Sized>(
    activities: &[f64],
    rng: &mut R,
    exclude: Option<usize>,
) -> Result<usize> {
    if let Some(e) = exclude {
        if e >= activities.len() {
            return Err(Error::Domain(format!(
                "excluded index {e} out of range for {} activities",
                activities.len()
            )));
        }
    }
    if activities.len() - usize::from(exclude.is_some()) == 0 {
        return Err(Error::Domain("no selectable node".into()));
    }
    let mut total = 0.0;
    for (i, &a) in activities.iter().enumerate() {
        if !a.is_finite() || a < 0.0 {
            return Err(Error::Domain(format!(
                "activity of node {i} must be finite and non-negative, got {a}"
            )));
        }
        if Some(i) != exclude {
            total += a;
        }
    }
    Ok(roulette(activities.len(), |i| activities[i], total, exclude, rng))
}

/// Advances the state by one step: m uniform distinct sources, each linked
/// to a preferential destination, both endpoints credited.
pub fn step_network<R: Rng + ?Sized>(
    state: &mut NetworkState,
    params: &ModelParams,
    rng: &mut R,
) -> Result<()> {
    if state.n_nodes() != params.n_nodes {
        return Err(Error::Domain(format!(
            "state has {} nodes but params specify {}",
            state.n_nodes(),
            params.n_nodes
        )));
    }
    params.validate()?;
    state.step += 1;
    let sources = rand::seq::index::sample(rng, params.n_nodes, params.m as usize);
    for source in sources {
        let destination = state.select_destination(source, rng);
        debug_assert_ne!(destination, source);
        state.gains[source] += 1;
        state.gains[destination] += 1;
        state.gain_total += 2;
        state.total_links += 1;
        if let Some(log) = state.edge_log.as_mut() {
            log.push(EdgeEvent {
                step: state.step,
                source: source as u32,
                destination: destination as u32,
            });
        }
    }
    Ok(())
}

/// Ensemble layout: identical parameters across `runs` independent runs.
/// Run r is seeded from (master_seed, r) alone, so results are reproducible
/// and independent of scheduling.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct EnsembleSpec {
    pub runs: u32,
    pub master_seed: u64,
    pub steps: u64,
    pub record_every: u64,
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        EnsembleSpec {
            runs: 1,
            master_seed: 0,
            steps: 1000,
            record_every: 1,
        }
    }
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.runs < 1 {
            return Err(Error::Config("runs: must be at least 1".into()));
        }
        if self.steps < 1 {
            return Err(Error::Config("steps: must be at least 1".into()));
        }
        if self.record_every < 1 {
            return Err(Error::Config("record_every: must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of recorded rows per run: step 0, every record_every-th step,
    /// and always the final step.
    pub fn recorded_rows(&self) -> u64 {
        let full = self.steps / self.record_every;
        let tail = u64::from(self.steps % self.record_every != 0);
        1 + full + tail
    }
}

/// Per-run recording of activities at sampled steps. Rows follow `times`;
/// each row holds one activity per node.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivitySeries {
    pub times: Vec<u64>,
    pub per_node: Vec<Vec<f64>>,
    pub mean_activity: Vec<f64>,
    pub master_seed: u64,
    pub run_index: u32,
}

impl ActivitySeries {
    pub fn n_nodes(&self) -> usize {
        self.per_node.first().map_or(0, Vec::len)
    }

    pub fn final_activities(&self) -> &[f64] {
        self.per_node.last().map_or(&[], Vec::as_slice)
    }
}

/// The deterministic RNG for run `run_index` of an ensemble.
pub fn run_rng(master_seed: u64, run_index: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(u64::from(run_index));
    rng
}

/// Runs the full ensemble in parallel, results keyed by run index.
pub fn run_simulation(params: &ModelParams, spec: &EnsembleSpec) -> Result<Vec<ActivitySeries>> {
    run_simulation_with_budget(params, spec, &[], DEFAULT_MAX_SERIES_CELLS)
}

/// As `run_simulation`, but with per-node initial-activity overrides applied
/// to every run.
pub fn run_simulation_with_overrides(
    params: &ModelParams,
    spec: &EnsembleSpec,
    overrides: &[(usize, f64)],
) -> Result<Vec<ActivitySeries>> {
    run_simulation_with_budget(params, spec, overrides, DEFAULT_MAX_SERIES_CELLS)
}

pub fn run_simulation_with_budget(
    params: &ModelParams,
    spec: &EnsembleSpec,
    overrides: &[(usize, f64)],
    max_cells: u64,
) -> Result<Vec<ActivitySeries>> {
    params.validate()?;
    spec.validate()?;
    let cells = (spec.runs as u64)
        .saturating_mul(spec.recorded_rows())
        .saturating_mul(params.n_nodes as u64);
    if cells > max_cells {
        return Err(Error::Capacity(format!(
            "recording {} runs x {} rows x {} nodes needs {} cells, budget is {} \
             (raise record_every or lower runs/steps)",
            spec.runs,
            spec.recorded_rows(),
            params.n_nodes,
            cells,
            max_cells
        )));
    }
    // Validate overrides once up front instead of per run.
    NetworkState::with_overrides(params, overrides)?;
    (0..spec.runs)
        .into_par_iter()
        .map(|r| simulate_one(params, spec, overrides, r))
        .collect()
}

fn simulate_one(
    params: &ModelParams,
    spec: &EnsembleSpec,
    overrides: &[(usize, f64)],
    run_index: u32,
) -> Result<ActivitySeries> {
    let mut rng = run_rng(spec.master_seed, run_index);
    let mut state = NetworkState::with_overrides(params, overrides)?;
    let rows = spec.recorded_rows() as usize;
    let mut series = ActivitySeries {
        times: Vec::with_capacity(rows),
        per_node: Vec::with_capacity(rows),
        mean_activity: Vec::with_capacity(rows),
        master_seed: spec.master_seed,
        run_index,
    };
    let record = |state: &NetworkState, series: &mut ActivitySeries| {
        series.times.push(state.step());
        series.per_node.push(state.activities());
        series
            .mean_activity
            .push(state.total_activity() / state.n_nodes() as f64);
    };
    record(&state, &mut series);
    for s in 1..=spec.steps {
        step_network(&mut state, params, &mut rng)?;
        if s % spec.record_every == 0 || s == spec.steps {
            record(&state, &mut series);
        }
    }
    Ok(series)
}
