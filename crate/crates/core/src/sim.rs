//! Seeded Monte-Carlo simulation of the walk.
//!
//! Each trial owns a ChaCha8 stream selected by `(seed, start, trial)`, so a
//! trial's outcome does not depend on which worker runs it. Results are
//! gathered in trial order and summed pairwise, which makes every report
//! identical for any thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Analyzer, MaxPair};
use crate::hypergraph::AnyHypergraph;
use crate::io::float_or_inf;
use crate::linalg::{mean_variance, stationary_distribution};
use crate::walk::WalkModel;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "HYPERWALK_THREADS";

/// Largest fraction of capped trials for a report to stay valid.
pub const MAX_CAPPED_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartPolicy {
    Fixed(usize),
    /// Every vertex; the headline estimate is the largest per-start mean.
    All,
    /// Each trial draws its start from the stationary law of the walk.
    Stationary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub trials: usize,
    /// Per-trial step cap; defaults to [`default_cap`].
    pub cap: Option<u64>,
    pub seed: u64,
    /// Worker count; falls back to `HYPERWALK_THREADS`, then rayon's default.
    pub threads: Option<usize>,
}

impl SimConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self {
            trials,
            cap: None,
            seed,
            threads: None,
        }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = Some(cap);
        self
    }
}

/// `50 · 2mnr`, fifty times the worst-case cover-time bound.
pub fn default_cap(model: &WalkModel) -> u64 {
    let (n, m, r) = (
        model.vertex_count() as u64,
        model.edge_count() as u64,
        model.rank() as u64,
    );
    (50 * 2 * m * n * r).max(1)
}

fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&k| k > 0)
}

/// Runs `f` on a pool of the configured size (or the global pool).
pub fn with_workers<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads.or_else(threads_from_env) {
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        None => f(),
    }
}

fn trial_rng(seed: u64, start_tag: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((start_tag << 32) | trial);
    rng
}

fn start_tag(start: Option<usize>) -> u64 {
    start.map_or(0, |s| s as u64 + 1)
}

#[inline]
fn step<R: Rng>(model: &WalkModel, x: usize, rng: &mut R) -> (usize, usize) {
    let out = model.out_edges(x);
    let e = out[rng.random_range(0..out.len())];
    let land = model.landing(e);
    (e, land[rng.random_range(0..land.len())])
}

fn check_model(model: &WalkModel) -> Result<()> {
    if model.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    if let Some(v) = model.first_stuck_vertex() {
        return Err(Error::ZeroDegree(v));
    }
    Ok(())
}

fn check_start(model: &WalkModel, start: usize) -> Result<()> {
    if start >= model.vertex_count() {
        return Err(Error::InvalidParameter(format!(
            "start vertex {start} out of range (n = {})",
            model.vertex_count()
        )));
    }
    Ok(())
}

/// One step of a trajectory: the edge chosen and the vertex landed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Step {
    pub edge: usize,
    pub vertex: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trajectory {
    pub start: usize,
    pub steps: Vec<Step>,
}

impl Trajectory {
    /// Fraction of time spent on each vertex over `X(1..=t)`.
    pub fn occupancy(&self, n: usize) -> Vec<f64> {
        let mut counts = vec![0usize; n];
        for s in &self.steps {
            counts[s.vertex] += 1;
        }
        let total = self.steps.len().max(1) as f64;
        counts.into_iter().map(|c| c as f64 / total).collect()
    }
}

pub fn simulate_walk(
    model: &WalkModel,
    start: usize,
    steps: usize,
    seed: u64,
) -> Result<Trajectory> {
    check_model(model)?;
    check_start(model, start)?;
    let mut rng = trial_rng(seed, start_tag(Some(start)), 0);
    let mut x = start;
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let (e, y) = step(model, x, &mut rng);
        out.push(Step { edge: e, vertex: y });
        x = y;
    }
    Ok(Trajectory { start, steps: out })
}

/// What a trial waits for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Passage {
    /// The walk occupies the vertex.
    Visit,
    /// A transmission is heard by the vertex.
    Hear,
}

impl Passage {
    fn cover_name(self) -> &'static str {
        match self {
            Passage::Visit => "cover",
            Passage::Hear => "radio_cover",
        }
    }

    fn hitting_name(self) -> &'static str {
        match self {
            Passage::Visit => "hitting",
            Passage::Hear => "radio_hitting",
        }
    }
}

/// Steps until every vertex is covered, or `None` at the cap.
fn cover_trial<R: Rng>(
    model: &WalkModel,
    start: usize,
    passage: Passage,
    cap: u64,
    rng: &mut R,
) -> Option<u64> {
    let n = model.vertex_count();
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut count = 1;
    if count == n {
        return Some(0);
    }
    let mut x = start;
    let mut t = 0;
    while t < cap {
        let (e, y) = step(model, x, rng);
        t += 1;
        match passage {
            Passage::Visit => {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                }
            }
            Passage::Hear => {
                for &v in model.audience(e) {
                    if !seen[v] {
                        seen[v] = true;
                        count += 1;
                    }
                }
            }
        }
        if count == n {
            return Some(t);
        }
        x = y;
    }
    None
}

/// First-passage time of every vertex in `targets`, `None` for those not
/// reached by the cap.
fn passage_trial<R: Rng>(
    model: &WalkModel,
    start: usize,
    targets: &[usize],
    passage: Passage,
    cap: u64,
    rng: &mut R,
) -> Vec<Option<u64>> {
    let n = model.vertex_count();
    let mut slot = vec![usize::MAX; n];
    for (i, &u) in targets.iter().enumerate() {
        slot[u] = i;
    }
    let mut times: Vec<Option<u64>> = vec![None; targets.len()];
    let mut left = targets.len();
    if slot[start] != usize::MAX {
        times[slot[start]] = Some(0);
        left -= 1;
    }
    let mut x = start;
    let mut t = 0;
    while left > 0 && t < cap {
        let (e, y) = step(model, x, rng);
        t += 1;
        let mut mark = |v: usize| {
            let i = slot[v];
            if i != usize::MAX && times[i].is_none() {
                times[i] = Some(t);
                left -= 1;
            }
        };
        match passage {
            Passage::Visit => mark(y),
            Passage::Hear => model.audience(e).iter().for_each(|&v| mark(v)),
        }
        x = y;
    }
    times
}

/// Summary of one Monte-Carlo quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub quantity: String,
    /// Fixed start vertex, or `None` for stationary draws.
    pub start: Option<usize>,
    pub target: Option<usize>,
    pub trials: usize,
    /// Trials that finished under the cap; moments use these only.
    pub completed: usize,
    #[serde(with = "float_or_inf")]
    pub mean: f64,
    #[serde(with = "float_or_inf")]
    pub variance: f64,
    #[serde(with = "float_or_inf")]
    pub std_error: f64,
    /// `1.96 · sqrt(variance / completed)`.
    #[serde(with = "float_or_inf")]
    pub ci_half_width: f64,
    pub seed: u64,
    pub cap: u64,
    pub capped: usize,
    /// False when more than 1% of trials hit the cap.
    pub valid: bool,
}

fn summarize(
    quantity: &str,
    start: Option<usize>,
    target: Option<usize>,
    samples: &[Option<u64>],
    seed: u64,
    cap: u64,
) -> SimReport {
    let done: Vec<f64> = samples.iter().flatten().map(|&x| x as f64).collect();
    let capped = samples.len() - done.len();
    let (mean, variance) = mean_variance(&done);
    let std_error = if done.is_empty() {
        f64::NAN
    } else {
        (variance / done.len() as f64).sqrt()
    };
    SimReport {
        quantity: quantity.to_string(),
        start,
        target,
        trials: samples.len(),
        completed: done.len(),
        mean,
        variance,
        std_error,
        ci_half_width: 1.96 * std_error,
        seed,
        cap,
        capped,
        valid: !done.is_empty() && capped as f64 <= MAX_CAPPED_FRACTION * samples.len() as f64,
    }
}

/// Raw per-trial outcomes of a cover simulation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverSamples {
    pub quantity: String,
    pub policy: StartPolicy,
    pub seed: u64,
    pub cap: u64,
    /// One entry per start group (`None` = stationary draw).
    pub starts: Vec<Option<usize>>,
    /// `values[g][trial]`, `None` for capped trials.
    pub values: Vec<Vec<Option<u64>>>,
}

/// Cover or radio cover estimate under a start policy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverEstimate {
    pub quantity: String,
    pub policy: StartPolicy,
    pub per_start: Vec<SimReport>,
    /// The reported estimate: the largest per-start mean for `All`.
    pub overall: SimReport,
    pub valid: bool,
}

impl CoverSamples {
    pub fn summarize(&self) -> CoverEstimate {
        let per_start: Vec<SimReport> = self
            .starts
            .iter()
            .zip(&self.values)
            .map(|(&s, v)| summarize(&self.quantity, s, None, v, self.seed, self.cap))
            .collect();
        let mut best = 0;
        for (i, r) in per_start.iter().enumerate() {
            if r.mean > per_start[best].mean {
                best = i;
            }
        }
        CoverEstimate {
            quantity: self.quantity.clone(),
            policy: self.policy,
            overall: per_start[best].clone(),
            valid: per_start.iter().all(|r| r.valid),
            per_start,
        }
    }
}

fn sample_starts(
    model: &WalkModel,
    policy: StartPolicy,
) -> Result<(Vec<Option<usize>>, Option<Vec<f64>>)> {
    match policy {
        StartPolicy::Fixed(s) => {
            check_start(model, s)?;
            Ok((vec![Some(s)], None))
        }
        StartPolicy::All => Ok(((0..model.vertex_count()).map(Some).collect(), None)),
        StartPolicy::Stationary => {
            let p = model.entry_matrix() * model.exit_matrix();
            let pi = stationary_distribution(&p)?;
            let mut acc = 0.0;
            let cumulative = pi
                .iter()
                .map(|&x| {
                    acc += x.max(0.0);
                    acc
                })
                .collect();
            Ok((vec![None], Some(cumulative)))
        }
    }
}

fn draw(cumulative: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u = rng.random::<f64>() * cumulative[cumulative.len() - 1];
    cumulative
        .partition_point(|&c| c <= u)
        .min(cumulative.len() - 1)
}

pub fn sample_cover(
    model: &WalkModel,
    passage: Passage,
    policy: StartPolicy,
    config: &SimConfig,
) -> Result<CoverSamples> {
    check_model(model)?;
    let (starts, cumulative) = sample_starts(model, policy)?;
    let cap = config.cap.unwrap_or_else(|| default_cap(model));
    let trials = config.trials;
    let seed = config.seed;
    let jobs = starts.len() * trials;
    let flat: Vec<Option<u64>> = with_workers(config.threads, || {
        (0..jobs)
            .into_par_iter()
            .map(|job| {
                let (g, trial) = (job / trials, job % trials);
                let mut rng = trial_rng(seed, start_tag(starts[g]), trial as u64);
                let s = match (starts[g], &cumulative) {
                    (Some(s), _) => s,
                    (None, Some(c)) => draw(c, &mut rng),
                    (None, None) => unreachable!("stationary policy carries its law"),
                };
                cover_trial(model, s, passage, cap, &mut rng)
            })
            .collect()
    });
    let values = if trials == 0 {
        vec![Vec::new(); starts.len()]
    } else {
        flat.chunks(trials).map(<[_]>::to_vec).collect()
    };
    Ok(CoverSamples {
        quantity: passage.cover_name().into(),
        policy,
        seed,
        cap,
        starts,
        values,
    })
}

/// Cover time `E[C_v]` estimate(s).
pub fn estimate_cover(
    model: &WalkModel,
    policy: StartPolicy,
    config: &SimConfig,
) -> Result<CoverEstimate> {
    Ok(sample_cover(model, Passage::Visit, policy, config)?.summarize())
}

/// Radio cover time `E[C̃_v]` estimate(s). A vertex hears transmission `k`
/// when the `k`-th traversed edge contains it; the start hears at time 0.
pub fn estimate_radio_cover(
    model: &WalkModel,
    policy: StartPolicy,
    config: &SimConfig,
) -> Result<CoverEstimate> {
    Ok(sample_cover(model, Passage::Hear, policy, config)?.summarize())
}

/// Monte-Carlo hitting (`Visit`) or radio hitting (`Hear`) times from one
/// start to each of `targets`, all estimated from the same trajectories.
pub fn estimate_first_passage(
    model: &WalkModel,
    start: usize,
    targets: &[usize],
    passage: Passage,
    config: &SimConfig,
) -> Result<Vec<SimReport>> {
    check_model(model)?;
    check_start(model, start)?;
    if let Some(&u) = targets.iter().find(|&&u| u >= model.vertex_count()) {
        return Err(Error::InvalidParameter(format!("target {u} out of range")));
    }
    let mut seen = vec![false; model.vertex_count()];
    for &u in targets {
        if std::mem::replace(&mut seen[u], true) {
            return Err(Error::InvalidParameter(format!("target {u} listed twice")));
        }
    }
    let cap = config.cap.unwrap_or_else(|| default_cap(model));
    let seed = config.seed;
    let runs: Vec<Vec<Option<u64>>> = with_workers(config.threads, || {
        (0..config.trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = trial_rng(seed, start_tag(Some(start)), trial as u64);
                passage_trial(model, start, targets, passage, cap, &mut rng)
            })
            .collect()
    });
    Ok(targets
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let col: Vec<Option<u64>> = runs.iter().map(|r| r[i]).collect();
            summarize(
                passage.hitting_name(),
                Some(start),
                Some(u),
                &col,
                seed,
                cap,
            )
        })
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct SpeedupReport {
    pub max_hitting: MaxPair,
    pub max_radio_hitting: MaxPair,
    /// Largest raw edge-process value, i.e. `h̃` without the first transmission.
    pub max_radio_raw: MaxPair,
    /// `h_max / h̃_max` from exact values.
    pub hitting_speedup: f64,
    /// `h_max` over the largest raw value.
    pub hitting_speedup_raw: f64,
    pub cover: CoverEstimate,
    pub radio_cover: CoverEstimate,
    /// `C / C̃` from the Monte-Carlo estimates.
    pub cover_speedup: f64,
    /// Delta-method 95% half-width of `cover_speedup`.
    pub cover_speedup_ci: f64,
}

/// Ratio of two independent estimates with a delta-method 95% half-width.
pub fn ratio_with_ci(num: &SimReport, den: &SimReport) -> (f64, f64) {
    let r = num.mean / den.mean;
    let rel = (num.std_error / num.mean).powi(2) + (den.std_error / den.mean).powi(2);
    (r, 1.96 * r.abs() * rel.sqrt())
}

pub fn estimate_speedups(h: &AnyHypergraph, config: &SimConfig) -> Result<SpeedupReport> {
    let analyzer = Analyzer::new(h)?;
    let max_hitting = analyzer.max_hitting()?;
    let (radio, raw) = analyzer.radio_tables()?;
    let max_radio_hitting = radio.max_pair();
    let max_radio_raw = raw.max_pair();
    let model = analyzer.model();
    let cover = estimate_cover(model, StartPolicy::All, config)?;
    let radio_cover = estimate_radio_cover(model, StartPolicy::All, config)?;
    let (cover_speedup, cover_speedup_ci) = ratio_with_ci(&cover.overall, &radio_cover.overall);
    Ok(SpeedupReport {
        hitting_speedup: max_hitting.value / max_radio_hitting.value,
        hitting_speedup_raw: max_hitting.value / max_radio_raw.value,
        max_radio_raw,
        max_hitting,
        max_radio_hitting,
        cover,
        radio_cover,
        cover_speedup,
        cover_speedup_ci,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::Hypergraph;

    fn p3() -> WalkModel {
        WalkModel::undirected(&Hypergraph::new(3, vec![vec![0, 1], vec![1, 2]]).unwrap())
    }

    fn single(n: usize) -> WalkModel {
        WalkModel::undirected(&Hypergraph::new(n, vec![(0..n).collect()]).unwrap())
    }

    #[test]
    fn trajectories_respect_incidence() {
        let m = single(4);
        let t = simulate_walk(&m, 0, 10, 3).unwrap();
        assert!(t.steps.iter().all(|s| s.edge == 0));

        let m = p3();
        for seed in 0..20 {
            let t = simulate_walk(&m, 0, 1, seed).unwrap();
            assert_eq!(t.steps[0].edge, 0);
        }
        let t = simulate_walk(&m, 1, 200, 9).unwrap();
        let mut prev = 1;
        for s in &t.steps {
            assert!(m.out_edges(prev).contains(&s.edge));
            assert!(m.landing(s.edge).contains(&s.vertex));
            prev = s.vertex;
        }
        assert_eq!(t, simulate_walk(&m, 1, 200, 9).unwrap());
    }

    #[test]
    fn single_edge_radio_cover_is_one() {
        let est =
            estimate_radio_cover(&single(4), StartPolicy::All, &SimConfig::new(200, 1)).unwrap();
        for r in &est.per_start {
            assert_eq!((r.mean, r.variance), (1.0, 0.0));
        }
    }

    #[test]
    fn degenerate_single_vertex() {
        let m = single(1);
        let est = estimate_cover(&m, StartPolicy::Fixed(0), &SimConfig::new(10, 0)).unwrap();
        assert_eq!(est.overall.mean, 0.0);
        let est = estimate_radio_cover(&m, StartPolicy::Fixed(0), &SimConfig::new(10, 0)).unwrap();
        assert_eq!(est.overall.mean, 0.0);
    }

    #[test]
    fn cap_breaches_are_counted_not_averaged() {
        let cfg = SimConfig::new(100, 5).with_cap(2);
        let est = estimate_cover(&p3(), StartPolicy::Fixed(0), &cfg).unwrap();
        let r = &est.overall;
        assert!(r.capped > 0);
        assert_eq!(r.completed + r.capped, 100);
        assert!(r.mean <= 2.0);
        assert!(!r.valid && !est.valid);
    }

    #[test]
    fn stationary_policy_runs() {
        let est = estimate_cover(&p3(), StartPolicy::Stationary, &SimConfig::new(500, 2)).unwrap();
        assert_eq!(est.per_start.len(), 1);
        assert_eq!(est.overall.start, None);
        assert!(est.overall.mean > 0.0);
    }

    #[test]
    fn ci_matches_definition() {
        let est = estimate_cover(&p3(), StartPolicy::Fixed(0), &SimConfig::new(300, 8)).unwrap();
        let r = est.overall;
        assert_eq!(
            r.ci_half_width,
            1.96 * (r.variance / r.completed as f64).sqrt()
        );
    }

    #[test]
    fn first_passage_from_target_is_zero() {
        let reps =
            estimate_first_passage(&p3(), 1, &[1, 2], Passage::Visit, &SimConfig::new(50, 0))
                .unwrap();
        assert_eq!(reps[0].mean, 0.0);
        assert!(reps[1].mean > 0.0);
        assert!(
            estimate_first_passage(&p3(), 3, &[1], Passage::Visit, &SimConfig::new(1, 0)).is_err()
        );
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let a = estimate_cover(
            &p3(),
            StartPolicy::All,
            &SimConfig::new(400, 11).with_threads(1),
        )
        .unwrap();
        let b = estimate_cover(
            &p3(),
            StartPolicy::All,
            &SimConfig::new(400, 11).with_threads(3),
        )
        .unwrap();
        assert_eq!(a, b);
    }
}
