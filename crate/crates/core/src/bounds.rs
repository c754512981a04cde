//! Closed-form cover and hitting bounds, and their comparison against exact
//! or simulated values.

use std::collections::BTreeMap;

use num_rational::Ratio;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::exact::{resistance_matrix, Analyzer};
use crate::families::{clique_line, clique_line_far_end, mesh2d, radio_line};
use crate::graph::Graph;
use crate::hypergraph::AnyHypergraph;
use crate::io::float_or_inf;
use crate::sim::{
    estimate_cover, estimate_radio_cover, ratio_with_ci, CoverEstimate, SimConfig, SimReport,
    StartPolicy,
};

/// `H_n = Σ_{i ≤ n} 1/i`, summed directly.
pub fn harmonic(n: usize) -> f64 {
    (1..=n).map(|i| 1.0 / i as f64).sum()
}

/// `h_max · H_n`.
pub fn matthews_bound(h_max: f64, n: usize) -> f64 {
    h_max * harmonic(n)
}

/// `e·⌈2 ln n⌉·h̃_max·(1 − 1/n) + n·H_n·h̃_max / n`.
pub fn radio_matthews_bound(h_radio_max: f64, n: usize) -> f64 {
    let nf = n as f64;
    let i = (2.0 * nf.ln()).ceil();
    std::f64::consts::E * i * h_radio_max * (1.0 - 1.0 / nf) + nf * harmonic(n) * h_radio_max / nf
}

/// `2·m·n·r`.
pub fn mnr_bound(n: usize, m: usize, r: usize) -> f64 {
    2.0 * m as f64 * n as f64 * r as f64
}

/// `n·H_n`, the envelope for the cover-time speedup.
pub fn speedup_bound(n: usize) -> f64 {
    n as f64 * harmonic(n)
}

/// `k²/3 + k/2 + 1/6` as an exact rational.
pub fn line1d_constant(k: i64) -> Ratio<i64> {
    Ratio::new(2 * k * k + 3 * k + 1, 6)
}

/// `n² / (k²/3 + k/2 + 1/6)`.
pub fn line1d_bound(n: usize, k: usize) -> f64 {
    let c = line1d_constant(k as i64);
    (n * n) as f64 * *c.denom() as f64 / *c.numer() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LineModel {
    /// Uniform jump to one of the `2k` nodes within distance `k`.
    RadioLine,
    /// Uniform window among the `k` containing the walker, then a uniform
    /// position inside it.
    Hyperline,
}

/// Exact moments of one interior displacement `D`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepMoments {
    pub model: LineModel,
    pub k: i64,
    pub drift: String,
    pub second_moment: String,
    pub constant: String,
    pub second_moment_f64: f64,
    pub constant_f64: f64,
    pub zero_drift: bool,
    /// `E[D²]` equals the constant exactly.
    pub matches: bool,
}

fn moments(model: LineModel, k: i64, outcomes: &[(i64, Ratio<i64>)]) -> StepMoments {
    let drift: Ratio<i64> = outcomes.iter().map(|&(d, p)| p * d).sum();
    let second: Ratio<i64> = outcomes.iter().map(|&(d, p)| p * (d * d)).sum();
    let constant = line1d_constant(k);
    let f = |r: Ratio<i64>| *r.numer() as f64 / *r.denom() as f64;
    StepMoments {
        model,
        k,
        drift: drift.to_string(),
        second_moment: second.to_string(),
        constant: constant.to_string(),
        second_moment_f64: f(second),
        constant_f64: f(constant),
        zero_drift: drift == Ratio::from_integer(0),
        matches: second == constant,
    }
}

/// Enumerates one interior step of both line models.
pub fn line1d_step_moments(k: usize) -> Result<(StepMoments, StepMoments)> {
    if !(1..=1000).contains(&k) {
        return Err(Error::InvalidParameter(format!(
            "step moments need 1 <= k <= 1000, got {k}"
        )));
    }
    let k = k as i64;
    let jump = Ratio::new(1, 2 * k);
    let radio: Vec<(i64, Ratio<i64>)> = (1..=k).flat_map(|j| [(j, jump), (-j, jump)]).collect();
    let cell = Ratio::new(1, k * k);
    // window starting `a` before the walker, landing `j` into the window
    let hyper: Vec<(i64, Ratio<i64>)> = (0..k)
        .flat_map(|a| (0..k).map(move |j| (j - a, cell)))
        .collect();
    Ok((
        moments(LineModel::RadioLine, k, &radio),
        moments(LineModel::Hyperline, k, &hyper),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    /// The bound lies inside the measurement's confidence interval.
    Inconclusive,
}

impl Verdict {
    /// `violated` only when `measured − ci > bound`.
    pub fn judge(measured: f64, ci: f64, bound: f64) -> Self {
        if measured - ci > bound {
            Verdict::Violated
        } else if measured + ci <= bound {
            Verdict::Holds
        } else {
            Verdict::Inconclusive
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Measurement {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub bound: String,
    pub instance: String,
    pub inputs: BTreeMap<String, f64>,
    #[serde(with = "float_or_inf")]
    pub value: f64,
    #[serde(with = "float_or_inf")]
    pub measured: f64,
    #[serde(with = "float_or_inf")]
    pub ci_half_width: f64,
    pub measurement: Measurement,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl BoundReport {
    fn new(
        bound: &str,
        instance: &str,
        inputs: &[(&str, f64)],
        value: f64,
        measured: f64,
        ci: f64,
    ) -> Self {
        Self {
            bound: bound.into(),
            instance: instance.into(),
            inputs: inputs.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            value,
            measured,
            ci_half_width: ci,
            measurement: if ci == 0.0 {
                Measurement::Exact
            } else {
                Measurement::MonteCarlo
            },
            verdict: Verdict::judge(measured, ci, value),
            notes: Vec::new(),
        }
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

/// Names accepted by [`check_family`]'s filter.
pub const CHECKS: [&str; 5] = [
    "matthews",
    "radio_matthews",
    "mnr",
    "speedup",
    "resistance_cover",
];

/// Undirected graph whose simple walk the structure's walk dominates, for
/// the `m·R_max ≤ C` sanity check.
fn underlying_graph(h: &AnyHypergraph) -> Option<Graph> {
    match h {
        AnyHypergraph::Undirected(h) if h.edges().iter().all(|e| e.len() == 2) => Graph::new(
            h.vertex_count(),
            h.edges().iter().map(|e| (e[0], e[1])).collect(),
        )
        .ok(),
        AnyHypergraph::Directed(d) => crate::hypergraph::RadioHypergraph::try_from(d.clone())
            .ok()
            .and_then(|r| r.reception_graph()),
        _ => None,
    }
}

/// Everything measured on one instance, shared by its bound reports.
#[derive(Debug, Clone, Serialize)]
pub struct InstanceMeasurements {
    pub instance: String,
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub h_max: f64,
    pub h_radio_max: f64,
    pub cover: SimReport,
    pub radio_cover: SimReport,
}

/// Two-sided normal quantile giving 95% family-wise coverage over `starts` intervals.
pub fn bonferroni_z(starts: usize) -> f64 {
    let alpha = 0.05 / starts.max(1) as f64;
    Normal::standard().inverse_cdf(1.0 - alpha / 2.0)
}

// The largest of n per-start means is biased upward; widen its interval so that
// a violation verdict means some start's cover really exceeds the bound.
fn worst_start(est: CoverEstimate) -> SimReport {
    let mut r = est.overall;
    if r.std_error.is_finite() {
        r.ci_half_width = bonferroni_z(est.per_start.len()) * r.std_error;
    }
    r
}

pub fn measure(
    h: &AnyHypergraph,
    instance: &str,
    config: &SimConfig,
) -> Result<InstanceMeasurements> {
    let n = h.vertex_count();
    if n < 2 {
        return Err(Error::InvalidParameter("bounds need n >= 2".into()));
    }
    let analyzer = Analyzer::new(h)?;
    let h_max = analyzer.max_hitting()?.value;
    let h_radio_max = analyzer.max_radio_hitting()?.value;
    let model = analyzer.model();
    let cover = worst_start(estimate_cover(model, StartPolicy::All, config)?);
    let radio_cover = worst_start(estimate_radio_cover(model, StartPolicy::All, config)?);
    Ok(InstanceMeasurements {
        instance: instance.into(),
        n,
        m: h.edge_count(),
        r: h.rank(),
        h_max,
        h_radio_max,
        cover,
        radio_cover,
    })
}

/// Runs the requested checks (all of [`CHECKS`] when `checks` is empty).
pub fn check_family(
    h: &AnyHypergraph,
    instance: &str,
    checks: &[&str],
    config: &SimConfig,
) -> Result<Vec<BoundReport>> {
    if let Some(bad) = checks.iter().find(|c| !CHECKS.contains(c)) {
        return Err(Error::InvalidParameter(format!(
            "unknown check {bad:?}; expected one of {CHECKS:?}"
        )));
    }
    let wanted = |c: &str| checks.is_empty() || checks.contains(&c);
    let x = measure(h, instance, config)?;
    let (n, m, r) = (x.n as f64, x.m as f64, x.r as f64);
    let (c, c_ci) = (x.cover.mean, x.cover.ci_half_width);
    let (cr, cr_ci) = (x.radio_cover.mean, x.radio_cover.ci_half_width);
    let mut out = Vec::new();
    let flag_invalid = |rep: BoundReport, sims: &[&SimReport]| {
        if sims.iter().any(|s| !s.valid) {
            rep.note("more than 1% of trials hit the step cap")
        } else {
            rep
        }
    };

    if wanted("matthews") {
        let rep = BoundReport::new(
            "matthews",
            instance,
            &[("n", n), ("h_max", x.h_max)],
            matthews_bound(x.h_max, x.n),
            c,
            c_ci,
        );
        out.push(flag_invalid(rep, &[&x.cover]));
    }
    if wanted("radio_matthews") {
        let rep = BoundReport::new(
            "radio_matthews",
            instance,
            &[("n", n), ("h_radio_max", x.h_radio_max)],
            radio_matthews_bound(x.h_radio_max, x.n),
            cr,
            cr_ci,
        );
        out.push(flag_invalid(rep, &[&x.radio_cover]));
    }
    if wanted("mnr") {
        let mut rep = BoundReport::new(
            "mnr",
            instance,
            &[("n", n), ("m", m), ("r", r)],
            mnr_bound(x.n, x.m, x.r),
            c,
            c_ci,
        );
        if h.is_directed() {
            rep = rep.note("directed input: r is the largest |org ∪ dst|");
        }
        out.push(flag_invalid(rep, &[&x.cover]));
    }
    if wanted("speedup") {
        let (s, s_ci) = ratio_with_ci(&x.cover, &x.radio_cover);
        let s_ci = s_ci * bonferroni_z(x.n) / 1.96;
        let rep = BoundReport::new(
            "speedup",
            instance,
            &[("n", n), ("cover", c), ("radio_cover", cr)],
            speedup_bound(x.n),
            s,
            s_ci,
        );
        out.push(flag_invalid(rep, &[&x.cover, &x.radio_cover]));
    }
    if wanted("resistance_cover") {
        if let Some(g) = underlying_graph(h) {
            let res = resistance_matrix(&g)?;
            let r_max = res.iter().copied().fold(0.0, f64::max);
            let gm = g.edge_count() as f64;
            // m·R_max ≤ C, written as a bound on the left-hand side
            let mut rep = BoundReport::new(
                "resistance_cover",
                instance,
                &[("m", gm), ("r_max", r_max)],
                c + c_ci,
                gm * r_max,
                0.0,
            );
            rep.measurement = Measurement::MonteCarlo;
            out.push(flag_invalid(
                rep.note("bound value is the cover estimate plus its CI"),
                &[&x.cover],
            ));
        }
    }
    Ok(out)
}

/// Monte-Carlo radio cover of the ring `k`-hop line against `n²/(…)`.
///
/// The ring is vertex-transitive, so one start represents all of them.
pub fn line1d_check(n: usize, k: usize, config: &SimConfig) -> Result<BoundReport> {
    let r = radio_line(n, k, true)?;
    let model = crate::walk::WalkModel::directed(r.as_directed());
    let est = estimate_radio_cover(&model, StartPolicy::Fixed(0), config)?.overall;
    let rep = BoundReport::new(
        "line1d",
        &format!("radio_line({n},{k},ring)"),
        &[("n", n as f64), ("k", k as f64)],
        line1d_bound(n, k),
        est.mean,
        est.ci_half_width,
    );
    Ok(if est.valid {
        rep
    } else {
        rep.note("more than 1% of trials hit the step cap")
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MeshTrendRow {
    pub k: usize,
    pub n: usize,
    /// Receivers per arc, `2k(k+1)`.
    pub d: usize,
    pub h_radio_max: f64,
    /// `(n/d)·ln(n/d)`.
    pub scale: f64,
    pub ratio: f64,
    pub sampled_pairs: usize,
    pub min_resistance: f64,
    /// `2/(d+1)`.
    pub resistance_floor: f64,
    pub resistance_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeshTrendReport {
    pub side: usize,
    pub rows: Vec<MeshTrendRow>,
    pub strictly_decreasing: bool,
    /// `max ratio / min ratio`; a flat profile supports the growth rate.
    pub ratio_spread: f64,
    pub resistance_ok: bool,
    pub pass: bool,
}

/// Exact `h̃_max` of `mesh2d(side, k)` over `ks`, plus `R_wv ≥ 2/(d+1)` on
/// `pairs` adjacent pairs sampled with `seed`.
pub fn mesh2d_trend(side: usize, ks: &[usize], pairs: usize, seed: u64) -> Result<MeshTrendReport> {
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let r = mesh2d(side, k)?;
        let n = r.vertex_count();
        let d = 2 * k * (k + 1);
        let analyzer = Analyzer::directed(r.as_directed())?;
        // translations act transitively, so h̃_max = max_v h̃(v, 0)
        let h_radio_max = analyzer
            .radio_profile(&[0])?
            .values
            .into_iter()
            .fold(0.0, f64::max);
        let scale = (n as f64 / d as f64) * (n as f64 / d as f64).ln();
        let g = r.reception_graph().expect("torus balls are symmetric");
        let res = resistance_matrix(&g)?;
        let edges = g.edges();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ k as u64);
        let picked = sample(&mut rng, edges.len(), pairs.min(edges.len()));
        let min_resistance = picked
            .iter()
            .map(|i| res[edges[i]])
            .fold(f64::INFINITY, f64::min);
        let resistance_floor = 2.0 / (d as f64 + 1.0);
        rows.push(MeshTrendRow {
            k,
            n,
            d,
            h_radio_max,
            scale,
            ratio: h_radio_max / scale,
            sampled_pairs: picked.len(),
            min_resistance,
            resistance_floor,
            resistance_ok: min_resistance >= resistance_floor - 1e-12,
        });
    }
    let strictly_decreasing = rows.windows(2).all(|w| w[1].h_radio_max < w[0].h_radio_max);
    let ratios = rows.iter().map(|r| r.ratio).filter(|r| r.is_finite());
    let (lo, hi) = ratios.fold((f64::INFINITY, 0.0f64), |(lo, hi), x| {
        (lo.min(x), hi.max(x))
    });
    let resistance_ok = rows.iter().all(|r| r.resistance_ok);
    Ok(MeshTrendReport {
        side,
        strictly_decreasing,
        ratio_spread: hi / lo,
        resistance_ok,
        pass: strictly_decreasing && resistance_ok,
        rows,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerTrendRow {
    pub n_prime: usize,
    pub c: usize,
    pub n: usize,
    pub m: usize,
    /// `m·n·c`.
    pub scale: f64,
    /// `h̃` from the far line end to the clique vertex `n′−1`.
    pub line_to_clique: f64,
    /// `h̃` from the clique vertex `n′−1` to the far line end.
    pub clique_to_line: f64,
    pub h_radio_max: f64,
    /// `clique_to_line / scale`.
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerTrendReport {
    pub rows: Vec<LowerTrendRow>,
    /// Least-squares slope of `clique_to_line` against `m·n·c`.
    pub slope: f64,
    pub intercept: f64,
    /// `max ratio / min ratio`.
    pub ratio_spread: f64,
    /// Sorted by `m·n·c`, `clique_to_line` never decreases.
    pub monotone: bool,
}

/// Exact radio hitting times across a `clique_line(n′, c)` grid.
pub fn lower_trend(grid: &[(usize, usize)]) -> Result<LowerTrendReport> {
    let mut rows = Vec::with_capacity(grid.len());
    for &(n_prime, c) in grid {
        let h = clique_line(n_prime, c)?;
        let analyzer = Analyzer::undirected(&h)?;
        let far = clique_line_far_end(n_prime);
        let clique = n_prime - 1;
        let (table, _) = analyzer.radio_tables()?;
        let (n, m) = (h.vertex_count(), h.edge_count());
        let scale = (m * n * c) as f64;
        let clique_to_line = table.values[clique][far];
        rows.push(LowerTrendRow {
            n_prime,
            c,
            n,
            m,
            scale,
            line_to_clique: table.values[far][clique],
            clique_to_line,
            h_radio_max: table.max_pair().value,
            ratio: clique_to_line / scale,
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.scale).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.clique_to_line).collect();
    let (slope, intercept) = least_squares(&xs, &ys);
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| rows[a].scale.total_cmp(&rows[b].scale));
    let monotone = order
        .windows(2)
        .all(|w| rows[w[1]].clique_to_line >= rows[w[0]].clique_to_line);
    let (lo, hi) = rows.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| {
        (lo.min(r.ratio), hi.max(r.ratio))
    });
    Ok(LowerTrendReport {
        rows,
        slope,
        intercept,
        ratio_spread: hi / lo,
        monotone,
    })
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return (f64::NAN, f64::NAN);
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bonferroni_quantiles() {
        assert!((bonferroni_z(1) - 1.959964).abs() < 1e-5);
        assert!((bonferroni_z(16) - 2.955).abs() < 1e-3);
        assert!(bonferroni_z(100) > bonferroni_z(16));
    }

    #[test]
    fn closed_forms() {
        assert!((harmonic(3) - 11.0 / 6.0).abs() < 1e-15);
        assert!((matthews_bound(8.0, 3) - 8.0 * 11.0 / 6.0).abs() < 1e-12);
        assert_eq!(mnr_bound(3, 2, 2), 24.0);
        assert_eq!(mnr_bound(4, 1, 4), 32.0);
        assert_eq!(mnr_bound(15, 63, 3), 5670.0);
        assert!((speedup_bound(4) - 25.0 / 3.0).abs() < 1e-12);
        assert!(radio_matthews_bound(1.0, 4) >= 1.0);
        assert!((line1d_bound(200, 5) - 40000.0 / 11.0).abs() < 1e-9);
    }

    #[test]
    fn step_moments_k2() {
        let (radio, hyper) = line1d_step_moments(2).unwrap();
        assert_eq!(radio.second_moment, "5/2");
        assert!(radio.matches && radio.zero_drift);
        assert_eq!(hyper.second_moment, "1/2");
        assert!(!hyper.matches && hyper.zero_drift);
    }

    #[test]
    fn radio_line_constant_for_small_k() {
        for k in 1..=10 {
            assert!(line1d_step_moments(k).unwrap().0.matches, "k = {k}");
        }
    }

    #[test]
    fn verdicts() {
        assert_eq!(Verdict::judge(10.0, 1.0, 12.0), Verdict::Holds);
        assert_eq!(Verdict::judge(10.0, 1.0, 10.5), Verdict::Inconclusive);
        assert_eq!(Verdict::judge(10.0, 1.0, 8.0), Verdict::Violated);
        assert_eq!(Verdict::judge(10.0, 0.0, 10.0), Verdict::Holds);
    }

    #[test]
    fn unknown_check_is_rejected() {
        let h: AnyHypergraph = crate::families::hyperline(3, 2).unwrap().into();
        assert!(check_family(&h, "p3", &["bogus"], &SimConfig::new(10, 0)).is_err());
    }

    #[test]
    fn p3_checks_hold() {
        let h: AnyHypergraph = crate::families::hyperline(3, 2).unwrap().into();
        let reps = check_family(&h, "p3", &[], &SimConfig::new(2000, 0)).unwrap();
        assert_eq!(reps.len(), 5);
        assert!(
            reps.iter().all(|r| r.verdict == Verdict::Holds),
            "{reps:#?}"
        );
    }

    #[test]
    fn small_mesh_resistance_floor() {
        let rep = mesh2d_trend(5, &[1], 20, 0).unwrap();
        assert!(rep.rows[0].min_resistance >= 2.0 / 5.0);
    }

    #[test]
    fn degenerate_clique_line() {
        let rep = lower_trend(&[(2, 2)]).unwrap();
        assert!(rep.rows[0].clique_to_line.is_finite());
    }
}
