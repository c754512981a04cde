use hyperwalk::exact::Analyzer;
use hyperwalk::families::{hyperline, mesh2d, single_edge};
use hyperwalk::sim::{
    default_cap, estimate_cover, estimate_first_passage, estimate_radio_cover, estimate_speedups,
    sample_cover, simulate_walk, Passage, SimConfig, StartPolicy,
};
use hyperwalk::{AnyHypergraph, WalkModel};

fn p3() -> WalkModel {
    WalkModel::undirected(&hyperline(3, 2).unwrap())
}

fn within(mean: f64, se: f64, expected: f64) -> bool {
    (mean - expected).abs() <= 4.0 * se
}

#[test]
fn path_cover_and_radio_cover_from_an_end() {
    let cfg = SimConfig::new(20_000, 3);
    let c = estimate_cover(&p3(), StartPolicy::Fixed(0), &cfg)
        .unwrap()
        .overall;
    assert!(within(c.mean, c.std_error, 8.0), "{c:?}");
    let r = estimate_radio_cover(&p3(), StartPolicy::Fixed(0), &cfg)
        .unwrap()
        .overall;
    assert!(within(r.mean, r.std_error, 5.0), "{r:?}");
    assert_eq!(c.capped + r.capped, 0);
}

#[test]
fn single_edge_cover_is_coupon_collecting() {
    let model = WalkModel::undirected(&single_edge(4).unwrap());
    let c = estimate_cover(&model, StartPolicy::Fixed(0), &SimConfig::new(20_000, 5))
        .unwrap()
        .overall;
    assert!(within(c.mean, c.std_error, 22.0 / 3.0), "{c:?}");
}

#[test]
fn occupancy_approaches_stationary_law() {
    let t = simulate_walk(&p3(), 0, 100_000, 17).unwrap();
    let occ = t.occupancy(3);
    for (got, want) in occ.iter().zip([0.25, 0.5, 0.25]) {
        assert!((got - want).abs() < 0.01, "{occ:?}");
    }
}

#[test]
fn hitting_estimates_agree_with_exact() {
    let h = hyperline(8, 3).unwrap();
    let an = Analyzer::undirected(&h).unwrap();
    let targets: Vec<usize> = (1..8).collect();
    let cfg = SimConfig::new(10_000, 23);
    let visit = estimate_first_passage(an.model(), 0, &targets, Passage::Visit, &cfg).unwrap();
    let hear = estimate_first_passage(an.model(), 0, &targets, Passage::Hear, &cfg).unwrap();
    for (i, &u) in targets.iter().enumerate() {
        let h_exact = an.hitting(&[u]).unwrap().values[0];
        let r_exact = an.radio_hitting(0, &[u]).unwrap().value;
        assert!(
            within(visit[i].mean, visit[i].std_error, h_exact),
            "h(0,{u})"
        );
        assert!(
            within(hear[i].mean, hear[i].std_error, r_exact),
            "radio h(0,{u})"
        );
    }
}

#[test]
fn torus_radio_cover_exceeds_worst_radio_hitting() {
    let r: AnyHypergraph = mesh2d(5, 1).unwrap().into();
    let an = Analyzer::new(&r).unwrap();
    let h_max = an.max_radio_hitting().unwrap().value;
    let c = estimate_radio_cover(an.model(), StartPolicy::Fixed(0), &SimConfig::new(5_000, 1))
        .unwrap()
        .overall;
    assert!(c.mean + 3.0 * c.std_error >= h_max, "{} vs {h_max}", c.mean);
}

#[test]
fn speedups_on_the_path() {
    let rep =
        estimate_speedups(&hyperline(3, 2).unwrap().into(), &SimConfig::new(5_000, 2)).unwrap();
    assert!((rep.hitting_speedup - 1.6).abs() < 1e-9);
    assert!((rep.hitting_speedup_raw - 2.0).abs() < 1e-9);
    assert!(rep.cover_speedup > 1.0 && rep.cover_speedup_ci > 0.0);
}

#[test]
fn samples_and_caps() {
    let model = p3();
    assert_eq!(default_cap(&model), 50 * 2 * 2 * 3 * 2);
    let s = sample_cover(
        &model,
        Passage::Visit,
        StartPolicy::All,
        &SimConfig::new(50, 0),
    )
    .unwrap();
    assert_eq!(s.values.len(), 3);
    assert!(s.values.iter().all(|v| v.len() == 50));
    let est = s.summarize();
    let best = est.per_start.iter().map(|r| r.mean).fold(0.0, f64::max);
    assert_eq!(est.overall.mean, best);
}

#[test]
fn same_seed_same_bytes() {
    let cfg = SimConfig::new(1_000, 99);
    let a = serde_json::to_string(&estimate_cover(&p3(), StartPolicy::Stationary, &cfg).unwrap())
        .unwrap();
    let b = serde_json::to_string(&estimate_cover(&p3(), StartPolicy::Stationary, &cfg).unwrap())
        .unwrap();
    assert_eq!(a, b);
    let c = serde_json::to_string(
        &estimate_cover(&p3(), StartPolicy::Stationary, &SimConfig::new(1_000, 98)).unwrap(),
    )
    .unwrap();
    assert_ne!(a, c);
}

#[test]
fn bad_inputs_are_rejected() {
    let cfg = SimConfig::new(10, 0);
    assert!(estimate_cover(&p3(), StartPolicy::Fixed(7), &cfg).is_err());
    assert!(estimate_first_passage(&p3(), 0, &[1, 1], Passage::Visit, &cfg).is_err());
    assert!(simulate_walk(&p3(), 3, 1, 0).is_err());
}
