use leeyang::dynamics::{trace_single_edge, TraceOptions};
use leeyang::partition::{edge_correlation, magnetization_weights};
use leeyang::scenarios::{instance_set, random_instance, reconstruct_g5, Scenario};
use leeyang::trigpoly::{circle_check, direct_zero_scan, solve_zeros, SolveOptions, WeightSource, DEFAULT_TOL};
use leeyang::verify::{classify_trajectories, disjointness_check, ZeroTag, DEFAULT_CONSTANT_EPS};
use leeyang::CouplingGraph;
use num_complex::Complex64;

/// Z(x) by summing over all 2^n spin configurations.
fn brute_force(g: &CouplingGraph, t: f64, x: Complex64) -> Complex64 {
    let n = g.n();
    let j = g.effective_couplings(t);
    let mut z = Complex64::new(0.0, 0.0);
    for s in 0u32..(1 << n) {
        let spin = |u: usize| if s >> u & 1 == 1 { 1.0 } else { -1.0 };
        let e: f64 = g.edges().iter().zip(&j).map(|(e, &c)| c * spin(e.u) * spin(e.v)).sum();
        let m: f64 = (0..n).map(spin).sum();
        z += (Complex64::new(e, 0.0) + Complex64::i() * x * m).exp();
    }
    z
}

#[test]
fn weights_match_brute_force_enumeration() {
    for (i, g) in instance_set(31, 6).iter().enumerate() {
        let t = 0.4 + 0.3 * i as f64;
        let w = magnetization_weights::<f64>(g, t).unwrap();
        let z0 = brute_force(g, t, Complex64::new(0.0, 0.0));
        for x in [Complex64::new(0.3, 0.0), Complex64::new(1.1, 0.4), Complex64::new(-0.7, -0.9)] {
            let ours = w.evaluate(x) / w.evaluate(Complex64::new(0.0, 0.0));
            let theirs = brute_force(g, t, x) / z0;
            assert!((ours - theirs).norm() < 1e-12 * theirs.norm().max(1.0), "instance {i} x={x}");
        }
    }
}

#[test]
fn brute_force_vanishes_at_extracted_zeros() {
    for g in instance_set(5, 5) {
        for t in [0.0, 0.8, 3.0] {
            let zs = solve_zeros(&WeightSource::Graph { graph: &g, t }, SolveOptions::default()).unwrap();
            let scale = brute_force(&g, t, Complex64::new(0.0, 0.0)).norm();
            for &x in &zs.x {
                let v = brute_force(&g, t, Complex64::new(x, 0.0)).norm() / scale;
                assert!(v < 1e-10, "n={} t={t} x={x} residual {v:e}", g.n());
            }
        }
    }
}

#[test]
fn extraction_agrees_with_direct_scan() {
    for g in instance_set(77, 8) {
        let w = magnetization_weights::<f64>(&g, 0.6).unwrap();
        let zs = solve_zeros(&WeightSource::Graph { graph: &g, t: 0.6 }, SolveOptions::default()).unwrap();
        let scan = direct_zero_scan(&w, g.n() / 2, DEFAULT_TOL).unwrap();
        for (a, b) in zs.interior().iter().zip(scan.interior()) {
            assert!((a - b).abs() <= 10.0 * DEFAULT_TOL.max(zs.x_tol.iter().copied().fold(0.0, f64::max)), "{a} vs {b}");
        }
        let c = circle_check(&w, &zs);
        assert!(c.max_radius_deviation < 1e-10 && c.max_match_distance < 1e-8);
    }
}

#[test]
fn correlation_matches_brute_force() {
    let g = random_instance(7, 19);
    let v = g.varying_edge().unwrap();
    let (a, b) = (v.u, v.v);
    let t = 0.9;
    let j = g.effective_couplings(t);
    let (mut num, mut den) = (0.0, 0.0);
    for s in 0u32..(1 << g.n()) {
        let spin = |u: usize| if s >> u & 1 == 1 { 1.0 } else { -1.0 };
        let e: f64 = g.edges().iter().zip(&j).map(|(e, &c)| c * spin(e.u) * spin(e.v)).sum();
        num += spin(a) * spin(b) * e.exp();
        den += e.exp();
    }
    let ours: f64 = edge_correlation(&g, t).unwrap();
    assert!((ours - num / den).abs() < 1e-14);
}

#[test]
fn json_round_trip_preserves_zeros() {
    let g = random_instance(8, 3);
    let text = serde_json::to_string(&g.to_document()).unwrap();
    let back = CouplingGraph::from_json_str(&text).unwrap();
    let a = solve_zeros(&WeightSource::Graph { graph: &g, t: 1.0 }, SolveOptions::default()).unwrap();
    let b = solve_zeros(&WeightSource::Graph { graph: &back, t: 1.0 }, SolveOptions::default()).unwrap();
    assert_eq!(a.x, b.x);
}

#[test]
fn scenario_registry_resolves_names() {
    assert!(matches!(Scenario::parse("cw:5", 0.0, 0).unwrap(), Scenario::CurieWeiss { n: 5 }));
    let r = Scenario::parse("random:9", 0.0, 6).unwrap();
    assert_eq!(r.graph().unwrap().unwrap().n(), 6);
    assert!(Scenario::parse("g5", 0.44, 0).unwrap().graph().unwrap().is_some());
    assert!(Scenario::parse("square", 0.0, 0).is_err());
    assert!(Scenario::parse("cw:x", 0.0, 0).is_err());
}

#[test]
fn random_instance_traces_to_decreasing_zeros() {
    let g = random_instance(6, 101);
    assert!(g.hypothesis_met());
    let times: Vec<f64> = (1..=12).map(|i| 0.05 * i as f64 * i as f64).collect();
    let r = trace_single_edge(&g, &times, &TraceOptions::default()).unwrap();
    assert!(r.max_deviation() < 1e-7);
    let rep = classify_trajectories(&r.direct, &r.initial, true, DEFAULT_CONSTANT_EPS).unwrap();
    assert_eq!(rep.tags.len(), 3);
    assert!(rep.tags.iter().all(|t| *t != ZeroTag::Unclassified));
    assert!(rep.containment_holds);
    assert!(disjointness_check(&rep, &r.direct, &r.initial).disjoint);
}

#[test]
fn g5_graph_misses_the_connectivity_hypothesis() {
    let s = reconstruct_g5().unwrap();
    let g = s.graph(0.44).unwrap();
    assert_eq!(g.n(), 5);
    assert!(g.varying_edge().is_some());
    assert!(!g.hypothesis_met());
}
