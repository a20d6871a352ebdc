//! Acceptance criteria 1-9. Prints one PASS/FAIL line per criterion plus
//! indented detail lines. A FAIL is reported, not raised, so the rest of
//! the workspace tests still run.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use f256::f256;
use leeyang::dynamics::{trace_single_edge, TraceOptions};
use leeyang::scenarios::{critical_beta, g5_invariant_zero, g5_partition, g5_scale, instance_set, G5Params};
use leeyang::trigpoly::{solve_zeros, SolveOptions, WeightSource, DEFAULT_TOL};
use leeyang::verify::{
    checkpoints, complex_samples, cooperativity_sample, cw_monotonicity, factorization_max, g5_constant_tag, g5_t_grid,
    structure_checks, tshift_max, ydifft_max,
};
use leeyang::CouplingGraph;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 7;

struct Line {
    id: u32,
    title: &'static str,
    pass: bool,
    details: Vec<String>,
}

fn log_grid(a: f64, b: f64, k: usize) -> Vec<f64> {
    (0..k)
        .map(|i| (a.ln() + (b.ln() - a.ln()) * i as f64 / (k - 1) as f64).exp())
        .collect()
}

fn instances() -> Vec<CouplingGraph> {
    instance_set(SEED, 20)
}

fn timed<R>(f: impl FnOnce() -> R) -> (R, f64) {
    let start = Instant::now();
    let r = f();
    (r, start.elapsed().as_secs_f64())
}

fn g5_invariant() -> Line {
    let x = 2f64.powf(-0.25).asin();
    let (res, secs) = timed(|| {
        let beta = critical_beta();
        let worst = g5_t_grid()
            .iter()
            .map(|&t| {
                let p = G5Params { beta, t };
                g5_partition(p, x).abs() / g5_scale(p)
            })
            .fold(0.0, f64::max);
        (worst, g5_constant_tag(beta))
    });
    let (worst, tag) = res;
    let mut details = vec![format!("max |Z(x*)|/scale over 50 t in [0,10] = {worst:.3e} (tol 1e-10)")];
    let tag_ok = match &tag {
        Ok(d) => {
            details.push(format!("traced zero tagged constant, drift {d:.3e} (tol 1e-9)"));
            *d <= 1e-9
        }
        Err(e) => {
            details.push(format!("traced zero: {e}"));
            false
        }
    };
    details.push(format!("x* = {x:.9}, library constant {:.9}", g5_invariant_zero()));
    details.push(format!("runtime {secs:.3} s (limit 1 s)"));
    Line {
        id: 1,
        title: "G5 invariant zero",
        pass: worst <= 1e-10 && tag_ok && secs < 1.0,
        details,
    }
}

fn cw_limits() -> Line {
    let (res, secs) = timed(|| {
        let mut worst: f64 = 0.0;
        let mut fixed_ok = true;
        let mut errors = Vec::new();
        for n in 2..=12usize {
            match solve_zeros(&WeightSource::CurieWeiss { n, t: 20.0 }, SolveOptions::default()) {
                Ok(z) => {
                    for k in 1..=n / 2 {
                        let limit = (2 * k - 1) as f64 * PI / (2 * n) as f64;
                        worst = worst.max((z.x[k - 1] - limit).abs());
                    }
                    if n % 2 == 1 {
                        fixed_ok &= z.x.len() == n / 2 + 1 && z.x[n / 2] == FRAC_PI_2;
                    }
                }
                Err(e) => errors.push(format!("n={n}: {e}")),
            }
        }
        (worst, fixed_ok, errors)
    });
    let (worst, fixed_ok, errors) = res;
    let mut details = vec![
        format!("max |x_k(20) - (2k-1)pi/(2n)| over n=2..12 = {worst:.3e} (tol 1e-6)"),
        format!("odd n carry the exact pi/2 zero: {fixed_ok}"),
    ];
    details.extend(errors.iter().cloned());
    details.push(format!("runtime {secs:.3} s (limit 5 s)"));
    Line {
        id: 2,
        title: "Curie-Weiss limits",
        pass: worst <= 1e-6 && fixed_ok && errors.is_empty() && secs < 5.0,
        details,
    }
}

fn cw_monotone() -> Line {
    let grid = log_grid(1e-3, 20.0, 100);
    let (res, secs) = timed(|| (2..=10usize).map(|n| cw_monotonicity(n, &grid)).collect::<Vec<_>>());
    let mut strict = true;
    let mut min_step = f64::INFINITY;
    let mut min_rel = f64::INFINITY;
    let mut errors = Vec::new();
    for r in &res {
        match r {
            Ok(m) => {
                strict &= m.strictly_decreasing;
                min_step = min_step.min(m.min_step);
                min_rel = min_rel.min(m.min_relative_step);
            }
            Err(e) => {
                strict = false;
                errors.push(format!("error: {e}"));
            }
        }
    }
    let mut details = vec![
        format!("strictly decreasing for n=2..10 (octuple precision): {strict}"),
        format!("smallest absolute step {min_step:.3e} (required > 1e-10)"),
        format!("smallest step relative to distance from the limit {min_rel:.3e}"),
    ];
    if min_step <= 1e-10 {
        details.push(
            "the distance to the limit decays like exp(-4(n-1)t), so steps near t=20 are far below 1e-10 for every n".into(),
        );
    }
    details.extend(errors);
    details.push(format!("runtime {secs:.3} s (limit 10 s)"));
    Line {
        id: 3,
        title: "Curie-Weiss strict monotone decrease",
        pass: strict && min_step > 1e-10 && secs < 10.0,
        details,
    }
}

fn closed_forms() -> Line {
    let grid = log_grid(1e-3, 20.0, 200);
    let mut worst = [0.0f64; 2];
    let mut errors = Vec::new();
    for &t in &grid {
        let two = 0.5 * (-(-4.0 * t).exp()).acos();
        let three = ((3.0 * -(-8.0 * t).exp_m1()).sqrt() / 2.0).acos();
        for (i, (n, want)) in [(2usize, two), (3usize, three)].into_iter().enumerate() {
            match solve_zeros(&WeightSource::CurieWeiss { n, t }, SolveOptions::default()) {
                Ok(z) => worst[i] = worst[i].max((z.x[0] - want).abs()),
                Err(e) => errors.push(format!("n={n} t={t}: {e}")),
            }
        }
    }
    let mut details = vec![
        format!("n=2 vs 1/2 arccos(-exp(-4t)): max error {:.3e} (tol 1e-10)", worst[0]),
        format!("n=3 vs arccos(sqrt(3(1-exp(-8t)))/2): max error {:.3e} (tol 1e-10)", worst[1]),
    ];
    details.extend(errors.iter().cloned());
    Line {
        id: 4,
        title: "Closed-form oracles",
        pass: worst[0] <= 1e-10 && worst[1] <= 1e-10 && errors.is_empty(),
        details,
    }
}

fn two_path() -> Line {
    let (res, secs) = timed(|| {
        instances()
            .iter()
            .map(|g| trace_single_edge(g, &checkpoints(), &TraceOptions::default()).map(|r| r.max_deviation()))
            .collect::<Vec<_>>()
    });
    let mut worst: f64 = 0.0;
    let mut errors = Vec::new();
    for (i, r) in res.iter().enumerate() {
        match r {
            Ok(d) if d.is_nan() => errors.push(format!("instance {i}: ODE path missing")),
            Ok(d) => worst = worst.max(*d),
            Err(e) => errors.push(format!("instance {i}: {e}")),
        }
    }
    let mut details = vec![format!(
        "20 instances, 10 checkpoints in [0.05, 5]: max |ode - direct| = {worst:.3e} (tol 1e-7)"
    )];
    let ok = errors.is_empty();
    details.extend(errors);
    details.push(format!("runtime {secs:.3} s (limit 60 s)"));
    Line {
        id: 5,
        title: "Two-path trajectory agreement",
        pass: ok && worst <= 1e-7 && secs < 60.0,
        details,
    }
}

fn identity_suites() -> Line {
    let mut worst64 = [0.0f64; 3];
    let mut worst256 = [0.0f64; 3];
    let mut errors = Vec::new();
    for (i, g) in instances().iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ (i as u64 + 1));
        let samples = complex_samples(&mut rng, 6);
        for &t in &[0.05, 0.7, 5.0] {
            match (
                factorization_max::<f64>(g, t, &samples, DEFAULT_TOL),
                factorization_max::<f256>(g, t, &samples, DEFAULT_TOL),
            ) {
                (Ok(a), Ok(b)) => {
                    worst64[0] = worst64[0].max(a);
                    worst256[0] = worst256[0].max(b);
                }
                (a, b) => errors.push(format!("factorization instance {i}: {:?} {:?}", a.err(), b.err())),
            }
        }
        let seed = SEED.wrapping_add(1000 + i as u64);
        match (
            tshift_max::<f64>(g, &mut ChaCha8Rng::seed_from_u64(seed), 3),
            tshift_max::<f256>(g, &mut ChaCha8Rng::seed_from_u64(seed), 3),
        ) {
            (Ok(a), Ok(b)) => {
                worst64[1] = worst64[1].max(a);
                worst256[1] = worst256[1].max(b);
            }
            (a, b) => errors.push(format!("t-shift instance {i}: {:?} {:?}", a.err(), b.err())),
        }
        match (ydifft_max::<f64>(g, DEFAULT_TOL), ydifft_max::<f256>(g, DEFAULT_TOL)) {
            (Ok(a), Ok(b)) => {
                worst64[2] = worst64[2].max(a);
                worst256[2] = worst256[2].max(b);
            }
            (a, b) => errors.push(format!("K(t,s) instance {i}: {:?} {:?}", a.err(), b.err())),
        }
    }
    let names = ["factorization", "t-shift", "K(t,s) relation"];
    let tols = [1e-9, 1e-10, 1e-8];
    let mut pass = errors.is_empty();
    let mut details = Vec::new();
    for j in 0..3 {
        let improved = worst256[j] <= 1e-6 * worst64[j];
        pass &= worst64[j] <= tols[j] && improved;
        details.push(format!(
            "{}: binary64 {:.3e} (tol {:.0e}), 256-bit {:.3e}, improvement {:.1} orders (required 6)",
            names[j],
            worst64[j],
            tols[j],
            worst256[j],
            (worst64[j] / worst256[j]).log10()
        ));
    }
    details.extend(errors);
    Line {
        id: 6,
        title: "Identity suites",
        pass,
        details,
    }
}

fn structure() -> (Line, Line) {
    let mut tags = true;
    let mut containment = true;
    let mut disjoint = true;
    let mut hyp_count = 0;
    let mut min_gap = f64::INFINITY;
    let mut circle: f64 = 0.0;
    let mut errors = Vec::new();
    for (i, g) in instances().iter().enumerate() {
        match structure_checks(g, &checkpoints(), DEFAULT_TOL) {
            Ok(o) => {
                tags &= o.tags_ok;
                containment &= o.containment;
                if let Some(d) = o.disjoint {
                    hyp_count += 1;
                    disjoint &= d;
                }
                min_gap = min_gap.min(o.min_interlacing_gap);
                circle = circle.max(o.max_circle_deviation);
            }
            Err(e) => errors.push(format!("instance {i}: {e}")),
        }
    }
    let mut d7 = vec![
        format!("exactly one tag per zero: {tags}"),
        format!("containment at every sample: {containment}"),
        format!("disjoint on the {hyp_count} instances with the hypothesis met: {disjoint}"),
        format!("smallest interlacing gap {min_gap:.3e} (required > 0)"),
    ];
    d7.extend(errors.iter().cloned());
    let seven = Line {
        id: 7,
        title: "Classification structure",
        pass: errors.is_empty() && tags && containment && disjoint && min_gap > 0.0,
        details: d7,
    };
    let mut d9 = vec![format!("max ||z| - 1| over fugacity roots = {circle:.3e} (tol 1e-10)")];
    d9.extend(errors);
    let nine = Line {
        id: 9,
        title: "Circle theorem",
        pass: d9.len() == 1 && circle <= 1e-10,
        details: d9,
    };
    (seven, nine)
}

fn cooperativity() -> Line {
    let s = cooperativity_sample(SEED, 1000, 12);
    Line {
        id: 8,
        title: "Cooperativity",
        pass: s.min_offdiagonal >= 0.0 && s.max_fd_error <= 1e-6,
        details: vec![
            format!("{} random states, n <= 12", s.states),
            format!("smallest off-diagonal entry {:.3e} (required >= 0)", s.min_offdiagonal),
            format!("max relative finite-difference mismatch {:.3e} (tol 1e-6)", s.max_fd_error),
        ],
    }
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let (seven, nine) = structure();
    let lines = [
        g5_invariant(),
        cw_limits(),
        cw_monotone(),
        closed_forms(),
        two_path(),
        identity_suites(),
        seven,
        cooperativity(),
        nine,
    ];
    println!("acceptance criteria");
    for l in &lines {
        println!("{} criterion {}: {}", if l.pass { "PASS" } else { "FAIL" }, l.id, l.title);
        for d in &l.details {
            println!("    {d}");
        }
    }
    let passed = lines.iter().filter(|l| l.pass).count();
    println!("{passed}/{} criteria passed", lines.len());
}
