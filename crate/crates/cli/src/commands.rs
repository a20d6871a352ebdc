use std::fs;
use std::path::Path;

use leeyang::dynamics::{trace_curie_weiss, trace_single_edge, DynamicsError, TraceOptions, TraceResult};
use leeyang::partition::{curie_weiss_weights, edge_correlation, magnetization_weights, PartitionError, WeightsDocument};
use leeyang::trigpoly::{solve_zeros, ExtractError, SolveOptions, WeightSource, ZeroSetDocument};
use leeyang::verify::{
    classify_trajectories, disjointness_check, run_suite, ClassificationReport, DisjointnessResult, SuiteConfig, SuiteName,
    VerifyReport, DEFAULT_CONSTANT_EPS,
};
use leeyang::graph::{is_connected, positive_subgraph};
use leeyang::{Precision, VERSION};
use serde::Serialize;

use crate::config::{config_hash, Failure, Source, SourceDescriptor, TimeGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Rendered outputs of one command.
pub struct Outcome {
    /// `(file name, contents)` in write order.
    pub files: Vec<(String, String)>,
    /// Exit code when everything was computed.
    pub code: u8,
    pub diagnostics: Vec<String>,
}

impl Outcome {
    pub fn pick(&self, format: Format) -> &str {
        let ext = match format {
            Format::Csv => ".csv",
            Format::Json => ".json",
        };
        self.files
            .iter()
            .find(|(name, _)| name.ends_with(ext))
            .or_else(|| self.files.first())
            .map(|(_, body)| body.as_str())
            .unwrap_or("")
    }

    pub fn write_to(&self, dir: &Path) -> Result<(), Failure> {
        fs::create_dir_all(dir).map_err(|e| Failure::config(format!("cannot create {}: {e}", dir.display())))?;
        for (name, body) in &self.files {
            let p = dir.join(name);
            fs::write(&p, body).map_err(|e| Failure::config(format!("cannot write {}: {e}", p.display())))?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct Envelope<'a, C: Serialize, B: Serialize> {
    version: &'static str,
    config_hash: &'a str,
    config: &'a C,
    #[serde(flatten)]
    body: B,
}

fn json<C: Serialize, B: Serialize>(hash: &str, config: &C, body: B) -> String {
    let env = Envelope {
        version: VERSION,
        config_hash: hash,
        config,
        body,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("output serializes");
    s.push('\n');
    s
}

fn csv_preamble(hash: &str) -> String {
    format!("# leeyang {VERSION} config sha256:{hash}\n")
}

fn partition_failure(e: &PartitionError) -> Failure {
    match e {
        PartitionError::TooManySpins { .. } | PartitionError::Graph(_) => Failure::config(e),
        _ => Failure::numeric(e),
    }
}

fn extract_failure(e: ExtractError) -> Failure {
    match &e {
        ExtractError::Partition(p) => partition_failure(p),
        _ => Failure::numeric(e),
    }
}

fn dynamics_failure(e: DynamicsError) -> Failure {
    match e {
        DynamicsError::NonPositiveTime { .. } | DynamicsError::InvalidGrid | DynamicsError::InvalidKInterval { .. } => {
            Failure::config(e)
        }
        DynamicsError::Extract(x) => extract_failure(x),
        DynamicsError::Partition(p) => partition_failure(&p),
        _ => Failure::numeric(e),
    }
}

#[derive(Serialize)]
pub struct ZerosConfig {
    command: &'static str,
    source: SourceDescriptor,
    t: f64,
    precision_bits: u32,
    tol: f64,
}

#[derive(Serialize)]
struct ZerosBody {
    zeros: ZeroSetDocument,
}

pub fn zeros(source: &Source, t: f64, precision: Precision, tol: f64) -> Result<Outcome, Failure> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Failure::config(format!("--t must be a finite non-negative number, got {t}")));
    }
    if !(tol > 0.0) {
        return Err(Failure::config("--tol must be positive"));
    }
    let config = ZerosConfig {
        command: "zeros",
        source: source.descriptor(),
        t,
        precision_bits: precision.bits(),
        tol,
    };
    let hash = config_hash(&config);
    let src = match source {
        Source::Graph { graph, .. } => WeightSource::Graph { graph, t },
        Source::CurieWeiss { n } => WeightSource::CurieWeiss { n: *n, t },
    };
    let zs = solve_zeros(&src, SolveOptions { tol, precision }).map_err(extract_failure)?;
    let csv = csv_preamble(&hash) + &zs.to_csv();
    let doc = json(&hash, &config, ZerosBody { zeros: zs.to_document() });
    Ok(Outcome {
        files: vec![("zeros.csv".into(), csv), ("zeros.json".into(), doc)],
        code: 0,
        diagnostics: Vec::new(),
    })
}

#[derive(Serialize)]
pub struct TraceConfig {
    command: &'static str,
    source: SourceDescriptor,
    t_grid: TimeGrid,
    precision_bits: u32,
    tol: f64,
    rtol: f64,
    atol: f64,
    collision_factor: f64,
}

#[derive(Serialize)]
struct TraceBody {
    n: usize,
    t0: f64,
    precision: Precision,
    ode_precision: Precision,
    accepted_steps: usize,
    max_two_path_deviation: f64,
    ode_failure: Option<String>,
    hypothesis_met: bool,
    initial: ZeroSetDocument,
    classification: Option<ClassificationReport>,
    classification_error: Option<String>,
    disjointness: Option<DisjointnessResult>,
}

pub fn trace(source: &Source, grid: &TimeGrid, precision: Precision, tol: f64) -> Result<Outcome, Failure> {
    let opts = TraceOptions {
        tol,
        precision,
        ..Default::default()
    };
    let config = TraceConfig {
        command: "trace",
        source: source.descriptor(),
        t_grid: grid.clone(),
        precision_bits: precision.bits(),
        tol,
        rtol: opts.integrate.rtol,
        atol: opts.integrate.atol,
        collision_factor: opts.integrate.collision_factor,
    };
    let hash = config_hash(&config);
    let times = grid.times();
    let (r, hypothesis_met): (TraceResult, bool) = match source {
        Source::Graph { graph, .. } => {
            graph
                .require_varying_edge()
                .map_err(|e| Failure::config(format!("trace needs a varying edge: {e}")))?;
            (trace_single_edge(graph, &times, &opts).map_err(dynamics_failure)?, graph.hypothesis_met())
        }
        Source::CurieWeiss { n } => (trace_curie_weiss(*n, &times, &opts).map_err(dynamics_failure)?, true),
    };
    let mut diagnostics = Vec::new();
    if let Some(e) = &r.ode_failure {
        diagnostics.push(format!("warning: ODE path abandoned: {e}"));
    }
    if !hypothesis_met {
        diagnostics.push("warning: positive-coupling subgraph is disconnected; monotonicity is not guaranteed".into());
    }
    let (classification, classification_error, disjointness) =
        match classify_trajectories(&r.direct, &r.initial, hypothesis_met, DEFAULT_CONSTANT_EPS) {
            Ok(rep) => {
                let d = disjointness_check(&rep, &r.direct, &r.initial);
                (Some(rep), None, Some(d))
            }
            Err(e) => {
                diagnostics.push(format!("classification failed: {e}"));
                (None, Some(e.to_string()), None)
            }
        };
    let mut code = 0;
    if classification.is_none() || (hypothesis_met && disjointness.as_ref().is_some_and(|d| !d.disjoint)) {
        code = 1;
    }
    let mut csv = csv_preamble(&hash);
    csv.push_str("t,k,x_k,source\n");
    r.ode.write_csv_rows(&mut csv);
    r.direct.write_csv_rows(&mut csv);
    let body = TraceBody {
        n: source.n(),
        t0: times[0],
        precision,
        ode_precision: r.ode_precision,
        accepted_steps: r.accepted_steps,
        max_two_path_deviation: r.max_deviation(),
        ode_failure: r.ode_failure.as_ref().map(|e| e.to_string()),
        hypothesis_met,
        initial: r.initial.to_document(),
        classification,
        classification_error,
        disjointness,
    };
    let doc = json(&hash, &config, body);
    Ok(Outcome {
        files: vec![("trace.csv".into(), csv), ("trace.json".into(), doc)],
        code,
        diagnostics,
    })
}

#[derive(Serialize)]
pub struct VerifyConfig {
    command: &'static str,
    suite: SuiteName,
    seed: u64,
    n_max: usize,
    precision_bits: u32,
    tol: f64,
    instances: usize,
}

#[derive(Serialize)]
struct VerifyBody<'a> {
    report: &'a VerifyReport,
}

pub fn verify(suite: SuiteName, seed: u64, n_max: usize, precision: Precision, tol: f64) -> Result<Outcome, Failure> {
    if n_max < 2 {
        return Err(Failure::config("--n-max must be at least 2"));
    }
    if n_max > leeyang::partition::DEFAULT_ENUMERATION_CAP {
        return Err(Failure::config(format!(
            "--n-max {n_max} exceeds the enumeration cap of {}",
            leeyang::partition::DEFAULT_ENUMERATION_CAP
        )));
    }
    let cfg = SuiteConfig {
        seed,
        n_max,
        precision,
        tol,
        ..Default::default()
    };
    let config = VerifyConfig {
        command: "verify",
        suite,
        seed,
        n_max,
        precision_bits: precision.bits(),
        tol,
        instances: cfg.instances,
    };
    let hash = config_hash(&config);
    let report = run_suite(suite, &cfg);
    let diagnostics: Vec<String> = report.failing_checks().into_iter().map(|c| format!("failed: {c}")).collect();
    let doc = json(&hash, &config, VerifyBody { report: &report });
    Ok(Outcome {
        files: vec![("verify.json".into(), doc)],
        code: if report.pass { 0 } else { 1 },
        diagnostics,
    })
}

#[derive(Serialize)]
pub struct ReportConfig {
    command: &'static str,
    source: SourceDescriptor,
    t: f64,
}

#[derive(Serialize)]
struct ReportBody {
    n: usize,
    hypothesis_met: bool,
    positive_subgraph_connected: bool,
    weights: WeightsDocument,
    weights_rel_err: f64,
    varying_edge_correlation: Option<f64>,
}

pub fn report(source: &Source, t: f64) -> Result<Outcome, Failure> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Failure::config(format!("--t must be a finite non-negative number, got {t}")));
    }
    let config = ReportConfig {
        command: "report",
        source: source.descriptor(),
        t,
    };
    let hash = config_hash(&config);
    let body = match source {
        Source::Graph { graph, .. } => {
            let w = magnetization_weights::<f64>(graph, t).map_err(|e| partition_failure(&e))?;
            let corr = match graph.varying_edge() {
                Some(_) => Some(edge_correlation::<f64>(graph, t).map_err(|e| partition_failure(&e))?),
                None => None,
            };
            ReportBody {
                n: graph.n(),
                hypothesis_met: graph.hypothesis_met(),
                positive_subgraph_connected: is_connected(&positive_subgraph(graph, t)),
                weights: w.to_document(),
                weights_rel_err: w.rel_err(),
                varying_edge_correlation: corr,
            }
        }
        Source::CurieWeiss { n } => {
            let w = curie_weiss_weights::<f64>(*n, t);
            ReportBody {
                n: *n,
                hypothesis_met: true,
                positive_subgraph_connected: t > 0.0 || *n == 1,
                weights: w.to_document(),
                weights_rel_err: w.rel_err(),
                varying_edge_correlation: None,
            }
        }
    };
    let mut csv = csv_preamble(&hash);
    csv.push_str(&format!("# logscale {:e}\nM,w\n", body.weights.logscale));
    for (m, w) in &body.weights.weights {
        csv.push_str(&format!("{m},{w:e}\n"));
    }
    let doc = json(&hash, &config, body);
    Ok(Outcome {
        files: vec![("report.json".into(), doc), ("weights.csv".into(), csv)],
        code: 0,
        diagnostics: Vec::new(),
    })
}
