use std::fmt;
use std::fs;

use leeyang::graph::GraphDocument;
use leeyang::scenarios::{critical_beta, Scenario};
use leeyang::{CouplingGraph, Precision};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// A failure with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl fmt::Display) -> Self {
        Self {
            code: 2,
            message: message.to_string(),
        }
    }

    pub fn numeric(message: impl fmt::Display) -> Self {
        Self {
            code: 3,
            message: message.to_string(),
        }
    }
}

pub fn parse_precision(bits: u32) -> Result<Precision, Failure> {
    match bits {
        53 | 64 => Ok(Precision::Binary64),
        237 | 256 => Ok(Precision::Octuple),
        _ => Err(Failure::config(format!(
            "unsupported precision {bits} bits (use 53 or 64 for binary64, 237 or 256 for octuple)"
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl TimeGrid {
    /// `START:STOP:POINTS:SPACING` with `0 < START < STOP` and `POINTS ≥ 2`.
    pub fn parse(spec: &str) -> Result<Self, Failure> {
        let bad = |why: &str| Failure::config(format!("invalid --t-grid {spec:?}: {why}"));
        let parts: Vec<&str> = spec.split(':').collect();
        let [a, b, k, s] = parts.as_slice() else {
            return Err(bad("expected START:STOP:POINTS:SPACING"));
        };
        let start: f64 = a.trim().parse().map_err(|_| bad("START is not a number"))?;
        let stop: f64 = b.trim().parse().map_err(|_| bad("STOP is not a number"))?;
        let points: usize = k.trim().parse().map_err(|_| bad("POINTS is not an integer"))?;
        let spacing = match s.trim() {
            "linear" | "lin" => Spacing::Linear,
            "log" => Spacing::Log,
            _ => return Err(bad("SPACING must be linear or log")),
        };
        if !(start > 0.0 && start.is_finite()) {
            return Err(bad("START must be positive"));
        }
        if !(stop > start && stop.is_finite()) {
            return Err(bad("STOP must exceed START"));
        }
        if points < 2 {
            return Err(bad("POINTS must be at least 2"));
        }
        Ok(Self {
            start,
            stop,
            points,
            spacing,
        })
    }

    pub fn times(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        let mut t: Vec<f64> = (0..self.points)
            .map(|i| {
                let f = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.start + (self.stop - self.start) * f,
                    Spacing::Log => (self.start.ln() + (self.stop.ln() - self.start.ln()) * f).exp(),
                }
            })
            .collect();
        t[0] = self.start;
        t[self.points - 1] = self.stop;
        t
    }
}

/// Where the coupling graph comes from.
#[derive(Debug, Clone)]
pub enum Source {
    Graph { graph: CouplingGraph, label: String },
    CurieWeiss { n: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourceDescriptor {
    pub kind: &'static str,
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphDocument>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

impl Source {
    /// `--graph` accepts a file path or an inline JSON document.
    pub fn resolve(graph: Option<&str>, scenario: Option<&str>, beta: Option<f64>, n: usize) -> Result<Self, Failure> {
        match (graph, scenario) {
            (Some(_), Some(_)) => Err(Failure::config("--graph and --scenario are mutually exclusive")),
            (None, None) => Err(Failure::config("one of --graph or --scenario is required")),
            (Some(g), None) => {
                let (text, label) = if g.trim_start().starts_with('{') {
                    (g.to_string(), "inline".to_string())
                } else {
                    let text = fs::read_to_string(g).map_err(|e| Failure::config(format!("cannot read {g}: {e}")))?;
                    (text, g.to_string())
                };
                let graph = CouplingGraph::from_json_str(&text).map_err(|e| Failure::config(format!("{label}: {e}")))?;
                Ok(Source::Graph { graph, label })
            }
            (None, Some(name)) => {
                let s = Scenario::parse(name, beta.unwrap_or_else(critical_beta), n).map_err(Failure::config)?;
                match s.graph().map_err(Failure::config)? {
                    Some(graph) => Ok(Source::Graph {
                        graph,
                        label: name.to_string(),
                    }),
                    None => match s {
                        Scenario::CurieWeiss { n } => Ok(Source::CurieWeiss { n }),
                        _ => unreachable!("only Curie-Weiss lacks a graph form"),
                    },
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Source::Graph { graph, .. } => graph.n(),
            Source::CurieWeiss { n } => *n,
        }
    }

    pub fn descriptor(&self) -> SourceDescriptor {
        match self {
            Source::Graph { graph, label } => SourceDescriptor {
                kind: "graph",
                label: label.clone(),
                graph: Some(graph.to_document()),
                n: None,
            },
            Source::CurieWeiss { n } => SourceDescriptor {
                kind: "curie-weiss",
                label: format!("cw:{n}"),
                graph: None,
                n: Some(*n),
            },
        }
    }
}

/// Hex SHA-256 of the canonical JSON form of a resolved configuration.
pub fn config_hash<C: Serialize>(config: &C) -> String {
    let text = serde_json::to_string(config).expect("configuration serializes");
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
