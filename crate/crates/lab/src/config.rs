//! JSON experiment configs, command-line overrides and the config hash.

use std::fmt;
use std::hash::Hasher;
use std::path::{Path, PathBuf};

use contagion_core::graph::{chung_lu_weights, generate_chung_lu, generate_er};
use contagion_core::privacy::MechanismSpec;
use contagion_core::{CascadeParams, Graph, SeedPolicy};
use fnv::FnvHasher;
use serde::{Deserialize, Deserializer, Serialize};

use crate::edge_list::{load_edge_list, LoadedGraph};
use crate::LabError;

pub const DEFAULT_Q: f64 = 0.3;
pub const DEFAULT_THRESHOLDS: [f64; 5] = [0.99, 0.95, 0.90, 0.75, 0.50];

/// A float that may be written as a JSON number or a decimal string.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Decimal(pub f64);

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Decimal(v)),
            Raw::Text(s) => s
                .trim()
                .parse()
                .map(Decimal)
                .map_err(|_| serde::de::Error::custom(format!("`{s}` is not a number"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSource {
    /// `G(n, p)`; give either `p` or `mean_degree` (then `p = mean_degree / n`).
    ErdosRenyi {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p: Option<Decimal>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mean_degree: Option<Decimal>,
        #[serde(default)]
        seed: u64,
    },
    ChungLu {
        n: usize,
        d: Decimal,
        b: Decimal,
        #[serde(default)]
        seed: u64,
    },
    /// Path relative to the config file.
    EdgeList {
        path: PathBuf,
    },
    Edges {
        n: usize,
        edges: Vec<(usize, usize)>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QGrid {
    Values(Vec<Decimal>),
    Range {
        start: Decimal,
        stop: Decimal,
        count: usize,
    },
}

impl QGrid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            QGrid::Values(v) => v.iter().map(|d| d.0).collect(),
            QGrid::Range { start, stop, count } => linspace(start.0, stop.0, *count),
        }
    }
}

fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scale {
    Value(Decimal),
    /// `"sqrt_n"` or `"n"`, resolved against the graph size.
    Named(NamedScale),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedScale {
    SqrtN,
    N,
}

impl Scale {
    fn resolve(self, n: usize) -> f64 {
        match self {
            Scale::Value(d) => d.0,
            Scale::Named(NamedScale::SqrtN) => (n as f64).sqrt(),
            Scale::Named(NamedScale::N) => n as f64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MechanismConfig {
    Laplace {
        scale: Scale,
        #[serde(default)]
        clamp: bool,
    },
    RandomizedResponse {
        flip_prob: Decimal,
    },
}

impl Default for MechanismConfig {
    fn default() -> Self {
        MechanismConfig::Laplace {
            scale: Scale::Named(NamedScale::SqrtN),
            clamp: false,
        }
    }
}

impl MechanismConfig {
    pub fn resolve(&self, n: usize) -> MechanismSpec {
        match *self {
            MechanismConfig::Laplace { scale, clamp } => MechanismSpec::Laplace {
                scale: scale.resolve(n),
                clamp,
            },
            MechanismConfig::RandomizedResponse { flip_prob } => {
                MechanismSpec::RandomizedResponse { flip_prob: flip_prob.0 }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedPolicyConfig {
    #[default]
    Uniform,
    DegreeWeighted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub graph: GraphSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Decimal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_grid: Option<QGrid>,
    /// Seeds per cascade, `s`.
    #[serde(default = "one")]
    pub seed_count: usize,
    #[serde(default)]
    pub seed_policy: SeedPolicyConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    /// Master seed for all trial randomness.
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mechanism: Option<MechanismConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Vec<Decimal>>,
    /// Membership floors for the attack; defaults to the thresholds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floors: Option<Vec<Decimal>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Decimal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protected: Option<Vec<usize>>,
    /// Output directory; not part of the hash.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

fn one() -> usize {
    1
}

/// A `--q` value: one rate, a comma list, or `start:stop:count`.
#[derive(Clone, Debug, PartialEq)]
pub enum QOverride {
    Single(f64),
    Grid(QGrid),
}

impl std::str::FromStr for QOverride {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number"));
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [start, stop, count] => Ok(QOverride::Grid(QGrid::Range {
                start: Decimal(num(start)?),
                stop: Decimal(num(stop)?),
                count: count.trim().parse().map_err(|_| format!("`{count}` is not a count"))?,
            })),
            [single] if !single.contains(',') => Ok(QOverride::Single(num(single)?)),
            [list] => Ok(QOverride::Grid(QGrid::Values(
                list.split(',').map(|t| num(t).map(Decimal)).collect::<Result<_, _>>()?,
            ))),
            _ => Err(format!("`{s}` is neither a rate, a list nor start:stop:count")),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub trials: Option<u64>,
    pub q: Option<QOverride>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, LabError> {
        serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))
    }

    /// Reads a config and makes an edge-list path absolute against the config's directory.
    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|source| LabError::Read {
            path: path.to_owned(),
            source,
        })?;
        let mut cfg = Self::from_json(&text)?;
        if let GraphSource::EdgeList { path: edges } = &mut cfg.graph {
            if edges.is_relative() {
                if let Some(dir) = path.parent() {
                    *edges = dir.join(&*edges);
                }
            }
        }
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(out) = &o.out {
            self.out = Some(out.clone());
        }
        if let Some(t) = o.trials {
            self.trials = Some(t);
        }
        match &o.q {
            Some(QOverride::Single(q)) => {
                self.q = Some(Decimal(*q));
                self.q_grid = Some(QGrid::Values(vec![Decimal(*q)]));
            }
            Some(QOverride::Grid(grid)) => self.q_grid = Some(grid.clone()),
            None => {}
        }
    }

    /// Checks the ranges that do not depend on the graph.
    pub fn validate(&self) -> Result<(), LabError> {
        let bad = |m: String| Err(LabError::Config(m));
        if self.trials == Some(0) {
            return bad("trials must be at least 1".into());
        }
        for (name, list) in [("thresholds", &self.thresholds), ("floors", &self.floors)] {
            if let Some(list) = list {
                if list.iter().any(|t| !(0.0..=1.0).contains(&t.0)) {
                    return bad(format!("{name} must lie in [0, 1]"));
                }
                if list.windows(2).any(|w| w[0].0 < w[1].0) {
                    return bad(format!("{name} must be sorted in descending order"));
                }
            }
        }
        if let Some(QGrid::Range { count: 0, .. }) = self.q_grid {
            return bad("q grid needs at least one point".into());
        }
        if let Some(eps) = self.epsilon {
            if !(eps.0 > 0.0 && eps.0.is_finite()) {
                return bad("epsilon must be positive".into());
            }
        }
        Ok(())
    }

    /// Canonical JSON of everything that affects results: keys sorted, no
    /// whitespace, output directory left out.
    pub fn canonical_text(&self) -> String {
        let mut hashed = self.clone();
        hashed.out = None;
        if let Some(grid) = &hashed.q_grid {
            hashed.q_grid = Some(QGrid::Values(grid.values().into_iter().map(Decimal).collect()));
        }
        let value = serde_json::to_value(&hashed).expect("config serializes");
        serde_json::to_string(&value).expect("value serializes")
    }

    pub fn hash(&self) -> ConfigHash {
        let mut h = FnvHasher::default();
        h.write(self.canonical_text().as_bytes());
        ConfigHash(h.finish())
    }

    pub fn q(&self) -> f64 {
        self.q.map_or(DEFAULT_Q, |d| d.0)
    }

    pub fn q_grid(&self) -> Vec<f64> {
        self.q_grid
            .as_ref()
            .map_or_else(|| linspace(0.05, 0.9, 20), QGrid::values)
    }

    pub fn trials_or(&self, default: u64) -> u64 {
        self.trials.unwrap_or(default)
    }

    pub fn thresholds(&self) -> Vec<f64> {
        self.thresholds
            .as_ref()
            .map_or_else(|| DEFAULT_THRESHOLDS.to_vec(), |t| t.iter().map(|d| d.0).collect())
    }

    pub fn floors(&self) -> Vec<f64> {
        self.floors
            .as_ref()
            .map_or_else(|| self.thresholds(), |t| t.iter().map(|d| d.0).collect())
    }

    pub fn cascade(&self) -> CascadeParams {
        let policy = match self.seed_policy {
            SeedPolicyConfig::Uniform => SeedPolicy::Uniform,
            SeedPolicyConfig::DegreeWeighted => SeedPolicy::DegreeWeighted,
        };
        CascadeParams::new(self.q(), self.seed_count).with_policy(policy)
    }

    pub fn network_label(&self) -> String {
        if let Some(name) = &self.name {
            return name.clone();
        }
        match &self.graph {
            GraphSource::ErdosRenyi { n, p: Some(p), .. } => format!("ER({n},p={})", p.0),
            GraphSource::ErdosRenyi { n, mean_degree, .. } => format!("ER({n},{})", mean_degree.map_or(0.0, |d| d.0)),
            GraphSource::ChungLu { n, d, b, .. } => format!("CL({n},{},{})", d.0, b.0),
            GraphSource::EdgeList { path } => path
                .file_stem()
                .map_or_else(|| "edge-list".into(), |s| s.to_string_lossy().into_owned()),
            GraphSource::Edges { n, .. } => format!("inline({n})"),
        }
    }
}

impl GraphSource {
    pub fn build(&self) -> Result<LoadedGraph, LabError> {
        let plain = |graph: Graph| LoadedGraph {
            labels: (0..graph.node_count()).map(|v| v.to_string()).collect(),
            graph,
            cleanup: Default::default(),
        };
        match self {
            GraphSource::ErdosRenyi {
                n,
                p,
                mean_degree,
                seed,
            } => {
                let p = match (p, mean_degree) {
                    (Some(p), None) => p.0,
                    (None, Some(d)) if *n > 0 => d.0 / *n as f64,
                    _ => {
                        return Err(LabError::Config(
                            "erdos_renyi needs exactly one of `p` and `mean_degree`".into(),
                        ))
                    }
                };
                Ok(plain(generate_er(*n, p, *seed)?))
            }
            GraphSource::ChungLu { n, d, b, seed } => {
                Ok(plain(generate_chung_lu(&chung_lu_weights(*n, d.0, b.0)?, *seed)))
            }
            GraphSource::EdgeList { path } => load_edge_list(path),
            GraphSource::Edges { n, edges } => Ok(plain(Graph::from_edges(*n, edges.iter().copied())?)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ConfigHash(pub u64);

impl fmt::Display for ConfigHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{"graph": {"kind": "erdos_renyi", "n": 100, "mean_degree": 5, "seed": 3}, "seed": 9}"#;

    #[test]
    fn defaults() {
        let cfg = ExperimentConfig::from_json(BASE).unwrap();
        assert_eq!(cfg.q(), 0.3);
        assert_eq!(cfg.seed_count, 1);
        assert_eq!(cfg.thresholds(), DEFAULT_THRESHOLDS);
        let grid = cfg.q_grid();
        assert_eq!(grid.len(), 20);
        assert!((grid[0] - 0.05).abs() < 1e-12 && (grid[19] - 0.9).abs() < 1e-12);
        assert_eq!(cfg.graph.build().unwrap().graph.node_count(), 100);
    }

    #[test]
    fn decimal_strings_and_unknown_fields() {
        let cfg =
            ExperimentConfig::from_json(r#"{"graph": {"kind": "edges", "n": 2, "edges": [[0, 1]]}, "q": "0.25"}"#)
                .unwrap();
        assert_eq!(cfg.q(), 0.25);
        assert!(ExperimentConfig::from_json(r#"{"graph": {"kind": "edges", "n": 2, "edges": []}, "qq": 1}"#).is_err());
        assert!(
            ExperimentConfig::from_json(r#"{"graph": {"kind": "edges", "n": 2, "edges": []}, "q": "abc"}"#).is_err()
        );
    }

    #[test]
    fn q_override_forms() {
        assert_eq!("0.5".parse::<QOverride>().unwrap(), QOverride::Single(0.5));
        let QOverride::Grid(g) = "0.1,0.2".parse().unwrap() else {
            panic!()
        };
        assert_eq!(g.values(), [0.1, 0.2]);
        let QOverride::Grid(g) = "0:1:5".parse().unwrap() else {
            panic!()
        };
        assert_eq!(g.values(), [0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!("x".parse::<QOverride>().is_err());
    }

    #[test]
    fn hash_ignores_output_dir_and_key_order() {
        let a = ExperimentConfig::from_json(BASE).unwrap();
        let reordered =
            r#"{"seed": 9, "graph": {"seed": 3, "mean_degree": 5, "n": 100, "kind": "erdos_renyi"}, "out": "x"}"#;
        let b = ExperimentConfig::from_json(reordered).unwrap();
        assert_eq!(a.hash(), b.hash());
        let mut c = a.clone();
        c.apply(&Overrides {
            seed: Some(10),
            ..Default::default()
        });
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().to_string().len(), 16);
    }

    #[test]
    fn validation() {
        let mut cfg = ExperimentConfig::from_json(BASE).unwrap();
        cfg.thresholds = Some(vec![Decimal(0.5), Decimal(0.9)]);
        assert!(cfg.validate().is_err());
        cfg.thresholds = Some(vec![Decimal(0.9), Decimal(0.5)]);
        assert!(cfg.validate().is_ok());
        cfg.trials = Some(0);
        assert!(cfg.validate().is_err());
    }
}
