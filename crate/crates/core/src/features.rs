//! Per-vertex feature tables and the subgraph-pair correlation experiment.

use std::collections::HashMap;
use std::path::PathBuf;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cover::{walk_counts_from, BallMagnitudeFn};
use crate::graph::{
    erdos_renyi_with, largest_weak_component, load_digraph, seeded_stream, subsample_with, Digraph,
    Format, GraphError,
};
use crate::metric::{similarity_matrix, weighting, Side, SolveMethod};
use crate::spectral::{katz_centrality, spectral_radius, KatzDirection};
use crate::Scalar;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 samples, got {0}")]
    TooShort(usize),
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error("cannot load ambient graph {path}: {source}")]
    Source { path: PathBuf, source: GraphError },
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureConfig {
    /// Scale for the weighting and coweighting columns.
    pub weighting_t: f64,
    /// Scale for the ball log-magnitude columns.
    pub ball_t: f64,
    pub radii: Vec<usize>,
    /// Katz uses `alpha = katz_damping / max(rho, 1)`.
    pub katz_damping: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            weighting_t: 0.0,
            ball_t: 100.0,
            radii: vec![1, 2, 3],
            katz_damping: 0.9,
        }
    }
}

impl FeatureConfig {
    /// Column names in table order. `ball*` columns use the reversed digraph.
    pub fn column_names(&self) -> Vec<String> {
        let mut names: Vec<String> = ["in-degree", "out-degree", "katz-in", "katz-out"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        names.push(format!("weighting-t{}", self.weighting_t));
        names.push(format!("coweighting-t{}", self.weighting_t));
        names.extend(self.radii.iter().map(|l| format!("logmag-ball-L{l}")));
        names.extend(self.radii.iter().map(|l| format!("logmag-ball*-L{l}")));
        names
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureMeta<T> {
    pub weighting_t: T,
    pub ball_t: T,
    pub katz_alpha: Option<T>,
    pub weighting_method: SolveMethod,
    pub coweighting_method: SolveMethod,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable<T> {
    pub vertices: Vec<String>,
    pub columns: Vec<(String, Vec<T>)>,
    /// Columns that could not be computed, with the reason.
    pub absent: Vec<(String, String)>,
    pub meta: FeatureMeta<T>,
}

impl<T: Scalar> FeatureTable<T> {
    pub fn column(&self, name: &str) -> Option<&[T]> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }
}

/// Computes every column on `d`. Ball columns ignore loops.
pub fn feature_table<T: Scalar>(d: &Digraph, cfg: &FeatureConfig) -> FeatureTable<T> {
    let n = d.vertex_count();
    let names = cfg.column_names();
    let mut columns = Vec::with_capacity(names.len());
    let mut absent = Vec::new();
    let mut name = names.into_iter();
    let mut push = |vals: Result<Vec<T>, String>, columns: &mut Vec<(String, Vec<T>)>| {
        let label = name.next().expect("one name per column");
        match vals {
            Ok(v) => columns.push((label, v)),
            Err(why) => absent.push((label, why)),
        }
    };
    push(
        Ok((0..n).map(|v| T::of(d.in_degree(v) as f64)).collect()),
        &mut columns,
    );
    push(
        Ok((0..n).map(|v| T::of(d.out_degree(v) as f64)).collect()),
        &mut columns,
    );

    let alpha = spectral_radius::<T>(d).map(|rho| T::of(cfg.katz_damping) / rho.max(T::one()));
    for dir in [KatzDirection::In, KatzDirection::Out] {
        let col = match &alpha {
            Ok(a) => katz_centrality(d, *a, dir).map_err(|e| e.to_string()),
            Err(e) => Err(e.to_string()),
        };
        push(col, &mut columns);
    }

    let dist = crate::graph::shortest_path_matrix(d);
    let (w, cw) = match similarity_matrix(&dist, T::of(cfg.weighting_t)) {
        Ok(z) => (
            Ok(weighting(&z, Side::Row)),
            Ok(weighting(&z, Side::Column)),
        ),
        Err(e) => (Err(e.to_string()), Err(e.to_string())),
    };
    let method = |r: &Result<crate::metric::WeightingResult<T>, String>| {
        r.as_ref().map_or(SolveMethod::LeastSquares, |r| r.method)
    };
    let meta = FeatureMeta {
        weighting_t: T::of(cfg.weighting_t),
        ball_t: T::of(cfg.ball_t),
        katz_alpha: alpha.ok(),
        weighting_method: method(&w),
        coweighting_method: method(&cw),
    };
    push(w.map(|r| r.w), &mut columns);
    push(cw.map(|r| r.w), &mut columns);

    let loopless = d.without_loops();
    let reversed = loopless.reverse();
    for g in [&loopless, &reversed] {
        let per_vertex: Vec<Vec<T>> = (0..n)
            .into_par_iter()
            .map(|v| ball_log_magnitudes(g, v, &cfg.radii, T::of(cfg.ball_t)))
            .collect();
        for (i, _) in cfg.radii.iter().enumerate() {
            push(
                Ok(per_vertex.iter().map(|row| row[i]).collect()),
                &mut columns,
            );
        }
    }
    FeatureTable {
        vertices: d.labels().to_vec(),
        columns,
        absent,
        meta,
    }
}

fn ball_log_magnitudes<T: Scalar>(g: &Digraph, v: usize, radii: &[usize], t: T) -> Vec<T> {
    let lmax = radii.iter().copied().max().unwrap_or(0);
    let per_depth = walk_counts_from(g, v, lmax);
    radii
        .iter()
        .map(|&l| {
            let count = per_depth[..=l].iter().sum();
            BallMagnitudeFn {
                vertex_count: count,
            }
            .ln_value(t)
        })
        .collect()
}

/// Sample Pearson correlation; `None` when either sample has zero variance.
pub fn pearson<T: Scalar>(x: &[T], y: &[T]) -> Result<Option<T>, FeatureError> {
    if x.len() != y.len() {
        return Err(FeatureError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(FeatureError::TooShort(x.len()));
    }
    let n = T::of(x.len() as f64);
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy = sxy + da * db;
        sxx = sxx + da * da;
        syy = syy + db * db;
    }
    // Spread at rounding level counts as constant.
    let flat = |ss: T, v: &[T]| {
        let scale = v.iter().fold(T::zero(), |m, a| m.max(a.abs()));
        ss.sqrt() <= T::epsilon() * T::of(16.0) * n.sqrt() * scale
    };
    if flat(sxx, x) || flat(syy, y) {
        return Ok(None);
    }
    let r = sxy / (sxx.sqrt() * syy.sqrt());
    Ok(Some(r.max(-T::one()).min(T::one())))
}

pub const MIN_SHARED_VERTICES: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum TrialOutcome {
    /// Coefficients in feature order; `None` is undefined (zero variance or
    /// a column absent on one side).
    Defined {
        shared_vertices: usize,
        coefficients: Vec<Option<f64>>,
    },
    Degenerate {
        shared_vertices: usize,
    },
}

impl TrialOutcome {
    pub fn shared_vertices(&self) -> usize {
        match self {
            TrialOutcome::Defined {
                shared_vertices, ..
            }
            | TrialOutcome::Degenerate { shared_vertices } => *shared_vertices,
        }
    }
}

/// Two independent edge subsamples of `ambient` (streams 1 and 2 of `seed`),
/// reduced to their largest weak components and compared on shared labels.
pub fn trial(ambient: &Digraph, p_remove: f64, seed: u64, cfg: &FeatureConfig) -> TrialOutcome {
    let sub = |stream| {
        let g = subsample_with(ambient, p_remove, &mut seeded_stream(seed, stream));
        largest_weak_component(&g)
    };
    let (a, b) = (sub(1), sub(2));
    let b_index: HashMap<&str, usize> = b
        .labels()
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let shared: Vec<(usize, usize)> = a
        .labels()
        .iter()
        .enumerate()
        .filter_map(|(i, l)| b_index.get(l.as_str()).map(|&j| (i, j)))
        .collect();
    if shared.len() < MIN_SHARED_VERTICES {
        return TrialOutcome::Degenerate {
            shared_vertices: shared.len(),
        };
    }
    let (ta, tb) = rayon::join(
        || feature_table::<f64>(&a, cfg),
        || feature_table::<f64>(&b, cfg),
    );
    let coefficients = cfg
        .column_names()
        .iter()
        .map(|name| {
            let (ca, cb) = (ta.column(name)?, tb.column(name)?);
            let x: Vec<f64> = shared.iter().map(|&(i, _)| ca[i]).collect();
            let y: Vec<f64> = shared.iter().map(|&(_, j)| cb[j]).collect();
            pearson(&x, &y).expect("equal lengths, at least 3")
        })
        .collect();
    TrialOutcome::Defined {
        shared_vertices: shared.len(),
        coefficients,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphSource {
    /// Fixed ambient graph read from a file (format from the extension).
    File { path: PathBuf },
    /// Fresh `G(n, q)` ambient graph for every trial.
    Er { n: usize, q: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub source: GraphSource,
    pub trials: usize,
    pub p_remove: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default)]
    pub features: FeatureConfig,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), FeatureError> {
        let bad = |m: String| Err(FeatureError::Config(m));
        if !(0.0..=1.0).contains(&self.p_remove) {
            return bad(format!("p_remove = {} outside [0, 1]", self.p_remove));
        }
        if self.trials == 0 {
            return bad("trials must be positive".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be positive".into());
        }
        if let GraphSource::Er { n, q } = self.source {
            if n == 0 || !(0.0..=1.0).contains(&q) {
                return bad(format!(
                    "er source needs n > 0 and q in [0, 1], got n = {n}, q = {q}"
                ));
            }
        }
        let f = &self.features;
        if !(f.weighting_t >= 0.0)
            || !(f.ball_t >= 0.0)
            || !(f.katz_damping > 0.0 && f.katz_damping < 1.0)
        {
            return bad("feature scales must be nonnegative and katz_damping in (0, 1)".into());
        }
        Ok(())
    }
}

/// Seed of trial `i`: first draw of stream `i` under the experiment seed.
pub fn trial_seed(seed: u64, i: usize) -> u64 {
    seeded_stream(seed, i as u64).random()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub index: usize,
    pub seed: u64,
    pub ambient_vertices: usize,
    pub outcome: TrialOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quartiles {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Linear-interpolation quartiles; `None` for an empty sample.
pub fn quartiles(xs: &[f64]) -> Option<Quartiles> {
    if xs.is_empty() {
        return None;
    }
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let h = p * (s.len() - 1) as f64;
        let (lo, hi) = (h.floor() as usize, h.ceil() as usize);
        s[lo] + (h - lo as f64) * (s[hi] - s[lo])
    };
    Some(Quartiles {
        min: s[0],
        q1: q(0.25),
        median: q(0.5),
        q3: q(0.75),
        max: s[s.len() - 1],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureSummary {
    pub feature: String,
    pub defined: usize,
    pub undefined: usize,
    pub quartiles: Option<Quartiles>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub config: ExperimentConfig,
    pub features: Vec<String>,
    pub degenerate: usize,
    pub trials: Vec<TrialRecord>,
    pub summary: Vec<FeatureSummary>,
}

impl CorrelationReport {
    /// Defined coefficients of one feature, in trial order.
    pub fn coefficients(&self, feature: &str) -> Vec<f64> {
        let Some(k) = self.features.iter().position(|f| f == feature) else {
            return Vec::new();
        };
        self.trials
            .iter()
            .filter_map(|t| match &t.outcome {
                TrialOutcome::Defined { coefficients, .. } => coefficients[k],
                TrialOutcome::Degenerate { .. } => None,
            })
            .collect()
    }

    pub fn summary_of(&self, feature: &str) -> Option<&FeatureSummary> {
        self.summary.iter().find(|s| s.feature == feature)
    }
}

/// Runs all trials on a dedicated pool of `cfg.threads` workers. Output is a
/// function of the config alone.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<CorrelationReport, FeatureError> {
    cfg.validate()?;
    let fixed = match &cfg.source {
        GraphSource::File { path } => {
            let format = Format::from_path(path);
            let file = std::fs::File::open(path).map_err(|e| FeatureError::Source {
                path: path.clone(),
                source: GraphError::Io(e.to_string()),
            })?;
            let loaded = load_digraph(std::io::BufReader::new(file), format).map_err(|source| {
                FeatureError::Source {
                    path: path.clone(),
                    source,
                }
            })?;
            Some(largest_weak_component(&loaded.graph))
        }
        GraphSource::Er { .. } => None,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| FeatureError::ThreadPool(e.to_string()))?;
    let trials: Vec<TrialRecord> = pool.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|index| {
                let seed = trial_seed(cfg.seed, index);
                let ambient = match (&fixed, &cfg.source) {
                    (Some(g), _) => g.clone(),
                    (None, GraphSource::Er { n, q }) => largest_weak_component(&erdos_renyi_with(
                        *n,
                        *q,
                        &mut seeded_stream(seed, 0),
                    )),
                    (None, GraphSource::File { .. }) => unreachable!("file source loaded above"),
                };
                let outcome = trial(&ambient, cfg.p_remove, seed, &cfg.features);
                TrialRecord {
                    index,
                    seed,
                    ambient_vertices: ambient.vertex_count(),
                    outcome,
                }
            })
            .collect()
    });
    let features = cfg.features.column_names();
    let degenerate = trials
        .iter()
        .filter(|t| matches!(t.outcome, TrialOutcome::Degenerate { .. }))
        .count();
    let mut report = CorrelationReport {
        config: cfg.clone(),
        features: features.clone(),
        degenerate,
        trials,
        summary: Vec::new(),
    };
    report.summary = features
        .iter()
        .map(|f| {
            let xs = report.coefficients(f);
            FeatureSummary {
                feature: f.clone(),
                defined: xs.len(),
                undefined: cfg.trials - degenerate - xs.len(),
                quartiles: quartiles(&xs),
            }
        })
        .collect();
    Ok(report)
}
