//! Finite metric spaces stored as dense distance matrices, and cyclic
//! tuples of indices into them.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{self, Kappa, ModelPoint, Regime};
use crate::tolerance;

/// Why a matrix fails to be a metric. Indices locate the offending cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NonFinite { i: usize, j: usize },
    Diagonal { i: usize, value: f64 },
    Negative { i: usize, j: usize, value: f64 },
    Asymmetric { i: usize, j: usize, forward: f64, backward: f64 },
    /// `d(i, k) > d(i, j) + d(j, k)` by `excess`.
    Triangle { i: usize, j: usize, k: usize, excess: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::NonFinite { i, j } => write!(f, "entry ({i},{j}) is not finite"),
            Violation::Diagonal { i, value } => {
                write!(f, "diagonal entry ({i},{i}) is {value}, expected 0")
            }
            Violation::Negative { i, j, value } => write!(f, "entry ({i},{j}) is negative: {value}"),
            Violation::Asymmetric {
                i,
                j,
                forward,
                backward,
            } => write!(f, "entry ({i},{j}) = {forward} differs from ({j},{i}) = {backward}"),
            Violation::Triangle { i, j, k, excess } => write!(
                f,
                "triangle inequality fails for ({i},{j},{k}): d({i},{k}) exceeds d({i},{j}) + d({j},{k}) by {excess}"
            ),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("empty matrix")]
    Empty,
    #[error("{0}")]
    Invalid(Violation),
    #[error("tuple position {position} holds index {index}, but the metric has {n} points")]
    TupleIndex {
        position: usize,
        index: usize,
        n: usize,
    },
    #[error("tuples must contain at least one index")]
    EmptyTuple,
    #[error("snowflake exponent must lie in (0, 1], got {0}")]
    Exponent(f64),
}

/// Dense symmetric distance matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetric {
    n: usize,
    d: Vec<f64>,
}

impl FiniteMetric {
    /// Builds and validates a metric from its rows.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, MetricError> {
        let m = Self::from_rows_unchecked(rows)?;
        m.validate().map_err(MetricError::Invalid)?;
        Ok(m)
    }

    /// Builds a matrix checking only its shape; call [`validate`](Self::validate)
    /// before relying on metric properties.
    pub fn from_rows_unchecked(rows: Vec<Vec<f64>>) -> Result<Self, MetricError> {
        let n = rows.len();
        if n == 0 {
            return Err(MetricError::Empty);
        }
        let mut d = Vec::with_capacity(n * n);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != n {
                return Err(MetricError::NotSquare {
                    row,
                    len: r.len(),
                    n,
                });
            }
            d.extend(r);
        }
        Ok(FiniteMetric { n, d })
    }

    /// Builds a matrix from a symmetric distance function. The diagonal is
    /// set to zero and only `f(i, j)` with `i < j` is evaluated.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        FiniteMetric { n, d }
    }

    /// Pairwise distances of model points.
    pub fn from_points(points: &[ModelPoint]) -> Self {
        Self::from_fn(points.len(), |i, j| {
            model::distance(&points[i], &points[j]).expect("points share one curvature")
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.d.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn max_entry(&self) -> f64 {
        self.d.iter().copied().fold(0.0, f64::max)
    }

    /// Tolerance used for the triangle inequality: relative to the largest
    /// entry.
    pub fn triangle_tolerance(&self) -> f64 {
        tolerance::eps() * self.max_entry()
    }

    /// Checks finiteness, zero diagonal, nonnegativity, symmetry and the
    /// triangle inequality, returning the first violation found.
    pub fn validate(&self) -> Result<(), Violation> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let v = self.get(i, j);
                if !v.is_finite() {
                    return Err(Violation::NonFinite { i, j });
                }
            }
        }
        for i in 0..n {
            let v = self.get(i, i);
            if v != 0.0 {
                return Err(Violation::Diagonal { i, value: v });
            }
        }
        for i in 0..n {
            for j in 0..n {
                let v = self.get(i, j);
                if v < 0.0 {
                    return Err(Violation::Negative { i, j, value: v });
                }
                if j > i && v != self.get(j, i) {
                    return Err(Violation::Asymmetric {
                        i,
                        j,
                        forward: v,
                        backward: self.get(j, i),
                    });
                }
            }
        }
        let tol = self.triangle_tolerance();
        for i in 0..n {
            for k in i + 1..n {
                let dik = self.get(i, k);
                for j in 0..n {
                    let excess = dik - self.get(i, j) - self.get(j, k);
                    if excess > tol {
                        return Err(Violation::Triangle { i, j, k, excess });
                    }
                }
            }
        }
        Ok(())
    }

    /// The metric restricted to `indices`, in that order (repeats allowed).
    pub fn submetric(&self, indices: &[usize]) -> FiniteMetric {
        let k = indices.len();
        let mut d = Vec::with_capacity(k * k);
        for &i in indices {
            for &j in indices {
                d.push(self.get(i, j));
            }
        }
        FiniteMetric { n: k, d }
    }

    /// All distances multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> FiniteMetric {
        FiniteMetric {
            n: self.n,
            d: self.d.iter().map(|v| v * factor).collect(),
        }
    }
}

/// Indices into a metric, read cyclically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CyclicTuple(Vec<usize>);

impl CyclicTuple {
    /// Checks that the tuple is non-empty and every index is below `n`.
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self, MetricError> {
        if indices.is_empty() {
            return Err(MetricError::EmptyTuple);
        }
        if let Some((position, &index)) = indices.iter().enumerate().find(|(_, &i)| i >= n) {
            return Err(MetricError::TupleIndex { position, index, n });
        }
        Ok(CyclicTuple(indices))
    }

    /// `(0, 1, …, n−1)`.
    pub fn identity(n: usize) -> Self {
        CyclicTuple((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    /// Entry at position `i` modulo the length.
    pub fn at(&self, i: usize) -> usize {
        self.0[i % self.0.len()]
    }
}

/// Entrywise power `d^alpha`.
pub fn snowflake(m: &FiniteMetric, alpha: f64) -> Result<FiniteMetric, MetricError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(MetricError::Exponent(alpha));
    }
    Ok(FiniteMetric {
        n: m.n,
        d: m.d.iter().map(|v| v.powf(alpha)).collect(),
    })
}

/// Sum of consecutive cyclic distances.
pub fn perimeter(m: &FiniteMetric, t: &CyclicTuple) -> f64 {
    let n = t.len();
    if n < 2 {
        return 0.0;
    }
    (0..n).map(|i| m.get(t.at(i), t.at(i + 1))).sum()
}

/// How a deduplicated tuple re-inflates to the original one.
///
/// Position `offset + lengths[0] + … + lengths[k−1] + r` (mod the original
/// length), for `r < lengths[k]`, maps to entry `k` of the reduced tuple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Runs {
    pub offset: usize,
    pub lengths: Vec<usize>,
}

impl Runs {
    pub fn total(&self) -> usize {
        self.lengths.iter().sum()
    }

    /// Repeats each reduced entry over its run, in the original positions.
    pub fn expand<T: Clone>(&self, reduced: &[T]) -> Vec<T> {
        assert_eq!(reduced.len(), self.lengths.len(), "one entry per run");
        let n = self.total();
        let mut out: Vec<Option<T>> = vec![None; n];
        let mut pos = self.offset;
        for (item, &len) in reduced.iter().zip(&self.lengths) {
            for _ in 0..len {
                out[pos % n] = Some(item.clone());
                pos += 1;
            }
        }
        out.into_iter().map(|v| v.expect("runs cover every position")).collect()
    }
}

/// Collapses cyclically consecutive entries at (numerically) zero distance.
///
/// The reduced tuple starts at the first position whose predecessor is a
/// different point, so a run wrapping around the end is kept whole.
pub fn dedupe_consecutive(m: &FiniteMetric, t: &CyclicTuple) -> (CyclicTuple, Runs) {
    let n = t.len();
    let tol = tolerance::scaled(m.max_entry());
    let same = |i: usize, j: usize| m.get(t.at(i), t.at(j)) <= tol;
    let Some(start) = (0..n).find(|&i| !same((i + n - 1) % n, i)) else {
        return (
            CyclicTuple(vec![t.at(0)]),
            Runs {
                offset: 0,
                lengths: vec![n],
            },
        );
    };
    let mut reduced = Vec::new();
    let mut lengths = Vec::new();
    for k in 0..n {
        let i = start + k;
        if k == 0 || !same(i - 1, i) {
            reduced.push(t.at(i));
            lengths.push(1);
        } else {
            *lengths.last_mut().expect("run started") += 1;
        }
    }
    (
        CyclicTuple(reduced),
        Runs {
            offset: start,
            lengths,
        },
    )
}

/// Cap radius used by the samplers: small enough that every cyclic order
/// of `n` sampled points has perimeter below `2 D_κ` for `κ > 0`.
pub fn sampling_radius(n: usize, kappa: Kappa) -> f64 {
    match kappa.regime() {
        Regime::Plane => 1.0,
        Regime::Hyperboloid => 2.0 * kappa.radius(),
        Regime::Sphere => {
            let d = kappa.diameter();
            (0.45 * d).min(0.95 * d / n.max(1) as f64)
        }
    }
}

/// `n` points drawn uniformly by area from a disk of the given radius about
/// the base point of `M²_κ`.
pub fn sample_points_in_disk<R: Rng>(
    n: usize,
    kappa: Kappa,
    radius: f64,
    rng: &mut R,
) -> Vec<ModelPoint> {
    (0..n)
        .map(|_| {
            let r = radius * rng.gen::<f64>().sqrt();
            let phi = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            ModelPoint::from_polar(kappa, r, phi)
        })
        .collect()
}

/// `n` points sampled from `M²_κ` with their distance matrix. The same seed
/// always yields the same output.
///
/// Planar points come from the square `[−1, 1]²`; other regimes from a disk
/// about the base point (see [`sampling_radius`]).
pub fn sample_model_subset(n: usize, kappa: Kappa, seed: u64) -> (FiniteMetric, Vec<ModelPoint>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = match kappa.regime() {
        Regime::Plane => (0..n)
            .map(|_| ModelPoint::plane(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect(),
        _ => sample_points_in_disk(n, kappa, sampling_radius(n, kappa), &mut rng),
    };
    (FiniteMetric::from_points(&points), points)
}
