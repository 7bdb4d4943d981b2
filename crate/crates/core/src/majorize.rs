//! Convex comparison polygons for cyclic tuples.
//!
//! [`comparison_map`] follows the inductive construction: place the first
//! `n` points recursively, hinge the last point onto the closing edge from
//! the outside, and when the result is not convex, glue the hinge triangle
//! onto the polygon, recurse on the glued space with one vertex dropped and
//! reinsert that vertex on the resulting straight edge.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conditions::{self, cat4_check, PolygonCheck, Verdict};
use crate::gluing::{self, GluePoint, GluedSpace};
use crate::metric::{dedupe_consecutive, perimeter, CyclicTuple, FiniteMetric};
use crate::model::{self, Kappa, ModelPoint, Regime, SideLabel};
use crate::tolerance;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MajorizeError {
    #[error("perimeter {perimeter} is not below twice the model diameter {limit}")]
    PerimeterTooLarge { perimeter: f64, limit: f64 },
    #[error("quadruple {witness:?} violates the quadruple condition by {margin}")]
    NotQuadruple { witness: [usize; 4], margin: f64 },
    #[error("numerical breakdown at {step}")]
    NumericalBreakdown { step: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

fn breakdown(step: impl Into<String>) -> MajorizeError {
    MajorizeError::NumericalBreakdown { step: step.into() }
}

/// A polygon in `M²_κ` realising a cyclic tuple, with its residuals.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonMap {
    pub kappa: Kappa,
    pub points: Vec<ModelPoint>,
    pub edge_residuals: Vec<f64>,
    pub diag_slacks: Vec<f64>,
    pub convexity_ok: bool,
}

impl ComparisonMap {
    fn from_check(kappa: Kappa, points: Vec<ModelPoint>, check: &PolygonCheck) -> Self {
        ComparisonMap {
            kappa,
            points,
            edge_residuals: check.edge_residuals.clone(),
            diag_slacks: check.diag_slacks.clone(),
            convexity_ok: check.convexity_ok(),
        }
    }

    pub fn max_edge_residual(&self) -> f64 {
        self.edge_residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    pub fn min_diag_slack(&self) -> f64 {
        self.diag_slacks.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Serialized form of a [`ComparisonMap`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonMapJson {
    pub kappa: f64,
    pub model: String,
    pub points: Vec<Vec<f64>>,
    #[serde(default)]
    pub edge_residuals: Vec<f64>,
    #[serde(default)]
    pub diag_slacks: Vec<f64>,
    #[serde(default)]
    pub convexity_ok: bool,
}

impl From<&ComparisonMap> for ComparisonMapJson {
    fn from(cm: &ComparisonMap) -> Self {
        let regime = cm.kappa.regime();
        ComparisonMapJson {
            kappa: cm.kappa.value(),
            model: regime.name().to_string(),
            points: cm
                .points
                .iter()
                .map(|p| {
                    let c = p.coords();
                    match regime {
                        Regime::Plane => vec![c[0], c[1]],
                        _ => c.to_vec(),
                    }
                })
                .collect(),
            edge_residuals: cm.edge_residuals.clone(),
            diag_slacks: cm.diag_slacks.clone(),
            convexity_ok: cm.convexity_ok,
        }
    }
}

impl ComparisonMapJson {
    /// Model points of the serialized map, projected onto the model surface.
    pub fn model_points(&self) -> Result<(Kappa, Vec<ModelPoint>), MajorizeError> {
        let kappa = Kappa::try_new(self.kappa).map_err(|e| MajorizeError::InvalidInput(e.to_string()))?;
        let expected = kappa.regime().name();
        if self.model != expected {
            return Err(MajorizeError::InvalidInput(format!(
                "model {:?} does not match curvature {} ({expected})",
                self.model, self.kappa
            )));
        }
        let points = self
            .points
            .iter()
            .enumerate()
            .map(|(i, c)| match (kappa.regime(), c.as_slice()) {
                (Regime::Plane, [x, y]) | (Regime::Plane, [x, y, _]) => Ok(ModelPoint::plane(*x, *y)),
                (_, [x, y, z]) => Ok(ModelPoint::new(kappa, [*x, *y, *z])),
                _ => Err(MajorizeError::InvalidInput(format!(
                    "point {i} has {} coordinates",
                    c.len()
                ))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok((kappa, points))
    }
}

/// Bookkeeping for the recursion: call count and depth limit.
struct Recursion {
    kappa: Kappa,
    calls: u64,
    max_depth: usize,
}

impl Recursion {
    /// Comparison polygon for the tuple `(0, 1, …, N−1)` of `m`.
    fn build(&mut self, m: &FiniteMetric, depth: usize) -> Result<Vec<ModelPoint>, MajorizeError> {
        self.calls += 1;
        let big_n = m.len();
        if depth > self.max_depth {
            return Err(breakdown(format!("recursion depth {depth}")));
        }
        let kappa = self.kappa;
        let base = ModelPoint::base(kappa);
        match big_n {
            0 => return Ok(Vec::new()),
            1 => return Ok(vec![base]),
            2 => return Ok(vec![base, ModelPoint::from_polar(kappa, m.get(0, 1), 0.0)]),
            3 => {
                let x1 = ModelPoint::from_polar(kappa, m.get(0, 1), 0.0);
                let x2 = model::place_point(&base, &x1, m.get(0, 2), m.get(1, 2), SideLabel::Left)
                    .map_err(|e| breakdown(format!("triangle placement: {e}")))?;
                return Ok(vec![base, x1, x2]);
            }
            _ => {}
        }
        let n = big_n - 1;
        let tol = tolerance::scaled(m.max_entry());
        if m.get(n - 1, 0) <= tol {
            return self.tail_case(m, depth);
        }

        let first: Vec<usize> = (0..n).collect();
        let g0 = self.build(&m.submetric(&first), depth + 1)?;
        let (u, v) = (g0[n - 1], g0[0]);
        let side = match gluing::polygon_side(&g0, &u, &v) {
            SideLabel::On => SideLabel::Left,
            s => s.opposite(),
        };
        let p = model::place_point(&u, &v, m.get(n - 1, n), m.get(n, 0), side)
            .map_err(|e| breakdown(format!("hinge placement: {e}")))?;
        let mut g = g0.clone();
        g.push(p);

        let crosses = |a: usize| {
            model::segments_intersect(&g[n], &g[a], &g[n - 1], &g[0]).unwrap_or(false)
        };
        if crosses(n - 2) && crosses(1) {
            return Ok(g);
        }

        // Case 2: one of the two angle sums exceeds π; drop the vertex where
        // the excess is larger.
        let excess = |prev: usize, at: usize, other: usize| -> f64 {
            let a1 = model::angle_at(&g[prev], &g[at], &g[other]);
            let a2 = model::angle_at(&g[other], &g[at], &g[n]);
            match (a1, a2) {
                (Ok(a1), Ok(a2)) => a1.radians() + a2.radians() - PI,
                _ => f64::NEG_INFINITY,
            }
        };
        let at_last = excess(n - 2, n - 1, 0);
        let at_first = excess(1, 0, n - 1);
        let k = if at_last >= at_first { n - 1 } else { 0 };

        let glued = GluedSpace::along_segment(g0.clone(), vec![u, p, v], u, v)
            .map_err(|e| breakdown(format!("gluing: {e}")))?;
        let order: Vec<usize> = (0..=n).filter(|&i| i != k).collect();
        let marked: Vec<GluePoint> = order
            .iter()
            .map(|&i| if i == n { GluePoint::T(p) } else { GluePoint::S(g0[i]) })
            .collect();
        let sub = gluing::tuple_distance_matrix(&glued, &marked)
            .map_err(|e| breakdown(format!("glued distances: {e}")))?;
        let g1 = self.build(&sub, depth + 1)?;

        // reinsert the dropped vertex on the edge between its neighbours
        let (prev_pos, next_pos, along) = if k == n - 1 {
            (n - 2, n - 1, model::distance(&g0[n - 2], &g0[n - 1]).expect("same curvature"))
        } else {
            (n - 1, 0, model::distance(&p, &g0[0]).expect("same curvature"))
        };
        let q = point_on_segment(&g1[prev_pos], &g1[next_pos], along)?;
        let mut out = g1;
        if k == n - 1 {
            out.insert(n - 1, q);
        } else {
            out.insert(0, q);
        }
        Ok(out)
    }

    /// The closing neighbours `f(n−1)` and `f(0)` coincide: attach the last
    /// point by an interval at `f(0)` and recurse.
    fn tail_case(&mut self, m: &FiniteMetric, depth: usize) -> Result<Vec<ModelPoint>, MajorizeError> {
        let n = m.len() - 1;
        let front: Vec<usize> = (0..n - 1).collect();
        let h0 = self.build(&m.submetric(&front), depth + 1)?;
        let d = 0.5 * (m.get(n - 1, n) + m.get(n, 0));
        let glued = GluedSpace::with_interval(h0.clone(), h0[0], d)
            .map_err(|e| breakdown(format!("interval gluing: {e}")))?;
        let mut marked: Vec<GluePoint> = h0.iter().map(|&q| GluePoint::S(q)).collect();
        marked.push(GluePoint::Interval(d));
        let sub = gluing::tuple_distance_matrix(&glued, &marked)
            .map_err(|e| breakdown(format!("glued distances: {e}")))?;
        let h1 = self.build(&sub, depth + 1)?;
        let along = model::distance(&h0[n - 2], &h0[0]).expect("same curvature");
        let q = point_on_segment(&h1[n - 2], &h1[n - 1], along)?;
        let mut out = h1;
        out.insert(n - 1, q);
        Ok(out)
    }
}

/// The point of `[a, b]` at distance `along` from `a`, clamped to the
/// segment.
fn point_on_segment(a: &ModelPoint, b: &ModelPoint, along: f64) -> Result<ModelPoint, MajorizeError> {
    let len = model::distance(a, b).expect("same curvature");
    if len <= 0.0 {
        return Ok(*a);
    }
    model::interpolate(a, b, (along / len).clamp(0.0, 1.0))
        .map_err(|e| breakdown(format!("edge split: {e}")))
}

fn check_perimeter(m: &FiniteMetric, t: &CyclicTuple, kappa: Kappa) -> Result<(), MajorizeError> {
    if kappa.regime() == Regime::Sphere {
        let per = perimeter(m, t);
        let limit = 2.0 * kappa.diameter();
        if per >= limit {
            return Err(MajorizeError::PerimeterTooLarge { perimeter: per, limit });
        }
    }
    Ok(())
}

fn check_tuple(m: &FiniteMetric, t: &CyclicTuple) -> Result<(), MajorizeError> {
    if let Some(&i) = t.indices().iter().find(|&&i| i >= m.len()) {
        return Err(MajorizeError::InvalidInput(format!(
            "index {i} out of range for {} points",
            m.len()
        )));
    }
    m.validate()
        .map_err(|v| MajorizeError::InvalidInput(v.to_string()))
}

/// Verifies a candidate and turns a failure into the most informative error.
fn certify(
    m: &FiniteMetric,
    t: &CyclicTuple,
    points: Vec<ModelPoint>,
    kappa: Kappa,
) -> Result<ComparisonMap, MajorizeError> {
    let points = model::normalize_placement(&points);
    let check = conditions::cycl_n_verify(m, t, &points, kappa)
        .map_err(|e| breakdown(format!("verification: {e}")))?;
    if check.report.verdict != Verdict::Fail {
        return Ok(ComparisonMap::from_check(kappa, points, &check));
    }
    let sub = m.submetric(t.indices());
    let report = cat4_check(&sub, kappa);
    if report.verdict == Verdict::Fail {
        let w = report.witness.expect("failing reports carry a witness");
        let witness = [0, 1, 2, 3].map(|i| t.indices()[w.indices[i]]);
        return Err(MajorizeError::NotQuadruple {
            witness,
            margin: w.margin,
        });
    }
    Err(breakdown(format!(
        "verification (worst margin {:e})",
        check.report.margin
    )))
}

/// Comparison polygon for a tuple whose consecutive points are distinct.
pub fn comparison_map(
    m: &FiniteMetric,
    order: &CyclicTuple,
    kappa: Kappa,
) -> Result<ComparisonMap, MajorizeError> {
    check_tuple(m, order)?;
    check_perimeter(m, order, kappa)?;
    let n = order.len();
    let tol = tolerance::scaled(m.max_entry());
    if n > 1 {
        if let Some(i) = (0..n).find(|&i| m.get(order.at(i), order.at(i + 1)) <= tol) {
            return Err(MajorizeError::InvalidInput(format!(
                "positions {i} and {} hold the same point",
                (i + 1) % n
            )));
        }
    }
    let sub = m.submetric(order.indices());
    let mut rec = Recursion {
        kappa,
        calls: 0,
        max_depth: n,
    };
    let points = rec.build(&sub, 0)?;
    debug_assert!(rec.calls <= 1u64 << n.min(63));
    certify(m, order, points, kappa)
}

/// Comparison polygon for an arbitrary tuple: runs of repeated points are
/// collapsed, the reduced tuple is majorized, and vertices are repeated
/// back over their runs.
pub fn majorize(m: &FiniteMetric, t: &CyclicTuple, kappa: Kappa) -> Result<ComparisonMap, MajorizeError> {
    check_tuple(m, t)?;
    check_perimeter(m, t, kappa)?;
    let (reduced, runs) = dedupe_consecutive(m, t);
    let sub = m.submetric(reduced.indices());
    let mut rec = Recursion {
        kappa,
        calls: 0,
        max_depth: reduced.len(),
    };
    let points = rec.build(&sub, 0)?;
    debug_assert!(rec.calls <= 1u64 << reduced.len().min(63));
    certify(m, t, runs.expand(&points), kappa)
}

/// Moves the map by an isometry so that the first point is the base point,
/// the first point distinct from it lies on the positive first axis and the
/// polygon turns to the Left.
pub fn canonicalize(cm: &ComparisonMap) -> ComparisonMap {
    ComparisonMap {
        points: model::normalize_placement(&cm.points),
        ..cm.clone()
    }
}
