//! Distances in the space obtained by gluing two convex pieces of `M²_κ`
//! along a common segment or a common point.
//!
//! Both pieces are given in the coordinates of a single model plane. Inside
//! a piece the distance is the ambient one; across pieces it is the
//! infimum over the seam of `d(a, z) + d(z, b)`.

use thiserror::Error;

use crate::metric::FiniteMetric;
use crate::model::{self, Kappa, ModelPoint, SideLabel};
use crate::tolerance;

/// Iteration cap of the seam search.
pub const SEAM_ITERATIONS: usize = 200;
/// Parameter tolerance at which the seam search stops.
pub const SEAM_PARAM_TOL: f64 = 1e-12;
/// Equispaced samples used to bracket the seam minimum before refining.
const SEAM_BRACKET: usize = 64;
/// Slack for membership of computed points in their pieces.
const MEMBERSHIP_FACTOR: f64 = 10.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GlueError {
    #[error("point {index} does not lie in piece {piece}")]
    OutsidePiece { piece: &'static str, index: usize },
    #[error("seam endpoint does not lie on piece {0}")]
    SeamOffPiece(&'static str),
    #[error("interval coordinate {value} is outside [0, {length}]")]
    OutsideInterval { value: f64, length: f64 },
    #[error("points carry a different curvature than the glued space")]
    KappaMismatch,
    #[error("an interval piece can only be glued at a point")]
    IntervalNeedsPointSeam,
    #[error("pieces must not be empty")]
    EmptyPiece,
}

/// The second piece: a convex polygon or an interval `[0, length]` whose
/// end `0` is the glue point.
#[derive(Clone, Debug, PartialEq)]
pub enum PieceT {
    Polygon(Vec<ModelPoint>),
    Interval { length: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Seam {
    Segment(ModelPoint, ModelPoint),
    Point(ModelPoint),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GluedSpace {
    kappa: Kappa,
    piece_s: Vec<ModelPoint>,
    piece_t: PieceT,
    seam: Seam,
}

/// A point of the glued space, tagged with its piece.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GluePoint {
    S(ModelPoint),
    T(ModelPoint),
    /// Coordinate along an interval piece.
    Interval(f64),
}

impl GluedSpace {
    /// Two convex polygons glued along the segment `[u, v]`.
    pub fn along_segment(
        piece_s: Vec<ModelPoint>,
        piece_t: Vec<ModelPoint>,
        u: ModelPoint,
        v: ModelPoint,
    ) -> Result<Self, GlueError> {
        let first = *piece_s.first().ok_or(GlueError::EmptyPiece)?;
        if piece_t.is_empty() {
            return Err(GlueError::EmptyPiece);
        }
        let kappa = first.kappa();
        if piece_s.iter().chain(&piece_t).chain([&u, &v]).any(|p| p.kappa() != kappa) {
            return Err(GlueError::KappaMismatch);
        }
        for (name, piece) in [("S", &piece_s), ("T", &piece_t)] {
            if !polygon_contains(piece, &u) || !polygon_contains(piece, &v) {
                return Err(GlueError::SeamOffPiece(name));
            }
        }
        Ok(GluedSpace {
            kappa,
            piece_s,
            piece_t: PieceT::Polygon(piece_t),
            seam: Seam::Segment(u, v),
        })
    }

    /// A convex polygon with an interval of the given length attached at `u`.
    pub fn with_interval(piece_s: Vec<ModelPoint>, u: ModelPoint, length: f64) -> Result<Self, GlueError> {
        let first = *piece_s.first().ok_or(GlueError::EmptyPiece)?;
        let kappa = first.kappa();
        if piece_s.iter().any(|p| p.kappa() != kappa) || u.kappa() != kappa {
            return Err(GlueError::KappaMismatch);
        }
        if !polygon_contains(&piece_s, &u) {
            return Err(GlueError::SeamOffPiece("S"));
        }
        Ok(GluedSpace {
            kappa,
            piece_s,
            piece_t: PieceT::Interval {
                length: length.max(0.0),
            },
            seam: Seam::Point(u),
        })
    }

    pub fn kappa(&self) -> Kappa {
        self.kappa
    }

    pub fn seam(&self) -> Seam {
        self.seam
    }

    pub fn piece_s(&self) -> &[ModelPoint] {
        &self.piece_s
    }

    pub fn piece_t(&self) -> &PieceT {
        &self.piece_t
    }

    fn check(&self, p: &GluePoint, index: usize) -> Result<(), GlueError> {
        match (p, &self.piece_t) {
            (GluePoint::S(q), _) => {
                if q.kappa() != self.kappa {
                    return Err(GlueError::KappaMismatch);
                }
                if !polygon_contains(&self.piece_s, q) {
                    return Err(GlueError::OutsidePiece { piece: "S", index });
                }
            }
            (GluePoint::T(q), PieceT::Polygon(t)) => {
                if q.kappa() != self.kappa {
                    return Err(GlueError::KappaMismatch);
                }
                if !polygon_contains(t, q) {
                    return Err(GlueError::OutsidePiece { piece: "T", index });
                }
            }
            (GluePoint::Interval(v), PieceT::Interval { length }) => {
                let tol = tolerance::scaled(*length);
                if !(*v >= -tol && *v <= length + tol) {
                    return Err(GlueError::OutsideInterval {
                        value: *v,
                        length: *length,
                    });
                }
            }
            _ => return Err(GlueError::OutsidePiece { piece: "T", index }),
        }
        Ok(())
    }
}

/// Points of a vertex list lying on one line, or a convex polygon through
/// them, tested with a relative tolerance and boundary included.
pub(crate) fn polygon_contains(vertices: &[ModelPoint], p: &ModelPoint) -> bool {
    let n = vertices.len();
    let scale = vertices
        .iter()
        .map(|v| model::distance(v, p).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    let tol = MEMBERSHIP_FACTOR * tolerance::scaled(scale);
    let dist = |a: &ModelPoint, b: &ModelPoint| model::distance(a, b).unwrap_or(f64::INFINITY);
    if vertices.iter().any(|v| dist(v, p) <= tol) {
        return true;
    }
    let on_some_segment = || {
        (0..n).any(|i| {
            (i + 1..n).any(|j| {
                let (a, b) = (&vertices[i], &vertices[j]);
                dist(a, p) + dist(p, b) - dist(a, b) <= tol
            })
        })
    };
    let mut saw_edge = false;
    for i in 0..n {
        let (a, b) = (&vertices[i], &vertices[(i + 1) % n]);
        if dist(a, b) <= tol {
            continue;
        }
        let Ok(hp) = model::signed_line_distance(a, b, p) else {
            continue;
        };
        // orientation taken from the vertex farthest from the edge line
        let reference = vertices
            .iter()
            .filter_map(|v| model::signed_line_distance(a, b, v).ok())
            .fold(0.0f64, |acc, h| if h.abs() > acc.abs() { h } else { acc });
        if reference.abs() <= tol {
            continue;
        }
        saw_edge = true;
        if hp * reference.signum() < -tol {
            return false;
        }
    }
    if saw_edge {
        true
    } else {
        on_some_segment()
    }
}

/// Orientation of a convex vertex list, if it has any area.
pub(crate) fn polygon_side(vertices: &[ModelPoint], a: &ModelPoint, b: &ModelPoint) -> SideLabel {
    let mut best = 0.0f64;
    for v in vertices {
        if let Ok(h) = model::signed_line_distance(a, b, v) {
            if h.abs() > best.abs() {
                best = h;
            }
        }
    }
    let scale = vertices
        .iter()
        .map(|v| model::distance(a, v).unwrap_or(0.0))
        .fold(0.0, f64::max);
    if best.abs() <= tolerance::scaled(scale) {
        SideLabel::On
    } else if best > 0.0 {
        SideLabel::Left
    } else {
        SideLabel::Right
    }
}

/// Minimum of `d(a, z) + d(z, b)` over `z` on the segment `[u, v]`.
///
/// A coarse equispaced scan brackets the minimum, which a ternary search
/// then refines; both seam endpoints are always candidates.
pub fn seam_min(a: &ModelPoint, b: &ModelPoint, u: &ModelPoint, v: &ModelPoint) -> f64 {
    let len = model::distance(u, v).expect("same curvature");
    let at = |lambda: f64| -> f64 {
        let z = model::interpolate(u, v, lambda).expect("seam shorter than the diameter");
        model::distance(a, &z).expect("same curvature") + model::distance(&z, b).expect("same curvature")
    };
    let ends = at(0.0).min(at(1.0));
    if len == 0.0 {
        return ends;
    }
    let mut best = (0usize, f64::INFINITY);
    for k in 0..=SEAM_BRACKET {
        let v = at(k as f64 / SEAM_BRACKET as f64);
        if v < best.1 {
            best = (k, v);
        }
    }
    let h = 1.0 / SEAM_BRACKET as f64;
    let (mut lo, mut hi) = (
        (best.0 as f64 - 1.0).max(0.0) * h,
        (best.0 as f64 + 1.0).min(SEAM_BRACKET as f64) * h,
    );
    for _ in 0..SEAM_ITERATIONS {
        if hi - lo <= SEAM_PARAM_TOL {
            break;
        }
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if at(m1) <= at(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    ends.min(best.1).min(at(0.5 * (lo + hi)))
}

/// Distance between two points of the glued space.
pub fn glued_distance(g: &GluedSpace, a: &GluePoint, b: &GluePoint) -> Result<f64, GlueError> {
    g.check(a, 0)?;
    g.check(b, 1)?;
    Ok(distance_unchecked(g, a, b))
}

fn distance_unchecked(g: &GluedSpace, a: &GluePoint, b: &GluePoint) -> f64 {
    use GluePoint::*;
    let d = |p: &ModelPoint, q: &ModelPoint| model::distance(p, q).expect("same curvature");
    match (a, b) {
        (S(p), S(q)) | (T(p), T(q)) => d(p, q),
        (Interval(x), Interval(y)) => (x - y).abs(),
        (S(p), Interval(x)) | (Interval(x), S(p)) => match g.seam {
            Seam::Point(u) => d(p, &u) + x.max(0.0),
            Seam::Segment(..) => unreachable!("interval pieces use point seams"),
        },
        (S(p), T(q)) | (T(q), S(p)) => match g.seam {
            Seam::Point(u) => d(p, &u) + d(&u, q),
            Seam::Segment(u, v) => seam_min(p, q, &u, &v),
        },
        (T(_), Interval(_)) | (Interval(_), T(_)) => unreachable!("checked by GluedSpace::check"),
    }
}

/// Pairwise glued distances of `pts`.
pub fn tuple_distance_matrix(g: &GluedSpace, pts: &[GluePoint]) -> Result<FiniteMetric, GlueError> {
    for (i, p) in pts.iter().enumerate() {
        g.check(p, i)?;
    }
    Ok(FiniteMetric::from_fn(pts.len(), |i, j| distance_unchecked(g, &pts[i], &pts[j])))
}
