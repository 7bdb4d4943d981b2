//! Geometry of the model surfaces `M²_κ`.
//!
//! A single point type covers all three regimes:
//!
//! * `κ = 0`: the Euclidean plane, coordinates `(x, y, 0)`;
//! * `κ > 0`: the sphere of radius `1/√κ` centred at the origin of `R³`;
//! * `κ < 0`: the upper sheet of the hyperboloid `x² + y² − w² = 1/κ` in
//!   Minkowski space, with the time coordinate `w` stored last.
//!
//! Curvatures with `|κ| < 1e-12` are treated as flat. All trigonometric
//! work is done in unit coordinates (coordinates divided by the radius) and
//! lengths are rescaled on the way out.
//!
//! The law of cosines is evaluated in half-angle form, which keeps full
//! relative precision for angles near `0` and near `π`:
//!
//! ```text
//! tan²(θ/2) = S((c−a+b)/2)·S((c+a−b)/2) / (S((a+b+c)/2)·S((a+b−c)/2))
//! ```
//!
//! where `S` is `x`, `sin(√κ x)` or `sinh(√−κ x)`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tolerance;

/// Curvatures closer to zero than this are treated as exactly flat.
pub const FLAT_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("curvature must be finite, got {0}")]
    NonFiniteKappa(f64),
    #[error("points carry different curvatures ({0} vs {1})")]
    KappaMismatch(f64, f64),
    #[error("side lengths ({a}, {b}, {c}) do not form a triangle in the model plane")]
    Unrealizable { a: f64, b: f64, c: f64 },
    #[error("angle vertex coincides with an endpoint")]
    DegenerateVertex,
    #[error("length {0} is not below the model diameter {1}")]
    TooLong(f64, f64),
    #[error("segment endpoints coincide")]
    DegenerateSegment,
    #[error("perimeter {0} is not below twice the model diameter")]
    PerimeterTooLarge(f64),
    #[error("requested side {0:?} is inconsistent with the distance pair")]
    InvalidSide(SideLabel),
}

pub type Result<T> = std::result::Result<T, GeometryError>;

/// Curvature bound selecting the model plane.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Kappa(f64);

/// Which of the three model geometries a curvature selects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Plane,
    Sphere,
    Hyperboloid,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Plane => "plane",
            Regime::Sphere => "sphere",
            Regime::Hyperboloid => "hyperboloid",
        }
    }
}

impl Kappa {
    pub const FLAT: Kappa = Kappa(0.0);

    /// # Panics
    /// If `value` is not finite. Use [`Kappa::try_new`] for untrusted input.
    pub fn new(value: f64) -> Self {
        Self::try_new(value).expect("curvature must be finite")
    }

    pub fn try_new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(Kappa(value))
        } else {
            Err(GeometryError::NonFiniteKappa(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn regime(self) -> Regime {
        if self.0.abs() < FLAT_THRESHOLD {
            Regime::Plane
        } else if self.0 > 0.0 {
            Regime::Sphere
        } else {
            Regime::Hyperboloid
        }
    }

    /// `1/√|κ|`, or infinity in the flat regime.
    pub fn radius(self) -> f64 {
        match self.regime() {
            Regime::Plane => f64::INFINITY,
            _ => 1.0 / self.0.abs().sqrt(),
        }
    }

    /// `√|κ|`, the factor turning lengths into unit-model lengths.
    fn root(self) -> f64 {
        match self.regime() {
            Regime::Plane => 1.0,
            _ => self.0.abs().sqrt(),
        }
    }

    /// `π/√κ` for positive curvature, infinity otherwise.
    pub fn diameter(self) -> f64 {
        diameter(self)
    }
}

impl fmt::Display for Kappa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Diameter of `M²_κ`.
pub fn diameter(kappa: Kappa) -> f64 {
    match kappa.regime() {
        Regime::Sphere => PI / kappa.0.sqrt(),
        _ => f64::INFINITY,
    }
}

/// Interior angle in `[0, π]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);
    pub const STRAIGHT: Angle = Angle(PI);

    /// Clamps into `[0, π]`.
    pub fn new(radians: f64) -> Self {
        Angle(radians.clamp(0.0, PI))
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

/// Position of a point relative to an oriented line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SideLabel {
    Left,
    Right,
    On,
}

impl SideLabel {
    pub fn opposite(self) -> Self {
        match self {
            SideLabel::Left => SideLabel::Right,
            SideLabel::Right => SideLabel::Left,
            SideLabel::On => SideLabel::On,
        }
    }
}

/// A point of `M²_κ` in embedded coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint {
    kappa: Kappa,
    coords: [f64; 3],
}

type V3 = [f64; 3];

fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn mdot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] - a[2] * b[2]
}

fn cross(a: V3, b: V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn det(a: V3, b: V3, c: V3) -> f64 {
    dot(a, cross(b, c))
}

fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn scale(a: V3, s: f64) -> V3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn axpy(s: f64, x: V3, y: V3) -> V3 {
    [s * x[0] + y[0], s * x[1] + y[1], s * x[2] + y[2]]
}

fn norm(a: V3) -> f64 {
    dot(a, a).sqrt()
}

impl ModelPoint {
    /// Builds a point from embedded coordinates, projecting it back onto the
    /// model surface (plane: third coordinate zeroed; sphere: radial
    /// normalisation; hyperboloid: time coordinate recomputed).
    pub fn new(kappa: Kappa, coords: [f64; 3]) -> Self {
        match kappa.regime() {
            Regime::Plane => ModelPoint {
                kappa,
                coords: [coords[0], coords[1], 0.0],
            },
            _ => {
                let r = kappa.radius();
                Self::from_unit(kappa, scale(coords, 1.0 / r))
            }
        }
    }

    /// Base point: the origin, the north pole, or the hyperboloid apex.
    pub fn base(kappa: Kappa) -> Self {
        match kappa.regime() {
            Regime::Plane => ModelPoint {
                kappa,
                coords: [0.0, 0.0, 0.0],
            },
            _ => ModelPoint {
                kappa,
                coords: [0.0, 0.0, kappa.radius()],
            },
        }
    }

    /// The point reached from the base point by walking `distance` along the
    /// direction making angle `direction` (counter-clockwise) with the
    /// positive first axis.
    pub fn from_polar(kappa: Kappa, distance: f64, direction: f64) -> Self {
        let (sd, cd) = direction.sin_cos();
        match kappa.regime() {
            Regime::Plane => ModelPoint {
                kappa,
                coords: [distance * cd, distance * sd, 0.0],
            },
            Regime::Sphere => {
                let s = distance * kappa.root();
                let (ss, cs) = s.sin_cos();
                Self::from_unit(kappa, [ss * cd, ss * sd, cs])
            }
            Regime::Hyperboloid => {
                let s = distance * kappa.root();
                Self::from_unit(kappa, [s.sinh() * cd, s.sinh() * sd, s.cosh()])
            }
        }
    }

    /// Planar convenience constructor.
    pub fn plane(x: f64, y: f64) -> Self {
        ModelPoint {
            kappa: Kappa::FLAT,
            coords: [x, y, 0.0],
        }
    }

    fn from_unit(kappa: Kappa, u: V3) -> Self {
        let unit = match kappa.regime() {
            Regime::Plane => return ModelPoint { kappa, coords: u },
            Regime::Sphere => {
                let n = norm(u);
                scale(u, 1.0 / n)
            }
            Regime::Hyperboloid => {
                let w = (1.0 + u[0] * u[0] + u[1] * u[1]).sqrt();
                [u[0], u[1], w]
            }
        };
        ModelPoint {
            kappa,
            coords: scale(unit, kappa.radius()),
        }
    }

    pub fn kappa(&self) -> Kappa {
        self.kappa
    }

    pub fn coords(&self) -> [f64; 3] {
        self.coords
    }

    /// Coordinates divided by the model radius (unchanged in the plane).
    fn unit(&self) -> V3 {
        match self.kappa.regime() {
            Regime::Plane => self.coords,
            _ => scale(self.coords, self.kappa.root()),
        }
    }

    /// Residual of the defining equation of the model surface, in units of
    /// the squared radius.
    pub fn surface_residual(&self) -> f64 {
        let u = self.unit();
        match self.kappa.regime() {
            Regime::Plane => self.coords[2].abs(),
            Regime::Sphere => (dot(u, u) - 1.0).abs(),
            Regime::Hyperboloid => {
                if u[2] <= 0.0 {
                    f64::INFINITY
                } else {
                    (mdot(u, u) + 1.0).abs()
                }
            }
        }
    }
}

fn same_kappa(p: &ModelPoint, q: &ModelPoint) -> Result<Kappa> {
    if p.kappa == q.kappa {
        Ok(p.kappa)
    } else {
        Err(GeometryError::KappaMismatch(p.kappa.0, q.kappa.0))
    }
}

fn unit_distance(regime: Regime, u: V3, v: V3) -> f64 {
    match regime {
        Regime::Plane => norm(sub(u, v)),
        Regime::Sphere => norm(cross(u, v)).atan2(dot(u, v)),
        Regime::Hyperboloid => {
            // acosh is better conditioned for far points, the chord form for near ones
            let m = -mdot(u, v);
            if m > 2.0 {
                m.acosh()
            } else {
                let d = sub(u, v);
                2.0 * (mdot(d, d).max(0.0).sqrt() / 2.0).asinh()
            }
        }
    }
}

/// Geodesic distance.
pub fn distance(p: &ModelPoint, q: &ModelPoint) -> Result<f64> {
    let kappa = same_kappa(p, q)?;
    Ok(dist(kappa, p, q))
}

/// Distance without the curvature check; callers guarantee agreement.
pub(crate) fn dist(kappa: Kappa, p: &ModelPoint, q: &ModelPoint) -> f64 {
    unit_distance(kappa.regime(), p.unit(), q.unit()) / kappa.root()
}

/// Generalised sine `S(x)` in unit lengths; only its sign and ratios matter.
fn gsin(regime: Regime, x: f64) -> f64 {
    match regime {
        Regime::Plane => x,
        Regime::Sphere => x.sin(),
        Regime::Hyperboloid => x.sinh(),
    }
}

/// Angle at the vertex joining sides `a` and `b`, opposite side `c`.
pub fn law_of_cosines_angle(a: f64, b: f64, c: f64, kappa: Kappa) -> Result<Angle> {
    let d = diameter(kappa);
    if !(a > 0.0 && b > 0.0) {
        return Err(GeometryError::DegenerateVertex);
    }
    if a >= d {
        return Err(GeometryError::TooLong(a, d));
    }
    if b >= d {
        return Err(GeometryError::TooLong(b, d));
    }
    let tol = tolerance::scaled(a.max(b).max(c));
    let mut factors = [c - a + b, c + a - b, a + b - c, 0.0];
    if kappa.regime() == Regime::Sphere {
        factors[3] = 2.0 * d - (a + b + c);
    }
    if factors.iter().any(|&f| f < -tol) || c < -tol {
        return Err(GeometryError::Unrealizable { a, b, c });
    }
    let regime = kappa.regime();
    let k = kappa.root();
    let half = |f: f64| gsin(regime, 0.5 * k * f.max(0.0));
    let num = (half(factors[0]) * half(factors[1])).max(0.0).sqrt();
    let den = (gsin(regime, 0.5 * k * (a + b + c).min(2.0 * d)) * half(factors[2]))
        .max(0.0)
        .sqrt();
    if num == 0.0 && den == 0.0 {
        // Only reachable when c = 0 and a = b on a full great circle.
        return Ok(Angle::ZERO);
    }
    Ok(Angle::new(2.0 * num.atan2(den)))
}

/// Third side of the hinge with legs `a`, `b` and opening angle `theta`.
pub fn hinge_third_side(a: f64, b: f64, theta: Angle, kappa: Kappa) -> f64 {
    let half = 0.5 * theta.0;
    let (sh, ch) = half.sin_cos();
    match kappa.regime() {
        Regime::Plane => {
            let d = 0.5 * (a - b);
            2.0 * (d * d + a * b * sh * sh).max(0.0).sqrt()
        }
        Regime::Sphere => {
            let k = kappa.root();
            let (ua, ub) = (a * k, b * k);
            let sd = (0.5 * (ua - ub)).sin();
            let cs = (0.5 * (ua + ub)).cos();
            let prod = ua.sin() * ub.sin();
            let num = (sd * sd + prod * sh * sh).max(0.0).sqrt();
            let den = (cs * cs + prod * ch * ch).max(0.0).sqrt();
            2.0 * num.atan2(den) / k
        }
        Regime::Hyperboloid => {
            let k = kappa.root();
            let (ua, ub) = (a * k, b * k);
            let sd = (0.5 * (ua - ub)).sinh();
            let prod = ua.sinh() * ub.sinh();
            2.0 * (sd * sd + prod * sh * sh).max(0.0).sqrt().asinh() / k
        }
    }
}

/// Orthonormal tangent frame at a point: `t` points along a chosen geodesic,
/// `n` is `t` rotated by `+π/2` (towards the Left side).
#[derive(Clone, Copy, Debug)]
struct Frame {
    kappa: Kappa,
    origin: V3,
    t: V3,
    n: V3,
}

impl Frame {
    /// Frame at `a` with `t` pointing towards `b`; `None` if the points
    /// coincide numerically.
    fn towards(a: &ModelPoint, b: &ModelPoint) -> Option<Frame> {
        let kappa = a.kappa;
        let (u, v) = (a.unit(), b.unit());
        let raw = match kappa.regime() {
            Regime::Plane => sub(v, u),
            Regime::Sphere => axpy(-dot(u, v), u, v),
            Regime::Hyperboloid => axpy(mdot(u, v), u, v),
        };
        Self::with_direction(kappa, u, raw)
    }

    fn with_direction(kappa: Kappa, u: V3, raw: V3) -> Option<Frame> {
        let len = match kappa.regime() {
            Regime::Hyperboloid => mdot(raw, raw).max(0.0).sqrt(),
            _ => norm(raw),
        };
        if !(len > 0.0) || !len.is_finite() {
            return None;
        }
        let t = scale(raw, 1.0 / len);
        let n = match kappa.regime() {
            Regime::Plane => [-t[1], t[0], 0.0],
            Regime::Sphere => cross(u, t),
            Regime::Hyperboloid => {
                let c = cross(u, t);
                let n = [c[0], c[1], -c[2]];
                let l = mdot(n, n).max(0.0).sqrt();
                scale(n, 1.0 / l)
            }
        };
        Some(Frame {
            kappa,
            origin: u,
            t,
            n,
        })
    }

    /// Frame at the base point aligned with the first axis.
    fn at_base(kappa: Kappa) -> Frame {
        let origin = ModelPoint::base(kappa).unit();
        Self::with_direction(kappa, origin, [1.0, 0.0, 0.0]).expect("base frame")
    }

    fn point_at(&self, distance: f64, direction: f64) -> ModelPoint {
        let (sd, cd) = direction.sin_cos();
        let dir = axpy(cd, self.t, scale(self.n, sd));
        let s = distance * self.kappa.root();
        let u = match self.kappa.regime() {
            Regime::Plane => axpy(distance, dir, self.origin),
            Regime::Sphere => axpy(s.sin(), dir, scale(self.origin, s.cos())),
            Regime::Hyperboloid => axpy(s.sinh(), dir, scale(self.origin, s.cosh())),
        };
        ModelPoint::from_unit(self.kappa, u)
    }

    /// Polar coordinates `(distance, signed direction)` of `p` in this frame.
    fn polar(&self, p: &ModelPoint) -> (f64, f64) {
        let u = p.unit();
        let origin = self.origin;
        let (ct, cn) = match self.kappa.regime() {
            Regime::Plane => {
                let v = sub(u, origin);
                (dot(v, self.t), dot(v, self.n))
            }
            Regime::Sphere => {
                let v = axpy(-dot(origin, u), origin, u);
                (dot(v, self.t), dot(v, self.n))
            }
            Regime::Hyperboloid => {
                let v = axpy(mdot(origin, u), origin, u);
                (mdot(v, self.t), mdot(v, self.n))
            }
        };
        let r = unit_distance(self.kappa.regime(), origin, u) / self.kappa.root();
        (r, cn.atan2(ct))
    }
}

/// Interior angle `∠xoz` at `o`.
pub fn angle_at(x: &ModelPoint, o: &ModelPoint, z: &ModelPoint) -> Result<Angle> {
    let kappa = same_kappa(x, o)?;
    same_kappa(o, z)?;
    let d = diameter(kappa);
    let (dx, dz) = (dist(kappa, o, x), dist(kappa, o, z));
    if dx == 0.0 || dz == 0.0 {
        return Err(GeometryError::DegenerateVertex);
    }
    if dx >= d || dz >= d {
        return Err(GeometryError::TooLong(dx.max(dz), d));
    }
    Ok(raw_angle(kappa, x, o, z))
}

fn raw_angle(kappa: Kappa, x: &ModelPoint, o: &ModelPoint, z: &ModelPoint) -> Angle {
    let (ux, uo, uz) = (x.unit(), o.unit(), z.unit());
    let (sin_part, cos_part) = match kappa.regime() {
        Regime::Plane => {
            let (p, q) = (sub(ux, uo), sub(uz, uo));
            (p[0] * q[1] - p[1] * q[0], p[0] * q[0] + p[1] * q[1])
        }
        Regime::Sphere => (
            det(uo, ux, uz),
            dot(ux, uz) - dot(ux, uo) * dot(uz, uo),
        ),
        Regime::Hyperboloid => (
            det(uo, ux, uz),
            mdot(ux, uz) + mdot(ux, uo) * mdot(uz, uo),
        ),
    };
    Angle::new(sin_part.abs().atan2(cos_part))
}

/// The point `p` on `[x, z]` with `d(x, p) = t·d(x, z)`.
pub fn interpolate(x: &ModelPoint, z: &ModelPoint, t: f64) -> Result<ModelPoint> {
    let kappa = same_kappa(x, z)?;
    let d = dist(kappa, x, z);
    if d == 0.0 {
        return Ok(*x);
    }
    if d >= diameter(kappa) {
        return Err(GeometryError::TooLong(d, diameter(kappa)));
    }
    if t == 0.0 {
        return Ok(*x);
    }
    if t == 1.0 {
        return Ok(*z);
    }
    let (u, v) = (x.unit(), z.unit());
    let s = d * kappa.root();
    let w = match kappa.regime() {
        Regime::Plane => axpy(t, sub(v, u), u),
        Regime::Sphere => {
            let den = s.sin();
            axpy(
                ((1.0 - t) * s).sin() / den,
                u,
                scale(v, (t * s).sin() / den),
            )
        }
        Regime::Hyperboloid => {
            let den = s.sinh();
            axpy(
                ((1.0 - t) * s).sinh() / den,
                u,
                scale(v, (t * s).sinh() / den),
            )
        }
    };
    Ok(ModelPoint::from_unit(kappa, w))
}

/// `d(y, p)` for `p = interpolate(x, z, t)`, from the three side lengths only.
pub fn interp_distance(dxy: f64, dyz: f64, dxz: f64, t: f64, kappa: Kappa) -> Result<f64> {
    let d = diameter(kappa);
    if !(dxz > 0.0) || dxz >= d {
        return Err(GeometryError::Unrealizable {
            a: dxy,
            b: dyz,
            c: dxz,
        });
    }
    let tol = tolerance::scaled(dxy.max(dyz).max(dxz));
    let tri = [dxy + dyz - dxz, dxy + dxz - dyz, dyz + dxz - dxy];
    let perimeter_excess = match kappa.regime() {
        Regime::Sphere => dxy + dyz + dxz - 2.0 * d,
        _ => f64::NEG_INFINITY,
    };
    if tri.iter().any(|&v| v < -tol) || perimeter_excess > tol {
        return Err(GeometryError::Unrealizable {
            a: dxy,
            b: dyz,
            c: dxz,
        });
    }
    let k = kappa.root();
    Ok(match kappa.regime() {
        Regime::Plane => {
            let sq = (1.0 - t) * dxy * dxy + t * dyz * dyz - t * (1.0 - t) * dxz * dxz;
            sq.max(0.0).sqrt()
        }
        Regime::Hyperboloid => {
            let s = k * dxz;
            let ch = (((1.0 - t) * s).sinh() * (k * dxy).cosh()
                + (t * s).sinh() * (k * dyz).cosh())
                / s.sinh();
            ch.max(1.0).acosh() / k
        }
        Regime::Sphere => {
            let s = k * dxz;
            let c = (((1.0 - t) * s).sin() * (k * dxy).cos() + (t * s).sin() * (k * dyz).cos())
                / s.sin();
            c.clamp(-1.0, 1.0).acos() / k
        }
    })
}

/// Signed distance from `p` to the line `ℓ(a, b)`; positive on the Left.
pub fn signed_line_distance(a: &ModelPoint, b: &ModelPoint, p: &ModelPoint) -> Result<f64> {
    let kappa = same_kappa(a, b)?;
    same_kappa(a, p)?;
    let (ua, ub, up) = (a.unit(), b.unit(), p.unit());
    match kappa.regime() {
        Regime::Plane => {
            let e = sub(ub, ua);
            let len = (e[0] * e[0] + e[1] * e[1]).sqrt();
            if len == 0.0 {
                return Err(GeometryError::DegenerateSegment);
            }
            let q = sub(up, ua);
            Ok((e[0] * q[1] - e[1] * q[0]) / len)
        }
        Regime::Sphere => {
            let c = cross(ua, ub);
            let len = norm(c);
            if len == 0.0 {
                return Err(GeometryError::DegenerateSegment);
            }
            Ok((dot(c, up) / len).clamp(-1.0, 1.0).asin() / kappa.root())
        }
        Regime::Hyperboloid => {
            let c = cross(ua, ub);
            let len2 = c[0] * c[0] + c[1] * c[1] - c[2] * c[2];
            if !(len2 > 0.0) {
                return Err(GeometryError::DegenerateSegment);
            }
            Ok((dot(c, up) / len2.sqrt()).asinh() / kappa.root())
        }
    }
}

/// Side of the oriented line through `a` and `b` on which `p` lies.
pub fn side_of_line(a: &ModelPoint, b: &ModelPoint, p: &ModelPoint) -> Result<SideLabel> {
    let kappa = same_kappa(a, b)?;
    let dab = dist(kappa, a, b);
    if dab == 0.0 {
        return Err(GeometryError::DegenerateSegment);
    }
    if dab >= diameter(kappa) {
        return Err(GeometryError::TooLong(dab, diameter(kappa)));
    }
    let h = signed_line_distance(a, b, p)?;
    let scale = dab + dist(kappa, a, p);
    Ok(classify(h, scale))
}

fn classify(h: f64, scale: f64) -> SideLabel {
    if h.abs() <= tolerance::scaled(scale) {
        SideLabel::On
    } else if h > 0.0 {
        SideLabel::Left
    } else {
        SideLabel::Right
    }
}

/// Whether two points coincide up to the scaled tolerance.
pub fn coincident(p: &ModelPoint, q: &ModelPoint, scale: f64) -> bool {
    dist(p.kappa, p, q) <= tolerance::scaled(scale)
}

/// Membership `p ∈ [a, b]` up to tolerance, tested through the equality
/// case of the triangle inequality.
pub fn on_segment(a: &ModelPoint, b: &ModelPoint, p: &ModelPoint) -> bool {
    let k = a.kappa;
    let dab = dist(k, a, b);
    let excess = dist(k, a, p) + dist(k, p, b) - dab;
    excess <= tolerance::scaled(dab)
}

/// Whether the closed segments `[x, z]` and `[y, w]` meet.
///
/// Decided by the angle criterion for quadrilaterals: with all the relevant
/// vertices distinct, the segments meet iff `∠yxz + ∠zxw ≤ π`,
/// `∠yzx + ∠xzw ≤ π` and `y`, `w` are not strictly on the same side of
/// `ℓ(x, z)`. Coincident vertices are handled by direct membership tests.
pub fn segments_intersect(
    x: &ModelPoint,
    z: &ModelPoint,
    y: &ModelPoint,
    w: &ModelPoint,
) -> Result<bool> {
    segments_intersect_within(x, z, y, w, tolerance::eps())
}

/// [`segments_intersect`] with an explicit tolerance in place of the
/// global one.
pub fn segments_intersect_within(
    x: &ModelPoint,
    z: &ModelPoint,
    y: &ModelPoint,
    w: &ModelPoint,
    eps: f64,
) -> Result<bool> {
    let kappa = same_kappa(x, z)?;
    same_kappa(x, y)?;
    same_kappa(x, w)?;
    let d = |p: &ModelPoint, q: &ModelPoint| dist(kappa, p, q);
    let perimeter = d(x, y) + d(y, z) + d(z, w) + d(w, x);
    if kappa.regime() == Regime::Sphere && perimeter >= 2.0 * diameter(kappa) {
        return Err(GeometryError::PerimeterTooLarge(perimeter));
    }
    let tol = eps * (1.0 + perimeter);
    let same = |p: &ModelPoint, q: &ModelPoint| d(p, q) <= tol;
    let between = |a: &ModelPoint, b: &ModelPoint, p: &ModelPoint| d(a, p) + d(p, b) - d(a, b) <= tol;

    if same(x, z) {
        return Ok(between(y, w, x));
    }
    if same(y, w) {
        return Ok(between(x, z, y));
    }
    if same(x, y) || same(x, w) || same(z, y) || same(z, w) {
        return Ok(true);
    }
    let angle_tol = eps * (1.0 + PI);
    let at_x = raw_angle(kappa, y, x, z).0 + raw_angle(kappa, z, x, w).0;
    let at_z = raw_angle(kappa, y, z, x).0 + raw_angle(kappa, x, z, w).0;
    if at_x > PI + angle_tol || at_z > PI + angle_tol {
        return Ok(false);
    }
    let side = |p: &ModelPoint| -> Result<SideLabel> {
        let h = signed_line_distance(x, z, p)?;
        Ok(if h.abs() <= tol {
            SideLabel::On
        } else if h > 0.0 {
            SideLabel::Left
        } else {
            SideLabel::Right
        })
    };
    let (sy, sw) = (side(y)?, side(w)?);
    Ok(!(sy == sw && sy != SideLabel::On))
}

/// A point at distances `da` from `a` and `db` from `b`, on the requested
/// side of `ℓ(a, b)`.
pub fn place_point(
    a: &ModelPoint,
    b: &ModelPoint,
    da: f64,
    db: f64,
    side: SideLabel,
) -> Result<ModelPoint> {
    let kappa = same_kappa(a, b)?;
    let dab = dist(kappa, a, b);
    let tol = tolerance::scaled(dab.max(da).max(db));
    if dab <= tol {
        return Err(GeometryError::DegenerateSegment);
    }
    if da <= tol {
        if (db - dab).abs() > tol {
            return Err(GeometryError::Unrealizable {
                a: dab,
                b: da,
                c: db,
            });
        }
        return Ok(*a);
    }
    let theta = law_of_cosines_angle(dab, da, db, kappa)?.0;
    let degenerate = theta <= tol || theta >= PI - tol;
    let signed = match side {
        SideLabel::Left => theta,
        SideLabel::Right => -theta,
        SideLabel::On if degenerate => {
            if theta < 0.5 * PI {
                0.0
            } else {
                PI
            }
        }
        SideLabel::On => return Err(GeometryError::InvalidSide(side)),
    };
    let frame = Frame::towards(a, b).ok_or(GeometryError::DegenerateSegment)?;
    Ok(frame.point_at(da, signed))
}

/// The point at `distance` from `o` along the ray through `through`.
pub fn along_ray(o: &ModelPoint, through: &ModelPoint, distance: f64) -> Result<ModelPoint> {
    same_kappa(o, through)?;
    let frame = Frame::towards(o, through).ok_or(GeometryError::DegenerateSegment)?;
    Ok(frame.point_at(distance, 0.0))
}

/// Re-expresses `points` so that `points[0]` is the base point, the first
/// point distinct from it lies on the positive first axis, and the first
/// point off that line lies on the Left. Pairwise distances are preserved.
pub fn normalize_placement(points: &[ModelPoint]) -> Vec<ModelPoint> {
    let Some(first) = points.first() else {
        return Vec::new();
    };
    let kappa = first.kappa;
    let scale: f64 = points
        .iter()
        .map(|p| dist(kappa, first, p))
        .fold(0.0, f64::max);
    let tol = tolerance::scaled(scale);
    let reference = points.iter().find(|p| dist(kappa, first, p) > tol);
    let base = Frame::at_base(kappa);
    let Some(reference) = reference else {
        return vec![ModelPoint::base(kappa); points.len()];
    };
    let frame = Frame::towards(first, reference).expect("distinct reference point");
    let polar: Vec<(f64, f64)> = points.iter().map(|p| frame.polar(p)).collect();
    let flip = polar
        .iter()
        .map(|&(r, phi)| r * phi.sin())
        .find(|h| h.abs() > tol)
        .is_some_and(|h| h < 0.0);
    polar
        .into_iter()
        .map(|(r, phi)| {
            if r <= 0.0 {
                ModelPoint::base(kappa)
            } else {
                base.point_at(r, if flip { -phi } else { phi })
            }
        })
        .collect()
}
