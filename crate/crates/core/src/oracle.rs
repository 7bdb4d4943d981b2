//! Brute-force and search baselines for the analytic shortcuts elsewhere in
//! the crate, plus randomized drivers for the comparison lemmas.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::conditions::boxtimes_value;
use crate::gluing::{self, GluePoint, GluedSpace, Seam};
use crate::metric::sample_points_in_disk;
use crate::model::{self, Kappa, ModelPoint, Regime, SideLabel};

/// Largest constraint violation accepted as feasible.
pub const FEASIBILITY_TOL: f64 = 1e-7;
/// Random starts of the feasibility search, on top of the structured ones.
pub const RANDOM_STARTS: usize = 32;
/// Tolerance on lemma conclusions.
pub const LEMMA_TOL: f64 = 1e-8;
/// Attempts per trial before a lemma trial is skipped.
pub const REJECTION_CAP: usize = 1_000_000;

const MAX_SWEEPS: usize = 80;
const GOLDEN_STEPS: usize = 18;
const MIN_STEP: f64 = 1e-10;
const MAX_REPORTED_FAILURES: usize = 10;

/// Minimum of [`boxtimes_value`] over a `resolution × resolution` grid of
/// `[0, 1]²`, corners included.
#[allow(clippy::too_many_arguments)]
pub fn boxtimes_grid_min(a: f64, b: f64, c: f64, e: f64, f: f64, g: f64, resolution: usize) -> f64 {
    let r = resolution.max(2);
    let step = 1.0 / (r - 1) as f64;
    let mut best = f64::INFINITY;
    for i in 0..r {
        let s = i as f64 * step;
        for j in 0..r {
            best = best.min(boxtimes_value(a, b, c, e, f, g, s, j as f64 * step));
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Four-point feasibility search

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityResult {
    pub feasible: bool,
    /// Best configuration `(g₀, g₁, g₂, g₃)` found.
    pub points: [ModelPoint; 4],
    /// Its largest constraint violation, never negative.
    pub violation: f64,
}

/// Free parameters: `r₁`, then `(r₂, φ₂)` and `(r₃, φ₃)`.
type Params = [f64; 5];

struct Problem {
    kappa: Kappa,
    lengths: [f64; 6],
    hi: Params,
}

impl Problem {
    fn points(&self, x: &Params) -> [ModelPoint; 4] {
        let k = self.kappa;
        [
            ModelPoint::base(k),
            ModelPoint::from_polar(k, x[0], 0.0),
            ModelPoint::from_polar(k, x[1], x[2]),
            ModelPoint::from_polar(k, x[3], x[4]),
        ]
    }

    fn violations(&self, p: &[ModelPoint; 4]) -> [f64; 6] {
        let d = |i: usize, j: usize| model::distance(&p[i], &p[j]).expect("same curvature");
        let [a, b, c, e, f, g] = self.lengths;
        [
            d(0, 1) - a,
            d(1, 2) - b,
            d(2, 3) - c,
            d(3, 0) - e,
            f - d(0, 2),
            g - d(1, 3),
        ]
    }

    fn max_violation(&self, p: &[ModelPoint; 4]) -> f64 {
        self.violations(p).into_iter().fold(0.0, f64::max)
    }

    fn penalty(&self, x: &Params) -> f64 {
        self.violations(&self.points(x))
            .into_iter()
            .map(|v| v.max(0.0).powi(2))
            .sum()
    }

    fn bounded(&self, i: usize) -> bool {
        matches!(i, 0 | 1 | 3)
    }

    fn clamp(&self, mut x: Params) -> Params {
        for i in 0..5 {
            if self.bounded(i) {
                x[i] = x[i].clamp(0.0, self.hi[i]);
            }
        }
        x
    }

    fn params_of(&self, p: &[ModelPoint; 4]) -> Params {
        let base = ModelPoint::base(self.kappa);
        let polar = |q: &ModelPoint| {
            let c = q.coords();
            (model::distance(&base, q).expect("same curvature"), c[1].atan2(c[0]))
        };
        let (r1, _) = polar(&p[1]);
        let (r2, t2) = polar(&p[2]);
        let (r3, t3) = polar(&p[3]);
        self.clamp([r1, r2, t2, r3, t3])
    }

    /// Golden-section coordinate sweeps with a pattern move after each
    /// sweep; the step shrinks whenever a sweep stalls.
    fn descend(&self, mut x: Params) -> (Params, f64) {
        let mut fx = self.penalty(&x);
        let mut h = [
            0.25 * self.hi[0].max(MIN_STEP),
            0.25 * self.hi[1].max(MIN_STEP),
            PI / 2.0,
            0.25 * self.hi[3].max(MIN_STEP),
            PI / 2.0,
        ];
        for _ in 0..MAX_SWEEPS {
            if fx == 0.0 {
                break;
            }
            let (start, f_start) = (x, fx);
            for i in 0..5 {
                let (mut lo, mut hi) = (x[i] - h[i], x[i] + h[i]);
                if self.bounded(i) {
                    lo = lo.max(0.0);
                    hi = hi.min(self.hi[i]);
                }
                let at = |t: f64| {
                    let mut y = x;
                    y[i] = t;
                    self.penalty(&y)
                };
                let (t, ft) = golden(at, lo, hi);
                if ft < fx {
                    x[i] = t;
                    fx = ft;
                }
            }
            if fx < f_start {
                let mut jump = x;
                for i in 0..5 {
                    jump[i] += x[i] - start[i];
                }
                let jump = self.clamp(jump);
                let fj = self.penalty(&jump);
                if fj < fx {
                    x = jump;
                    fx = fj;
                }
            }
            if f_start - fx <= 1e-3 * f_start {
                for s in h.iter_mut() {
                    *s *= 0.25;
                }
                if h.iter().all(|&s| s < MIN_STEP) {
                    break;
                }
            }
        }
        (x, fx)
    }

    /// Hinge configurations realising the edges exactly with one diagonal
    /// fixed, the other vertex pair on opposite sides.
    fn structured_starts(&self) -> Vec<[ModelPoint; 4]> {
        let k = self.kappa;
        let [a, b, c, e, f, g] = self.lengths;
        let x = ModelPoint::base(k);
        let y = ModelPoint::from_polar(k, a, 0.0);
        let mut out = Vec::new();
        for side in [SideLabel::Left, SideLabel::Right] {
            // diagonal g₀g₂ at length f
            if let Ok(z) = model::place_point(&x, &y, f, b, side) {
                let across = model::side_of_line(&x, &z, &y).map(SideLabel::opposite);
                for s in [across.unwrap_or(SideLabel::Left), SideLabel::Left, SideLabel::Right] {
                    if let Ok(w) = model::place_point(&x, &z, e, c, s) {
                        out.push([x, y, z, w]);
                    }
                }
            }
            // diagonal g₁g₃ at length g
            if let Ok(w) = model::place_point(&x, &y, e, g, side) {
                let across = model::side_of_line(&y, &w, &x).map(SideLabel::opposite);
                for s in [across.unwrap_or(SideLabel::Left), SideLabel::Left, SideLabel::Right] {
                    if let Ok(z) = model::place_point(&y, &w, b, c, s) {
                        out.push([x, y, z, w]);
                    }
                }
            }
        }
        out
    }
}

fn golden(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const R: f64 = 0.618_033_988_749_894_8;
    let mut c = hi - R * (hi - lo);
    let mut d = lo + R * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_STEPS {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - R * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + R * (hi - lo);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Searches `M²_κ` for four points with `d(g₀,g₁) ≤ a`, `d(g₁,g₂) ≤ b`,
/// `d(g₂,g₃) ≤ c`, `d(g₃,g₀) ≤ e`, `d(g₀,g₂) ≥ f` and `d(g₁,g₃) ≥ g`.
///
/// `g₀` is the base point and `g₁` lies on the positive first axis. The
/// search starts from the hinge configurations for both diagonals and from
/// [`RANDOM_STARTS`] seeded random configurations, and runs a derivative-free
/// descent on the sum of squared violations from each.
#[allow(clippy::too_many_arguments)]
pub fn cycl4_feasibility_numeric(
    a: f64,
    b: f64,
    c: f64,
    e: f64,
    f: f64,
    g: f64,
    kappa: Kappa,
    seed: u64,
) -> FeasibilityResult {
    let mut reach = (a + b).min(c + e).max(0.0);
    if kappa.regime() == Regime::Sphere {
        reach = reach.min(kappa.diameter() * (1.0 - 1e-12));
    }
    let problem = Problem {
        kappa,
        lengths: [a, b, c, e, f, g],
        hi: [a.max(0.0), reach, 0.0, e.max(0.0), 0.0],
    };
    let mut best: Option<([ModelPoint; 4], f64)> = None;
    let mut consider = |pts: [ModelPoint; 4]| -> bool {
        let v = problem.max_violation(&pts);
        if best.as_ref().map_or(true, |(_, bv)| v < *bv) {
            best = Some((pts, v));
        }
        v <= FEASIBILITY_TOL
    };

    let mut starts: Vec<Params> = Vec::new();
    for pts in problem.structured_starts() {
        if consider(pts) {
            return finish(best);
        }
        starts.push(problem.params_of(&pts));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_STARTS {
        starts.push([
            rng.gen::<f64>() * problem.hi[0],
            rng.gen::<f64>() * problem.hi[1],
            rng.gen_range(-PI..PI),
            rng.gen::<f64>() * problem.hi[3],
            rng.gen_range(-PI..PI),
        ]);
    }
    for x in starts {
        let (x, _) = problem.descend(x);
        if consider(problem.points(&x)) {
            break;
        }
    }
    finish(best)
}

fn finish(best: Option<([ModelPoint; 4], f64)>) -> FeasibilityResult {
    let (points, violation) = best.expect("at least one start");
    FeasibilityResult {
        feasible: violation <= FEASIBILITY_TOL,
        points,
        violation,
    }
}

// ---------------------------------------------------------------------------
// Dense seam sampling

/// Minimum over `samples` equispaced seam points of the path length from
/// `a` through the seam to `b`. Pairs within one piece get their direct
/// distance.
pub fn seam_dense_min(g: &GluedSpace, a: &GluePoint, b: &GluePoint, samples: usize) -> f64 {
    use GluePoint::*;
    let d = |p: &ModelPoint, q: &ModelPoint| model::distance(p, q).expect("same curvature");
    match (a, b, g.seam()) {
        (S(p), S(q), _) | (T(p), T(q), _) => d(p, q),
        (Interval(x), Interval(y), _) => (x - y).abs(),
        (S(p), Interval(x), Seam::Point(u)) | (Interval(x), S(p), Seam::Point(u)) => d(p, &u) + x,
        (S(p), T(q), Seam::Point(u)) | (T(q), S(p), Seam::Point(u)) => d(p, &u) + d(&u, q),
        (S(p), T(q), Seam::Segment(u, v)) | (T(q), S(p), Seam::Segment(u, v)) => {
            let n = samples.max(2);
            (0..n)
                .map(|k| {
                    let z = model::interpolate(&u, &v, k as f64 / (n - 1) as f64)
                        .expect("seam shorter than the diameter");
                    d(p, &z) + d(&z, q)
                })
                .fold(f64::INFINITY, f64::min)
        }
        _ => f64::NAN,
    }
}

// ---------------------------------------------------------------------------
// Lemma suites

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteKind {
    /// Equal edges and a longer `yw` diagonal force a longer `xz` diagonal,
    /// given a reflex angle at `z`.
    AlexandrovLarger,
    /// Equal edges, crossing model diagonals and a longer `xz` diagonal
    /// force a shorter `yw` diagonal.
    AlexandrovSmaller,
    /// Under the same hypotheses, with `y` and `w` not on one side of
    /// `ℓ(x, z)`, the diagonals cross.
    Crossing,
    /// A quadruple of the model plane dominated by a model quadrilateral
    /// has `d(y, w)` at most any path `y′ → p → w′` through `[x′, z′]`.
    QuadrupleP,
    /// Subadditivity, the full-angle identity and diagonal splitting of
    /// angles at a point.
    AngleCalculus,
}

impl SuiteKind {
    pub const ALL: [SuiteKind; 5] = [
        SuiteKind::AlexandrovLarger,
        SuiteKind::AlexandrovSmaller,
        SuiteKind::Crossing,
        SuiteKind::QuadrupleP,
        SuiteKind::AngleCalculus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteKind::AlexandrovLarger => "alexandrov_larger",
            SuiteKind::AlexandrovSmaller => "alexandrov_smaller",
            SuiteKind::Crossing => "crossing",
            SuiteKind::QuadrupleP => "quadruple_p",
            SuiteKind::AngleCalculus => "angle_calculus",
        }
    }
}

impl fmt::Display for SuiteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuiteKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SuiteKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

/// A trial whose conclusion failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteFailure {
    pub trial: usize,
    pub check: String,
    /// Embedded coordinates of the configuration, in the order the check
    /// names them.
    pub points: Vec<[f64; 3]>,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub kind: SuiteKind,
    pub kappa: f64,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    /// Trials for which no configuration satisfying the hypotheses was
    /// found within the rejection cap.
    pub skipped: usize,
    /// Smallest conclusion slack seen; negative values are violations.
    pub worst_margin: f64,
    /// The first few failures.
    pub failures: Vec<SuiteFailure>,
}

impl SuiteReport {
    pub fn clean(&self) -> bool {
        self.failed == 0
    }
}

/// One conclusion evaluated on one configuration.
struct Outcome {
    check: &'static str,
    margin: f64,
    tol: f64,
    points: Vec<ModelPoint>,
}

/// Runs `trials` randomized configurations satisfying the hypotheses of the
/// chosen lemma and checks its conclusion within [`LEMMA_TOL`] (scaled by
/// the configuration size). Trial `i` draws from stream `i` of a generator
/// seeded with `seed`, so trials are independent of each other.
pub fn lemma_property_suite(kind: SuiteKind, kappa: Kappa, trials: usize, seed: u64) -> SuiteReport {
    let mut report = SuiteReport {
        kind,
        kappa: kappa.value(),
        trials,
        passed: 0,
        failed: 0,
        skipped: 0,
        worst_margin: f64::INFINITY,
        failures: Vec::new(),
    };
    let gen = Generator::new(kappa);
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        let degenerate = trial % 10 == 9;
        let outcomes = (0..REJECTION_CAP).find_map(|_| gen.attempt(kind, trial, degenerate, &mut rng));
        let Some(outcomes) = outcomes else {
            report.skipped += 1;
            continue;
        };
        let mut ok = true;
        for o in outcomes {
            report.worst_margin = report.worst_margin.min(o.margin);
            if o.margin < -o.tol {
                ok = false;
                if report.failures.len() < MAX_REPORTED_FAILURES {
                    report.failures.push(SuiteFailure {
                        trial,
                        check: o.check.to_string(),
                        points: o.points.iter().map(ModelPoint::coords).collect(),
                        margin: o.margin,
                    });
                }
            }
        }
        if ok {
            report.passed += 1;
        } else {
            report.failed += 1;
        }
    }
    report
}

fn tol_for(scale: f64) -> f64 {
    LEMMA_TOL * (1.0 + scale)
}

fn max_pairwise(points: &[ModelPoint]) -> f64 {
    let mut m: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            m = m.max(model::distance(p, q).expect("same curvature"));
        }
    }
    m
}

struct Generator {
    kappa: Kappa,
    radius: f64,
    /// `2 D_κ`, or infinity.
    perimeter_cap: f64,
}

impl Generator {
    fn new(kappa: Kappa) -> Self {
        let radius = match kappa.regime() {
            Regime::Plane => 1.0,
            Regime::Hyperboloid => 2.0 * kappa.radius(),
            Regime::Sphere => 0.45 * kappa.diameter(),
        };
        Generator {
            kappa,
            radius,
            perimeter_cap: 2.0 * kappa.diameter(),
        }
    }

    fn d(&self, p: &ModelPoint, q: &ModelPoint) -> f64 {
        model::distance(p, q).expect("same curvature")
    }

    fn perimeter(&self, q: &[ModelPoint; 4]) -> f64 {
        (0..4).map(|i| self.d(&q[i], &q[(i + 1) % 4])).sum()
    }

    /// Four random points, with two of them merged when `degenerate`.
    fn quadruple<R: Rng>(&self, degenerate: bool, rng: &mut R) -> [ModelPoint; 4] {
        let pts = sample_points_in_disk(4, self.kappa, self.radius, rng);
        let mut q = [pts[0], pts[1], pts[2], pts[3]];
        if degenerate {
            let i = rng.gen_range(0..4);
            let mut j = rng.gen_range(0..3);
            if j >= i {
                j += 1;
            }
            q[j] = q[i];
        }
        q
    }

    /// Rebuilds a quadrilateral with edges `(a, b, c, e)` around a diagonal
    /// of the given length: `p₀ = base`, `p₂` on the first axis, `p₁` to
    /// the Left and `p₃` on `side`. Returns `None` when not realisable.
    fn hinge_pair(&self, a: f64, b: f64, c: f64, e: f64, diag: f64, side: SideLabel, turn: f64) -> Option<[ModelPoint; 4]> {
        let k = self.kappa;
        let p0 = ModelPoint::base(k);
        let p2 = ModelPoint::from_polar(k, diag, 0.0);
        if diag <= tol_for(a.max(b).max(c).max(e)) {
            // p₀ = p₂: the other two points are free on circles about it
            return Some([p0, ModelPoint::from_polar(k, a, turn), p0, ModelPoint::from_polar(k, e, -turn)]);
        }
        let p1 = model::place_point(&p0, &p2, a, b, SideLabel::Left).ok()?;
        let p3 = model::place_point(&p0, &p2, e, c, side).ok()?;
        Some([p0, p1, p2, p3])
    }

    fn attempt<R: Rng>(&self, kind: SuiteKind, trial: usize, degenerate: bool, rng: &mut R) -> Option<Vec<Outcome>> {
        match kind {
            SuiteKind::AlexandrovLarger => self.larger(degenerate, rng),
            SuiteKind::AlexandrovSmaller => self.smaller(degenerate, false, rng),
            SuiteKind::Crossing => self.smaller(degenerate, true, rng),
            SuiteKind::QuadrupleP => self.quadruple_p(degenerate, rng),
            SuiteKind::AngleCalculus => self.angles(trial, degenerate, rng),
        }
    }

    fn larger<R: Rng>(&self, degenerate: bool, rng: &mut R) -> Option<Vec<Outcome>> {
        let q = self.quadruple(degenerate, rng);
        let [x, y, z, w] = q;
        if self.perimeter(&q) >= self.perimeter_cap {
            return None;
        }
        let scale = max_pairwise(&q);
        let same = |p: &ModelPoint, q: &ModelPoint| model::coincident(p, q, scale);
        let exempt = same(&x, &y) || same(&x, &z) || same(&x, &w) || same(&y, &z) || same(&z, &w);
        if !exempt {
            let reflex = model::angle_at(&y, &z, &x).ok()?.radians() + model::angle_at(&x, &z, &w).ok()?.radians();
            if reflex < PI {
                return None;
            }
            let sy = model::side_of_line(&x, &z, &y).ok()?;
            let sw = model::side_of_line(&x, &z, &w).ok()?;
            if sy == sw && sy != SideLabel::On {
                return None;
            }
        }
        let (a, b, c, e) = (self.d(&x, &y), self.d(&y, &z), self.d(&z, &w), self.d(&w, &x));
        let g = self.d(&y, &w);
        let g_max = (a + e).min(b + c);
        let g_new = g + rng.gen::<f64>() * (g_max - g).max(0.0);
        let side = if rng.gen() { SideLabel::Left } else { SideLabel::Right };
        // rebuild around y'w': p₀ = y', p₁ = x', p₂ = w', p₃ = z'
        let turn = rng.gen_range(-PI..PI);
        let [y2, x2, w2, z2] = self.hinge_pair(a, e, c, b, g_new, side, turn)?;
        let margin = self.d(&x2, &z2) - self.d(&x, &z);
        Some(vec![Outcome {
            check: "xz_not_longer",
            margin,
            tol: tol_for(scale.max(g_max)),
            points: vec![x, y, z, w, x2, y2, z2, w2],
        }])
    }

    fn smaller<R: Rng>(&self, degenerate: bool, crossing: bool, rng: &mut R) -> Option<Vec<Outcome>> {
        let q = self.quadruple(degenerate, rng);
        let [x2, y2, z2, w2] = q;
        if self.perimeter(&q) >= self.perimeter_cap {
            return None;
        }
        if !model::segments_intersect(&x2, &z2, &y2, &w2).ok()? {
            return None;
        }
        let (a, b, c, e) = (self.d(&x2, &y2), self.d(&y2, &z2), self.d(&z2, &w2), self.d(&w2, &x2));
        let f = self.d(&x2, &z2);
        let f_max = (a + b).min(c + e);
        let f_new = f + rng.gen::<f64>() * (f_max - f).max(0.0);
        let scale = max_pairwise(&q).max(f_max);
        let side = if crossing || rng.gen() { SideLabel::Right } else { SideLabel::Left };
        let turn = rng.gen_range(-PI..PI);
        let [x, y, z, w] = self.hinge_pair(a, b, c, e, f_new, side, turn)?;
        let points = vec![x, y, z, w, x2, y2, z2, w2];
        if !crossing {
            return Some(vec![Outcome {
                check: "yw_not_longer",
                margin: self.d(&y2, &w2) - self.d(&y, &w),
                tol: tol_for(scale),
                points,
            }]);
        }
        if model::coincident(&x, &z, scale) {
            return None;
        }
        let sy = model::side_of_line(&x, &z, &y).ok()?;
        let sw = model::side_of_line(&x, &z, &w).ok()?;
        if sy == sw && sy != SideLabel::On {
            return None;
        }
        let meets = model::segments_intersect_within(&x, &z, &y, &w, LEMMA_TOL).ok()?;
        let tol = tol_for(scale);
        // on failure, report the detour of the shortest y–w path through [x, z]
        let margin = if meets {
            0.0
        } else {
            -(gluing::seam_min(&y, &w, &x, &z) - self.d(&y, &w)).max(2.0 * tol)
        };
        Some(vec![Outcome {
            check: "diagonals_cross",
            margin,
            tol,
            points,
        }])
    }

    fn quadruple_p<R: Rng>(&self, degenerate: bool, rng: &mut R) -> Option<Vec<Outcome>> {
        let q = self.quadruple(degenerate, rng);
        let [x2, y2, z2, w2] = q;
        if self.perimeter(&q) >= self.perimeter_cap {
            return None;
        }
        let (a2, b2, c2, e2) = (self.d(&x2, &y2), self.d(&y2, &z2), self.d(&z2, &w2), self.d(&w2, &x2));
        let f2 = self.d(&x2, &z2);
        let f_max = (a2 + b2).min(c2 + e2);
        let f = f2 + rng.gen::<f64>() * (f_max - f2).max(0.0);
        // shrink edges while keeping both side triangles realisable
        let shrink = |p: f64, q: f64, rng: &mut R| -> Option<(f64, f64)> {
            for _ in 0..64 {
                let (u, v) = (p * rng.gen::<f64>().sqrt(), q * rng.gen::<f64>().sqrt());
                if u + v >= f && (u - v).abs() <= f {
                    return Some((u, v));
                }
            }
            (p + q >= f).then_some((p, q))
        };
        let (a, b) = if degenerate { (a2, b2) } else { shrink(a2, b2, rng)? };
        let (e, c) = shrink(e2, c2, rng)?;
        let side = if rng.gen() { SideLabel::Left } else { SideLabel::Right };
        let turn = rng.gen_range(-PI..PI);
        let [x, y, z, w] = self.hinge_pair(a, b, c, e, f, side, turn)?;
        let scale = max_pairwise(&q).max(f_max);
        let dyw = self.d(&y, &w);
        let mut best = gluing::seam_min(&y2, &w2, &x2, &z2);
        for k in 0..=16 {
            let p = model::interpolate(&x2, &z2, k as f64 / 16.0).ok()?;
            best = best.min(self.d(&y2, &p) + self.d(&p, &w2));
        }
        Some(vec![Outcome {
            check: "yw_below_paths_through_xz",
            margin: best - dyw,
            tol: tol_for(scale),
            points: vec![x, y, z, w, x2, y2, z2, w2],
        }])
    }

    fn angles<R: Rng>(&self, trial: usize, degenerate: bool, rng: &mut R) -> Option<Vec<Outcome>> {
        let k = self.kappa;
        let pts = sample_points_in_disk(4, k, self.radius, rng);
        let (o, x, mut y, mut z) = (pts[0], pts[1], pts[2], pts[3]);
        let diam = k.diameter();
        let away = |p: &ModelPoint| {
            let r = self.d(&o, p);
            r > 1e-6 && r < diam
        };
        if degenerate {
            // y on the ray o→x or opposite it
            let r = self.d(&o, &y);
            let dir = model::along_ray(&o, &x, r).ok()?;
            y = if rng.gen() { dir } else { model::interpolate(&dir, &o, 2.0).ok().filter(|_| 2.0 * r < diam)? };
        }
        let ang = |p: &ModelPoint, q: &ModelPoint| -> Option<f64> { Some(model::angle_at(p, &o, q).ok()?.radians()) };
        let scale = 1.0;
        match trial % 3 {
            0 => {
                if !(away(&x) && away(&y) && away(&z)) {
                    return None;
                }
                let sum = ang(&x, &y)? + ang(&y, &z)?;
                Some(vec![Outcome {
                    check: "angle_subadditive",
                    margin: sum - ang(&x, &z)?,
                    tol: tol_for(scale),
                    points: vec![o, x, y, z],
                }])
            }
            1 => {
                if !(away(&x) && away(&y) && away(&z)) {
                    return None;
                }
                if ang(&y, &x)? + ang(&x, &z)? < PI {
                    return None;
                }
                let sy = model::side_of_line(&o, &x, &y).ok()?;
                let sz = model::side_of_line(&o, &x, &z).ok()?;
                if sy == sz && sy != SideLabel::On {
                    return None;
                }
                let total = ang(&x, &y)? + ang(&y, &z)? + ang(&z, &x)?;
                Some(vec![Outcome {
                    check: "full_angle",
                    margin: -(total - 2.0 * PI).abs(),
                    tol: tol_for(scale),
                    points: vec![o, x, y, z],
                }])
            }
            _ => {
                // y beyond a point p of [x, z] on the ray from o
                if !(away(&x) && away(&z)) || self.d(&x, &z) >= diam {
                    return None;
                }
                let p = model::interpolate(&x, &z, rng.gen()).ok()?;
                let r0 = self.d(&o, &p);
                if r0 <= 1e-6 {
                    return None;
                }
                let r = r0 + rng.gen::<f64>() * (self.radius - r0).max(0.0);
                if r >= diam {
                    return None;
                }
                y = model::along_ray(&o, &p, r).ok()?;
                if degenerate {
                    z = p;
                }
                if !(away(&y) && away(&z)) {
                    return None;
                }
                let (xy, yz, xz) = (ang(&x, &y)?, ang(&y, &z)?, ang(&x, &z)?);
                Some(vec![
                    Outcome {
                        check: "diagonal_split",
                        margin: -(xy + yz - xz).abs(),
                        tol: tol_for(scale),
                        points: vec![o, x, y, z],
                    },
                    Outcome {
                        check: "diagonal_at_most_straight",
                        margin: PI - (xy + yz),
                        tol: tol_for(scale),
                        points: vec![o, x, y, z],
                    },
                ])
            }
        }
    }
}
