//! Decision procedures for the metric conditions: Wirtinger-type
//! inequalities, the ⊠-inequalities, the κ-quadruple condition and its
//! 4-point relatives, and verification of comparison polygons.
//!
//! Every report carries a signed margin: the slack of the tightest
//! inequality examined. Negative margins are violations; a check fails when
//! its margin drops below `−eps·(1 + scale)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{perimeter, CyclicTuple, FiniteMetric, MetricError};
use crate::model::{self, Kappa, ModelPoint, Regime, SideLabel};
use crate::tolerance::{self, BOUNDARY_BAND};

/// Default number of map evaluations `wir_check` will attempt.
pub const WIR_BUDGET: u64 = 10_000_000;

/// Multiple of `eps` used when verifying a comparison polygon.
pub const VERIFY_FACTOR: f64 = 10.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConditionError {
    #[error("tuple of length {0} is too short; at least 4 entries are needed")]
    TupleTooShort(usize),
    #[error("j = {j} is outside [2, {max}]")]
    JOutOfRange { j: usize, max: usize },
    #[error("enumeration needs {needed} evaluations, above the budget of {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("comparison map has {got} points but the tuple has {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("points {x} and {z} coincide")]
    CoincidentEndpoints { x: usize, z: usize },
    #[error("point {y} is not between {x} and {z}: alignment defect {defect}")]
    NotAligned {
        x: usize,
        y: usize,
        z: usize,
        defect: f64,
    },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("comparison map curvature {got} does not match {expected}")]
    KappaMismatch { expected: f64, got: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Exempt,
}

/// The case that decided a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub indices: Vec<usize>,
    pub params: BTreeMap<String, f64>,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    pub verdict: Verdict,
    /// Present on failure; on success, the tightest case examined (if any).
    pub witness: Option<Witness>,
    /// Worst signed margin over everything examined.
    pub margin: f64,
    /// Whether the worst margin lies within the boundary band.
    pub boundary: bool,
    /// Number of cases examined.
    pub evaluated: u64,
    /// For checks implemented through an equivalent condition, which one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub via: Option<String>,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

/// Running minimum of margins with the first-seen witness on ties.
struct Worst {
    margin: f64,
    witness: Option<Witness>,
    evaluated: u64,
}

impl Worst {
    fn new() -> Self {
        Worst {
            margin: f64::INFINITY,
            witness: None,
            evaluated: 0,
        }
    }

    fn offer(&mut self, margin: f64, witness: impl FnOnce() -> Witness) {
        self.evaluated += 1;
        if margin < self.margin {
            self.margin = margin;
            self.witness = Some(witness());
        }
    }

    fn count(&mut self) {
        self.evaluated += 1;
    }

    fn into_report(self, condition: &str, kappa: Option<Kappa>, scale: f64) -> ConditionReport {
        let cut = tolerance::scaled(scale);
        let verdict = if self.margin < -cut {
            Verdict::Fail
        } else {
            Verdict::Pass
        };
        let boundary = self.margin.is_finite() && self.margin.abs() <= BOUNDARY_BAND * (1.0 + scale);
        ConditionReport {
            condition: condition.to_string(),
            kappa: kappa.map(Kappa::value),
            verdict,
            witness: self.witness,
            margin: self.margin,
            boundary,
            evaluated: self.evaluated,
            via: None,
        }
    }
}

fn params<const N: usize>(pairs: [(&str, f64); N]) -> BTreeMap<String, f64> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

// ---------------------------------------------------------------------------
// Wirtinger-type inequalities

/// `sin²(jπ/n) Σ d(f(i), f(i+1))² − sin²(π/n) Σ d(f(i), f(i+j))²`.
pub fn wir_value(m: &FiniteMetric, t: &CyclicTuple, j: usize) -> Result<f64, ConditionError> {
    let n = t.len();
    if n < 4 {
        return Err(ConditionError::TupleTooShort(n));
    }
    if j < 2 || j > n - 2 {
        return Err(ConditionError::JOutOfRange { j, max: n - 2 });
    }
    Ok(wir_raw(m, t.indices(), j))
}

fn wir_raw(m: &FiniteMetric, f: &[usize], j: usize) -> f64 {
    let n = f.len();
    let (mut edges, mut chords) = (0.0, 0.0);
    for i in 0..n {
        let e = m.get(f[i], f[(i + 1) % n]);
        let c = m.get(f[i], f[(i + j) % n]);
        edges += e * e;
        chords += c * c;
    }
    let sj = (j as f64 * PI / n as f64).sin();
    let s1 = (PI / n as f64).sin();
    sj * sj * edges - s1 * s1 * chords
}

/// Which maps `ℤ/nℤ → X` `wir_check` enumerates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WirMode {
    InjectiveTuples,
    AllMaps,
}

/// Checks every Wir_n inequality over the enumerated maps.
pub fn wir_check(
    m: &FiniteMetric,
    n: usize,
    mode: WirMode,
    budget: u64,
) -> Result<ConditionReport, ConditionError> {
    if n < 4 {
        return Err(ConditionError::TupleTooShort(n));
    }
    let size = m.len() as u64;
    let maps = match mode {
        WirMode::AllMaps => (0..n).try_fold(1u64, |acc, _| acc.checked_mul(size)),
        WirMode::InjectiveTuples => {
            (0..n as u64).try_fold(1u64, |acc, k| acc.checked_mul(size.saturating_sub(k)))
        }
    };
    let needed = maps.and_then(|v| v.checked_mul((n - 3) as u64)).unwrap_or(u64::MAX);
    if needed > budget {
        return Err(ConditionError::BudgetExceeded { needed, budget });
    }
    let mut worst = Worst::new();
    let mut f = vec![0usize; n];
    let mut used = vec![false; m.len()];
    enumerate_maps(m.len(), mode == WirMode::InjectiveTuples, 0, &mut f, &mut used, &mut |f| {
        for j in 2..=n - 2 {
            let v = wir_raw(m, f, j);
            worst.offer(v, || Witness {
                indices: f.to_vec(),
                params: params([("j", j as f64)]),
                margin: v,
            });
        }
    });
    let scale = m.max_entry().powi(2);
    Ok(worst.into_report(&format!("wir{n}"), None, scale))
}

fn enumerate_maps(
    size: usize,
    injective: bool,
    pos: usize,
    f: &mut Vec<usize>,
    used: &mut Vec<bool>,
    visit: &mut impl FnMut(&[usize]),
) {
    if pos == f.len() {
        visit(f);
        return;
    }
    for v in 0..size {
        if injective && used[v] {
            continue;
        }
        f[pos] = v;
        used[v] = true;
        enumerate_maps(size, injective, pos + 1, f, used, visit);
        used[v] = false;
    }
}

// ---------------------------------------------------------------------------
// ⊠-inequalities

/// The ⊠ expression for distances `a = xy, b = yz, c = zw, e = wx` and
/// diagonals `f = xz, g = yw`.
#[allow(clippy::too_many_arguments)]
pub fn boxtimes_value(a: f64, b: f64, c: f64, e: f64, f: f64, g: f64, s: f64, t: f64) -> f64 {
    (1.0 - t) * (1.0 - s) * a * a + t * (1.0 - s) * b * b + t * s * c * c + (1.0 - t) * s * e * e
        - t * (1.0 - t) * f * f
        - s * (1.0 - s) * g * g
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxtimesMin {
    pub value: f64,
    pub s: f64,
    pub t: f64,
}

/// Exact minimum of [`boxtimes_value`] over `[0, 1]²`.
///
/// The expression is a quadratic in `(t, s)`:
/// `A + t(B−A−F) + s(E−A−G) + ts(A−B+C−E) + F t² + G s²` with squared
/// lengths in capitals. Its minimum is attained at the interior stationary
/// point, on an edge (a 1D quadratic) or at a corner.
pub fn boxtimes_min(a: f64, b: f64, c: f64, e: f64, f: f64, g: f64) -> BoxtimesMin {
    let (sa, sb, sc, se, sf, sg) = (a * a, b * b, c * c, e * e, f * f, g * g);
    let h = sa - sb + sc - se;
    let (bt, bs) = (sb - sa - sf, se - sa - sg);
    let eval = |s: f64, t: f64| BoxtimesMin {
        value: boxtimes_value(a, b, c, e, f, g, s, t),
        s,
        t,
    };
    let mut candidates: Vec<(f64, f64)> = Vec::with_capacity(13);

    // interior: [2F H; H 2G] (t, s) = −(bt, bs)
    let det = 4.0 * sf * sg - h * h;
    let size = (4.0 * sf * sg).max(h * h);
    if det.abs() > 1e-14 * size && size > 0.0 {
        let t = (-bt * 2.0 * sg + bs * h) / det;
        let s = (-bs * 2.0 * sf + bt * h) / det;
        if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&s) {
            candidates.push((s, t));
        }
    }
    // edges: q(u) = β u + γ u² + const
    let vertex = |beta: f64, gamma: f64| -> Option<f64> {
        if gamma > 0.0 {
            let u = -beta / (2.0 * gamma);
            (0.0..=1.0).contains(&u).then_some(u)
        } else {
            None
        }
    };
    if let Some(s) = vertex(bs, sg) {
        candidates.push((s, 0.0));
    }
    if let Some(s) = vertex(bs + h, sg) {
        candidates.push((s, 1.0));
    }
    if let Some(t) = vertex(bt, sf) {
        candidates.push((0.0, t));
    }
    if let Some(t) = vertex(bt + h, sf) {
        candidates.push((1.0, t));
    }
    candidates.extend([(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]);

    candidates
        .into_iter()
        .map(|(s, t)| eval(s, t))
        .fold(None::<BoxtimesMin>, |best, c| match best {
            Some(b) if b.value <= c.value => Some(b),
            _ => Some(c),
        })
        .expect("corners are always candidates")
}

/// The three orderings of a 4-set that are not related by a symmetry of
/// the square.
const SQUARE_CLASSES: [[usize; 4]; 3] = [[0, 1, 2, 3], [0, 2, 1, 3], [0, 1, 3, 2]];

/// Ordered quadruple `(x, y, z, w)` to the sextuple `(a, b, c, e, f, g)`.
fn sextuple(m: &FiniteMetric, q: [usize; 4]) -> [f64; 6] {
    let [x, y, z, w] = q;
    [
        m.get(x, y),
        m.get(y, z),
        m.get(z, w),
        m.get(w, x),
        m.get(x, z),
        m.get(y, w),
    ]
}

fn four_subsets(n: usize) -> impl Iterator<Item = [usize; 4]> {
    (0..n).flat_map(move |i| {
        (i + 1..n).flat_map(move |j| {
            (j + 1..n).flat_map(move |k| (k + 1..n).map(move |l| [i, j, k, l]))
        })
    })
}

/// Checks the ⊠-inequalities over all quadruples of distinct points.
///
/// Quadruples with a repeated point satisfy the inequalities whenever the
/// triangle inequality holds, and the expression is invariant under the
/// symmetries of the square, so three orderings per 4-subset suffice.
pub fn boxtimes_check(m: &FiniteMetric) -> ConditionReport {
    let mut worst = Worst::new();
    for set in four_subsets(m.len()) {
        for class in SQUARE_CLASSES {
            let q = class.map(|i| set[i]);
            let [a, b, c, e, f, g] = sextuple(m, q);
            let min = boxtimes_min(a, b, c, e, f, g);
            worst.offer(min.value, || Witness {
                indices: q.to_vec(),
                params: params([("s", min.s), ("t", min.t)]),
                margin: min.value,
            });
        }
    }
    worst.into_report("boxtimes", None, m.max_entry().powi(2))
}

// ---------------------------------------------------------------------------
// κ-quadruple condition

/// An ordered quadruple `(x, y, z, w)` with its six distances; the diagonal
/// under test is `f = d(x, z)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadrupleLabeling {
    pub indices: [usize; 4],
    /// `d(x,y)`
    pub a: f64,
    /// `d(y,z)`
    pub b: f64,
    /// `d(z,w)`
    pub c: f64,
    /// `d(w,x)`
    pub e: f64,
    /// `d(x,z)`
    pub f: f64,
    /// `d(y,w)`
    pub g: f64,
}

impl QuadrupleLabeling {
    pub fn from_metric(m: &FiniteMetric, indices: [usize; 4]) -> Self {
        let [a, b, c, e, f, g] = sextuple(m, indices);
        QuadrupleLabeling {
            indices,
            a,
            b,
            c,
            e,
            f,
            g,
        }
    }

    /// Same cyclic quadrilateral with the other diagonal, `(y, z, w, x)`.
    pub fn other_diagonal(&self) -> Self {
        let [x, y, z, w] = self.indices;
        QuadrupleLabeling {
            indices: [y, z, w, x],
            a: self.b,
            b: self.c,
            c: self.e,
            e: self.a,
            f: self.g,
            g: self.f,
        }
    }

    pub fn perimeter(&self) -> f64 {
        self.a + self.b + self.c + self.e
    }

    fn scale(&self) -> f64 {
        [self.a, self.b, self.c, self.e, self.f, self.g]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Result of comparing one labeling against its model configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QuadrupleOutcome {
    /// Perimeter at least `2 D_κ`.
    Exempt,
    /// The model diagonals do not cross, so the labeling imposes nothing.
    Vacuous,
    /// `margin = d_κ(y′, w′) − d(y, w)`.
    Compared { margin: f64, model_gap: f64 },
    /// A side triangle cannot be drawn in the model plane; `margin` is the
    /// most negative realizability factor.
    Unrealizable { margin: f64 },
}

impl QuadrupleOutcome {
    pub fn margin(&self) -> Option<f64> {
        match *self {
            QuadrupleOutcome::Compared { margin, .. } | QuadrupleOutcome::Unrealizable { margin } => {
                Some(margin)
            }
            _ => None,
        }
    }
}

/// Realizability defect of a triangle with sides `(p, q, r)` in `M²_κ`.
fn triangle_defect(p: f64, q: f64, r: f64, kappa: Kappa) -> f64 {
    let mut worst = (p + q - r).min(q + r - p).min(r + p - q);
    if kappa.regime() == Regime::Sphere {
        worst = worst.min(2.0 * kappa.diameter() - (p + q + r));
    }
    worst
}

/// Evaluates the κ-quadruple condition for one labeling.
///
/// `x′` and `z′` are placed at distance `f`; `y′` is hinged on one side of
/// `ℓ(x′, z′)` with `d(x′,y′) = a`, `d(y′,z′) = b`, and `w′` on the other
/// with `d(z′,w′) = c`, `d(w′,x′) = e`. Configurations with `y′` and `w′`
/// on the same side can only cross degenerately and never give a smaller
/// `d(y′, w′)`, so they are not examined.
pub fn quadruple_outcome(q: &QuadrupleLabeling, kappa: Kappa) -> QuadrupleOutcome {
    let QuadrupleLabeling { a, b, c, e, f, g, .. } = *q;
    if kappa.regime() == Regime::Sphere && q.perimeter() >= 2.0 * kappa.diameter() {
        return QuadrupleOutcome::Exempt;
    }
    let scale = q.scale();
    let tol = tolerance::scaled(scale);
    if f <= tol {
        // x = z: the configuration puts x′ on [y′, w′]
        let model_gap = a + e;
        return QuadrupleOutcome::Compared {
            margin: model_gap - g,
            model_gap,
        };
    }
    let defect = triangle_defect(a, b, f, kappa).min(triangle_defect(e, c, f, kappa));
    if defect < -tol {
        return QuadrupleOutcome::Unrealizable { margin: defect };
    }
    let x = ModelPoint::base(kappa);
    let z = ModelPoint::from_polar(kappa, f, 0.0);
    let place = |da: f64, db: f64, side: SideLabel| model::place_point(&x, &z, da, db, side);
    let (y, w) = match (place(a, b, SideLabel::Left), place(e, c, SideLabel::Right)) {
        (Ok(y), Ok(w)) => (y, w),
        _ => return QuadrupleOutcome::Unrealizable { margin: defect.min(-tol) },
    };
    match model::segments_intersect(&x, &z, &y, &w) {
        Ok(true) => {
            let model_gap = model::distance(&y, &w).expect("same curvature");
            QuadrupleOutcome::Compared {
                margin: model_gap - g,
                model_gap,
            }
        }
        Ok(false) => QuadrupleOutcome::Vacuous,
        Err(_) => QuadrupleOutcome::Exempt,
    }
}

fn offer_outcome(q: &QuadrupleLabeling, kappa: Kappa, worst: &mut Worst) {
    let outcome = quadruple_outcome(q, kappa);
    let Some(margin) = outcome.margin() else {
        worst.count();
        return;
    };
    worst.offer(margin, || {
        let p = match outcome {
            QuadrupleOutcome::Compared { model_gap, .. } => params([
                ("model_distance", model_gap),
                ("metric_distance", q.g),
                ("diagonal", q.f),
            ]),
            _ => params([("unrealizable", 1.0), ("diagonal", q.f)]),
        };
        Witness {
            indices: q.indices.to_vec(),
            params: p,
            margin,
        }
    });
}

/// Checks a single labeling.
pub fn quadruple_check(q: &QuadrupleLabeling, kappa: Kappa) -> ConditionReport {
    let mut worst = Worst::new();
    offer_outcome(q, kappa, &mut worst);
    let exempt = matches!(quadruple_outcome(q, kappa), QuadrupleOutcome::Exempt);
    let mut report = worst.into_report("quadruple", Some(kappa), q.scale());
    if exempt {
        report.verdict = Verdict::Exempt;
    }
    report
}

/// The κ-quadruple condition over every 4-subset, every cyclic labeling
/// and both diagonals.
pub fn cat4_check(m: &FiniteMetric, kappa: Kappa) -> ConditionReport {
    let mut worst = Worst::new();
    for set in four_subsets(m.len()) {
        for class in SQUARE_CLASSES {
            let q = QuadrupleLabeling::from_metric(m, class.map(|i| set[i]));
            offer_outcome(&q, kappa, &mut worst);
            offer_outcome(&q.other_diagonal(), kappa, &mut worst);
        }
    }
    worst.into_report("cat4", Some(kappa), m.max_entry())
}

/// The Cycl_4(κ) condition, decided through the equivalent κ-quadruple
/// condition.
pub fn cycl4_check(m: &FiniteMetric, kappa: Kappa) -> ConditionReport {
    let mut report = cat4_check(m, kappa);
    report.condition = "cycl4".to_string();
    report.via = Some("kappa_quadruple".to_string());
    report
}

// ---------------------------------------------------------------------------
// Comparison polygons

/// Residuals of a candidate comparison polygon for a cyclic tuple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolygonCheck {
    /// `d_κ(g_i, g_{i+1}) − d(f(i), f(i+1))` for each `i`.
    pub edge_residuals: Vec<f64>,
    /// `d_κ(g_i, g_j) − d(f(i), f(j))` over non-adjacent pairs `i < j`.
    pub diag_slacks: Vec<f64>,
    /// Pairs `(i, j)` whose chord misses the neighbour chord at `i`.
    pub convexity_failures: Vec<(usize, usize)>,
    pub report: ConditionReport,
}

impl PolygonCheck {
    pub fn convexity_ok(&self) -> bool {
        self.convexity_failures.is_empty()
    }
}

/// Verifies that `g` realises the tuple's edges exactly, does not shorten
/// any other pair, and is convex in the sense that `[g_i, g_j]` meets
/// `[g_{i−1}, g_{i+1}]` for all `i ≠ j`.
///
/// Tolerances are `VERIFY_FACTOR · eps · scale`, with `scale` the largest
/// distance among the tuple's points.
pub fn cycl_n_verify(
    m: &FiniteMetric,
    t: &CyclicTuple,
    g: &[ModelPoint],
    kappa: Kappa,
) -> Result<PolygonCheck, ConditionError> {
    let n = t.len();
    if g.len() != n {
        return Err(ConditionError::LengthMismatch {
            expected: n,
            got: g.len(),
        });
    }
    if let Some(p) = g.iter().find(|p| p.kappa() != kappa) {
        return Err(ConditionError::KappaMismatch {
            expected: kappa.value(),
            got: p.kappa().value(),
        });
    }
    let d = |i: usize, j: usize| model::distance(&g[i % n], &g[j % n]).expect("same curvature");
    let dx = |i: usize, j: usize| m.get(t.at(i), t.at(j));
    let scale = {
        let s = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| dx(i, j))
            .fold(0.0, f64::max);
        if s > 0.0 {
            s
        } else {
            1.0
        }
    };
    let eps = VERIFY_FACTOR * tolerance::eps();
    let tol = eps * scale;

    let mut worst = Worst::new();
    let mut edge_residuals = Vec::with_capacity(n);
    if n > 1 {
        for i in 0..n {
            let r = d(i, i + 1) - dx(i, i + 1);
            edge_residuals.push(r);
            worst.offer(-r.abs(), || Witness {
                indices: vec![i, (i + 1) % n],
                params: params([("edge_residual", r)]),
                margin: -r.abs(),
            });
        }
    }
    let mut diag_slacks = Vec::new();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let s = d(i, j) - dx(i, j);
            diag_slacks.push(s);
            worst.offer(s, || Witness {
                indices: vec![i, j],
                params: params([("diagonal_slack", s)]),
                margin: s,
            });
        }
    }
    let mut convexity_failures = Vec::new();
    if n > 2 {
        for i in 0..n {
            let (prev, next) = (&g[(i + n - 1) % n], &g[(i + 1) % n]);
            for j in 0..n {
                if j == i {
                    continue;
                }
                let ok = model::segments_intersect_within(&g[i], &g[j], prev, next, eps)
                    .unwrap_or(false);
                if !ok {
                    convexity_failures.push((i, j));
                }
            }
        }
    }
    let mut report = worst.into_report("cycl_n", Some(kappa), scale);
    let failing = report.margin < -tol || !convexity_failures.is_empty();
    report.verdict = if failing { Verdict::Fail } else { Verdict::Pass };
    if let Some(&(i, j)) = convexity_failures.first() {
        if report.margin >= -tol {
            report.witness = Some(Witness {
                indices: vec![i, j],
                params: params([("convexity", 0.0)]),
                margin: report.margin.min(0.0),
            });
        }
    }
    if kappa.regime() == Regime::Sphere && perimeter(m, t) >= 2.0 * kappa.diameter() {
        report.verdict = Verdict::Exempt;
    }
    Ok(PolygonCheck {
        edge_residuals,
        diag_slacks,
        convexity_failures,
        report,
    })
}

/// `(1−t) d(x,w)² + t d(z,w)² − t(1−t) d(x,z)² − d(y,w)²` with
/// `t = d(x,y)/d(x,z)`, for `y` metrically between `x` and `z`.
pub fn midpoint_inequality_value(
    m: &FiniteMetric,
    x: usize,
    y: usize,
    z: usize,
    w: usize,
) -> Result<f64, ConditionError> {
    let dxz = m.get(x, z);
    let scale = m.max_entry();
    let tol = tolerance::scaled(scale);
    if dxz <= tol {
        return Err(ConditionError::CoincidentEndpoints { x, z });
    }
    let defect = m.get(x, y) + m.get(y, z) - dxz;
    if defect.abs() > tol {
        return Err(ConditionError::NotAligned { x, y, z, defect });
    }
    let t = (m.get(x, y) / dxz).clamp(0.0, 1.0);
    let sq = |v: f64| v * v;
    Ok((1.0 - t) * sq(m.get(x, w)) + t * sq(m.get(z, w)) - t * (1.0 - t) * sq(dxz) - sq(m.get(y, w)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{sample_model_subset, snowflake};
    use proptest::prelude::*;

    fn four_cycle() -> FiniteMetric {
        FiniteMetric::new(vec![
            vec![0.0, 1.0, 2.0, 1.0],
            vec![1.0, 0.0, 1.0, 2.0],
            vec![2.0, 1.0, 0.0, 1.0],
            vec![1.0, 2.0, 1.0, 0.0],
        ])
        .unwrap()
    }

    fn square() -> FiniteMetric {
        let r = 2f64.sqrt();
        FiniteMetric::new(vec![
            vec![0.0, 1.0, r, 1.0],
            vec![1.0, 0.0, 1.0, r],
            vec![r, 1.0, 0.0, 1.0],
            vec![1.0, r, 1.0, 0.0],
        ])
        .unwrap()
    }

    fn planar(points: &[(f64, f64)]) -> FiniteMetric {
        let pts: Vec<_> = points.iter().map(|&(x, y)| ModelPoint::plane(x, y)).collect();
        FiniteMetric::from_points(&pts)
    }

    #[test]
    fn wir_examples() {
        let par = planar(&[(0.0, 0.0), (2.0, 0.0), (2.5, 1.0), (0.5, 1.0)]);
        let v = wir_value(&par, &CyclicTuple::identity(4), 2).unwrap();
        assert!(v.abs() < 1e-12, "{v}");
        let v = wir_value(&four_cycle(), &CyclicTuple::identity(4), 2).unwrap();
        assert!((v + 4.0).abs() < 1e-12);
        let pent: Vec<_> = (0..5)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / 5.0;
                (a.cos(), a.sin())
            })
            .collect();
        let v = wir_value(&planar(&pent), &CyclicTuple::identity(5), 2).unwrap();
        assert!(v.abs() < 1e-12);
        assert!(matches!(
            wir_value(&four_cycle(), &CyclicTuple::identity(4), 3),
            Err(ConditionError::JOutOfRange { .. })
        ));
        assert!(wir_value(&four_cycle(), &CyclicTuple::identity(3), 2).is_err());
    }

    #[test]
    fn wir_check_examples() {
        let (m, _) = sample_model_subset(6, Kappa::FLAT, 5);
        for n in 4..=6 {
            assert!(wir_check(&m, n, WirMode::InjectiveTuples, WIR_BUDGET).unwrap().passed());
        }
        let r = wir_check(&four_cycle(), 4, WirMode::InjectiveTuples, WIR_BUDGET).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let w = r.witness.unwrap();
        assert_eq!(w.indices, vec![0, 1, 2, 3]);
        assert!((w.margin + 4.0).abs() < 1e-12);
        let (m3, _) = sample_model_subset(3, Kappa::FLAT, 2);
        let r = wir_check(&m3, 4, WirMode::AllMaps, WIR_BUDGET).unwrap();
        assert!(r.passed());
        assert_eq!(r.evaluated, 81);
        assert!(matches!(
            wir_check(&m3, 20, WirMode::AllMaps, WIR_BUDGET),
            Err(ConditionError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn boxtimes_examples() {
        let r = 2f64.sqrt();
        assert!(boxtimes_value(1.0, 1.0, 1.0, 1.0, r, r, 0.5, 0.5).abs() < 1e-15);
        assert_eq!(boxtimes_value(1.0, 1.0, 1.0, 1.0, 2.0, 2.0, 0.5, 0.5), -1.0);
        assert_eq!(boxtimes_value(1.5, 1.0, 1.0, 1.0, 2.0, 2.0, 0.0, 0.0), 2.25);

        let m = boxtimes_min(1.0, 1.0, 1.0, 1.0, r, r);
        assert!(m.value.abs() < 1e-15);
        assert!((m.s - 0.5).abs() < 1e-12 && (m.t - 0.5).abs() < 1e-12);
        let m = boxtimes_min(1.0, 1.0, 1.0, 1.0, 2.0, 2.0);
        assert!(m.value <= -1.0);
        let m = boxtimes_min(0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(m.value, 0.0);
        let m = boxtimes_min(0.7, 0.7, 0.7, 0.7, 0.0, 0.0);
        assert!((m.value - 0.49).abs() < 1e-15);
    }

    #[test]
    fn boxtimes_check_examples() {
        let r = boxtimes_check(&four_cycle());
        assert_eq!(r.verdict, Verdict::Fail);
        let w = r.witness.unwrap();
        assert_eq!(w.indices, vec![0, 1, 2, 3]);
        assert!((w.margin + 1.0).abs() < 1e-12);
        assert_eq!(w.params["s"], 0.5);
        assert_eq!(w.params["t"], 0.5);
        let (m, _) = sample_model_subset(7, Kappa::FLAT, 9);
        assert!(boxtimes_check(&m).passed());
        assert!(boxtimes_check(&snowflake(&m, 0.5).unwrap()).passed());
    }

    #[test]
    fn quadruple_examples() {
        let q = QuadrupleLabeling::from_metric(&square(), [0, 1, 2, 3]);
        match quadruple_outcome(&q, Kappa::FLAT) {
            QuadrupleOutcome::Compared { model_gap, margin } => {
                assert!((model_gap - 2f64.sqrt()).abs() < 1e-12);
                assert!(margin.abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        let q = QuadrupleLabeling::from_metric(&four_cycle(), [0, 1, 2, 3]);
        let r = quadruple_check(&q, Kappa::FLAT);
        assert_eq!(r.verdict, Verdict::Fail);
        assert!((r.margin + 2.0).abs() < 1e-9);

        // x = z
        let m = planar(&[(0.0, 0.0), (1.0, 0.0), (0.0, 0.0), (0.0, 1.0)]);
        let q = QuadrupleLabeling::from_metric(&m, [0, 1, 2, 3]);
        assert_eq!(quadruple_check(&q, Kappa::FLAT).verdict, Verdict::Pass);

        // exempt on the sphere
        let m = FiniteMetric::from_fn(4, |_, _| 1.6);
        let q = QuadrupleLabeling::from_metric(&m, [0, 1, 2, 3]);
        assert_eq!(quadruple_check(&q, Kappa::new(1.0)).verdict, Verdict::Exempt);
    }

    #[test]
    fn four_point_checks() {
        for &k in &[-1.0, 0.0, 1.0] {
            let (m, _) = sample_model_subset(5, Kappa::new(k), 17);
            assert!(cat4_check(&m, Kappa::new(k)).passed(), "{k}");
        }
        assert_eq!(cat4_check(&four_cycle(), Kappa::FLAT).verdict, Verdict::Fail);
        let r = cycl4_check(&four_cycle(), Kappa::FLAT);
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.via.as_deref(), Some("kappa_quadruple"));
        let (m3, _) = sample_model_subset(3, Kappa::FLAT, 1);
        let r = cat4_check(&m3, Kappa::FLAT);
        assert!(r.passed());
        assert_eq!(r.evaluated, 0);
        assert!(cycl4_check(&square(), Kappa::FLAT).passed());
    }

    #[test]
    fn verify_examples() {
        let pts: Vec<_> = (0..5)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / 5.0;
                ModelPoint::plane(a.cos(), 0.7 * a.sin())
            })
            .collect();
        let m = FiniteMetric::from_points(&pts);
        let t = CyclicTuple::identity(5);
        let c = cycl_n_verify(&m, &t, &pts, Kappa::FLAT).unwrap();
        assert_eq!(c.report.verdict, Verdict::Pass);
        assert!(c.convexity_ok());
        assert_eq!(c.edge_residuals.len(), 5);
        assert_eq!(c.diag_slacks.len(), 5);

        let mut bad = pts.clone();
        let p = bad[2].coords();
        bad[2] = ModelPoint::plane(p[0] + 0.1, p[1]);
        let c = cycl_n_verify(&m, &t, &bad, Kappa::FLAT).unwrap();
        assert_eq!(c.report.verdict, Verdict::Fail);
        let w = c.report.witness.unwrap();
        assert!(w.indices.contains(&2));

        assert!(matches!(
            cycl_n_verify(&m, &t, &pts[..4], Kappa::FLAT),
            Err(ConditionError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn midpoint_examples() {
        let m = planar(&[(0.0, 0.0), (0.5, 0.0), (1.0, 0.0), (0.3, 0.8)]);
        assert!(midpoint_inequality_value(&m, 0, 1, 2, 3).unwrap().abs() < 1e-12);
        let m = planar(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0), (0.3, 0.8)]);
        assert!(midpoint_inequality_value(&m, 0, 1, 2, 3).unwrap().abs() < 1e-12);
        let m = planar(&[(0.0, 0.0), (0.5, 0.3), (1.0, 0.0), (0.3, 0.8)]);
        assert!(matches!(
            midpoint_inequality_value(&m, 0, 1, 2, 3),
            Err(ConditionError::NotAligned { .. })
        ));
    }

    #[test]
    fn report_serializes() {
        let r = boxtimes_check(&four_cycle());
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["condition"], "boxtimes");
        assert_eq!(v["verdict"], "fail");
        assert_eq!(v["witness"]["indices"], serde_json::json!([0, 1, 2, 3]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn boxtimes_min_bounds_grid(v in prop::array::uniform6(0.0f64..3.0)) {
            let [a, b, c, e, f, g] = v;
            let m = boxtimes_min(a, b, c, e, f, g);
            for i in 0..=20 {
                for j in 0..=20 {
                    let (s, t) = (i as f64 / 20.0, j as f64 / 20.0);
                    prop_assert!(m.value <= boxtimes_value(a, b, c, e, f, g, s, t) + 1e-12);
                }
            }
        }

        #[test]
        fn labeling_orientation_is_irrelevant(seed in any::<u64>(), k in prop::sample::select(vec![-1.0, 0.0, 1.0])) {
            let kappa = Kappa::new(k);
            let (m, _) = sample_model_subset(4, kappa, seed);
            let base = cat4_check(&m, kappa).verdict;
            let reversed = m.submetric(&[3, 2, 1, 0]);
            prop_assert_eq!(cat4_check(&reversed, kappa).verdict, base);
        }

        #[test]
        fn planar_metrics_agree(seed in any::<u64>()) {
            let (m, _) = sample_model_subset(5, Kappa::FLAT, seed);
            prop_assert!(boxtimes_check(&m).passed());
            prop_assert!(cycl4_check(&m, Kappa::FLAT).passed());
        }
    }
}
