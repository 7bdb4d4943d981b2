//! SVG drawings of comparison polygons.

use std::fmt::Write as _;

use clap::ValueEnum;
use cycl::majorize::ComparisonMap;
use cycl::model::{self, Kappa, ModelPoint, Regime};
use thiserror::Error;

/// Segments each polygon edge is drawn with.
pub const EDGE_SAMPLES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Projection {
    /// Plane for κ = 0, Poincaré disk for κ < 0, orthographic for κ > 0.
    Auto,
    /// First two embedded coordinates, uniformly scaled.
    Plane,
    /// Poincaré disk image of the hyperboloid.
    Poincare,
    /// Orthographic view of the sphere from above the base point.
    Orthographic,
}

#[derive(Debug, Error, PartialEq)]
pub enum SvgError {
    #[error("the {0:?} projection does not apply to curvature {1}")]
    Unsupported(Projection, f64),
}

impl Projection {
    pub fn resolve(self, kappa: Kappa) -> Result<Projection, SvgError> {
        match (self, kappa.regime()) {
            (Projection::Auto, Regime::Plane) => Ok(Projection::Plane),
            (Projection::Auto, Regime::Hyperboloid) => Ok(Projection::Poincare),
            (Projection::Auto, Regime::Sphere) => Ok(Projection::Orthographic),
            (Projection::Plane, _)
            | (Projection::Poincare, Regime::Hyperboloid)
            | (Projection::Orthographic, Regime::Sphere) => Ok(self),
            _ => Err(SvgError::Unsupported(self, kappa.value())),
        }
    }

    /// Image of `p` in the drawing plane. Disk projections land in the
    /// closed unit disk.
    pub fn project(self, p: &ModelPoint) -> (f64, f64) {
        let c = p.coords();
        let r = match p.kappa().regime() {
            Regime::Plane => 1.0,
            _ => p.kappa().radius(),
        };
        let (x, y, w) = (c[0] / r, c[1] / r, c[2] / r);
        match self {
            Projection::Poincare => (x / (1.0 + w), y / (1.0 + w)),
            Projection::Plane | Projection::Orthographic | Projection::Auto => (x, y),
        }
    }

    fn is_disk(self) -> bool {
        matches!(self, Projection::Poincare | Projection::Orthographic)
    }
}

/// Points of the geodesic `[a, b]` at parameters `k / EDGE_SAMPLES`.
pub fn edge_samples(a: &ModelPoint, b: &ModelPoint) -> Vec<ModelPoint> {
    (0..=EDGE_SAMPLES)
        .map(|k| model::interpolate(a, b, k as f64 / EDGE_SAMPLES as f64).unwrap_or(*a))
        .collect()
}

/// Draws the polygon of `cm` with vertices labelled by index.
pub fn render_svg(cm: &ComparisonMap, projection: Projection, size: u32) -> Result<String, SvgError> {
    let proj = projection.resolve(cm.kappa)?;
    let n = cm.points.len();
    let edges: Vec<Vec<(f64, f64)>> = (0..n)
        .map(|i| {
            edge_samples(&cm.points[i], &cm.points[(i + 1) % n])
                .iter()
                .map(|p| proj.project(p))
                .collect()
        })
        .collect();
    let vertices: Vec<(f64, f64)> = cm.points.iter().map(|p| proj.project(p)).collect();

    // world window
    let (cx, cy, half) = if proj.is_disk() {
        (0.0, 0.0, 1.0)
    } else {
        let all = edges.iter().flatten().chain(&vertices);
        let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for &(x, y) in all {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
        let half = 0.5 * (x1 - x0).max(y1 - y0);
        (0.5 * (x0 + x1), 0.5 * (y0 + y1), if half > 0.0 { half } else { 1.0 })
    };
    let s = size as f64;
    let scale = 0.42 * s / half;
    let to_px = |(x, y): (f64, f64)| (0.5 * s + (x - cx) * scale, 0.5 * s - (y - cy) * scale);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(out, r#"<rect width="{size}" height="{size}" fill="white"/>"#);
    if proj.is_disk() {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.3}" cy="{:.3}" r="{:.3}" fill="none" stroke="gray" stroke-width="1"/>"#,
            0.5 * s,
            0.5 * s,
            scale
        );
    }
    for edge in &edges {
        let pts: Vec<String> = edge
            .iter()
            .map(|&p| {
                let (x, y) = to_px(p);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
    }
    for (i, &v) in vertices.iter().enumerate() {
        let (x, y) = to_px(v);
        let _ = writeln!(out, r#"<circle cx="{x:.3}" cy="{y:.3}" r="3" fill="black"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="12">{i}</text>"#,
            x + 5.0,
            y - 5.0
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}
