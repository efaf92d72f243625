//! Parallel copies of a chart curve on either side of it in the surface.

use serde::{Deserialize, Serialize};

use super::surface_curve::{curve_on_tube, CurveOnSurface};
use super::PolyCurve3;
use crate::error::{Error, Result};

/// The two pushoffs of a curve into its surface, `alpha1` on the side of
/// `normal × tangent` and `alpha2` on the other side.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PushoffPair {
    pub alpha1: PolyCurve3,
    pub alpha2: PolyCurve3,
    pub epsilon: f64,
}

/// Both pushoffs as curves on the host surface.
#[derive(Debug, Clone)]
pub struct SurfacePushoffs {
    pub alpha1: CurveOnSurface,
    pub alpha2: CurveOnSurface,
    pub epsilon: f64,
}

impl SurfacePushoffs {
    pub fn pair(&self) -> PushoffPair {
        PushoffPair {
            alpha1: self.alpha1.points().clone(),
            alpha2: self.alpha2.points().clone(),
            epsilon: self.epsilon,
        }
    }
}

/// Smallest cosine allowed between consecutive offset directions before a
/// miter is considered too sharp.
const MITER_MIN_COS: f64 = 0.25;

pub fn surface_pushoffs(curve: &CurveOnSurface, epsilon: f64) -> Result<PushoffPair> {
    Ok(surface_pushoff_curves(curve, epsilon)?.pair())
}

/// Offsets the curve by `epsilon` to both sides within its tube chart.
///
/// Offsetting happens in the flat metric of the chart, `x = s * L`,
/// `y = θ * r` with `L` the core length and `r` the tube radius; since
/// `∂/∂s × ∂/∂θ` is the outward normal, `normal × tangent` is the
/// clockwise rotation `(t_y, -t_x)` of the flat tangent.
pub fn surface_pushoff_curves(curve: &CurveOnSurface, epsilon: f64) -> Result<SurfacePushoffs> {
    let reject = |suggested: f64, reason: String| Error::Epsilon { epsilon, suggested, reason };
    let chart =
        curve.chart().ok_or_else(|| Error::Unsupported("pushoffs are computed for chart curves only".into()))?;
    let radius = chart.radius();
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(reject(radius / 2.0, "epsilon must be positive".into()));
    }
    if epsilon >= radius {
        return Err(reject(radius / 2.0, format!("epsilon must be below the tube radius {radius}")));
    }
    let (chart_id, coords) = curve.chart_coords().expect("chart curve");
    let (longitude, meridian) = curve.classes().expect("chart curve");
    let len = chart.core_length();
    let n = coords.len();
    let flat: Vec<(f64, f64)> = coords.iter().map(|&(s, t)| (s * len, t * radius)).collect();
    let closing = (longitude as f64 * len, meridian as f64 * std::f64::consts::TAU * radius);
    let at = |k: isize| -> (f64, f64) {
        let m = n as isize;
        let wraps = k.div_euclid(m);
        let p = flat[k.rem_euclid(m) as usize];
        (p.0 + wraps as f64 * closing.0, p.1 + wraps as f64 * closing.1)
    };
    let side = |a: (f64, f64), b: (f64, f64)| -> Option<(f64, f64)> {
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        let l = dx.hypot(dy);
        (l > 0.0).then(|| (dy / l, -dx / l))
    };
    let mut offset = Vec::with_capacity(n);
    for k in 0..n as isize {
        let (p, c, q) = (at(k - 1), at(k), at(k + 1));
        let (Some(a), Some(b)) = (side(p, c), side(c, q)) else {
            return Err(Error::input("chart curve has repeated samples"));
        };
        let (mx, my) = (a.0 + b.0, a.1 + b.1);
        let ml = mx.hypot(my);
        let cos = if ml > 0.0 { (mx * a.0 + my * a.1) / ml } else { 0.0 };
        if cos < MITER_MIN_COS {
            return Err(reject(epsilon / 2.0, format!("curve turns too sharply at sample {k} for a parallel offset")));
        }
        offset.push((mx / ml / cos, my / ml / cos));
    }
    let shifted = |sign: f64| -> Vec<(f64, f64)> {
        flat.iter()
            .zip(&offset)
            .map(|(p, d)| ((p.0 + sign * epsilon * d.0) / len, (p.1 + sign * epsilon * d.1) / radius))
            .collect()
    };
    let host = curve.host();
    let place = |sign: f64, name: &str| -> Result<CurveOnSurface> {
        curve_on_tube(host, chart_id, &shifted(sign)).map_err(|e| match e {
            Error::Input(m) => reject(epsilon / 2.0, format!("{name} does not fit on the surface: {m}")),
            other => other,
        })
    };
    let alpha1 = place(1.0, "alpha1")?;
    let alpha2 = place(-1.0, "alpha2")?;
    for a in [&alpha1, &alpha2] {
        if a.classes() != curve.classes() {
            return Err(reject(epsilon / 2.0, "pushoff changed its chart class".into()));
        }
    }
    let min_gap = 0.25 * epsilon;
    let k = curve.points();
    for (x, y, what) in [
        (k, alpha1.points(), "curve and alpha1"),
        (k, alpha2.points(), "curve and alpha2"),
        (alpha1.points(), alpha2.points(), "alpha1 and alpha2"),
    ] {
        let d = x.distance_to_within(y, min_gap);
        if d < min_gap {
            return Err(reject(epsilon / 2.0, format!("{what} come within {d:.3e}")));
        }
    }
    Ok(SurfacePushoffs { alpha1, alpha2, epsilon })
}
