//! Dehn twists along meridians of a tube, applied to chart curves.

use std::f64::consts::TAU;

use super::surface_curve::{curve_on_tube, CurveOnSurface};
use super::TubeChart;
use crate::error::{Error, Result};

/// A window `[s0, s0 + width)` of the longitude parameter over which the
/// twist happens.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwistLocus {
    pub s0: f64,
    pub width: f64,
}

/// Widest run of hole-free columns in a circle chart; the twist window is
/// centred in it, keeping intact columns on each side.
pub fn default_locus(chart: &TubeChart) -> Result<TwistLocus> {
    let n = chart.n_cells_s();
    let mut free = vec![true; n];
    for &(i, _) in chart.holes() {
        free[i] = false;
    }
    if free.iter().all(|&f| f) {
        let width = (n / 4).max(1) as f64 / n as f64;
        return Ok(TwistLocus { s0: 0.5 - width / 2.0, width });
    }
    // Longest cyclic run of free columns.
    let start = free.iter().position(|&f| !f).unwrap();
    let (mut best, mut best_at, mut run, mut run_at) = (0usize, 0usize, 0usize, 0usize);
    for k in 1..=n {
        let i = (start + k) % n;
        if free[i] {
            if run == 0 {
                run_at = i;
            }
            run += 1;
            if run > best {
                best = run;
                best_at = run_at;
            }
        } else {
            run = 0;
        }
    }
    if best < 3 {
        return Err(Error::input("no hole-free band of the chart is wide enough for a twist"));
    }
    let margin = if best >= 8 { 2 } else { 1 };
    let cells = (best - 2 * margin).min(n / 4).max(1);
    let first = best_at + margin + (best - 2 * margin - cells) / 2;
    Ok(TwistLocus { s0: first as f64 / n as f64, width: cells as f64 / n as f64 })
}

/// Position of `s` through the twist: `⌊s - s0⌋` plus a smoothstep of the
/// fraction of the window covered, so `ramp(s + 1) = ramp(s) + 1`. The
/// smooth start keeps the twisted curve free of sharp corners, whose
/// pushoffs would reach far out of the window.
fn ramp(s: f64, locus: &TwistLocus) -> f64 {
    let x = s - locus.s0;
    let base = x.floor();
    let f = ((x - base) / locus.width).clamp(0.0, 1.0);
    base + f * f * (3.0 - 2.0 * f)
}

/// Image of a chart curve under `k` Dehn twists along the meridian at the
/// locus: `θ -> θ + 2π k ramp(s)`. A curve running once along the tube gains
/// `k` meridional wraps.
pub fn dehn_twist_curve(curve: &CurveOnSurface, k: i64, locus: Option<TwistLocus>) -> Result<CurveOnSurface> {
    let chart = curve.chart().ok_or_else(|| Error::Unsupported("Dehn twists act on chart curves only".into()))?;
    let (longitude, _) = curve.classes().expect("chart curve");
    if longitude.abs() != 1 {
        return Err(Error::input(format!(
            "the twisting meridian must meet the curve once; the curve runs {longitude} times along its tube"
        )));
    }
    if !chart.is_periodic() {
        return Err(Error::input("Dehn twists need a chart around a closed curve"));
    }
    if k == 0 {
        return Ok(curve.clone());
    }
    let locus = match locus {
        Some(l) => l,
        None => default_locus(chart)?,
    };
    if !(locus.width > 0.0 && locus.width < 1.0) {
        return Err(Error::input("twist window width must lie in (0, 1)"));
    }
    let (chart_id, coords) = curve.chart_coords().expect("chart curve");
    let n = coords.len();
    // Close the lifted loop and subdivide segments inside the window so that
    // no step turns by more than a quarter turn.
    let closing = (longitude as f64, curve.classes().unwrap().1 as f64 * TAU);
    let mut out = Vec::with_capacity(n * 2);
    for i in 0..n {
        let p = coords[i];
        let q = if i + 1 < n { coords[i + 1] } else { (coords[0].0 + closing.0, coords[0].1 + closing.1) };
        let turn = (ramp(q.0, &locus) - ramp(p.0, &locus)).abs() * k.unsigned_abs() as f64;
        let pieces = ((turn * 8.0).ceil() as usize).max(1);
        for m in 0..pieces {
            let t = m as f64 / pieces as f64;
            let s = p.0 + t * (q.0 - p.0);
            let th = p.1 + t * (q.1 - p.1);
            out.push((s, th + TAU * k as f64 * ramp(s, &locus)));
        }
    }
    curve_on_tube(curve.host(), chart_id, &out)
}
