//! Log-log regime characterization of growth series: power-law exponent
//! fits over a time window, and detection of the sqrt-to-linear cross-over
//! as the point where the local log-log slope passes a fixed threshold.

use serde::Serialize;

use crate::error::{Error, Result};

/// Local slope value separating the sqrt-dominated regime (slope 1/2) from
/// the linear one (slope 1). The instantaneous log-log slope of
/// 2mt + c*sqrt(t) equals exactly 3/4 at the cross-over time.
pub const CROSSOVER_SLOPE_THRESHOLD: f64 = 0.75;

/// Width of the sliding slope window, in decades of t.
pub const CROSSOVER_WINDOW_DECADES: f64 = 1.0 / 3.0;

/// Ordinary least squares in log-log space over a time window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeFit {
    pub window: (f64, f64),
    /// Fitted exponent: k ~ t^beta over the window.
    pub beta: f64,
    pub r_squared: f64,
}

fn validate_series(series: &[(f64, f64)]) -> Result<()> {
    let mut prev = f64::NEG_INFINITY;
    for (i, &(t, k)) in series.iter().enumerate() {
        if !t.is_finite() || !k.is_finite() || t <= 0.0 || k <= 0.0 {
            return Err(Error::Domain(format!(
                "sample {i} must have positive finite t and k, got ({t}, {k})"
            )));
        }
        if t <= prev {
            return Err(Error::Domain(format!(
                "sample times must be strictly increasing, offender at index {i}"
            )));
        }
        prev = t;
    }
    Ok(())
}

fn ols_loglog(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let (mut sx, mut sy) = (0.0, 0.0);
    for &(x, y) in points {
        sx += x;
        sy += y;
    }
    let (mx, my) = (sx / n, sy / n);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(x, y) in points {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let beta = sxy / sxx;
    let intercept = my - beta * mx;
    let (mut ss_res, mut ss_tot) = (0.0, 0.0);
    for &(x, y) in points {
        let r = y - (intercept + beta * x);
        ss_res += r * r;
        ss_tot += (y - my) * (y - my);
    }
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0
    };
    (beta, r_squared)
}

/// Fits k ~ t^beta over the samples falling inside `window` (inclusive).
/// Needs at least 8 in-window samples with distinct times.
pub fn fit_power_law(series: &[(f64, f64)], window: (f64, f64)) -> Result<RegimeFit> {
    validate_series(series)?;
    let (lo, hi) = window;
    if !lo.is_finite() || !hi.is_finite() || lo <= 0.0 || hi <= lo {
        return Err(Error::Domain(format!(
            "window must satisfy 0 < lo < hi, got ({lo}, {hi})"
        )));
    }
    let points: Vec<(f64, f64)> = series
        .iter()
        .filter(|&&(t, _)| t >= lo && t <= hi)
        .map(|&(t, k)| (t.ln(), k.ln()))
        .collect();
    if points.len() < 8 {
        return Err(Error::Domain(format!(
            "power-law fit needs at least 8 samples inside the window, found {}",
            points.len()
        )));
    }
    let (beta, r_squared) = ols_loglog(&points);
    Ok(RegimeFit {
        window,
        beta,
        r_squared,
    })
}

/// Cross-over search result. `slopes` holds every evaluated sliding window
/// as (window center in t, local log-log slope), recording exactly how the
/// estimate was produced; `estimate` is absent when the local slope never
/// crosses the threshold from below inside the observed range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossoverDetection {
    pub estimate: Option<f64>,
    pub threshold: f64,
    pub window_decades: f64,
    pub slopes: Vec<(f64, f64)>,
}

/// Slides a one-third-decade window along the series in log t, fits a local
/// slope in each, and reports where the slope first rises through the
/// threshold, interpolated between window centers.
pub fn detect_crossover(series: &[(f64, f64)]) -> Result<CrossoverDetection> {
    validate_series(series)?;
    if series.len() < 8 {
        return Err(Error::Domain(format!(
            "cross-over detection needs at least 8 samples, got {}",
            series.len()
        )));
    }
    let ln10 = std::f64::consts::LN_10;
    let lt_min = series.first().unwrap().0.ln();
    let lt_max = series.last().unwrap().0.ln();
    if lt_max - lt_min < 2.0 * ln10 {
        return Err(Error::Domain(
            "series must span at least two decades in t".into(),
        ));
    }
    let log_series: Vec<(f64, f64)> = series.iter().map(|&(t, k)| (t.ln(), k.ln())).collect();

    let width = CROSSOVER_WINDOW_DECADES * ln10;
    let stride = width / 4.0;
    let mut slopes: Vec<(f64, f64)> = Vec::new();
    let mut start = lt_min;
    // A hair of slack keeps the final window from being dropped to rounding.
    while start + width <= lt_max + 1e-12 {
        let end = start + width;
        let in_window: Vec<(f64, f64)> = log_series
            .iter()
            .filter(|&&(lt, _)| lt >= start && lt <= end)
            .copied()
            .collect();
        if in_window.len() >= 3 {
            let (slope, _) = ols_loglog(&in_window);
            slopes.push(((start + 0.5 * width).exp(), slope));
        }
        start += stride;
    }

    let mut estimate = None;
    for pair in slopes.windows(2) {
        let (t_a, s_a) = pair[0];
        let (t_b, s_b) = pair[1];
        if s_a < CROSSOVER_SLOPE_THRESHOLD && s_b >= CROSSOVER_SLOPE_THRESHOLD {
            let frac = (CROSSOVER_SLOPE_THRESHOLD - s_a) / (s_b - s_a);
            estimate = Some((t_a.ln() + frac * (t_b.ln() - t_a.ln())).exp());
            break;
        }
    }

    Ok(CrossoverDetection {
        estimate,
        threshold: CROSSOVER_SLOPE_THRESHOLD,
        window_decades: CROSSOVER_WINDOW_DECADES,
        slopes,
    })
}
