//! Classical fourth-order Runge-Kutta integration of the tracked-node
//! mean-field rate dk/dt = m + k/(2t). The curve through (t0, k0) has the
//! closed form 2mt + c*sqrt(t), which makes this module an independent
//! cross-check for the model formulas rather than their source of truth.

use crate::error::{Error, Result};

/// Successive grid refinements must agree to this relative tolerance before
/// `integrate_meanfield_converged` accepts an endpoint.
pub const MEANFIELD_REFINE_REL_TOL: f64 = 1e-8;

/// Hard ceiling on stored samples so a careless dt cannot exhaust memory.
const MAX_STORED_SAMPLES: u64 = 100_000_000;

fn rate(t: f64, k: f64, m: f64) -> f64 {
    m + k / (2.0 * t)
}

fn rk4_step(t: f64, k: f64, h: f64, m: f64) -> f64 {
    let k1 = rate(t, k, m);
    let k2 = rate(t + 0.5 * h, k + 0.5 * h * k1, m);
    let k3 = rate(t + 0.5 * h, k + 0.5 * h * k2, m);
    let k4 = rate(t + h, k + h * k3, m);
    k + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

fn check_start(k_start: f64, t_start: f64, m: u32, dt: f64) -> Result<()> {
    if m == 0 {
        return Err(Error::Domain("m must be at least 1".into()));
    }
    if !k_start.is_finite() || k_start < 0.0 {
        return Err(Error::Domain(format!(
            "k_start must be finite and non-negative, got {k_start}"
        )));
    }
    if !t_start.is_finite() || t_start <= 0.0 {
        return Err(Error::Domain(format!(
            "t_start must be positive, the rate is singular at t = 0 (got {t_start})"
        )));
    }
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    Ok(())
}

/// Integrates from (t_start, k_start) to t_end with fixed step dt, returning
/// every grid point including the start; the final step is shortened to land
/// exactly on t_end.
pub fn integrate_meanfield(
    k_start: f64,
    t_start: f64,
    t_end: f64,
    m: u32,
    dt: f64,
) -> Result<Vec<(f64, f64)>> {
    check_start(k_start, t_start, m, dt)?;
    if !t_end.is_finite() || t_end <= t_start {
        return Err(Error::Domain(format!(
            "t_end must exceed t_start ({t_end} vs {t_start})"
        )));
    }
    let span = t_end - t_start;
    if dt >= span {
        return Err(Error::Domain(format!(
            "dt must be smaller than the integration span ({dt} vs {span})"
        )));
    }
    let steps = (span / dt).ceil() as u64;
    if steps + 1 > MAX_STORED_SAMPLES {
        return Err(Error::Capacity(format!(
            "{steps} integration steps would be stored; raise dt or use the \
             sampled variant"
        )));
    }
    let mf = f64::from(m);
    let mut out = Vec::with_capacity(steps as usize + 1);
    let mut t = t_start;
    let mut k = k_start;
    out.push((t, k));
    for i in 1..=steps {
        let next_t = if i == steps { t_end } else { t_start + i as f64 * dt };
        k = rk4_step(t, k, next_t - t, mf);
        t = next_t;
        out.push((t, k));
    }
    Ok(out)
}

/// Integrates through an ascending list of sample times, storing only the
/// samples. Each inter-sample gap is cut into equal steps no longer than dt.
pub fn integrate_meanfield_at(
    k_start: f64,
    t_start: f64,
    m: u32,
    dt: f64,
    sample_times: &[f64],
) -> Result<Vec<f64>> {
    check_start(k_start, t_start, m, dt)?;
    if sample_times.is_empty() {
        return Err(Error::Domain("no sample times given".into()));
    }
    let mut prev = t_start;
    for (i, &s) in sample_times.iter().enumerate() {
        if !s.is_finite() || s < prev || (i > 0 && s == prev) {
            return Err(Error::Domain(format!(
                "sample times must ascend from t_start, offender at index {i}: {s}"
            )));
        }
        prev = s;
    }
    let mf = f64::from(m);
    let mut t = t_start;
    let mut k = k_start;
    let mut out = Vec::with_capacity(sample_times.len());
    for &target in sample_times {
        let gap = target - t;
        if gap > 0.0 {
            let substeps = (gap / dt).ceil().max(1.0) as u64;
            let h = gap / substeps as f64;
            for j in 1..=substeps {
                let next_t = if j == substeps { target } else { t + h };
                k = rk4_step(t, k, next_t - t, mf);
                t = next_t;
            }
        }
        out.push(k);
    }
    Ok(out)
}

/// Endpoint value with automatic step refinement: halves dt until two
/// successive grids agree to `MEANFIELD_REFINE_REL_TOL`.
pub fn integrate_meanfield_converged(
    k_start: f64,
    t_start: f64,
    t_end: f64,
    m: u32,
) -> Result<f64> {
    if !t_end.is_finite() || t_end <= t_start {
        return Err(Error::Domain(format!(
            "t_end must exceed t_start ({t_end} vs {t_start})"
        )));
    }
    let mut dt = (t_end - t_start) / 1024.0;
    let mut prev = integrate_meanfield_at(k_start, t_start, m, dt, &[t_end])?[0];
    for _ in 0..30 {
        dt *= 0.5;
        let next = integrate_meanfield_at(k_start, t_start, m, dt, &[t_end])?[0];
        if (next - prev).abs() <= MEANFIELD_REFINE_REL_TOL * next.abs().max(f64::MIN_POSITIVE) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Invariant(
        "mean-field refinement did not converge in 30 halvings".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{constant_c, value_curve};

    #[test]
    fn tracks_closed_form_with_sqrt_term() {
        // Start (t=1, k=10) with m=2 fixes c=6.
        let samples = integrate_meanfield(10.0, 1.0, 100.0, 2, 1e-3).unwrap();
        assert_eq!(samples[0], (1.0, 10.0));
        assert_eq!(samples.last().unwrap().0, 100.0);
        for &(t, k) in &samples {
            let exact = value_curve(t, 2, 6.0).unwrap();
            assert!(
                (k - exact).abs() <= 1e-6 * exact,
                "t={t}: {k} vs {exact}"
            );
        }
        // Spot value away from the start.
        let k4 = integrate_meanfield_at(10.0, 1.0, 2, 1e-3, &[4.0]).unwrap()[0];
        assert!((k4 - 28.0).abs() <= 1e-6 * 28.0);
    }

    #[test]
    fn degenerate_start_stays_on_the_line() {
        // k_start = 2m * t_start makes c = 0 and the solution a pure line.
        let samples = integrate_meanfield(4.0, 1.0, 50.0, 2, 1e-3).unwrap();
        for &(t, k) in &samples {
            assert!((k - 4.0 * t).abs() <= 1e-9 * 4.0 * t, "t={t}: {k}");
        }
    }

    #[test]
    fn sampled_variant_matches_closed_form() {
        let times = [1.0, 2.25, 9.0, 100.0];
        let ks = integrate_meanfield_at(10.0, 1.0, 2, 1e-3, &times).unwrap();
        assert_eq!(ks[0], 10.0);
        for (&t, &k) in times.iter().zip(&ks) {
            let exact = value_curve(t, 2, 6.0).unwrap();
            assert!((k - exact).abs() <= 1e-9 * exact, "t={t}");
        }
    }

    #[test]
    fn converged_endpoint_matches_closed_form() {
        let k = integrate_meanfield_converged(10.0, 1.0, 500.0, 2).unwrap();
        let exact = value_curve(500.0, 2, 6.0).unwrap();
        assert!((k - exact).abs() <= 1e-7 * exact, "{k} vs {exact}");
    }

    #[test]
    fn random_starts_agree_with_closed_form() {
        // Deterministic pseudo-random parameter scatter; the integrator and
        // the closed form must agree wherever c > 0.
        let mut x = 0x2545F4914F6CDD1Du64;
        let mut next = move || {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..10 {
            let m = 1 + (next() * 9.0) as u32;
            let k0 = 2.0 * f64::from(m) + 1.0 + next() * 50.0;
            let c = constant_c(k0, m, 1.0).unwrap();
            assert!(c > 0.0);
            let times: Vec<f64> = (0..50)
                .map(|i| 10f64.powf(i as f64 * 3.0 / 49.0))
                .collect();
            let ks = integrate_meanfield_at(k0, 1.0, m, 1e-3, &times).unwrap();
            for (&t, &k) in times.iter().zip(&ks) {
                let exact = value_curve(t, m, c).unwrap();
                assert!(
                    (k - exact).abs() <= 1e-6 * exact,
                    "m={m} k0={k0} t={t}: {k} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn rejects_bad_domains() {
        assert!(integrate_meanfield(10.0, 0.0, 10.0, 2, 1e-3).is_err());
        assert!(integrate_meanfield(10.0, -1.0, 10.0, 2, 1e-3).is_err());
        assert!(integrate_meanfield(10.0, 1.0, 1.0, 2, 1e-3).is_err());
        assert!(integrate_meanfield(10.0, 1.0, 10.0, 2, 0.0).is_err());
        assert!(integrate_meanfield(10.0, 1.0, 10.0, 2, 9.5).is_err());
        assert!(integrate_meanfield(10.0, 1.0, 10.0, 0, 1e-3).is_err());
        assert!(integrate_meanfield_at(10.0, 1.0, 2, 1e-3, &[]).is_err());
        assert!(integrate_meanfield_at(10.0, 1.0, 2, 1e-3, &[2.0, 1.5]).is_err());
        assert!(integrate_meanfield_at(10.0, 1.0, 2, 1e-3, &[0.5]).is_err());
    }
}
