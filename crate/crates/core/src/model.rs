//! Closed-form value and cost curves for activity-driven network growth,
//! their intersection times, and the scenario classifier built on them.
//!
//! The value curve accumulated by time t is 2mt + c*sqrt(t); the linear
//! maintenance cost is (alpha + m)t. The constant c is fixed by the initial
//! condition k(t0) = k0. Everything in this module is pure arithmetic on the
//! parameters: no state, no RNG, safe to call from any thread.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative half-width of the band around t_char == t_star inside which a
/// parameter point is reported as Boundary rather than early or late stop.
/// Floating-point dust from ratio grids is orders of magnitude below this.
pub const BOUNDARY_REL_TOL: f64 = 1e-9;

/// Full parameter set for one network. Analytic operations ignore `n_nodes`
/// and `m0`; the simulator uses all fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Node count. At least 2 so every link has a destination distinct from
    /// its source.
    pub n_nodes: usize,
    /// Links created per step, 1 <= m <= n_nodes.
    pub m: u32,
    /// Links already present before the first step.
    pub m0: u64,
    /// Initial activity of every node, k0 >= 0.
    pub k0: f64,
    /// Start of the observable window, t0 > 0.
    pub t0: f64,
    /// Maintenance cost rate per link, alpha >= 0.
    pub alpha: f64,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_nodes < 2 {
            return Err(Error::Config(format!(
                "n_nodes: must be at least 2, got {}",
                self.n_nodes
            )));
        }
        if self.m == 0 {
            return Err(Error::Config("m: must be at least 1".into()));
        }
        if self.m as usize > self.n_nodes {
            return Err(Error::Config(format!(
                "m: must not exceed n_nodes ({} > {})",
                self.m, self.n_nodes
            )));
        }
        if !self.k0.is_finite() || self.k0 < 0.0 {
            return Err(Error::Config(format!(
                "k0: must be finite and non-negative, got {}",
                self.k0
            )));
        }
        if !self.t0.is_finite() || self.t0 <= 0.0 {
            return Err(Error::Config(format!(
                "t0: must be finite and positive, got {}",
                self.t0
            )));
        }
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return Err(Error::Config(format!(
                "alpha: must be finite and non-negative, got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    pub fn constant_c(&self) -> Result<f64> {
        constant_c(self.k0, self.m, self.t0)
    }

    pub fn derived(&self) -> Result<DerivedConstants> {
        DerivedConstants::from_params(self)
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        value_curve(t, self.m, self.constant_c()?)
    }

    pub fn cost(&self, t: f64) -> Result<f64> {
        cost_curve(t, self.m, self.alpha)
    }

    pub fn classify(&self, tol: f64) -> Result<Classification> {
        classify_scenario(self, tol)
    }
}

/// Constants fixed by a parameter set. `t_star` is absent when the sqrt
/// coefficient is non-positive, `t_char` when value and cost never intersect
/// at positive time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedConstants {
    pub c: f64,
    pub t_star: Option<f64>,
    pub t_char: Option<f64>,
}

impl DerivedConstants {
    pub fn from_params(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let c = params.constant_c()?;
        Ok(DerivedConstants {
            c,
            t_star: crossover_time(c, params.m),
            t_char: characteristic_time(c, params.m, params.alpha),
        })
    }
}

/// Coefficient of the sqrt term, fixed by k(t0) = k0.
pub fn constant_c(k0: f64, m: u32, t0: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("m must be at least 1".into()));
    }
    if !k0.is_finite() || k0 < 0.0 {
        return Err(Error::Domain(format!(
            "k0 must be finite and non-negative, got {k0}"
        )));
    }
    if !t0.is_finite() || t0 <= 0.0 {
        return Err(Error::Domain(format!(
            "t0 must be finite and positive, got {t0}"
        )));
    }
    Ok((k0 - 2.0 * f64::from(m) * t0) / t0.sqrt())
}

/// Accumulated activity value at time t: 2mt + c*sqrt(t).
pub fn value_curve(t: f64, m: u32, c: f64) -> Result<f64> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Domain(format!(
            "t must be finite and non-negative, got {t}"
        )));
    }
    Ok(2.0 * f64::from(m) * t + c * t.sqrt())
}

/// Accumulated maintenance cost at time t: (alpha + m)t.
pub fn cost_curve(t: f64, m: u32, alpha: f64) -> Result<f64> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Domain(format!(
            "t must be finite and non-negative, got {t}"
        )));
    }
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::Domain(format!(
            "alpha must be finite and non-negative, got {alpha}"
        )));
    }
    Ok((alpha + f64::from(m)) * t)
}

/// Value minus cost at time t.
pub fn net_value(t: f64, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    Ok(params.value(t)? - params.cost(t)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GrowthStatus {
    Growing,
    NoGrowth,
}

/// Growing exactly when value exceeds cost; a tie counts as no growth.
pub fn growth_status(t: f64, params: &ModelParams) -> Result<GrowthStatus> {
    Ok(if net_value(t, params)? > 0.0 {
        GrowthStatus::Growing
    } else {
        GrowthStatus::NoGrowth
    })
}

/// Time where the sqrt and linear halves of the value curve contribute
/// equally: (c/2m)^2. Absent for c <= 0, where the curve is linear-dominated
/// from the start.
pub fn crossover_time(c: f64, m: u32) -> Option<f64> {
    debug_assert!(m >= 1);
    if c > 0.0 {
        let half_slope_ratio = c / (2.0 * f64::from(m));
        Some(half_slope_ratio * half_slope_ratio)
    } else {
        None
    }
}

/// Positive-time intersection of value and cost: (c/(alpha - m))^2. Exists
/// only when c and alpha - m share a sign and neither is zero; otherwise the
/// curves meet at t = 0 alone.
pub fn characteristic_time(c: f64, m: u32, alpha: f64) -> Option<f64> {
    debug_assert!(m >= 1);
    let gap = alpha - f64::from(m);
    if c == 0.0 || gap == 0.0 {
        return None;
    }
    if (c > 0.0) != (gap > 0.0) {
        return None;
    }
    let root = c / gap;
    Some(root * root)
}

/// Long-run fate of a parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    /// Cost at or above value for the whole observable window.
    Failure,
    /// Value stays above cost for all t > t0.
    EverGrowing,
    /// Growth stops before the sqrt-to-linear cross-over (alpha > 3m).
    TradeoffEarlyStop,
    /// Growth stops after the cross-over (m < alpha < 3m).
    TradeoffLateStop,
    /// t_char and t_star coincide within tolerance (alpha == 3m).
    Boundary,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::Failure => "Failure",
            Scenario::EverGrowing => "EverGrowing",
            Scenario::TradeoffEarlyStop => "TradeoffEarlyStop",
            Scenario::TradeoffLateStop => "TradeoffLateStop",
            Scenario::Boundary => "Boundary",
        })
    }
}

/// Classifier verdict plus the constants it was based on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Classification {
    pub scenario: Scenario,
    pub c: f64,
    pub t_star: Option<f64>,
    pub t_char: Option<f64>,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.scenario)?;
        if self.scenario == Scenario::EverGrowing {
            return write!(f, " t_char=inf");
        }
        if let Some(ts) = self.t_star {
            write!(f, " t*={ts}")?;
        }
        if let Some(tc) = self.t_char {
            write!(f, " t_char={tc}")?;
        }
        Ok(())
    }
}

/// Maps a parameter set to its scenario.
///
/// For c > 0 the verdict follows the position of t_char relative to t_star:
/// inside the tolerance band is Boundary, below is the early-stop side,
/// above the late-stop side. On the early-stop side a t_char at or before t0
/// means growth was already over when observation started, which is Failure.
/// For c <= 0 the sqrt term never helps and the verdict is a pure slope
/// comparison: alpha < m grows forever, anything else never grows. No
/// intersection times are reported in that degenerate branch.
pub fn classify_scenario(params: &ModelParams, tol: f64) -> Result<Classification> {
    if !tol.is_finite() || tol < 0.0 {
        return Err(Error::Domain(format!(
            "tolerance must be finite and non-negative, got {tol}"
        )));
    }
    params.validate()?;
    let c = params.constant_c()?;

    if c <= 0.0 {
        let scenario = if params.alpha < f64::from(params.m) {
            Scenario::EverGrowing
        } else {
            Scenario::Failure
        };
        return Ok(Classification {
            scenario,
            c,
            t_star: None,
            t_char: None,
        });
    }

    let t_star = crossover_time(c, params.m).expect("c > 0 has a cross-over time");
    let Some(t_char) = characteristic_time(c, params.m, params.alpha) else {
        return Ok(Classification {
            scenario: Scenario::EverGrowing,
            c,
            t_star: Some(t_star),
            t_char: None,
        });
    };

    let scenario = if (t_char - t_star).abs() <= tol * t_star {
        Scenario::Boundary
    } else if t_char < t_star {
        if t_char <= params.t0 {
            Scenario::Failure
        } else {
            Scenario::TradeoffEarlyStop
        }
    } else {
        Scenario::TradeoffLateStop
    };

    Ok(Classification {
        scenario,
        c,
        t_star: Some(t_star),
        t_char: Some(t_char),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(k0: f64, m: u32, alpha: f64, t0: f64) -> ModelParams {
        ModelParams {
            n_nodes: 100,
            m,
            m0: 0,
            k0,
            t0,
            alpha,
        }
    }

    #[test]
    fn constant_c_frozen_values() {
        assert_eq!(constant_c(10.0, 2, 1.0).unwrap(), 6.0);
        assert_eq!(constant_c(4.0, 2, 1.0).unwrap(), 0.0);
        assert_eq!(constant_c(50.0, 1, 4.0).unwrap(), 21.0);
    }

    #[test]
    fn constant_c_rejects_bad_domains() {
        assert!(constant_c(10.0, 2, 0.0).is_err());
        assert!(constant_c(10.0, 2, -1.0).is_err());
        assert!(constant_c(-1.0, 2, 1.0).is_err());
        assert!(constant_c(10.0, 0, 1.0).is_err());
    }

    #[test]
    fn value_curve_frozen_values() {
        assert_eq!(value_curve(1.0, 2, 6.0).unwrap(), 10.0);
        assert_eq!(value_curve(4.0, 2, 6.0).unwrap(), 28.0);
        assert_eq!(value_curve(10.0, 3, 0.0).unwrap(), 60.0);
        assert!(value_curve(-0.5, 2, 6.0).is_err());
    }

    #[test]
    fn cost_curve_frozen_values() {
        assert_eq!(cost_curve(0.0, 2, 4.0).unwrap(), 0.0);
        assert_eq!(cost_curve(5.0, 2, 4.0).unwrap(), 30.0);
        let cost = cost_curve(9.0, 2, 4.0).unwrap();
        assert_eq!(cost, 54.0);
        // The curves intersect at t = 9 for these parameters.
        assert_eq!(cost, value_curve(9.0, 2, 6.0).unwrap());
        assert!(cost_curve(-1.0, 2, 4.0).is_err());
        assert!(cost_curve(1.0, 2, -0.1).is_err());
    }

    #[test]
    fn net_value_and_growth_status_frozen_values() {
        let p = params(10.0, 2, 4.0, 1.0);
        // value(1) = 4 + 6, cost(1) = 6.
        assert_eq!(net_value(1.0, &p).unwrap(), 4.0);
        assert_eq!(net_value(9.0, &p).unwrap(), 0.0);
        assert_eq!(net_value(16.0, &p).unwrap(), -8.0);
        assert_eq!(growth_status(1.0, &p).unwrap(), GrowthStatus::Growing);
        assert_eq!(growth_status(9.0, &p).unwrap(), GrowthStatus::NoGrowth);
        assert_eq!(growth_status(16.0, &p).unwrap(), GrowthStatus::NoGrowth);
    }

    #[test]
    fn crossover_time_frozen_values() {
        assert_eq!(crossover_time(6.0, 2), Some(2.25));
        assert_eq!(crossover_time(0.0, 3), None);
        assert_eq!(crossover_time(-2.0, 3), None);
    }

    #[test]
    fn crossover_time_matches_initial_degree_contours() {
        // Along the contour at level L (t0 = 1), k0 = 2m(1 + sqrt(L)).
        for level in [600.0f64, 1200.0, 1800.0, 2400.0] {
            for m in [1u32, 5, 20] {
                let k0 = 2.0 * f64::from(m) * (1.0 + level.sqrt());
                let c = constant_c(k0, m, 1.0).unwrap();
                let t_star = crossover_time(c, m).unwrap();
                assert!(
                    (t_star - level).abs() <= 1e-12 * level,
                    "m={m} level={level} t_star={t_star}"
                );
            }
        }
        let c = constant_c(2.0 * (1.0 + 600f64.sqrt()), 1, 1.0).unwrap();
        assert!((c - 48.9898).abs() < 1e-3);
    }

    #[test]
    fn characteristic_time_frozen_values() {
        assert_eq!(characteristic_time(6.0, 2, 4.0), Some(9.0));
        assert_eq!(characteristic_time(6.0, 2, 6.0), Some(2.25));
        assert_eq!(characteristic_time(6.0, 2, 1.0), None);
        assert_eq!(characteristic_time(6.0, 2, 2.0), None);
        assert_eq!(characteristic_time(0.0, 2, 4.0), None);
        // Both negative: the curves still meet at positive time.
        assert_eq!(characteristic_time(-3.0, 2, 1.0), Some(9.0));
        assert_eq!(characteristic_time(-3.0, 2, 4.0), None);
    }

    #[test]
    fn classify_frozen_examples() {
        let failure = classify_scenario(&params(10.0, 1, 100.0, 1.0), BOUNDARY_REL_TOL).unwrap();
        assert_eq!(failure.scenario, Scenario::Failure);
        assert_eq!(failure.c, 8.0);
        let tc = failure.t_char.unwrap();
        assert!((tc - (8.0f64 / 99.0).powi(2)).abs() < 1e-15);

        let ever = classify_scenario(&params(10.0, 2, 2.0, 1.0), BOUNDARY_REL_TOL).unwrap();
        assert_eq!(ever.scenario, Scenario::EverGrowing);
        assert_eq!(ever.t_char, None);
        assert_eq!(ever.to_string(), "EverGrowing t_char=inf");

        let late = classify_scenario(&params(10.0, 2, 4.0, 1.0), BOUNDARY_REL_TOL).unwrap();
        assert_eq!(late.scenario, Scenario::TradeoffLateStop);
        assert_eq!(late.t_star, Some(2.25));
        assert_eq!(late.t_char, Some(9.0));
        assert_eq!(late.to_string(), "TradeoffLateStop t*=2.25 t_char=9");
    }

    #[test]
    fn classify_boundary_band() {
        let b = classify_scenario(&params(10.0, 2, 6.0, 1.0), BOUNDARY_REL_TOL).unwrap();
        assert_eq!(b.scenario, Scenario::Boundary);
        assert_eq!(b.t_star, b.t_char);

        let early = classify_scenario(&params(10.0, 2, 6.001, 1.0), BOUNDARY_REL_TOL).unwrap();
        assert_eq!(early.scenario, Scenario::TradeoffEarlyStop);
        let late = classify_scenario(&params(10.0, 2, 5.999, 1.0), BOUNDARY_REL_TOL).unwrap();
        assert_eq!(late.scenario, Scenario::TradeoffLateStop);
    }

    #[test]
    fn classify_late_side_ignores_pre_window_stop() {
        // Both intersection times sit before t0, but alpha < 3m keeps this
        // on the late-stop side rather than Failure.
        let p = params(5.0, 2, 5.8, 1.0);
        let cls = classify_scenario(&p, BOUNDARY_REL_TOL).unwrap();
        assert!(cls.t_char.unwrap() < 1.0);
        assert_eq!(cls.scenario, Scenario::TradeoffLateStop);
    }

    #[test]
    fn classify_linear_dominated_values() {
        // c == 0: pure slope comparison.
        assert_eq!(
            classify_scenario(&params(4.0, 2, 1.0, 1.0), BOUNDARY_REL_TOL)
                .unwrap()
                .scenario,
            Scenario::EverGrowing
        );
        assert_eq!(
            classify_scenario(&params(4.0, 2, 2.0, 1.0), BOUNDARY_REL_TOL)
                .unwrap()
                .scenario,
            Scenario::Failure
        );
        // c < 0 behaves the same and reports no intersection times.
        let cls = classify_scenario(&params(1.0, 2, 5.0, 1.0), BOUNDARY_REL_TOL).unwrap();
        assert_eq!(cls.scenario, Scenario::Failure);
        assert_eq!(cls.t_star, None);
        assert_eq!(cls.t_char, None);
        assert_eq!(
            classify_scenario(&params(1.0, 2, 0.5, 1.0), BOUNDARY_REL_TOL)
                .unwrap()
                .scenario,
            Scenario::EverGrowing
        );
    }

    #[test]
    fn params_validation_names_offending_field() {
        let base = params(10.0, 2, 4.0, 1.0);
        let cases: Vec<(ModelParams, &str)> = vec![
            (
                ModelParams {
                    n_nodes: 1,
                    ..base.clone()
                },
                "n_nodes",
            ),
            (ModelParams { m: 0, ..base.clone() }, "m"),
            (
                ModelParams {
                    m: 101,
                    ..base.clone()
                },
                "m",
            ),
            (
                ModelParams {
                    k0: -1.0,
                    ..base.clone()
                },
                "k0",
            ),
            (
                ModelParams {
                    t0: 0.0,
                    ..base.clone()
                },
                "t0",
            ),
            (
                ModelParams {
                    alpha: -0.5,
                    ..base.clone()
                },
                "alpha",
            ),
        ];
        for (p, field) in cases {
            let err = p.validate().unwrap_err().to_string();
            assert!(err.contains(field), "{err} should name {field}");
        }
    }

    proptest! {
        // The initial condition pins the value curve: k(t0) == k0 up to a
        // forward error of a few ulps on the curve's own scale.
        #[test]
        fn value_curve_recovers_initial_activity(
            k0 in 0.0..1e4f64,
            m in 1u32..=100,
            t0 in 0.05..50.0f64,
        ) {
            let c = constant_c(k0, m, t0).unwrap();
            let v = value_curve(t0, m, c).unwrap();
            let scale = k0.abs() + 2.0 * f64::from(m) * t0;
            prop_assert!((v - k0).abs() <= 32.0 * f64::EPSILON * scale);
        }

        // Wherever a positive-time intersection exists the two curves agree
        // there to high relative accuracy.
        #[test]
        fn curves_meet_at_characteristic_time(
            m in 1u32..=50,
            t0 in 0.1..10.0f64,
            surplus in 0.001..500.0f64,
            ratio in 1.0001..50.0f64,
        ) {
            let k0 = 2.0 * f64::from(m) * t0 + surplus;
            let alpha = f64::from(m) * ratio;
            let c = constant_c(k0, m, t0).unwrap();
            prop_assume!(c > 0.0);
            if let Some(tc) = characteristic_time(c, m, alpha) {
                let v = value_curve(tc, m, c).unwrap();
                let cost = cost_curve(tc, m, alpha).unwrap();
                prop_assert!((v - cost).abs() <= 1e-9 * cost.max(1e-300));
            }
        }

        // Rescaling (k0, m, alpha) by a common integer factor leaves both
        // intersection times unchanged (t0 = 1). Quarter-integer parameters
        // keep every product exact, so the quotients agree bit for bit; the
        // assertion allows a little slack anyway.
        #[test]
        fn intersection_times_are_scale_invariant(
            lambda in 2u32..=5,
            m in 1u32..=20,
            k0_quarters in 0u32..4000,
            alpha_quarters in 0u32..800,
        ) {
            let k0 = f64::from(k0_quarters) * 0.25;
            let alpha = f64::from(alpha_quarters) * 0.25;
            let lf = f64::from(lambda);
            let c1 = constant_c(k0, m, 1.0).unwrap();
            let c2 = constant_c(lf * k0, lambda * m, 1.0).unwrap();
            let pairs = [
                (crossover_time(c1, m), crossover_time(c2, lambda * m)),
                (
                    characteristic_time(c1, m, alpha),
                    characteristic_time(c2, lambda * m, lf * alpha),
                ),
            ];
            for (a, b) in pairs {
                match (a, b) {
                    (None, None) => {}
                    (Some(x), Some(y)) => {
                        prop_assert!((x - y).abs() <= 1e-12 * x.max(1e-300), "{x} vs {y}");
                    }
                    other => prop_assert!(false, "presence mismatch {other:?}"),
                }
            }
        }

        // Outside the boundary band the verdict tracks the sign of
        // alpha - 3m: below is late stop, above is the early-stop side
        // (which includes Failure when the stop predates t0).
        #[test]
        fn classifier_agrees_with_slope_inequality(
            m in 1u32..=30,
            t0 in 0.1..10.0f64,
            surplus in 0.01..300.0f64,
            offset in 0.001..1.9f64,
            above in proptest::bool::ANY,
        ) {
            // Offsets below 2 keep alpha strictly between m and 5m, so a
            // characteristic time always exists.
            let k0 = 2.0 * f64::from(m) * t0 + surplus;
            let alpha = f64::from(m) * (3.0 + if above { offset } else { -offset });
            let p = ModelParams { n_nodes: 100, m, m0: 0, k0, t0, alpha };
            let cls = classify_scenario(&p, BOUNDARY_REL_TOL).unwrap();
            if above {
                prop_assert!(
                    cls.scenario == Scenario::TradeoffEarlyStop
                        || cls.scenario == Scenario::Failure,
                    "alpha > 3m gave {:?}",
                    cls.scenario
                );
            } else {
                prop_assert_eq!(cls.scenario, Scenario::TradeoffLateStop);
            }
        }
    }
}
