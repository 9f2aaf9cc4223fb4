//! Phase-plane sweeps: cross-over times over the (k0, m) plane, log
//! characteristic times over normalized coordinate planes, and the scenario
//! map. Normalized sweeps fix t0 = 1 and instantiate each cell at m = 1;
//! both intersection times depend only on the coordinate ratios, which the
//! grid-symmetry tests pin down.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    characteristic_time, classify_scenario, constant_c, crossover_time, ModelParams, Scenario,
};

/// Normalized parameter planes for characteristic-time sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CoordinateSystem {
    /// Axes (alpha/k0, m/k0).
    PerK0,
    /// Axes (alpha/m, k0/m).
    PerM,
}

/// Rectangular grid of one scalar quantity. `values` is row-major over
/// (y, x); `None` marks cells where the quantity is not defined.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseGrid {
    pub quantity: String,
    pub x_label: String,
    pub y_label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub values: Vec<Option<f64>>,
    pub t0: f64,
}

impl PhaseGrid {
    pub fn at(&self, ix: usize, iy: usize) -> Option<f64> {
        self.values[iy * self.x.len() + ix]
    }
}

/// One vertex of an extracted level set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourPoint {
    pub level: f64,
    pub x: f64,
    pub y: f64,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    let mut out: Vec<f64> = (0..n).map(|i| lo + i as f64 * step).collect();
    out[n - 1] = hi;
    out
}

fn check_range(name: &str, (lo, hi): (f64, f64), points: usize, min_lo: f64) -> Result<()> {
    if points < 1 {
        return Err(Error::Domain(format!("{name}: needs at least 1 point")));
    }
    if !lo.is_finite() || !hi.is_finite() || hi < lo {
        return Err(Error::Domain(format!(
            "{name}: range must be finite with hi >= lo, got ({lo}, {hi})"
        )));
    }
    if lo < min_lo {
        return Err(Error::Domain(format!(
            "{name}: range must start at or above {min_lo}, got {lo}"
        )));
    }
    Ok(())
}

/// Cross-over time over a (k0, m) grid at fixed t0. Cells with a
/// non-positive sqrt coefficient carry no value.
pub fn sweep_crossover(
    k0_range: (f64, f64),
    k0_points: usize,
    m_range: (u32, u32),
    t0: f64,
) -> Result<PhaseGrid> {
    check_range("k0", k0_range, k0_points, 0.0)?;
    if m_range.0 < 1 || m_range.1 < m_range.0 {
        return Err(Error::Domain(format!(
            "m: range must satisfy 1 <= lo <= hi, got ({}, {})",
            m_range.0, m_range.1
        )));
    }
    if !t0.is_finite() || t0 <= 0.0 {
        return Err(Error::Domain(format!("t0 must be positive, got {t0}")));
    }
    let x = linspace(k0_range.0, k0_range.1, k0_points);
    let y: Vec<f64> = (m_range.0..=m_range.1).map(f64::from).collect();
    let mut values = Vec::with_capacity(x.len() * y.len());
    for m in m_range.0..=m_range.1 {
        for &k0 in &x {
            let c = constant_c(k0, m, t0)?;
            values.push(crossover_time(c, m));
        }
    }
    Ok(PhaseGrid {
        quantity: "t_star".into(),
        x_label: "k0".into(),
        y_label: "m".into(),
        x,
        y,
        values,
        t0,
    })
}

/// Level-set vertices of a grid, one per row and level where the value
/// brackets the level between adjacent defined cells. Interpolation is
/// linear in the square root of the value, which is exact whenever the
/// quantity is the square of an affine function of x; the cross-over grid
/// has that form along its k0 axis.
pub fn extract_contours(grid: &PhaseGrid, levels: &[f64]) -> Result<Vec<ContourPoint>> {
    for &level in levels {
        if !level.is_finite() || level < 0.0 {
            return Err(Error::Domain(format!(
                "contour levels must be finite and non-negative, got {level}"
            )));
        }
    }
    let nx = grid.x.len();
    let mut points = Vec::new();
    for (iy, &yv) in grid.y.iter().enumerate() {
        for &level in levels {
            let target = level.sqrt();
            for ix in 0..nx.saturating_sub(1) {
                let (Some(a), Some(b)) = (grid.at(ix, iy), grid.at(ix + 1, iy)) else {
                    continue;
                };
                let (sa, sb) = (a.sqrt(), b.sqrt());
                let (lo, hi) = if sa <= sb { (sa, sb) } else { (sb, sa) };
                if target < lo || target > hi || sa == sb {
                    continue;
                }
                let frac = (target - sa) / (sb - sa);
                points.push(ContourPoint {
                    level,
                    x: grid.x[ix] + frac * (grid.x[ix + 1] - grid.x[ix]),
                    y: yv,
                });
                break;
            }
        }
    }
    Ok(points)
}

/// Instantiates concrete parameters for one cell of a normalized plane.
/// Every cell is realized at m = 1; the intersection times depend only on
/// the ratios, so the representative is arbitrary.
fn cell_params(coords: CoordinateSystem, x: f64, y: f64) -> (f64, f64) {
    match coords {
        CoordinateSystem::PerM => (y, x),
        CoordinateSystem::PerK0 => (1.0 / y, x / y),
    }
}

/// ln(t_char) over a normalized plane at t0 = 1. Cells where value and cost
/// never intersect at positive time carry no value; the characteristic time
/// diverges as alpha/m approaches 1 from above, so that column is absent.
pub fn sweep_characteristic(
    coords: CoordinateSystem,
    x_range: (f64, f64),
    x_points: usize,
    y_range: (f64, f64),
    y_points: usize,
) -> Result<PhaseGrid> {
    let (x_label, y_label, y_min) = match coords {
        CoordinateSystem::PerM => ("alpha/m", "k0/m", 0.0),
        CoordinateSystem::PerK0 => ("alpha/k0", "m/k0", f64::MIN_POSITIVE),
    };
    check_range(x_label, x_range, x_points, 0.0)?;
    check_range(y_label, y_range, y_points, y_min)?;
    let x = linspace(x_range.0, x_range.1, x_points);
    let y = linspace(y_range.0, y_range.1, y_points);
    let mut values = Vec::with_capacity(x.len() * y.len());
    for &yv in &y {
        for &xv in &x {
            let (k0, alpha) = cell_params(coords, xv, yv);
            let c = constant_c(k0, 1, 1.0)?;
            values.push(characteristic_time(c, 1, alpha).map(f64::ln));
        }
    }
    Ok(PhaseGrid {
        quantity: "ln_t_char".into(),
        x_label: x_label.into(),
        y_label: y_label.into(),
        x,
        y,
        values,
        t0: 1.0,
    })
}

/// Scenario verdict over the (alpha/m, k0/m) plane at t0 = 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioGrid {
    pub x_label: String,
    pub y_label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub scenarios: Vec<Scenario>,
    pub tol: f64,
    pub t0: f64,
}

impl ScenarioGrid {
    pub fn at(&self, ix: usize, iy: usize) -> Scenario {
        self.scenarios[iy * self.x.len() + ix]
    }
}

pub fn scenario_map(
    x_range: (f64, f64),
    x_points: usize,
    y_range: (f64, f64),
    y_points: usize,
    tol: f64,
) -> Result<ScenarioGrid> {
    check_range("alpha/m", x_range, x_points, 0.0)?;
    check_range("k0/m", y_range, y_points, 0.0)?;
    let x = linspace(x_range.0, x_range.1, x_points);
    let y = linspace(y_range.0, y_range.1, y_points);
    let mut scenarios = Vec::with_capacity(x.len() * y.len());
    for &yv in &y {
        for &xv in &x {
            let params = ModelParams {
                n_nodes: 2,
                m: 1,
                m0: 0,
                k0: yv,
                t0: 1.0,
                alpha: xv,
            };
            scenarios.push(classify_scenario(&params, tol)?.scenario);
        }
    }
    Ok(ScenarioGrid {
        x_label: "alpha/m".into(),
        y_label: "k0/m".into(),
        x,
        y,
        scenarios,
        tol,
        t0: 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossover_grid_marks_linear_cells_absent() {
        let grid = sweep_crossover((0.0, 10.0), 11, (2, 3), 1.0).unwrap();
        assert_eq!(grid.x.len(), 11);
        assert_eq!(grid.y, vec![2.0, 3.0]);
        // k0 <= 2*m*t0 has no sqrt-dominated regime.
        assert_eq!(grid.at(0, 0), None);
        assert_eq!(grid.at(4, 0), None);
        assert!(grid.at(5, 0).is_some());
        assert_eq!(grid.at(6, 1), None);
        // Frozen spot check: k0=10, m=2, t0=1 gives c=6, t*=2.25.
        assert_eq!(grid.at(10, 0), Some(2.25));
    }

    #[test]
    fn contours_recover_initial_degree_relation() {
        let grid = sweep_crossover((0.0, 2000.0), 1001, (1, 20), 1.0).unwrap();
        let levels = [600.0, 1200.0, 1800.0, 2400.0];
        let points = extract_contours(&grid, &levels).unwrap();
        // One vertex per (m, level) pair that fits inside the k0 range.
        assert!(points.len() >= 60);
        for p in &points {
            let expected = 2.0 * p.y * (1.0 + p.level.sqrt());
            assert!(
                (p.x - expected).abs() <= 0.005 * expected,
                "level {} m {}: {} vs {}",
                p.level,
                p.y,
                p.x,
                expected
            );
        }
        // The m=1 row pins the frozen anchor values.
        let m1_600 = points
            .iter()
            .find(|p| p.y == 1.0 && p.level == 600.0)
            .unwrap();
        assert!((m1_600.x - 50.99).abs() < 0.01);
        let m1_2400 = points
            .iter()
            .find(|p| p.y == 1.0 && p.level == 2400.0)
            .unwrap();
        assert!((m1_2400.x - 99.98).abs() < 0.01);
    }

    #[test]
    fn characteristic_grid_frozen_cell_and_divergence_column() {
        let grid = sweep_characteristic(
            CoordinateSystem::PerM,
            (0.0, 4.0),
            9,
            (2.0, 10.0),
            5,
        )
        .unwrap();
        assert_eq!(grid.x[2], 1.0);
        // alpha = m: the characteristic time diverges, whole column absent.
        for iy in 0..grid.y.len() {
            assert_eq!(grid.at(2, iy), None);
        }
        // k0 = 2m at t0 = 1 means c = 0: whole bottom row absent.
        for ix in 0..grid.x.len() {
            assert_eq!(grid.at(ix, 0), None);
        }
        // Frozen: alpha/m = 3, k0/m = 10 gives c/m = 8, t_char = 16.
        let v = grid.at(6, 4).unwrap();
        assert!((v - 16f64.ln()).abs() < 1e-12, "{v}");
        // Presence elsewhere follows the sign condition.
        for (iy, &yv) in grid.y.iter().enumerate() {
            for (ix, &xv) in grid.x.iter().enumerate() {
                let expected = yv > 2.0 && xv > 1.0;
                assert_eq!(grid.at(ix, iy).is_some(), expected, "cell ({xv}, {yv})");
            }
        }
    }

    #[test]
    fn both_coordinate_systems_describe_the_same_points() {
        // (alpha/m, k0/m) = (3, 10) is (alpha/k0, m/k0) = (0.3, 0.1).
        let b = sweep_characteristic(CoordinateSystem::PerM, (3.0, 3.0), 1, (10.0, 10.0), 1)
            .unwrap();
        let a = sweep_characteristic(CoordinateSystem::PerK0, (0.3, 0.3), 1, (0.1, 0.1), 1)
            .unwrap();
        let (va, vb) = (a.at(0, 0).unwrap(), b.at(0, 0).unwrap());
        assert!((va - vb).abs() <= 1e-12, "{va} vs {vb}");
        assert!((vb - 16f64.ln()).abs() <= 1e-12);
    }

    #[test]
    fn cells_are_invariant_along_parameter_rays() {
        // Any representative m must give the same cell value.
        for &(x, y) in &[(3.0, 10.0), (2.5, 4.0), (7.0, 3.0), (0.5, 9.0)] {
            let mut reference = None;
            for m in [1u32, 2, 3] {
                let mf = f64::from(m);
                let c = constant_c(y * mf, m, 1.0).unwrap();
                let v = characteristic_time(c, m, x * mf).map(f64::ln);
                if let Some(prev) = reference {
                    match (prev, v) {
                        (None, None) => {}
                        (Some(p), Some(q)) => {
                            let diff: f64 = p - q;
                            assert!(diff.abs() <= 1e-10, "ray ({x}, {y}): {p} vs {q}")
                        }
                        other => panic!("presence mismatch on ray ({x}, {y}): {other:?}"),
                    }
                }
                reference = Some(v);
            }
        }
    }

    #[test]
    fn scenario_map_frozen_cells() {
        let ever = scenario_map((0.5, 0.5), 1, (3.0, 10.0), 2, 1e-9).unwrap();
        assert_eq!(ever.at(0, 0), Scenario::EverGrowing);
        assert_eq!(ever.at(0, 1), Scenario::EverGrowing);

        let late = scenario_map((2.0, 2.0), 1, (10.0, 10.0), 1, 1e-9).unwrap();
        assert_eq!(late.at(0, 0), Scenario::TradeoffLateStop);

        let failure = scenario_map((100.0, 100.0), 1, (3.0, 3.0), 1, 1e-9).unwrap();
        assert_eq!(failure.at(0, 0), Scenario::Failure);
    }

    #[test]
    fn scenario_map_band_is_free_of_early_stop_and_failure() {
        let grid = scenario_map((0.0, 3.0), 31, (2.1, 100.0), 25, 1e-9).unwrap();
        for s in &grid.scenarios {
            assert!(
                !matches!(s, Scenario::TradeoffEarlyStop | Scenario::Failure),
                "{s:?} inside the safe band"
            );
        }
        // Beyond the boundary ratio every cell stops early one way or another.
        let outside = scenario_map((4.0, 10.0), 5, (2.5, 50.0), 5, 1e-9).unwrap();
        for s in &outside.scenarios {
            assert!(
                matches!(s, Scenario::TradeoffEarlyStop | Scenario::Failure),
                "{s:?} beyond the boundary"
            );
        }
    }

    #[test]
    fn sweeps_reject_bad_ranges() {
        assert!(sweep_crossover((-1.0, 5.0), 5, (1, 2), 1.0).is_err());
        assert!(sweep_crossover((0.0, 5.0), 5, (0, 2), 1.0).is_err());
        assert!(sweep_crossover((0.0, 5.0), 5, (3, 2), 1.0).is_err());
        assert!(sweep_crossover((0.0, 5.0), 5, (1, 2), 0.0).is_err());
        assert!(sweep_crossover((5.0, 0.0), 5, (1, 2), 1.0).is_err());
        assert!(
            sweep_characteristic(CoordinateSystem::PerM, (-0.5, 2.0), 3, (0.0, 4.0), 3).is_err()
        );
        assert!(
            sweep_characteristic(CoordinateSystem::PerK0, (0.0, 2.0), 3, (0.0, 4.0), 3).is_err()
        );
        assert!(scenario_map((0.0, 2.0), 0, (0.0, 4.0), 3, 1e-9).is_err());
        assert!(scenario_map((0.0, 2.0), 3, (0.0, 4.0), 3, -1.0).is_err());
    }
}
