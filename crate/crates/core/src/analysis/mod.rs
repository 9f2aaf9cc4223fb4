//! Numerical companions to the closed-form model: a mean-field ODE
//! integrator, log-log regime fitting and cross-over detection, phase-grid
//! sweeps over normalized parameter planes, and simulation-vs-theory
//! comparison reports.

pub mod compare;
pub mod fitting;
pub mod meanfield;
pub mod sweeps;

pub use compare::{compare_sim_to_meanfield, ComparisonReport, MEANFIELD_NORMALIZATION_NOTE};
pub use fitting::{
    detect_crossover, fit_power_law, CrossoverDetection, RegimeFit, CROSSOVER_SLOPE_THRESHOLD,
    CROSSOVER_WINDOW_DECADES,
};
pub use meanfield::{
    integrate_meanfield, integrate_meanfield_at, integrate_meanfield_converged,
    MEANFIELD_REFINE_REL_TOL,
};
pub use sweeps::{
    extract_contours, scenario_map, sweep_characteristic, sweep_crossover, ContourPoint,
    CoordinateSystem, PhaseGrid, ScenarioGrid,
};
