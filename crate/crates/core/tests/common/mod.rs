#![allow(dead_code)]

use roughpaths::harness::{fit_rate, RateFit};
use roughpaths::path::SampledPath;
use roughpaths::rde::{step_euler_n, wong_zakai_solve, SmoothNonlinear, PRESET_START};
use roughpaths::signature::full_signature;

/// Driver `t ↦ (t, sin t)` on `[0, h]`, sampled at `n + 1` points.
pub fn smooth_driver(h: f64, n: usize) -> SampledPath {
    let times: Vec<f64> = (0..=n).map(|i| h * i as f64 / n as f64).collect();
    let pts: Vec<Vec<f64>> = times.iter().map(|&t| vec![t, t.sin()]).collect();
    SampledPath::from_points(times, &pts).unwrap()
}

/// One step of step-N Euler against a converged ODE solve over the same driver.
pub fn one_step_error(level: usize, h: f64) -> f64 {
    let x = smooth_driver(h, 400);
    let sig = full_signature(&x, level).unwrap();
    let approx = step_euler_n(&PRESET_START, &sig, &SmoothNonlinear, level).unwrap();
    let exact = wong_zakai_solve(&x, &SmoothNonlinear, &PRESET_START, 4).unwrap();
    let end = exact.point(exact.len() - 1);
    approx.iter().zip(end).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
}

pub const STEP_SIZES: [f64; 5] = [0.4, 0.2, 0.1, 0.05, 0.025];

/// Fitted slope of the one-step error against the step size.
pub fn deterministic_order(level: usize) -> RateFit {
    let pts: Vec<(f64, f64)> = STEP_SIZES.iter().map(|&h| (1.0 / h, one_step_error(level, h))).collect();
    fit_rate(&pts).unwrap()
}
