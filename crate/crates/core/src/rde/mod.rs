//! Pathwise solvers for `dy = V(y) dx`: step-N Euler, simplified step-N Euler and
//! the ODE solve for piecewise-linear drivers.

pub mod dual;
mod fields;

pub use fields::{
    linear_preset, preset, AffineConjugate, AffineFields, AnalyticFields, FiniteDifferenceFields,
    SmoothNonlinear, VectorFieldSet, PRESET_START,
};

use crate::error::{ensure, Error, Result};
use crate::path::SampledPath;
use crate::signature::path_signature;
use crate::tensor::{unflatten, TensorElement};

/// States whose Euclidean norm exceeds this are treated as divergent.
pub const DIVERGENCE_NORM: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    EulerN,
    SimplifiedEulerN,
    WongZakaiOde,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchemeConfig {
    pub kind: SchemeKind,
    /// `N` for the Euler schemes; ignored by the ODE solve.
    pub level: usize,
    pub partition: Vec<f64>,
    /// Runge-Kutta steps per driver segment for the ODE solve.
    pub substeps: usize,
}

fn check_dims(v: &dyn VectorFieldSet, y: &[f64], driver_dim: usize) -> Result<()> {
    ensure!(
        y.len() == v.state_dim(),
        "state has dimension {}, fields expect {}",
        y.len(),
        v.state_dim()
    );
    ensure!(
        driver_dim == v.driver_dim(),
        "driver has dimension {driver_dim}, fields expect {}",
        v.driver_dim()
    );
    Ok(())
}

/// `y + Σ_{n=1}^{N} Σ_{i₁…i_n} 𝒱_{i₁}⋯V_{i_n}(y) x^{i₁…i_n}` with the coefficients
/// read from `sig`.
pub fn step_euler_n(y: &[f64], sig: &TensorElement, v: &dyn VectorFieldSet, level: usize) -> Result<Vec<f64>> {
    ensure!(level >= 1, "scheme level must be at least 1");
    ensure!(
        sig.depth() >= level,
        "signature has depth {}, scheme needs {level}",
        sig.depth()
    );
    if level > v.max_order() {
        return Err(Error::Contract(format!(
            "fields provide derivatives up to order {}, scheme needs {level}",
            v.max_order()
        )));
    }
    check_dims(v, y, sig.dim())?;
    let d = sig.dim();
    let mut out = y.to_vec();
    let mut term = vec![0.0; y.len()];
    for n in 1..=level {
        for (flat, &c) in sig.level(n).iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let idx = unflatten(flat, d, n);
            v.iterated_derivative(&idx, y, &mut term)?;
            for (o, t) in out.iter_mut().zip(&term) {
                *o += c * t;
            }
        }
    }
    Ok(out)
}

/// [`step_euler_n`] with `x^{i₁…i_n}` replaced by `x^{i₁}⋯x^{i_n}/n!`.
pub fn step_simplified_euler_n(y: &[f64], increment: &[f64], v: &dyn VectorFieldSet, level: usize) -> Result<Vec<f64>> {
    let sig = TensorElement::exp(increment, level)?;
    step_euler_n(y, &sig, v, level)
}

fn rhs(v: &dyn VectorFieldSet, y: &[f64], dx: &[f64], out: &mut [f64], buf: &mut [f64]) {
    out.iter_mut().for_each(|o| *o = 0.0);
    for (i, &w) in dx.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        v.eval(i, y, buf);
        for (o, b) in out.iter_mut().zip(buf.iter()) {
            *o += w * b;
        }
    }
}

/// Solves `dy = V(y) dx` along the piecewise-linear interpolation of `x`, with
/// `substeps` classical Runge-Kutta steps per segment. Returns `y` at the sample
/// times of `x`.
pub fn wong_zakai_solve(x: &SampledPath, v: &dyn VectorFieldSet, y0: &[f64], substeps: usize) -> Result<SampledPath> {
    ensure!(substeps >= 1, "need at least one substep");
    check_dims(v, y0, x.dim())?;
    let e = y0.len();
    let mut y = y0.to_vec();
    let mut values = Vec::with_capacity(x.len() * e);
    values.extend_from_slice(&y);
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; e], vec![0.0; e], vec![0.0; e], vec![0.0; e]);
    let mut tmp = vec![0.0; e];
    let mut buf = vec![0.0; e];
    let mut dx = vec![0.0; x.dim()];
    let h = 1.0 / substeps as f64;
    for seg in 0..x.len() - 1 {
        for ((d, a), b) in dx.iter_mut().zip(x.point(seg)).zip(x.point(seg + 1)) {
            *d = (b - a) * h;
        }
        for _ in 0..substeps {
            rhs(v, &y, &dx, &mut k1, &mut buf);
            for c in 0..e {
                tmp[c] = y[c] + 0.5 * k1[c];
            }
            rhs(v, &tmp, &dx, &mut k2, &mut buf);
            for c in 0..e {
                tmp[c] = y[c] + 0.5 * k2[c];
            }
            rhs(v, &tmp, &dx, &mut k3, &mut buf);
            for c in 0..e {
                tmp[c] = y[c] + k3[c];
            }
            rhs(v, &tmp, &dx, &mut k4, &mut buf);
            for c in 0..e {
                y[c] += (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]) / 6.0;
            }
        }
        check_divergence(&y, seg)?;
        values.extend_from_slice(&y);
    }
    SampledPath::new(x.times().to_vec(), values, e)
}

fn check_divergence(y: &[f64], segment: usize) -> Result<()> {
    let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !norm.is_finite() || norm > DIVERGENCE_NORM {
        return Err(Error::Divergence { segment, norm });
    }
    Ok(())
}

/// Runs the configured scheme over the partition and returns the solution on it.
///
/// The Euler schemes read the driver over each cell of the partition: its signature
/// for `EulerN`, its increment for `SimplifiedEulerN`. The ODE solve follows the
/// piecewise-linear interpolation of the driver on the partition.
pub fn solve(config: &SchemeConfig, x: &SampledPath, v: &dyn VectorFieldSet, y0: &[f64]) -> Result<SampledPath> {
    let d = &config.partition;
    ensure!(d.len() >= 2, "a partition needs at least two points");
    ensure!(
        d.windows(2).all(|w| w[0] < w[1]),
        "partition must be strictly increasing"
    );
    check_dims(v, y0, x.dim())?;
    if config.kind == SchemeKind::WongZakaiOde {
        return wong_zakai_solve(&x.resample(d)?, v, y0, config.substeps);
    }
    ensure!(config.level >= 1, "scheme level must be at least 1");
    let e = y0.len();
    let mut y = y0.to_vec();
    let mut values = Vec::with_capacity(d.len() * e);
    values.extend_from_slice(&y);
    for (j, w) in d.windows(2).enumerate() {
        y = match config.kind {
            SchemeKind::EulerN => {
                let sig = path_signature(x, config.level, w[0], w[1])?;
                step_euler_n(&y, &sig, v, config.level)?
            }
            _ => step_simplified_euler_n(&y, &x.increment(w[0], w[1])?, v, config.level)?,
        };
        check_divergence(&y, j)?;
        values.extend_from_slice(&y);
    }
    SampledPath::new(d.clone(), values, e)
}
