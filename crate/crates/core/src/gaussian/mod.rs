//! Gaussian driver models: Brownian motion and fractional Brownian motion with
//! independent, identically distributed components.

mod approx;
mod sampler;

pub use approx::{mollify, mollify_at, piecewise_linear, Kernel};
pub use sampler::{sample_paths, GaussianSampler};

use crate::error::{ensure, Result};
use crate::path::SampledPath;
use crate::young::{grid_rho_variation, GridFunction2D, GridRect, VariationEstimate};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelKind {
    Bm,
    Fbm { hurst: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CovarianceModel {
    kind: ModelKind,
    dim: usize,
}

impl CovarianceModel {
    pub fn bm(dim: usize) -> Result<Self> {
        ensure!(dim >= 1, "model dimension must be positive");
        Ok(Self {
            kind: ModelKind::Bm,
            dim,
        })
    }

    /// Fractional Brownian motion, `1/4 < hurst <= 1/2`.
    pub fn fbm(hurst: f64, dim: usize) -> Result<Self> {
        ensure!(dim >= 1, "model dimension must be positive");
        ensure!(
            hurst > 0.25 && hurst <= 0.5,
            "Hurst parameter must lie in (1/4, 1/2], got {hurst}"
        );
        Ok(Self {
            kind: ModelKind::Fbm { hurst },
            dim,
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn with_dim(&self, dim: usize) -> Result<Self> {
        ensure!(dim >= 1, "model dimension must be positive");
        Ok(Self { dim, ..*self })
    }

    pub fn hurst(&self) -> f64 {
        match self.kind {
            ModelKind::Bm => 0.5,
            ModelKind::Fbm { hurst } => hurst,
        }
    }

    /// Variation exponent `ρ = 1/(2H)` of the covariance.
    pub fn rho(&self) -> f64 {
        1.0 / (2.0 * self.hurst())
    }

    /// `R(s, t)` of each component.
    pub fn covariance(&self, s: f64, t: f64) -> f64 {
        let h = self.hurst();
        if h == 0.5 {
            return s.min(t);
        }
        let e = 2.0 * h;
        0.5 * (s.powf(e) + t.powf(e) - (t - s).abs().powf(e))
    }

    /// `R(t,v) - R(t,u) - R(s,v) + R(s,u)`.
    pub fn rect_increment(&self, s: f64, t: f64, u: f64, v: f64) -> f64 {
        self.covariance(t, v) - self.covariance(t, u) - self.covariance(s, v) + self.covariance(s, u)
    }

    pub fn grid_covariance(&self, times: &[f64]) -> Result<GridCovariance> {
        GridCovariance::from_model(self, times)
    }
}

/// The covariance `R(t_i, t_j)` of a model on a time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridCovariance(GridFunction2D);

impl GridCovariance {
    pub fn from_model(model: &CovarianceModel, times: &[f64]) -> Result<Self> {
        let n = times.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let r = model.covariance(times[i], times[j]);
                values[i * n + j] = r;
                values[j * n + i] = r;
            }
        }
        Ok(Self(GridFunction2D::new(times.to_vec(), times.to_vec(), values)?))
    }

    pub fn grid(&self) -> &GridFunction2D {
        &self.0
    }

    pub fn times(&self) -> &[f64] {
        self.0.xs()
    }

    pub fn rect_increment(&self, rect: &GridRect) -> Result<f64> {
        self.0.rect_increment(rect)
    }

    /// Grid ρ-variation over `rect`; see [`grid_rho_variation`].
    pub fn rho_variation(&self, rect: &GridRect, rho: f64) -> Result<VariationEstimate> {
        grid_rho_variation(&self.0, rect, rho)
    }
}

/// `|D|_{R,ρ} = (max_i V_ρ(R; [t_i, t_{i+1}]²))^ρ`, each cell resolved by
/// `resolution` uniform sub-intervals.
pub fn mesh_covariance_modulus(
    model: &CovarianceModel,
    partition: &[f64],
    rho: f64,
    resolution: usize,
) -> Result<f64> {
    ensure!(partition.len() >= 2, "a partition needs at least two points");
    ensure!(
        partition.windows(2).all(|w| w[0] < w[1]),
        "partition must be strictly increasing"
    );
    ensure!(resolution >= 1, "cell resolution must be positive");
    let mut worst = 0.0f64;
    for w in partition.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut cell: Vec<f64> = (0..=resolution)
            .map(|i| a + (b - a) * i as f64 / resolution as f64)
            .collect();
        cell[resolution] = b;
        let r = GridCovariance::from_model(model, &cell)?;
        let v = r.rho_variation(&r.grid().full_rect(), rho)?;
        worst = worst.max(v.value);
    }
    Ok(worst.powf(rho))
}

/// Uniform partition `D_k` of `[0, 1]`.
pub fn uniform_partition(k: usize) -> Vec<f64> {
    SampledPath::uniform_times(k)
}
