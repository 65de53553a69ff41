use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::CovarianceModel;
use crate::error::{ensure, Error, Result};
use crate::parallel::par_map;
use crate::path::SampledPath;

/// Exact sampler for a model on the uniform grid `{j/k}` via a dense Cholesky factor
/// of the covariance at `t_1, …, t_k`.
#[derive(Clone, Debug)]
pub struct GaussianSampler {
    model: CovarianceModel,
    times: Vec<f64>,
    /// Lower factor, packed by rows: row `i` occupies `i(i+1)/2 .. (i+1)(i+2)/2`.
    factor: Vec<f64>,
    jitter: f64,
}

fn packed(i: usize) -> usize {
    i * (i + 1) / 2
}

fn cholesky_packed(a: &[f64], n: usize, jitter: f64) -> Option<Vec<f64>> {
    let mut l = vec![0.0; packed(n)];
    for i in 0..n {
        let ri = packed(i);
        for j in 0..=i {
            let rj = packed(j);
            let dot: f64 = l[ri..ri + j].iter().zip(&l[rj..rj + j]).map(|(x, y)| x * y).sum();
            let mut v = a[i * n + j] - dot;
            if i == j {
                v += jitter;
                if v <= 0.0 || !v.is_finite() {
                    return None;
                }
                l[ri + i] = v.sqrt();
            } else {
                l[ri + j] = v / l[rj + j];
            }
        }
    }
    Some(l)
}

impl GaussianSampler {
    pub fn new(model: &CovarianceModel, k: usize) -> Result<Self> {
        ensure!(k >= 1, "mesh size must be positive");
        let times = SampledPath::uniform_times(k);
        let cov = model.grid_covariance(&times[1..])?;
        let a = cov.grid().values();
        let trace: f64 = (0..k).map(|i| a[i * k + i]).sum();
        for jitter in [0.0, 1e-12 * trace, 1e-10 * trace] {
            if let Some(factor) = cholesky_packed(a, k, jitter) {
                return Ok(Self {
                    model: *model,
                    times,
                    factor,
                    jitter,
                });
            }
        }
        Err(Error::Numerical(format!(
            "covariance on {k} points is not positive definite even after jitter"
        )))
    }

    pub fn model(&self) -> &CovarianceModel {
        &self.model
    }

    pub fn mesh(&self) -> usize {
        self.times.len() - 1
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Diagonal jitter that was needed for the factorization (usually 0).
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Entry `(i, j)`, `j <= i`, of the factor for the covariance at `t_1..t_k`.
    pub fn factor_entry(&self, i: usize, j: usize) -> f64 {
        if j > i {
            0.0
        } else {
            self.factor[packed(i) + j]
        }
    }

    /// Values of component `comp` of trajectory `traj` at `t_0, …, t_k`, with `X_0 = 0`.
    pub fn sample_component(&self, seed: u64, traj: u64, comp: usize) -> Vec<f64> {
        let k = self.mesh();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream((traj << 16) | comp as u64);
        let z: Vec<f64> = (0..k).map(|_| StandardNormal.sample(&mut rng)).collect();
        let mut out = Vec::with_capacity(k + 1);
        out.push(0.0);
        for i in 0..k {
            let row = &self.factor[packed(i)..packed(i) + i + 1];
            out.push(row.iter().zip(&z).map(|(l, z)| l * z).sum());
        }
        out
    }

    /// All components of trajectory `traj`.
    pub fn sample(&self, seed: u64, traj: u64) -> Result<SampledPath> {
        let comps: Vec<Vec<f64>> = (0..self.model.dim())
            .map(|c| self.sample_component(seed, traj, c))
            .collect();
        SampledPath::from_components(self.times.clone(), &comps)
    }
}

/// `m` independent trajectories on `{j/k}`; trajectory `i` depends only on
/// `(seed, i)`, never on `workers`.
pub fn sample_paths(
    model: &CovarianceModel,
    k: usize,
    m: usize,
    seed: u64,
    workers: usize,
) -> Result<Vec<SampledPath>> {
    ensure!(m >= 1, "need at least one trajectory");
    ensure!(m < 1 << 48, "too many trajectories");
    let sampler = GaussianSampler::new(model, k)?;
    par_map(workers, m, |i| sampler.sample(seed, i as u64))
}
