use crate::error::{ensure, Result};
use crate::path::{locate_on_grid, SampledPath};

/// The path on the sub-grid `partition` of its sample times, linear in between.
pub fn piecewise_linear(x: &SampledPath, partition: &[f64]) -> Result<SampledPath> {
    ensure!(partition.len() >= 2, "a partition needs at least two points");
    ensure!(
        partition.windows(2).all(|w| w[0] < w[1]),
        "partition must be strictly increasing"
    );
    let idx = locate_on_grid(x.times(), partition)?;
    x.subsample(&idx)
}

/// Nonnegative mollifier kernels supported in `[-1, 1]`, normalized numerically.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Kernel {
    /// `exp(-1/(1-u²))` on `(-1, 1)`.
    #[default]
    Bump,
    /// `1 - |u|`.
    Triangle,
}

impl Kernel {
    pub fn eval(&self, u: f64) -> f64 {
        if u.abs() >= 1.0 {
            return 0.0;
        }
        match self {
            Kernel::Bump => (-1.0 / (1.0 - u * u)).exp(),
            Kernel::Triangle => 1.0 - u.abs(),
        }
    }
}

const UNIFORM_NODES: usize = 41;

/// `x^ε_t = ∫ φ_ε(t-u) x̄_u du` at the given times, where `x̄` extends `x` by constants
/// outside its time range and `φ_ε(u) = φ(u/ε)/ε`.
///
/// The integral is a trapezoidal sum over the grid points of `x` in the window plus
/// [`UNIFORM_NODES`] uniform nodes, divided by the same sum of kernel weights.
pub fn mollify_at(x: &SampledPath, eps: f64, kernel: Kernel, times: &[f64]) -> Result<SampledPath> {
    ensure!(eps > 0.0 && eps.is_finite(), "ε must be positive, got {eps}");
    let cell = x.times().windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    ensure!(
        eps >= cell,
        "ε = {eps} is smaller than the grid spacing {cell}"
    );
    let dim = x.dim();
    let (start, end) = (x.start(), x.end());
    let mut values = Vec::with_capacity(times.len() * dim);
    let mut nodes = Vec::new();
    let mut xt = vec![0.0; dim];
    let mut xu = vec![0.0; dim];
    let mut num = vec![0.0; dim];
    for &t in times {
        x.eval_into(t, &mut xt)?;
        let (lo, hi) = (t - eps, t + eps);
        nodes.clear();
        nodes.extend((0..UNIFORM_NODES).map(|i| lo + 2.0 * eps * i as f64 / (UNIFORM_NODES - 1) as f64));
        let first = x.times().partition_point(|&s| s <= lo);
        nodes.extend(x.times()[first..].iter().copied().take_while(|&s| s < hi));
        nodes.sort_by(f64::total_cmp);
        nodes.dedup_by(|a, b| (*a - *b).abs() <= 1e-15);

        num.iter_mut().for_each(|v| *v = 0.0);
        let mut den = 0.0;
        let mut prev: Option<(f64, f64, Vec<f64>)> = None;
        for &u in &nodes {
            let w = kernel.eval((t - u) / eps);
            x.eval_into(u.clamp(start, end), &mut xu)?;
            let d: Vec<f64> = xu.iter().zip(&xt).map(|(a, b)| a - b).collect();
            if let Some((pu, pw, pd)) = &prev {
                let h = 0.5 * (u - pu);
                den += h * (pw + w);
                for c in 0..dim {
                    num[c] += h * (pw * pd[c] + w * d[c]);
                }
            }
            prev = Some((u, w, d));
        }
        ensure!(den > 0.0, "kernel has no mass on the quadrature nodes");
        values.extend(xt.iter().zip(&num).map(|(a, n)| a + n / den));
    }
    SampledPath::new(times.to_vec(), values, dim)
}

/// [`mollify_at`] on the sample times of `x`.
pub fn mollify(x: &SampledPath, eps: f64, kernel: Kernel) -> Result<SampledPath> {
    mollify_at(x, eps, kernel, x.times())
}
