//! Grid Young integration in one and several parameters.
//!
//! All sums use left-point evaluation: `Σ f(t_i, t_j) g(□_ij)` over grid cells.

mod grid;
pub mod variation;

pub use grid::{GridFunction2D, GridFunctionND, GridRect};
pub use variation::{
    controlled_variation_guillotine, grid_rho_variation, interpolation_check, v_infinity,
    VariationEstimate,
};

use crate::error::{ensure, Error, Result};
use crate::gaussian::{sample_paths, CovarianceModel};
use crate::path::{locate_on_grid, SampledPath};
use crate::signature::path_signature;

/// Largest nesting depth accepted by [`iterated_2d`].
pub const MAX_ITERATED_DEPTH: usize = 3;

fn check_same_grid(f: &GridFunction2D, g: &GridFunction2D) -> Result<()> {
    ensure!(f.same_grid(g), "integrand and integrator live on different grids");
    Ok(())
}

/// `∫∫_rect f dg` as the left-point sum over the grid cells inside `rect`.
pub fn young_integral_2d(f: &GridFunction2D, g: &GridFunction2D, rect: &GridRect) -> Result<f64> {
    check_same_grid(f, g)?;
    f.check_rect(rect)?;
    let mut total = 0.0;
    for i in rect.i0..rect.i1 {
        for j in rect.j0..rect.j1 {
            total += f.value(i, j) * g.increment(i, i + 1, j, j + 1);
        }
    }
    Ok(total)
}

/// Nested 2D integral `Φ_n(t, t')` with `Φ_0 = f` and
/// `Φ_k(u, v) = ∫∫_{[s,u]×[s',v]} Φ_{k-1} dg_k`.
///
/// With `vanish_on_edges` the integrand is first replaced by
/// `f - f(s,·) - f(·,s') + f(s,s')`.
pub fn iterated_2d(
    f: &GridFunction2D,
    gs: &[&GridFunction2D],
    rect: &GridRect,
    vanish_on_edges: bool,
) -> Result<f64> {
    ensure!(!gs.is_empty(), "need at least one integrator");
    if gs.len() > MAX_ITERATED_DEPTH {
        return Err(Error::Unsupported(format!(
            "iterated 2D integrals are limited to depth {MAX_ITERATED_DEPTH}, got {}",
            gs.len()
        )));
    }
    for g in gs {
        check_same_grid(f, g)?;
    }
    f.check_rect(rect)?;
    let nx = rect.i1 - rect.i0 + 1;
    let ny = rect.j1 - rect.j0 + 1;
    // Local copy of the integrand on the rectangle, row-major nx × ny.
    let mut phi: Vec<f64> = (0..nx)
        .flat_map(|a| (0..ny).map(move |b| (a, b)))
        .map(|(a, b)| {
            let (i, j) = (rect.i0 + a, rect.j0 + b);
            if vanish_on_edges {
                f.value(i, j) - f.value(rect.i0, j) - f.value(i, rect.j0) + f.value(rect.i0, rect.j0)
            } else {
                f.value(i, j)
            }
        })
        .collect();
    for g in gs {
        let mut next = vec![0.0; nx * ny];
        for a in 1..nx {
            for b in 1..ny {
                let cell = phi[(a - 1) * ny + b - 1]
                    * g.increment(rect.i0 + a - 1, rect.i0 + a, rect.j0 + b - 1, rect.j0 + b);
                next[a * ny + b] = cell + next[(a - 1) * ny + b] + next[a * ny + b - 1]
                    - next[(a - 1) * ny + b - 1];
            }
        }
        phi = next;
    }
    Ok(phi[nx * ny - 1])
}

/// The three quantities compared by the diagonal Fubini identity for 1D data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FubiniDiag {
    /// `∫_{0<u<v<t} f(u) dg(u) dg(v)`.
    pub iterated: f64,
    /// `½ ∫∫_{[0,t]²} f(u∧v) dg(u) dg(v)`.
    pub half_diagonal: f64,
    /// `∫_0^t f d(∫ g dg)`, which differs from `iterated` in general.
    pub naive: f64,
}

/// Evaluates [`FubiniDiag`] for the piecewise-linear interpolations of `f` and `g`
/// sampled on `grid`, up to the grid time `t`.
///
/// Cell contributions of `iterated` and `half_diagonal` are integrated exactly for
/// piecewise-linear data; `naive` uses a left-point sum.
pub fn fubini_diag(grid: &[f64], f: &[f64], g: &[f64], t: f64) -> Result<FubiniDiag> {
    ensure!(grid.len() >= 2, "need at least two grid points");
    ensure!(
        f.len() == grid.len() && g.len() == grid.len(),
        "f and g must be sampled on the grid"
    );
    ensure!(grid.windows(2).all(|w| w[0] < w[1]), "grid must be increasing");
    let end = locate_on_grid(grid, &[t])?[0];
    let dg: Vec<f64> = g.windows(2).map(|w| w[1] - w[0]).collect();
    // ∫∫_{cell², u<v} f(u) dg dg for linear f and g on the cell.
    let inner = |j: usize| dg[j] * dg[j] * (f[j] / 3.0 + f[j + 1] / 6.0);
    // ∫_cell f dg.
    let cell_fdg = |j: usize| dg[j] * 0.5 * (f[j] + f[j + 1]);

    let mut iterated = 0.0;
    let mut outer = 0.0;
    for j in 0..end {
        iterated += outer * dg[j] + inner(j);
        outer += cell_fdg(j);
    }

    let mut double = 0.0;
    for i in 0..end {
        for j in 0..end {
            double += match i.cmp(&j) {
                std::cmp::Ordering::Less => cell_fdg(i) * dg[j],
                std::cmp::Ordering::Greater => dg[i] * cell_fdg(j),
                std::cmp::Ordering::Equal => 2.0 * inner(i),
            };
        }
    }

    let mut naive = 0.0;
    for j in 0..end {
        let d_half_square = 0.5 * (g[j + 1] * g[j + 1] - g[j] * g[j]);
        naive += f[j] * d_half_square;
    }
    Ok(FubiniDiag {
        iterated,
        half_diagonal: 0.5 * double,
        naive,
    })
}

/// `f̄(u₁, u₂, v₁, v₂) = f(u₁∧u₂, v₁∧v₂)` on the grid `xs × xs × ys × ys`.
pub fn min_lift(f: &GridFunction2D) -> Result<GridFunctionND> {
    let (xs, ys) = (f.xs().to_vec(), f.ys().to_vec());
    let nx = xs.len();
    let ny = ys.len();
    let mut values = Vec::with_capacity(nx * nx * ny * ny);
    for a in 0..nx {
        for b in 0..nx {
            for c in 0..ny {
                for d in 0..ny {
                    values.push(f.value(a.min(b), c.min(d)));
                }
            }
        }
    }
    GridFunctionND::new(vec![xs.clone(), xs, ys.clone(), ys], values)
}

/// Monte-Carlo and Young-integral sides of `E[(∫ Z¹ dZ²)²] = ∫∫ R¹ dR²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct L2IdentityCheck {
    pub mc_estimate: f64,
    pub mc_stderr: f64,
    pub young_value: f64,
}

/// Both sides of the identity for two-dimensional sample paths with independent
/// components whose covariances on the sample grid are `r1` and `r2`.
///
/// The left side averages the squared level-2 entry `(1,2)` of the signature over
/// `[0, 1]`; the right side is the left-point Young sum of `R¹(0,u;0,v)` against `R²`.
pub fn l2_identity_from_samples(
    paths: &[SampledPath],
    r1: &GridFunction2D,
    r2: &GridFunction2D,
) -> Result<L2IdentityCheck> {
    ensure!(!paths.is_empty(), "need at least one sample path");
    check_same_grid(r1, r2)?;
    let mut squares = Vec::with_capacity(paths.len());
    for x in paths {
        ensure!(x.dim() == 2, "identity check needs two-dimensional paths");
        let area = path_signature(x, 2, x.start(), x.end())?.coefficient(&[0, 1])?;
        squares.push(area * area);
    }
    let m = squares.len() as f64;
    let mean = squares.iter().sum::<f64>() / m;
    let var = if squares.len() > 1 {
        squares.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (m - 1.0)
    } else {
        0.0
    };
    let base = r1.vanishing_on_initial_edges();
    let young_value = young_integral_2d(&base, r2, &r1.full_rect())?;
    Ok(L2IdentityCheck {
        mc_estimate: mean,
        mc_stderr: (var / m).sqrt(),
        young_value,
    })
}

/// [`l2_identity_from_samples`] for `m` paths of a two-dimensional model on `D_k`.
pub fn covariance_l2_identity_check(
    model: &CovarianceModel,
    k: usize,
    m: usize,
    seed: u64,
    workers: usize,
) -> Result<L2IdentityCheck> {
    ensure!(model.dim() == 2, "identity check needs a two-dimensional model");
    let paths = sample_paths(model, k, m, seed, workers)?;
    let r = model.grid_covariance(&SampledPath::uniform_times(k))?;
    l2_identity_from_samples(&paths, r.grid(), r.grid())
}
