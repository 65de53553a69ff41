//! Grid-restricted 2D ρ-variation of functions on product grids.

use super::grid::{GridFunction2D, GridRect};
use crate::error::{ensure, Result};

/// Largest number of intervals on the shorter side for which every partition of that
/// side is enumerated, making [`grid_rho_variation`] exact.
pub const EXACT_ENUMERATION_LIMIT: usize = 12;

/// Largest grid side accepted by [`controlled_variation_guillotine`].
pub const GUILLOTINE_MAX_POINTS: usize = 33;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VariationEstimate {
    pub value: f64,
    /// `false` when the value comes from the local search and is only a lower bound.
    pub exact: bool,
}

#[inline]
fn pow_abs(x: f64, rho: f64) -> f64 {
    if rho == 1.0 {
        x.abs()
    } else {
        x.abs().powf(rho)
    }
}

/// Grid axis view: rows are the enumerated axis, columns the optimized one.
struct View<'a> {
    f: &'a GridFunction2D,
    transposed: bool,
    rho: f64,
}

impl View<'_> {
    #[inline]
    fn inc(&self, a0: usize, a1: usize, b0: usize, b1: usize) -> f64 {
        if self.transposed {
            self.f.increment(b0, b1, a0, a1)
        } else {
            self.f.increment(a0, a1, b0, b1)
        }
    }

    /// Best partition of `[b0, b1]` for the fixed partition `rows` of the other axis.
    fn best_columns(&self, rows: &[usize], b0: usize, b1: usize) -> (f64, Vec<usize>) {
        let n = b1 - b0 + 1;
        let mut best = vec![f64::NEG_INFINITY; n];
        let mut prev = vec![0usize; n];
        best[0] = 0.0;
        for hi in 1..n {
            for lo in 0..hi {
                let w: f64 = rows
                    .windows(2)
                    .map(|r| pow_abs(self.inc(r[0], r[1], b0 + lo, b0 + hi), self.rho))
                    .sum();
                let cand = best[lo] + w;
                if cand > best[hi] {
                    best[hi] = cand;
                    prev[hi] = lo;
                }
            }
        }
        let mut cols = vec![b1];
        let mut at = n - 1;
        while at > 0 {
            at = prev[at];
            cols.push(b0 + at);
        }
        cols.reverse();
        (best[n - 1], cols)
    }
}

/// `sup (Σ_{D×D̃} |f(□)|^ρ)^{1/ρ}` over partitions `D`, `D̃` made of grid points of `rect`.
///
/// Exact when the shorter side of `rect` has at most [`EXACT_ENUMERATION_LIMIT`]
/// intervals. Otherwise alternating coordinate ascent from several starting partitions
/// is used and the result is a lower bound.
pub fn grid_rho_variation(f: &GridFunction2D, rect: &GridRect, rho: f64) -> Result<VariationEstimate> {
    ensure!(rho >= 1.0 && rho.is_finite(), "ρ must be a finite number >= 1, got {rho}");
    f.check_rect(rect)?;
    if rect.is_degenerate() {
        return Ok(VariationEstimate {
            value: 0.0,
            exact: true,
        });
    }
    if rho == 1.0 {
        // Refining never decreases Σ|f(□)|, so the full grid attains the supremum.
        let mut total = 0.0;
        for i in rect.i0..rect.i1 {
            for j in rect.j0..rect.j1 {
                total += f.increment(i, i + 1, j, j + 1).abs();
            }
        }
        return Ok(VariationEstimate {
            value: total,
            exact: true,
        });
    }
    let (nx, ny) = rect.cells();
    let transposed = ny < nx;
    let view = View { f, transposed, rho };
    let (a0, a1, b0, b1) = if transposed {
        (rect.j0, rect.j1, rect.i0, rect.i1)
    } else {
        (rect.i0, rect.i1, rect.j0, rect.j1)
    };
    let a = a1 - a0;
    if a <= EXACT_ENUMERATION_LIMIT {
        let interior = a - 1;
        let mut best = 0.0f64;
        let mut rows = Vec::with_capacity(a + 1);
        for mask in 0u32..(1u32 << interior) {
            rows.clear();
            rows.push(a0);
            rows.extend((0..interior).filter(|k| mask >> k & 1 == 1).map(|k| a0 + 1 + k));
            rows.push(a1);
            best = best.max(view.best_columns(&rows, b0, b1).0);
        }
        return Ok(VariationEstimate {
            value: best.powf(1.0 / rho),
            exact: true,
        });
    }
    let mut best = 0.0f64;
    for stride in [1, 2, 4, a] {
        let mut rows: Vec<usize> = (a0..a1).step_by(stride).collect();
        rows.push(a1);
        let mut current = f64::NEG_INFINITY;
        for _ in 0..100 {
            let (v, cols) = view.best_columns(&rows, b0, b1);
            let swapped = View {
                f,
                transposed: !transposed,
                rho,
            };
            let (w, new_rows) = swapped.best_columns(&cols, a0, a1);
            let improved = v.max(w);
            rows = new_rows;
            if improved <= current * (1.0 + 1e-14) {
                current = current.max(improved);
                break;
            }
            current = improved;
        }
        best = best.max(current);
    }
    Ok(VariationEstimate {
        value: best.powf(1.0 / rho),
        exact: false,
    })
}

/// `max |f(□)|` over all rectangles with corners on the grid inside `rect`.
pub fn v_infinity(f: &GridFunction2D, rect: &GridRect) -> Result<f64> {
    f.check_rect(rect)?;
    let mut best = 0.0f64;
    for i0 in rect.i0..rect.i1 {
        for i1 in i0 + 1..=rect.i1 {
            for j0 in rect.j0..rect.j1 {
                for j1 in j0 + 1..=rect.j1 {
                    best = best.max(f.increment(i0, i1, j0, j1).abs());
                }
            }
        }
    }
    Ok(best)
}

/// Returns `(V_γ, V_∞^{1-ρ/γ} V_ρ^{ρ/γ})`; the first never exceeds the second when
/// both variations are exact.
pub fn interpolation_check(f: &GridFunction2D, rect: &GridRect, rho: f64, gamma: f64) -> Result<(f64, f64)> {
    ensure!(gamma > rho, "need γ > ρ, got γ={gamma}, ρ={rho}");
    let vg = grid_rho_variation(f, rect, gamma)?.value;
    let vr = grid_rho_variation(f, rect, rho)?.value;
    let vi = v_infinity(f, rect)?;
    let theta = rho / gamma;
    Ok((vg, vi.powf(1.0 - theta) * vr.powf(theta)))
}

/// `sup Σ_{R∈π} |f(R)|^ρ` over partitions `π` of `rect` obtained by recursive
/// guillotine cuts along grid lines.
///
/// Grid partitions are guillotine partitions, so this dominates `V_ρ^ρ`; it is a lower
/// bound for the supremum over arbitrary rectangular partitions. Superadditive across
/// any cut by construction.
pub fn controlled_variation_guillotine(f: &GridFunction2D, rect: &GridRect, rho: f64) -> Result<f64> {
    ensure!(rho >= 1.0 && rho.is_finite(), "ρ must be a finite number >= 1, got {rho}");
    f.check_rect(rect)?;
    let nx = rect.i1 - rect.i0 + 1;
    let ny = rect.j1 - rect.j0 + 1;
    ensure!(
        nx <= GUILLOTINE_MAX_POINTS && ny <= GUILLOTINE_MAX_POINTS,
        "guillotine search is limited to {GUILLOTINE_MAX_POINTS} points per side"
    );
    if rect.is_degenerate() {
        return Ok(0.0);
    }
    // best[(a0, a1, b0, b1)] with local indices, a0 < a1, b0 < b1.
    let idx = |a0: usize, a1: usize, b0: usize, b1: usize| ((a0 * nx + a1) * ny + b0) * ny + b1;
    let mut best = vec![0.0f64; nx * nx * ny * ny];
    for wa in 1..nx {
        for wb in 1..ny {
            for a0 in 0..nx - wa {
                let a1 = a0 + wa;
                for b0 in 0..ny - wb {
                    let b1 = b0 + wb;
                    let mut v = pow_abs(
                        f.increment(rect.i0 + a0, rect.i0 + a1, rect.j0 + b0, rect.j0 + b1),
                        rho,
                    );
                    for c in a0 + 1..a1 {
                        v = v.max(best[idx(a0, c, b0, b1)] + best[idx(c, a1, b0, b1)]);
                    }
                    for c in b0 + 1..b1 {
                        v = v.max(best[idx(a0, a1, b0, c)] + best[idx(a0, a1, c, b1)]);
                    }
                    best[idx(a0, a1, b0, b1)] = v;
                }
            }
        }
    }
    Ok(best[idx(0, nx - 1, 0, ny - 1)])
}
