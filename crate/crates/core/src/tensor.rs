//! Truncated tensor algebra `T^N(R^d)`.
//!
//! Elements are stored densely, one array of length `d^n` per level `n = 0..=N`,
//! with multi-indices flattened lexicographically (first letter most significant).
//! Level 0 is stored explicitly so that sums of group-like elements, which are not
//! group-like themselves, remain representable.

use crate::error::{ensure, Error, Result};

/// Upper bound on `d^N`, the size of the top level.
pub const MAX_COEFFICIENTS: usize = 10_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct TensorElement {
    dim: usize,
    depth: usize,
    levels: Vec<Vec<f64>>,
}

fn level_sizes(dim: usize, depth: usize) -> Result<Vec<usize>> {
    ensure!(dim >= 1, "tensor dimension must be positive");
    let mut sizes = Vec::with_capacity(depth + 1);
    let mut size = 1usize;
    for n in 0..=depth {
        if n > 0 {
            size = size
                .checked_mul(dim)
                .ok_or_else(|| Error::Contract(format!("d^N overflows for d={dim}, N={depth}")))?;
        }
        ensure!(
            size <= MAX_COEFFICIENTS,
            "level {n} of T^{depth}(R^{dim}) exceeds {MAX_COEFFICIENTS} coefficients"
        );
        sizes.push(size);
    }
    Ok(sizes)
}

/// `out += a ⊗ b` where `a` lives on level `n` and `b` on level `m`.
fn outer_add(out: &mut [f64], a: &[f64], b: &[f64]) {
    let width = b.len();
    for (ia, &av) in a.iter().enumerate() {
        if av == 0.0 {
            continue;
        }
        let row = &mut out[ia * width..(ia + 1) * width];
        for (o, &bv) in row.iter_mut().zip(b) {
            *o += av * bv;
        }
    }
}

impl TensorElement {
    pub fn zero(dim: usize, depth: usize) -> Result<Self> {
        let levels = level_sizes(dim, depth)?
            .into_iter()
            .map(|s| vec![0.0; s])
            .collect();
        Ok(Self { dim, depth, levels })
    }

    /// The unit `1 = exp(0)`.
    pub fn unit(dim: usize, depth: usize) -> Result<Self> {
        let mut e = Self::zero(dim, depth)?;
        e.levels[0][0] = 1.0;
        Ok(e)
    }

    pub fn from_levels(dim: usize, levels: Vec<Vec<f64>>) -> Result<Self> {
        ensure!(!levels.is_empty(), "at least level 0 is required");
        let depth = levels.len() - 1;
        let sizes = level_sizes(dim, depth)?;
        for (n, (lvl, size)) in levels.iter().zip(&sizes).enumerate() {
            ensure!(
                lvl.len() == *size,
                "level {n} has {} entries, expected {size}",
                lvl.len()
            );
        }
        Ok(Self { dim, depth, levels })
    }

    /// Group exponential of a level-1 vector: level `n` is `v^{⊗n}/n!`.
    pub fn exp(v: &[f64], depth: usize) -> Result<Self> {
        let dim = v.len();
        let mut e = Self::unit(dim, depth)?;
        for n in 1..=depth {
            let (lower, upper) = e.levels.split_at_mut(n);
            let prev = &lower[n - 1];
            let cur = &mut upper[0];
            let inv_n = 1.0 / n as f64;
            for (ia, &a) in prev.iter().enumerate() {
                for (ib, &b) in v.iter().enumerate() {
                    cur[ia * dim + ib] = a * b * inv_n;
                }
            }
        }
        Ok(e)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn level(&self, n: usize) -> &[f64] {
        &self.levels[n]
    }

    pub fn level_mut(&mut self, n: usize) -> &mut [f64] {
        &mut self.levels[n]
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    pub fn scalar(&self) -> f64 {
        self.levels[0][0]
    }

    /// Flat position of a 0-based multi-index inside its level.
    pub fn flat_index(&self, multi: &[usize]) -> Result<usize> {
        ensure!(
            multi.len() <= self.depth,
            "multi-index of length {} exceeds truncation level {}",
            multi.len(),
            self.depth
        );
        let mut idx = 0;
        for &i in multi {
            ensure!(i < self.dim, "letter index {i} out of range for d={}", self.dim);
            idx = idx * self.dim + i;
        }
        Ok(idx)
    }

    /// Coefficient at a 0-based multi-index; the empty index addresses level 0.
    pub fn coefficient(&self, multi: &[usize]) -> Result<f64> {
        let idx = self.flat_index(multi)?;
        Ok(self.levels[multi.len()][idx])
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        ensure!(
            self.dim == other.dim && self.depth == other.depth,
            "shape mismatch: T^{}(R^{}) vs T^{}(R^{})",
            self.depth,
            self.dim,
            other.depth,
            other.dim
        );
        Ok(())
    }

    /// Truncated tensor (Chen) product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.dim, self.depth)?;
        for n in 0..=self.depth {
            let target = &mut out.levels[n];
            for i in 0..=n {
                outer_add(target, &self.levels[n - i], &other.levels[i]);
            }
        }
        Ok(out)
    }

    /// In-place `self ← self ⊗ exp(v)`, the Chen update for one linear segment.
    pub fn mul_exp_in_place(&mut self, v: &[f64]) -> Result<()> {
        ensure!(
            v.len() == self.dim,
            "increment has dimension {}, expected {}",
            v.len(),
            self.dim
        );
        let d = self.dim;
        let mut acc: Vec<f64> = Vec::new();
        let mut next: Vec<f64> = Vec::new();
        // Top-down so that every level is built from the old lower levels:
        // π_n(g ⊗ e^v) = (((g_0 v/n + g_1) v/(n-1) + g_2) v/(n-2) + …) v + g_n.
        for n in (1..=self.depth).rev() {
            acc.clear();
            acc.extend(self.levels[0].iter().copied());
            for k in 0..n {
                let inv = 1.0 / (n - k) as f64;
                next.clear();
                next.resize(acc.len() * d, 0.0);
                for (ia, &a) in acc.iter().enumerate() {
                    let scaled = a * inv;
                    for (o, &b) in next[ia * d..(ia + 1) * d].iter_mut().zip(v) {
                        *o = scaled * b;
                    }
                }
                if k + 1 < n {
                    for (o, &g) in next.iter_mut().zip(&self.levels[k + 1]) {
                        *o += g;
                    }
                }
                std::mem::swap(&mut acc, &mut next);
            }
            for (g, a) in self.levels[n].iter_mut().zip(&acc) {
                *g += a;
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (a, b) in out.levels.iter_mut().zip(&other.levels) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (a, b) in out.levels.iter_mut().zip(&other.levels) {
            for (x, y) in a.iter_mut().zip(b) {
                *x -= y;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.levels
            .iter_mut()
            .flatten()
            .for_each(|x| *x *= factor);
        out
    }

    /// Dilation `δ_λ`: level `n` is multiplied by `λ^n`.
    pub fn dilate(&self, lambda: f64) -> Self {
        let mut out = self.clone();
        let mut factor = 1.0;
        for lvl in out.levels.iter_mut() {
            lvl.iter_mut().for_each(|x| *x *= factor);
            factor *= lambda;
        }
        out
    }

    /// Projection onto `T^depth`, `depth <= self.depth()`.
    pub fn truncate(&self, depth: usize) -> Result<Self> {
        ensure!(
            depth <= self.depth,
            "cannot truncate level {} element to level {depth}",
            self.depth
        );
        Ok(Self {
            dim: self.dim,
            depth,
            levels: self.levels[..=depth].to_vec(),
        })
    }

    /// Inverse in `T^N`; requires a nonzero level-0 scalar.
    pub fn inverse(&self) -> Result<Self> {
        let g0 = self.scalar();
        if g0 == 0.0 || !g0.is_finite() {
            return Err(Error::Singular(format!("level-0 scalar is {g0}")));
        }
        // g = g0 (1 + a) with a nilpotent of order N+1, so
        // g^{-1} = g0^{-1} (1 - a + a^2 - ... ± a^N), evaluated by Horner.
        let mut neg_a = self.scale(-1.0 / g0);
        neg_a.levels[0][0] = 0.0;
        let unit = Self::unit(self.dim, self.depth)?;
        let mut acc = unit.clone();
        for _ in 0..self.depth {
            acc = unit.add(&neg_a.mul(&acc)?)?;
        }
        Ok(acc.scale(1.0 / g0))
    }

    /// Logarithm of an element with unit scalar part.
    pub fn log(&self) -> Result<Self> {
        ensure!(
            (self.scalar() - 1.0).abs() <= 1e-12,
            "log requires level 0 equal to 1, got {}",
            self.scalar()
        );
        let mut a = self.clone();
        a.levels[0][0] = 0.0;
        let mut out = Self::zero(self.dim, self.depth)?;
        let mut power = a.clone();
        for k in 1..=self.depth {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            out = out.add(&power.scale(sign / k as f64))?;
            if k < self.depth {
                power = power.mul(&a)?;
            }
        }
        Ok(out)
    }

    pub fn level_norm(&self, n: usize) -> f64 {
        self.levels[n].iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `max_n |π_n(g)|` with the Euclidean norm on each level.
    pub fn max_level_norm(&self) -> f64 {
        (0..=self.depth)
            .map(|n| self.level_norm(n))
            .fold(0.0, f64::max)
    }

    /// Homogeneous norm `max_{1≤n≤N} (n!·|π_n(g)|)^{1/n}`, a computable stand-in
    /// for the Carnot-Caratheodory norm (equivalent to it on the free nilpotent group).
    pub fn homogeneous_norm(&self) -> f64 {
        let mut factorial = 1.0;
        let mut best: f64 = 0.0;
        for n in 1..=self.depth {
            factorial *= n as f64;
            best = best.max((factorial * self.level_norm(n)).powf(1.0 / n as f64));
        }
        best
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .levels
            .iter()
            .flatten()
            .zip(other.levels.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn is_finite(&self) -> bool {
        self.levels.iter().flatten().all(|x| x.is_finite())
    }

    /// Column names for [`csv_row`](Self::csv_row): `L0`, `L1_1`, `L2_12`, ...
    /// Letters are 1-based; for `d >= 10` they are separated by dots.
    pub fn csv_header(&self) -> Vec<String> {
        let mut names = vec!["L0".to_string()];
        let sep = if self.dim >= 10 { "." } else { "" };
        for n in 1..=self.depth {
            for flat in 0..self.levels[n].len() {
                let letters: Vec<String> = unflatten(flat, self.dim, n)
                    .into_iter()
                    .map(|i| (i + 1).to_string())
                    .collect();
                names.push(format!("L{n}_{}", letters.join(sep)));
            }
        }
        names
    }

    /// Level-major, lexicographic flattening of all coefficients.
    pub fn csv_row(&self) -> Vec<f64> {
        self.levels.iter().flatten().copied().collect()
    }
}

/// Inverse of [`TensorElement::flat_index`] on level `n`.
pub fn unflatten(mut flat: usize, dim: usize, n: usize) -> Vec<usize> {
    let mut multi = vec![0; n];
    for slot in multi.iter_mut().rev() {
        *slot = flat % dim;
        flat /= dim;
    }
    multi
}

/// Per-level grid p-variation distances between two level-indexed path functionals.
///
/// `x[i]` and `y[i]` are the increments over the `i`-th interval `[t_i, t_{i+1}]` of a
/// common grid; increments over longer grid intervals are obtained by Chen
/// multiplication. Entry `n-1` of the result is
/// `sup_D (Σ |π_n(x_{t_a,t_b}) - π_n(y_{t_a,t_b})|^{p/n})^{n/p}` with the supremum over
/// all sub-partitions `D` of the grid, computed exactly by dynamic programming
/// (the objective is additive over the chosen intervals).
pub fn pvar_level_distances(x: &[TensorElement], y: &[TensorElement], p: f64) -> Result<Vec<f64>> {
    ensure!(p >= 1.0 && p.is_finite(), "p must be >= 1, got {p}");
    ensure!(
        x.len() == y.len() && !x.is_empty(),
        "increment sequences must be nonempty and of equal length"
    );
    let (dim, depth) = (x[0].dim, x[0].depth);
    for e in x.iter().chain(y) {
        ensure!(
            e.dim == dim && e.depth == depth,
            "all increments must share d and N"
        );
    }
    let m = x.len();
    // diff[a][b - a - 1][n-1] = |π_n(x_{a,b}) - π_n(y_{a,b})|
    let mut diffs = vec![Vec::with_capacity(m); m];
    for a in 0..m {
        let mut xa = x[a].clone();
        let mut ya = y[a].clone();
        for b in (a + 1)..=m {
            if b > a + 1 {
                xa = xa.mul(&x[b - 1])?;
                ya = ya.mul(&y[b - 1])?;
            }
            let d = xa.sub(&ya)?;
            diffs[a].push((1..=depth).map(|n| d.level_norm(n)).collect::<Vec<_>>());
        }
    }
    let mut out = Vec::with_capacity(depth);
    for n in 1..=depth {
        let q = p / n as f64;
        let mut best = vec![0.0f64; m + 1];
        for b in 1..=m {
            best[b] = (0..b)
                .map(|a| best[a] + diffs[a][b - a - 1][n - 1].powf(q))
                .fold(f64::NEG_INFINITY, f64::max);
        }
        out.push(best[m].powf(1.0 / q));
    }
    Ok(out)
}

/// Grid-restricted inhomogeneous p-variation distance `max_n` of
/// [`pvar_level_distances`]. A pseudo-metric whenever `p >= N`.
pub fn rho_pvar_distance(x: &[TensorElement], y: &[TensorElement], p: f64) -> Result<f64> {
    Ok(pvar_level_distances(x, y, p)?
        .into_iter()
        .fold(0.0, f64::max))
}
