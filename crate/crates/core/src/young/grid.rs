use crate::error::{ensure, Result};
use crate::path::locate_on_grid;

/// An axis-aligned rectangle given by grid indices, `[xs[i0], xs[i1]] × [ys[j0], ys[j1]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GridRect {
    pub i0: usize,
    pub i1: usize,
    pub j0: usize,
    pub j1: usize,
}

impl GridRect {
    pub fn new(i0: usize, i1: usize, j0: usize, j1: usize) -> Self {
        Self { i0, i1, j0, j1 }
    }

    /// `[i0, i1]²`.
    pub fn square(i0: usize, i1: usize) -> Self {
        Self::new(i0, i1, i0, i1)
    }

    pub fn is_degenerate(&self) -> bool {
        self.i0 == self.i1 || self.j0 == self.j1
    }

    pub fn cells(&self) -> (usize, usize) {
        (self.i1 - self.i0, self.j1 - self.j0)
    }
}

fn check_axis(axis: &[f64], name: &str) -> Result<()> {
    ensure!(!axis.is_empty(), "{name} axis is empty");
    ensure!(
        axis.iter().all(|x| x.is_finite()) && axis.windows(2).all(|w| w[0] < w[1]),
        "{name} axis must be finite and strictly increasing"
    );
    Ok(())
}

/// A real function on a product grid, evaluated by exact lookup.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction2D {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Row-major: `values[i * ys.len() + j] = f(xs[i], ys[j])`.
    values: Vec<f64>,
}

impl GridFunction2D {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_axis(&xs, "first")?;
        check_axis(&ys, "second")?;
        ensure!(
            values.len() == xs.len() * ys.len(),
            "expected {}×{} values, got {}",
            xs.len(),
            ys.len(),
            values.len()
        );
        ensure!(values.iter().all(|x| x.is_finite()), "grid values must be finite");
        Ok(Self { xs, ys, values })
    }

    pub fn from_fn(xs: Vec<f64>, ys: Vec<f64>, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = xs
            .iter()
            .flat_map(|&u| ys.iter().map(move |&v| (u, v)))
            .map(|(u, v)| f(u, v))
            .collect();
        Self::new(xs, ys, values)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.xs.len(), self.ys.len())
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ys.len() + j]
    }

    pub fn full_rect(&self) -> GridRect {
        GridRect::new(0, self.xs.len() - 1, 0, self.ys.len() - 1)
    }

    pub fn check_rect(&self, r: &GridRect) -> Result<()> {
        ensure!(
            r.i0 <= r.i1 && r.i1 < self.xs.len() && r.j0 <= r.j1 && r.j1 < self.ys.len(),
            "rectangle {r:?} is not inside the {}×{} grid",
            self.xs.len(),
            self.ys.len()
        );
        Ok(())
    }

    /// Rectangle `[s,t]×[u,v]` with corners on the grid.
    pub fn rect_by_times(&self, s: f64, t: f64, u: f64, v: f64) -> Result<GridRect> {
        ensure!(s <= t && u <= v, "rectangle needs s <= t and u <= v");
        let i = locate_on_grid(&self.xs, &[s, t])?;
        let j = locate_on_grid(&self.ys, &[u, v])?;
        Ok(GridRect::new(i[0], i[1], j[0], j[1]))
    }

    /// Rectangular increment `f(t,v) - f(t,u) - f(s,v) + f(s,u)` (no bounds check).
    #[inline]
    pub fn increment(&self, i0: usize, i1: usize, j0: usize, j1: usize) -> f64 {
        self.value(i1, j1) - self.value(i1, j0) - self.value(i0, j1) + self.value(i0, j0)
    }

    pub fn rect_increment(&self, r: &GridRect) -> Result<f64> {
        self.check_rect(r)?;
        Ok(self.increment(r.i0, r.i1, r.j0, r.j1))
    }

    /// `f - f(s,·) - f(·,s') + f(s,s')`, so that the result vanishes on the initial
    /// edges of the grid.
    pub fn vanishing_on_initial_edges(&self) -> Self {
        let (nx, ny) = self.shape();
        let mut values = self.values.clone();
        for i in 0..nx {
            for j in 0..ny {
                values[i * ny + j] =
                    self.value(i, j) - self.value(0, j) - self.value(i, 0) + self.value(0, 0);
            }
        }
        Self {
            xs: self.xs.clone(),
            ys: self.ys.clone(),
            values,
        }
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.xs == other.xs && self.ys == other.ys
    }
}

/// A real function on an `n`-dimensional product grid, `1 <= n <= 4`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunctionND {
    axes: Vec<Vec<f64>>,
    strides: Vec<usize>,
    values: Vec<f64>,
}

impl GridFunctionND {
    pub const MAX_DIM: usize = 4;

    pub fn new(axes: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        ensure!(
            (1..=Self::MAX_DIM).contains(&axes.len()),
            "grid dimension must be in 1..=4, got {}",
            axes.len()
        );
        for a in &axes {
            check_axis(a, "grid")?;
        }
        let mut strides = vec![1; axes.len()];
        for k in (0..axes.len() - 1).rev() {
            strides[k] = strides[k + 1] * axes[k + 1].len();
        }
        let total = strides[0] * axes[0].len();
        ensure!(
            values.len() == total,
            "expected {total} grid values, got {}",
            values.len()
        );
        ensure!(values.iter().all(|x| x.is_finite()), "grid values must be finite");
        Ok(Self {
            axes,
            strides,
            values,
        })
    }

    pub fn from_fn(axes: Vec<Vec<f64>>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let total: usize = axes.iter().map(Vec::len).product();
        let n = axes.len();
        let mut values = Vec::with_capacity(total);
        let mut idx = vec![0usize; n];
        let mut point = vec![0.0; n];
        for _ in 0..total {
            for k in 0..n {
                point[k] = axes[k][idx[k]];
            }
            values.push(f(&point));
            for k in (0..n).rev() {
                idx[k] += 1;
                if idx[k] < axes[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
        Self::new(axes, values)
    }

    pub fn ndim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn value(&self, idx: &[usize]) -> f64 {
        self.values[idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum::<usize>()]
    }

    /// Alternating `2^n`-corner sum over the box `Π [axes_k[lo_k], axes_k[hi_k]]`.
    pub fn rect_increment(&self, bounds: &[(usize, usize)]) -> Result<f64> {
        ensure!(
            bounds.len() == self.ndim(),
            "box has {} sides, grid has dimension {}",
            bounds.len(),
            self.ndim()
        );
        for (k, &(lo, hi)) in bounds.iter().enumerate() {
            ensure!(
                lo <= hi && hi < self.axes[k].len(),
                "box side {k} = ({lo}, {hi}) is off the grid"
            );
        }
        let n = self.ndim();
        let mut idx = vec![0usize; n];
        let mut total = 0.0;
        for corner in 0..(1usize << n) {
            let mut lower = 0;
            for (k, &(lo, hi)) in bounds.iter().enumerate() {
                if corner >> k & 1 == 1 {
                    idx[k] = hi;
                } else {
                    idx[k] = lo;
                    lower += 1;
                }
            }
            let sign = if lower % 2 == 0 { 1.0 } else { -1.0 };
            total += sign * self.value(&idx);
        }
        Ok(total)
    }
}

impl From<&GridFunction2D> for GridFunctionND {
    fn from(f: &GridFunction2D) -> Self {
        let (_, ny) = f.shape();
        GridFunctionND {
            axes: vec![f.xs.clone(), f.ys.clone()],
            strides: vec![ny, 1],
            values: f.values.clone(),
        }
    }
}
