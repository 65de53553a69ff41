use crate::error::{ensure, Error, Result};

/// Relative tolerance used when matching a requested time against grid times.
pub const TIME_TOLERANCE: f64 = 1e-12;

/// A `d`-dimensional path sampled at strictly increasing times. Between samples the
/// path is the linear interpolation of its neighbours.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledPath {
    times: Vec<f64>,
    /// Row-major `len × dim`.
    values: Vec<f64>,
    dim: usize,
}

impl SampledPath {
    pub fn new(times: Vec<f64>, values: Vec<f64>, dim: usize) -> Result<Self> {
        ensure!(dim >= 1, "path dimension must be positive");
        ensure!(times.len() >= 2, "a path needs at least 2 samples");
        ensure!(
            values.len() == times.len() * dim,
            "expected {} values for {} samples of dimension {dim}, got {}",
            times.len() * dim,
            times.len(),
            values.len()
        );
        ensure!(
            times.iter().chain(&values).all(|x| x.is_finite()),
            "path samples must be finite"
        );
        ensure!(
            times.windows(2).all(|w| w[0] < w[1]),
            "sample times must be strictly increasing"
        );
        Ok(Self { times, values, dim })
    }

    pub fn from_points(times: Vec<f64>, points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        ensure!(
            points.iter().all(|p| p.len() == dim),
            "all points must share one dimension"
        );
        Self::new(times, points.concat(), dim)
    }

    /// Builds a path from per-component sample vectors sharing `times`.
    pub fn from_components(times: Vec<f64>, components: &[Vec<f64>]) -> Result<Self> {
        let dim = components.len();
        ensure!(dim >= 1, "need at least one component");
        let n = times.len();
        ensure!(
            components.iter().all(|c| c.len() == n),
            "component length mismatch"
        );
        let mut values = vec![0.0; n * dim];
        for (c, comp) in components.iter().enumerate() {
            for (i, &x) in comp.iter().enumerate() {
                values[i * dim + c] = x;
            }
        }
        Self::new(times, values, dim)
    }

    /// Uniform times `j/k`, `j = 0..=k`.
    pub fn uniform_times(k: usize) -> Vec<f64> {
        (0..=k).map(|j| j as f64 / k as f64).collect()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn component(&self, c: usize) -> Vec<f64> {
        self.values.iter().skip(c).step_by(self.dim).copied().collect()
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    /// Requires the time range to be exactly `[0, 1]`.
    pub fn ensure_unit_interval(&self) -> Result<()> {
        ensure!(
            self.start() == 0.0 && self.end() == 1.0,
            "driver paths must run over [0, 1], got [{}, {}]",
            self.start(),
            self.end()
        );
        Ok(())
    }

    fn contains(&self, t: f64) -> bool {
        let tol = TIME_TOLERANCE * self.end().abs().max(1.0);
        t >= self.start() - tol && t <= self.end() + tol
    }

    /// Index of the grid time equal to `t` (within [`TIME_TOLERANCE`]), if any.
    pub fn find_time(&self, t: f64) -> Option<usize> {
        let tol = TIME_TOLERANCE * t.abs().max(1.0);
        let i = self.times.partition_point(|&s| s < t - tol);
        (i < self.times.len() && (self.times[i] - t).abs() <= tol).then_some(i)
    }

    /// Segment `i` with `t_i <= t <= t_{i+1}`.
    fn segment_of(&self, t: f64) -> usize {
        let i = self.times.partition_point(|&s| s <= t);
        i.clamp(1, self.times.len() - 1) - 1
    }

    /// Linear interpolation at `t`.
    pub fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        ensure!(
            self.contains(t),
            "time {t} outside [{}, {}]",
            self.start(),
            self.end()
        );
        if let Some(i) = self.find_time(t) {
            out.copy_from_slice(self.point(i));
            return Ok(());
        }
        let i = self.segment_of(t);
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let w = (t - t0) / (t1 - t0);
        for ((o, &a), &b) in out.iter_mut().zip(self.point(i)).zip(self.point(i + 1)) {
            *o = a + w * (b - a);
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(t, &mut out)?;
        Ok(out)
    }

    /// `x_t - x_s`.
    pub fn increment(&self, s: f64, t: f64) -> Result<Vec<f64>> {
        let xs = self.eval(s)?;
        let mut xt = self.eval(t)?;
        xt.iter_mut().zip(&xs).for_each(|(b, a)| *b -= a);
        Ok(xt)
    }

    /// The linear pieces covering `[s, t]`, split exactly at `s` and `t`, as
    /// increment vectors in time order.
    pub fn segment_increments(&self, s: f64, t: f64) -> Result<Vec<Vec<f64>>> {
        ensure!(s < t, "need s < t, got s={s}, t={t}");
        ensure!(
            self.contains(s) && self.contains(t),
            "[{s}, {t}] not inside [{}, {}]",
            self.start(),
            self.end()
        );
        let mut out = Vec::new();
        let mut prev = self.eval(s)?;
        let first = match self.find_time(s) {
            Some(i) => i + 1,
            None => self.segment_of(s) + 1,
        };
        let tol = TIME_TOLERANCE * t.abs().max(1.0);
        for i in first..self.times.len() {
            if self.times[i] >= t - tol {
                break;
            }
            let p = self.point(i);
            out.push(p.iter().zip(&prev).map(|(a, b)| a - b).collect());
            prev.copy_from_slice(p);
        }
        let end = self.eval(t)?;
        out.push(end.iter().zip(&prev).map(|(a, b)| a - b).collect());
        Ok(out)
    }

    /// Samples at the given grid indices (strictly increasing).
    pub fn subsample(&self, indices: &[usize]) -> Result<Self> {
        ensure!(
            indices.iter().all(|&i| i < self.len()),
            "subsample index out of range"
        );
        let times = indices.iter().map(|&i| self.times[i]).collect();
        let values = indices
            .iter()
            .flat_map(|&i| self.point(i).iter().copied())
            .collect();
        Self::new(times, values, self.dim)
    }

    /// Values at arbitrary times by linear interpolation.
    pub fn resample(&self, times: &[f64]) -> Result<Self> {
        let mut values = vec![0.0; times.len() * self.dim];
        for (t, out) in times.iter().zip(values.chunks_mut(self.dim)) {
            self.eval_into(*t, out)?;
        }
        Self::new(times.to_vec(), values, self.dim)
    }

    /// Every `stride`-th sample; `stride` must divide the number of segments.
    pub fn coarsen(&self, stride: usize) -> Result<Self> {
        ensure!(stride >= 1, "stride must be positive");
        ensure!(
            (self.len() - 1).is_multiple_of(stride),
            "stride {stride} does not divide {} segments",
            self.len() - 1
        );
        let idx: Vec<usize> = (0..self.len()).step_by(stride).collect();
        self.subsample(&idx)
    }

    /// The path run backwards over the same time range.
    pub fn reversed(&self) -> Self {
        let (a, b) = (self.start(), self.end());
        let times = self.times.iter().rev().map(|&t| a + b - t).collect();
        let values = (0..self.len())
            .rev()
            .flat_map(|i| self.point(i).iter().copied())
            .collect();
        Self {
            times,
            values,
            dim: self.dim,
        }
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            times: self.times.clone(),
            values: self.values.iter().map(|x| x * lambda).collect(),
            dim: self.dim,
        }
    }

    /// Maximum Euclidean distance between two paths over the sample times of `self`.
    pub fn sup_distance_on_grid(&self, other: &Self) -> Result<f64> {
        ensure!(self.dim == other.dim, "dimension mismatch");
        let mut buf = vec![0.0; self.dim];
        let mut best: f64 = 0.0;
        for (i, &t) in self.times.iter().enumerate() {
            other.eval_into(t, &mut buf)?;
            let d = self
                .point(i)
                .iter()
                .zip(&buf)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            best = best.max(d);
        }
        Ok(best)
    }
}

/// Locates each of `times` on `grid` exactly; fails for off-grid times.
pub fn locate_on_grid(grid: &[f64], times: &[f64]) -> Result<Vec<usize>> {
    times
        .iter()
        .map(|&t| {
            let tol = TIME_TOLERANCE * t.abs().max(1.0);
            let i = grid.partition_point(|&s| s < t - tol);
            if i < grid.len() && (grid[i] - t).abs() <= tol {
                Ok(i)
            } else {
                Err(Error::Contract(format!("time {t} is not a grid point")))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zigzag() -> SampledPath {
        SampledPath::from_points(
            vec![0.0, 0.25, 0.5, 1.0],
            &[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 2.0], vec![-1.0, 2.0]],
        )
        .unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(SampledPath::new(vec![0.0], vec![0.0], 1).is_err());
        assert!(SampledPath::new(vec![0.0, 0.0], vec![0.0, 1.0], 1).is_err());
        assert!(SampledPath::new(vec![0.0, 1.0], vec![0.0, f64::NAN], 1).is_err());
        assert!(SampledPath::new(vec![0.0, 1.0], vec![0.0], 1).is_err());
    }

    #[test]
    fn interpolates_linearly() {
        let x = zigzag();
        assert_eq!(x.eval(0.125).unwrap(), vec![0.5, 0.0]);
        assert_eq!(x.eval(0.75).unwrap(), vec![0.0, 2.0]);
        assert_eq!(x.eval(1.0).unwrap(), vec![-1.0, 2.0]);
        assert!(x.eval(1.5).is_err());
    }

    #[test]
    fn segment_increments_split_partial_segments() {
        let x = zigzag();
        let inc = x.segment_increments(0.125, 0.75).unwrap();
        assert_eq!(inc, vec![vec![0.5, 0.0], vec![0.0, 2.0], vec![-1.0, 0.0]]);
        let inc = x.segment_increments(0.25, 0.5).unwrap();
        assert_eq!(inc, vec![vec![0.0, 2.0]]);
        assert!(x.segment_increments(0.5, 0.5).is_err());
    }

    #[test]
    fn reversal_and_coarsening() {
        let x = zigzag();
        let r = x.reversed();
        assert_eq!(r.times(), &[0.0, 0.5, 0.75, 1.0]);
        assert_eq!(r.point(0), &[-1.0, 2.0]);
        let fine = SampledPath::new(SampledPath::uniform_times(4), vec![0., 1., 2., 3., 4.], 1).unwrap();
        assert_eq!(fine.coarsen(2).unwrap().values(), &[0.0, 2.0, 4.0]);
        assert!(fine.coarsen(3).is_err());
    }

    #[test]
    fn grid_location() {
        let g = SampledPath::uniform_times(8);
        assert_eq!(locate_on_grid(&g, &[0.0, 0.25, 1.0]).unwrap(), vec![0, 2, 8]);
        assert!(locate_on_grid(&g, &[0.3]).is_err());
    }
}
