//! Monte-Carlo convergence-rate experiments.

pub mod checks;
pub mod config;
mod fit;

pub use fit::{fit_rate, RateFit};

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{ensure, Error, Result};
use crate::gaussian::{CovarianceModel, GaussianSampler};
use crate::parallel::par_map;
use crate::path::SampledPath;
use crate::rde::{preset, solve, wong_zakai_solve, SchemeConfig, SchemeKind, PRESET_START};
use crate::signature::full_signature;

/// Default half-width of the acceptance band around the target rate.
pub const DEFAULT_BAND_RADIUS: f64 = 0.15;
/// Smallest allowed ratio between the reference mesh and the finest measured mesh.
pub const MIN_REFERENCE_RATIO: usize = 8;
/// Largest fraction of trajectories that may be dropped as divergent.
pub const MAX_EXCLUDED_FRACTION: f64 = 0.05;
/// Scale factor turning `s/√m` into the standard error of a sample median.
const MEDIAN_SE_FACTOR: f64 = 1.2533141373155003;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Statistic {
    #[default]
    Median,
    Mean,
    L2,
}

impl FromStr for Statistic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "median" => Ok(Self::Median),
            "mean" => Ok(Self::Mean),
            "l2" | "L2" => Ok(Self::L2),
            _ => Err(Error::Parse(format!("unknown statistic {s:?}"))),
        }
    }
}

/// `(statistic, standard error)` of a sample.
pub fn aggregate(values: &[f64], stat: Statistic) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let sd = if values.len() > 1 {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0)).sqrt()
    } else {
        0.0
    };
    match stat {
        Statistic::Mean => (mean, sd / m.sqrt()),
        Statistic::Median => {
            let mut sorted = values.to_vec();
            sorted.sort_by(f64::total_cmp);
            let n = sorted.len();
            let med = if n % 2 == 1 {
                sorted[n / 2]
            } else {
                0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
            };
            (med, MEDIAN_SE_FACTOR * sd / m.sqrt())
        }
        Statistic::L2 => {
            let sq: Vec<f64> = values.iter().map(|v| v * v).collect();
            let (ms, se) = aggregate(&sq, Statistic::Mean);
            let rms = ms.sqrt();
            (rms, if rms > 0.0 { se / (2.0 * rms) } else { 0.0 })
        }
    }
}

/// How the distance between a scheme's output and the reference is measured on `D_k`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum ErrorMetric {
    #[default]
    Sup,
    /// Discrete `q`-variation of the error path over sub-partitions of `D_k`.
    QVariation(f64),
}

impl FromStr for ErrorMetric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "sup" {
            return Ok(Self::Sup);
        }
        if let Some(q) = s.strip_prefix("qvar:") {
            let q: f64 = q.parse().map_err(|_| Error::Parse(format!("bad q in {s:?}")))?;
            if q >= 1.0 {
                return Ok(Self::QVariation(q));
            }
        }
        Err(Error::Parse(format!(
            "unknown metric {s:?}; expected sup or qvar:<q>=1..>"
        )))
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Error of `approx` (on `D_k`) against `reference` sampled every `stride` points.
fn path_error(approx: &SampledPath, reference: &SampledPath, stride: usize, metric: ErrorMetric) -> f64 {
    let diffs: Vec<Vec<f64>> = (0..approx.len())
        .map(|j| {
            approx
                .point(j)
                .iter()
                .zip(reference.point(j * stride))
                .map(|(a, b)| a - b)
                .collect()
        })
        .collect();
    match metric {
        ErrorMetric::Sup => diffs.iter().map(|d| norm(d)).fold(0.0, f64::max),
        ErrorMetric::QVariation(q) => {
            let n = diffs.len();
            let mut best = vec![0.0f64; n];
            for b in 1..n {
                best[b] = (0..b)
                    .map(|a| {
                        let inc: Vec<f64> = diffs[b].iter().zip(&diffs[a]).map(|(x, y)| x - y).collect();
                        best[a] + norm(&inc).powf(q)
                    })
                    .fold(0.0, f64::max);
            }
            best[n - 1].powf(1.0 / q)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub model: CovarianceModel,
    pub meshes: Vec<usize>,
    pub ref_mesh: usize,
    pub mc: usize,
    pub seed: u64,
    pub scheme: SchemeKind,
    /// `N` of the Euler schemes.
    pub level: usize,
    pub preset: String,
    pub metric: ErrorMetric,
    pub statistic: Statistic,
    /// Runge-Kutta steps per reference-mesh segment in every ODE solve.
    pub substeps: usize,
    pub workers: usize,
    /// Acceptance band for the slope; defaults to the target ± [`DEFAULT_BAND_RADIUS`].
    pub band: Option<(f64, f64)>,
}

impl ExperimentSpec {
    /// Wong-Zakai experiment with the default desk-scale parameters.
    pub fn new(model: CovarianceModel) -> Self {
        Self {
            model,
            meshes: vec![8, 16, 32, 64, 128, 256],
            ref_mesh: 2048,
            mc: 64,
            seed: 1,
            scheme: SchemeKind::WongZakaiOde,
            level: 2,
            preset: "nonlinear".into(),
            metric: ErrorMetric::Sup,
            statistic: Statistic::Median,
            substeps: 8,
            workers: 1,
            band: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_meshes(&self.meshes, self.ref_mesh)?;
        ensure!(self.mc >= 1, "need at least one trajectory");
        ensure!(self.substeps >= 1, "need at least one substep");
        ensure!(
            (1..=5).contains(&self.level),
            "scheme level must be in 1..=5, got {}",
            self.level
        );
        Ok(())
    }

    /// Target exponent: `2H - 1/2`, capped by `(N+1)H - 1` for the Euler schemes.
    pub fn target(&self) -> f64 {
        let h = self.model.hurst();
        let wz = 2.0 * h - 0.5;
        match self.scheme {
            SchemeKind::WongZakaiOde => wz,
            _ => wz.min((self.level as f64 + 1.0) * h - 1.0),
        }
    }
}

fn validate_meshes(meshes: &[usize], ref_mesh: usize) -> Result<()> {
    ensure!(!meshes.is_empty(), "need at least one mesh");
    ensure!(meshes[0] >= 1, "meshes must be positive");
    ensure!(
        meshes.windows(2).all(|w| w[0] < w[1]),
        "meshes must be strictly increasing"
    );
    let kmax = *meshes.last().unwrap();
    ensure!(
        ref_mesh >= MIN_REFERENCE_RATIO * kmax,
        "reference mesh {ref_mesh} must be at least {MIN_REFERENCE_RATIO}× the finest mesh {kmax}"
    );
    ensure!(
        meshes.iter().all(|k| ref_mesh.is_multiple_of(*k)),
        "every mesh must divide the reference mesh {ref_mesh}"
    );
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshError {
    pub k: usize,
    pub error: f64,
    pub stderr: f64,
    pub excluded: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateReport {
    pub label: String,
    pub rows: Vec<MeshError>,
    /// `None` when some error is zero and no slope can be fitted.
    pub fit: Option<RateFit>,
    pub target: f64,
    pub band: (f64, f64),
    pub trajectories: usize,
    pub excluded: usize,
}

impl RateReport {
    fn build(
        label: String,
        meshes: &[usize],
        errors: &[Vec<f64>],
        statistic: Statistic,
        target: f64,
        band: Option<(f64, f64)>,
        trajectories: usize,
    ) -> Result<Self> {
        let excluded = trajectories - errors.len();
        let mut rows = Vec::with_capacity(meshes.len());
        for (c, &k) in meshes.iter().enumerate() {
            let column: Vec<f64> = errors.iter().map(|e| e[c]).collect();
            let (error, stderr) = if column.is_empty() {
                (f64::NAN, f64::NAN)
            } else {
                aggregate(&column, statistic)
            };
            rows.push(MeshError {
                k,
                error,
                stderr,
                excluded,
            });
        }
        let fit = if rows.len() >= 3 && rows.iter().all(|r| r.error > 0.0 && r.error.is_finite()) {
            Some(fit_rate(&rows.iter().map(|r| (r.k as f64, r.error)).collect::<Vec<_>>())?)
        } else {
            None
        };
        Ok(Self {
            label,
            rows,
            fit,
            target,
            band: band.unwrap_or((target - DEFAULT_BAND_RADIUS, target + DEFAULT_BAND_RADIUS)),
            trajectories,
            excluded,
        })
    }

    pub fn is_degenerate(&self) -> bool {
        self.fit.is_none()
    }

    pub fn slope(&self) -> Option<f64> {
        self.fit.map(|f| f.slope)
    }

    pub fn in_band(&self) -> bool {
        self.slope().is_some_and(|s| s >= self.band.0 && s <= self.band.1)
    }

    /// Errors are non-increasing in `k`.
    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].error <= w[0].error)
    }

    pub fn exclusions_ok(&self) -> bool {
        (self.excluded as f64) <= MAX_EXCLUDED_FRACTION * self.trajectories as f64
    }

    /// Slope in band, monotone and few exclusions. A quantity expected to vanish
    /// (target 0) passes when every error is exactly zero.
    pub fn passes(&self) -> bool {
        let vanishing = self.target == 0.0 && self.rows.iter().all(|r| r.error == 0.0);
        (self.in_band() || vanishing) && self.is_monotone() && self.exclusions_ok()
    }

    /// CSV rows `k,stat_error,stderr,n_excluded` and a one-line `#` footer.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,stat_error,stderr,n_excluded\n");
        for r in &self.rows {
            let _ = writeln!(s, "{},{:e},{:e},{}", r.k, r.error, r.stderr, r.excluded);
        }
        match self.fit {
            Some(f) => {
                let _ = writeln!(
                    s,
                    "# slope={:.6},half_width={:.6},target={:.6}",
                    f.slope, f.half_width, self.target
                );
            }
            None => {
                let _ = writeln!(s, "# slope=degenerate,half_width=NaN,target={:.6}", self.target);
            }
        }
        s
    }

    /// One human-readable verdict line.
    pub fn summary(&self) -> String {
        let slope = match self.fit {
            Some(f) => format!("slope {:.3} ± {:.3}", f.slope, f.half_width),
            None => "degenerate (zero errors)".into(),
        };
        format!(
            "{}: {slope}, target {:.3}, band [{:.2}, {:.2}], monotone {}, excluded {}/{} -> {}",
            self.label,
            self.target,
            self.band.0,
            self.band.1,
            self.is_monotone(),
            self.excluded,
            self.trajectories,
            if self.passes() { "PASS" } else { "FAIL" }
        )
    }
}

/// Runs the experiment for the scheme in `spec`.
///
/// Each trajectory is sampled on the reference mesh and solved there by the ODE
/// method; each `D_k` solution is compared with it at the points of `D_k`.
/// Trajectories on which any solve diverges are dropped and counted.
pub fn run_rate(spec: &ExperimentSpec) -> Result<RateReport> {
    spec.validate()?;
    let fields = preset(&spec.preset)?;
    let v = &*fields;
    let model = spec.model.with_dim(v.driver_dim())?;
    let sampler = GaussianSampler::new(&model, spec.ref_mesh)?;
    let results = par_map(spec.workers, spec.mc, |i| {
        let x = sampler.sample(spec.seed, i as u64)?;
        let outcome = (|| -> Result<Vec<f64>> {
            let reference = wong_zakai_solve(&x, v, &PRESET_START, spec.substeps)?;
            let mut errs = Vec::with_capacity(spec.meshes.len());
            for &k in &spec.meshes {
                let stride = spec.ref_mesh / k;
                let coarse = x.coarsen(stride)?;
                let y = match spec.scheme {
                    SchemeKind::WongZakaiOde => {
                        wong_zakai_solve(&coarse, v, &PRESET_START, spec.substeps * stride)?
                    }
                    kind => {
                        let config = SchemeConfig {
                            kind,
                            level: spec.level,
                            partition: coarse.times().to_vec(),
                            substeps: 1,
                        };
                        let driver = if kind == SchemeKind::EulerN { &x } else { &coarse };
                        solve(&config, driver, v, &PRESET_START)?
                    }
                };
                errs.push(path_error(&y, &reference, stride, spec.metric));
            }
            Ok(errs)
        })();
        match outcome {
            Ok(e) => Ok(Some(e)),
            Err(Error::Divergence { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    })?;
    let kept: Vec<Vec<f64>> = results.into_iter().flatten().collect();
    let label = match spec.scheme {
        SchemeKind::WongZakaiOde => format!("wong-zakai H={}", model.hurst()),
        SchemeKind::SimplifiedEulerN => format!("simplified euler N={} H={}", spec.level, model.hurst()),
        SchemeKind::EulerN => format!("euler N={} H={}", spec.level, model.hurst()),
    };
    RateReport::build(label, &spec.meshes, &kept, spec.statistic, spec.target(), spec.band, spec.mc)
}

pub fn run_wong_zakai_rate(spec: &ExperimentSpec) -> Result<RateReport> {
    run_rate(&ExperimentSpec {
        scheme: SchemeKind::WongZakaiOde,
        ..spec.clone()
    })
}

pub fn run_simplified_euler_rate(spec: &ExperimentSpec) -> Result<RateReport> {
    run_rate(&ExperimentSpec {
        scheme: SchemeKind::SimplifiedEulerN,
        ..spec.clone()
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelRateSpec {
    pub model: CovarianceModel,
    /// Signature depth `N`; one report per level `1..=N`.
    pub depth: usize,
    pub meshes: Vec<usize>,
    pub ref_mesh: usize,
    pub mc: usize,
    pub seed: u64,
    pub statistic: Statistic,
    pub workers: usize,
    pub band: Option<(f64, f64)>,
}

impl LevelRateSpec {
    pub fn new(model: CovarianceModel, depth: usize) -> Self {
        Self {
            model,
            depth,
            meshes: vec![8, 16, 32, 64, 128, 256],
            ref_mesh: 2048,
            mc: 64,
            seed: 1,
            statistic: Statistic::L2,
            workers: 1,
            band: None,
        }
    }
}

/// Distance between `π_n S(X^{(k)})_{0,1}` and `π_n S(X^{(ref)})_{0,1}` for each level.
///
/// Level 1 is read from the path values, so it vanishes identically because the
/// coarsened path shares its endpoints with the fine one.
pub fn run_level_l2_rate(spec: &LevelRateSpec) -> Result<Vec<RateReport>> {
    validate_meshes(&spec.meshes, spec.ref_mesh)?;
    ensure!((1..=4).contains(&spec.depth), "signature depth must be in 1..=4");
    ensure!(spec.mc >= 1, "need at least one trajectory");
    let model = if spec.model.dim() >= 2 {
        spec.model
    } else {
        spec.model.with_dim(2)?
    };
    let sampler = GaussianSampler::new(&model, spec.ref_mesh)?;
    let n_levels = spec.depth;
    // per trajectory: [mesh][level]
    let per_traj = par_map(spec.workers, spec.mc, |i| {
        let x = sampler.sample(spec.seed, i as u64)?;
        let fine = full_signature(&x, n_levels)?;
        let fine_inc = x.increment(x.start(), x.end())?;
        let mut out = Vec::with_capacity(spec.meshes.len());
        for &k in &spec.meshes {
            let coarse = x.coarsen(spec.ref_mesh / k)?;
            let sig = full_signature(&coarse, n_levels)?;
            let inc = coarse.increment(coarse.start(), coarse.end())?;
            let mut levels = Vec::with_capacity(n_levels);
            levels.push(norm(&inc.iter().zip(&fine_inc).map(|(a, b)| a - b).collect::<Vec<_>>()));
            for n in 2..=n_levels {
                let diff: Vec<f64> = sig.level(n).iter().zip(fine.level(n)).map(|(a, b)| a - b).collect();
                levels.push(norm(&diff));
            }
            out.push(levels);
        }
        Ok(out)
    })?;
    let target_wz = 2.0 * model.hurst() - 0.5;
    (1..=n_levels)
        .map(|n| {
            let errors: Vec<Vec<f64>> = per_traj
                .iter()
                .map(|t| t.iter().map(|m| m[n - 1]).collect())
                .collect();
            let target = if n == 1 { 0.0 } else { target_wz };
            RateReport::build(
                format!("level {n} H={}", model.hurst()),
                &spec.meshes,
                &errors,
                spec.statistic,
                target,
                spec.band,
                spec.mc,
            )
        })
        .collect()
}

/// `max_{t ∈ D_k} |X^{D_k}_t - X_t|` for a path on a mesh divisible by `k`.
pub fn node_error(x: &SampledPath, k: usize) -> Result<f64> {
    ensure!(k >= 1 && (x.len() - 1).is_multiple_of(k), "mesh {k} does not divide the path grid");
    let stride = (x.len() - 1) / k;
    let coarse = x.coarsen(stride)?;
    let mut worst = 0.0f64;
    for j in 0..coarse.len() {
        let d: Vec<f64> = coarse.eval(coarse.times()[j])?.iter().zip(x.point(j * stride)).map(|(a, b)| a - b).collect();
        worst = worst.max(norm(&d));
    }
    Ok(worst)
}
