//! Self-contained identity checks run by the `identity-checks` command.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::gaussian::CovarianceModel;
use crate::path::SampledPath;
use crate::signature::{path_signature, word_integral};
use crate::words::{generating_set, parse_multiset, shuffle, Word};
use crate::young::{covariance_l2_identity_check, fubini_diag};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            passed,
            detail,
        }
    }
}

/// A path with `segments` Gaussian increments of dimension `dim` on random times.
pub fn random_path(rng: &mut ChaCha8Rng, dim: usize, segments: usize) -> Result<SampledPath> {
    let mut gaps: Vec<f64> = (0..segments).map(|_| rng.gen_range(0.2..1.0)).collect();
    let total: f64 = gaps.iter().sum();
    gaps.iter_mut().for_each(|g| *g /= total);
    let mut times = vec![0.0];
    for g in &gaps[..segments - 1] {
        times.push(times.last().unwrap() + g);
    }
    times.push(1.0);
    let mut values = vec![0.0; dim];
    for s in 0..segments {
        for c in 0..dim {
            let z: f64 = rng.sample(StandardNormal);
            values.push(values[s * dim + c] + z);
        }
    }
    SampledPath::new(times, values, dim)
}

/// All words of length `1..=max_len` over `alphabet` letters.
pub fn all_words(alphabet: usize, max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut layer = vec![Vec::<u8>::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for a in 1..=alphabet as u8 {
                let mut v = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        out.extend(next.iter().map(|v| Word::new(v.clone()).expect("valid letters")));
        layer = next;
    }
    out
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

pub fn chen_check(seed: u64, paths: usize, dim: usize, depth: usize) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..paths {
        let x = random_path(&mut rng, dim, 6)?;
        let mut pts: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..1.0)).collect();
        pts.sort_by(f64::total_cmp);
        if pts[0] == pts[1] || pts[1] == pts[2] {
            continue;
        }
        let whole = path_signature(&x, depth, pts[0], pts[2])?;
        let left = path_signature(&x, depth, pts[0], pts[1])?;
        let right = path_signature(&x, depth, pts[1], pts[2])?;
        let prod = left.mul(&right)?;
        let scale = whole.levels().iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
        worst = worst.max(prod.max_abs_diff(&whole)? / scale);
    }
    Ok(CheckResult::new(
        "chen",
        worst <= 1e-10,
        format!("{paths} paths, d={dim}, N={depth}, max relative gap {worst:.2e}"),
    ))
}

pub fn shuffle_check(seed: u64, paths: usize) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words = all_words(2, 4);
    let mut worst = 0.0f64;
    let mut pairs = 0usize;
    for _ in 0..paths {
        let x = random_path(&mut rng, 2, 5)?;
        for u in &words {
            for v in &words {
                if u.len() + v.len() > 5 {
                    continue;
                }
                pairs += 1;
                let lhs = word_integral(&x, u, 0.0, 1.0)? * word_integral(&x, v, 0.0, 1.0)?;
                let mut rhs = 0.0;
                for (w, c) in shuffle(u, v).terms() {
                    rhs += c as f64 * word_integral(&x, w, 0.0, 1.0)?;
                }
                worst = worst.max(rel_gap(lhs, rhs));
            }
        }
    }
    Ok(CheckResult::new(
        "shuffle",
        worst <= 1e-9,
        format!("{pairs} word pairs on {paths} paths, max relative gap {worst:.2e}"),
    ))
}

pub fn fubini_check(seed: u64) -> Result<CheckResult> {
    let grid = SampledPath::uniform_times(3999);
    let id = fubini_diag(&grid, &grid, &grid, 1.0)?;
    let sampler = crate::gaussian::GaussianSampler::new(&CovarianceModel::bm(1)?, 1024)?;
    let b = sampler.sample_component(seed, 0, 0);
    let bt = SampledPath::uniform_times(1024);
    let bm = fubini_diag(&bt, &b, &b, 1.0)?;
    let gap = rel_gap(bm.iterated, bm.half_diagonal);
    let passed = (id.iterated - 1.0 / 6.0).abs() <= 1e-3 && (id.naive - 1.0 / 3.0).abs() <= 1e-3 && gap <= 1e-6;
    Ok(CheckResult::new(
        "fubini",
        passed,
        format!(
            "identity: simplex {:.6}, naive {:.6}; brownian: relative gap {gap:.2e}",
            id.iterated, id.naive
        ),
    ))
}

pub fn covariance_check(seed: u64, workers: usize) -> Result<CheckResult> {
    let r = covariance_l2_identity_check(&CovarianceModel::bm(2)?, 64, 4000, seed, workers)?;
    let tol = 3.0 * r.mc_stderr + 0.02 * r.young_value.abs();
    Ok(CheckResult::new(
        "covariance-l2",
        (r.mc_estimate - r.young_value).abs() <= tol,
        format!(
            "monte carlo {:.4} ± {:.4}, young sum {:.4}",
            r.mc_estimate, r.mc_stderr, r.young_value
        ),
    ))
}

pub fn generating_set_check() -> Result<CheckResult> {
    let cases = [("aab", "aab"), ("aaab", "aaab"), ("aabb", "aabb"), ("aabc", "aabc,abac,aacb")];
    let mut passed = true;
    let mut detail = Vec::new();
    for (multiset, want) in cases {
        let got: Vec<String> = generating_set(&parse_multiset(multiset)?)?
            .iter()
            .map(|w| w.to_string())
            .collect();
        let mut want: Vec<&str> = want.split(',').collect();
        want.sort_unstable();
        passed &= got == want;
        detail.push(format!("{{{multiset}}} -> {{{}}}", got.join(",")));
    }
    Ok(CheckResult::new("generating-sets", passed, detail.join("; ")))
}

/// Runs every check with the given seed.
pub fn run_all(seed: u64, workers: usize) -> Result<Vec<CheckResult>> {
    Ok(vec![
        chen_check(seed, 100, 3, 5)?,
        shuffle_check(seed, 20)?,
        fubini_check(seed)?,
        covariance_check(seed, workers)?,
        generating_set_check()?,
    ])
}
