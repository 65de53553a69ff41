use crate::error::{ensure, Result};

/// Least-squares fit of `log(error) = slope · log(1/k) + intercept`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Twice the standard error of the slope.
    pub half_width: f64,
}

pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    ensure!(points.len() >= 3, "a rate fit needs at least 3 meshes");
    ensure!(
        points.iter().all(|&(k, e)| k > 0.0 && e > 0.0 && e.is_finite()),
        "rate fit needs positive meshes and positive finite errors"
    );
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(k, _)| -k.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, e)| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    ensure!(sxx > 0.0, "rate fit needs at least two distinct meshes");
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    let se = (ssr / (n - 2.0) / sxx).sqrt();
    Ok(RateFit {
        slope,
        intercept,
        half_width: 2.0 * se,
    })
}
