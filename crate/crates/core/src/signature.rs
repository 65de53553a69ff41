//! Signatures (iterated integrals) of piecewise-linear paths.
//!
//! The signature of a sampled path over `[s, t]` is the ordered Chen product of the
//! exponentials of its linear pieces, with the pieces at `s` and `t` split exactly.

use crate::error::{ensure, Result};
use crate::path::SampledPath;
use crate::tensor::TensorElement;
use crate::words::Word;

/// `S_N(x)_{s,t}` for the piecewise-linear interpolation of `x`.
pub fn path_signature(x: &SampledPath, depth: usize, s: f64, t: f64) -> Result<TensorElement> {
    ensure!(s < t, "signature needs s < t, got s={s}, t={t}");
    let increments = x.segment_increments(s, t)?;
    if let [inc] = increments.as_slice() {
        return TensorElement::exp(inc, depth);
    }
    let mut sig = TensorElement::unit(x.dim(), depth)?;
    for inc in &increments {
        sig.mul_exp_in_place(inc)?;
    }
    Ok(sig)
}

/// Signature over the whole sampled range.
pub fn full_signature(x: &SampledPath, depth: usize) -> Result<TensorElement> {
    path_signature(x, depth, x.start(), x.end())
}

/// Signatures over consecutive cells of the partition `points`.
pub fn signatures_on_partition(
    x: &SampledPath,
    depth: usize,
    points: &[f64],
) -> Result<Vec<TensorElement>> {
    ensure!(points.len() >= 2, "a partition needs at least two points");
    points
        .windows(2)
        .map(|w| path_signature(x, depth, w[0], w[1]))
        .collect()
}

/// The iterated integral `x^w_{s,t}`; the empty word gives 1.
pub fn word_integral(x: &SampledPath, w: &Word, s: f64, t: f64) -> Result<f64> {
    ensure!(
        (w.max_letter() as usize) <= x.dim(),
        "word {w} uses letters beyond the path dimension {}",
        x.dim()
    );
    if w.is_empty() {
        return Ok(1.0);
    }
    let sig = path_signature(x, w.len(), s, t)?;
    sig.coefficient(&w.multi_index())
}

/// Extends the level-`from_level` rough path of `x` to level `to_level`.
///
/// For piecewise-linear realizations the extension is unique and equals the level
/// `to_level` signature of the same path, which is what is returned; its projection
/// onto level `from_level` is the input rough path.
pub fn lyons_lift(
    x: &SampledPath,
    from_level: usize,
    to_level: usize,
    s: f64,
    t: f64,
) -> Result<TensorElement> {
    ensure!(from_level >= 1, "lift starts from level >= 1");
    ensure!(
        to_level >= from_level,
        "cannot lift level {from_level} down to level {to_level}"
    );
    path_signature(x, to_level, s, t)
}
