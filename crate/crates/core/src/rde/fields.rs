use super::dual::{HyperDual, Scalar, MAX_UNITS};
use crate::error::{ensure, Error, Result};

/// `d` vector fields `V_1, …, V_d` on `R^e` with iterated derivatives
/// `𝒱_{i₁}⋯𝒱_{i_{n-1}} V_{i_n}`, where `𝒱_i = Σ_k V_i^k ∂_k`.
///
/// Field indices are 0-based.
pub trait VectorFieldSet: Send + Sync {
    fn state_dim(&self) -> usize;
    fn driver_dim(&self) -> usize;
    /// Largest `n` accepted by [`VectorFieldSet::iterated_derivative`].
    fn max_order(&self) -> usize;
    fn eval(&self, i: usize, y: &[f64], out: &mut [f64]);
    fn iterated_derivative(&self, indices: &[usize], y: &[f64], out: &mut [f64]) -> Result<()>;
}

/// Vector fields written once over any [`Scalar`]; derivatives come from hyper-dual
/// evaluation and are exact up to rounding.
pub trait AnalyticFields: Send + Sync {
    fn state_dim(&self) -> usize;
    fn driver_dim(&self) -> usize;
    fn field<S: Scalar>(&self, i: usize, y: &[S], out: &mut [S]);
}

pub(crate) fn check_indices(v: &dyn VectorFieldSet, indices: &[usize], y: &[f64], out: &[f64]) -> Result<()> {
    ensure!(!indices.is_empty(), "derivative needs at least one field index");
    if indices.len() > v.max_order() {
        return Err(Error::Contract(format!(
            "derivative order {} exceeds the supported order {}",
            indices.len(),
            v.max_order()
        )));
    }
    ensure!(
        indices.iter().all(|&i| i < v.driver_dim()),
        "field index out of range"
    );
    ensure!(
        y.len() == v.state_dim() && out.len() == v.state_dim(),
        "state has wrong dimension"
    );
    Ok(())
}

impl<T: AnalyticFields> VectorFieldSet for T {
    fn state_dim(&self) -> usize {
        AnalyticFields::state_dim(self)
    }

    fn driver_dim(&self) -> usize {
        AnalyticFields::driver_dim(self)
    }

    fn max_order(&self) -> usize {
        MAX_UNITS + 1
    }

    fn eval(&self, i: usize, y: &[f64], out: &mut [f64]) {
        self.field(i, y, out);
    }

    fn iterated_derivative(&self, indices: &[usize], y: &[f64], out: &mut [f64]) -> Result<()> {
        check_indices(self, indices, y, out)?;
        let n = indices.len();
        if n == 1 {
            self.field(indices[0], y, out);
            return Ok(());
        }
        let units = n - 1;
        let e = y.len();
        let mut z: Vec<HyperDual> = y.iter().map(|&v| HyperDual::constant(v, units)).collect();
        let mut v = vec![HyperDual::constant(0.0, units); e];
        for (unit, &i) in indices[..units].iter().enumerate() {
            self.field(i, &z, &mut v);
            for (zk, vk) in z.iter_mut().zip(&v) {
                *zk = *zk + vk.times_unit(unit);
            }
        }
        self.field(indices[n - 1], &z, &mut v);
        let full = (1 << units) - 1;
        for (o, vk) in out.iter_mut().zip(&v) {
            *o = vk.coefficient(full);
        }
        Ok(())
    }
}

/// `V_i(y) = A_i y + b_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineFields {
    e: usize,
    /// `d` row-major `e × e` matrices.
    mats: Vec<Vec<f64>>,
    shifts: Vec<Vec<f64>>,
}

impl AffineFields {
    pub fn new(mats: Vec<Vec<f64>>, shifts: Vec<Vec<f64>>) -> Result<Self> {
        ensure!(!mats.is_empty(), "need at least one field");
        ensure!(mats.len() == shifts.len(), "one shift per matrix");
        let e = shifts[0].len();
        ensure!(e >= 1, "state dimension must be positive");
        ensure!(
            mats.iter().all(|m| m.len() == e * e) && shifts.iter().all(|b| b.len() == e),
            "matrices must be e×e and shifts of length e"
        );
        Ok(Self { e, mats, shifts })
    }

    pub fn linear(mats: Vec<Vec<f64>>, e: usize) -> Result<Self> {
        let shifts = vec![vec![0.0; e]; mats.len()];
        Self::new(mats, shifts)
    }

    /// Constant fields `V_i = b_i`.
    pub fn constant(vectors: Vec<Vec<f64>>) -> Result<Self> {
        let e = vectors.first().map_or(0, Vec::len);
        Self::new(vec![vec![0.0; e * e]; vectors.len()], vectors)
    }

    pub fn zero(e: usize, d: usize) -> Result<Self> {
        Self::constant(vec![vec![0.0; e]; d])
    }

    pub fn matrix(&self, i: usize) -> &[f64] {
        &self.mats[i]
    }
}

impl AnalyticFields for AffineFields {
    fn state_dim(&self) -> usize {
        self.e
    }

    fn driver_dim(&self) -> usize {
        self.mats.len()
    }

    fn field<S: Scalar>(&self, i: usize, y: &[S], out: &mut [S]) {
        let a = &self.mats[i];
        for (k, o) in out.iter_mut().enumerate() {
            let mut acc = y[0].lift(self.shifts[i][k]);
            for (l, &yl) in y.iter().enumerate() {
                let c = a[k * self.e + l];
                if c != 0.0 {
                    acc = acc + yl * c;
                }
            }
            *o = acc;
        }
    }
}

/// Bounded, smooth, non-commuting fields on `R²` driven by two components:
///
/// `V_1(y) = (cos y₂, ½ σ(y₁))`, `V_2(y) = (½ sin(y₁ + y₂), cos y₁)` with `σ` the
/// logistic function.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SmoothNonlinear;

impl AnalyticFields for SmoothNonlinear {
    fn state_dim(&self) -> usize {
        2
    }

    fn driver_dim(&self) -> usize {
        2
    }

    fn field<S: Scalar>(&self, i: usize, y: &[S], out: &mut [S]) {
        match i {
            0 => {
                out[0] = y[1].cos();
                out[1] = y[0].sigmoid() * 0.5;
            }
            _ => {
                out[0] = (y[0] + y[1]).sin() * 0.5;
                out[1] = y[0].cos();
            }
        }
    }
}

/// Fields `W_i(z) = A V_i(A⁻¹(z - b))`, the image of `V` under `y ↦ Ay + b`.
#[derive(Clone, Debug)]
pub struct AffineConjugate<T> {
    inner: T,
    a: Vec<f64>,
    a_inv: Vec<f64>,
    b: Vec<f64>,
}

impl<T: AnalyticFields> AffineConjugate<T> {
    pub fn new(inner: T, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let e = inner.state_dim();
        ensure!(a.len() == e * e && b.len() == e, "A must be e×e and b of length e");
        let a_inv = invert(&a, e)?;
        Ok(Self { inner, a, a_inv, b })
    }

    /// `y ↦ Ay + b`.
    pub fn forward(&self, y: &[f64]) -> Vec<f64> {
        let e = y.len();
        (0..e)
            .map(|k| self.b[k] + (0..e).map(|l| self.a[k * e + l] * y[l]).sum::<f64>())
            .collect()
    }
}

impl<T: AnalyticFields> AnalyticFields for AffineConjugate<T> {
    fn state_dim(&self) -> usize {
        self.inner.state_dim()
    }

    fn driver_dim(&self) -> usize {
        self.inner.driver_dim()
    }

    fn field<S: Scalar>(&self, i: usize, z: &[S], out: &mut [S]) {
        let e = z.len();
        let shifted: Vec<S> = z.iter().zip(&self.b).map(|(&zk, &bk)| zk + (-bk)).collect();
        let y: Vec<S> = (0..e)
            .map(|k| {
                (1..e).fold(shifted[0] * self.a_inv[k * e], |acc, l| {
                    acc + shifted[l] * self.a_inv[k * e + l]
                })
            })
            .collect();
        let mut v = y.clone();
        self.inner.field(i, &y, &mut v);
        for (k, o) in out.iter_mut().enumerate() {
            *o = (1..e).fold(v[0] * self.a[k * e], |acc, l| acc + v[l] * self.a[k * e + l]);
        }
    }
}

fn invert(a: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut m = a.to_vec();
    let mut inv = vec![0.0; n * n];
    for k in 0..n {
        inv[k * n + k] = 1.0;
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| m[r * n + col].abs().total_cmp(&m[s * n + col].abs()))
            .unwrap_or(col);
        if m[pivot * n + col].abs() < 1e-14 {
            return Err(Error::Singular("affine map is not invertible".into()));
        }
        for c in 0..n {
            m.swap(col * n + c, pivot * n + c);
            inv.swap(col * n + c, pivot * n + c);
        }
        let p = m[col * n + col];
        for c in 0..n {
            m[col * n + c] /= p;
            inv[col * n + c] /= p;
        }
        for r in 0..n {
            if r != col {
                let f = m[r * n + col];
                for c in 0..n {
                    m[r * n + c] -= f * m[col * n + c];
                    inv[r * n + c] -= f * inv[col * n + c];
                }
            }
        }
    }
    Ok(inv)
}

type FieldFn = dyn Fn(usize, &[f64], &mut [f64]) + Send + Sync;

/// User-supplied fields whose derivatives are taken by nested central differences
/// along the fields themselves.
pub struct FiniteDifferenceFields {
    e: usize,
    d: usize,
    h: f64,
    order: usize,
    f: Box<FieldFn>,
}

impl FiniteDifferenceFields {
    /// Nested differences beyond this order are dominated by rounding.
    pub const MAX_ORDER: usize = 3;

    pub fn new(
        e: usize,
        d: usize,
        h: f64,
        order: usize,
        f: impl Fn(usize, &[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Result<Self> {
        ensure!(e >= 1 && d >= 1, "dimensions must be positive");
        ensure!(h > 0.0 && h.is_finite(), "difference step must be positive");
        if order > Self::MAX_ORDER || order == 0 {
            return Err(Error::Unsupported(format!(
                "finite-difference fields support orders 1..={}, got {order}",
                Self::MAX_ORDER
            )));
        }
        Ok(Self {
            e,
            d,
            h,
            order,
            f: Box::new(f),
        })
    }

    /// `𝒱_{i₁}⋯𝒱_{i_{n-1}} V_{i_n}(y)` with the outermost operator differenced first.
    fn nested(&self, indices: &[usize], y: &[f64], out: &mut [f64]) {
        let (first, rest) = indices.split_first().expect("non-empty indices");
        if rest.is_empty() {
            (self.f)(*first, y, out);
            return;
        }
        let mut dir = vec![0.0; self.e];
        (self.f)(*first, y, &mut dir);
        let plus: Vec<f64> = y.iter().zip(&dir).map(|(a, b)| a + self.h * b).collect();
        let minus: Vec<f64> = y.iter().zip(&dir).map(|(a, b)| a - self.h * b).collect();
        let mut fp = vec![0.0; self.e];
        let mut fm = vec![0.0; self.e];
        self.nested(rest, &plus, &mut fp);
        self.nested(rest, &minus, &mut fm);
        for ((o, p), m) in out.iter_mut().zip(&fp).zip(&fm) {
            *o = (p - m) / (2.0 * self.h);
        }
    }
}

impl VectorFieldSet for FiniteDifferenceFields {
    fn state_dim(&self) -> usize {
        self.e
    }

    fn driver_dim(&self) -> usize {
        self.d
    }

    fn max_order(&self) -> usize {
        self.order
    }

    fn eval(&self, i: usize, y: &[f64], out: &mut [f64]) {
        (self.f)(i, y, out);
    }

    fn iterated_derivative(&self, indices: &[usize], y: &[f64], out: &mut [f64]) -> Result<()> {
        check_indices(self, indices, y, out)?;
        self.nested(indices, y, out);
        Ok(())
    }
}

/// Named presets on `R²` driven by two components: `linear`, `nonlinear`, `zero`.
pub fn preset(name: &str) -> Result<Box<dyn VectorFieldSet>> {
    match name {
        "linear" => Ok(Box::new(linear_preset())),
        "nonlinear" => Ok(Box::new(SmoothNonlinear)),
        "zero" => Ok(Box::new(AffineFields::zero(2, 2)?)),
        other => Err(Error::Parse(format!(
            "unknown preset {other:?}; expected linear, nonlinear or zero"
        ))),
    }
}

/// Two non-commuting linear fields on `R²`.
pub fn linear_preset() -> AffineFields {
    AffineFields::linear(
        vec![vec![0.2, 1.0, -1.0, 0.1], vec![0.5, -0.3, 0.4, -0.2]],
        2,
    )
    .expect("valid preset")
}

/// Initial condition used by the presets.
pub const PRESET_START: [f64; 2] = [1.0, 0.0];

#[cfg(test)]
mod tests {
    use super::*;

    fn matvec(a: &[f64], y: &[f64]) -> Vec<f64> {
        let e = y.len();
        (0..e).map(|k| (0..e).map(|l| a[k * e + l] * y[l]).sum()).collect()
    }

    #[test]
    fn linear_closed_form() {
        let f = linear_preset();
        let y = [0.3, -1.2];
        for idx in [vec![0], vec![1, 0], vec![0, 1, 1], vec![1, 0, 1, 0]] {
            // A_{i_n} ⋯ A_{i_1} y
            let mut want = y.to_vec();
            for &i in &idx {
                want = matvec(f.matrix(i), &want);
            }
            let mut got = [0.0; 2];
            f.iterated_derivative(&idx, &y, &mut got).unwrap();
            for k in 0..2 {
                assert!((got[k] - want[k]).abs() < 1e-14, "{idx:?}");
            }
        }
    }

    #[test]
    fn analytic_matches_finite_differences() {
        let fd = FiniteDifferenceFields::new(2, 2, 1e-4, 3, |i, y, out| SmoothNonlinear.field(i, y, out)).unwrap();
        let y = [0.4, -0.7];
        for idx in [vec![1], vec![0, 1], vec![1, 1], vec![0, 1, 0], vec![1, 0, 0]] {
            let mut a = [0.0; 2];
            let mut b = [0.0; 2];
            SmoothNonlinear.iterated_derivative(&idx, &y, &mut a).unwrap();
            fd.iterated_derivative(&idx, &y, &mut b).unwrap();
            for k in 0..2 {
                assert!((a[k] - b[k]).abs() <= 1e-6 * a[k].abs().max(1.0), "{idx:?}: {a:?} vs {b:?}");
            }
        }
        let mut out = [0.0; 2];
        assert!(fd.iterated_derivative(&[0, 0, 0, 0], &y, &mut out).is_err());
        assert!(FiniteDifferenceFields::new(2, 2, 1e-4, 4, |_, _, _| {}).is_err());
    }

    #[test]
    fn first_order_reproduces_field() {
        let y = [0.1, 0.9];
        let mut a = [0.0; 2];
        let mut b = [0.0; 2];
        for i in 0..2 {
            SmoothNonlinear.eval(i, &y, &mut a);
            SmoothNonlinear.iterated_derivative(&[i], &y, &mut b).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn conjugation_maps_derivatives() {
        let a = vec![2.0, 1.0, -0.5, 1.5];
        let b = vec![0.3, -0.2];
        let w = AffineConjugate::new(SmoothNonlinear, a.clone(), b).unwrap();
        let y = [0.2, 0.6];
        let z = w.forward(&y);
        let mut dv = [0.0; 2];
        let mut dw = [0.0; 2];
        SmoothNonlinear.iterated_derivative(&[1, 0, 1], &y, &mut dv).unwrap();
        w.iterated_derivative(&[1, 0, 1], &z, &mut dw).unwrap();
        let mapped = matvec(&a, &dv);
        for k in 0..2 {
            assert!((mapped[k] - dw[k]).abs() < 1e-13);
        }
        assert!(AffineConjugate::new(SmoothNonlinear, vec![1.0, 2.0, 2.0, 4.0], vec![0.0; 2]).is_err());
    }

    #[test]
    fn presets_by_name() {
        for name in ["linear", "nonlinear", "zero"] {
            let p = preset(name).unwrap();
            assert_eq!((p.state_dim(), p.driver_dim()), (2, 2));
        }
        assert!(preset("bogus").is_err());
    }
}
