//! Metric layer of the upper half-space `{xn > 0}` with `g = dx^2 / xn^2`.
//!
//! Curvature is derived, never assumed: Christoffel symbols come from the
//! metric, the Ricci tensor from the Christoffel symbols, and the soliton
//! constant from the resulting Ricci and scalar curvature.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::exterior::{KForm, VectorField};
use crate::ratlaurent::{rat, LaurentPoly, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("expected {expected} entries for `{field}`, got {got}")]
    WrongLength {
        field: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("rho must be non-zero")]
    ZeroRho,
    #[error("a, b and c are all zero")]
    AllZero,
    #[error("point lies on or beyond the boundary")]
    BoundaryPoint,
}

/// Symmetric 2-tensor stored on the upper triangle `i <= j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymTensor2 {
    dim: usize,
    terms: BTreeMap<(usize, usize), LaurentPoly>,
}

impl SymTensor2 {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn key(i: usize, j: usize) -> (usize, usize) {
        if i <= j {
            (i, j)
        } else {
            (j, i)
        }
    }

    pub fn get(&self, i: usize, j: usize) -> LaurentPoly {
        self.terms
            .get(&Self::key(i, j))
            .cloned()
            .unwrap_or_else(|| LaurentPoly::zero(self.dim))
    }

    /// Overwrites entry `(i, j)` (and `(j, i)`).
    pub fn set(&mut self, i: usize, j: usize, value: LaurentPoly) {
        let k = Self::key(i, j);
        if value.is_zero() {
            self.terms.remove(&k);
        } else {
            self.terms.insert(k, value);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &LaurentPoly)> {
        self.terms.iter().map(|(&k, v)| (k, v))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), v) in &other.terms {
            out.set(i, j, &out.get(i, j) + v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&rat(-1)))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.dim);
        for (&(i, j), v) in &self.terms {
            out.set(i, j, v.scale(c));
        }
        out
    }

    pub fn mul_poly(&self, f: &LaurentPoly) -> Self {
        let mut out = Self::zero(self.dim);
        for (&(i, j), v) in &self.terms {
            out.set(i, j, v * f);
        }
        out
    }

    /// Full contraction `h^ij t_ij` with another symmetric tensor.
    pub fn contract(&self, other: &Self) -> LaurentPoly {
        let mut out = LaurentPoly::zero(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                out += &(&a * &other.get(i, j));
            }
        }
        out
    }
}

/// Upper-triangle entries as `gij: poly` separated by `; `.
impl fmt::Display for SymTensor2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, ((i, j), v)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str("; ")?;
            }
            write!(f, "g{}{}: {v}", i + 1, j + 1)?;
        }
        Ok(())
    }
}

fn check_dim(n: usize) -> Result<(), GeometryError> {
    if n < 2 {
        Err(GeometryError::DimensionTooSmall(n))
    } else {
        Ok(())
    }
}

/// `g_ij = delta_ij / xn^2`.
pub fn metric(n: usize) -> Result<SymTensor2, GeometryError> {
    check_dim(n)?;
    let mut g = SymTensor2::zero(n);
    for i in 0..n {
        g.set(i, i, LaurentPoly::boundary_power(n, -2));
    }
    Ok(g)
}

/// `g^ij = xn^2 delta_ij`, obtained by inverting the diagonal of the metric.
pub fn inverse_metric(n: usize) -> Result<SymTensor2, GeometryError> {
    let g = metric(n)?;
    let mut inv = SymTensor2::zero(n);
    for i in 0..n {
        let entry = g
            .get(i, i)
            .inverse_boundary_monomial()
            .expect("half-space metric entries are boundary monomials");
        inv.set(i, i, entry);
    }
    Ok(inv)
}

/// Table of `Gamma^k_ij`, symmetric in `(i, j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Christoffel {
    dim: usize,
    data: Vec<LaurentPoly>,
}

impl Christoffel {
    fn zero(dim: usize) -> Self {
        Self {
            dim,
            data: vec![LaurentPoly::zero(dim); dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Gamma^k_ij`.
    pub fn get(&self, k: usize, i: usize, j: usize) -> &LaurentPoly {
        &self.data[(k * self.dim + i) * self.dim + j]
    }

    fn slot(&mut self, k: usize, i: usize, j: usize) -> &mut LaurentPoly {
        &mut self.data[(k * self.dim + i) * self.dim + j]
    }
}

/// Closed form `Gamma^k_ij = (d_ij d_kn - d_ik d_jn - d_jk d_in) / xn`.
pub fn christoffel(n: usize) -> Result<Christoffel, GeometryError> {
    check_dim(n)?;
    let last = n - 1;
    let inv_x = LaurentPoly::boundary_power(n, -1);
    let delta = |a: usize, b: usize| i64::from(a == b);
    let mut out = Christoffel::zero(n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let c = delta(i, j) * delta(k, last) - delta(i, k) * delta(j, last) - delta(j, k) * delta(i, last);
                if c != 0 {
                    *out.slot(k, i, j) = inv_x.scale(&rat(c));
                }
            }
        }
    }
    Ok(out)
}

/// `Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij)` for any metric
/// given with its inverse.
pub fn christoffel_from_metric(g: &SymTensor2, g_inv: &SymTensor2) -> Christoffel {
    let n = g.dim();
    let half = Rational::new(1.into(), 2.into());
    let mut out = Christoffel::zero(n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut acc = LaurentPoly::zero(n);
                for l in 0..n {
                    let inv = g_inv.get(k, l);
                    if inv.is_zero() {
                        continue;
                    }
                    let bracket = &(&g.get(j, l).deriv(i) + &g.get(i, l).deriv(j)) - &g.get(i, j).deriv(l);
                    acc += &(&inv * &bracket);
                }
                *out.slot(k, i, j) = acc.scale(&half);
            }
        }
    }
    out
}

/// `R_ij = d_k G^k_ij - d_i G^k_kj + G^k_kl G^l_ij - G^k_il G^l_kj`.
pub fn ricci_from_christoffel(gamma: &Christoffel) -> SymTensor2 {
    let n = gamma.dim();
    let mut out = SymTensor2::zero(n);
    for i in 0..n {
        for j in i..n {
            let mut acc = LaurentPoly::zero(n);
            for k in 0..n {
                acc += &gamma.get(k, i, j).deriv(k);
                acc -= &gamma.get(k, k, j).deriv(i);
                for l in 0..n {
                    acc += &(gamma.get(k, k, l) * gamma.get(l, i, j));
                    acc -= &(gamma.get(k, i, l) * gamma.get(l, k, j));
                }
            }
            out.set(i, j, acc);
        }
    }
    out
}

/// Geometry of `H^n` with the derived curvature cached.
#[derive(Debug, Clone)]
pub struct HalfSpace {
    dim: usize,
    metric: SymTensor2,
    inverse: SymTensor2,
    ricci: SymTensor2,
    scalar: LaurentPoly,
}

impl HalfSpace {
    pub fn new(n: usize) -> Result<Self, GeometryError> {
        let metric = metric(n)?;
        let inverse = inverse_metric(n)?;
        let gamma = christoffel_from_metric(&metric, &inverse);
        let ricci = ricci_from_christoffel(&gamma);
        let scalar = inverse.contract(&ricci);
        Ok(Self {
            dim: n,
            metric,
            inverse,
            ricci,
            scalar,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric(&self) -> &SymTensor2 {
        &self.metric
    }

    pub fn inverse_metric(&self) -> &SymTensor2 {
        &self.inverse
    }

    pub fn ricci(&self) -> &SymTensor2 {
        &self.ricci
    }

    pub fn scalar_curvature(&self) -> &LaurentPoly {
        &self.scalar
    }

    /// `(L_X g)_ij = X^k d_k g_ij + g_kj d_i X^k + g_ik d_j X^k`.
    pub fn lie_derivative_metric(&self, x: &VectorField) -> SymTensor2 {
        lie_derivative_of(&self.metric, x)
    }

    /// `L_X g + 2 S - 2 (lambda + rho r) g`, zero exactly when `(g, X)` is a
    /// Ricci-Bourguignon soliton with the given constants.
    pub fn rb_residual(&self, x: &VectorField, lambda: &Rational, rho: &Rational) -> SymTensor2 {
        let factor = &LaurentPoly::constant(self.dim, lambda.clone()) + &self.scalar.scale(rho);
        self.lie_derivative_metric(x)
            .add(&self.ricci.scale(&rat(2)))
            .sub(&self.metric.mul_poly(&factor).scale(&rat(2)))
    }

    /// Lowers the index of `X`: `w_i = g_ij X^j`.
    pub fn flat(&self, x: &VectorField) -> KForm {
        let n = self.dim;
        let comps = (0..n)
            .map(|i| {
                let mut acc = LaurentPoly::zero(n);
                for j in 0..n {
                    let gij = self.metric.get(i, j);
                    if !gij.is_zero() {
                        acc += &(&gij * x.component(j));
                    }
                }
                acc
            })
            .collect();
        KForm::one_form(comps).expect("components share the ambient dimension")
    }
}

/// Lie derivative of an arbitrary symmetric 2-tensor along `X`.
pub fn lie_derivative_of(g: &SymTensor2, x: &VectorField) -> SymTensor2 {
    let n = g.dim();
    let dx: Vec<Vec<LaurentPoly>> = (0..n)
        .map(|k| (0..n).map(|i| x.component(k).deriv(i)).collect())
        .collect();
    let mut out = SymTensor2::zero(n);
    for i in 0..n {
        for j in i..n {
            let mut acc = x.apply(&g.get(i, j));
            for k in 0..n {
                let gkj = g.get(k, j);
                if !gkj.is_zero() {
                    acc += &(&gkj * &dx[k][i]);
                }
                let gik = g.get(i, k);
                if !gik.is_zero() {
                    acc += &(&gik * &dx[k][j]);
                }
            }
            out.set(i, j, acc);
        }
    }
    out
}

pub fn flat(x: &VectorField) -> Result<KForm, GeometryError> {
    Ok(HalfSpace::new(x.dim())?.flat(x))
}

pub fn ricci(n: usize) -> Result<SymTensor2, GeometryError> {
    Ok(HalfSpace::new(n)?.ricci)
}

pub fn scalar_curvature(n: usize) -> Result<LaurentPoly, GeometryError> {
    Ok(HalfSpace::new(n)?.scalar)
}

pub fn lie_derivative_metric(x: &VectorField) -> Result<SymTensor2, GeometryError> {
    Ok(lie_derivative_of(&metric(x.dim())?, x))
}

/// The soliton constant forced by a Killing field on `H^n`:
/// `lambda = (n - 1)(n rho - 1)`.
pub fn soliton_lambda(n: usize, rho: &Rational) -> Rational {
    let n = rat(n as i64);
    (&n - rat(1)) * (&n * rho - rat(1))
}

/// Parameters `(a_1..a_(n-1), b, c_1..c_(n-1), rho, lambda)` of a soliton
/// field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolitonParams {
    pub n: usize,
    pub a: Vec<Rational>,
    pub b: Rational,
    pub c: Vec<Rational>,
    pub rho: Rational,
    pub lambda: Rational,
}

impl SolitonParams {
    /// Validates the record and sets `lambda` to [`soliton_lambda`].
    pub fn new(a: Vec<Rational>, b: Rational, c: Vec<Rational>, rho: Rational) -> Result<Self, GeometryError> {
        let n = a.len() + 1;
        check_dim(n)?;
        if c.len() != n - 1 {
            return Err(GeometryError::WrongLength {
                field: "c",
                expected: n - 1,
                got: c.len(),
            });
        }
        if rho.is_zero() {
            return Err(GeometryError::ZeroRho);
        }
        if b.is_zero() && a.iter().chain(&c).all(Zero::is_zero) {
            return Err(GeometryError::AllZero);
        }
        let lambda = soliton_lambda(n, &rho);
        Ok(Self { n, a, b, c, rho, lambda })
    }

    /// `a = 0` and `b = 0`: the field is a constant translation.
    pub fn is_constant_field(&self) -> bool {
        self.b.is_zero() && self.a.iter().all(Zero::is_zero)
    }
}

/// Hyperbolic distance `arcosh(1 + |p - q|^2 / (2 pn qn))`.
pub fn hyp_distance(p: &[f64], q: &[f64]) -> Result<f64, GeometryError> {
    let (pn, qn) = match (p.last(), q.last()) {
        (Some(&a), Some(&b)) if a > 0.0 && b > 0.0 => (a, b),
        _ => return Err(GeometryError::BoundaryPoint),
    };
    let sq: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((1.0 + sq / (2.0 * pn * qn)).acosh())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlaurent::ratio;

    #[test]
    fn metric_times_inverse_is_identity() {
        for n in 2..=5 {
            let g = metric(n).unwrap();
            let gi = inverse_metric(n).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let mut acc = LaurentPoly::zero(n);
                    for k in 0..n {
                        acc += &(&g.get(i, k) * &gi.get(k, j));
                    }
                    let expected = if i == j { LaurentPoly::one(n) } else { LaurentPoly::zero(n) };
                    assert_eq!(acc, expected);
                }
            }
        }
    }

    #[test]
    fn planar_christoffel_symbols() {
        let g = christoffel(2).unwrap();
        let inv_y = LaurentPoly::boundary_power(2, -1);
        assert_eq!(g.get(1, 0, 0), &inv_y);
        assert_eq!(g.get(0, 0, 1), &-&inv_y);
        assert_eq!(g.get(0, 1, 0), &-&inv_y);
        assert_eq!(g.get(1, 1, 1), &-&inv_y);
        assert!(g.get(0, 0, 0).is_zero());
        assert!(g.get(1, 0, 1).is_zero());
        assert!(g.get(0, 1, 1).is_zero());
    }

    #[test]
    fn christoffel_vanish_off_boundary_indices() {
        for n in 3..=5 {
            let g = christoffel(n).unwrap();
            for k in 0..n - 1 {
                for i in 0..n - 1 {
                    for j in 0..n - 1 {
                        assert!(g.get(k, i, j).is_zero());
                    }
                }
            }
            assert_eq!(g.get(n - 1, 0, 0), &LaurentPoly::boundary_power(n, -1));
        }
    }

    #[test]
    fn curvature_small_dimensions() {
        let h2 = HalfSpace::new(2).unwrap();
        assert_eq!(h2.ricci(), &h2.metric().scale(&rat(-1)));
        assert_eq!(h2.scalar_curvature(), &LaurentPoly::constant(2, rat(-2)));
        let h3 = HalfSpace::new(3).unwrap();
        assert_eq!(h3.ricci(), &h3.metric().scale(&rat(-2)));
        assert_eq!(h3.scalar_curvature(), &LaurentPoly::constant(3, rat(-6)));
    }

    #[test]
    fn soliton_constant_examples() {
        assert_eq!(soliton_lambda(2, &ratio(1, 2)), rat(0));
        assert_eq!(soliton_lambda(3, &rat(1)), rat(4));
    }

    #[test]
    fn non_killing_field_has_nonzero_residual() {
        let n = 3;
        let mut comps = vec![LaurentPoly::zero(n); n];
        comps[n - 1] = LaurentPoly::var(n, n - 1);
        let x = VectorField::new(comps).unwrap();
        let l = lie_derivative_metric(&x).unwrap();
        // xn d_n(xn^-2) + 2 xn^-2 on the x1, x2 diagonal
        assert_eq!(l.get(0, 0), &LaurentPoly::boundary_power(n, -2) * &LaurentPoly::constant(n, rat(-2)));
        assert!(lie_derivative_metric(&VectorField::zero(n)).unwrap().is_zero());
    }

    #[test]
    fn flat_of_coordinate_field() {
        let w = flat(&VectorField::coordinate(3, 0)).unwrap();
        assert_eq!(w.coefficient(&[0]), LaurentPoly::boundary_power(3, -2));
        assert!(w.coefficient(&[1]).is_zero());
    }

    #[test]
    fn params_validation() {
        assert_eq!(
            SolitonParams::new(vec![rat(0)], rat(0), vec![rat(0)], rat(1)),
            Err(GeometryError::AllZero)
        );
        assert_eq!(
            SolitonParams::new(vec![rat(1)], rat(0), vec![rat(0)], rat(0)),
            Err(GeometryError::ZeroRho)
        );
        assert!(matches!(
            SolitonParams::new(vec![rat(1)], rat(0), vec![], rat(1)),
            Err(GeometryError::WrongLength { .. })
        ));
        let p = SolitonParams::new(vec![rat(0)], rat(0), vec![rat(3)], rat(1)).unwrap();
        assert!(p.is_constant_field());
    }

    #[test]
    fn distance_examples() {
        let d = hyp_distance(&[0.0, 1.0], &[0.0, std::f64::consts::E]).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
        assert_eq!(hyp_distance(&[0.3, 2.0], &[0.3, 2.0]).unwrap(), 0.0);
        assert_eq!(hyp_distance(&[0.0, 0.0], &[0.0, 1.0]), Err(GeometryError::BoundaryPoint));
    }
}
