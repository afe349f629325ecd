//! Differential forms and vector fields with Laurent polynomial coefficients.
//!
//! A [`KForm`] stores its terms sparsely, keyed by strictly increasing
//! zero-based index tuples: `{[0, 2]: p}` is `p dx1^dx3`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::ratlaurent::{rat, LaurentPoly, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExteriorError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("grade mismatch: {left} vs {right}")]
    GradeMismatch { left: usize, right: usize },
    #[error("grade overflow: {grade} * {power} exceeds dimension {dim}")]
    GradeOverflow { grade: usize, power: usize, dim: usize },
    #[error("Cartan and coordinate Lie derivatives disagree")]
    LieDerivativeMismatch,
    #[error("split and direct wedge powers disagree")]
    PowerSplitMismatch,
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
}

fn same_dim(left: usize, right: usize) -> Result<(), ExteriorError> {
    if left == right {
        Ok(())
    } else {
        Err(ExteriorError::DimensionMismatch { left, right })
    }
}

/// Contravariant vector field `sum X^i d/dx_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VectorField {
    components: Vec<LaurentPoly>,
}

impl VectorField {
    pub fn new(components: Vec<LaurentPoly>) -> Result<Self, ExteriorError> {
        let dim = components.len();
        for c in &components {
            same_dim(dim, c.nvars())?;
        }
        Ok(Self { components })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            components: vec![LaurentPoly::zero(dim); dim],
        }
    }

    /// The coordinate field `d/dx_(k+1)`.
    pub fn coordinate(dim: usize, k: usize) -> Self {
        let mut f = Self::zero(dim);
        f.components[k] = LaurentPoly::one(dim);
        f
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[LaurentPoly] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &LaurentPoly {
        &self.components[i]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(LaurentPoly::is_zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            components: self.components.iter().map(|p| p.scale(c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&rat(-1)))
    }

    /// Directional derivative `X(f) = X^i d_i f`.
    pub fn apply(&self, f: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero(self.dim());
        for (i, xi) in self.components.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            out += &(xi * &f.deriv(i));
        }
        out
    }

    /// Coordinate bracket `[A, B]^j = A(B^j) - B(A^j)`.
    pub fn bracket(&self, other: &Self) -> Result<Self, ExteriorError> {
        same_dim(self.dim(), other.dim())?;
        let components = (0..self.dim())
            .map(|j| &self.apply(&other.components[j]) - &other.apply(&self.components[j]))
            .collect();
        Ok(Self { components })
    }
}

/// Components are printed as a tuple: `(x1, 1, -x2*x3)`.
impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// Homogeneous differential form of a fixed grade.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KForm {
    dim: usize,
    grade: usize,
    terms: BTreeMap<Vec<usize>, LaurentPoly>,
}

/// Sorts `idx` in place and returns the permutation sign, or `None` if an
/// index repeats.
fn sort_with_sign(idx: &mut [usize]) -> Option<i64> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

impl KForm {
    pub fn zero(dim: usize, grade: usize) -> Self {
        Self {
            dim,
            grade,
            terms: BTreeMap::new(),
        }
    }

    /// A 0-form.
    pub fn scalar(f: LaurentPoly) -> Self {
        let mut out = Self::zero(f.nvars(), 0);
        out.accumulate(Vec::new(), f);
        out
    }

    /// `sum w_i dx_i`.
    pub fn one_form(components: Vec<LaurentPoly>) -> Result<Self, ExteriorError> {
        let dim = components.len();
        let mut out = Self::zero(dim, 1);
        for (i, c) in components.into_iter().enumerate() {
            same_dim(dim, c.nvars())?;
            out.accumulate(vec![i], c);
        }
        Ok(out)
    }

    /// `coeff dx_(i1) ^ ... ^ dx_(ik)` for indices in any order; repeated
    /// indices give the zero form.
    pub fn basis(dim: usize, indices: &[usize], coeff: LaurentPoly) -> Result<Self, ExteriorError> {
        same_dim(dim, coeff.nvars())?;
        if let Some(&bad) = indices.iter().find(|&&i| i >= dim) {
            return Err(ExteriorError::IndexOutOfRange { index: bad, dim });
        }
        let mut idx = indices.to_vec();
        let mut out = Self::zero(dim, idx.len());
        if let Some(sign) = sort_with_sign(&mut idx) {
            out.accumulate(idx, coeff.scale(&rat(sign)));
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], &LaurentPoly)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// Coefficient of the sorted index tuple `idx` (zero if absent).
    pub fn coefficient(&self, idx: &[usize]) -> LaurentPoly {
        self.terms
            .get(idx)
            .cloned()
            .unwrap_or_else(|| LaurentPoly::zero(self.dim))
    }

    /// Coefficient of `dx1 ^ ... ^ dxn` for a top-degree form.
    pub fn top_coefficient(&self) -> Option<LaurentPoly> {
        (self.grade == self.dim).then(|| self.coefficient(&(0..self.dim).collect::<Vec<_>>()))
    }

    fn accumulate(&mut self, idx: Vec<usize>, coeff: LaurentPoly) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(idx) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, ExteriorError> {
        same_dim(self.dim, other.dim)?;
        if self.grade != other.grade {
            return Err(ExteriorError::GradeMismatch {
                left: self.grade,
                right: other.grade,
            });
        }
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.accumulate(k.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, ExteriorError> {
        self.add(&other.scale(&rat(-1)))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.mul_poly(&LaurentPoly::constant(self.dim, c.clone()))
    }

    pub fn mul_poly(&self, f: &LaurentPoly) -> Self {
        let mut out = Self::zero(self.dim, self.grade);
        for (k, v) in &self.terms {
            out.accumulate(k.clone(), v * f);
        }
        out
    }

    /// Splits into the part without `dx_n` and the part containing it.
    pub fn split_last(&self) -> (Self, Self) {
        let last = self.dim - 1;
        let mut without = Self::zero(self.dim, self.grade);
        let mut with = Self::zero(self.dim, self.grade);
        for (k, v) in &self.terms {
            if k.last() == Some(&last) {
                with.accumulate(k.clone(), v.clone());
            } else {
                without.accumulate(k.clone(), v.clone());
            }
        }
        (without, with)
    }

    /// Evaluates the coefficients at a point.
    pub fn evaluate(&self, point: &[Rational]) -> Result<BTreeMap<Vec<usize>, Rational>, crate::ratlaurent::RatLaurentError> {
        self.terms
            .iter()
            .map(|(k, v)| Ok((k.clone(), v.evaluate(point)?)))
            .collect()
    }
}

/// Exterior product. Results whose grade exceeds the dimension are the
/// zero form of that grade.
pub fn wedge(alpha: &KForm, beta: &KForm) -> Result<KForm, ExteriorError> {
    same_dim(alpha.dim, beta.dim)?;
    let grade = alpha.grade + beta.grade;
    let mut out = KForm::zero(alpha.dim, grade);
    if grade > alpha.dim {
        return Ok(out);
    }
    let mut idx = Vec::with_capacity(grade);
    for (ka, va) in &alpha.terms {
        for (kb, vb) in &beta.terms {
            idx.clear();
            idx.extend_from_slice(ka);
            idx.extend_from_slice(kb);
            if let Some(sign) = sort_with_sign(&mut idx) {
                let mut c = va * vb;
                if sign < 0 {
                    c = -c;
                }
                out.accumulate(idx.clone(), c);
            }
        }
    }
    Ok(out)
}

/// Exterior derivative.
pub fn ext_d(alpha: &KForm) -> KForm {
    let mut out = KForm::zero(alpha.dim, alpha.grade + 1);
    if alpha.grade >= alpha.dim {
        return out;
    }
    for (k, v) in &alpha.terms {
        for j in 0..alpha.dim {
            if k.contains(&j) {
                continue;
            }
            let dv = v.deriv(j);
            if dv.is_zero() {
                continue;
            }
            // dx_j moved past every index smaller than j
            let pos = k.iter().filter(|&&i| i < j).count();
            let mut idx = k.clone();
            idx.insert(pos, j);
            out.accumulate(idx, if pos % 2 == 0 { dv } else { -dv });
        }
    }
    out
}

/// Contraction into the first slot. The contraction of a 0-form is zero.
pub fn interior(x: &VectorField, alpha: &KForm) -> Result<KForm, ExteriorError> {
    same_dim(x.dim(), alpha.dim)?;
    if alpha.grade == 0 {
        return Ok(KForm::zero(alpha.dim, 0));
    }
    let mut out = KForm::zero(alpha.dim, alpha.grade - 1);
    for (k, v) in &alpha.terms {
        for (r, &i) in k.iter().enumerate() {
            let xi = x.component(i);
            if xi.is_zero() {
                continue;
            }
            let mut idx = k.clone();
            idx.remove(r);
            let c = xi * v;
            out.accumulate(idx, if r % 2 == 0 { c } else { -c });
        }
    }
    Ok(out)
}

/// Lie derivative by Cartan's formula `i_X d(alpha) + d(i_X alpha)`.
///
/// For 1-forms the coordinate formula is evaluated as well and the two
/// results must agree exactly.
pub fn lie_derivative_form(x: &VectorField, alpha: &KForm) -> Result<KForm, ExteriorError> {
    let cartan = lie_derivative_cartan(x, alpha)?;
    if alpha.grade == 1 && cartan != lie_derivative_one_form_direct(x, alpha)? {
        return Err(ExteriorError::LieDerivativeMismatch);
    }
    Ok(cartan)
}

pub fn lie_derivative_cartan(x: &VectorField, alpha: &KForm) -> Result<KForm, ExteriorError> {
    same_dim(x.dim(), alpha.dim)?;
    let a = interior(x, &ext_d(alpha))?;
    if alpha.grade == 0 {
        return Ok(a);
    }
    let b = ext_d(&interior(x, alpha)?);
    a.add(&b)
}

/// `(L_X w)_i = X^j d_j w_i + w_j d_i X^j`.
pub fn lie_derivative_one_form_direct(x: &VectorField, alpha: &KForm) -> Result<KForm, ExteriorError> {
    same_dim(x.dim(), alpha.dim)?;
    assert_eq!(alpha.grade, 1, "coordinate formula implemented for 1-forms");
    let n = alpha.dim;
    let w: Vec<LaurentPoly> = (0..n).map(|i| alpha.coefficient(&[i])).collect();
    let mut comps = Vec::with_capacity(n);
    for i in 0..n {
        let mut c = x.apply(&w[i]);
        for (j, wj) in w.iter().enumerate() {
            if wj.is_zero() {
                continue;
            }
            c += &(wj * &x.component(j).deriv(i));
        }
        comps.push(c);
    }
    KForm::one_form(comps)
}

/// Lie derivative of any grade from `L_X(f dx_I) = X(f) dx_I +
/// f sum_r dx_i1 ^ .. ^ d(X^ir) ^ .. ^ dx_ik`, without interior products.
pub fn lie_derivative_direct(x: &VectorField, alpha: &KForm) -> Result<KForm, ExteriorError> {
    same_dim(x.dim(), alpha.dim)?;
    let n = alpha.dim;
    let differentials: Vec<KForm> = x
        .components()
        .iter()
        .map(|xi| ext_d(&KForm::scalar(xi.clone())))
        .collect();
    let mut out = KForm::zero(n, alpha.grade);
    for (k, f) in &alpha.terms {
        out.accumulate(k.clone(), x.apply(f));
        for r in 0..k.len() {
            let mut piece = KForm::scalar(f.clone());
            for (s, &i) in k.iter().enumerate() {
                let factor = if s == r {
                    differentials[i].clone()
                } else {
                    KForm::basis(n, &[i], LaurentPoly::one(n))?
                };
                piece = wedge(&piece, &factor)?;
            }
            out = out.add(&piece)?;
        }
    }
    Ok(out)
}

/// `alpha ^ ... ^ alpha` (`m` factors).
///
/// For 2-forms the power is also computed through the split
/// `alpha = omega + lambda` (lambda collecting every `dx_n` term, so that
/// `lambda ^ lambda = 0`): `alpha^m = omega^m + m omega^(m-1) ^ lambda`.
/// Both routes must agree.
pub fn power_wedge(alpha: &KForm, m: usize) -> Result<KForm, ExteriorError> {
    if m == 0 || alpha.grade * m > alpha.dim {
        return Err(ExteriorError::GradeOverflow {
            grade: alpha.grade,
            power: m,
            dim: alpha.dim,
        });
    }
    let mut direct = alpha.clone();
    for _ in 1..m {
        direct = wedge(&direct, alpha)?;
    }
    if alpha.grade == 2 && m >= 2 && direct != power_wedge_split(alpha, m)? {
        return Err(ExteriorError::PowerSplitMismatch);
    }
    Ok(direct)
}

/// Binomial route for 2-forms; see [`power_wedge`].
pub fn power_wedge_split(alpha: &KForm, m: usize) -> Result<KForm, ExteriorError> {
    assert_eq!(alpha.grade, 2, "split route applies to 2-forms");
    let (omega, lambda) = alpha.split_last();
    let mut omega_pow = KForm::scalar(LaurentPoly::one(alpha.dim));
    for _ in 0..m - 1 {
        omega_pow = wedge(&omega_pow, &omega)?;
    }
    let with_lambda = wedge(&omega_pow, &lambda)?.scale(&rat(m as i64));
    let full = wedge(&omega_pow, &omega)?;
    full.add(&with_lambda)
}

/// Terms separated by ` + `, keys written `dx1^dx3`.
impl fmt::Display for KForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (k, v)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({v})")?;
            if !k.is_empty() {
                write!(f, " {}", form_key(k))?;
            }
        }
        Ok(())
    }
}

/// `[0, 2]` -> `dx1^dx3`.
pub fn form_key(idx: &[usize]) -> String {
    idx.iter()
        .map(|i| format!("dx{}", i + 1))
        .collect::<Vec<_>>()
        .join("^")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlaurent::ratio;

    fn dx(n: usize, idx: &[usize]) -> KForm {
        KForm::basis(n, idx, LaurentPoly::one(n)).unwrap()
    }

    #[test]
    fn antisymmetry_of_wedge() {
        assert!(wedge(&dx(3, &[0]), &dx(3, &[0])).unwrap().is_zero());
        assert_eq!(wedge(&dx(2, &[1]), &dx(2, &[0])).unwrap(), dx(2, &[0, 1]).scale(&rat(-1)));
    }

    #[test]
    fn wedge_past_top_grade_is_zero() {
        let w = wedge(&dx(2, &[0, 1]), &dx(2, &[0])).unwrap();
        assert!(w.is_zero());
        assert_eq!(w.grade(), 3);
    }

    #[test]
    fn wedge_dimension_mismatch() {
        assert!(matches!(
            wedge(&dx(2, &[0]), &dx(3, &[0])),
            Err(ExteriorError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn d_of_constant_vanishes() {
        let c = KForm::scalar(LaurentPoly::constant(3, ratio(7, 2)));
        assert!(ext_d(&c).is_zero());
    }

    #[test]
    fn d_on_one_forms_is_curl() {
        // w = x2 dx1  ->  dw = -dx1^dx2
        let n = 2;
        let w = KForm::one_form(vec![LaurentPoly::var(n, 1), LaurentPoly::zero(n)]).unwrap();
        assert_eq!(ext_d(&w), dx(2, &[0, 1]).scale(&rat(-1)));
    }

    #[test]
    fn interior_examples() {
        let n = 3;
        let x = VectorField::new(vec![
            LaurentPoly::var(n, 1),
            LaurentPoly::var(n, 2),
            LaurentPoly::constant(n, rat(5)),
        ])
        .unwrap();
        let i1 = interior(&x, &dx(n, &[1])).unwrap();
        assert_eq!(i1, KForm::scalar(LaurentPoly::var(n, 2)));
        // i_X(dx_i ^ dx_j) = X^i dx_j - X^j dx_i
        let i2 = interior(&x, &dx(n, &[0, 2])).unwrap();
        let expected = KForm::basis(n, &[2], LaurentPoly::var(n, 1))
            .unwrap()
            .sub(&KForm::basis(n, &[0], LaurentPoly::constant(n, rat(5))).unwrap())
            .unwrap();
        assert_eq!(i2, expected);
    }

    #[test]
    fn lie_derivative_of_zero() {
        let x = VectorField::coordinate(3, 0);
        let z = KForm::zero(3, 1);
        assert!(lie_derivative_form(&x, &z).unwrap().is_zero());
    }

    #[test]
    fn power_wedge_binomial() {
        let n = 4;
        let a = dx(n, &[0, 1]).add(&dx(n, &[2, 3])).unwrap();
        assert_eq!(power_wedge(&a, 1).unwrap(), a);
        assert_eq!(power_wedge(&a, 2).unwrap(), dx(n, &[0, 1, 2, 3]).scale(&rat(2)));
        assert!(matches!(power_wedge(&a, 3), Err(ExteriorError::GradeOverflow { .. })));
    }

    #[test]
    fn bracket_of_translation_and_dilation() {
        let n = 2;
        let t = VectorField::coordinate(n, 0);
        let d = VectorField::new(vec![LaurentPoly::var(n, 0), LaurentPoly::var(n, 1)]).unwrap();
        assert_eq!(t.bracket(&d).unwrap(), t);
        assert!(d.bracket(&d).unwrap().is_zero());
    }

    #[test]
    fn form_key_text() {
        assert_eq!(form_key(&[0, 2]), "dx1^dx3");
    }

    #[test]
    fn adding_different_grades_fails() {
        let a = KForm::basis(3, &[0], LaurentPoly::one(3)).unwrap();
        let b = KForm::basis(3, &[0, 1], LaurentPoly::one(3)).unwrap();
        assert_eq!(a.add(&b), Err(ExteriorError::GradeMismatch { left: 1, right: 2 }));
    }
}
