//! The soliton field family on `H^n`: construction, generators, brackets,
//! algebra closure, and the contact-form computations on odd dimensions.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exterior::{self, ExteriorError, KForm, VectorField};
use crate::hypgeo::{GeometryError, HalfSpace, SolitonParams};
use crate::linalg;
use crate::ratlaurent::{rat, ratio, LaurentPoly, Monomial, RatLaurentError, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GammaError {
    #[error("generator {generator} is not defined for n = {n}")]
    IndexOutOfRange { generator: String, n: usize },
    #[error("unknown generator name {0:?}")]
    UnknownGenerator(String),
    #[error("vector fields of different dimensions")]
    DimensionMismatch,
    #[error("bracket [{left}, {right}] leaves the span")]
    NotClosed { left: usize, right: usize },
    #[error("matrix size {0} is odd")]
    OddSize(usize),
    #[error("matrix is not square and antisymmetric")]
    NotAntisymmetric,
    #[error("contact computations need an odd ambient dimension, got {0}")]
    EvenAmbient(usize),
    #[error("w(X) vanishes at {point:?}")]
    DegeneratePoint { point: Vec<String> },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error(transparent)]
    Poly(#[from] RatLaurentError),
}

fn var(n: usize, i: usize) -> LaurentPoly {
    LaurentPoly::var(n, i)
}

/// Builds the soliton field
///
/// ```text
/// X_k = a_k/2 (x_k^2 - sum_{j != k} x_j^2) + (sum_{i != k} a_i x_i + b) x_k + c_k   (k < n)
/// X_n = (sum_k a_k x_k + b) xn
/// ```
pub fn build_field(params: &SolitonParams) -> VectorField {
    let n = params.n;
    let half = ratio(1, 2);
    let sq: Vec<LaurentPoly> = (0..n).map(|i| var(n, i).pow(2)).collect();
    let linear = (0..n - 1).fold(LaurentPoly::constant(n, params.b.clone()), |acc, i| {
        &acc + &var(n, i).scale(&params.a[i])
    });
    let mut comps = Vec::with_capacity(n);
    for k in 0..n - 1 {
        let mut quad = sq[k].clone();
        for (j, s) in sq.iter().enumerate() {
            if j != k {
                quad -= s;
            }
        }
        let mixed = &linear - &var(n, k).scale(&params.a[k]);
        let mut xk = quad.scale(&(&params.a[k] * &half));
        xk += &(&mixed * &var(n, k));
        xk += &LaurentPoly::constant(n, params.c[k].clone());
        comps.push(xk);
    }
    comps.push(&linear * &var(n, n - 1));
    VectorField::new(comps).expect("components built over n variables")
}

/// Named generators; indices are zero-based, names one-based (`T1` is
/// `Translation(0)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    /// `D = sum x_i d_i`.
    Dilation,
    /// `T_k = d_k`, `k < n - 1`.
    Translation(usize),
    /// `G_k = 1/2 (x_k^2 - sum_{j != k} x_j^2) d_k + sum_{j != k} x_k x_j d_j`.
    Boost(usize),
    /// `G = (x^2 - y^2) d_x + 2xy d_y`, only on `H^2`.
    PlanarRotation,
}

impl Generator {
    pub fn field(self, n: usize) -> Result<VectorField, GammaError> {
        let out_of_range = || GammaError::IndexOutOfRange {
            generator: self.to_string(),
            n,
        };
        if n < 2 {
            return Err(out_of_range());
        }
        match self {
            Generator::Dilation => Ok(VectorField::new((0..n).map(|i| var(n, i)).collect())?),
            Generator::Translation(k) => {
                if k + 1 >= n {
                    return Err(out_of_range());
                }
                Ok(VectorField::coordinate(n, k))
            }
            Generator::Boost(k) => {
                if k + 1 >= n {
                    return Err(out_of_range());
                }
                let half = ratio(1, 2);
                let comps = (0..n)
                    .map(|j| {
                        if j == k {
                            let mut q = var(n, k).pow(2);
                            for i in (0..n).filter(|&i| i != k) {
                                q -= &var(n, i).pow(2);
                            }
                            q.scale(&half)
                        } else {
                            &var(n, k) * &var(n, j)
                        }
                    })
                    .collect();
                Ok(VectorField::new(comps)?)
            }
            Generator::PlanarRotation => {
                if n != 2 {
                    return Err(out_of_range());
                }
                let (x, y) = (var(2, 0), var(2, 1));
                Ok(VectorField::new(vec![
                    &x.pow(2) - &y.pow(2),
                    (&x * &y).scale(&rat(2)),
                ])?)
            }
        }
    }

    /// Parameters whose soliton field equals this generator, if any.
    pub fn one_hot_params(self, n: usize) -> Option<SolitonParams> {
        let zeros = || vec![Rational::zero(); n - 1];
        let (mut a, mut b, mut c) = (zeros(), Rational::zero(), zeros());
        match self {
            Generator::Dilation => b = Rational::one(),
            Generator::Translation(k) if k + 1 < n => c[k] = Rational::one(),
            Generator::Boost(k) if k + 1 < n => a[k] = Rational::one(),
            _ => return None,
        }
        SolitonParams::new(a, b, c, Rational::one()).ok()
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Dilation => f.write_str("D"),
            Generator::Translation(k) => write!(f, "T{}", k + 1),
            Generator::Boost(k) => write!(f, "G{}", k + 1),
            Generator::PlanarRotation => f.write_str("G"),
        }
    }
}

impl FromStr for Generator {
    type Err = GammaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || GammaError::UnknownGenerator(s.to_string());
        match s {
            "D" => return Ok(Generator::Dilation),
            "G" => return Ok(Generator::PlanarRotation),
            _ => {}
        }
        let (head, digits) = s.split_at(s.chars().next().map_or(0, char::len_utf8));
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
            return Err(unknown());
        }
        let k: usize = digits.parse().map_err(|_| unknown())?;
        match head {
            "T" => Ok(Generator::Translation(k - 1)),
            "G" => Ok(Generator::Boost(k - 1)),
            _ => Err(unknown()),
        }
    }
}

pub fn generator(kind: Generator, n: usize) -> Result<VectorField, GammaError> {
    kind.field(n)
}

/// The generators spanning the family on `H^n`, in the order
/// `T_1..T_(n-1), D, G_1..G_(n-1)`. On `H^2` the rotation is `G`.
pub fn seed_generators(n: usize) -> Vec<Generator> {
    let mut out: Vec<Generator> = (0..n - 1).map(Generator::Translation).collect();
    out.push(Generator::Dilation);
    if n == 2 {
        out.push(Generator::PlanarRotation);
    } else {
        out.extend((0..n - 1).map(Generator::Boost));
    }
    out
}

pub fn lie_bracket(a: &VectorField, b: &VectorField) -> Result<VectorField, GammaError> {
    a.bracket(b).map_err(|_| GammaError::DimensionMismatch)
}

/// Linearly independent polynomial vector fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraSpan {
    dim: usize,
    basis: Vec<VectorField>,
}

type FrameKey = (usize, Monomial);

impl AlgebraSpan {
    pub fn new(dim: usize) -> Self {
        Self { dim, basis: Vec::new() }
    }

    /// Keeps the fields that are independent of their predecessors.
    pub fn from_fields(fields: &[VectorField]) -> Result<Self, GammaError> {
        let dim = fields.first().map_or(0, VectorField::dim);
        let mut span = Self::new(dim);
        for f in fields {
            span.try_insert(f.clone())?;
        }
        Ok(span)
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[VectorField] {
        &self.basis
    }

    fn frame<'a>(fields: impl Iterator<Item = &'a VectorField>) -> Vec<FrameKey> {
        let mut keys = BTreeSet::new();
        for f in fields {
            for (i, c) in f.components().iter().enumerate() {
                for m in c.monomials() {
                    keys.insert((i, m.clone()));
                }
            }
        }
        keys.into_iter().collect()
    }

    fn coords_over(frame: &[FrameKey], f: &VectorField) -> Vec<Rational> {
        frame.iter().map(|(i, m)| f.component(*i).coefficient(m)).collect()
    }

    /// Exact coefficient matrix of the basis over the shared monomial frame
    /// (one row per basis element).
    pub fn coordinate_matrix(&self) -> (Vec<FrameKey>, Vec<Vec<Rational>>) {
        let frame = Self::frame(self.basis.iter());
        let rows = self.basis.iter().map(|f| Self::coords_over(&frame, f)).collect();
        (frame, rows)
    }

    /// Coefficients of `f` in the basis, or `None` if `f` is outside the span.
    pub fn coordinates(&self, f: &VectorField) -> Result<Option<Vec<Rational>>, GammaError> {
        if !self.basis.is_empty() && f.dim() != self.dim {
            return Err(GammaError::DimensionMismatch);
        }
        let frame = Self::frame(self.basis.iter().chain(std::iter::once(f)));
        let cols: Vec<Vec<Rational>> = self.basis.iter().map(|b| Self::coords_over(&frame, b)).collect();
        Ok(linalg::solve_in_span(&cols, &Self::coords_over(&frame, f)))
    }

    pub fn contains(&self, f: &VectorField) -> Result<bool, GammaError> {
        Ok(self.coordinates(f)?.is_some())
    }

    /// Appends `f` if it is independent of the current basis.
    pub fn try_insert(&mut self, f: VectorField) -> Result<bool, GammaError> {
        if self.basis.is_empty() {
            self.dim = f.dim();
        }
        if self.contains(&f)? {
            return Ok(false);
        }
        self.basis.push(f);
        Ok(true)
    }
}

/// A bracket of two basis elements that was outside the span when computed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EscapingBracket {
    pub left: usize,
    pub right: usize,
    pub field: VectorField,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureReport {
    pub span: AlgebraSpan,
    pub seed_dimension: usize,
    /// New basis elements, in the order they were adjoined; indices refer to
    /// the final basis.
    pub added: Vec<EscapingBracket>,
    pub cap: usize,
    pub cap_exceeded: bool,
}

impl ClosureReport {
    pub fn dimension(&self) -> usize {
        self.span.len()
    }

    pub fn already_closed(&self) -> bool {
        self.added.is_empty() && !self.cap_exceeded
    }
}

/// Closes the span of `seeds` under the bracket, stopping once the
/// dimension exceeds `cap`.
pub fn algebra_closure(seeds: &[VectorField], cap: usize) -> Result<ClosureReport, GammaError> {
    if seeds.windows(2).any(|w| w[0].dim() != w[1].dim()) {
        return Err(GammaError::DimensionMismatch);
    }
    let mut span = AlgebraSpan::from_fields(seeds)?;
    let seed_dimension = span.len();
    let mut added = Vec::new();
    let mut cap_exceeded = seed_dimension > cap;
    let mut i = 1;
    'outer: while i < span.len() && !cap_exceeded {
        for j in 0..i {
            let br = lie_bracket(&span.basis[j], &span.basis[i])?;
            if span.try_insert(br.clone())? {
                added.push(EscapingBracket {
                    left: j,
                    right: i,
                    field: br,
                });
                if span.len() > cap {
                    cap_exceeded = true;
                    break 'outer;
                }
            }
        }
        i += 1;
    }
    Ok(ClosureReport {
        span,
        seed_dimension,
        added,
        cap,
        cap_exceeded,
    })
}

/// `[e_i, e_j] = sum_k c[i][j][k] e_k`.
pub type StructureConstants = Vec<Vec<Vec<Rational>>>;

pub fn structure_constants(span: &AlgebraSpan) -> Result<StructureConstants, GammaError> {
    let d = span.len();
    let mut out = vec![vec![vec![Rational::zero(); d]; d]; d];
    for i in 0..d {
        for j in i + 1..d {
            let br = lie_bracket(&span.basis[i], &span.basis[j])?;
            let coords = span
                .coordinates(&br)?
                .ok_or(GammaError::NotClosed { left: i, right: j })?;
            for (k, c) in coords.into_iter().enumerate() {
                out[j][i][k] = -c.clone();
                out[i][j][k] = c;
            }
        }
    }
    Ok(out)
}

/// Checks that `e = T`, `f = -G`, `h = -2D` on `H^2` satisfy the `sl2`
/// relations `[h, e] = 2e`, `[h, f] = -2f`, `[e, f] = h`.
pub fn sl2_check() -> Result<bool, GammaError> {
    let t = Generator::Translation(0).field(2)?;
    let d = Generator::Dilation.field(2)?;
    let g = Generator::PlanarRotation.field(2)?;
    let e = t;
    let f = g.scale(&rat(-1));
    let h = d.scale(&rat(-2));
    let span = AlgebraSpan::from_fields(&[e.clone(), f.clone(), h.clone()])?;
    if span.len() != 3 || structure_constants(&span).is_err() {
        return Ok(false);
    }
    Ok(lie_bracket(&h, &e)? == e.scale(&rat(2))
        && lie_bracket(&h, &f)? == f.scale(&rat(-2))
        && lie_bracket(&e, &f)? == h)
}

/// Square antisymmetric rational matrix of even size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContactMatrix {
    entries: Vec<Vec<Rational>>,
}

impl ContactMatrix {
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, GammaError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(GammaError::NotAntisymmetric);
        }
        for i in 0..n {
            for j in 0..n {
                if rows[i][j] != -rows[j][i].clone() {
                    return Err(GammaError::NotAntisymmetric);
                }
            }
        }
        if n % 2 == 1 {
            return Err(GammaError::OddSize(n));
        }
        Ok(Self { entries: rows })
    }

    /// `M_ij = a_i c_j - a_j c_i` for the field on `H^(2m+1)`.
    pub fn from_params(params: &SolitonParams) -> Result<Self, GammaError> {
        let size = params.n - 1;
        if size % 2 == 1 {
            return Err(GammaError::OddSize(size));
        }
        let (a, c) = (&params.a, &params.c);
        let rows = (0..size)
            .map(|i| (0..size).map(|j| &a[i] * &c[j] - &a[j] * &c[i]).collect())
            .collect();
        Ok(Self { entries: rows })
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.entries
    }

    /// Expansion along the first row:
    /// `Pf(M) = sum_j (-1)^(j+1) m_1j Pf(M without rows/cols 1, j)`.
    pub fn pfaffian(&self) -> Rational {
        let idx: Vec<usize> = (0..self.size()).collect();
        self.pfaffian_of(&idx)
    }

    fn pfaffian_of(&self, idx: &[usize]) -> Rational {
        if idx.is_empty() {
            return Rational::one();
        }
        let first = idx[0];
        let mut total = Rational::zero();
        for p in 1..idx.len() {
            let m = &self.entries[first][idx[p]];
            if m.is_zero() {
                continue;
            }
            let rest: Vec<usize> = idx[1..].iter().copied().filter(|&k| k != idx[p]).collect();
            let term = m * self.pfaffian_of(&rest);
            if p % 2 == 1 {
                total += term;
            } else {
                total -= term;
            }
        }
        total
    }

    pub fn det_via_pf(&self) -> Rational {
        let pf = self.pfaffian();
        &pf * &pf
    }

    pub fn cofactor_determinant(&self) -> Rational {
        linalg::cofactor_determinant(&self.entries)
    }
}

pub fn contact_matrix(params: &SolitonParams) -> Result<ContactMatrix, GammaError> {
    ContactMatrix::from_params(params)
}

/// Outcome of the exact `w ^ (dw)^m` computation on `H^(2m+1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContactCheck {
    /// Coefficient of `dx1 ^ ... ^ dx(2m+1)`.
    pub coefficient: LaurentPoly,
    /// `coefficient * x_(2m+1)^(2m+1) / 2^m` when that is a constant.
    pub normalized: Option<Rational>,
    pub pfaffian: Rational,
}

impl ContactCheck {
    /// `|normalized| == |Pf(M)|`.
    pub fn consistent(&self) -> bool {
        self.normalized
            .as_ref()
            .is_some_and(|v| v.abs() == self.pfaffian.abs())
    }

    /// The top form is a non-zero constant times `x_N^-N`, hence nowhere zero.
    pub fn is_contact(&self) -> bool {
        self.normalized.as_ref().is_some_and(|v| !v.is_zero())
    }

    pub fn vanishes_identically(&self) -> bool {
        self.coefficient.is_zero()
    }
}

/// Computes `w ^ (dw)^m` for the dual form of the soliton field and compares
/// it with the Pfaffian of the contact matrix.
pub fn contact_top_form(params: &SolitonParams) -> Result<ContactCheck, GammaError> {
    let n = params.n;
    if n % 2 == 0 {
        return Err(GammaError::EvenAmbient(n));
    }
    let m = (n - 1) / 2;
    let space = HalfSpace::new(n)?;
    let x = build_field(params);
    let w = space.flat(&x);
    let dw = exterior::ext_d(&w);
    let top = exterior::wedge(&w, &exterior::power_wedge(&dw, m)?)?;
    let coefficient = top.top_coefficient().expect("grade 2m+1 on H^(2m+1) is top");
    let scaled = &coefficient * &LaurentPoly::boundary_power(n, n as i32);
    let normalized = scaled
        .as_constant()
        .map(|v| v / Rational::from_integer(num_bigint::BigInt::from(2u32).pow(m as u32)));
    let pfaffian = ContactMatrix::from_params(params)?.pfaffian();
    Ok(ContactCheck {
        coefficient,
        normalized,
        pfaffian,
    })
}

/// `i_X dw` for the dual form `w` of `X`.
pub fn contracted_differential(x: &VectorField) -> Result<KForm, GammaError> {
    let w = crate::hypgeo::flat(x)?;
    Ok(exterior::interior(x, &exterior::ext_d(&w))?)
}

/// `(i_X dw)(d/dxn)` evaluated at `point`; non-zero values show `X` is not
/// the Reeb field of `w`.
pub fn reeb_defect_of_field(x: &VectorField, point: &[Rational]) -> Result<Rational, GammaError> {
    let n = x.dim();
    let c = contracted_differential(x)?.coefficient(&[n - 1]);
    Ok(c.evaluate(point)?)
}

pub fn reeb_defect(params: &SolitonParams, point: &[Rational]) -> Result<Rational, GammaError> {
    reeb_defect_of_field(&build_field(params), point)
}

/// `(i_X dw)(d/dxn) + d_n(i_X w)`, identically zero whenever `L_X w = 0`.
pub fn reeb_identity_residual(x: &VectorField) -> Result<LaurentPoly, GammaError> {
    let n = x.dim();
    let w = crate::hypgeo::flat(x)?;
    let ixw = exterior::interior(x, &w)?.coefficient(&[]);
    let ixdw = contracted_differential(x)?.coefficient(&[n - 1]);
    Ok(&ixdw + &ixw.deriv(n - 1))
}

/// `v = kernel + scale * X(p)` with `w_p(kernel) = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub scale: Rational,
    pub kernel: Vec<Rational>,
}

pub fn decompose(v: &[Rational], params: &SolitonParams, point: &[Rational]) -> Result<Decomposition, GammaError> {
    let n = params.n;
    if v.len() != n || point.len() != n {
        return Err(GammaError::DimensionMismatch);
    }
    if !point[n - 1].is_positive() {
        return Err(GammaError::Geometry(GeometryError::BoundaryPoint));
    }
    let x = build_field(params);
    let w = crate::hypgeo::flat(&x)?;
    let w_at: Vec<Rational> = (0..n)
        .map(|i| w.coefficient(&[i]).evaluate(point))
        .collect::<Result<_, _>>()?;
    let x_at: Vec<Rational> = x
        .components()
        .iter()
        .map(|c| c.evaluate(point))
        .collect::<Result<_, _>>()?;
    let pair = |u: &[Rational]| -> Rational { w_at.iter().zip(u).map(|(a, b)| a * b).sum() };
    let wx = pair(&x_at);
    if wx.is_zero() {
        return Err(GammaError::DegeneratePoint {
            point: point.iter().map(ToString::to_string).collect(),
        });
    }
    let scale = pair(v) / wx;
    let kernel = v.iter().zip(&x_at).map(|(vi, xi)| vi - &scale * xi).collect();
    Ok(Decomposition { scale, kernel })
}

/// `w_p(u)` for the dual form of the soliton field.
pub fn dual_form_at(params: &SolitonParams, point: &[Rational], u: &[Rational]) -> Result<Rational, GammaError> {
    let w = crate::hypgeo::flat(&build_field(params))?;
    let mut acc = Rational::zero();
    for (i, ui) in u.iter().enumerate() {
        acc += w.coefficient(&[i]).evaluate(point)? * ui;
    }
    Ok(acc)
}
