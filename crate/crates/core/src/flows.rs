//! Flows of the soliton generators: fixed-step RK4 integration, closed-form
//! solutions, and the diagnostics that compare them.
//!
//! Boost flows reduce to a Riccati equation for `z = x_k + i r` with
//! `r^2 = sum_{j != k} x_j^2`:
//!
//! * `G_k` (with the 1/2 factor): `z' = z^2 / 2`, so `z(t) = -2 / (t + w)`
//!   with `w = -2 / z0`;
//! * planar `G` on `H^2` (no 1/2 factor): `z' = z^2`, so `z(t) = -1 / (t + w)`
//!   with `w = -1 / z0`.
//!
//! The transverse coordinates keep their direction and are rescaled by
//! `r(t) / r0`.

use std::io::{self, Write};

use num_complex::Complex64;
use thiserror::Error;

use crate::exterior::VectorField;
use crate::gamma::{build_field, GammaError, Generator};
use crate::hypgeo::{hyp_distance, SolitonParams};
use crate::ratlaurent::rational_to_f64;

/// Integration stops once `xn` drops to this value.
pub const BOUNDARY_EPS: f64 = 1e-9;
/// Integration stops once any coordinate exceeds this magnitude.
pub const COORD_LIMIT: f64 = 1e9;
pub const DEFAULT_DT: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("state is not in the open half-space: {0:?}")]
    InvalidState(Vec<f64>),
    #[error("invalid step: dt = {dt}, t_max = {t_max}")]
    InvalidStep { dt: f64, t_max: f64 },
    #[error("trajectory left the half-space interior at t = {}", .trajectory.last().map_or(0.0, |s| s.t))]
    BoundaryEscape { trajectory: Vec<FlowState> },
    #[error("non-finite coordinates after t = {}", .trajectory.last().map_or(0.0, |s| s.t))]
    NonFinite { trajectory: Vec<FlowState> },
    #[error("no closed form for this flow")]
    NoClosedForm,
    #[error("boost axis degenerate: transverse radius is zero")]
    AxisDegenerate,
    #[error("dimension mismatch: field has {field}, state has {state}")]
    DimensionMismatch { field: usize, state: usize },
    #[error(transparent)]
    Gamma(#[from] GammaError),
}

impl FlowError {
    /// Valid states computed before the failure, if any.
    pub fn partial_trajectory(&self) -> Option<&[FlowState]> {
        match self {
            FlowError::BoundaryEscape { trajectory } | FlowError::NonFinite { trajectory } => Some(trajectory),
            _ => None,
        }
    }
}

/// A point of the open half-space at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub coords: Vec<f64>,
    pub t: f64,
}

impl FlowState {
    pub fn new(coords: Vec<f64>, t: f64) -> Result<Self, FlowError> {
        let valid = coords.len() >= 2
            && coords.iter().all(|v| v.is_finite())
            && coords.last().is_some_and(|&v| v > 0.0)
            && t.is_finite();
        if valid {
            Ok(Self { coords, t })
        } else {
            Err(FlowError::InvalidState(coords))
        }
    }

    pub fn at(coords: &[f64]) -> Result<Self, FlowError> {
        Self::new(coords.to_vec(), 0.0)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// What is being flowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlowKind {
    Generator(Generator),
    Field(SolitonParams),
}

impl FlowKind {
    pub fn field(&self, n: usize) -> Result<VectorField, FlowError> {
        match self {
            FlowKind::Generator(g) => Ok(g.field(n)?),
            FlowKind::Field(p) => {
                if p.n != n {
                    return Err(FlowError::DimensionMismatch { field: p.n, state: n });
                }
                Ok(build_field(p))
            }
        }
    }

    /// Which Riccati normalization the closed form uses.
    pub fn convention(&self) -> &'static str {
        match self {
            FlowKind::Generator(Generator::PlanarRotation) => "z(t) = -1/(t + w), w = -1/z0",
            FlowKind::Generator(Generator::Boost(_)) => "z(t) = -2/(t + w), w = -2/z0",
            FlowKind::Generator(Generator::Translation(_)) => "x_k(t) = x_k + t",
            FlowKind::Generator(Generator::Dilation) => "x(t) = e^t x",
            FlowKind::Field(_) => "numerical only",
        }
    }
}

impl From<Generator> for FlowKind {
    fn from(g: Generator) -> Self {
        FlowKind::Generator(g)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowSpec {
    pub kind: FlowKind,
    pub t_max: f64,
    pub dt: f64,
}

impl FlowSpec {
    pub fn new(kind: impl Into<FlowKind>, t_max: f64, dt: f64) -> Result<Self, FlowError> {
        check_step(t_max, dt)?;
        Ok(Self {
            kind: kind.into(),
            t_max,
            dt,
        })
    }
}

fn check_step(t_max: f64, dt: f64) -> Result<(), FlowError> {
    if dt > 0.0 && dt.is_finite() && t_max >= 0.0 && t_max.is_finite() {
        Ok(())
    } else {
        Err(FlowError::InvalidStep { dt, t_max })
    }
}

/// Vector field compiled to floating point monomial lists.
#[derive(Debug, Clone)]
pub struct FieldEvaluator {
    components: Vec<Vec<(f64, Vec<i32>)>>,
}

impl FieldEvaluator {
    pub fn new(field: &VectorField) -> Self {
        let components = field
            .components()
            .iter()
            .map(|p| {
                p.terms()
                    .map(|(m, c)| (rational_to_f64(c), m.exponents().to_vec()))
                    .collect()
            })
            .collect();
        Self { components }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, terms) in out.iter_mut().zip(&self.components) {
            *o = terms
                .iter()
                .map(|(c, e)| e.iter().zip(x).fold(*c, |acc, (&p, &v)| if p == 0 { acc } else { acc * v.powi(p) }))
                .sum();
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(x, &mut out);
        out
    }
}

fn rk4_step(f: &FieldEvaluator, x: &[f64], h: f64) -> Vec<f64> {
    let n = x.len();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    f.eval_into(x, &mut k1);
    for i in 0..n {
        tmp[i] = x[i] + 0.5 * h * k1[i];
    }
    f.eval_into(&tmp, &mut k2);
    for i in 0..n {
        tmp[i] = x[i] + 0.5 * h * k2[i];
    }
    f.eval_into(&tmp, &mut k3);
    for i in 0..n {
        tmp[i] = x[i] + h * k3[i];
    }
    f.eval_into(&tmp, &mut k4);
    (0..n)
        .map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Sample times `0, dt, 2dt, ..., t_max` (the last step may be shorter).
fn sample_times(t_max: f64, dt: f64) -> Vec<f64> {
    let steps = ((t_max / dt) - 1e-9).ceil().max(0.0) as usize;
    (0..=steps).map(|i| (i as f64 * dt).min(t_max)).collect()
}

/// Classical RK4 with fixed step `dt`. Returns every state from `p0` to
/// `t_max`; stops early when the trajectory approaches the boundary or
/// blows up.
pub fn integrate(field: &VectorField, p0: &FlowState, t_max: f64, dt: f64) -> Result<Vec<FlowState>, FlowError> {
    check_step(t_max, dt)?;
    if field.dim() != p0.dim() {
        return Err(FlowError::DimensionMismatch {
            field: field.dim(),
            state: p0.dim(),
        });
    }
    let f = FieldEvaluator::new(field);
    let n = p0.dim();
    let times = sample_times(t_max, dt);
    let mut traj = Vec::with_capacity(times.len());
    traj.push(p0.clone());
    let mut x = p0.coords.clone();
    for w in times.windows(2) {
        let next = rk4_step(&f, &x, w[1] - w[0]);
        if next.iter().any(|v| !v.is_finite()) {
            return Err(FlowError::NonFinite { trajectory: traj });
        }
        if next[n - 1] <= BOUNDARY_EPS || next.iter().any(|v| v.abs() > COORD_LIMIT) {
            return Err(FlowError::BoundaryEscape { trajectory: traj });
        }
        x = next;
        traj.push(FlowState {
            coords: x.clone(),
            t: p0.t + w[1],
        });
    }
    Ok(traj)
}

/// Closed-form flow of a generator at time `t` from `p0`.
pub fn closed_flow(kind: &FlowKind, p0: &FlowState, t: f64) -> Result<FlowState, FlowError> {
    let n = p0.dim();
    let g = match kind {
        FlowKind::Generator(g) => *g,
        FlowKind::Field(_) => return Err(FlowError::NoClosedForm),
    };
    // validates the index against n
    g.field(n)?;
    let x0 = &p0.coords;
    let coords = match g {
        Generator::Translation(k) => {
            let mut x = x0.clone();
            x[k] += t;
            x
        }
        Generator::Dilation => x0.iter().map(|v| v * t.exp()).collect(),
        Generator::Boost(k) => {
            let r0 = x0
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, v)| v * v)
                .sum::<f64>()
                .sqrt();
            if r0 == 0.0 {
                return Err(FlowError::AxisDegenerate);
            }
            let w = -2.0 / Complex64::new(x0[k], r0);
            let z = -2.0 / (t + w);
            let scale = z.im / r0;
            x0.iter()
                .enumerate()
                .map(|(j, v)| if j == k { z.re } else { v * scale })
                .collect()
        }
        Generator::PlanarRotation => {
            let w = -1.0 / Complex64::new(x0[0], x0[1]);
            let z = -1.0 / (t + w);
            vec![z.re, z.im]
        }
    };
    Ok(FlowState { coords, t: p0.t + t })
}

/// One CSV row: integrated state, closed-form state and their distance.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub t: f64,
    pub state: Vec<f64>,
    pub closed: Option<Vec<f64>>,
    pub err: Option<f64>,
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Pairs each integrated state with the closed form (when one exists).
pub fn comparison_rows(kind: &FlowKind, trajectory: &[FlowState]) -> Vec<ComparisonRow> {
    let Some(p0) = trajectory.first() else {
        return Vec::new();
    };
    trajectory
        .iter()
        .map(|s| {
            let closed = closed_flow(kind, p0, s.t - p0.t).ok().map(|c| c.coords);
            let err = closed.as_ref().map(|c| euclid(c, &s.coords));
            ComparisonRow {
                t: s.t,
                state: s.coords.clone(),
                closed,
                err,
            }
        })
        .collect()
}

/// Maximum Euclidean distance between the RK4 trajectory and the closed form
/// over all sample times.
pub fn flow_compare(spec: &FlowSpec, p0: &FlowState) -> Result<f64, FlowError> {
    // fail early for kinds without a closed form
    closed_flow(&spec.kind, p0, 0.0)?;
    let field = spec.kind.field(p0.dim())?;
    let traj = integrate(&field, p0, spec.t_max, spec.dt)?;
    let mut max_err: f64 = 0.0;
    for row in comparison_rows(&spec.kind, &traj) {
        match row.err {
            Some(e) => max_err = max_err.max(e),
            None => return Err(FlowError::AxisDegenerate),
        }
    }
    Ok(max_err)
}

/// Maximum deviation of the hyperbolic distance between the flowed images of
/// `p` and `q` from its initial value.
pub fn isometry_check(field: &VectorField, p: &FlowState, q: &FlowState, t_max: f64, dt: f64) -> Result<f64, FlowError> {
    let tp = integrate(field, p, t_max, dt)?;
    let tq = integrate(field, q, t_max, dt)?;
    let dist = |a: &FlowState, b: &FlowState| {
        hyp_distance(&a.coords, &b.coords).map_err(|_| FlowError::BoundaryEscape {
            trajectory: vec![a.clone()],
        })
    };
    let d0 = dist(p, q)?;
    let mut dev: f64 = 0.0;
    for (a, b) in tp.iter().zip(&tq) {
        dev = dev.max((dist(a, b)? - d0).abs());
    }
    Ok(dev)
}

/// Writes `t,x1..xn,cx1..cxn,err`; closed-form and error cells are empty
/// when no closed form exists.
pub fn write_csv<W: Write>(mut out: W, n: usize, rows: &[ComparisonRow]) -> io::Result<()> {
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    header.extend((1..=n).map(|i| format!("cx{i}")));
    header.push("err".into());
    writeln!(out, "{}", header.join(","))?;
    // adding 0.0 turns -0.0 into 0.0
    let num = |v: &f64| format!("{:e}", v + 0.0);
    for row in rows {
        let mut cells = vec![format!("{}", row.t)];
        cells.extend(row.state.iter().map(num));
        match &row.closed {
            Some(c) => cells.extend(c.iter().map(num)),
            None => cells.extend(std::iter::repeat_n(String::new(), n)),
        }
        cells.push(row.err.as_ref().map(num).unwrap_or_default());
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}
