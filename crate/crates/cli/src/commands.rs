use std::fs::File;
use std::io::BufWriter;
use std::path::Path;
use std::time::Instant;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use rbkit_core::exterior::{self, VectorField};
use rbkit_core::flows::{self, FlowError, FlowKind, FlowSpec, FlowState};
use rbkit_core::gamma::{self, ContactMatrix, Generator};
use rbkit_core::hypgeo::{HalfSpace, SolitonParams};
use rbkit_core::ratlaurent::{ratio, Rational};

use crate::report::{elapsed_ms, timed, Record, Report, Status};
use crate::CliError;

fn list(v: &[Rational]) -> String {
    let items: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", items.join(", "))
}

pub fn describe(p: &SolitonParams) -> String {
    format!("a = {}, b = {}, c = {}, rho = {}", list(&p.a), p.b, list(&p.c), p.rho)
}

fn killing(space: &HalfSpace, x: &VectorField) -> Record {
    let lg = space.lie_derivative_metric(x);
    let witness = if lg.is_zero() { "L_X g = 0".into() } else { format!("L_X g = {lg}") };
    Record::check("killing", lg.is_zero(), witness)
}

fn rb_residual(space: &HalfSpace, x: &VectorField, p: &SolitonParams) -> Record {
    let res = space.rb_residual(x, &p.lambda, &p.rho);
    let shown = if res.is_zero() { "0".to_string() } else { res.to_string() };
    Record::check("rb_residual", res.is_zero(), format!("lambda = {}, residual = {shown}", p.lambda))
}

fn dw_not_closed(space: &HalfSpace, x: &VectorField) -> Record {
    let dw = exterior::ext_d(&space.flat(x));
    Record::check("dw_not_closed", !dw.is_zero(), format!("dw = {dw}"))
}

fn lie_form(space: &HalfSpace, x: &VectorField) -> Record {
    match exterior::lie_derivative_form(x, &space.flat(x)) {
        Ok(l) if l.is_zero() => Record::check("lie_derivative_form", true, "L_X w = 0 (Cartan and direct agree)"),
        Ok(l) => Record::check("lie_derivative_form", false, format!("L_X w = {l}")),
        Err(e) => Record::check("lie_derivative_form", false, e.to_string()),
    }
}

pub fn contact_record(p: &SolitonParams) -> Record {
    let chk = match gamma::contact_top_form(p) {
        Ok(c) => c,
        Err(e) => return Record::check("contact", false, e.to_string()),
    };
    let status = if !chk.consistent() {
        Status::Fail
    } else if chk.is_contact() {
        Status::Pass
    } else {
        Status::Degenerate
    };
    let normalized = chk.normalized.as_ref().map_or("non-constant".into(), ToString::to_string);
    let m = (p.n - 1) / 2;
    Record::new(
        "contact",
        status,
        format!(
            "contact: {}, Pf = {}, top = {}, top*x{n}^{n}/2^{m} = {normalized}",
            chk.is_contact(),
            chk.pfaffian,
            chk.coefficient,
            n = p.n
        ),
    )
}

fn field_record(x: &VectorField, p: &SolitonParams) -> Record {
    if p.is_constant_field() {
        Record::new("field", Status::Degenerate, format!("X = {x} is a constant translation"))
    } else {
        Record::check("field", true, format!("X = {x}"))
    }
}

fn random_rational(r: &mut impl Rng) -> Rational {
    ratio(r.gen_range(-9..=9), r.gen_range(1..=5))
}

fn random_params(r: &mut impl Rng, n: usize) -> SolitonParams {
    let q = random_rational;
    loop {
        let a = (0..n - 1).map(|_| q(r)).collect();
        let c = (0..n - 1).map(|_| q(r)).collect();
        let b = q(r);
        let rho = q(r);
        if let Ok(p) = SolitonParams::new(a, b, c, rho) {
            return p;
        }
    }
}

fn trial_record(i: usize, p: &SolitonParams) -> Record {
    let space = HalfSpace::new(p.n).expect("validated params");
    let x = gamma::build_field(p);
    let failed: Vec<String> = [
        killing(&space, &x),
        rb_residual(&space, &x, p),
        dw_not_closed(&space, &x),
        lie_form(&space, &x),
    ]
    .into_iter()
    .filter(|r| r.status == Status::Fail)
    .map(|r| r.name)
    .collect();
    let mut witness = describe(p);
    if !failed.is_empty() {
        witness.push_str(&format!("; failed: {}", failed.join(", ")));
    }
    Record::check(format!("trial.{i}"), failed.is_empty(), witness)
}

pub fn verify(p: &SolitonParams, trials: usize, seed: u64, timing: bool) -> Report {
    let space = HalfSpace::new(p.n).expect("validated params");
    let x = gamma::build_field(p);
    let mut report = Report::default();
    report.push(field_record(&x, p));
    report.push(timed(timing, || killing(&space, &x)));
    report.push(timed(timing, || rb_residual(&space, &x, p)));
    report.push(timed(timing, || dw_not_closed(&space, &x)));
    report.push(timed(timing, || lie_form(&space, &x)));
    if p.n % 2 == 1 {
        report.push(timed(timing, || contact_record(p)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sets: Vec<SolitonParams> = (0..trials).map(|_| random_params(&mut rng, p.n)).collect();
    let records: Vec<Record> = sets
        .par_iter()
        .enumerate()
        .map(|(i, q)| timed(timing, || trial_record(i, q)))
        .collect();
    report.extend(records);
    report
}

fn matrix_text(m: &ContactMatrix) -> String {
    let rows: Vec<String> = m.rows().iter().map(|r| list(r).replace('(', "[").replace(')', "]")).collect();
    format!("[{}]", rows.join(", "))
}

pub fn contact(p: &SolitonParams, timing: bool) -> Result<Report, CliError> {
    if p.n % 2 == 0 {
        return Err(CliError::Usage(format!("contact needs an odd dimension, got n = {}", p.n)));
    }
    let m = gamma::contact_matrix(p).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut report = Report::default();
    report.push(Record::check("contact_matrix", true, format!("M_ij = a_i c_j - a_j c_i = {}", matrix_text(&m))));
    report.push(timed(timing, || {
        let pf = m.pfaffian();
        let det = m.cofactor_determinant();
        Record::check("pfaffian", &pf * &pf == det, format!("Pf = {pf}, det = {det}"))
    }));
    report.push(timed(timing, || contact_record(p)));
    Ok(report)
}

pub struct FlowArgs<'a> {
    pub generator: &'a str,
    pub n: usize,
    pub point: &'a str,
    pub t_max: f64,
    pub dt: f64,
    pub out: &'a Path,
}

/// Parses a comma-separated point and checks it lies in the open half-space.
pub fn parse_point(s: &str, n: usize) -> Result<FlowState, CliError> {
    let coords: Vec<f64> = s
        .split(',')
        .map(|c| c.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("bad point {s:?}: {e}")))?;
    if coords.len() != n {
        return Err(CliError::Usage(format!("point has {} coordinates, expected {n}", coords.len())));
    }
    FlowState::at(&coords).map_err(|_| CliError::Usage(format!("point {s:?} is not in the open half-space")))
}

/// Integrates a generator flow and writes the trajectory CSV. Returns the
/// report and whether the trajectory escaped.
pub fn flow(args: &FlowArgs) -> Result<(Report, bool), CliError> {
    let g: Generator = args.generator.parse().map_err(|e: gamma::GammaError| CliError::Usage(e.to_string()))?;
    let field = g.field(args.n).map_err(|e| CliError::Usage(e.to_string()))?;
    let p0 = parse_point(args.point, args.n)?;
    let spec = FlowSpec::new(g, args.t_max, args.dt).map_err(|e| CliError::Usage(e.to_string()))?;
    let (traj, failure) = match flows::integrate(&field, &p0, spec.t_max, spec.dt) {
        Ok(t) => (t, None),
        Err(e @ (FlowError::BoundaryEscape { .. } | FlowError::NonFinite { .. })) => {
            (e.partial_trajectory().unwrap_or_default().to_vec(), Some(e))
        }
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };
    let rows = flows::comparison_rows(&spec.kind, &traj);
    let file = File::create(args.out).map_err(|e| CliError::Io(format!("{}: {e}", args.out.display())))?;
    flows::write_csv(BufWriter::new(file), args.n, &rows).map_err(|e| CliError::Io(e.to_string()))?;

    let max_err = rows.iter().filter_map(|r| r.err).fold(None, |m: Option<f64>, e| Some(m.map_or(e, |m| m.max(e))));
    let deviation = max_err.map_or("no closed form".into(), |e| format!("max deviation {e:e}"));
    let end = traj.last().map_or(0.0, |s| s.t);
    let convention = FlowKind::from(g).convention();
    let mut report = Report::default();
    let escaped = failure.is_some();
    report.push(match failure {
        None => Record::check(
            "flow",
            true,
            format!("{g} on H^{}: {} rows to t = {end}, {deviation} [{convention}]", args.n, rows.len()),
        ),
        Some(e) => Record::check("flow", false, format!("{e}; wrote {} rows, {deviation}", rows.len())),
    });
    Ok((report, escaped))
}

fn combination(coeffs: &[Rational], names: &[String]) -> String {
    let mut out = String::new();
    for (c, name) in coeffs.iter().zip(names) {
        if c.is_zero() {
            continue;
        }
        let neg = c < &Rational::zero();
        let mag = if neg { -c.clone() } else { c.clone() };
        let term = if mag == Rational::from_integer(1.into()) { name.clone() } else { format!("{mag}*{name}") };
        match (out.is_empty(), neg) {
            (true, true) => out.push_str(&format!("-{term}")),
            (true, false) => out.push_str(&term),
            (false, true) => out.push_str(&format!(" - {term}")),
            (false, false) => out.push_str(&format!(" + {term}")),
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

pub fn algebra(n: usize, timing: bool) -> Result<Report, CliError> {
    if !(2..=6).contains(&n) {
        return Err(CliError::Usage(format!("algebra needs 2 <= n <= 6, got {n}")));
    }
    let usage = |e: gamma::GammaError| CliError::Usage(e.to_string());
    let seeds = gamma::seed_generators(n);
    let fields: Vec<VectorField> = seeds.iter().map(|g| g.field(n)).collect::<Result<_, _>>().map_err(usage)?;
    let mut names: Vec<String> = seeds.iter().map(ToString::to_string).collect();
    let cap = n * (n + 1) / 2;
    let mut report = Report::default();
    report.push(Record::check(
        "seeds",
        true,
        format!("{} generators: {}", seeds.len(), names.join(", ")),
    ));

    let seed_span = gamma::AlgebraSpan::from_fields(&fields).map_err(usage)?;
    let pairs: Vec<(usize, usize)> = (0..fields.len()).flat_map(|i| (i + 1..fields.len()).map(move |j| (i, j))).collect();
    let table: Vec<Record> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let br = gamma::lie_bracket(&fields[i], &fields[j]).expect("same dimension");
            let place = match seed_span.coordinates(&br).expect("same dimension") {
                Some(c) => format!("= {}", combination(&c, &names)),
                None => "escapes the seed span".into(),
            };
            Record::check(format!("[{},{}]", names[i], names[j]), true, format!("{br} {place}"))
        })
        .collect();
    report.extend(table);

    let start = Instant::now();
    let report_closure = gamma::algebra_closure(&fields, cap).map_err(usage)?;
    let mut added = Vec::new();
    for e in &report_closure.added {
        let name = format!("[{},{}]", names[e.left], names[e.right]);
        added.push(format!("{name} = {}", e.field));
        names.push(name);
    }
    let added = if added.is_empty() { "none".into() } else { added.join("; ") };
    let mut rec = Record::check(
        "closure",
        !report_closure.cap_exceeded,
        format!(
            "dimension {} (seeds {}, cap n(n+1)/2 = {cap}); escaping brackets: {added}",
            report_closure.dimension(),
            report_closure.seed_dimension
        ),
    );
    if timing {
        rec.timing_ms = Some(elapsed_ms(start));
    }
    report.push(rec);

    if !report_closure.cap_exceeded {
        let rec = timed(timing, || match gamma::structure_constants(&report_closure.span) {
            Ok(c) => {
                let mut lines = Vec::new();
                for i in 0..c.len() {
                    for j in i + 1..c.len() {
                        if c[i][j].iter().any(|v| !v.is_zero()) {
                            lines.push(format!("[{},{}] = {}", names[i], names[j], combination(&c[i][j], &names)));
                        }
                    }
                }
                Record::check("structure_constants", true, lines.join("; "))
            }
            Err(e) => Record::check("structure_constants", false, e.to_string()),
        });
        report.push(rec);
    }
    if n == 2 {
        let ok = gamma::sl2_check().map_err(usage)?;
        report.push(Record::check("sl2", ok, format!("e = T1, f = -G, h = -2D: sl2 {ok}")));
    }
    Ok(report)
}
