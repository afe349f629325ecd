use num_traits::Zero;
use proptest::prelude::*;

use rbkit_core::exterior::{self, KForm, VectorField};
use rbkit_core::flows::{self, FlowKind, FlowState};
use rbkit_core::gamma::{self, ContactMatrix, Generator};
use rbkit_core::hypgeo::{self, SolitonParams};
use rbkit_core::linalg;
use rbkit_core::ratlaurent::{rat, ratio, LaurentPoly, Monomial, Rational};

fn rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=6).prop_map(|(p, q)| ratio(p, q))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    rational().prop_filter("nonzero", |q| !q.is_zero())
}

fn monomial(n: usize) -> impl Strategy<Value = Monomial> {
    (prop::collection::vec(0i32..=3, n - 1), -3i32..=3).prop_map(|(mut e, last)| {
        e.push(last);
        Monomial::new(e).unwrap()
    })
}

fn poly(n: usize) -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((monomial(n), rational()), 0..5)
        .prop_map(move |terms| LaurentPoly::from_terms(n, terms).unwrap())
}

fn field(n: usize) -> impl Strategy<Value = VectorField> {
    prop::collection::vec(poly(n), n).prop_map(|c| VectorField::new(c).unwrap())
}

fn form(n: usize, grade: usize) -> impl Strategy<Value = KForm> {
    let keys: Vec<Vec<usize>> = subsets(n, grade);
    prop::collection::vec(poly(n), keys.len()).prop_map(move |coeffs| {
        keys.iter().zip(coeffs).fold(KForm::zero(n, grade), |acc, (k, c)| {
            acc.add(&KForm::basis(n, k, c).unwrap()).unwrap()
        })
    })
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (0..n)
        .flat_map(|i| {
            subsets(n, k - 1)
                .into_iter()
                .filter(move |s| s.first().map_or(true, |&f| f > i))
                .map(move |mut s| {
                    s.insert(0, i);
                    s
                })
        })
        .collect()
}

fn params(n: usize) -> impl Strategy<Value = SolitonParams> {
    (
        prop::collection::vec(rational(), n - 1),
        rational(),
        prop::collection::vec(rational(), n - 1),
        nonzero_rational(),
    )
        .prop_filter_map("all-zero field", |(a, b, c, rho)| SolitonParams::new(a, b, c, rho).ok())
}

fn point(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    (prop::collection::vec(rational(), n - 1), 1i64..=7, 1i64..=4).prop_map(|(mut p, num, den)| {
        p.push(ratio(num, den));
        p
    })
}

fn antisymmetric(size: usize) -> impl Strategy<Value = ContactMatrix> {
    prop::collection::vec(rational(), size * (size - 1) / 2).prop_map(move |vals| {
        let mut rows = vec![vec![Rational::zero(); size]; size];
        let mut it = vals.into_iter();
        for i in 0..size {
            for j in i + 1..size {
                let v = it.next().unwrap();
                rows[j][i] = -v.clone();
                rows[i][j] = v;
            }
        }
        ContactMatrix::from_rows(rows).unwrap()
    })
}

fn sign(k: usize, l: usize) -> Rational {
    if (k * l) % 2 == 0 {
        rat(1)
    } else {
        rat(-1)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn ring_axioms(p in poly(3), q in poly(3), r in poly(3)) {
        prop_assert_eq!(&p + &q, &q + &p);
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert!((&p - &p).is_zero());
        prop_assert_eq!(&p * &LaurentPoly::one(3), p.clone());
    }

    #[test]
    fn partials_commute(p in poly(3), i in 0usize..3, j in 0usize..3) {
        prop_assert_eq!(p.deriv(i).deriv(j), p.deriv(j).deriv(i));
    }

    #[test]
    fn product_rule(p in poly(3), q in poly(3), i in 0usize..3) {
        prop_assert_eq!((&p * &q).deriv(i), &(&p.deriv(i) * &q) + &(&p * &q.deriv(i)));
    }

    #[test]
    fn evaluation_is_a_homomorphism(p in poly(3), q in poly(3), pt in point(3)) {
        let (pv, qv) = (p.evaluate(&pt).unwrap(), q.evaluate(&pt).unwrap());
        prop_assert_eq!((&p + &q).evaluate(&pt).unwrap(), &pv + &qv);
        prop_assert_eq!((&p * &q).evaluate(&pt).unwrap(), &pv * &qv);
    }

    #[test]
    fn text_round_trip(p in poly(4)) {
        let text = p.to_string();
        prop_assert_eq!(LaurentPoly::parse(&text, 4).unwrap(), p);
    }

    #[test]
    fn d_squared_vanishes(a in form(4, 1), b in form(4, 2)) {
        prop_assert!(exterior::ext_d(&exterior::ext_d(&a)).is_zero());
        prop_assert!(exterior::ext_d(&exterior::ext_d(&b)).is_zero());
    }

    #[test]
    fn graded_commutativity(a in form(4, 1), b in form(4, 2), c in form(4, 1)) {
        let ab = exterior::wedge(&a, &b).unwrap();
        let ba = exterior::wedge(&b, &a).unwrap();
        prop_assert_eq!(ab, ba.scale(&sign(1, 2)));
        let ac = exterior::wedge(&a, &c).unwrap();
        let ca = exterior::wedge(&c, &a).unwrap();
        prop_assert_eq!(ac, ca.scale(&sign(1, 1)));
    }

    #[test]
    fn d_is_a_graded_derivation(a in form(3, 1), b in form(3, 1)) {
        let lhs = exterior::ext_d(&exterior::wedge(&a, &b).unwrap());
        let rhs = exterior::wedge(&exterior::ext_d(&a), &b).unwrap()
            .sub(&exterior::wedge(&a, &exterior::ext_d(&b)).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn cartan_matches_direct(x in field(3), a in form(3, 1), b in form(3, 2)) {
        for alpha in [a, b] {
            prop_assert_eq!(
                exterior::lie_derivative_cartan(&x, &alpha).unwrap(),
                exterior::lie_derivative_direct(&x, &alpha).unwrap()
            );
        }
    }

    #[test]
    fn interior_squares_to_zero(x in field(4), b in form(4, 2), c in form(4, 3)) {
        for alpha in [b, c] {
            let once = exterior::interior(&x, &alpha).unwrap();
            prop_assert!(exterior::interior(&x, &once).unwrap().is_zero());
        }
    }

    #[test]
    fn bracket_is_a_lie_bracket(x in field(2), y in field(2), z in field(2), c in rational()) {
        let br = |u: &VectorField, v: &VectorField| u.bracket(v).unwrap();
        prop_assert_eq!(br(&x, &y), br(&y, &x).scale(&rat(-1)));
        prop_assert_eq!(br(&x.scale(&c).add(&z), &y), br(&x, &y).scale(&c).add(&br(&z, &y)));
        let jacobi = br(&x, &br(&y, &z)).add(&br(&y, &br(&z, &x))).add(&br(&z, &br(&x, &y)));
        prop_assert!(jacobi.is_zero());
    }

    #[test]
    fn soliton_field_is_linear_in_parameters(p in params(4), q in params(4)) {
        let sum = SolitonParams {
            a: p.a.iter().zip(&q.a).map(|(u, v)| u + v).collect(),
            b: &p.b + &q.b,
            c: p.c.iter().zip(&q.c).map(|(u, v)| u + v).collect(),
            ..p.clone()
        };
        prop_assert_eq!(gamma::build_field(&sum), gamma::build_field(&p).add(&gamma::build_field(&q)));
    }

    #[test]
    fn soliton_fields_are_killing(p in params(4)) {
        prop_assert!(hypgeo::lie_derivative_metric(&gamma::build_field(&p)).unwrap().is_zero());
    }

    #[test]
    fn pfaffian_squares_to_determinant(m2 in antisymmetric(2), m4 in antisymmetric(4), m6 in antisymmetric(6)) {
        for m in [m2, m4, m6] {
            let pf = m.pfaffian();
            prop_assert_eq!(&pf * &pf, linalg::cofactor_determinant(m.rows()));
        }
    }

    #[test]
    fn contact_matrix_has_rank_at_most_two(p in params(5)) {
        prop_assert!(gamma::contact_matrix(&p).unwrap().pfaffian().is_zero());
    }

    #[test]
    fn power_matches_split(a in form(5, 1), b in form(5, 1)) {
        let w = exterior::wedge(&a, &b).unwrap().add(&exterior::ext_d(&a)).unwrap();
        prop_assert_eq!(exterior::power_wedge(&w, 2).unwrap(), exterior::power_wedge_split(&w, 2).unwrap());
    }
}

fn generator_fields(n: usize) -> Vec<VectorField> {
    gamma::seed_generators(n).into_iter().map(|g| g.field(n).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closure_is_monotone(mask in prop::collection::vec(any::<bool>(), 5)) {
        let all = generator_fields(3);
        let seeds: Vec<_> = all.iter().zip(&mask).filter(|(_, &m)| m).map(|(f, _)| f.clone()).collect();
        prop_assume!(!seeds.is_empty());
        let small = gamma::algebra_closure(&seeds, 6).unwrap();
        prop_assert!(small.dimension() >= small.seed_dimension);
        let full = gamma::algebra_closure(&all, 6).unwrap();
        prop_assert!(full.dimension() >= small.dimension());
        for f in small.span.basis() {
            prop_assert!(full.span.contains(f).unwrap());
        }
    }
}

fn f64_point(n: usize) -> impl Strategy<Value = FlowState> {
    (prop::collection::vec(-2.0f64..2.0, n - 1), 0.2f64..3.0).prop_map(|(mut c, last)| {
        c.push(last);
        FlowState::at(&c).unwrap()
    })
}

fn closed_kinds(n: usize) -> Vec<FlowKind> {
    gamma::seed_generators(n).into_iter().map(FlowKind::from).collect()
}

proptest! {
    #[test]
    fn closed_flows_form_a_group(p in f64_point(3), s in -0.5f64..0.5, t in -0.5f64..0.5) {
        for kind in closed_kinds(3) {
            let stepped = flows::closed_flow(&kind, &flows::closed_flow(&kind, &p, s).unwrap(), t).unwrap();
            let direct = flows::closed_flow(&kind, &p, s + t).unwrap();
            for (u, v) in stepped.coords.iter().zip(&direct.coords) {
                prop_assert!((u - v).abs() <= 1e-9 * (1.0 + v.abs()), "{kind:?}: {u} vs {v}");
            }
        }
    }

    #[test]
    fn closed_flows_solve_the_ode(p in f64_point(3)) {
        let h = 1e-5;
        for kind in closed_kinds(3) {
            let f = kind.field(3).unwrap();
            let fwd = flows::closed_flow(&kind, &p, h).unwrap();
            let back = flows::closed_flow(&kind, &p, -h).unwrap();
            let exact = flows::FieldEvaluator::new(&f).eval(&p.coords);
            for i in 0..3 {
                let fd = (fwd.coords[i] - back.coords[i]) / (2.0 * h);
                prop_assert!((fd - exact[i]).abs() <= 1e-5 * (1.0 + exact[i].abs()), "{kind:?}: {fd} vs {}", exact[i]);
            }
        }
    }

    #[test]
    fn planar_rotation_solves_its_ode(p in f64_point(2)) {
        let kind = FlowKind::from(Generator::PlanarRotation);
        let h = 1e-5;
        let exact = flows::FieldEvaluator::new(&kind.field(2).unwrap()).eval(&p.coords);
        let fwd = flows::closed_flow(&kind, &p, h).unwrap();
        let back = flows::closed_flow(&kind, &p, -h).unwrap();
        for i in 0..2 {
            let fd = (fwd.coords[i] - back.coords[i]) / (2.0 * h);
            prop_assert!((fd - exact[i]).abs() <= 1e-5 * (1.0 + exact[i].abs()));
        }
    }

    #[test]
    fn distance_is_a_metric(p in f64_point(3), q in f64_point(3), r in f64_point(3)) {
        let d = |a: &FlowState, b: &FlowState| hypgeo::hyp_distance(&a.coords, &b.coords).unwrap();
        prop_assert!(d(&p, &p).abs() < 1e-7);
        prop_assert!((d(&p, &q) - d(&q, &p)).abs() < 1e-12);
        prop_assert!(d(&p, &r) <= d(&p, &q) + d(&q, &r) + 1e-9);
    }
}

#[test]
fn one_hot_parameters_reproduce_generators() {
    for n in 2..=6 {
        for g in gamma::seed_generators(n) {
            if let Some(p) = g.one_hot_params(n) {
                assert_eq!(gamma::build_field(&p), g.field(n).unwrap(), "{g} on H^{n}");
            }
        }
    }
}

#[test]
fn standard_contact_form_is_detected() {
    // a nondegenerate control: w = dx5 + x1 dx2 + x3 dx4 has w^(dw)^2 = 2 dx1..dx5
    let n = 5;
    let v = |i| LaurentPoly::var(n, i);
    let w = KForm::one_form(vec![
        LaurentPoly::zero(n),
        v(0),
        LaurentPoly::zero(n),
        v(2),
        LaurentPoly::one(n),
    ])
    .unwrap();
    let top = exterior::wedge(&w, &exterior::power_wedge(&exterior::ext_d(&w), 2).unwrap()).unwrap();
    assert_eq!(top.top_coefficient().unwrap(), LaurentPoly::constant(n, rat(2)));
}
