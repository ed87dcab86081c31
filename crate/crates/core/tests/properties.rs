use hydrobracket::bracket::{
    build_canonical, check_compat_constant, check_canonical_equations, check_pencil, check_poisson,
    equivalence_audit, involution_report, special_liouville, CanonicalPair, ConstantBracket, HydroBracket,
};
use hydrobracket::expr::{field_names, gcd, int, is_zero, parse, parse_expr, rat, Expr, ParseMode, Poly, Rational, ZeroVerdict};
use hydrobracket::geometry::canonical_metric;
use hydrobracket::hierarchy::{commute_check, hierarchy, t1_form_residuals};
use hydrobracket::tensor::Matrix;
use num_traits::Zero;
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    small_rational().prop_filter("nonzero", |r| !r.is_zero())
}

/// Polynomial with up to `terms` monomials of total degree ≤ `deg` in `nvars` variables.
fn poly(nvars: usize, deg: u32, terms: usize) -> impl Strategy<Value = Expr> {
    prop::collection::vec((small_rational(), prop::collection::vec(0..=deg, nvars)), 0..=terms).prop_map(
        move |ts| {
            ts.into_iter()
                .filter(|(_, e)| e.iter().sum::<u32>() <= deg)
                .map(|(c, exps)| {
                    let mut m = Expr::constant(c);
                    for (v, e) in exps.into_iter().enumerate() {
                        for _ in 0..e {
                            m = &m * &Expr::var(v);
                        }
                    }
                    m
                })
                .sum()
        },
    )
}

fn as_poly(e: &Expr) -> Poly {
    e.as_poly().expect("polynomial").clone()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn product_commutes_and_obeys_leibniz(p in poly(3, 4, 6), q in poly(3, 4, 6), v in 0usize..3) {
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!((&p * &q).derivative(v), &q * &p.derivative(v) + &p * &q.derivative(v));
    }

    #[test]
    fn difference_with_itself_is_zero(p in poly(2, 3, 5), q in poly(2, 3, 5)) {
        let names = field_names(2);
        let text = format!("({0})/(1 + ({1})^2) - ({0})/(1 + ({1})^2)", p.display(&names), q.display(&names));
        let ast = parse(&text, &names, ParseMode::Rational).unwrap();
        prop_assert_eq!(is_zero(&ast).unwrap(), ZeroVerdict::Zero);
    }

    #[test]
    fn derivative_matches_finite_differences(p in poly(2, 3, 5), q in poly(2, 2, 3), x in -0.9f64..0.9, y in -0.9f64..0.9) {
        let den = &(&q * &q) + &Expr::one();
        let e = p.checked_div(&den).unwrap();
        let d = e.derivative(0).eval_f64(&[x, y]).unwrap();
        let h = 1e-5;
        let fd = (e.eval_f64(&[x + h, y]).unwrap() - e.eval_f64(&[x - h, y]).unwrap()) / (2.0 * h);
        prop_assert!((d - fd).abs() <= 1e-5 * d.abs().max(1.0), "{} vs {}", d, fd);
    }

    #[test]
    fn gcd_divides_and_is_maximal(a in poly(3, 2, 4), b in poly(3, 2, 4), c in poly(3, 2, 3)) {
        prop_assume!(!c.is_zero());
        let (pa, pb, pc) = (as_poly(&a), as_poly(&b), as_poly(&c));
        let x = &pa * &pc;
        let y = &pb * &pc;
        prop_assume!(!x.is_zero() && !y.is_zero());
        let g = gcd(&x, &y);
        prop_assert!(x.div_exact(&g).is_some());
        prop_assert!(y.div_exact(&g).is_some());
        prop_assert!(g.div_exact(&pc).is_some(), "common factor lost");
    }

    #[test]
    fn rational_normal_form_cancels(p in poly(2, 3, 4), q in poly(2, 2, 3)) {
        let den = &(&q * &q) + &Expr::one();
        prop_assert_eq!((&p * &den).checked_div(&den).unwrap(), p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn potential_equations_agree_with_poisson_check(h1 in poly(2, 3, 4), h2 in poly(2, 3, 4), k in small_rational()) {
        let p = CanonicalPair::new(ConstantBracket::identity(2), k, vec![h1, h2]).unwrap();
        let audit = equivalence_audit(&p).unwrap();
        prop_assert_eq!(audit.is_poisson(), check_canonical_equations(&p).unwrap().passed());
        prop_assert_eq!(audit.is_poisson(), check_poisson(&build_canonical(&p)).unwrap().passed());
    }

    #[test]
    fn local_member_of_canonical_pencil(
        h1 in poly(1, 3, 4), h2 in poly(1, 3, 4), k1 in nonzero_rational(), k2 in nonzero_rational()
    ) {
        prop_assume!(k1 != k2);
        let eta = ConstantBracket::identity(1);
        let b1 = build_canonical(&CanonicalPair::new(eta.clone(), k1, vec![h1]).unwrap());
        let b2 = build_canonical(&CanonicalPair::new(eta, k2, vec![h2]).unwrap());
        let report = check_pencil(&b1, &b2).unwrap();
        prop_assert!(report.passed());
        let (c1, c2) = report.local_member.clone();
        let local = b1.combine(&c1, &b2, &c2);
        prop_assert!(local.k.is_zero());
        prop_assert!(check_poisson(&local).unwrap().passed());
    }

    #[test]
    fn linear_pencils_have_poisson_local_member(
        c in prop::collection::vec(small_rational(), 8), k1 in nonzero_rational(), k2 in nonzero_rational()
    ) {
        prop_assume!(k1 != k2);
        let lin = |a: &Rational, b: &Rational| Expr::var(0).scale(a) + Expr::var(1).scale(b);
        let eta = ConstantBracket::diagonal(&[int(1), int(-2)]).unwrap();
        let b1 = build_canonical(&CanonicalPair::new(eta.clone(), k1, vec![lin(&c[0], &c[1]), lin(&c[2], &c[3])]).unwrap());
        let b2 = build_canonical(&CanonicalPair::new(eta, k2, vec![lin(&c[4], &c[5]), lin(&c[6], &c[7])]).unwrap());
        let report = check_pencil(&b1, &b2).unwrap();
        prop_assert!(report.passed());
        let (c1, c2) = report.local_member.clone();
        let local = b1.combine(&c1, &b2, &c2);
        prop_assert!(local.k.is_zero());
        prop_assert!(check_poisson(&local).unwrap().passed());
    }

    #[test]
    fn liouville_round_trip(h1 in poly(2, 3, 4), h2 in poly(2, 3, 4), k in small_rational()) {
        let origin = [int(0), int(0)];
        let h: Vec<Expr> = [h1, h2]
            .into_iter()
            .map(|e| &e - &Expr::constant(e.eval_exact(&origin).unwrap()))
            .collect();
        let eta = ConstantBracket::diagonal(&[int(1), int(-1)]).unwrap();
        let p = CanonicalPair::new(eta.clone(), k.clone(), h).unwrap();
        let b = build_canonical(&p);
        let recovered = special_liouville(&b, &eta).unwrap().h.unwrap();
        let again = build_canonical(&CanonicalPair::new(eta, k, recovered).unwrap());
        prop_assert_eq!(again, b);
    }

    #[test]
    fn first_flow_forms_coincide(h1 in poly(2, 3, 3), h2 in poly(2, 3, 3), k in small_rational()) {
        let p = CanonicalPair::new(ConstantBracket::identity(2), k, vec![h1, h2]).unwrap();
        prop_assert!(t1_form_residuals(&p).unwrap().passed());
    }

    #[test]
    fn scalar_flows_commute(h in poly(1, 3, 4), k in small_rational()) {
        let p = CanonicalPair::new(ConstantBracket::identity(1), k, vec![h]).unwrap();
        let flows = hierarchy(&p, 3, &[]).unwrap();
        for a in 0..flows.len() {
            for b in a + 1..flows.len() {
                prop_assert!(commute_check(&flows[a].v, &flows[b].v).unwrap().passed());
            }
        }
    }
}

fn involutive(b: &HydroBracket, eta: &ConstantBracket) -> bool {
    let n = b.dim();
    let mut dens: Vec<Expr> = (0..n).map(Expr::var).collect();
    dens.push(eta.momentum_density());
    involution_report(b, &dens).unwrap().iter().all(|t| t.2)
}

#[test]
fn compatibility_iff_involution() {
    let names = field_names(2);
    let eta = ConstantBracket::identity(2);
    let h = ["u1^2/2 + u2^2/2", "u1"].map(|s| parse_expr(s, &names).unwrap()).to_vec();
    let canonical = build_canonical(&CanonicalPair::new(eta.clone(), int(1), h).unwrap());
    let curved = HydroBracket::from_metric(canonical_metric(&[int(1), int(1)], &int(1)).unwrap().metric.contra, int(1))
        .unwrap();
    let polar = Matrix::from_rows(vec![
        vec![Expr::one(), Expr::zero()],
        vec![Expr::zero(), parse_expr("1/u1^2", &names).unwrap()],
    ])
    .unwrap();
    let polar = HydroBracket::from_metric(polar, int(0)).unwrap();
    let mut verdicts = Vec::new();
    for b in [&canonical, &curved, &polar] {
        let compat = check_compat_constant(b, &eta).unwrap().passed();
        assert_eq!(compat, involutive(b, &eta));
        verdicts.push(compat);
    }
    assert_eq!(verdicts, [true, true, false]);
}
