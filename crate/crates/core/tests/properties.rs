use std::sync::OnceLock;

use proptest::prelude::*;

use mcenv_core::catalog;
use mcenv_core::centralizers::{centralizer, CentralizerLattice, DEFAULT_NODE_CAP};
use mcenv_core::envelope::build_envelope;
use mcenv_core::formula::{envelope_formula, evaluate, parse, print, Formula, Term};
use mcenv_core::harness::hall_witt_instance;
use mcenv_core::series::{iterated_centralizer, nilpotence_class, upper_central_series, upper_term};
use mcenv_core::{Element, ElementSet, FiniteGroup, IDENTITY};

fn groups() -> &'static [FiniteGroup] {
    static GROUPS: OnceLock<Vec<FiniteGroup>> = OnceLock::new();
    GROUPS.get_or_init(|| {
        [
            "symmetric(3)",
            "dihedral(4)",
            "quaternion(8)",
            "alternating(4)",
            "symmetric(4)",
            "unitriangular(3)",
            "dihedral(8)",
            "product(dihedral(4),symmetric(3))",
            "cyclic(6)",
        ]
        .iter()
        .map(|s| catalog::parse_spec(s).unwrap())
        .collect()
    })
}

fn group_and<T: std::fmt::Debug>(
    f: impl Fn(usize) -> BoxedStrategy<T> + Clone + 'static,
) -> impl Strategy<Value = (usize, T)> {
    (0..groups().len()).prop_flat_map(move |i| (Just(i), f(groups()[i].order())))
}

fn elems(n: usize, max: usize) -> BoxedStrategy<Vec<Element>> {
    prop::collection::vec(0..n, 0..=max).boxed()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn hall_witt_identity((i, (x, y, z)) in group_and(|n| (0..n, 0..n, 0..n).boxed())) {
        prop_assert_eq!(hall_witt_instance(&groups()[i], x, y, z), None);
    }

    #[test]
    fn inverse_and_identity((i, g) in group_and(|n| (0..n).boxed())) {
        let grp = &groups()[i];
        prop_assert_eq!(grp.mul(grp.inv(g), g), IDENTITY);
        prop_assert_eq!(grp.mul(g, IDENTITY), g);
        prop_assert_eq!(grp.comm(g, IDENTITY), IDENTITY);
    }

    #[test]
    fn closure_idempotent_and_monotone((i, (a, b)) in group_and(|n| (elems(n, 3), elems(n, 3)).boxed())) {
        let g = &groups()[i];
        let ca = g.closure(a.iter().copied());
        let again = g.closure(ca.iter());
        prop_assert_eq!(&again, &ca);
        let cab = g.closure(a.iter().chain(b.iter()).copied());
        prop_assert!(ca.is_subgroup_of(&cab));
        prop_assert_eq!(g.closure(ca.generators().iter().copied()), ca);
    }

    #[test]
    fn normalizer_contains_and_normal_closure_is_normal((i, (a, x)) in group_and(|n| (elems(n, 2), 0..n).boxed())) {
        let g = &groups()[i];
        let h = g.closure(a);
        prop_assert!(h.is_subgroup_of(&h.normalizer()));
        prop_assert!(g.normal_closure(x).is_normal());
    }

    #[test]
    fn triple_centralizer((i, a) in group_and(|n| elems(n, 6))) {
        let g = &groups()[i];
        let c1 = centralizer(&g.element_set(a));
        let c3 = centralizer(&ElementSet::from(&centralizer(&ElementSet::from(&c1))));
        prop_assert_eq!(c3, c1);
    }

    #[test]
    fn subgroup_dimension_is_bounded((i, a) in group_and(|n| elems(n, 3))) {
        let g = &groups()[i];
        let h = g.closure(a);
        let dg = CentralizerLattice::build(g, DEFAULT_NODE_CAP).unwrap().c_dimension().dimension;
        let dh = CentralizerLattice::build_in(&h, DEFAULT_NODE_CAP).unwrap().c_dimension().dimension;
        prop_assert!(dh <= dg);
    }

    #[test]
    fn iterated_centralizer_laws((i, a) in group_and(|n| elems(n, 3))) {
        let g = &groups()[i];
        let p = g.closure(a);
        let tower = iterated_centralizer(&g.whole(), &p, 3).unwrap();
        for n in 0..=3 {
            let c = tower.level(n);
            prop_assert!(c.is_normalized_by(&p));
            prop_assert_eq!(c.intersection(&p), upper_term(&p, n));
        }
        if let Ok(class) = nilpotence_class(&p) {
            let t = iterated_centralizer(&g.whole(), &p, class).unwrap();
            prop_assert!(p.is_subgroup_of(t.level(class)));
        }
    }

    #[test]
    fn envelope_of_random_nilpotent_subgroup((i, a) in group_and(|n| elems(n, 2))) {
        let g = &groups()[i];
        let h = g.closure(a);
        prop_assume!(nilpotence_class(&h).is_ok());
        let t = build_envelope(g, &h).unwrap();
        let d = CentralizerLattice::build(g, DEFAULT_NODE_CAP).unwrap().c_dimension().dimension;
        let params = t.padded_parameters(d).unwrap();
        prop_assert_eq!(params.len(), d * t.class);
        let f = envelope_formula(d, t.class);
        let defined = evaluate(&f, g, &params).unwrap();
        prop_assert_eq!(defined.bits(), t.envelope.bits());
    }
}

#[test]
fn tower_of_the_whole_group_is_the_upper_series() {
    for g in groups() {
        let upper = upper_central_series(&g.whole());
        let n = upper.terms.len() - 1;
        let tower = iterated_centralizer(&g.whole(), &g.whole(), n).unwrap();
        assert_eq!(tower.terms, upper.terms);
    }
}

// --- formulas -------------------------------------------------------------

const VARS: [&str; 3] = ["x", "y", "z"];

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        (0..VARS.len()).prop_map(|i| Term::var(VARS[i])),
        (0..2usize).prop_map(Term::Param),
        Just(Term::Identity),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::mul(a, b)),
            inner.prop_map(Term::inv),
        ]
    })
}

fn formula() -> impl Strategy<Value = Formula> {
    let atom = (term(), term()).prop_map(|(a, b)| Formula::eq(a, b));
    atom.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            inner.clone().prop_map(Formula::not),
            (1..VARS.len(), inner.clone()).prop_map(|(v, f)| Formula::forall(VARS[v], f)),
            (1..VARS.len(), inner).prop_map(|(v, f)| Formula::exists(VARS[v], f)),
        ]
    })
}

/// Closes every free variable other than `x` existentially.
fn close(mut f: Formula) -> Formula {
    for v in f.free_vars() {
        if v != "x" {
            f = Formula::exists(&v, f);
        }
    }
    f
}

/// Direct recursive semantics with an association-list environment.
fn naive(f: &Formula, g: &FiniteGroup, params: &[Element], env: &mut Vec<(String, Element)>) -> bool {
    fn t(term: &Term, g: &FiniteGroup, params: &[Element], env: &[(String, Element)]) -> Element {
        match term {
            Term::Var(v) => env.iter().rev().find(|(n, _)| n == v).unwrap().1,
            Term::Param(i) => params[*i],
            Term::Identity => IDENTITY,
            Term::Mul(a, b) => g.mul(t(a, g, params, env), t(b, g, params, env)),
            Term::Inv(a) => g.inv(t(a, g, params, env)),
        }
    }
    match f {
        Formula::Eq(a, b) => t(a, g, params, env) == t(b, g, params, env),
        Formula::And(a, b) => naive(a, g, params, env) && naive(b, g, params, env),
        Formula::Or(a, b) => naive(a, g, params, env) || naive(b, g, params, env),
        Formula::Not(a) => !naive(a, g, params, env),
        Formula::Forall(v, b) => g.elements().all(|e| {
            env.push((v.clone(), e));
            let r = naive(b, g, params, env);
            env.pop();
            r
        }),
        Formula::Exists(v, b) => g.elements().any(|e| {
            env.push((v.clone(), e));
            let r = naive(b, g, params, env);
            env.pop();
            r
        }),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn print_then_parse_is_identity(f in formula()) {
        let text = print(&f);
        prop_assert_eq!(parse(&text).unwrap(), f, "{}", text);
    }

    #[test]
    fn evaluator_matches_direct_semantics(f in formula(), gi in 0..3usize, p0 in 0..6usize, p1 in 0..6usize) {
        let g = &groups()[gi];
        let f = close(f);
        let params: Vec<Element> = [p0 % g.order(), p1 % g.order()][..f.param_count()].to_vec();
        let expected: Vec<Element> = g
            .elements()
            .filter(|&x| naive(&f, g, &params, &mut vec![("x".to_string(), x)]))
            .collect();
        prop_assert_eq!(evaluate(&f, g, &params).unwrap().to_vec(), expected);
    }

    #[test]
    fn commuting_formula_is_a_centralizer((i, p) in group_and(|n| (0..n).boxed())) {
        let g = &groups()[i];
        let f = parse("x*p0 = p0*x").unwrap();
        let defined = evaluate(&f, g, &[p]).unwrap();
        let c = centralizer(&g.element_set([p]));
        prop_assert_eq!(defined.bits(), c.bits());
    }
}
