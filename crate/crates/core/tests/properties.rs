use proptest::prelude::*;

use llg_core::builtins::group;
use llg_core::expr::identity::{check_zero_all, equiv_random, IdentityConfig};
use llg_core::expr::{parse, Expr, ParseContext, VarRef};
use llg_core::forms::random::random_nonlinear;
use llg_core::forms::{delta, dtilde};
use llg_core::geometry::{Splitting, Variant};

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0usize..3).prop_map(|i| Expr::var(VarRef::x(i))),
        (0usize..2).prop_map(|i| Expr::var(VarRef::y(i))),
        (-5i64..=5, 1i64..=4).prop_map(|(p, q)| Expr::ratio(p, q)),
    ]
}

fn rational_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            proptest::collection::vec(inner.clone(), 2..4).prop_map(Expr::sum),
            proptest::collection::vec(inner.clone(), 2..3).prop_map(Expr::product),
            inner.clone().prop_map(|e| e.neg()),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::div(&a, &b)),
            (inner, -2i32..=3).prop_map(|(a, k)| Expr::pow(&a, k)),
        ]
    })
}

/// Equal, or undecidable because the expression is undefined almost everywhere
/// (for example a division by an identically zero subterm).
fn same(a: &Expr, b: &Expr) -> bool {
    let v = equiv_random(a, b, 8, 1);
    v.is_equal() || matches!(v, llg_core::expr::identity::Verdict::Inconclusive(_))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printing_then_parsing_preserves_value(e in rational_expr()) {
        let text = e.to_string();
        let back = parse(&text, &ParseContext::new(3, 2)).expect("printed expressions parse");
        prop_assert!(same(&e, &back), "{}", text);
    }

    #[test]
    fn derivative_is_linear(a in rational_expr(), b in rational_expr(), k in -3i64..=3, v in 0usize..3) {
        let x = VarRef::x(v);
        let lhs = Expr::add(&a, &Expr::mul(&Expr::int(k), &b)).diff(x);
        let rhs = Expr::add(&a.diff(x), &Expr::mul(&Expr::int(k), &b.diff(x)));
        prop_assert!(same(&lhs, &rhs));
    }

    #[test]
    fn mixed_partials_commute(e in rational_expr(), i in 0usize..3, j in 0usize..2) {
        let (u, w) = (VarRef::x(i), VarRef::y(j));
        prop_assert!(same(&e.diff(u).diff(w), &e.diff(w).diff(u)));
    }

    #[test]
    fn normal_form_preserves_value(e in rational_expr()) {
        prop_assert!(same(&e, &e.simplified()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn multi_point_differentials_square_to_zero(
        name in prop::sample::select(vec!["abelian:2", "heisenberg3", "affine2"]),
        degree in 0usize..2,
        seed in any::<u64>(),
    ) {
        let g = group(name).unwrap();
        let s = Splitting::from_group(&g, Variant::Tilde);
        let w = random_nonlinear(g.dim, 2, degree, seed);
        let cfg = IdentityConfig::default().with_trials(8).with_seed(seed);
        let dd = dtilde(&s, &dtilde(&s, &w));
        prop_assert!(check_zero_all(&dd.comps, &g.constraints, &cfg).is_equal());
        let dd = delta(&s, &delta(&s, &w));
        prop_assert!(check_zero_all(&dd.comps, &g.constraints, &cfg).is_equal());
    }
}
