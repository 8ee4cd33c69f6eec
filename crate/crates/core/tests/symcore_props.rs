//! Algebraic invariants of the exact layer, checked on random inputs.

use proptest::prelude::*;
use transverse_core::random;
use transverse_core::symcore::{Decision, LogSum};
use transverse_core::{RatExpr, Rational};

const VARS: [&str; 3] = ["x", "y", "z"];

fn arb_poly() -> impl Strategy<Value = RatExpr> {
    (any::<u64>(), 0u32..=3).prop_map(|(seed, d)| random::polynomial(&mut random::rng(seed), &VARS, d))
}

fn arb_ratexpr() -> impl Strategy<Value = RatExpr> {
    (any::<u64>(), 0u32..=2).prop_map(|(seed, d)| random::rational_function(&mut random::rng(seed), &VARS[..2], d))
}

fn point() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-20i64..20, 1i64..7), 3).prop_map(|v| v.into_iter().map(|(n, d)| Rational::new(n.into(), d.into())).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in arb_ratexpr(), b in arb_ratexpr(), c in arb_ratexpr()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert!((&a * &a.recip().unwrap()).is_one());
            prop_assert_eq!((&b * &a).try_div(&a).unwrap(), b.clone());
        }
    }

    #[test]
    fn leibniz_rule(a in arb_ratexpr(), b in arb_ratexpr()) {
        for v in ["x", "y"] {
            let lhs = (&a * &b).partial(v);
            let rhs = &(&a.partial(v) * &b) + &(&a * &b.partial(v));
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn print_then_parse(a in arb_ratexpr()) {
        let text = a.to_string();
        prop_assert_eq!(RatExpr::parse(&text, &VARS).unwrap(), a);
    }

    #[test]
    fn evaluation_is_a_ring_map(a in arb_poly(), b in arb_poly(), p in point()) {
        let ea = a.eval_at(&VARS, &p).unwrap();
        let eb = b.eval_at(&VARS, &p).unwrap();
        prop_assert_eq!((&a * &b).eval_at(&VARS, &p).unwrap(), &ea * &eb);
        prop_assert_eq!((&a + &b).eval_at(&VARS, &p).unwrap(), ea + eb);
    }

    #[test]
    fn canonical_form_is_reduced(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
        prop_assume!(!b.is_zero() && !c.is_zero());
        // (a c) / (b c) must print exactly like a / b
        let lhs = (&a * &c).try_div(&(&b * &c)).unwrap();
        let rhs = a.try_div(&b).unwrap();
        prop_assert_eq!(lhs.to_string(), rhs.to_string());
    }

    #[test]
    fn logs_turn_products_into_sums(a in arb_poly(), b in arb_poly()) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let one = Rational::from_integer(1.into());
        let lhs = LogSum::ln_abs(one.clone(), &a * &b).unwrap();
        let rhs = &LogSum::ln_abs(one.clone(), a.clone()).unwrap() + &LogSum::ln_abs(one, b.clone()).unwrap();
        prop_assert_eq!(lhs.compare(&rhs), Decision::Equal);
    }
}
