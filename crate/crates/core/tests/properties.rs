use cml_core::equivalence::bisimulation;
use cml_core::formula::{encode_abs, encode_down, encode_up, in_fragment, nnf_dnf};
use cml_core::kernel::{Kernel, StateSet};
use cml_core::metric::distance_matrix;
use cml_core::semantics::eval;
use cml_core::{parse, Formula, Fragment, Rate};
use proptest::prelude::*;

fn rate_strategy() -> impl Strategy<Value = Rate> {
    (0u64..12, 1u64..5).prop_map(|(p, q)| Rate::from_ratio(p, q))
}

fn formula_strategy() -> impl Strategy<Value = Formula> {
    let leaf = Just(Formula::Top);
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (rate_strategy(), inner.clone()).prop_map(|(r, f)| Formula::l(r, f)),
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::implies(a, b)),
        ]
    })
}

fn kernel_strategy(max: usize) -> impl Strategy<Value = Kernel> {
    (1..=max).prop_flat_map(|n| {
        proptest::collection::vec(prop_oneof![3 => Just(0u64), 1 => 1u64..4], n * n).prop_map(move |cells| {
            let rates = cells
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(i, &c)| (i / n, i % n, Rate::from_integer(c)));
            Kernel::new((0..n).map(|i| format!("s{i}")), rates).unwrap()
        })
    })
}

fn subset_strategy(n: usize) -> impl Strategy<Value = StateSet> {
    proptest::collection::vec(any::<bool>(), n)
        .prop_map(move |bits| StateSet::from_indices(n, bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn printing_round_trips(f in formula_strategy()) {
        let text = f.to_string();
        prop_assert_eq!(parse(&text).unwrap(), f);
    }

    #[test]
    fn down_encodings_compose(f in formula_strategy(), a in rate_strategy(), b in rate_strategy()) {
        prop_assert_eq!(encode_down(&encode_down(&f, &a), &b), encode_down(&f, &(&a + &b)));
        prop_assert_eq!(encode_up(&encode_up(&f, &a), &b), encode_up(&f, &(&a + &b)));
        prop_assert_eq!(encode_down(&encode_up(&f, &a), &a), f);
    }

    #[test]
    fn normal_form_preserves_meaning(k in kernel_strategy(4), f in formula_strategy()) {
        let g = nnf_dnf(&f);
        prop_assert_eq!(eval(&k, &g, &Rate::zero()), eval(&k, &f, &Rate::zero()));
        prop_assert_eq!(encode_abs(&f, &Rate::zero()).to_string(), g.to_string());
    }

    #[test]
    fn measure_is_additive(
        (k, a, b) in kernel_strategy(5).prop_flat_map(|k| {
            let n = k.len();
            (Just(k), subset_strategy(n), subset_strategy(n))
        })
    ) {
        for m in 0..k.len() {
            let lhs = k.measure(m, &a.union(&b)).unwrap() + k.measure(m, &a.intersection(&b)).unwrap();
            let rhs = k.measure(m, &a).unwrap() + k.measure(m, &b).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn kernel_json_round_trips(k in kernel_strategy(5)) {
        prop_assert_eq!(Kernel::from_json(&k.to_json()).unwrap(), k);
    }

    #[test]
    fn extensions_are_bisimulation_closed(k in kernel_strategy(5), f in formula_strategy(), e in rate_strategy()) {
        let part = bisimulation(&k);
        prop_assert!(part.is_closed(&eval(&k, &f, &e)));
    }

    #[test]
    fn positive_fragment_is_monotone_in_epsilon(k in kernel_strategy(4), f in formula_strategy(), e in rate_strategy(), d in rate_strategy()) {
        let f = nnf_dnf(&f);
        prop_assume!(in_fragment(&f, Fragment::Positive));
        prop_assert!(eval(&k, &f, &e).is_subset(&eval(&k, &f, &(&e + &d))));
    }

    #[test]
    fn distances_are_a_pseudometric(k in kernel_strategy(4)) {
        let d = distance_matrix(&k).unwrap();
        let part = bisimulation(&k);
        for a in 0..k.len() {
            for b in 0..k.len() {
                prop_assert_eq!(&d[a][b], &d[b][a]);
                prop_assert_eq!(d[a][b].is_zero(), part.same_block(a, b));
                for c in 0..k.len() {
                    prop_assert!(d[a][c] <= &d[a][b] + &d[b][c]);
                }
            }
        }
    }
}
