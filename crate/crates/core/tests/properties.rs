mod common;

use common::*;
use proptest::prelude::*;
use restrule::structures::Assignment;
use restrule::syntax::{
    alpha_eq, canonical, parse_formula, pull_uniqueness, push_uniqueness, relativize, substitute,
    theta_prefix, Substitution,
};
use restrule::{Formula, Symbol, Term};

fn term() -> impl Strategy<Value = Term> {
    prop_oneof![
        Just(Term::var("x")),
        Just(Term::var("y")),
        Just(Term::constant("c"))
    ]
}

fn atom() -> impl Strategy<Value = Formula> {
    (0..4u8, term(), term()).prop_map(|(k, a, b)| match k {
        0 => Formula::atom("R", vec![a, b]),
        1 => Formula::atom("S", vec![a, b]),
        2 => Formula::atom("P", vec![a]),
        _ => Formula::eq(a, b),
    })
}

fn var() -> impl Strategy<Value = Symbol> {
    prop_oneof![Just(Symbol::new("x")), Just(Symbol::new("y"))]
}

fn formula() -> impl Strategy<Value = Formula> {
    atom().prop_recursive(4, 32, 4, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::And),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::Or),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
            (var(), inner.clone()).prop_map(|(v, f)| Formula::forall(vec![v], f)),
            (var(), inner).prop_map(|(v, f)| Formula::exists(vec![v], f)),
        ]
    })
}

fn closure(f: &Formula) -> Formula {
    let free = f.free_vars_ordered();
    if free.is_empty() {
        f.clone()
    } else {
        Formula::forall(free, f.clone())
    }
}

fn structure(seed: u64, n: usize) -> restrule::structures::Structure {
    random_structure(&mut rng(seed), &plain_vocab(), n, "A", 0.45)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printing_then_parsing_is_identity(f in formula()) {
        let back = parse_formula(&f.to_string(), &plain_vocab()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn empty_and_identity_substitutions(f in formula()) {
        prop_assert_eq!(substitute(&f, &Substitution::new()), f.clone());
        let id: Substitution = [(Symbol::new("x"), Term::var("x"))].into();
        prop_assert!(alpha_eq(&substitute(&f, &id), &f));
    }

    #[test]
    fn canonical_form_is_idempotent(f in formula()) {
        let once = canonical(&f);
        prop_assert_eq!(canonical(&once), once.clone());
        prop_assert!(alpha_eq(&once, &f));
    }

    #[test]
    fn substitution_matches_assignment(f in formula(), seed in any::<u64>(), n in 1..4usize) {
        let a = structure(seed, n);
        let c = a.constant(&Symbol::new("c")).unwrap();
        for y in a.elements() {
            let asg: Assignment = [(Symbol::new("x"), c), (Symbol::new("y"), y)].into();
            let map: Substitution = [(Symbol::new("x"), Term::constant("c"))].into();
            let only_y: Assignment = [(Symbol::new("y"), y)].into();
            prop_assert_eq!(a.eval(&f, &asg).unwrap(), a.eval(&substitute(&f, &map), &only_y).unwrap());
        }
    }

    #[test]
    fn truth_is_invariant_under_relabelling(f in formula(), seed in any::<u64>(), n in 1..5usize) {
        let a = structure(seed, n);
        let perm = shuffled(&mut rng(seed ^ 1), n);
        let b = a.relabel(&perm);
        let s = closure(&f);
        prop_assert_eq!(a.eval_sentence(&s).unwrap(), b.eval_sentence(&s).unwrap());
    }

    #[test]
    fn relativizing_to_everything_changes_nothing(f in formula(), seed in any::<u64>(), n in 1..4usize) {
        let u = Symbol::new("U");
        let a = structure(seed, n);
        let all: Vec<usize> = a.elements().collect();
        let b = a.with_unary(&u, &all).unwrap();
        let s = closure(&f);
        prop_assert_eq!(a.eval_sentence(&s).unwrap(), b.eval_sentence(&relativize(&s, &u)).unwrap());
    }

    #[test]
    fn pushing_a_uniqueness_prefix_preserves_truth(f in formula(), seed in any::<u64>(), n in 1..4usize) {
        let mut r = rng(seed);
        let a = random_rigid(&mut r, &plain_vocab(), n, "A");
        let thetas = thetas_of(&a);
        let x = Symbol::new("x");
        let body = substitute(&f, &[(Symbol::new("y"), Term::constant("c"))].into());
        prop_assume!(!body.is_atomic());
        let g = theta_prefix(&[(x, &thetas.members()[seed as usize % n])], body);
        let pushed = push_uniqueness(&g, thetas.members(), None).unwrap();
        let pulled = pull_uniqueness(&pushed, thetas.members(), None).unwrap();
        let truth = a.eval_sentence(&g).unwrap();
        prop_assert_eq!(a.eval_sentence(&pushed).unwrap(), truth);
        prop_assert_eq!(a.eval_sentence(&pulled).unwrap(), truth);
    }
}
