#![allow(dead_code)]

pub mod pebble;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use restrule::diagrams::{u_part, ThetaSet};
use restrule::structures::{defining_formula, pd, Structure};
use restrule::syntax::parse_formula;
use restrule::{Formula, Symbol, Term, Vocabulary};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `R`, `S` binary, `P` unary, constant `c`.
pub fn plain_vocab() -> Vocabulary {
    Vocabulary::new()
        .with_relation("R", 2)
        .with_relation("S", 2)
        .with_relation("P", 1)
        .with_constant("c")
}

pub fn u_vocab() -> Vocabulary {
    plain_vocab().with_predicate("U")
}

pub fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("e{i}")).collect()
}

pub fn f(text: &str, v: &Vocabulary) -> Formula {
    parse_formula(text, v).unwrap_or_else(|e| panic!("{text}: {e}"))
}

/// Random relations over `n` elements; every constant of `v` lands on a
/// random element of `0..n`.
pub fn random_structure(
    rng: &mut impl Rng,
    v: &Vocabulary,
    n: usize,
    name: &str,
    density: f64,
) -> Structure {
    let els = names(n);
    let mut b = Structure::builder(name, v.clone()).elements(&els);
    let rels: Vec<(Symbol, usize)> = v.relations().map(|(r, k)| (r.clone(), k)).collect();
    for (r, k) in rels {
        for t in restrule::structures::tuples(n, k) {
            if rng.gen_bool(density) {
                let args: Vec<&str> = t.iter().map(|&i| els[i].as_str()).collect();
                b = b.tuple(r.as_str(), &args);
            }
        }
    }
    for c in v.constants().to_vec() {
        b = b.constant(c.as_str(), &els[rng.gen_range(0..n)]);
    }
    b.build().expect("random structure")
}

pub fn is_rigid(a: &Structure) -> bool {
    pd(a).elements().len() == a.size()
}

/// Rejection-samples a structure whose every element is definable.
pub fn random_rigid(rng: &mut impl Rng, v: &Vocabulary, n: usize, name: &str) -> Structure {
    loop {
        let a = random_structure(rng, v, n, name, 0.4);
        if is_rigid(&a) {
            return a;
        }
    }
}

/// A rigid `B` of size `inner` marked by `U`, plus `outer` unmarked
/// elements joined to it at random. Returns the structure and Θ for `B`.
pub fn random_u_structure(
    rng: &mut impl Rng,
    inner: usize,
    outer: usize,
    name: &str,
) -> (Structure, ThetaSet) {
    let u = Symbol::new("U");
    loop {
        let b = random_rigid(rng, &plain_vocab(), inner, "B");
        let n = inner + outer;
        let els = names(n);
        let mut builder = Structure::builder(name, u_vocab()).elements(&els);
        for e in &els[..inner] {
            builder = builder.tuple("U", &[e]);
        }
        for (r, k) in [("R", 2usize), ("S", 2), ("P", 1)] {
            for t in restrule::structures::tuples(n, k) {
                let inside = t.iter().all(|&i| i < inner);
                let on = if inside {
                    b.holds(&Symbol::new(r), &t).unwrap_or(false)
                } else {
                    rng.gen_bool(0.4)
                };
                if on {
                    let args: Vec<&str> = t.iter().map(|&i| els[i].as_str()).collect();
                    builder = builder.tuple(r, &args);
                }
            }
        }
        let c = b.constant(&Symbol::new("c")).expect("c");
        let a = builder.constant("c", &els[c]).build().expect("u structure");
        let sub = a.induced(&u_part(&a, &u)).expect("closed");
        if !is_rigid(&sub) {
            continue;
        }
        let thetas = ThetaSet::new(
            sub.elements()
                .map(|e| defining_formula(&sub, e).expect("rigid"))
                .collect(),
        );
        return (a, thetas);
    }
}

pub fn thetas_of(a: &Structure) -> ThetaSet {
    ThetaSet::new(
        a.elements()
            .map(|e| defining_formula(a, e).expect("rigid"))
            .collect(),
    )
}

/// `a` expanded by fresh constants `k0..` naming every element, with the
/// vocabulary extended to match.
pub fn named(a: &Structure) -> (Structure, Vec<Term>) {
    let pairs: Vec<(Symbol, usize)> = a
        .elements()
        .map(|e| (Symbol::from(format!("k{e}")), e))
        .collect();
    let terms = pairs.iter().map(|(k, _)| Term::Const(k.clone())).collect();
    (a.with_constants(&pairs).expect("fresh names"), terms)
}

pub fn shuffled(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}
