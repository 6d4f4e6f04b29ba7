//! Propositional skeletons: atoms and quantified subformulas are treated as
//! opaque letters (identified up to alpha-equivalence).

use super::{canonical, Formula};
use std::collections::HashMap;

/// Default limit on the number of distinct letters for a truth-table check.
pub const DEFAULT_LETTER_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Prop {
    Letter(usize),
    Not(Box<Prop>),
    And(Vec<Prop>),
    Or(Vec<Prop>),
    Imp(Box<Prop>, Box<Prop>),
}

impl Prop {
    fn eval(&self, bits: u64) -> bool {
        match self {
            Prop::Letter(i) => bits >> i & 1 == 1,
            Prop::Not(p) => !p.eval(bits),
            Prop::And(ps) => ps.iter().all(|p| p.eval(bits)),
            Prop::Or(ps) => ps.iter().any(|p| p.eval(bits)),
            Prop::Imp(a, b) => !a.eval(bits) || b.eval(bits),
        }
    }
}

/// A formula compiled over its letters.
#[derive(Debug, Clone)]
pub struct Skeleton {
    letters: Vec<Formula>,
    root: Prop,
}

impl Skeleton {
    pub fn of(f: &Formula) -> Skeleton {
        Skeleton::of_all(std::slice::from_ref(f)).pop().unwrap()
    }

    /// Compiles several formulas over one shared letter table.
    pub fn of_all(fs: &[Formula]) -> Vec<Skeleton> {
        let mut index = HashMap::new();
        let mut letters = Vec::new();
        let roots: Vec<Prop> = fs
            .iter()
            .map(|f| compile(f, &mut index, &mut letters))
            .collect();
        roots
            .into_iter()
            .map(|root| Skeleton {
                letters: letters.clone(),
                root,
            })
            .collect()
    }

    /// Letters in canonical (alpha-normalized) form.
    pub fn letters(&self) -> &[Formula] {
        &self.letters
    }

    /// Evaluates under `bits`, where bit `i` is the value of letter `i`.
    pub fn eval(&self, bits: u64) -> bool {
        self.root.eval(bits)
    }

    /// `None` when the letter count exceeds `cap`.
    pub fn is_tautology_capped(&self, cap: usize) -> Option<bool> {
        let n = self.letters.len();
        if n > cap || n >= 63 {
            return None;
        }
        Some((0..1u64 << n).all(|bits| self.root.eval(bits)))
    }
}

fn compile(f: &Formula, index: &mut HashMap<Formula, usize>, letters: &mut Vec<Formula>) -> Prop {
    match f {
        Formula::Not(g) => Prop::Not(Box::new(compile(g, index, letters))),
        Formula::And(gs) => Prop::And(gs.iter().map(|g| compile(g, index, letters)).collect()),
        Formula::Or(gs) => Prop::Or(gs.iter().map(|g| compile(g, index, letters)).collect()),
        Formula::Imp(a, b) => Prop::Imp(
            Box::new(compile(a, index, letters)),
            Box::new(compile(b, index, letters)),
        ),
        _ => {
            let key = canonical(f);
            let next = letters.len();
            let i = *index.entry(key.clone()).or_insert_with(|| {
                letters.push(key);
                next
            });
            Prop::Letter(i)
        }
    }
}

pub fn is_tautology_capped(f: &Formula, cap: usize) -> Option<bool> {
    Skeleton::of(f).is_tautology_capped(cap)
}

/// Truth-table tautology check; false when there are too many letters.
pub fn is_tautology(f: &Formula) -> bool {
    is_tautology_capped(f, DEFAULT_LETTER_CAP).unwrap_or(false)
}

/// Whether the conjunction of `fs` is propositionally unsatisfiable.
pub fn is_contradictory(fs: &[Formula], cap: usize) -> Option<bool> {
    let sk = Skeleton::of_all(fs);
    let n = sk.first().map_or(0, |s| s.letters.len());
    if n > cap || n >= 63 {
        return None;
    }
    Some((0..1u64 << n).all(|bits| sk.iter().any(|s| !s.eval(bits))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, Vocabulary};

    fn f(s: &str) -> Formula {
        let v = Vocabulary::new()
            .with_relation("P", 1)
            .with_relation("Q", 1)
            .with_constant("c");
        parse_formula(s, &v).unwrap()
    }

    #[test]
    fn classical_tautologies() {
        assert!(is_tautology(&f("P(c) | ~P(c)")));
        assert!(is_tautology(&f("(P(c) -> Q(c)) -> (~Q(c) -> ~P(c))")));
        assert!(is_tautology(&f("P(c) -> ~~P(c)")));
        assert!(!is_tautology(&f("P(c) -> Q(c)")));
    }

    #[test]
    fn quantified_letters_match_up_to_renaming() {
        assert!(is_tautology(&f("(forall x . P(x)) -> forall y . P(y)")));
        assert!(!is_tautology(&f("(forall x . P(x)) -> exists y . P(y)")));
    }

    #[test]
    fn contradiction_detection() {
        assert_eq!(is_contradictory(&[f("P(c)"), f("~P(c)")], 8), Some(true));
        assert_eq!(is_contradictory(&[f("P(c)"), f("Q(c)")], 8), Some(false));
    }
}
