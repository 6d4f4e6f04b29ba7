//! Finite sentence universes: the ambient sets inside which saturation and
//! the completeness checks run.

use crate::deduction::{DeductiveSystem, Restriction};
use crate::structures::tuples;
use crate::syntax::relativize::strip_guarded_imp;
use crate::syntax::{canonical, substitute, Formula, Substitution, Symbol, Term, Vocabulary};
use std::collections::{BTreeSet, HashMap};

/// Knobs for [`SentenceUniverse::generate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenOptions {
    /// Variables available to the generator.
    pub vars: Vec<Symbol>,
    /// How many formulas of each level take part in binary connectives.
    pub binary_pool: usize,
    /// Formulas kept per level, sampled evenly from the sorted level.
    pub max_per_level: usize,
    /// Sentences kept before closing, sampled evenly.
    pub max_sentences: usize,
    /// Relations left out of the atoms (e.g. a relativization predicate).
    pub skip_relations: Vec<Symbol>,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            vars: vec![Symbol::new("x"), Symbol::new("y")],
            binary_pool: 16,
            max_per_level: 4000,
            max_sentences: 2000,
            skip_relations: Vec::new(),
        }
    }
}

/// A finite set of sentences closed under subsentences and negation
/// (`negated`, so `~~φ` never arises from `~φ`). Ids follow insertion order.
#[derive(Debug, Clone, Default)]
pub struct SentenceUniverse {
    sentences: Vec<Formula>,
    index: HashMap<Formula, usize>,
}

impl SentenceUniverse {
    pub fn new() -> Self {
        Self::default()
    }

    /// The closure of `sentences`.
    pub fn from_sentences<I: IntoIterator<Item = Formula>>(sentences: I) -> Self {
        let mut u = Self::new();
        for s in sentences {
            u.insert(s);
        }
        u
    }

    /// Sentences of depth at most `depth` built from the atoms of `vocab`,
    /// sorted by depth and then by printed form, then closed.
    pub fn generate(vocab: &Vocabulary, depth: usize, opts: &GenOptions) -> Self {
        let mut levels: Vec<Vec<Formula>> =
            vec![sample(dedupe(atoms(vocab, opts)), opts.max_per_level)];
        for d in 1..=depth {
            let prev = &levels[d - 1];
            let mut next = Vec::new();
            for f in prev {
                if !matches!(f, Formula::Not(_)) {
                    next.push(Formula::not(f.clone()));
                }
                for v in f.free_vars_ordered() {
                    next.push(Formula::forall(vec![v.clone()], f.clone()));
                    next.push(Formula::exists(vec![v], f.clone()));
                }
            }
            let left = sample(prev.clone(), opts.binary_pool);
            let lower: Vec<Formula> = levels
                .iter()
                .flat_map(|l| sample(l.clone(), opts.binary_pool))
                .collect();
            for a in &left {
                for b in &lower {
                    if a == b {
                        continue;
                    }
                    let same_level = b.depth() == a.depth();
                    if !(same_level && b.to_string() < a.to_string()) {
                        next.push(Formula::and2(a.clone(), b.clone()));
                        next.push(Formula::or2(a.clone(), b.clone()));
                    }
                    next.push(Formula::imp(a.clone(), b.clone()));
                    if !same_level {
                        next.push(Formula::imp(b.clone(), a.clone()));
                    }
                }
            }
            levels.push(sample(dedupe(next), opts.max_per_level));
        }
        let mut sentences: Vec<Formula> = levels
            .into_iter()
            .flatten()
            .filter(Formula::is_sentence)
            .collect();
        sentences = sample(dedupe(sentences), opts.max_sentences);
        sentences.sort_by_cached_key(|f| (f.depth(), f.to_string()));
        Self::from_sentences(sentences)
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn sentences(&self) -> &[Formula] {
        &self.sentences
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Formula> {
        self.sentences.iter()
    }

    pub fn get(&self, id: usize) -> Option<&Formula> {
        self.sentences.get(id)
    }

    /// Id of a sentence, up to alpha-equivalence.
    pub fn id(&self, f: &Formula) -> Option<usize> {
        self.index.get(&canonical(f)).copied()
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.id(f).is_some()
    }

    /// Inserts a sentence and its closure; returns its id.
    pub fn insert(&mut self, f: Formula) -> usize {
        let start = self.len();
        let id = self.add_one(f);
        self.close_from(start, &[]);
        id
    }

    fn add_one(&mut self, f: Formula) -> usize {
        let key = canonical(&f);
        if let Some(i) = self.index.get(&key) {
            return *i;
        }
        let id = self.sentences.len();
        self.index.insert(key, id);
        self.sentences.push(f);
        id
    }

    fn close_from(&mut self, mut i: usize, terms: &[Term]) {
        while i < self.sentences.len() {
            let f = self.sentences[i].clone();
            self.add_one(f.negated());
            for g in immediate_subsentences(&f) {
                self.add_one(g);
            }
            if !terms.is_empty() {
                for g in instances_and_duals(&f, terms) {
                    self.add_one(g);
                }
            }
            i += 1;
        }
    }

    /// Closes further under instances of quantified sentences over
    /// `terms` and under the quantifier dualities
    /// `exists x̄ φ / forall x̄ ~φ`.
    pub fn close_with_instances(&mut self, terms: &[Term]) {
        self.close_from(0, terms);
    }

    /// Prepares the universe for saturation in `sys`: instances over the
    /// constants of `vocab` and the restriction terms, then the premises of
    /// every restriction-rule application with a conclusion in the
    /// universe (with their negations).
    pub fn extend_for(&mut self, vocab: &Vocabulary, sys: &DeductiveSystem) {
        let mut terms: Vec<Term> = vocab.constants().iter().cloned().map(Term::Const).collect();
        if let Restriction::Terms(s) = &sys.restriction {
            for t in s {
                if !terms.contains(t) {
                    terms.push(t.clone());
                }
            }
        }
        self.close_with_instances(&terms);
        let n = self.len();
        for i in 0..n {
            let f = self.sentences[i].clone();
            for p in restriction_premises(&f, sys) {
                let neg = p.negated();
                self.add_one(p);
                self.add_one(neg);
            }
        }
    }
}

/// Premises for concluding `f` by the restriction rule of `sys`, when `f`
/// has the right shape.
pub fn restriction_premises(f: &Formula, sys: &DeductiveSystem) -> Vec<Formula> {
    let Formula::Forall(vars, body) = f else {
        return Vec::new();
    };
    match (&sys.restriction, sys.guard()) {
        (Restriction::None, _) => Vec::new(),
        (Restriction::Theta { .. }, Some(u)) => match strip_guarded_imp(body, vars, u) {
            Some(inner) => guarded_premises(vars, inner, sys, u),
            None => Vec::new(),
        },
        (r, _) => r.premises(vars, body),
    }
}

/// `exists ȳ And[U(ȳ); And[B; θ^U(ȳ)]]` for a body `B` already relativized.
fn guarded_premises(
    vars: &[Symbol],
    inner: &Formula,
    sys: &DeductiveSystem,
    u: &Symbol,
) -> Vec<Formula> {
    let thetas = sys.thetas();
    tuples(thetas.len(), vars.len())
        .map(|idx| {
            let mut parts = vec![inner.clone()];
            parts.extend(
                vars.iter()
                    .zip(&idx)
                    .map(|(x, i)| crate::syntax::relativize(&thetas[*i].apply_var(x), u)),
            );
            Formula::exists(
                vars.to_vec(),
                crate::syntax::relativize::guarded_and(vars, u, Formula::And(parts)),
            )
        })
        .collect()
}

fn immediate_subsentences(f: &Formula) -> Vec<Formula> {
    let direct: Vec<&Formula> = match f {
        Formula::Not(g) => vec![g],
        Formula::And(gs) | Formula::Or(gs) => gs.iter().collect(),
        Formula::Imp(a, b) => vec![a, b],
        Formula::Forall(_, g) | Formula::Exists(_, g) => vec![g],
        _ => Vec::new(),
    };
    direct
        .into_iter()
        .filter(|g| g.is_sentence())
        .cloned()
        .collect()
}

fn instances_and_duals(f: &Formula, terms: &[Term]) -> Vec<Formula> {
    let (vars, body, universal) = match f {
        Formula::Forall(vs, g) => (vs, g, true),
        Formula::Exists(vs, g) => (vs, g, false),
        _ => return Vec::new(),
    };
    let mut out: Vec<Formula> = tuples(terms.len(), vars.len())
        .map(|idx| {
            let map: Substitution = vars
                .iter()
                .cloned()
                .zip(idx.iter().map(|i| terms[*i].clone()))
                .collect();
            substitute(body, &map)
        })
        .collect();
    let dual_body = body.negated();
    out.push(if universal {
        Formula::exists(vars.clone(), dual_body)
    } else {
        Formula::forall(vars.clone(), dual_body)
    });
    out
}

fn atoms(vocab: &Vocabulary, opts: &GenOptions) -> Vec<Formula> {
    let mut terms: Vec<Term> = opts.vars.iter().cloned().map(Term::Var).collect();
    terms.extend(vocab.constants().iter().cloned().map(Term::Const));
    let pick = |idx: &[usize]| -> Vec<Term> { idx.iter().map(|i| terms[*i].clone()).collect() };
    let mut out = Vec::new();
    for (r, k) in vocab.relations() {
        if opts.skip_relations.contains(r) {
            continue;
        }
        for idx in tuples(terms.len(), k) {
            out.push(Formula::Atom(r.clone(), pick(&idx)));
        }
    }
    for i in 0..terms.len() {
        for j in i..terms.len() {
            out.push(Formula::Eq(terms[i].clone(), terms[j].clone()));
        }
    }
    for (g, k) in vocab.functions() {
        for idx in tuples(terms.len(), k + 1) {
            out.push(Formula::Eq(
                Term::App(g.clone(), pick(&idx[..k])),
                terms[idx[k]].clone(),
            ));
        }
    }
    out
}

fn dedupe(fs: Vec<Formula>) -> Vec<Formula> {
    let mut seen = BTreeSet::new();
    let mut out: Vec<(String, Formula)> = Vec::new();
    for f in fs {
        if seen.insert(canonical(&f)) {
            out.push((f.to_string(), f));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out.into_iter().map(|(_, f)| f).collect()
}

/// At most `n` items, evenly spaced through `fs`.
fn sample(fs: Vec<Formula>, n: usize) -> Vec<Formula> {
    if fs.len() <= n {
        return fs;
    }
    let len = fs.len();
    fs.into_iter()
        .enumerate()
        .filter(|(i, _)| (i * n) % len < n)
        .map(|(_, f)| f)
        .take(n)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn vocab() -> Vocabulary {
        Vocabulary::new()
            .with_relation("<", 2)
            .with_relation("P", 1)
            .with_constant("c")
    }

    #[test]
    fn closed_under_negation_and_subsentences() {
        let u = SentenceUniverse::generate(&vocab(), 2, &GenOptions::default());
        assert!(!u.is_empty());
        for f in u.iter() {
            assert!(f.is_sentence());
            assert!(f.depth() <= 3);
            assert!(u.contains(&f.negated()), "{f}");
            for g in immediate_subsentences(f) {
                assert!(u.contains(&g));
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = SentenceUniverse::generate(&vocab(), 3, &GenOptions::default());
        let b = SentenceUniverse::generate(&vocab(), 3, &GenOptions::default());
        assert_eq!(a.sentences(), b.sentences());
    }

    #[test]
    fn instances_and_duals_are_added() {
        let v = vocab();
        let mut u =
            SentenceUniverse::from_sentences([
                parse_formula("forall x . exists y . x < y", &v).unwrap()
            ]);
        u.close_with_instances(&[Term::constant("c")]);
        for s in [
            "exists y . c < y",
            "c < c",
            "exists x . ~exists y . x < y",
            "forall y . ~(c < y)",
        ] {
            assert!(u.contains(&parse_formula(s, &v).unwrap()), "{s}");
        }
    }

    #[test]
    fn s_rule_premises_join_the_universe() {
        let v = vocab().with_constant("d");
        let mut u =
            SentenceUniverse::from_sentences([parse_formula("forall x . P(x)", &v).unwrap()]);
        u.extend_for(
            &v,
            &DeductiveSystem::s_rule(vec![Term::constant("c"), Term::constant("d")]),
        );
        assert!(u.contains(&parse_formula("P(d)", &v).unwrap()));
        assert!(u.contains(&parse_formula("~P(d)", &v).unwrap()));
    }
}
