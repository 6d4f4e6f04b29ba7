use super::{DeductiveSystem, Restriction};
use crate::diagrams::Theory;
use crate::structures::tuples;
use crate::syntax::prop::is_tautology_capped;
use crate::syntax::uniqueness::uniqueness_normal_form;
use crate::syntax::{substitute, Formula, Substitution, Symbol, Term, Vocabulary};
use crate::universe::{restriction_premises, SentenceUniverse};
use std::collections::HashMap;

/// Letter limit for recognizing tautologies during saturation.
const TAUTOLOGY_LETTERS: usize = 10;

#[derive(Debug, Clone)]
struct Clause {
    premises: Vec<usize>,
    conclusion: usize,
}

/// Precomputed rule instances over one universe.
#[derive(Debug, Clone)]
pub struct Saturator {
    universe: SentenceUniverse,
    vocab: Vocabulary,
    negation: Vec<usize>,
    axioms: Vec<usize>,
    clauses: Vec<Clause>,
    watch: Vec<Vec<usize>>,
    restriction: Vec<Clause>,
}

impl Saturator {
    /// Prepares `universe` (extended with instances and restriction
    /// premises) and compiles the rules of `sys` over it.
    pub fn new(mut universe: SentenceUniverse, vocab: &Vocabulary, sys: &DeductiveSystem) -> Self {
        universe.extend_for(vocab, sys);
        let mut s = Saturator {
            negation: universe
                .iter()
                .map(|f| universe.id(&f.negated()).expect("closed under negation"))
                .collect(),
            universe,
            vocab: vocab.clone(),
            axioms: Vec::new(),
            clauses: Vec::new(),
            watch: Vec::new(),
            restriction: Vec::new(),
        };
        s.compile(sys);
        s
    }

    pub fn universe(&self) -> &SentenceUniverse {
        &self.universe
    }

    fn id(&self, f: &Formula) -> Option<usize> {
        self.universe.id(f)
    }

    fn rule(&mut self, premises: Vec<usize>, conclusion: usize) {
        if premises.is_empty() {
            self.axioms.push(conclusion);
        } else {
            self.clauses.push(Clause {
                premises,
                conclusion,
            });
        }
    }

    fn iff(&mut self, a: usize, b: usize) {
        if a != b {
            self.rule(vec![a], b);
            self.rule(vec![b], a);
            let (na, nb) = (self.negation[a], self.negation[b]);
            self.rule(vec![na], nb);
            self.rule(vec![nb], na);
        }
    }

    fn instance_terms(&self, sys: &DeductiveSystem) -> Vec<Term> {
        let mut terms: Vec<Term> = self
            .vocab
            .constants()
            .iter()
            .cloned()
            .map(Term::Const)
            .collect();
        if let Restriction::Terms(s) = &sys.restriction {
            for t in s {
                if !terms.contains(t) {
                    terms.push(t.clone());
                }
            }
        }
        terms
    }

    fn compile(&mut self, sys: &DeductiveSystem) {
        let terms = self.instance_terms(sys);
        let n = self.universe.len();
        let mut by_nf: HashMap<Formula, usize> = HashMap::new();
        for i in 0..n {
            let f = self.universe.get(i).unwrap().clone();
            self.compile_one(i, &f, &terms);
            let premises: Option<Vec<usize>> = restriction_premises(&f, sys)
                .iter()
                .map(|p| self.id(p))
                .collect();
            if let (Some(premises), true) = (premises, matches!(f, Formula::Forall(..))) {
                if sys.restriction != Restriction::None {
                    self.restriction.push(Clause {
                        premises,
                        conclusion: i,
                    });
                }
            }
            if !sys.thetas().is_empty() {
                let key = uniqueness_normal_form(&f, sys.thetas(), sys.guard());
                match by_nf.get(&key) {
                    Some(&j) => self.iff(i, j),
                    None => {
                        by_nf.insert(key, i);
                    }
                }
            }
        }
        self.compile_equality();
        self.watch = vec![Vec::new(); n];
        for (c, clause) in self.clauses.iter().enumerate() {
            for p in &clause.premises {
                self.watch[*p].push(c);
            }
        }
    }

    /// Substitution of equals in closed literals: from `a = b` and a
    /// literal mentioning `a`, the literal with some of those arguments
    /// replaced by `b`, when it lies in the universe.
    fn compile_equality(&mut self) {
        let n = self.universe.len();
        let eqs: Vec<(usize, Term, Term)> = (0..n)
            .filter_map(|i| match self.universe.get(i) {
                Some(Formula::Eq(a, b)) if a != b && a.is_closed() && b.is_closed() => {
                    Some((i, a.clone(), b.clone()))
                }
                _ => None,
            })
            .collect();
        if eqs.is_empty() {
            return;
        }
        for j in 0..n {
            let lit = self.universe.get(j).unwrap().clone();
            let args: Vec<Term> = match &lit {
                Formula::Atom(_, args) if lit.is_sentence() => args.clone(),
                Formula::Eq(a, b) if lit.is_sentence() => vec![a.clone(), b.clone()],
                _ => continue,
            };
            for (e, a, b) in &eqs {
                for (from, to) in [(a, b), (b, a)] {
                    let slots: Vec<usize> = (0..args.len()).filter(|k| &args[*k] == from).collect();
                    for mask in 1..1u32 << slots.len() {
                        let mut new = args.clone();
                        for (bit, k) in slots.iter().enumerate() {
                            if mask >> bit & 1 == 1 {
                                new[*k] = to.clone();
                            }
                        }
                        let image = match &lit {
                            Formula::Atom(r, _) => Formula::Atom(r.clone(), new),
                            _ => Formula::Eq(new[0].clone(), new[1].clone()),
                        };
                        if let Some(k) = self.id(&image) {
                            self.rule(vec![*e, j], k);
                            let (nj, nk) = (self.negation[j], self.negation[k]);
                            self.rule(vec![*e, nj], nk);
                        }
                    }
                }
            }
        }
    }

    fn compile_one(&mut self, i: usize, f: &Formula, terms: &[Term]) {
        let neg = self.negation[i];
        if !f.is_atomic() && is_tautology_capped(f, TAUTOLOGY_LETTERS) == Some(true) {
            self.rule(Vec::new(), i);
        }
        match f {
            Formula::Eq(a, b) if a == b => self.rule(Vec::new(), i),
            Formula::Atom(..) | Formula::Eq(..) => {}
            Formula::Not(g) => match &**g {
                Formula::Not(h) => {
                    let h_id = self.id(h).expect("closed under subsentences");
                    self.iff(i, h_id);
                }
                Formula::Imp(a, b) => {
                    let a_id = self.id(a).expect("closed under subsentences");
                    let b_id = self.id(b).expect("closed under subsentences");
                    self.rule(vec![i], a_id);
                    let nb = self.negation[b_id];
                    self.rule(vec![i], nb);
                    self.rule(vec![a_id, nb], i);
                }
                Formula::Forall(vs, body) => {
                    if let Some(d) = self.id(&Formula::exists(vs.clone(), body.negated())) {
                        self.iff(i, d);
                    }
                }
                Formula::Exists(vs, body) => {
                    if let Some(d) = self.id(&Formula::forall(vs.clone(), body.negated())) {
                        self.iff(i, d);
                    }
                }
                _ => {}
            },
            Formula::And(parts) => {
                let ids: Vec<usize> = parts
                    .iter()
                    .map(|p| self.id(p).expect("closed under subsentences"))
                    .collect();
                self.rule(ids.clone(), i);
                for (k, p) in ids.iter().enumerate() {
                    self.rule(vec![i], *p);
                    self.rule(vec![self.negation[*p]], neg);
                    let mut rest: Vec<usize> = ids
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != k)
                        .map(|(_, q)| *q)
                        .collect();
                    rest.push(neg);
                    self.rule(rest, self.negation[*p]);
                }
            }
            Formula::Or(parts) => {
                let ids: Vec<usize> = parts
                    .iter()
                    .map(|p| self.id(p).expect("closed under subsentences"))
                    .collect();
                let negs: Vec<usize> = ids.iter().map(|p| self.negation[*p]).collect();
                self.rule(negs.clone(), neg);
                for (k, p) in ids.iter().enumerate() {
                    self.rule(vec![*p], i);
                    self.rule(vec![neg], negs[k]);
                    let mut rest: Vec<usize> = negs
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != k)
                        .map(|(_, q)| *q)
                        .collect();
                    rest.push(i);
                    self.rule(rest, *p);
                }
            }
            Formula::Imp(a, b) => {
                let a_id = self.id(a).expect("closed under subsentences");
                let b_id = self.id(b).expect("closed under subsentences");
                self.rule(vec![a_id, i], b_id);
                self.rule(vec![self.negation[b_id], i], self.negation[a_id]);
                self.rule(vec![self.negation[a_id]], i);
                self.rule(vec![b_id], i);
                if is_instance_axiom(a, b, terms) {
                    self.rule(Vec::new(), i);
                }
            }
            Formula::Forall(vs, body) | Formula::Exists(vs, body) => {
                let universal = matches!(f, Formula::Forall(..));
                if body.is_sentence() {
                    let b_id = self.id(body).expect("closed under subsentences");
                    self.iff(i, b_id);
                }
                for t in instances(vs, body, terms) {
                    if let Some(t_id) = self.id(&t) {
                        if universal {
                            self.rule(vec![i], t_id);
                        } else {
                            self.rule(vec![t_id], i);
                        }
                    }
                }
                if !universal {
                    if let Some(point) = one_point(vs, body) {
                        if let Some(p) = self.id(&point) {
                            self.iff(i, p);
                        }
                    }
                }
            }
        }
    }

    /// The deductive closure of `facts`, in place. Inconsistent sets
    /// explode to the whole universe.
    fn close(&self, facts: &mut [bool]) {
        let mut remaining: Vec<usize> = self.clauses.iter().map(|c| c.premises.len()).collect();
        let mut queue: Vec<usize> = Vec::new();
        for &a in &self.axioms {
            facts[a] = true;
        }
        for (i, f) in facts.iter().enumerate() {
            if *f {
                queue.push(i);
            }
        }
        let mut seen = vec![false; facts.len()];
        while let Some(i) = queue.pop() {
            if seen[i] {
                continue;
            }
            seen[i] = true;
            if facts[self.negation[i]] {
                facts.iter_mut().for_each(|f| *f = true);
                return;
            }
            for &c in &self.watch[i] {
                remaining[c] -= 1;
                if remaining[c] == 0 {
                    let k = self.clauses[c].conclusion;
                    if !facts[k] {
                        facts[k] = true;
                        queue.push(k);
                    }
                }
            }
        }
    }

    /// Facts for the members of `theory` (after adding them to the
    /// universe at construction).
    pub fn seed(&self, theory: &Theory) -> Vec<bool> {
        let mut facts = vec![false; self.universe.len()];
        for s in theory {
            if let Some(i) = self.id(s) {
                facts[i] = true;
            }
        }
        facts
    }

    /// Stages `T_0 ⊆ T_1 ⊆ ...` up to `steps` restriction layers, or to
    /// the fixpoint when `steps` is `None`.
    pub fn run(&self, mut facts: Vec<bool>, steps: Option<usize>) -> Tower {
        self.close(&mut facts);
        let mut stages = vec![facts];
        let mut fixpoint = false;
        while steps.is_none_or(|s| stages.len() <= s) {
            let last = stages.last().unwrap();
            let mut next = last.clone();
            let mut grew = false;
            for c in &self.restriction {
                if !next[c.conclusion] && c.premises.iter().all(|p| last[*p]) {
                    next[c.conclusion] = true;
                    grew = true;
                }
            }
            if !grew {
                fixpoint = true;
                break;
            }
            self.close(&mut next);
            stages.push(next);
        }
        Tower {
            universe: self.universe.clone(),
            vocab: self.vocab.clone(),
            negation: self.negation.clone(),
            stages,
            fixpoint,
        }
    }
}

fn instances(vars: &[Symbol], body: &Formula, terms: &[Term]) -> Vec<Formula> {
    tuples(terms.len(), vars.len())
        .map(|idx| {
            let map: Substitution = vars
                .iter()
                .cloned()
                .zip(idx.iter().map(|i| terms[*i].clone()))
                .collect();
            substitute(body, &map)
        })
        .collect()
}

/// `forall x̄ φ -> φ(t̄)` or `φ(t̄) -> exists x̄ φ`.
fn is_instance_axiom(a: &Formula, b: &Formula, terms: &[Term]) -> bool {
    let hit = |vars: &[Symbol], body: &Formula, other: &Formula| {
        let key = crate::syntax::canonical(other);
        instances(vars, body, terms)
            .iter()
            .any(|i| crate::syntax::canonical(i) == key)
    };
    match (a, b) {
        (Formula::Forall(vs, body), _) if hit(vs, body, b) => true,
        (_, Formula::Exists(vs, body)) => hit(vs, body, a),
        _ => false,
    }
}

/// `exists x̄ And[φ; x0 = t0; ...]` with closed `t̄` is `φ(t̄)`.
fn one_point(vars: &[Symbol], body: &Formula) -> Option<Formula> {
    let Formula::And(parts) = body else {
        return None;
    };
    if parts.len() != vars.len() + 1 {
        return None;
    }
    let mut map = Substitution::new();
    for (x, p) in vars.iter().zip(&parts[1..]) {
        match p {
            Formula::Eq(Term::Var(v), t) if v == x && t.is_closed() => {
                map.insert(x.clone(), t.clone());
            }
            _ => return None,
        }
    }
    Some(substitute(&parts[0], &map))
}

/// The stages of a saturation.
#[derive(Debug, Clone)]
pub struct Tower {
    universe: SentenceUniverse,
    vocab: Vocabulary,
    negation: Vec<usize>,
    stages: Vec<Vec<bool>>,
    fixpoint: bool,
}

impl Tower {
    pub fn universe(&self) -> &SentenceUniverse {
        &self.universe
    }

    /// Number of stages computed, `T_0` included.
    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn reached_fixpoint(&self) -> bool {
        self.fixpoint
    }

    /// Stage `k`, clamped to the last one computed.
    pub fn stage(&self, k: usize) -> Saturation<'_> {
        let k = k.min(self.stages.len() - 1);
        Saturation {
            universe: &self.universe,
            negation: &self.negation,
            facts: &self.stages[k],
        }
    }

    pub fn last(&self) -> Saturation<'_> {
        self.stage(self.stages.len() - 1)
    }

    pub fn theory(&self, k: usize) -> Theory {
        let mut t = Theory::new(&format!("T_{k}"), self.vocab.clone());
        t.extend(self.stage(k).members().cloned());
        t
    }
}

/// One deductively closed subset of a universe.
#[derive(Debug, Clone, Copy)]
pub struct Saturation<'a> {
    universe: &'a SentenceUniverse,
    negation: &'a [usize],
    facts: &'a [bool],
}

impl<'a> Saturation<'a> {
    pub fn contains(&self, f: &Formula) -> bool {
        self.universe.id(f).is_some_and(|i| self.facts[i])
    }

    pub fn len(&self) -> usize {
        self.facts.iter().filter(|f| **f).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn members(&self) -> impl Iterator<Item = &'a Formula> + 'a {
        let facts = self.facts;
        self.universe
            .iter()
            .enumerate()
            .filter(move |(i, _)| facts[*i])
            .map(|(_, f)| f)
    }

    pub fn is_subset(&self, other: &Saturation<'_>) -> bool {
        self.members().all(|f| other.contains(f))
    }

    /// No sentence together with its negation.
    pub fn is_consistent(&self) -> bool {
        (0..self.facts.len()).all(|i| !(self.facts[i] && self.facts[self.negation[i]]))
    }

    /// Every universe sentence or its negation.
    pub fn is_complete(&self) -> bool {
        (0..self.facts.len()).all(|i| self.facts[i] || self.facts[self.negation[i]])
    }

    /// Universals `forall x̄ φ` (the first `n` variables peeled) whose
    /// instances over `terms` are all present, paired with the sentence.
    fn witnessed(&self, terms: &[Term], n: usize) -> Vec<&'a Formula> {
        let mut out = Vec::new();
        for (i, f) in self.universe.iter().enumerate() {
            let Some((vars, body)) = peel(f, n) else {
                continue;
            };
            let all = instances(&vars, &body, terms)
                .iter()
                .all(|t| self.contains(t));
            if all {
                out.push(&self.universe.sentences()[i]);
            }
        }
        out
    }

    /// No `φ(x̄)` with every `φ(t̄)` present and `~forall x̄ φ` present.
    pub fn is_s_consistent(&self, terms: &[Term], n: usize) -> bool {
        self.witnessed(terms, n)
            .into_iter()
            .all(|f| !self.contains(&Formula::not(f.clone())))
    }

    /// Every `forall x̄ φ` whose instances are all present is present.
    pub fn is_s_complete(&self, terms: &[Term], n: usize) -> bool {
        self.witnessed(terms, n)
            .into_iter()
            .all(|f| self.contains(f))
    }
}

/// Splits off the first `n` universally quantified variables, across
/// nested blocks.
fn peel(f: &Formula, n: usize) -> Option<(Vec<Symbol>, Formula)> {
    let mut vars = Vec::new();
    let mut cur = f;
    while vars.len() < n {
        let Formula::Forall(vs, body) = cur else {
            return None;
        };
        if vars.len() + vs.len() > n {
            let (now, later) = vs.split_at(n - vars.len());
            vars.extend(now.iter().cloned());
            return Some((vars, Formula::forall(later.to_vec(), (**body).clone())));
        }
        vars.extend(vs.iter().cloned());
        cur = body;
    }
    (n > 0).then(|| (vars, cur.clone()))
}

/// `saturate(T, U, sys, steps)`: the universe is extended with `T`, the
/// instances over the constants and the restriction premises first.
pub fn saturate(
    theory: &Theory,
    universe: &SentenceUniverse,
    sys: &DeductiveSystem,
    steps: Option<usize>,
) -> Tower {
    let mut u = universe.clone();
    for s in theory {
        u.insert(s.clone());
    }
    let sat = Saturator::new(u, theory.vocab(), sys);
    let seed = sat.seed(theory);
    sat.run(seed, steps)
}

/// Consistency, completeness and their S-variants of the classical
/// closure of a theory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosureProperties {
    pub consistent: bool,
    pub complete: bool,
    pub s_consistent: bool,
    pub s_complete: bool,
}

impl ClosureProperties {
    /// (i) S-consistent ⇒ consistent.
    pub fn item_i(&self) -> bool {
        !self.s_consistent || self.consistent
    }

    /// (ii) S-consistent ∧ complete ⇒ S-complete.
    pub fn item_ii(&self) -> bool {
        !(self.s_consistent && self.complete) || self.s_complete
    }

    /// (iii) consistent ∧ S-complete ⇒ S-consistent.
    pub fn item_iii(&self) -> bool {
        !(self.consistent && self.s_complete) || self.s_consistent
    }
}

/// The bounded definitions with `⊢` read as membership in the classical
/// closure of `theory` inside `universe`, for blocks of `n` variables.
pub fn closure_properties(
    theory: &Theory,
    universe: &SentenceUniverse,
    terms: &[Term],
    n: usize,
) -> ClosureProperties {
    let mut u = universe.clone();
    for s in theory {
        u.insert(s.clone());
    }
    u.close_with_instances(terms);
    let tower = saturate(theory, &u, &DeductiveSystem::classical(), Some(0));
    let s = tower.stage(0);
    ClosureProperties {
        consistent: s.is_consistent(),
        complete: s.is_complete(),
        s_consistent: s.is_s_consistent(terms, n),
        s_complete: s.is_s_complete(terms, n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::diagram;
    use crate::structures::Structure;
    use crate::syntax::parse_formula;
    use crate::universe::GenOptions;

    fn two() -> Structure {
        let v = Vocabulary::new()
            .with_relation("<", 2)
            .with_constant("c_a")
            .with_constant("c_b");
        Structure::builder("A2", v)
            .elements(["a", "b"])
            .tuple("<", &["a", "b"])
            .constant("c_a", "a")
            .constant("c_b", "b")
            .build()
            .unwrap()
    }

    fn terms() -> Vec<Term> {
        vec![Term::constant("c_a"), Term::constant("c_b")]
    }

    #[test]
    fn s_rule_fixpoint_contains_irreflexivity() {
        let a = two();
        let dg = diagram(&a).unwrap();
        let goal = parse_formula("forall x . ~(x < x)", a.vocab()).unwrap();
        let mut u = SentenceUniverse::generate(a.vocab(), 2, &GenOptions::default());
        u.insert(goal.clone());
        let tower = saturate(&dg, &u, &DeductiveSystem::s_rule(terms()), None);
        assert!(tower.reached_fixpoint());
        assert!(tower.last().contains(&goal));
        assert!(!tower.stage(0).contains(&goal));
        for f in tower.last().members() {
            assert!(a.eval_sentence(f).unwrap(), "{f}");
        }
        for k in 1..tower.len() {
            assert!(tower.stage(k - 1).is_subset(&tower.stage(k)));
        }
    }

    #[test]
    fn one_constant_makes_a_two_element_theory_inconsistent() {
        let v = Vocabulary::new().with_constant("c");
        let t = Theory::from_sentences(
            "T",
            v.clone(),
            [parse_formula("exists x . exists y . ~(x = y)", &v).unwrap()],
        );
        let u =
            SentenceUniverse::from_sentences([
                parse_formula("forall x . forall y . x = y", &v).unwrap()
            ]);
        let c = vec![Term::constant("c")];
        let classical = saturate(&t, &u, &DeductiveSystem::classical(), None);
        assert!(classical.last().is_consistent());
        let with_rule = saturate(&t, &u, &DeductiveSystem::s_rule(c.clone()), None);
        assert!(!with_rule.last().is_consistent());
        assert!(closure_properties(&t, &u, &c, 1).item_i());
    }

    #[test]
    fn equals_substitute_in_literals() {
        let v = Vocabulary::new()
            .with_relation("R", 2)
            .with_constant("c")
            .with_constant("d");
        let f = |s: &str| parse_formula(s, &v).unwrap();
        let t = Theory::from_sentences("T", v.clone(), [f("c = d"), f("R(c, d)"), f("~R(d, c)")]);
        let u = SentenceUniverse::from_sentences([
            f("R(d, d)"),
            f("R(c, c)"),
            f("d = c"),
            f("R(d, c)"),
        ]);
        let tower = saturate(&t, &u, &DeductiveSystem::classical(), None);
        for goal in ["R(d, d)", "R(c, c)", "d = c"] {
            assert!(tower.last().contains(&f(goal)), "{goal}");
        }
        assert!(!tower.last().is_consistent());
    }

    #[test]
    fn peeling_blocks() {
        let v = Vocabulary::new().with_relation("<", 2);
        let f = parse_formula("forall x y . x < y", &v).unwrap();
        assert_eq!(
            peel(&f, 1).unwrap().1,
            parse_formula("forall y . x < y", &v).unwrap()
        );
        assert_eq!(peel(&f, 2).unwrap().0.len(), 2);
        assert!(peel(&f, 3).is_none());
    }
}
