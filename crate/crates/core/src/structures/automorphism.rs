use super::{tuples, Elem, Structure, Table};
use crate::syntax::uniqueness::Theta;
use crate::syntax::{Formula, Symbol, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DefinabilityError {
    #[error("element `{0}` is not definable without parameters")]
    NotDefinable(String),
    #[error("no element `{0}`")]
    NoSuchElement(usize),
}

/// The pointwise definable part of a structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DefinablePart {
    /// No element is definable.
    EmptyPart,
    Part {
        elements: Vec<Elem>,
        /// The induced substructure, present when `elements` is closed
        /// under the functions.
        substructure: Option<Box<Structure>>,
    },
}

impl DefinablePart {
    pub fn elements(&self) -> &[Elem] {
        match self {
            DefinablePart::EmptyPart => &[],
            DefinablePart::Part { elements, .. } => elements,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, DefinablePart::EmptyPart)
    }
}

enum Check<'a> {
    Rel(&'a Table<bool>, Vec<Elem>),
    Fun(&'a Table<Elem>, Vec<Elem>, Elem),
}

struct Search<'a> {
    a: &'a Structure,
    /// `levels[i]`: consistency checks that become decidable once elements
    /// `0..=i` have images.
    levels: Vec<Vec<Check<'a>>>,
    candidates: Vec<Vec<Elem>>,
}

impl<'a> Search<'a> {
    fn new(a: &'a Structure) -> Self {
        let n = a.size();
        let mut levels: Vec<Vec<Check>> = (0..n).map(|_| Vec::new()).collect();
        for t in a.relations.values() {
            for args in tuples(n, t.arity) {
                let lvl = args.iter().copied().max().unwrap_or(0);
                levels[lvl].push(Check::Rel(t, args));
            }
        }
        for t in a.functions.values() {
            for args in tuples(n, t.arity) {
                let v = t.cells[t.index(n, &args)];
                let lvl = args.iter().copied().max().unwrap_or(0).max(v);
                levels[lvl].push(Check::Fun(t, args, v));
            }
        }
        let sig: Vec<Vec<usize>> = (0..n).map(|e| signature(a, e)).collect();
        let candidates = (0..n)
            .map(|e| (0..n).filter(|f| sig[*f] == sig[e]).collect())
            .collect();
        Search {
            a,
            levels,
            candidates,
        }
    }

    fn consistent(&self, level: usize, perm: &[Elem]) -> bool {
        let n = self.a.size();
        let img = |args: &[Elem]| -> Vec<Elem> { args.iter().map(|x| perm[*x]).collect() };
        self.levels[level].iter().all(|c| match c {
            Check::Rel(t, args) => t.cells[t.index(n, args)] == t.cells[t.index(n, &img(args))],
            Check::Fun(t, args, v) => t.cells[t.index(n, &img(args))] == perm[*v],
        })
    }

    /// Depth-first enumeration in lexicographic order; `visit` returns
    /// false to stop.
    fn run(&self, fixed: &[Option<Elem>], visit: &mut dyn FnMut(&[Elem]) -> bool) {
        let n = self.a.size();
        let mut perm = vec![0; n];
        let mut used = vec![false; n];
        self.dfs(0, fixed, &mut perm, &mut used, visit);
    }

    fn dfs(
        &self,
        i: usize,
        fixed: &[Option<Elem>],
        perm: &mut Vec<Elem>,
        used: &mut Vec<bool>,
        visit: &mut dyn FnMut(&[Elem]) -> bool,
    ) -> bool {
        if i == perm.len() {
            return visit(perm);
        }
        for &c in &self.candidates[i] {
            if used[c] || fixed[i].is_some_and(|f| f != c) {
                continue;
            }
            perm[i] = c;
            used[c] = true;
            let go_on = !self.consistent(i, perm) || self.dfs(i + 1, fixed, perm, used, visit);
            used[c] = false;
            if !go_on {
                return false;
            }
        }
        true
    }
}

/// Isomorphism-invariant data about a single element.
fn signature(a: &Structure, e: Elem) -> Vec<usize> {
    let n = a.size();
    let mut sig = Vec::new();
    for (c, x) in &a.constants {
        if *x == e {
            sig.push(c.as_str().len());
            sig.push(usize::MAX);
        }
    }
    for t in a.relations.values() {
        for pos in 0..t.arity {
            let count = tuples(n, t.arity)
                .filter(|args| args[pos] == e && t.cells[t.index(n, args)])
                .count();
            sig.push(count);
        }
        sig.push(t.cells[t.index(n, &vec![e; t.arity])] as usize);
    }
    for t in a.functions.values() {
        sig.push(t.cells.iter().filter(|v| **v == e).count());
        sig.push((t.cells[t.index(n, &vec![e; t.arity])] == e) as usize);
    }
    sig
}

/// All automorphisms as image vectors, identity first.
pub fn automorphisms(a: &Structure) -> Vec<Vec<Elem>> {
    let search = Search::new(a);
    let mut out = Vec::new();
    search.run(&vec![None; a.size()], &mut |p| {
        out.push(p.to_vec());
        true
    });
    out
}

/// Elements fixed by every automorphism.
fn fixed_points(a: &Structure) -> Vec<Elem> {
    let n = a.size();
    let search = Search::new(a);
    let mut moved = vec![false; n];
    for e in 0..n {
        if moved[e] {
            continue;
        }
        for &target in &search.candidates[e] {
            if target == e || moved[e] {
                continue;
            }
            let mut fixed = vec![None; n];
            fixed[e] = Some(target);
            search.run(&fixed, &mut |p| {
                for (x, y) in p.iter().enumerate() {
                    if x != *y {
                        moved[x] = true;
                    }
                }
                false
            });
        }
    }
    (0..n).filter(|e| !moved[*e]).collect()
}

/// The elements lying in singleton orbits, with the induced substructure
/// when they are closed under the functions.
pub fn pd(a: &Structure) -> DefinablePart {
    let elements = fixed_points(a);
    if elements.is_empty() {
        return DefinablePart::EmptyPart;
    }
    let substructure = a.induced(&elements).map(Box::new);
    DefinablePart::Part {
        elements,
        substructure,
    }
}

fn atoms_over(a: &Structure, terms: &[Term]) -> Vec<Formula> {
    let mut out = Vec::new();
    for (r, k) in a.vocab().relations() {
        if k > 3 {
            continue;
        }
        for idx in tuples(terms.len(), k) {
            out.push(Formula::Atom(
                r.clone(),
                idx.iter().map(|i| terms[*i].clone()).collect(),
            ));
        }
    }
    for i in 0..terms.len() {
        for j in i + 1..terms.len() {
            out.push(Formula::Eq(terms[i].clone(), terms[j].clone()));
        }
    }
    out
}

fn with_negations(atoms: Vec<Formula>) -> Vec<Formula> {
    atoms
        .into_iter()
        .flat_map(|f| [f.clone(), Formula::not(f)])
        .collect()
}

/// Small one-variable templates, tried in order.
fn templates(a: &Structure) -> Vec<Formula> {
    let x = Symbol::new("x");
    let y = Symbol::new("y");
    let consts: Vec<Term> = a
        .vocab()
        .constants()
        .iter()
        .cloned()
        .map(Term::Const)
        .collect();
    let mut t0 = vec![Term::Var(x.clone())];
    t0.extend(consts.iter().cloned());
    let level0 = with_negations(
        atoms_over(a, &t0)
            .into_iter()
            .filter(|f| f.has_free(&x))
            .collect(),
    );
    let mut t1 = t0.clone();
    t1.push(Term::Var(y.clone()));
    let lits1 = with_negations(
        atoms_over(a, &t1)
            .into_iter()
            .filter(|f| f.has_free(&y))
            .collect(),
    );
    let mut level1 = Vec::new();
    for universal in [true, false] {
        for lit in &lits1 {
            let q = if universal {
                Formula::forall(vec![y.clone()], lit.clone())
            } else {
                Formula::exists(vec![y.clone()], lit.clone())
            };
            if q.has_free(&x) {
                level1.push(q);
            }
        }
    }
    let mut out = level0;
    out.extend(level1);
    let singles = out.len();
    for i in 0..singles {
        for j in i + 1..singles {
            out.push(Formula::and2(out[i].clone(), out[j].clone()));
        }
    }
    out
}

/// Describes the structure up to isomorphism from the point of view of
/// `target`; its satisfiers are exactly the orbit of `target`.
fn characteristic(a: &Structure, target: Elem) -> Formula {
    let n = a.size();
    let mut order = vec![target];
    order.extend((0..n).filter(|e| *e != target));
    let mut level_of = vec![0; n];
    for (lvl, e) in order.iter().enumerate() {
        level_of[*e] = lvl;
    }
    let var = |e: Elem| -> Term {
        if level_of[e] == 0 {
            Term::var("x")
        } else {
            Term::Var(Symbol::from(format!("y{}", level_of[e])))
        }
    };
    let mut lits: Vec<Vec<Formula>> = vec![Vec::new(); n];
    for j in 1..n {
        for i in 0..j {
            lits[j].push(Formula::not(Formula::Eq(var(order[i]), var(order[j]))));
        }
    }
    for (r, t) in &a.relations {
        for args in tuples(n, t.arity) {
            let lvl = args.iter().map(|e| level_of[*e]).max().unwrap_or(0);
            let atom = Formula::Atom(r.clone(), args.iter().map(|e| var(*e)).collect());
            lits[lvl].push(if t.cells[t.index(n, &args)] {
                atom
            } else {
                Formula::not(atom)
            });
        }
    }
    for (g, t) in &a.functions {
        for args in tuples(n, t.arity) {
            let v = t.cells[t.index(n, &args)];
            let lvl = args
                .iter()
                .map(|e| level_of[*e])
                .max()
                .unwrap_or(0)
                .max(level_of[v]);
            lits[lvl].push(Formula::Eq(
                Term::App(g.clone(), args.iter().map(|e| var(*e)).collect()),
                var(v),
            ));
        }
    }
    for (c, e) in &a.constants {
        lits[level_of[*e]].push(Formula::Eq(Term::Const(c.clone()), var(*e)));
    }
    let z = Symbol::new("z");
    let cover: Vec<Formula> = (0..n)
        .map(|e| Formula::Eq(Term::Var(z.clone()), var(e)))
        .collect();
    let cover = if cover.len() == 1 {
        cover.into_iter().next().unwrap()
    } else {
        Formula::Or(cover)
    };
    lits[n - 1].push(Formula::forall(vec![z], cover));

    let conj = |mut parts: Vec<Formula>| {
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::And(parts)
        }
    };
    let mut inner: Option<Formula> = None;
    for lvl in (0..n).rev() {
        let mut parts = std::mem::take(&mut lits[lvl]);
        if let Some(f) = inner.take() {
            parts.push(f);
        }
        let body = conj(parts);
        inner = Some(if lvl == 0 {
            body
        } else {
            Formula::exists(vec![Symbol::from(format!("y{lvl}"))], body)
        });
    }
    inner.unwrap()
}

/// A uniqueness formula in `x` picking out `e`.
pub fn defining_formula(a: &Structure, e: Elem) -> Result<Theta, DefinabilityError> {
    if e >= a.size() {
        return Err(DefinabilityError::NoSuchElement(e));
    }
    let x = Symbol::new("x");
    let not_definable = || DefinabilityError::NotDefinable(a.element_name(e).to_string());
    if let Some((c, _)) = a.constants().find(|(_, v)| *v == e) {
        return Ok(Theta {
            var: x.clone(),
            body: Formula::Eq(Term::Var(x), Term::Const(c.clone())),
        });
    }
    if !fixed_points(a).contains(&e) {
        return Err(not_definable());
    }
    let unique = |f: &Formula| a.satisfiers(&x, f).is_ok_and(|s| s == [e]);
    if let Some(f) = templates(a).into_iter().find(|f| unique(f)) {
        return Ok(Theta { var: x, body: f });
    }
    let f = characteristic(a, e);
    if unique(&f) {
        Ok(Theta { var: x, body: f })
    } else {
        Err(not_definable())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Vocabulary;

    fn two_chain() -> Structure {
        let v = Vocabulary::new().with_relation("<", 2);
        Structure::builder("A2", v)
            .elements(["a", "b"])
            .tuple("<", &["a", "b"])
            .build()
            .unwrap()
    }

    fn pure_pair() -> Structure {
        Structure::builder("pair", Vocabulary::new())
            .elements(["a", "b"])
            .build()
            .unwrap()
    }

    fn z3(with_zero: bool) -> Structure {
        let mut v = Vocabulary::new().with_function("s", 1);
        if with_zero {
            v = v.with_constant("zero");
        }
        let mut b = Structure::builder("Z3", v)
            .elements(["0", "1", "2"])
            .map("s", &["0"], "1")
            .map("s", &["1"], "2")
            .map("s", &["2"], "0");
        if with_zero {
            b = b.constant("zero", "0");
        }
        b.build().unwrap()
    }

    #[test]
    fn automorphism_groups() {
        assert_eq!(automorphisms(&two_chain()), vec![vec![0, 1]]);
        assert_eq!(automorphisms(&pure_pair()), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(
            automorphisms(&z3(false)),
            vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]
        );
    }

    #[test]
    fn definable_parts() {
        assert_eq!(pd(&two_chain()).elements(), &[0, 1]);
        assert!(matches!(
            pd(&two_chain()),
            DefinablePart::Part {
                substructure: Some(_),
                ..
            }
        ));
        assert!(pd(&pure_pair()).is_empty());
        assert!(pd(&z3(false)).is_empty());
        assert_eq!(pd(&z3(true)).elements(), &[0, 1, 2]);
    }

    #[test]
    fn defining_formulas() {
        let a = two_chain();
        assert_eq!(
            defining_formula(&a, 0).unwrap().body.to_string(),
            "forall y . ~(y < x)"
        );
        let z = z3(true);
        assert_eq!(
            defining_formula(&z, 0).unwrap().body.to_string(),
            "x = zero"
        );
        for e in 1..3 {
            let th = defining_formula(&z, e).unwrap();
            assert_eq!(z.satisfiers(&th.var, &th.body).unwrap(), vec![e]);
        }
        assert_eq!(
            defining_formula(&pure_pair(), 0),
            Err(DefinabilityError::NotDefinable("a".into()))
        );
    }

    #[test]
    fn characteristic_formula_pins_down_rigid_elements() {
        let v = Vocabulary::new().with_relation("E", 2);
        let a = Structure::builder("path", v)
            .elements(["p", "q", "r", "s"])
            .tuple("E", &["p", "q"])
            .tuple("E", &["q", "r"])
            .tuple("E", &["r", "s"])
            .tuple("E", &["s", "s"])
            .build()
            .unwrap();
        for e in a.elements() {
            let f = characteristic(&a, e);
            assert_eq!(a.satisfiers(&Symbol::new("x"), &f).unwrap(), vec![e]);
        }
    }
}
