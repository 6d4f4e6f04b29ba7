//! Diagrams, generalized diagrams and the passage between terms and
//! uniqueness formulas.

mod theory;

pub use theory::{Theory, TheoryError};

use crate::structures::{tuples, Assignment, Elem, EvalError, Structure};
use crate::syntax::uniqueness::{theta_atomic, Theta};
use crate::syntax::{Formula, Symbol, Term, Vocabulary, VocabularyError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiagramError {
    #[error("element `{0}` is not named by any constant")]
    Unnamed(String),
    #[error("element `{0}` is not defined by any theta")]
    Uncovered(String),
    #[error("`{theta}` has {count} satisfiers")]
    NotUnique { theta: String, count: usize },
    #[error("the part of `{structure}` inside `{pred}` is not a substructure")]
    NotClosed { structure: String, pred: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Vocabulary(#[from] VocabularyError),
}

/// A finite list of one-variable formulas.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ThetaSet {
    members: Vec<Theta>,
}

impl ThetaSet {
    pub fn new(members: Vec<Theta>) -> Self {
        ThetaSet { members }
    }

    pub fn members(&self) -> &[Theta] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Theta> {
        self.members.iter()
    }

    /// The element each member defines in `a`.
    pub fn denotations(&self, a: &Structure) -> Result<Vec<Elem>, DiagramError> {
        self.members
            .iter()
            .map(|th| match a.satisfiers(&th.var, &th.body)?.as_slice() {
                [e] => Ok(*e),
                other => Err(DiagramError::NotUnique {
                    theta: th.to_string(),
                    count: other.len(),
                }),
            })
            .collect()
    }

    /// Like [`ThetaSet::denotations`], additionally requiring every element
    /// to be defined.
    pub fn attach(&self, a: &Structure) -> Result<Vec<Elem>, DiagramError> {
        let den = self.denotations(a)?;
        if let Some(e) = a.elements().find(|e| !den.contains(e)) {
            return Err(DiagramError::Uncovered(a.element_name(e).to_string()));
        }
        Ok(den)
    }
}

impl FromIterator<Theta> for ThetaSet {
    fn from_iter<I: IntoIterator<Item = Theta>>(iter: I) -> Self {
        ThetaSet::new(iter.into_iter().collect())
    }
}

/// Exactly one element of `a` satisfies `theta`.
pub fn is_uniqueness_formula(theta: &Theta, a: &Structure) -> Result<bool, EvalError> {
    Ok(a.satisfiers(&theta.var, &theta.body)?.len() == 1)
}

/// `{ x = t : t ∈ S }`.
pub fn theta_of_terms(s: &[Term]) -> ThetaSet {
    s.iter().map(|t| Theta::of_term("x", t.clone())).collect()
}

/// `{ iota x . theta(x) : theta ∈ Θ }`.
pub fn terms_of_theta(thetas: &ThetaSet) -> Vec<Term> {
    thetas.iter().map(Theta::to_term).collect()
}

/// Number of distinct variables an atomic formula of the vocabulary can have.
pub fn max_atom_vars(vocab: &Vocabulary) -> usize {
    let f = vocab.functions().map(|(_, k)| k + 1).max().unwrap_or(0);
    vocab.max_relation_arity().max(f).max(2)
}

/// Atomic formulas over the variables `x0..x{nvars-1}` and the constants,
/// using exactly those variables in order of first occurrence. Equalities
/// are taken over unordered pairs unless `symmetric_eq` asks for both
/// orientations; function symbols contribute their graphs `f(t̄) = t`.
pub fn atom_shapes(vocab: &Vocabulary, nvars: usize, symmetric_eq: bool) -> Vec<Formula> {
    let mut terms: Vec<Term> = (0..nvars)
        .map(|i| Term::Var(Symbol::from(format!("x{i}"))))
        .collect();
    terms.extend(vocab.constants().iter().cloned().map(Term::Const));
    let pick = |idx: &[usize]| -> Vec<Term> { idx.iter().map(|i| terms[*i].clone()).collect() };
    let mut out = Vec::new();
    for (r, k) in vocab.relations() {
        for idx in tuples(terms.len(), k) {
            out.push(Formula::Atom(r.clone(), pick(&idx)));
        }
    }
    for i in 0..terms.len() {
        let from = if symmetric_eq { 0 } else { i };
        for j in from..terms.len() {
            out.push(Formula::Eq(terms[i].clone(), terms[j].clone()));
        }
    }
    for (g, k) in vocab.functions() {
        for idx in tuples(terms.len(), k + 1) {
            let args = pick(&idx[..k]);
            out.push(Formula::Eq(
                Term::App(g.clone(), args),
                terms[idx[k]].clone(),
            ));
        }
    }
    out.retain(|f| {
        let vars = f.free_vars_ordered();
        vars.len() == nvars
            && vars
                .iter()
                .enumerate()
                .all(|(i, v)| v.as_str() == format!("x{i}"))
    });
    out
}

/// Dg(A): the true atomic sentences over constants and the negations of
/// the false ones.
pub fn diagram(a: &Structure) -> Result<Theory, DiagramError> {
    let named: Vec<Elem> = a.constants().map(|(_, e)| e).collect();
    if let Some(e) = a.elements().find(|e| !named.contains(e)) {
        return Err(DiagramError::Unnamed(a.element_name(e).to_string()));
    }
    let mut t = Theory::new(&format!("Dg({})", a.name()), a.vocab().clone());
    for atom in atom_shapes(a.vocab(), 0, false) {
        let truth = a.eval_sentence(&atom)?;
        t.insert(if truth { atom } else { Formula::not(atom) });
    }
    Ok(t)
}

/// Dg_Θ(A): each Θ-atomic sentence or its negation, whichever holds.
/// Atoms without variables appear as plain literals.
pub fn generalized_diagram(a: &Structure, thetas: &ThetaSet) -> Result<Theory, DiagramError> {
    let den = thetas.attach(a)?;
    let mut t = Theory::new(&format!("DgTheta({})", a.name()), a.vocab().clone());
    let vars: Vec<Symbol> = (0..max_atom_vars(a.vocab()))
        .map(|i| Symbol::from(format!("x{i}")))
        .collect();
    for nvars in 0..=vars.len() {
        for atom in atom_shapes(a.vocab(), nvars, true) {
            for pick in tuples(thetas.len(), nvars) {
                let asg: Assignment = vars
                    .iter()
                    .cloned()
                    .zip(pick.iter().map(|i| den[*i]))
                    .collect();
                let truth = a.eval(&atom, &asg)?;
                let chosen: Vec<Theta> =
                    pick.iter().map(|i| thetas.members()[*i].clone()).collect();
                let sigma = theta_atomic(&atom, &chosen).expect("shape has one theta per variable");
                t.insert(if truth { sigma } else { Formula::not(sigma) });
            }
        }
    }
    Ok(t)
}

/// Dg^U_Θ(A) = { σ^U : σ ∈ Dg_Θ(B) } where B is the substructure on the
/// interpretation of `u` (all of A when `u` holds everywhere).
pub fn relativized_generalized_diagram(
    a: &Structure,
    thetas: &ThetaSet,
    u: &Symbol,
) -> Result<Theory, DiagramError> {
    a.vocab().require_unary(u)?;
    let part = u_part(a, u);
    if part.len() == a.size() {
        return Ok(generalized_diagram(a, thetas)?.relativized(u));
    }
    let sub = a.induced(&part).ok_or_else(|| DiagramError::NotClosed {
        structure: a.name().to_string(),
        pred: u.to_string(),
    })?;
    Ok(generalized_diagram(&sub, thetas)?.relativized(u))
}

/// Elements satisfying the unary predicate `u`.
pub fn u_part(a: &Structure, u: &Symbol) -> Vec<Elem> {
    a.relation_tuples(u).into_iter().map(|t| t[0]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::defining_formula;
    use crate::syntax::parse_formula;

    fn named_two_chain() -> Structure {
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

    fn two_chain() -> Structure {
        let v = Vocabulary::new().with_relation("<", 2).with_predicate("U");
        Structure::builder("A2", v)
            .elements(["a", "b"])
            .tuple("<", &["a", "b"])
            .tuple("U", &["a"])
            .tuple("U", &["b"])
            .build()
            .unwrap()
    }

    #[test]
    fn diagram_of_two_chain() {
        let a = named_two_chain();
        let dg = diagram(&a).unwrap();
        let v = a.vocab();
        let expected = [
            "c_a < c_b",
            "~(c_b < c_a)",
            "~(c_a < c_a)",
            "~(c_b < c_b)",
            "~(c_a = c_b)",
            "c_a = c_a",
            "c_b = c_b",
        ];
        assert_eq!(dg.len(), expected.len());
        for s in expected {
            assert!(dg.contains(&parse_formula(s, v).unwrap()), "{s}");
        }
    }

    #[test]
    fn diagram_needs_names() {
        assert_eq!(
            diagram(&two_chain()),
            Err(DiagramError::Unnamed("a".into()))
        );
    }

    #[test]
    fn uniqueness_checks() {
        let a = two_chain();
        let th =
            |s: &str| Theta::new(Symbol::new("x"), parse_formula(s, a.vocab()).unwrap()).unwrap();
        assert_eq!(
            is_uniqueness_formula(&th("forall y . ~(y < x)"), &a),
            Ok(true)
        );
        assert_eq!(is_uniqueness_formula(&th("x = x"), &a), Ok(false));
        assert_eq!(is_uniqueness_formula(&th("~(x = x)"), &a), Ok(false));
    }

    #[test]
    fn terms_and_thetas() {
        let s = [Term::constant("c_a"), Term::constant("c_b")];
        let th = theta_of_terms(&s);
        assert_eq!(th.members()[1].body.to_string(), "x = c_b");
        assert!(theta_of_terms(&[]).is_empty());
        let terms = terms_of_theta(&th);
        assert_eq!(terms[0].to_string(), "(iota x . x = c_a)");
    }

    #[test]
    fn generalized_diagram_of_two_chain() {
        let a = two_chain();
        let thetas: ThetaSet = a
            .elements()
            .map(|e| defining_formula(&a, e).unwrap())
            .collect();
        let dg = generalized_diagram(&a, &thetas).unwrap();
        let v = a.vocab();
        let pos = parse_formula(
            "exists x0 x1 . And[x0 < x1; forall y . ~(y < x0); forall y . ~(x1 < y)]",
            v,
        )
        .unwrap();
        let neg = parse_formula(
            "~exists x0 x1 . And[x0 < x1; forall y . ~(x0 < y); forall y . ~(y < x1)]",
            v,
        )
        .unwrap();
        assert!(dg.contains(&pos));
        assert!(dg.contains(&neg));
        for s in &dg {
            assert_eq!(a.eval_sentence(s), Ok(true));
        }
        let u = Symbol::new("U");
        let rel = relativized_generalized_diagram(&a, &thetas, &u).unwrap();
        assert_eq!(rel.len(), dg.len());
        assert!(relativized_generalized_diagram(&a, &thetas, &Symbol::new("<")).is_err());
    }

    #[test]
    fn term_thetas_give_an_equivalent_diagram() {
        let a = named_two_chain();
        let thetas = theta_of_terms(&[Term::constant("c_a"), Term::constant("c_b")]);
        let dg = generalized_diagram(&a, &thetas).unwrap();
        for s in &dg {
            assert_eq!(a.eval_sentence(s), Ok(true));
        }
    }
}
