use super::decide::{decide, DecideError, Decision, Mode, TheoryOracle};
use super::DeductiveSystem;
use crate::diagrams::{
    diagram, generalized_diagram, relativized_generalized_diagram, DiagramError, Theory, ThetaSet,
};
use crate::structures::{EvalError, Structure, StructureError};
use crate::syntax::{relativize, Formula, Symbol, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompleteError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Decide(#[from] DecideError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("derived verdict on `{0}` disagrees with model checking")]
    Mismatch(String),
}

/// Every universe sentence decided from a diagram, with proofs.
#[derive(Debug, Clone)]
pub struct CompleteTheory {
    /// The diagram the proofs cite.
    pub premises: Theory,
    pub system: DeductiveSystem,
    pub decisions: Vec<Decision>,
}

impl CompleteTheory {
    /// The sentences proved to hold.
    pub fn theory(&self) -> Vec<&Formula> {
        self.decisions
            .iter()
            .filter(|d| d.holds)
            .map(|d| &d.sentence)
            .collect()
    }
}

/// Decides each sentence of `universe` from Dg_Θ(A) (relativized to
/// `guard` when set) and cross-checks the verdicts against evaluation of
/// `σ` (resp. `σ^U`) in `a`.
pub fn complete_theory_of(
    a: &Structure,
    thetas: &ThetaSet,
    universe: &[Formula],
    guard: Option<&Symbol>,
) -> Result<CompleteTheory, CompleteError> {
    let premises = match guard {
        Some(u) => relativized_generalized_diagram(a, thetas, u)?,
        None => generalized_diagram(a, thetas)?,
    };
    let mode = Mode::Theta {
        thetas: thetas.clone(),
        guard: guard.cloned(),
    };
    run(a, premises, mode, universe, |s| match guard {
        Some(u) => relativize(s, u),
        None => s.clone(),
    })
}

/// The term-mode variant: `a` expanded by a constant `c_<e>` for every
/// element, the premises Dg(A) together with `Ur(c_<e>)`, and the S-rule
/// over those constants.
pub fn barwise_theory_of(
    a: &Structure,
    universe: &[Formula],
) -> Result<CompleteTheory, CompleteError> {
    let (expanded, names) = barwise_expansion(a)?;
    let mut premises = diagram(&expanded)?;
    let ur = Symbol::new(BARWISE_PREDICATE);
    for c in &names {
        premises.insert(Formula::Atom(ur.clone(), vec![Term::Const(c.clone())]));
    }
    let mode = Mode::Terms(names.into_iter().map(Term::Const).collect());
    run(&expanded, premises, mode, universe, Formula::clone)
}

pub const BARWISE_PREDICATE: &str = "Ur";

/// `a` with a constant for each element and the always-true predicate `Ur`.
pub fn barwise_expansion(a: &Structure) -> Result<(Structure, Vec<Symbol>), StructureError> {
    let names: Vec<Symbol> = a
        .elements()
        .map(|e| Symbol::from(format!("c_{}", a.element_name(e))))
        .collect();
    let pairs: Vec<(Symbol, usize)> = names.iter().cloned().zip(a.elements()).collect();
    let all: Vec<usize> = a.elements().collect();
    let expanded = a
        .with_constants(&pairs)?
        .with_unary(&Symbol::new(BARWISE_PREDICATE), &all)?;
    Ok((expanded, names))
}

fn run(
    a: &Structure,
    premises: Theory,
    mode: Mode,
    universe: &[Formula],
    claim: impl Fn(&Formula) -> Formula,
) -> Result<CompleteTheory, CompleteError> {
    let oracle = TheoryOracle { theory: &premises };
    let mut decisions = Vec::with_capacity(universe.len());
    for sigma in universe {
        let d = decide(&oracle, sigma, &mode)?;
        if d.holds != a.eval_sentence(&claim(sigma))? {
            return Err(CompleteError::Mismatch(sigma.to_string()));
        }
        decisions.push(d);
    }
    let system = mode.system();
    Ok(CompleteTheory {
        premises,
        system,
        decisions,
    })
}
