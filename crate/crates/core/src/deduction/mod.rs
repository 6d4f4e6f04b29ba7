//! Proof objects, the restriction rules, bounded saturation and the
//! decision procedure that derives complete theories.

mod complete;
mod decide;
mod proof;
mod saturate;
mod trace;

pub use complete::{
    barwise_expansion, barwise_theory_of, complete_theory_of, CompleteError, CompleteTheory,
    BARWISE_PREDICATE,
};
pub use decide::{
    decide, decide_wide, AtomOracle, DecideError, Decision, Mode, StructureOracle, TheoryOracle,
};
pub use proof::{check_proof, Axiom, ProofError, ProofNode, Rule};
pub use saturate::{closure_properties, saturate, ClosureProperties, Saturation, Saturator, Tower};
pub use trace::{proof_from_json, proof_to_json, TraceError};

use crate::diagrams::ThetaSet;
use crate::structures::tuples;
use crate::syntax::uniqueness::theta_prefix;
use crate::syntax::{relativize, substitute, Formula, Substitution, Symbol, Term};

/// The restriction rule a system carries, if any.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Restriction {
    #[default]
    None,
    /// From `phi(t̄)` for every `t̄ ∈ S^n` infer `forall x̄ phi`.
    Terms(Vec<Term>),
    /// From the uniqueness prefixes for every `θ̄ ∈ Θ^n` infer
    /// `forall x̄ phi`, everything relativized to `guard` when set.
    Theta {
        thetas: ThetaSet,
        guard: Option<Symbol>,
    },
}

impl Restriction {
    pub fn guard(&self) -> Option<&Symbol> {
        match self {
            Restriction::Theta { guard, .. } => guard.as_ref(),
            _ => None,
        }
    }

    pub fn thetas(&self) -> Option<&ThetaSet> {
        match self {
            Restriction::Theta { thetas, .. } => Some(thetas),
            _ => None,
        }
    }

    fn rel(&self, f: Formula) -> Formula {
        match self.guard() {
            Some(u) => relativize(&f, u),
            None => f,
        }
    }

    /// The premises for `forall vars . body`, in lexicographic order of
    /// the instance tuples.
    pub fn premises(&self, vars: &[Symbol], body: &Formula) -> Vec<Formula> {
        match self {
            Restriction::None => Vec::new(),
            Restriction::Terms(s) => tuples(s.len(), vars.len())
                .map(|idx| {
                    let map: Substitution = vars
                        .iter()
                        .cloned()
                        .zip(idx.iter().map(|i| s[*i].clone()))
                        .collect();
                    substitute(body, &map)
                })
                .collect(),
            Restriction::Theta { thetas, .. } => tuples(thetas.len(), vars.len())
                .map(|idx| {
                    let bindings: Vec<_> = vars
                        .iter()
                        .cloned()
                        .zip(idx.iter().map(|i| &thetas.members()[*i]))
                        .collect();
                    self.rel(theta_prefix(&bindings, body.clone()))
                })
                .collect(),
        }
    }

    pub fn conclusion(&self, vars: &[Symbol], body: &Formula) -> Formula {
        self.rel(Formula::forall(vars.to_vec(), body.clone()))
    }
}

/// Classical logic plus at most one restriction rule and, for the wide
/// fragment, optional distributivity and choice schemas.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DeductiveSystem {
    pub restriction: Restriction,
    pub distributivity: bool,
    pub independent_choice: bool,
    pub dependent_choice: bool,
}

impl DeductiveSystem {
    pub fn classical() -> Self {
        DeductiveSystem::default()
    }

    pub fn s_rule(terms: Vec<Term>) -> Self {
        DeductiveSystem {
            restriction: Restriction::Terms(terms),
            ..Default::default()
        }
    }

    pub fn theta_rule(thetas: ThetaSet) -> Self {
        DeductiveSystem {
            restriction: Restriction::Theta {
                thetas,
                guard: None,
            },
            ..Default::default()
        }
    }

    pub fn theta_u_rule(thetas: ThetaSet, u: Symbol) -> Self {
        DeductiveSystem {
            restriction: Restriction::Theta {
                thetas,
                guard: Some(u),
            },
            ..Default::default()
        }
    }

    pub fn with_distributivity(mut self) -> Self {
        self.distributivity = true;
        self
    }

    pub fn with_choice(mut self, independent: bool, dependent: bool) -> Self {
        self.independent_choice = independent;
        self.dependent_choice = dependent;
        self
    }

    pub fn guard(&self) -> Option<&Symbol> {
        self.restriction.guard()
    }

    pub fn thetas(&self) -> &[crate::syntax::uniqueness::Theta] {
        self.restriction.thetas().map_or(&[], |t| t.members())
    }
}
