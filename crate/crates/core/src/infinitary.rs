//! Bounded-width surrogate of the infinitary languages: the basic-system
//! schemas, distributivity and choice, and the wide restriction rule.

use crate::deduction::{AtomOracle, DecideError, Decision, Mode};
use crate::diagrams::ThetaSet;
use crate::structures::tuples;
use crate::syntax::{substitute, Formula, Substitution, Symbol, Term};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchemaError {
    #[error("{0}")]
    SideCondition(String),
    #[error("width {found} exceeds the budget {limit}")]
    Width { found: usize, limit: usize },
    #[error("quantifier block of length {found} exceeds the budget {limit}")]
    Block { found: usize, limit: usize },
    #[error("distributivity is only generated for 1 <= gamma <= 4, got {0}")]
    Gamma(usize),
    #[error("malformed instance: {0}")]
    Malformed(String),
}

/// Maximum connective width and quantifier block length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WidthBudget {
    pub max_width: usize,
    pub max_block: usize,
}

impl Default for WidthBudget {
    fn default() -> Self {
        WidthBudget {
            max_width: 4,
            max_block: 3,
        }
    }
}

impl WidthBudget {
    pub fn new(max_width: usize, max_block: usize) -> Result<Self, SchemaError> {
        if max_width < 2 {
            return Err(SchemaError::Width {
                found: max_width,
                limit: 2,
            });
        }
        if max_block < 2 {
            return Err(SchemaError::Block {
                found: max_block,
                limit: 2,
            });
        }
        Ok(WidthBudget {
            max_width,
            max_block,
        })
    }

    pub fn check(&self, f: &Formula) -> Result<(), SchemaError> {
        let (w, b) = f.widths();
        if w > self.max_width {
            return Err(SchemaError::Width {
                found: w,
                limit: self.max_width,
            });
        }
        if b > self.max_block {
            return Err(SchemaError::Block {
                found: b,
                limit: self.max_block,
            });
        }
        Ok(())
    }
}

/// The axiom schemas of the basic system. Wide conjunctions are explicit
/// lists; `<->` is written as a conjunction of two implications.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BasicAxiom {
    /// `phi -> (psi -> phi)`
    P1 { phi: Formula, psi: Formula },
    /// `(phi -> (psi -> chi)) -> ((phi -> psi) -> (phi -> chi))`
    P2 {
        phi: Formula,
        psi: Formula,
        chi: Formula,
    },
    /// `(~phi -> ~psi) -> (psi -> phi)`
    P3 { phi: Formula, psi: Formula },
    /// `And[(phi -> phi_a)...] -> (phi -> And[phi_a...])`
    P4 { phi: Formula, parts: Vec<Formula> },
    /// `And[phi_a...] -> phi_beta`
    P5 { parts: Vec<Formula>, beta: usize },
    /// `forall x̄ (phi -> psi) -> (phi -> forall x̄ psi)`, x̄ not free in phi
    Q1 {
        vars: Vec<Symbol>,
        phi: Formula,
        psi: Formula,
    },
    /// `forall x̄ phi -> phi(t̄)`, the terms free for x̄
    Q2 {
        vars: Vec<Symbol>,
        phi: Formula,
        terms: Vec<Term>,
    },
    /// `t = t`
    E1 { term: Term },
    /// `And[s_a = t_a...] -> (phi(s̄) <-> phi(t̄))`
    E2 {
        vars: Vec<Symbol>,
        phi: Formula,
        left: Vec<Term>,
        right: Vec<Term>,
    },
}

fn iff(a: Formula, b: Formula) -> Formula {
    Formula::And(vec![Formula::imp(a.clone(), b.clone()), Formula::imp(b, a)])
}

fn conj(mut parts: Vec<Formula>) -> Formula {
    if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        Formula::And(parts)
    }
}

fn bind(vars: &[Symbol], terms: &[Term]) -> Substitution {
    vars.iter().cloned().zip(terms.iter().cloned()).collect()
}

/// True when replacing `vars` by `terms` in `phi` needs no renaming.
fn substitutable(phi: &Formula, vars: &[Symbol], terms: &[Term]) -> bool {
    let incoming: BTreeSet<Symbol> = terms.iter().flat_map(Term::free_vars).collect();
    free_under_binder(phi, vars, &incoming, &mut Vec::new())
}

fn free_under_binder(
    f: &Formula,
    vars: &[Symbol],
    incoming: &BTreeSet<Symbol>,
    bound: &mut Vec<Symbol>,
) -> bool {
    let term_ok = |t: &Term, bound: &Vec<Symbol>| {
        let fv = t.free_vars();
        let hits = vars.iter().any(|v| fv.contains(v) && !bound.contains(v));
        !hits || bound.iter().all(|b| !incoming.contains(b))
    };
    match f {
        Formula::Atom(_, args) => args.iter().all(|a| term_ok(a, bound)),
        Formula::Eq(a, b) => term_ok(a, bound) && term_ok(b, bound),
        Formula::Not(g) => free_under_binder(g, vars, incoming, bound),
        Formula::And(gs) | Formula::Or(gs) => gs
            .iter()
            .all(|g| free_under_binder(g, vars, incoming, bound)),
        Formula::Imp(a, b) => {
            free_under_binder(a, vars, incoming, bound)
                && free_under_binder(b, vars, incoming, bound)
        }
        Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
            if vs.iter().any(|v| vars.contains(v)) {
                let shadowed: Vec<Symbol> =
                    vars.iter().filter(|v| !vs.contains(v)).cloned().collect();
                let n = bound.len();
                bound.extend(vs.iter().cloned());
                let ok = free_under_binder(g, &shadowed, incoming, bound);
                bound.truncate(n);
                return ok;
            }
            let n = bound.len();
            bound.extend(vs.iter().cloned());
            let ok = free_under_binder(g, vars, incoming, bound);
            bound.truncate(n);
            ok
        }
    }
}

fn distinct(vars: &[Symbol]) -> bool {
    vars.iter().collect::<BTreeSet<_>>().len() == vars.len()
}

impl BasicAxiom {
    pub fn name(&self) -> &'static str {
        match self {
            BasicAxiom::P1 { .. } => "P1",
            BasicAxiom::P2 { .. } => "P2",
            BasicAxiom::P3 { .. } => "P3",
            BasicAxiom::P4 { .. } => "P4",
            BasicAxiom::P5 { .. } => "P5",
            BasicAxiom::Q1 { .. } => "Q1",
            BasicAxiom::Q2 { .. } => "Q2",
            BasicAxiom::E1 { .. } => "E1",
            BasicAxiom::E2 { .. } => "E2",
        }
    }

    /// The literal instance, after checking the side conditions.
    pub fn instance(&self) -> Result<Formula, SchemaError> {
        use BasicAxiom::*;
        let side = |m: &str| Err(SchemaError::SideCondition(m.to_string()));
        Ok(match self {
            P1 { phi, psi } => Formula::imp(phi.clone(), Formula::imp(psi.clone(), phi.clone())),
            P2 { phi, psi, chi } => Formula::imp(
                Formula::imp(phi.clone(), Formula::imp(psi.clone(), chi.clone())),
                Formula::imp(
                    Formula::imp(phi.clone(), psi.clone()),
                    Formula::imp(phi.clone(), chi.clone()),
                ),
            ),
            P3 { phi, psi } => Formula::imp(
                Formula::imp(Formula::not(phi.clone()), Formula::not(psi.clone())),
                Formula::imp(psi.clone(), phi.clone()),
            ),
            P4 { phi, parts } => {
                if parts.is_empty() {
                    return Err(SchemaError::Malformed("empty conjunction".into()));
                }
                let hyps = parts
                    .iter()
                    .map(|p| Formula::imp(phi.clone(), p.clone()))
                    .collect();
                Formula::imp(
                    Formula::And(hyps),
                    Formula::imp(phi.clone(), Formula::And(parts.clone())),
                )
            }
            P5 { parts, beta } => {
                let Some(chosen) = parts.get(*beta) else {
                    return Err(SchemaError::Malformed(format!("index {beta} out of range")));
                };
                Formula::imp(Formula::And(parts.clone()), chosen.clone())
            }
            Q1 { vars, phi, psi } => {
                if vars.is_empty() || !distinct(vars) {
                    return Err(SchemaError::Malformed(
                        "block must be nonempty and distinct".into(),
                    ));
                }
                if let Some(v) = vars.iter().find(|v| phi.has_free(v)) {
                    return side(&format!("`{v}` occurs free in the antecedent"));
                }
                Formula::imp(
                    Formula::forall(vars.clone(), Formula::imp(phi.clone(), psi.clone())),
                    Formula::imp(phi.clone(), Formula::forall(vars.clone(), psi.clone())),
                )
            }
            Q2 { vars, phi, terms } => {
                if vars.is_empty() || vars.len() != terms.len() || !distinct(vars) {
                    return Err(SchemaError::Malformed(
                        "one term per distinct variable".into(),
                    ));
                }
                if !substitutable(phi, vars, terms) {
                    return side("a term would be captured by a quantifier");
                }
                Formula::imp(
                    Formula::forall(vars.clone(), phi.clone()),
                    substitute(phi, &bind(vars, terms)),
                )
            }
            E1 { term } => Formula::Eq(term.clone(), term.clone()),
            E2 {
                vars,
                phi,
                left,
                right,
            } => {
                if vars.is_empty()
                    || vars.len() != left.len()
                    || vars.len() != right.len()
                    || !distinct(vars)
                {
                    return Err(SchemaError::Malformed(
                        "one pair of terms per distinct variable".into(),
                    ));
                }
                if !substitutable(phi, vars, left) || !substitutable(phi, vars, right) {
                    return side("a variable of the terms is bound in the formula");
                }
                let eqs = left
                    .iter()
                    .zip(right)
                    .map(|(s, t)| Formula::Eq(s.clone(), t.clone()))
                    .collect();
                Formula::imp(
                    conj(eqs),
                    iff(
                        substitute(phi, &bind(vars, left)),
                        substitute(phi, &bind(vars, right)),
                    ),
                )
            }
        })
    }
}

/// One cell of a distributivity table: `base[index]` or its negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub index: usize,
    pub negated: bool,
}

/// `Or_a And_b phi_{a,b}` with each `phi_{a,b}` drawn from `base` or its
/// negations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Distributivity {
    pub base: Vec<Formula>,
    pub table: Vec<Vec<Cell>>,
}

impl Distributivity {
    pub fn gamma(&self) -> usize {
        self.table.len()
    }

    /// Checks that every choice function `f` picks a complementary pair.
    pub fn check(&self) -> Result<(), SchemaError> {
        let g = self.gamma();
        if !(1..=4).contains(&g) {
            return Err(SchemaError::Gamma(g));
        }
        if self.base.len() > g || self.table.iter().any(|row| row.len() != g) {
            return Err(SchemaError::Malformed(
                "table must be gamma x gamma over at most gamma formulas".into(),
            ));
        }
        if self
            .table
            .iter()
            .flatten()
            .any(|c| c.index >= self.base.len())
        {
            return Err(SchemaError::Malformed(
                "cell refers to a missing formula".into(),
            ));
        }
        for f in tuples(g, g) {
            let picked: BTreeSet<Cell> = (0..g).map(|a| self.table[a][f[a]]).collect();
            let hit = picked.iter().any(|c| {
                picked.contains(&Cell {
                    index: c.index,
                    negated: !c.negated,
                })
            });
            if !hit {
                return Err(SchemaError::SideCondition(format!(
                    "the choice {f:?} picks no complementary pair"
                )));
            }
        }
        Ok(())
    }

    pub fn instance(&self) -> Result<Formula, SchemaError> {
        self.check()?;
        let cell = |c: &Cell| {
            let f = self.base[c.index].clone();
            if c.negated {
                Formula::not(f)
            } else {
                f
            }
        };
        Ok(Formula::Or(
            self.table
                .iter()
                .map(|row| Formula::And(row.iter().map(cell).collect()))
                .collect(),
        ))
    }
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.index, self.negated).cmp(&(other.index, other.negated))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChoiceKind {
    Independent,
    Dependent,
}

/// Applies independent or dependent choice to the premise `Or[phi_a...]`
/// with the block `blocks[a]` for disjunct `a`.
pub fn choice_rule_apply(
    kind: ChoiceKind,
    premise: &Formula,
    blocks: &[Vec<Symbol>],
) -> Result<Formula, SchemaError> {
    let Formula::Or(parts) = premise else {
        return Err(SchemaError::Malformed(
            "the premise must be a disjunction".into(),
        ));
    };
    if parts.len() != blocks.len() {
        return Err(SchemaError::Malformed(format!(
            "{} disjuncts but {} blocks",
            parts.len(),
            blocks.len()
        )));
    }
    let all: Vec<Symbol> = blocks.iter().flatten().cloned().collect();
    if !distinct(&all) {
        return Err(SchemaError::SideCondition(
            "the bound variables must be pairwise distinct".into(),
        ));
    }
    let quant = |q: fn(Vec<Symbol>, Formula) -> Formula, vs: &[Symbol], f: Formula| {
        if vs.is_empty() {
            f
        } else {
            q(vs.to_vec(), f)
        }
    };
    match kind {
        ChoiceKind::Independent => {
            for (a, block) in blocks.iter().enumerate() {
                for (e, phi) in parts.iter().enumerate() {
                    if e != a {
                        if let Some(x) = block.iter().find(|x| phi.has_free(x)) {
                            return Err(SchemaError::SideCondition(format!(
                                "`{x}` occurs free in disjunct {e}"
                            )));
                        }
                    }
                }
            }
            Ok(Formula::Or(
                parts
                    .iter()
                    .zip(blocks)
                    .map(|(phi, b)| quant(Formula::forall, b, phi.clone()))
                    .collect(),
            ))
        }
        ChoiceKind::Dependent => {
            for (a, block) in blocks.iter().enumerate() {
                for phi in &parts[..a] {
                    if let Some(x) = block.iter().find(|x| phi.has_free(x)) {
                        return Err(SchemaError::SideCondition(format!(
                            "`{x}` of block {a} occurs free in an earlier disjunct"
                        )));
                    }
                }
            }
            let mut out = Vec::with_capacity(parts.len());
            for (a, (phi, block)) in parts.iter().zip(blocks).enumerate() {
                let body = quant(Formula::forall, block, phi.clone());
                if a == 0 {
                    out.push(body);
                    continue;
                }
                let mut ys: Vec<Symbol> = phi
                    .free_vars_ordered()
                    .into_iter()
                    .filter(|v| !block.contains(v))
                    .collect();
                for earlier in &blocks[..a] {
                    for x in earlier {
                        if !ys.contains(x) {
                            ys.push(x.clone());
                        }
                    }
                }
                out.push(quant(Formula::exists, &ys, body));
            }
            Ok(Formula::Or(out))
        }
    }
}

/// Premises and conclusion of the wide restriction rule for `forall
/// vars . body`: `|S|^γ` (resp. `|Θ|^γ`) instances.
pub fn wide_restriction_apply(
    restriction: &crate::deduction::Restriction,
    vars: &[Symbol],
    body: &Formula,
    budget: &WidthBudget,
) -> Result<(Vec<Formula>, Formula), SchemaError> {
    if vars.len() > budget.max_block {
        return Err(SchemaError::Block {
            found: vars.len(),
            limit: budget.max_block,
        });
    }
    if vars.is_empty() || !distinct(vars) {
        return Err(SchemaError::Malformed(
            "block must be nonempty and distinct".into(),
        ));
    }
    Ok((
        restriction.premises(vars, body),
        restriction.conclusion(vars, body),
    ))
}

/// The decision procedure for wide sentences: checks the budget, then runs
/// the same structural recursion as [`decide`](crate::deduction::decide).
pub fn decide_infinitary(
    oracle: &dyn AtomOracle,
    sigma: &Formula,
    thetas: &ThetaSet,
    guard: Option<&Symbol>,
    budget: &WidthBudget,
) -> Result<Decision, DecideError> {
    budget.check(sigma).map_err(DecideError::Budget)?;
    let mode = Mode::Theta {
        thetas: thetas.clone(),
        guard: guard.cloned(),
    };
    crate::deduction::decide_wide(oracle, sigma, &mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, Vocabulary};

    fn v() -> Vocabulary {
        Vocabulary::new()
            .with_relation("P", 1)
            .with_relation("Q", 1)
            .with_relation("<", 2)
            .with_constant("c")
    }

    fn f(s: &str) -> Formula {
        parse_formula(s, &v()).unwrap()
    }

    #[test]
    fn projection_axiom() {
        let ax = BasicAxiom::P5 {
            parts: vec![f("P(c)"), f("Q(c)"), f("c < c")],
            beta: 1,
        };
        assert_eq!(
            ax.instance().unwrap().to_string(),
            "(And[P(c); Q(c); c < c] -> Q(c))"
        );
    }

    #[test]
    fn reflexivity_axiom() {
        assert_eq!(
            BasicAxiom::E1 {
                term: Term::constant("c")
            }
            .instance()
            .unwrap(),
            f("c = c")
        );
    }

    #[test]
    fn instantiation_rejects_capture() {
        let ax = BasicAxiom::Q2 {
            vars: vec![Symbol::new("x")],
            phi: f("exists y . x < y"),
            terms: vec![Term::var("y")],
        };
        assert!(matches!(ax.instance(), Err(SchemaError::SideCondition(_))));
        let ok = BasicAxiom::Q2 {
            vars: vec![Symbol::new("x")],
            phi: f("exists y . x < y"),
            terms: vec![Term::constant("c")],
        };
        assert_eq!(
            ok.instance().unwrap(),
            f("(forall x . exists y . x < y) -> exists y . c < y")
        );
    }

    #[test]
    fn generalization_axiom_side_condition() {
        let ax = BasicAxiom::Q1 {
            vars: vec![Symbol::new("x")],
            phi: f("P(x)"),
            psi: f("Q(x)"),
        };
        assert!(ax.instance().is_err());
    }

    #[test]
    fn distributivity_gamma_two() {
        let d = Distributivity {
            base: vec![f("P(c)")],
            table: vec![
                vec![
                    Cell {
                        index: 0,
                        negated: false,
                    },
                    Cell {
                        index: 0,
                        negated: false,
                    },
                ],
                vec![
                    Cell {
                        index: 0,
                        negated: true,
                    },
                    Cell {
                        index: 0,
                        negated: true,
                    },
                ],
            ],
        };
        assert_eq!(
            d.instance().unwrap(),
            f("Or[And[P(c); P(c)]; And[~P(c); ~P(c)]]")
        );
        let bad = Distributivity {
            base: vec![f("P(c)"), f("Q(c)")],
            table: vec![
                vec![
                    Cell {
                        index: 0,
                        negated: false,
                    },
                    Cell {
                        index: 1,
                        negated: false,
                    },
                ],
                vec![
                    Cell {
                        index: 0,
                        negated: false,
                    },
                    Cell {
                        index: 1,
                        negated: true,
                    },
                ],
            ],
        };
        assert!(matches!(bad.instance(), Err(SchemaError::SideCondition(_))));
    }

    #[test]
    fn independent_choice_with_one_disjunct_is_generalization() {
        let out = choice_rule_apply(
            ChoiceKind::Independent,
            &f("Or[P(x)]"),
            &[vec![Symbol::new("x")]],
        )
        .unwrap();
        assert_eq!(out, f("Or[forall x . P(x)]"));
    }

    #[test]
    fn dependent_choice_shape() {
        let out = choice_rule_apply(
            ChoiceKind::Dependent,
            &f("P(x) | x < y"),
            &[vec![Symbol::new("x")], vec![Symbol::new("y")]],
        )
        .unwrap();
        assert_eq!(out, f("(forall x . P(x)) | exists x . forall y . x < y"));
    }
}
