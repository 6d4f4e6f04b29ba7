use super::DeductiveSystem;
use crate::diagrams::Theory;
use crate::infinitary::{choice_rule_apply, BasicAxiom, ChoiceKind, Distributivity};
use crate::syntax::prop::is_tautology;
use crate::syntax::relativize::{guard, guarded_and};
use crate::syntax::uniqueness::{nf_equivalent, theta_prefix};
use crate::syntax::{alpha_eq, relativize, substitute, Formula, Substitution, Symbol, Term};
use std::fmt;

/// Axiom schemas recognized by the checker.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Axiom {
    /// Any propositional tautology, quantified subformulas as letters.
    Tautology,
    /// `~phi(t̄) -> ~forall x̄ phi`
    InstanceContra {
        vars: Vec<Symbol>,
        body: Formula,
        terms: Vec<Term>,
    },
    /// `phi(t̄) -> exists x̄ phi`
    ExistsIntro {
        vars: Vec<Symbol>,
        body: Formula,
        terms: Vec<Term>,
    },
    /// `forall x̄ ~phi -> ~exists x̄ phi`, with guards when relativized.
    QuantDuality {
        vars: Vec<Symbol>,
        body: Formula,
        guard: Option<Symbol>,
    },
    /// `~(exists x̄ And[phi; theta(x̄)])^U -> ~(forall x̄ phi)^U`
    ThetaInstanceContra {
        vars: Vec<Symbol>,
        body: Formula,
        thetas: Vec<usize>,
    },
    /// `(exists x̄ And[phi; theta(x̄)])^U -> (exists x̄ phi)^U`
    ExistsWeaken {
        vars: Vec<Symbol>,
        body: Formula,
        thetas: Vec<usize>,
    },
    Basic(BasicAxiom),
    Distributivity(Distributivity),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Rule {
    Premise,
    Axiom(Axiom),
    /// Children `[phi, phi -> psi]`.
    ModusPonens,
    /// One child per conjunct.
    Conjunction,
    Generalization {
        vars: Vec<Symbol>,
    },
    /// One child per instance of the active restriction rule.
    Restriction {
        vars: Vec<Symbol>,
        body: Formula,
    },
    /// One child, equivalent up to moving uniqueness prefixes.
    UniquenessRewrite,
    Choice {
        kind: ChoiceKind,
        blocks: Vec<Vec<Symbol>>,
    },
}

impl Rule {
    pub fn label(&self) -> &'static str {
        match self {
            Rule::Premise => "premise",
            Rule::Axiom(a) => a.label(),
            Rule::ModusPonens => "mp",
            Rule::Conjunction => "conjunction",
            Rule::Generalization { .. } => "generalization",
            Rule::Restriction { .. } => "restriction",
            Rule::UniquenessRewrite => "rewrite",
            Rule::Choice {
                kind: ChoiceKind::Independent,
                ..
            } => "choice",
            Rule::Choice {
                kind: ChoiceKind::Dependent,
                ..
            } => "dependent-choice",
        }
    }
}

impl Axiom {
    pub fn label(&self) -> &'static str {
        match self {
            Axiom::Tautology => "tautology",
            Axiom::InstanceContra { .. } => "instance-contra",
            Axiom::ExistsIntro { .. } => "exists-intro",
            Axiom::QuantDuality { .. } => "duality",
            Axiom::ThetaInstanceContra { .. } => "theta-instance-contra",
            Axiom::ExistsWeaken { .. } => "exists-weaken",
            Axiom::Basic(b) => b.name(),
            Axiom::Distributivity(_) => "distributivity",
        }
    }

    /// The instance this axiom stands for; `None` for tautologies, which
    /// are checked on the conclusion itself.
    pub fn instance(&self, sys: &DeductiveSystem) -> Result<Option<Formula>, String> {
        let bind = |vars: &[Symbol], terms: &[Term]| -> Result<Substitution, String> {
            if vars.is_empty() || vars.len() != terms.len() {
                return Err("one term per bound variable".into());
            }
            Ok(vars.iter().cloned().zip(terms.iter().cloned()).collect())
        };
        let prefix = |vars: &[Symbol], body: &Formula, idx: &[usize]| -> Result<Formula, String> {
            let thetas = sys.thetas();
            if thetas.is_empty() {
                return Err("the system has no uniqueness formulas".into());
            }
            if vars.is_empty() || vars.len() != idx.len() {
                return Err("one theta per bound variable".into());
            }
            let mut bindings = Vec::with_capacity(vars.len());
            for (x, i) in vars.iter().zip(idx) {
                let th = thetas
                    .get(*i)
                    .ok_or_else(|| format!("theta index {i} out of range"))?;
                bindings.push((x.clone(), th));
            }
            Ok(theta_prefix(&bindings, body.clone()))
        };
        let rel = |f: Formula| match sys.guard() {
            Some(u) => relativize(&f, u),
            None => f,
        };
        Ok(Some(match self {
            Axiom::Tautology => return Ok(None),
            Axiom::InstanceContra { vars, body, terms } => Formula::imp(
                Formula::not(substitute(body, &bind(vars, terms)?)),
                Formula::not(Formula::forall(vars.clone(), body.clone())),
            ),
            Axiom::ExistsIntro { vars, body, terms } => Formula::imp(
                substitute(body, &bind(vars, terms)?),
                Formula::exists(vars.clone(), body.clone()),
            ),
            Axiom::QuantDuality {
                vars,
                body,
                guard: g,
            } => {
                if vars.is_empty() {
                    return Err("empty block".into());
                }
                let (all, ex) = match g {
                    Some(u) => (
                        Formula::imp(guard(vars, u), Formula::not(body.clone())),
                        guarded_and(vars, u, body.clone()),
                    ),
                    None => (Formula::not(body.clone()), body.clone()),
                };
                Formula::imp(
                    Formula::forall(vars.clone(), all),
                    Formula::not(Formula::exists(vars.clone(), ex)),
                )
            }
            Axiom::ThetaInstanceContra { vars, body, thetas } => Formula::imp(
                Formula::not(rel(prefix(vars, body, thetas)?)),
                Formula::not(rel(Formula::forall(vars.clone(), body.clone()))),
            ),
            Axiom::ExistsWeaken { vars, body, thetas } => Formula::imp(
                rel(prefix(vars, body, thetas)?),
                rel(Formula::exists(vars.clone(), body.clone())),
            ),
            Axiom::Basic(b) => b.instance().map_err(|e| e.to_string())?,
            Axiom::Distributivity(d) => {
                if !sys.distributivity {
                    return Err("distributivity is not enabled".into());
                }
                d.instance().map_err(|e| e.to_string())?
            }
        }))
    }
}

/// A derivation tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProofNode {
    pub conclusion: Formula,
    pub rule: Rule,
    pub children: Vec<ProofNode>,
}

impl ProofNode {
    pub fn new(conclusion: Formula, rule: Rule, children: Vec<ProofNode>) -> Self {
        ProofNode {
            conclusion,
            rule,
            children,
        }
    }

    pub fn premise(f: Formula) -> Self {
        ProofNode::new(f, Rule::Premise, Vec::new())
    }

    pub fn axiom(f: Formula, ax: Axiom) -> Self {
        ProofNode::new(f, Rule::Axiom(ax), Vec::new())
    }

    pub fn tautology(f: Formula) -> Self {
        ProofNode::axiom(f, Axiom::Tautology)
    }

    /// Modus ponens; the conclusion is read off the implication.
    pub fn mp(minor: ProofNode, major: ProofNode) -> Self {
        let conclusion = match &major.conclusion {
            Formula::Imp(_, b) => (**b).clone(),
            other => other.clone(),
        };
        ProofNode::new(conclusion, Rule::ModusPonens, vec![minor, major])
    }

    /// `phi, phi -> psi` where the implication is a tautology.
    pub fn by_tautology(minor: ProofNode, conclusion: Formula) -> Self {
        let imp = Formula::imp(minor.conclusion.clone(), conclusion);
        ProofNode::mp(minor, ProofNode::tautology(imp))
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(ProofNode::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(ProofNode::height)
            .max()
            .unwrap_or(0)
    }

    /// Conclusions of premise leaves, left to right.
    pub fn premises(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        self.walk(&mut |n| {
            if n.rule == Rule::Premise {
                out.push(&n.conclusion);
            }
        });
        out
    }

    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a ProofNode)) {
        visit(self);
        for c in &self.children {
            c.walk(visit);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ProofError {
    /// Child indices from the root to the offending node.
    pub path: Vec<usize>,
    pub rule: String,
    pub conclusion: String,
    pub message: String,
}

impl fmt::Display for ProofError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path: Vec<String> = self.path.iter().map(usize::to_string).collect();
        write!(
            f,
            "node /{} ({}) `{}`: {}",
            path.join("/"),
            self.rule,
            self.conclusion,
            self.message
        )
    }
}

/// Checks every node of `proof` against `theory` and `sys`.
pub fn check_proof(
    proof: &ProofNode,
    theory: &Theory,
    sys: &DeductiveSystem,
) -> Result<(), ProofError> {
    let mut path = Vec::new();
    check(proof, theory, sys, &mut path)
}

fn check(
    node: &ProofNode,
    theory: &Theory,
    sys: &DeductiveSystem,
    path: &mut Vec<usize>,
) -> Result<(), ProofError> {
    for (i, c) in node.children.iter().enumerate() {
        path.push(i);
        check(c, theory, sys, path)?;
        path.pop();
    }
    check_step(node, theory, sys).map_err(|message| ProofError {
        path: path.clone(),
        rule: node.rule.label().to_string(),
        conclusion: node.conclusion.to_string(),
        message,
    })
}

fn arity(node: &ProofNode, n: usize) -> Result<(), String> {
    if node.children.len() != n {
        return Err(format!(
            "expected {n} premises, found {}",
            node.children.len()
        ));
    }
    Ok(())
}

fn check_step(node: &ProofNode, theory: &Theory, sys: &DeductiveSystem) -> Result<(), String> {
    let concl = &node.conclusion;
    let kids = &node.children;
    let same = |a: &Formula, b: &Formula, what: &str| {
        if alpha_eq(a, b) {
            Ok(())
        } else {
            Err(format!("{what}: expected `{b}`, found `{a}`"))
        }
    };
    match &node.rule {
        Rule::Premise => {
            arity(node, 0)?;
            if theory.contains(concl) {
                Ok(())
            } else {
                Err("not a member of the theory".into())
            }
        }
        Rule::Axiom(ax) => {
            arity(node, 0)?;
            match ax.instance(sys)? {
                None if is_tautology(concl) => Ok(()),
                None => Err("not a tautology (or too many letters)".into()),
                Some(inst) => same(concl, &inst, "axiom instance"),
            }
        }
        Rule::ModusPonens => {
            arity(node, 2)?;
            let Formula::Imp(a, b) = &kids[1].conclusion else {
                return Err("second premise is not an implication".into());
            };
            same(&kids[0].conclusion, a, "antecedent")?;
            same(concl, b, "consequent")
        }
        Rule::Conjunction => {
            let Formula::And(parts) = concl else {
                return Err("conclusion is not a conjunction".into());
            };
            arity(node, parts.len())?;
            kids.iter()
                .zip(parts)
                .try_for_each(|(k, p)| same(&k.conclusion, p, "conjunct"))
        }
        Rule::Generalization { vars } => {
            arity(node, 1)?;
            if vars.is_empty() {
                return Err("empty block".into());
            }
            same(
                concl,
                &Formula::forall(vars.clone(), kids[0].conclusion.clone()),
                "generalization",
            )
        }
        Rule::Restriction { vars, body } => {
            if sys.restriction == super::Restriction::None {
                return Err("the system has no restriction rule".into());
            }
            if vars.is_empty() {
                return Err("empty block".into());
            }
            let premises = sys.restriction.premises(vars, body);
            arity(node, premises.len())?;
            kids.iter()
                .zip(&premises)
                .try_for_each(|(k, p)| same(&k.conclusion, p, "instance"))?;
            same(
                concl,
                &sys.restriction.conclusion(vars, body),
                "restriction conclusion",
            )
        }
        Rule::UniquenessRewrite => {
            arity(node, 1)?;
            let thetas = sys.thetas();
            if thetas.is_empty() {
                return Err("rewrites need uniqueness formulas".into());
            }
            if nf_equivalent(&kids[0].conclusion, concl, thetas, sys.guard()) {
                Ok(())
            } else {
                Err(format!(
                    "`{}` does not rewrite to the conclusion",
                    kids[0].conclusion
                ))
            }
        }
        Rule::Choice { kind, blocks } => {
            arity(node, 1)?;
            let enabled = match kind {
                ChoiceKind::Independent => sys.independent_choice,
                ChoiceKind::Dependent => sys.dependent_choice,
            };
            if !enabled {
                return Err("this choice rule is not enabled".into());
            }
            let out =
                choice_rule_apply(*kind, &kids[0].conclusion, blocks).map_err(|e| e.to_string())?;
            same(concl, &out, "choice conclusion")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::ThetaSet;
    use crate::syntax::uniqueness::Theta;
    use crate::syntax::{parse_formula, Vocabulary};

    fn v() -> Vocabulary {
        Vocabulary::new()
            .with_relation("P", 1)
            .with_constant("a")
            .with_constant("b")
    }

    fn f(s: &str) -> Formula {
        parse_formula(s, &v()).unwrap()
    }

    fn theory(fs: &[&str]) -> Theory {
        Theory::from_sentences("T", v(), fs.iter().map(|s| f(s)))
    }

    #[test]
    fn s_rule_proof() {
        let sys = DeductiveSystem::s_rule(vec![Term::constant("a"), Term::constant("b")]);
        let t = theory(&["P(a)", "P(b)"]);
        let proof = ProofNode::new(
            f("forall x . P(x)"),
            Rule::Restriction {
                vars: vec![Symbol::new("x")],
                body: f("P(x)"),
            },
            vec![ProofNode::premise(f("P(a)")), ProofNode::premise(f("P(b)"))],
        );
        check_proof(&proof, &t, &sys).unwrap();
        let short = ProofNode {
            children: vec![ProofNode::premise(f("P(a)"))],
            ..proof.clone()
        };
        assert!(check_proof(&short, &t, &sys).is_err());
        assert!(check_proof(&proof, &t, &DeductiveSystem::classical()).is_err());
    }

    #[test]
    fn modus_ponens_with_tautology() {
        let t = theory(&["P(a)"]);
        let p = ProofNode::by_tautology(ProofNode::premise(f("P(a)")), f("~~P(a)"));
        check_proof(&p, &t, &DeductiveSystem::classical()).unwrap();
        let bad = ProofNode::by_tautology(ProofNode::premise(f("P(a)")), f("P(b)"));
        let err = check_proof(&bad, &t, &DeductiveSystem::classical()).unwrap_err();
        assert_eq!(err.path, vec![1]);
    }

    #[test]
    fn theta_axioms_need_theta_system() {
        let th = Theta::new(Symbol::new("x"), f("x = a")).unwrap();
        let ax = Axiom::ExistsWeaken {
            vars: vec![Symbol::new("x")],
            body: f("P(x)"),
            thetas: vec![0],
        };
        let concl = f("(exists x . (P(x) & x = a)) -> exists x . P(x)");
        let node = ProofNode::axiom(concl, ax);
        let t = theory(&[]);
        check_proof(
            &node,
            &t,
            &DeductiveSystem::theta_rule(ThetaSet::new(vec![th])),
        )
        .unwrap();
        assert!(check_proof(&node, &t, &DeductiveSystem::classical()).is_err());
    }

    #[test]
    fn rewrite_moves_prefix() {
        let th = Theta::new(Symbol::new("x"), f("x = a")).unwrap();
        let sys = DeductiveSystem::theta_rule(ThetaSet::new(vec![th]));
        let t = theory(&["~exists x . (P(x) & x = a)"]);
        let node = ProofNode::new(
            f("exists x . (~P(x) & x = a)"),
            Rule::UniquenessRewrite,
            vec![ProofNode::premise(f("~exists x . (P(x) & x = a)"))],
        );
        check_proof(&node, &t, &sys).unwrap();
        assert!(check_proof(&node, &t, &DeductiveSystem::classical()).is_err());
    }
}
