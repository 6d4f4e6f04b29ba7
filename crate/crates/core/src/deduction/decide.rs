use super::proof::{Axiom, ProofNode, Rule};
use super::DeductiveSystem;
use crate::diagrams::{Theory, ThetaSet};
use crate::infinitary::{BasicAxiom, SchemaError};
use crate::structures::{EvalError, Structure};
use crate::syntax::uniqueness::{theta_prefix, Theta};
use crate::syntax::{
    alpha_eq, relativize, substitute, Formula, Substitution, Symbol, SyntaxError, Term,
};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecideError {
    #[error("the theory decides neither `{0}` nor its negation")]
    Undetermined(String),
    #[error("the theory contains both `{0}` and its negation")]
    Inconsistent(String),
    #[error("`{0}` is not finitary; use the wide decision procedure")]
    NotFinitary(String),
    #[error("restriction term `{0}` is not closed")]
    OpenTerm(String),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Budget(SchemaError),
}

/// How instances are named: by terms (S-rule) or by uniqueness formulas
/// (Θ-rule, relativized to `guard` when set).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    Terms(Vec<Term>),
    Theta {
        thetas: ThetaSet,
        guard: Option<Symbol>,
    },
}

impl Mode {
    pub fn system(&self) -> DeductiveSystem {
        match self {
            Mode::Terms(s) => DeductiveSystem::s_rule(s.clone()),
            Mode::Theta {
                thetas,
                guard: None,
            } => DeductiveSystem::theta_rule(thetas.clone()),
            Mode::Theta {
                thetas,
                guard: Some(u),
            } => DeductiveSystem::theta_u_rule(thetas.clone(), u.clone()),
        }
    }

    fn guard(&self) -> Option<&Symbol> {
        match self {
            Mode::Theta { guard, .. } => guard.as_ref(),
            Mode::Terms(_) => None,
        }
    }

    fn width(&self) -> usize {
        match self {
            Mode::Terms(s) => s.len(),
            Mode::Theta { thetas, .. } => thetas.len(),
        }
    }
}

/// Answers atomic questions. A query is a closed atom (term mode) or a
/// Θ-atomic sentence; the answer concerns its relativization in U-mode.
pub trait AtomOracle {
    fn query(&self, q: &Formula, guard: Option<&Symbol>) -> Result<bool, DecideError>;

    /// A derivation of the literal the oracle just vouched for.
    fn justify(&self, literal: Formula) -> ProofNode {
        ProofNode::premise(literal)
    }
}

/// Reads answers off a finite structure.
pub struct StructureOracle<'a> {
    pub structure: &'a Structure,
}

impl AtomOracle for StructureOracle<'_> {
    fn query(&self, q: &Formula, guard: Option<&Symbol>) -> Result<bool, DecideError> {
        let q = match guard {
            Some(u) => relativize(q, u),
            None => q.clone(),
        };
        Ok(self.structure.eval_sentence(&q)?)
    }
}

/// Reads answers off a theory that decides every relevant atom, such as a
/// (generalized) diagram. Equalities between closed terms are accepted in
/// either orientation.
pub struct TheoryOracle<'a> {
    pub theory: &'a Theory,
}

impl TheoryOracle<'_> {
    fn lookup(&self, lit: &Formula) -> Result<bool, DecideError> {
        let pos = self.theory.contains(lit);
        let neg = self.theory.contains(&Formula::not(lit.clone()));
        match (pos, neg) {
            (true, true) => Err(DecideError::Inconsistent(lit.to_string())),
            (true, false) => Ok(true),
            (false, true) => Ok(false),
            (false, false) => Err(DecideError::Undetermined(lit.to_string())),
        }
    }
}

fn swapped(f: &Formula) -> Option<Formula> {
    match f {
        Formula::Eq(s, t) if s.is_closed() && t.is_closed() => {
            Some(Formula::Eq(t.clone(), s.clone()))
        }
        _ => None,
    }
}

impl AtomOracle for TheoryOracle<'_> {
    fn query(&self, q: &Formula, guard: Option<&Symbol>) -> Result<bool, DecideError> {
        let lit = match guard {
            Some(u) => relativize(q, u),
            None => q.clone(),
        };
        match self.lookup(&lit) {
            Err(DecideError::Undetermined(m)) => match swapped(&lit) {
                Some(s) => self.lookup(&s),
                None => Err(DecideError::Undetermined(m)),
            },
            other => other,
        }
    }

    fn justify(&self, literal: Formula) -> ProofNode {
        if self.theory.contains(&literal) {
            return ProofNode::premise(literal);
        }
        match &literal {
            Formula::Eq(s, t) if swapped(&literal).is_some() => flip_equality(s, t, true),
            Formula::Not(g) => match &**g {
                Formula::Eq(s, t) if swapped(g).is_some() => flip_equality(s, t, false),
                _ => ProofNode::premise(literal),
            },
            _ => ProofNode::premise(literal),
        }
    }
}

/// Derives `s = t` from `t = s` (or `~s = t` from `~t = s`) with the
/// equality axioms.
fn flip_equality(s: &Term, t: &Term, positive: bool) -> ProofNode {
    let z = Symbol::new("z");
    let eq = |a: &Term, b: &Term| Formula::Eq(a.clone(), b.clone());
    let e2 = |phi: Formula, left: &Term, right: &Term| {
        let ax = BasicAxiom::E2 {
            vars: vec![z.clone()],
            phi,
            left: vec![left.clone()],
            right: vec![right.clone()],
        };
        let inst = ax
            .instance()
            .expect("closed terms satisfy the side conditions");
        ProofNode::axiom(inst, Axiom::Basic(ax))
    };
    let refl =
        |a: &Term| ProofNode::axiom(eq(a, a), Axiom::Basic(BasicAxiom::E1 { term: a.clone() }));
    if positive {
        // (t = s) -> ((t = t) <-> (s = t))
        let ax = e2(Formula::Eq(Term::Var(z.clone()), t.clone()), t, s);
        let both = ProofNode::mp(ProofNode::premise(eq(t, s)), ax);
        let forward = ProofNode::by_tautology(both, Formula::imp(eq(t, t), eq(s, t)));
        ProofNode::mp(refl(t), forward)
    } else {
        // (s = t) -> ((s = s) <-> (t = s))
        let ax = e2(Formula::Eq(Term::Var(z.clone()), s.clone()), s, t);
        let (p, q, r) = (eq(s, t), eq(s, s), eq(t, s));
        let bridge = Formula::imp(
            ax.conclusion.clone(),
            Formula::imp(
                q.clone(),
                Formula::imp(Formula::not(r.clone()), Formula::not(p)),
            ),
        );
        let step = ProofNode::mp(ax, ProofNode::tautology(bridge));
        let step = ProofNode::mp(refl(s), step);
        ProofNode::mp(ProofNode::premise(Formula::not(r)), step)
    }
}

/// The verdict on one sentence with a derivation of the corresponding
/// claim (`σ^U` or `¬σ^U` in U-mode).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub sentence: Formula,
    pub holds: bool,
    pub proof: ProofNode,
}

impl Decision {
    pub fn claim(&self) -> &Formula {
        &self.proof.conclusion
    }
}

/// Decides a finitary sentence by structural recursion, emitting a proof
/// in the system of `mode` from the oracle's literals.
pub fn decide(
    oracle: &dyn AtomOracle,
    sigma: &Formula,
    mode: &Mode,
) -> Result<Decision, DecideError> {
    if !sigma.is_finitary() {
        return Err(DecideError::NotFinitary(sigma.to_string()));
    }
    decide_wide(oracle, sigma, mode)
}

/// [`decide`] without the width check.
pub fn decide_wide(
    oracle: &dyn AtomOracle,
    sigma: &Formula,
    mode: &Mode,
) -> Result<Decision, DecideError> {
    sigma.validate()?;
    sigma.require_sentence()?;
    if let Mode::Terms(s) = mode {
        if let Some(t) = s.iter().find(|t| !t.is_closed()) {
            return Err(DecideError::OpenTerm(t.to_string()));
        }
    }
    let engine = Engine { oracle, mode };
    let (holds, proof) = engine.run(sigma, &Binding::new())?;
    let target = if holds {
        engine.rel(sigma.clone())
    } else {
        engine.rel(Formula::not(sigma.clone()))
    };
    Ok(Decision {
        sentence: sigma.clone(),
        holds,
        proof: engine.fit(proof, target),
    })
}

type Binding = BTreeMap<Symbol, usize>;

struct Engine<'a> {
    oracle: &'a dyn AtomOracle,
    mode: &'a Mode,
}

impl Engine<'_> {
    fn rel(&self, f: Formula) -> Formula {
        match self.mode.guard() {
            Some(u) => relativize(&f, u),
            None => f,
        }
    }

    /// Closes `psi` over its free variables outside `skip` using `b`.
    fn bar_except(&self, psi: &Formula, b: &Binding, skip: &[Symbol]) -> Formula {
        let vars: Vec<Symbol> = psi
            .free_vars_ordered()
            .into_iter()
            .filter(|v| !skip.contains(v))
            .collect();
        match self.mode {
            Mode::Terms(s) => {
                let map: Substitution = vars.iter().map(|v| (v.clone(), s[b[v]].clone())).collect();
                substitute(psi, &map)
            }
            Mode::Theta { thetas, .. } => {
                let bindings: Vec<(Symbol, &Theta)> = vars
                    .iter()
                    .map(|v| (v.clone(), &thetas.members()[b[v]]))
                    .collect();
                theta_prefix(&bindings, psi.clone())
            }
        }
    }

    fn claim(&self, psi: &Formula, b: &Binding) -> Formula {
        self.rel(self.bar_except(psi, b, &[]))
    }

    fn neg_claim(&self, psi: &Formula, b: &Binding) -> Formula {
        self.claim(&Formula::not(psi.clone()), b)
    }

    fn fit(&self, node: ProofNode, target: Formula) -> ProofNode {
        if alpha_eq(&node.conclusion, &target) {
            node
        } else {
            ProofNode::new(target, Rule::UniquenessRewrite, vec![node])
        }
    }

    fn taut_step(&self, minor: ProofNode, conclusion: Formula) -> ProofNode {
        ProofNode::by_tautology(minor, conclusion)
    }

    /// The truth of `psi` under `b`, with a proof of `claim(psi)` or of
    /// `claim(~psi)`.
    fn run(&self, psi: &Formula, b: &Binding) -> Result<(bool, ProofNode), DecideError> {
        match psi {
            Formula::Atom(..) | Formula::Eq(..) => {
                let q = self.bar_except(psi, b, &[]);
                let holds = self.oracle.query(&q, self.mode.guard())?;
                let q = self.rel(q);
                if holds {
                    Ok((true, self.oracle.justify(q)))
                } else {
                    let leaf = self.oracle.justify(Formula::not(q));
                    Ok((false, self.fit(leaf, self.neg_claim(psi, b))))
                }
            }
            Formula::Not(chi) => {
                let (holds, p) = self.run(chi, b)?;
                if holds {
                    let c = p.conclusion.clone();
                    let dn = self.taut_step(p, Formula::not(Formula::not(c)));
                    Ok((false, self.fit(dn, self.neg_claim(psi, b))))
                } else {
                    Ok((true, p))
                }
            }
            Formula::And(parts) => {
                let mut proofs = Vec::with_capacity(parts.len());
                for chi in parts {
                    let (holds, p) = self.run(chi, b)?;
                    if !holds {
                        let not_c = Formula::not(self.claim(chi, b));
                        let p = self.fit(p, not_c);
                        let all = Formula::And(parts.iter().map(|g| self.claim(g, b)).collect());
                        let out = self.taut_step(p, Formula::not(all));
                        return Ok((false, self.fit(out, self.neg_claim(psi, b))));
                    }
                    proofs.push(p);
                }
                let concl = Formula::And(proofs.iter().map(|p| p.conclusion.clone()).collect());
                let node = ProofNode::new(concl, Rule::Conjunction, proofs);
                Ok((true, self.fit(node, self.claim(psi, b))))
            }
            Formula::Or(parts) => {
                let claims: Vec<Formula> = parts.iter().map(|g| self.claim(g, b)).collect();
                let mut refutations = Vec::with_capacity(parts.len());
                for (chi, c) in parts.iter().zip(&claims) {
                    let (holds, p) = self.run(chi, b)?;
                    if holds {
                        let out = self.taut_step(p, Formula::Or(claims.clone()));
                        return Ok((true, self.fit(out, self.claim(psi, b))));
                    }
                    refutations.push(self.fit(p, Formula::not(c.clone())));
                }
                let concl =
                    Formula::And(refutations.iter().map(|p| p.conclusion.clone()).collect());
                let all = ProofNode::new(concl, Rule::Conjunction, refutations);
                let out = self.taut_step(all, Formula::not(Formula::Or(claims)));
                Ok((false, self.fit(out, self.neg_claim(psi, b))))
            }
            Formula::Imp(a, c) => {
                let ca = self.claim(a, b);
                let cc = self.claim(c, b);
                let imp = Formula::imp(ca.clone(), cc.clone());
                let (ha, pa) = self.run(a, b)?;
                if !ha {
                    let pa = self.fit(pa, Formula::not(ca));
                    return Ok((true, self.fit(self.taut_step(pa, imp), self.claim(psi, b))));
                }
                let (hc, pc) = self.run(c, b)?;
                if hc {
                    return Ok((true, self.fit(self.taut_step(pc, imp), self.claim(psi, b))));
                }
                let pc = self.fit(pc, Formula::not(cc.clone()));
                let both = ProofNode::new(
                    Formula::And(vec![ca, Formula::not(cc)]),
                    Rule::Conjunction,
                    vec![pa, pc],
                );
                let out = self.taut_step(both, Formula::not(imp));
                Ok((false, self.fit(out, self.neg_claim(psi, b))))
            }
            Formula::Forall(ys, chi) => self.quantifier(psi, ys, chi, b, true),
            Formula::Exists(ys, chi) => self.quantifier(psi, ys, chi, b, false),
        }
    }

    fn quantifier(
        &self,
        psi: &Formula,
        ys: &[Symbol],
        chi: &Formula,
        b: &Binding,
        universal: bool,
    ) -> Result<(bool, ProofNode), DecideError> {
        let phi = self.bar_except(chi, b, ys);
        let sys = self.mode.system();
        let mut instances = Vec::new();
        for idx in crate::structures::tuples(self.mode.width(), ys.len()) {
            let mut inner = b.clone();
            inner.extend(ys.iter().cloned().zip(idx.iter().copied()));
            let (holds, p) = self.run(chi, &inner)?;
            if holds != universal {
                let node = if universal {
                    self.instance_contra(ys, &phi, &idx, p)
                } else {
                    self.exists_intro(ys, &phi, &idx, p)
                };
                let target = if universal {
                    self.neg_claim(psi, b)
                } else {
                    self.claim(psi, b)
                };
                return Ok((!universal, self.fit(node, target)));
            }
            instances.push(p);
        }
        let body = if universal {
            phi.clone()
        } else {
            Formula::not(phi.clone())
        };
        let premises = sys.restriction.premises(ys, &body);
        let children: Vec<ProofNode> = instances
            .into_iter()
            .zip(premises)
            .map(|(p, target)| self.fit(p, target))
            .collect();
        let concl = sys.restriction.conclusion(ys, &body);
        let node = ProofNode::new(
            concl,
            Rule::Restriction {
                vars: ys.to_vec(),
                body,
            },
            children,
        );
        if universal {
            return Ok((true, self.fit(node, self.claim(psi, b))));
        }
        let duality = Axiom::QuantDuality {
            vars: ys.to_vec(),
            body: self.rel(phi.clone()),
            guard: self.mode.guard().cloned(),
        };
        let inst = duality
            .instance(&sys)
            .expect("duality has no side conditions")
            .expect("not a tautology");
        let out = ProofNode::mp(node, ProofNode::axiom(inst, duality));
        Ok((false, self.fit(out, self.neg_claim(psi, b))))
    }

    /// From a refuted instance, refutes the universal.
    fn instance_contra(
        &self,
        ys: &[Symbol],
        phi: &Formula,
        idx: &[usize],
        p: ProofNode,
    ) -> ProofNode {
        let sys = self.mode.system();
        let ax = match self.mode {
            Mode::Terms(s) => Axiom::InstanceContra {
                vars: ys.to_vec(),
                body: phi.clone(),
                terms: idx.iter().map(|i| s[*i].clone()).collect(),
            },
            Mode::Theta { .. } => Axiom::ThetaInstanceContra {
                vars: ys.to_vec(),
                body: phi.clone(),
                thetas: idx.to_vec(),
            },
        };
        let inst = ax
            .instance(&sys)
            .expect("instance indices are in range")
            .expect("not a tautology");
        let Formula::Imp(ante, _) = &inst else {
            unreachable!("axiom instances are implications")
        };
        let p = self.fit(p, (**ante).clone());
        ProofNode::mp(p, ProofNode::axiom(inst, ax))
    }

    /// From a witnessed instance, proves the existential.
    fn exists_intro(&self, ys: &[Symbol], phi: &Formula, idx: &[usize], p: ProofNode) -> ProofNode {
        let sys = self.mode.system();
        let ax = match self.mode {
            Mode::Terms(s) => Axiom::ExistsIntro {
                vars: ys.to_vec(),
                body: phi.clone(),
                terms: idx.iter().map(|i| s[*i].clone()).collect(),
            },
            Mode::Theta { .. } => Axiom::ExistsWeaken {
                vars: ys.to_vec(),
                body: phi.clone(),
                thetas: idx.to_vec(),
            },
        };
        let inst = ax
            .instance(&sys)
            .expect("instance indices are in range")
            .expect("not a tautology");
        let Formula::Imp(ante, _) = &inst else {
            unreachable!("axiom instances are implications")
        };
        let p = self.fit(p, (**ante).clone());
        ProofNode::mp(p, ProofNode::axiom(inst, ax))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deduction::check_proof;
    use crate::diagrams::{diagram, generalized_diagram, theta_of_terms};
    use crate::syntax::{parse_formula, Vocabulary};

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

    fn f(a: &Structure, s: &str) -> Formula {
        parse_formula(s, a.vocab()).unwrap()
    }

    fn terms() -> Vec<Term> {
        vec![Term::constant("c_a"), Term::constant("c_b")]
    }

    #[test]
    fn term_mode_decides_and_checks() {
        let a = two();
        let dg = diagram(&a).unwrap();
        let mode = Mode::Terms(terms());
        for s in [
            "forall x . exists y . (x < y | (y < x | x = y))",
            "exists x . forall y . ~(y < x)",
            "forall x . x < x",
        ] {
            let sigma = f(&a, s);
            let d = decide(&StructureOracle { structure: &a }, &sigma, &mode).unwrap();
            assert_eq!(d.holds, a.eval_sentence(&sigma).unwrap(), "{s}");
            check_proof(&d.proof, &dg, &mode.system()).unwrap();
            let e = decide(&TheoryOracle { theory: &dg }, &sigma, &mode).unwrap();
            assert_eq!(e.holds, d.holds);
            check_proof(&e.proof, &dg, &mode.system()).unwrap();
        }
    }

    #[test]
    fn theta_mode_uses_rewrites() {
        let a = two();
        let thetas = theta_of_terms(&terms());
        let dg = generalized_diagram(&a, &thetas).unwrap();
        let mode = Mode::Theta {
            thetas,
            guard: None,
        };
        let sigma = f(&a, "forall x . exists y . ~(x = y)");
        let d = decide(&TheoryOracle { theory: &dg }, &sigma, &mode).unwrap();
        assert!(d.holds);
        assert_eq!(d.claim(), &sigma);
        check_proof(&d.proof, &dg, &mode.system()).unwrap();
    }

    #[test]
    fn flipped_equalities_are_derived() {
        let a = two();
        let dg = diagram(&a).unwrap();
        let mode = Mode::Terms(terms());
        let sigma = f(&a, "~(c_b = c_a)");
        let d = decide(&TheoryOracle { theory: &dg }, &sigma, &mode).unwrap();
        assert!(d.holds);
        check_proof(&d.proof, &dg, &mode.system()).unwrap();
        let sigma = f(&a, "exists x . ~(x = c_a)");
        let d = decide(&TheoryOracle { theory: &dg }, &sigma, &mode).unwrap();
        check_proof(&d.proof, &dg, &mode.system()).unwrap();
    }
}
