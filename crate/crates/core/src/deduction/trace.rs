//! JSON proof traces: one record per distinct subproof, root first, ids
//! assigned in pre-order.

use super::proof::{Axiom, ProofNode, Rule};
use crate::infinitary::{BasicAxiom, Cell, ChoiceKind, Distributivity};
use crate::syntax::{parse_formula, parse_term, Formula, Symbol, Term, Vocabulary};
use serde_json::{json, Map, Value};
use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TraceError {
    #[error("malformed trace: {0}")]
    Shape(String),
    #[error("node {node}: cannot parse `{text}`: {message}")]
    Parse {
        node: usize,
        text: String,
        message: String,
    },
    #[error("node {0}: unknown rule `{1}`")]
    UnknownRule(usize, String),
    #[error("node {0} refers to a missing node or to itself")]
    Dangling(usize),
}

pub fn proof_to_json(proof: &ProofNode) -> Value {
    let mut ids: HashMap<&ProofNode, usize> = HashMap::new();
    let mut order: Vec<&ProofNode> = Vec::new();
    number(proof, &mut ids, &mut order);
    let nodes: Vec<Value> = order
        .iter()
        .enumerate()
        .map(|(id, n)| {
            let children: Vec<usize> = n.children.iter().map(|c| ids[c]).collect();
            let mut rec = Map::new();
            rec.insert("id".into(), json!(id));
            rec.insert("rule".into(), json!(n.rule.label()));
            rec.insert("conclusion".into(), json!(n.conclusion.to_string()));
            rec.insert("children".into(), json!(children));
            let params = params(&n.rule);
            if !params.is_empty() {
                rec.insert("params".into(), Value::Object(params));
            }
            Value::Object(rec)
        })
        .collect();
    json!({ "root": 0, "nodes": nodes })
}

fn number<'a>(
    n: &'a ProofNode,
    ids: &mut HashMap<&'a ProofNode, usize>,
    order: &mut Vec<&'a ProofNode>,
) {
    if ids.contains_key(n) {
        return;
    }
    ids.insert(n, order.len());
    order.push(n);
    for c in &n.children {
        number(c, ids, order);
    }
}

fn strs<T: ToString>(xs: &[T]) -> Value {
    json!(xs.iter().map(T::to_string).collect::<Vec<_>>())
}

fn params(rule: &Rule) -> Map<String, Value> {
    let mut m = Map::new();
    let mut put = |k: &str, v: Value| {
        m.insert(k.to_string(), v);
    };
    match rule {
        Rule::Premise | Rule::ModusPonens | Rule::Conjunction | Rule::UniquenessRewrite => {}
        Rule::Generalization { vars } => put("vars", strs(vars)),
        Rule::Restriction { vars, body } => {
            put("vars", strs(vars));
            put("body", json!(body.to_string()));
        }
        Rule::Choice { blocks, .. } => put(
            "blocks",
            json!(blocks.iter().map(|b| strs(b)).collect::<Vec<_>>()),
        ),
        Rule::Axiom(ax) => match ax {
            Axiom::Tautology => {}
            Axiom::InstanceContra { vars, body, terms }
            | Axiom::ExistsIntro { vars, body, terms } => {
                put("vars", strs(vars));
                put("body", json!(body.to_string()));
                put("terms", strs(terms));
            }
            Axiom::QuantDuality { vars, body, guard } => {
                put("vars", strs(vars));
                put("body", json!(body.to_string()));
                if let Some(u) = guard {
                    put("guard", json!(u.to_string()));
                }
            }
            Axiom::ThetaInstanceContra { vars, body, thetas }
            | Axiom::ExistsWeaken { vars, body, thetas } => {
                put("vars", strs(vars));
                put("body", json!(body.to_string()));
                put("thetas", json!(thetas));
            }
            Axiom::Basic(b) => basic_params(b, &mut put),
            Axiom::Distributivity(d) => {
                put("base", strs(&d.base));
                put("table", json!(d.table));
            }
        },
    }
    m
}

fn basic_params(b: &BasicAxiom, put: &mut impl FnMut(&str, Value)) {
    let f = |x: &Formula| json!(x.to_string());
    match b {
        BasicAxiom::P1 { phi, psi } | BasicAxiom::P3 { phi, psi } => {
            put("phi", f(phi));
            put("psi", f(psi));
        }
        BasicAxiom::P2 { phi, psi, chi } => {
            put("phi", f(phi));
            put("psi", f(psi));
            put("chi", f(chi));
        }
        BasicAxiom::P4 { phi, parts } => {
            put("phi", f(phi));
            put("parts", strs(parts));
        }
        BasicAxiom::P5 { parts, beta } => {
            put("parts", strs(parts));
            put("beta", json!(beta));
        }
        BasicAxiom::Q1 { vars, phi, psi } => {
            put("vars", strs(vars));
            put("phi", f(phi));
            put("psi", f(psi));
        }
        BasicAxiom::Q2 { vars, phi, terms } => {
            put("vars", strs(vars));
            put("phi", f(phi));
            put("terms", strs(terms));
        }
        BasicAxiom::E1 { term } => put("term", json!(term.to_string())),
        BasicAxiom::E2 {
            vars,
            phi,
            left,
            right,
        } => {
            put("vars", strs(vars));
            put("phi", f(phi));
            put("left", strs(left));
            put("right", strs(right));
        }
    }
}

struct Reader<'a> {
    vocab: &'a Vocabulary,
    node: usize,
    rec: &'a Map<String, Value>,
}

impl Reader<'_> {
    fn field(&self, k: &str) -> Result<&Value, TraceError> {
        self.rec
            .get(k)
            .or_else(|| self.rec.get("params").and_then(|p| p.get(k)))
            .ok_or_else(|| TraceError::Shape(format!("node {} lacks `{k}`", self.node)))
    }

    fn text(&self, k: &str) -> Result<&str, TraceError> {
        self.field(k)?
            .as_str()
            .ok_or_else(|| TraceError::Shape(format!("node {}: `{k}` is not a string", self.node)))
    }

    fn list(&self, k: &str) -> Result<&Vec<Value>, TraceError> {
        self.field(k)?
            .as_array()
            .ok_or_else(|| TraceError::Shape(format!("node {}: `{k}` is not a list", self.node)))
    }

    fn formula_of(&self, text: &str) -> Result<Formula, TraceError> {
        parse_formula(text, self.vocab).map_err(|e| TraceError::Parse {
            node: self.node,
            text: text.to_string(),
            message: e.to_string(),
        })
    }

    fn formula(&self, k: &str) -> Result<Formula, TraceError> {
        self.formula_of(self.text(k)?)
    }

    fn formulas(&self, k: &str) -> Result<Vec<Formula>, TraceError> {
        self.list(k)?
            .iter()
            .map(|v| self.formula_of(v.as_str().unwrap_or_default()))
            .collect()
    }

    fn term_of(&self, text: &str) -> Result<Term, TraceError> {
        parse_term(text, self.vocab).map_err(|e| TraceError::Parse {
            node: self.node,
            text: text.to_string(),
            message: e.to_string(),
        })
    }

    fn terms(&self, k: &str) -> Result<Vec<Term>, TraceError> {
        self.list(k)?
            .iter()
            .map(|v| self.term_of(v.as_str().unwrap_or_default()))
            .collect()
    }

    fn vars_of(v: &Value) -> Vec<Symbol> {
        v.as_array()
            .map(|a| {
                a.iter()
                    .filter_map(Value::as_str)
                    .map(Symbol::new)
                    .collect()
            })
            .unwrap_or_default()
    }

    fn vars(&self, k: &str) -> Result<Vec<Symbol>, TraceError> {
        Ok(Self::vars_of(self.field(k)?))
    }

    fn indices(&self, k: &str) -> Result<Vec<usize>, TraceError> {
        Ok(self
            .list(k)?
            .iter()
            .filter_map(Value::as_u64)
            .map(|i| i as usize)
            .collect())
    }

    fn index(&self, k: &str) -> Result<usize, TraceError> {
        self.field(k)?
            .as_u64()
            .map(|i| i as usize)
            .ok_or_else(|| TraceError::Shape(format!("node {}: `{k}` is not an index", self.node)))
    }

    fn rule(&self) -> Result<Rule, TraceError> {
        let label = self.text("rule")?;
        let ax = |a: Axiom| Ok(Rule::Axiom(a));
        match label {
            "premise" => Ok(Rule::Premise),
            "mp" => Ok(Rule::ModusPonens),
            "conjunction" => Ok(Rule::Conjunction),
            "rewrite" => Ok(Rule::UniquenessRewrite),
            "generalization" => Ok(Rule::Generalization {
                vars: self.vars("vars")?,
            }),
            "restriction" => Ok(Rule::Restriction {
                vars: self.vars("vars")?,
                body: self.formula("body")?,
            }),
            "choice" | "dependent-choice" => Ok(Rule::Choice {
                kind: if label == "choice" {
                    ChoiceKind::Independent
                } else {
                    ChoiceKind::Dependent
                },
                blocks: self.list("blocks")?.iter().map(Self::vars_of).collect(),
            }),
            "tautology" => ax(Axiom::Tautology),
            "instance-contra" => ax(Axiom::InstanceContra {
                vars: self.vars("vars")?,
                body: self.formula("body")?,
                terms: self.terms("terms")?,
            }),
            "exists-intro" => ax(Axiom::ExistsIntro {
                vars: self.vars("vars")?,
                body: self.formula("body")?,
                terms: self.terms("terms")?,
            }),
            "duality" => ax(Axiom::QuantDuality {
                vars: self.vars("vars")?,
                body: self.formula("body")?,
                guard: self
                    .field("guard")
                    .ok()
                    .and_then(Value::as_str)
                    .map(Symbol::new),
            }),
            "theta-instance-contra" => ax(Axiom::ThetaInstanceContra {
                vars: self.vars("vars")?,
                body: self.formula("body")?,
                thetas: self.indices("thetas")?,
            }),
            "exists-weaken" => ax(Axiom::ExistsWeaken {
                vars: self.vars("vars")?,
                body: self.formula("body")?,
                thetas: self.indices("thetas")?,
            }),
            "distributivity" => {
                let table: Vec<Vec<Cell>> = serde_json::from_value(self.field("table")?.clone())
                    .map_err(|e| TraceError::Shape(format!("node {}: {e}", self.node)))?;
                ax(Axiom::Distributivity(Distributivity {
                    base: self.formulas("base")?,
                    table,
                }))
            }
            "P1" => ax(Axiom::Basic(BasicAxiom::P1 {
                phi: self.formula("phi")?,
                psi: self.formula("psi")?,
            })),
            "P2" => ax(Axiom::Basic(BasicAxiom::P2 {
                phi: self.formula("phi")?,
                psi: self.formula("psi")?,
                chi: self.formula("chi")?,
            })),
            "P3" => ax(Axiom::Basic(BasicAxiom::P3 {
                phi: self.formula("phi")?,
                psi: self.formula("psi")?,
            })),
            "P4" => ax(Axiom::Basic(BasicAxiom::P4 {
                phi: self.formula("phi")?,
                parts: self.formulas("parts")?,
            })),
            "P5" => ax(Axiom::Basic(BasicAxiom::P5 {
                parts: self.formulas("parts")?,
                beta: self.index("beta")?,
            })),
            "Q1" => ax(Axiom::Basic(BasicAxiom::Q1 {
                vars: self.vars("vars")?,
                phi: self.formula("phi")?,
                psi: self.formula("psi")?,
            })),
            "Q2" => ax(Axiom::Basic(BasicAxiom::Q2 {
                vars: self.vars("vars")?,
                phi: self.formula("phi")?,
                terms: self.terms("terms")?,
            })),
            "E1" => ax(Axiom::Basic(BasicAxiom::E1 {
                term: self.term_of(self.text("term")?)?,
            })),
            "E2" => ax(Axiom::Basic(BasicAxiom::E2 {
                vars: self.vars("vars")?,
                phi: self.formula("phi")?,
                left: self.terms("left")?,
                right: self.terms("right")?,
            })),
            other => Err(TraceError::UnknownRule(self.node, other.to_string())),
        }
    }
}

/// Rebuilds a proof from [`proof_to_json`] output.
pub fn proof_from_json(value: &Value, vocab: &Vocabulary) -> Result<ProofNode, TraceError> {
    let nodes = value
        .get("nodes")
        .and_then(Value::as_array)
        .ok_or_else(|| TraceError::Shape("missing `nodes`".into()))?;
    let root = value.get("root").and_then(Value::as_u64).unwrap_or(0) as usize;
    let mut records = Vec::with_capacity(nodes.len());
    for (pos, raw) in nodes.iter().enumerate() {
        let rec = raw
            .as_object()
            .ok_or_else(|| TraceError::Shape(format!("record {pos} is not an object")))?;
        let id = rec
            .get("id")
            .and_then(Value::as_u64)
            .map_or(pos, |i| i as usize);
        if id != pos {
            return Err(TraceError::Shape(format!("record {pos} has id {id}")));
        }
        records.push(rec);
    }
    let mut built: Vec<Option<ProofNode>> = vec![None; records.len()];
    let mut open = vec![false; records.len()];
    build(root, &records, vocab, &mut built, &mut open)
}

fn build(
    id: usize,
    records: &[&Map<String, Value>],
    vocab: &Vocabulary,
    built: &mut [Option<ProofNode>],
    open: &mut [bool],
) -> Result<ProofNode, TraceError> {
    if let Some(done) = built.get(id).and_then(Clone::clone) {
        return Ok(done);
    }
    let rec = records.get(id).ok_or(TraceError::Dangling(id))?;
    if std::mem::replace(&mut open[id], true) {
        return Err(TraceError::Dangling(id));
    }
    let r = Reader {
        vocab,
        node: id,
        rec,
    };
    let conclusion = r.formula("conclusion")?;
    let rule = r.rule()?;
    let mut children = Vec::new();
    for c in r.indices("children")? {
        if c >= records.len() || open[c] {
            return Err(TraceError::Dangling(id));
        }
        children.push(build(c, records, vocab, built, open)?);
    }
    open[id] = false;
    let node = ProofNode {
        conclusion,
        rule,
        children,
    };
    built[id] = Some(node.clone());
    Ok(node)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deduction::{check_proof, decide, Mode, StructureOracle};
    use crate::diagrams::{generalized_diagram, ThetaSet};
    use crate::structures::{defining_formula, Structure};

    #[test]
    fn round_trip_preserves_checkability() {
        let v = Vocabulary::new().with_relation("<", 2);
        let a = Structure::builder("A2", v.clone())
            .elements(["a", "b"])
            .tuple("<", &["a", "b"])
            .build()
            .unwrap();
        let thetas = ThetaSet::new(
            a.elements()
                .map(|e| defining_formula(&a, e).unwrap())
                .collect(),
        );
        let dg = generalized_diagram(&a, &thetas).unwrap();
        let mode = Mode::Theta {
            thetas,
            guard: None,
        };
        let sigma = parse_formula("forall x . exists y . (x < y | (y < x | x = y))", &v).unwrap();
        let d = decide(&StructureOracle { structure: &a }, &sigma, &mode).unwrap();
        let json = proof_to_json(&d.proof);
        let back = proof_from_json(&json, &v).unwrap();
        assert_eq!(back, d.proof);
        check_proof(&back, &dg, &mode.system()).unwrap();
        assert_eq!(proof_to_json(&back), json);
    }

    #[test]
    fn rejects_dangling_children() {
        let v = Vocabulary::new().with_relation("P", 1).with_constant("c");
        let bad = json!({"root": 0, "nodes": [{"id": 0, "rule": "mp", "conclusion": "P(c)", "children": [0]}]});
        assert!(matches!(
            proof_from_json(&bad, &v),
            Err(TraceError::Dangling(0))
        ));
    }
}
