use crate::{Budget, Failure, Saturation, Source, System};
use restrule::deduction::{
    check_proof as verify, decide as decide_finitary, proof_from_json, proof_to_json,
    saturate as run_saturation, DeductiveSystem, Mode, TheoryOracle, Tower,
};
use restrule::diagrams::{
    diagram as plain_diagram, generalized_diagram, relativized_generalized_diagram, Theory,
    ThetaSet,
};
use restrule::formats::{self, render_theory};
use restrule::glp::{self, interpret, ModalFormula, ModalProof, StageInterpretation};
use restrule::infinitary::{decide_infinitary, WidthBudget};
use restrule::structures::{defining_formula, pd as definable_part, Structure};
use restrule::syntax::{parse_formula, relativize};
use restrule::universe::{GenOptions, SentenceUniverse};
use restrule::{Formula, Symbol, Term, Vocabulary};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::Path;

type Outcome = Result<(), Failure>;

fn domain<E: std::fmt::Display>(e: E) -> Failure {
    Failure::domain(e)
}

fn write_json(path: Option<&Path>, value: Value) -> Outcome {
    if let Some(p) = path {
        let text = serde_json::to_string_pretty(&value).map_err(domain)? + "\n";
        std::fs::write(p, text).map_err(|e| Failure::domain(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

/// `--vocab`, else the header of the first file that names one.
fn vocabulary(src: &Source, others: &[Option<&Path>]) -> Result<Vocabulary, Failure> {
    if let Some(v) = &src.vocab {
        return formats::load_vocabulary(v).map_err(domain);
    }
    for p in std::iter::once(src.structure.as_deref())
        .chain(others.iter().copied())
        .flatten()
    {
        if let Some(v) = formats::header_vocab_path(p).map_err(domain)? {
            return formats::load_vocabulary(&v).map_err(domain);
        }
    }
    Err(Failure::usage(
        "no vocabulary: pass --vocab or name one in a file header",
    ))
}

fn structure(src: &Source, vocab: &Vocabulary) -> Result<Structure, Failure> {
    let path = src
        .structure
        .as_deref()
        .ok_or_else(|| Failure::usage("--structure is required"))?;
    formats::load_structure(path, Some(vocab)).map_err(domain)
}

fn sentence(text: &str, vocab: &Vocabulary) -> Result<Formula, Failure> {
    let f = parse_formula(text, vocab).map_err(|e| Failure::domain(format!("--sentence: {e}")))?;
    vocab.check_formula(&f).map_err(domain)?;
    Ok(f)
}

/// Defining formulas of every element; fails unless `a` is pointwise definable.
fn pd_thetas(a: &Structure) -> Result<ThetaSet, Failure> {
    a.elements()
        .map(|e| defining_formula(a, e).map_err(domain))
        .collect::<Result<_, _>>()
        .map(ThetaSet::new)
}

enum Rule {
    Classical,
    Terms(Vec<Term>),
    Theta(Option<ThetaSet>, Option<Symbol>),
}

fn rule(sys: &System, vocab: &Vocabulary) -> Result<Rule, Failure> {
    let guard = sys.relativize.as_deref().map(Symbol::new);
    if let Some(u) = &guard {
        vocab.require_unary(u).map_err(domain)?;
    }
    let thetas = |p: &Path| formats::load_thetas(p, vocab).map_err(domain);
    match (&sys.theta, sys.rule.as_deref()) {
        (Some(_), Some(_)) => Err(Failure::usage("give either --theta or --rule, not both")),
        (Some(p), None) => Ok(Rule::Theta(Some(thetas(p)?), guard)),
        (None, None) => Ok(Rule::Theta(None, guard)),
        (None, Some(text)) => match text.split_once(':') {
            _ if text == "classical" => {
                if guard.is_some() {
                    return Err(Failure::usage("--relativize needs a theta rule"));
                }
                Ok(Rule::Classical)
            }
            Some(("s-rule", file)) => {
                if guard.is_some() {
                    return Err(Failure::usage("--relativize needs a theta rule"));
                }
                Ok(Rule::Terms(
                    formats::load_terms(Path::new(file), vocab).map_err(domain)?,
                ))
            }
            Some(("theta-rule", file)) => Ok(Rule::Theta(Some(thetas(Path::new(file))?), guard)),
            _ => Err(Failure::usage(format!(
                "unknown rule `{text}`: expected classical, s-rule:<file> or theta-rule:<file>"
            ))),
        },
    }
}

impl Rule {
    /// Theta rules without a file use the defining formulas of `a`.
    fn resolve(self, a: Option<&Structure>) -> Result<Rule, Failure> {
        match self {
            Rule::Theta(None, g) => match a {
                Some(a) => Ok(Rule::Theta(Some(pd_thetas(a)?), g)),
                None => Err(Failure::usage(
                    "pass --theta or --rule, or --structure to define the thetas",
                )),
            },
            r => Ok(r),
        }
    }

    fn system(&self) -> DeductiveSystem {
        match self {
            Rule::Classical => DeductiveSystem::classical(),
            Rule::Terms(ts) => DeductiveSystem::s_rule(ts.clone()),
            Rule::Theta(th, None) => DeductiveSystem::theta_rule(th.clone().unwrap_or_default()),
            Rule::Theta(th, Some(u)) => {
                DeductiveSystem::theta_u_rule(th.clone().unwrap_or_default(), u.clone())
            }
        }
    }

    fn guard(&self) -> Option<&Symbol> {
        match self {
            Rule::Theta(_, g) => g.as_ref(),
            _ => None,
        }
    }

    /// The diagram matching the rule: Dg for terms, Dg_Θ or Dg^U_Θ otherwise.
    fn premises(&self, a: &Structure) -> Result<Theory, Failure> {
        match self {
            Rule::Classical | Rule::Terms(_) => plain_diagram(a).map_err(domain),
            Rule::Theta(th, g) => {
                let th = th.as_ref().expect("resolved");
                match g {
                    Some(u) => relativized_generalized_diagram(a, th, u).map_err(domain),
                    None => generalized_diagram(a, th).map_err(domain),
                }
            }
        }
    }
}

pub fn parse(src: &Source, theory: Option<&Path>, text: &str, json: Option<&Path>) -> Outcome {
    let vocab = vocabulary(src, &[theory])?;
    let f = sentence(text, &vocab)?;
    println!("{f}");
    write_json(
        json,
        json!({ "input": text, "formula": f.to_string(), "sentence": f.is_sentence(), "depth": f.depth() }),
    )
}

pub fn eval(src: &Source, text: &str, json: Option<&Path>) -> Outcome {
    let vocab = vocabulary(src, &[])?;
    let a = structure(src, &vocab)?;
    let f = sentence(text, &vocab)?;
    let value = a.eval_sentence(&f).map_err(domain)?;
    println!("{value}");
    write_json(
        json,
        json!({ "structure": a.name(), "sentence": f.to_string(), "value": value }),
    )
}

pub fn pd(src: &Source, json: Option<&Path>) -> Outcome {
    let vocab = vocabulary(src, &[])?;
    let a = structure(src, &vocab)?;
    let part = definable_part(&a);
    let names: Vec<&str> = part.elements().iter().map(|e| a.element_name(*e)).collect();
    if part.is_empty() {
        println!("pd = {{}} (empty)");
    } else {
        println!("pd = {{{}}}", names.join(", "));
    }
    let mut defs = BTreeMap::new();
    for e in part.elements() {
        let th = defining_formula(&a, *e).map_err(domain)?;
        println!("  {}: {} . {}", a.element_name(*e), th.var, th.body);
        defs.insert(
            a.element_name(*e).to_string(),
            format!("{} . {}", th.var, th.body),
        );
    }
    let closed = matches!(
        &part,
        restrule::structures::DefinablePart::Part {
            substructure: Some(_),
            ..
        }
    );
    if !part.is_empty() {
        println!(
            "substructure: {}",
            if closed {
                "yes"
            } else {
                "no (not closed under the functions)"
            }
        );
    }
    println!("pointwise definable: {}", part.elements().len() == a.size());
    write_json(
        json,
        json!({ "structure": a.name(), "elements": names, "definitions": defs, "closed": closed, "pointwise_definable": part.elements().len() == a.size() }),
    )
}

fn print_theory(t: &Theory, json: Option<&Path>) -> Outcome {
    print!("{}", render_theory(t, None));
    let sentences: Vec<String> = t.iter().map(Formula::to_string).collect();
    write_json(json, json!({ "name": t.name(), "sentences": sentences }))
}

pub fn diagram(src: &Source, json: Option<&Path>) -> Outcome {
    let vocab = vocabulary(src, &[])?;
    let a = structure(src, &vocab)?;
    print_theory(&plain_diagram(&a).map_err(domain)?, json)
}

pub fn gdiagram(
    src: &Source,
    theta: Option<&Path>,
    relativize_by: Option<&str>,
    json: Option<&Path>,
) -> Outcome {
    let vocab = vocabulary(src, &[])?;
    let a = structure(src, &vocab)?;
    let sys = System {
        theta: theta.map(Path::to_path_buf),
        rule: None,
        relativize: relativize_by.map(str::to_string),
    };
    let r = rule(&sys, &vocab)?.resolve(Some(&a))?;
    print_theory(&r.premises(&a)?, json)
}

pub fn decide(
    src: &Source,
    sys: &System,
    budget: &Budget,
    text: &str,
    emit_proof: Option<&Path>,
    json: Option<&Path>,
) -> Outcome {
    let vocab = vocabulary(src, &[])?;
    let a = structure(src, &vocab)?;
    let sigma = sentence(text, &vocab)?;
    let r = rule(sys, &vocab)?.resolve(Some(&a))?;
    let premises = r.premises(&a)?;
    let oracle = TheoryOracle { theory: &premises };
    let wide = budget.max_width.is_some() || budget.max_block.is_some();
    let d = match &r {
        Rule::Classical => return Err(Failure::usage("decide needs a restriction rule")),
        Rule::Terms(ts) => {
            if wide {
                return Err(Failure::usage(
                    "--max-width and --max-block apply to theta rules",
                ));
            }
            decide_finitary(&oracle, &sigma, &Mode::Terms(ts.clone())).map_err(domain)?
        }
        Rule::Theta(th, g) => {
            let th = th.as_ref().expect("resolved");
            if wide {
                let b =
                    WidthBudget::new(budget.max_width.unwrap_or(4), budget.max_block.unwrap_or(3))
                        .map_err(domain)?;
                decide_infinitary(&oracle, &sigma, th, g.as_ref(), &b).map_err(domain)?
            } else {
                decide_finitary(
                    &oracle,
                    &sigma,
                    &Mode::Theta {
                        thetas: th.clone(),
                        guard: g.clone(),
                    },
                )
                .map_err(domain)?
            }
        }
    };
    let claim_in_a = match r.guard() {
        Some(u) => relativize(&sigma, u),
        None => sigma.clone(),
    };
    let agrees = a.eval_sentence(&claim_in_a).map_err(domain)? == d.holds;
    println!("verdict: {}", if d.holds { "PROVED" } else { "REFUTED" });
    println!("derived: {}", d.claim());
    println!(
        "proof: {} nodes, height {}",
        d.proof.size(),
        d.proof.height()
    );
    println!(
        "model check: {}",
        if agrees { "agrees" } else { "DISAGREES" }
    );
    if let Some(p) = emit_proof {
        write_json(Some(p), proof_to_json(&d.proof))?;
    }
    write_json(
        json,
        json!({
            "sentence": sigma.to_string(),
            "verdict": if d.holds { "PROVED" } else { "REFUTED" },
            "derived": d.claim().to_string(),
            "nodes": d.proof.size(),
            "height": d.proof.height(),
            "agrees": agrees,
        }),
    )?;
    if agrees {
        Ok(())
    } else {
        Err(Failure::domain(
            "the derived verdict disagrees with model checking",
        ))
    }
}

fn universe_of(
    text: &str,
    vocab: &Vocabulary,
    guard: Option<&Symbol>,
) -> Result<SentenceUniverse, Failure> {
    let base = match text.strip_prefix("depth:") {
        Some(n) => {
            let depth: usize = n
                .parse()
                .map_err(|_| Failure::usage(format!("bad universe depth `{n}`")))?;
            let opts = GenOptions {
                skip_relations: guard.into_iter().cloned().collect(),
                ..GenOptions::default()
            };
            SentenceUniverse::generate(vocab, depth, &opts)
        }
        None => {
            let t = formats::load_theory(Path::new(text), Some(vocab)).map_err(domain)?;
            SentenceUniverse::from_sentences(t.iter().cloned())
        }
    };
    Ok(match guard {
        Some(u) => SentenceUniverse::from_sentences(base.iter().map(|s| relativize(s, u))),
        None => base,
    })
}

fn steps_of(text: &str) -> Result<Option<usize>, Failure> {
    if text == "fixpoint" {
        return Ok(None);
    }
    text.parse().map(Some).map_err(|_| {
        Failure::usage(format!(
            "--steps expects a number or `fixpoint`, found `{text}`"
        ))
    })
}

/// The tower of `--theory` (or the structure's diagram) under the rule.
fn build_tower(
    src: &Source,
    sys: &System,
    sat: &Saturation,
    extra: &[Formula],
) -> Result<(Vocabulary, Option<Structure>, Tower), Failure> {
    let vocab = vocabulary(src, &[sat.theory.as_deref()])?;
    let a = match &src.structure {
        Some(_) => Some(structure(src, &vocab)?),
        None => None,
    };
    let r = rule(sys, &vocab)?.resolve(a.as_ref())?;
    let theory = match (&sat.theory, &a) {
        (Some(p), _) => formats::load_theory(p, Some(&vocab)).map_err(domain)?,
        (None, Some(a)) => r.premises(a)?,
        (None, None) => return Err(Failure::usage("pass --theory or --structure")),
    };
    let mut universe = universe_of(&sat.universe, &vocab, r.guard())?;
    for f in extra {
        universe.insert(f.clone());
    }
    let tower = run_saturation(&theory, &universe, &r.system(), steps_of(&sat.steps)?);
    Ok((vocab, a, tower))
}

pub fn saturate(
    src: &Source,
    sys: &System,
    sat: &Saturation,
    stages: bool,
    json: Option<&Path>,
) -> Outcome {
    let (_, _, tower) = build_tower(src, sys, sat, &[])?;
    let last = tower.last();
    println!("universe: {} sentences", tower.universe().len());
    println!("stages: {}", tower.len());
    println!(
        "fixpoint: {}",
        if tower.reached_fixpoint() {
            "reached"
        } else {
            "not reached"
        }
    );
    let mut stage_json = Vec::new();
    if stages {
        for k in 0..tower.len() {
            let s = tower.stage(k);
            println!("T_{k}: {} sentences", s.len());
            let added: Vec<String> = if k == 0 {
                Vec::new()
            } else {
                let prev = tower.stage(k - 1);
                s.members()
                    .filter(|f| !prev.contains(f))
                    .map(Formula::to_string)
                    .collect()
            };
            for f in &added {
                println!("  + {f}");
            }
            stage_json.push(json!({ "stage": k, "size": s.len(), "added": added }));
        }
    } else {
        println!("size: {}", last.len());
    }
    println!("consistent: {}", last.is_consistent());
    println!("complete: {}", last.is_complete());
    let members: Vec<String> = last.members().map(Formula::to_string).collect();
    let mut out = json!({
        "universe": tower.universe().len(),
        "stages": tower.len(),
        "fixpoint": tower.reached_fixpoint(),
        "size": last.len(),
        "consistent": last.is_consistent(),
        "complete": last.is_complete(),
        "members": members,
    });
    if stages {
        out["tower"] = Value::Array(stage_json);
    }
    write_json(json, out)
}

pub fn check_proof(
    proof: &Path,
    src: &Source,
    sys: &System,
    budget: &Budget,
    theory: Option<&Path>,
    json: Option<&Path>,
) -> Outcome {
    let vocab = vocabulary(src, &[theory])?;
    let text = std::fs::read_to_string(proof)
        .map_err(|e| Failure::domain(format!("{}: {e}", proof.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::domain(format!("{}: {e}", proof.display())))?;
    let p = proof_from_json(&value, &vocab)
        .map_err(|e| Failure::domain(format!("{}: {e}", proof.display())))?;
    let a = match &src.structure {
        Some(_) => Some(structure(src, &vocab)?),
        None => None,
    };
    let r = rule(sys, &vocab)?.resolve(a.as_ref())?;
    let premises = match (theory, &a) {
        (Some(t), _) => formats::load_theory(t, Some(&vocab)).map_err(domain)?,
        (None, Some(a)) => r.premises(a)?,
        (None, None) => return Err(Failure::usage("pass --theory or --structure")),
    };
    let mut system = r.system();
    if budget.max_width.is_some() || budget.max_block.is_some() {
        system = system.with_distributivity().with_choice(true, true);
    }
    verify(&p, &premises, &system)
        .map_err(|e| Failure::domain(format!("{}: {e}", proof.display())))?;
    println!("valid: {}", p.conclusion);
    println!("proof: {} nodes, {} premises", p.size(), p.premises().len());
    write_json(
        json,
        json!({ "valid": true, "conclusion": p.conclusion.to_string(), "nodes": p.size() }),
    )
}

pub fn glp_check(proof: &Path, delta: usize, json: Option<&Path>) -> Outcome {
    let text = std::fs::read_to_string(proof)
        .map_err(|e| Failure::domain(format!("{}: {e}", proof.display())))?;
    let p = ModalProof::parse(&text)
        .map_err(|e| Failure::domain(format!("{}: {e}", proof.display())))?;
    glp::check_modal_proof(&p, delta)
        .map_err(|e| Failure::domain(format!("{}: {e}", proof.display())))?;
    let last = p
        .conclusion()
        .map(ModalFormula::to_string)
        .unwrap_or_default();
    println!("valid: {} steps", p.lines.len());
    println!("proves: {last}");
    write_json(
        json,
        json!({ "valid": true, "steps": p.lines.len(), "conclusion": last, "delta": delta }),
    )
}

fn boxed_bodies<'a>(f: &'a ModalFormula, out: &mut Vec<&'a ModalFormula>) {
    match f {
        ModalFormula::Var(_) | ModalFormula::Bot | ModalFormula::Top => {}
        ModalFormula::Not(a) => boxed_bodies(a, out),
        ModalFormula::And(a, b) | ModalFormula::Or(a, b) | ModalFormula::Imp(a, b) => {
            boxed_bodies(a, out);
            boxed_bodies(b, out);
        }
        ModalFormula::Box(_, a) => out.push(a),
    }
}

pub fn glp_interp(
    text: &str,
    assign: &[String],
    src: &Source,
    sys: &System,
    sat: &Saturation,
    delta: usize,
    json: Option<&Path>,
) -> Outcome {
    let phi: ModalFormula = text
        .parse()
        .map_err(|e| Failure::domain(format!("formula: {e}")))?;
    phi.check_delta(delta).map_err(domain)?;
    let vocab = vocabulary(src, &[sat.theory.as_deref()])?;
    let mut assignment = BTreeMap::new();
    for a in assign {
        let (var, s) = a
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("--assign expects VAR=SENTENCE, found `{a}`")))?;
        assignment.insert(var.trim().to_string(), sentence(s, &vocab)?);
    }
    if src.structure.is_none() {
        return Err(Failure::usage(
            "glp-interp needs --structure to evaluate unboxed variables",
        ));
    }
    let mut bodies = Vec::new();
    boxed_bodies(&phi, &mut bodies);
    let extra: Vec<Formula> = bodies
        .iter()
        .filter_map(|b| glp::translate(b, &assignment).ok())
        .collect();
    let (_, a, tower) = build_tower(src, sys, sat, &extra)?;
    let a = a.expect("checked above");
    let i = StageInterpretation {
        assignment,
        tower: &tower,
        reference: &a,
        delta,
    };
    let value = interpret(&phi, &i).map_err(domain)?;
    println!("{value}");
    write_json(
        json,
        json!({ "formula": phi.to_string(), "value": value, "stages": tower.len() }),
    )
}
