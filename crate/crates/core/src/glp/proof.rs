use super::{parse_modal, GlpError, ModalFormula, Schema};
use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Justification {
    Axiom(Schema),
    /// Minor premise, then the implication.
    ModusPonens(usize, usize),
    /// Necessitation for modality `stage` from an earlier step.
    Necessitation {
        stage: usize,
        from: usize,
    },
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Justification::Axiom(Schema::Tautology) => f.write_str("taut"),
            Justification::Axiom(s) => write!(f, "axiom {s}"),
            Justification::ModusPonens(a, b) => write!(f, "mp {a} {b}"),
            Justification::Necessitation { stage, from } => write!(f, "nec{stage} {from}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofLine {
    pub step: usize,
    pub formula: ModalFormula,
    pub justification: Justification,
}

/// A Hilbert derivation; steps are referred to by their numbers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModalProof {
    pub lines: Vec<ProofLine>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModalProofError {
    #[error("line {line}: {source}")]
    Syntax { line: usize, source: GlpError },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("step {step}: {message}")]
    Invalid { step: usize, message: String },
}

fn parse_justification(text: &str) -> Option<Justification> {
    let words: Vec<&str> = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|w| !w.is_empty())
        .collect();
    let num = |w: &str| w.parse::<usize>().ok();
    match words.as_slice() {
        ["taut"] | ["tautology"] => Some(Justification::Axiom(Schema::Tautology)),
        ["axiom", id] => Schema::from_label(id).map(Justification::Axiom),
        ["mp", a, b] => Some(Justification::ModusPonens(num(a)?, num(b)?)),
        [rule, a] if rule.starts_with("nec") => Some(Justification::Necessitation {
            stage: num(&rule[3..])?,
            from: num(a)?,
        }),
        _ => None,
    }
}

impl ModalProof {
    /// Parses `n. <formula> ; <justification>` lines. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<ModalProof, ModalProofError> {
        let mut lines = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let raw = raw.trim();
            if raw.is_empty() || raw.starts_with('#') {
                continue;
            }
            let bad = |m: &str| ModalProofError::Malformed {
                line,
                message: m.to_string(),
            };
            let (num, rest) = raw
                .split_once('.')
                .ok_or_else(|| bad("expected `n. formula ; justification`"))?;
            let step = num
                .trim()
                .parse()
                .map_err(|_| bad("step number expected"))?;
            let (formula, just) = rest
                .rsplit_once(';')
                .ok_or_else(|| bad("missing `;` before the justification"))?;
            let formula =
                parse_modal(formula).map_err(|source| ModalProofError::Syntax { line, source })?;
            let justification = parse_justification(just)
                .ok_or_else(|| bad(&format!("unknown justification `{}`", just.trim())))?;
            lines.push(ProofLine {
                step,
                formula,
                justification,
            });
        }
        Ok(ModalProof { lines })
    }

    pub fn conclusion(&self) -> Option<&ModalFormula> {
        self.lines.last().map(|l| &l.formula)
    }

    /// Whether the proof checks and derives `goal` at some step.
    pub fn proves(&self, goal: &ModalFormula, delta: usize) -> bool {
        check_modal_proof(self, delta).is_ok() && self.lines.iter().any(|l| &l.formula == goal)
    }

    /// `self` followed by `other`, with `other` renumbered past `self`.
    pub fn concat(&self, other: &ModalProof) -> ModalProof {
        let offset = self.lines.iter().map(|l| l.step).max().unwrap_or(0);
        let shift = |j: Justification| match j {
            Justification::Axiom(_) => j,
            Justification::ModusPonens(a, b) => Justification::ModusPonens(a + offset, b + offset),
            Justification::Necessitation { stage, from } => Justification::Necessitation {
                stage,
                from: from + offset,
            },
        };
        let mut lines = self.lines.clone();
        lines.extend(other.lines.iter().map(|l| ProofLine {
            step: l.step + offset,
            formula: l.formula.clone(),
            justification: shift(l.justification),
        }));
        ModalProof { lines }
    }
}

impl fmt::Display for ModalProof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            writeln!(f, "{}. {} ; {}", l.step, l.formula, l.justification)?;
        }
        Ok(())
    }
}

/// Checks every step; the first failure is reported.
pub fn check_modal_proof(p: &ModalProof, delta: usize) -> Result<(), ModalProofError> {
    let mut seen: HashMap<usize, &ModalFormula> = HashMap::new();
    for l in &p.lines {
        let fail = |m: String| {
            Err(ModalProofError::Invalid {
                step: l.step,
                message: m,
            })
        };
        if seen.contains_key(&l.step) {
            return fail("duplicate step number".into());
        }
        if let Err(e) = l.formula.check_delta(delta) {
            return fail(e.to_string());
        }
        let earlier = |k: usize| seen.get(&k).copied();
        match l.justification {
            Justification::Axiom(Schema::Tautology) => match super::is_tautology(&l.formula) {
                Ok(true) => {}
                Ok(false) => return fail("not a tautology".into()),
                Err(e) => return fail(e.to_string()),
            },
            Justification::Axiom(s) => {
                if !s.matches(&l.formula, delta) {
                    return fail(format!("not an instance of axiom {s}"));
                }
            }
            Justification::ModusPonens(a, b) => {
                let (Some(minor), Some(major)) = (earlier(a), earlier(b)) else {
                    return fail(format!("mp refers to a missing earlier step ({a} or {b})"));
                };
                let ok =
                    matches!(major, ModalFormula::Imp(x, y) if **x == *minor && **y == l.formula);
                if !ok {
                    return fail(format!("step {b} is not `{minor} -> {}`", l.formula));
                }
            }
            Justification::Necessitation { stage, from } => {
                if stage != 0 {
                    return fail(format!(
                        "necessitation is only available for [0], not [{stage}]"
                    ));
                }
                let Some(prev) = earlier(from) else {
                    return fail(format!("nec0 refers to a missing earlier step {from}"));
                };
                if l.formula != ModalFormula::boxed(0, prev.clone()) {
                    return fail(format!("expected `[]0 ({prev})`"));
                }
            }
        }
        seen.insert(l.step, &l.formula);
    }
    Ok(())
}

const GL_TRANSITIVITY: &str = "\
1. p & []0 p -> p ; taut
2. []0 (p & []0 p -> p) ; nec0 1
3. []0 (p & []0 p -> p) -> []0 (p & []0 p) -> []0 p ; axiom i
4. []0 (p & []0 p) -> []0 p ; mp 2 3
5. ([]0 (p & []0 p) -> []0 p) -> p -> []0 (p & []0 p) -> p & []0 p ; taut
6. p -> []0 (p & []0 p) -> p & []0 p ; mp 4 5
7. []0 (p -> []0 (p & []0 p) -> p & []0 p) ; nec0 6
8. []0 (p -> []0 (p & []0 p) -> p & []0 p) -> []0 p -> []0 ([]0 (p & []0 p) -> p & []0 p) ; axiom i
9. []0 p -> []0 ([]0 (p & []0 p) -> p & []0 p) ; mp 7 8
10. []0 ([]0 (p & []0 p) -> p & []0 p) -> []0 (p & []0 p) ; axiom ii
11. p & []0 p -> []0 p ; taut
12. []0 (p & []0 p -> []0 p) ; nec0 11
13. []0 (p & []0 p -> []0 p) -> []0 (p & []0 p) -> []0 []0 p ; axiom i
14. []0 (p & []0 p) -> []0 []0 p ; mp 12 13
15. ([]0 p -> []0 ([]0 (p & []0 p) -> p & []0 p)) -> ([]0 ([]0 (p & []0 p) -> p & []0 p) -> []0 (p & []0 p)) -> ([]0 (p & []0 p) -> []0 []0 p) -> []0 p -> []0 []0 p ; taut
16. ([]0 ([]0 (p & []0 p) -> p & []0 p) -> []0 (p & []0 p)) -> ([]0 (p & []0 p) -> []0 []0 p) -> []0 p -> []0 []0 p ; mp 9 15
17. ([]0 (p & []0 p) -> []0 []0 p) -> []0 p -> []0 []0 p ; mp 10 16
18. []0 p -> []0 []0 p ; mp 14 17
";

/// A derivation of `[]0 p -> []0 []0 p` from distribution, Löb's axiom,
/// modus ponens and necessitation.
pub fn gl_transitivity_proof() -> ModalProof {
    ModalProof::parse(GL_TRANSITIVITY).expect("well-formed derivation")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn necessitation_of_a_tautology() {
        let p = ModalProof::parse("1. p -> p ; taut\n2. []0 (p -> p) ; nec0 1\n").unwrap();
        check_modal_proof(&p, 3).unwrap();
        let q = ModalProof::parse("1. p -> p ; taut\n2. []1 (p -> p) ; nec1 1\n").unwrap();
        assert!(matches!(
            check_modal_proof(&q, 3),
            Err(ModalProofError::Invalid { step: 2, .. })
        ));
    }

    #[test]
    fn transitivity_derivation_checks() {
        let p = gl_transitivity_proof();
        assert_eq!(p.lines.len(), 18);
        let goal = parse_modal("[]0 p -> []0 []0 p").unwrap();
        assert!(p.proves(&goal, 1));
        for i in 0..p.lines.len() {
            let mut q = p.clone();
            q.lines.remove(i);
            assert!(!q.proves(&goal, 1), "still proves without step {}", i + 1);
        }
    }

    #[test]
    fn round_trips_through_text() {
        let p = gl_transitivity_proof();
        assert_eq!(ModalProof::parse(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn malformed_lines_report_positions() {
        assert!(matches!(
            ModalProof::parse("\n1 p ; taut"),
            Err(ModalProofError::Malformed { line: 2, .. })
        ));
        assert!(matches!(
            ModalProof::parse("1. p -> ; taut"),
            Err(ModalProofError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            ModalProof::parse("1. p ; magic"),
            Err(ModalProofError::Malformed { line: 1, .. })
        ));
    }
}
