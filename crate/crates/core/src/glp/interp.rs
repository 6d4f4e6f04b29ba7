use super::{GlpError, ModalFormula};
use crate::deduction::Tower;
use crate::structures::Structure;
use crate::syntax::Formula;
use std::collections::BTreeMap;

/// Sentences for the variables, a tower of stage theories for the boxes
/// and a structure deciding unboxed variables.
#[derive(Debug, Clone)]
pub struct StageInterpretation<'a> {
    pub assignment: BTreeMap<String, Formula>,
    pub tower: &'a Tower,
    pub reference: &'a Structure,
    pub delta: usize,
}

impl StageInterpretation<'_> {
    pub fn translate(&self, f: &ModalFormula) -> Result<Formula, GlpError> {
        translate(f, &self.assignment)
    }

    /// Whether `f*` belongs to stage `alpha`.
    pub fn provable(&self, alpha: usize, f: &ModalFormula) -> Result<bool, GlpError> {
        if alpha >= self.delta {
            return Err(GlpError::StageOutOfRange {
                alpha,
                delta: self.delta,
            });
        }
        if alpha >= self.tower.len() && !self.tower.reached_fixpoint() {
            return Err(GlpError::StageNotComputed {
                alpha,
                computed: self.tower.len(),
            });
        }
        let s = self.translate(f)?;
        if !self.tower.universe().contains(&s) {
            return Err(GlpError::OutsideUniverse(s.to_string()));
        }
        Ok(self.tower.stage(alpha).contains(&s))
    }
}

/// The first-order sentence `f*` of a box-free formula.
pub fn translate(
    f: &ModalFormula,
    assignment: &BTreeMap<String, Formula>,
) -> Result<Formula, GlpError> {
    use ModalFormula as M;
    let tr = |g: &ModalFormula| translate(g, assignment);
    Ok(match f {
        M::Var(p) => assignment
            .get(p)
            .cloned()
            .ok_or_else(|| GlpError::Unmapped(p.clone()))?,
        M::Bot | M::Top => return Err(GlpError::Constant),
        M::Not(a) => Formula::not(tr(a)?),
        M::And(a, b) => Formula::And(vec![tr(a)?, tr(b)?]),
        M::Or(a, b) => Formula::Or(vec![tr(a)?, tr(b)?]),
        M::Imp(a, b) => Formula::imp(tr(a)?, tr(b)?),
        M::Box(..) => return Err(GlpError::Nested(f.to_string())),
    })
}

/// Booleans are classical, unboxed variables are evaluated in the
/// reference structure and `[a]φ` holds when `φ*` is in stage `a`.
pub fn interpret(f: &ModalFormula, i: &StageInterpretation<'_>) -> Result<bool, GlpError> {
    use ModalFormula as M;
    Ok(match f {
        M::Var(p) => {
            let s = i
                .assignment
                .get(p)
                .ok_or_else(|| GlpError::Unmapped(p.clone()))?;
            i.reference.eval_sentence(s)?
        }
        M::Bot => false,
        M::Top => true,
        M::Not(a) => !interpret(a, i)?,
        M::And(a, b) => interpret(a, i)? && interpret(b, i)?,
        M::Or(a, b) => interpret(a, i)? || interpret(b, i)?,
        M::Imp(a, b) => !interpret(a, i)? || interpret(b, i)?,
        M::Box(alpha, a) => i.provable(*alpha, a)?,
    })
}
