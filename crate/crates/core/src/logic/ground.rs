use super::{Formula, Problem, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroundError {
    #[error("grounded output would exceed {limit} formula nodes")]
    TooLarge { limit: usize },
}

/// Replaces every quantifier by the finite conjunction (universal) or
/// disjunction (existential) of its body instantiated with each canonical
/// value of the bound sort. `max_nodes` bounds the total size of the output.
pub fn ground_problem(problem: &Problem, max_nodes: usize) -> Result<Problem, GroundError> {
    let mut budget = Budget {
        left: max_nodes,
        limit: max_nodes,
    };
    let formulas = problem
        .formulas
        .iter()
        .map(|f| ground(problem, f, &mut budget))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = problem.clone();
    out.formulas = formulas;
    Ok(out)
}

struct Budget {
    left: usize,
    limit: usize,
}

impl Budget {
    fn spend(&mut self) -> Result<(), GroundError> {
        self.left = self
            .left
            .checked_sub(1)
            .ok_or(GroundError::TooLarge { limit: self.limit })?;
        Ok(())
    }
}

fn ground(problem: &Problem, f: &Formula, budget: &mut Budget) -> Result<Formula, GroundError> {
    budget.spend()?;
    let pair = |a: &Formula, b: &Formula, budget: &mut Budget| -> Result<_, GroundError> {
        Ok((ground(problem, a, budget)?, ground(problem, b, budget)?))
    };
    Ok(match f {
        Formula::Eq(..) | Formula::Pred { .. } => f.clone(),
        Formula::Not(a) => Formula::not(ground(problem, a, budget)?),
        Formula::And(a, b) => {
            let (a, b) = pair(a, b, budget)?;
            Formula::and(a, b)
        }
        Formula::Or(a, b) => {
            let (a, b) = pair(a, b, budget)?;
            Formula::or(a, b)
        }
        Formula::Implies(a, b) => {
            let (a, b) = pair(a, b, budget)?;
            Formula::implies(a, b)
        }
        Formula::Iff(a, b) => {
            let (a, b) = pair(a, b, budget)?;
            Formula::iff(a, b)
        }
        Formula::Forall { var, sort, body } | Formula::Exists { var, sort, body } => {
            let parts = problem
                .values(*sort)
                .map(|v| ground(problem, &body.substitute(var, &Term::Elem(v)), budget))
                .collect::<Result<Vec<_>, _>>()?;
            let joined = if matches!(f, Formula::Forall { .. }) {
                Formula::conjunction(parts)
            } else {
                Formula::disjunction(parts)
            };
            joined.expect("domains are non-empty")
        }
    })
}
