use std::collections::HashMap;

use super::{Formula, Interpretation, Problem, ShapeError, SortId, Term, Value};

/// Variable environment for [`evaluate`].
pub type Env = HashMap<String, Value>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error(transparent)]
    Shape(#[from] ShapeError),
}

/// Truth value of `formula` under `interp` and `env`. Quantifiers range over
/// the canonical domain of their sort; domain elements denote themselves.
pub fn evaluate(
    problem: &Problem,
    formula: &Formula,
    interp: &Interpretation,
    env: &Env,
) -> Result<bool, EvalError> {
    interp.check_shape(problem)?;
    let free: Vec<&String> = env.keys().collect();
    let compiled = CompiledFormula::with_free(problem, formula, &free)?;
    let mut slots: Vec<u32> = free.iter().map(|n| env[*n].index).collect();
    slots.resize(compiled.slots, 0);
    Ok(Evaluator::new(problem).eval(&compiled.root, interp, &mut slots))
}

/// Whether `interp` satisfies every formula of the problem.
pub fn satisfies(problem: &Problem, interp: &Interpretation) -> Result<bool, EvalError> {
    interp.check_shape(problem)?;
    let eval = Evaluator::new(problem);
    for f in &problem.formulas {
        let c = CompiledFormula::closed(problem, f)?;
        let mut slots = vec![0; c.slots];
        if !eval.eval(&c.root, interp, &mut slots) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug)]
pub(crate) enum CTerm {
    Var(usize),
    App { func: usize, args: Vec<CTerm> },
    Elem(u32),
}

#[derive(Clone, Debug)]
pub(crate) enum CFormula {
    Eq(CTerm, CTerm),
    Pred {
        pred: usize,
        args: Vec<CTerm>,
    },
    Not(Box<CFormula>),
    And(Box<CFormula>, Box<CFormula>),
    Or(Box<CFormula>, Box<CFormula>),
    Implies(Box<CFormula>, Box<CFormula>),
    Iff(Box<CFormula>, Box<CFormula>),
    Forall {
        slot: usize,
        size: u32,
        body: Box<CFormula>,
    },
    Exists {
        slot: usize,
        size: u32,
        body: Box<CFormula>,
    },
}

/// A formula with variables resolved to environment slots.
#[derive(Clone, Debug)]
pub(crate) struct CompiledFormula {
    pub root: CFormula,
    pub slots: usize,
}

impl CompiledFormula {
    pub fn closed(problem: &Problem, formula: &Formula) -> Result<Self, EvalError> {
        Self::with_free(problem, formula, &[])
    }

    fn with_free(
        problem: &Problem,
        formula: &Formula,
        free: &[&String],
    ) -> Result<Self, EvalError> {
        let mut c = Compiler {
            problem,
            scope: free
                .iter()
                .enumerate()
                .map(|(i, n)| (n.to_string(), i))
                .collect(),
            slots: free.len(),
        };
        let root = c.formula(formula)?;
        Ok(CompiledFormula {
            root,
            slots: c.slots.max(1),
        })
    }

    pub fn all_closed(problem: &Problem, formulas: &[Formula]) -> Result<Vec<Self>, EvalError> {
        formulas.iter().map(|f| Self::closed(problem, f)).collect()
    }
}

struct Compiler<'a> {
    problem: &'a Problem,
    scope: Vec<(String, usize)>,
    slots: usize,
}

impl Compiler<'_> {
    fn term(&self, t: &Term) -> Result<CTerm, EvalError> {
        Ok(match t {
            Term::Var { name, .. } => {
                let slot = self
                    .scope
                    .iter()
                    .rev()
                    .find(|(n, _)| n == name)
                    .map(|(_, s)| *s)
                    .ok_or_else(|| EvalError::UnboundVariable(name.clone()))?;
                CTerm::Var(slot)
            }
            Term::App { func, args } => CTerm::App {
                func: func.0,
                args: args
                    .iter()
                    .map(|a| self.term(a))
                    .collect::<Result<_, _>>()?,
            },
            Term::Elem(v) => CTerm::Elem(v.index),
        })
    }

    fn quantifier(
        &mut self,
        var: &str,
        sort: SortId,
        body: &Formula,
    ) -> Result<(usize, u32, Box<CFormula>), EvalError> {
        let slot = self.scope.len();
        self.scope.push((var.to_string(), slot));
        self.slots = self.slots.max(slot + 1);
        let body = self.formula(body);
        self.scope.pop();
        Ok((slot, self.problem.size(sort), Box::new(body?)))
    }

    fn formula(&mut self, f: &Formula) -> Result<CFormula, EvalError> {
        let bin = |c: &mut Self, a: &Formula, b: &Formula| -> Result<_, EvalError> {
            Ok((Box::new(c.formula(a)?), Box::new(c.formula(b)?)))
        };
        Ok(match f {
            Formula::Eq(a, b) => CFormula::Eq(self.term(a)?, self.term(b)?),
            Formula::Pred { pred, args } => CFormula::Pred {
                pred: pred.0,
                args: args
                    .iter()
                    .map(|a| self.term(a))
                    .collect::<Result<_, _>>()?,
            },
            Formula::Not(a) => CFormula::Not(Box::new(self.formula(a)?)),
            Formula::And(a, b) => {
                let (a, b) = bin(self, a, b)?;
                CFormula::And(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = bin(self, a, b)?;
                CFormula::Or(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = bin(self, a, b)?;
                CFormula::Implies(a, b)
            }
            Formula::Iff(a, b) => {
                let (a, b) = bin(self, a, b)?;
                CFormula::Iff(a, b)
            }
            Formula::Forall { var, sort, body } => {
                let (slot, size, body) = self.quantifier(var, *sort, body)?;
                CFormula::Forall { slot, size, body }
            }
            Formula::Exists { var, sort, body } => {
                let (slot, size, body) = self.quantifier(var, *sort, body)?;
                CFormula::Exists { slot, size, body }
            }
        })
    }
}

/// Cells of a partially built interpretation; `None` marks an unassigned cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct PartialInterpretation {
    pub funcs: Vec<Vec<Option<u32>>>,
    pub preds: Vec<Vec<Option<bool>>>,
}

impl PartialInterpretation {
    pub fn empty(problem: &Problem) -> Self {
        let sig = &problem.signature;
        PartialInterpretation {
            funcs: sig
                .funcs
                .iter()
                .map(|f| vec![None; problem.tuple_count(&f.args)])
                .collect(),
            preds: sig
                .preds
                .iter()
                .map(|p| vec![None; problem.tuple_count(&p.args)])
                .collect(),
        }
    }

    /// Some(total) once every cell is assigned.
    pub fn to_total(&self) -> Option<Interpretation> {
        Some(Interpretation {
            funcs: self
                .funcs
                .iter()
                .map(|t| t.iter().copied().collect())
                .collect::<Option<_>>()?,
            preds: self
                .preds
                .iter()
                .map(|t| t.iter().copied().collect())
                .collect::<Option<_>>()?,
        })
    }
}

/// Row-major strides for every symbol, precomputed once per problem.
pub(crate) struct Evaluator {
    func_strides: Vec<Vec<usize>>,
    pred_strides: Vec<Vec<usize>>,
}

fn strides(problem: &Problem, sorts: &[SortId]) -> Vec<usize> {
    let mut out = vec![1usize; sorts.len()];
    for i in (0..sorts.len().saturating_sub(1)).rev() {
        out[i] = out[i + 1] * problem.size(sorts[i + 1]) as usize;
    }
    out
}

impl Evaluator {
    pub fn new(problem: &Problem) -> Self {
        let sig = &problem.signature;
        Evaluator {
            func_strides: sig
                .funcs
                .iter()
                .map(|f| strides(problem, &f.args))
                .collect(),
            pred_strides: sig
                .preds
                .iter()
                .map(|p| strides(problem, &p.args))
                .collect(),
        }
    }

    fn term(&self, t: &CTerm, interp: &Interpretation, env: &[u32]) -> u32 {
        match t {
            CTerm::Var(slot) => env[*slot],
            CTerm::Elem(v) => *v,
            CTerm::App { func, args } => {
                let strides = &self.func_strides[*func];
                let idx = args
                    .iter()
                    .zip(strides)
                    .map(|(a, s)| self.term(a, interp, env) as usize * s)
                    .sum::<usize>();
                interp.funcs[*func][idx]
            }
        }
    }

    pub fn eval(&self, f: &CFormula, interp: &Interpretation, env: &mut [u32]) -> bool {
        match f {
            CFormula::Eq(a, b) => self.term(a, interp, env) == self.term(b, interp, env),
            CFormula::Pred { pred, args } => {
                let strides = &self.pred_strides[*pred];
                let idx = args
                    .iter()
                    .zip(strides)
                    .map(|(a, s)| self.term(a, interp, env) as usize * s)
                    .sum::<usize>();
                interp.preds[*pred][idx]
            }
            CFormula::Not(a) => !self.eval(a, interp, env),
            CFormula::And(a, b) => self.eval(a, interp, env) && self.eval(b, interp, env),
            CFormula::Or(a, b) => self.eval(a, interp, env) || self.eval(b, interp, env),
            CFormula::Implies(a, b) => !self.eval(a, interp, env) || self.eval(b, interp, env),
            CFormula::Iff(a, b) => self.eval(a, interp, env) == self.eval(b, interp, env),
            CFormula::Forall { slot, size, body } => (0..*size).all(|v| {
                env[*slot] = v;
                self.eval(body, interp, env)
            }),
            CFormula::Exists { slot, size, body } => (0..*size).any(|v| {
                env[*slot] = v;
                self.eval(body, interp, env)
            }),
        }
    }

    pub fn eval_all(
        &self,
        formulas: &[CompiledFormula],
        interp: &Interpretation,
        env: &mut [u32],
    ) -> bool {
        formulas.iter().all(|c| self.eval(&c.root, interp, env))
    }

    fn pterm(&self, t: &CTerm, interp: &PartialInterpretation, env: &[u32]) -> Option<u32> {
        match t {
            CTerm::Var(slot) => Some(env[*slot]),
            CTerm::Elem(v) => Some(*v),
            CTerm::App { func, args } => {
                let strides = &self.func_strides[*func];
                let mut idx = 0;
                for (a, s) in args.iter().zip(strides) {
                    idx += self.pterm(a, interp, env)? as usize * s;
                }
                interp.funcs[*func][idx]
            }
        }
    }

    /// Kleene three-valued evaluation; `None` when the verdict depends on
    /// unassigned cells.
    pub fn peval(
        &self,
        f: &CFormula,
        interp: &PartialInterpretation,
        env: &mut [u32],
    ) -> Option<bool> {
        match f {
            CFormula::Eq(a, b) => Some(self.pterm(a, interp, env)? == self.pterm(b, interp, env)?),
            CFormula::Pred { pred, args } => {
                let strides = &self.pred_strides[*pred];
                let mut idx = 0;
                for (a, s) in args.iter().zip(strides) {
                    idx += self.pterm(a, interp, env)? as usize * s;
                }
                interp.preds[*pred][idx]
            }
            CFormula::Not(a) => self.peval(a, interp, env).map(|v| !v),
            CFormula::And(a, b) => match self.peval(a, interp, env) {
                Some(false) => Some(false),
                left => match (left, self.peval(b, interp, env)) {
                    (_, Some(false)) => Some(false),
                    (Some(true), Some(true)) => Some(true),
                    _ => None,
                },
            },
            CFormula::Or(a, b) => match self.peval(a, interp, env) {
                Some(true) => Some(true),
                left => match (left, self.peval(b, interp, env)) {
                    (_, Some(true)) => Some(true),
                    (Some(false), Some(false)) => Some(false),
                    _ => None,
                },
            },
            CFormula::Implies(a, b) => match self.peval(a, interp, env) {
                Some(false) => Some(true),
                left => match (left, self.peval(b, interp, env)) {
                    (_, Some(true)) => Some(true),
                    (Some(true), Some(false)) => Some(false),
                    _ => None,
                },
            },
            CFormula::Iff(a, b) => Some(self.peval(a, interp, env)? == self.peval(b, interp, env)?),
            CFormula::Forall { slot, size, body } => {
                let mut unknown = false;
                for v in 0..*size {
                    env[*slot] = v;
                    match self.peval(body, interp, env) {
                        Some(false) => return Some(false),
                        None => unknown = true,
                        Some(true) => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(true)
                }
            }
            CFormula::Exists { slot, size, body } => {
                let mut unknown = false;
                for v in 0..*size {
                    env[*slot] = v;
                    match self.peval(body, interp, env) {
                        Some(true) => return Some(true),
                        None => unknown = true,
                        Some(false) => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(false)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::logic::{PredId, Term};

    #[test]
    fn relabeling_interpretation_satisfies() {
        let p = catalog::relabeling_example();
        let i = catalog::relabeling_interpretation(&p);
        assert_eq!(satisfies(&p, &i), Ok(true));
        for f in &p.formulas {
            assert_eq!(evaluate(&p, f, &i, &Env::new()), Ok(true));
        }
    }

    #[test]
    fn domain_elements_denote_themselves() {
        let p = catalog::relabeling_example();
        let a = p.signature.sort_by_name("A").unwrap();
        let i = Interpretation::first(&p);
        let same = Formula::eq(Term::elem(a, 0), Term::elem(a, 0));
        let diff = Formula::eq(Term::elem(a, 0), Term::elem(a, 1));
        assert_eq!(evaluate(&p, &same, &i, &Env::new()), Ok(true));
        assert_eq!(evaluate(&p, &diff, &i, &Env::new()), Ok(false));
    }

    #[test]
    fn pinned_combination_problem_evaluates_true() {
        // c = A!1 together with the base formula, under c := A!1 and P := {A!2}.
        let p = catalog::combination_pinned();
        let c = p.signature.func_by_name("c").unwrap();
        let pr = p.signature.pred_by_name("P").unwrap();
        let mut i = Interpretation::first(&p);
        i.set_func(&p, c, &[], 0);
        i.set_holds(&p, pr, &[1], true);
        assert_eq!(satisfies(&p, &i), Ok(true));
    }

    #[test]
    fn empty_formula_set_is_satisfied() {
        let mut p = catalog::relabeling_example();
        p.formulas.clear();
        assert_eq!(satisfies(&p, &Interpretation::first(&p)), Ok(true));
    }

    #[test]
    fn unbound_variable_is_rejected() {
        let p = catalog::relabeling_example();
        let a = p.signature.sort_by_name("A").unwrap();
        let f = Formula::eq(Term::var("x", a), Term::elem(a, 0));
        let i = Interpretation::first(&p);
        assert_eq!(
            evaluate(&p, &f, &i, &Env::new()),
            Err(EvalError::UnboundVariable("x".into()))
        );
        let env: Env = [("x".to_string(), Value::new(a, 0))].into();
        assert_eq!(evaluate(&p, &f, &i, &env), Ok(true));
    }

    #[test]
    fn shadowed_variable_uses_inner_binding() {
        let p = catalog::relabeling_example();
        let a = p.signature.sort_by_name("A").unwrap();
        // forall x. exists x. x = A!2 -- inner binder wins
        let f = Formula::forall(
            "x",
            a,
            Formula::exists("x", a, Formula::eq(Term::var("x", a), Term::elem(a, 1))),
        );
        let i = Interpretation::first(&p);
        assert_eq!(evaluate(&p, &f, &i, &Env::new()), Ok(true));
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let p = catalog::relabeling_example();
        let mut i = Interpretation::first(&p);
        i.preds[PredId(0).0].pop();
        assert!(matches!(satisfies(&p, &i), Err(EvalError::Shape(_))));
    }

    #[test]
    fn partial_evaluation_agrees_on_total_cells() {
        let p = catalog::relabeling_example();
        let i = catalog::relabeling_interpretation(&p);
        let partial = PartialInterpretation {
            funcs: i
                .funcs
                .iter()
                .map(|t| t.iter().map(|&v| Some(v)).collect())
                .collect(),
            preds: i
                .preds
                .iter()
                .map(|t| t.iter().map(|&v| Some(v)).collect())
                .collect(),
        };
        let ev = Evaluator::new(&p);
        for f in &p.formulas {
            let c = CompiledFormula::closed(&p, f).unwrap();
            let mut env = vec![0; c.slots];
            assert_eq!(ev.peval(&c.root, &partial, &mut env), Some(true));
        }
        let empty = PartialInterpretation::empty(&p);
        let c = CompiledFormula::closed(&p, &p.formulas[0]).unwrap();
        assert_eq!(ev.peval(&c.root, &empty, &mut vec![0; c.slots]), None);
    }
}
