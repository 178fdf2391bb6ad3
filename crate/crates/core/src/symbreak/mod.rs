//! Static symmetry-breaking constraints and their sound combination.
//!
//! Every scheme draws the values it orders from an
//! [`InterchangeabilityLedger`]: per sort, the values that occur neither in
//! the problem's formulas nor in any constraint emitted so far. Permuting
//! such values is always a domain symmetry, which is what each scheme's
//! soundness argument needs. After a scheme runs, every value it mentions
//! leaves the ledger.

mod plan;
mod schemes;

pub use plan::{parse_plan, print_plan, PlanError};
pub use schemes::{
    binary_predicate_scheme, constants_scheme, drd_range_scheme, unary_predicate_scheme,
    unary_range_scheme,
};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::logic::{occurring_values_in, Formula, FuncId, PredId, Problem, SortId, Value};

/// Per sort, the ascending list of values still known to be interchangeable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterchangeabilityLedger {
    values: Vec<Vec<u32>>,
    /// Pivot already used by the binary predicate scheme, per predicate.
    pivots: BTreeMap<PredId, u32>,
}

/// Values of each sort that occur in no formula of the problem.
pub fn initial_ledger(problem: &Problem) -> InterchangeabilityLedger {
    let occurring = occurring_values_in(problem, &problem.formulas);
    let values = problem
        .signature
        .sort_ids()
        .map(|s| {
            problem
                .values(s)
                .filter(|v| !occurring[&s].contains(v))
                .map(|v| v.index)
                .collect()
        })
        .collect();
    InterchangeabilityLedger {
        values,
        pivots: BTreeMap::new(),
    }
}

impl InterchangeabilityLedger {
    pub fn values(&self, sort: SortId) -> &[u32] {
        &self.values[sort.0]
    }

    pub fn is_full(&self, problem: &Problem, sort: SortId) -> bool {
        self.values[sort.0].len() == problem.size(sort) as usize
    }

    pub fn pivot(&self, pred: PredId) -> Option<u32> {
        self.pivots.get(&pred).copied()
    }

    /// Drops every value mentioned by `formulas`.
    pub(crate) fn remove_occurring(&mut self, formulas: &[Formula]) {
        let mut seen = BTreeSet::new();
        for f in formulas {
            f.visit_values(&mut |v| {
                seen.insert(v);
            });
        }
        self.remove(seen);
    }

    pub(crate) fn remove(&mut self, values: impl IntoIterator<Item = Value>) {
        for v in values {
            self.values[v.sort.0].retain(|&x| x != v.index);
        }
    }

    pub(crate) fn clear(&mut self, sort: SortId) {
        self.values[sort.0].clear();
    }

    pub(crate) fn record_pivot(&mut self, pred: PredId, pivot: u32) {
        self.pivots.insert(pred, pivot);
    }

    /// Values present in `self` but not in `later`.
    pub fn consumed(&self, later: &InterchangeabilityLedger) -> Vec<Value> {
        let mut out = Vec::new();
        for (s, (before, after)) in self.values.iter().zip(&later.values).enumerate() {
            for &v in before {
                if !after.contains(&v) {
                    out.push(Value::new(SortId(s), v));
                }
            }
        }
        out
    }

    /// `A: A!2 A!3; B: (none)`
    pub fn describe(&self, problem: &Problem) -> String {
        problem
            .signature
            .sort_ids()
            .map(|s| {
                let vals: Vec<String> = self.values[s.0]
                    .iter()
                    .map(|&i| problem.value_name(Value::new(s, i)))
                    .collect();
                let vals = if vals.is_empty() {
                    "(none)".to_string()
                } else {
                    vals.join(" ")
                };
                format!("{}: {}", problem.signature.sort(s).name, vals)
            })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Constants,
    UnaryRange,
    DrdRange,
    UnaryPred,
    BinaryPred,
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeKind::Constants => "constants",
            SchemeKind::UnaryRange => "unary-range",
            SchemeKind::DrdRange => "drd-range",
            SchemeKind::UnaryPred => "unary-pred",
            SchemeKind::BinaryPred => "binary-pred",
        })
    }
}

/// One step of a symmetry-breaking plan. `require_full` rejects the step
/// unless the relevant ledger still holds the whole domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SchemeRequest {
    Constants {
        constants: Vec<FuncId>,
        require_full: bool,
    },
    UnaryRange {
        func: FuncId,
    },
    DrdRange {
        func: FuncId,
        require_full: bool,
    },
    UnaryPred {
        pred: PredId,
        require_full: bool,
    },
    BinaryPred {
        pred: PredId,
        pivot: u32,
    },
}

impl SchemeRequest {
    pub fn kind(&self) -> SchemeKind {
        match self {
            SchemeRequest::Constants { .. } => SchemeKind::Constants,
            SchemeRequest::UnaryRange { .. } => SchemeKind::UnaryRange,
            SchemeRequest::DrdRange { .. } => SchemeKind::DrdRange,
            SchemeRequest::UnaryPred { .. } => SchemeKind::UnaryPred,
            SchemeRequest::BinaryPred { .. } => SchemeKind::BinaryPred,
        }
    }
}

/// The audit record of one scheme run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeApplication {
    pub kind: SchemeKind,
    pub symbols: Vec<String>,
    pub formulas: Vec<Formula>,
    pub before: InterchangeabilityLedger,
    pub after: InterchangeabilityLedger,
    pub warnings: Vec<String>,
}

impl SchemeApplication {
    /// `; scheme constants c1,c2 consumed A!1 A!2`
    pub fn audit_line(&self, problem: &Problem) -> String {
        let consumed: Vec<String> = self
            .before
            .consumed(&self.after)
            .into_iter()
            .map(|v| problem.value_name(v))
            .collect();
        format!(
            "; scheme {} {} consumed {}",
            self.kind,
            self.symbols.join(","),
            if consumed.is_empty() {
                "none".to_string()
            } else {
                consumed.join(" ")
            }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchemeError {
    #[error("scheme inapplicable: {0}")]
    Inapplicable(String),
    #[error("the constants scheme needs at least one constant")]
    NoConstants,
    #[error("`{0}` is not a constant")]
    NotConstant(String),
    #[error("`{symbol}` has sort {actual}, expected {expected}")]
    SortMismatch {
        symbol: String,
        expected: String,
        actual: String,
    },
    #[error("no interchangeable values left for sort {0}")]
    EmptyLedger(String),
    #[error("`{0}` does not have the shape this scheme needs: {1}")]
    Shape(String, String),
    #[error("pivot index {pivot} is outside sort {sort}")]
    PivotOutOfRange { sort: String, pivot: u32 },
    #[error("`{0}` already has a pivot; a second one is unsound")]
    SecondPivot(String),
}

/// Runs one request against `ledger`.
pub fn apply_request(
    problem: &Problem,
    request: &SchemeRequest,
    ledger: &InterchangeabilityLedger,
) -> Result<SchemeApplication, SchemeError> {
    match request {
        SchemeRequest::Constants {
            constants,
            require_full,
        } => {
            let sort = constants
                .first()
                .map(|&c| problem.signature.func(c).result)
                .ok_or(SchemeError::NoConstants)?;
            constants_scheme(problem, sort, constants, ledger, *require_full)
        }
        SchemeRequest::UnaryRange { func } => unary_range_scheme(problem, *func, ledger),
        SchemeRequest::DrdRange { func, require_full } => {
            drd_range_scheme(problem, *func, ledger, *require_full)
        }
        SchemeRequest::UnaryPred { pred, require_full } => {
            unary_predicate_scheme(problem, *pred, ledger, *require_full)
        }
        SchemeRequest::BinaryPred { pred, pivot } => {
            binary_predicate_scheme(problem, *pred, *pivot, ledger)
        }
    }
}

/// A plan step that could not be applied.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("step {} ({kind}): {error}", step + 1)]
pub struct CombineError {
    pub step: usize,
    pub kind: SchemeKind,
    pub error: SchemeError,
    pub ledger: InterchangeabilityLedger,
}

/// Applies the plan left to right, threading the ledger, and appends every
/// emitted constraint to the problem's formulas.
pub fn combine(
    problem: &Problem,
    plan: &[SchemeRequest],
) -> Result<(Problem, Vec<SchemeApplication>), CombineError> {
    let mut ledger = initial_ledger(problem);
    let mut trail = Vec::with_capacity(plan.len());
    let mut extra = Vec::new();
    for (step, request) in plan.iter().enumerate() {
        let app = apply_request(problem, request, &ledger).map_err(|error| CombineError {
            step,
            kind: request.kind(),
            error,
            ledger: ledger.clone(),
        })?;
        ledger = app.after.clone();
        extra.extend(app.formulas.iter().cloned());
        trail.push(app);
    }
    Ok((problem.with_formulas(extra), trail))
}

/// A deterministic plan that [`combine`] accepts: constants per sort, then
/// DRD functions by descending argument-space size, unary predicates,
/// binary predicates whose second sort is untouched (pivot = first
/// interchangeable value), and finally unary range constraints for
/// `f : A -> A` when `A` is untouched.
pub fn default_plan(problem: &Problem) -> Vec<SchemeRequest> {
    let sig = &problem.signature;
    let mut ledger = initial_ledger(problem);
    let mut plan = Vec::new();
    let mut attempt = |request: SchemeRequest, ledger: &mut InterchangeabilityLedger| {
        if let Ok(app) = apply_request(problem, &request, ledger) {
            if !app.formulas.is_empty() {
                *ledger = app.after;
                plan.push(request);
            }
        }
    };

    for sort in sig.sort_ids() {
        let constants: Vec<FuncId> = sig
            .func_ids()
            .filter(|&f| sig.func(f).is_constant() && sig.func(f).result == sort)
            .collect();
        if !constants.is_empty() {
            attempt(
                SchemeRequest::Constants {
                    constants,
                    require_full: false,
                },
                &mut ledger,
            );
        }
    }

    let mut drd: Vec<FuncId> = sig
        .func_ids()
        .filter(|&f| sig.func(f).arity() >= 1 && sig.func(f).is_drd())
        .collect();
    drd.sort_by_key(|&f| std::cmp::Reverse(problem.tuple_count(&sig.func(f).args)));
    for func in drd {
        attempt(
            SchemeRequest::DrdRange {
                func,
                require_full: false,
            },
            &mut ledger,
        );
    }

    for pred in sig.pred_ids().filter(|&p| sig.pred(p).args.len() == 1) {
        attempt(
            SchemeRequest::UnaryPred {
                pred,
                require_full: false,
            },
            &mut ledger,
        );
    }

    for pred in sig.pred_ids().filter(|&p| sig.pred(p).args.len() == 2) {
        let a = sig.pred(pred).args[0];
        let pivot = ledger.values(a).first().copied().unwrap_or(0);
        attempt(SchemeRequest::BinaryPred { pred, pivot }, &mut ledger);
    }

    for func in sig.func_ids() {
        let decl = sig.func(func);
        if decl.arity() == 1 && decl.args[0] == decl.result {
            attempt(SchemeRequest::UnaryRange { func }, &mut ledger);
        }
    }
    plan
}

#[cfg(test)]
mod tests;
