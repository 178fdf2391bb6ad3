use super::{InterchangeabilityLedger, SchemeApplication, SchemeError, SchemeKind};
use crate::logic::{Formula, FuncId, PredId, Problem, SortId, Term, Value};

fn sort_name(problem: &Problem, s: SortId) -> String {
    problem.signature.sort(s).name.clone()
}

fn partial_ledger(problem: &Problem, sort: SortId, scheme: &str) -> SchemeError {
    SchemeError::Inapplicable(format!(
        "{scheme} needs every value of {} to be interchangeable and no extended soundness result covers a partial ledger",
        sort_name(problem, sort)
    ))
}

/// Values of `sort` outside the ledger, ascending.
fn outside(problem: &Problem, sort: SortId, ledger: &[u32]) -> Vec<u32> {
    (0..problem.size(sort))
        .filter(|v| !ledger.contains(v))
        .collect()
}

/// `t = x_1 ∨ ... ∨ t = x_k ∨ t = y_1 ∨ ...`, right-folded.
fn one_of(term: &Term, sort: SortId, prefix: &[u32], rest: &[u32]) -> Formula {
    Formula::disjunction(
        prefix
            .iter()
            .chain(rest)
            .map(|&v| Formula::eq(term.clone(), Term::elem(sort, v))),
    )
    .expect("at least one candidate value")
}

fn finish(
    kind: SchemeKind,
    symbols: Vec<String>,
    formulas: Vec<Formula>,
    before: &InterchangeabilityLedger,
    after: InterchangeabilityLedger,
) -> SchemeApplication {
    SchemeApplication {
        kind,
        symbols,
        formulas,
        before: before.clone(),
        after,
        warnings: Vec::new(),
    }
}

/// Ordered constant constraints `c_k ∈ {a_1..a_k} ∪ (domain \ X)` over the
/// ledger `X = a_1..a_m`, plus canonicity constraints when `X` is the whole
/// domain.
pub fn constants_scheme(
    problem: &Problem,
    sort: SortId,
    constants: &[FuncId],
    ledger: &InterchangeabilityLedger,
    require_full: bool,
) -> Result<SchemeApplication, SchemeError> {
    if constants.is_empty() {
        return Err(SchemeError::NoConstants);
    }
    let sig = &problem.signature;
    for &c in constants {
        let decl = sig.func(c);
        if !decl.is_constant() {
            return Err(SchemeError::NotConstant(decl.name.clone()));
        }
        if decl.result != sort {
            return Err(SchemeError::SortMismatch {
                symbol: decl.name.clone(),
                expected: sort_name(problem, sort),
                actual: sort_name(problem, decl.result),
            });
        }
    }
    let xs = ledger.values(sort);
    if xs.is_empty() {
        return Err(SchemeError::EmptyLedger(sort_name(problem, sort)));
    }
    let full = ledger.is_full(problem, sort);
    if require_full && !full {
        return Err(partial_ledger(problem, sort, "the constants scheme"));
    }
    let rest = outside(problem, sort, xs);
    let k_max = xs.len().min(constants.len());
    let consts: Vec<Term> = constants.iter().map(|&c| Term::constant(c)).collect();

    let mut formulas: Vec<Formula> = (0..k_max)
        .map(|k| one_of(&consts[k], sort, &xs[..=k], &rest))
        .collect();
    if full {
        for k in 1..k_max {
            for d in 1..=k {
                let premise = Formula::eq(consts[k].clone(), Term::elem(sort, xs[d]));
                let conclusion = Formula::disjunction(
                    consts[..k]
                        .iter()
                        .map(|c| Formula::eq(c.clone(), Term::elem(sort, xs[d - 1]))),
                )
                .expect("k >= 1");
                formulas.push(Formula::implies(premise, conclusion));
            }
        }
    }
    let mut after = ledger.clone();
    after.remove_occurring(&formulas);
    let symbols = constants
        .iter()
        .map(|&c| sig.func(c).name.clone())
        .collect();
    Ok(finish(
        SchemeKind::Constants,
        symbols,
        formulas,
        ledger,
        after,
    ))
}

/// Ordered range constraints `f(a_i) ∈ {a_1..a_{i+1}}` for `f : A -> A`.
/// Only proven for a fully interchangeable `A`.
pub fn unary_range_scheme(
    problem: &Problem,
    func: FuncId,
    ledger: &InterchangeabilityLedger,
) -> Result<SchemeApplication, SchemeError> {
    let decl = problem.signature.func(func);
    if decl.arity() != 1 || decl.args[0] != decl.result {
        return Err(SchemeError::Shape(
            decl.name.clone(),
            "expected f : A -> A".into(),
        ));
    }
    let sort = decl.result;
    if !ledger.is_full(problem, sort) {
        return Err(partial_ledger(problem, sort, "the unary range scheme"));
    }
    let xs = ledger.values(sort);
    let formulas: Vec<Formula> = (0..xs.len().saturating_sub(1))
        .map(|i| {
            one_of(
                &Term::app(func, vec![Term::elem(sort, xs[i])]),
                sort,
                &xs[..=i + 1],
                &[],
            )
        })
        .collect();
    let mut after = ledger.clone();
    after.clear(sort);
    Ok(finish(
        SchemeKind::UnaryRange,
        vec![decl.name.clone()],
        formulas,
        ledger,
        after,
    ))
}

/// Strong ordered range constraints `f(t_i) ∈ {b_1..b_i} ∪ (domain \ X)`
/// for a function whose result sort is none of its argument sorts. Argument
/// tuples are taken in row-major order.
pub fn drd_range_scheme(
    problem: &Problem,
    func: FuncId,
    ledger: &InterchangeabilityLedger,
    require_full: bool,
) -> Result<SchemeApplication, SchemeError> {
    let decl = problem.signature.func(func);
    if !decl.is_drd() {
        return Err(SchemeError::Shape(
            decl.name.clone(),
            "result sort must differ from every argument sort".into(),
        ));
    }
    let sort = decl.result;
    let xs = ledger.values(sort);
    if xs.is_empty() {
        return Err(SchemeError::EmptyLedger(sort_name(problem, sort)));
    }
    if require_full && !ledger.is_full(problem, sort) {
        return Err(partial_ledger(problem, sort, "the DRD range scheme"));
    }
    let rest = outside(problem, sort, xs);
    let formulas: Vec<Formula> = problem
        .tuples(&decl.args)
        .take(xs.len())
        .enumerate()
        .map(|(i, tuple)| {
            let args = decl
                .args
                .iter()
                .zip(&tuple)
                .map(|(&s, &v)| Term::elem(s, v))
                .collect();
            one_of(&Term::app(func, args), sort, &xs[..=i], &rest)
        })
        .collect();
    let mut after = ledger.clone();
    after.remove_occurring(&formulas);
    Ok(finish(
        SchemeKind::DrdRange,
        vec![decl.name.clone()],
        formulas,
        ledger,
        after,
    ))
}

/// Predicate membership constraints `Q(d_i) => Q(d_{i-1})` over the ledger.
pub fn unary_predicate_scheme(
    problem: &Problem,
    pred: PredId,
    ledger: &InterchangeabilityLedger,
    require_full: bool,
) -> Result<SchemeApplication, SchemeError> {
    let decl = problem.signature.pred(pred);
    if decl.args.len() != 1 {
        return Err(SchemeError::Shape(
            decl.name.clone(),
            "expected Q : A -> Bool".into(),
        ));
    }
    let sort = decl.args[0];
    if require_full && !ledger.is_full(problem, sort) {
        return Err(partial_ledger(problem, sort, "the unary predicate scheme"));
    }
    let xs = ledger.values(sort);
    let atom = |v: u32| Formula::pred(pred, vec![Term::elem(sort, v)]);
    let formulas: Vec<Formula> = xs
        .windows(2)
        .map(|w| Formula::implies(atom(w[1]), atom(w[0])))
        .collect();
    let mut after = ledger.clone();
    after.remove_occurring(&formulas);
    let mut app = finish(
        SchemeKind::UnaryPred,
        vec![decl.name.clone()],
        formulas,
        ledger,
        after,
    );
    if xs.len() < 2 {
        app.warnings.push(format!(
            "fewer than two interchangeable values of {}; nothing emitted for {}",
            sort_name(problem, sort),
            decl.name
        ));
    }
    Ok(app)
}

/// `Q(p, b_j) => Q(p, b_{j-1})` for a single pivot `p` of `A`, where
/// `Q : A x B -> Bool`, `A != B` and `B` is fully interchangeable.
pub fn binary_predicate_scheme(
    problem: &Problem,
    pred: PredId,
    pivot: u32,
    ledger: &InterchangeabilityLedger,
) -> Result<SchemeApplication, SchemeError> {
    let decl = problem.signature.pred(pred);
    if decl.args.len() != 2 {
        return Err(SchemeError::Shape(
            decl.name.clone(),
            "expected Q : A x B -> Bool".into(),
        ));
    }
    let (a, b) = (decl.args[0], decl.args[1]);
    if a == b {
        return Err(SchemeError::Inapplicable(format!(
            "the binary predicate scheme needs distinct argument sorts, `{}` uses {} twice",
            decl.name,
            sort_name(problem, a)
        )));
    }
    if ledger.pivot(pred).is_some() {
        return Err(SchemeError::SecondPivot(decl.name.clone()));
    }
    if pivot >= problem.size(a) {
        return Err(SchemeError::PivotOutOfRange {
            sort: sort_name(problem, a),
            pivot,
        });
    }
    if !ledger.is_full(problem, b) {
        return Err(partial_ledger(problem, b, "the binary predicate scheme"));
    }
    let atom = |v: u32| Formula::pred(pred, vec![Term::elem(a, pivot), Term::elem(b, v)]);
    let formulas: Vec<Formula> = ledger
        .values(b)
        .windows(2)
        .map(|w| Formula::implies(atom(w[1]), atom(w[0])))
        .collect();
    let mut after = ledger.clone();
    after.clear(b);
    after.remove([Value::new(a, pivot)]);
    after.record_pivot(pred, pivot);
    Ok(finish(
        SchemeKind::BinaryPred,
        vec![decl.name.clone()],
        formulas,
        ledger,
        after,
    ))
}
