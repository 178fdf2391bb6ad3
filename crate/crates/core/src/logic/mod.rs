//! Many-sorted first-order data model: signatures, extended terms and formulas,
//! domain assignments, problems and interpretations.

mod eval;
mod ground;

pub use eval::{evaluate, satisfies, Env, EvalError};
pub(crate) use eval::{CompiledFormula, Evaluator, PartialInterpretation};
pub use ground::{ground_problem, GroundError};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SortId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FuncId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredId(pub usize);

/// A canonical domain element. `index` is zero-based; the concrete syntax
/// prints it one-based as `Sort!k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Value {
    pub sort: SortId,
    pub index: u32,
}

impl Value {
    pub fn new(sort: SortId, index: u32) -> Self {
        Value { sort, index }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sort {
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FuncDecl {
    pub name: String,
    pub args: Vec<SortId>,
    pub result: SortId,
}

impl FuncDecl {
    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_constant(&self) -> bool {
        self.args.is_empty()
    }

    /// Domain-range distinct: the result sort is not among the argument sorts.
    pub fn is_drd(&self) -> bool {
        !self.args.contains(&self.result)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PredDecl {
    pub name: String,
    pub args: Vec<SortId>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SignatureError {
    #[error("duplicate sort `{0}`")]
    DuplicateSort(String),
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("predicate `{0}` must take at least one argument")]
    NullaryPredicate(String),
    #[error("unknown sort id {0}")]
    UnknownSort(usize),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Signature {
    pub sorts: Vec<Sort>,
    pub funcs: Vec<FuncDecl>,
    pub preds: Vec<PredDecl>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_sort(&mut self, name: &str) -> Result<SortId, SignatureError> {
        if self.sort_by_name(name).is_some() {
            return Err(SignatureError::DuplicateSort(name.to_string()));
        }
        self.sorts.push(Sort {
            name: name.to_string(),
        });
        Ok(SortId(self.sorts.len() - 1))
    }

    pub fn add_func(
        &mut self,
        name: &str,
        args: &[SortId],
        result: SortId,
    ) -> Result<FuncId, SignatureError> {
        self.check_fresh_symbol(name)?;
        for s in args.iter().chain(std::iter::once(&result)) {
            self.check_sort(*s)?;
        }
        self.funcs.push(FuncDecl {
            name: name.to_string(),
            args: args.to_vec(),
            result,
        });
        Ok(FuncId(self.funcs.len() - 1))
    }

    pub fn add_const(&mut self, name: &str, sort: SortId) -> Result<FuncId, SignatureError> {
        self.add_func(name, &[], sort)
    }

    pub fn add_pred(&mut self, name: &str, args: &[SortId]) -> Result<PredId, SignatureError> {
        self.check_fresh_symbol(name)?;
        if args.is_empty() {
            return Err(SignatureError::NullaryPredicate(name.to_string()));
        }
        for s in args {
            self.check_sort(*s)?;
        }
        self.preds.push(PredDecl {
            name: name.to_string(),
            args: args.to_vec(),
        });
        Ok(PredId(self.preds.len() - 1))
    }

    fn check_sort(&self, s: SortId) -> Result<(), SignatureError> {
        if s.0 < self.sorts.len() {
            Ok(())
        } else {
            Err(SignatureError::UnknownSort(s.0))
        }
    }

    fn check_fresh_symbol(&self, name: &str) -> Result<(), SignatureError> {
        if self.func_by_name(name).is_some() || self.pred_by_name(name).is_some() {
            Err(SignatureError::DuplicateSymbol(name.to_string()))
        } else {
            Ok(())
        }
    }

    pub fn sort_by_name(&self, name: &str) -> Option<SortId> {
        self.sorts.iter().position(|s| s.name == name).map(SortId)
    }

    pub fn func_by_name(&self, name: &str) -> Option<FuncId> {
        self.funcs.iter().position(|f| f.name == name).map(FuncId)
    }

    pub fn pred_by_name(&self, name: &str) -> Option<PredId> {
        self.preds.iter().position(|p| p.name == name).map(PredId)
    }

    pub fn sort(&self, id: SortId) -> &Sort {
        &self.sorts[id.0]
    }

    pub fn func(&self, id: FuncId) -> &FuncDecl {
        &self.funcs[id.0]
    }

    pub fn pred(&self, id: PredId) -> &PredDecl {
        &self.preds[id.0]
    }

    pub fn sort_ids(&self) -> impl Iterator<Item = SortId> {
        (0..self.sorts.len()).map(SortId)
    }

    pub fn func_ids(&self) -> impl Iterator<Item = FuncId> {
        (0..self.funcs.len()).map(FuncId)
    }

    pub fn pred_ids(&self) -> impl Iterator<Item = PredId> {
        (0..self.preds.len()).map(PredId)
    }
}

/// Domain sizes per sort. Sort `s` of size `n` has canonical values
/// `s!1 .. s!n`; values of distinct sorts never coincide.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DomainAssignment {
    sizes: Vec<u32>,
}

impl DomainAssignment {
    /// Every size must be at least one.
    pub fn new(sizes: Vec<u32>) -> Result<Self, ProblemError> {
        if let Some(pos) = sizes.iter().position(|&n| n == 0) {
            return Err(ProblemError::EmptyDomain(pos));
        }
        Ok(DomainAssignment { sizes })
    }

    pub fn size(&self, sort: SortId) -> u32 {
        self.sizes[sort.0]
    }

    pub fn sizes(&self) -> &[u32] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var { name: String, sort: SortId },
    App { func: FuncId, args: Vec<Term> },
    Elem(Value),
}

impl Term {
    pub fn var(name: &str, sort: SortId) -> Term {
        Term::Var {
            name: name.to_string(),
            sort,
        }
    }

    pub fn app(func: FuncId, args: Vec<Term>) -> Term {
        Term::App { func, args }
    }

    pub fn constant(func: FuncId) -> Term {
        Term::App {
            func,
            args: Vec::new(),
        }
    }

    pub fn elem(sort: SortId, index: u32) -> Term {
        Term::Elem(Value::new(sort, index))
    }

    /// The sort this term has if it is well formed.
    pub fn sort(&self, sig: &Signature) -> SortId {
        match self {
            Term::Var { sort, .. } => *sort,
            Term::App { func, .. } => sig.func(*func).result,
            Term::Elem(v) => v.sort,
        }
    }

    pub fn is_pure(&self) -> bool {
        match self {
            Term::Var { .. } => true,
            Term::App { args, .. } => args.iter().all(Term::is_pure),
            Term::Elem(_) => false,
        }
    }

    fn visit_values(&self, out: &mut impl FnMut(Value)) {
        match self {
            Term::Var { .. } => {}
            Term::App { args, .. } => args.iter().for_each(|a| a.visit_values(out)),
            Term::Elem(v) => out(*v),
        }
    }

    pub fn map_values(&self, f: &impl Fn(Value) -> Value) -> Term {
        match self {
            Term::Var { .. } => self.clone(),
            Term::App { func, args } => Term::App {
                func: *func,
                args: args.iter().map(|a| a.map_values(f)).collect(),
            },
            Term::Elem(v) => Term::Elem(f(*v)),
        }
    }

    /// Replaces free occurrences of `name` with `value`.
    pub fn substitute(&self, name: &str, value: &Term) -> Term {
        match self {
            Term::Var { name: n, .. } if n == name => value.clone(),
            Term::Var { .. } | Term::Elem(_) => self.clone(),
            Term::App { func, args } => Term::App {
                func: *func,
                args: args.iter().map(|a| a.substitute(name, value)).collect(),
            },
        }
    }

    fn visit_funcs(&self, out: &mut impl FnMut(FuncId)) {
        if let Term::App { func, args } = self {
            out(*func);
            args.iter().for_each(|a| a.visit_funcs(out));
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Eq(Term, Term),
    Pred {
        pred: PredId,
        args: Vec<Term>,
    },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall {
        var: String,
        sort: SortId,
        body: Box<Formula>,
    },
    Exists {
        var: String,
        sort: SortId,
        body: Box<Formula>,
    },
}

impl Formula {
    pub fn eq(lhs: Term, rhs: Term) -> Formula {
        Formula::Eq(lhs, rhs)
    }

    pub fn pred(pred: PredId, args: Vec<Term>) -> Formula {
        Formula::Pred { pred, args }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(var: &str, sort: SortId, body: Formula) -> Formula {
        Formula::Forall {
            var: var.to_string(),
            sort,
            body: Box::new(body),
        }
    }

    pub fn exists(var: &str, sort: SortId, body: Formula) -> Formula {
        Formula::Exists {
            var: var.to_string(),
            sort,
            body: Box::new(body),
        }
    }

    /// Right-folded conjunction; `None` for an empty list.
    pub fn conjunction(parts: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        Self::fold_right(parts.into_iter().collect(), Formula::and)
    }

    /// Right-folded disjunction; `None` for an empty list.
    pub fn disjunction(parts: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        Self::fold_right(parts.into_iter().collect(), Formula::or)
    }

    fn fold_right(
        mut parts: Vec<Formula>,
        join: fn(Formula, Formula) -> Formula,
    ) -> Option<Formula> {
        let mut acc = parts.pop()?;
        while let Some(prev) = parts.pop() {
            acc = join(prev, acc);
        }
        Some(acc)
    }

    pub fn is_pure(&self) -> bool {
        let mut pure = true;
        self.visit_values(&mut |_| pure = false);
        pure
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Eq(..) | Formula::Pred { .. } => true,
            Formula::Not(a) => a.is_quantifier_free(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            Formula::Forall { .. } | Formula::Exists { .. } => false,
        }
    }

    /// Calls `out` for every domain element occurring as a term.
    pub fn visit_values(&self, out: &mut impl FnMut(Value)) {
        match self {
            Formula::Eq(a, b) => {
                a.visit_values(out);
                b.visit_values(out);
            }
            Formula::Pred { args, .. } => args.iter().for_each(|a| a.visit_values(out)),
            Formula::Not(a) => a.visit_values(out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.visit_values(out);
                b.visit_values(out);
            }
            Formula::Forall { body, .. } | Formula::Exists { body, .. } => body.visit_values(out),
        }
    }

    /// Rewrites every domain element through `f`, leaving structure unchanged.
    pub fn map_values(&self, f: &impl Fn(Value) -> Value) -> Formula {
        let bin = |a: &Formula, b: &Formula| (Box::new(a.map_values(f)), Box::new(b.map_values(f)));
        match self {
            Formula::Eq(a, b) => Formula::Eq(a.map_values(f), b.map_values(f)),
            Formula::Pred { pred, args } => Formula::Pred {
                pred: *pred,
                args: args.iter().map(|a| a.map_values(f)).collect(),
            },
            Formula::Not(a) => Formula::Not(Box::new(a.map_values(f))),
            Formula::And(a, b) => {
                let (a, b) = bin(a, b);
                Formula::And(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = bin(a, b);
                Formula::Or(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = bin(a, b);
                Formula::Implies(a, b)
            }
            Formula::Iff(a, b) => {
                let (a, b) = bin(a, b);
                Formula::Iff(a, b)
            }
            Formula::Forall { var, sort, body } => Formula::Forall {
                var: var.clone(),
                sort: *sort,
                body: Box::new(body.map_values(f)),
            },
            Formula::Exists { var, sort, body } => Formula::Exists {
                var: var.clone(),
                sort: *sort,
                body: Box::new(body.map_values(f)),
            },
        }
    }

    /// Substitutes `value` for free occurrences of variable `name`.
    pub fn substitute(&self, name: &str, value: &Term) -> Formula {
        let sub = |x: &Formula| Box::new(x.substitute(name, value));
        match self {
            Formula::Eq(a, b) => Formula::Eq(a.substitute(name, value), b.substitute(name, value)),
            Formula::Pred { pred, args } => Formula::Pred {
                pred: *pred,
                args: args.iter().map(|a| a.substitute(name, value)).collect(),
            },
            Formula::Not(a) => Formula::Not(sub(a)),
            Formula::And(a, b) => Formula::And(sub(a), sub(b)),
            Formula::Or(a, b) => Formula::Or(sub(a), sub(b)),
            Formula::Implies(a, b) => Formula::Implies(sub(a), sub(b)),
            Formula::Iff(a, b) => Formula::Iff(sub(a), sub(b)),
            Formula::Forall { var, .. } | Formula::Exists { var, .. } if var == name => {
                self.clone()
            }
            Formula::Forall { var, sort, body } => Formula::Forall {
                var: var.clone(),
                sort: *sort,
                body: sub(body),
            },
            Formula::Exists { var, sort, body } => Formula::Exists {
                var: var.clone(),
                sort: *sort,
                body: sub(body),
            },
        }
    }

    /// Function and predicate symbols occurring in the formula.
    pub fn symbols(&self) -> (BTreeSet<FuncId>, BTreeSet<PredId>) {
        let mut funcs = BTreeSet::new();
        let mut preds = BTreeSet::new();
        self.collect_symbols(&mut funcs, &mut preds);
        (funcs, preds)
    }

    fn collect_symbols(&self, funcs: &mut BTreeSet<FuncId>, preds: &mut BTreeSet<PredId>) {
        match self {
            Formula::Eq(a, b) => {
                a.visit_funcs(&mut |f| {
                    funcs.insert(f);
                });
                b.visit_funcs(&mut |f| {
                    funcs.insert(f);
                });
            }
            Formula::Pred { pred, args } => {
                preds.insert(*pred);
                for a in args {
                    a.visit_funcs(&mut |f| {
                        funcs.insert(f);
                    });
                }
            }
            Formula::Not(a) => a.collect_symbols(funcs, preds),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.collect_symbols(funcs, preds);
                b.collect_symbols(funcs, preds);
            }
            Formula::Forall { body, .. } | Formula::Exists { body, .. } => {
                body.collect_symbols(funcs, preds)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProblemError {
    #[error("domain of sort #{0} is empty")]
    EmptyDomain(usize),
    #[error("domain assignment covers {got} sorts, signature declares {expected}")]
    DomainArity { expected: usize, got: usize },
}

/// A finite model finding problem: signature, asserted formulas and domain sizes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Problem {
    pub signature: Signature,
    pub formulas: Vec<Formula>,
    pub domains: DomainAssignment,
}

impl Problem {
    pub fn new(
        signature: Signature,
        formulas: Vec<Formula>,
        domains: DomainAssignment,
    ) -> Result<Self, ProblemError> {
        if signature.sorts.len() != domains.len() {
            return Err(ProblemError::DomainArity {
                expected: signature.sorts.len(),
                got: domains.len(),
            });
        }
        Ok(Problem {
            signature,
            formulas,
            domains,
        })
    }

    pub fn size(&self, sort: SortId) -> u32 {
        self.domains.size(sort)
    }

    pub fn values(&self, sort: SortId) -> impl Iterator<Item = Value> {
        (0..self.size(sort)).map(move |i| Value::new(sort, i))
    }

    pub fn is_pure(&self) -> bool {
        self.formulas.iter().all(Formula::is_pure)
    }

    /// Number of argument tuples over the given sorts.
    pub fn tuple_count(&self, sorts: &[SortId]) -> usize {
        sorts.iter().map(|s| self.size(*s) as usize).product()
    }

    /// Row-major position of an argument tuple (first argument most significant).
    pub fn tuple_index(&self, sorts: &[SortId], tuple: &[u32]) -> usize {
        sorts.iter().zip(tuple).fold(0usize, |acc, (s, &v)| {
            acc * self.size(*s) as usize + v as usize
        })
    }

    /// Inverse of [`Problem::tuple_index`].
    pub fn tuple_at(&self, sorts: &[SortId], mut index: usize) -> Vec<u32> {
        let mut out = vec![0u32; sorts.len()];
        for (slot, s) in out.iter_mut().zip(sorts).rev() {
            let n = self.size(*s) as usize;
            *slot = (index % n) as u32;
            index /= n;
        }
        out
    }

    /// All argument tuples in lexicographic order.
    pub fn tuples(&self, sorts: &[SortId]) -> impl Iterator<Item = Vec<u32>> + '_ {
        let sorts = sorts.to_vec();
        (0..self.tuple_count(&sorts)).map(move |i| self.tuple_at(&sorts, i))
    }

    /// Appends formulas, keeping everything else.
    pub fn with_formulas(&self, extra: impl IntoIterator<Item = Formula>) -> Problem {
        let mut p = self.clone();
        p.formulas.extend(extra);
        p
    }

    pub fn value_name(&self, v: Value) -> String {
        format!("{}!{}", self.signature.sort(v.sort).name, v.index + 1)
    }
}

/// A sort error found by [`check_well_sorted`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortError {
    pub formula: usize,
    /// Rendering of the offending subterm.
    pub subject: String,
    pub kind: SortErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SortErrorKind {
    Mismatch {
        expected: String,
        actual: String,
    },
    ArgSort {
        position: usize,
        expected: String,
        actual: String,
    },
    Arity {
        expected: usize,
        actual: usize,
    },
    FreeVariable,
    IndexOutOfRange {
        size: u32,
    },
    UnknownSymbol,
}

impl fmt::Display for SortError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "formula {}: `{}`: ", self.formula + 1, self.subject)?;
        match &self.kind {
            SortErrorKind::Mismatch { expected, actual } => {
                write!(f, "sort mismatch, expected {expected}, found {actual}")
            }
            SortErrorKind::ArgSort {
                position,
                expected,
                actual,
            } => {
                write!(
                    f,
                    "argument {position} has sort {actual}, expected {expected}"
                )
            }
            SortErrorKind::Arity { expected, actual } => {
                write!(f, "expected {expected} arguments, found {actual}")
            }
            SortErrorKind::FreeVariable => write!(f, "free variable"),
            SortErrorKind::IndexOutOfRange { size } => {
                write!(f, "domain element out of range (size {size})")
            }
            SortErrorKind::UnknownSymbol => write!(f, "unknown symbol"),
        }
    }
}

/// Returns every sort error in the problem's formulas; empty iff all formulas
/// are well-sorted and closed.
pub fn check_well_sorted(problem: &Problem) -> Vec<SortError> {
    let mut errors = Vec::new();
    for (i, formula) in problem.formulas.iter().enumerate() {
        let mut checker = Checker {
            problem,
            formula: i,
            scope: Vec::new(),
            errors: &mut errors,
        };
        checker.formula(formula);
    }
    errors
}

struct Checker<'a> {
    problem: &'a Problem,
    formula: usize,
    scope: Vec<(&'a str, SortId)>,
    errors: &'a mut Vec<SortError>,
}

impl<'a> Checker<'a> {
    fn sort_name(&self, s: SortId) -> String {
        self.problem
            .signature
            .sorts
            .get(s.0)
            .map(|s| s.name.clone())
            .unwrap_or_else(|| format!("#{}", s.0))
    }

    fn report(&mut self, subject: String, kind: SortErrorKind) {
        self.errors.push(SortError {
            formula: self.formula,
            subject,
            kind,
        });
    }

    /// Returns the term's sort when it can be determined.
    fn term(&mut self, t: &'a Term) -> Option<SortId> {
        let sig = &self.problem.signature;
        match t {
            Term::Var { name, sort } => match self
                .scope
                .iter()
                .rev()
                .find(|(n, _)| n == name)
                .map(|(_, s)| *s)
            {
                None => {
                    self.report(name.clone(), SortErrorKind::FreeVariable);
                    None
                }
                Some(bound) if bound != *sort => {
                    let (expected, actual) = (self.sort_name(bound), self.sort_name(*sort));
                    self.report(name.clone(), SortErrorKind::Mismatch { expected, actual });
                    Some(bound)
                }
                Some(_) => Some(*sort),
            },
            Term::Elem(v) => {
                if v.sort.0 >= sig.sorts.len() {
                    self.report(
                        format!("#{}!{}", v.sort.0, v.index + 1),
                        SortErrorKind::UnknownSymbol,
                    );
                    return None;
                }
                let size = self.problem.size(v.sort);
                if v.index >= size {
                    self.report(
                        self.problem.value_name(*v),
                        SortErrorKind::IndexOutOfRange { size },
                    );
                }
                Some(v.sort)
            }
            Term::App { func, args } => {
                let Some(decl) = sig.funcs.get(func.0) else {
                    self.report(format!("#{}", func.0), SortErrorKind::UnknownSymbol);
                    return None;
                };
                self.args(&decl.name, &decl.args, args);
                Some(decl.result)
            }
        }
    }

    fn args(&mut self, name: &str, declared: &[SortId], args: &'a [Term]) {
        if declared.len() != args.len() {
            self.report(
                name.to_string(),
                SortErrorKind::Arity {
                    expected: declared.len(),
                    actual: args.len(),
                },
            );
        }
        for (pos, (want, arg)) in declared.iter().zip(args).enumerate() {
            if let Some(got) = self.term(arg) {
                if got != *want {
                    let (expected, actual) = (self.sort_name(*want), self.sort_name(got));
                    self.report(
                        crate::io::term_to_string(self.problem, arg),
                        SortErrorKind::ArgSort {
                            position: pos + 1,
                            expected,
                            actual,
                        },
                    );
                }
            }
        }
        for arg in args.iter().skip(declared.len()) {
            self.term(arg);
        }
    }

    fn formula(&mut self, f: &'a Formula) {
        match f {
            Formula::Eq(a, b) => {
                let (sa, sb) = (self.term(a), self.term(b));
                if let (Some(sa), Some(sb)) = (sa, sb) {
                    if sa != sb {
                        let (expected, actual) = (self.sort_name(sa), self.sort_name(sb));
                        let subject = format!(
                            "(= {} {})",
                            crate::io::term_to_string(self.problem, a),
                            crate::io::term_to_string(self.problem, b)
                        );
                        self.report(subject, SortErrorKind::Mismatch { expected, actual });
                    }
                }
            }
            Formula::Pred { pred, args } => {
                let Some(decl) = self.problem.signature.preds.get(pred.0) else {
                    self.report(format!("#{}", pred.0), SortErrorKind::UnknownSymbol);
                    return;
                };
                self.args(&decl.name, &decl.args, args);
            }
            Formula::Not(a) => self.formula(a),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                self.formula(a);
                self.formula(b);
            }
            Formula::Forall { var, sort, body } | Formula::Exists { var, sort, body } => {
                if sort.0 >= self.problem.signature.sorts.len() {
                    self.report(var.clone(), SortErrorKind::UnknownSymbol);
                    return;
                }
                self.scope.push((var, *sort));
                self.formula(body);
                self.scope.pop();
            }
        }
    }
}

/// Domain elements occurring syntactically in the formulas, grouped by sort.
/// Every sort of the signature has an entry.
pub fn collect_occurring_values(problem: &Problem) -> BTreeMap<SortId, BTreeSet<Value>> {
    occurring_values_in(problem, &problem.formulas)
}

pub(crate) fn occurring_values_in(
    problem: &Problem,
    formulas: &[Formula],
) -> BTreeMap<SortId, BTreeSet<Value>> {
    let mut out: BTreeMap<SortId, BTreeSet<Value>> = problem
        .signature
        .sort_ids()
        .map(|s| (s, BTreeSet::new()))
        .collect();
    for f in formulas {
        f.visit_values(&mut |v| {
            out.entry(v.sort).or_default().insert(v);
        });
    }
    out
}

/// Concrete functions and relations for every symbol of a signature.
///
/// `funcs[f][t]` is the result index of function `f` on the argument tuple
/// with row-major position `t`; `preds[p][t]` says whether tuple `t` is in
/// the relation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interpretation {
    pub funcs: Vec<Vec<u32>>,
    pub preds: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ShapeError {
    #[error("interpretation has {got} function tables, signature has {expected}")]
    FuncCount { expected: usize, got: usize },
    #[error("interpretation has {got} relations, signature has {expected}")]
    PredCount { expected: usize, got: usize },
    #[error("table for `{name}` has {got} cells, expected {expected}")]
    Cells {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("table for `{name}` holds value index {value} outside a domain of size {size}")]
    Range { name: String, value: u32, size: u32 },
    #[error("domain permutation covers {got} sorts, problem has {expected}")]
    Sorts { expected: usize, got: usize },
}

impl Interpretation {
    /// The interpretation mapping every function cell to the first value and
    /// every relation to the empty set.
    pub fn first(problem: &Problem) -> Interpretation {
        let sig = &problem.signature;
        Interpretation {
            funcs: sig
                .funcs
                .iter()
                .map(|f| vec![0; problem.tuple_count(&f.args)])
                .collect(),
            preds: sig
                .preds
                .iter()
                .map(|p| vec![false; problem.tuple_count(&p.args)])
                .collect(),
        }
    }

    pub fn check_shape(&self, problem: &Problem) -> Result<(), ShapeError> {
        let sig = &problem.signature;
        if self.funcs.len() != sig.funcs.len() {
            return Err(ShapeError::FuncCount {
                expected: sig.funcs.len(),
                got: self.funcs.len(),
            });
        }
        if self.preds.len() != sig.preds.len() {
            return Err(ShapeError::PredCount {
                expected: sig.preds.len(),
                got: self.preds.len(),
            });
        }
        for (decl, table) in sig.funcs.iter().zip(&self.funcs) {
            let expected = problem.tuple_count(&decl.args);
            if table.len() != expected {
                return Err(ShapeError::Cells {
                    name: decl.name.clone(),
                    expected,
                    got: table.len(),
                });
            }
            let size = problem.size(decl.result);
            if let Some(&value) = table.iter().find(|&&v| v >= size) {
                return Err(ShapeError::Range {
                    name: decl.name.clone(),
                    value,
                    size,
                });
            }
        }
        for (decl, rel) in sig.preds.iter().zip(&self.preds) {
            let expected = problem.tuple_count(&decl.args);
            if rel.len() != expected {
                return Err(ShapeError::Cells {
                    name: decl.name.clone(),
                    expected,
                    got: rel.len(),
                });
            }
        }
        Ok(())
    }

    pub fn func_value(&self, problem: &Problem, func: FuncId, args: &[u32]) -> u32 {
        let decl = problem.signature.func(func);
        self.funcs[func.0][problem.tuple_index(&decl.args, args)]
    }

    pub fn holds(&self, problem: &Problem, pred: PredId, args: &[u32]) -> bool {
        let decl = problem.signature.pred(pred);
        self.preds[pred.0][problem.tuple_index(&decl.args, args)]
    }

    pub fn set_func(&mut self, problem: &Problem, func: FuncId, args: &[u32], value: u32) {
        let decl = problem.signature.func(func);
        let idx = problem.tuple_index(&decl.args, args);
        self.funcs[func.0][idx] = value;
    }

    pub fn set_holds(&mut self, problem: &Problem, pred: PredId, args: &[u32], value: bool) {
        let decl = problem.signature.pred(pred);
        let idx = problem.tuple_index(&decl.args, args);
        self.preds[pred.0][idx] = value;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn value_relabeling_example_is_well_sorted() {
        let p = catalog::relabeling_example();
        assert!(check_well_sorted(&p).is_empty());
        assert!(p.is_pure());
    }

    #[test]
    fn equality_across_sorts_is_one_error() {
        let mut p = catalog::relabeling_example();
        let sig = &p.signature;
        let c = sig.func_by_name("c").unwrap();
        let d = sig.func_by_name("d").unwrap();
        p.formulas = vec![Formula::eq(Term::constant(c), Term::constant(d))];
        let errs = check_well_sorted(&p);
        assert_eq!(errs.len(), 1);
        assert!(matches!(errs[0].kind, SortErrorKind::Mismatch { .. }));
    }

    #[test]
    fn predicate_arg_sort_error_reports_position_two() {
        let mut p = catalog::relabeling_example();
        let a = p.signature.sort_by_name("A").unwrap();
        let pr = p.signature.pred_by_name("P").unwrap();
        p.formulas = vec![Formula::forall(
            "x",
            a,
            Formula::pred(pr, vec![Term::var("x", a), Term::var("x", a)]),
        )];
        let errs = check_well_sorted(&p);
        assert_eq!(errs.len(), 1);
        match &errs[0].kind {
            SortErrorKind::ArgSort {
                position,
                expected,
                actual,
            } => {
                assert_eq!(*position, 2);
                assert_eq!(expected, "B");
                assert_eq!(actual, "A");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn free_variable_and_range_errors() {
        let mut p = catalog::relabeling_example();
        let a = p.signature.sort_by_name("A").unwrap();
        p.formulas = vec![
            Formula::eq(Term::var("x", a), Term::elem(a, 0)),
            Formula::eq(Term::elem(a, 3), Term::elem(a, 0)),
        ];
        let errs = check_well_sorted(&p);
        assert_eq!(errs.len(), 2);
        assert_eq!(errs[0].kind, SortErrorKind::FreeVariable);
        assert_eq!(errs[1].kind, SortErrorKind::IndexOutOfRange { size: 3 });
    }

    #[test]
    fn occurring_values_of_pure_problem_are_empty() {
        let p = catalog::relabeling_example();
        let occ = collect_occurring_values(&p);
        assert_eq!(occ.len(), 2);
        assert!(occ.values().all(BTreeSet::is_empty));
    }

    #[test]
    fn occurring_values_of_extended_example() {
        let p = catalog::interchangeable_constants_example();
        let occ = collect_occurring_values(&p);
        let a = p.signature.sort_by_name("A").unwrap();
        let b = p.signature.sort_by_name("B").unwrap();
        let a_vals: Vec<u32> = occ[&a].iter().map(|v| v.index + 1).collect();
        let b_vals: Vec<u32> = occ[&b].iter().map(|v| v.index + 1).collect();
        assert_eq!(a_vals, vec![3, 4]);
        assert_eq!(b_vals, vec![1]);
    }

    #[test]
    fn occurring_values_after_constant_pinning() {
        let p = catalog::combination_pinned();
        let occ = collect_occurring_values(&p);
        let a = p.signature.sort_by_name("A").unwrap();
        assert_eq!(occ[&a].iter().map(|v| v.index).collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn tuple_index_roundtrip() {
        let p = catalog::relabeling_example();
        let sorts = p.signature.pred(PredId(0)).args.clone();
        for (i, t) in p.tuples(&sorts).enumerate() {
            assert_eq!(p.tuple_index(&sorts, &t), i);
        }
        assert_eq!(p.tuples(&[]).collect::<Vec<_>>(), vec![Vec::<u32>::new()]);
    }

    #[test]
    fn zero_sized_domain_rejected() {
        assert_eq!(
            DomainAssignment::new(vec![2, 0]),
            Err(ProblemError::EmptyDomain(1))
        );
    }
}
