//! Line-oriented S-expression syntax for problems and interpretations.
//!
//! ```text
//! (sort A 3)
//! (const c A)
//! (func f (A) B)
//! (pred P (A B))
//! (assert (forall ((x B)) (P c x)))
//! ```
//!
//! Domain elements are written `Sort!k` with `k` one-based. Interpretations
//! list `(value f A!1 B!2)` per function cell and `(holds P A!1 B!1)` per
//! true tuple.

mod interp;
pub(crate) mod sexp;

pub use interp::{parse_interpretation, print_interpretation};

use std::fmt;

use crate::logic::{
    DomainAssignment, Formula, FuncId, PredId, Problem, Signature, SignatureError, SortId, Term,
    Value,
};
use sexp::{is_ident, is_int, read_all, split_domlit, Sexp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {kind}")]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub(crate) fn new(pos: Pos, kind: ParseErrorKind) -> Self {
        ParseError { pos, kind }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("invalid token `{0}`")]
    Lex(String),
    #[error("{0}")]
    Syntax(String),
    #[error("undeclared symbol `{0}`")]
    Undeclared(String),
    #[error("`{name}` expects {expected} arguments, found {actual}")]
    Arity {
        name: String,
        expected: usize,
        actual: usize,
    },
    #[error("sort mismatch: expected {expected}, found {actual}")]
    SortMismatch { expected: String, actual: String },
    #[error("duplicate declaration of `{0}`")]
    Duplicate(String),
    #[error("`{literal}` is out of range for a domain of size {size}")]
    IndexOutOfRange { literal: String, size: u32 },
    #[error("`{0}` is a reserved word")]
    Reserved(String),
    #[error("no value given for `{0}`")]
    MissingCell(String),
    #[error("value given twice for `{0}`")]
    DuplicateCell(String),
}

const RESERVED: &[&str] = &[
    "sort", "const", "func", "pred", "assert", "not", "and", "or", "forall", "exists", "value",
    "holds",
];

fn err<T>(pos: Pos, kind: ParseErrorKind) -> Result<T, ParseError> {
    Err(ParseError::new(pos, kind))
}

fn syntax<T>(pos: Pos, msg: &str) -> Result<T, ParseError> {
    err(pos, ParseErrorKind::Syntax(msg.to_string()))
}

fn ident(s: &Sexp, what: &str) -> Result<String, ParseError> {
    match s.atom() {
        Some(t) if is_ident(t) => Ok(t.to_string()),
        _ => syntax(s.pos(), &format!("expected {what}")),
    }
}

fn decl_name(s: &Sexp) -> Result<String, ParseError> {
    let name = ident(s, "a name")?;
    if RESERVED.contains(&name.as_str()) {
        return err(s.pos(), ParseErrorKind::Reserved(name));
    }
    Ok(name)
}

/// Parses a problem document. Symbols must be declared before use.
pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    let mut b = Builder {
        sig: Signature::new(),
        sizes: Vec::new(),
        formulas: Vec::new(),
    };
    for decl in read_all(text)? {
        b.decl(&decl)?;
    }
    let domains = DomainAssignment::new(b.sizes).expect("sizes checked while parsing");
    Ok(Problem::new(b.sig, b.formulas, domains).expect("one size per sort"))
}

pub(crate) struct Builder {
    pub sig: Signature,
    pub sizes: Vec<u32>,
    pub formulas: Vec<Formula>,
}

impl Builder {
    fn sort(&self, s: &Sexp) -> Result<SortId, ParseError> {
        let name = ident(s, "a sort name")?;
        self.sig
            .sort_by_name(&name)
            .ok_or_else(|| ParseError::new(s.pos(), ParseErrorKind::Undeclared(name)))
    }

    fn sort_list(&self, s: &Sexp) -> Result<Vec<SortId>, ParseError> {
        let items = s.list().ok_or_else(|| {
            ParseError::new(
                s.pos(),
                ParseErrorKind::Syntax("expected a list of sorts".into()),
            )
        })?;
        if items.is_empty() {
            return syntax(s.pos(), "expected at least one argument sort");
        }
        items.iter().map(|i| self.sort(i)).collect()
    }

    fn sort_name(&self, s: SortId) -> String {
        self.sig.sort(s).name.clone()
    }

    fn sig_err(pos: Pos, e: SignatureError) -> ParseError {
        match e {
            SignatureError::DuplicateSort(n) | SignatureError::DuplicateSymbol(n) => {
                ParseError::new(pos, ParseErrorKind::Duplicate(n))
            }
            other => ParseError::new(pos, ParseErrorKind::Syntax(other.to_string())),
        }
    }

    fn decl(&mut self, s: &Sexp) -> Result<(), ParseError> {
        let pos = s.pos();
        let Some(items) = s.list() else {
            return syntax(pos, "expected a declaration");
        };
        let head = items.first().and_then(Sexp::atom).unwrap_or("");
        let arity = |n: usize| -> Result<(), ParseError> {
            if items.len() == n {
                Ok(())
            } else {
                syntax(pos, &format!("malformed `{head}` declaration"))
            }
        };
        match head {
            "sort" => {
                arity(3)?;
                let name = decl_name(&items[1])?;
                let size = match items[2].atom() {
                    Some(t) if is_int(t) => t.parse::<u32>().ok().filter(|&n| n >= 1),
                    _ => None,
                }
                .ok_or_else(|| {
                    ParseError::new(
                        items[2].pos(),
                        ParseErrorKind::Syntax("sort size must be a positive integer".into()),
                    )
                })?;
                self.sig
                    .add_sort(&name)
                    .map_err(|e| Self::sig_err(items[1].pos(), e))?;
                self.sizes.push(size);
            }
            "const" => {
                arity(3)?;
                let name = decl_name(&items[1])?;
                let sort = self.sort(&items[2])?;
                self.sig
                    .add_const(&name, sort)
                    .map_err(|e| Self::sig_err(items[1].pos(), e))?;
            }
            "func" => {
                arity(4)?;
                let name = decl_name(&items[1])?;
                let args = self.sort_list(&items[2])?;
                let result = self.sort(&items[3])?;
                self.sig
                    .add_func(&name, &args, result)
                    .map_err(|e| Self::sig_err(items[1].pos(), e))?;
            }
            "pred" => {
                arity(3)?;
                let name = decl_name(&items[1])?;
                let args = self.sort_list(&items[2])?;
                self.sig
                    .add_pred(&name, &args)
                    .map_err(|e| Self::sig_err(items[1].pos(), e))?;
            }
            "assert" => {
                arity(2)?;
                let mut scope = Vec::new();
                let f = self.form(&items[1], &mut scope)?;
                self.formulas.push(f);
            }
            _ => return syntax(pos, "expected sort, const, func, pred or assert"),
        }
        Ok(())
    }

    fn domlit(&self, s: &Sexp) -> Result<Option<Value>, ParseError> {
        let Some((name, k)) = s.atom().and_then(split_domlit) else {
            return Ok(None);
        };
        let sort = self.sig.sort_by_name(name).ok_or_else(|| {
            ParseError::new(s.pos(), ParseErrorKind::Undeclared(name.to_string()))
        })?;
        let size = self.sizes[sort.0];
        match k.parse::<u32>() {
            Ok(k) if (1..=size).contains(&k) => Ok(Some(Value::new(sort, k - 1))),
            _ => err(
                s.pos(),
                ParseErrorKind::IndexOutOfRange {
                    literal: s.atom().unwrap().to_string(),
                    size,
                },
            ),
        }
    }

    fn term(&self, s: &Sexp, scope: &[(String, SortId)]) -> Result<(Term, SortId), ParseError> {
        if let Some(v) = self.domlit(s)? {
            return Ok((Term::Elem(v), v.sort));
        }
        match s {
            Sexp::Atom { .. } => {
                let name = ident(s, "a term")?;
                if let Some((_, sort)) = scope.iter().rev().find(|(n, _)| *n == name) {
                    return Ok((Term::var(&name, *sort), *sort));
                }
                let func = self.func(&name, s.pos())?;
                self.apply(func, &name, &[], s.pos(), scope)
            }
            Sexp::List { items, pos } => {
                let Some(head) = items.first() else {
                    return syntax(*pos, "empty term");
                };
                let name = ident(head, "a function symbol")?;
                let func = self.func(&name, head.pos())?;
                if items.len() == 1 {
                    return syntax(*pos, "constants are written without parentheses");
                }
                self.apply(func, &name, &items[1..], *pos, scope)
            }
        }
    }

    fn func(&self, name: &str, pos: Pos) -> Result<FuncId, ParseError> {
        self.sig
            .func_by_name(name)
            .ok_or_else(|| ParseError::new(pos, ParseErrorKind::Undeclared(name.to_string())))
    }

    fn args(
        &self,
        name: &str,
        declared: &[SortId],
        args: &[Sexp],
        pos: Pos,
        scope: &[(String, SortId)],
    ) -> Result<Vec<Term>, ParseError> {
        if declared.len() != args.len() {
            return err(
                pos,
                ParseErrorKind::Arity {
                    name: name.to_string(),
                    expected: declared.len(),
                    actual: args.len(),
                },
            );
        }
        declared
            .iter()
            .zip(args)
            .map(|(want, a)| {
                let (t, got) = self.term(a, scope)?;
                if got != *want {
                    return err(
                        a.pos(),
                        ParseErrorKind::SortMismatch {
                            expected: self.sort_name(*want),
                            actual: self.sort_name(got),
                        },
                    );
                }
                Ok(t)
            })
            .collect()
    }

    fn apply(
        &self,
        func: FuncId,
        name: &str,
        args: &[Sexp],
        pos: Pos,
        scope: &[(String, SortId)],
    ) -> Result<(Term, SortId), ParseError> {
        let decl = self.sig.func(func);
        let args = self.args(name, &decl.args, args, pos, scope)?;
        Ok((Term::app(func, args), decl.result))
    }

    fn pred(&self, name: &str, pos: Pos) -> Result<PredId, ParseError> {
        self.sig
            .pred_by_name(name)
            .ok_or_else(|| ParseError::new(pos, ParseErrorKind::Undeclared(name.to_string())))
    }

    fn form(&self, s: &Sexp, scope: &mut Vec<(String, SortId)>) -> Result<Formula, ParseError> {
        let pos = s.pos();
        let items = match s {
            Sexp::Atom { .. } => {
                let name = ident(s, "a formula")?;
                let pred = self.pred(&name, pos)?;
                let expected = self.sig.pred(pred).args.len();
                return err(
                    pos,
                    ParseErrorKind::Arity {
                        name,
                        expected,
                        actual: 0,
                    },
                );
            }
            Sexp::List { items, .. } => items,
        };
        let Some(head) = items.first().and_then(Sexp::atom) else {
            return syntax(pos, "expected a connective or predicate");
        };
        let rest = &items[1..];
        let exactly = |n: usize| -> Result<(), ParseError> {
            if rest.len() == n {
                Ok(())
            } else {
                syntax(pos, &format!("`{head}` takes {n} operand(s)"))
            }
        };
        match head {
            "not" => {
                exactly(1)?;
                Ok(Formula::not(self.form(&rest[0], scope)?))
            }
            "and" | "or" => {
                if rest.is_empty() {
                    return syntax(pos, &format!("`{head}` needs at least one operand"));
                }
                let parts = rest
                    .iter()
                    .map(|r| self.form(r, scope))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(if head == "and" {
                    Formula::conjunction(parts)
                } else {
                    Formula::disjunction(parts)
                }
                .expect("non-empty"))
            }
            "=>" | "<=>" => {
                exactly(2)?;
                let a = self.form(&rest[0], scope)?;
                let b = self.form(&rest[1], scope)?;
                Ok(if head == "=>" {
                    Formula::implies(a, b)
                } else {
                    Formula::iff(a, b)
                })
            }
            "=" => {
                exactly(2)?;
                let (a, sa) = self.term(&rest[0], scope)?;
                let (b, sb) = self.term(&rest[1], scope)?;
                if sa != sb {
                    return err(
                        rest[1].pos(),
                        ParseErrorKind::SortMismatch {
                            expected: self.sort_name(sa),
                            actual: self.sort_name(sb),
                        },
                    );
                }
                Ok(Formula::eq(a, b))
            }
            "forall" | "exists" => {
                exactly(2)?;
                let binders = match rest[0].list() {
                    Some(b) if !b.is_empty() => b,
                    _ => return syntax(rest[0].pos(), "expected a non-empty binder list"),
                };
                let mut bound = Vec::new();
                for b in binders {
                    match b.list() {
                        Some([v, s]) => bound.push((ident(v, "a variable")?, self.sort(s)?)),
                        _ => return syntax(b.pos(), "expected a binder `(x Sort)`"),
                    }
                }
                let depth = scope.len();
                scope.extend(bound.iter().cloned());
                let body = self.form(&rest[1], scope);
                scope.truncate(depth);
                let mut f = body?;
                for (var, sort) in bound.into_iter().rev() {
                    f = if head == "forall" {
                        Formula::forall(&var, sort, f)
                    } else {
                        Formula::exists(&var, sort, f)
                    };
                }
                Ok(f)
            }
            name => {
                if !is_ident(name) {
                    return syntax(pos, "expected a connective or predicate");
                }
                let pred = self.pred(name, items[0].pos())?;
                let decl = self.sig.pred(pred);
                let args = self.args(name, &decl.args, rest, pos, scope)?;
                Ok(Formula::pred(pred, args))
            }
        }
    }
}

/// Renders a problem document; `parse_problem` of the output reproduces the
/// problem structurally.
pub fn print_problem(problem: &Problem) -> String {
    let sig = &problem.signature;
    let mut out = String::new();
    for s in sig.sort_ids() {
        out.push_str(&format!(
            "(sort {} {})\n",
            sig.sort(s).name,
            problem.size(s)
        ));
    }
    for f in &sig.funcs {
        if f.args.is_empty() {
            out.push_str(&format!("(const {} {})\n", f.name, sig.sort(f.result).name));
        } else {
            out.push_str(&format!(
                "(func {} ({}) {})\n",
                f.name,
                sort_names(sig, &f.args),
                sig.sort(f.result).name
            ));
        }
    }
    for p in &sig.preds {
        out.push_str(&format!(
            "(pred {} ({}))\n",
            p.name,
            sort_names(sig, &p.args)
        ));
    }
    for f in &problem.formulas {
        out.push_str(&format!("(assert {})\n", formula_to_string(problem, f)));
    }
    out
}

fn sort_names(sig: &Signature, sorts: &[SortId]) -> String {
    sorts
        .iter()
        .map(|s| sig.sort(*s).name.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn term_to_string(problem: &Problem, t: &Term) -> String {
    let mut out = String::new();
    write_term(problem, t, &mut out);
    out
}

fn write_term(problem: &Problem, t: &Term, out: &mut String) {
    let sig = &problem.signature;
    match t {
        Term::Var { name, .. } => out.push_str(name),
        Term::Elem(v) => out.push_str(&problem.value_name(*v)),
        Term::App { func, args } => {
            let name = sig
                .funcs
                .get(func.0)
                .map(|f| f.name.as_str())
                .unwrap_or("?");
            if args.is_empty() {
                out.push_str(name);
            } else {
                out.push('(');
                out.push_str(name);
                for a in args {
                    out.push(' ');
                    write_term(problem, a, out);
                }
                out.push(')');
            }
        }
    }
}

pub fn formula_to_string(problem: &Problem, f: &Formula) -> String {
    let mut out = String::new();
    write_formula(problem, f, &mut out);
    out
}

fn write_formula(problem: &Problem, f: &Formula, out: &mut String) {
    let sig = &problem.signature;
    match f {
        Formula::Eq(a, b) => {
            out.push_str("(= ");
            write_term(problem, a, out);
            out.push(' ');
            write_term(problem, b, out);
            out.push(')');
        }
        Formula::Pred { pred, args } => {
            out.push('(');
            out.push_str(
                sig.preds
                    .get(pred.0)
                    .map(|p| p.name.as_str())
                    .unwrap_or("?"),
            );
            for a in args {
                out.push(' ');
                write_term(problem, a, out);
            }
            out.push(')');
        }
        Formula::Not(a) => {
            out.push_str("(not ");
            write_formula(problem, a, out);
            out.push(')');
        }
        Formula::And(..) | Formula::Or(..) => {
            let is_and = matches!(f, Formula::And(..));
            out.push_str(if is_and { "(and" } else { "(or" });
            // Only the right spine is flattened so that parsing refolds it identically.
            let mut cur = f;
            loop {
                match (is_and, cur) {
                    (true, Formula::And(a, b)) | (false, Formula::Or(a, b)) => {
                        out.push(' ');
                        write_formula(problem, a, out);
                        cur = b;
                    }
                    _ => {
                        out.push(' ');
                        write_formula(problem, cur, out);
                        break;
                    }
                }
            }
            out.push(')');
        }
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            out.push_str(if matches!(f, Formula::Implies(..)) {
                "(=> "
            } else {
                "(<=> "
            });
            write_formula(problem, a, out);
            out.push(' ');
            write_formula(problem, b, out);
            out.push(')');
        }
        Formula::Forall { .. } | Formula::Exists { .. } => {
            let universal = matches!(f, Formula::Forall { .. });
            out.push_str(if universal { "(forall (" } else { "(exists (" });
            let mut cur = f;
            let mut first = true;
            loop {
                match (universal, cur) {
                    (true, Formula::Forall { var, sort, body })
                    | (false, Formula::Exists { var, sort, body }) => {
                        if !first {
                            out.push(' ');
                        }
                        first = false;
                        out.push_str(&format!("({} {})", var, sig.sort(*sort).name));
                        cur = body;
                    }
                    _ => break,
                }
            }
            out.push_str(") ");
            write_formula(problem, cur, out);
            out.push(')');
        }
    }
}
