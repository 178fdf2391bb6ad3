use super::SchemeRequest;
use crate::io::sexp::{read_all, split_domlit, Sexp};
use crate::io::{ParseError, Pos};
use crate::logic::Problem;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlanError {
    #[error(transparent)]
    Read(#[from] ParseError),
    #[error("{0}: {1}")]
    Invalid(Pos, String),
}

fn invalid(s: &Sexp, msg: impl Into<String>) -> PlanError {
    PlanError::Invalid(s.pos(), msg.into())
}

/// Reads a plan: one step per line, such as `(constants c1 c2)`,
/// `(drd_range f full)`, `(unary_range g)`, `(unary_pred P)` or
/// `(binary_pred Q A!1)`. A trailing `full` demands an untouched ledger.
pub fn parse_plan(problem: &Problem, text: &str) -> Result<Vec<SchemeRequest>, PlanError> {
    read_all(text)?
        .iter()
        .map(|s| parse_step(problem, s))
        .collect()
}

fn parse_step(problem: &Problem, step: &Sexp) -> Result<SchemeRequest, PlanError> {
    let sig = &problem.signature;
    let items = step
        .list()
        .ok_or_else(|| invalid(step, "expected a parenthesised step"))?;
    let head = items
        .first()
        .and_then(Sexp::atom)
        .ok_or_else(|| invalid(step, "missing scheme name"))?;
    let mut args: Vec<&Sexp> = items[1..].iter().collect();
    let full = matches!(args.last().and_then(|a| a.atom()), Some("full"));
    if full {
        args.pop();
    }
    let name = |s: &Sexp| {
        s.atom()
            .map(str::to_string)
            .ok_or_else(|| invalid(s, "expected a symbol"))
    };
    let func = |s: &Sexp| {
        let n = name(s)?;
        sig.func_by_name(&n)
            .ok_or_else(|| invalid(s, format!("undeclared function `{n}`")))
    };
    let pred = |s: &Sexp| {
        let n = name(s)?;
        sig.pred_by_name(&n)
            .ok_or_else(|| invalid(s, format!("undeclared predicate `{n}`")))
    };
    let exactly = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(invalid(
                step,
                format!("`{head}` takes {n} argument(s), got {}", args.len()),
            ))
        }
    };
    let no_full = || {
        if full {
            Err(invalid(step, format!("`{head}` does not take `full`")))
        } else {
            Ok(())
        }
    };

    match head {
        "constants" => {
            if args.is_empty() {
                return Err(invalid(step, "`constants` needs at least one constant"));
            }
            let constants = args.iter().map(|a| func(a)).collect::<Result<_, _>>()?;
            Ok(SchemeRequest::Constants {
                constants,
                require_full: full,
            })
        }
        "drd_range" => {
            exactly(1)?;
            Ok(SchemeRequest::DrdRange {
                func: func(args[0])?,
                require_full: full,
            })
        }
        "unary_range" => {
            exactly(1)?;
            no_full()?;
            Ok(SchemeRequest::UnaryRange {
                func: func(args[0])?,
            })
        }
        "unary_pred" => {
            exactly(1)?;
            Ok(SchemeRequest::UnaryPred {
                pred: pred(args[0])?,
                require_full: full,
            })
        }
        "binary_pred" => {
            exactly(2)?;
            no_full()?;
            let p = pred(args[0])?;
            let lit = name(args[1])?;
            let a = sig.pred(p).args[0];
            let (sort, k) = split_domlit(&lit)
                .ok_or_else(|| invalid(args[1], "expected a pivot like `A!1`"))?;
            if sig.sort_by_name(sort) != Some(a) {
                return Err(invalid(
                    args[1],
                    format!("pivot must be a value of {}", sig.sort(a).name),
                ));
            }
            let k: u32 = k
                .parse()
                .map_err(|_| invalid(args[1], "pivot index too large"))?;
            if k == 0 || k > problem.size(a) {
                return Err(invalid(args[1], format!("{lit} is outside sort {sort}")));
            }
            Ok(SchemeRequest::BinaryPred {
                pred: p,
                pivot: k - 1,
            })
        }
        other => Err(invalid(step, format!("unknown scheme `{other}`"))),
    }
}

/// Inverse of [`parse_plan`].
pub fn print_plan(problem: &Problem, plan: &[SchemeRequest]) -> String {
    let sig = &problem.signature;
    let full = |b: bool| if b { " full" } else { "" };
    let mut out = String::new();
    for step in plan {
        let line = match step {
            SchemeRequest::Constants {
                constants,
                require_full,
            } => {
                let names: Vec<&str> = constants
                    .iter()
                    .map(|&c| sig.func(c).name.as_str())
                    .collect();
                format!("(constants {}{})", names.join(" "), full(*require_full))
            }
            SchemeRequest::DrdRange { func, require_full } => {
                format!(
                    "(drd_range {}{})",
                    sig.func(*func).name,
                    full(*require_full)
                )
            }
            SchemeRequest::UnaryRange { func } => format!("(unary_range {})", sig.func(*func).name),
            SchemeRequest::UnaryPred { pred, require_full } => {
                format!(
                    "(unary_pred {}{})",
                    sig.pred(*pred).name,
                    full(*require_full)
                )
            }
            SchemeRequest::BinaryPred { pred, pivot } => {
                let a = sig.pred(*pred).args[0];
                format!(
                    "(binary_pred {} {}!{})",
                    sig.pred(*pred).name,
                    sig.sort(a).name,
                    pivot + 1
                )
            }
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}
