use super::sexp::{read_all, split_domlit, Sexp};
use super::{ParseError, ParseErrorKind, Pos};
use crate::logic::{Interpretation, Problem, SortId};

/// Parses `(value f v1 .. vn r)` and `(holds P v1 .. vn)` entries. Every
/// function cell must be given exactly once; unlisted predicate tuples are false.
pub fn parse_interpretation(problem: &Problem, text: &str) -> Result<Interpretation, ParseError> {
    let sig = &problem.signature;
    let mut funcs: Vec<Vec<Option<u32>>> = sig
        .funcs
        .iter()
        .map(|f| vec![None; problem.tuple_count(&f.args)])
        .collect();
    let mut preds: Vec<Vec<bool>> = sig
        .preds
        .iter()
        .map(|p| vec![false; problem.tuple_count(&p.args)])
        .collect();
    let mut end = Pos { line: 1, col: 1 };

    for entry in read_all(text)? {
        let pos = entry.pos();
        end = pos;
        let items = match entry.list() {
            Some(items) if items.len() >= 2 => items,
            _ => return Err(syntax(pos, "expected `(value ...)` or `(holds ...)`")),
        };
        let name = items[1].atom().unwrap_or("");
        match items[0].atom() {
            Some("value") => {
                let func = sig
                    .func_by_name(name)
                    .ok_or_else(|| undeclared(&items[1], name))?;
                let decl = sig.func(func);
                if items.len() != decl.args.len() + 3 {
                    return Err(ParseError::new(
                        pos,
                        ParseErrorKind::Arity {
                            name: name.to_string(),
                            expected: decl.args.len() + 1,
                            actual: items.len() - 2,
                        },
                    ));
                }
                let args = literals(problem, &decl.args, &items[2..items.len() - 1])?;
                let result = literal(problem, decl.result, &items[items.len() - 1])?;
                let cell = &mut funcs[func.0][problem.tuple_index(&decl.args, &args)];
                if cell.is_some() {
                    return Err(ParseError::new(
                        pos,
                        ParseErrorKind::DuplicateCell(cell_name(problem, name, &decl.args, &args)),
                    ));
                }
                *cell = Some(result);
            }
            Some("holds") => {
                let pred = sig
                    .pred_by_name(name)
                    .ok_or_else(|| undeclared(&items[1], name))?;
                let decl = sig.pred(pred);
                if items.len() != decl.args.len() + 2 {
                    return Err(ParseError::new(
                        pos,
                        ParseErrorKind::Arity {
                            name: name.to_string(),
                            expected: decl.args.len(),
                            actual: items.len() - 2,
                        },
                    ));
                }
                let args = literals(problem, &decl.args, &items[2..])?;
                let cell = &mut preds[pred.0][problem.tuple_index(&decl.args, &args)];
                if *cell {
                    return Err(ParseError::new(
                        pos,
                        ParseErrorKind::DuplicateCell(cell_name(problem, name, &decl.args, &args)),
                    ));
                }
                *cell = true;
            }
            _ => return Err(syntax(pos, "expected `value` or `holds`")),
        }
    }

    let mut tables = Vec::with_capacity(funcs.len());
    for (decl, table) in sig.funcs.iter().zip(funcs) {
        if let Some(missing) = table.iter().position(Option::is_none) {
            let args = problem.tuple_at(&decl.args, missing);
            return Err(ParseError::new(
                end,
                ParseErrorKind::MissingCell(cell_name(problem, &decl.name, &decl.args, &args)),
            ));
        }
        tables.push(table.into_iter().map(Option::unwrap).collect());
    }
    Ok(Interpretation {
        funcs: tables,
        preds,
    })
}

fn syntax(pos: Pos, msg: &str) -> ParseError {
    ParseError::new(pos, ParseErrorKind::Syntax(msg.to_string()))
}

fn undeclared(s: &Sexp, name: &str) -> ParseError {
    ParseError::new(s.pos(), ParseErrorKind::Undeclared(name.to_string()))
}

fn literal(problem: &Problem, want: SortId, s: &Sexp) -> Result<u32, ParseError> {
    let Some((name, k)) = s.atom().and_then(split_domlit) else {
        return Err(syntax(s.pos(), "expected a domain element `Sort!k`"));
    };
    let sort = problem
        .signature
        .sort_by_name(name)
        .ok_or_else(|| undeclared(s, name))?;
    if sort != want {
        return Err(ParseError::new(
            s.pos(),
            ParseErrorKind::SortMismatch {
                expected: problem.signature.sort(want).name.clone(),
                actual: name.to_string(),
            },
        ));
    }
    let size = problem.size(sort);
    match k.parse::<u32>() {
        Ok(k) if (1..=size).contains(&k) => Ok(k - 1),
        _ => Err(ParseError::new(
            s.pos(),
            ParseErrorKind::IndexOutOfRange {
                literal: s.atom().unwrap().to_string(),
                size,
            },
        )),
    }
}

fn literals(problem: &Problem, sorts: &[SortId], items: &[Sexp]) -> Result<Vec<u32>, ParseError> {
    sorts
        .iter()
        .zip(items)
        .map(|(s, i)| literal(problem, *s, i))
        .collect()
}

fn cell_name(problem: &Problem, name: &str, sorts: &[SortId], args: &[u32]) -> String {
    if args.is_empty() {
        return name.to_string();
    }
    let args: Vec<String> = sorts
        .iter()
        .zip(args)
        .map(|(s, &i)| format!("{}!{}", problem.signature.sort(*s).name, i + 1))
        .collect();
    format!("{}({})", name, args.join(", "))
}

/// One `(value ...)` line per function cell and one `(holds ...)` line per
/// true tuple, in declaration order and lexicographic argument order.
pub fn print_interpretation(problem: &Problem, interp: &Interpretation) -> String {
    let sig = &problem.signature;
    let lit = |s: SortId, i: u32| format!("{}!{}", sig.sort(s).name, i + 1);
    let mut out = String::new();
    for (decl, table) in sig.funcs.iter().zip(&interp.funcs) {
        for (idx, args) in problem.tuples(&decl.args).enumerate() {
            out.push_str("(value ");
            out.push_str(&decl.name);
            for (s, &a) in decl.args.iter().zip(&args) {
                out.push(' ');
                out.push_str(&lit(*s, a));
            }
            out.push(' ');
            out.push_str(&lit(decl.result, table[idx]));
            out.push_str(")\n");
        }
    }
    for (decl, rel) in sig.preds.iter().zip(&interp.preds) {
        for (idx, args) in problem.tuples(&decl.args).enumerate() {
            if !rel[idx] {
                continue;
            }
            out.push_str("(holds ");
            out.push_str(&decl.name);
            for (s, &a) in decl.args.iter().zip(&args) {
                out.push(' ');
                out.push_str(&lit(*s, a));
            }
            out.push_str(")\n");
        }
    }
    out
}
