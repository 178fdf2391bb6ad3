use std::fs;
use std::path::Path;

use sortsym::corpus::{corpus as generate, CorpusConfig};
use sortsym::io::{parse_problem, print_interpretation, print_problem};
use sortsym::logic::{check_well_sorted, ground_problem, GroundError, Problem};
use sortsym::oracle::{
    check_symmetry_breaking_completeness, is_satisfiable, orbit_partition, space_size, OracleError,
};
use sortsym::sorts::{infer_sorts, verify_witness};
use sortsym::symbreak::{combine, default_plan, parse_plan, print_plan};

use crate::report::{
    digest, read_input, write_output, Failure, Report, EXIT_DIAGNOSTIC, EXIT_IO, EXIT_OK,
    EXIT_UNSAT,
};

fn load(path: &Path) -> Result<(Report, Problem), Failure> {
    let text = read_input(path)?;
    let problem = parse_problem(&text)
        .map_err(|e| Failure::new(EXIT_DIAGNOSTIC, format!("{}:{e}", path.display())))?;
    let errors = check_well_sorted(&problem);
    if let Some(first) = errors.first() {
        let mut failure = Failure::new(EXIT_DIAGNOSTIC, format!("{}: {first}", path.display()));
        for e in &errors[1..] {
            failure = failure.with_context(format!("diagnostic: {e}"));
        }
        return Err(failure);
    }
    let mut report = Report::new();
    report.push("input", path.display());
    report.push("digest", digest(&text));
    Ok((report, problem))
}

fn oracle_failure(e: OracleError) -> Failure {
    let code = match e {
        OracleError::CapExceeded { .. }
        | OracleError::TooManyPermutations { .. }
        | OracleError::BudgetExceeded { .. } => EXIT_IO,
        _ => EXIT_DIAGNOSTIC,
    };
    let failure = Failure::new(code, &e);
    match e {
        OracleError::CapExceeded { space, .. } => failure.with_context(format!("space: {space}")),
        _ => failure,
    }
}

fn verdict(sat: bool) -> &'static str {
    if sat {
        "SAT"
    } else {
        "UNSAT"
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Writes the document to `out`, or keeps it for stdout.
fn deliver(mut report: Report, document: String, out: Option<&Path>) -> Result<Report, Failure> {
    match out {
        Some(path) => {
            write_output(path, &document)?;
            report.push("output", path.display());
        }
        None => report.set_document(document),
    }
    Ok(report)
}

pub fn check(path: &Path) -> Result<Report, Failure> {
    let (mut report, p) = load(path)?;
    let sig = &p.signature;
    report.push("status", "ok");
    report.push("sorts", sig.sorts.len());
    report.push("functions", sig.funcs.len());
    report.push("predicates", sig.preds.len());
    report.push("formulas", p.formulas.len());
    report.push("space", space_size(&p));
    Ok(report)
}

pub fn infer(path: &Path, out: Option<&Path>, verify: bool, cap: u64) -> Result<Report, Failure> {
    let (mut report, p) = load(path)?;
    let w = infer_sorts(&p);
    report.push("identity", yes_no(w.is_identity()));
    report.push("witness", &w.eta);
    for (s, parts) in w.splits.iter().enumerate() {
        let names: Vec<&str> = parts
            .iter()
            .map(|&t| w.problem.signature.sort(t).name.as_str())
            .collect();
        report.push(
            &format!("split {}", p.signature.sorts[s].name),
            names.join(" "),
        );
    }
    if verify {
        if !verify_witness(&p, &w) {
            return Err(Failure::new(
                EXIT_DIAGNOSTIC,
                "witness does not map the generalized problem back",
            ));
        }
        report.push("verify-witness", "ok");
        let before = is_satisfiable(&p, cap).map_err(oracle_failure)?.is_some();
        let after = is_satisfiable(&w.problem, cap)
            .map_err(oracle_failure)?
            .is_some();
        if before != after {
            return Err(Failure::new(
                EXIT_DIAGNOSTIC,
                format!(
                    "satisfiability changed: {} vs {}",
                    verdict(before),
                    verdict(after)
                ),
            ));
        }
        report.push("verify-sat", verdict(before));
    }
    deliver(report, print_problem(&w.problem), out)
}

pub fn break_symmetry(
    path: &Path,
    plan: &str,
    out: Option<&Path>,
    verify: bool,
    cap: u64,
) -> Result<Report, Failure> {
    let (mut report, p) = load(path)?;
    let steps = if plan == "auto" {
        default_plan(&p)
    } else {
        let text = read_input(Path::new(plan))?;
        parse_plan(&p, &text).map_err(|e| Failure::new(EXIT_DIAGNOSTIC, format!("{plan}:{e}")))?
    };
    let (combined, trail) = combine(&p, &steps).map_err(|e| {
        Failure::new(EXIT_DIAGNOSTIC, &e).with_context(format!("ledger: {}", e.ledger.describe(&p)))
    })?;
    let added = combined.formulas.len() - p.formulas.len();
    let plan_text: Vec<String> = print_plan(&p, &steps).lines().map(str::to_string).collect();
    report.push(
        "plan",
        if plan_text.is_empty() {
            "(empty)".to_string()
        } else {
            plan_text.join(" ")
        },
    );
    report.push("constraints", added);
    for app in &trail {
        for w in &app.warnings {
            report.push("warning", w);
        }
    }
    if verify {
        let before = is_satisfiable(&p, cap).map_err(oracle_failure)?.is_some();
        let after = is_satisfiable(&combined, cap)
            .map_err(oracle_failure)?
            .is_some();
        if before != after {
            return Err(Failure::new(
                EXIT_DIAGNOSTIC,
                format!(
                    "unsound: {} before, {} after",
                    verdict(before),
                    verdict(after)
                ),
            ));
        }
        report.push("verify-sound", format!("yes ({})", verdict(before)));
        let complete =
            check_symmetry_breaking_completeness(&p, &combined.formulas[p.formulas.len()..], cap)
                .map_err(oracle_failure)?;
        report.push("verify-complete", yes_no(complete.is_complete()));
    }

    let mut document = String::new();
    for app in &trail {
        document.push_str(&app.audit_line(&p));
        document.push('\n');
    }
    document.push_str(&print_problem(&combined));
    deliver(report, document, out)
}

pub fn solve(path: &Path, cap: u64, witness: Option<&Path>) -> Result<Report, Failure> {
    let (mut report, p) = load(path)?;
    report.push("space", space_size(&p));
    match is_satisfiable(&p, cap).map_err(oracle_failure)? {
        Some(model) => {
            report.push("result", "SAT");
            let text = print_interpretation(&p, &model);
            match witness {
                Some(w) => {
                    write_output(w, &text)?;
                    report.push("witness", w.display());
                }
                None => report.push(
                    "witness",
                    text.split_whitespace().collect::<Vec<_>>().join(" "),
                ),
            }
        }
        None => {
            report.push("result", "UNSAT");
            report.code = EXIT_UNSAT;
        }
    }
    Ok(report)
}

pub fn orbits(path: &Path, cap: u64) -> Result<Report, Failure> {
    let (mut report, p) = load(path)?;
    let partition = orbit_partition(&p, cap).map_err(oracle_failure)?;
    let sizes: Vec<String> = partition.sizes().iter().map(ToString::to_string).collect();
    report.push("space", space_size(&p));
    report.push("orbits", partition.len());
    report.push("sizes", sizes.join(" "));
    report.push(
        "satisfying",
        partition.satisfied.iter().filter(|&&s| s).count(),
    );
    for (i, (class, sat)) in partition
        .classes
        .iter()
        .zip(&partition.satisfied)
        .enumerate()
    {
        report.push(
            &format!("class {}", i + 1),
            format!("size {} satisfies {}", class.len(), yes_no(*sat)),
        );
    }
    Ok(report)
}

pub fn ground(path: &Path, out: Option<&Path>, max_nodes: usize) -> Result<Report, Failure> {
    let (report, p) = load(path)?;
    let grounded =
        ground_problem(&p, max_nodes).map_err(|e: GroundError| Failure::new(EXIT_IO, e))?;
    deliver(report, print_problem(&grounded), out)
}

pub fn corpus(
    seed: u64,
    count: usize,
    out: Option<&Path>,
    pure: bool,
    cap: u64,
) -> Result<Report, Failure> {
    let config = CorpusConfig {
        pure,
        cap,
        ..CorpusConfig::default()
    };
    let problems = generate(seed, count, &config);
    let mut report = Report::new();
    report.push("seed", seed);
    report.push("count", count);
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| {
                Failure::new(EXIT_IO, format!("cannot create {}: {e}", dir.display()))
            })?;
            for (i, p) in problems.iter().enumerate() {
                write_output(
                    &dir.join(format!("problem-{:04}.sexp", i + 1)),
                    &print_problem(p),
                )?;
            }
            report.push("output", dir.display());
        }
        None => {
            let mut doc = String::new();
            for (i, p) in problems.iter().enumerate() {
                doc.push_str(&format!("; problem {}\n", i + 1));
                doc.push_str(&print_problem(p));
            }
            report.set_document(doc);
        }
    }
    report.code = EXIT_OK;
    Ok(report)
}
