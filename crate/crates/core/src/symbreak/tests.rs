use super::*;
use crate::catalog;
use crate::io::{formula_to_string, parse_problem};
use crate::logic::check_well_sorted;
use crate::oracle::{
    check_symmetry_breaking_completeness, interchangeable_set_oracle, is_satisfiable, DEFAULT_CAP,
};
use crate::sorts::infer_sorts;

fn problem(text: &str) -> Problem {
    parse_problem(text).unwrap()
}

fn texts(problem: &Problem, formulas: &[Formula]) -> Vec<String> {
    formulas
        .iter()
        .map(|f| formula_to_string(problem, f))
        .collect()
}

fn func(p: &Problem, name: &str) -> FuncId {
    p.signature.func_by_name(name).unwrap()
}

fn pred(p: &Problem, name: &str) -> PredId {
    p.signature.pred_by_name(name).unwrap()
}

fn sort(p: &Problem, name: &str) -> SortId {
    p.signature.sort_by_name(name).unwrap()
}

#[test]
fn initial_ledger_skips_occurring_values() {
    let p = catalog::interchangeable_constants_example();
    let l = initial_ledger(&p);
    assert_eq!(l.values(sort(&p, "A")), &[0, 1, 4]);
    assert_eq!(l.values(sort(&p, "B")), &[1]);

    let p = catalog::combination_pinned();
    assert_eq!(initial_ledger(&p).values(SortId(0)), &[1, 2]);

    let p = problem("(sort A 2) (const c A)");
    assert!(initial_ledger(&p).is_full(&p, SortId(0)));
}

#[test]
fn constants_on_a_full_domain_add_canonicity() {
    let p = problem("(sort A 3) (const c1 A) (const c2 A) (const c3 A)");
    let cs = [func(&p, "c1"), func(&p, "c2"), func(&p, "c3")];
    let app = constants_scheme(&p, SortId(0), &cs, &initial_ledger(&p), false).unwrap();
    assert_eq!(
        texts(&p, &app.formulas),
        [
            "(= c1 A!1)",
            "(or (= c2 A!1) (= c2 A!2))",
            "(or (= c3 A!1) (= c3 A!2) (= c3 A!3))",
            "(=> (= c2 A!2) (= c1 A!1))",
            "(=> (= c3 A!2) (or (= c1 A!1) (= c2 A!1)))",
            "(=> (= c3 A!3) (or (= c1 A!2) (= c2 A!2)))",
        ]
    );
    assert!(app.after.values(SortId(0)).is_empty());
    assert_eq!(
        app.audit_line(&p),
        "; scheme constants c1,c2,c3 consumed A!1 A!2 A!3"
    );
    let complete = check_symmetry_breaking_completeness(&p, &app.formulas, DEFAULT_CAP).unwrap();
    assert!(complete.is_complete());
}

#[test]
fn constants_over_a_partial_ledger_keep_non_interchangeable_values() {
    let p = catalog::interchangeable_constants_example();
    let a = sort(&p, "A");
    let cs = [func(&p, "c1"), func(&p, "c2")];
    let app = constants_scheme(&p, a, &cs, &initial_ledger(&p), false).unwrap();
    assert_eq!(
        texts(&p, &app.formulas),
        [
            "(or (= c1 A!1) (= c1 A!3) (= c1 A!4))",
            "(or (= c2 A!1) (= c2 A!2) (= c2 A!3) (= c2 A!4))"
        ]
    );
    assert_eq!(app.after.values(a), &[4]);
    let err = constants_scheme(&p, a, &cs, &initial_ledger(&p), true).unwrap_err();
    assert!(err.to_string().starts_with("scheme inapplicable"));
}

#[test]
fn constants_scheme_edge_cases() {
    let p = problem("(sort A 1) (sort B 2) (const c A) (const d B) (func f (A) A)");
    let l = initial_ledger(&p);
    let app = constants_scheme(&p, SortId(0), &[func(&p, "c")], &l, false).unwrap();
    assert_eq!(texts(&p, &app.formulas), ["(= c A!1)"]);
    assert_eq!(
        constants_scheme(&p, SortId(0), &[], &l, false).unwrap_err(),
        SchemeError::NoConstants
    );
    assert!(matches!(
        constants_scheme(&p, SortId(0), &[func(&p, "d")], &l, false),
        Err(SchemeError::SortMismatch { .. })
    ));
    assert!(matches!(
        constants_scheme(&p, SortId(0), &[func(&p, "f")], &l, false),
        Err(SchemeError::NotConstant(_))
    ));
    assert!(matches!(
        constants_scheme(&p, SortId(0), &[func(&p, "c")], &app.after, false),
        Err(SchemeError::EmptyLedger(_))
    ));
}

#[test]
fn unary_range_constraints() {
    let p = problem("(sort A 3) (func f (A) A)");
    let f = func(&p, "f");
    let app = unary_range_scheme(&p, f, &initial_ledger(&p)).unwrap();
    assert_eq!(
        texts(&p, &app.formulas),
        [
            "(or (= (f A!1) A!1) (= (f A!1) A!2))",
            "(or (= (f A!2) A!1) (= (f A!2) A!2) (= (f A!2) A!3))"
        ]
    );
    assert!(app.after.values(SortId(0)).is_empty());
    assert!(
        check_symmetry_breaking_completeness(&p, &app.formulas, DEFAULT_CAP)
            .unwrap()
            .is_complete()
    );

    let p1 = problem("(sort A 1) (func f (A) A)");
    assert!(
        unary_range_scheme(&p1, func(&p1, "f"), &initial_ledger(&p1))
            .unwrap()
            .formulas
            .is_empty()
    );

    let q = problem("(sort A 2) (sort B 2) (func g (A) B)");
    assert!(matches!(
        unary_range_scheme(&q, func(&q, "g"), &initial_ledger(&q)),
        Err(SchemeError::Shape(..))
    ));
}

#[test]
fn unary_range_refuses_a_partial_ledger() {
    let p = problem("(sort A 3) (const c A) (func f (A) A)");
    let c = constants_scheme(&p, SortId(0), &[func(&p, "c")], &initial_ledger(&p), false).unwrap();
    let err = unary_range_scheme(&p, func(&p, "f"), &c.after).unwrap_err();
    assert!(err.to_string().starts_with("scheme inapplicable"));

    // Forcing the ordering over the remaining {A!2, A!3} loses an orbit:
    // c = A!1 with f(A!2) = f(A!3) = A!1 has no image with f(A!2) != A!1.
    let forced = problem(
        "(sort A 3) (const c A) (func f (A) A)
         (assert (= c A!1))
         (assert (or (= (f A!2) A!2) (= (f A!2) A!3)))",
    );
    let verdict = check_symmetry_breaking_completeness(&p, &forced.formulas, DEFAULT_CAP).unwrap();
    assert!(!verdict.is_complete());
}

#[test]
fn drd_range_on_the_inferred_latin_square() {
    let w = infer_sorts(&catalog::latin_square(3));
    let p = &w.problem;
    let f = func(p, "f");
    let app = drd_range_scheme(p, f, &initial_ledger(p), true).unwrap();
    assert_eq!(
        texts(p, &app.formulas),
        [
            "(= (f N_1!1 N_2!1) N_3!1)",
            "(or (= (f N_1!1 N_2!2) N_3!1) (= (f N_1!1 N_2!2) N_3!2))",
            "(or (= (f N_1!1 N_2!3) N_3!1) (= (f N_1!1 N_2!3) N_3!2) (= (f N_1!1 N_2!3) N_3!3))",
        ]
    );
    assert_eq!(
        default_plan(p),
        [SchemeRequest::DrdRange {
            func: f,
            require_full: false
        }]
    );
}

#[test]
fn unary_drd_and_partial_drd() {
    let p = problem("(sort A 2) (sort B 2) (func f (A) B)");
    let app = drd_range_scheme(&p, func(&p, "f"), &initial_ledger(&p), false).unwrap();
    assert_eq!(
        texts(&p, &app.formulas),
        ["(= (f A!1) B!1)", "(or (= (f A!2) B!1) (= (f A!2) B!2))"]
    );
    assert_eq!(
        app.after.values(SortId(0)),
        &[] as &[u32],
        "argument values are conservatively consumed"
    );
    assert!(
        check_symmetry_breaking_completeness(&p, &app.formulas, DEFAULT_CAP)
            .unwrap()
            .is_complete()
    );

    let p = catalog::drd_extended_example();
    let app = drd_range_scheme(&p, func(&p, "f"), &initial_ledger(&p), false).unwrap();
    let lines = texts(&p, &app.formulas);
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], "(or (= (f B!1 C!1) A!2) (= (f B!1 C!1) A!1))");
    assert_eq!(
        lines[1],
        "(or (= (f B!1 C!2) A!2) (= (f B!1 C!2) A!3) (= (f B!1 C!2) A!1))"
    );
    assert_eq!(lines[3], "(or (= (f B!2 C!2) A!2) (= (f B!2 C!2) A!3) (= (f B!2 C!2) A!4) (= (f B!2 C!2) A!5) (= (f B!2 C!2) A!1))");
    assert!(drd_range_scheme(&p, func(&p, "f"), &initial_ledger(&p), true).is_err());
    let sq = catalog::latin_square(2);
    assert!(matches!(
        drd_range_scheme(&sq, func(&sq, "f"), &initial_ledger(&sq), false),
        Err(SchemeError::Shape(..))
    ));
}

#[test]
fn unary_predicate_constraints() {
    let p = problem("(sort A 6) (pred P (A))");
    let app = unary_predicate_scheme(&p, pred(&p, "P"), &initial_ledger(&p), true).unwrap();
    assert_eq!(
        texts(&p, &app.formulas),
        [
            "(=> (P A!2) (P A!1))",
            "(=> (P A!3) (P A!2))",
            "(=> (P A!4) (P A!3))",
            "(=> (P A!5) (P A!4))",
            "(=> (P A!6) (P A!5))",
        ]
    );
    assert!(
        check_symmetry_breaking_completeness(&p, &app.formulas, DEFAULT_CAP)
            .unwrap()
            .is_complete()
    );

    let p = catalog::combination_pinned();
    let app = unary_predicate_scheme(&p, pred(&p, "P"), &initial_ledger(&p), false).unwrap();
    assert_eq!(texts(&p, &app.formulas), ["(=> (P A!3) (P A!2))"]);

    let p = problem("(sort A 2) (pred P (A)) (assert (P A!1))");
    let app = unary_predicate_scheme(&p, pred(&p, "P"), &initial_ledger(&p), false).unwrap();
    assert!(app.formulas.is_empty());
    assert_eq!(app.warnings.len(), 1);
}

#[test]
fn binary_predicate_single_pivot() {
    let p = problem("(sort A 2) (sort B 2) (pred Q (A B))");
    let q = pred(&p, "Q");
    let app = binary_predicate_scheme(&p, q, 0, &initial_ledger(&p)).unwrap();
    assert_eq!(texts(&p, &app.formulas), ["(=> (Q A!1 B!2) (Q A!1 B!1))"]);
    assert_eq!(app.after.values(SortId(0)), &[1]);
    assert!(app.after.values(SortId(1)).is_empty());
    assert_eq!(app.after.pivot(q), Some(0));
    assert!(
        check_symmetry_breaking_completeness(&p, &app.formulas, DEFAULT_CAP)
            .unwrap()
            .is_complete()
    );

    assert_eq!(
        binary_predicate_scheme(&p, q, 1, &app.after).unwrap_err(),
        SchemeError::SecondPivot("Q".into())
    );
    assert!(matches!(
        binary_predicate_scheme(&p, q, 2, &initial_ledger(&p)),
        Err(SchemeError::PivotOutOfRange { .. })
    ));

    let one = problem("(sort A 2) (sort B 1) (pred Q (A B))");
    assert!(
        binary_predicate_scheme(&one, pred(&one, "Q"), 0, &initial_ledger(&one))
            .unwrap()
            .formulas
            .is_empty()
    );

    let same = problem("(sort A 2) (pred R (A A))");
    let err =
        binary_predicate_scheme(&same, pred(&same, "R"), 0, &initial_ledger(&same)).unwrap_err();
    assert!(err.to_string().starts_with("scheme inapplicable"));
}

#[test]
fn two_pivots_lose_an_orbit() {
    let p = problem("(sort A 2) (sort B 2) (pred Q (A B))");
    let both = problem(
        "(sort A 2) (sort B 2) (pred Q (A B))
         (assert (=> (Q A!1 B!2) (Q A!1 B!1)))
         (assert (=> (Q A!2 B!2) (Q A!2 B!1)))",
    );
    match check_symmetry_breaking_completeness(&p, &both.formulas, DEFAULT_CAP).unwrap() {
        crate::oracle::Completeness::Incomplete { orbit } => {
            // {(A!1,B!1),(A!2,B!2)} and its image {(A!1,B!2),(A!2,B!1)}.
            assert_eq!(orbit.len(), 2);
        }
        other => panic!("expected a violating orbit, got {other:?}"),
    }
}

#[test]
fn combining_respects_the_ledger() {
    let p = catalog::combination_base();
    let c = func(&p, "c");
    let pp = pred(&p, "P");
    let plan = [
        SchemeRequest::Constants {
            constants: vec![c],
            require_full: false,
        },
        SchemeRequest::UnaryPred {
            pred: pp,
            require_full: false,
        },
    ];
    let (out, trail) = combine(&p, &plan).unwrap();
    let added = &out.formulas[p.formulas.len()..];
    assert_eq!(texts(&out, added), ["(= c A!1)", "(=> (P A!3) (P A!2))"]);
    assert_eq!(trail.len(), 2);
    assert!(is_satisfiable(&out, DEFAULT_CAP).unwrap().is_some());
    assert_eq!(default_plan(&p), plan);

    let forced = [
        plan[0].clone(),
        SchemeRequest::UnaryPred {
            pred: pp,
            require_full: true,
        },
    ];
    let err = combine(&p, &forced).unwrap_err();
    assert_eq!(err.step, 1);
    assert_eq!(err.ledger.values(SortId(0)), &[1, 2]);
    assert!(err.to_string().contains("scheme inapplicable"));

    assert!(
        is_satisfiable(&catalog::combination_over_combined(), DEFAULT_CAP)
            .unwrap()
            .is_none()
    );

    let (same, trail) = combine(&p, &[]).unwrap();
    assert_eq!(same, p);
    assert!(trail.is_empty());
}

#[test]
fn default_plan_of_an_empty_signature_is_empty() {
    assert!(default_plan(&problem("")).is_empty());
    assert!(default_plan(&problem("(sort A 3)")).is_empty());
}

#[test]
fn plans_round_trip_through_text() {
    let p = problem("(sort A 3) (sort B 2) (const c1 A) (const c2 A) (func f (B) A) (func g (A) A) (pred P (A)) (pred Q (A B))");
    let text = "(constants c1 c2 full)\n(drd_range f)\n(unary_range g)\n(unary_pred P full)\n(binary_pred Q A!2)\n";
    let plan = parse_plan(&p, text).unwrap();
    assert_eq!(
        plan[4],
        SchemeRequest::BinaryPred {
            pred: pred(&p, "Q"),
            pivot: 1
        }
    );
    assert_eq!(print_plan(&p, &plan), text);

    for bad in [
        "(constants)",
        "(nope f)",
        "(drd_range h)",
        "(binary_pred Q B!1)",
        "(binary_pred Q A!4)",
        "(unary_range g full)",
        "x",
    ] {
        assert!(parse_plan(&p, bad).is_err(), "{bad}");
    }
}

#[test]
fn constraint_counts_follow_the_formulas() {
    for n in 1..=4u32 {
        for m in 1..=4usize {
            let names: Vec<String> = (1..=m).map(|i| format!("c{i}")).collect();
            let decls: String = names.iter().map(|c| format!("(const {c} A)")).collect();
            let p = problem(&format!("(sort A {n}) {decls}"));
            let cs: Vec<FuncId> = names.iter().map(|c| func(&p, c)).collect();
            let app = constants_scheme(&p, SortId(0), &cs, &initial_ledger(&p), true).unwrap();
            let k = m.min(n as usize);
            assert_eq!(app.formulas.len(), k + k * (k.saturating_sub(1)) / 2);
        }
        let p = problem(&format!(
            "(sort A {n}) (sort B 3) (func f (A) A) (func g (A) B) (pred P (A)) (pred Q (B A))"
        ));
        let l = initial_ledger(&p);
        let n = n as usize;
        assert_eq!(
            unary_range_scheme(&p, func(&p, "f"), &l)
                .unwrap()
                .formulas
                .len(),
            n - 1
        );
        assert_eq!(
            drd_range_scheme(&p, func(&p, "g"), &l, true)
                .unwrap()
                .formulas
                .len(),
            n.min(3)
        );
        assert_eq!(
            unary_predicate_scheme(&p, pred(&p, "P"), &l, true)
                .unwrap()
                .formulas
                .len(),
            n - 1
        );
        assert_eq!(
            binary_predicate_scheme(&p, pred(&p, "Q"), 0, &l)
                .unwrap()
                .formulas
                .len(),
            n - 1
        );
    }
}

#[test]
fn remaining_ledger_values_stay_interchangeable() {
    for p in [
        catalog::combination_base(),
        problem("(sort A 3) (sort B 2) (const c A) (func f (B) A) (pred P (A))"),
        problem("(sort A 2) (sort B 3) (pred Q (A B)) (pred P (A))"),
    ] {
        let (_, trail) = combine(&p, &default_plan(&p)).unwrap();
        let mut sofar = p.clone();
        for app in &trail {
            sofar = sofar.with_formulas(app.formulas.iter().cloned());
            for s in sofar.signature.sort_ids() {
                let vals = app.after.values(s);
                assert!(
                    interchangeable_set_oracle(&sofar, s, vals, DEFAULT_CAP).unwrap(),
                    "{}",
                    app.audit_line(&p)
                );
            }
        }
        assert!(check_well_sorted(&sofar).is_empty());
    }
}
