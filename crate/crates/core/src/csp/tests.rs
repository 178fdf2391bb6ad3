use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::catalog;
use crate::io::parse_problem;
use crate::logic::satisfies;
use crate::oracle::{
    all_domain_permutations, apply_to_interpretation, domain_symmetries, enumerate_interpretations,
    is_constraint_domain_symmetry, is_satisfiable, DEFAULT_CAP,
};

const CAP: u64 = DEFAULT_CAP;

fn var(name: &str, size: usize) -> Variable {
    Variable {
        name: name.into(),
        size,
    }
}

fn ext(tuples: &[&[usize]]) -> Relation {
    Relation::Extensional(tuples.iter().map(|t| t.to_vec()).collect())
}

/// `a ∧ b` and `a ∨ b ∨ c`, with 0 = false and 1 = true.
fn sat_example() -> Csp {
    let mut csp = Csp::new(vec![var("a", 2), var("b", 2), var("c", 2)]);
    csp.add_constraint(vec![0, 1], ext(&[&[1, 1]])).unwrap();
    csp.add_constraint(
        vec![0, 1, 2],
        Relation::Intensional(Arc::new(|t| t.contains(&1))),
    )
    .unwrap();
    csp
}

#[test]
fn worked_example_solutions() {
    // x ∈ {1,2}, y ∈ {3,4}, z ∈ {5,6}; R1 on (x,z) = {(1,6),(2,5)}.
    let mut csp = Csp::new(vec![var("x", 2), var("y", 2), var("z", 2)]);
    csp.add_constraint(vec![0, 2], ext(&[&[0, 1], &[1, 0]]))
        .unwrap();
    let sols = csp_solutions(&csp, CAP).unwrap();
    assert!(sols.contains(&vec![1, 0, 0]));
    assert!(!sols.contains(&vec![0, 0, 0]));
    // Both tuples of R1 combine with either value of y.
    assert_eq!(sols.len(), 4);

    let free = Csp::new(vec![var("p", 2), var("q", 3)]);
    assert_eq!(csp_solutions(&free, CAP).unwrap().len(), 6);
    assert!(matches!(
        csp_solutions(&free, 5),
        Err(CspError::CapExceeded { .. })
    ));

    assert_eq!(
        csp_solutions(&sat_example(), CAP).unwrap(),
        [vec![1, 1, 0], vec![1, 1, 1]]
    );
}

#[test]
fn constraint_validation() {
    let mut csp = Csp::new(vec![var("x", 2)]);
    assert_eq!(
        csp.add_constraint(vec![3], ext(&[])).unwrap_err(),
        CspError::UnknownVariable(3)
    );
    assert!(matches!(
        csp.add_constraint(vec![0], ext(&[&[2]])),
        Err(CspError::TupleOutOfDomain { .. })
    ));
    assert!(matches!(
        csp.add_constraint(vec![0, 0], ext(&[])),
        Err(CspError::RepeatedScopeVariable(_))
    ));
}

#[test]
fn microstructure_of_the_sat_example() {
    let ms = microstructure_complement(&sat_example(), CAP).unwrap();
    assert_eq!(ms.vertices.len(), 6);
    assert_eq!(ms.consistency_edges().count(), 3);
    let c1: Vec<BTreeSet<Binding>> = ms
        .constraint_edges()
        .filter(|e| e.kind == EdgeKind::Constraint(0))
        .map(|e| e.bindings.clone())
        .collect();
    assert_eq!(
        c1,
        [
            BTreeSet::from([(0, 0), (1, 0)]),
            BTreeSet::from([(0, 0), (1, 1)]),
            BTreeSet::from([(0, 1), (1, 0)])
        ]
    );
    let c2: Vec<_> = ms
        .constraint_edges()
        .filter(|e| e.kind == EdgeKind::Constraint(1))
        .collect();
    assert_eq!(c2.len(), 1);
    assert_eq!(c2[0].bindings, BTreeSet::from([(0, 0), (1, 0), (2, 0)]));

    let single = microstructure_complement(&Csp::new(vec![var("x", 1)]), CAP).unwrap();
    assert!(single.edges.is_empty());
}

#[test]
fn solutions_are_the_full_independent_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..40 {
        let n = rng.gen_range(1..=3);
        let vars = (0..n)
            .map(|i| var(&format!("x{i}"), rng.gen_range(1..=3)))
            .collect();
        let mut csp = Csp::new(vars);
        for _ in 0..rng.gen_range(0..=2) {
            let scope: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.6)).collect();
            let sizes: Vec<usize> = scope.iter().map(|&x| csp.variables()[x].size).collect();
            let mut allowed = BTreeSet::new();
            for_each_tuple(&sizes, |t| {
                if rng.gen_bool(0.5) {
                    allowed.insert(t.to_vec());
                }
            });
            csp.add_constraint(scope, Relation::Extensional(allowed))
                .unwrap();
        }
        let ms = microstructure_complement(&csp, CAP).unwrap();
        let sols = csp_solutions(&csp, CAP).unwrap();
        let sizes: Vec<usize> = csp.variables().iter().map(|v| v.size).collect();
        for_each_tuple(&sizes, |t| {
            let set: BTreeSet<Binding> = t.iter().copied().enumerate().collect();
            assert_eq!(ms.is_independent(&set), sols.contains(&t.to_vec()));
        });
    }
}

fn all_binding_perms(csp: &Csp) -> Vec<BindingPermutation> {
    let n = csp.binding_count();
    let mut idx: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    permute(&mut idx, 0, &mut |p| {
        out.push(
            BindingPermutation::from_fn(csp, |b| csp.binding_at(p[csp.binding_index(b)])).unwrap(),
        );
    });
    out
}

fn permute(v: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        visit(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, visit);
        v.swap(k, i);
    }
}

#[test]
fn solution_and_constraint_symmetries_of_the_sat_example() {
    let csp = sat_example();
    let id = BindingPermutation::identity(&csp);
    assert!(is_solution_symmetry(&csp, &id, CAP).unwrap());
    assert!(is_constraint_symmetry(&csp, &id, CAP).unwrap());

    let swap_ac = BindingPermutation::from_fn(&csp, |(x, v)| ([2, 1, 0][x], v)).unwrap();
    assert!(!is_solution_symmetry(&csp, &swap_ac, CAP).unwrap());

    let flip_b =
        BindingPermutation::from_fn(&csp, |(x, v)| (x, if x == 1 { 1 - v } else { v })).unwrap();
    assert!(!is_constraint_symmetry(&csp, &flip_b, CAP).unwrap());

    let mut automorphisms = 0;
    for p in all_binding_perms(&csp) {
        if is_constraint_symmetry(&csp, &p, CAP).unwrap() {
            automorphisms += 1;
            assert!(is_solution_symmetry(&csp, &p, CAP).unwrap());
        }
    }
    assert!(automorphisms >= 2, "a <-> b is an automorphism");
}

#[test]
fn binding_permutations_must_be_bijective() {
    let csp = sat_example();
    assert!(BindingPermutation::from_fn(&csp, |_| (0, 0)).is_err());
    assert!(BindingPermutation::from_fn(&csp, |(x, v)| (x + 1, v)).is_err());
}

#[test]
fn flat_csp_shape_and_satisfiability() {
    let p = parse_problem("(sort A 3) (sort B 2) (func f (A) B) (pred P (A))").unwrap();
    let csp = flat_csp(&p).unwrap();
    assert_eq!(csp.variables().len(), 6);
    assert_eq!(csp.variables()[0].name, "f(A!1)");
    assert_eq!(csp.variables()[5].name, "P(A!3)");

    let c = parse_problem("(sort A 4) (const c A)").unwrap();
    assert_eq!(flat_csp(&c).unwrap().variables(), [var("c", 4)]);

    for p in [
        catalog::combination_base(),
        catalog::combination_pinned(),
        catalog::combination_over_combined(),
        catalog::relabeling_example(),
        catalog::latin_square(2),
    ] {
        let sat = is_satisfiable(&p, CAP).unwrap().is_some();
        let flat = flat_csp(&p).unwrap();
        assert_eq!(!csp_solutions(&flat, CAP).unwrap().is_empty(), sat);
        let func = functional_csp(&p, CAP).unwrap();
        assert_eq!(!csp_solutions(&func, CAP).unwrap().is_empty(), sat);
        for interp in enumerate_interpretations(&p, CAP).unwrap().take(500) {
            assert_eq!(
                flat.is_solution(&interpretation_to_flat(&interp)),
                satisfies(&p, &interp).unwrap()
            );
        }
    }
}

#[test]
fn functional_csp_assignments_are_interpretations() {
    let p = parse_problem("(sort A 3) (sort B 2) (func f (A) B)").unwrap();
    assert_eq!(functional_csp(&p, CAP).unwrap().variables(), [var("f", 8)]);
    let c = parse_problem("(sort A 4) (const c A)").unwrap();
    assert_eq!(functional_csp(&c, CAP).unwrap().variables(), [var("c", 4)]);
    assert!(matches!(
        functional_csp(&catalog::latin_square(4), CAP),
        Err(CspError::CapExceeded { .. })
    ));

    for p in [catalog::combination_base(), catalog::relabeling_example()] {
        let csp = functional_csp(&p, CAP).unwrap();
        for interp in enumerate_interpretations(&p, CAP).unwrap() {
            let a = interpretation_to_assignment(&p, &interp);
            assert_eq!(assignment_to_interpretation(&p, &a), interp);
            assert_eq!(csp.is_solution(&a), satisfies(&p, &interp).unwrap());
        }
    }
}

#[test]
fn functional_extension_agrees_with_the_domain_action() {
    let p = catalog::relabeling_example();
    let csp = functional_csp(&p, CAP).unwrap();
    let sigma = DomainPermutation::new(vec![vec![2, 0, 1], vec![1, 0]]).unwrap();
    let ext = functional_extension(&p, &csp, &sigma).unwrap();
    let f = p.signature.func_by_name("f").unwrap().0;
    // The constant table B!2 becomes the constant table B!1.
    assert_eq!(ext.apply(&csp, (f, 7)), (f, 0));

    for interp in enumerate_interpretations(&p, CAP).unwrap() {
        let image = apply_to_interpretation(&p, &sigma, &interp).unwrap();
        let a = interpretation_to_assignment(&p, &interp);
        assert_eq!(
            ext.apply_assignment(&csp, &a).unwrap(),
            interpretation_to_assignment(&p, &image)
        );
    }

    let id = functional_extension(&p, &csp, &DomainPermutation::identity(&p)).unwrap();
    assert!(id.is_identity(&csp));
}

#[test]
fn functional_extension_respects_composition() {
    let p =
        parse_problem("(sort A 3) (sort B 2) (const c A) (func f (A) B) (pred Q (B A))").unwrap();
    let csp = functional_csp(&p, CAP).unwrap();
    let perms: Vec<DomainPermutation> = all_domain_permutations(&p).collect();
    for s in &perms {
        let sf = functional_extension(&p, &csp, s).unwrap();
        for t in &perms {
            let tf = functional_extension(&p, &csp, t).unwrap();
            assert_eq!(
                functional_extension(&p, &csp, &s.compose(t)).unwrap(),
                sf.compose(&csp, &tf)
            );
        }
    }
}

#[test]
fn domain_symmetries_extend_to_csp_symmetries() {
    for p in [
        catalog::combination_base(),
        catalog::relabeling_example(),
        catalog::combination_pinned(),
    ] {
        let csp = functional_csp(&p, CAP).unwrap();
        for sigma in domain_symmetries(&p, CAP).unwrap() {
            let ext = functional_extension(&p, &csp, &sigma).unwrap();
            assert!(is_solution_symmetry(&csp, &ext, CAP).unwrap());
            if is_constraint_domain_symmetry(&p, &sigma) {
                assert!(is_constraint_symmetry(&csp, &ext, CAP).unwrap());
            }
        }
    }
}

#[test]
fn some_solution_symmetries_are_not_domain_symmetries() {
    // With no formulas every assignment is a solution, so changing `c` alone
    // is a solution symmetry, yet every domain permutation moving c moves d too.
    let p = parse_problem("(sort A 2) (const c A) (const d A)").unwrap();
    let csp = functional_csp(&p, CAP).unwrap();
    let only_c =
        BindingPermutation::from_fn(&csp, |(x, v)| (x, if x == 0 { 1 - v } else { v })).unwrap();
    assert!(is_solution_symmetry(&csp, &only_c, CAP).unwrap());
    for sigma in all_domain_permutations(&p) {
        assert_ne!(functional_extension(&p, &csp, &sigma).unwrap(), only_c);
    }
}
