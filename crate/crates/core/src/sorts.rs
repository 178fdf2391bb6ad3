//! Sort substitution and inference of a most generally sorted problem.
//!
//! Inference is union-find over sort slots: every declared argument and
//! result position, every quantifier binding and every domain-element
//! occurrence gets a slot. Applications tie actual arguments to declared
//! positions, equations tie their two sides, and variable uses tie to their
//! binder. Each resulting class becomes a sort.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::logic::{
    check_well_sorted, DomainAssignment, Formula, Problem, Signature, SortId, Term, Value,
};
use crate::unionfind::UnionFind;

/// A finite map between sort names, applied simultaneously.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SortSubstitution {
    map: BTreeMap<String, String>,
}

impl SortSubstitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, from: &str, to: &str) {
        self.map.insert(from.to_string(), to.to_string());
    }

    pub fn get<'a>(&'a self, sort: &'a str) -> &'a str {
        self.map.get(sort).map(String::as_str).unwrap_or(sort)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }
}

impl FromIterator<(String, String)> for SortSubstitution {
    fn from_iter<I: IntoIterator<Item = (String, String)>>(iter: I) -> Self {
        SortSubstitution {
            map: iter.into_iter().collect(),
        }
    }
}

/// `(subst (A_1 A) (A_2 A))`
impl fmt::Display for SortSubstitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(subst")?;
        for (a, b) in &self.map {
            write!(f, " ({a} {b})")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubstitutionError {
    #[error("sorts mapped to `{target}` have different domain sizes {first} and {second}")]
    SizeConflict {
        target: String,
        first: u32,
        second: u32,
    },
    #[error("substituted problem is ill-sorted: {0}")]
    IllSorted(String),
}

/// Rewrites every sort occurrence through `eta`. Result sorts appear in the
/// order their first preimage is declared; sizes come from the preimages.
pub fn apply_substitution(
    eta: &SortSubstitution,
    problem: &Problem,
) -> Result<Problem, SubstitutionError> {
    let sig = &problem.signature;
    let mut names: Vec<String> = Vec::new();
    let mut sizes: Vec<u32> = Vec::new();
    let mut image = Vec::with_capacity(sig.sorts.len());
    for (s, sort) in sig.sorts.iter().enumerate() {
        let target = eta.get(&sort.name);
        let size = problem.size(SortId(s));
        match names.iter().position(|n| n == target) {
            Some(i) => {
                if sizes[i] != size {
                    return Err(SubstitutionError::SizeConflict {
                        target: target.to_string(),
                        first: sizes[i],
                        second: size,
                    });
                }
                image.push(SortId(i));
            }
            None => {
                image.push(SortId(names.len()));
                names.push(target.to_string());
                sizes.push(size);
            }
        }
    }
    let map = |s: SortId| image[s.0];
    let mut out = Signature::new();
    for n in &names {
        out.add_sort(n).expect("names are distinct");
    }
    for f in &sig.funcs {
        let args: Vec<_> = f.args.iter().map(|&s| map(s)).collect();
        out.add_func(&f.name, &args, map(f.result))
            .expect("symbols already distinct");
    }
    for p in &sig.preds {
        let args: Vec<_> = p.args.iter().map(|&s| map(s)).collect();
        out.add_pred(&p.name, &args)
            .expect("symbols already distinct");
    }
    let formulas = problem
        .formulas
        .iter()
        .map(|f| map_formula_sorts(f, &map))
        .collect();
    let domains = DomainAssignment::new(sizes).expect("sizes are positive");
    let result = Problem::new(out, formulas, domains).expect("one size per sort");
    if let Some(e) = check_well_sorted(&result).into_iter().next() {
        return Err(SubstitutionError::IllSorted(e.to_string()));
    }
    Ok(result)
}

fn map_term_sorts(t: &Term, map: &impl Fn(SortId) -> SortId) -> Term {
    match t {
        Term::Var { name, sort } => Term::var(name, map(*sort)),
        Term::App { func, args } => {
            Term::app(*func, args.iter().map(|a| map_term_sorts(a, map)).collect())
        }
        Term::Elem(v) => Term::Elem(Value::new(map(v.sort), v.index)),
    }
}

fn map_formula_sorts(f: &Formula, map: &impl Fn(SortId) -> SortId) -> Formula {
    let sub = |x: &Formula| Box::new(map_formula_sorts(x, map));
    match f {
        Formula::Eq(a, b) => Formula::Eq(map_term_sorts(a, map), map_term_sorts(b, map)),
        Formula::Pred { pred, args } => Formula::Pred {
            pred: *pred,
            args: args.iter().map(|a| map_term_sorts(a, map)).collect(),
        },
        Formula::Not(a) => Formula::Not(sub(a)),
        Formula::And(a, b) => Formula::And(sub(a), sub(b)),
        Formula::Or(a, b) => Formula::Or(sub(a), sub(b)),
        Formula::Implies(a, b) => Formula::Implies(sub(a), sub(b)),
        Formula::Iff(a, b) => Formula::Iff(sub(a), sub(b)),
        Formula::Forall { var, sort, body } => Formula::Forall {
            var: var.clone(),
            sort: map(*sort),
            body: sub(body),
        },
        Formula::Exists { var, sort, body } => Formula::Exists {
            var: var.clone(),
            sort: map(*sort),
            body: sub(body),
        },
    }
}

/// A more generally sorted problem together with the substitution that
/// recovers the original.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralizationWitness {
    pub problem: Problem,
    /// Maps generalized sort names to original ones; renamed sorts only.
    pub eta: SortSubstitution,
    /// For each original sort, the sorts of `problem` it was split into.
    pub splits: Vec<Vec<SortId>>,
}

impl GeneralizationWitness {
    pub fn is_identity(&self) -> bool {
        self.eta.is_empty() && self.splits.iter().all(|s| s.len() == 1)
    }
}

struct Slots {
    uf: UnionFind,
    sort: Vec<SortId>,
    func_args: Vec<Vec<usize>>,
    func_result: Vec<usize>,
    pred_args: Vec<Vec<usize>>,
    /// Binder and element slots in preorder, consumed again when rebuilding.
    occurrences: Vec<usize>,
}

impl Slots {
    fn fresh(&mut self, sort: SortId) -> usize {
        self.sort.push(sort);
        self.uf.push()
    }

    fn term(&mut self, t: &Term, scope: &mut Vec<(String, usize)>) -> usize {
        match t {
            Term::Var { name, sort } => match scope.iter().rev().find(|(n, _)| n == name) {
                Some(&(_, slot)) => slot,
                // Free variables cannot occur in well-sorted problems; give them a slot anyway.
                None => self.fresh(*sort),
            },
            Term::App { func, args } => {
                for (i, a) in args.iter().enumerate() {
                    let s = self.term(a, scope);
                    self.uf.union(s, self.func_args[func.0][i]);
                }
                self.func_result[func.0]
            }
            Term::Elem(v) => {
                let s = self.fresh(v.sort);
                self.occurrences.push(s);
                s
            }
        }
    }

    fn formula(&mut self, f: &Formula, scope: &mut Vec<(String, usize)>) {
        match f {
            Formula::Eq(a, b) => {
                let (a, b) = (self.term(a, scope), self.term(b, scope));
                self.uf.union(a, b);
            }
            Formula::Pred { pred, args } => {
                for (i, a) in args.iter().enumerate() {
                    let s = self.term(a, scope);
                    self.uf.union(s, self.pred_args[pred.0][i]);
                }
            }
            Formula::Not(a) => self.formula(a, scope),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                self.formula(a, scope);
                self.formula(b, scope);
            }
            Formula::Forall { var, sort, body } | Formula::Exists { var, sort, body } => {
                let s = self.fresh(*sort);
                self.occurrences.push(s);
                scope.push((var.clone(), s));
                self.formula(body, scope);
                scope.pop();
            }
        }
    }
}

struct Rebuild<'a> {
    class_sort: &'a dyn Fn(usize) -> SortId,
    occurrences: std::slice::Iter<'a, usize>,
}

impl Rebuild<'_> {
    fn next(&mut self) -> SortId {
        (self.class_sort)(*self.occurrences.next().expect("same traversal order"))
    }

    fn term(&mut self, t: &Term, scope: &mut Vec<(String, SortId)>) -> Term {
        match t {
            Term::Var { name, sort } => {
                let s = scope
                    .iter()
                    .rev()
                    .find(|(n, _)| n == name)
                    .map(|&(_, s)| s)
                    .unwrap_or(*sort);
                Term::var(name, s)
            }
            Term::App { func, args } => {
                Term::app(*func, args.iter().map(|a| self.term(a, scope)).collect())
            }
            Term::Elem(v) => Term::Elem(Value::new(self.next(), v.index)),
        }
    }

    fn formula(&mut self, f: &Formula, scope: &mut Vec<(String, SortId)>) -> Formula {
        match f {
            Formula::Eq(a, b) => {
                let a = self.term(a, scope);
                Formula::Eq(a, self.term(b, scope))
            }
            Formula::Pred { pred, args } => Formula::Pred {
                pred: *pred,
                args: args.iter().map(|a| self.term(a, scope)).collect(),
            },
            Formula::Not(a) => Formula::not(self.formula(a, scope)),
            Formula::And(a, b) => {
                let a = self.formula(a, scope);
                Formula::and(a, self.formula(b, scope))
            }
            Formula::Or(a, b) => {
                let a = self.formula(a, scope);
                Formula::or(a, self.formula(b, scope))
            }
            Formula::Implies(a, b) => {
                let a = self.formula(a, scope);
                Formula::implies(a, self.formula(b, scope))
            }
            Formula::Iff(a, b) => {
                let a = self.formula(a, scope);
                Formula::iff(a, self.formula(b, scope))
            }
            Formula::Forall { var, body, .. } | Formula::Exists { var, body, .. } => {
                let s = self.next();
                scope.push((var.clone(), s));
                let body = self.formula(body, scope);
                scope.pop();
                if matches!(f, Formula::Forall { .. }) {
                    Formula::forall(var, s, body)
                } else {
                    Formula::exists(var, s, body)
                }
            }
        }
    }
}

/// Splits every sort as far as the formulas allow.
///
/// A sort whose slots form one class keeps its name; a sort split into
/// several classes becomes `A_1`, `A_2`, ... in first-use order, skipping
/// names already taken. Split sorts inherit the original's domain size and
/// domain elements keep their index.
pub fn infer_sorts(problem: &Problem) -> GeneralizationWitness {
    let sig = &problem.signature;
    let mut slots = Slots {
        uf: UnionFind::new(0),
        sort: Vec::new(),
        func_args: Vec::new(),
        func_result: Vec::new(),
        pred_args: Vec::new(),
        occurrences: Vec::new(),
    };
    for f in &sig.funcs {
        let args = f.args.iter().map(|&s| slots.fresh(s)).collect();
        slots.func_args.push(args);
        let r = slots.fresh(f.result);
        slots.func_result.push(r);
    }
    for p in &sig.preds {
        let args = p.args.iter().map(|&s| slots.fresh(s)).collect();
        slots.pred_args.push(args);
    }
    for f in &problem.formulas {
        slots.formula(f, &mut Vec::new());
    }

    // Classes per original sort, in order of their first slot.
    let mut class_of_root: HashMap<usize, (SortId, usize)> = HashMap::new();
    let mut classes_per_sort = vec![0usize; sig.sorts.len()];
    let mut class_index = vec![(SortId(0), 0usize); slots.sort.len()];
    for slot in 0..slots.sort.len() {
        let root = slots.uf.find(slot);
        let orig = slots.sort[slot];
        let entry = *class_of_root.entry(root).or_insert_with(|| {
            classes_per_sort[orig.0] += 1;
            (orig, classes_per_sort[orig.0] - 1)
        });
        class_index[slot] = entry;
    }

    let mut taken: Vec<String> = sig.sorts.iter().map(|s| s.name.clone()).collect();
    let mut out = Signature::new();
    let mut sizes = Vec::new();
    let mut eta = SortSubstitution::new();
    let mut splits = Vec::with_capacity(sig.sorts.len());
    for (s, sort) in sig.sorts.iter().enumerate() {
        let count = classes_per_sort[s].max(1);
        let mut ids = Vec::with_capacity(count);
        let mut suffix = 0;
        for _ in 0..count {
            let name = if count == 1 {
                sort.name.clone()
            } else {
                loop {
                    suffix += 1;
                    let candidate = format!("{}_{}", sort.name, suffix);
                    if !taken.contains(&candidate) {
                        break candidate;
                    }
                }
            };
            if name != sort.name {
                taken.push(name.clone());
                eta.insert(&name, &sort.name);
            }
            ids.push(out.add_sort(&name).expect("fresh sort name"));
            sizes.push(problem.size(SortId(s)));
        }
        splits.push(ids);
    }

    let class_sort = |slot: usize| {
        let (orig, k) = class_index[slot];
        splits[orig.0][k]
    };
    for (f, decl) in sig.funcs.iter().enumerate() {
        let args: Vec<_> = slots.func_args[f].iter().map(|&s| class_sort(s)).collect();
        out.add_func(&decl.name, &args, class_sort(slots.func_result[f]))
            .expect("distinct symbols");
    }
    for (p, decl) in sig.preds.iter().enumerate() {
        let args: Vec<_> = slots.pred_args[p].iter().map(|&s| class_sort(s)).collect();
        out.add_pred(&decl.name, &args).expect("distinct symbols");
    }
    let mut rebuild = Rebuild {
        class_sort: &class_sort,
        occurrences: slots.occurrences.iter(),
    };
    let formulas = problem
        .formulas
        .iter()
        .map(|f| rebuild.formula(f, &mut Vec::new()))
        .collect();
    let domains = DomainAssignment::new(sizes).expect("sizes are positive");
    GeneralizationWitness {
        problem: Problem::new(out, formulas, domains).expect("one size per sort"),
        eta,
        splits,
    }
}

/// Reasons a witness fails to generalize `original`; empty when it is valid.
pub fn witness_diagnostics(original: &Problem, witness: &GeneralizationWitness) -> Vec<String> {
    let mut out = Vec::new();
    let general = &witness.problem;
    for (s, split) in witness.splits.iter().enumerate() {
        let Some(orig) = original.signature.sorts.get(s) else {
            out.push(format!("split list for unknown sort #{s}"));
            continue;
        };
        for &t in split {
            match general.signature.sorts.get(t.0) {
                Some(sort) if witness.eta.get(&sort.name) == orig.name => {
                    if general.size(t) != original.size(SortId(s)) {
                        out.push(format!(
                            "sort {} has size {}, its original {} has size {}",
                            sort.name,
                            general.size(t),
                            orig.name,
                            original.size(SortId(s))
                        ));
                    }
                }
                Some(sort) => out.push(format!(
                    "sort {} does not map back to {}",
                    sort.name, orig.name
                )),
                None => out.push(format!(
                    "split of {} names unknown sort #{}",
                    orig.name, t.0
                )),
            }
        }
    }
    match apply_substitution(&witness.eta, general) {
        Err(e) => out.push(e.to_string()),
        Ok(back) => {
            if back.signature != original.signature {
                out.push("substituted signature differs from the original".into());
            }
            if back.formulas != original.formulas {
                out.push("substituted formulas differ from the original".into());
            }
            if back.domains != original.domains {
                out.push("domain sizes are not inherited from the original sorts".into());
            }
        }
    }
    out
}

/// Whether applying the witness's substitution reproduces `original`
/// exactly, with every split sort inheriting its original's size.
pub fn verify_witness(original: &Problem, witness: &GeneralizationWitness) -> bool {
    witness_diagnostics(original, witness).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::io::{parse_problem, print_problem};
    use crate::logic::satisfies;
    use crate::oracle::{domain_symmetry_group_size, enumerate_interpretations, DEFAULT_CAP};

    fn sort_names(p: &Problem) -> Vec<&str> {
        p.signature.sorts.iter().map(|s| s.name.as_str()).collect()
    }

    #[test]
    fn worked_substitution_example() {
        let p = catalog::substitution_example();
        let eta: SortSubstitution = [("A", "D"), ("B", "A")]
            .into_iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        let q = apply_substitution(&eta, &p).unwrap();
        let expected = parse_problem(
            "(sort D 2) (sort A 2) (sort C 2)
             (const c1 D) (const c2 A) (const c3 C)
             (func f (D A) C) (pred P (D A))
             (assert (forall ((x D)) (forall ((y A)) (forall ((z C)) (= (f x y) z)))))",
        )
        .unwrap();
        assert_eq!(q, expected);
    }

    #[test]
    fn empty_substitution_is_identity() {
        let p = catalog::relabeling_example();
        assert_eq!(apply_substitution(&SortSubstitution::new(), &p).unwrap(), p);
    }

    #[test]
    fn merging_c_into_a_recovers_the_original() {
        let mut eta = SortSubstitution::new();
        eta.insert("C", "A");
        assert_eq!(
            apply_substitution(&eta, &catalog::resort_general()).unwrap(),
            catalog::resort_original()
        );
    }

    #[test]
    fn substitution_errors() {
        let p = parse_problem("(sort A 2) (sort B 3) (const c A) (const d B)").unwrap();
        let mut eta = SortSubstitution::new();
        eta.insert("B", "A");
        assert!(matches!(
            apply_substitution(&eta, &p),
            Err(SubstitutionError::SizeConflict { .. })
        ));

        let p = parse_problem("(sort A 2) (sort B 2) (sort C 2) (func f (B) A) (assert (forall ((x B)) (= (f x) A!1)))")
            .unwrap();
        let mut eta = SortSubstitution::new();
        eta.insert("B", "C");
        eta.insert("C", "B");
        // Simultaneous swap of names keeps everything well-sorted.
        let swapped = apply_substitution(&eta, &p).unwrap();
        assert_eq!(sort_names(&swapped), vec!["A", "C", "B"]);
    }

    #[test]
    fn display_of_a_substitution() {
        let w = infer_sorts(&catalog::single_sorted());
        assert_eq!(w.eta.to_string(), "(subst (U_1 U) (U_2 U))");
        assert_eq!(SortSubstitution::new().to_string(), "(subst)");
    }

    #[test]
    fn single_sorted_example_splits() {
        let p = catalog::single_sorted();
        let w = infer_sorts(&p);
        let expected = parse_problem(
            "(sort U_1 3) (sort U_2 3)
             (const c1 U_1) (const c2 U_2) (func f (U_1) U_2)
             (assert (not (= (f c1) c2)))
             (assert (forall ((x U_1)) (not (= (f x) c2))))",
        )
        .unwrap();
        assert_eq!(w.problem, expected, "{}", print_problem(&w.problem));
        assert!(verify_witness(&p, &w));
        assert_eq!(w.splits, vec![vec![SortId(0), SortId(1)]]);
    }

    #[test]
    fn latin_square_splits_into_three_sorts() {
        let p = catalog::latin_square(9);
        let w = infer_sorts(&p);
        assert_eq!(sort_names(&w.problem), vec!["N_1", "N_2", "N_3"]);
        assert_eq!(w.problem.domains.sizes(), &[9, 9, 9]);
        assert!(w.problem.signature.funcs[0].is_drd());
        assert!(verify_witness(&p, &w));
    }

    #[test]
    fn general_problem_is_a_fixpoint() {
        let p = catalog::resort_general();
        let w = infer_sorts(&p);
        // `f`'s first argument is only tied to `x`, so A splits off nothing else.
        assert!(w.is_identity(), "{}", print_problem(&w.problem));
        assert_eq!(w.problem, p);
        assert!(verify_witness(&p, &w));
    }

    #[test]
    fn relabeling_example_is_not_most_general() {
        // `c` meets `P`'s first argument while `f`'s argument meets `y`, and
        // `d` meets `f`'s result while `x` meets `P`'s second argument.
        let p = catalog::relabeling_example();
        let w = infer_sorts(&p);
        assert_eq!(sort_names(&w.problem), vec!["A_1", "A_2", "B_1", "B_2"]);
        let text = print_problem(&w.problem);
        assert!(text.contains("(func f (A_2) B_1)"), "{text}");
        assert!(text.contains("(pred P (A_1 B_2))"), "{text}");
        assert!(verify_witness(&p, &w));
        assert!(infer_sorts(&w.problem).is_identity());
    }

    #[test]
    fn identity_witness_verifies() {
        let p = catalog::resort_general();
        let w = GeneralizationWitness {
            problem: p.clone(),
            eta: SortSubstitution::new(),
            splits: vec![vec![SortId(0)], vec![SortId(1)], vec![SortId(2)]],
        };
        assert!(verify_witness(&p, &w));
    }

    #[test]
    fn corrupted_size_is_rejected() {
        let p = catalog::single_sorted();
        let mut w = infer_sorts(&p);
        w.problem.domains = DomainAssignment::new(vec![3, 2]).unwrap();
        assert!(!verify_witness(&p, &w));
        let mut w = infer_sorts(&p);
        w.problem.domains = DomainAssignment::new(vec![2, 2]).unwrap();
        assert!(!witness_diagnostics(&p, &w).is_empty());
    }

    #[test]
    fn names_skip_existing_sorts() {
        let p =
            parse_problem("(sort A 2) (sort A_1 2) (const c A) (const d A) (const e A_1)").unwrap();
        let w = infer_sorts(&p);
        assert_eq!(sort_names(&w.problem), vec!["A_2", "A_3", "A_1"]);
        assert!(verify_witness(&p, &w));
    }

    #[test]
    fn unused_sorts_survive() {
        let p = parse_problem("(sort A 2) (sort B 3) (const c A)").unwrap();
        let w = infer_sorts(&p);
        assert!(w.is_identity());
        assert_eq!(w.problem, p);
    }

    #[test]
    fn domain_elements_follow_their_class() {
        let p = parse_problem(
            "(sort A 3) (const c A) (const d A) (pred P (A))
             (assert (= c A!1)) (assert (P d)) (assert (P A!2))",
        )
        .unwrap();
        let w = infer_sorts(&p);
        let text = print_problem(&w.problem);
        assert!(text.contains("(assert (= c A_1!1))"), "{text}");
        assert!(text.contains("(assert (P A_2!2))"), "{text}");
        assert!(verify_witness(&p, &w));
    }

    #[test]
    fn evaluation_is_preserved_formula_by_formula() {
        for p in [
            catalog::single_sorted(),
            catalog::relabeling_example(),
            catalog::latin_square(2),
        ] {
            let w = infer_sorts(&p);
            for i in enumerate_interpretations(&p, DEFAULT_CAP).unwrap() {
                for (f, g) in p.formulas.iter().zip(&w.problem.formulas) {
                    let a = satisfies(
                        &Problem {
                            formulas: vec![f.clone()],
                            ..p.clone()
                        },
                        &i,
                    )
                    .unwrap();
                    let b = satisfies(
                        &Problem {
                            formulas: vec![g.clone()],
                            ..w.problem.clone()
                        },
                        &i,
                    )
                    .unwrap();
                    assert_eq!(a, b);
                }
            }
        }
    }

    #[test]
    fn generalization_adds_symmetries() {
        let p = catalog::resort_original();
        let w = infer_sorts(&p);
        let before = domain_symmetry_group_size(&p, DEFAULT_CAP).unwrap();
        let after = domain_symmetry_group_size(&w.problem, DEFAULT_CAP).unwrap();
        assert_eq!((before, after), (12, 72));
    }
}
