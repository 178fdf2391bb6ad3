use std::collections::{HashMap, HashSet};

use super::{
    all_domain_permutations, apply_to_interpretation, permutation_count, DomainPermutation,
    OracleError,
};
use crate::logic::{
    CompiledFormula, Evaluator, Formula, Interpretation, PartialInterpretation, Problem, SortId,
};
use crate::unionfind::UnionFind;

/// Depth-first search over cells in enumeration order with three-valued
/// pruning. Models come out in lexicographic order.
struct Search {
    eval: Evaluator,
    formulas: Vec<CompiledFormula>,
    cells: Vec<(bool, usize, usize, u32)>,
    partial: PartialInterpretation,
    env: Vec<u32>,
    nodes: u64,
    budget: u64,
    limit: usize,
    found: Vec<Interpretation>,
}

impl Search {
    fn new(problem: &Problem, budget: u64, limit: usize) -> Result<Self, OracleError> {
        let sig = &problem.signature;
        let formulas = CompiledFormula::all_closed(problem, &problem.formulas)?;
        let mut cells = Vec::new();
        for (f, decl) in sig.funcs.iter().enumerate() {
            for t in 0..problem.tuple_count(&decl.args) {
                cells.push((true, f, t, problem.size(decl.result)));
            }
        }
        for (p, decl) in sig.preds.iter().enumerate() {
            for t in 0..problem.tuple_count(&decl.args) {
                cells.push((false, p, t, 2));
            }
        }
        Ok(Search {
            eval: Evaluator::new(problem),
            env: vec![0; formulas.iter().map(|c| c.slots).max().unwrap_or(0)],
            formulas,
            cells,
            partial: PartialInterpretation::empty(problem),
            nodes: 0,
            budget,
            limit,
            found: Vec::new(),
        })
    }

    fn consistent(&mut self) -> bool {
        let (eval, partial, env) = (&self.eval, &self.partial, &mut self.env);
        self.formulas
            .iter()
            .all(|c| eval.peval(&c.root, partial, env) != Some(false))
    }

    fn set(&mut self, depth: usize, value: Option<u32>) {
        let (is_func, sym, t, _) = self.cells[depth];
        if is_func {
            self.partial.funcs[sym][t] = value;
        } else {
            self.partial.preds[sym][t] = value.map(|v| v == 1);
        }
    }

    /// Returns false once the model limit is reached.
    fn run(&mut self, depth: usize) -> Result<bool, OracleError> {
        if depth == self.cells.len() {
            self.found
                .push(self.partial.to_total().expect("all cells assigned"));
            return Ok(self.found.len() < self.limit);
        }
        for v in 0..self.cells[depth].3 {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(OracleError::BudgetExceeded { limit: self.budget });
            }
            self.set(depth, Some(v));
            if self.consistent() && !self.run(depth + 1)? {
                return Ok(false);
            }
        }
        self.set(depth, None);
        Ok(true)
    }
}

/// Models of the problem in enumeration order, at most `limit` of them.
/// `node_budget` bounds the number of partial assignments tried.
pub fn search_models(
    problem: &Problem,
    limit: usize,
    node_budget: u64,
) -> Result<Vec<Interpretation>, OracleError> {
    if limit == 0 {
        return Ok(Vec::new());
    }
    let mut s = Search::new(problem, node_budget, limit)?;
    if s.consistent() {
        s.run(0)?;
    }
    Ok(s.found)
}

/// The least model in enumeration order.
pub fn first_model(
    problem: &Problem,
    node_budget: u64,
) -> Result<Option<Interpretation>, OracleError> {
    Ok(search_models(problem, 1, node_budget)?.pop())
}

/// Orbit structure of the models of a problem too large to enumerate, found
/// by pruned search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelOrbitReport {
    pub models: usize,
    pub orbits: usize,
    /// Models that also satisfy the constraints.
    pub constrained_models: usize,
    /// Size of the domain-symmetry group restricted to the models.
    pub group_order: u128,
    /// An orbit with no model of the constraints, if one exists.
    pub violating_orbit: Option<Vec<Interpretation>>,
}

impl ModelOrbitReport {
    pub fn is_complete(&self) -> bool {
        self.violating_orbit.is_none()
    }
}

fn preserves(
    problem: &Problem,
    sigma: &DomainPermutation,
    models: &HashSet<&Interpretation>,
) -> bool {
    models.iter().all(|m| {
        let image = apply_to_interpretation(problem, sigma, m).expect("shapes agree");
        models.contains(&image)
    })
}

/// Like [`check_symmetry_breaking_completeness`](super::check_symmetry_breaking_completeness)
/// but over the models found by search instead of the whole space.
///
/// A domain permutation is a symmetry iff it maps the model set onto itself.
/// When a transposition and a full cycle of every sort all preserve the
/// models, they generate the whole permutation group and every domain
/// permutation is a symmetry; otherwise all `perm_cap`-bounded permutations
/// are tested individually.
pub fn model_orbit_completeness(
    problem: &Problem,
    constraints: &[Formula],
    node_budget: u64,
    perm_cap: u64,
) -> Result<ModelOrbitReport, OracleError> {
    let models = search_models(problem, usize::MAX, node_budget)?;
    let model_set: HashSet<&Interpretation> = models.iter().collect();

    let mut generators = Vec::new();
    for (s, &n) in problem.domains.sizes().iter().enumerate() {
        if n >= 2 {
            generators.push(DomainPermutation::swap(problem, SortId(s), 0, 1));
            let cycle = (0..n).map(|i| (i + 1) % n).collect();
            generators.push(DomainPermutation::on_sort(problem, SortId(s), cycle)?);
        }
    }
    let group_order;
    if generators.iter().all(|g| preserves(problem, g, &model_set)) {
        group_order = permutation_count(problem);
    } else {
        let count = permutation_count(problem);
        if count > perm_cap as u128 {
            return Err(OracleError::TooManyPermutations {
                count,
                cap: perm_cap,
            });
        }
        generators = all_domain_permutations(problem)
            .filter(|g| preserves(problem, g, &model_set))
            .collect();
        group_order = generators.len() as u128;
    }

    let position: HashMap<&Interpretation, usize> =
        models.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut uf = UnionFind::new(models.len());
    for g in &generators {
        for (i, m) in models.iter().enumerate() {
            let image = apply_to_interpretation(problem, g, m)?;
            uf.union(i, position[&image]);
        }
    }

    let compiled = CompiledFormula::all_closed(problem, constraints)?;
    let eval = Evaluator::new(problem);
    let mut env = vec![0; compiled.iter().map(|c| c.slots).max().unwrap_or(0)];
    let good: Vec<bool> = models
        .iter()
        .map(|m| eval.eval_all(&compiled, m, &mut env))
        .collect();
    let classes = uf.classes();
    let violating_orbit = classes
        .iter()
        .find(|c| !c.iter().any(|&i| good[i]))
        .map(|c| c.iter().map(|&i| models[i].clone()).collect());
    Ok(ModelOrbitReport {
        models: models.len(),
        orbits: classes.len(),
        constrained_models: good.iter().filter(|&&g| g).count(),
        group_order,
        violating_orbit,
    })
}
