//! Brute-force ground truth: interpretation enumeration, domain permutations
//! acting on interpretations and formulas, symmetry groups and orbits.
//!
//! Everything here is exhaustive and refuses to run when the interpretation
//! space exceeds the caller's cap rather than sampling.

mod perm;
mod search;
mod space;

pub use perm::{
    all_domain_permutations, permutation_count, permutations_solely_on, DomainPermutation,
};
pub use search::{first_model, model_orbit_completeness, search_models, ModelOrbitReport};
pub use space::{space_size, InterpretationSpace, Interpretations};

use std::collections::HashSet;

use crate::logic::{
    CompiledFormula, EvalError, Evaluator, Formula, Interpretation, Problem, ShapeError, SortId,
};
use crate::unionfind::UnionFind;

/// Default bound on the number of interpretations an oracle call may visit.
pub const DEFAULT_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("interpretation space has {space} elements, above the cap of {cap}")]
    CapExceeded { space: u128, cap: u64 },
    #[error("{count} permutations to check, above the cap of {cap}")]
    TooManyPermutations { count: u128, cap: u64 },
    #[error("search gave up after {limit} nodes")]
    BudgetExceeded { limit: u64 },
    #[error("invalid domain permutation: {0}")]
    InvalidPermutation(String),
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Every interpretation of the problem's signature, in enumeration order.
pub fn enumerate_interpretations(
    problem: &Problem,
    cap: u64,
) -> Result<Interpretations, OracleError> {
    Ok(InterpretationSpace::bounded(problem, cap)?.iter(problem))
}

/// The first satisfying interpretation in enumeration order, if any.
pub fn is_satisfiable(problem: &Problem, cap: u64) -> Result<Option<Interpretation>, OracleError> {
    InterpretationSpace::bounded(problem, cap)?;
    first_model(problem, u64::MAX)
}

/// `sigma • interp`: inputs and outputs of every table are pushed through `sigma`.
pub fn apply_to_interpretation(
    problem: &Problem,
    sigma: &DomainPermutation,
    interp: &Interpretation,
) -> Result<Interpretation, OracleError> {
    sigma.check_shape(problem)?;
    interp.check_shape(problem)?;
    let sig = &problem.signature;
    let mut out = interp.clone();
    for (f, decl) in sig.funcs.iter().enumerate() {
        for (t, args) in problem.tuples(&decl.args).enumerate() {
            let image = sigma.apply_tuple(&decl.args, &args);
            out.funcs[f][problem.tuple_index(&decl.args, &image)] =
                sigma.map(decl.result)[interp.funcs[f][t] as usize];
        }
    }
    for (p, decl) in sig.preds.iter().enumerate() {
        for (t, args) in problem.tuples(&decl.args).enumerate() {
            let image = sigma.apply_tuple(&decl.args, &args);
            out.preds[p][problem.tuple_index(&decl.args, &image)] = interp.preds[p][t];
        }
    }
    Ok(out)
}

/// Rewrites every domain element through its sort's permutation.
pub fn apply_to_formulas(sigma: &DomainPermutation, formulas: &[Formula]) -> Vec<Formula> {
    formulas
        .iter()
        .map(|f| f.map_values(&|v| sigma.apply(v)))
        .collect()
}

/// Precomputed satisfaction of every interpretation in the space.
pub(crate) struct Analysis {
    pub space: InterpretationSpace,
    pub sat: Vec<bool>,
}

impl Analysis {
    pub fn new(problem: &Problem, cap: u64) -> Result<Self, OracleError> {
        let space = InterpretationSpace::bounded(problem, cap)?;
        let formulas = CompiledFormula::all_closed(problem, &problem.formulas)?;
        let eval = Evaluator::new(problem);
        let slots = formulas.iter().map(|c| c.slots).max().unwrap_or(0);
        let mut env = vec![0; slots];
        let mut sat = Vec::with_capacity(space.len() as usize);
        let mut odo = space.odometer(problem);
        loop {
            sat.push(eval.eval_all(&formulas, odo.current(), &mut env));
            if !odo.advance() {
                break;
            }
        }
        Ok(Analysis { space, sat })
    }

    pub fn models(&self) -> Vec<u64> {
        (0..self.sat.len() as u64)
            .filter(|&i| self.sat[i as usize])
            .collect()
    }

    /// A bijection of the space is a symmetry iff it maps models to models,
    /// so only the models need checking.
    pub fn is_symmetry(&self, problem: &Problem, sigma: &DomainPermutation) -> bool {
        let action = self.space.action(problem, sigma);
        let mut digits = self.space.digits_of(0);
        for i in 0..self.sat.len() {
            if self.sat[i] && !self.sat[action.image(&digits) as usize] {
                return false;
            }
            self.space.increment(&mut digits);
        }
        true
    }

    pub fn symmetries(
        &self,
        problem: &Problem,
        cap: u64,
    ) -> Result<Vec<DomainPermutation>, OracleError> {
        check_permutation_count(permutation_count(problem), cap)?;
        Ok(all_domain_permutations(problem)
            .filter(|s| self.is_symmetry(problem, s))
            .collect())
    }
}

fn check_permutation_count(count: u128, cap: u64) -> Result<(), OracleError> {
    if count > cap as u128 {
        Err(OracleError::TooManyPermutations { count, cap })
    } else {
        Ok(())
    }
}

/// Whether `sigma` preserves satisfaction of every interpretation.
pub fn is_domain_symmetry(
    problem: &Problem,
    sigma: &DomainPermutation,
    cap: u64,
) -> Result<bool, OracleError> {
    sigma.check_shape(problem)?;
    Ok(Analysis::new(problem, cap)?.is_symmetry(problem, sigma))
}

/// Whether `sigma • Γ = Γ` as sets, comparing formulas structurally.
pub fn is_constraint_domain_symmetry(problem: &Problem, sigma: &DomainPermutation) -> bool {
    let before: HashSet<&Formula> = problem.formulas.iter().collect();
    let moved = apply_to_formulas(sigma, &problem.formulas);
    let after: HashSet<&Formula> = moved.iter().collect();
    before == after
}

/// All domain permutations that are domain symmetries of the problem.
pub fn domain_symmetries(
    problem: &Problem,
    cap: u64,
) -> Result<Vec<DomainPermutation>, OracleError> {
    Analysis::new(problem, cap)?.symmetries(problem, cap)
}

pub fn domain_symmetry_group_size(problem: &Problem, cap: u64) -> Result<u64, OracleError> {
    Ok(domain_symmetries(problem, cap)?.len() as u64)
}

/// Orbits of the interpretation space under the domain-symmetry group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitPartition {
    /// Interpretation indices per class, ascending; classes ordered by least member.
    pub classes: Vec<Vec<u64>>,
    /// Whether the members of each class satisfy the problem.
    pub satisfied: Vec<bool>,
}

impl OrbitPartition {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }
}

pub fn orbit_partition(problem: &Problem, cap: u64) -> Result<OrbitPartition, OracleError> {
    let analysis = Analysis::new(problem, cap)?;
    let group = analysis.symmetries(problem, cap)?;
    let space = &analysis.space;
    let mut uf = UnionFind::new(space.len() as usize);
    for sigma in group.iter().filter(|s| !s.is_identity()) {
        let action = space.action(problem, sigma);
        let mut digits = space.digits_of(0);
        for i in 0..space.len() as usize {
            uf.union(i, action.image(&digits) as usize);
            space.increment(&mut digits);
        }
    }
    let classes: Vec<Vec<u64>> = uf
        .classes()
        .into_iter()
        .map(|c| c.into_iter().map(|i| i as u64).collect())
        .collect();
    let satisfied = classes
        .iter()
        .map(|c| analysis.sat[c[0] as usize])
        .collect();
    Ok(OrbitPartition { classes, satisfied })
}

/// Outcome of a completeness check for symmetry-breaking constraints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Completeness {
    Complete,
    /// An orbit of models of Γ none of which satisfies the constraints.
    Incomplete {
        orbit: Vec<u64>,
    },
}

impl Completeness {
    pub fn is_complete(&self) -> bool {
        matches!(self, Completeness::Complete)
    }
}

/// Checks that every orbit of models of Γ keeps at least one member once
/// `constraints` are added. Orbits of non-models are irrelevant: they can
/// never contain a model of the strengthened problem.
pub fn check_symmetry_breaking_completeness(
    problem: &Problem,
    constraints: &[Formula],
    cap: u64,
) -> Result<Completeness, OracleError> {
    let analysis = Analysis::new(problem, cap)?;
    let group = analysis.symmetries(problem, cap)?;
    let models = analysis.models();
    let space = &analysis.space;
    let mut uf = UnionFind::new(models.len());
    for sigma in group.iter().filter(|s| !s.is_identity()) {
        let action = space.action(problem, sigma);
        for (pos, &m) in models.iter().enumerate() {
            let image = action.image(&space.digits_of(m));
            let other = models
                .binary_search(&image)
                .expect("symmetries map models to models");
            uf.union(pos, other);
        }
    }

    let compiled = CompiledFormula::all_closed(problem, constraints)?;
    let eval = Evaluator::new(problem);
    let mut env = vec![0; compiled.iter().map(|c| c.slots).max().unwrap_or(0)];
    let good: Vec<bool> = models
        .iter()
        .map(|&m| eval.eval_all(&compiled, &space.at(problem, m), &mut env))
        .collect();
    for class in uf.classes() {
        if !class.iter().any(|&pos| good[pos]) {
            return Ok(Completeness::Incomplete {
                orbit: class.into_iter().map(|p| models[p]).collect(),
            });
        }
    }
    Ok(Completeness::Complete)
}

/// Whether every permutation acting only on `values` of `sort` is a domain symmetry.
pub fn interchangeable_set_oracle(
    problem: &Problem,
    sort: SortId,
    values: &[u32],
    cap: u64,
) -> Result<bool, OracleError> {
    check_permutation_count(perm::factorial(values.len() as u32), cap)?;
    let perms = permutations_solely_on(problem, sort, values)?;
    let analysis = Analysis::new(problem, cap)?;
    Ok(perms.iter().all(|s| analysis.is_symmetry(problem, s)))
}
