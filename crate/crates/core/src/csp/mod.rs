//! Finite CSPs, their microstructure complement, and the flat and functional
//! encodings of a many-sorted problem.
//!
//! Values are indices into each variable's domain. A binding `(x, v)` is a
//! variable paired with one of its values.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::logic::{CompiledFormula, EvalError, Evaluator, Interpretation, Problem, SortId};
use crate::oracle::DomainPermutation;

#[cfg(test)]
mod tests;

pub type Binding = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CspError {
    #[error("unknown variable index {0}")]
    UnknownVariable(usize),
    #[error("variable `{0}` appears twice in one scope")]
    RepeatedScopeVariable(String),
    #[error("tuple {tuple:?} does not fit the scope of constraint {constraint}")]
    TupleOutOfDomain {
        constraint: usize,
        tuple: Vec<usize>,
    },
    #[error("{what} has {size} elements, over the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        size: u128,
        cap: u64,
    },
    #[error("binding map is not a permutation of the bindings: {0}")]
    NotAPermutation(String),
    #[error("permutation does not fit the problem's sorts: {0}")]
    Shape(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn check_cap(what: &'static str, size: u128, cap: u64) -> Result<(), CspError> {
    if size > cap as u128 {
        Err(CspError::CapExceeded { what, size, cap })
    } else {
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub size: usize,
}

/// Allowed scope assignments, listed or computed.
#[derive(Clone)]
pub enum Relation {
    Extensional(BTreeSet<Vec<usize>>),
    Intensional(Arc<dyn Fn(&[usize]) -> bool + Send + Sync>),
}

impl Relation {
    pub fn allows(&self, tuple: &[usize]) -> bool {
        match self {
            Relation::Extensional(set) => set.contains(tuple),
            Relation::Intensional(f) => f(tuple),
        }
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Extensional(set) => f.debug_tuple("Extensional").field(set).finish(),
            Relation::Intensional(_) => f.write_str("Intensional(..)"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub scope: Vec<usize>,
    pub relation: Relation,
}

#[derive(Clone, Debug, Default)]
pub struct Csp {
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    offsets: Vec<usize>,
}

impl Csp {
    pub fn new(variables: Vec<Variable>) -> Self {
        let mut offsets = Vec::with_capacity(variables.len() + 1);
        let mut acc = 0;
        for v in &variables {
            offsets.push(acc);
            acc += v.size;
        }
        offsets.push(acc);
        Csp {
            variables,
            constraints: Vec::new(),
            offsets,
        }
    }

    pub fn add_constraint(
        &mut self,
        scope: Vec<usize>,
        relation: Relation,
    ) -> Result<(), CspError> {
        let mut seen = HashSet::new();
        for &x in &scope {
            let var = self.variables.get(x).ok_or(CspError::UnknownVariable(x))?;
            if !seen.insert(x) {
                return Err(CspError::RepeatedScopeVariable(var.name.clone()));
            }
        }
        if let Relation::Extensional(tuples) = &relation {
            for t in tuples {
                let fits = t.len() == scope.len()
                    && t.iter()
                        .zip(&scope)
                        .all(|(&v, &x)| v < self.variables[x].size);
                if !fits {
                    return Err(CspError::TupleOutOfDomain {
                        constraint: self.constraints.len(),
                        tuple: t.clone(),
                    });
                }
            }
        }
        self.constraints.push(Constraint { scope, relation });
        Ok(())
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn binding_count(&self) -> usize {
        self.offsets[self.variables.len()]
    }

    /// Dense index of a binding, variable-major.
    pub fn binding_index(&self, (x, v): Binding) -> usize {
        self.offsets[x] + v
    }

    pub fn binding_at(&self, index: usize) -> Binding {
        let x = self.offsets.partition_point(|&o| o <= index) - 1;
        (x, index - self.offsets[x])
    }

    pub fn bindings(&self) -> impl Iterator<Item = Binding> + '_ {
        self.variables
            .iter()
            .enumerate()
            .flat_map(|(x, var)| (0..var.size).map(move |v| (x, v)))
    }

    pub fn assignment_space(&self) -> u128 {
        self.variables
            .iter()
            .fold(1u128, |acc, v| acc.saturating_mul(v.size as u128))
    }

    pub fn is_solution(&self, assignment: &[usize]) -> bool {
        let mut buf = Vec::new();
        self.constraints.iter().all(|c| {
            buf.clear();
            buf.extend(c.scope.iter().map(|&x| assignment[x]));
            c.relation.allows(&buf)
        })
    }
}

/// Odometer over the product of `sizes`, last position fastest.
fn for_each_tuple(sizes: &[usize], mut visit: impl FnMut(&[usize])) {
    if sizes.contains(&0) {
        return;
    }
    let mut t = vec![0; sizes.len()];
    loop {
        visit(&t);
        let mut i = sizes.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            t[i] += 1;
            if t[i] < sizes[i] {
                break;
            }
            t[i] = 0;
        }
    }
}

/// All solutions in lexicographic order, the first variable most significant.
pub fn csp_solutions(csp: &Csp, cap: u64) -> Result<Vec<Vec<usize>>, CspError> {
    check_cap("assignment space", csp.assignment_space(), cap)?;
    let sizes: Vec<usize> = csp.variables.iter().map(|v| v.size).collect();
    let mut out = Vec::new();
    for_each_tuple(&sizes, |t| {
        if csp.is_solution(t) {
            out.push(t.to_vec());
        }
    });
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    Consistency,
    /// Index of the constraint that forbids the scope assignment.
    Constraint(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hyperedge {
    pub kind: EdgeKind,
    pub bindings: BTreeSet<Binding>,
}

/// Hypergraph on bindings whose independent sets of size `|X|` are exactly
/// the solutions.
#[derive(Clone, Debug)]
pub struct MicrostructureComplement {
    pub vertices: Vec<Binding>,
    pub edges: Vec<Hyperedge>,
    edge_set: HashSet<BTreeSet<Binding>>,
}

impl MicrostructureComplement {
    pub fn consistency_edges(&self) -> impl Iterator<Item = &Hyperedge> {
        self.edges
            .iter()
            .filter(|e| e.kind == EdgeKind::Consistency)
    }

    pub fn constraint_edges(&self) -> impl Iterator<Item = &Hyperedge> {
        self.edges
            .iter()
            .filter(|e| e.kind != EdgeKind::Consistency)
    }

    pub fn contains_edge(&self, bindings: &BTreeSet<Binding>) -> bool {
        self.edge_set.contains(bindings)
    }

    /// No edge lies inside `set`.
    pub fn is_independent(&self, set: &BTreeSet<Binding>) -> bool {
        self.edge_set.iter().all(|e| !e.is_subset(set))
    }
}

/// Builds the microstructure complement, expanding every constraint over its
/// scope. `cap` bounds the number of scope assignments expanded in total.
pub fn microstructure_complement(
    csp: &Csp,
    cap: u64,
) -> Result<MicrostructureComplement, CspError> {
    let expanded = csp.constraints.iter().fold(0u128, |acc, c| {
        acc.saturating_add(c.scope.iter().fold(1u128, |p, &x| {
            p.saturating_mul(csp.variables[x].size as u128)
        }))
    });
    check_cap("constraint expansion", expanded, cap)?;

    let mut edges = Vec::new();
    for (x, var) in csp.variables.iter().enumerate() {
        for a in 0..var.size {
            for b in a + 1..var.size {
                edges.push(Hyperedge {
                    kind: EdgeKind::Consistency,
                    bindings: [(x, a), (x, b)].into(),
                });
            }
        }
    }
    for (i, c) in csp.constraints.iter().enumerate() {
        let sizes: Vec<usize> = c.scope.iter().map(|&x| csp.variables[x].size).collect();
        for_each_tuple(&sizes, |t| {
            if !c.relation.allows(t) {
                let bindings = c.scope.iter().copied().zip(t.iter().copied()).collect();
                edges.push(Hyperedge {
                    kind: EdgeKind::Constraint(i),
                    bindings,
                });
            }
        });
    }
    let edge_set = edges.iter().map(|e| e.bindings.clone()).collect();
    Ok(MicrostructureComplement {
        vertices: csp.bindings().collect(),
        edges,
        edge_set,
    })
}

/// A bijection on the bindings of one CSP.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BindingPermutation {
    images: Vec<Binding>,
}

impl BindingPermutation {
    pub fn identity(csp: &Csp) -> Self {
        BindingPermutation {
            images: csp.bindings().collect(),
        }
    }

    /// Checks that `f` permutes the bindings of `csp`.
    pub fn from_fn(csp: &Csp, f: impl Fn(Binding) -> Binding) -> Result<Self, CspError> {
        let images: Vec<Binding> = csp.bindings().map(f).collect();
        let mut hit = vec![false; images.len()];
        for &(x, v) in &images {
            if x >= csp.variables.len() || v >= csp.variables[x].size {
                return Err(CspError::NotAPermutation(format!(
                    "({x}, {v}) is not a binding"
                )));
            }
            let i = csp.binding_index((x, v));
            if std::mem::replace(&mut hit[i], true) {
                return Err(CspError::NotAPermutation(format!(
                    "({x}, {v}) is hit twice"
                )));
            }
        }
        Ok(BindingPermutation { images })
    }

    pub fn apply(&self, csp: &Csp, b: Binding) -> Binding {
        self.images[csp.binding_index(b)]
    }

    /// Pointwise image of a complete assignment, if it is again one.
    pub fn apply_assignment(&self, csp: &Csp, assignment: &[usize]) -> Option<Vec<usize>> {
        let mut out = vec![None; assignment.len()];
        for (x, &v) in assignment.iter().enumerate() {
            let (y, w) = self.apply(csp, (x, v));
            if out[y].replace(w).is_some() {
                return None;
            }
        }
        out.into_iter().collect()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, csp: &Csp, inner: &Self) -> Self {
        BindingPermutation {
            images: inner.images.iter().map(|&b| self.apply(csp, b)).collect(),
        }
    }

    pub fn is_identity(&self, csp: &Csp) -> bool {
        csp.bindings().zip(&self.images).all(|(b, &i)| b == i)
    }
}

/// Whether the pointwise image of every solution is a solution.
pub fn is_solution_symmetry(
    csp: &Csp,
    perm: &BindingPermutation,
    cap: u64,
) -> Result<bool, CspError> {
    Ok(csp_solutions(csp, cap)?.iter().all(|s| {
        perm.apply_assignment(csp, s)
            .is_some_and(|img| csp.is_solution(&img))
    }))
}

/// Whether `perm` is an automorphism of the microstructure complement. A
/// bijection that maps edges into the finite edge set maps it onto itself,
/// so non-edges go to non-edges.
pub fn is_constraint_symmetry(
    csp: &Csp,
    perm: &BindingPermutation,
    cap: u64,
) -> Result<bool, CspError> {
    let ms = microstructure_complement(csp, cap)?;
    Ok(ms.edge_set.iter().all(|e| {
        let image: BTreeSet<Binding> = e.iter().map(|&b| perm.apply(csp, b)).collect();
        ms.edge_set.contains(&image)
    }))
}

/// Symbols of each formula, numbered funcs first, then preds.
fn formula_symbols(problem: &Problem) -> Vec<Vec<usize>> {
    let nf = problem.signature.funcs.len();
    problem
        .formulas
        .iter()
        .map(|f| {
            let (funcs, preds) = f.symbols();
            funcs
                .iter()
                .map(|g| g.0)
                .chain(preds.iter().map(|p| nf + p.0))
                .collect()
        })
        .collect()
}

fn cell_counts(problem: &Problem) -> Vec<(usize, usize)> {
    let sig = &problem.signature;
    let funcs = sig.funcs.iter().map(|d| {
        (
            problem.tuple_count(&d.args),
            problem.size(d.result) as usize,
        )
    });
    let preds = sig.preds.iter().map(|d| (problem.tuple_count(&d.args), 2));
    funcs.chain(preds).collect()
}

fn cell_label(problem: &Problem, symbol: usize, cell: usize) -> String {
    let sig = &problem.signature;
    let nf = sig.funcs.len();
    let (name, args) = if symbol < nf {
        (&sig.funcs[symbol].name, &sig.funcs[symbol].args)
    } else {
        (&sig.preds[symbol - nf].name, &sig.preds[symbol - nf].args)
    };
    if args.is_empty() {
        return name.clone();
    }
    let vals: Vec<String> = problem
        .tuple_at(args, cell)
        .iter()
        .zip(args)
        .map(|(&v, &s)| problem.value_name(crate::logic::Value::new(s, v)))
        .collect();
    format!("{name}({})", vals.join(","))
}

fn set_cell(interp: &mut Interpretation, nf: usize, symbol: usize, cell: usize, value: usize) {
    if symbol < nf {
        interp.funcs[symbol][cell] = value as u32;
    } else {
        interp.preds[symbol - nf][cell] = value == 1;
    }
}

/// Formula constraint whose scope assignment fills part of an
/// interpretation; cells outside the scope never influence the formula.
fn formula_relation(
    problem: &Problem,
    index: usize,
    fill: impl Fn(&mut Interpretation, &[usize]) + Send + Sync + 'static,
) -> Result<Relation, CspError> {
    let compiled = CompiledFormula::closed(problem, &problem.formulas[index])?;
    let eval = Evaluator::new(problem);
    let blank = Interpretation::first(problem);
    Ok(Relation::Intensional(Arc::new(move |tuple| {
        let mut interp = blank.clone();
        fill(&mut interp, tuple);
        let mut env = vec![0; compiled.slots];
        eval.eval(&compiled.root, &interp, &mut env)
    })))
}

/// One variable per function or relation cell, in enumeration order. Each
/// formula becomes a constraint over every cell of the symbols it mentions.
pub fn flat_csp(problem: &Problem) -> Result<Csp, CspError> {
    let nf = problem.signature.funcs.len();
    let counts = cell_counts(problem);
    let mut first_cell = Vec::with_capacity(counts.len());
    let mut variables = Vec::new();
    for (symbol, &(cells, size)) in counts.iter().enumerate() {
        first_cell.push(variables.len());
        for cell in 0..cells {
            variables.push(Variable {
                name: cell_label(problem, symbol, cell),
                size,
            });
        }
    }
    let mut csp = Csp::new(variables);
    for (i, symbols) in formula_symbols(problem).into_iter().enumerate() {
        let layout: Vec<(usize, usize)> = symbols
            .iter()
            .flat_map(|&s| (0..counts[s].0).map(move |c| (s, c)))
            .collect();
        let scope = layout.iter().map(|&(s, c)| first_cell[s] + c).collect();
        let relation = formula_relation(problem, i, move |interp, tuple| {
            for (&(s, c), &v) in layout.iter().zip(tuple) {
                set_cell(interp, nf, s, c, v);
            }
        })?;
        csp.add_constraint(scope, relation)?;
    }
    Ok(csp)
}

/// Table digits of value `index`, first cell most significant.
fn decode(mut index: usize, cells: usize, radix: usize) -> Vec<usize> {
    let mut digits = vec![0; cells];
    for d in digits.iter_mut().rev() {
        *d = index % radix;
        index /= radix;
    }
    digits
}

fn encode(digits: impl IntoIterator<Item = usize>, radix: usize) -> usize {
    digits.into_iter().fold(0, |acc, d| acc * radix + d)
}

fn table_domain(cells: usize, radix: usize) -> Option<usize> {
    (radix as u128)
        .checked_pow(cells as u32)
        .and_then(|n| usize::try_from(n).ok())
        .filter(|&n| n < usize::MAX)
}

/// One variable per symbol whose values are whole tables or relations,
/// encoded as mixed-radix integers in cell order. Complete assignments
/// correspond one to one with interpretations.
pub fn functional_csp(problem: &Problem, cap: u64) -> Result<Csp, CspError> {
    let nf = problem.signature.funcs.len();
    let counts = cell_counts(problem);
    let sig = &problem.signature;
    let names = sig
        .funcs
        .iter()
        .map(|d| &d.name)
        .chain(sig.preds.iter().map(|d| &d.name));
    let mut variables = Vec::new();
    for (name, &(cells, radix)) in names.zip(&counts) {
        let size = table_domain(cells, radix)
            .filter(|&n| n as u128 <= cap as u128)
            .ok_or(CspError::CapExceeded {
                what: "table domain",
                size: (radix as u128).saturating_pow(cells as u32),
                cap,
            })?;
        variables.push(Variable {
            name: name.clone(),
            size,
        });
    }
    let mut csp = Csp::new(variables);
    for (i, scope) in formula_symbols(problem).into_iter().enumerate() {
        let layout: Vec<(usize, usize, usize)> = scope
            .iter()
            .map(|&s| (s, counts[s].0, counts[s].1))
            .collect();
        let relation = formula_relation(problem, i, move |interp, tuple| {
            for (&(s, cells, radix), &v) in layout.iter().zip(tuple) {
                for (c, d) in decode(v, cells, radix).into_iter().enumerate() {
                    set_cell(interp, nf, s, c, d);
                }
            }
        })?;
        csp.add_constraint(scope, relation)?;
    }
    Ok(csp)
}

/// The functional-CSP assignment of an interpretation.
pub fn interpretation_to_assignment(problem: &Problem, interp: &Interpretation) -> Vec<usize> {
    let funcs = interp
        .funcs
        .iter()
        .zip(&problem.signature.funcs)
        .map(|(t, d)| {
            encode(
                t.iter().map(|&v| v as usize),
                problem.size(d.result) as usize,
            )
        });
    let preds = interp
        .preds
        .iter()
        .map(|r| encode(r.iter().map(|&b| b as usize), 2));
    funcs.chain(preds).collect()
}

/// Inverse of [`interpretation_to_assignment`].
pub fn assignment_to_interpretation(problem: &Problem, assignment: &[usize]) -> Interpretation {
    let nf = problem.signature.funcs.len();
    let mut interp = Interpretation::first(problem);
    for (s, (&(cells, radix), &v)) in cell_counts(problem).iter().zip(assignment).enumerate() {
        for (c, d) in decode(v, cells, radix).into_iter().enumerate() {
            set_cell(&mut interp, nf, s, c, d);
        }
    }
    interp
}

/// The flat-CSP assignment of an interpretation: cells in order.
pub fn interpretation_to_flat(interp: &Interpretation) -> Vec<usize> {
    let funcs = interp.funcs.iter().flatten().map(|&v| v as usize);
    funcs
        .chain(interp.preds.iter().flatten().map(|&b| b as usize))
        .collect()
}

/// `σ^F`: fixes every symbol and moves each table `t` to `σ • t`, the table
/// with `(σ • t)(σ(a)) = σ(t(a))`. Agrees with
/// [`apply_to_interpretation`](crate::oracle::apply_to_interpretation).
pub fn functional_extension(
    problem: &Problem,
    csp: &Csp,
    sigma: &DomainPermutation,
) -> Result<BindingPermutation, CspError> {
    sigma
        .check_shape(problem)
        .map_err(|e| CspError::Shape(e.to_string()))?;
    let sig = &problem.signature;
    let nf = sig.funcs.len();
    let counts = cell_counts(problem);
    if csp.variables.len() != counts.len() {
        return Err(CspError::Shape(
            "CSP is not the functional CSP of this problem".into(),
        ));
    }
    // For each symbol: where each cell goes, and how its content changes.
    let plans: Vec<(Vec<usize>, Option<SortId>)> = (0..counts.len())
        .map(|s| {
            let (args, result) = if s < nf {
                (&sig.funcs[s].args, Some(sig.funcs[s].result))
            } else {
                (&sig.preds[s - nf].args, None)
            };
            let moved = problem
                .tuples(args)
                .map(|t| problem.tuple_index(args, &sigma.apply_tuple(args, &t)))
                .collect();
            (moved, result)
        })
        .collect();
    BindingPermutation::from_fn(csp, |(x, v)| {
        let (cells, radix) = counts[x];
        let (moved, result) = &plans[x];
        let mut image = vec![0; cells];
        for (c, d) in decode(v, cells, radix).into_iter().enumerate() {
            image[moved[c]] = match result {
                Some(r) => sigma.map(*r)[d] as usize,
                None => d,
            };
        }
        (x, encode(image, radix))
    })
}
