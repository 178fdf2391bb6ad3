use super::{DomainPermutation, OracleError};
use crate::logic::{Interpretation, Problem};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Cell {
    Func { func: usize, tuple: usize },
    Pred { pred: usize, tuple: usize },
}

/// Number of interpretations of the problem's signature, saturating.
pub fn space_size(problem: &Problem) -> u128 {
    let sig = &problem.signature;
    let mut total = 1u128;
    for f in &sig.funcs {
        let cells = problem.tuple_count(&f.args) as u32;
        total = total.saturating_mul((problem.size(f.result) as u128).saturating_pow(cells));
    }
    for p in &sig.preds {
        total = total.saturating_mul(2u128.saturating_pow(problem.tuple_count(&p.args) as u32));
    }
    total
}

/// Bijection between interpretations and `0..len`.
///
/// Cells are ordered function by function (declaration order, argument
/// tuples row-major), then predicate by predicate; the first cell is the
/// most significant digit, so index order is lexicographic order.
#[derive(Clone, Debug)]
pub struct InterpretationSpace {
    cells: Vec<Cell>,
    radices: Vec<u32>,
    weights: Vec<u64>,
    func_offsets: Vec<usize>,
    pred_offsets: Vec<usize>,
    len: u64,
}

impl InterpretationSpace {
    /// Fails when the space has more than `cap` elements.
    pub fn bounded(problem: &Problem, cap: u64) -> Result<Self, OracleError> {
        let space = space_size(problem);
        if space > cap as u128 {
            return Err(OracleError::CapExceeded { space, cap });
        }
        let sig = &problem.signature;
        let mut cells = Vec::new();
        let mut radices = Vec::new();
        let mut func_offsets = Vec::new();
        let mut pred_offsets = Vec::new();
        for (func, f) in sig.funcs.iter().enumerate() {
            func_offsets.push(cells.len());
            for tuple in 0..problem.tuple_count(&f.args) {
                cells.push(Cell::Func { func, tuple });
                radices.push(problem.size(f.result));
            }
        }
        for (pred, p) in sig.preds.iter().enumerate() {
            pred_offsets.push(cells.len());
            for tuple in 0..problem.tuple_count(&p.args) {
                cells.push(Cell::Pred { pred, tuple });
                radices.push(2);
            }
        }
        let mut weights = vec![1u64; cells.len()];
        for i in (0..cells.len().saturating_sub(1)).rev() {
            weights[i] = weights[i + 1] * radices[i + 1] as u64;
        }
        Ok(InterpretationSpace {
            cells,
            radices,
            weights,
            func_offsets,
            pred_offsets,
            len: space as u64,
        })
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn index_of(&self, interp: &Interpretation) -> u64 {
        self.cells
            .iter()
            .zip(&self.weights)
            .map(|(c, w)| cell_value(interp, *c) as u64 * w)
            .sum()
    }

    pub fn at(&self, problem: &Problem, index: u64) -> Interpretation {
        let mut interp = Interpretation::first(problem);
        for (c, d) in self.cells.iter().zip(self.digits_of(index)) {
            set_cell(&mut interp, *c, d);
        }
        interp
    }

    pub(crate) fn digits_of(&self, mut index: u64) -> Vec<u32> {
        let mut digits = vec![0; self.cells.len()];
        for i in (0..digits.len()).rev() {
            let r = self.radices[i] as u64;
            digits[i] = (index % r) as u32;
            index /= r;
        }
        digits
    }

    /// Advances `digits` to the next index; returns false on wrap-around.
    pub(crate) fn increment(&self, digits: &mut [u32]) -> bool {
        for i in (0..digits.len()).rev() {
            digits[i] += 1;
            if digits[i] < self.radices[i] {
                return true;
            }
            digits[i] = 0;
        }
        false
    }

    pub(crate) fn odometer(&self, problem: &Problem) -> Odometer<'_> {
        Odometer {
            space: self,
            digits: vec![0; self.cells.len()],
            interp: Interpretation::first(problem),
        }
    }

    pub fn iter(self, problem: &Problem) -> Interpretations {
        Interpretations {
            digits: vec![0; self.cells.len()],
            interp: Interpretation::first(problem),
            space: self,
            done: false,
        }
    }

    /// Index-level action of `sigma`: where each cell moves and how its value
    /// is relabeled.
    pub(crate) fn action(&self, problem: &Problem, sigma: &DomainPermutation) -> Action {
        let sig = &problem.signature;
        let mut target = vec![0usize; self.cells.len()];
        let mut relabel: Vec<Option<Vec<u32>>> = vec![None; self.cells.len()];
        for (i, cell) in self.cells.iter().enumerate() {
            match *cell {
                Cell::Func { func, tuple } => {
                    let decl = &sig.funcs[func];
                    let image = sigma.apply_tuple(&decl.args, &problem.tuple_at(&decl.args, tuple));
                    target[i] = self.func_offsets[func] + problem.tuple_index(&decl.args, &image);
                    relabel[i] = Some(sigma.map(decl.result).to_vec());
                }
                Cell::Pred { pred, tuple } => {
                    let decl = &sig.preds[pred];
                    let image = sigma.apply_tuple(&decl.args, &problem.tuple_at(&decl.args, tuple));
                    target[i] = self.pred_offsets[pred] + problem.tuple_index(&decl.args, &image);
                }
            }
        }
        Action {
            weights: target.iter().map(|&t| self.weights[t]).collect(),
            relabel,
        }
    }
}

pub(crate) struct Action {
    weights: Vec<u64>,
    relabel: Vec<Option<Vec<u32>>>,
}

impl Action {
    /// Index of `sigma • I` where `digits` are the digits of `I`.
    pub fn image(&self, digits: &[u32]) -> u64 {
        digits
            .iter()
            .zip(&self.weights)
            .zip(&self.relabel)
            .map(|((&d, &w), r)| match r {
                Some(map) => map[d as usize] as u64 * w,
                None => d as u64 * w,
            })
            .sum()
    }
}

fn cell_value(interp: &Interpretation, cell: Cell) -> u32 {
    match cell {
        Cell::Func { func, tuple } => interp.funcs[func][tuple],
        Cell::Pred { pred, tuple } => interp.preds[pred][tuple] as u32,
    }
}

fn set_cell(interp: &mut Interpretation, cell: Cell, d: u32) {
    match cell {
        Cell::Func { func, tuple } => interp.funcs[func][tuple] = d,
        Cell::Pred { pred, tuple } => interp.preds[pred][tuple] = d == 1,
    }
}

/// In-place walk over the space that keeps an interpretation in sync.
pub(crate) struct Odometer<'a> {
    space: &'a InterpretationSpace,
    digits: Vec<u32>,
    interp: Interpretation,
}

impl Odometer<'_> {
    pub fn current(&self) -> &Interpretation {
        &self.interp
    }

    pub fn advance(&mut self) -> bool {
        let space = self.space;
        for i in (0..self.digits.len()).rev() {
            self.digits[i] += 1;
            let wrapped = self.digits[i] == space.radices[i];
            if wrapped {
                self.digits[i] = 0;
            }
            set_cell(&mut self.interp, space.cells[i], self.digits[i]);
            if !wrapped {
                return true;
            }
        }
        false
    }
}

/// Iterator returned by [`enumerate_interpretations`](super::enumerate_interpretations).
pub struct Interpretations {
    space: InterpretationSpace,
    digits: Vec<u32>,
    interp: Interpretation,
    done: bool,
}

impl Iterator for Interpretations {
    type Item = Interpretation;

    fn next(&mut self) -> Option<Interpretation> {
        if self.done {
            return None;
        }
        let out = self.interp.clone();
        self.done = true;
        for i in (0..self.digits.len()).rev() {
            self.digits[i] += 1;
            let wrapped = self.digits[i] == self.space.radices[i];
            if wrapped {
                self.digits[i] = 0;
            }
            set_cell(&mut self.interp, self.space.cells[i], self.digits[i]);
            if !wrapped {
                self.done = false;
                break;
            }
        }
        Some(out)
    }
}
