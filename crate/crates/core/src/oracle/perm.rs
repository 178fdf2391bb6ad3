use super::OracleError;
use crate::logic::{Problem, ShapeError, SortId, Value};

/// One permutation of `0..n` per sort, zero-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DomainPermutation {
    maps: Vec<Vec<u32>>,
}

impl DomainPermutation {
    pub fn identity(problem: &Problem) -> Self {
        DomainPermutation {
            maps: problem
                .domains
                .sizes()
                .iter()
                .map(|&n| (0..n).collect())
                .collect(),
        }
    }

    /// Validates that each map is a bijection on `0..len`.
    pub fn new(maps: Vec<Vec<u32>>) -> Result<Self, OracleError> {
        for (s, map) in maps.iter().enumerate() {
            let mut seen = vec![false; map.len()];
            for &v in map {
                match seen.get_mut(v as usize) {
                    Some(slot) if !*slot => *slot = true,
                    _ => {
                        return Err(OracleError::InvalidPermutation(format!(
                            "map for sort #{s} is not a bijection on 0..{}",
                            map.len()
                        )))
                    }
                }
            }
        }
        Ok(DomainPermutation { maps })
    }

    /// Identity everywhere except `sort`, which is mapped by `map`.
    pub fn on_sort(problem: &Problem, sort: SortId, map: Vec<u32>) -> Result<Self, OracleError> {
        let mut maps = Self::identity(problem).maps;
        if map.len() != maps[sort.0].len() {
            return Err(OracleError::InvalidPermutation(format!(
                "map for sort #{} has length {}, domain has {}",
                sort.0,
                map.len(),
                maps[sort.0].len()
            )));
        }
        maps[sort.0] = map;
        Self::new(maps)
    }

    /// The transposition of two values of one sort.
    pub fn swap(problem: &Problem, sort: SortId, a: u32, b: u32) -> Self {
        let mut maps = Self::identity(problem).maps;
        maps[sort.0].swap(a as usize, b as usize);
        DomainPermutation { maps }
    }

    pub fn maps(&self) -> &[Vec<u32>] {
        &self.maps
    }

    pub fn map(&self, sort: SortId) -> &[u32] {
        &self.maps[sort.0]
    }

    pub fn apply(&self, v: Value) -> Value {
        Value::new(v.sort, self.maps[v.sort.0][v.index as usize])
    }

    pub fn apply_tuple(&self, sorts: &[SortId], tuple: &[u32]) -> Vec<u32> {
        sorts
            .iter()
            .zip(tuple)
            .map(|(s, &v)| self.maps[s.0][v as usize])
            .collect()
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &Self) -> Self {
        DomainPermutation {
            maps: self
                .maps
                .iter()
                .zip(&inner.maps)
                .map(|(outer, inner)| inner.iter().map(|&v| outer[v as usize]).collect())
                .collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        DomainPermutation {
            maps: self
                .maps
                .iter()
                .map(|m| {
                    let mut inv = vec![0; m.len()];
                    for (i, &v) in m.iter().enumerate() {
                        inv[v as usize] = i as u32;
                    }
                    inv
                })
                .collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.maps
            .iter()
            .all(|m| m.iter().enumerate().all(|(i, &v)| i as u32 == v))
    }

    pub fn check_shape(&self, problem: &Problem) -> Result<(), OracleError> {
        let sizes = problem.domains.sizes();
        if self.maps.len() != sizes.len() {
            return Err(ShapeError::Sorts {
                expected: sizes.len(),
                got: self.maps.len(),
            }
            .into());
        }
        for (s, (m, &n)) in self.maps.iter().zip(sizes).enumerate() {
            if m.len() != n as usize {
                return Err(OracleError::InvalidPermutation(format!(
                    "map for sort #{s} has length {}, domain has {n}",
                    m.len()
                )));
            }
        }
        Ok(())
    }
}

pub(crate) fn factorial(n: u32) -> u128 {
    (1..=n as u128).fold(1u128, |acc, k| acc.saturating_mul(k))
}

/// Number of domain permutations: the product of per-sort factorials.
pub fn permutation_count(problem: &Problem) -> u128 {
    problem
        .domains
        .sizes()
        .iter()
        .fold(1u128, |acc, &n| acc.saturating_mul(factorial(n)))
}

/// All permutations of `items` in lexicographic order of positions.
fn permutations_of(items: &[u32]) -> Vec<Vec<u32>> {
    let mut idx: Vec<usize> = (0..items.len()).collect();
    let mut out = vec![items.to_vec()];
    loop {
        // Standard next-permutation step on the index vector.
        let Some(i) = (1..idx.len()).rev().find(|&i| idx[i - 1] < idx[i]) else {
            return out;
        };
        let j = (i..idx.len())
            .rev()
            .find(|&j| idx[j] > idx[i - 1])
            .expect("pivot exists");
        idx.swap(i - 1, j);
        idx[i..].reverse();
        out.push(idx.iter().map(|&k| items[k]).collect());
    }
}

/// Every domain permutation, sorts varying lexicographically with the last
/// sort fastest. The identity comes first.
pub fn all_domain_permutations(problem: &Problem) -> impl Iterator<Item = DomainPermutation> {
    let per_sort: Vec<Vec<Vec<u32>>> = problem
        .domains
        .sizes()
        .iter()
        .map(|&n| permutations_of(&(0..n).collect::<Vec<_>>()))
        .collect();
    let mut counter = vec![0usize; per_sort.len()];
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let item = DomainPermutation {
            maps: counter
                .iter()
                .zip(&per_sort)
                .map(|(&i, ps)| ps[i].clone())
                .collect(),
        };
        done = true;
        for k in (0..counter.len()).rev() {
            counter[k] += 1;
            if counter[k] < per_sort[k].len() {
                done = false;
                break;
            }
            counter[k] = 0;
        }
        Some(item)
    })
}

/// The `|values|!` domain permutations acting as the identity outside
/// `values` of `sort`.
pub fn permutations_solely_on(
    problem: &Problem,
    sort: SortId,
    values: &[u32],
) -> Result<Vec<DomainPermutation>, OracleError> {
    let n = problem.size(sort);
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != values.len() || sorted.iter().any(|&v| v >= n) {
        return Err(OracleError::InvalidPermutation(format!(
            "values {values:?} are not distinct members of a domain of size {n}"
        )));
    }
    let base = DomainPermutation::identity(problem);
    Ok(permutations_of(values)
        .into_iter()
        .map(|image| {
            let mut p = base.clone();
            for (&from, &to) in values.iter().zip(&image) {
                p.maps[sort.0][from as usize] = to;
            }
            p
        })
        .collect())
}
