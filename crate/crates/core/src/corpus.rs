//! Seeded generator of small random problems for property checks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::logic::{DomainAssignment, Formula, Problem, Signature, SortId, Term};
use crate::oracle::space_size;

/// Shape limits for generated problems.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusConfig {
    pub max_sorts: usize,
    pub max_size: u32,
    pub max_funcs: usize,
    pub max_arity: usize,
    pub max_preds: usize,
    pub max_formulas: usize,
    /// Connective and quantifier nesting.
    pub max_depth: usize,
    /// Only problems whose interpretation space fits are kept.
    pub cap: u64,
    /// Whether formulas may mention domain elements.
    pub pure: bool,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            max_sorts: 2,
            max_size: 3,
            max_funcs: 2,
            max_arity: 2,
            max_preds: 2,
            max_formulas: 3,
            max_depth: 3,
            cap: 20_000,
            pure: false,
        }
    }
}

/// `count` problems drawn deterministically from `seed`.
pub fn corpus(seed: u64, count: usize, config: &CorpusConfig) -> Vec<Problem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_problem(&mut rng, config))
        .collect()
}

/// One problem within `config`, redrawn until its space fits the cap.
pub fn random_problem(rng: &mut impl Rng, config: &CorpusConfig) -> Problem {
    loop {
        let p = draw(rng, config);
        if space_size(&p) <= config.cap as u128 {
            return p;
        }
    }
}

fn draw(rng: &mut impl Rng, config: &CorpusConfig) -> Problem {
    let mut sig = Signature::new();
    let nsorts = rng.gen_range(1..=config.max_sorts.max(1));
    let sorts: Vec<SortId> = (0..nsorts)
        .map(|i| {
            sig.add_sort(&((b'A' + i as u8) as char).to_string())
                .expect("fresh")
        })
        .collect();
    let sizes: Vec<u32> = sorts
        .iter()
        .map(|_| rng.gen_range(1..=config.max_size.max(1)))
        .collect();
    let pick = |rng: &mut dyn rand::RngCore| *sorts.choose(rng).expect("at least one sort");

    for i in 0..rng.gen_range(0..=config.max_funcs) {
        let arity = rng.gen_range(0..=config.max_arity);
        let args: Vec<SortId> = (0..arity).map(|_| pick(rng)).collect();
        let name = if arity == 0 {
            format!("c{}", i + 1)
        } else {
            format!("f{}", i + 1)
        };
        sig.add_func(&name, &args, pick(rng)).expect("fresh");
    }
    for i in 0..rng.gen_range(0..=config.max_preds) {
        let arity = rng.gen_range(1..=config.max_arity.max(1));
        let args: Vec<SortId> = (0..arity).map(|_| pick(rng)).collect();
        sig.add_pred(&format!("P{}", i + 1), &args).expect("fresh");
    }

    let count = rng.gen_range(0..=config.max_formulas);
    let formulas = random_formulas(rng, &sig, &sizes, count, config);
    Problem::new(
        sig,
        formulas,
        DomainAssignment::new(sizes).expect("positive sizes"),
    )
    .expect("one size per sort")
}

/// `count` closed, well-sorted formulas over `sig`.
pub fn random_formulas(
    rng: &mut impl Rng,
    sig: &Signature,
    sizes: &[u32],
    count: usize,
    config: &CorpusConfig,
) -> Vec<Formula> {
    let mut gen = Gen {
        rng,
        sig,
        sizes,
        pure: config.pure,
        scope: Vec::new(),
        pending: Vec::new(),
        fresh: 0,
    };
    (0..count).map(|_| gen.formula(config.max_depth)).collect()
}

struct Gen<'a, R> {
    rng: &'a mut R,
    sig: &'a Signature,
    sizes: &'a [u32],
    pure: bool,
    scope: Vec<(String, SortId)>,
    /// Variables invented for pure atoms, bound around the atom.
    pending: Vec<(String, SortId)>,
    fresh: usize,
}

impl<R: Rng> Gen<'_, R> {
    fn formula(&mut self, depth: usize) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.3) {
            return self.atom();
        }
        let d = depth - 1;
        match self.rng.gen_range(0..7) {
            0 => Formula::not(self.formula(d)),
            1 => Formula::and(self.formula(d), self.formula(d)),
            2 => Formula::or(self.formula(d), self.formula(d)),
            3 => Formula::implies(self.formula(d), self.formula(d)),
            4 => Formula::iff(self.formula(d), self.formula(d)),
            q => {
                let sort = SortId(self.rng.gen_range(0..self.sizes.len()));
                self.fresh += 1;
                let var = format!("x{}", self.fresh);
                self.scope.push((var.clone(), sort));
                let body = self.formula(d);
                self.scope.pop();
                if q == 5 {
                    Formula::forall(&var, sort, body)
                } else {
                    Formula::exists(&var, sort, body)
                }
            }
        }
    }

    fn atom(&mut self) -> Formula {
        let mut f = self.bare_atom();
        while let Some((var, sort)) = self.pending.pop() {
            f = if self.rng.gen_bool(0.5) {
                Formula::forall(&var, sort, f)
            } else {
                Formula::exists(&var, sort, f)
            };
        }
        f
    }

    fn bare_atom(&mut self) -> Formula {
        let npreds = self.sig.preds.len();
        if npreds > 0 && self.rng.gen_bool(0.5) {
            let p = self.rng.gen_range(0..npreds);
            let args = self.sig.preds[p]
                .args
                .iter()
                .map(|&s| self.term(s, 1))
                .collect();
            return Formula::pred(crate::logic::PredId(p), args);
        }
        let sort = SortId(self.rng.gen_range(0..self.sizes.len()));
        Formula::eq(self.term(sort, 1), self.term(sort, 1))
    }

    fn term(&mut self, sort: SortId, depth: usize) -> Term {
        let funcs: Vec<usize> = (0..self.sig.funcs.len())
            .filter(|&f| {
                self.sig.funcs[f].result == sort && (depth > 0 || self.sig.funcs[f].args.is_empty())
            })
            .collect();
        let vars: Vec<String> = self
            .scope
            .iter()
            .filter(|(_, s)| *s == sort)
            .map(|(n, _)| n.clone())
            .collect();
        let mut options = Vec::new();
        if !funcs.is_empty() {
            options.push(0);
        }
        if !vars.is_empty() {
            options.push(1);
        }
        if !self.pure || options.is_empty() {
            options.push(2);
        }
        match *options.choose(self.rng).expect("nonempty") {
            0 => {
                let f = *funcs.choose(self.rng).expect("nonempty");
                let args = self.sig.funcs[f].args.clone();
                Term::app(
                    crate::logic::FuncId(f),
                    args.iter().map(|&s| self.term(s, depth - 1)).collect(),
                )
            }
            1 => Term::var(vars.choose(self.rng).expect("nonempty"), sort),
            _ => {
                if self.pure {
                    self.fresh += 1;
                    let var = format!("x{}", self.fresh);
                    self.pending.push((var.clone(), sort));
                    return Term::var(&var, sort);
                }
                Term::elem(sort, self.rng.gen_range(0..self.sizes[sort.0]))
            }
        }
    }
}
