//! Small reference problems used throughout the tests, the acceptance suite
//! and the README walkthrough.

use crate::io::parse_problem;
use crate::logic::{Interpretation, Problem};

fn parse(text: &str) -> Problem {
    parse_problem(text).expect("catalog problem parses")
}

pub const RELABELING_EXAMPLE: &str = "\
(sort A 3)
(sort B 2)
(const c A)
(const d B)
(func f (A) B)
(pred P (A B))
(assert (forall ((x B)) (P c x)))
(assert (exists ((y A)) (= (f y) d)))
";

/// Two sorts, a constant of each, `f : A -> B` and `P : A x B`.
pub fn relabeling_example() -> Problem {
    parse(RELABELING_EXAMPLE)
}

/// `c = A!1`, `d = B!2`, `f` constantly `B!2`, `P = {(A!1,B!1), (A!1,B!2), (A!3,B!2)}`.
pub fn relabeling_interpretation(problem: &Problem) -> Interpretation {
    crate::io::parse_interpretation(
        problem,
        "(value c A!1) (value d B!2) \
         (value f A!1 B!2) (value f A!2 B!2) (value f A!3 B!2) \
         (holds P A!1 B!1) (holds P A!1 B!2) (holds P A!3 B!2)",
    )
    .expect("catalog interpretation parses")
}

pub const COMBINATION_BASE: &str = "\
(sort A 3)
(const c A)
(pred P (A))
(assert (and (not (P c)) (exists ((x A)) (P x))))
";

/// One constant and one unary predicate that must disagree on `c`.
pub fn combination_base() -> Problem {
    parse(COMBINATION_BASE)
}

/// The base problem after pinning `c = A!1`.
pub fn combination_pinned() -> Problem {
    parse(
        "(sort A 3) (const c A) (pred P (A))
         (assert (= c A!1))
         (assert (and (not (P c)) (exists ((x A)) (P x))))",
    )
}

/// Pinned constant plus membership constraints over the whole domain: unsatisfiable.
pub fn combination_over_combined() -> Problem {
    let mut p = combination_base();
    let extra = parse(
        "(sort A 3) (const c A) (pred P (A))
         (assert (= c A!1))
         (assert (=> (P A!3) (P A!2)))
         (assert (=> (P A!2) (P A!1)))",
    );
    p.formulas.extend(extra.formulas);
    p
}

/// Extended problem whose unused values of `A` are `A!1, A!2, A!5`.
pub fn interchangeable_constants_example() -> Problem {
    parse(
        "(sort A 5) (sort B 2)
         (const c1 A) (const c2 A) (func f (B) A) (pred P (A))
         (assert (P A!3))
         (assert (= (f B!1) A!4))",
    )
}

/// DRD function `f : B x C -> A` where only `A!1` occurs among the values of `A`.
pub fn drd_extended_example() -> Problem {
    parse(
        "(sort A 6) (sort B 2) (sort C 2)
         (const x A) (func f (B C) A)
         (assert (= x A!1))
         (assert (= (f B!1 C!1) A!1))
         (assert (not (= (f B!2 C!1) (f B!2 C!2))))
         (assert (= (f B!1 C!1) (f B!2 C!2)))",
    )
}

pub const SINGLE_SORTED: &str = "\
(sort U 3)
(const c1 U)
(const c2 U)
(func f (U) U)
(assert (not (= (f c1) c2)))
(assert (forall ((x U)) (not (= (f x) c2))))
";

/// Single-sorted problem that sort inference splits into two sorts.
pub fn single_sorted() -> Problem {
    parse(SINGLE_SORTED)
}

/// `c : A`, `f : A x B -> A` with `f(x, y) != c`; sizes 3 and 2.
pub fn resort_original() -> Problem {
    parse(
        "(sort A 3) (sort B 2)
         (const c A) (func f (A B) A)
         (assert (forall ((x A) (y B)) (not (= (f x y) c))))",
    )
}

/// The same problem with the result of `f` and `c` moved to a third sort `C`.
pub fn resort_general() -> Problem {
    parse(
        "(sort A 3) (sort B 2) (sort C 3)
         (const c C) (func f (A B) C)
         (assert (forall ((x A) (y B)) (not (= (f x y) c))))",
    )
}

/// Signature and formula used to illustrate sort substitution.
pub fn substitution_example() -> Problem {
    parse(
        "(sort A 2) (sort B 2) (sort C 2)
         (const c1 A) (const c2 B) (const c3 C)
         (func f (A B) C) (pred P (A B))
         (assert (forall ((x A)) (forall ((y B)) (forall ((z C)) (= (f x y) z)))))",
    )
}

/// Single-sorted Latin square of order `n`: `f : N x N -> N` with distinct
/// entries along every row and every column.
pub fn latin_square_text(n: u32) -> String {
    format!(
        "(sort N {n})
(func f (N N) N)
(assert (forall ((r N) (c1 N) (c2 N)) (=> (= (f r c1) (f r c2)) (= c1 c2))))
(assert (forall ((r1 N) (r2 N) (c N)) (=> (= (f r1 c) (f r2 c)) (= r1 r2))))
"
    )
}

pub fn latin_square(n: u32) -> Problem {
    parse(&latin_square_text(n))
}
