//! Built-in regression pairs with known answers.

use crate::decide::{decide_pair, Config, Mode, Verdict};
use crate::error::Result;
use crate::exactmat::IntMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expect {
    Equivalent,
    NotEquivalent,
    /// The pair is not expected to be decided as equivalent.
    NotEquivalentOrUnknown,
}

impl Expect {
    pub fn accepts(&self, v: &Verdict) -> bool {
        match self {
            Expect::Equivalent => v.is_equivalent(),
            Expect::NotEquivalent => v.is_not_equivalent(),
            Expect::NotEquivalentOrUnknown => !v.is_equivalent(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Expect::Equivalent => "equivalent",
            Expect::NotEquivalent => "not_equivalent",
            Expect::NotEquivalentOrUnknown => "not equivalent or unknown",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Example {
    pub name: &'static str,
    pub a: IntMatrix,
    pub b: IntMatrix,
    pub mode: Mode,
    pub expect: Expect,
    /// The fact the example checks.
    pub fact: &'static str,
}

fn m(rows: &[&[i64]]) -> IntMatrix {
    IntMatrix::from_rows(rows)
}

pub fn examples() -> Vec<Example> {
    let golden = m(&[&[1, 1], &[2, 0]]);
    let symmetric = m(&[&[1, 5], &[3, 3]]);
    let shift = m(&[&[1, 6], &[2, 2]]);
    let thirteen = m(&[&[65, 7], &[24, 67]]);
    let unit = m(&[&[19, 5], &[4, 1]]);
    let seven = m(&[&[3, 1], &[2, 3]]);
    let tri = m(&[&[1, 0, 0], &[1, 3, 0], &[1, 0, 5]]);
    let singular = m(&[&[1, 1, 1], &[0, 1, 2], &[2, 1, 0]]);
    vec![
        Example {
            name: "two_adic_pair",
            a: golden.clone(),
            b: m(&[&[0, 1], &[2, 1]]),
            mode: Mode::Ordered,
            expect: Expect::Equivalent,
            fact: "J = [[1,0],[1,1]] maps the 2-adic row spaces onto each other",
        },
        Example {
            name: "elementary_transpose",
            a: golden.clone(),
            b: golden.transpose(),
            mode: Mode::Ordered,
            expect: Expect::Equivalent,
            fact: "A = KJ and Aᵗ = JK with K = diag(1, 2)",
        },
        Example {
            name: "eigenvector_transpose",
            a: symmetric.clone(),
            b: symmetric.transpose(),
            mode: Mode::Ordered,
            expect: Expect::Equivalent,
            fact: "J = [[1,2],[2,3]] satisfies the eigenvector and row-space conditions",
        },
        Example {
            name: "shift_equivalent_transpose",
            a: shift.clone(),
            b: shift.transpose(),
            mode: Mode::Ordered,
            expect: Expect::Equivalent,
            fact: "RS = Aᵗ and SR = A for explicit R, S",
        },
        Example {
            name: "mod_thirteen_transpose",
            a: thirteen.clone(),
            b: thirteen.transpose(),
            mode: Mode::Ordered,
            expect: Expect::NotEquivalent,
            fact: "both eigenvalues are 1 mod 13, so no diagonal D is admissible",
        },
        Example {
            name: "unit_determinant_transpose",
            a: unit.clone(),
            b: unit.transpose(),
            mode: Mode::Ordered,
            expect: Expect::NotEquivalent,
            fact: "trace modules 2Z+(ω−5)Z and 2Z+(ω+4)Z are not equivalent",
        },
        Example {
            name: "local_field_mismatch",
            a: m(&[&[4, 1], &[1, 2]]),
            b: m(&[&[7, 0], &[0, 1]]),
            mode: Mode::Unordered,
            expect: Expect::NotEquivalent,
            fact: "7-adic row spaces have minimal fields Q(√2) and Q",
        },
        Example {
            name: "seven_adic_transpose",
            a: seven.clone(),
            b: seven.transpose(),
            mode: Mode::Ordered,
            expect: Expect::Equivalent,
            fact: "strongly locally isomorphic at 7 and globally isomorphic",
        },
        Example {
            name: "coarser_than_elementary",
            a: m(&[&[4, 1], &[1, 2]]),
            b: seven.clone(),
            mode: Mode::Ordered,
            expect: Expect::Equivalent,
            fact: "no direct nonnegative factorization, yet the groups are isomorphic",
        },
        Example {
            name: "singular_self",
            a: singular.clone(),
            b: singular,
            mode: Mode::Ordered,
            expect: Expect::Equivalent,
            fact: "a singular matrix reduces to a nonsingular 2×2 core",
        },
        Example {
            name: "triangular_diagonal",
            a: tri.clone(),
            b: IntMatrix::diag(&[1, 3, 5]),
            mode: Mode::Unordered,
            expect: Expect::Equivalent,
            fact: "the identity carries the eventual row spaces at 3 and 5 onto each other",
        },
        Example {
            name: "triangular_diagonal_transpose",
            a: tri.transpose(),
            b: IntMatrix::diag(&[1, 3, 5]),
            mode: Mode::Unordered,
            expect: Expect::NotEquivalentOrUnknown,
            fact: "transposing breaks the row-space match",
        },
    ]
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub example: Example,
    pub verdict: Result<Verdict>,
    pub passed: bool,
}

pub fn run(cfg: &Config) -> Vec<Outcome> {
    examples()
        .into_iter()
        .map(|e| {
            let verdict = decide_pair(&e.a, &e.b, e.mode, cfg);
            let passed = verdict.as_ref().map_or(false, |v| e.expect.accepts(v));
            Outcome { example: e, verdict, passed }
        })
        .collect()
}
