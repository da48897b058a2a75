//! Structural classification of an algebra by verified axioms.
//!
//! Specialized commutator engines need to know whether the operations
//! carry a group, commutative-ring or loop structure. Detection goes by
//! the table contents, never by operation names: every candidate role
//! assignment is checked against the defining identities, and only an
//! exact signature shape qualifies (for instance a group must have
//! exactly one binary and one unary operation, so that every term in the
//! signature really is a group word). Results are cached on the algebra.

use crate::algebra::{El, FiniteAlgebra};

/// Operation roles of a verified group structure (`mul`, `inv`; the zero
/// constant is the group identity).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupOps {
    pub mul: usize,
    pub inv: usize,
}

/// Operation roles of a verified commutative ring (possibly without
/// unit): `add`/`neg` form an abelian group, `mul` is associative,
/// commutative and distributes over `add`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RingOps {
    pub add: usize,
    pub neg: usize,
    pub mul: usize,
}

/// Operation roles of a verified loop: `mul` with two-sided identity
/// zero, and division operations satisfying
/// `mul(a, ldiv(a, b)) = b`, `ldiv(a, mul(a, b)) = b`,
/// `mul(rdiv(a, b), b) = a`, `rdiv(mul(a, b), b) = a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LoopOps {
    pub mul: usize,
    pub ldiv: usize,
    pub rdiv: usize,
}

/// What the tables verifiably are. At most one of the three shapes can
/// match because they require different signature shapes.
#[derive(Clone, Debug, Default)]
pub struct Structure {
    pub group: Option<GroupOps>,
    pub abelian_group: bool,
    pub ring: Option<RingOps>,
    pub loop_ops: Option<LoopOps>,
}

impl Structure {
    /// Human-readable kind for reports.
    pub fn kind_name(&self) -> &'static str {
        if self.ring.is_some() {
            "commutative_ring"
        } else if self.abelian_group {
            "abelian_group"
        } else if self.group.is_some() {
            "group"
        } else if self.loop_ops.is_some() {
            "loop"
        } else {
            "generic"
        }
    }

    /// Classify by axiom scan. Large algebras are skipped (quadratic and
    /// cubic table sweeps); they fall back to generic handling.
    pub fn detect(alg: &FiniteAlgebra) -> Structure {
        if alg.size() > 512 || alg.size() == 0 {
            return Structure::default();
        }
        let mut binaries = Vec::new();
        let mut unaries = Vec::new();
        for (i, op) in alg.signature().ops().iter().enumerate() {
            match op.arity {
                0 => {}
                1 => unaries.push(i),
                2 => binaries.push(i),
                _ => return Structure::default(),
            }
        }
        match (binaries.len(), unaries.len()) {
            (1, 1) => {
                let (m, i) = (binaries[0], unaries[0]);
                if is_group(alg, m, i) {
                    Structure {
                        group: Some(GroupOps { mul: m, inv: i }),
                        abelian_group: is_commutative(alg, m),
                        ring: None,
                        loop_ops: None,
                    }
                } else {
                    Structure::default()
                }
            }
            (2, 1) => {
                let u = unaries[0];
                for (add, mul) in [(binaries[0], binaries[1]), (binaries[1], binaries[0])] {
                    if is_commutative_ring(alg, add, u, mul) {
                        return Structure {
                            group: None,
                            abelian_group: false,
                            ring: Some(RingOps { add, neg: u, mul }),
                            loop_ops: None,
                        };
                    }
                }
                Structure::default()
            }
            (3, 0) => {
                for &m in &binaries {
                    for &l in &binaries {
                        for &r in &binaries {
                            if m != l && m != r && l != r && is_loop(alg, m, l, r) {
                                return Structure {
                                    group: None,
                                    abelian_group: false,
                                    ring: None,
                                    loop_ops: Some(LoopOps {
                                        mul: m,
                                        ldiv: l,
                                        rdiv: r,
                                    }),
                                };
                            }
                        }
                    }
                }
                Structure::default()
            }
            _ => Structure::default(),
        }
    }
}

fn is_associative(alg: &FiniteAlgebra, m: usize) -> bool {
    let n = alg.size() as El;
    for a in 0..n {
        for b in 0..n {
            let ab = alg.op2(m, a, b);
            for c in 0..n {
                if alg.op2(m, ab, c) != alg.op2(m, a, alg.op2(m, b, c)) {
                    return false;
                }
            }
        }
    }
    true
}

fn is_commutative(alg: &FiniteAlgebra, m: usize) -> bool {
    let n = alg.size() as El;
    for a in 0..n {
        for b in (a + 1)..n {
            if alg.op2(m, a, b) != alg.op2(m, b, a) {
                return false;
            }
        }
    }
    true
}

fn zero_is_identity(alg: &FiniteAlgebra, m: usize) -> bool {
    let z = alg.zero();
    alg.elements()
        .all(|a| alg.op2(m, z, a) == a && alg.op2(m, a, z) == a)
}

fn is_group(alg: &FiniteAlgebra, m: usize, i: usize) -> bool {
    let z = alg.zero();
    zero_is_identity(alg, m)
        && is_associative(alg, m)
        && alg
            .elements()
            .all(|a| alg.op2(m, a, alg.op1(i, a)) == z && alg.op2(m, alg.op1(i, a), a) == z)
}

fn is_commutative_ring(alg: &FiniteAlgebra, add: usize, neg: usize, mul: usize) -> bool {
    let n = alg.size() as El;
    if !is_group(alg, add, neg) || !is_commutative(alg, add) {
        return false;
    }
    if !is_associative(alg, mul) || !is_commutative(alg, mul) {
        return false;
    }
    // Left distributivity; the right-hand version follows from
    // commutativity of `mul`.
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let lhs = alg.op2(mul, a, alg.op2(add, b, c));
                let rhs = alg.op2(add, alg.op2(mul, a, b), alg.op2(mul, a, c));
                if lhs != rhs {
                    return false;
                }
            }
        }
    }
    true
}

fn is_loop(alg: &FiniteAlgebra, m: usize, l: usize, r: usize) -> bool {
    let n = alg.size() as El;
    if !zero_is_identity(alg, m) {
        return false;
    }
    for a in 0..n {
        for b in 0..n {
            if alg.op2(m, a, alg.op2(l, a, b)) != b
                || alg.op2(l, a, alg.op2(m, a, b)) != b
                || alg.op2(m, alg.op2(r, a, b), b) != a
                || alg.op2(r, alg.op2(m, a, b), b) != a
            {
                return false;
            }
        }
    }
    true
}
