//! Constructors for common finite pointed algebras.
//!
//! Groups use the signature `mul(2), inv(1), e(0)`; commutative rings use
//! `add(2), neg(1), mul(2), zero(0)`; loops use
//! `mul(2), ldiv(2), rdiv(2), e(0)`. Every builder runs the result through
//! full validation, and table-driven builders verify the defining axioms
//! first, reporting the first violation found.

use crate::algebra::{FiniteAlgebra, RawAlgebra, RawOp};
use crate::error::Error;

const GROUP_PROPS: [&str; 3] = ["group", "maltsev", "semi_abelian"];
const RING_PROPS: [&str; 3] = ["commutative_ring", "maltsev", "semi_abelian"];
const LOOP_PROPS: [&str; 1] = ["loop"];

fn props(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn group_raw(name: String, mul: Vec<usize>, inv: Vec<usize>) -> RawAlgebra {
    let size = inv.len();
    RawAlgebra {
        name,
        size,
        zero: 0,
        operations: vec![
            RawOp {
                name: "mul".into(),
                arity: 2,
                table: mul,
            },
            RawOp {
                name: "inv".into(),
                arity: 1,
                table: inv,
            },
            RawOp {
                name: "e".into(),
                arity: 0,
                table: vec![0],
            },
        ],
        declared_properties: props(&GROUP_PROPS),
    }
}

fn ring_raw(name: String, add: Vec<usize>, neg: Vec<usize>, mul: Vec<usize>) -> RawAlgebra {
    let size = neg.len();
    RawAlgebra {
        name,
        size,
        zero: 0,
        operations: vec![
            RawOp {
                name: "add".into(),
                arity: 2,
                table: add,
            },
            RawOp {
                name: "neg".into(),
                arity: 1,
                table: neg,
            },
            RawOp {
                name: "mul".into(),
                arity: 2,
                table: mul,
            },
            RawOp {
                name: "zero".into(),
                arity: 0,
                table: vec![0],
            },
        ],
        declared_properties: props(&RING_PROPS),
    }
}

fn finish(raw: RawAlgebra) -> FiniteAlgebra {
    FiniteAlgebra::validate(raw).expect("builder constructed an invalid algebra")
}

// ---------------------------------------------------------------------------
// Groups
// ---------------------------------------------------------------------------

/// Cyclic group of order `n` (addition modulo `n`).
pub fn cyclic_group(n: usize) -> FiniteAlgebra {
    assert!(n >= 1);
    let mut mul = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            mul.push((i + j) % n);
        }
    }
    let inv = (0..n).map(|i| (n - i) % n).collect();
    finish(group_raw(format!("z{n}"), mul, inv))
}

/// Dihedral group of the regular `n`-gon (order `2n`): ids `0..n` are the
/// rotations `r^k`, ids `n..2n` are the reflections `s·r^k`.
pub fn dihedral_group(n: usize) -> FiniteAlgebra {
    assert!(n >= 1);
    let size = 2 * n;
    let code = |refl: bool, k: usize| if refl { n + k } else { k };
    let mut mul = vec![0usize; size * size];
    for a in 0..size {
        let (ra, ka) = (a >= n, a % n);
        for b in 0..size {
            let (rb, kb) = (b >= n, b % n);
            // s·r^a·s = r^{-a}, so r^a · s·r^b = s·r^{b-a}, and products
            // of two reflections rotate by the exponent difference.
            let v = match (ra, rb) {
                (false, false) => code(false, (ka + kb) % n),
                (false, true) => code(true, (kb + n - ka) % n),
                (true, false) => code(true, (ka + kb) % n),
                (true, true) => code(false, (kb + n - ka) % n),
            };
            mul[a * size + b] = v;
        }
    }
    let inv = (0..size)
        .map(|a| if a >= n { a } else { (n - a % n) % n })
        .collect();
    finish(group_raw(format!("d{size}"), mul, inv))
}

/// Symmetric group on `n` letters (`n <= 5`). Permutations are numbered
/// in lexicographic order of their image tuples, so the identity is id 0;
/// composition is `(p . q)(i) = p(q(i))`.
pub fn symmetric_group(n: usize) -> Result<FiniteAlgebra, Error> {
    if n == 0 || n > 5 {
        return Err(Error::Refused {
            reason: format!("symmetric group builder supports 1..=5 letters, got {n}"),
        });
    }
    let mut perms: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    let mut chosen = vec![false; n];
    fn gen(n: usize, current: &mut Vec<usize>, chosen: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for v in 0..n {
            if !chosen[v] {
                chosen[v] = true;
                current.push(v);
                gen(n, current, chosen, out);
                current.pop();
                chosen[v] = false;
            }
        }
    }
    current.clear();
    gen(n, &mut current, &mut chosen, &mut perms);
    // Recursive generation in ascending value order is already
    // lexicographic; the identity comes first.
    debug_assert!(perms[0].iter().enumerate().all(|(i, &v)| i == v));
    let index: std::collections::HashMap<Vec<usize>, usize> = perms
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, p)| (p, i))
        .collect();
    let size = perms.len();
    let mut mul = Vec::with_capacity(size * size);
    for p in &perms {
        for q in &perms {
            let comp: Vec<usize> = (0..n).map(|i| p[q[i]]).collect();
            mul.push(index[&comp]);
        }
    }
    let inv = perms
        .iter()
        .map(|p| {
            let mut ip = vec![0usize; n];
            for (i, &v) in p.iter().enumerate() {
                ip[v] = i;
            }
            index[&ip]
        })
        .collect();
    Ok(finish(group_raw(format!("s{n}"), mul, inv)))
}

/// Quaternion group of order 8: ids `0..8` are `1, -1, i, -i, j, -j, k, -k`.
pub fn quaternion_group() -> FiniteAlgebra {
    // Element id = basis * 2 + (1 if negative), basis in 1, i, j, k.
    // Basis products carry a sign: i*j = k, j*i = -k, cyclically, and any
    // squared imaginary unit is -1.
    let basis_mul = |a: usize, b: usize| -> (usize, bool) {
        match (a, b) {
            (0, x) => (x, false),
            (x, 0) => (x, false),
            (1, 1) | (2, 2) | (3, 3) => (0, true),
            (1, 2) => (3, false),
            (2, 3) => (1, false),
            (3, 1) => (2, false),
            (2, 1) => (3, true),
            (3, 2) => (1, true),
            (1, 3) => (2, true),
            _ => unreachable!(),
        }
    };
    let mut mul = vec![0usize; 64];
    for a in 0..8 {
        let (ba, sa) = (a / 2, a % 2 == 1);
        for b in 0..8 {
            let (bb, sb) = (b / 2, b % 2 == 1);
            let (bc, flip) = basis_mul(ba, bb);
            let sc = sa ^ sb ^ flip;
            mul[a * 8 + b] = bc * 2 + usize::from(sc);
        }
    }
    let inv = (0..8)
        .map(|a| {
            let (ba, sa) = (a / 2, a % 2 == 1);
            if ba == 0 {
                a // 1 and -1 are their own inverses
            } else {
                ba * 2 + usize::from(!sa)
            }
        })
        .collect();
    finish(group_raw("q8".into(), mul, inv))
}

/// Direct product of two groups over the canonical group signature;
/// id of `(a, b)` is `a * |B| + b`.
pub fn group_direct_product(name: &str, a: &FiniteAlgebra, b: &FiniteAlgebra) -> FiniteAlgebra {
    assert_eq!(
        a.signature(),
        b.signature(),
        "factors must share the group signature"
    );
    let (na, nb) = (a.size(), b.size());
    let size = na * nb;
    let mut mul = Vec::with_capacity(size * size);
    for p in 0..size {
        let (pa, pb) = (p / nb, p % nb);
        for q in 0..size {
            let (qa, qb) = (q / nb, q % nb);
            let ra = a.op2(0, pa as u32, qa as u32) as usize;
            let rb = b.op2(0, pb as u32, qb as u32) as usize;
            mul.push(ra * nb + rb);
        }
    }
    let inv = (0..size)
        .map(|p| {
            let (pa, pb) = (p / nb, p % nb);
            a.op1(1, pa as u32) as usize * nb + b.op1(1, pb as u32) as usize
        })
        .collect();
    finish(group_raw(name.into(), mul, inv))
}

/// Build a group from a raw multiplication table. The identity must be
/// element 0; associativity and invertibility are verified and the first
/// violation is reported.
pub fn group_from_table(name: &str, table: &[Vec<usize>]) -> Result<FiniteAlgebra, Error> {
    let n = table.len();
    if n == 0 {
        return Err(Error::BadTable {
            reason: "empty multiplication table".into(),
        });
    }
    for (i, row) in table.iter().enumerate() {
        if row.len() != n {
            return Err(Error::BadTable {
                reason: format!("row {i} has {} entries, expected {n}", row.len()),
            });
        }
        for (j, &v) in row.iter().enumerate() {
            if v >= n {
                return Err(Error::BadTable {
                    reason: format!("entry at ({i}, {j}) is {v}, out of range for size {n}"),
                });
            }
        }
    }
    for a in 0..n {
        if table[0][a] != a {
            return Err(Error::BadTable {
                reason: format!(
                    "element 0 is not a left identity: 0 * {a} = {}",
                    table[0][a]
                ),
            });
        }
        if table[a][0] != a {
            return Err(Error::BadTable {
                reason: format!(
                    "element 0 is not a right identity: {a} * 0 = {}",
                    table[a][0]
                ),
            });
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let lhs = table[table[a][b]][c];
                let rhs = table[a][table[b][c]];
                if lhs != rhs {
                    return Err(Error::BadTable {
                        reason: format!(
                            "not associative: ({a} * {b}) * {c} = {lhs} but {a} * ({b} * {c}) = {rhs}"
                        ),
                    });
                }
            }
        }
    }
    let mut inv = vec![usize::MAX; n];
    for a in 0..n {
        match (0..n).find(|&b| table[a][b] == 0 && table[b][a] == 0) {
            Some(b) => inv[a] = b,
            None => {
                return Err(Error::BadTable {
                    reason: format!("element {a} has no two-sided inverse"),
                })
            }
        }
    }
    let mul = table.iter().flatten().copied().collect();
    Ok(finish(group_raw(name.into(), mul, inv)))
}

// ---------------------------------------------------------------------------
// Rings
// ---------------------------------------------------------------------------

/// The ring of integers modulo `n`.
pub fn ring_zn(n: usize) -> FiniteAlgebra {
    assert!(n >= 1);
    let mut add = Vec::with_capacity(n * n);
    let mut mul = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            add.push((i + j) % n);
            mul.push((i * j) % n);
        }
    }
    let neg = (0..n).map(|i| (n - i) % n).collect();
    finish(ring_raw(format!("z{n}ring"), add, neg, mul))
}

/// The additive group modulo `n` with identically-zero multiplication.
pub fn ring_zero_mult(n: usize) -> FiniteAlgebra {
    assert!(n >= 1);
    let mut add = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            add.push((i + j) % n);
        }
    }
    let neg = (0..n).map(|i| (n - i) % n).collect();
    let mul = vec![0; n * n];
    finish(ring_raw(format!("zeromul{n}"), add, neg, mul))
}

/// Truncated polynomial ring: coefficients modulo `p`, degrees below `d`
/// (so `t^d = 0`). Element id is the base-`p` digit string of the
/// coefficients, least degree least significant; `t` itself is id `p`.
pub fn ring_poly_nilpotent(p: usize, d: usize) -> Result<FiniteAlgebra, Error> {
    if p < 2 || d < 1 {
        return Err(Error::Refused {
            reason: format!("polynomial ring needs modulus >= 2 and degree >= 1, got ({p}, {d})"),
        });
    }
    let size = p
        .checked_pow(d as u32)
        .filter(|&s| s <= 512)
        .ok_or(Error::Refused {
            reason: format!("polynomial ring of size {p}^{d} exceeds the builder limit of 512"),
        })?;
    let digits = |mut v: usize| -> Vec<usize> {
        let mut out = vec![0; d];
        for slot in out.iter_mut() {
            *slot = v % p;
            v /= p;
        }
        out
    };
    let undigits = |ds: &[usize]| -> usize { ds.iter().rev().fold(0, |acc, &c| acc * p + c) };
    let mut add = Vec::with_capacity(size * size);
    let mut mul = Vec::with_capacity(size * size);
    for i in 0..size {
        let di = digits(i);
        for j in 0..size {
            let dj = digits(j);
            let sum: Vec<usize> = di.iter().zip(&dj).map(|(&a, &b)| (a + b) % p).collect();
            add.push(undigits(&sum));
            let mut prod = vec![0usize; d];
            for (a, &ca) in di.iter().enumerate() {
                for (b, &cb) in dj.iter().enumerate() {
                    if a + b < d {
                        prod[a + b] = (prod[a + b] + ca * cb) % p;
                    }
                }
            }
            mul.push(undigits(&prod));
        }
    }
    let neg = (0..size)
        .map(|i| {
            let di = digits(i);
            let nd: Vec<usize> = di.iter().map(|&c| (p - c) % p).collect();
            undigits(&nd)
        })
        .collect();
    Ok(finish(ring_raw(format!("f{p}t{d}"), add, neg, mul)))
}

/// Build a commutative ring from raw addition and multiplication tables.
/// Zero must be element 0; all ring axioms are verified and the first
/// violation is reported. Negation is solved from the addition table.
pub fn ring_from_tables(
    name: &str,
    add: &[Vec<usize>],
    mul: &[Vec<usize>],
) -> Result<FiniteAlgebra, Error> {
    let n = add.len();
    if n == 0 || mul.len() != n {
        return Err(Error::BadTable {
            reason: format!(
                "addition table has {n} rows, multiplication has {}",
                mul.len()
            ),
        });
    }
    for (label, table) in [("addition", add), ("multiplication", mul)] {
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::BadTable {
                    reason: format!("{label} row {i} has {} entries, expected {n}", row.len()),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(Error::BadTable {
                        reason: format!(
                            "{label} entry at ({i}, {j}) is {v}, out of range for size {n}"
                        ),
                    });
                }
            }
        }
    }
    // Additive abelian group with identity 0.
    for a in 0..n {
        if add[0][a] != a || add[a][0] != a {
            return Err(Error::BadTable {
                reason: format!("0 is not an additive identity at element {a}"),
            });
        }
        for b in 0..n {
            if add[a][b] != add[b][a] {
                return Err(Error::BadTable {
                    reason: format!("addition is not commutative at ({a}, {b})"),
                });
            }
            for c in 0..n {
                if add[add[a][b]][c] != add[a][add[b][c]] {
                    return Err(Error::BadTable {
                        reason: format!("addition is not associative at ({a}, {b}, {c})"),
                    });
                }
            }
        }
    }
    let mut neg = vec![usize::MAX; n];
    for a in 0..n {
        match (0..n).find(|&b| add[a][b] == 0) {
            Some(b) => neg[a] = b,
            None => {
                return Err(Error::BadTable {
                    reason: format!("element {a} has no additive inverse"),
                })
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            if mul[a][b] != mul[b][a] {
                return Err(Error::BadTable {
                    reason: format!("multiplication is not commutative at ({a}, {b})"),
                });
            }
            for c in 0..n {
                if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                    return Err(Error::BadTable {
                        reason: format!("multiplication is not associative at ({a}, {b}, {c})"),
                    });
                }
                if mul[a][add[b][c]] != add[mul[a][b]][mul[a][c]] {
                    return Err(Error::BadTable {
                        reason: format!(
                            "multiplication does not distribute over addition at ({a}, {b}, {c})"
                        ),
                    });
                }
            }
        }
    }
    let add_flat = add.iter().flatten().copied().collect();
    let mul_flat = mul.iter().flatten().copied().collect();
    Ok(finish(ring_raw(name.into(), add_flat, neg, mul_flat)))
}

// ---------------------------------------------------------------------------
// Loops
// ---------------------------------------------------------------------------

/// Build a loop from a raw multiplication table: the table must be a
/// Latin square with two-sided identity 0. Both division operations are
/// solved from the square.
pub fn loop_from_table(name: &str, table: &[Vec<usize>]) -> Result<FiniteAlgebra, Error> {
    let n = table.len();
    if n == 0 {
        return Err(Error::BadTable {
            reason: "empty multiplication table".into(),
        });
    }
    for (i, row) in table.iter().enumerate() {
        if row.len() != n {
            return Err(Error::BadTable {
                reason: format!("row {i} has {} entries, expected {n}", row.len()),
            });
        }
        for (j, &v) in row.iter().enumerate() {
            if v >= n {
                return Err(Error::BadTable {
                    reason: format!("entry at ({i}, {j}) is {v}, out of range for size {n}"),
                });
            }
        }
    }
    for a in 0..n {
        if table[0][a] != a || table[a][0] != a {
            return Err(Error::BadTable {
                reason: format!("element 0 is not a two-sided identity at element {a}"),
            });
        }
    }
    for i in 0..n {
        let mut row_seen = vec![false; n];
        let mut col_seen = vec![false; n];
        for j in 0..n {
            if row_seen[table[i][j]] {
                return Err(Error::BadTable {
                    reason: format!("row {i} repeats value {}", table[i][j]),
                });
            }
            row_seen[table[i][j]] = true;
            if col_seen[table[j][i]] {
                return Err(Error::BadTable {
                    reason: format!("column {i} repeats value {}", table[j][i]),
                });
            }
            col_seen[table[j][i]] = true;
        }
    }
    // Divisions from the Latin square: ldiv(a, a*b) = b, rdiv(a*b, b) = a.
    let mut ldiv = vec![0usize; n * n];
    let mut rdiv = vec![0usize; n * n];
    for a in 0..n {
        for b in 0..n {
            let c = table[a][b];
            ldiv[a * n + c] = b;
            rdiv[c * n + b] = a;
        }
    }
    let mul = table.iter().flatten().copied().collect();
    Ok(finish(RawAlgebra {
        name: name.into(),
        size: n,
        zero: 0,
        operations: vec![
            RawOp {
                name: "mul".into(),
                arity: 2,
                table: mul,
            },
            RawOp {
                name: "ldiv".into(),
                arity: 2,
                table: ldiv,
            },
            RawOp {
                name: "rdiv".into(),
                arity: 2,
                table: rdiv,
            },
            RawOp {
                name: "e".into(),
                arity: 0,
                table: vec![0],
            },
        ],
        declared_properties: props(&LOOP_PROPS),
    }))
}

/// A five-element loop that is not associative.
pub fn nonassoc_loop_5() -> FiniteAlgebra {
    let rows: [[usize; 5]; 5] = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 3, 4, 0, 1],
        [3, 4, 1, 2, 0],
        [4, 2, 0, 1, 3],
    ];
    let table: Vec<Vec<usize>> = rows.iter().map(|r| r.to_vec()).collect();
    loop_from_table("loop5", &table).expect("fixed loop table is valid")
}

// ---------------------------------------------------------------------------
// Corpora
// ---------------------------------------------------------------------------

/// Every group of order at most 8, one representative per isomorphism
/// class, plus the cyclic groups filling in the small orders.
pub fn group_corpus() -> Vec<FiniteAlgebra> {
    let z2 = cyclic_group(2);
    let z4 = cyclic_group(4);
    let v4 = group_direct_product("v4", &z2, &z2);
    let z2xz4 = group_direct_product("z2xz4", &z2, &z4);
    let z2xz2xz2 = group_direct_product("z2xz2xz2", &z2, &v4);
    vec![
        cyclic_group(1),
        z2,
        cyclic_group(3),
        z4,
        cyclic_group(5),
        cyclic_group(6),
        cyclic_group(7),
        cyclic_group(8),
        v4,
        z2xz4,
        z2xz2xz2,
        symmetric_group(3).expect("3 letters is within the builder range"),
        dihedral_group(4),
        quaternion_group(),
    ]
}

/// A small spread of commutative rings: modular, truncated-polynomial and
/// zero-multiplication.
pub fn ring_corpus() -> Vec<FiniteAlgebra> {
    vec![
        ring_zn(8),
        ring_poly_nilpotent(2, 3).expect("2^3 is within the builder limit"),
        ring_zero_mult(6),
    ]
}
