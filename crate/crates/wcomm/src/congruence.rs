//! Congruences on finite algebras: generation from pairs, lattice
//! operations, zero-classes and kernel reconstruction.
//!
//! A congruence is stored as a representative array `rep` with `rep[i]`
//! the least element of the class of `i`. The generator is a worklist
//! closure: uniting a pair enqueues its images under every single-argument
//! translation of every operation, which reaches the least compatible
//! equivalence containing the input pairs.

use crate::algebra::{El, FiniteAlgebra, Subuniverse};
use crate::error::Error;

/// An equivalence relation compatible with all operations, in canonical
/// least-representative form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Congruence {
    parent_uid: u64,
    rep: Vec<El>,
}

impl Congruence {
    /// The identity congruence (all classes singletons).
    pub fn identity(alg: &FiniteAlgebra) -> Congruence {
        Congruence {
            parent_uid: alg.uid(),
            rep: (0..alg.size() as El).collect(),
        }
    }

    /// The full congruence (one class).
    pub fn full(alg: &FiniteAlgebra) -> Congruence {
        Congruence {
            parent_uid: alg.uid(),
            rep: vec![0; alg.size()],
        }
    }

    /// Wrap an explicit representative array after full verification.
    pub fn from_rep(alg: &FiniteAlgebra, rep: Vec<El>) -> Result<Congruence, Error> {
        let c = Congruence {
            parent_uid: alg.uid(),
            rep,
        };
        c.verify(alg)
            .map_err(|reason| Error::NotACongruence { reason })?;
        Ok(c)
    }

    pub fn parent_uid(&self) -> u64 {
        self.parent_uid
    }

    /// `rep[i]` = least element of the class of `i`.
    pub fn rep(&self) -> &[El] {
        &self.rep
    }

    #[inline]
    pub fn class_of(&self, e: El) -> El {
        self.rep[e as usize]
    }

    #[inline]
    pub fn same(&self, a: El, b: El) -> bool {
        self.rep[a as usize] == self.rep[b as usize]
    }

    pub fn num_classes(&self) -> usize {
        self.rep
            .iter()
            .enumerate()
            .filter(|&(i, &r)| r == i as El)
            .count()
    }

    pub fn is_identity(&self) -> bool {
        self.rep.iter().enumerate().all(|(i, &r)| r == i as El)
    }

    pub fn is_full(&self) -> bool {
        self.rep.iter().all(|&r| r == 0)
    }

    /// Classes as sorted element lists, ordered by representative.
    pub fn classes(&self) -> Vec<Vec<El>> {
        let mut out: Vec<Vec<El>> = Vec::new();
        let mut index_of_rep = vec![usize::MAX; self.rep.len()];
        for (i, &r) in self.rep.iter().enumerate() {
            if r == i as El {
                index_of_rep[i] = out.len();
                out.push(vec![i as El]);
            } else {
                out[index_of_rep[r as usize]].push(i as El);
            }
        }
        out
    }

    /// All related ordered pairs, diagonal included.
    pub fn related_pairs(&self) -> Vec<(El, El)> {
        let mut out = Vec::new();
        for cls in self.classes() {
            for &a in &cls {
                for &b in &cls {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Is `self` a refinement of `other` (every class contained in one of
    /// `other`'s)?
    pub fn leq(&self, other: &Congruence) -> bool {
        debug_assert_eq!(self.parent_uid, other.parent_uid);
        self.rep
            .iter()
            .enumerate()
            .all(|(i, &r)| other.rep[i as usize] == other.rep[r as usize])
    }

    /// Check the canonical form and operation-compatibility from scratch.
    /// Returns a human-readable reason on failure.
    pub fn verify(&self, alg: &FiniteAlgebra) -> Result<(), String> {
        if self.parent_uid != alg.uid() {
            return Err("congruence belongs to a different algebra".into());
        }
        let n = alg.size();
        if self.rep.len() != n {
            return Err(format!(
                "representative array has {} entries for a universe of size {}",
                self.rep.len(),
                n
            ));
        }
        for (i, &r) in self.rep.iter().enumerate() {
            if (r as usize) >= n {
                return Err(format!("representative {r} of element {i} is out of range"));
            }
            if (r as usize) > i {
                return Err(format!(
                    "element {i} has representative {r} greater than itself"
                ));
            }
            if self.rep[r as usize] != r {
                return Err(format!(
                    "representative {r} of element {i} is not its own representative"
                ));
            }
        }
        // Compatibility in single coordinates: replacing one argument by a
        // related one must keep the result related. (General compatibility
        // follows by chaining one coordinate at a time.)
        for (op_idx, op) in alg.signature().ops().iter().enumerate() {
            let r = op.arity;
            if r == 0 {
                continue;
            }
            let entries = n.pow(r as u32);
            let mut args = vec![0 as El; r];
            for flat in 0..entries {
                let mut rest = flat;
                for j in (0..r).rev() {
                    args[j] = (rest % n) as El;
                    rest /= n;
                }
                let v = alg.app(op_idx, &args);
                for p in 0..r {
                    let orig = args[p];
                    for b in 0..n as El {
                        if b != orig && self.same(orig, b) {
                            args[p] = b;
                            let v2 = alg.app(op_idx, &args);
                            if !self.same(v, v2) {
                                args[p] = orig;
                                return Err(format!(
                                    "`{}` is not compatible: arguments {:?} with position {} \
                                     replaced by {} give unrelated results {} and {}",
                                    op.name, args, p, b, v, v2
                                ));
                            }
                        }
                    }
                    args[p] = orig;
                }
            }
        }
        Ok(())
    }

    /// Class of the zero element, checked to be a subuniverse. A verified
    /// congruence always has a closed zero-class, so a violation here
    /// signals internal corruption rather than bad input.
    pub fn zero_class(&self, alg: &FiniteAlgebra) -> Result<Subuniverse, Error> {
        if self.parent_uid != alg.uid() {
            return Err(Error::ParentMismatch {
                operation: "zero_class",
            });
        }
        let zr = self.rep[alg.zero() as usize];
        let elements: Vec<El> = (0..alg.size() as El)
            .filter(|&e| self.rep[e as usize] == zr)
            .collect();
        let sub = Subuniverse::trusted(alg, elements);
        if let Some((op, args, out)) = sub.closure_violation(alg) {
            return Err(Error::Internal(format!(
                "zero-class of a congruence is not closed: `{}`{:?} = {}",
                alg.signature().ops()[op].name,
                args,
                out
            )));
        }
        Ok(sub)
    }
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut a: u32) -> u32 {
        while self.parent[a as usize] != a {
            let gp = self.parent[self.parent[a as usize] as usize];
            self.parent[a as usize] = gp;
            a = gp;
        }
        a
    }

    /// Union by least id so roots stay canonical; returns true if the two
    /// were previously separate.
    fn union(&mut self, a: u32, b: u32) -> bool {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        true
    }
}

/// Congruence generated by a set of pairs (worklist closure over
/// single-argument translations).
pub fn cg(alg: &FiniteAlgebra, pairs: &[(usize, usize)]) -> Result<Congruence, Error> {
    let n = alg.size();
    let mut uf = UnionFind::new(n);
    let mut work: Vec<(El, El)> = Vec::new();
    for &(a, b) in pairs {
        let ab = alg.check_elements(&[a, b])?;
        work.push((ab[0], ab[1]));
    }

    while let Some((a, b)) = work.pop() {
        if !uf.union(a as u32, b as u32) {
            continue;
        }
        // The pair actually merged two classes: enqueue its images under
        // every translation f(c_1,..,t,..,c_r) in one argument position.
        for (op_idx, op) in alg.signature().ops().iter().enumerate() {
            let r = op.arity;
            if r == 0 {
                continue;
            }
            let consts = n.pow(r as u32 - 1);
            let mut args_a = vec![0 as El; r];
            let mut args_b = vec![0 as El; r];
            for p in 0..r {
                for flat in 0..consts {
                    let mut rest = flat;
                    for j in (0..r).rev() {
                        if j == p {
                            continue;
                        }
                        let c = (rest % n) as El;
                        args_a[j] = c;
                        args_b[j] = c;
                        rest /= n;
                    }
                    args_a[p] = a;
                    args_b[p] = b;
                    let ia = alg.app(op_idx, &args_a);
                    let ib = alg.app(op_idx, &args_b);
                    if uf.find(ia as u32) != uf.find(ib as u32) {
                        work.push((ia, ib));
                    }
                }
            }
        }
    }

    // Normalize to least representatives.
    let mut min_of_root = vec![El::MAX; n];
    for i in 0..n as u32 {
        let r = uf.find(i) as usize;
        if (i as El) < min_of_root[r] {
            min_of_root[r] = i as El;
        }
    }
    let rep: Vec<El> = (0..n as u32)
        .map(|i| min_of_root[uf.find(i) as usize])
        .collect();
    Ok(Congruence {
        parent_uid: alg.uid(),
        rep,
    })
}

// ---------------------------------------------------------------------------
// Lattice operations
// ---------------------------------------------------------------------------

/// Which lattice operation to perform.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lattice {
    Join,
    Meet,
}

/// Join or meet of two congruences on the same algebra. The join is the
/// transitive closure of the union (no operation propagation is needed:
/// that closure is already compatible); the meet is the intersection.
pub fn join_meet(
    alg: &FiniteAlgebra,
    c1: &Congruence,
    c2: &Congruence,
    which: Lattice,
) -> Result<Congruence, Error> {
    if c1.parent_uid() != alg.uid() || c2.parent_uid() != alg.uid() {
        return Err(Error::ParentMismatch {
            operation: "join_meet",
        });
    }
    let n = alg.size();
    let rep = match which {
        Lattice::Join => {
            let mut uf = UnionFind::new(n);
            for i in 0..n as u32 {
                uf.union(i, c1.rep()[i as usize]);
                uf.union(i, c2.rep()[i as usize]);
            }
            let mut min_of_root = vec![El::MAX; n];
            for i in 0..n as u32 {
                let r = uf.find(i) as usize;
                if (i as El) < min_of_root[r] {
                    min_of_root[r] = i as El;
                }
            }
            (0..n as u32)
                .map(|i| min_of_root[uf.find(i) as usize])
                .collect()
        }
        Lattice::Meet => {
            // Classes of the intersection are keyed by representative
            // pairs; canonical form needs the least element per key.
            let mut least: std::collections::BTreeMap<(El, El), El> =
                std::collections::BTreeMap::new();
            for i in 0..n as El {
                let key = (c1.class_of(i), c2.class_of(i));
                least.entry(key).or_insert(i);
            }
            (0..n as El)
                .map(|i| least[&(c1.class_of(i), c2.class_of(i))])
                .collect()
        }
    };
    Ok(Congruence {
        parent_uid: alg.uid(),
        rep,
    })
}

pub fn join(alg: &FiniteAlgebra, c1: &Congruence, c2: &Congruence) -> Result<Congruence, Error> {
    join_meet(alg, c1, c2, Lattice::Join)
}

pub fn meet(alg: &FiniteAlgebra, c1: &Congruence, c2: &Congruence) -> Result<Congruence, Error> {
    join_meet(alg, c1, c2, Lattice::Meet)
}

// ---------------------------------------------------------------------------
// Normal subobjects
// ---------------------------------------------------------------------------

/// Normal closure of a set: the zero-class of the congruence generated by
/// collapsing every element of the set to zero. This is the least kernel
/// (zero-class of a congruence) containing the set.
pub fn normal_closure(alg: &FiniteAlgebra, elements: &[usize]) -> Result<Subuniverse, Error> {
    let els = alg.check_elements(elements)?;
    let pairs: Vec<(usize, usize)> = els
        .iter()
        .map(|&e| (e as usize, alg.zero() as usize))
        .collect();
    let c = cg(alg, &pairs)?;
    c.zero_class(alg)
}

/// Reconstruct the congruence whose zero-class is exactly the given set.
/// If collapsing the set to zero relates extra elements to zero, the set
/// is not a kernel and the offending extra elements are reported.
pub fn congruence_from_normal(
    alg: &FiniteAlgebra,
    elements: &[usize],
) -> Result<Congruence, Error> {
    let els = alg.check_elements(elements)?;
    let mut set: Vec<El> = els.clone();
    set.sort_unstable();
    set.dedup();
    let pairs: Vec<(usize, usize)> = set
        .iter()
        .map(|&e| (e as usize, alg.zero() as usize))
        .collect();
    let c = cg(alg, &pairs)?;
    let zc = c.zero_class(alg)?;
    let extra: Vec<El> = zc
        .elements()
        .iter()
        .copied()
        .filter(|e| set.binary_search(e).is_err())
        .collect();
    if !extra.is_empty() {
        return Err(Error::NotNormal { extra });
    }
    // The zero-class can also be *smaller* than the input only if the set
    // omitted zero itself; collapsing adds it, so check containment.
    debug_assert!(set.iter().all(|e| zc.contains(*e)) || !set.contains(&alg.zero()));
    let missing: Vec<El> = set.iter().copied().filter(|&e| !zc.contains(e)).collect();
    if !missing.is_empty() {
        return Err(Error::Internal(format!(
            "normal reconstruction lost elements {missing:?}"
        )));
    }
    Ok(c)
}

/// Every congruence on the algebra: principal congruences closed under
/// join. Exponential in spirit, so guarded to small universes.
pub fn all_congruences(alg: &FiniteAlgebra) -> Result<Vec<Congruence>, Error> {
    const MAX: usize = 32;
    if alg.size() > MAX {
        return Err(Error::Refused {
            reason: format!(
                "congruence lattice enumeration is limited to size {MAX} (got {})",
                alg.size()
            ),
        });
    }
    let mut set: std::collections::BTreeSet<Vec<El>> = std::collections::BTreeSet::new();
    let mut out: Vec<Congruence> = Vec::new();
    let push = |c: Congruence,
                out: &mut Vec<Congruence>,
                set: &mut std::collections::BTreeSet<Vec<El>>| {
        if set.insert(c.rep().to_vec()) {
            out.push(c);
            true
        } else {
            false
        }
    };
    push(Congruence::identity(alg), &mut out, &mut set);
    for a in 0..alg.size() {
        for b in (a + 1)..alg.size() {
            let c = cg(alg, &[(a, b)])?;
            push(c, &mut out, &mut set);
        }
    }
    // Close under joins.
    let mut frontier = 0;
    while frontier < out.len() {
        let end = out.len();
        for i in frontier..end {
            for j in 0..end {
                let c = join(alg, &out[i], &out[j])?;
                push(c, &mut out, &mut set);
            }
        }
        frontier = end;
    }
    out.sort_by_key(|c| (std::cmp::Reverse(c.num_classes()), c.rep().to_vec()));
    Ok(out)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{FiniteAlgebra, RawAlgebra, RawOp};

    fn cyclic(n: usize) -> FiniteAlgebra {
        let mut add = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                add.push((i + j) % n);
            }
        }
        let neg = (0..n).map(|i| (n - i) % n).collect();
        FiniteAlgebra::validate(RawAlgebra {
            name: format!("z{n}"),
            size: n,
            zero: 0,
            operations: vec![
                RawOp {
                    name: "mul".into(),
                    arity: 2,
                    table: add,
                },
                RawOp {
                    name: "inv".into(),
                    arity: 1,
                    table: neg,
                },
                RawOp {
                    name: "e".into(),
                    arity: 0,
                    table: vec![0],
                },
            ],
            declared_properties: vec![],
        })
        .unwrap()
    }

    /// The symmetric group on three letters; permutations listed in
    /// lexicographic image order, identity first.
    fn sym3() -> FiniteAlgebra {
        let perms: [[usize; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let index = |p: &[usize; 3]| perms.iter().position(|q| q == p).unwrap();
        let mut mul = Vec::new();
        for p in &perms {
            for q in &perms {
                let comp = [p[q[0]], p[q[1]], p[q[2]]];
                mul.push(index(&comp));
            }
        }
        let inv = perms
            .iter()
            .map(|p| {
                let mut ip = [0usize; 3];
                for i in 0..3 {
                    ip[p[i]] = i;
                }
                index(&ip)
            })
            .collect();
        FiniteAlgebra::validate(RawAlgebra {
            name: "s3".into(),
            size: 6,
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
            declared_properties: vec![],
        })
        .unwrap()
    }

    #[test]
    fn principal_congruence_on_z4() {
        let z4 = cyclic(4);
        let c = cg(&z4, &[(0, 2)]).unwrap();
        assert_eq!(c.rep(), &[0, 1, 0, 1]);
        assert_eq!(c.classes(), vec![vec![0, 2], vec![1, 3]]);
        assert!(c.verify(&z4).is_ok());
    }

    #[test]
    fn collapsing_a_transposition_collapses_everything() {
        // Identifying the identity with a transposition forces the full
        // congruence: transpositions generate and conjugation spreads the
        // identification everywhere.
        let s3 = sym3();
        let c = cg(&s3, &[(0, 5)]).unwrap();
        assert!(c.is_full());
    }

    #[test]
    fn collapsing_a_three_cycle_gives_the_sign_congruence() {
        let s3 = sym3();
        // Elements 3 and 4 are the three-cycles.
        let c = cg(&s3, &[(0, 3)]).unwrap();
        assert_eq!(c.num_classes(), 2);
        assert_eq!(c.zero_class(&s3).unwrap().elements(), &[0, 3, 4]);
    }

    #[test]
    fn join_and_meet_on_z12() {
        let z12 = cyclic(12);
        let c4 = cg(&z12, &[(0, 4)]).unwrap();
        let c6 = cg(&z12, &[(0, 6)]).unwrap();
        let j = join(&z12, &c4, &c6).unwrap();
        // gcd(4, 6) = 2: the join identifies things two apart.
        for a in 0..12 {
            for b in 0..12 {
                assert_eq!(j.same(a, b), (a % 2) == (b % 2));
            }
        }
        let m = meet(&z12, &c4, &c6).unwrap();
        assert!(m.is_identity()); // lcm(4, 6) = 12
        assert!(m.leq(&c4) && m.leq(&c6));
        assert!(c4.leq(&j) && c6.leq(&j));
    }

    #[test]
    fn zero_class_of_mod_four_on_z8() {
        let z8 = cyclic(8);
        let c = cg(&z8, &[(0, 4)]).unwrap();
        assert_eq!(c.zero_class(&z8).unwrap().elements(), &[0, 4]);
    }

    #[test]
    fn normal_closure_in_sym3() {
        let s3 = sym3();
        // The three-cycles generate the alternating subgroup as a kernel.
        let n = normal_closure(&s3, &[3]).unwrap();
        assert_eq!(n.elements(), &[0, 3, 4]);
        // A transposition's normal closure is everything.
        let n = normal_closure(&s3, &[5]).unwrap();
        assert_eq!(n.len(), 6);
    }

    #[test]
    fn kernel_reconstruction_accepts_kernels_and_reports_extras() {
        let z8 = cyclic(8);
        let c = congruence_from_normal(&z8, &[0, 4]).unwrap();
        assert_eq!(c.zero_class(&z8).unwrap().elements(), &[0, 4]);
        // {0, 2} is not closed under addition, so collapsing it relates
        // more elements to zero.
        match congruence_from_normal(&z8, &[0, 2]) {
            Err(Error::NotNormal { extra }) => assert_eq!(extra, vec![4, 6]),
            other => panic!("expected NotNormal, got {other:?}"),
        }
    }

    #[test]
    fn verify_rejects_malformed_and_incompatible_partitions() {
        let z4 = cyclic(4);
        // Representative greater than the element.
        assert!(Congruence::from_rep(&z4, vec![1, 1, 2, 3]).is_err());
        // {0,1},{2,3} is an equivalence but not compatible with addition.
        assert!(Congruence::from_rep(&z4, vec![0, 0, 2, 2]).is_err());
        // {0,2},{1,3} is the mod-2 congruence.
        assert!(Congruence::from_rep(&z4, vec![0, 1, 0, 1]).is_ok());
    }

    #[test]
    fn quotient_by_mod_two_collapses_z4_to_z2() {
        let z4 = cyclic(4);
        let c = cg(&z4, &[(0, 2)]).unwrap();
        let (q, map) = z4.quotient(&c).unwrap();
        assert_eq!(q.size(), 2);
        assert_eq!(q.zero(), 0);
        assert_eq!(map.apply(0), 0);
        assert_eq!(map.apply(2), 0);
        assert_eq!(map.apply(1), map.apply(3));
        assert_eq!(q.op2(0, 1, 1), 0);
        // The kernel of the surjection is the congruence we started from.
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(map.apply(a) == map.apply(b), c.same(a, b));
            }
        }
    }

    #[test]
    fn congruence_lattice_of_z12_has_six_members() {
        // Divisors of 12 index the congruences: 1, 2, 3, 4, 6, 12.
        let z12 = cyclic(12);
        let all = all_congruences(&z12).unwrap();
        assert_eq!(all.len(), 6);
        assert!(all.iter().any(|c| c.is_identity()));
        assert!(all.iter().any(|c| c.is_full()));
    }

    #[test]
    fn congruence_lattice_of_sym3() {
        // Identity, the sign congruence, and the full congruence.
        let s3 = sym3();
        let all = all_congruences(&s3).unwrap();
        assert_eq!(all.len(), 3);
    }
}
