//! Finite pointed algebras with dense operation tables.
//!
//! An algebra is a universe `0..size-1`, a distinguished zero element named
//! by a nullary operation, and one dense row-major table per operation
//! (outermost index = first argument). Everything is immutable after
//! construction and safe to share across threads.

use std::collections::BTreeSet;
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

use crate::caps::Caps;
use crate::congruence::Congruence;
use crate::error::{Error, ValidationIssue};
use crate::structure::Structure;
use crate::term::{Block, Term};

/// Element id within an algebra's universe.
pub type El = u32;

/// Known `declared_properties` vocabulary for the algebra file format.
pub const KNOWN_PROPERTIES: &[&str] = &[
    "maltsev",
    "semi_abelian",
    "ideal_determined",
    "group",
    "commutative_ring",
    "loop",
];

// ---------------------------------------------------------------------------
// Signature
// ---------------------------------------------------------------------------

/// One operation symbol: a name and an arity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpDecl {
    pub name: String,
    pub arity: usize,
}

impl OpDecl {
    pub fn new(name: &str, arity: usize) -> OpDecl {
        OpDecl {
            name: name.to_string(),
            arity,
        }
    }
}

/// An operation list with exactly one distinguished nullary operation
/// naming the zero (the first nullary in declaration order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    ops: Vec<OpDecl>,
    zero_op: usize,
}

impl Signature {
    /// Build a signature; fails if names repeat or no nullary operation is
    /// present to name the zero.
    pub fn new(ops: Vec<OpDecl>) -> Result<Signature, Vec<ValidationIssue>> {
        let mut issues = Vec::new();
        let mut seen = BTreeSet::new();
        for op in &ops {
            if !seen.insert(op.name.clone()) {
                issues.push(ValidationIssue::DuplicateOperationName {
                    name: op.name.clone(),
                });
            }
        }
        let zero_op = ops.iter().position(|o| o.arity == 0);
        if zero_op.is_none() {
            issues.push(ValidationIssue::MissingZeroConstant);
        }
        if issues.is_empty() {
            Ok(Signature {
                ops,
                zero_op: zero_op.unwrap(),
            })
        } else {
            Err(issues)
        }
    }

    pub fn ops(&self) -> &[OpDecl] {
        &self.ops
    }

    /// Index of the distinguished zero constant.
    pub fn zero_op(&self) -> usize {
        self.zero_op
    }

    pub fn op_index(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|o| o.name == name)
    }
}

// ---------------------------------------------------------------------------
// Raw descriptions and validation
// ---------------------------------------------------------------------------

/// One operation of a raw algebra description: table already flattened
/// row-major (outermost index = first argument). Entries are unchecked
/// `usize` so out-of-range values survive until validation reports them.
#[derive(Clone, Debug)]
pub struct RawOp {
    pub name: String,
    pub arity: usize,
    pub table: Vec<usize>,
}

/// A raw algebra description as found in input files, before validation.
#[derive(Clone, Debug)]
pub struct RawAlgebra {
    pub name: String,
    pub size: usize,
    pub zero: usize,
    pub operations: Vec<RawOp>,
    pub declared_properties: Vec<String>,
}

// ---------------------------------------------------------------------------
// FiniteAlgebra
// ---------------------------------------------------------------------------

/// A validated finite pointed algebra.
///
/// Invariants established by [`FiniteAlgebra::validate`]: every table has
/// exactly `size^arity` in-range entries, and every operation applied to
/// the all-zero tuple yields zero (so `{zero}` is a one-element
/// subalgebra).
#[derive(Clone, Debug)]
pub struct FiniteAlgebra {
    name: String,
    sig: Signature,
    size: usize,
    zero: El,
    tables: Vec<Vec<El>>,
    declared: BTreeSet<String>,
    uid: u64,
    structure_cache: OnceLock<Structure>,
}

impl FiniteAlgebra {
    /// Validate a raw description. On failure the *full* list of violations
    /// is returned, not just the first.
    pub fn validate(raw: RawAlgebra) -> Result<FiniteAlgebra, Vec<ValidationIssue>> {
        let mut issues = Vec::new();
        if raw.size == 0 {
            issues.push(ValidationIssue::EmptyUniverse);
        }
        if raw.size > 0 && raw.zero >= raw.size {
            issues.push(ValidationIssue::ZeroOutOfRange {
                zero: raw.zero,
                size: raw.size,
            });
        }
        for p in &raw.declared_properties {
            if !KNOWN_PROPERTIES.contains(&p.as_str()) {
                issues.push(ValidationIssue::UnknownDeclaredProperty { name: p.clone() });
            }
        }

        let decls: Vec<OpDecl> = raw
            .operations
            .iter()
            .map(|o| OpDecl::new(&o.name, o.arity))
            .collect();
        let sig = match Signature::new(decls) {
            Ok(sig) => Some(sig),
            Err(mut sig_issues) => {
                issues.append(&mut sig_issues);
                None
            }
        };

        let mut tables: Vec<Vec<El>> = Vec::with_capacity(raw.operations.len());
        for op in &raw.operations {
            let expected = raw.size.checked_pow(op.arity as u32).unwrap_or(usize::MAX);
            if op.table.len() != expected {
                issues.push(ValidationIssue::TableShape {
                    op: op.name.clone(),
                    expected,
                    got: op.table.len(),
                });
                tables.push(Vec::new());
                continue;
            }
            let mut table = Vec::with_capacity(op.table.len());
            let mut ok = true;
            for (i, &v) in op.table.iter().enumerate() {
                if v >= raw.size {
                    issues.push(ValidationIssue::EntryOutOfRange {
                        op: op.name.clone(),
                        flat_index: i,
                        value: v,
                        size: raw.size,
                    });
                    ok = false;
                } else {
                    table.push(v as El);
                }
            }
            tables.push(if ok { table } else { Vec::new() });
        }

        // Pointedness: every operation on the all-zero tuple yields zero.
        // For a table of arity r the all-zero tuple sits at flat index
        // zero * (size^{r-1} + ... + 1); nullary tables are the single entry.
        if raw.size > 0 && raw.zero < raw.size {
            for (op, table) in raw.operations.iter().zip(&tables) {
                if table.is_empty() && op.arity != 0 {
                    continue; // already reported above
                }
                let mut idx = 0usize;
                for _ in 0..op.arity {
                    idx = idx * raw.size + raw.zero;
                }
                if let Some(&v) = table.get(idx) {
                    if v as usize != raw.zero {
                        issues.push(ValidationIssue::PointednessViolation {
                            op: op.name.clone(),
                            value: v,
                        });
                    }
                }
            }
        }

        if !issues.is_empty() {
            return Err(issues);
        }
        let sig = sig.expect("no issues implies the signature was built");
        let uid = hash_identity(raw.size, raw.zero, &sig, &tables);
        Ok(FiniteAlgebra {
            name: raw.name,
            sig,
            size: raw.size,
            zero: raw.zero as El,
            tables,
            declared: raw.declared_properties.into_iter().collect(),
            uid,
            structure_cache: OnceLock::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn zero(&self) -> El {
        self.zero
    }

    /// Identity of the *mathematical content* (size, zero, signature,
    /// tables); names and declared properties do not participate. Objects
    /// derived from an algebra record this to detect parent mismatches.
    pub fn uid(&self) -> u64 {
        self.uid
    }

    pub fn elements(&self) -> impl Iterator<Item = El> + Clone {
        0..self.size as El
    }

    pub fn is_declared(&self, property: &str) -> bool {
        self.declared.contains(property)
    }

    pub fn declared_properties(&self) -> impl Iterator<Item = &str> {
        self.declared.iter().map(String::as_str)
    }

    pub fn table(&self, op: usize) -> &[El] {
        &self.tables[op]
    }

    /// Apply operation `op` to `args` (lengths must match the arity).
    #[inline]
    pub fn app(&self, op: usize, args: &[El]) -> El {
        debug_assert_eq!(args.len(), self.sig.ops()[op].arity);
        let mut idx = 0usize;
        for &a in args {
            idx = idx * self.size + a as usize;
        }
        self.tables[op][idx]
    }

    #[inline]
    pub fn op0(&self, op: usize) -> El {
        self.tables[op][0]
    }

    #[inline]
    pub fn op1(&self, op: usize, a: El) -> El {
        self.tables[op][a as usize]
    }

    #[inline]
    pub fn op2(&self, op: usize, a: El, b: El) -> El {
        self.tables[op][a as usize * self.size + b as usize]
    }

    /// Structural classification (verified group / ring / loop shape),
    /// computed on first use and cached.
    pub fn structure(&self) -> &Structure {
        self.structure_cache.get_or_init(|| Structure::detect(self))
    }

    fn check_el(&self, id: usize) -> Result<El, Error> {
        if id < self.size {
            Ok(id as El)
        } else {
            Err(Error::IdOutOfRange {
                id,
                size: self.size,
            })
        }
    }

    /// Check a list of ids, returning them as elements.
    pub fn check_elements(&self, ids: &[usize]) -> Result<Vec<El>, Error> {
        ids.iter().map(|&i| self.check_el(i)).collect()
    }

    // -----------------------------------------------------------------------
    // Powers
    // -----------------------------------------------------------------------

    /// The direct power `A^g` with componentwise operations, together with
    /// the codec between `g`-tuples and ids (lexicographic, first component
    /// most significant). Fails when the universe or any single table would
    /// exceed the cap.
    pub fn power(&self, g: usize, caps: &Caps) -> Result<(FiniteAlgebra, PowerCodec), Error> {
        assert!(g >= 1, "power exponent must be positive");
        let count = self
            .size
            .checked_pow(g as u32)
            .filter(|&c| c <= caps.algebra_cap)
            .ok_or(Error::SizeCap {
                required: self.size.checked_pow(g as u32).unwrap_or(usize::MAX),
                cap: caps.algebra_cap,
            })?;
        let codec = PowerCodec { size: self.size, g };
        let max_arity = self.sig.ops().iter().map(|o| o.arity).max().unwrap_or(0);
        let table_entries = count
            .checked_pow(max_arity as u32)
            .filter(|&c| c <= caps.algebra_cap)
            .ok_or(Error::SizeCap {
                required: count.checked_pow(max_arity as u32).unwrap_or(usize::MAX),
                cap: caps.algebra_cap,
            })?;
        let _ = table_entries;

        let mut tables = Vec::with_capacity(self.sig.ops().len());
        let mut arg_tuples: Vec<Vec<El>> = Vec::new();
        for (op_idx, op) in self.sig.ops().iter().enumerate() {
            let r = op.arity;
            let entries = count.pow(r as u32);
            let mut table = Vec::with_capacity(entries);
            // Iterate flat indices of the power table; decode each argument
            // id into its component tuple and apply componentwise.
            arg_tuples.clear();
            arg_tuples.resize(r, vec![0; g]);
            let mut args_flat = vec![0usize; r];
            for flat in 0..entries {
                let mut rest = flat;
                for j in (0..r).rev() {
                    args_flat[j] = rest % count;
                    rest /= count;
                }
                for j in 0..r {
                    codec.decode_into(args_flat[j] as El, &mut arg_tuples[j]);
                }
                let mut out = 0usize;
                let mut comp_args = vec![0 as El; r];
                for c in 0..g {
                    for j in 0..r {
                        comp_args[j] = arg_tuples[j][c];
                    }
                    out = out * self.size + self.app(op_idx, &comp_args) as usize;
                }
                table.push(out as El);
            }
            debug_assert!(op.arity > 0 || table.len() == 1);
            let _ = op_idx;
            tables.push(table);
        }

        let zero_tuple = vec![self.zero; g];
        let zero = codec.encode(&zero_tuple);
        let alg = FiniteAlgebra {
            name: format!("{}^{}", self.name, g),
            sig: self.sig.clone(),
            size: count,
            zero,
            uid: 0,
            tables,
            declared: self.declared.clone(),
            structure_cache: OnceLock::new(),
        };
        let uid = hash_identity(alg.size, alg.zero as usize, &alg.sig, &alg.tables);
        let alg = FiniteAlgebra { uid, ..alg };
        Ok((alg, codec))
    }

    // -----------------------------------------------------------------------
    // Subuniverses
    // -----------------------------------------------------------------------

    /// Smallest subset containing the generators and the zero element and
    /// closed under all operations (worklist closure).
    pub fn subuniverse_generate(&self, generators: &[usize]) -> Result<Subuniverse, Error> {
        let gens = self.check_elements(generators)?;
        let mut member = vec![false; self.size];
        let mut order: Vec<El> = Vec::new();
        let push = |e: El, member: &mut Vec<bool>, order: &mut Vec<El>| {
            if !member[e as usize] {
                member[e as usize] = true;
                order.push(e);
            }
        };
        push(self.zero, &mut member, &mut order);
        for g in gens {
            push(g, &mut member, &mut order);
        }
        // Nullary operations (all equal zero by pointedness) are covered.
        let mut frontier_start = 0usize;
        while frontier_start < order.len() {
            let frontier_end = order.len();
            for op_idx in 0..self.sig.ops().len() {
                let r = self.sig.ops()[op_idx].arity;
                if r == 0 {
                    continue;
                }
                // All r-tuples over current members with at least one
                // component in the frontier.
                let members_now: Vec<El> = order.clone();
                let mut stack = vec![0usize; r];
                'tuples: loop {
                    let uses_frontier = stack
                        .iter()
                        .any(|&i| i >= frontier_start && i < frontier_end);
                    let in_range = stack.iter().all(|&i| i < frontier_end);
                    if uses_frontier && in_range {
                        let args: Vec<El> = stack.iter().map(|&i| members_now[i]).collect();
                        let v = self.app(op_idx, &args);
                        push(v, &mut member, &mut order);
                    }
                    // advance odometer over 0..frontier_end
                    for j in (0..r).rev() {
                        stack[j] += 1;
                        if stack[j] < frontier_end {
                            continue 'tuples;
                        }
                        stack[j] = 0;
                    }
                    break;
                }
            }
            frontier_start = frontier_end;
        }
        let mut elements = order;
        elements.sort_unstable();
        Ok(Subuniverse {
            parent_uid: self.uid,
            parent_size: self.size,
            elements,
        })
    }

    /// The whole algebra as a subuniverse.
    pub fn subuniverse_full(&self) -> Subuniverse {
        Subuniverse {
            parent_uid: self.uid,
            parent_size: self.size,
            elements: (0..self.size as El).collect(),
        }
    }

    /// The zero subalgebra `{0}`.
    pub fn subuniverse_zero(&self) -> Subuniverse {
        Subuniverse {
            parent_uid: self.uid,
            parent_size: self.size,
            elements: vec![self.zero],
        }
    }

    /// All subuniverses, by closing every subset of the universe. Guarded
    /// to small algebras (the subset sweep is exponential).
    pub fn all_subuniverses(&self) -> Result<Vec<Subuniverse>, Error> {
        if self.size > 16 {
            return Err(Error::Refused {
                reason: format!(
                    "subalgebra enumeration sweeps all 2^{} subsets; refusing beyond size 16",
                    self.size
                ),
            });
        }
        let mut seen: BTreeSet<Vec<El>> = BTreeSet::new();
        let mut out = Vec::new();
        for mask in 0u32..(1u32 << self.size) {
            let gens: Vec<usize> = (0..self.size).filter(|&i| mask >> i & 1 == 1).collect();
            let sub = self.subuniverse_generate(&gens)?;
            if seen.insert(sub.elements.clone()) {
                out.push(sub);
            }
        }
        out.sort_by(|a, b| (a.len(), &a.elements).cmp(&(b.len(), &b.elements)));
        Ok(out)
    }

    // -----------------------------------------------------------------------
    // Quotients
    // -----------------------------------------------------------------------

    /// Quotient by a congruence: the algebra on congruence classes (the
    /// class of zero becomes the new zero, id 0) and the canonical
    /// surjection. The congruence is re-verified, which guarantees the
    /// tables are well defined.
    pub fn quotient(&self, c: &Congruence) -> Result<(FiniteAlgebra, AlgebraMap), Error> {
        if c.parent_uid() != self.uid {
            return Err(Error::ParentMismatch {
                operation: "quotient",
            });
        }
        c.verify(self)
            .map_err(|reason| Error::NotACongruence { reason })?;

        // Relabel classes: zero's class first, the rest by ascending
        // representative.
        let rep = c.rep();
        let zero_rep = rep[self.zero as usize];
        let mut class_reps: Vec<El> = Vec::new();
        class_reps.push(zero_rep);
        for i in 0..self.size {
            let r = rep[i];
            if r == i as El && r != zero_rep {
                class_reps.push(r);
            }
        }
        let mut class_of = vec![0 as El; self.size];
        for (new_id, &r) in class_reps.iter().enumerate() {
            for i in 0..self.size {
                if rep[i] == r {
                    class_of[i] = new_id as El;
                }
            }
        }
        let q_size = class_reps.len();
        let mut tables = Vec::with_capacity(self.sig.ops().len());
        for (op_idx, op) in self.sig.ops().iter().enumerate() {
            let r = op.arity;
            let entries = q_size.pow(r as u32);
            let mut table = Vec::with_capacity(entries);
            let mut args_flat = vec![0usize; r];
            let mut args = vec![0 as El; r];
            for flat in 0..entries {
                let mut rest = flat;
                for j in (0..r).rev() {
                    args_flat[j] = rest % q_size;
                    rest /= q_size;
                }
                for j in 0..r {
                    args[j] = class_reps[args_flat[j]];
                }
                table.push(class_of[self.app(op_idx, &args) as usize]);
            }
            tables.push(table);
        }
        let q_raw = FiniteAlgebra {
            name: format!("{}_mod", self.name),
            sig: self.sig.clone(),
            size: q_size,
            zero: 0,
            uid: 0,
            tables,
            declared: self.declared.clone(),
            structure_cache: OnceLock::new(),
        };
        let uid = hash_identity(q_raw.size, 0, &q_raw.sig, &q_raw.tables);
        let q = FiniteAlgebra { uid, ..q_raw };
        let map = AlgebraMap::verified(self, &q, class_of)?;
        Ok((q, map))
    }

    // -----------------------------------------------------------------------
    // Term evaluation
    // -----------------------------------------------------------------------

    /// Bottom-up term evaluation under an assignment.
    pub fn evaluate(&self, t: &Term, asg: &Assignment) -> Result<El, Error> {
        match t {
            Term::Var(block, idx) => {
                asg.lookup(*block, *idx)
                    .ok_or_else(|| Error::UnboundVariable {
                        var: format!("{}{}", block.letter(), idx),
                    })
            }
            Term::App(op, args) => {
                let op = *op as usize;
                let decl = self.sig.ops().get(op).ok_or_else(|| {
                    Error::Internal(format!(
                        "term references operation index {op} outside the signature"
                    ))
                })?;
                if decl.arity != args.len() {
                    return Err(Error::ArityMismatch {
                        op: decl.name.clone(),
                        expected: decl.arity,
                        got: args.len(),
                    });
                }
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.evaluate(a, asg)?);
                }
                Ok(self.app(op, &vals))
            }
        }
    }
}

fn hash_identity(size: usize, zero: usize, sig: &Signature, tables: &[Vec<El>]) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    size.hash(&mut h);
    zero.hash(&mut h);
    for op in sig.ops() {
        op.name.hash(&mut h);
        op.arity.hash(&mut h);
    }
    for t in tables {
        t.hash(&mut h);
    }
    h.finish()
}

// ---------------------------------------------------------------------------
// PowerCodec
// ---------------------------------------------------------------------------

/// Bijection between `g`-tuples over `0..size-1` and ids `0..size^g-1`,
/// in lexicographic order (first component most significant).
#[derive(Clone, Copy, Debug)]
pub struct PowerCodec {
    size: usize,
    g: usize,
}

impl PowerCodec {
    pub fn new(size: usize, g: usize) -> PowerCodec {
        PowerCodec { size, g }
    }

    pub fn tuple_len(&self) -> usize {
        self.g
    }

    #[inline]
    pub fn encode(&self, tuple: &[El]) -> El {
        debug_assert_eq!(tuple.len(), self.g);
        let mut idx = 0usize;
        for &t in tuple {
            idx = idx * self.size + t as usize;
        }
        idx as El
    }

    pub fn decode(&self, id: El) -> Vec<El> {
        let mut out = vec![0; self.g];
        self.decode_into(id, &mut out);
        out
    }

    #[inline]
    pub fn decode_into(&self, id: El, out: &mut [El]) {
        debug_assert_eq!(out.len(), self.g);
        let mut rest = id as usize;
        for j in (0..self.g).rev() {
            out[j] = (rest % self.size) as El;
            rest /= self.size;
        }
    }
}

// ---------------------------------------------------------------------------
// Subuniverse
// ---------------------------------------------------------------------------

/// A subset of an algebra's universe containing zero and closed under all
/// operations, stored as a sorted id vector.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subuniverse {
    parent_uid: u64,
    parent_size: usize,
    elements: Vec<El>,
}

impl Subuniverse {
    /// Wrap a set that is claimed closed; verifies closure and membership
    /// of zero.
    pub fn from_closed(alg: &FiniteAlgebra, mut elements: Vec<El>) -> Result<Subuniverse, Error> {
        elements.sort_unstable();
        elements.dedup();
        for &e in &elements {
            if (e as usize) >= alg.size() {
                return Err(Error::IdOutOfRange {
                    id: e as usize,
                    size: alg.size(),
                });
            }
        }
        let sub = Subuniverse {
            parent_uid: alg.uid(),
            parent_size: alg.size(),
            elements,
        };
        if !sub.contains(alg.zero()) {
            return Err(Error::Refused {
                reason: "set is not a subuniverse: zero element missing".into(),
            });
        }
        if let Some((op, args, out)) = sub.closure_violation(alg) {
            return Err(Error::Refused {
                reason: format!(
                    "set is not a subuniverse: `{}`{:?} = {} escapes",
                    alg.signature().ops()[op].name,
                    args,
                    out
                ),
            });
        }
        Ok(sub)
    }

    /// Internal constructor for sets known closed by construction.
    pub(crate) fn trusted(alg: &FiniteAlgebra, mut elements: Vec<El>) -> Subuniverse {
        elements.sort_unstable();
        elements.dedup();
        Subuniverse {
            parent_uid: alg.uid(),
            parent_size: alg.size(),
            elements,
        }
    }

    /// First closure violation, if any: `(op, args, result)` with all args
    /// inside the set but the result outside.
    pub fn closure_violation(&self, alg: &FiniteAlgebra) -> Option<(usize, Vec<El>, El)> {
        for (op_idx, op) in alg.signature().ops().iter().enumerate() {
            let r = op.arity;
            let k = self.elements.len();
            if r == 0 {
                let v = alg.op0(op_idx);
                if !self.contains(v) {
                    return Some((op_idx, vec![], v));
                }
                continue;
            }
            if k == 0 {
                continue;
            }
            let mut stack = vec![0usize; r];
            'tuples: loop {
                let args: Vec<El> = stack.iter().map(|&i| self.elements[i]).collect();
                let v = alg.app(op_idx, &args);
                if !self.contains(v) {
                    return Some((op_idx, args, v));
                }
                for j in (0..r).rev() {
                    stack[j] += 1;
                    if stack[j] < k {
                        continue 'tuples;
                    }
                    stack[j] = 0;
                }
                break;
            }
        }
        None
    }

    pub fn parent_uid(&self) -> u64 {
        self.parent_uid
    }

    pub fn elements(&self) -> &[El] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    #[inline]
    pub fn contains(&self, e: El) -> bool {
        self.elements.binary_search(&e).is_ok()
    }

    /// Is this the zero subalgebra `{zero}`?
    pub fn is_zero_only(&self, alg: &FiniteAlgebra) -> bool {
        self.elements.len() == 1 && self.elements[0] == alg.zero()
    }

    /// Is this the whole algebra?
    pub fn is_full(&self) -> bool {
        self.elements.len() == self.parent_size
    }

    /// Membership vector over the full universe.
    pub fn membership(&self) -> Vec<bool> {
        let mut v = vec![false; self.parent_size];
        for &e in &self.elements {
            v[e as usize] = true;
        }
        v
    }
}

// ---------------------------------------------------------------------------
// AlgebraMap
// ---------------------------------------------------------------------------

/// A verified homomorphism between two algebras over the same signature,
/// stored as a dense image array. Always maps zero to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraMap {
    from_uid: u64,
    to_uid: u64,
    map: Vec<El>,
}

impl AlgebraMap {
    /// Build a map after verifying it is a homomorphism sending zero to
    /// zero.
    pub fn verified(
        from: &FiniteAlgebra,
        to: &FiniteAlgebra,
        map: Vec<El>,
    ) -> Result<AlgebraMap, Error> {
        if map.len() != from.size() {
            return Err(Error::Internal(format!(
                "homomorphism array has {} entries for a domain of size {}",
                map.len(),
                from.size()
            )));
        }
        if from.signature() != to.signature() {
            return Err(Error::Refused {
                reason: "homomorphism endpoints have different signatures".into(),
            });
        }
        for &v in &map {
            if v as usize >= to.size() {
                return Err(Error::IdOutOfRange {
                    id: v as usize,
                    size: to.size(),
                });
            }
        }
        if map[from.zero() as usize] != to.zero() {
            return Err(Error::Refused {
                reason: "map does not send zero to zero".into(),
            });
        }
        for (op_idx, op) in from.signature().ops().iter().enumerate() {
            let r = op.arity;
            let entries = from.size().pow(r as u32);
            let mut args_flat = vec![0usize; r];
            let mut args = vec![0 as El; r];
            let mut imgs = vec![0 as El; r];
            for flat in 0..entries {
                let mut rest = flat;
                for j in (0..r).rev() {
                    args_flat[j] = rest % from.size();
                    rest /= from.size();
                }
                for j in 0..r {
                    args[j] = args_flat[j] as El;
                    imgs[j] = map[args_flat[j]];
                }
                let lhs = map[from.app(op_idx, &args) as usize];
                let rhs = to.app(op_idx, &imgs);
                if lhs != rhs {
                    return Err(Error::Refused {
                        reason: format!(
                            "not a homomorphism: `{}` at {:?} maps to {} but images give {}",
                            op.name, args, lhs, rhs
                        ),
                    });
                }
            }
        }
        Ok(AlgebraMap {
            from_uid: from.uid(),
            to_uid: to.uid(),
            map,
        })
    }

    pub fn from_uid(&self) -> u64 {
        self.from_uid
    }

    pub fn to_uid(&self) -> u64 {
        self.to_uid
    }

    #[inline]
    pub fn apply(&self, e: El) -> El {
        self.map[e as usize]
    }

    /// Image of a set, sorted and deduplicated.
    pub fn image(&self, elements: &[El]) -> Vec<El> {
        let mut out: Vec<El> = elements.iter().map(|&e| self.apply(e)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

// ---------------------------------------------------------------------------
// Assignment
// ---------------------------------------------------------------------------

/// Values for the variable blocks of a term. Index `i` of a block holds
/// the value of the variable with 1-based index `i+1`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    pub w: Vec<El>,
    pub x: Vec<El>,
    pub y: Vec<El>,
    pub ambient: Vec<El>,
}

impl Assignment {
    pub fn new(w: Vec<El>, x: Vec<El>, y: Vec<El>) -> Assignment {
        Assignment {
            w,
            x,
            y,
            ambient: Vec::new(),
        }
    }

    pub fn lookup(&self, block: Block, idx: u16) -> Option<El> {
        let slot = match block {
            Block::W => &self.w,
            Block::X => &self.x,
            Block::Y => &self.y,
            Block::Ambient => &self.ambient,
        };
        slot.get(idx as usize - 1).copied()
    }

    /// Sizes of the four blocks, as shift offsets for fresh-variable
    /// composition.
    pub fn sizes(&self) -> crate::term::BlockSizes {
        crate::term::BlockSizes {
            w: self.w.len() as u16,
            x: self.x.len() as u16,
            y: self.y.len() as u16,
            ambient: self.ambient.len() as u16,
        }
    }

    /// Append another assignment's values after this one's (the other
    /// term must have been shifted by `self.sizes()`).
    pub fn extend(&mut self, other: &Assignment) {
        self.w.extend_from_slice(&other.w);
        self.x.extend_from_slice(&other.x);
        self.y.extend_from_slice(&other.y);
        self.ambient.extend_from_slice(&other.ambient);
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic_raw(n: usize) -> RawAlgebra {
        let mut add = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                add.push((i + j) % n);
            }
        }
        let neg = (0..n).map(|i| (n - i) % n).collect();
        RawAlgebra {
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
        }
    }

    pub(crate) fn cyclic(n: usize) -> FiniteAlgebra {
        FiniteAlgebra::validate(cyclic_raw(n)).unwrap()
    }

    #[test]
    fn z4_validates() {
        let a = cyclic(4);
        assert_eq!(a.size(), 4);
        assert_eq!(a.zero(), 0);
        assert_eq!(a.op2(0, 1, 3), 0);
        assert_eq!(a.op1(1, 1), 3);
    }

    #[test]
    fn pointedness_violation_is_reported() {
        let mut raw = cyclic_raw(3);
        raw.operations[0].table[0] = 1; // f(0,0) = 1
        let issues = FiniteAlgebra::validate(raw).unwrap_err();
        assert!(issues
            .iter()
            .any(|i| matches!(i, ValidationIssue::PointednessViolation { value: 1, .. })));
    }

    #[test]
    fn out_of_range_entry_is_reported() {
        let mut raw = cyclic_raw(5);
        raw.operations[0].table[7] = 7; // entry 7 in a 5x5 table
        let issues = FiniteAlgebra::validate(raw).unwrap_err();
        assert!(issues.iter().any(|i| matches!(
            i,
            ValidationIssue::EntryOutOfRange {
                value: 7,
                flat_index: 7,
                size: 5,
                ..
            }
        )));
    }

    #[test]
    fn all_violations_are_collected() {
        let mut raw = cyclic_raw(3);
        raw.zero = 9;
        raw.operations[1].table = vec![0, 1]; // wrong shape
        raw.declared_properties = vec!["shiny".into()];
        let issues = FiniteAlgebra::validate(raw).unwrap_err();
        assert!(issues.len() >= 3, "got {issues:?}");
    }

    #[test]
    fn power_of_z2_is_klein_four() {
        let z2 = cyclic(2);
        let (k4, codec) = z2.power(2, &Caps::default()).unwrap();
        assert_eq!(k4.size(), 4);
        // (1,0) + (0,1) = (1,1)
        let a = codec.encode(&[1, 0]);
        let b = codec.encode(&[0, 1]);
        let c = codec.encode(&[1, 1]);
        assert_eq!(k4.op2(0, a, b), c);
        // every element is self-inverse
        for e in k4.elements() {
            assert_eq!(k4.op2(0, e, e), k4.zero());
        }
    }

    #[test]
    fn power_of_z3_squared_componentwise() {
        let z3 = cyclic(3);
        let (p, codec) = z3.power(2, &Caps::default()).unwrap();
        let a = codec.encode(&[1, 2]);
        let b = codec.encode(&[2, 2]);
        assert_eq!(p.op2(0, a, b), codec.encode(&[0, 1]));
    }

    #[test]
    fn power_codec_is_a_bijection() {
        let z3 = cyclic(3);
        let (_, codec) = z3.power(3, &Caps::default()).unwrap();
        for id in 0..27 {
            assert_eq!(codec.encode(&codec.decode(id)), id);
        }
    }

    #[test]
    fn power_cap_reports_required_size() {
        let z4 = cyclic(4);
        let caps = Caps {
            algebra_cap: 100,
            free_cap: 100,
        };
        match z4.power(5, &caps) {
            Err(Error::SizeCap { required, cap }) => {
                assert_eq!(required, 1024);
                assert_eq!(cap, 100);
            }
            other => panic!("expected SizeCap, got {other:?}"),
        }
    }

    #[test]
    fn subuniverse_generation_in_z6() {
        let z6 = cyclic(6);
        let s = z6.subuniverse_generate(&[2]).unwrap();
        assert_eq!(s.elements(), &[0, 2, 4]);
        let zero_only = z6.subuniverse_generate(&[]).unwrap();
        assert_eq!(zero_only.elements(), &[0]);
        assert!(zero_only.is_zero_only(&z6));
    }

    #[test]
    fn subuniverse_closure_is_verified() {
        let z4 = cyclic(4);
        assert!(Subuniverse::from_closed(&z4, vec![0, 2]).is_ok());
        assert!(Subuniverse::from_closed(&z4, vec![0, 1]).is_err()); // 1+1=2 escapes
        assert!(Subuniverse::from_closed(&z4, vec![2]).is_err()); // zero missing
    }

    #[test]
    fn evaluate_add_on_z4() {
        let z4 = cyclic(4);
        let t = Term::app(0, vec![Term::var(Block::X, 1), Term::var(Block::Y, 1)]);
        let asg = Assignment::new(vec![], vec![1], vec![2]);
        assert_eq!(z4.evaluate(&t, &asg).unwrap(), 3);
        let zero_term = Term::app(2, vec![]);
        assert_eq!(z4.evaluate(&zero_term, &Assignment::default()).unwrap(), 0);
    }

    #[test]
    fn evaluate_reports_unbound_variables_and_arity() {
        let z4 = cyclic(4);
        let t = Term::app(0, vec![Term::var(Block::X, 2), Term::var(Block::Y, 1)]);
        let asg = Assignment::new(vec![], vec![1], vec![2]);
        match z4.evaluate(&t, &asg) {
            Err(Error::UnboundVariable { var }) => assert_eq!(var, "x2"),
            other => panic!("expected unbound variable, got {other:?}"),
        }
        let bad = Term::app(0, vec![Term::var(Block::X, 1)]);
        match z4.evaluate(&bad, &asg) {
            Err(Error::ArityMismatch {
                expected: 2,
                got: 1,
                ..
            }) => {}
            other => panic!("expected arity mismatch, got {other:?}"),
        }
    }

    #[test]
    fn evaluate_is_compositional() {
        // evaluate(f(t1, t2)) = table_f(evaluate(t1), evaluate(t2))
        let z6 = cyclic(6);
        let t1 = Term::app(1, vec![Term::var(Block::X, 1)]);
        let t2 = Term::app(0, vec![Term::var(Block::Y, 1), Term::var(Block::Y, 1)]);
        let combined = Term::app(0, vec![t1.clone(), t2.clone()]);
        for x in 0..6 {
            for y in 0..6 {
                let asg = Assignment::new(vec![], vec![x], vec![y]);
                let lhs = z6.evaluate(&combined, &asg).unwrap();
                let rhs = z6.op2(
                    0,
                    z6.evaluate(&t1, &asg).unwrap(),
                    z6.evaluate(&t2, &asg).unwrap(),
                );
                assert_eq!(lhs, rhs);
            }
        }
    }
}
