//! Free algebras of the variety generated by a finite algebra, realized
//! inside finite powers; identity checking, commutator-term enumeration,
//! and searches for a Mal'tsev term and a protomodularity certificate.
//!
//! The free algebra on `g` generators is computed as the closure of the
//! `g` projection vectors inside `A^(A^g)`: each element is a function
//! from all `n^g` assignments to `A`, stored densely in power-codec
//! order. Closure runs in rounds; each round applies every operation to
//! argument tuples touching the newest elements, then commits the new
//! vectors in a canonical order — by witness term size, then operation
//! index, then child discovery order — so every element carries a
//! deterministic witness term no matter how the round was parallelized.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::algebra::{Assignment, El, FiniteAlgebra, PowerCodec};
use crate::caps::Caps;
use crate::error::Error;
use crate::term::{Block, BlockSizes, Term};

/// An element of a free algebra: its value vector over all assignments,
/// and a canonical term that evaluates to that vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeElement {
    pub vector: Vec<El>,
    pub term: Term,
}

/// The free algebra of `V(A)` on `g` generators.
#[derive(Clone, Debug)]
pub struct FreeAlgebra {
    pub elements: Vec<FreeElement>,
    pub generators: usize,
    pub codec: PowerCodec,
}

impl FreeAlgebra {
    /// Index of the element with the given value vector, if present.
    pub fn find_vector(&self, v: &[El]) -> Option<usize> {
        self.elements.iter().position(|e| e.vector == v)
    }
}

// ---------------------------------------------------------------------------
// Assignments over coordinate grids
// ---------------------------------------------------------------------------

/// Decode a flat coordinate id into an assignment over the given blocks.
/// Digits are most-significant-first in block order w, x, y, ambient —
/// the same convention as [`PowerCodec`] over the concatenated tuple.
pub(crate) fn decode_assignment(n: usize, blocks: &BlockSizes, flat: usize) -> Assignment {
    let total = (blocks.w + blocks.x + blocks.y + blocks.ambient) as usize;
    let mut digits = vec![0 as El; total];
    let mut rest = flat;
    for d in digits.iter_mut().rev() {
        *d = (rest % n) as El;
        rest /= n;
    }
    let w = digits[..blocks.w as usize].to_vec();
    let x = digits[blocks.w as usize..(blocks.w + blocks.x) as usize].to_vec();
    let y =
        digits[(blocks.w + blocks.x) as usize..(blocks.w + blocks.x + blocks.y) as usize].to_vec();
    let ambient = digits[(blocks.w + blocks.x + blocks.y) as usize..].to_vec();
    Assignment { w, x, y, ambient }
}

/// Evaluate a term at every assignment of its blocks into `A`, returning
/// the dense value vector (power-codec order over the concatenated
/// variable tuple).
pub fn term_vector(alg: &FiniteAlgebra, t: &Term, blocks: &BlockSizes) -> Result<Vec<El>, Error> {
    let n = alg.size();
    let total = (blocks.w + blocks.x + blocks.y + blocks.ambient) as u32;
    let coords = n.checked_pow(total).ok_or(Error::Refused {
        reason: format!("value vector over {total} variables does not fit in memory"),
    })?;
    let mut out = Vec::with_capacity(coords);
    for flat in 0..coords {
        let asg = decode_assignment(n, blocks, flat);
        out.push(alg.evaluate(t, &asg)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Vector closure
// ---------------------------------------------------------------------------

pub(crate) enum RoundOutcome {
    /// New elements were committed this round.
    Progress,
    /// Fixpoint: applying every operation stays inside the set.
    Done,
    /// The element cap was reached before the fixpoint.
    Capped,
}

/// Closure of a set of vectors under componentwise operations, with
/// canonical witness terms. Coordinate semantics belong to the caller;
/// this structure only needs every vector to have the same length.
pub(crate) struct VectorClosure<'a> {
    alg: &'a FiniteAlgebra,
    cap: usize,
    pub(crate) elements: Vec<FreeElement>,
    sizes: Vec<usize>,
    index: HashMap<Vec<El>, usize>,
    round_start: usize,
}

struct Candidate {
    size: usize,
    op: u16,
    children: Vec<u32>,
    vector: Vec<El>,
}

impl<'a> VectorClosure<'a> {
    /// Seed with generator vectors (committed first, in order), followed
    /// by the vectors of all nullary operations. Duplicates keep their
    /// first witness.
    pub(crate) fn new(
        alg: &'a FiniteAlgebra,
        coords: usize,
        generators: Vec<(Term, Vec<El>)>,
        cap: usize,
    ) -> VectorClosure<'a> {
        let mut c = VectorClosure {
            alg,
            cap: cap.max(1),
            elements: Vec::new(),
            sizes: Vec::new(),
            index: HashMap::new(),
            round_start: 0,
        };
        for (term, vector) in generators {
            debug_assert_eq!(vector.len(), coords);
            c.commit(term, vector);
        }
        for (op_idx, op) in alg.signature().ops().iter().enumerate() {
            if op.arity == 0 {
                let v = alg.op0(op_idx);
                c.commit(Term::app(op_idx, vec![]), vec![v; coords]);
            }
        }
        c
    }

    fn commit(&mut self, term: Term, vector: Vec<El>) -> bool {
        if self.index.contains_key(&vector) {
            return false;
        }
        self.index.insert(vector.clone(), self.elements.len());
        self.sizes.push(term.size());
        self.elements.push(FreeElement { vector, term });
        true
    }

    pub(crate) fn len(&self) -> usize {
        self.elements.len()
    }

    /// One closure round: apply every operation to all argument tuples
    /// that involve at least one element from the newest batch, then
    /// commit the novel vectors in canonical order. A round whose sweep
    /// would exceed the tuple budget is reported as capped rather than
    /// attempted.
    pub(crate) fn round(&mut self) -> RoundOutcome {
        // Table lookups per operation per round (tuples times vector
        // width); beyond this a sweep is declared infeasible instead of
        // running for hours.
        const WORK_BUDGET: usize = 1 << 26;
        let start = self.round_start;
        let end = self.elements.len();
        let width = self
            .elements
            .first()
            .map(|e| e.vector.len())
            .unwrap_or(1)
            .max(1);
        for op in self.alg.signature().ops() {
            if op.arity > 0 {
                match end
                    .checked_pow(op.arity as u32)
                    .and_then(|t| t.checked_mul(width))
                {
                    Some(total) if total <= WORK_BUDGET => {}
                    _ => return RoundOutcome::Capped,
                }
            }
        }
        let mut candidates = Vec::new();
        for (op_idx, op) in self.alg.signature().ops().iter().enumerate() {
            let r = op.arity;
            if r == 0 {
                continue;
            }
            let total = end.pow(r as u32);
            let gen = |flat: usize| -> Option<Candidate> {
                let mut children = vec![0u32; r];
                let mut rest = flat;
                let mut any_new = false;
                for j in (0..r).rev() {
                    let idx = rest % end;
                    rest /= end;
                    children[j] = idx as u32;
                    any_new |= idx >= start;
                }
                if !any_new {
                    return None;
                }
                let coords = self.elements[children[0] as usize].vector.len();
                let mut vector = Vec::with_capacity(coords);
                let mut args = vec![0 as El; r];
                for c in 0..coords {
                    for (j, &ch) in children.iter().enumerate() {
                        args[j] = self.elements[ch as usize].vector[c];
                    }
                    vector.push(self.alg.app(op_idx, &args));
                }
                if self.index.contains_key(&vector) {
                    return None;
                }
                let size = 1 + children
                    .iter()
                    .map(|&ch| self.sizes[ch as usize])
                    .sum::<usize>();
                Some(Candidate {
                    size,
                    op: op_idx as u16,
                    children,
                    vector,
                })
            };
            #[cfg(feature = "parallel")]
            let mut batch: Vec<Candidate> = if crate::exec::parallel() && total > 4096 {
                (0..total).into_par_iter().filter_map(gen).collect()
            } else {
                (0..total).filter_map(gen).collect()
            };
            #[cfg(not(feature = "parallel"))]
            let mut batch: Vec<Candidate> = (0..total).filter_map(gen).collect();
            candidates.append(&mut batch);
        }

        // Canonical commit order: term size, then operation, then child
        // discovery order. Re-sorting here makes the outcome independent
        // of how the batch above was produced.
        candidates.sort_by(|a, b| (a.size, a.op, &a.children).cmp(&(b.size, b.op, &b.children)));
        let mut committed = 0usize;
        for c in candidates {
            if self.index.contains_key(&c.vector) {
                continue;
            }
            if self.elements.len() >= self.cap {
                return RoundOutcome::Capped;
            }
            let term = Term::App(
                c.op,
                c.children
                    .iter()
                    .map(|&ch| self.elements[ch as usize].term.clone())
                    .collect(),
            );
            self.commit(term, c.vector);
            committed += 1;
        }
        self.round_start = end;
        if committed == 0 {
            RoundOutcome::Done
        } else {
            RoundOutcome::Progress
        }
    }

    /// Run rounds to the fixpoint. `Ok(true)` = complete, `Ok(false)` =
    /// capped.
    pub(crate) fn run(&mut self) -> bool {
        loop {
            match self.round() {
                RoundOutcome::Progress => {}
                RoundOutcome::Done => return true,
                RoundOutcome::Capped => return false,
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Free algebra
// ---------------------------------------------------------------------------

/// Compute the free algebra of `V(A)` on `g` generators `x1..xg` as the
/// closure of the projection vectors in `A^(A^g)`.
pub fn free_algebra(alg: &FiniteAlgebra, g: usize, caps: &Caps) -> Result<FreeAlgebra, Error> {
    let blocks = BlockSizes {
        x: g as u16,
        ..BlockSizes::default()
    };
    let closure = free_closure(alg, g, &blocks, caps)?;
    Ok(FreeAlgebra {
        elements: closure.elements,
        generators: g,
        codec: PowerCodec::new(alg.size(), g),
    })
}

/// Shared closure driver: generators are the projections of the full
/// assignment grid over `blocks`, named by consecutive variables. The
/// block layout fixes which variable names the projections get.
fn free_closure<'a>(
    alg: &'a FiniteAlgebra,
    g: usize,
    blocks: &BlockSizes,
    caps: &Caps,
) -> Result<VectorClosure<'a>, Error> {
    let n = alg.size();
    let coords = n
        .checked_pow(g as u32)
        .filter(|&c| c <= caps.algebra_cap)
        .ok_or(Error::SizeCap {
            required: n.checked_pow(g as u32).unwrap_or(usize::MAX),
            cap: caps.algebra_cap,
        })?;
    let mut generators = Vec::with_capacity(g);
    let mut var_list: Vec<(Block, u16)> = Vec::with_capacity(g);
    for b in [Block::W, Block::X, Block::Y, Block::Ambient] {
        for i in 1..=blocks.get(b) {
            var_list.push((b, i));
        }
    }
    debug_assert_eq!(var_list.len(), g);
    for (j, &(b, i)) in var_list.iter().enumerate() {
        let mut vector = Vec::with_capacity(coords);
        let mut digits = vec![0 as El; g];
        let codec = PowerCodec::new(n, g);
        for flat in 0..coords {
            codec.decode_into(flat as El, &mut digits);
            vector.push(digits[j]);
        }
        generators.push((Term::var(b, i), vector));
    }
    let cap = caps.effective_free_cap(coords);
    let mut closure = VectorClosure::new(alg, coords, generators, cap);
    if closure.run() {
        Ok(closure)
    } else {
        Err(Error::FreeCap {
            generators: g,
            reached: closure.len(),
            cap,
        })
    }
}

// ---------------------------------------------------------------------------
// Identity checking
// ---------------------------------------------------------------------------

/// Result of checking an identity over all assignments into `A`.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub holds: bool,
    /// First assignment (in grid order) where the two sides differ.
    pub counterexample: Option<Assignment>,
}

/// Does `s = t` hold under every assignment of their variables into `A`?
/// This decides validity of the identity in the variety generated by `A`.
pub fn identity_holds(alg: &FiniteAlgebra, s: &Term, t: &Term) -> Result<IdentityCheck, Error> {
    let mut blocks = s.var_span();
    let other = t.var_span();
    blocks.w = blocks.w.max(other.w);
    blocks.x = blocks.x.max(other.x);
    blocks.y = blocks.y.max(other.y);
    blocks.ambient = blocks.ambient.max(other.ambient);
    let n = alg.size();
    let total = (blocks.w + blocks.x + blocks.y + blocks.ambient) as u32;
    let coords = n.checked_pow(total).ok_or(Error::Refused {
        reason: format!("identity check over {total} variables does not fit in memory"),
    })?;
    // Evaluate once up front to surface arity errors even on empty grids.
    let probe = decode_assignment(n, &blocks, 0);
    alg.evaluate(s, &probe)?;
    alg.evaluate(t, &probe)?;

    let check = |flat: usize| -> Option<usize> {
        let asg = decode_assignment(n, &blocks, flat);
        let vs = alg.evaluate(s, &asg).ok()?;
        let vt = alg.evaluate(t, &asg).ok()?;
        if vs != vt {
            Some(flat)
        } else {
            None
        }
    };
    #[cfg(feature = "parallel")]
    let first = if crate::exec::parallel() && coords > 4096 {
        (0..coords)
            .into_par_iter()
            .find_first(|&f| check(f).is_some())
    } else {
        (0..coords).find(|&f| check(f).is_some())
    };
    #[cfg(not(feature = "parallel"))]
    let first = (0..coords).find(|&f| check(f).is_some());

    match first {
        Some(flat) => Ok(IdentityCheck {
            holds: false,
            counterexample: Some(decode_assignment(n, &blocks, flat)),
        }),
        None => Ok(IdentityCheck {
            holds: true,
            counterexample: None,
        }),
    }
}

// ---------------------------------------------------------------------------
// Commutator terms
// ---------------------------------------------------------------------------

/// Whether weight values are later restricted to the subalgebra `W` or
/// range over the whole algebra. Recorded metadata: the enumeration here
/// is identical either way, and the restriction happens at evaluation
/// time in the commutator module.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WMode {
    Restricted,
    Free,
}

/// The commutator terms of the free algebra on `w1..wk, x1..xm, y1..yn`.
#[derive(Clone, Debug)]
pub struct CommutatorTerms {
    /// Qualifying elements: zero whenever all x-variables are zero, and
    /// zero whenever all y-variables are zero.
    pub elements: Vec<FreeElement>,
    /// Size of the ambient free algebra the filter ran over.
    pub free_size: usize,
    pub w_mode: WMode,
    /// Codec over the concatenated (w, x, y) assignment tuple.
    pub codec: PowerCodec,
    pub blocks: BlockSizes,
}

/// Enumerate the elements of the free algebra on `k + m + n` generators
/// that vanish whenever all x-generators are zero and whenever all
/// y-generators are zero. Membership is decided on vectors, so the
/// filter is exact for the variety generated by `A`.
pub fn commutator_terms(
    alg: &FiniteAlgebra,
    k: usize,
    m: usize,
    n: usize,
    w_mode: WMode,
    caps: &Caps,
) -> Result<CommutatorTerms, Error> {
    let g = k + m + n;
    let blocks = BlockSizes {
        w: k as u16,
        x: m as u16,
        y: n as u16,
        ambient: 0,
    };
    let closure = free_closure(alg, g, &blocks, caps)?;
    let size = alg.size();
    let coords = size.pow(g as u32);
    let codec = PowerCodec::new(size, g);
    let zero = alg.zero();

    // Coordinate ids where the x-block (resp. y-block) is entirely zero.
    let mut x_kill = Vec::new();
    let mut y_kill = Vec::new();
    let mut digits = vec![0 as El; g];
    for flat in 0..coords {
        codec.decode_into(flat as El, &mut digits);
        if digits[k..k + m].iter().all(|&d| d == zero) {
            x_kill.push(flat);
        }
        if digits[k + m..].iter().all(|&d| d == zero) {
            y_kill.push(flat);
        }
    }

    let free_size = closure.len();
    let elements: Vec<FreeElement> = closure
        .elements
        .into_iter()
        .filter(|e| {
            x_kill.iter().all(|&c| e.vector[c] == zero)
                && y_kill.iter().all(|&c| e.vector[c] == zero)
        })
        .collect();
    Ok(CommutatorTerms {
        elements,
        free_size,
        w_mode,
        codec,
        blocks,
    })
}

// ---------------------------------------------------------------------------
// Mal'tsev term search
// ---------------------------------------------------------------------------

/// Outcome of the Mal'tsev term search over `V(A)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MaltsevOutcome {
    /// A term `p` with `p(x,y,y) = x` and `p(y,y,x) = x` in `V(A)`.
    Found(Term),
    /// The free algebra on three generators is complete and contains no
    /// such element: a proof of non-existence for `V(A)`.
    Absent,
    /// The search hit the element cap before completing; existence is
    /// undecided.
    Unknown { reached: usize, cap: usize },
}

fn maltsev_identities_hold(alg: &FiniteAlgebra, p: &Term) -> bool {
    let els: Vec<El> = alg.elements().collect();
    for &a in &els {
        for &b in &els {
            let first = Assignment::new(vec![], vec![a, b, b], vec![]);
            let second = Assignment::new(vec![], vec![b, b, a], vec![]);
            match (alg.evaluate(p, &first), alg.evaluate(p, &second)) {
                (Ok(v1), Ok(v2)) if v1 == a && v2 == a => {}
                _ => return false,
            }
        }
    }
    true
}

/// Candidate Mal'tsev terms from verified structure: group subtraction
/// `x * y^{-1} * z`, ring subtraction `x - y + z`, and the loop term
/// `(x / (y \ y)) * (y \ z)`.
fn maltsev_schema(alg: &FiniteAlgebra) -> Option<Term> {
    let s = alg.structure();
    let (x, y, z) = (
        Term::var(Block::X, 1),
        Term::var(Block::X, 2),
        Term::var(Block::X, 3),
    );
    if let Some(g) = s.group {
        return Some(Term::app(
            g.mul,
            vec![x, Term::app(g.mul, vec![Term::app(g.inv, vec![y]), z])],
        ));
    }
    if let Some(r) = s.ring {
        return Some(Term::app(
            r.add,
            vec![x, Term::app(r.add, vec![Term::app(r.neg, vec![y]), z])],
        ));
    }
    if let Some(l) = s.loop_ops {
        let y_over_y = Term::app(l.ldiv, vec![y.clone(), y.clone()]);
        return Some(Term::app(
            l.mul,
            vec![
                Term::app(l.rdiv, vec![x, y_over_y]),
                Term::app(l.ldiv, vec![y, z]),
            ],
        ));
    }
    None
}

/// Search `V(A)` for a Mal'tsev term. Verified structural schemas are
/// tried first; otherwise the free algebra on three generators is closed
/// round by round, scanning each batch for the Mal'tsev vector
/// conditions. Definitive outcomes are memoized per algebra.
pub fn maltsev_term(alg: &FiniteAlgebra, caps: &Caps) -> MaltsevOutcome {
    static MEMO: OnceLock<Mutex<HashMap<u64, MaltsevOutcome>>> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = memo.lock().unwrap().get(&alg.uid()) {
        return hit.clone();
    }
    let outcome = maltsev_term_uncached(alg, caps);
    if !matches!(outcome, MaltsevOutcome::Unknown { .. }) {
        memo.lock().unwrap().insert(alg.uid(), outcome.clone());
    }
    outcome
}

fn maltsev_term_uncached(alg: &FiniteAlgebra, caps: &Caps) -> MaltsevOutcome {
    if let Some(p) = maltsev_schema(alg) {
        if maltsev_identities_hold(alg, &p) {
            return MaltsevOutcome::Found(p);
        }
    }
    let n = alg.size();
    let coords = match n.checked_pow(3).filter(|&c| c <= caps.algebra_cap) {
        Some(c) => c,
        None => {
            return MaltsevOutcome::Unknown {
                reached: 0,
                cap: caps.algebra_cap,
            }
        }
    };
    let codec = PowerCodec::new(n, 3);
    let satisfies = |v: &[El]| -> bool {
        for a in 0..n as El {
            for b in 0..n as El {
                if v[codec.encode(&[a, b, b]) as usize] != a
                    || v[codec.encode(&[b, b, a]) as usize] != a
                {
                    return false;
                }
            }
        }
        true
    };
    let mut generators = Vec::new();
    for j in 0..3u16 {
        let mut vector = Vec::with_capacity(coords);
        let mut digits = [0 as El; 3];
        for flat in 0..coords {
            codec.decode_into(flat as El, &mut digits);
            vector.push(digits[j as usize]);
        }
        generators.push((Term::var(Block::X, j + 1), vector));
    }
    let cap = caps.effective_free_cap(coords);
    let mut closure = VectorClosure::new(alg, coords, generators, cap);
    let mut scanned = 0usize;
    loop {
        for i in scanned..closure.len() {
            if satisfies(&closure.elements[i].vector) {
                return MaltsevOutcome::Found(closure.elements[i].term.clone());
            }
        }
        scanned = closure.len();
        match closure.round() {
            RoundOutcome::Progress => {}
            RoundOutcome::Done => return MaltsevOutcome::Absent,
            RoundOutcome::Capped => {
                // Elements committed before the cap hit still count.
                for i in scanned..closure.len() {
                    if satisfies(&closure.elements[i].vector) {
                        return MaltsevOutcome::Found(closure.elements[i].term.clone());
                    }
                }
                return MaltsevOutcome::Unknown {
                    reached: closure.len(),
                    cap,
                };
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Protomodularity certificate
// ---------------------------------------------------------------------------

/// Outcome of the bounded protomodularity-certificate search.
#[derive(Clone, Debug)]
pub enum ProtoOutcome {
    /// Binary terms with `alpha_i(x, x) = 0` and a term `theta` with
    /// `theta(alpha_1(x,y), .., alpha_j(x,y), y) = x` in `V(A)`.
    Certified { alphas: Vec<Term>, theta: Term },
    /// Nothing found within the search bound. Never a claim of absence:
    /// the bound is a cutoff, not a decision procedure.
    Inconclusive { n_max: usize, reason: String },
}

/// Verify a candidate certificate directly: each `alpha_i(x, x) = 0` and
/// the composite `theta(alpha(x,y).., y) = x` as identities of `V(A)`.
/// `alpha` terms use variables `x1`/`y1`; `theta` uses `a1..aj` and `y1`.
pub fn certificate_is_valid(alg: &FiniteAlgebra, alphas: &[Term], theta: &Term) -> bool {
    if alphas.is_empty() || (theta.var_span().ambient as usize) > alphas.len() {
        return false;
    }
    let zero = Term::app(alg.signature().zero_op(), vec![]);
    let x = Term::var(Block::X, 1);
    for alpha in alphas {
        let diag = alpha.substitute(&|b, i| match b {
            Block::Y if i == 1 => Term::var(Block::X, 1),
            _ => Term::var(b, i),
        });
        match identity_holds(alg, &diag, &zero) {
            Ok(check) if check.holds => {}
            _ => return false,
        }
    }
    let composite = theta.substitute(&|b, i| match b {
        Block::Ambient => alphas[(i - 1) as usize].clone(),
        _ => Term::var(b, i),
    });
    matches!(identity_holds(alg, &composite, &x), Ok(check) if check.holds)
}

fn proto_schema(alg: &FiniteAlgebra) -> Option<(Vec<Term>, Term)> {
    let s = alg.structure();
    let (x, y, a) = (
        Term::var(Block::X, 1),
        Term::var(Block::Y, 1),
        Term::var(Block::Ambient, 1),
    );
    if let Some(g) = s.group {
        let alpha = Term::app(g.mul, vec![x, Term::app(g.inv, vec![y.clone()])]);
        let theta = Term::app(g.mul, vec![a, y]);
        return Some((vec![alpha], theta));
    }
    if let Some(r) = s.ring {
        let alpha = Term::app(r.add, vec![x, Term::app(r.neg, vec![y.clone()])]);
        let theta = Term::app(r.add, vec![a, y]);
        return Some((vec![alpha], theta));
    }
    if let Some(l) = s.loop_ops {
        let alpha = Term::app(l.rdiv, vec![x, y.clone()]);
        let theta = Term::app(l.mul, vec![a, y]);
        return Some((vec![alpha], theta));
    }
    None
}

/// Bounded search for a protomodularity certificate with at most `n_max`
/// alpha terms. Structural schemas are tried first; the generic search
/// enumerates diagonal-vanishing elements of the free algebra on (x, y)
/// and tests whether the x-projection is generated from them together
/// with the y-projection.
pub fn protomodularity_certificate(alg: &FiniteAlgebra, n_max: usize, caps: &Caps) -> ProtoOutcome {
    if n_max == 0 {
        return ProtoOutcome::Inconclusive {
            n_max,
            reason: "search bound is zero".into(),
        };
    }
    if let Some((alphas, theta)) = proto_schema(alg) {
        if certificate_is_valid(alg, &alphas, &theta) {
            return ProtoOutcome::Certified { alphas, theta };
        }
    }

    // Generic search. Free algebra on (x, y): candidates are elements
    // vanishing on the diagonal.
    let n = alg.size();
    let blocks = BlockSizes {
        x: 1,
        y: 1,
        ..BlockSizes::default()
    };
    let closure = match free_closure(alg, 2, &blocks, caps) {
        Ok(c) => c,
        Err(e) => {
            return ProtoOutcome::Inconclusive {
                n_max,
                reason: format!("free algebra on two generators not available: {e}"),
            }
        }
    };
    let codec = PowerCodec::new(n, 2);
    let zero = alg.zero();
    let diag_zero = |v: &[El]| (0..n as El).all(|a| v[codec.encode(&[a, a]) as usize] == zero);
    let candidates: Vec<&FreeElement> = closure
        .elements
        .iter()
        .filter(|e| diag_zero(&e.vector))
        .collect();
    const CANDIDATE_LIMIT: usize = 512;
    if candidates.is_empty() {
        return ProtoOutcome::Inconclusive {
            n_max,
            reason: "no term vanishes on the diagonal".into(),
        };
    }
    if candidates.len() > CANDIDATE_LIMIT {
        return ProtoOutcome::Inconclusive {
            n_max,
            reason: format!(
                "{} diagonal-vanishing candidates exceed the search budget of {CANDIDATE_LIMIT}",
                candidates.len()
            ),
        };
    }
    let coords = n * n;
    let mut vx = Vec::with_capacity(coords);
    let mut vy = Vec::with_capacity(coords);
    let mut digits = [0 as El; 2];
    for flat in 0..coords {
        codec.decode_into(flat as El, &mut digits);
        vx.push(digits[0]);
        vy.push(digits[1]);
    }
    let cap = caps.effective_free_cap(coords);

    // Try j alphas at a time; every subset of candidates of size j, in
    // lexicographic order, up to a budget of generated closures.
    const CLOSURE_BUDGET: usize = 4096;
    let mut closures_run = 0usize;
    for j in 1..=n_max.min(2) {
        if candidates.len() < j {
            break;
        }
        let mut pick: Vec<usize> = (0..j).collect();
        loop {
            closures_run += 1;
            if closures_run > CLOSURE_BUDGET {
                return ProtoOutcome::Inconclusive {
                    n_max,
                    reason: format!(
                        "closure budget of {CLOSURE_BUDGET} subalgebra tests exhausted"
                    ),
                };
            }
            let mut gens: Vec<(Term, Vec<El>)> = pick
                .iter()
                .enumerate()
                .map(|(slot, &c)| {
                    (
                        Term::var(Block::Ambient, slot as u16 + 1),
                        candidates[c].vector.clone(),
                    )
                })
                .collect();
            gens.push((Term::var(Block::Y, 1), vy.clone()));
            let mut sub = VectorClosure::new(alg, coords, gens, cap);
            sub.run();
            if let Some(idx) = sub.elements.iter().position(|e| e.vector == vx) {
                let alphas: Vec<Term> = pick.iter().map(|&c| candidates[c].term.clone()).collect();
                let theta = sub.elements[idx].term.clone();
                if certificate_is_valid(alg, &alphas, &theta) {
                    return ProtoOutcome::Certified { alphas, theta };
                }
            }
            if !next_subset(&mut pick, candidates.len()) {
                break;
            }
        }
    }
    ProtoOutcome::Inconclusive {
        n_max,
        reason: format!("no certificate with up to {} alpha terms", n_max.min(2)),
    }
}

/// Advance `pick` to the next size-`|pick|` subset of `0..n` in
/// lexicographic order; `false` when exhausted.
fn next_subset(pick: &mut [usize], n: usize) -> bool {
    let j = pick.len();
    let mut i = j;
    while i > 0 {
        i -= 1;
        if pick[i] < n - (j - i) {
            pick[i] += 1;
            for l in i + 1..j {
                pick[l] = pick[l - 1] + 1;
            }
            return true;
        }
    }
    false
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders;

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn free_on_one_generator_over_z3() {
        let z3 = builders::cyclic_group(3);
        let f = free_algebra(&z3, 1, &caps()).unwrap();
        assert_eq!(f.elements.len(), 3);
        let sig = z3.signature();
        let witnesses: Vec<String> = f.elements.iter().map(|e| e.term.display(sig)).collect();
        assert!(witnesses.contains(&"x1".to_string()));
        assert!(witnesses.contains(&"e".to_string()));
    }

    #[test]
    fn free_on_one_generator_over_z2() {
        let z2 = builders::cyclic_group(2);
        let f = free_algebra(&z2, 1, &caps()).unwrap();
        assert_eq!(f.elements.len(), 2);
        let sig = z2.signature();
        let witnesses: Vec<String> = f.elements.iter().map(|e| e.term.display(sig)).collect();
        assert_eq!(witnesses, vec!["x1".to_string(), "e".to_string()]);
    }

    #[test]
    fn free_over_the_trivial_algebra_is_trivial() {
        let z1 = builders::cyclic_group(1);
        for g in 1..4 {
            let f = free_algebra(&z1, g, &caps()).unwrap();
            assert_eq!(f.elements.len(), 1);
        }
    }

    #[test]
    fn free_algebra_contains_every_term_vector() {
        let z4 = builders::cyclic_group(4);
        let f = free_algebra(&z4, 2, &caps()).unwrap();
        // An arbitrary hand-built term over two generators.
        let t = Term::app(
            0,
            vec![
                Term::app(1, vec![Term::var(Block::X, 1)]),
                Term::app(0, vec![Term::var(Block::X, 2), Term::var(Block::X, 2)]),
            ],
        );
        let blocks = BlockSizes {
            x: 2,
            ..BlockSizes::default()
        };
        let v = term_vector(&z4, &t, &blocks).unwrap();
        assert!(f.find_vector(&v).is_some());
    }

    #[test]
    fn free_cap_is_reported_honestly() {
        let z4 = builders::cyclic_group(4);
        let tight = Caps {
            algebra_cap: 1 << 20,
            free_cap: 3,
        };
        match free_algebra(&z4, 2, &tight) {
            Err(Error::FreeCap {
                generators: 2,
                reached,
                cap: 3,
            }) => {
                assert!(reached <= 3);
            }
            other => panic!("expected FreeCap, got {other:?}"),
        }
    }

    #[test]
    fn identity_checking_on_groups() {
        let z2 = builders::cyclic_group(2);
        let x_plus_x = Term::app(0, vec![Term::var(Block::X, 1), Term::var(Block::X, 1)]);
        let zero = Term::app(2, vec![]);
        assert!(identity_holds(&z2, &x_plus_x, &zero).unwrap().holds);

        let s3 = builders::symmetric_group(3).unwrap();
        let xy = Term::app(0, vec![Term::var(Block::X, 1), Term::var(Block::Y, 1)]);
        let yx = Term::app(0, vec![Term::var(Block::Y, 1), Term::var(Block::X, 1)]);
        let check = identity_holds(&s3, &xy, &yx).unwrap();
        assert!(!check.holds);
        let cex = check.counterexample.unwrap();
        let a = s3.evaluate(&xy, &cex).unwrap();
        let b = s3.evaluate(&yx, &cex).unwrap();
        assert_ne!(a, b);

        // A term is always equal to itself.
        assert!(identity_holds(&s3, &xy, &xy).unwrap().holds);
    }

    #[test]
    fn commutator_terms_in_an_abelian_group_are_trivial() {
        let z4 = builders::cyclic_group(4);
        let ct = commutator_terms(&z4, 0, 1, 1, WMode::Restricted, &caps()).unwrap();
        // Only the zero element vanishes under both kill conditions.
        assert_eq!(ct.elements.len(), 1);
        assert!(ct.elements[0].vector.iter().all(|&v| v == 0));
    }

    #[test]
    fn group_commutator_qualifies_in_sym3() {
        let s3 = builders::symmetric_group(3).unwrap();
        let ct = commutator_terms(&s3, 0, 1, 1, WMode::Free, &caps()).unwrap();
        assert_eq!(ct.free_size, 972);
        // Compute the vector of x^{-1} y^{-1} x y directly and find it.
        let x = Term::var(Block::X, 1);
        let y = Term::var(Block::Y, 1);
        let com = Term::app(
            0,
            vec![
                Term::app(1, vec![x.clone()]),
                Term::app(
                    0,
                    vec![Term::app(1, vec![y.clone()]), Term::app(0, vec![x, y])],
                ),
            ],
        );
        let blocks = BlockSizes {
            x: 1,
            y: 1,
            ..BlockSizes::default()
        };
        let v = term_vector(&s3, &com, &blocks).unwrap();
        assert!(ct.elements.iter().any(|e| e.vector == v));
        // The commutator of two transpositions (ids 1, 2) is nontrivial,
        // so the qualifying set is more than just zero.
        assert!(ct.elements.len() > 1);
    }

    #[test]
    fn commutator_terms_form_a_subalgebra() {
        let f2 = builders::ring_zn(2);
        let ct = commutator_terms(&f2, 1, 1, 1, WMode::Restricted, &caps()).unwrap();
        // Qualifying polynomials over F2 are spanned by the monomials
        // containing both x and y: {0, xy, wxy, xy + wxy}.
        assert_eq!(ct.elements.len(), 4);
        // Spot the witness w*x*y among the qualifying elements.
        let prod = Term::app(
            2,
            vec![
                Term::var(Block::W, 1),
                Term::app(2, vec![Term::var(Block::X, 1), Term::var(Block::Y, 1)]),
            ],
        );
        let blocks = BlockSizes {
            w: 1,
            x: 1,
            y: 1,
            ..BlockSizes::default()
        };
        let v = term_vector(&f2, &prod, &blocks).unwrap();
        assert!(ct.elements.iter().any(|e| e.vector == v));
        // Closure under every operation, and zero belongs.
        let vectors: std::collections::HashSet<&Vec<El>> =
            ct.elements.iter().map(|e| &e.vector).collect();
        assert!(vectors.iter().any(|v| v.iter().all(|&e| e == 0)));
        let coords = ct.elements[0].vector.len();
        for (op_idx, op) in f2.signature().ops().iter().enumerate() {
            if op.arity != 2 {
                continue;
            }
            for e1 in &ct.elements {
                for e2 in &ct.elements {
                    let combined: Vec<El> = (0..coords)
                        .map(|c| f2.op2(op_idx, e1.vector[c], e2.vector[c]))
                        .collect();
                    assert!(
                        vectors.contains(&combined),
                        "qualifying set not closed under `{}`",
                        op.name
                    );
                }
            }
        }
    }

    #[test]
    fn zero_variable_commutator_terms_are_only_zero() {
        let z2 = builders::cyclic_group(2);
        let ct = commutator_terms(&z2, 0, 0, 0, WMode::Restricted, &caps()).unwrap();
        assert_eq!(ct.elements.len(), 1);
        assert_eq!(ct.elements[0].vector, vec![0]);
    }

    #[test]
    fn maltsev_terms_for_groups_rings_and_loops() {
        for alg in [
            builders::cyclic_group(2),
            builders::ring_zn(8),
            builders::nonassoc_loop_5(),
            builders::quaternion_group(),
        ] {
            match maltsev_term(&alg, &caps()) {
                MaltsevOutcome::Found(p) => {
                    assert!(
                        maltsev_identities_hold(&alg, &p),
                        "bad term for {}",
                        alg.name()
                    );
                }
                other => panic!("expected a term for {}, got {other:?}", alg.name()),
            }
        }
    }

    #[test]
    fn meet_semilattice_has_no_maltsev_term() {
        use crate::algebra::{RawAlgebra, RawOp};
        let alg = FiniteAlgebra::validate(RawAlgebra {
            name: "meet2".into(),
            size: 2,
            zero: 0,
            operations: vec![
                RawOp {
                    name: "meet".into(),
                    arity: 2,
                    table: vec![0, 0, 0, 1],
                },
                RawOp {
                    name: "bot".into(),
                    arity: 0,
                    table: vec![0],
                },
            ],
            declared_properties: vec![],
        })
        .unwrap();
        match maltsev_term(&alg, &caps()) {
            MaltsevOutcome::Absent => {}
            other => panic!("expected Absent, got {other:?}"),
        }
        // Independent re-verification: scan the whole free algebra on
        // three generators for the vector conditions.
        let f = free_algebra(&alg, 3, &caps()).unwrap();
        let codec = PowerCodec::new(2, 3);
        for e in &f.elements {
            let ok = (0..2).all(|a| {
                (0..2).all(|b| {
                    e.vector[codec.encode(&[a, b, b]) as usize] == a
                        && e.vector[codec.encode(&[b, b, a]) as usize] == a
                })
            });
            assert!(!ok, "scan found a Mal'tsev element the search missed");
        }
    }

    #[test]
    fn cap_yields_unknown_not_absent() {
        // Meet on a three-element chain: no structural schema applies and
        // the free algebra on three generators exceeds a cap of four, so
        // the search must stop at Unknown — never claim Absent.
        use crate::algebra::{RawAlgebra, RawOp};
        let alg = FiniteAlgebra::validate(RawAlgebra {
            name: "chain3".into(),
            size: 3,
            zero: 0,
            operations: vec![
                RawOp {
                    name: "meet".into(),
                    arity: 2,
                    table: vec![0, 0, 0, 0, 1, 1, 0, 1, 2],
                },
                RawOp {
                    name: "bot".into(),
                    arity: 0,
                    table: vec![0],
                },
            ],
            declared_properties: vec![],
        })
        .unwrap();
        let tight = Caps {
            algebra_cap: 1 << 20,
            free_cap: 4,
        };
        match maltsev_term(&alg, &tight) {
            MaltsevOutcome::Unknown { reached, cap } => {
                assert_eq!(cap, 4);
                assert!(reached >= 4, "reached {reached}");
            }
            other => panic!("expected Unknown, got {other:?}"),
        }
        // With room to finish, the same algebra is decided definitively.
        match maltsev_term(&alg, &caps()) {
            MaltsevOutcome::Absent => {}
            other => panic!("expected Absent at full caps, got {other:?}"),
        }
    }

    #[test]
    fn protomodularity_certificates_verify() {
        for alg in [
            builders::cyclic_group(4),
            builders::ring_zn(4),
            builders::symmetric_group(3).unwrap(),
            builders::nonassoc_loop_5(),
        ] {
            match protomodularity_certificate(&alg, 2, &caps()) {
                ProtoOutcome::Certified { alphas, theta } => {
                    assert!(certificate_is_valid(&alg, &alphas, &theta));
                    assert_eq!(alphas.len(), 1, "schema certificates use one alpha");
                }
                ProtoOutcome::Inconclusive { reason, .. } => {
                    panic!("expected certificate for {}: {reason}", alg.name())
                }
            }
        }
    }

    #[test]
    fn pointed_sets_are_inconclusive() {
        use crate::algebra::{RawAlgebra, RawOp};
        let alg = FiniteAlgebra::validate(RawAlgebra {
            name: "pointed2".into(),
            size: 2,
            zero: 0,
            operations: vec![RawOp {
                name: "base".into(),
                arity: 0,
                table: vec![0],
            }],
            declared_properties: vec![],
        })
        .unwrap();
        match protomodularity_certificate(&alg, 3, &caps()) {
            ProtoOutcome::Inconclusive { .. } => {}
            ProtoOutcome::Certified { .. } => panic!("pointed sets are not protomodular"),
        }
        // The free algebra on two generators really is {x, y, 0}.
        let f = free_algebra(&alg, 2, &caps()).unwrap();
        assert_eq!(f.elements.len(), 3);
    }

    #[test]
    fn closure_is_deterministic_across_execution_modes() {
        let s3 = builders::symmetric_group(3).unwrap();
        crate::exec::set_parallel_override(Some(false));
        let seq = free_algebra(&s3, 2, &caps()).unwrap();
        crate::exec::set_parallel_override(Some(true));
        let par = free_algebra(&s3, 2, &caps()).unwrap();
        crate::exec::set_parallel_override(None);
        assert_eq!(seq.elements.len(), par.elements.len());
        for (a, b) in seq.elements.iter().zip(&par.elements) {
            assert_eq!(a.vector, b.vector);
            assert_eq!(a.term, b.term);
        }
    }
}
