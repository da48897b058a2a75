//! The weighted commutator family on finite pointed algebras.
//!
//! The weighted subobject commutator `[X,Y | W]` of three subalgebras of
//! `A` collects, over every choice of weight values in `W`, left values
//! in `X`, and right values in `Y` within the variable bounds, the
//! values of all commutator terms — terms that vanish identically when
//! either the x-block or the y-block is set to zero — and returns the
//! subalgebra those values generate. The weighted normal commutator is
//! its normal closure. Specializing the weight to `{0}` gives the
//! Higgins commutator and its normal closure the Huq commutator;
//! specializing to all of `A` gives the weight-one commutator, tied to
//! the Smith commutator of congruences for normal `X`, `Y`.
//!
//! Values are computed by signature-specific engines ([`engines`]) that
//! are exact at the requested bounds; the reported status is `exact`
//! only when additionally the value survives one-step probes of each
//! bound, so a reported `exact` means the chain has stabilized and
//! `lower_bound` means only soundness is claimed. Every element of every
//! reported value carries a witness term with a recorded assignment that
//! re-evaluates to it.

pub mod analysis;
pub mod engines;
pub mod ring_oracle;
pub mod smith;

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use serde_json::{json, Value};

use crate::algebra::{Assignment, El, FiniteAlgebra, Subuniverse};
use crate::caps::Caps;
use crate::congruence::{self, Congruence};
use crate::error::Error;
use crate::free::{maltsev_term, MaltsevOutcome};
use crate::term::{Block, BlockSizes, Term};

/// Variable-count bounds per block: up to `k` weight variables, `m`
/// x-variables, `n` y-variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Bounds {
    pub k: usize,
    pub m: usize,
    pub n: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { k: 2, m: 2, n: 2 }
    }
}

impl Bounds {
    pub fn new(k: usize, m: usize, n: usize) -> Bounds {
        Bounds { k, m, n }
    }

    /// The same bounds with one component increased by one (0 = k,
    /// 1 = m, 2 = n) — the stabilization probes.
    pub(crate) fn bumped(&self, component: usize) -> Bounds {
        let mut b = *self;
        match component {
            0 => b.k += 1,
            1 => b.m += 1,
            _ => b.n += 1,
        }
        b
    }
}

/// The input of a weighted commutator: subalgebras `X`, `Y`, and the
/// weight `W`, all of the same parent algebra.
#[derive(Clone, Debug)]
pub struct WeightedCospan {
    x: Subuniverse,
    y: Subuniverse,
    w: Subuniverse,
}

impl WeightedCospan {
    pub fn new(
        alg: &FiniteAlgebra,
        x: Subuniverse,
        y: Subuniverse,
        w: Subuniverse,
    ) -> Result<WeightedCospan, Error> {
        for s in [&x, &y, &w] {
            if s.parent_uid() != alg.uid() {
                return Err(Error::ParentMismatch {
                    operation: "weighted cospan",
                });
            }
        }
        Ok(WeightedCospan { x, y, w })
    }

    pub fn x(&self) -> &Subuniverse {
        &self.x
    }

    pub fn y(&self) -> &Subuniverse {
        &self.y
    }

    pub fn w(&self) -> &Subuniverse {
        &self.w
    }

    /// The same cospan with `X` and `Y` swapped.
    pub fn flipped(&self) -> WeightedCospan {
        WeightedCospan {
            x: self.y.clone(),
            y: self.x.clone(),
            w: self.w.clone(),
        }
    }
}

/// Whether a reported value is certified stable or only a sound lower
/// bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// The engine was complete at the bounds and the value is unchanged
    /// under every one-step bound increase (or an exact method fired).
    Exact,
    /// Sound but possibly incomplete: every element is witnessed, but
    /// larger bounds or caps might reveal more.
    LowerBound,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Exact => "exact",
            Status::LowerBound => "lower_bound",
        }
    }
}

/// How a value was computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Signature-aware enumeration of commutator-term values.
    TermEnumeration,
    /// Exactness certified by the Smith commutator zero class.
    SmithBridge,
    /// Commutative-ring closed form.
    RingClosedForm,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::TermEnumeration => "term_enumeration",
            Method::SmithBridge => "smith_bridge",
            Method::RingClosedForm => "ring_closed_form",
        }
    }
}

/// A certificate for one reported element: a term and an assignment
/// under which the term evaluates to the element. Weight variables hold
/// values from `W`, x-variables from `X`, y-variables from `Y`; ambient
/// variables (normal closures only) hold arbitrary elements of `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub term: Term,
    pub assignment: Assignment,
}

impl Witness {
    pub fn evaluate(&self, alg: &FiniteAlgebra) -> Result<El, Error> {
        alg.evaluate(&self.term, &self.assignment)
    }

    /// Serialized form: prefix-notation term plus the assignment blocks.
    pub fn to_json(&self, alg: &FiniteAlgebra) -> Value {
        json!({
            "term": self.term.display(alg.signature()),
            "assignment": {
                "w": self.assignment.w,
                "x": self.assignment.x,
                "y": self.assignment.y,
                "a": self.assignment.ambient,
            },
        })
    }
}

/// Witness for the zero element: the signature's zero constant.
pub(crate) fn zero_witness(alg: &FiniteAlgebra) -> Witness {
    Witness {
        term: Term::app(alg.signature().zero_op(), vec![]),
        assignment: Assignment::default(),
    }
}

/// Combine witnessed arguments under an operation. Each argument's
/// variables are shifted onto a fresh range so one concatenated
/// assignment serves the combined term.
pub(crate) fn combine_witnesses(op: usize, parts: &[&Witness]) -> Witness {
    let mut offsets = BlockSizes::default();
    let mut assignment = Assignment::default();
    let mut args = Vec::with_capacity(parts.len());
    for p in parts {
        args.push(p.term.shifted(&offsets));
        let sizes = p.assignment.sizes();
        offsets.w += sizes.w;
        offsets.x += sizes.x;
        offsets.y += sizes.y;
        offsets.ambient += sizes.ambient;
        assignment.extend(&p.assignment);
    }
    Witness {
        term: Term::app(op, args),
        assignment,
    }
}

/// Subalgebra generated by a witnessed set, every element of the closure
/// receiving a witness by combining the witnesses of its parents. The
/// zero element is always present and witnessed by the zero constant if
/// nothing smaller reached it.
pub(crate) fn sg_with_witnesses(
    alg: &FiniteAlgebra,
    seeds: &BTreeMap<El, Witness>,
) -> (Subuniverse, BTreeMap<El, Witness>) {
    let mut witnesses: BTreeMap<El, Witness> = seeds.clone();
    witnesses
        .entry(alg.zero())
        .or_insert_with(|| zero_witness(alg));
    for (op_idx, op) in alg.signature().ops().iter().enumerate() {
        if op.arity == 0 {
            let v = alg.op0(op_idx);
            witnesses.entry(v).or_insert_with(|| Witness {
                term: Term::app(op_idx, vec![]),
                assignment: Assignment::default(),
            });
        }
    }

    // Round-based closure; each round sweeps tuples touching the newest
    // elements in a deterministic order so witnesses are reproducible.
    let mut members: Vec<El> = witnesses.keys().copied().collect();
    let mut round_start = 0usize;
    loop {
        let end = members.len();
        let mut new_this_round: Vec<El> = Vec::new();
        for (op_idx, op) in alg.signature().ops().iter().enumerate() {
            let r = op.arity;
            if r == 0 {
                continue;
            }
            let mut idx = vec![0usize; r];
            'tuples: loop {
                if idx.iter().any(|&i| i >= round_start) {
                    let args: Vec<El> = idx.iter().map(|&i| members[i]).collect();
                    let v = alg.app(op_idx, &args);
                    if !witnesses.contains_key(&v) {
                        let parts: Vec<&Witness> =
                            args.iter().map(|a| witnesses.get(a).unwrap()).collect();
                        // Borrow rules: build before inserting.
                        let w = combine_witnesses(op_idx, &parts);
                        witnesses.insert(v, w);
                        new_this_round.push(v);
                    }
                }
                for j in (0..r).rev() {
                    idx[j] += 1;
                    if idx[j] < end {
                        continue 'tuples;
                    }
                    idx[j] = 0;
                }
                break;
            }
        }
        if new_this_round.is_empty() {
            break;
        }
        round_start = end;
        members.extend(new_this_round);
    }
    let value = Subuniverse::trusted(alg, members);
    (value, witnesses)
}

/// Witnessed normal closure: elements of the ideal generated by the
/// seeds, each witnessed by a term that may also use ambient variables
/// ranging over the whole algebra. Implemented as a closure over pairs
/// `(value, shadow)` seeded with `(s, 0)` for seeds and `(a, a)` for
/// ambient elements; the subalgebra of `A × A` these generate is a
/// reflexive compatible relation, so in a Mal'tsev variety its zero
/// fiber is exactly the normal closure. Outside Mal'tsev varieties the
/// fiber is still sound (every returned element lies in the ideal and
/// its witness re-evaluates), but may be a proper subset.
pub(crate) fn normal_closure_witnessed(
    alg: &FiniteAlgebra,
    seeds: &BTreeMap<El, Witness>,
) -> BTreeMap<El, Witness> {
    let zero = alg.zero();
    let mut pair_witness: HashMap<(El, El), Witness> = HashMap::new();
    let mut pairs: Vec<(El, El)> = Vec::new();
    let push = |p: (El, El),
                w: Witness,
                pairs: &mut Vec<(El, El)>,
                map: &mut HashMap<(El, El), Witness>| {
        if !map.contains_key(&p) {
            map.insert(p, w);
            pairs.push(p);
        }
    };
    push(
        (zero, zero),
        zero_witness(alg),
        &mut pairs,
        &mut pair_witness,
    );
    for (&s, w) in seeds {
        push((s, zero), w.clone(), &mut pairs, &mut pair_witness);
    }
    for a in alg.elements() {
        let w = Witness {
            term: Term::var(Block::Ambient, 1),
            assignment: Assignment {
                ambient: vec![a],
                ..Assignment::default()
            },
        };
        push((a, a), w, &mut pairs, &mut pair_witness);
    }

    let mut round_start = 0usize;
    loop {
        let end = pairs.len();
        let mut added = false;
        for (op_idx, op) in alg.signature().ops().iter().enumerate() {
            let r = op.arity;
            if r == 0 {
                continue;
            }
            let mut idx = vec![0usize; r];
            'tuples: loop {
                if idx.iter().any(|&i| i >= round_start) {
                    let chosen: Vec<(El, El)> = idx.iter().map(|&i| pairs[i]).collect();
                    let left: Vec<El> = chosen.iter().map(|p| p.0).collect();
                    let right: Vec<El> = chosen.iter().map(|p| p.1).collect();
                    let p = (alg.app(op_idx, &left), alg.app(op_idx, &right));
                    if !pair_witness.contains_key(&p) {
                        let parts: Vec<&Witness> = chosen
                            .iter()
                            .map(|c| pair_witness.get(c).unwrap())
                            .collect();
                        let w = combine_witnesses(op_idx, &parts);
                        pair_witness.insert(p, w);
                        pairs.push(p);
                        added = true;
                    }
                }
                for j in (0..r).rev() {
                    idx[j] += 1;
                    if idx[j] < end {
                        continue 'tuples;
                    }
                    idx[j] = 0;
                }
                break;
            }
        }
        if !added {
            break;
        }
        round_start = end;
    }

    // Each pair key (e, 0) is unique, so the zero fiber is unambiguous.
    pair_witness
        .into_iter()
        .filter(|(p, _)| p.1 == zero)
        .map(|(p, w)| (p.0, w))
        .collect()
}

/// One commutator value with its certification data.
#[derive(Clone, Debug)]
pub struct CommutatorResult {
    pub value: Subuniverse,
    pub status: Status,
    pub bounds_used: Bounds,
    pub witnesses: BTreeMap<El, Witness>,
    pub method: Method,
}

impl CommutatorResult {
    /// Every value element must carry a witness, and every witness must
    /// re-evaluate to its element. Returns the first violation.
    pub fn verify_witnesses(&self, alg: &FiniteAlgebra) -> Result<(), String> {
        for &e in self.value.elements() {
            match self.witnesses.get(&e) {
                None => return Err(format!("element {e} has no witness")),
                Some(w) => match w.evaluate(alg) {
                    Ok(v) if v == e => {}
                    Ok(v) => {
                        return Err(format!(
                            "witness for {e} evaluates to {v}: {}",
                            w.term.display(alg.signature())
                        ))
                    }
                    Err(err) => return Err(format!("witness for {e} fails to evaluate: {err}")),
                },
            }
        }
        Ok(())
    }

    pub fn to_json(&self, alg: &FiniteAlgebra) -> Value {
        let mut witnesses = serde_json::Map::new();
        for (e, w) in &self.witnesses {
            witnesses.insert(e.to_string(), w.to_json(alg));
        }
        json!({
            "value": self.value.elements(),
            "status": self.status.as_str(),
            "bounds_used": [self.bounds_used.k, self.bounds_used.m, self.bounds_used.n],
            "method": self.method.as_str(),
            "witnesses": Value::Object(witnesses),
        })
    }
}

/// Is every commutator term of `V(A)` identically zero on `A`? True
/// when `A` has a Mal'tsev term and the Smith commutator `[∇,∇]` is the
/// identity congruence (`A` is affine): term functions then decompose
/// additively and both kill conditions force every summand to vanish.
/// Memoized per algebra; `false` also covers "could not decide".
pub(crate) fn variety_is_affine(alg: &FiniteAlgebra, caps: &Caps) -> bool {
    static MEMO: OnceLock<Mutex<HashMap<u64, bool>>> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&hit) = memo.lock().unwrap().get(&alg.uid()) {
        return hit;
    }
    let verdict = affine_uncached(alg, caps);
    memo.lock().unwrap().insert(alg.uid(), verdict);
    verdict
}

fn affine_uncached(alg: &FiniteAlgebra, caps: &Caps) -> bool {
    if alg.size() * alg.size() > 1 << 12 {
        return false;
    }
    if !matches!(maltsev_term(alg, caps), MaltsevOutcome::Found(_)) {
        return false;
    }
    let full = Congruence::full(alg);
    match smith::smith_commutator(alg, &full, &full, caps) {
        Ok(c) => c.is_identity(),
        Err(_) => false,
    }
}

/// The weighted subobject commutator `[X,Y | W]` at the given bounds.
pub fn weighted_commutator(
    alg: &FiniteAlgebra,
    cospan: &WeightedCospan,
    bounds: &Bounds,
    caps: &Caps,
) -> Result<CommutatorResult, Error> {
    check_cospan(alg, cospan)?;
    let base = engines::collect(alg, cospan, bounds, true, caps)?;
    let (value, witnesses) = sg_with_witnesses(alg, &base.witnessed);
    let mut witnesses: BTreeMap<El, Witness> = witnesses
        .into_iter()
        .filter(|(e, _)| value.contains(*e))
        .collect();
    witnesses
        .entry(alg.zero())
        .or_insert_with(|| zero_witness(alg));

    let mut status = Status::LowerBound;
    let mut method = Method::TermEnumeration;
    if base.complete {
        let mut stable = true;
        for component in 0..3 {
            let probe = engines::collect(alg, cospan, &bounds.bumped(component), false, caps)?;
            if !probe.complete {
                stable = false;
                break;
            }
            let probe_value = alg.subuniverse_generate(
                &probe.values.iter().map(|&e| e as usize).collect::<Vec<_>>(),
            )?;
            if probe_value.elements() != value.elements() {
                stable = false;
                break;
            }
        }
        if stable {
            status = Status::Exact;
        }
    }

    // Smith-bridge upgrade for engine-less signatures: at full weight
    // with both sides normal, the Smith commutator's zero class is the
    // weight-one value; if it coincides with the witnessed value, the
    // result is certified exact even though the probes could not run to
    // completion.
    if status == Status::LowerBound
        && cospan.w.is_full()
        && alg.structure().group.is_none()
        && alg.structure().ring.is_none()
    {
        if let Some(bridge) = smith_bridge_value(alg, cospan, caps) {
            if bridge.elements() == value.elements() {
                status = Status::Exact;
                method = Method::SmithBridge;
            }
        }
    }

    Ok(CommutatorResult {
        value,
        status,
        bounds_used: *bounds,
        witnesses,
        method,
    })
}

/// Zero class of the Smith commutator of the congruences generated by
/// `X` and `Y` — defined only when both are normal and a Mal'tsev term
/// exists; `None` when any precondition fails.
fn smith_bridge_value(
    alg: &FiniteAlgebra,
    cospan: &WeightedCospan,
    caps: &Caps,
) -> Option<Subuniverse> {
    let xs: Vec<usize> = cospan.x.elements().iter().map(|&e| e as usize).collect();
    let ys: Vec<usize> = cospan.y.elements().iter().map(|&e| e as usize).collect();
    let cx = congruence::congruence_from_normal(alg, &xs).ok()?;
    let cy = congruence::congruence_from_normal(alg, &ys).ok()?;
    let s = smith::smith_commutator(alg, &cx, &cy, caps).ok()?;
    s.zero_class(alg).ok()
}

/// The weighted normal commutator: the normal closure of the weighted
/// subobject commutator, with status inherited. Witnesses of the extra
/// elements use ambient variables.
pub fn weighted_normal_commutator(
    alg: &FiniteAlgebra,
    cospan: &WeightedCospan,
    bounds: &Bounds,
    caps: &Caps,
) -> Result<CommutatorResult, Error> {
    let base = weighted_commutator(alg, cospan, bounds, caps)?;
    normal_from_base(alg, &base, caps)
}

/// The normal closure of an already-computed subobject commutator, with
/// witnesses extended by the pair closure. Split out so callers holding
/// the base result don't pay for a second engine run.
pub(crate) fn normal_from_base(
    alg: &FiniteAlgebra,
    base: &CommutatorResult,
    caps: &Caps,
) -> Result<CommutatorResult, Error> {
    let gens: Vec<usize> = base.value.elements().iter().map(|&e| e as usize).collect();
    let value = congruence::normal_closure(alg, &gens)?;
    let fiber = normal_closure_witnessed(alg, &base.witnesses);
    let mut witnesses = BTreeMap::new();
    let mut missing = Vec::new();
    for &e in value.elements() {
        match base.witnesses.get(&e).or_else(|| fiber.get(&e)) {
            Some(w) => {
                witnesses.insert(e, w.clone());
            }
            None => missing.push(e),
        }
    }
    if !missing.is_empty() {
        // In a Mal'tsev variety the pair closure reaches the whole
        // ideal, so a gap there is a defect, not a limitation.
        if matches!(maltsev_term(alg, caps), MaltsevOutcome::Found(_)) {
            return Err(Error::Internal(format!(
                "normal closure witnesses missing for {missing:?} despite a Mal'tsev term"
            )));
        }
    }
    Ok(CommutatorResult {
        value,
        status: base.status,
        bounds_used: base.bounds_used,
        witnesses,
        method: base.method,
    })
}

/// The Higgins commutator `[X,Y]` — the weighted subobject commutator at
/// weight `{0}`.
pub fn higgins_commutator(
    alg: &FiniteAlgebra,
    x: &Subuniverse,
    y: &Subuniverse,
    bounds: &Bounds,
    caps: &Caps,
) -> Result<CommutatorResult, Error> {
    let c = WeightedCospan::new(alg, x.clone(), y.clone(), alg.subuniverse_zero())?;
    weighted_commutator(alg, &c, bounds, caps)
}

/// The Huq commutator — the normal closure of the Higgins commutator.
pub fn huq_commutator(
    alg: &FiniteAlgebra,
    x: &Subuniverse,
    y: &Subuniverse,
    bounds: &Bounds,
    caps: &Caps,
) -> Result<CommutatorResult, Error> {
    let c = WeightedCospan::new(alg, x.clone(), y.clone(), alg.subuniverse_zero())?;
    weighted_normal_commutator(alg, &c, bounds, caps)
}

/// Outcome of the zero-commutator centrality criterion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Centrality {
    Central,
    NotCentral,
    /// The value is zero but only as a lower bound — undecided.
    Unknown,
}

impl Centrality {
    pub fn as_str(self) -> &'static str {
        match self {
            Centrality::Central => "central",
            Centrality::NotCentral => "not_central",
            Centrality::Unknown => "unknown",
        }
    }
}

/// Decide centrality of a weighted cospan by the vanishing of its
/// commutator: any nonzero element refutes centrality regardless of
/// status (the value is always sound); a zero value certifies it only
/// when exact.
pub fn centrality_check(
    alg: &FiniteAlgebra,
    cospan: &WeightedCospan,
    bounds: &Bounds,
    caps: &Caps,
) -> Result<Centrality, Error> {
    let result = weighted_commutator(alg, cospan, bounds, caps)?;
    if !result.value.is_zero_only(alg) {
        return Ok(Centrality::NotCentral);
    }
    Ok(match result.status {
        Status::Exact => Centrality::Central,
        Status::LowerBound => Centrality::Unknown,
    })
}

fn check_cospan(alg: &FiniteAlgebra, cospan: &WeightedCospan) -> Result<(), Error> {
    for s in [&cospan.x, &cospan.y, &cospan.w] {
        if s.parent_uid() != alg.uid() {
            return Err(Error::ParentMismatch {
                operation: "weighted commutator",
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders;

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn witness_combination_concatenates_blocks() {
        let z4 = builders::cyclic_group(4);
        let w1 = Witness {
            term: Term::app(0, vec![Term::var(Block::X, 1), Term::var(Block::Y, 1)]),
            assignment: Assignment::new(vec![], vec![1], vec![2]),
        };
        let w2 = Witness {
            term: Term::var(Block::X, 1),
            assignment: Assignment::new(vec![], vec![3], vec![]),
        };
        let combined = combine_witnesses(0, &[&w1, &w2]);
        // Second part's x1 must become x2.
        assert_eq!(
            combined.term,
            Term::app(
                0,
                vec![
                    Term::app(0, vec![Term::var(Block::X, 1), Term::var(Block::Y, 1)]),
                    Term::var(Block::X, 2),
                ]
            )
        );
        assert_eq!(combined.assignment.x, vec![1, 3]);
        assert_eq!(combined.assignment.y, vec![2]);
        // (1 + 2) + 3 = 2 in Z4.
        assert_eq!(combined.evaluate(&z4).unwrap(), 2);
    }

    #[test]
    fn generated_witnesses_reevaluate() {
        let z8 = builders::cyclic_group(8);
        let mut seeds = BTreeMap::new();
        seeds.insert(
            2,
            Witness {
                term: Term::var(Block::X, 1),
                assignment: Assignment::new(vec![], vec![2], vec![]),
            },
        );
        let (value, witnesses) = sg_with_witnesses(&z8, &seeds);
        assert_eq!(value.elements(), &[0, 2, 4, 6]);
        for &e in value.elements() {
            assert_eq!(witnesses[&e].evaluate(&z8).unwrap(), e);
        }
    }

    #[test]
    fn witnessed_normal_closure_matches_the_congruence_route() {
        let s3 = builders::symmetric_group(3).unwrap();
        // A transposition generates a non-normal subgroup; its normal
        // closure is the whole group.
        let mut seeds = BTreeMap::new();
        seeds.insert(
            1,
            Witness {
                term: Term::var(Block::X, 1),
                assignment: Assignment::new(vec![], vec![1], vec![]),
            },
        );
        let fiber = normal_closure_witnessed(&s3, &seeds);
        let ideal = congruence::normal_closure(&s3, &[1]).unwrap();
        let fiber_elems: Vec<El> = fiber.keys().copied().collect();
        assert_eq!(fiber_elems, ideal.elements());
        for (&e, w) in &fiber {
            assert_eq!(w.evaluate(&s3).unwrap(), e);
        }
    }

    #[test]
    fn abelian_groups_are_affine_and_symmetric_groups_are_not() {
        assert!(variety_is_affine(&builders::cyclic_group(4), &caps()));
        assert!(variety_is_affine(&builders::ring_zero_mult(6), &caps()));
        assert!(!variety_is_affine(
            &builders::symmetric_group(3).unwrap(),
            &caps()
        ));
        assert!(!variety_is_affine(&builders::ring_zn(8), &caps()));
    }

    #[test]
    fn abelian_commutators_vanish_exactly() {
        let z4 = builders::cyclic_group(4);
        let c = WeightedCospan::new(
            &z4,
            z4.subuniverse_full(),
            z4.subuniverse_full(),
            z4.subuniverse_full(),
        )
        .unwrap();
        let r = weighted_commutator(&z4, &c, &Bounds::default(), &caps()).unwrap();
        assert_eq!(r.value.elements(), &[0]);
        assert_eq!(r.status, Status::Exact);
        r.verify_witnesses(&z4).unwrap();
        assert_eq!(
            centrality_check(&z4, &c, &Bounds::default(), &caps()).unwrap(),
            Centrality::Central
        );
    }

    #[test]
    fn zero_sided_cospans_vanish_for_any_weight() {
        let s3 = builders::symmetric_group(3).unwrap();
        let c = WeightedCospan::new(
            &s3,
            s3.subuniverse_zero(),
            s3.subuniverse_full(),
            s3.subuniverse_full(),
        )
        .unwrap();
        let r = weighted_commutator(&s3, &c, &Bounds::default(), &caps()).unwrap();
        assert_eq!(r.value.elements(), &[0]);
        assert_eq!(r.status, Status::Exact);
    }
}
