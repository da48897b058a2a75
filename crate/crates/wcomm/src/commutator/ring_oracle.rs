//! Closed-form weighted commutators for verified commutative rings.
//!
//! On a commutative ring the weighted subobject commutator of subrings
//! `X`, `Y` with weight `W` has an explicit description: it is the set
//! of sums `r + s + t` where `r` is a sum of products `xy`, `s` a sum
//! of products `wxy`, and `t` a sum of mixed products of the two kinds.
//! The weighted normal commutator replaces the `w` factors by arbitrary
//! ring elements, which makes it independent of the weight. Both sets
//! are additive spans of explicit product sets, so they can be computed
//! directly — no term enumeration, no generation step — and every
//! element receives a sum-of-products witness. This route is the
//! independent reference the term-enumeration engines are validated
//! against on ring inputs.

use std::collections::BTreeMap;

use crate::algebra::{Assignment, El, FiniteAlgebra, Subuniverse};
use crate::congruence;
use crate::error::Error;
use crate::structure::RingOps;
use crate::term::{Block, BlockSizes, Term};

use super::{
    check_cospan, combine_witnesses, Bounds, CommutatorResult, Method, Status, WeightedCospan,
    Witness,
};

/// Both closed forms for one cospan.
#[derive(Clone, Debug)]
pub struct RingCommutators {
    pub subobject: CommutatorResult,
    pub normal: CommutatorResult,
}

/// The closed-form weighted commutator and its normal companion.
/// Requires the algebra to both declare `commutative_ring` and pass the
/// ring axiom scan; both results are exact.
pub fn ring_weighted_commutator(
    alg: &FiniteAlgebra,
    cospan: &WeightedCospan,
) -> Result<RingCommutators, Error> {
    let ops = ring_ops(alg)?;
    check_cospan(alg, cospan)?;

    let xw = base_set(cospan.x().elements(), Block::X);
    let yw = base_set(cospan.y().elements(), Block::Y);
    let ww = base_set(cospan.w().elements(), Block::W);
    let ambient: Vec<El> = alg.elements().collect();
    let aw = base_set(&ambient, Block::Ambient);

    // Pairwise products xy seed every span below. Each subalgebra
    // contains zero, so all seed sets are nonempty and contain zero.
    let prod_xy = value_products(alg, &ops, &xw, &yw);
    let sub_set = closed_form(
        alg,
        &ops,
        &prod_xy,
        value_products(alg, &ops, &ww, &prod_xy),
    );
    let nor_set = closed_form(
        alg,
        &ops,
        &prod_xy,
        value_products(alg, &ops, &aw, &prod_xy),
    );

    let subobject = finish_result(alg, sub_set)?;
    let normal = finish_result(alg, nor_set)?;

    // The normal form must actually be an ideal: its own ideal closure
    // may not add anything.
    let gens: Vec<usize> = normal
        .value
        .elements()
        .iter()
        .map(|&e| e as usize)
        .collect();
    let ideal = congruence::normal_closure(alg, &gens)?;
    if ideal.elements() != normal.value.elements() {
        return Err(Error::Internal(
            "ring normal commutator form is not closed under the ideal conditions".to_string(),
        ));
    }
    Ok(RingCommutators { subobject, normal })
}

fn ring_ops(alg: &FiniteAlgebra) -> Result<RingOps, Error> {
    if !alg.is_declared("commutative_ring") {
        return Err(Error::NotCommutativeRing {
            reason: "the algebra does not declare the commutative_ring property".to_string(),
        });
    }
    alg.structure()
        .ring
        .ok_or_else(|| Error::NotCommutativeRing {
            reason: "the ring axiom scan does not verify this signature as a commutative ring"
                .to_string(),
        })
}

type WitSet = BTreeMap<El, Witness>;

/// Each element as itself, witnessed by a single variable of its block.
fn base_set(elements: &[El], block: Block) -> WitSet {
    elements
        .iter()
        .map(|&e| {
            let mut assignment = Assignment::default();
            match block {
                Block::W => assignment.w.push(e),
                Block::X => assignment.x.push(e),
                Block::Y => assignment.y.push(e),
                Block::Ambient => assignment.ambient.push(e),
            }
            (
                e,
                Witness {
                    term: Term::var(block, 1),
                    assignment,
                },
            )
        })
        .collect()
}

/// Products `a * b` over two witnessed sets, first witness per value
/// winning in sorted order of both factors.
fn value_products(alg: &FiniteAlgebra, ops: &RingOps, a: &WitSet, b: &WitSet) -> WitSet {
    let mut out = WitSet::new();
    for (&va, wa) in a {
        for (&vb, wb) in b {
            let v = alg.op2(ops.mul, va, vb);
            out.entry(v)
                .or_insert_with(|| combine_witnesses(ops.mul, &[wa, wb]));
        }
    }
    out
}

/// Additive closure of a witnessed set. In a finite ring every element
/// has finite additive order, so closing a set that contains zero under
/// addition alone already yields the generated additive subgroup.
fn add_span(alg: &FiniteAlgebra, ops: &RingOps, seeds: WitSet) -> WitSet {
    let mut span = seeds;
    let mut members: Vec<El> = span.keys().copied().collect();
    let mut frontier = 0usize;
    while frontier < members.len() {
        let end = members.len();
        for i in frontier..end {
            for j in 0..end {
                for (a, b) in [(members[i], members[j]), (members[j], members[i])] {
                    let v = alg.op2(ops.add, a, b);
                    if !span.contains_key(&v) {
                        let w = combine_witnesses(ops.add, &[&span[&a], &span[&b]]);
                        span.insert(v, w);
                        members.push(v);
                    }
                }
            }
        }
        frontier = end;
    }
    span
}

/// The additive span of `prod_xy`, the given triple products, and their
/// mixed products. Distributivity lets every span-level product be
/// rewritten as a sum of seed-level products, so spanning the union of
/// the three seed sets gives the full sum `R + S + T` at once.
fn closed_form(alg: &FiniteAlgebra, ops: &RingOps, prod_xy: &WitSet, s_seeds: WitSet) -> WitSet {
    let t_seeds = value_products(alg, ops, prod_xy, &s_seeds);
    let mut seeds = prod_xy.clone();
    for (v, w) in s_seeds.into_iter().chain(t_seeds) {
        seeds.entry(v).or_insert(w);
    }
    add_span(alg, ops, seeds)
}

fn finish_result(alg: &FiniteAlgebra, witnessed: WitSet) -> Result<CommutatorResult, Error> {
    let elements: Vec<El> = witnessed.keys().copied().collect();
    let value = Subuniverse::from_closed(alg, elements)
        .map_err(|e| Error::Internal(format!("ring closed form is not a subalgebra: {e}")))?;
    let mut spans = BlockSizes::default();
    for w in witnessed.values() {
        let s = w.term.var_span();
        spans.w = spans.w.max(s.w);
        spans.x = spans.x.max(s.x);
        spans.y = spans.y.max(s.y);
    }
    Ok(CommutatorResult {
        value,
        status: Status::Exact,
        bounds_used: Bounds::new(spans.w as usize, spans.x as usize, spans.y as usize),
        witnesses: witnessed,
        method: Method::RingClosedForm,
    })
}
