//! Value-collection engines behind the weighted commutator.
//!
//! All engines compute the same thing: the set of values taken by
//! commutator terms — terms vanishing identically under the x-kill and
//! y-kill substitutions — when weight variables range over `W`, left
//! variables over `X`, right variables over `Y`, within the variable
//! bounds. Each engine reports whether its collection is provably
//! complete at those bounds; anything it returns is sound regardless.
//!
//! Dispatch: an affine algebra short-circuits to the empty collection
//! (every commutator term is identically zero there); group signatures
//! use a conjugated-commutator engine over subgroup masks; commutative
//! ring signatures use a monomial engine; everything else evaluates the
//! free closure on a restricted coordinate set.

use std::collections::{BTreeMap, HashMap};

use crate::algebra::{Assignment, El, FiniteAlgebra};
use crate::caps::Caps;
use crate::error::Error;
use crate::free::VectorClosure;
use crate::structure::{GroupOps, RingOps};
use crate::term::{Block, Term};

use super::{variety_is_affine, Bounds, WeightedCospan, Witness};

/// Raw collection before subalgebra generation.
pub(crate) struct EngineOutput {
    /// Witnessed collected values; empty when witnesses were not
    /// requested.
    pub witnessed: BTreeMap<El, Witness>,
    /// Collected values, sorted and deduplicated. Always filled.
    pub values: Vec<El>,
    /// True when the collection provably contains every commutator-term
    /// value at the requested bounds.
    pub complete: bool,
}

impl EngineOutput {
    fn empty(complete: bool) -> EngineOutput {
        EngineOutput {
            witnessed: BTreeMap::new(),
            values: Vec::new(),
            complete,
        }
    }
}

/// Combinations would explode past this; fall back to the free-closure
/// route instead.
const COMBO_BUDGET: u64 = 1 << 20;

/// Upper bound on restricted-coordinate rows for the free-closure
/// engine.
const ROW_BUDGET: usize = 1 << 22;

pub(crate) fn collect(
    alg: &FiniteAlgebra,
    cospan: &WeightedCospan,
    bounds: &Bounds,
    want_witnesses: bool,
    caps: &Caps,
) -> Result<EngineOutput, Error> {
    if variety_is_affine(alg, caps) {
        // Affine: term operations are affine combinations, so a term
        // vanishing at x = 0 and at y = 0 vanishes everywhere.
        return Ok(EngineOutput::empty(true));
    }
    let structure = alg.structure();
    if let Some(g) = structure.group {
        if alg.size() <= 64 && group_combo_count(cospan, bounds) <= COMBO_BUDGET {
            return Ok(group_engine(alg, &g, cospan, bounds, want_witnesses));
        }
    }
    if let Some(r) = structure.ring {
        return Ok(ring_engine(alg, &r, cospan, bounds, want_witnesses));
    }
    free_closure_engine(alg, cospan, bounds, want_witnesses, caps)
}

// ---------------------------------------------------------------------------
// Group engine
// ---------------------------------------------------------------------------
//
// For a fixed assignment with value sets SW, SX, SY, the commutator-term
// values form the subgroup [N, M] of U = <SW ∪ SX ∪ SY>, where N and M
// are the normal closures of SX and SY in U: every word of the shape
// [x^u, y^v] (u, v words in all variables) vanishes under either kill,
// the set of such values is closed under conjugation in U, and the
// standard commutator calculus decomposes any doubly-vanishing word into
// a product of them. The value sets are monotone in SW, SX, SY, so only
// subsets of maximal size (the bound, or the whole block) contribute.

fn group_combo_count(cospan: &WeightedCospan, bounds: &Bounds) -> u64 {
    let per = |len: usize, s: usize| -> u64 {
        let s = s.min(len);
        let mut c: u64 = 1;
        for i in 0..s {
            c = c.saturating_mul((len - i) as u64) / (i as u64 + 1);
        }
        c
    };
    per(cospan.w().len(), bounds.k)
        .saturating_mul(per(cospan.x().len(), bounds.m))
        .saturating_mul(per(cospan.y().len(), bounds.n))
}

fn mask_of(els: &[El]) -> u64 {
    els.iter().fold(0u64, |m, &e| m | (1u64 << e))
}

fn bits(mask: u64) -> impl Iterator<Item = El> {
    (0..64u16)
        .filter(move |&i| mask & (1u64 << i) != 0)
        .map(|i| i as El)
}

struct GroupCtx<'a> {
    alg: &'a FiniteAlgebra,
    ops: GroupOps,
    sg_memo: HashMap<u64, u64>,
    value_memo: HashMap<(u64, u64, u64), u64>,
}

impl<'a> GroupCtx<'a> {
    fn mul(&self, a: El, b: El) -> El {
        self.alg.op2(self.ops.mul, a, b)
    }

    fn inv(&self, a: El) -> El {
        self.alg.op1(self.ops.inv, a)
    }

    fn conj(&self, a: El, g: El) -> El {
        self.mul(self.mul(self.inv(g), a), g)
    }

    fn comm(&self, a: El, b: El) -> El {
        self.mul(self.mul(self.mul(self.inv(a), self.inv(b)), a), b)
    }

    /// Mask of the subgroup generated by the masked elements.
    fn subgroup(&mut self, gens: u64) -> u64 {
        if let Some(&m) = self.sg_memo.get(&gens) {
            return m;
        }
        let mut mask = gens | (1u64 << self.alg.zero());
        loop {
            let mut next = mask;
            for a in bits(mask) {
                for b in bits(mask) {
                    next |= 1u64 << self.mul(a, b);
                }
            }
            if next == mask {
                break;
            }
            mask = next;
        }
        self.sg_memo.insert(gens, mask);
        mask
    }

    /// Mask of the subgroup generated by all conjugated commutators
    /// [x^u, y^v] with x in sx, y in sy, u, v in the subgroup u_mask.
    fn commutator_value(&mut self, u_mask: u64, sx: u64, sy: u64) -> u64 {
        let key = (u_mask, sx, sy);
        if let Some(&m) = self.value_memo.get(&key) {
            return m;
        }
        let mut gens = 1u64 << self.alg.zero();
        for x in bits(sx) {
            for u in bits(u_mask) {
                let xu = self.conj(x, u);
                for y in bits(sy) {
                    for v in bits(u_mask) {
                        gens |= 1u64 << self.comm(xu, self.conj(y, v));
                    }
                }
            }
        }
        // A finite set closed under multiplication inside a group is a
        // subgroup, so multiplicative closure suffices.
        loop {
            let mut next = gens;
            for a in bits(gens) {
                for b in bits(gens) {
                    next |= 1u64 << self.mul(a, b);
                }
            }
            if next == gens {
                break;
            }
            gens = next;
        }
        self.value_memo.insert(key, gens);
        gens
    }
}

/// Lexicographic index subsets of size `s` from `0..len`.
fn index_subsets(len: usize, s: usize) -> Vec<Vec<usize>> {
    let s = s.min(len);
    let mut out = Vec::new();
    let mut pick: Vec<usize> = (0..s).collect();
    loop {
        out.push(pick.clone());
        if s == 0 {
            return out;
        }
        let mut j = s;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            pick[j] += 1;
            if pick[j] <= len - (s - j) {
                for t in j + 1..s {
                    pick[t] = pick[t - 1] + 1;
                }
                break;
            }
        }
    }
}

fn group_engine(
    alg: &FiniteAlgebra,
    ops: &GroupOps,
    cospan: &WeightedCospan,
    bounds: &Bounds,
    want_witnesses: bool,
) -> EngineOutput {
    let mut ctx = GroupCtx {
        alg,
        ops: *ops,
        sg_memo: HashMap::new(),
        value_memo: HashMap::new(),
    };
    let zero = alg.zero();
    let w_els = cospan.w().elements();
    let x_els = cospan.x().elements();
    let y_els = cospan.y().elements();
    let w_subsets = index_subsets(w_els.len(), bounds.k);
    let x_subsets = index_subsets(x_els.len(), bounds.m);
    let y_subsets = index_subsets(y_els.len(), bounds.n);

    let mut cumulative = 1u64 << zero;
    let mut witnessed: BTreeMap<El, Witness> = BTreeMap::new();
    for sw in &w_subsets {
        let swv: Vec<El> = sw.iter().map(|&i| w_els[i]).collect();
        for sx in &x_subsets {
            let sxv: Vec<El> = sx.iter().map(|&i| x_els[i]).collect();
            for sy in &y_subsets {
                let syv: Vec<El> = sy.iter().map(|&i| y_els[i]).collect();
                let gens_mask = mask_of(&swv) | mask_of(&sxv) | mask_of(&syv);
                let u_mask = ctx.subgroup(gens_mask);
                let value = ctx.commutator_value(u_mask, mask_of(&sxv), mask_of(&syv));
                let new = value & !cumulative;
                cumulative |= value;
                if new != 0 && want_witnesses {
                    witness_combo(alg, &ctx.ops, &swv, &sxv, &syv, new, &mut witnessed);
                }
            }
        }
    }

    let values: Vec<El> = bits(cumulative)
        .filter(|&e| (e as usize) < alg.size())
        .collect();
    EngineOutput {
        witnessed,
        values,
        complete: true,
    }
}

/// Build witnesses for the elements in `needed` (a mask) reachable from
/// one subset combination. All witnesses share one assignment: the
/// subset values in their slots.
fn witness_combo(
    alg: &FiniteAlgebra,
    ops: &GroupOps,
    swv: &[El],
    sxv: &[El],
    syv: &[El],
    needed: u64,
    witnessed: &mut BTreeMap<El, Witness>,
) {
    let assignment = Assignment::new(swv.to_vec(), sxv.to_vec(), syv.to_vec());
    let mul = |a: Term, b: Term| Term::app(ops.mul, vec![a, b]);
    let inv = |a: Term| Term::app(ops.inv, vec![a]);

    // Canonical term for every element of U = <slot values>, by closing
    // the slot variables under the signature.
    let mut gens: Vec<(Term, Vec<El>)> = Vec::new();
    for (i, &v) in swv.iter().enumerate() {
        gens.push((Term::var(Block::W, (i + 1) as u16), vec![v]));
    }
    for (i, &v) in sxv.iter().enumerate() {
        gens.push((Term::var(Block::X, (i + 1) as u16), vec![v]));
    }
    for (i, &v) in syv.iter().enumerate() {
        gens.push((Term::var(Block::Y, (i + 1) as u16), vec![v]));
    }
    let mut closure = VectorClosure::new(alg, 1, gens, alg.size());
    closure.run();
    let u_terms: Vec<(El, Term)> = closure
        .elements
        .iter()
        .map(|fe| (fe.vector[0], fe.term.clone()))
        .collect();

    // Conjugated commutators [x_i^u, y_j^v] in deterministic order.
    let eval_mul = |a: El, b: El| alg.op2(ops.mul, a, b);
    let eval_inv = |a: El| alg.op1(ops.inv, a);
    let eval_conj = |a: El, g: El| eval_mul(eval_mul(eval_inv(g), a), g);
    let conj_term = |a: &Term, g: &Term| mul(mul(inv(g.clone()), a.clone()), g.clone());

    let mut items: Vec<(El, Term)> = Vec::new();
    let mut seen = 0u64;
    for (i, &xv) in sxv.iter().enumerate() {
        let x_var = Term::var(Block::X, (i + 1) as u16);
        for (uv, ut) in &u_terms {
            let xu = eval_conj(xv, *uv);
            let xu_term = conj_term(&x_var, ut);
            for (j, &yv) in syv.iter().enumerate() {
                let y_var = Term::var(Block::Y, (j + 1) as u16);
                for (vv, vt) in &u_terms {
                    let yv_c = eval_conj(yv, *vv);
                    let value =
                        eval_mul(eval_mul(eval_mul(eval_inv(xu), eval_inv(yv_c)), xu), yv_c);
                    if seen & (1u64 << value) == 0 {
                        seen |= 1u64 << value;
                        let yv_term = conj_term(&y_var, vt);
                        let term = mul(
                            mul(
                                mul(inv(xu_term.clone()), inv(yv_term.clone())),
                                xu_term.clone(),
                            ),
                            yv_term,
                        );
                        items.push((value, term));
                    }
                }
            }
        }
    }

    // Multiplicative closure, first term per element wins.
    let mut round_start = 0;
    loop {
        let end = items.len();
        let mut added = false;
        for ai in 0..end {
            for bi in 0..end {
                if ai < round_start && bi < round_start {
                    continue;
                }
                let value = eval_mul(items[ai].0, items[bi].0);
                if seen & (1u64 << value) == 0 {
                    seen |= 1u64 << value;
                    let term = mul(items[ai].1.clone(), items[bi].1.clone());
                    items.push((value, term));
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
        round_start = end;
    }

    for (value, term) in items {
        if needed & (1u64 << value) != 0 {
            witnessed.entry(value).or_insert_with(|| Witness {
                term,
                assignment: assignment.clone(),
            });
        }
    }
}

// ---------------------------------------------------------------------------
// Commutative ring engine
// ---------------------------------------------------------------------------
//
// Any term vanishing at x = 0 and at y = 0 equals, as a function, the
// inclusion–exclusion t(w,x,y) − t(w,0,y) − t(w,x,0) + t(w,0,0) of any
// polynomial representative, whose monomials all carry at least one
// x-factor and one y-factor. Conversely every such monomial vanishes
// under both kills. The value set at the bounds is therefore the
// additive span of the values of monomials p_w · p_x · p_y with at most
// k, m, n factors per block (at least one for x and y), and the span is
// restored later by subalgebra generation.

struct Frag {
    value: El,
    term: Term,
    assignment: Assignment,
}

fn ring_engine(
    alg: &FiniteAlgebra,
    ops: &RingOps,
    cospan: &WeightedCospan,
    bounds: &Bounds,
    want_witnesses: bool,
) -> EngineOutput {
    // Exponents past the number of distinct powers any element attains
    // repeat earlier values.
    let max_exp = alg
        .elements()
        .map(|v| {
            let mut seen = vec![false; alg.size()];
            let mut p = v;
            let mut count = 0;
            while !seen[p as usize] {
                seen[p as usize] = true;
                count += 1;
                p = alg.op2(ops.mul, p, v);
            }
            count
        })
        .max()
        .unwrap_or(1);

    let w_prods = block_products(alg, ops, cospan.w().elements(), Block::W, bounds.k, max_exp);
    let x_prods = block_products(alg, ops, cospan.x().elements(), Block::X, bounds.m, max_exp);
    let y_prods = block_products(alg, ops, cospan.y().elements(), Block::Y, bounds.n, max_exp);

    let mut witnessed: BTreeMap<El, Witness> = BTreeMap::new();
    let mut seen = vec![false; alg.size()];
    let mut values = Vec::new();
    let push = |value: El,
                witness: Option<Witness>,
                seen: &mut Vec<bool>,
                values: &mut Vec<El>,
                witnessed: &mut BTreeMap<El, Witness>| {
        if !seen[value as usize] {
            seen[value as usize] = true;
            values.push(value);
            if let Some(w) = witness {
                witnessed.insert(value, w);
            }
        }
    };

    for px in &x_prods {
        for py in &y_prods {
            let xy = alg.op2(ops.mul, px.value, py.value);
            let base = want_witnesses.then(|| frag_product(ops, &[px, py]));
            push(xy, base, &mut seen, &mut values, &mut witnessed);
            for pw in &w_prods {
                let wxy = alg.op2(ops.mul, pw.value, xy);
                let full = want_witnesses.then(|| frag_product(ops, &[pw, px, py]));
                push(wxy, full, &mut seen, &mut values, &mut witnessed);
            }
        }
    }
    values.sort_unstable();
    EngineOutput {
        witnessed,
        values,
        complete: true,
    }
}

/// Products of 1..=count factors v^a (v in the block, 1 <= a <= max_exp)
/// with witnessing terms; factor i uses slot variable i+1 of the block.
/// First term per value wins, in (level, previous value, base, exponent)
/// order.
fn block_products(
    alg: &FiniteAlgebra,
    ops: &RingOps,
    block: &[El],
    var_block: Block,
    count: usize,
    max_exp: usize,
) -> Vec<Frag> {
    let mut out: Vec<Frag> = Vec::new();
    let mut seen = vec![false; alg.size()];
    let mut level: Vec<Frag> = Vec::new();
    for j in 1..=count {
        let var = Term::var(var_block, j as u16);
        let mut next: Vec<Frag> = Vec::new();
        let mut next_seen = vec![false; alg.size()];
        let prev: Vec<(El, Term, Assignment)> = if j == 1 {
            vec![(El::MAX, Term::var(var_block, 1), Assignment::default())]
        } else {
            level
                .iter()
                .map(|f| (f.value, f.term.clone(), f.assignment.clone()))
                .collect()
        };
        for (pv, pt, pa) in &prev {
            for &v in block {
                let mut pow_val = v;
                let mut pow_term = var.clone();
                for _ in 0..max_exp {
                    let (value, term) = if j == 1 {
                        (pow_val, pow_term.clone())
                    } else {
                        (
                            alg.op2(ops.mul, *pv, pow_val),
                            Term::app(ops.mul, vec![pt.clone(), pow_term.clone()]),
                        )
                    };
                    if !next_seen[value as usize] {
                        next_seen[value as usize] = true;
                        let mut assignment = pa.clone();
                        assignment_slot(&mut assignment, var_block).push(v);
                        next.push(Frag {
                            value,
                            term,
                            assignment,
                        });
                    }
                    pow_val = alg.op2(ops.mul, pow_val, v);
                    pow_term = Term::app(ops.mul, vec![pow_term, var.clone()]);
                }
            }
        }
        for f in &next {
            if !seen[f.value as usize] {
                seen[f.value as usize] = true;
                out.push(Frag {
                    value: f.value,
                    term: f.term.clone(),
                    assignment: f.assignment.clone(),
                });
            }
        }
        level = next;
        if level.is_empty() {
            break;
        }
    }
    out
}

fn assignment_slot(a: &mut Assignment, block: Block) -> &mut Vec<El> {
    match block {
        Block::W => &mut a.w,
        Block::X => &mut a.x,
        Block::Y => &mut a.y,
        Block::Ambient => &mut a.ambient,
    }
}

/// Multiply fragments from distinct blocks into one witness. Variable
/// namespaces are disjoint, so assignments concatenate without
/// shifting.
fn frag_product(ops: &RingOps, parts: &[&Frag]) -> Witness {
    let mut term = parts[0].term.clone();
    let mut assignment = parts[0].assignment.clone();
    for p in &parts[1..] {
        term = Term::app(ops.mul, vec![term, p.term.clone()]);
        assignment.extend(&p.assignment);
    }
    Witness { term, assignment }
}

// ---------------------------------------------------------------------------
// Free-closure engine
// ---------------------------------------------------------------------------
//
// Evaluate the free closure of the k+m+n variables on just the rows
// that matter: all x-kill rows (x variables zeroed, others ranging over
// the whole algebra), all y-kill rows, and the collection grid (block
// values only). An element qualifies when its kill rows all read zero —
// exactly the identity required of a commutator term — and contributes
// its grid values. Complete only when the closure reaches a fixpoint
// within caps.

fn free_closure_engine(
    alg: &FiniteAlgebra,
    cospan: &WeightedCospan,
    bounds: &Bounds,
    want_witnesses: bool,
    caps: &Caps,
) -> Result<EngineOutput, Error> {
    let (k, m, n) = (bounds.k, bounds.m, bounds.n);
    let nvars = k + m + n;
    let zero = alg.zero();
    let full: Vec<El> = alg.elements().collect();
    let zero_only = [zero];

    let row_sets: [Vec<&[El]>; 3] = [
        // x-kill: x variables pinned to zero, the rest range over A.
        (0..nvars)
            .map(|p| {
                if p >= k && p < k + m {
                    &zero_only[..]
                } else {
                    &full[..]
                }
            })
            .collect(),
        // y-kill.
        (0..nvars)
            .map(|p| {
                if p >= k + m {
                    &zero_only[..]
                } else {
                    &full[..]
                }
            })
            .collect(),
        // Collection grid.
        (0..nvars)
            .map(|p| {
                if p < k {
                    cospan.w().elements()
                } else if p < k + m {
                    cospan.x().elements()
                } else {
                    cospan.y().elements()
                }
            })
            .collect(),
    ];

    let mut total_rows: usize = 0;
    for set in &row_sets {
        let mut rows = 1usize;
        for domain in set {
            rows = match rows.checked_mul(domain.len()) {
                Some(r) if r <= ROW_BUDGET => r,
                _ => return Ok(EngineOutput::empty(false)),
            };
        }
        total_rows += rows;
    }
    if total_rows > ROW_BUDGET {
        return Ok(EngineOutput::empty(false));
    }

    let mut rows: Vec<Vec<El>> = Vec::new();
    let mut row_index: HashMap<Vec<El>, usize> = HashMap::new();
    let mut classes: [Vec<usize>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for (class, set) in row_sets.iter().enumerate() {
        if set.iter().any(|d| d.is_empty()) {
            continue;
        }
        let mut idx = vec![0usize; nvars];
        loop {
            let row: Vec<El> = (0..nvars).map(|p| set[p][idx[p]]).collect();
            let id = *row_index.entry(row.clone()).or_insert_with(|| {
                rows.push(row);
                rows.len() - 1
            });
            classes[class].push(id);
            let mut p = nvars;
            loop {
                if p == 0 {
                    break;
                }
                p -= 1;
                idx[p] += 1;
                if idx[p] < set[p].len() {
                    break;
                }
                idx[p] = 0;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
    }

    let coords = rows.len();
    let mut generators: Vec<(Term, Vec<El>)> = Vec::new();
    for p in 0..nvars {
        let (block, index) = if p < k {
            (Block::W, p + 1)
        } else if p < k + m {
            (Block::X, p - k + 1)
        } else {
            (Block::Y, p - k - m + 1)
        };
        let vector: Vec<El> = rows.iter().map(|r| r[p]).collect();
        generators.push((Term::var(block, index as u16), vector));
    }

    let cap = caps.effective_free_cap(coords.max(1));
    let mut closure = VectorClosure::new(alg, coords, generators, cap);
    let complete = closure.run();

    let mut witnessed: BTreeMap<El, Witness> = BTreeMap::new();
    let mut seen = vec![false; alg.size()];
    let mut values = Vec::new();
    for fe in &closure.elements {
        let qualifies = classes[0].iter().all(|&r| fe.vector[r] == zero)
            && classes[1].iter().all(|&r| fe.vector[r] == zero);
        if !qualifies {
            continue;
        }
        for &r in &classes[2] {
            let value = fe.vector[r];
            if seen[value as usize] {
                continue;
            }
            seen[value as usize] = true;
            values.push(value);
            if want_witnesses {
                let row = &rows[r];
                let assignment = Assignment::new(
                    row[..k].to_vec(),
                    row[k..k + m].to_vec(),
                    row[k + m..].to_vec(),
                );
                witnessed.insert(
                    value,
                    Witness {
                        term: fe.term.clone(),
                        assignment,
                    },
                );
            }
        }
    }
    values.sort_unstable();
    Ok(EngineOutput {
        witnessed,
        values,
        complete,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders;
    use crate::congruence;

    fn caps() -> Caps {
        Caps::default()
    }

    fn cospan(alg: &FiniteAlgebra, x: &[usize], y: &[usize], w: &[usize]) -> WeightedCospan {
        WeightedCospan::new(
            alg,
            alg.subuniverse_generate(x).unwrap(),
            alg.subuniverse_generate(y).unwrap(),
            alg.subuniverse_generate(w).unwrap(),
        )
        .unwrap()
    }

    /// Exhaustive reference for groups of tiny order: the subgroup
    /// generated by commutators [x^g, y^h] over the whole parent group —
    /// the normal-closure commutator — must contain the engine value at
    /// full weight, and the plain commutator subgroup <[x,y]> must be
    /// contained in it at any weight.
    fn plain_commutator_subgroup(
        alg: &FiniteAlgebra,
        ops: &GroupOps,
        xs: &[El],
        ys: &[El],
    ) -> Vec<El> {
        let mut gens = Vec::new();
        for &x in xs {
            for &y in ys {
                let ix = alg.op1(ops.inv, x);
                let iy = alg.op1(ops.inv, y);
                gens.push(
                    alg.op2(ops.mul, alg.op2(ops.mul, alg.op2(ops.mul, ix, iy), x), y) as usize,
                );
            }
        }
        alg.subuniverse_generate(&gens).unwrap().elements().to_vec()
    }

    #[test]
    fn group_engine_matches_plain_commutators_at_zero_weight() {
        let s3 = builders::symmetric_group(3).unwrap();
        let ops = s3.structure().group.unwrap();
        let full: Vec<usize> = (0..s3.size()).collect();
        let c = cospan(&s3, &full, &full, &[]);
        let out = collect(&s3, &c, &Bounds::default(), true, &caps()).unwrap();
        assert!(out.complete);
        let value = s3
            .subuniverse_generate(&out.values.iter().map(|&e| e as usize).collect::<Vec<_>>())
            .unwrap();
        let expected = plain_commutator_subgroup(
            &s3,
            &ops,
            &(0..6).collect::<Vec<El>>(),
            &(0..6).collect::<Vec<El>>(),
        );
        // The derived subgroup of S3 is A3 = {id, r, r^2}, order 3.
        assert_eq!(value.elements(), expected.as_slice());
        assert_eq!(value.len(), 3);
        for (&e, w) in &out.witnessed {
            assert_eq!(w.evaluate(&s3).unwrap(), e);
        }
    }

    #[test]
    fn group_engine_weight_extends_conjugators() {
        // X = Y = a cyclic subgroup of order 2 in S3. At weight {0} the
        // commutators [x,y] with x, y powers of one transposition are
        // trivial; at full weight, conjugation by outside elements
        // produces other transpositions and the commutators generate
        // the rotation subgroup.
        let s3 = builders::symmetric_group(3).unwrap();
        let t = vec![1usize];
        let zero_weight = cospan(&s3, &t, &t, &[]);
        let out0 = collect(&s3, &zero_weight, &Bounds::default(), false, &caps()).unwrap();
        assert!(out0.complete);
        let v0 = s3
            .subuniverse_generate(&out0.values.iter().map(|&e| e as usize).collect::<Vec<_>>())
            .unwrap();
        assert_eq!(v0.elements(), &[0]);

        let full: Vec<usize> = (0..6).collect();
        let full_weight = cospan(&s3, &t, &t, &full);
        let out1 = collect(&s3, &full_weight, &Bounds::default(), true, &caps()).unwrap();
        let v1 = s3
            .subuniverse_generate(&out1.values.iter().map(|&e| e as usize).collect::<Vec<_>>())
            .unwrap();
        assert_eq!(v1.len(), 3);
        for (&e, w) in &out1.witnessed {
            assert_eq!(w.evaluate(&s3).unwrap(), e);
        }
    }

    #[test]
    fn ring_engine_enumerates_weighted_monomials() {
        // Z8: X = Y = (2). Products xy land in (4); weighted monomials
        // wxy stay inside (4) as well.
        let z8 = builders::ring_zn(8);
        let ideal2 = vec![0usize, 2, 4, 6];
        let full: Vec<usize> = (0..8).collect();
        let c = cospan(&z8, &ideal2, &ideal2, &full);
        let out = collect(&z8, &c, &Bounds::default(), true, &caps()).unwrap();
        assert!(out.complete);
        assert_eq!(out.values, vec![0, 4]);
        for (&e, w) in &out.witnessed {
            assert_eq!(w.evaluate(&z8).unwrap(), e);
        }
    }

    #[test]
    fn ring_engine_agrees_with_free_closure_on_f2() {
        // On the two-element field the free-closure route runs to a
        // fixpoint, giving an exact independent check of the monomial
        // engine.
        let f2 = builders::ring_zn(2);
        let full: Vec<usize> = vec![0, 1];
        let c = cospan(&f2, &full, &full, &full);
        let bounds = Bounds::new(1, 1, 1);
        let ring = ring_engine(&f2, &f2.structure().ring.unwrap(), &c, &bounds, false);
        let free = free_closure_engine(&f2, &c, &bounds, false, &caps()).unwrap();
        assert!(ring.complete && free.complete);
        let close = |vals: &[El]| {
            f2.subuniverse_generate(&vals.iter().map(|&e| e as usize).collect::<Vec<_>>())
                .unwrap()
                .elements()
                .to_vec()
        };
        assert_eq!(close(&ring.values), close(&free.values));
    }

    #[test]
    fn ring_engine_contains_free_closure_values_on_nilpotent_truncation() {
        // F2[t]/(t^3): the generic route may stop at its work budget,
        // but whatever it collects must lie inside the exact monomial
        // value set.
        let f2t3 = builders::ring_poly_nilpotent(2, 3).unwrap();
        let x: Vec<usize> = vec![1];
        let c = cospan(&f2t3, &x, &x, &[]);
        let bounds = Bounds::new(1, 1, 1);
        let ring = ring_engine(&f2t3, &f2t3.structure().ring.unwrap(), &c, &bounds, false);
        assert!(ring.complete);
        let free = free_closure_engine(&f2t3, &c, &bounds, false, &caps()).unwrap();
        let ring_span = f2t3
            .subuniverse_generate(&ring.values.iter().map(|&e| e as usize).collect::<Vec<_>>())
            .unwrap();
        for &v in &free.values {
            assert!(
                ring_span.contains(v),
                "free route found {v} outside the closed form"
            );
        }
        if free.complete {
            let free_span = f2t3
                .subuniverse_generate(&free.values.iter().map(|&e| e as usize).collect::<Vec<_>>())
                .unwrap();
            assert_eq!(ring_span.elements(), free_span.elements());
        }
    }

    #[test]
    fn free_closure_engine_handles_loops() {
        let lp = builders::nonassoc_loop_5();
        let full: Vec<usize> = (0..5).collect();
        let c = cospan(&lp, &full, &full, &[]);
        let out = collect(&lp, &c, &Bounds::new(0, 1, 1), true, &caps()).unwrap();
        // Soundness regardless of completeness: witnesses re-evaluate
        // and all values really are reachable.
        for (&e, w) in &out.witnessed {
            assert_eq!(w.evaluate(&lp).unwrap(), e);
        }
        // This small loop is not associative and not commutative; its
        // commutator terms at (0,1,1) already produce nonzero values.
        assert!(out.values.len() > 1);
    }

    #[test]
    fn affine_shortcut_empties_abelian_collections() {
        let z6 = builders::cyclic_group(6);
        let full: Vec<usize> = (0..6).collect();
        let c = cospan(&z6, &full, &full, &full);
        let out = collect(&z6, &c, &Bounds::default(), true, &caps()).unwrap();
        assert!(out.complete);
        assert!(out.values.is_empty());
    }

    #[test]
    fn group_engine_matches_free_closure_route() {
        // Independent cross-check of the two engines on S3 with a
        // nontrivial weight: force the generic route by calling it
        // directly.
        let s3 = builders::symmetric_group(3).unwrap();
        let rot = vec![2usize]; // a rotation, generating A3
        let refl = vec![1usize];
        let c = cospan(&s3, &rot, &refl, &[]);
        let bounds = Bounds::new(0, 1, 1);
        let ops = s3.structure().group.unwrap();
        let fast = group_engine(&s3, &ops, &c, &bounds, false);
        let slow = free_closure_engine(&s3, &c, &bounds, false, &caps()).unwrap();
        assert!(fast.complete && slow.complete);
        let close = |vals: &[El]| {
            s3.subuniverse_generate(&vals.iter().map(|&e| e as usize).collect::<Vec<_>>())
                .unwrap()
                .elements()
                .to_vec()
        };
        assert_eq!(close(&fast.values), close(&slow.values));
    }

    #[test]
    fn normal_closure_of_engine_value_is_an_ideal() {
        let s3 = builders::symmetric_group(3).unwrap();
        let full: Vec<usize> = (0..6).collect();
        let t = vec![1usize];
        let c = cospan(&s3, &full, &t, &[]);
        let out = collect(&s3, &c, &Bounds::default(), false, &caps()).unwrap();
        let gens: Vec<usize> = out.values.iter().map(|&e| e as usize).collect();
        let nc = congruence::normal_closure(&s3, &gens).unwrap();
        // Ideals of S3 are {0}, A3, S3.
        assert!(matches!(nc.len(), 1 | 3 | 6));
    }
}
