//! The Smith commutator of congruences.
//!
//! `[α, β]` is the smallest congruence δ such that the term condition
//! holds between α and β modulo δ. This implementation uses the
//! pair-algebra construction, which is valid in Mal'tsev varieties: on
//! the algebra of α-pairs, the congruence Δ generated by identifying
//! `(x,x)` with `(y,y)` for all `x β y` relates `(x,y)` to `(x,x)`
//! exactly when `x [α,β] y`. A Mal'tsev term is therefore a
//! precondition; callers with algebras outside any detectable Mal'tsev
//! variety get an error, never a wrong congruence.

use std::collections::HashMap;

use crate::algebra::{El, FiniteAlgebra, RawAlgebra, RawOp};
use crate::caps::Caps;
use crate::congruence::{self, Congruence};
use crate::error::Error;
use crate::free::{maltsev_term, MaltsevOutcome};

/// The Smith commutator `[alpha, beta]` on a Mal'tsev algebra.
pub fn smith_commutator(
    alg: &FiniteAlgebra,
    alpha: &Congruence,
    beta: &Congruence,
    caps: &Caps,
) -> Result<Congruence, Error> {
    if alpha.parent_uid() != alg.uid() || beta.parent_uid() != alg.uid() {
        return Err(Error::ParentMismatch {
            operation: "Smith commutator",
        });
    }
    match maltsev_term(alg, caps) {
        MaltsevOutcome::Found(_) => {}
        MaltsevOutcome::Absent => return Err(Error::MaltsevRequired),
        MaltsevOutcome::Unknown { reached, cap } => {
            return Err(Error::Refused {
                reason: format!(
                    "could not decide whether a Mal'tsev term exists \
                     (free algebra search reached {reached} of cap {cap})"
                ),
            })
        }
    }

    // The algebra of alpha-pairs, ordered lexicographically so that the
    // pair (0,0) is element 0 — the construction's zero.
    let pairs: Vec<(El, El)> = {
        let mut p = alpha.related_pairs();
        p.sort_unstable();
        p
    };
    if pairs.len() > caps.algebra_cap {
        return Err(Error::SizeCap {
            required: pairs.len(),
            cap: caps.algebra_cap,
        });
    }
    debug_assert_eq!(pairs[0], (alg.zero(), alg.zero()));
    let mut pair_id: HashMap<(El, El), usize> = HashMap::new();
    for (i, &p) in pairs.iter().enumerate() {
        pair_id.insert(p, i);
    }

    let mut operations = Vec::new();
    for (op_idx, op) in alg.signature().ops().iter().enumerate() {
        let r = op.arity;
        let mut rows = 1usize;
        for _ in 0..r {
            rows = rows.saturating_mul(pairs.len());
        }
        let mut table = vec![0usize; rows];
        let mut idx = vec![0usize; r];
        for slot in table.iter_mut() {
            let left: Vec<El> = idx.iter().map(|&i| pairs[i].0).collect();
            let right: Vec<El> = idx.iter().map(|&i| pairs[i].1).collect();
            let out = (alg.app(op_idx, &left), alg.app(op_idx, &right));
            *slot = *pair_id
                .get(&out)
                .expect("congruence classes are closed under operations");
            for j in (0..r).rev() {
                idx[j] += 1;
                if idx[j] < pairs.len() {
                    break;
                }
                idx[j] = 0;
            }
        }
        operations.push(RawOp {
            name: op.name.clone(),
            arity: r,
            table,
        });
    }
    let pair_alg = FiniteAlgebra::validate(RawAlgebra {
        name: format!("{}-pairs", alg.name()),
        size: pairs.len(),
        zero: 0,
        operations,
        declared_properties: vec![],
    })
    .map_err(Error::Validation)?;

    // Δ = Cg({ ((x,x),(y,y)) : x β y }) on the pair algebra.
    let diag = |x: El| pair_id[&(x, x)];
    let mut delta_gens: Vec<(usize, usize)> = Vec::new();
    for (x, y) in beta.related_pairs() {
        delta_gens.push((diag(x), diag(y)));
    }
    let delta = congruence::cg(&pair_alg, &delta_gens)?;

    // x [α,β] y when (x,y) is Δ-related to (x,x).
    let n = alg.size();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut a: usize) -> usize {
        while parent[a] != a {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        a
    }
    for (i, &(x, y)) in pairs.iter().enumerate() {
        if delta.same(i as El, diag(x) as El) {
            let (ra, rb) = (find(&mut parent, x as usize), find(&mut parent, y as usize));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let canon: Vec<El> = (0..n).map(|a| find(&mut parent, a) as El).collect();
    let result = Congruence::from_rep(alg, canon)?;

    // Sanity: the Smith commutator refines the meet of its arguments.
    let meet = congruence::meet(alg, alpha, beta)?;
    if !result.leq(&meet) {
        return Err(Error::Internal(
            "Smith commutator exceeds the meet of its arguments".to_string(),
        ));
    }
    Ok(result)
}

/// Independent reference: the smallest congruence δ satisfying the term
/// condition TC(α, β; δ), found by scanning all congruences of a small
/// algebra. The term condition is checked against the subalgebra of
/// quadruples generated by `(a,a,b,b)` for `a α b` and `(u,v,u,v)` for
/// `u β v`: a congruence δ satisfies TC when every generated quadruple
/// `(p,q,r,s)` with `p δ q` also has `r δ s`. Only for cross-checking;
/// refuses algebras with more than 8 elements.
pub fn smith_term_condition_oracle(
    alg: &FiniteAlgebra,
    alpha: &Congruence,
    beta: &Congruence,
) -> Result<Congruence, Error> {
    if alpha.parent_uid() != alg.uid() || beta.parent_uid() != alg.uid() {
        return Err(Error::ParentMismatch {
            operation: "term condition oracle",
        });
    }
    if alg.size() > 8 {
        return Err(Error::Refused {
            reason: format!(
                "term-condition oracle is limited to 8 elements, got {}",
                alg.size()
            ),
        });
    }
    // Close the generating quadruples under the operations
    // component-wise.
    let mut seeds: Vec<[El; 4]> = Vec::new();
    for (a, b) in alpha.related_pairs() {
        seeds.push([a, a, b, b]);
    }
    for (u, v) in beta.related_pairs() {
        seeds.push([u, v, u, v]);
    }
    let quads = generate_quads(alg, &seeds)?;
    let satisfies = |delta: &Congruence| {
        quads
            .iter()
            .all(|q| !delta.same(q[0], q[1]) || delta.same(q[2], q[3]))
    };
    let mut best: Option<Congruence> = None;
    for delta in congruence::all_congruences(alg)? {
        if satisfies(&delta) {
            best = Some(match best {
                None => delta,
                Some(b) => congruence::meet(alg, &b, &delta)?,
            });
        }
    }
    let best = best
        .ok_or_else(|| Error::Internal("no congruence satisfies the term condition".to_string()))?;
    if !satisfies(&best) {
        return Err(Error::Internal(
            "meet of term-condition congruences fails the term condition".to_string(),
        ));
    }
    Ok(best)
}

/// Component-wise closure of quadruples under all operations, processed
/// with a frontier worklist so total work stays near quadratic in the
/// final size. Nullary operations contribute their constant diagonal.
fn generate_quads(alg: &FiniteAlgebra, seeds: &[[El; 4]]) -> Result<Vec<[El; 4]>, Error> {
    use std::collections::HashSet;
    let mut seen: HashSet<[El; 4]> = HashSet::new();
    let mut list: Vec<[El; 4]> = Vec::new();
    let push = |q: [El; 4], seen: &mut HashSet<[El; 4]>, list: &mut Vec<[El; 4]>| {
        if seen.insert(q) {
            list.push(q);
        }
    };
    for &q in seeds {
        push(q, &mut seen, &mut list);
    }
    for (op_idx, op) in alg.signature().ops().iter().enumerate() {
        if op.arity == 0 {
            let v = alg.op0(op_idx);
            push([v; 4], &mut seen, &mut list);
        }
    }

    let mut frontier = 0usize;
    while frontier < list.len() {
        let end = list.len();
        for (op_idx, op) in alg.signature().ops().iter().enumerate() {
            match op.arity {
                0 => {}
                1 => {
                    for i in frontier..end {
                        let a = list[i];
                        let q = [
                            alg.app(op_idx, &[a[0]]),
                            alg.app(op_idx, &[a[1]]),
                            alg.app(op_idx, &[a[2]]),
                            alg.app(op_idx, &[a[3]]),
                        ];
                        push(q, &mut seen, &mut list);
                    }
                }
                2 => {
                    for i in frontier..end {
                        for j in 0..end {
                            for (x, y) in [(list[i], list[j]), (list[j], list[i])] {
                                let q = [
                                    alg.app(op_idx, &[x[0], y[0]]),
                                    alg.app(op_idx, &[x[1], y[1]]),
                                    alg.app(op_idx, &[x[2], y[2]]),
                                    alg.app(op_idx, &[x[3], y[3]]),
                                ];
                                push(q, &mut seen, &mut list);
                            }
                        }
                    }
                }
                r => {
                    // Rare in practice; sweep all tuples touching the
                    // frontier, within a hard work budget.
                    let total = match end.checked_pow(r as u32) {
                        Some(t) if t <= 1 << 26 => t,
                        _ => {
                            return Err(Error::Refused {
                                reason: format!(
                                    "term-condition matrix sweep for arity-{r} \
                                     operation is too large"
                                ),
                            })
                        }
                    };
                    for flat in 0..total {
                        let mut rest = flat;
                        let mut idx = vec![0usize; r];
                        let mut any_new = false;
                        for j in (0..r).rev() {
                            idx[j] = rest % end;
                            rest /= end;
                            any_new |= idx[j] >= frontier;
                        }
                        if !any_new {
                            continue;
                        }
                        let mut q = [0 as El; 4];
                        for (c, slot) in q.iter_mut().enumerate() {
                            let args: Vec<El> = idx.iter().map(|&i| list[i][c]).collect();
                            *slot = alg.app(op_idx, &args);
                        }
                        push(q, &mut seen, &mut list);
                    }
                }
            }
        }
        frontier = end;
    }
    list.sort_unstable();
    Ok(list)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders;

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn abelian_groups_have_trivial_smith_commutator() {
        let z6 = builders::cyclic_group(6);
        let full = Congruence::full(&z6);
        let c = smith_commutator(&z6, &full, &full, &caps()).unwrap();
        assert!(c.is_identity());
    }

    #[test]
    fn smith_full_full_on_s3_has_rotation_zero_class() {
        let s3 = builders::symmetric_group(3).unwrap();
        let full = Congruence::full(&s3);
        let c = smith_commutator(&s3, &full, &full, &caps()).unwrap();
        let zc = c.zero_class(&s3).unwrap();
        assert_eq!(zc.len(), 3);
        assert!(zc.contains(0));
    }

    #[test]
    fn smith_with_identity_argument_is_identity() {
        let q8 = builders::quaternion_group();
        let id = Congruence::identity(&q8);
        let full = Congruence::full(&q8);
        let c = smith_commutator(&q8, &full, &id, &caps()).unwrap();
        assert!(c.is_identity());
    }

    #[test]
    fn smith_agrees_with_term_condition_oracle() {
        let algs = vec![
            builders::symmetric_group(3).unwrap(),
            builders::cyclic_group(4),
            builders::ring_zn(4),
        ];
        for alg in &algs {
            for alpha in congruence::all_congruences(alg).unwrap() {
                for beta in congruence::all_congruences(alg).unwrap() {
                    let fast = smith_commutator(alg, &alpha, &beta, &caps()).unwrap();
                    let slow = smith_term_condition_oracle(alg, &alpha, &beta).unwrap();
                    assert!(
                        fast.leq(&slow) && slow.leq(&fast),
                        "Smith mismatch on {} for {:?} vs {:?}",
                        alg.name(),
                        fast.classes(),
                        slow.classes()
                    );
                }
            }
        }
    }

    #[test]
    fn smith_agrees_with_term_condition_oracle_on_q8() {
        // Spot checks on the 8-element edge of the oracle's size guard.
        let q8 = builders::quaternion_group();
        let full = Congruence::full(&q8);
        let id = Congruence::identity(&q8);
        let center = congruence::congruence_from_normal(&q8, &[0, 1]).unwrap();
        for (alpha, beta) in [(&full, &full), (&full, &center), (&center, &id)] {
            let fast = smith_commutator(&q8, alpha, beta, &caps()).unwrap();
            let slow = smith_term_condition_oracle(&q8, alpha, beta).unwrap();
            assert!(fast.leq(&slow) && slow.leq(&fast));
        }
    }

    #[test]
    fn smith_requires_a_maltsev_term() {
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
        let full = Congruence::full(&alg);
        let err = smith_commutator(&alg, &full, &full, &caps()).unwrap_err();
        assert!(matches!(err, Error::MaltsevRequired));
        assert!(err.to_string().contains("outside Mal'tsev varieties"));
    }
}
