//! Cross-validation, divergence search, and the verification suite.
//!
//! Three layers of defense against a wrong commutator value. The
//! cross-validator computes the same normal weight-one commutator along
//! every independent route that applies — term enumeration, the Smith
//! zero class, the commutative-ring closed form — and reports any
//! conflict between certified-exact answers. The divergence search
//! sweeps all subalgebra pairs of a small algebra and reports exactly
//! where the weight changes the subobject commutator, with a witness
//! term for each separation. The verification suite checks the
//! structural laws the family must satisfy — monotonicity in the
//! weight, symmetry in the arguments, idempotent normal closures,
//! collapse under a joint-generation hypothesis, preservation under
//! quotients, and agreement with the congruence-level commutator —
//! grading each violation as a hard defect or a soft expectation
//! depending on what the algebra's structure actually guarantees.

use serde_json::{json, Value};

use crate::algebra::{El, FiniteAlgebra, Subuniverse};
use crate::caps::Caps;
use crate::congruence::{self, Congruence};
use crate::error::Error;
use crate::free::{maltsev_term, MaltsevOutcome};

use super::ring_oracle::ring_weighted_commutator;
use super::smith::smith_commutator;
use super::{
    normal_from_base, weighted_commutator, weighted_normal_commutator, Bounds, CommutatorResult,
    Status, WeightedCospan, Witness,
};

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

/// One independent route to the same commutator value.
#[derive(Clone, Debug)]
pub struct RouteValue {
    pub route: &'static str,
    pub value: Vec<El>,
    pub exact: bool,
}

/// The normal weight-one commutator computed along every applicable
/// route. `disagreement` is set when two routes conflict beyond what
/// their statuses allow — which indicates a defect, not an input error.
#[derive(Clone, Debug)]
pub struct CrossValidation {
    pub routes: Vec<RouteValue>,
    pub disagreement: Option<String>,
}

impl CrossValidation {
    pub fn to_json(&self) -> Value {
        json!({
            "routes": self
                .routes
                .iter()
                .map(|r| json!({"route": r.route, "value": r.value, "exact": r.exact}))
                .collect::<Vec<_>>(),
            "disagreement": self.disagreement,
        })
    }
}

/// Compute `N[X,Y]` at full weight by term enumeration, and — when the
/// preconditions hold — by the Smith commutator of the generated
/// congruences and by the ring closed form, then compare. Routes that
/// don't apply are omitted; route-level refusals are tolerated, anything
/// else propagates.
pub fn cross_validate(
    alg: &FiniteAlgebra,
    x: &Subuniverse,
    y: &Subuniverse,
    bounds: &Bounds,
    caps: &Caps,
) -> Result<CrossValidation, Error> {
    let cospan = WeightedCospan::new(alg, x.clone(), y.clone(), full_sub(alg)?)?;
    let mut routes = Vec::new();

    let term = weighted_normal_commutator(alg, &cospan, bounds, caps)?;
    routes.push(RouteValue {
        route: "term_enumeration",
        value: term.value.elements().to_vec(),
        exact: term.status == Status::Exact,
    });

    if matches!(maltsev_term(alg, caps), MaltsevOutcome::Found(_)) {
        if let Some((cx, cy)) = normal_pair(alg, x, y)? {
            match smith_commutator(alg, &cx, &cy, caps) {
                Ok(s) => routes.push(RouteValue {
                    route: "smith_zero_class",
                    value: s.zero_class(alg)?.elements().to_vec(),
                    exact: true,
                }),
                Err(e) => tolerate(e)?,
            }
        }
    }

    match ring_weighted_commutator(alg, &cospan) {
        Ok(r) => routes.push(RouteValue {
            route: "ring_closed_form",
            value: r.normal.value.elements().to_vec(),
            exact: true,
        }),
        Err(e) => tolerate(e)?,
    }

    let mut disagreement = None;
    for i in 0..routes.len() {
        for j in i + 1..routes.len() {
            let (a, b) = (&routes[i], &routes[j]);
            let conflict = match (a.exact, b.exact) {
                (true, true) => a.value != b.value,
                (true, false) => !is_subset(&b.value, &a.value),
                (false, true) => !is_subset(&a.value, &b.value),
                (false, false) => false,
            };
            if conflict && disagreement.is_none() {
                disagreement = Some(format!(
                    "{} produced {} but {} produced {}",
                    a.route,
                    fmt_els(&a.value),
                    b.route,
                    fmt_els(&b.value)
                ));
            }
        }
    }
    Ok(CrossValidation {
        routes,
        disagreement,
    })
}

/// The congruences generated by two normal subalgebras, or `None` when
/// either side is not normal.
fn normal_pair(
    alg: &FiniteAlgebra,
    x: &Subuniverse,
    y: &Subuniverse,
) -> Result<Option<(Congruence, Congruence)>, Error> {
    let cx = match congruence::congruence_from_normal(alg, &as_usize(x.elements())) {
        Ok(c) => c,
        Err(e) => return tolerate(e).map(|_| None),
    };
    let cy = match congruence::congruence_from_normal(alg, &as_usize(y.elements())) {
        Ok(c) => c,
        Err(e) => return tolerate(e).map(|_| None),
    };
    Ok(Some((cx, cy)))
}

// ---------------------------------------------------------------------------
// Divergence search
// ---------------------------------------------------------------------------

/// The subobject commutator at one particular weight.
#[derive(Clone, Debug)]
pub struct WeightLayer {
    pub weight: Vec<El>,
    pub value: Vec<El>,
    pub exact: bool,
}

/// One subalgebra pair whose commutator strictly grows between weight
/// `{0}` and full weight, with a witness for a separating element.
#[derive(Clone, Debug)]
pub struct Divergence {
    pub x: Vec<El>,
    pub y: Vec<El>,
    pub zero_value: Vec<El>,
    pub full_value: Vec<El>,
    /// Elements of the full-weight value missing from the zero-weight
    /// value.
    pub separating: Vec<El>,
    /// A separating element and the term that reaches it at full weight.
    pub witness: Option<(El, Witness)>,
    /// Whether the normal closures differ as well.
    pub normal_diverges: bool,
    /// Per-weight values over every subalgebra weight (only filled by a
    /// `with_weights` search).
    pub chain: Vec<WeightLayer>,
}

#[derive(Clone, Debug)]
pub struct DivergenceReport {
    pub algebra: String,
    pub pairs_examined: usize,
    /// Pairs skipped because one endpoint was not certified exact.
    pub pairs_undecided: usize,
    pub divergences: Vec<Divergence>,
}

impl DivergenceReport {
    pub fn to_json(&self, alg: &FiniteAlgebra) -> Value {
        json!({
            "algebra": self.algebra,
            "pairs_examined": self.pairs_examined,
            "pairs_undecided": self.pairs_undecided,
            "divergences": self
                .divergences
                .iter()
                .map(|d| {
                    json!({
                        "x": d.x,
                        "y": d.y,
                        "zero_value": d.zero_value,
                        "full_value": d.full_value,
                        "separating": d.separating,
                        "witness": d.witness.as_ref().map(|(e, w)| {
                            json!({"element": e, "certificate": w.to_json(alg)})
                        }),
                        "normal_diverges": d.normal_diverges,
                        "chain": d
                            .chain
                            .iter()
                            .map(|l| json!({"weight": l.weight, "value": l.value, "exact": l.exact}))
                            .collect::<Vec<_>>(),
                    })
                })
                .collect::<Vec<_>>(),
        })
    }
}

/// Sweep every unordered subalgebra pair `(X, Y)` and report the pairs
/// whose subobject commutator strictly grows from weight `{0}` to full
/// weight, both endpoints certified exact. `with_weights` additionally
/// records the value at every intermediate subalgebra weight for each
/// divergent pair. A certified monotonicity violation aborts with an
/// internal error — the engines must never produce one.
pub fn divergence_search(
    alg: &FiniteAlgebra,
    bounds: &Bounds,
    with_weights: bool,
    caps: &Caps,
) -> Result<DivergenceReport, Error> {
    let subs = alg.all_subuniverses()?;
    let zero_w = alg.subuniverse_zero();
    let full_w = full_sub(alg)?;
    let mut report = DivergenceReport {
        algebra: alg.name().to_string(),
        pairs_examined: 0,
        pairs_undecided: 0,
        divergences: Vec::new(),
    };
    for i in 0..subs.len() {
        for j in i..subs.len() {
            let (x, y) = (&subs[i], &subs[j]);
            let at = |w: &Subuniverse| -> Result<CommutatorResult, Error> {
                let c = WeightedCospan::new(alg, x.clone(), y.clone(), w.clone())?;
                weighted_commutator(alg, &c, bounds, caps)
            };
            let r0 = at(&zero_w)?;
            let r1 = at(&full_w)?;
            report.pairs_examined += 1;
            if r0.status != Status::Exact || r1.status != Status::Exact {
                report.pairs_undecided += 1;
                continue;
            }
            if !is_subset(r0.value.elements(), r1.value.elements()) {
                return Err(Error::Internal(format!(
                    "weight monotonicity violated for X={} Y={}: {} exceeds {}",
                    fmt_els(x.elements()),
                    fmt_els(y.elements()),
                    fmt_els(r0.value.elements()),
                    fmt_els(r1.value.elements())
                )));
            }
            if r0.value.elements() == r1.value.elements() {
                continue;
            }
            let separating: Vec<El> = r1
                .value
                .elements()
                .iter()
                .copied()
                .filter(|&e| !r0.value.contains(e))
                .collect();
            let witness = separating
                .first()
                .and_then(|e| r1.witnesses.get(e).map(|w| (*e, w.clone())));
            let n0 = normal_from_base(alg, &r0, caps)?;
            let n1 = normal_from_base(alg, &r1, caps)?;
            let normal_diverges = n0.value.elements() != n1.value.elements();
            let mut chain = Vec::new();
            if with_weights {
                for w in &subs {
                    let rw = at(w)?;
                    chain.push(WeightLayer {
                        weight: w.elements().to_vec(),
                        value: rw.value.elements().to_vec(),
                        exact: rw.status == Status::Exact,
                    });
                }
            }
            report.divergences.push(Divergence {
                x: x.elements().to_vec(),
                y: y.elements().to_vec(),
                zero_value: r0.value.elements().to_vec(),
                full_value: r1.value.elements().to_vec(),
                separating,
                witness,
                normal_diverges,
                chain,
            });
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Verification suite
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

impl CheckStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Skipped => "skipped",
        }
    }
}

/// One law checked by the suite. A failed `hard` line is a defect in
/// the engines; a failed soft line records that an expectation which is
/// only guaranteed for certain structures did not hold here.
#[derive(Clone, Debug)]
pub struct CheckLine {
    pub name: &'static str,
    pub status: CheckStatus,
    pub hard: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub algebra: String,
    pub lines: Vec<CheckLine>,
}

impl SuiteReport {
    pub fn hard_failures(&self) -> usize {
        self.lines
            .iter()
            .filter(|l| l.status == CheckStatus::Fail && l.hard)
            .count()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "algebra": self.algebra,
            "hard_failures": self.hard_failures(),
            "checks": self
                .lines
                .iter()
                .map(|l| {
                    json!({
                        "name": l.name,
                        "status": l.status.as_str(),
                        "hard": l.hard,
                        "detail": l.detail,
                    })
                })
                .collect::<Vec<_>>(),
        })
    }
}

/// All commutator data the suite gathers for one subalgebra pair.
struct PairData {
    xi: usize,
    yi: usize,
    zero_sub: CommutatorResult,
    zero_nor: CommutatorResult,
    full_sub: CommutatorResult,
    full_nor: CommutatorResult,
}

/// Run every structural law of the commutator family over the
/// subalgebra pairs of `alg` and report each as pass, fail, or skipped.
pub fn verify_suite(
    alg: &FiniteAlgebra,
    bounds: &Bounds,
    caps: &Caps,
) -> Result<SuiteReport, Error> {
    let subs = sample_subuniverses(alg)?;
    let zero_w = alg.subuniverse_zero();
    let full_w = full_sub(alg)?;
    let structured = alg.structure().group.is_some() || alg.structure().ring.is_some();
    let hard_laws = structured || alg.is_declared("semi_abelian");
    let maltsev_found = matches!(maltsev_term(alg, caps), MaltsevOutcome::Found(_));

    let mut pairs: Vec<PairData> = Vec::new();
    for i in 0..subs.len() {
        for j in i..subs.len() {
            let commutator_at =
                |w: &Subuniverse| -> Result<(CommutatorResult, CommutatorResult), Error> {
                    let c = WeightedCospan::new(alg, subs[i].clone(), subs[j].clone(), w.clone())?;
                    let sub = weighted_commutator(alg, &c, bounds, caps)?;
                    let nor = normal_from_base(alg, &sub, caps)?;
                    Ok((sub, nor))
                };
            let (zero_sub, zero_nor) = commutator_at(&zero_w)?;
            let (full_sub, full_nor) = commutator_at(&full_w)?;
            pairs.push(PairData {
                xi: i,
                yi: j,
                zero_sub,
                zero_nor,
                full_sub,
                full_nor,
            });
        }
    }

    let mut lines = Vec::new();
    lines.push(check_witnesses(alg, &pairs));
    lines.push(check_weight_monotonicity(&pairs));
    lines.push(check_normal_consistency(alg, &pairs)?);
    lines.push(check_symmetry(alg, &subs, &pairs, bounds, caps)?);
    lines.push(check_join_collapse(alg, &subs, &pairs, structured)?);
    lines.push(check_quotient_preservation(
        alg, &subs, &pairs, bounds, caps, hard_laws,
    )?);
    lines.push(check_smith_bridge(
        alg,
        &subs,
        &pairs,
        caps,
        maltsev_found,
        hard_laws,
    )?);
    lines.push(check_smith_meet_bound(alg, caps, maltsev_found)?);
    lines.push(check_ring_oracle(alg, &subs, &pairs)?);

    Ok(SuiteReport {
        algebra: alg.name().to_string(),
        lines,
    })
}

/// Every reported element of every computed result must carry a witness
/// that re-evaluates to it.
fn check_witnesses(alg: &FiniteAlgebra, pairs: &[PairData]) -> CheckLine {
    let mut checked = 0usize;
    for p in pairs {
        for r in [&p.zero_sub, &p.zero_nor, &p.full_sub, &p.full_nor] {
            checked += r.value.len();
            if let Err(e) = r.verify_witnesses(alg) {
                return CheckLine {
                    name: "witness_reevaluation",
                    status: CheckStatus::Fail,
                    hard: true,
                    detail: format!("pair ({},{}): {e}", p.xi, p.yi),
                };
            }
        }
    }
    CheckLine {
        name: "witness_reevaluation",
        status: CheckStatus::Pass,
        hard: true,
        detail: format!("{checked} witnessed elements re-evaluated"),
    }
}

/// Enlarging the weight from `{0}` to everything may only enlarge the
/// value (comparable when both endpoints are exact).
fn check_weight_monotonicity(pairs: &[PairData]) -> CheckLine {
    let mut compared = 0usize;
    for p in pairs {
        for (lo, hi) in [(&p.zero_sub, &p.full_sub), (&p.zero_nor, &p.full_nor)] {
            if lo.status != Status::Exact || hi.status != Status::Exact {
                continue;
            }
            compared += 1;
            if !is_subset(lo.value.elements(), hi.value.elements()) {
                return CheckLine {
                    name: "weight_monotonicity",
                    status: CheckStatus::Fail,
                    hard: true,
                    detail: format!(
                        "pair ({},{}): zero-weight value {} exceeds full-weight value {}",
                        p.xi,
                        p.yi,
                        fmt_els(lo.value.elements()),
                        fmt_els(hi.value.elements())
                    ),
                };
            }
        }
    }
    if compared == 0 {
        return CheckLine {
            name: "weight_monotonicity",
            status: CheckStatus::Skipped,
            hard: true,
            detail: "no pair had both endpoints exact".to_string(),
        };
    }
    CheckLine {
        name: "weight_monotonicity",
        status: CheckStatus::Pass,
        hard: true,
        detail: format!("{compared} weight comparisons monotone"),
    }
}

/// The normal commutator contains its subobject companion, and taking
/// the normal closure again must change nothing.
fn check_normal_consistency(alg: &FiniteAlgebra, pairs: &[PairData]) -> Result<CheckLine, Error> {
    let mut checked = 0usize;
    for p in pairs {
        for (sub, nor) in [(&p.zero_sub, &p.zero_nor), (&p.full_sub, &p.full_nor)] {
            checked += 1;
            if !is_subset(sub.value.elements(), nor.value.elements()) {
                return Ok(CheckLine {
                    name: "normal_closure_consistency",
                    status: CheckStatus::Fail,
                    hard: true,
                    detail: format!(
                        "pair ({},{}): normal value {} misses subobject value {}",
                        p.xi,
                        p.yi,
                        fmt_els(nor.value.elements()),
                        fmt_els(sub.value.elements())
                    ),
                });
            }
            let again = congruence::normal_closure(alg, &as_usize(nor.value.elements()))?;
            if again.elements() != nor.value.elements() {
                return Ok(CheckLine {
                    name: "normal_closure_consistency",
                    status: CheckStatus::Fail,
                    hard: true,
                    detail: format!(
                        "pair ({},{}): normal closure not idempotent: {} reopens to {}",
                        p.xi,
                        p.yi,
                        fmt_els(nor.value.elements()),
                        fmt_els(again.elements())
                    ),
                });
            }
        }
    }
    Ok(CheckLine {
        name: "normal_closure_consistency",
        status: CheckStatus::Pass,
        hard: true,
        detail: format!("{checked} normal values consistent"),
    })
}

/// Swapping `X` and `Y` must not change an exact value.
fn check_symmetry(
    alg: &FiniteAlgebra,
    subs: &[Subuniverse],
    pairs: &[PairData],
    bounds: &Bounds,
    caps: &Caps,
) -> Result<CheckLine, Error> {
    let mut compared = 0usize;
    for p in pairs {
        if p.xi == p.yi {
            continue;
        }
        for (w, fwd) in [
            (alg.subuniverse_zero(), &p.zero_sub),
            (full_sub(alg)?, &p.full_sub),
        ] {
            if fwd.status != Status::Exact {
                continue;
            }
            let c = WeightedCospan::new(alg, subs[p.yi].clone(), subs[p.xi].clone(), w)?;
            let rev = weighted_commutator(alg, &c, bounds, caps)?;
            if rev.status != Status::Exact {
                continue;
            }
            compared += 1;
            if rev.value.elements() != fwd.value.elements() {
                return Ok(CheckLine {
                    name: "argument_symmetry",
                    status: CheckStatus::Fail,
                    hard: true,
                    detail: format!(
                        "pair ({},{}): value {} flips to {}",
                        p.xi,
                        p.yi,
                        fmt_els(fwd.value.elements()),
                        fmt_els(rev.value.elements())
                    ),
                });
            }
        }
    }
    Ok(if compared == 0 {
        CheckLine {
            name: "argument_symmetry",
            status: CheckStatus::Skipped,
            hard: true,
            detail: "no off-diagonal exact pair to flip".to_string(),
        }
    } else {
        CheckLine {
            name: "argument_symmetry",
            status: CheckStatus::Pass,
            hard: true,
            detail: format!("{compared} flipped values equal"),
        }
    })
}

/// When the weight and both arguments jointly generate the whole
/// algebra, the subobject commutator of a group or ring is already
/// normal, so it must equal its normal closure. Skipped for other
/// structures, where no such collapse is guaranteed.
fn check_join_collapse(
    alg: &FiniteAlgebra,
    subs: &[Subuniverse],
    pairs: &[PairData],
    structured: bool,
) -> Result<CheckLine, Error> {
    if !structured {
        return Ok(CheckLine {
            name: "join_collapse",
            status: CheckStatus::Skipped,
            hard: true,
            detail: "only guaranteed for verified groups and rings".to_string(),
        });
    }
    let mut compared = 0usize;
    for p in pairs {
        let mut cases: Vec<(&CommutatorResult, &CommutatorResult)> =
            vec![(&p.full_sub, &p.full_nor)];
        let mut joint: Vec<usize> = as_usize(subs[p.xi].elements());
        joint.extend(as_usize(subs[p.yi].elements()));
        if alg.subuniverse_generate(&joint)?.len() == alg.size() {
            cases.push((&p.zero_sub, &p.zero_nor));
        }
        for (sub, nor) in cases {
            if sub.status != Status::Exact {
                continue;
            }
            compared += 1;
            if sub.value.elements() != nor.value.elements() {
                return Ok(CheckLine {
                    name: "join_collapse",
                    status: CheckStatus::Fail,
                    hard: true,
                    detail: format!(
                        "pair ({},{}): jointly generating, yet subobject {} < normal {}",
                        p.xi,
                        p.yi,
                        fmt_els(sub.value.elements()),
                        fmt_els(nor.value.elements())
                    ),
                });
            }
        }
    }
    Ok(CheckLine {
        name: "join_collapse",
        status: CheckStatus::Pass,
        hard: true,
        detail: format!("{compared} jointly-generating cases already normal"),
    })
}

/// Push every pair through every quotient: the image of a sound value
/// must land inside the quotient's exact value, and for structures with
/// the preservation guarantee the images of exact values must match the
/// quotient values exactly.
fn check_quotient_preservation(
    alg: &FiniteAlgebra,
    subs: &[Subuniverse],
    pairs: &[PairData],
    bounds: &Bounds,
    caps: &Caps,
    hard_laws: bool,
) -> Result<CheckLine, Error> {
    let congruences = match congruence::all_congruences(alg) {
        Ok(c) => c,
        Err(e) => {
            tolerate(e)?;
            return Ok(CheckLine {
                name: "quotient_preservation",
                status: CheckStatus::Skipped,
                hard: hard_laws,
                detail: "congruence enumeration refused at this size".to_string(),
            });
        }
    };
    // Every quotient is exercised; when the full product of congruences
    // and pairs would blow the sweep budget, each quotient checks only
    // its leading pairs instead of the check being skipped outright.
    let per_theta = (512 / congruences.len().max(1)).clamp(1, pairs.len().max(1));
    let mut compared = 0usize;
    let mut soft_misses = 0usize;
    for theta in &congruences {
        let (q, map) = alg.quotient(theta)?;
        for p in pairs.iter().take(per_theta) {
            let image_sub = |s: &Subuniverse| -> Result<Subuniverse, Error> {
                Subuniverse::from_closed(&q, map.image(s.elements())).map_err(|e| {
                    Error::Internal(format!("image of a subalgebra is not closed: {e}"))
                })
            };
            let qx = image_sub(&subs[p.xi])?;
            let qy = image_sub(&subs[p.yi])?;
            for (w, base) in [
                (q.subuniverse_zero(), &p.zero_sub),
                (full_sub(&q)?, &p.full_sub),
            ] {
                let c = WeightedCospan::new(&q, qx.clone(), qy.clone(), w)?;
                let qr = weighted_commutator(&q, &c, bounds, caps)?;
                if qr.status != Status::Exact {
                    continue;
                }
                let expected = map.image(base.value.elements());
                if !is_subset(&expected, qr.value.elements()) {
                    return Ok(CheckLine {
                        name: "quotient_preservation",
                        status: CheckStatus::Fail,
                        hard: true,
                        detail: format!(
                            "pair ({},{}) mod {}-class congruence: image {} escapes quotient value {}",
                            p.xi,
                            p.yi,
                            q.size(),
                            fmt_els(&expected),
                            fmt_els(qr.value.elements())
                        ),
                    });
                }
                if base.status == Status::Exact {
                    compared += 1;
                    if expected != qr.value.elements() {
                        if hard_laws {
                            return Ok(CheckLine {
                                name: "quotient_preservation",
                                status: CheckStatus::Fail,
                                hard: true,
                                detail: format!(
                                    "pair ({},{}) mod {}-class congruence: image {} vs quotient value {}",
                                    p.xi,
                                    p.yi,
                                    q.size(),
                                    fmt_els(&expected),
                                    fmt_els(qr.value.elements())
                                ),
                            });
                        }
                        soft_misses += 1;
                    }
                }
            }
        }
    }
    Ok(if soft_misses > 0 {
        CheckLine {
            name: "quotient_preservation",
            status: CheckStatus::Fail,
            hard: false,
            detail: format!(
                "{soft_misses} of {compared} images differ (no structural guarantee here)"
            ),
        }
    } else {
        CheckLine {
            name: "quotient_preservation",
            status: CheckStatus::Pass,
            hard: hard_laws,
            detail: format!(
                "{compared} exact images preserved across all {} quotients",
                congruences.len()
            ),
        }
    })
}

/// For normal `X`, `Y` the zero class of the Smith commutator of their
/// congruences must match the full-weight normal commutator.
fn check_smith_bridge(
    alg: &FiniteAlgebra,
    subs: &[Subuniverse],
    pairs: &[PairData],
    caps: &Caps,
    maltsev_found: bool,
    hard_laws: bool,
) -> Result<CheckLine, Error> {
    if !maltsev_found {
        return Ok(CheckLine {
            name: "smith_bridge",
            status: CheckStatus::Skipped,
            hard: hard_laws,
            detail: "no Mal'tsev term found for this variety".to_string(),
        });
    }
    let mut compared = 0usize;
    let mut soft_misses = 0usize;
    for p in pairs {
        if p.full_nor.status != Status::Exact {
            continue;
        }
        let Some((cx, cy)) = normal_pair(alg, &subs[p.xi], &subs[p.yi])? else {
            continue;
        };
        let smith = match smith_commutator(alg, &cx, &cy, caps) {
            Ok(s) => s,
            Err(e) => {
                tolerate(e)?;
                continue;
            }
        };
        let zc = smith.zero_class(alg)?;
        compared += 1;
        if zc.elements() != p.full_nor.value.elements() {
            if hard_laws {
                return Ok(CheckLine {
                    name: "smith_bridge",
                    status: CheckStatus::Fail,
                    hard: true,
                    detail: format!(
                        "pair ({},{}): Smith zero class {} vs normal full-weight value {}",
                        p.xi,
                        p.yi,
                        fmt_els(zc.elements()),
                        fmt_els(p.full_nor.value.elements())
                    ),
                });
            }
            soft_misses += 1;
        }
    }
    Ok(if compared == 0 {
        CheckLine {
            name: "smith_bridge",
            status: CheckStatus::Skipped,
            hard: hard_laws,
            detail: "no normal pair with an exact full-weight value".to_string(),
        }
    } else if soft_misses > 0 {
        CheckLine {
            name: "smith_bridge",
            status: CheckStatus::Fail,
            hard: false,
            detail: format!("{soft_misses} of {compared} bridges differ (no structural guarantee)"),
        }
    } else {
        CheckLine {
            name: "smith_bridge",
            status: CheckStatus::Pass,
            hard: hard_laws,
            detail: format!("{compared} normal pairs bridge to the Smith zero class"),
        }
    })
}

/// The Smith commutator must be symmetric and lie below the meet of its
/// arguments.
fn check_smith_meet_bound(
    alg: &FiniteAlgebra,
    caps: &Caps,
    maltsev_found: bool,
) -> Result<CheckLine, Error> {
    if !maltsev_found {
        return Ok(CheckLine {
            name: "smith_meet_bound",
            status: CheckStatus::Skipped,
            hard: true,
            detail: "no Mal'tsev term found for this variety".to_string(),
        });
    }
    let congruences = match congruence::all_congruences(alg) {
        Ok(c) => c,
        Err(e) => {
            tolerate(e)?;
            return Ok(CheckLine {
                name: "smith_meet_bound",
                status: CheckStatus::Skipped,
                hard: true,
                detail: "congruence enumeration refused at this size".to_string(),
            });
        }
    };
    if congruences.len() > 16 {
        return Ok(CheckLine {
            name: "smith_meet_bound",
            status: CheckStatus::Skipped,
            hard: true,
            detail: format!("{} congruences exceed the sweep budget", congruences.len()),
        });
    }
    let mut checked = 0usize;
    for i in 0..congruences.len() {
        for j in i..congruences.len() {
            let (a, b) = (&congruences[i], &congruences[j]);
            let ab = match smith_commutator(alg, a, b, caps) {
                Ok(s) => s,
                Err(e) => {
                    tolerate(e)?;
                    continue;
                }
            };
            let ba = smith_commutator(alg, b, a, caps)?;
            checked += 1;
            if ab != ba {
                return Ok(CheckLine {
                    name: "smith_meet_bound",
                    status: CheckStatus::Fail,
                    hard: true,
                    detail: format!("congruence pair ({i},{j}): Smith commutator not symmetric"),
                });
            }
            if !ab.leq(&congruence::meet(alg, a, b)?) {
                return Ok(CheckLine {
                    name: "smith_meet_bound",
                    status: CheckStatus::Fail,
                    hard: true,
                    detail: format!("congruence pair ({i},{j}): Smith commutator above the meet"),
                });
            }
        }
    }
    Ok(CheckLine {
        name: "smith_meet_bound",
        status: CheckStatus::Pass,
        hard: true,
        detail: format!("{checked} congruence pairs bounded and symmetric"),
    })
}

/// On verified commutative rings the closed form is exact, so every
/// term-route value must agree with it (equality when exact, inclusion
/// when only a lower bound).
fn check_ring_oracle(
    alg: &FiniteAlgebra,
    subs: &[Subuniverse],
    pairs: &[PairData],
) -> Result<CheckLine, Error> {
    if alg.structure().ring.is_none() || !alg.is_declared("commutative_ring") {
        return Ok(CheckLine {
            name: "ring_oracle_agreement",
            status: CheckStatus::Skipped,
            hard: true,
            detail: "not a verified commutative ring".to_string(),
        });
    }
    let mut compared = 0usize;
    for p in pairs {
        for (w, sub, nor) in [
            (alg.subuniverse_zero(), &p.zero_sub, &p.zero_nor),
            (full_sub(alg)?, &p.full_sub, &p.full_nor),
        ] {
            let c = WeightedCospan::new(alg, subs[p.xi].clone(), subs[p.yi].clone(), w)?;
            let oracle = ring_weighted_commutator(alg, &c)?;
            for (route, reference) in [(sub, &oracle.subobject), (nor, &oracle.normal)] {
                compared += 1;
                let ok = if route.status == Status::Exact {
                    route.value.elements() == reference.value.elements()
                } else {
                    is_subset(route.value.elements(), reference.value.elements())
                };
                if !ok {
                    return Ok(CheckLine {
                        name: "ring_oracle_agreement",
                        status: CheckStatus::Fail,
                        hard: true,
                        detail: format!(
                            "pair ({},{}): term route {} vs closed form {}",
                            p.xi,
                            p.yi,
                            fmt_els(route.value.elements()),
                            fmt_els(reference.value.elements())
                        ),
                    });
                }
            }
        }
    }
    Ok(CheckLine {
        name: "ring_oracle_agreement",
        status: CheckStatus::Pass,
        hard: true,
        detail: format!("{compared} term-route values agree with the closed form"),
    })
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

/// All subalgebras when enumeration is feasible, else the zero and full
/// subalgebras plus the one-generated ones for a few small generators.
fn sample_subuniverses(alg: &FiniteAlgebra) -> Result<Vec<Subuniverse>, Error> {
    if alg.size() <= 16 {
        return alg.all_subuniverses();
    }
    let mut out: Vec<Subuniverse> = vec![alg.subuniverse_zero(), full_sub(alg)?];
    for g in 1..alg.size().min(9) {
        let s = alg.subuniverse_generate(&[g])?;
        if !out.iter().any(|o| o.elements() == s.elements()) {
            out.push(s);
        }
    }
    out.sort_by(|a, b| (a.len(), a.elements()).cmp(&(b.len(), b.elements())));
    Ok(out)
}

fn full_sub(alg: &FiniteAlgebra) -> Result<Subuniverse, Error> {
    alg.subuniverse_generate(&(0..alg.size()).collect::<Vec<_>>())
}

/// Errors that mean "this route does not apply here" rather than "the
/// computation is broken".
fn tolerate(e: Error) -> Result<(), Error> {
    match e {
        Error::MaltsevRequired
        | Error::Refused { .. }
        | Error::SizeCap { .. }
        | Error::FreeCap { .. }
        | Error::NotNormal { .. }
        | Error::NotACongruence { .. }
        | Error::NotCommutativeRing { .. } => Ok(()),
        other => Err(other),
    }
}

fn as_usize(els: &[El]) -> Vec<usize> {
    els.iter().map(|&e| e as usize).collect()
}

/// Subset test on sorted, deduplicated slices.
fn is_subset(a: &[El], b: &[El]) -> bool {
    let mut bi = 0usize;
    for &x in a {
        while bi < b.len() && b[bi] < x {
            bi += 1;
        }
        if bi == b.len() || b[bi] != x {
            return false;
        }
        bi += 1;
    }
    true
}

fn fmt_els(els: &[El]) -> String {
    let body: Vec<String> = els.iter().map(|e| e.to_string()).collect();
    format!("{{{}}}", body.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders;

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn subset_test_handles_sorted_slices() {
        assert!(is_subset(&[], &[]));
        assert!(is_subset(&[1, 3], &[0, 1, 2, 3]));
        assert!(!is_subset(&[1, 4], &[0, 1, 2, 3]));
        assert!(!is_subset(&[1], &[]));
    }

    #[test]
    fn abelian_groups_show_no_weight_divergence() {
        let z6 = builders::cyclic_group(6);
        let r = divergence_search(&z6, &Bounds::default(), false, &caps()).unwrap();
        assert!(r.divergences.is_empty());
        assert_eq!(r.pairs_undecided, 0);
        assert!(r.pairs_examined > 0);
    }

    #[test]
    fn weight_separates_constants_in_the_nilpotent_truncation() {
        let f2t3 = builders::ring_poly_nilpotent(2, 3).unwrap();
        let r = divergence_search(&f2t3, &Bounds::default(), true, &caps()).unwrap();
        let d = r
            .divergences
            .iter()
            .find(|d| d.x == [0, 1] && d.y == [0, 1])
            .expect("the constants subring must diverge against itself");
        assert_eq!(d.zero_value, [0, 1]);
        assert_eq!(d.full_value.len(), f2t3.size());
        let (e, w) = d
            .witness
            .as_ref()
            .expect("separating element needs a witness");
        assert_eq!(w.evaluate(&f2t3).unwrap(), *e);
        // The normal closures agree (the ideal generated by 1 is
        // everything), so this divergence is subobject-level only.
        assert!(!d.normal_diverges);
        // Every intermediate weight sits between the two endpoints.
        assert!(!d.chain.is_empty());
        for layer in &d.chain {
            assert!(layer.exact);
            assert!(is_subset(&d.zero_value, &layer.value));
            assert!(is_subset(&layer.value, &d.full_value));
        }
    }

    #[test]
    fn cross_validation_routes_agree_on_groups_and_rings() {
        let s3 = builders::symmetric_group(3).unwrap();
        let ops = s3.structure().group.unwrap();
        let rot = (1..6)
            .map(|i| i as El)
            .find(|&e| s3.op2(ops.mul, e, e) != 0 && s3.op2(ops.mul, e, s3.op2(ops.mul, e, e)) == 0)
            .expect("S3 has an element of order 3");
        let a3 = s3.subuniverse_generate(&[rot as usize]).unwrap();
        assert_eq!(a3.len(), 3);
        let cv = cross_validate(&s3, &a3, &a3, &Bounds::default(), &caps()).unwrap();
        assert!(cv.routes.iter().any(|r| r.route == "smith_zero_class"));
        assert!(cv.disagreement.is_none(), "{:?}", cv.disagreement);

        let z8 = builders::ring_zn(8);
        let two = z8.subuniverse_generate(&[2]).unwrap();
        let cv = cross_validate(&z8, &two, &two, &Bounds::default(), &caps()).unwrap();
        assert_eq!(cv.routes.len(), 3, "term, Smith, and ring routes all apply");
        assert!(cv.disagreement.is_none(), "{:?}", cv.disagreement);
        for r in &cv.routes {
            assert_eq!(r.value, [0, 4], "route {}", r.route);
        }
    }

    #[test]
    fn suite_reports_no_hard_failures_on_core_algebras() {
        let algebras = vec![
            builders::symmetric_group(3).unwrap(),
            builders::ring_zn(8),
            builders::ring_poly_nilpotent(2, 3).unwrap(),
        ];
        for alg in algebras {
            let report = verify_suite(&alg, &Bounds::default(), &caps()).unwrap();
            let failures: Vec<(&str, &str)> = report
                .lines
                .iter()
                .filter(|l| l.status == CheckStatus::Fail)
                .map(|l| (l.name, l.detail.as_str()))
                .collect();
            assert_eq!(
                report.hard_failures(),
                0,
                "{}: {failures:?}",
                report.algebra
            );
            assert!(report
                .lines
                .iter()
                .any(|l| l.name == "quotient_preservation" && l.status == CheckStatus::Pass));
            assert!(report
                .lines
                .iter()
                .any(|l| l.name == "witness_reevaluation" && l.status == CheckStatus::Pass));
        }
    }
}
