//! Benchmarks comparing the data-parallel sweeps against the sequential
//! fallback on the same workloads.
//!
//! Run with `cargo bench` (rayon paths vs. forced-sequential) or
//! `cargo bench --no-default-features` (sequential only, both labels
//! then measure the same code). Both paths produce identical values;
//! these benches only measure time.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::time::Duration;

use wcomm::builders;
use wcomm::commutator::smith::smith_commutator;
use wcomm::commutator::{weighted_commutator, Bounds, WeightedCospan};
use wcomm::congruence::Congruence;
use wcomm::exec;
use wcomm::free::free_algebra;
use wcomm::{Caps, FiniteAlgebra, Subuniverse};

const MODES: [(&str, bool); 2] = [("sequential", false), ("parallel", true)];

fn full_sub(alg: &FiniteAlgebra) -> Subuniverse {
    let all: Vec<usize> = (0..alg.size()).collect();
    alg.subuniverse_generate(&all).expect("full subuniverse")
}

/// Free-algebra closure on two generators over the cyclic group of
/// order 6 (36 elements, a few breadth-first sweeps).
fn bench_free_closure(c: &mut Criterion) {
    let caps = Caps::default();
    let z6 = builders::cyclic_group(6);
    let mut group = c.benchmark_group("free_closure_z6_two_generators");
    group
        .measurement_time(Duration::from_secs(5))
        .sample_size(20);
    for (label, par) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(label), &par, |b, &par| {
            b.iter(|| {
                exec::set_parallel_override(Some(par));
                let free = free_algebra(&z6, 2, &caps).expect("free closure");
                std::hint::black_box(free.elements.len())
            });
        });
    }
    group.finish();
    exec::set_parallel_override(None);
}

/// Weighted commutator of the full subalgebra with itself at full
/// weight on the dihedral group of order 8 — the group-word engine's
/// heaviest corpus workload.
fn bench_group_engine(c: &mut Criterion) {
    let caps = Caps::default();
    let d4 = builders::dihedral_group(4);
    let full = full_sub(&d4);
    let cospan =
        WeightedCospan::new(&d4, full.clone(), full.clone(), full.clone()).expect("cospan");
    let bounds = Bounds::new(2, 2, 2);
    let mut group = c.benchmark_group("group_engine_d4_full_cospan");
    group
        .measurement_time(Duration::from_secs(5))
        .sample_size(20);
    for (label, par) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(label), &par, |b, &par| {
            b.iter(|| {
                exec::set_parallel_override(Some(par));
                let r = weighted_commutator(&d4, &cospan, &bounds, &caps).expect("commutator");
                std::hint::black_box(r.value.len())
            });
        });
    }
    group.finish();
    exec::set_parallel_override(None);
}

/// Term-enumeration engine on the ring of integers mod 8 with the full
/// cospan: the assignment grid sweep dominates.
fn bench_ring_engine(c: &mut Criterion) {
    let caps = Caps::default();
    let z8 = builders::ring_zn(8);
    let full = full_sub(&z8);
    let cospan =
        WeightedCospan::new(&z8, full.clone(), full.clone(), full.clone()).expect("cospan");
    let bounds = Bounds::new(2, 2, 2);
    let mut group = c.benchmark_group("ring_engine_z8_full_cospan");
    group
        .measurement_time(Duration::from_secs(5))
        .sample_size(20);
    for (label, par) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(label), &par, |b, &par| {
            b.iter(|| {
                exec::set_parallel_override(Some(par));
                let r = weighted_commutator(&z8, &cospan, &bounds, &caps).expect("commutator");
                std::hint::black_box(r.value.len())
            });
        });
    }
    group.finish();
    exec::set_parallel_override(None);
}

/// Smith commutator of the full congruence with itself on the
/// quaternion group: Mal'tsev-term discovery plus the congruence-lattice
/// sweep.
fn bench_smith(c: &mut Criterion) {
    let caps = Caps::default();
    let q8 = builders::quaternion_group();
    let nabla = Congruence::full(&q8);
    let mut group = c.benchmark_group("smith_q8_full_self_commutator");
    group
        .measurement_time(Duration::from_secs(5))
        .sample_size(20);
    for (label, par) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(label), &par, |b, &par| {
            b.iter(|| {
                exec::set_parallel_override(Some(par));
                let r = smith_commutator(&q8, &nabla, &nabla, &caps).expect("smith");
                std::hint::black_box(r.classes().len())
            });
        });
    }
    group.finish();
    exec::set_parallel_override(None);
}

criterion_group!(
    engines,
    bench_free_closure,
    bench_group_engine,
    bench_ring_engine,
    bench_smith
);
criterion_main!(engines);
