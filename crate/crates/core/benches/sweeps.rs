use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qmatroid::derive::{automorphism_group, derive_design, DerivedKind};
use qmatroid::design::{desarguesian_spread, induced_rank_oracle, verify_design_with, VerifyStrategy};
use qmatroid::qmatroid::check_rank_axioms;
use qmatroid::{FieldSpec, Limits};

/// Runs `f` on a pool of `threads` workers, or inline without the parallel feature.
fn on_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    #[cfg(feature = "parallel")]
    {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            b = b.num_threads(n);
        }
        b.build().expect("thread pool").install(f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        f()
    }
}

fn pools() -> Vec<(&'static str, Option<usize>)> {
    if cfg!(feature = "parallel") {
        vec![("1-thread", Some(1)), ("default", None)]
    } else {
        vec![("sequential", Some(1))]
    }
}

fn sweeps(c: &mut Criterion) {
    let f2 = FieldSpec::new(2, 1).unwrap();
    let limits = Limits::default();
    let s6 = desarguesian_spread(6, 2, &f2, &limits).unwrap();
    let s4 = desarguesian_spread(4, 2, &f2, &limits).unwrap();
    let circuits = derive_design(&s6, DerivedKind::CircuitT2, &limits).unwrap();

    let mut g = c.benchmark_group("sweeps");
    g.sample_size(10);
    for (label, threads) in pools() {
        g.bench_function(BenchmarkId::new("derive circuit_t2 S(1,2,6;2)", label), |b| {
            b.iter(|| on_pool(threads, || derive_design(&s6, DerivedKind::CircuitT2, &limits).unwrap()))
        });
        g.bench_function(BenchmarkId::new("verify superspaces 1-(6,4,120;2)", label), |b| {
            b.iter(|| on_pool(threads, || verify_design_with(&circuits, VerifyStrategy::Superspaces, &limits).unwrap()))
        });
        g.bench_function(BenchmarkId::new("verify block scan 1-(6,4,120;2)", label), |b| {
            b.iter(|| on_pool(threads, || verify_design_with(&circuits, VerifyStrategy::BlockScan, &limits).unwrap()))
        });
        g.bench_function(BenchmarkId::new("rank axioms S(1,2,4;2)", label), |b| {
            b.iter(|| on_pool(threads, || check_rank_axioms(&induced_rank_oracle(&s4), &limits).unwrap()))
        });
        g.bench_function(BenchmarkId::new("Aut S(1,2,4;2)", label), |b| {
            b.iter(|| on_pool(threads, || automorphism_group(s4.design(), &limits).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, sweeps);
criterion_main!(benches);
