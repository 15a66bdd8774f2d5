use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use qubofoil::hwadapt::{pas_split, HardwareProfile};
use qubofoil::pbool::{compile_hubo, SpinRole, VariableRegistry};
use qubofoil::quadratize::{rosenberg_reduce, PenaltyPolicy, QuboProblem};
use qubofoil::solvers::{solve_bruteforce_with_cap, solve_sa, SaSchedule};
use qubofoil::surrogate::{
    monomial_basis, DesignSpace, DesignVariable, PolynomialSurrogate, RsmOrder, SampleRow,
    SampleSet, Sense,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn space(bits: u32, n: usize) -> DesignSpace {
    DesignSpace::new(
        (0..n)
            .map(|i| DesignVariable {
                name: format!("v{i}"),
                lower: 0.0,
                upper: 1.0 + i as f64,
                bits,
            })
            .collect(),
    )
    .unwrap()
}

fn model(n: usize, order: RsmOrder, seed: u64) -> PolynomialSurrogate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PolynomialSurrogate {
        order,
        n,
        coefficients: monomial_basis(n, order.degree())
            .into_iter()
            .map(|idx| (idx, rng.gen_range(-1.0..1.0)))
            .collect(),
        r_squared: None,
        residual_norm: None,
    }
}

fn registry_of(n: usize) -> VariableRegistry {
    let mut r = VariableRegistry::new();
    for bit in 0..n {
        r.push(SpinRole::DesignBit {
            variable: "q".into(),
            bit: bit as u32 + 1,
        });
    }
    r
}

fn bench_fit(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let truth = model(3, RsmOrder::Four, 7);
    let rows: Vec<SampleRow> = (0..420)
        .map(|_| {
            let x: Vec<f64> = (0..3).map(|i| rng.gen_range(0.0..1.0 + i as f64)).collect();
            let y = truth.eval(&x).unwrap();
            SampleRow { x, y: vec![y] }
        })
        .collect();
    let set = SampleSet::new(
        vec!["a".into(), "b".into(), "c".into()],
        vec!["y".into()],
        rows,
    )
    .unwrap();
    c.bench_function("fit_order4_3vars_420rows", |b| {
        b.iter(|| PolynomialSurrogate::fit(black_box(&set), 0, RsmOrder::Four).unwrap())
    });
}

fn bench_compile(c: &mut Criterion) {
    let mut group = c.benchmark_group("compile_hubo_order4_1var");
    for bits in [5u32, 8] {
        let sp = space(bits, 1);
        let m = model(1, RsmOrder::Four, 3);
        group.bench_with_input(BenchmarkId::from_parameter(bits), &bits, |b, _| {
            b.iter(|| compile_hubo(black_box(&m), black_box(&sp), Sense::Minimize).unwrap())
        });
    }
    group.finish();
}

fn bench_reduce(c: &mut Criterion) {
    let sp = space(5, 1);
    let m = model(1, RsmOrder::Four, 3);
    let (poly, registry) = compile_hubo(&m, &sp, Sense::Minimize).unwrap();
    c.bench_function("rosenberg_reduce_quartic_k5", |b| {
        b.iter(|| rosenberg_reduce(black_box(&poly), PenaltyPolicy::default(), &registry).unwrap())
    });
}

fn bench_split(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 24;
    let mut q = QuboProblem::new(n, registry_of(n));
    for i in 0..n {
        for j in i..n {
            q.add(i, j, rng.gen_range(-900..900i64) as f64);
        }
    }
    let hw = HardwareProfile::new(127, 1.0, 100_000).unwrap();
    c.bench_function("pas_split_24spin_dense", |b| {
        b.iter(|| pas_split(black_box(&q), &hw).unwrap())
    });
}

fn solve_problem() -> QuboProblem {
    let sp = space(8, 3);
    let m = model(3, RsmOrder::Two, 11);
    let (poly, registry) = compile_hubo(&m, &sp, Sense::Minimize).unwrap();
    rosenberg_reduce(&poly, PenaltyPolicy::default(), &registry).unwrap()
}

fn bench_sa(c: &mut Criterion) {
    let q = solve_problem();
    let mut group = c.benchmark_group("solve_sa_24spin");
    group.sample_size(10);
    group.bench_function("default_schedule_1replica", |b| {
        b.iter(|| solve_sa(black_box(&q), &SaSchedule::default(), 1, 7).unwrap())
    });
    group.finish();
}

fn bench_bruteforce(c: &mut Criterion) {
    let sp = space(6, 3);
    let m = model(3, RsmOrder::Two, 11);
    let (poly, registry) = compile_hubo(&m, &sp, Sense::Minimize).unwrap();
    let q = rosenberg_reduce(&poly, PenaltyPolicy::default(), &registry).unwrap();
    let mut group = c.benchmark_group("bruteforce_18spin");
    group.sample_size(10);
    group.bench_function("gray_code_scan", |b| {
        b.iter(|| solve_bruteforce_with_cap(black_box(&q), 26).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_fit,
    bench_compile,
    bench_reduce,
    bench_split,
    bench_sa,
    bench_bruteforce
);
criterion_main!(benches);
