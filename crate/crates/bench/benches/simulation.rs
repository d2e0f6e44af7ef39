use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rwsre::seed::{rng, Stream};
use rwsre::sinai::{predictor_b_n, Scale, SearchConfig};
use rwsre::walk::{sample_hitting_time, Stepper};
use rwsre::{sample_dual, sample_environment, DualMode};
use rwsre_bench::{sinai_spec, stable_spec, transient_spec};

fn stepping(c: &mut Criterion) {
    let env = sample_environment(&transient_spec(), 1, 1 << 16).unwrap();
    let mut group = c.benchmark_group("stepper");
    for steps in [10_000u64, 1_000_000] {
        group.throughput(Throughput::Elements(steps));
        group.bench_with_input(BenchmarkId::from_parameter(steps), &steps, |b, &steps| {
            let mut stepper = Stepper::new(&env, 0, 4096);
            let mut r = rng(2, Stream::Aux(0), 0);
            b.iter(|| stepper.run(0, steps, &mut r));
        });
    }
    group.finish();
}

fn hitting_times(c: &mut Criterion) {
    let env = sample_environment(&stable_spec(), 3, 1 << 14).unwrap();
    let mut group = c.benchmark_group("branching_hitting_time");
    for n in [200i64, 1600] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            let mut r = rng(4, Stream::Aux(1), 0);
            b.iter(|| sample_hitting_time(&env, n, 8 * n, &mut r).unwrap());
        });
    }
    group.finish();
}

fn environments(c: &mut Criterion) {
    let spec = transient_spec();
    c.bench_function("sample_environment/4096", |b| {
        let mut seed = 0;
        b.iter(|| {
            seed += 1;
            sample_environment(&spec, seed, 4096).unwrap()
        })
    });
    c.bench_function("sample_dual/4096", |b| {
        let mut seed = 0;
        b.iter(|| {
            seed += 1;
            sample_dual(&spec, seed, 4096, DualMode::Direct).unwrap()
        })
    });
}

fn valley_search(c: &mut Criterion) {
    let spec = sinai_spec();
    let scale = Scale::for_gap(&spec.gap_dist).unwrap();
    c.bench_function("predictor_b_n/1e6", |b| {
        let mut seed = 0;
        b.iter(|| {
            seed += 1;
            let env = sample_environment(&spec, seed, 1 << 12).unwrap();
            predictor_b_n(&env, 1_000_000, scale, &SearchConfig::default())
        })
    });
}

criterion_group!(benches, stepping, hitting_times, environments, valley_search);
criterion_main!(benches);
