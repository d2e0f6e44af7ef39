use criterion::{criterion_group, criterion_main, Criterion};
use rwsre::analysis::{kappa_root, lambda_functional, sinai_cdf, sinai_density, speed_formula, stable_cdf, SeriesControl, StableLaw, StableQuadrature};
use rwsre::sample_environment;
use rwsre::stats::ks_one_sample;
use rwsre_bench::{stable_spec, transient_spec};

fn formulas(c: &mut Criterion) {
    let spec = transient_spec();
    c.bench_function("speed_formula", |b| b.iter(|| speed_formula(&spec).unwrap()));
    let stable = stable_spec();
    c.bench_function("kappa_root", |b| b.iter(|| kappa_root(&stable).unwrap()));
    let env = sample_environment(&spec, 5, 1 << 12).unwrap();
    let ctrl = SeriesControl::default();
    c.bench_function("lambda_functional", |b| b.iter(|| lambda_functional(&env, &ctrl).unwrap()));
}

fn densities(c: &mut Criterion) {
    c.bench_function("sinai_density/grid", |b| b.iter(|| (-400..=400).map(|i| sinai_density(i as f64 / 100.0)).sum::<f64>()));
    c.bench_function("sinai_cdf/grid", |b| b.iter(|| (-400..=400).map(|i| sinai_cdf(i as f64 / 100.0)).sum::<f64>()));
    let law = StableLaw::new(0.5, 1.0).unwrap();
    let cfg = StableQuadrature::default();
    c.bench_function("stable_cdf/kappa_0.5", |b| b.iter(|| stable_cdf(&law, 3.0, &cfg).unwrap()));
}

fn ks(c: &mut Criterion) {
    let xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
    c.bench_function("ks_one_sample/1000", |b| b.iter(|| ks_one_sample(&xs, |x| x).unwrap()));
}

criterion_group!(benches, formulas, densities, ks);
criterion_main!(benches);
