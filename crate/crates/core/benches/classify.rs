use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use flatkahler::classifier::{classify, special_classes, Settings};
use flatkahler::crystal::DiagonalAction;
use flatkahler::groups::AbstractAbelianGroup;
use flatkahler::torus::{make_torus, FactorDescription, Preset};
use flatkahler::Execution;

fn action(presets: &[Preset], moduli: Vec<u64>, exps: &[&[u64]]) -> DiagonalAction {
    let d: Vec<FactorDescription> = presets
        .iter()
        .map(|&p| FactorDescription::Preset { preset: p, iso_tag: None })
        .collect();
    let t = make_torus(&d, false).unwrap();
    let g = AbstractAbelianGroup::new(moduli).unwrap();
    let e: Vec<Vec<Vec<u64>>> = exps.iter().map(|r| r.iter().map(|&x| vec![x]).collect()).collect();
    DiagonalAction::from_exponents(&t, g, &e).unwrap()
}

fn cases() -> Vec<(&'static str, DiagonalAction)> {
    use Preset::*;
    vec![
        ("chw-generic", action(&[Generic; 3], vec![2, 2], &[&[0, 1, 1], &[1, 0, 1]])),
        ("chw-mixed", action(&[Eisenstein, Eisenstein, Gauss], vec![2, 2], &[&[0, 3, 2], &[3, 0, 2]])),
        ("fourfold", action(&[Eisenstein; 4], vec![3, 3], &[&[0, 4, 4, 4], &[4, 0, 4, 2]])),
    ]
}

fn modes(c: &mut Criterion) {
    for (name, a) in cases() {
        let mut group = c.benchmark_group(name);
        group.sample_size(10);
        for mode in [Execution::Sequential, Execution::Parallel] {
            let settings = Settings {
                execution: mode,
                ..Settings::default()
            };
            let label = format!("{mode:?}").to_lowercase();
            group.bench_with_input(BenchmarkId::new("special_classes", &label), &a, |b, a| {
                b.iter(|| special_classes(black_box(a), &settings).unwrap())
            });
            group.bench_with_input(BenchmarkId::new("classify", &label), &a, |b, a| {
                b.iter(|| classify(black_box(a), &settings).unwrap())
            });
        }
        group.finish();
    }
}

criterion_group!(benches, modes);
criterion_main!(benches);
