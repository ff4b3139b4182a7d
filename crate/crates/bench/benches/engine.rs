use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use memgym_core::math;
use memgym_core::policy::{OraclePolicy, Policy, RandomPolicy};
use memgym_core::replay::record_episode;
use memgym_core::{EnvConfig, EnvId, EpisodeState};

fn step_throughput(c: &mut Criterion) {
    let mut g = c.benchmark_group("step");
    g.throughput(Throughput::Elements(100));
    for env in EnvId::BASE {
        g.bench_function(env.name(), |b| {
            b.iter_batched(
                || (EpisodeState::reset_default(env, 1).unwrap().0, RandomPolicy::new(2)),
                |(mut s, mut p)| {
                    for _ in 0..100 {
                        if s.is_done() {
                            s = EpisodeState::reset_default(env, 1).unwrap().0;
                        }
                        let a = p.act(&s);
                        black_box(s.step(a).unwrap());
                    }
                },
                BatchSize::SmallInput,
            )
        });
    }
    g.finish();
}

fn reset_and_render(c: &mut Criterion) {
    let mut g = c.benchmark_group("reset");
    for env in [EnvId::MysteryPath, EnvId::EndlessMysteryPath, EnvId::SearingSpotlights] {
        g.bench_function(env.name(), |b| {
            let mut seed = 0;
            b.iter(|| {
                seed += 1;
                black_box(EpisodeState::reset_default(env, seed).unwrap())
            })
        });
    }
    g.finish();
    let (s, _) = EpisodeState::reset_default(EnvId::SearingSpotlights, 3).unwrap();
    c.bench_function("render_ground_truth/SearingSpotlights", |b| b.iter(|| black_box(s.render_ground_truth())));
}

fn oracle_search(c: &mut Criterion) {
    let (s, _) = EpisodeState::reset_default(EnvId::EndlessSearingSpotlights, 3).unwrap();
    c.bench_function("oracle/EndlessSearingSpotlights", |b| b.iter(|| black_box(OraclePolicy.act(&s))));
}

fn replay_verify(c: &mut Criterion) {
    let env = EnvId::MysteryPath;
    let log = record_episode(env, EnvConfig::defaults(env), 5, &mut RandomPolicy::new(5), 512).unwrap();
    let bytes = log.encode();
    c.bench_function("replay/decode_verify", |b| {
        b.iter(|| black_box(memgym_core::replay::ReplayLog::decode(&bytes).unwrap().verify()))
    });
}

fn numeric_kit(c: &mut Criterion) {
    let n = 2048;
    let r: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
    let v: Vec<f64> = (0..n).map(|i| (i as f64 * 0.11).cos()).collect();
    let d: Vec<bool> = (0..n).map(|i| i % 512 == 511).collect();
    c.bench_function("gae/2048", |b| b.iter(|| black_box(math::gae(&r, &v, &d, 0.0, 0.995, 0.95).unwrap())));
    let samples: Vec<Vec<f64>> = (0..5).map(|k| (0..150).map(|i| ((i * 7 + k) % 31) as f64).collect()).collect();
    c.bench_function("bootstrap_ci/5x150x1000", |b| {
        b.iter(|| black_box(math::stratified_bootstrap_ci(&samples, 0.95, 1000, 0).unwrap()))
    });
    c.bench_function("memory_window/t<W", |b| b.iter(|| black_box(math::memory_window(black_box(200), 256))));
}

criterion_group!(benches, step_throughput, reset_and_render, oracle_search, replay_verify, numeric_kit);
criterion_main!(benches);
