use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use ret_core::config::{RunConfig, Suite};
use ret_core::sweep::Execution;
use ret_core::verify::{coefficient_table, run_verify};

const CONFIG: &str = r#"{
  "model": {"kind": "juttner"},
  "closure": {"kind": "monatomic_juttner"},
  "transport": {"chi": 1.0, "mu": 0.5, "nu": 1.5},
  "grid": {
    "rho": {"min": 1e-3, "max": 1e3, "count": 40},
    "temperature": {"min": 1e-2, "max": 10.0, "count": 40}
  },
  "field_points": {"count": 400, "seed": 1},
  "classical": {"states": [[1, 1], [0.5, 2], [3, 0.1], [10, 0.5]]}
}"#;

fn sweeps(c: &mut Criterion) {
    let cfg = RunConfig::load(CONFIG).expect("bench config");
    let modes = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

    let mut g = c.benchmark_group("coefficient_table");
    for (name, exec) in modes {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| coefficient_table(&cfg, exec).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("verify");
    g.sample_size(20);
    for (name, exec) in modes {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| run_verify(&cfg, &Suite::ALL, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, sweeps);
criterion_main!(benches);
