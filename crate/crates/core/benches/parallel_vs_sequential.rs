use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use whitham_core::exec;
use whitham_core::grid::{make_grid, Grid, GridFunction};
use whitham_core::kernel::kernel_table;
use whitham_core::maximize::SolverConfig;
use whitham_core::sweep::{alpha_sweep, SweepMode};

// Each workload runs on the default rayon pool and on a one-thread pool.
// Building with `--no-default-features` drops rayon from the library and
// the group names switch to `sequential/...`.
fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let all = rayon::ThreadPoolBuilder::new().build().unwrap();
    vec![("threads=1", one), ("threads=all", all)]
}

fn group(name: &str) -> String {
    let build = if exec::is_parallel() { "parallel" } else { "sequential" };
    format!("{build}/{name}")
}

fn kernel(c: &mut Criterion) {
    let name = group("kernel_table");
    let mut g = c.benchmark_group(name);
    g.sample_size(10);
    for (label, pool) in pools() {
        for (l, n) in [(5u32, 2048usize), (6, 4096)] {
            let grid = make_grid(l, n).unwrap();
            g.bench_with_input(BenchmarkId::new(label, n), &grid, |b, grid| {
                b.iter(|| pool.install(|| kernel_table(grid, 0.5).unwrap()))
            });
        }
    }
    g.finish();
}

fn slobodeckij(c: &mut Criterion) {
    let name = group("slobodeckij_gap");
    let mut g = c.benchmark_group(name);
    g.sample_size(10);
    let grid: Arc<Grid> = make_grid(6, 4096).unwrap();
    let table = kernel_table(&grid, 0.5).unwrap();
    let f = GridFunction::from_fn(&grid, |x| (-x * x / 8.0).exp()).unwrap();
    for (label, pool) in pools() {
        g.bench_function(label, |b| b.iter(|| pool.install(|| table.slobodeckij_gap(&f).unwrap())));
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let name = group("alpha_sweep_cold");
    let mut g = c.benchmark_group(name);
    g.sample_size(10);
    let grid = make_grid(6, 4096).unwrap();
    let cfg = SolverConfig::default();
    let alphas = [3.0, 5.0, 10.0, 20.0, 50.0];
    for (label, pool) in pools() {
        g.bench_function(label, |b| {
            b.iter(|| pool.install(|| alpha_sweep(&alphas, &grid, &cfg, SweepMode::Cold).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, kernel, slobodeckij, sweep);
criterion_main!(benches);
