//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use mirrorsym::analysis::{lyapunov_estimate, simulate_linearized, sparsity, CurvatureDist, Verdict};
use mirrorsym::data::{DataSource, Generator};
use mirrorsym::dcs::{dcs_wrap, DcsConfig};
use mirrorsym::experiments::verify::{
    dcs_faithfulness_gap, l1_check, persistence_residual, second_order_threshold_gap,
    stationary_residual, tanh_hessian_check, threshold_failures, two_point_threshold_gap,
};
use mirrorsym::experiments::{
    continual, run, sweep_rank, sweep_sparsity, Experiment, ExperimentConfig,
};
use mirrorsym::models::zoo::zoo;
use mirrorsym::models::{
    hadamard_regression, linear_regression, permutation_mlp, PerSampleLoss,
};
use mirrorsym::numerics::{normal, norm, orthonormalize, Matrix, RngStream};
use mirrorsym::optimize::{sweep, train, Init, Metric, MetricSpec, SweepCell, TrainerConfig};
use mirrorsym::symmetry::make_mirror;

const SEED: u64 = 0;

/// Criterion number, time budget in seconds (0 for none), check.
type Criterion = (u32, u64, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn within(limit_secs: u64, elapsed: Duration) -> bool {
    elapsed <= Duration::from_secs(limit_secs)
}

fn criterion_1() -> Outcome {
    let r = tanh_hessian_check(10).unwrap();
    outcome(
        r.off_block <= 1e-4 && r.coupling <= 1e-4 && r.eigenvalue <= 1e-4 && r.eigenvector <= 1e-3,
        format!(
            "off-block {:.1e}, coupling {:.1e}, eigenvalues {:.1e}, eigenvectors {:.1e}",
            r.off_block, r.coupling, r.eigenvalue, r.eigenvector
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0_f64;
    let mut pairs = 0;
    for (i, e) in zoo(RngStream::new(SEED, 0)).iter().enumerate() {
        for (j, m) in e.mirrors.iter().enumerate() {
            let rng = RngStream::new(SEED, 2).derive(i as u64).derive(j as u64);
            let r = stationary_residual(e.model.as_ref(), m, &[0.0, 0.1, 1.0], 100, rng).unwrap();
            worst = worst.max(r);
            pairs += 1;
        }
    }
    outcome(
        worst <= 1e-10,
        format!("max |O^T grad| {worst:.1e} over {pairs} pairs"),
    )
}

fn criterion_3() -> Outcome {
    let mut clean = 0.0_f64;
    let mut noisy = f64::INFINITY;
    let mut pairs = 0;
    for (i, e) in zoo(RngStream::new(SEED, 0)).iter().enumerate() {
        for (j, m) in e.mirrors.iter().enumerate() {
            let rng = RngStream::new(SEED, 3).derive(i as u64).derive(j as u64);
            clean = clean.max(persistence_residual(e.model.as_ref(), m, 0.0, 1000, rng).unwrap());
            noisy = noisy.min(persistence_residual(e.model.as_ref(), m, 1e-3, 1000, rng).unwrap());
            pairs += 1;
        }
    }
    outcome(
        clean <= 1e-8 && noisy > 1e-4,
        format!("sigma=0 max residual {clean:.1e}; sigma=1e-3 min peak residual {noisy:.1e}; {pairs} pairs"),
    )
}

fn criterion_4() -> Outcome {
    let mut failures = 0;
    let mut cases = 0;
    for (i, e) in zoo(RngStream::new(SEED, 0)).iter().enumerate() {
        for (j, m) in e.mirrors.iter().enumerate() {
            let rng = RngStream::new(SEED, 4).derive(i as u64).derive(j as u64);
            failures += threshold_failures(e.model.as_ref(), m, 100, 8, rng).unwrap();
            cases += 100;
        }
    }
    outcome(
        failures == 0,
        format!("{} of {cases} projections strictly better", cases - failures),
    )
}

fn criterion_5() -> Outcome {
    let root = RngStream::new(SEED, 5);
    let gap = two_point_threshold_gap(root.derive(0)).unwrap();
    let point = CurvatureDist::point(1.0);
    let mut verdicts = Vec::new();
    let mut det_ok = true;
    for (k, &lr) in [0.1, 1.9, 2.1].iter().enumerate() {
        let est = lyapunov_estimate(&point, lr, 0.0, 1000, root.derive(10 + k as u64)).unwrap();
        let sim = simulate_linearized(&point, lr, 0.0, 1.0, 2000, root.derive(20 + k as u64))
            .unwrap()
            .verdict();
        let want = if lr < 2.0 {
            Verdict::Collapse
        } else {
            Verdict::Escape
        };
        det_ok &= est.verdict == want && sim == want;
        verdicts.push(format!("{lr}:{}/{}", est.verdict, sim));
    }
    let (second_order_gap, reach) = second_order_threshold_gap(root.derive(1)).unwrap();
    outcome(
        gap <= 0.05 && det_ok && second_order_gap <= 0.25 && reach <= 0.5,
        format!(
            "two-point gap {gap:.3}; h=1 {}; second-order gap {second_order_gap:.3} at max|lr(h+g)| {reach:.3}",
            verdicts.join(" ")
        ),
    )
}

fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &k in &idx[i..=j] {
                r[k] = avg;
            }
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

fn sparsity_config() -> ExperimentConfig {
    ExperimentConfig::defaults(Experiment::SweepSparsity)
}

fn criterion_6() -> Outcome {
    let cfg = sparsity_config();
    let rows = sweep_sparsity(&cfg).unwrap();
    let lrs = cfg.reals("sweep", "learning_rate");
    let vanilla_max = rows
        .iter()
        .filter(|r| r.model.starts_with("linear"))
        .map(|r| r.sparsity)
        .fold(0.0, f64::max);
    let had: Vec<_> = rows.iter().filter(|r| r.model.starts_with("hadamard")).collect();
    let stable: Vec<f64> = lrs
        .iter()
        .copied()
        .filter(|&lr| had.iter().all(|r| r.learning_rate != lr || !r.diverged))
        .collect();
    let mean_at = |lr: f64| {
        let v: Vec<f64> = had.iter().filter(|r| r.learning_rate == lr).map(|r| r.sparsity).collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let means: Vec<f64> = stable.iter().map(|&lr| mean_at(lr)).collect();
    let rho = spearman(&stable, &means);
    let top = *stable.last().unwrap_or(&f64::NAN);
    let top_min = had
        .iter()
        .filter(|r| r.learning_rate == top)
        .map(|r| r.sparsity)
        .fold(f64::INFINITY, f64::min);
    let replicates = cfg.count("experiment", "replicates");
    outcome(
        vanilla_max <= 0.02 && top_min >= 0.5 && stable.len() >= 5 && rho > 0.8 && replicates >= 3,
        format!(
            "vanilla max sparsity {vanilla_max:.3}; hadamard at top stable lr {top}: min {top_min:.3}; \
             spearman {rho:.3} over {} stable lrs x {replicates} replicates",
            stable.len()
        ),
    )
}

fn rank_configs() -> (ExperimentConfig, ExperimentConfig) {
    let plain = ExperimentConfig::defaults(Experiment::SweepRank);
    let mut residual = plain.clone();
    residual.set("model", "variants", "residual");
    residual.set("data", "mu", "0, 0.5, 1");
    (plain, residual)
}

fn criterion_7() -> Outcome {
    let (plain_cfg, residual_cfg) = rank_configs();
    let d = plain_cfg.count("model", "d") as f64;
    let plain = sweep_rank(&plain_cfg).unwrap();
    let mut by_gamma: Vec<(f64, f64)> = plain.iter().map(|r| (r.gamma, r.rank)).collect();
    by_gamma.sort_by(|a, b| a.0.total_cmp(&b.0));
    let ranks: Vec<f64> = by_gamma.iter().map(|p| p.1).collect();
    let monotone = ranks.windows(2).all(|w| w[1] <= w[0]);
    let full_at_zero = by_gamma[0].0 == 0.0 && ranks[0] == d;
    let reduced = *ranks.last().unwrap() <= 0.75 * d;
    let residual = sweep_rank(&residual_cfg).unwrap();
    let residual_full = residual.iter().all(|r| r.rank == d);
    let mus: Vec<f64> = residual_cfg.reals("data", "mu");
    outcome(
        monotone && full_at_zero && reduced && residual_full && mus == [0.0, 0.5, 1.0],
        format!(
            "plain ranks {:?} over gamma {:?}; residual ranks {:?} over mu {mus:?} x gamma",
            ranks,
            by_gamma.iter().map(|p| p.0).collect::<Vec<_>>(),
            residual.iter().map(|r| r.rank).collect::<Vec<_>>()
        ),
    )
}

fn continual_config() -> ExperimentConfig {
    ExperimentConfig::defaults(Experiment::Continual)
}

fn criterion_8() -> Outcome {
    let cfg = continual_config();
    let rows = continual(&cfg).unwrap();
    let tasks = cfg.count("data", "tasks");
    let at = |variant: &str, task: usize| {
        rows.iter()
            .find(|r| r.variant == variant && r.task == task)
            .map(|r| r.dead_neurons as f64)
            .unwrap_or(f64::NAN)
    };
    let base = at("vanilla", 1);
    let sym_first = at("symmetric", 1);
    let sym_last = at("symmetric", tasks);
    let others: Vec<(&str, f64)> = ["vanilla", "symmetric+noise", "symmetric+bias"]
        .iter()
        .map(|&v| (v, at(v, tasks)))
        .collect();
    let others_ok = others.iter().all(|&(_, c)| c <= 2.0 * base);
    outcome(
        sym_last > sym_first && sym_last >= 5.0 * base && others_ok,
        format!(
            "symmetric {sym_first} -> {sym_last}; vanilla task-1 level {base}; at task {tasks}: {}",
            others
                .iter()
                .map(|(v, c)| format!("{v} {c}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    )
}

fn criterion_9() -> Outcome {
    let steps = 20_000;
    let gen = Generator::teacher(4, 2, 0.5, RngStream::new(SEED, 9)).unwrap();
    let model: Arc<dyn PerSampleLoss> = Arc::new(permutation_mlp(32, 4));
    let mut cells = Vec::new();
    for gamma in [0.0, 1e-2] {
        for seed in 0..3 {
            cells.push(SweepCell {
                label: format!("gamma={gamma}"),
                model: model.clone(),
                data: DataSource::Stream(gen.clone()),
                config: TrainerConfig {
                    learning_rate: 0.05,
                    weight_decay: gamma,
                    batch_size: 8,
                    steps,
                    seed,
                    record_every: steps,
                    ..TrainerConfig::default()
                },
                metrics: MetricSpec {
                    metrics: vec![Metric::ClusterCount],
                    eval_size: 200,
                },
            });
        }
    }
    let runs = sweep(&cells, 1).unwrap();
    let counts = |gamma: f64| -> Vec<f64> {
        runs.iter()
            .filter(|r| cells[r.cell_id].config.weight_decay == gamma)
            .map(|r| r.trajectory.last("cluster_count").unwrap_or(f64::NAN))
            .collect()
    };
    let (free, decayed) = (counts(0.0), counts(1e-2));
    outcome(
        free.len() == 3 && decayed.len() == 3 && free.iter().all(|&c| c == 32.0) && decayed.iter().all(|&c| c < 32.0),
        format!("clusters gamma=0 {free:?}; gamma=1e-2 {decayed:?}"),
    )
}

fn criterion_10() -> Outcome {
    let gap = dcs_faithfulness_gap(RngStream::new(SEED, 10)).unwrap();

    let d = 50;
    let steps = 20_000;
    let gen = Generator::sparse_regression(d, 1.0).unwrap();
    let mut sparsities = Vec::new();
    let mut sparser = true;
    for seed in 0..3 {
        let cfg = TrainerConfig {
            learning_rate: 0.02,
            steps,
            record_every: steps,
            seed,
            ..TrainerConfig::default()
        };
        let had = hadamard_regression(d);
        let th = train(&had, &DataSource::Stream(gen.clone()), &cfg, &MetricSpec::default()).unwrap();
        let hs = sparsity(&had.effective_weights(&th.final_theta));
        let wrapped = dcs_wrap(Box::new(linear_regression(d)), DcsConfig::identity(d, 0.05)).unwrap();
        let td = train(&wrapped, &DataSource::Stream(gen.clone()), &cfg, &MetricSpec::default()).unwrap();
        let ds = sparsity(&wrapped.transform(&td.final_theta));
        sparser &= !th.diverged && !td.diverged && ds >= hs;
        sparsities.push((ds, hs));
    }

    let mut r = RngStream::new(SEED, 11).rng();
    let dim = 6;
    let q = orthonormalize(&Matrix::from_fn(dim, 2, |_, _| normal(&mut r))).unwrap();
    let sym = make_mirror(&q).unwrap();
    let wrapped = dcs_wrap(
        Box::new(linear_regression(dim)),
        DcsConfig::from_mirror(&sym, 0.1).unwrap(),
    )
    .unwrap();
    let art = wrapped.artificial_mirror();
    let theta0 = art
        .project_symmetric(&(0..3 * dim).map(|_| 0.5 * normal(&mut r)).collect::<Vec<_>>())
        .unwrap();
    let cfg = TrainerConfig {
        learning_rate: 0.05,
        steps: 1000,
        record_every: 1,
        seed: SEED,
        stream_id: 12,
        init: Init::Explicit(theta0),
        ..TrainerConfig::default()
    };
    let gen = Generator::sparse_regression(dim, 0.5).unwrap();
    let metrics = MetricSpec::new(vec![Metric::MirrorResidual(art.clone())]);
    let tr = train(&wrapped, &DataSource::Stream(gen), &cfg, &metrics).unwrap();
    let residual = tr.max(&metrics.names()[0]).unwrap();
    let ot = norm(&sym.order_parameter(&wrapped.transform(&tr.final_theta)).unwrap());

    outcome(
        gap <= 1e-6 && sparser && residual <= 1e-8 && ot <= 1e-8,
        format!(
            "faithfulness gap {gap:.1e}; sparsity dcs/hadamard {:?}; artificial-mirror residual {residual:.1e}, |O^T T| {ot:.1e}",
            sparsities
                .iter()
                .map(|(a, b)| format!("{a:.2}/{b:.2}"))
                .collect::<Vec<_>>()
        ),
    )
}

fn criterion_11() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (i, e) in zoo(RngStream::new(SEED, 0)).iter().enumerate() {
        let rng = RngStream::new(SEED, 13).derive(i as u64);
        match e.name.as_str() {
            "tanh" | "hadamard" => {
                for (j, m) in e.mirrors.iter().enumerate() {
                    let rep = l1_check(e.model.as_ref(), m, 8, rng.derive(j as u64)).unwrap();
                    ok &= rep.passed;
                    lines.push(format!("{}/{} {}", e.name, m.label(), rep.passed));
                }
            }
            "linear" => {
                for (j, m) in e.negative_controls.iter().enumerate() {
                    let rep = l1_check(e.model.as_ref(), m, 8, rng.derive(j as u64)).unwrap();
                    ok &= !rep.passed;
                    lines.push(format!("control {}/{} {}", e.name, m.label(), rep.passed));
                }
            }
            _ => {}
        }
    }
    outcome(ok, lines.join("; "))
}

fn cli_csv(args: &[&str]) -> (Vec<u8>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_mirrorsym"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.stdout, out.status.code().unwrap_or(-1))
}

fn criterion_12() -> Outcome {
    let mut same = Vec::new();
    let (plain, residual) = rank_configs();
    let mut lyap = ExperimentConfig::defaults(Experiment::Lyapunov);
    lyap.set("sweep", "learning_rate", "0.5, 1.5");
    for cfg in [sparsity_config(), plain, residual, continual_config(), lyap] {
        let a = run(&cfg).unwrap().csv;
        let b = run(&cfg).unwrap().csv;
        same.push((cfg.experiment().name().to_string(), a == b));
    }
    let first = cli_csv(&["verify", "--seed", "7"]);
    let second = cli_csv(&["verify", "--seed", "7"]);
    same.push((
        "verify (cli)".into(),
        first == second && first.1 == 0 && !first.0.is_empty(),
    ));
    outcome(
        same.iter().all(|p| p.1),
        same.iter()
            .map(|(n, ok)| format!("{n} {}", if *ok { "identical" } else { "DIFFERS" }))
            .collect::<Vec<_>>()
            .join(", "),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (1, 1, criterion_1),
        (2, 10, criterion_2),
        (3, 30, criterion_3),
        (4, 30, criterion_4),
        (5, 30, criterion_5),
        (6, 300, criterion_6),
        (7, 300, criterion_7),
        (8, 300, criterion_8),
        (9, 300, criterion_9),
        (10, 60, criterion_10),
        (11, 10, criterion_11),
        (12, 0, criterion_12),
    ];
    let filter: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (id, limit, f) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let t = Instant::now();
        let o = f();
        let elapsed = t.elapsed();
        let timely = limit == 0 || within(limit, elapsed);
        let passed = o.passed && timely;
        if !passed {
            failed += 1;
        }
        let budget = if limit == 0 {
            String::new()
        } else {
            format!(" / {limit} s")
        };
        println!(
            "criterion {id:>2}: {} ({:.1} s{budget}) {}",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            o.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
