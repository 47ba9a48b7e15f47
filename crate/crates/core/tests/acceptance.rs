//! Acceptance suite. Runs every criterion in sequence (timings are taken on a
//! quiet process), prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use twsp::baselines::{
    brute_force_cur, leverage_cur_with_scores, leverage_scores_from_svd, random_cur, sp_independent_cur, SpConfig,
};
use twsp::cur::reconstruction_error;
use twsp::io::{read_binary, read_csv, write_binary, write_csv};
use twsp::numkit::{pseudo_inverse, singular_values, svd};
use twsp::synth::{low_rank_plus_noise, SynthSpec};
use twsp::twsp::Termination;
use twsp::{normalized_error, solve, CurDecomposition, DenseMatrix, SeededRng, SolverConfig};

// criterion 1
const EXACT_TOL: f64 = 1e-8;
const EXACT_BUDGET: Duration = Duration::from_secs(1);
// criterion 2
const ORACLE_REL_GAP: f64 = 0.05;
const ORACLE_MIN_FRACTION: f64 = 0.90;
const ORACLE_SLACK: f64 = 1e-10;
const ORACLE_RESTARTS: usize = 5;
const ORACLE_BUDGET: Duration = Duration::from_secs(30);
// criterion 3
const ORDERING_MIN_FRACTION: f64 = 0.80;
const ORDERING_SEEDS: u64 = 10;
const ORDERING_BUDGET: Duration = Duration::from_secs(300);
// criterion 4
const CONVERGENCE_RUNS: u64 = 100;
const CONVERGENCE_K: usize = 20;
const SATURATED_MIN_FRACTION: f64 = 0.95;
// criterion 5
const MOORE_PENROSE_TOL: f64 = 1e-8;
const PYTHAGORAS_TOL: f64 = 1e-9;
const ECKART_YOUNG_SLACK: f64 = 1e-8;
const SPECTRUM_NORM_TOL: f64 = 1e-10;
const INVARIANT_CASES: u64 = 24;
const INVARIANT_BUDGET: Duration = Duration::from_secs(10);
// criterion 6
const GROWTH_MAX_RATIO: f64 = 3.0;
const GROWTH_ITERATIONS: usize = 20;
const GROWTH_SEEDS: u64 = 3;
// criterion 7
const ROUND_TRIP_CASES: u64 = 1000;

/// Desk-scale synthetic: 200×400, rank 10, 10% relative noise.
fn desk_scale(seed: u64) -> DenseMatrix {
    low_rank_plus_noise(&SynthSpec::with_relative_noise(200, 400, 10, 0.1, seed)).unwrap()
}

fn err_of(x: &DenseMatrix, d: &CurDecomposition) -> f64 {
    reconstruction_error(x, &d.col_indices, &d.row_indices).unwrap()
}

fn nerr_of(x: &DenseMatrix, d: &CurDecomposition) -> f64 {
    normalized_error(x, &d.col_indices, &d.row_indices).unwrap()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn exact_cur() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for r in 1..=3 {
        for seed in 0..20 {
            let x = low_rank_plus_noise(&SynthSpec::new(20, 30, r, 0.0, seed)).unwrap();
            let sol = solve(&x, &SolverConfig::new(r, r).with_seed(seed)).unwrap();
            worst = worst.max(sol.normalized_error);
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: worst <= EXACT_TOL && elapsed < EXACT_BUDGET,
        detail: format!("worst normalized error {worst:.2e} (<= {EXACT_TOL:e}), {:.3}s (< 1s)", elapsed.as_secs_f64()),
    }
}

fn oracle_proximity() -> Outcome {
    let start = Instant::now();
    let mut close = 0;
    let mut dominance_violations = 0;
    let mut worst_gap: f64 = 0.0;
    let instances = 50;
    for seed in 0..instances {
        let x = low_rank_plus_noise(&SynthSpec::with_relative_noise(8, 10, 3, 0.1, seed)).unwrap();
        let (_, best) = brute_force_cur(&x, 2, 2).unwrap();
        let cfg = SolverConfig::new(2, 2).with_seed(seed).with_restarts(ORACLE_RESTARTS);
        let tw = err_of(&x, &solve(&x, &cfg).unwrap().decomposition);
        let gap = (tw - best) / best;
        worst_gap = worst_gap.max(gap);
        if gap <= ORACLE_REL_GAP {
            close += 1;
        }
        let scores = leverage_scores_from_svd(&svd(&x).unwrap(), 2).unwrap();
        let others = [
            tw,
            err_of(&x, &sp_independent_cur(&x, 2, 2, &SpConfig::new(seed)).unwrap().0),
            err_of(&x, &leverage_cur_with_scores(&x, &scores, 2, 2, seed).unwrap()),
            err_of(&x, &random_cur(&x, 2, 2, seed).unwrap()),
        ];
        dominance_violations += others.iter().filter(|&&e| e < best - ORACLE_SLACK).count();
    }
    let elapsed = start.elapsed();
    let fraction = close as f64 / instances as f64;
    Outcome {
        pass: fraction >= ORACLE_MIN_FRACTION && dominance_violations == 0 && elapsed < ORACLE_BUDGET,
        detail: format!(
            "{close}/{instances} within {:.0}% of brute force (need {:.0}%), worst gap {:.1}%, {dominance_violations} dominance violations, {:.2}s (< 30s)",
            ORACLE_REL_GAP * 100.0,
            ORACLE_MIN_FRACTION * 100.0,
            worst_gap * 100.0,
            elapsed.as_secs_f64()
        ),
    }
}

fn method_ordering() -> Outcome {
    let start = Instant::now();
    let data: Vec<(DenseMatrix, _)> = (0..ORDERING_SEEDS)
        .map(|s| {
            let x = desk_scale(s);
            let dec = svd(&x).unwrap();
            (x, dec)
        })
        .collect();
    let ks: Vec<usize> = (2..=20).step_by(2).collect();
    let mut wins = 0;
    let mut table = Vec::new();
    for &k in &ks {
        // twsp, sp, leverage, random
        let mut mean = [0.0f64; 4];
        for (s, (x, dec)) in data.iter().enumerate() {
            let seed = s as u64;
            mean[0] += solve(x, &SolverConfig::new(k, k).with_seed(seed)).unwrap().normalized_error;
            mean[1] += nerr_of(x, &sp_independent_cur(x, k, k, &SpConfig::new(seed)).unwrap().0);
            let scores = leverage_scores_from_svd(dec, k).unwrap();
            mean[2] += nerr_of(x, &leverage_cur_with_scores(x, &scores, k, k, seed).unwrap());
            mean[3] += nerr_of(x, &random_cur(x, k, k, seed).unwrap());
        }
        let mean = mean.map(|v| v / ORDERING_SEEDS as f64);
        if mean[1..].iter().all(|&b| mean[0] <= b) {
            wins += 1;
        }
        table.push(format!("k={k}: {:.4}/{:.4}/{:.4}/{:.4}", mean[0], mean[1], mean[2], mean[3]));
    }
    let elapsed = start.elapsed();
    let fraction = wins as f64 / ks.len() as f64;
    for line in &table {
        println!("      {line}  (twsp/sp/leverage/random)");
    }
    Outcome {
        pass: fraction >= ORDERING_MIN_FRACTION && elapsed < ORDERING_BUDGET,
        detail: format!(
            "twsp best at {wins}/{} k values (need {:.0}%), {:.1}s (< 300s)",
            ks.len(),
            ORDERING_MIN_FRACTION * 100.0,
            elapsed.as_secs_f64()
        ),
    }
}

fn convergence_shape() -> Outcome {
    let start = Instant::now();
    let x = desk_scale(0);
    let mut monotone = 0;
    let mut saturated = 0;
    for seed in 0..CONVERGENCE_RUNS {
        let sol = solve(&x, &SolverConfig::new(CONVERGENCE_K, CONVERGENCE_K).with_seed(seed)).unwrap();
        let t = &sol.trace;
        let mut prev = t.initial_error;
        let mut ok = true;
        for r in &t.records {
            ok &= r.best_error <= prev;
            prev = r.best_error;
        }
        monotone += usize::from(ok);
        saturated += usize::from(t.termination == Termination::Saturated);
    }
    let runs = CONVERGENCE_RUNS as usize;
    Outcome {
        pass: monotone == runs && saturated as f64 >= SATURATED_MIN_FRACTION * runs as f64,
        detail: format!(
            "{monotone}/{runs} traces non-increasing, {saturated}/{runs} saturated (need {:.0}%), {:.1}s",
            SATURATED_MIN_FRACTION * 100.0,
            start.elapsed().as_secs_f64()
        ),
    }
}

fn rel_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.sub(b).unwrap().fro_norm() / b.fro_norm().max(f64::MIN_POSITIVE)
}

fn invariant_suite() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    for case in 0..INVARIANT_CASES {
        let mut rng = SeededRng::new(1000 + case);
        let n = 2 + rng.below(49);
        let m = 2 + rng.below(59);
        // alternate full-rank Gaussian and planted low rank with noise
        let x = if case % 2 == 0 {
            rng.gaussian_matrix(n, m)
        } else {
            let r = 1 + rng.below(n.min(m).min(6));
            low_rank_plus_noise(&SynthSpec::with_relative_noise(n, m, r, 0.1, case)).unwrap()
        };

        let p = pseudo_inverse(&x, None).unwrap();
        let xp = x.matmul(&p).unwrap();
        let px = p.matmul(&x).unwrap();
        let mp = [
            rel_diff(&xp.matmul(&x).unwrap(), &x),
            rel_diff(&px.matmul(&p).unwrap(), &p),
            rel_diff(&xp.transpose(), &xp),
            rel_diff(&px.transpose(), &px),
        ];
        if mp.iter().any(|&v| v > MOORE_PENROSE_TOL) {
            failures.push(format!("case {case}: Moore-Penrose {mp:?}"));
        }

        let sv = singular_values(&x).unwrap();
        let f2 = x.fro_norm().powi(2);
        let s2: f64 = sv.iter().map(|s| s * s).sum();
        if (s2 - f2).abs() > SPECTRUM_NORM_TOL * f2 {
            failures.push(format!("case {case}: spectrum-norm {:.2e}", (s2 - f2).abs() / f2));
        }

        let k1 = 1 + rng.below(m.min(8));
        let k2 = 1 + rng.below(n.min(8));
        let cols = rng.sample_without_replacement(&(0..m).collect::<Vec<_>>(), k1).unwrap();
        let rows = rng.sample_without_replacement(&(0..n).collect::<Vec<_>>(), k2).unwrap();
        let e = reconstruction_error(&x, &cols, &rows).unwrap();
        let c = x.select_columns(&cols).unwrap();
        let r = x.select_rows(&rows).unwrap();
        let pc = c.matmul(&pseudo_inverse(&c, None).unwrap()).unwrap();
        let pr = pseudo_inverse(&r, None).unwrap().matmul(&r).unwrap();
        let kept = pc.matmul(&x).unwrap().matmul(&pr).unwrap().fro_norm().powi(2);
        if (e * e - (f2 - kept)).abs() > PYTHAGORAS_TOL * f2 {
            failures.push(format!("case {case}: Pythagorean {:.2e}", (e * e - (f2 - kept)).abs() / f2));
        }
        let tail: f64 = sv.iter().skip(k1.min(k2)).map(|s| s * s).sum();
        if e * e < tail - ECKART_YOUNG_SLACK * f2 {
            failures.push(format!("case {case}: Eckart-Young violated"));
        }

        let cfg = SolverConfig::new(k1, k2).with_seed(case);
        let a = solve(&x, &cfg).unwrap();
        let tail_sol = sv.iter().skip(k1.min(k2)).map(|s| s * s).sum::<f64>();
        if a.normalized_error * f2 < tail_sol - ECKART_YOUNG_SLACK * f2 {
            failures.push(format!("case {case}: solver below Eckart-Young tail"));
        }
        let b = solve(&x, &cfg).unwrap();
        if a != b {
            failures.push(format!("case {case}: solver not deterministic"));
        }
        let alpha = 0.5 + 7.0 * rng.uniform();
        let scaled = solve(&x.scaled(alpha), &cfg).unwrap();
        let seq = |s: &twsp::TwspSolution| {
            s.trace.records.iter().map(|r| (r.col_indices.clone(), r.row_indices.clone())).collect::<Vec<_>>()
        };
        if seq(&scaled) != seq(&a)
            || scaled.decomposition.col_indices != a.decomposition.col_indices
            || scaled.decomposition.row_indices != a.decomposition.row_indices
        {
            failures.push(format!("case {case}: scale {alpha:.3} changed the selection"));
        }
    }
    let elapsed = start.elapsed();
    for f in &failures {
        println!("      {f}");
    }
    Outcome {
        pass: failures.is_empty() && elapsed < INVARIANT_BUDGET,
        detail: format!(
            "{} cases up to 50x60, {} failures, {:.2}s (< 10s)",
            INVARIANT_CASES,
            failures.len(),
            elapsed.as_secs_f64()
        ),
    }
}

fn per_iteration_seconds(x: &DenseMatrix, seed: u64) -> f64 {
    let mut cfg = SolverConfig::new(10, 10).with_seed(seed);
    cfg.max_iter = GROWTH_ITERATIONS;
    // a window longer than the run disables saturation
    cfg.saturation_window = GROWTH_ITERATIONS + 1;
    let start = Instant::now();
    let sol = solve(x, &cfg).unwrap();
    start.elapsed().as_secs_f64() / sol.trace.iterations() as f64
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn complexity_growth() -> Outcome {
    let time_at = |m: usize| {
        let x = low_rank_plus_noise(&SynthSpec::with_relative_noise(400, m, 10, 0.1, 7)).unwrap();
        median((0..GROWTH_SEEDS).map(|s| per_iteration_seconds(&x, s)).collect())
    };
    let small = time_at(500);
    let large = time_at(1000);
    let ratio = large / small;
    Outcome {
        pass: ratio <= GROWTH_MAX_RATIO,
        detail: format!(
            "per-iteration {:.1}ms at M=500, {:.1}ms at M=1000, ratio {ratio:.2} (<= {GROWTH_MAX_RATIO})",
            small * 1e3,
            large * 1e3
        ),
    }
}

fn round_trip() -> Outcome {
    let mut rng = SeededRng::new(77);
    let mut bad = 0;
    let bits = |m: &DenseMatrix| m.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    for _ in 0..ROUND_TRIP_CASES {
        let n = 1 + rng.below(20);
        let m = 1 + rng.below(20);
        let data: Vec<f64> = (0..n * m)
            .map(|_| match rng.below(8) {
                0 => 0.0,
                1 => -0.0,
                2 => f64::from_bits(1 + rng.below(1 << 20) as u64),
                3 => f64::MAX * rng.uniform(),
                _ => rng.standard_normal() * 10f64.powi(rng.below(600) as i32 - 300),
            })
            .collect();
        let x = DenseMatrix::new(n, m, data).unwrap();
        let mut csv = Vec::new();
        write_csv(&mut csv, &x).unwrap();
        let mut bin = Vec::new();
        write_binary(&mut bin, &x).unwrap();
        let from_csv = read_csv(csv.as_slice(), false).unwrap();
        let from_bin = read_binary(bin.as_slice()).unwrap();
        if from_csv.shape() != x.shape() || bits(&from_csv) != bits(&x) {
            bad += 1;
        }
        if from_bin.shape() != x.shape() || bits(&from_bin) != bits(&x) {
            bad += 1;
        }
    }
    Outcome {
        pass: bad == 0,
        detail: format!("{ROUND_TRIP_CASES} matrices up to 20x20, csv and binary, {bad} mismatches"),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("1 exact CUR on noiseless low rank", exact_cur),
        ("2 proximity to brute-force optimum", oracle_proximity),
        ("3 method ordering at desk scale", method_ordering),
        ("4 convergence shape", convergence_shape),
        ("5 invariant suite", invariant_suite),
        ("6 per-iteration cost growth", complexity_growth),
        ("7 matrix I/O round trip", round_trip),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = run();
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {name}: {}", outcome.detail);
        failed += usize::from(!outcome.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
