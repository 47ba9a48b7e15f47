use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use twsp::applications::{assign_top_f, cross_class_kernel, hconcat};
use twsp::baselines::{
    brute_force_cur, leverage_cur, leverage_cur_with_scores, leverage_scores_from_svd, random_cur,
    sp_independent_cur, LeverageScores, SpConfig,
};
use twsp::cur::MatrixData;
use twsp::io::{read_matrix, write_matrix, MatrixFormat};
use twsp::numkit::svd;
use twsp::synth::{low_rank_plus_noise, SynthSpec};
use twsp::twsp::{ConvergenceTrace, Termination};
use twsp::{reconstruction_error, solve, CurDecomposition, DenseMatrix, SolverConfig};

use crate::{
    AssignArgs, BenchmarkArgs, ConvergenceArgs, DecomposeArgs, GenerateArgs, InputArgs, KernelArgs, Method,
    SynthArgs,
};

fn read_input(path: &Path, io: &InputArgs) -> Result<DenseMatrix> {
    read_matrix(path, io.format_for(path), io.header).with_context(|| format!("reading {}", path.display()))
}

fn write_output(path: &Path, m: &DenseMatrix) -> Result<()> {
    write_matrix(path, m, MatrixFormat::from_path(path)).with_context(|| format!("writing {}", path.display()))
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn synth_matrix(s: &SynthArgs, seed: u64) -> Result<DenseMatrix> {
    Ok(low_rank_plus_noise(&SynthSpec::with_relative_noise(s.n, s.m, s.rank, s.noise, seed))?)
}

fn join(indices: &[usize]) -> String {
    indices.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

/// Outcome of one selector on one matrix.
struct Run {
    decomposition: CurDecomposition,
    iterations: usize,
    termination: Option<Termination>,
    trace: Option<ConvergenceTrace>,
    restart: Option<usize>,
    ms: f64,
}

/// Leverage scores are either computed on demand or reused across calls.
enum Leverage<'a> {
    Rank(usize),
    Scores(&'a LeverageScores),
}

fn run_method(x: &DenseMatrix, method: Method, cfg: &SolverConfig, leverage: Leverage<'_>) -> Result<Run> {
    let start = Instant::now();
    let (k1, k2, seed) = (cfg.k1, cfg.k2, cfg.seed);
    let mut run = match method {
        Method::Twsp => {
            let sol = solve(x, cfg)?;
            Run {
                iterations: sol.trace.iterations(),
                termination: Some(sol.trace.termination),
                restart: Some(sol.restart),
                trace: Some(sol.trace),
                decomposition: sol.decomposition,
                ms: 0.0,
            }
        }
        Method::Sp => {
            let sp = SpConfig {
                max_iter: Some(cfg.max_iter),
                matching_target: cfg.matching_target,
                ..SpConfig::new(seed)
            };
            let (decomposition, iterations) = sp_independent_cur(x, k1, k2, &sp)?;
            Run::plain(decomposition, iterations)
        }
        Method::Leverage => {
            let decomposition = match leverage {
                Leverage::Rank(r) => leverage_cur(x, k1, k2, r, seed)?,
                Leverage::Scores(s) => leverage_cur_with_scores(x, s, k1, k2, seed)?,
            };
            Run::plain(decomposition, 0)
        }
        Method::Random => Run::plain(random_cur(x, k1, k2, seed)?, 0),
        Method::Brute => Run::plain(brute_force_cur(x, k1, k2)?.0, 0),
    };
    run.ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(run)
}

impl Run {
    fn plain(decomposition: CurDecomposition, iterations: usize) -> Self {
        Self {
            decomposition,
            iterations,
            termination: None,
            trace: None,
            restart: None,
            ms: 0.0,
        }
    }
}

#[derive(Serialize)]
struct DecomposeOutput<'a> {
    method: &'static str,
    k1: usize,
    k2: usize,
    seed: u64,
    col_indices: &'a [usize],
    row_indices: &'a [usize],
    core: MatrixData,
    normalized_error: f64,
    reconstruction_error: f64,
    ms: f64,
    iterations: usize,
    termination: Option<String>,
    restart: Option<usize>,
    trace: Option<&'a ConvergenceTrace>,
}

pub fn decompose(a: &DecomposeArgs) -> Result<()> {
    let x = read_input(&a.input, &a.io)?;
    let cfg = a.solver.config();
    cfg.validate(x.nrows(), x.ncols())?;
    let rank = a
        .leverage_rank
        .unwrap_or_else(|| cfg.k1.max(cfg.k2).min(x.nrows().min(x.ncols())));
    let run = run_method(&x, a.method, &cfg, Leverage::Rank(rank))?;
    let d = &run.decomposition;
    let err = reconstruction_error(&x, &d.col_indices, &d.row_indices)?;
    let out = DecomposeOutput {
        method: a.method.name(),
        k1: cfg.k1,
        k2: cfg.k2,
        seed: cfg.seed,
        col_indices: &d.col_indices,
        row_indices: &d.row_indices,
        core: MatrixData::from(&d.core),
        normalized_error: err * err / x.fro_norm().powi(2),
        reconstruction_error: err,
        ms: run.ms,
        iterations: run.iterations,
        termination: run.termination.map(|t| t.to_string()),
        restart: run.restart,
        trace: run.trace.as_ref(),
    };
    let mut w = open_output(a.output.as_deref())?;
    serde_json::to_writer_pretty(&mut w, &out)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

struct BenchRow {
    method: Method,
    k: usize,
    seed: u64,
    normalized_error: f64,
    ms: f64,
    iterations: usize,
    cols: Vec<usize>,
    rows: Vec<usize>,
}

pub fn benchmark(a: &BenchmarkArgs) -> Result<()> {
    if a.k_min == 0 || a.k_step == 0 || a.k_min > a.k_max {
        bail!(
            "invalid sweep: need 1 <= k-min <= k-max and k-step >= 1 (got {}..={} step {})",
            a.k_min,
            a.k_max,
            a.k_step
        );
    }
    if a.seeds == 0 || a.methods.is_empty() {
        bail!("need at least one seed and one method");
    }
    let ks: Vec<usize> = (a.k_min..=a.k_max).step_by(a.k_step).collect();
    let mut rows = Vec::new();
    for seed in 0..a.seeds {
        let x = synth_matrix(&a.synth, seed)?;
        let dec = if a.methods.contains(&Method::Leverage) {
            Some(svd(&x)?)
        } else {
            None
        };
        for &k in &ks {
            let mut cfg = SolverConfig::new(k, k)
                .with_seed(seed)
                .with_restarts(a.restarts)
                .with_matching_target(a.matching_target.into());
            cfg.saturation_tol = a.tol;
            if let Some(m) = a.max_iter {
                cfg.max_iter = m;
            }
            if let Some(w) = a.window {
                cfg.saturation_window = w;
            }
            cfg.validate(x.nrows(), x.ncols())?;
            let scores = dec.as_ref().map(|d| leverage_scores_from_svd(d, k)).transpose()?;
            for &method in &a.methods {
                let leverage = match &scores {
                    Some(s) => Leverage::Scores(s),
                    None => Leverage::Rank(k),
                };
                let run = run_method(&x, method, &cfg, leverage)?;
                let d = run.decomposition;
                let e = reconstruction_error(&x, &d.col_indices, &d.row_indices)?;
                rows.push(BenchRow {
                    method,
                    k,
                    seed,
                    normalized_error: e * e / x.fro_norm().powi(2),
                    ms: run.ms,
                    iterations: run.iterations,
                    cols: d.col_indices,
                    rows: d.row_indices,
                });
            }
        }
    }
    rows.sort_by(|p, q| {
        (p.method.name(), p.k, p.seed).cmp(&(q.method.name(), q.k, q.seed))
    });

    let mut w = open_output(a.output.as_deref())?;
    writeln!(w, "method,k1,k2,seed,normalized_error,ms,iterations")?;
    for r in &rows {
        writeln!(
            w,
            "{},{},{},{},{:?},{:.3},{}",
            r.method.name(),
            r.k,
            r.k,
            r.seed,
            r.normalized_error,
            r.ms,
            r.iterations
        )?;
    }
    w.flush()?;
    if let Some(path) = &a.emit_indices {
        let mut w = open_output(Some(path))?;
        writeln!(w, "method,k1,k2,seed,col_indices,row_indices")?;
        for r in &rows {
            writeln!(w, "{},{},{},{},{},{}", r.method.name(), r.k, r.k, r.seed, join(&r.cols), join(&r.rows))?;
        }
        w.flush()?;
    }
    Ok(())
}

pub fn convergence(a: &ConvergenceArgs) -> Result<()> {
    let x = match &a.input {
        Some(p) => read_input(p, &a.io)?,
        None => synth_matrix(&a.synth, a.data_seed)?,
    };
    if a.seeds == 0 {
        bail!("need at least one seed");
    }
    let mut w = open_output(a.output.as_deref())?;
    let mut sel = a.emit_selections.as_deref().map(|p| open_output(Some(p))).transpose()?;
    writeln!(w, "seed,iteration,e_c,e_r,accepted,current_error,best_error")?;
    if let Some(s) = sel.as_mut() {
        writeln!(s, "seed,iteration,col_indices,row_indices")?;
    }
    for offset in 0..a.seeds {
        let seed = a.solver.seed.wrapping_add(offset);
        let sol = solve(&x, &a.solver.config_for(a.solver.k1, a.solver.k2, seed))?;
        let t = &sol.trace;
        writeln!(w, "{},0,,,init,{:?},{:?}", t.seed, t.initial_error, t.initial_error)?;
        if let Some(s) = sel.as_mut() {
            writeln!(s, "{},0,{},{}", t.seed, join(&t.initial_col_indices), join(&t.initial_row_indices))?;
        }
        for r in &t.records {
            writeln!(
                w,
                "{},{},{:?},{:?},{},{:?},{:?}",
                t.seed, r.iteration, r.e_c, r.e_r, r.accepted, r.current_error, r.best_error
            )?;
            if let Some(s) = sel.as_mut() {
                writeln!(s, "{},{},{},{}", t.seed, r.iteration, join(&r.col_indices), join(&r.row_indices))?;
            }
        }
    }
    w.flush()?;
    if let Some(mut s) = sel {
        s.flush()?;
    }
    Ok(())
}

pub fn assign_channels(a: &AssignArgs) -> Result<()> {
    let x = read_input(&a.input, &a.io)?;
    let sol = solve(&x, &a.solver.config())?;
    let d = &sol.decomposition;
    // the core is channels × sensors; assignment wants sensors × channels
    let assignment = assign_top_f(&d.core.transpose(), a.f, &d.row_indices, &d.col_indices)?;
    let mut sensors = assignment.rows;
    sensors.sort_by_key(|r| r.row_id);
    let mut w = open_output(a.output.as_deref())?;
    writeln!(w, "sensor_row_index,channel_col_index,u_value,rank")?;
    for s in &sensors {
        for (rank, p) in s.picks.iter().enumerate() {
            writeln!(w, "{},{},{:?},{}", s.row_id, p.col_id, p.value, rank + 1)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn kernel(a: &KernelArgs) -> Result<()> {
    let x1 = read_input(&a.class1, &a.io)?;
    let others = a
        .class2
        .iter()
        .map(|p| read_input(p, &a.io))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&DenseMatrix> = others.iter().collect();
    let x2 = hconcat(&refs)?;
    write_output(&a.output, &cross_class_kernel(&x1, &x2)?)
}

pub fn generate(a: &GenerateArgs) -> Result<()> {
    write_output(&a.output, &synth_matrix(&a.synth, a.seed)?)
}
