//! Acceptance criteria 1 to 11. Each test prints one line
//! `criterion N: PASS|FAIL ...` to the real stdout, so the lines show up
//! even when output capture is on.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use common::{lp, propagate, valuation};
use uctmc_core::checker::{
    bound_measures, reach_probability, solve_measures, transient_distribution, ApproxOptions,
    IntervalSolution, SolutionVector, Solutions,
};
use uctmc_core::model::{build_full, ConcreteCtmc};
use uctmc_core::sampling::{sample_valuations, Streams};
use uctmc_core::scenario::{
    complexity_imprecise, complexity_precise, compute_eta, solve_box, solve_box_imprecise,
    solve_box_precise, BoxSolution, DEFAULT_BETAS,
};

fn report(id: u32, pass: bool, detail: &str) -> bool {
    let line = format!(
        "criterion {id}: {} {detail}\n",
        if pass { "PASS" } else { "FAIL" }
    );
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    pass
}

struct Rng(Streams);

impl Rng {
    fn new(seed: u64) -> Self {
        Rng(Streams::new(seed, 1))
    }

    fn unif(&mut self) -> f64 {
        self.0.uniform(0)
    }

    fn below(&mut self, k: usize) -> usize {
        ((self.unif() * k as f64) as usize).min(k - 1)
    }

    /// Random cost of relaxation at least 0.02 away from critical values in
    /// terms of `1/rho`.
    fn rho(&mut self) -> f64 {
        loop {
            let rho = 0.04 + 2.5 * self.unif();
            let inv = 1.0 / rho;
            if (inv - inv.round()).abs() > 0.02 {
                return rho;
            }
        }
    }
}

fn vectors(rows: &[Vec<f64>]) -> Vec<SolutionVector> {
    rows.iter()
        .enumerate()
        .map(|(i, v)| SolutionVector {
            valuation_index: i,
            values: v.clone(),
        })
        .collect()
}

fn intervals(lower: &[Vec<f64>], upper: &[Vec<f64>]) -> Vec<IntervalSolution> {
    lower
        .iter()
        .zip(upper)
        .enumerate()
        .map(|(i, (l, u))| IntervalSolution {
            valuation_index: i,
            lower: l.clone(),
            upper: u.clone(),
            delta: 1e-3,
            converged: true,
        })
        .collect()
}

fn models() -> PathBuf {
    common::models_dir()
}

fn uctmc(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_uctmc"))
        .args(args)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "uctmc {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json_file(p: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn criterion_01_eta_anchors() {
    let start = Instant::now();
    let a = compute_eta(25, 4, 0.9).unwrap();
    let b = compute_eta(25, 4, 0.999).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let pass = (a - 0.615).abs() <= 1e-3 && (b - 0.455).abs() <= 1e-3 && secs < 1.0;
    let detail = format!("eta(25,4,0.9)={a:.4} eta(25,4,0.999)={b:.4} in {secs:.3}s");
    assert!(report(1, pass, &detail), "{detail}");
}

#[test]
fn criterion_02_eta_boundary_and_shape() {
    let start = Instant::now();
    let mut problems = Vec::new();
    for n in [10, 25, 100] {
        for beta in DEFAULT_BETAS {
            let e = compute_eta(n, n, beta).unwrap();
            if e != 0.0 {
                problems.push(format!("eta({n},{n},{beta})={e}"));
            }
        }
    }
    for n in [25, 100] {
        for beta in DEFAULT_BETAS {
            let etas: Vec<f64> = (0..n).map(|c| compute_eta(n, c, beta).unwrap()).collect();
            if let Some(c) = (1..n).find(|&c| etas[c] >= etas[c - 1]) {
                problems.push(format!("not decreasing at n={n} c={c} beta={beta}"));
            }
        }
    }
    // Same complexity ratio c/n at four times the sample size.
    let mut spots = 0;
    for c in 0..25 {
        for beta in DEFAULT_BETAS {
            let small = compute_eta(25, c, beta).unwrap();
            let large = compute_eta(100, 4 * c, beta).unwrap();
            spots += 1;
            if large <= small {
                problems.push(format!(
                    "eta(100,{},{beta})={large} <= eta(25,{c},{beta})={small}",
                    4 * c
                ));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = problems.is_empty() && secs < 10.0;
    let detail = format!(
        "{spots} spot checks, {} problems, {secs:.2}s {problems:?}",
        problems.len()
    );
    assert!(report(2, pass, &detail), "{detail}");
}

#[test]
fn criterion_03_relaxation_thresholds() {
    let rows: Vec<Vec<f64>> = (1..=6).map(|x| vec![x as f64]).collect();
    let sols = vectors(&rows);
    let cases: [(f64, [f64; 2], Vec<usize>); 3] = [
        (2.0, [1.0, 6.0], vec![]),
        (0.7, [2.0, 5.0], vec![0, 5]),
        (0.3, [3.0, 4.0], vec![0, 1, 4, 5]),
    ];
    let mut parts = Vec::new();
    let mut pass = true;
    for (rho, want, relaxed) in cases {
        let got = solve_box_precise(&sols, rho).unwrap();
        let ok = got.region.lower == vec![want[0]]
            && got.region.upper == vec![want[1]]
            && got.relaxed == relaxed;
        pass &= ok;
        parts.push(format!(
            "rho={rho}: [{},{}] relaxed={:?} ({})",
            got.region.lower[0],
            got.region.upper[0],
            got.relaxed,
            if ok { "ok" } else { "expected [3,4]" }
        ));
    }
    let detail = parts.join("; ");
    assert!(report(3, pass, &detail), "{detail}");
}

/// Relaxed box problem as a plain LP: region and samples with positive slack.
fn lp_region(rows: &[Vec<f64>], rho: f64) -> (Vec<f64>, Vec<f64>, Vec<usize>, f64) {
    let n = rows.len();
    let m = rows[0].len();
    let shift = rows.iter().flatten().copied().fold(f64::INFINITY, f64::min) - 1.0;
    // Variables: a (m), b (m), w (m), xi (n*m); lower = shift + a, upper = shift + b.
    let nv = 3 * m + n * m;
    let xi = |i: usize, r: usize| 3 * m + i * m + r;
    let mut c = vec![0.0; nv];
    for r in 0..m {
        c[2 * m + r] = 1.0;
    }
    for i in 0..n {
        for r in 0..m {
            c[xi(i, r)] = rho;
        }
    }
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut push = |coef: &[(usize, f64)], rhs: f64| {
        let mut row = vec![0.0; nv];
        for &(j, v) in coef {
            row[j] = v;
        }
        a.push(row);
        b.push(rhs);
    };
    for i in 0..n {
        for r in 0..m {
            let v = rows[i][r] - shift;
            push(&[(r, 1.0), (xi(i, r), -1.0)], v);
            push(&[(m + r, -1.0), (xi(i, r), -1.0)], -v);
        }
    }
    for r in 0..m {
        push(&[(m + r, 1.0), (r, -1.0), (2 * m + r, -1.0)], 0.0);
        push(&[(r, 1.0), (m + r, -1.0), (2 * m + r, -1.0)], 0.0);
    }
    let (x, value) = lp::minimize(&c, &a, &b).expect("feasible and bounded");
    let lower = (0..m).map(|r| shift + x[r]).collect();
    let upper = (0..m).map(|r| shift + x[m + r]).collect();
    let relaxed = (0..n)
        .filter(|&i| (0..m).any(|r| x[xi(i, r)] > 1e-9))
        .collect();
    (lower, upper, relaxed, value)
}

fn objective(rows: &[Vec<f64>], lower: &[f64], upper: &[f64], rho: f64) -> f64 {
    let m = lower.len();
    let width: f64 = (0..m).map(|r| (upper[r] - lower[r]).abs()).sum();
    let slack: f64 = rows
        .iter()
        .map(|s| {
            (0..m)
                .map(|r| (lower[r] - s[r]).max(s[r] - upper[r]).max(0.0))
                .sum::<f64>()
        })
        .sum();
    width + rho * slack
}

#[test]
fn criterion_04_lp_oracle() {
    let start = Instant::now();
    let mut rng = Rng::new(404);
    let mut compared = 0;
    let mut collapsed = 0;
    let mut problems = Vec::new();
    while compared < 200 {
        let n = 1 + rng.below(20);
        let m = 1 + rng.below(3);
        let rho = rng.rho();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..m).map(|_| rng.unif()).collect())
            .collect();
        let sol = solve_box_precise(&vectors(&rows), rho).unwrap();
        let (lo, hi, relaxed, value) = lp_region(&rows, rho);
        let ours = objective(&rows, &sol.region.lower, &sol.region.upper, rho);
        if (ours - value).abs() > 1e-8 {
            problems.push(format!(
                "objective {ours} vs {value} (n={n} m={m} rho={rho})"
            ));
        }
        if sol.any_collapsed() {
            // The optimal face need not be a single point here.
            collapsed += 1;
            continue;
        }
        let close = (0..m).all(|r| {
            (sol.region.lower[r] - lo[r]).abs() <= 1e-8
                && (sol.region.upper[r] - hi[r]).abs() <= 1e-8
        });
        if !close || sol.relaxed != relaxed {
            problems.push(format!(
                "region or relaxed set differs (n={n} m={m} rho={rho})"
            ));
        }
        compared += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = problems.is_empty() && secs < 60.0;
    let detail = format!(
        "{compared} instances compared, {collapsed} collapsed instances objective-checked, {secs:.2}s {problems:?}"
    );
    assert!(report(4, pass, &detail), "{detail}");
}

/// Smallest critical set by exhaustive search over subsets containing all
/// relaxed samples.
fn brute_force_complexity(
    lower: &[Vec<f64>],
    upper: &[Vec<f64>],
    rho: f64,
    sol: &BoxSolution,
) -> usize {
    let n = lower.len();
    let must: u32 = sol.relaxed.iter().map(|&i| 1u32 << i).sum();
    let mut best = n;
    for mask in 1u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if mask & must != must || size >= best {
            continue;
        }
        let keep: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let l: Vec<Vec<f64>> = keep.iter().map(|&i| lower[i].clone()).collect();
        let u: Vec<Vec<f64>> = keep.iter().map(|&i| upper[i].clone()).collect();
        if solve_box(&l, &u, rho).unwrap().region == sol.region {
            best = size;
        }
    }
    best
}

#[test]
fn criterion_05_complexity_soundness() {
    let start = Instant::now();
    let mut rng = Rng::new(505);
    let mut problems = Vec::new();
    let cases = 150;
    for case in 0..cases {
        let n = 1 + rng.below(7);
        let m = 1 + rng.below(2);
        let rho = rng.rho();
        // Coarse values so that ties occur.
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..m).map(|_| rng.below(6) as f64 / 5.0).collect())
            .collect();
        let sols = vectors(&rows);
        let sol = solve_box_precise(&sols, rho).unwrap();
        let greedy = complexity_precise(&sols, rho, &sol).unwrap();
        let exact = brute_force_complexity(&rows, &rows, rho, &sol);
        if exact > greedy {
            problems.push(format!(
                "case {case}: brute force {exact} > greedy {greedy}"
            ));
        }
    }
    // Four samples on the faces, the rest strictly inside.
    let mut rows = vec![
        vec![0.0, 0.5],
        vec![1.0, 0.4],
        vec![0.3, 0.0],
        vec![0.6, 1.0],
    ];
    for _ in 0..30 {
        rows.push(vec![0.1 + 0.8 * rng.unif(), 0.1 + 0.8 * rng.unif()]);
    }
    let sols = vectors(&rows);
    let mut faces = Vec::new();
    for rho in [1.12, 2.0] {
        let sol = solve_box_precise(&sols, rho).unwrap();
        let d = complexity_precise(&sols, rho, &sol).unwrap();
        if d != 4 || !sol.relaxed.is_empty() {
            problems.push(format!("face example rho={rho}: d*={d}"));
        }
        faces.push(d);
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = problems.is_empty() && secs < 120.0;
    let detail =
        format!("{cases} random instances, face example d*={faces:?}, {secs:.2}s {problems:?}");
    assert!(report(5, pass, &detail), "{detail}");
}

fn random_boxes(rng: &mut Rng, n: usize, m: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for _ in 0..n {
        let c: Vec<f64> = (0..m).map(|_| rng.unif()).collect();
        let w: Vec<f64> = (0..m).map(|_| 0.2 * rng.unif() * rng.unif()).collect();
        lower.push(c.iter().zip(&w).map(|(c, w)| c - w).collect());
        upper.push(c.iter().zip(&w).map(|(c, w)| c + w).collect());
    }
    (lower, upper)
}

#[test]
fn criterion_06_precise_within_imprecise() {
    let mut rng = Rng::new(606);
    let mut checked = 0;
    let mut skipped = 0;
    let mut problems = Vec::new();
    while checked < 120 {
        let n = 2 + rng.below(18);
        let m = 1 + rng.below(3);
        let rho = rng.rho();
        let (lower, upper) = random_boxes(&mut rng, n, m);
        let imprecise = solve_box_imprecise(&intervals(&lower, &upper), rho).unwrap();
        let rows: Vec<Vec<f64>> = lower
            .iter()
            .zip(&upper)
            .map(|(l, u)| {
                l.iter()
                    .zip(u)
                    .map(|(a, b)| a + (b - a) * rng.unif())
                    .collect()
            })
            .collect();
        let precise = solve_box_precise(&vectors(&rows), rho).unwrap();
        if imprecise.any_collapsed() || precise.any_collapsed() {
            skipped += 1;
            continue;
        }
        if !precise.region.within(&imprecise.region, 0.0) {
            problems.push(format!("n={n} m={m} rho={rho}"));
        }
        checked += 1;
    }
    // Six boxes with one precise point each; with rho = 2 the box region is
    // fixed by two boxes while the point region needs three points.
    let lower = vec![
        vec![0.09, 0.08],
        vec![0.62, 0.45],
        vec![0.69, 0.200924],
        vec![0.33, 0.29],
        vec![0.16, 0.35],
        vec![0.48, 0.23],
    ];
    let upper = vec![
        vec![0.31, 0.22],
        vec![0.83, 0.65],
        vec![0.77, 0.38908],
        vec![0.45, 0.47],
        vec![0.30, 0.60],
        vec![0.57, 0.37],
    ];
    let points = vec![
        vec![0.13, 0.13],
        vec![0.65, 0.50],
        vec![0.73, 0.26],
        vec![0.38, 0.40],
        vec![0.20, 0.55],
        vec![0.53, 0.30],
    ];
    let sols = intervals(&lower, &upper);
    let g = solve_box_imprecise(&sols, 2.0).unwrap();
    let box_c = brute_force_complexity(&lower, &upper, 2.0, &g);
    let p = solve_box_precise(&vectors(&points), 2.0).unwrap();
    let point_c = brute_force_complexity(&points, &points, 2.0, &p);
    let (d, _) = complexity_imprecise(&sols, 2.0, &g).unwrap();
    if !(box_c < point_c && d >= point_c) {
        problems.push(format!("layout: box c'={box_c} point c*={point_c} d={d}"));
    }
    let pass = problems.is_empty();
    let detail = format!(
        "{checked} instances checked ({skipped} collapsed skipped); layout c'={box_c} < c*={point_c} <= d={d} {problems:?}"
    );
    assert!(report(6, pass, &detail), "{detail}");
}

fn generator(c: &ConcreteCtmc) -> Vec<Vec<f64>> {
    let n = c.num_states();
    let mut q = vec![vec![0.0; n]; n];
    for s in 0..n {
        for (t, r) in c.row(s) {
            if t != s {
                q[s][t] += r;
                q[s][s] -= r;
            }
        }
    }
    q
}

#[test]
fn criterion_07_checker() {
    const EPS: f64 = 1e-6;
    let start = Instant::now();
    let mut problems = Vec::new();
    for (lambda, tau) in [(1.0, 2.0), (0.3, 4.0), (7.5, 0.2)] {
        let c = ConcreteCtmc::from_rates(2, vec![(0, 1.0)], &[(0, 1, lambda)])
            .with_label("goal", vec![false, true]);
        let p = reach_probability(&c, "goal", tau, EPS).unwrap();
        if (p - (1.0 - (-lambda * tau).exp())).abs() > EPS {
            problems.push(format!("two-state lambda={lambda} tau={tau}: {p}"));
        }
    }
    let mut rng = Rng::new(707);
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let n = 1 + rng.below(8);
        let mut edges = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if rng.unif() < 0.45 {
                    edges.push((a, b, 5.0 * rng.unif()));
                }
            }
        }
        let mut init: Vec<f64> = (0..n).map(|_| rng.unif()).collect();
        let total: f64 = init.iter().sum();
        init.iter_mut().for_each(|x| *x /= total);
        let c = ConcreteCtmc::from_rates(n, init.iter().copied().enumerate().collect(), &edges);
        let t = 3.0 * rng.unif();
        let got = transient_distribution(&c, t, EPS).unwrap();
        let want = propagate(&generator(&c), &vec![false; n], &init, t);
        let l1: f64 = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).sum();
        worst = worst.max(l1);
        if l1 > 2.0 * EPS {
            problems.push(format!("random case {case}: l1={l1}"));
        }
    }
    let m = common::load_model("sir20.json");
    let c: ConcreteCtmc = build_full(&m, &valuation(&[0.05, 0.04])).unwrap();
    let size = (c.num_states(), c.num_transitions());
    if size != (216, 396) {
        problems.push(format!("SIR(20) size {size:?}"));
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = problems.is_empty() && secs < 60.0;
    let detail = format!(
        "worst l1 {worst:.2e} over 100 chains, SIR(20) {} states / {} transitions, {secs:.2}s {problems:?}",
        size.0, size.1
    );
    assert!(report(7, pass, &detail), "{detail}");
}

/// Coarsened run: 50 samples (seed 2) checked with threshold 0.1 and a
/// relative gap of 0.2 on two extinction measures, then refined at
/// rho = 0.22, beta = 0.9.
#[test]
fn criterion_08_sandwich_and_refinement() {
    const EPS: f64 = 1e-6;
    let start = Instant::now();
    let mut problems = Vec::new();

    let m = common::load_model("sir20.json");
    let phi = common::load_measures("sir_extinction26.json");
    let samples = sample_valuations(&m, 5, 80).unwrap();
    let mut contained = 0;
    for u in &samples.valuations {
        let exact = solve_measures(&m, u, &phi, EPS).unwrap();
        let b = bound_measures(
            &m,
            u,
            &phi,
            ApproxOptions {
                rel_gap: 1e-2,
                ..Default::default()
            },
            None,
        )
        .unwrap();
        for k in 0..phi.len() {
            if b.lower[k] <= exact[k] + 2.0 * EPS && exact[k] <= b.upper[k] + 2.0 * EPS {
                contained += 1;
            } else {
                problems.push(format!(
                    "measure {k}: {} not in [{}, {}]",
                    exact[k], b.lower[k], b.upper[k]
                ));
            }
        }
        if !b.converged {
            problems.push("relative gap not met".into());
        }
    }

    let dir = tempfile::tempdir().unwrap();
    let model = models().join("sir20.json");
    let measures = models().join("sir_extinction2.json");
    let samples = dir.path().join("samples.json");
    let sols = dir.path().join("solutions.json");
    uctmc(&[
        "sample",
        "--model",
        s(&model),
        "--n",
        "50",
        "--seed",
        "2",
        "--out",
        s(&samples),
    ]);
    uctmc(&[
        "check",
        "--model",
        s(&model),
        "--measures",
        s(&measures),
        "--samples",
        s(&samples),
        "--mode",
        "approx",
        "--delta",
        "0.1",
        "--rel-gap",
        "0.2",
        "--out",
        s(&sols),
    ]);
    let rep = dir.path().join("refine.json");
    uctmc(&[
        "refine",
        "--model",
        s(&model),
        "--measures",
        s(&measures),
        "--samples",
        s(&samples),
        "--solutions",
        s(&sols),
        "--rho",
        "0.22",
        "--beta",
        "0.9",
        "--target-gain",
        "0",
        "--max-iters",
        "8",
        "--out-solutions",
        s(&dir.path().join("refined.json")),
        "--out",
        s(&rep),
    ]);
    let history: Vec<(f64, bool)> = json_file(&rep)["history"]
        .as_array()
        .unwrap()
        .iter()
        .map(|h| (h["eta"].as_f64().unwrap(), h["accepted"].as_bool().unwrap()))
        .collect();
    let mut best = history[0].0;
    let mut increases = 0;
    for &(eta, accepted) in &history[1..] {
        if accepted && eta > best {
            increases += 1;
        }
        if accepted {
            best = best.max(eta);
        }
    }
    if increases < 2 {
        problems.push(format!("only {increases} strict increases"));
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = problems.is_empty() && secs < 600.0;
    let etas: Vec<String> = history.iter().map(|(e, _)| format!("{e:.3}")).collect();
    let detail = format!(
        "{contained}/130 exact values inside bounds; refinement eta {} ({increases} strict increases), {secs:.1}s {problems:?}",
        etas.join(" -> ")
    );
    assert!(report(8, pass, &detail), "{detail}");
}

/// Trial k uses sample seed 9000 + k and fresh seed 9100 + k.
#[test]
fn criterion_09_statistical_validation() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let model = models().join("sir20.json");
    let measures = models().join("sir_extinction26.json");
    let mut passed = 0;
    let mut parts = Vec::new();
    for k in 0..10u64 {
        let run = dir.path().join(format!("run{k}"));
        uctmc(&[
            "run",
            "--model",
            s(&model),
            "--measures",
            s(&measures),
            "--n",
            "100",
            "--seed",
            &(9000 + k).to_string(),
            "--rho",
            "1.1",
            "--beta",
            "0.9",
            "--out",
            s(&run),
        ]);
        let fresh = dir.path().join(format!("fresh{k}.json"));
        let fresh_sols = dir.path().join(format!("fresh_sols{k}.json"));
        uctmc(&[
            "sample",
            "--model",
            s(&model),
            "--n",
            "1000",
            "--seed",
            &(9100 + k).to_string(),
            "--out",
            s(&fresh),
        ]);
        uctmc(&[
            "check",
            "--model",
            s(&model),
            "--measures",
            s(&measures),
            "--samples",
            s(&fresh),
            "--out",
            s(&fresh_sols),
            "--threads",
            "2",
        ]);
        let out = uctmc(&[
            "baseline",
            "frequentist",
            "--regions",
            s(&run.join("regions.json")),
            "--solutions",
            s(&fresh_sols),
        ]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let fraction = v["fraction"].as_f64().unwrap();
        let eta = v["eta"]["0.9"].as_f64().unwrap();
        if fraction >= eta {
            passed += 1;
        }
        parts.push(format!("{fraction:.3}/{eta:.3}"));
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = passed >= 9 && secs < 1200.0;
    let detail = format!(
        "{passed}/10 trials with containment >= eta (fraction/eta: {}), {secs:.1}s",
        parts.join(" ")
    );
    assert!(report(9, pass, &detail), "{detail}");
}

/// 25 measures driven by one latent factor per sample plus small noise.
fn synthetic(n: usize, m: usize, seed: u64) -> Vec<SolutionVector> {
    let mut rng = Rng::new(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let a = rng.unif();
            (0..m)
                .map(|r| a * (0.5 + 0.02 * r as f64) + 0.01 * rng.unif())
                .collect()
        })
        .collect();
    vectors(&rows)
}

#[test]
fn criterion_10_baseline_gap() {
    let dir = tempfile::tempdir().unwrap();
    let sols = Solutions::Exact {
        measure_ids: (0..25).map(|r| format!("m{r}")).collect(),
        solutions: synthetic(100, 25, 1010),
    };
    let path = dir.path().join("solutions.json");
    std::fs::write(&path, sols.to_json()).unwrap();
    let regions = dir.path().join("regions.json");
    uctmc(&[
        "region",
        "--solutions",
        s(&path),
        "--rho",
        "2",
        "--beta",
        "0.99",
        "--out",
        s(&regions),
    ]);
    let joint = json_file(&regions)["regions"][0]["beta"]["0.99"]
        .as_f64()
        .unwrap();
    let out = uctmc(&[
        "baseline",
        "independent",
        "--solutions",
        s(&path),
        "--rho",
        "2",
        "--beta",
        "0.99",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let combined = v["combined"].as_f64().unwrap();
    let pass = joint > 0.0 && 2.0 * combined <= joint;
    let detail = format!("independent combined {combined:.4} vs joint eta {joint:.4}");
    assert!(report(10, pass, &detail), "{detail}");
}

#[test]
fn criterion_11_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let model = models().join("sir20.json");
    let measures = models().join("sir_extinction26.json");
    let mut outs = Vec::new();
    for (k, threads) in [(0, "1"), (1, "1"), (2, "2")] {
        let out = dir.path().join(format!("run{k}"));
        uctmc(&[
            "run",
            "--model",
            s(&model),
            "--measures",
            s(&measures),
            "--n",
            "40",
            "--seed",
            "11",
            "--rho",
            "auto:4",
            "--threads",
            threads,
            "--out",
            s(&out),
        ]);
        outs.push(out);
    }
    let read = |p: &Path, f: &str| std::fs::read(p.join(f)).unwrap();
    let same = |a: &Path, b: &Path| {
        ["samples.json", "regions.json"]
            .iter()
            .all(|f| read(a, f) == read(b, f))
    };
    let identical = same(&outs[0], &outs[1]);
    let across_threads = same(&outs[0], &outs[2]);
    let pass = identical && across_threads;
    let detail = format!("identical reruns: {identical}; 1 vs 2 threads: {across_threads}");
    assert!(report(11, pass, &detail), "{detail}");
}
