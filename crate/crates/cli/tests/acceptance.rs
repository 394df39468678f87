//! Acceptance suite. Prints one PASS/FAIL line per criterion, then fails the
//! test if any criterion failed. Lines go straight to the stderr handle so
//! they show up even when the harness captures output.

use std::f64::consts::LN_2;
use std::io::Write;
use std::process::Command;
use std::time::Instant;

use totalrank_core::dense_verify::suite::{
    brute_force_totalrank, shift_one_residual, shift_two_residual, LOG_TOL,
};
use totalrank_core::dense_verify::{
    closed_form_totalrank, neumann_residual, spectral_radius_estimate, DenseMatrix, SPECTRAL_ITERS,
};
use totalrank_core::pagerank::{dense_solve, power_iteration, unrolled_form, Iterates};
use totalrank_core::quadrature::marginalize_pagerank;
use totalrank_core::random::{
    random_graph, random_guarded_matrix, random_stochastic_dense, random_stochastic_vector,
    random_strongly_connected_graph, seeded,
};
use totalrank_core::totalrank::{partial_sum, series_sum};
use totalrank_core::{
    kendall_tau, l1_distance, l1_norm, parse_edge_list, DampingFactor, QuadratureConfig,
    SeriesConfig, StochasticVector, TransitionMatrix,
};

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn graph_instance(seed: u64, max_n: usize) -> (TransitionMatrix, StochasticVector) {
    let mut rng = seeded(seed);
    let n = 1 + (seed as usize * 7919) % max_n;
    let g = random_graph(&mut rng, n);
    let o0 = random_stochastic_vector(&mut rng, n);
    let h = TransitionMatrix::build(&g, &o0).unwrap();
    (h, o0)
}

fn two_cycle_oracle() -> Outcome {
    let g = parse_edge_list("0 1\n1 0\n").unwrap();
    let o0 = StochasticVector::basis(2, 0).unwrap();
    let h = TransitionMatrix::build(&g, &o0).unwrap();
    let want = [LN_2, 1.0 - LN_2];
    let err = |v: &[f64]| v.iter().zip(&want).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);

    let s = series_sum(&h, &o0, &SeriesConfig::new(1e-4, 100_000_000, true).unwrap()).unwrap();
    let q = marginalize_pagerank(&h, &o0, &QuadratureConfig::default()).unwrap();
    let (es, eq) = (err(&s.vector), err(&q.vector));
    (
        es <= 1e-4 && eq <= 1e-8,
        format!("series max err {es:.3e} (<= 1e-4), quadrature max err {eq:.3e} (<= 1e-8)"),
    )
}

fn mass_identity() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..50 {
        let (h, o0) = graph_instance(1000 + seed, 30);
        for terms in [10u64, 100, 1000] {
            let x = partial_sum(&h, &o0, terms).unwrap();
            let want = 1.0 - 1.0 / (terms as f64 + 1.0);
            worst = worst.max((l1_norm(&x) - want).abs());
        }
    }
    (worst <= 1e-10, format!("50 graphs x 3 T, max |mass - (1 - 1/(T+1))| = {worst:.3e} (<= 1e-10)"))
}

fn cross_method() -> Outcome {
    let mut worst_l1 = 0.0f64;
    let mut worst_tau = 1.0f64;
    for seed in 0..20u64 {
        let mut rng = seeded(2000 + seed);
        let n = 2 + (seed as usize * 13) % 29;
        let g = random_strongly_connected_graph(&mut rng, n);
        let o0 = random_stochastic_vector(&mut rng, n);
        let h = TransitionMatrix::build(&g, &o0).unwrap();
        let s = series_sum(&h, &o0, &SeriesConfig::new(1e-5, 100_000_000, true).unwrap()).unwrap();
        let q = marginalize_pagerank(&h, &o0, &QuadratureConfig::default()).unwrap();
        worst_l1 = worst_l1.max(l1_distance(&s.vector, &q.vector));
        let tau = kendall_tau(&s.vector, &q.vector).unwrap_or(f64::NAN);
        worst_tau = worst_tau.min(tau);
    }
    (
        worst_l1 <= 2e-5 && worst_tau == 1.0,
        format!("20 strongly connected graphs, max L1 {worst_l1:.3e} (<= 2e-5), min tau {worst_tau}"),
    )
}

fn unrolled_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let (h, o0) = graph_instance(3000 + seed, 40);
        for alpha in [0.3, 0.85] {
            let a = DampingFactor::new(alpha).unwrap();
            for (k, it) in Iterates::new(&h, &o0, a).unwrap().take(100).enumerate() {
                let u = unrolled_form(&h, &o0, a, k + 1).unwrap();
                for (x, y) in u.iter().zip(&it) {
                    worst = worst.max((x - y).abs());
                }
            }
        }
    }
    (worst <= 1e-10, format!("t = 1..100, 20 graphs, 2 alphas, max entry diff {worst:.3e} (<= 1e-10)"))
}

fn neumann_bound() -> Outcome {
    let mut worst_slack = f64::INFINITY;
    let mut ok = true;
    for seed in 0..20u64 {
        let mut rng = seeded(4000 + seed);
        let n = 1 + (seed as usize) % 10;
        let m = random_stochastic_dense(&mut rng, n);
        for alpha in [0.5, 0.9] {
            for k in [10usize, 50, 100] {
                let r = neumann_residual(&m, DampingFactor::new(alpha).unwrap(), k).unwrap();
                let bound = alpha.powi(k as i32 + 1) + 1e-12;
                ok &= r <= bound;
                worst_slack = worst_slack.min(bound - r);
            }
        }
    }
    (ok, format!("20 matrices x 2 alphas x 3 K, min slack {worst_slack:.3e} (>= 0)"))
}

fn closed_form() -> Outcome {
    let mut worst = 0.0f64;
    let mut max_rho = 0.0f64;
    for seed in 0..20u64 {
        let mut rng = seeded(5000 + seed);
        let n = 1 + (seed as usize) % 12;
        let m = random_guarded_matrix(&mut rng, n, 0.8);
        max_rho = max_rho.max(spectral_radius_estimate(&m, SPECTRAL_ITERS));
        let o0 = random_stochastic_vector(&mut rng, n);
        let cf = closed_form_totalrank(&m, o0.as_slice(), LOG_TOL).unwrap();
        let bf = brute_force_totalrank(&m, o0.as_slice(), 2_000).unwrap();
        worst = worst.max(l1_distance(&cf.vector, &bf));
    }
    let mut worst_scalar = 0.0f64;
    for beta in [0.1, 0.3, 0.5, 0.7, 0.89] {
        let want = ((1.0 - beta) * (1.0f64 - beta).ln() + beta) / (beta * beta);
        let m = DenseMatrix::identity(3).scale(beta);
        let cf = closed_form_totalrank(&m, &[0.2, 0.3, 0.5], LOG_TOL).unwrap();
        for (x, w) in cf.vector.iter().zip([0.2, 0.3, 0.5]) {
            worst_scalar = worst_scalar.max((x - want * w).abs());
        }
    }
    (
        worst <= 1e-6 && worst_scalar <= 1e-10 && max_rho <= 0.8 + 1e-9,
        format!(
            "20 matrices (max rho est {max_rho:.4}), max L1 {worst:.3e} (<= 1e-6); \
             scalar max err {worst_scalar:.3e} (<= 1e-10)"
        ),
    )
}

fn shifted_series() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..20u64 {
        let mut rng = seeded(5000 + seed);
        let n = 1 + (seed as usize) % 12;
        let m = random_guarded_matrix(&mut rng, n, 0.8);
        worst = worst.max(shift_one_residual(&m, 500, LOG_TOL).unwrap());
        worst = worst.max(shift_two_residual(&m, 500, LOG_TOL).unwrap());
    }
    (worst <= 1e-8, format!("20 matrices, shifts 1 and 2, T = 500, max residual {worst:.3e} (<= 1e-8)"))
}

fn pagerank_sanity() -> Outcome {
    let mut worst = 0.0f64;
    let mut contraction = true;
    let mut converged = true;
    for seed in 0..20 {
        let (h, o0) = graph_instance(6000 + seed, 50);
        for alpha in [0.1, 0.5, 0.85, 0.99] {
            let a = DampingFactor::new(alpha).unwrap();
            let p = power_iteration(&h, &o0, a, 1e-10, 1_000_000).unwrap();
            let d = dense_solve(&h.to_dense(), &o0, a).unwrap();
            converged &= p.converged;
            worst = worst.max(l1_distance(&p.vector, &d.vector));

            let mut prev = o0.as_slice().to_vec();
            let mut prev_step = f64::INFINITY;
            for x in Iterates::new(&h, &o0, a).unwrap().take(p.iterations_or_terms) {
                let step = l1_distance(&x, &prev);
                contraction &= step <= alpha * prev_step + 1e-12;
                prev_step = step;
                prev = x;
            }
        }
    }
    (
        worst <= 1e-8 && contraction && converged,
        format!("20 graphs x 4 alphas, max L1 {worst:.3e} (<= 1e-8), contraction {contraction}"),
    )
}

fn cli_determinism() -> Outcome {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    let mut rng = seeded(7000);
    let g = random_strongly_connected_graph(&mut rng, 25);
    for e in g.edges() {
        writeln!(file, "{} {} {}", e.src, e.dst, e.weight).unwrap();
    }
    file.flush().unwrap();
    let path = file.path().to_str().unwrap();

    let invocations: [&[&str]; 4] = [
        &["compare", path, "--methods", "series,quadrature", "--tol", "1e-5"],
        &["compare", path, "--methods", "power,dense", "--json"],
        &["verify", "--seed", "17"],
        &["verify", "--seed", "17", "--json"],
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for args in invocations {
        let run = || Command::new(env!("CARGO_BIN_EXE_rank")).args(args).output().unwrap();
        let (a, b) = (run(), run());
        let same = a.stdout == b.stdout && !a.stdout.is_empty();
        ok &= same && a.status.success() && b.status.success();
        detail.push(format!("{} {}", args[0], if same { "identical" } else { "DIFFER" }));
    }
    (ok, format!("two runs each: {}", detail.join(", ")))
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 9] = [
        ("analytic 2-cycle oracle", two_cycle_oracle),
        ("series mass identity", mass_identity),
        ("series vs quadrature agreement", cross_method),
        ("unrolled form equals recursion", unrolled_equivalence),
        ("geometric resolvent bound", neumann_bound),
        ("closed form on its valid domain", closed_form),
        ("shifted-series identities", shifted_series),
        ("power iteration vs dense solve", pagerank_sanity),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = check();
        let line = format!(
            "{} criterion {}: {name}: {detail} [{:.2} s]\n",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64()
        );
        std::io::stderr().lock().write_all(line.as_bytes()).unwrap();
        if !pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
