use std::f64::consts::LN_2;
use std::io::Write;

use tempfile::NamedTempFile;
use totalrank_cli::run;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn rank(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("rank").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f.flush().unwrap();
    f
}

fn path(f: &NamedTempFile) -> &str {
    f.path().to_str().unwrap()
}

fn parse_tsv(s: &str) -> Vec<(usize, f64)> {
    s.lines()
        .map(|l| {
            let (node, score) = l.split_once('\t').unwrap();
            (node.parse().unwrap(), score.parse().unwrap())
        })
        .collect()
}

const DANGLING: &str = "0 1\n1 2\n2 0\n2 3\n";

#[test]
fn stats_reports_counts() {
    let g = file(DANGLING);
    let o = rank(&["stats", path(&g)]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let lines: Vec<Vec<&str>> = o.stdout.lines().map(|l| l.split_whitespace().collect()).collect();
    assert!(lines.contains(&vec!["nodes", "4"]));
    assert!(lines.contains(&vec!["edges", "4"]));
    assert!(lines.contains(&vec!["dangling", "1"]));
    assert!(lines.contains(&vec!["column_sums", "ok"]));
}

#[test]
fn pagerank_tsv_is_sorted_and_stochastic() {
    let g = file(DANGLING);
    let power = rank(&["pagerank", path(&g), "--alpha", "0.85", "--tol", "1e-10"]);
    let dense = rank(&["pagerank", path(&g), "--alpha", "0.85", "--method", "dense"]);
    assert_eq!(power.code, 0);
    assert_eq!(dense.code, 0);
    let p = parse_tsv(&power.stdout);
    let d = parse_tsv(&dense.stdout);
    assert_eq!(p.len(), 4);
    assert!((p.iter().map(|x| x.1).sum::<f64>() - 1.0).abs() <= 1e-8);
    assert!(p.windows(2).all(|w| w[0].1 > w[1].1 || (w[0].1 == w[1].1 && w[0].0 < w[1].0)));
    for (a, b) in p.iter().zip(&d) {
        assert_eq!(a.0, b.0);
        assert!((a.1 - b.1).abs() <= 1e-8);
    }
}

#[test]
fn totalrank_with_teleport_file() {
    let g = file("0 1\n1 0\n");
    let t = file("# start at node 0\n3\n0\n");
    for method in ["series", "quadrature"] {
        let o = rank(&["totalrank", path(&g), "--teleport", path(&t), "--method", method]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        let v = parse_tsv(&o.stdout);
        assert_eq!(v[0].0, 0);
        assert!((v[0].1 - LN_2).abs() < 1e-4, "{method}");
        assert!((v.iter().map(|x| x.1).sum::<f64>() - 1.0).abs() <= 1e-8);
    }
}

#[test]
fn raw_series_keeps_truncated_mass() {
    let g = file(DANGLING);
    let o = rank(&["totalrank", path(&g), "--tol", "1e-3", "--no-renormalize"]);
    assert_eq!(o.code, 0);
    let sum: f64 = parse_tsv(&o.stdout).iter().map(|x| x.1).sum();
    assert!((sum - (1.0 - 1.0 / 1000.0)).abs() <= 1e-10);
}

#[test]
fn compare_json_has_stable_keys() {
    let g = file(DANGLING);
    let o = rank(&["compare", path(&g), "--methods", "power,dense", "--json"]);
    assert_eq!(o.code, 0);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["comparison"]["kendall_tau"], 1.0);
    assert_eq!(v["comparison"]["methods"][1], "dense");
    let order: Vec<usize> = ["\"nodes\"", "\"edges\"", "\"comparison\"", "\"error_bounds\""]
        .iter()
        .map(|k| o.stdout.find(k).unwrap())
        .collect();
    assert!(order.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn compare_single_node_reports_undefined_tau() {
    let g = file("0 0\n");
    let o = rank(&["compare", path(&g), "--methods", "series,power", "--json"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert!(v["comparison"]["kendall_tau"].is_null());
}

#[test]
fn usage_errors_exit_one() {
    let g = file(DANGLING);
    let bad_teleport = file("1\n2\n");
    let malformed = file("0 x\n");
    let cases: [&[&str]; 8] = [
        &["frobnicate"],
        &["pagerank", path(&g)],
        &["pagerank", path(&g), "--alpha", "1.5"],
        &["pagerank", "/nonexistent/graph.el", "--alpha", "0.5"],
        &["stats", path(&malformed)],
        &["totalrank", path(&g), "--teleport", path(&bad_teleport)],
        &["compare", path(&g), "--methods", "power"],
        &["compare", path(&g), "--methods", "power,bogus"],
    ];
    for args in cases {
        let o = rank(args);
        assert_eq!(o.code, 1, "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    let o = rank(&["stats", path(&malformed)]);
    assert!(o.stderr.contains("line 1"), "{}", o.stderr);
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(rank(&["--help"]).code, 0);
    assert_eq!(rank(&["--version"]).code, 0);
}

#[test]
fn numerical_failures_exit_two() {
    let g = file(DANGLING);
    let capped = rank(&["pagerank", path(&g), "--alpha", "0.99", "--max-iter", "3"]);
    assert_eq!(capped.code, 2);
    assert_eq!(parse_tsv(&capped.stdout).len(), 4);
    assert!(capped.stderr.contains("warning"));

    let tight = rank(&["totalrank", path(&g), "--method", "quadrature", "--tol", "1e-300"]);
    assert_eq!(tight.code, 2);
}

#[test]
fn verify_passes_and_reports_every_identity() {
    let o = rank(&["verify", "--n", "5", "--trials", "3", "--json"]);
    assert_eq!(o.code, 0, "{}", o.stdout);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["identities"].as_array().unwrap().len(), 6);
    assert_eq!(rank(&["verify", "--trials", "0"]).code, 1);
}
