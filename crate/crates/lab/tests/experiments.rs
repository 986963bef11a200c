use std::path::PathBuf;

use fppflow_lab::{run, Config, LabError, Report, RunOptions};

fn go(toml: &str) -> Result<Report, LabError> {
    let cfg = Config::from_toml(toml)?;
    run(cfg, &RunOptions { base: PathBuf::from("."), ..Default::default() }).map(|o| o.report)
}

#[test]
fn nu_tilde_of_constant_law_is_the_flat_cut() {
    let r = go(r#"
[experiment]
kind = "estimate_nu_tilde"
g = "{1: 1}"
f = "{1: 1}"
k0 = "1"
schedule = [4, 9]
replicates = 2
"#)
    .unwrap();
    for (row, p) in r.series("nu_tilde").unwrap().rows.iter().zip([4.0, 9.0]) {
        assert_eq!(row.estimate.mean, (p + 1.0) / p);
        assert_eq!(row.estimate.stddev, 0.0);
    }
    assert!(r.passed());
}

#[test]
fn zero_law_gives_zero_estimates() {
    let r = go("[experiment]\nkind = \"estimate_nu\"\ndistribution = \"{0: 1}\"\nschedule = [4, 8]\nreplicates = 2\n").unwrap();
    assert!(r.series("nu").unwrap().rows.iter().all(|row| row.estimate.mean == 0.0));
}

#[test]
fn constant_sequence_has_zero_gaps() {
    let r = go(r#"
[experiment]
kind = "continuity"
distribution = "{1: 1/2, 2: 1/2}"
sequence = { laws = [[1, "{1: 1/2, 2: 1/2}"], [2, "{1: 1/2, 2: 1/2}"]] }
p = 4
replicates = 4
edge_sample = 100
"#)
    .unwrap();
    let t = &r.tables[0];
    assert!(t.rows.iter().all(|row| row[3] == "0"));
    assert!(r.passed(), "{:?}", r.checks);
}

#[test]
fn convexity_of_constant_law() {
    let r = go(r#"
[experiment]
kind = "convexity"
distribution = "{1: 1}"
triangles = [[[0, 1], [1, 0], [1, 1]]]
p = 4
replicates = 2
"#)
    .unwrap();
    assert!(r.passed(), "{:?}", r.checks);
    let degenerate = go(r#"
[experiment]
kind = "convexity"
distribution = "{1: 1}"
triangles = [[[0, 1], [0, 2], [1, 1]]]
p = 4
replicates = 2
"#);
    assert!(matches!(degenerate, Err(LabError::Config(_))));
}

#[test]
fn supercritical_domination_level_is_rejected() {
    let r = go("[experiment]\nkind = \"domination\"\ndistribution = \"{0: 0.2, 1: 0.8}\"\nreplicates = 10\n");
    assert!(matches!(r, Err(LabError::Config(_))));
}

#[test]
fn oracle_shapes_fit_the_brute_force() {
    let shapes = fppflow_lab::experiments::small_problems().unwrap();
    assert!(shapes.len() >= 10);
    assert!(shapes.iter().all(|(_, p)| p.edges().len() <= 14));
}
