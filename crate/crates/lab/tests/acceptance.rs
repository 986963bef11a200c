//! Acceptance gate: one test per criterion, each printing a single
//! `PASS`/`FAIL` line before asserting.

use std::collections::VecDeque;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use fppflow_core::lattice::Terminals;
use fppflow_lab::records::parse_spec;
use fppflow_lab::report::CheckKind;
use fppflow_lab::{run, Config, Report, RunOptions};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run_config(name: &str) -> (Report, Duration) {
    let path = configs().join(format!("{name}.toml"));
    let cfg = Config::load(&path).unwrap_or_else(|e| panic!("{name}: {e}"));
    let opts = RunOptions { base: configs(), ..Default::default() };
    let start = Instant::now();
    let outcome = run(cfg, &opts).unwrap_or_else(|e| panic!("{name}: {e}"));
    (outcome.report, start.elapsed())
}

fn check_passed(r: &Report, name: &str) -> bool {
    r.check(name).unwrap_or_else(|| panic!("{} has no check `{name}`", r.experiment)).passed == Some(true)
}

fn exact_summary(r: &Report) -> String {
    r.checks
        .iter()
        .filter(|c| c.kind == CheckKind::Exact)
        .map(|c| format!("{}: {}", c.name, c.detail))
        .collect::<Vec<_>>()
        .join("; ")
}

fn verdict(n: u32, title: &str, ok: bool, detail: &str) {
    println!("acceptance {n:02} {title}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} ({title}) failed: {detail}");
}

fn means(r: &Report, label: &str) -> Vec<(u64, f64)> {
    r.series(label).unwrap().rows.iter().map(|row| (row.p, row.estimate.mean)).collect()
}

#[test]
fn criterion_01_oracle_duality() {
    let (r, t) = run_config("oracle_duality");
    let ok = r.samples.len() == 1000 && r.exact_passed() && t < Duration::from_secs(120);
    verdict(1, "oracle duality", ok, &format!("{}; {} samples in {:.1?}", exact_summary(&r), r.samples.len(), t));
}

/// Unit-capacity max flow by breadth-first augmenting paths.
fn unit_flow_oracle(spec_text: &str) -> u64 {
    let spec = parse_spec(spec_text).unwrap();
    let problem = spec.build_problem(Terminals::TopBottom).unwrap();
    let nv = problem.vertices().len();
    let (s, t) = (nv, nv + 1);
    let big = u32::MAX as i64;
    let mut cap: Vec<std::collections::HashMap<usize, i64>> = vec![Default::default(); nv + 2];
    for &(a, b) in problem.ends() {
        *cap[a as usize].entry(b as usize).or_default() += 1;
        *cap[b as usize].entry(a as usize).or_default() += 1;
    }
    for &x in problem.sources() {
        cap[s].insert(x as usize, big);
        cap[x as usize].entry(s).or_default();
    }
    for &x in problem.sinks() {
        cap[x as usize].insert(t, big);
        cap[t].entry(x as usize).or_default();
    }
    let mut flow = 0;
    loop {
        let mut prev = vec![usize::MAX; nv + 2];
        prev[s] = s;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            let next: Vec<usize> = cap[u].iter().filter(|(_, &c)| c > 0).map(|(&v, _)| v).collect();
            for v in next {
                if prev[v] == usize::MAX {
                    prev[v] = u;
                    q.push_back(v);
                }
            }
        }
        if prev[t] == usize::MAX {
            return flow;
        }
        let mut v = t;
        while v != s {
            let u = prev[v];
            *cap[u].get_mut(&v).unwrap() -= 1;
            *cap[v].entry(u).or_default() += 1;
            v = u;
        }
        flow += 1;
    }
}

#[test]
fn criterion_02_constant_law() {
    let (r, _) = run_config("constant_law");
    let per_sample = r.samples.iter().all(|s| s.value == (s.scale + 1).to_string());
    let at4 = r.samples.iter().find(|s| s.scale == 4).unwrap();
    let oracle = unit_flow_oracle(&at4.spec);
    let m = means(&r, "nu");
    let exact_means = m.iter().all(|&(p, v)| v == (p + 1) as f64 / p as f64);
    let toward_one = m.windows(2).all(|w| (w[1].1 - 1.0).abs() < (w[0].1 - 1.0).abs());
    let ok = per_sample && oracle == 5 && at4.value == "5" && exact_means && toward_one && r.exact_passed();
    verdict(2, "constant law", ok, &format!("means {m:?}, oracle at p=4 gives {oracle}"));
}

#[test]
fn criterion_03_positivity_dichotomy() {
    let (pos, t1) = run_config("positive_bernoulli");
    let (null, t2) = run_config("null_bernoulli");
    let mp = means(&pos, "nu");
    let mn = means(&null, "nu");
    let positive = mp.last().unwrap().1 > 0.1;
    let decreasing = mn.windows(2).all(|w| w[1].1 < w[0].1);
    let small = mn.last().unwrap().1 < 0.05;
    let ok = positive && decreasing && small && t1 + t2 < Duration::from_secs(600);
    verdict(
        3,
        "positivity dichotomy",
        ok,
        &format!("open 3/4 means {mp:?}; open 1/4 means {mn:?}; strictly decreasing = {decreasing}"),
    );
}

#[test]
fn criterion_04_truncation_chain() {
    let (r, _) = run_config("truncation_chain");
    let ok = check_passed(&r, "truncation_chain") && r.check("truncation_chain").unwrap().detail.ends_with("200 samples violate");
    verdict(4, "truncation chain", ok, &exact_summary(&r));
}

#[test]
fn criterion_05_finiteness_plateau() {
    let (r, _) = run_config("heavy_tail_plateau");
    let rungs: Vec<f64> = ["K=16", "K=64", "K=256", "K=1024"].iter().map(|l| means(&r, l)[0].1).collect();
    let nondecreasing = rungs.windows(2).all(|w| w[0] <= w[1]);
    let ok = check_passed(&r, "truncation_chain") && check_passed(&r, "plateau") && nondecreasing;
    verdict(
        5,
        "finiteness plateau",
        ok,
        &format!("rung means {rungs:?}; {}", r.check("plateau").unwrap().detail),
    );
}

#[test]
fn criterion_06_subadditivity() {
    let (r2, _) = run_config("subadditivity_2d");
    let (r3, _) = run_config("subadditivity_3d");
    let ok = check_passed(&r2, "split_subadditive") && check_passed(&r3, "split_subadditive");
    verdict(6, "subadditivity", ok, &format!("d=2 {}; d=3 {}", exact_summary(&r2), exact_summary(&r3)));
}

#[test]
fn criterion_07_cutset_surgery() {
    let (r, _) = run_config("surgery");
    let ok = r.exact_passed() && check_passed(&r, "event_rate");
    verdict(7, "cutset surgery", ok, &format!("{}; event rate {}", exact_summary(&r), r.check("event_rate").unwrap().detail));
}

#[test]
fn criterion_08_zero_regime() {
    let (r, _) = run_config("zero_regime");
    let ok = r.exact_passed() && check_passed(&r, "means_decrease");
    verdict(8, "zero regime", ok, &format!("{}; means {:?}", exact_summary(&r), means(&r, "zero_cutset")));
}

#[test]
fn criterion_09_annulus() {
    let (r, _) = run_config("annulus");
    let ok = r.samples.len() == 100 && check_passed(&r, "annulus_bound");
    verdict(9, "annulus decomposition", ok, &exact_summary(&r));
}

#[test]
fn criterion_10_animal() {
    let (r, _) = run_config("animal");
    let ok = r.samples.len() == 50 && r.exact_passed();
    verdict(10, "animal coarsening", ok, &format!("{}; {}", exact_summary(&r), r.notes.join("; ")));
}

#[test]
fn criterion_11_nu_tilde_consistency() {
    let (r, _) = run_config("nu_tilde");
    let ok = r.exact_passed() && check_passed(&r, "consistency_p16");
    verdict(11, "slab flow consistency", ok, &r.check("consistency_p16").unwrap().detail);
}

#[test]
fn criterion_12_continuity() {
    let (r, _) = run_config("continuity");
    let ok = r.exact_passed() && check_passed(&r, "gaps_decrease") && check_passed(&r, "final_gap");
    verdict(
        12,
        "continuity",
        ok,
        &format!("{}; {}; {}", exact_summary(&r), r.check("gaps_decrease").unwrap().detail, r.check("final_gap").unwrap().detail),
    );
}

#[test]
fn criterion_13_domination() {
    let (r, _) = run_config("domination");
    let ok = r.samples.len() == 10_000 && check_passed(&r, "tail_domination");
    verdict(13, "domination", ok, &r.check("tail_domination").unwrap().detail);
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn criterion_14_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let mut failures = Vec::new();
    let names = ["constant_law", "heavy_tail_plateau", "subadditivity_2d", "surgery", "continuity", "animal"];
    for name in names {
        let first = tmp.path().join(format!("{name}-1"));
        let second = tmp.path().join(format!("{name}-2"));
        let cfg = Config::load(&configs().join(format!("{name}.toml"))).unwrap();
        let opts = RunOptions { base: configs(), out: Some(first.clone()), workers: Some(1), only_seed: None };
        run(cfg, &opts).unwrap();
        // rerun from the manifest alone, with a different worker count
        let again = Config::load(&first.join("manifest.json")).unwrap();
        let opts = RunOptions { base: first.clone(), out: Some(second.clone()), workers: Some(3), only_seed: None };
        run(again, &opts).unwrap();
        if dir_bytes(&first) != dir_bytes(&second) {
            failures.push(name);
        }
    }
    let ok = failures.is_empty();
    verdict(14, "determinism", ok, &format!("{} experiments rerun from manifests, differing: {failures:?}", names.len()));
}
