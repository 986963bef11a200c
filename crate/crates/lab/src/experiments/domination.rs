use fppflow_core::percolation::{cluster_size, sequential_cluster_sizes};
use fppflow_core::rng::derive_seed;
use fppflow_core::{CapacityField, Level, Point};

use super::Ctx;
use crate::config::Experiment;
use crate::error::LabError;
use crate::report::{Report, Table};
use crate::stats::{binomial_sigma, SLACK};

/// Compare the tail of `sum_i Y_i` (sequential exploration, clusters already
/// met count zero) with the tail of `sum_i X_i` for independent copies
/// `X_i = |C(x_1)|` in fresh fields.
pub fn domination(ctx: &Ctx) -> Result<Report, LabError> {
    let Experiment::Domination { distribution, level, anchors, replicates } = &ctx.cfg.experiment else {
        unreachable!("dispatch matches the kind")
    };
    let law = ctx.law(distribution)?;
    let d = ctx.dimension();
    let k = ctx.ticks(level)?;
    let open = law.open_probability(Level::At(k));
    if open >= ctx.pc {
        return Err(LabError::Config(format!(
            "level {level} is not subcritical: open probability {open} vs p_c = {}",
            ctx.pc
        )));
    }
    let anchors: Vec<Point> = if anchors.is_empty() {
        (0..10).map(|i| Point::unit(d, 0).scale(i)).collect()
    } else {
        anchors
            .iter()
            .map(|a| {
                if a.len() != d {
                    return Err(LabError::Config(format!("anchor {a:?} has the wrong dimension")));
                }
                Ok(Point::new(a)?)
            })
            .collect::<Result<_, LabError>>()?
    };
    let lvl = Level::At(k);
    let seeds = ctx.seeds(*replicates);
    let outs = ctx.par_map(&seeds, |&seed| {
        let field = CapacityField::new(law.clone(), seed);
        let y: u64 = sequential_cluster_sizes(&field, lvl, &anchors, ctx.budget).iter().sum();
        let x: u64 = (0..anchors.len() as u64)
            .map(|i| {
                let f = CapacityField::new(law.clone(), derive_seed(seed, i + 1));
                cluster_size(&f, lvl, anchors[0], ctx.budget)
            })
            .sum();
        let mut rec = ctx.record("cluster_sum", "sequential", &format!("anchors={}", anchors.len()), 0, seed, fppflow_core::Total::ZERO, y, 1.0);
        rec.value = y.to_string();
        rec.rescaled = Some(y as f64);
        rec.extra.insert("independent".into(), x.to_string());
        Ok((rec, y, x))
    })?;
    let mut report = Report::new("domination");
    let n = outs.len();
    let max = outs.iter().map(|o| o.1.max(o.2)).max().unwrap_or(0);
    let mut rows = Vec::new();
    let mut bad = Vec::new();
    for a in 1..=max {
        let fy = outs.iter().filter(|o| o.1 >= a).count() as f64 / n as f64;
        let fx = outs.iter().filter(|o| o.2 >= a).count() as f64 / n as f64;
        let band = SLACK * (binomial_sigma(fy, n).powi(2) + binomial_sigma(fx, n).powi(2)).sqrt();
        if fy > fx + band {
            bad.push(a);
        }
        rows.push(vec![a.to_string(), format!("{fy}"), format!("{fx}"), format!("{band}")]);
    }
    report.tables.push(Table { name: "domination".into(), header: ["a", "freqY", "freqX", "band"].map(String::from).to_vec(), rows });
    if ctx.replay() {
        report.statistical("tail_domination", None, "skipped in replay".into());
    } else {
        report.statistical(
            "tail_domination",
            Some(bad.is_empty()),
            format!("{} thresholds beyond the band: {bad:?}", bad.len()),
        );
    }
    report.samples = outs.into_iter().map(|o| o.0).collect();
    Ok(report)
}
