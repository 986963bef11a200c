use std::sync::Arc;

use fppflow_core::distributions::Capacities;
use fppflow_core::flows::canonical_cylinder;
use fppflow_core::lattice::Terminals;
use fppflow_core::rng::{derive_seed, hash_words};
use fppflow_core::{
    is_cutset, phi, tilde_phi, Capacity, CapacityField, CutResult, CylinderKind,
    CylinderSpec, Direction, Distribution, Edge, Height, Level, Point, Total, Value,
};

use super::{violation, Ctx, MAX_INFINITE_FRACTION};
use crate::config::{Experiment, Sequence};
use crate::error::LabError;
use crate::records::format_spec;
use crate::report::{Report, Series, SeriesRow, Table, Violation};
use crate::stats::{combined_halfwidth, Estimate, SLACK};

/// A symmetric cylinder `cyl(pA, h(p))` over the canonical hyperrectangle.
pub(crate) struct Scale {
    pub p: u64,
    pub spec: CylinderSpec,
    pub text: String,
    pub area: f64,
}

impl Scale {
    pub fn new(dir: Direction, p: u64, h: u64) -> Result<Scale, LabError> {
        let spec = canonical_cylinder(dir, p, h, CylinderKind::Symmetric)?;
        let text = format_spec(&spec);
        let area = spec.rect.area();
        Ok(Scale { p, spec, text, area })
    }

    pub fn phi(&self, field: &impl Capacities) -> Result<CutResult, LabError> {
        Ok(phi(&self.spec.rect, self.spec.height, field)?)
    }
}

/// `T(cutset) = value` and the cutset separates, for finite values.
pub(crate) fn cut_is_consistent(r: &CutResult, spec: &CylinderSpec, field: &impl Capacities) -> Result<bool, LabError> {
    if r.value.is_infinite() {
        return Ok(true);
    }
    let problem = spec.build_problem(Terminals::TopBottom)?;
    Ok(fppflow_core::distributions::total(field, &r.cutset) == r.value && is_cutset(&r.cutset, &problem))
}

pub(crate) fn estimate(samples: &[Option<f64>]) -> Estimate {
    Estimate::from_samples(samples)
}

fn abort_on_infinite(ctx: &Ctx, p: u64, e: &Estimate, report: &mut Report) -> Result<(), LabError> {
    if e.infinite > 0 {
        report.notes.push(format!("p = {p}: {} infinite samples excluded from the mean", e.infinite));
    }
    if !ctx.replay() && e.infinite_fraction() > MAX_INFINITE_FRACTION {
        return Err(LabError::Aborted(format!(
            "p = {p}: {} of {} samples are infinite",
            e.infinite,
            e.n + e.infinite
        )));
    }
    Ok(())
}

pub fn estimate_nu(ctx: &Ctx) -> Result<Report, LabError> {
    let Experiment::EstimateNu { distribution, direction, schedule, replicates, height } = &ctx.cfg.experiment
    else {
        unreachable!("dispatch matches the kind")
    };
    height.check_mild()?;
    let law = ctx.law(distribution)?;
    let dir = ctx.direction(direction)?;
    let scales = schedule
        .iter()
        .map(|&p| Scale::new(dir, p, height.height(p)?))
        .collect::<Result<Vec<_>, _>>()?;
    let mut tasks = Vec::new();
    for (i, _) in scales.iter().enumerate() {
        let n = replicates.at(i, scales.len())?;
        if n < 2 && !ctx.replay() {
            return Err(LabError::Config("at least two replicates per scale".into()));
        }
        tasks.extend(ctx.seeds(n).into_iter().map(|s| (i, s)));
    }
    let outs = ctx.par_map(&tasks, |&(i, seed)| {
        let sc = &scales[i];
        let field = CapacityField::new(law.clone(), seed);
        let r = sc.phi(&field)?;
        let ok = cut_is_consistent(&r, &sc.spec, &field)?;
        Ok((ctx.cut_record("phi", distribution, &sc.text, sc.p, seed, &r, sc.area), ok))
    })?;
    let mut report = Report::new("estimate_nu");
    let mut series = Series::new("nu");
    let mut bad = Vec::new();
    for (i, sc) in scales.iter().enumerate() {
        let vals: Vec<Option<f64>> = tasks
            .iter()
            .zip(&outs)
            .filter(|(t, _)| t.0 == i)
            .map(|(_, (rec, _))| rec.rescaled)
            .collect();
        let e = estimate(&vals);
        abort_on_infinite(ctx, sc.p, &e, &mut report)?;
        series.rows.push(SeriesRow { p: sc.p, estimate: e });
    }
    for ((_, seed), (rec, ok)) in tasks.iter().zip(&outs) {
        if !ok {
            bad.push(violation("cutset_realizes_value", *seed, rec.scale, "minimal cutset does not match the flow value"));
        }
    }
    report.exact("cutset_realizes_value", outs.len(), bad);
    report.series.push(series);
    report.samples = outs.into_iter().map(|(r, _)| r).collect();
    Ok(report)
}

pub fn truncation_ladder(ctx: &Ctx) -> Result<Report, LabError> {
    let Experiment::TruncationLadder { distribution, levels, direction, p, replicates, height, plateau_halfwidths } =
        &ctx.cfg.experiment
    else {
        unreachable!("dispatch matches the kind")
    };
    let law = ctx.law(distribution)?;
    let dir = ctx.direction(direction)?;
    let ks = levels.iter().map(|k| ctx.ticks(k)).collect::<Result<Vec<_>, _>>()?;
    if ks.is_empty() || ks.windows(2).any(|w| w[0] >= w[1]) || ks[0] == 0 {
        return Err(LabError::Config("levels must be positive and strictly increasing".into()));
    }
    let rungs: Vec<Arc<Distribution>> =
        ks.iter().map(|&k| law.truncate_ticks(k).map(Arc::new)).collect::<Result<_, _>>()?;
    let sc = Scale::new(dir, *p, height.height(*p)?)?;
    let seeds = ctx.seeds(*replicates);
    let outs = ctx.par_map(&seeds, |&seed| {
        let base = CapacityField::new(law.clone(), seed);
        let mut recs = Vec::with_capacity(rungs.len() + 1);
        for (lit, d) in levels.iter().zip(&rungs) {
            let r = sc.phi(&base.with_distribution(d.clone()))?;
            recs.push(ctx.cut_record("phi_truncated", &format!("K={lit}"), &sc.text, sc.p, seed, &r, sc.area));
        }
        let r = sc.phi(&base)?;
        recs.push(ctx.cut_record("phi", "untruncated", &sc.text, sc.p, seed, &r, sc.area));
        Ok(recs)
    })?;
    let mut report = Report::new("truncation_ladder");
    let mut bad: Vec<Violation> = Vec::new();
    for (seed, recs) in seeds.iter().zip(&outs) {
        if let Some(j) = (0..recs.len() - 1).find(|&j| !exact_le(&recs[j].value, &recs[j + 1].value)) {
            bad.push(violation("truncation_chain", *seed, *p, format!("{} > {}", recs[j].variant, recs[j + 1].variant)));
        }
    }
    report.exact("truncation_chain", seeds.len(), bad);
    let labels: Vec<String> = levels.iter().map(|l| format!("K={l}")).chain(["untruncated".to_string()]).collect();
    for (j, label) in labels.iter().enumerate() {
        let vals: Vec<Option<f64>> = outs.iter().map(|recs| recs[j].rescaled).collect();
        let mut s = Series::new(label.clone());
        let e = estimate(&vals);
        if e.infinite > 0 {
            report.notes.push(format!("{label}: {} infinite samples", e.infinite));
        }
        s.rows.push(SeriesRow { p: *p, estimate: e });
        report.series.push(s);
    }
    if ctx.replay() || levels.len() < 2 {
        report.statistical("plateau", None, "needs two rungs and the full replicate set".into());
    } else {
        let a = report.series[levels.len() - 2].rows[0].estimate;
        let b = report.series[levels.len() - 1].rows[0].estimate;
        let gap = (b.mean - a.mean).abs();
        let tol = plateau_halfwidths * combined_halfwidth(&[a.halfwidth, b.halfwidth]);
        report.statistical(
            "plateau",
            Some(gap <= tol),
            format!("|rung({}) - rung({})| = {gap} vs {tol}", levels[levels.len() - 1], levels[levels.len() - 2]),
        );
    }
    report.samples = outs.into_iter().flatten().collect();
    Ok(report)
}

/// Compare two exact value strings (`inf` or a reduced fraction).
pub(crate) fn exact_le(a: &str, b: &str) -> bool {
    match (a, b) {
        (_, "inf") => true,
        ("inf", _) => false,
        _ => {
            let pa = Value::parse(a).expect("values are written as fractions");
            let pb = Value::parse(b).expect("values are written as fractions");
            pa.num() * pb.den() <= pb.num() * pa.den()
        }
    }
}

fn capacity_gap(a: Capacity, b: Capacity) -> Option<u64> {
    match (a, b) {
        (Capacity::Infinite, Capacity::Infinite) => Some(0),
        (Capacity::Finite(x), Capacity::Finite(y)) => Some(x.abs_diff(y)),
        _ => None,
    }
}

/// Pseudo-random edges in the box `[-1000, 1000]^d`.
fn sample_edges(seed: u64, d: usize, n: usize) -> Vec<Edge> {
    let s = derive_seed(seed, 0xED6E);
    (0..n as u64)
        .map(|i| {
            let coords: Vec<i64> = (0..d as u64).map(|k| (hash_words(s, [i, k]) % 2001) as i64 - 1000).collect();
            let axis = (hash_words(s, [i, d as u64]) % d as u64) as u8;
            Edge::new(Point::new(&coords).expect("dimension checked"), axis).expect("axis below dimension")
        })
        .collect()
}

pub fn continuity(ctx: &Ctx) -> Result<Report, LabError> {
    let Experiment::Continuity { distribution, sequence, direction, p, replicates, height, edge_sample } =
        &ctx.cfg.experiment
    else {
        unreachable!("dispatch matches the kind")
    };
    let g = ctx.law(distribution)?;
    let dir = ctx.direction(direction)?;
    let laws: Vec<(u64, Arc<Distribution>)> = match sequence {
        Sequence::Shift(ns) => ns
            .iter()
            .map(|&n| {
                let eps = Value::new(1, n as u128)
                    .and_then(|v| v.to_ticks(ctx.quantum))
                    .map_err(|e| LabError::Config(format!("shift 1/{n}: {e}")))?;
                Ok((n, Arc::new(g.shift_ticks(eps)?)))
            })
            .collect::<Result<_, LabError>>()?,
        Sequence::Laws(list) => list.iter().map(|(n, lit)| Ok((*n, ctx.law(lit)?))).collect::<Result<_, LabError>>()?,
    };
    if laws.is_empty() || laws.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(LabError::Config("sequence indices must be strictly increasing".into()));
    }
    let envelopes: Vec<(Arc<Distribution>, Arc<Distribution>)> = laws
        .iter()
        .map(|(_, gn)| Distribution::envelopes(gn, &g).map(|(lo, hi)| (Arc::new(lo), Arc::new(hi))))
        .collect::<Result<_, _>>()?;
    // nested sequences G_{n_1} >= G_{n_2} >= ... >= G give exact per-sample monotonicity
    let nested = laws.windows(2).all(|w| Distribution::dominates(&w[0].1, &w[1].1))
        && Distribution::dominates(&laws[laws.len() - 1].1, &g);
    let sc = Scale::new(dir, *p, height.height(*p)?)?;
    let seeds = ctx.seeds(*replicates);
    let outs = ctx.par_map(&seeds, |&seed| {
        let base = CapacityField::new(g.clone(), seed);
        let limit = sc.phi(&base)?;
        let mut recs = vec![ctx.cut_record("phi", "G", &sc.text, sc.p, seed, &limit, sc.area)];
        let mut values = vec![];
        for ((n, gn), (lo, hi)) in laws.iter().zip(&envelopes) {
            let v = sc.phi(&base.with_distribution(gn.clone()))?;
            let l = sc.phi(&base.with_distribution(lo.clone()))?;
            let u = sc.phi(&base.with_distribution(hi.clone()))?;
            recs.push(ctx.cut_record("phi", &format!("G_{n}"), &sc.text, sc.p, seed, &v, sc.area));
            recs.push(ctx.cut_record("phi", &format!("lower_{n}"), &sc.text, sc.p, seed, &l, sc.area));
            recs.push(ctx.cut_record("phi", &format!("upper_{n}"), &sc.text, sc.p, seed, &u, sc.area));
            values.push((v.value, l.value, u.value));
        }
        Ok((recs, limit.value, values))
    })?;
    let mut report = Report::new("continuity");
    let mut sandwich = Vec::new();
    let mut monotone = Vec::new();
    for (seed, (_, limit, values)) in seeds.iter().zip(&outs) {
        for (j, &(v, l, u)) in values.iter().enumerate() {
            if !(l <= v.min(*limit) && u >= v.max(*limit)) {
                sandwich.push(violation("envelope_sandwich", *seed, *p, format!("n = {}", laws[j].0)));
            }
        }
        if nested {
            let chain: Vec<Total> = values.iter().map(|t| t.0).chain([*limit]).collect();
            if chain.windows(2).any(|w| w[0] < w[1]) {
                monotone.push(violation("coupled_monotone", *seed, *p, "phi(G_n) not nonincreasing down to phi(G)"));
            }
        }
    }
    report.exact("envelope_sandwich", seeds.len(), sandwich);
    if nested {
        report.exact("coupled_monotone", seeds.len(), monotone);
    }
    // per-edge convergence under the shared uniforms
    let mut edge_bad = Vec::new();
    let edges = sample_edges(ctx.cfg.seed, ctx.dimension(), *edge_sample);
    let base = CapacityField::new(g.clone(), ctx.cfg.seed);
    let fields: Vec<CapacityField> = laws.iter().map(|(_, d)| base.with_distribution(d.clone())).collect();
    for e in &edges {
        let t = base.capacity(e);
        let gaps: Vec<Option<u64>> = fields.iter().map(|f| capacity_gap(f.capacity(e), t)).collect();
        let monotone = gaps.windows(2).all(|w| match (w[0], w[1]) {
            (_, None) => w[0].is_none(),
            (None, Some(_)) => true,
            (Some(a), Some(b)) => b <= a,
        });
        let shift_exact = match sequence {
            Sequence::Shift(ns) => match t {
                Capacity::Finite(_) => ns
                    .iter()
                    .zip(&gaps)
                    .all(|(n, g)| *g == Some(ctx.quantum / n)),
                Capacity::Infinite => gaps.iter().all(|g| *g == Some(0)),
            },
            Sequence::Laws(_) => true,
        };
        if !(monotone && shift_exact) {
            edge_bad.push(violation("edge_convergence", ctx.cfg.seed, 0, format!("edge {e:?}")));
        }
    }
    report.exact("edge_convergence", edges.len(), edge_bad);
    // estimates
    let mut series_g = Series::new("G");
    series_g.rows.push(SeriesRow { p: *p, estimate: estimate(&outs.iter().map(|o| o.0[0].rescaled).collect::<Vec<_>>()) });
    let eg = series_g.rows[0].estimate;
    report.series.push(series_g);
    let mut rows = Vec::new();
    let mut gaps = Vec::new();
    for (j, (n, _)) in laws.iter().enumerate() {
        for (k, tag) in [(1, "G"), (2, "lower"), (3, "upper")] {
            let vals: Vec<Option<f64>> = outs.iter().map(|o| o.0[1 + 3 * j + k - 1].rescaled).collect();
            let mut s = Series::new(format!("{tag}_{n}"));
            s.rows.push(SeriesRow { p: *p, estimate: estimate(&vals) });
            report.series.push(s);
        }
        let en = report.series(&format!("G_{n}")).expect("just pushed").rows[0].estimate;
        let gap = (en.mean - eg.mean).abs();
        let comb = combined_halfwidth(&[en.halfwidth, eg.halfwidth]);
        gaps.push((gap, comb));
        rows.push(vec![n.to_string(), format!("{}", en.mean), format!("{}", en.halfwidth), format!("{gap}"), format!("{comb}")]);
    }
    report.tables.push(Table {
        name: "continuity".into(),
        header: ["n", "mean", "halfwidth", "gap", "combinedHalfwidth"].map(String::from).to_vec(),
        rows,
    });
    if ctx.replay() {
        report.statistical("gaps_decrease", None, "skipped in replay".into());
        report.statistical("final_gap", None, "skipped in replay".into());
    } else {
        let decreasing = gaps.windows(2).all(|w| w[1].0 < w[0].0 || (w[0].0 == 0.0 && w[1].0 == 0.0));
        report.statistical(
            "gaps_decrease",
            Some(decreasing),
            format!("gaps {:?}", gaps.iter().map(|g| g.0).collect::<Vec<_>>()),
        );
        let (gap, comb) = *gaps.last().expect("nonempty sequence");
        report.statistical("final_gap", Some(gap <= SLACK * comb), format!("{gap} vs {} x {comb}", SLACK));
    }
    report.samples = outs.into_iter().flat_map(|o| o.0).collect();
    Ok(report)
}

pub fn estimate_nu_tilde(ctx: &Ctx) -> Result<Report, LabError> {
    let Experiment::EstimateNuTilde { g, f, k0, direction, schedule, replicates, height } = &ctx.cfg.experiment
    else {
        unreachable!("dispatch matches the kind")
    };
    height.check_mild()?;
    let (lg, lf) = (ctx.law(g)?, ctx.law(f)?);
    if !Distribution::dominates(&lf, &lg) {
        return Err(LabError::Hypothesis("F must dominate G".into()));
    }
    let k0t = ctx.ticks(k0)?;
    let level = Level::At(k0t);
    let open = lf.open_probability(level);
    if open >= ctx.pc {
        return Err(LabError::Hypothesis(format!("F(]K0, inf]) = {open} is not below p_c = {}", ctx.pc)));
    }
    let dir = ctx.direction(direction)?;
    let scales = schedule
        .iter()
        .map(|&p| Scale::new(dir, p, height.height(p)?))
        .collect::<Result<Vec<_>, _>>()?;
    let mut tasks = Vec::new();
    for (i, _) in scales.iter().enumerate() {
        tasks.extend(ctx.seeds(replicates.at(i, scales.len())?).into_iter().map(|s| (i, s)));
    }
    let outs = ctx.par_map(&tasks, |&(i, seed)| {
        let sc = &scales[i];
        let fg = CapacityField::new(lg.clone(), seed);
        let ff = fg.with_distribution(lf.clone());
        let s = tilde_phi(&sc.spec.rect, &fg, &ff, level, ctx.budget)?;
        let spec_text = format!("{} slab_height={}", format_spec(&CylinderSpec::new(sc.spec.rect.clone(), Height::from_s(s.height.s), CylinderKind::Symmetric)), s.height.s);
        let mut rec = ctx.cut_record("tilde_phi", g, &spec_text, sc.p, seed, &s.flow, sc.area);
        rec.flags.insert("threshold".into(), s.height.was_threshold());
        let below = if s.height.was_threshold() {
            let c = phi(&sc.spec.rect, Height::from_s(s.height.s), &fg)?;
            Some(c.value <= s.flow.value)
        } else {
            None
        };
        let r = sc.phi(&fg)?;
        let rec_phi = ctx.cut_record("phi", g, &sc.text, sc.p, seed, &r, sc.area);
        Ok((rec, rec_phi, below))
    })?;
    let mut report = Report::new("estimate_nu_tilde");
    let mut bad = Vec::new();
    let mut evaluated = 0;
    for ((_, seed), (rec, _, below)) in tasks.iter().zip(&outs) {
        if let Some(ok) = below {
            evaluated += 1;
            if !ok {
                bad.push(violation("cylinder_below_slab_at_threshold", *seed, rec.scale, "phi(A, t0) > tilde phi(A)"));
            }
        }
    }
    report.exact("cylinder_below_slab_at_threshold", evaluated, bad);
    let mut tilde = Series::new("nu_tilde");
    let mut plain = Series::new("nu");
    for (i, sc) in scales.iter().enumerate() {
        let pick = |k: usize| -> Vec<Option<f64>> {
            tasks
                .iter()
                .zip(&outs)
                .filter(|(t, _)| t.0 == i)
                .map(|(_, o)| if k == 0 { o.0.rescaled } else { o.1.rescaled })
                .collect()
        };
        let (a, b) = (estimate(&pick(0)), estimate(&pick(1)));
        tilde.rows.push(SeriesRow { p: sc.p, estimate: a });
        plain.rows.push(SeriesRow { p: sc.p, estimate: b });
        let thresholds = tasks
            .iter()
            .zip(&outs)
            .filter(|(t, o)| t.0 == i && o.0.flags["threshold"])
            .count();
        report.notes.push(format!("p = {}: slab height equals the threshold on {thresholds} samples", sc.p));
        if ctx.replay() {
            report.statistical(&format!("consistency_p{}", sc.p), None, "skipped in replay".into());
        } else {
            let gap = (a.mean - b.mean).abs();
            let comb = combined_halfwidth(&[a.halfwidth, b.halfwidth]);
            report.statistical(
                &format!("consistency_p{}", sc.p),
                Some(gap <= SLACK * comb),
                format!("|nu_tilde - nu| = {gap} vs {} x {comb}", SLACK),
            );
        }
    }
    report.series.push(tilde);
    report.series.push(plain);
    report.samples = outs.into_iter().flat_map(|(a, b, _)| [a, b]).collect();
    Ok(report)
}

fn unit(w: &[i64]) -> Vec<f64> {
    let n = (w.iter().map(|x| (x * x) as f64).sum::<f64>()).sqrt();
    w.iter().map(|&x| x as f64 / n).collect()
}

/// `|a x b|` for vectors of any dimension, via the Gram determinant.
fn wedge(a: &[f64], b: &[f64]) -> f64 {
    let aa: f64 = a.iter().map(|x| x * x).sum();
    let bb: f64 = b.iter().map(|x| x * x).sum();
    let ab: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    (aa * bb - ab * ab).max(0.0).sqrt()
}

fn det3(a: &[i64], b: &[i64], c: &[i64]) -> i128 {
    let m = |x: i64| x as i128;
    m(a[0]) * (m(b[1]) * m(c[2]) - m(b[2]) * m(c[1])) - m(a[1]) * (m(b[0]) * m(c[2]) - m(b[2]) * m(c[0]))
        + m(a[2]) * (m(b[0]) * m(c[1]) - m(b[1]) * m(c[0]))
}

/// Side lengths of a triangle whose sides have the given normals, up to a
/// common factor: side `i` is proportional to `|n_j x n_k|`.
pub fn triangle_sides(normals: &[Vec<i64>; 3]) -> Result<[f64; 3], LabError> {
    let d = normals[0].len();
    if d == 3 && det3(&normals[0], &normals[1], &normals[2]) != 0 {
        return Err(LabError::Config("triangle normals must be coplanar".into()));
    }
    if d > 3 {
        return Err(LabError::Config("triangles are supported in dimension 2 and 3".into()));
    }
    let u: Vec<Vec<f64>> = normals.iter().map(|w| unit(w)).collect();
    let sides = [wedge(&u[1], &u[2]), wedge(&u[2], &u[0]), wedge(&u[0], &u[1])];
    if sides.iter().any(|&s| s < 1e-12) {
        return Err(LabError::Config("degenerate triangle: two normals are parallel".into()));
    }
    Ok(sides)
}

pub fn convexity(ctx: &Ctx) -> Result<Report, LabError> {
    let Experiment::Convexity { distribution, triangles, p, replicates, height } = &ctx.cfg.experiment else {
        unreachable!("dispatch matches the kind")
    };
    let law = ctx.law(distribution)?;
    let d = ctx.dimension();
    let e1: Vec<i64> = (0..d).map(|k| i64::from(k == 0)).collect();
    let mut dirs: Vec<Vec<i64>> = vec![e1.clone()];
    let mut sides = Vec::new();
    for t in triangles {
        for w in t {
            let prim = ctx.direction(w)?.w().to_vec();
            if !dirs.contains(&prim) {
                dirs.push(prim);
            }
        }
        sides.push(triangle_sides(t)?);
    }
    let h = height.height(*p)?;
    let scales = dirs
        .iter()
        .map(|w| Scale::new(ctx.direction(w)?, *p, h))
        .collect::<Result<Vec<_>, LabError>>()?;
    let seeds = ctx.seeds(*replicates);
    let tasks: Vec<(usize, u64)> = (0..scales.len()).flat_map(|i| seeds.iter().map(move |&s| (i, s))).collect();
    let outs = ctx.par_map(&tasks, |&(i, seed)| {
        let sc = &scales[i];
        let r = sc.phi(&CapacityField::new(law.clone(), seed))?;
        Ok(ctx.cut_record("phi", &format!("{:?}", dirs[i]), &sc.text, sc.p, seed, &r, sc.area))
    })?;
    let mut report = Report::new("convexity");
    let mut est = Vec::new();
    for (i, w) in dirs.iter().enumerate() {
        let vals: Vec<Option<f64>> = tasks.iter().zip(&outs).filter(|(t, _)| t.0 == i).map(|(_, r)| r.rescaled).collect();
        let e = estimate(&vals);
        let mut s = Series::new(format!("direction_{}", w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("_")));
        s.rows.push(SeriesRow { p: *p, estimate: e });
        report.series.push(s);
        est.push(e);
    }
    let idx = |w: &Vec<i64>| -> usize {
        let prim = ctx.direction(w).expect("validated above").w().to_vec();
        dirs.iter().position(|x| *x == prim).expect("collected above")
    };
    let mut rows = Vec::new();
    let mut all_ok = true;
    for (t, side) in triangles.iter().zip(&sides) {
        let ids = [idx(&t[0]), idx(&t[1]), idx(&t[2])];
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let lhs = side[i] * est[ids[i]].mean;
            let rhs = side[j] * est[ids[j]].mean + side[k] * est[ids[k]].mean;
            let slack = SLACK
                * combined_halfwidth(&[
                    side[i] * est[ids[i]].halfwidth,
                    side[j] * est[ids[j]].halfwidth,
                    side[k] * est[ids[k]].halfwidth,
                ]);
            let ok = lhs <= rhs + slack;
            all_ok &= ok;
            rows.push(vec![
                format!("triangle {:?} side {i}", t),
                format!("{lhs}"),
                format!("{rhs}"),
                format!("{slack}"),
                ok.to_string(),
            ]);
        }
    }
    let e1i = 0;
    for a in 0..dirs.len() {
        for b in a + 1..dirs.len() {
            let (ua, ub) = (unit(&dirs[a]), unit(&dirs[b]));
            let l1: f64 = ua.iter().zip(&ub).map(|(x, y)| (x - y).abs()).sum();
            let lhs = (est[a].mean - est[b].mean).abs();
            let rhs = l1 * est[e1i].mean;
            let slack = SLACK * combined_halfwidth(&[est[a].halfwidth, est[b].halfwidth, l1 * est[e1i].halfwidth]);
            let ok = lhs <= rhs + slack;
            all_ok &= ok;
            rows.push(vec![
                format!("lipschitz {:?} {:?}", dirs[a], dirs[b]),
                format!("{lhs}"),
                format!("{rhs}"),
                format!("{slack}"),
                ok.to_string(),
            ]);
        }
    }
    report.tables.push(Table {
        name: "convexity".into(),
        header: ["inequality", "lhs", "rhs", "slack", "holds"].map(String::from).to_vec(),
        rows,
    });
    if ctx.replay() {
        report.statistical("inequalities", None, "skipped in replay".into());
    } else {
        report.statistical("inequalities", Some(all_ok), "weak triangle and Lipschitz inequalities within slack".into());
    }
    report.samples = outs;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_value_order() {
        assert!(exact_le("1/2", "1"));
        assert!(exact_le("3", "inf"));
        assert!(!exact_le("inf", "3"));
        assert!(!exact_le("5/4", "1"));
    }

    #[test]
    fn unit_square_triangle() {
        let s = triangle_sides(&[vec![0, 1], vec![1, 0], vec![1, 1]]).unwrap();
        let r = 0.5f64.sqrt();
        assert!((s[0] - r).abs() < 1e-12 && (s[1] - r).abs() < 1e-12 && (s[2] - 1.0).abs() < 1e-12);
        assert!(triangle_sides(&[vec![0, 1], vec![0, 2], vec![1, 1]]).is_err());
        assert!(triangle_sides(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).is_err());
    }
}
