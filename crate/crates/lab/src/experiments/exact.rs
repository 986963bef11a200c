use fppflow_core::flows::{canonical_cylinder, split_hyperrect, surgery_sample, zero_cutset_in};
use fppflow_core::lattice::{Hyperrect, Terminals};
use fppflow_core::maxflow::BRUTE_FORCE_LIMIT;
use fppflow_core::rng::hash_words;
use fppflow_core::{
    annulus_decomposition, animal as coarsen, brute_force_min_cut, efficient, max_flow, subadditive_split,
    validate_stream, Capacity, CapacityField, CylinderKind, CylinderSpec, Direction, Distribution, FlowProblem,
    Height, Level,
};

use super::estimation::{cut_is_consistent, estimate, Scale};
use super::{violation, Ctx};
use crate::config::Experiment;
use crate::error::LabError;
use crate::records::format_spec;
use crate::report::{Report, Series, SeriesRow, Table};

/// `K0` in ticks, checked to be subcritical for `law`.
fn subcritical_level(ctx: &Ctx, law: &Distribution, k0: &str) -> Result<u64, LabError> {
    let t = ctx.ticks(k0)?;
    let open = law.open_probability(Level::At(t));
    if open >= ctx.pc {
        return Err(LabError::Hypothesis(format!("survival above K0 = {k0} is {open}, not below p_c = {}", ctx.pc)));
    }
    Ok(t)
}

/// Small 2D cylinder problems accepted by the brute-force oracle.
pub fn small_problems() -> Result<Vec<(String, FlowProblem)>, LabError> {
    let axis = Direction::axis(2, 1);
    let diag = Direction::new(&[1, 1])?;
    let mut out = Vec::new();
    let mut push = |spec: CylinderSpec, t: Terminals| -> Result<(), LabError> {
        let problem = spec.build_problem(t)?;
        let m = problem.edges().len();
        if (1..=14).contains(&m) && m <= BRUTE_FORCE_LIMIT {
            out.push((format!("{} terminals={t:?}", format_spec(&spec)), problem));
        }
        Ok(())
    };
    for (dir, p) in [(axis, 1), (axis, 2), (diag, 1)] {
        let rect = Hyperrect::canonical(dir, p)?;
        for s in 1..=4 {
            let h = Height::from_s(s);
            push(CylinderSpec::new(rect.clone(), h, CylinderKind::Symmetric), Terminals::TopBottom)?;
            push(CylinderSpec::new(rect.clone(), h, CylinderKind::Symmetric), Terminals::HalfBoundaries)?;
            push(CylinderSpec::new(rect.clone(), h, CylinderKind::Directed), Terminals::TopBottom)?;
        }
    }
    Ok(out)
}

pub fn oracle_duality(ctx: &Ctx) -> Result<Report, LabError> {
    let Experiment::OracleDuality { distribution, replicates } = &ctx.cfg.experiment else {
        unreachable!("dispatch matches the kind")
    };
    if ctx.dimension() != 2 {
        return Err(LabError::Config("oracle duality runs in dimension 2".into()));
    }
    let law = ctx.law(distribution)?;
    let problems = small_problems()?;
    let seeds = ctx.seeds(*replicates);
    let outs = ctx.par_map(&seeds, |&seed| {
        let j = (hash_words(seed, [0x0AC1]) % problems.len() as u64) as usize;
        let (text, problem) = &problems[j];
        let field = CapacityField::new(law.clone(), seed);
        let a = max_flow(problem, &field)?;
        let b = brute_force_min_cut(problem, &field)?;
        let same = a.value == b.value && a.cutset == b.cutset && a.cardinality == b.cardinality;
        let stream_ok = a.value.is_infinite() || validate_stream(&a, problem, &field);
        let mut rec = ctx.cut_record("max_flow", "dinic", text, problem.edges().len() as u64, seed, &a, 1.0);
        rec.flags.insert("matches_oracle".into(), same);
        rec.flags.insert("stream_valid".into(), stream_ok);
        Ok((rec, same, stream_ok))
    })?;
    let mut report = Report::new("oracle_duality");
    let mut dual = Vec::new();
    let mut stream = Vec::new();
    for (seed, (rec, same, ok)) in seeds.iter().zip(&outs) {
        if !same {
            dual.push(violation("oracle_duality", *seed, rec.scale, format!("{} differs from the oracle", rec.spec)));
        }
        if !ok {
            stream.push(violation("stream_admissible", *seed, rec.scale, rec.spec.clone()));
        }
    }
    report.exact("oracle_duality", seeds.len(), dual);
    report.exact("stream_admissible", seeds.len(), stream);
    report.notes.push(format!("{} problem shapes with at most 14 edges", problems.len()));
    report.samples = outs.into_iter().map(|o| o.0).collect();
    Ok(report)
}

pub fn subadditivity(ctx: &Ctx) -> Result<Report, LabError> {
    let Experiment::Subadditivity { g, f, k0, directions, p, splits, replicates } = &ctx.cfg.experiment else {
        unreachable!("dispatch matches the kind")
    };
    let (lg, lf) = (ctx.law(g)?, ctx.law(f)?);
    if !Distribution::dominates(&lf, &lg) {
        return Err(LabError::Hypothesis("F must dominate G".into()));
    }
    let level = Level::At(subcritical_level(ctx, &lf, k0)?);
    let mut cases = Vec::new();
    for w in directions {
        let rect = Hyperrect::canonical(ctx.direction(w)?, *p)?;
        for counts in splits {
            if counts.len() + 1 != ctx.dimension() {
                return Err(LabError::Config(format!("split {counts:?} needs {} entries", ctx.dimension() - 1)));
            }
            let tiles = split_hyperrect(&rect, counts)?;
            cases.push((w.clone(), counts.clone(), rect.clone(), tiles));
        }
    }
    let seeds = ctx.seeds(*replicates);
    let tasks: Vec<(usize, u64)> = (0..cases.len()).flat_map(|i| seeds.iter().map(move |&s| (i, s))).collect();
    let outs = ctx.par_map(&tasks, |&(i, seed)| {
        let (w, counts, rect, tiles) = &cases[i];
        let fg = CapacityField::new(lg.clone(), seed);
        let ff = fg.with_distribution(lf.clone());
        let r = subadditive_split(rect, tiles, &fg, &ff, level, ctx.budget)?;
        let text = format!("{} split={counts:?}", format_spec(&CylinderSpec::new(rect.clone(), Height::from_s(r.whole.height.s), CylinderKind::Slab { margin: 0 })));
        let mut rec = ctx.record("tilde_phi_split", &format!("{w:?}"), &text, *p, seed, r.lhs, r.whole.flow.cardinality as u64, rect.area());
        rec.extra.insert("sum_of_tiles".into(), r.rhs.format(ctx.quantum));
        rec.flags.insert("holds".into(), r.holds());
        Ok((rec, r.holds()))
    })?;
    let mut report = Report::new("subadditivity");
    let bad = tasks
        .iter()
        .zip(&outs)
        .filter(|(_, o)| !o.1)
        .map(|((i, seed), o)| {
            violation("split_subadditive", *seed, *p, format!("{:?} split {:?}: {} > {}", cases[*i].0, cases[*i].1, o.0.value, o.0.extra["sum_of_tiles"]))
        })
        .collect();
    report.exact("split_subadditive", tasks.len(), bad);
    report.samples = outs.into_iter().map(|o| o.0).collect();
    Ok(report)
}

pub fn surgery(ctx: &Ctx) -> Result<Report, LabError> {
    let Experiment::Surgery { distribution, k, k0, direction, p, replicates, height, min_event_rate } =
        &ctx.cfg.experiment
    else {
        unreachable!("dispatch matches the kind")
    };
    let law = ctx.law(distribution)?;
    let k0t = subcritical_level(ctx, &law, k0)?;
    let kt = ctx.ticks(k)?;
    if kt < k0t {
        return Err(LabError::Config("K must be at least K0".into()));
    }
    let h = height.height(*p)?;
    let sc = Scale::new(ctx.direction(direction)?, *p, h)?;
    let seeds = ctx.seeds(*replicates);
    let outs = ctx.par_map(&seeds, |&seed| {
        let field = CapacityField::new(law.clone(), seed);
        let s = surgery_sample(&sc.spec, h, &field, kt, k0t, ctx.budget)?;
        let mut rec = ctx.record(
            "surgery",
            distribution,
            &sc.text,
            *p,
            seed,
            s.report.lhs,
            s.report.cutset.len() as u64,
            sc.area,
        );
        rec.extra.insert("bound".into(), s.report.rhs.format(ctx.quantum));
        rec.extra.insert("truncated".into(), s.truncated.value.format(ctx.quantum));
        rec.extra.insert("full".into(), s.full.value.format(ctx.quantum));
        rec.flags.insert("event".into(), s.event);
        rec.flags.insert("is_cutset".into(), s.is_cutset);
        rec.flags.insert("bound_holds".into(), s.report.bound_holds());
        let added_ok = s.report.max_added.map_or(true, |c| c <= Capacity::Finite(k0t));
        rec.flags.insert("added_below_k0".into(), added_ok);
        Ok(rec)
    })?;
    let mut report = Report::new("surgery");
    let (mut cut, mut bound, mut added) = (Vec::new(), Vec::new(), Vec::new());
    let mut events = 0;
    for r in &outs {
        if r.flags["event"] {
            events += 1;
            if !r.flags["is_cutset"] {
                cut.push(violation("surgery_is_cutset", r.seed, *p, "E' does not cut"));
            }
            if !r.flags["bound_holds"] {
                bound.push(violation("surgery_bound", r.seed, *p, format!("{} > {}", r.value, r.extra["bound"])));
            }
        }
        if !r.flags["added_below_k0"] {
            added.push(violation("added_capacity_at_most_k0", r.seed, *p, "an added edge exceeds K0"));
        }
    }
    report.exact("surgery_is_cutset", events, cut);
    report.exact("surgery_bound", events, bound);
    report.exact("added_capacity_at_most_k0", outs.len(), added);
    let rate = events as f64 / outs.len().max(1) as f64;
    if ctx.replay() {
        report.statistical("event_rate", None, format!("event holds on {events} of {}", outs.len()));
    } else {
        report.statistical("event_rate", Some(rate >= *min_event_rate), format!("{rate} vs {min_event_rate}"));
    }
    report.samples = outs;
    Ok(report)
}

pub fn zero_regime(ctx: &Ctx) -> Result<Report, LabError> {
    let Experiment::ZeroRegime { distribution, k0, schedule, replicates, height } = &ctx.cfg.experiment else {
        unreachable!("dispatch matches the kind")
    };
    let law = ctx.law(distribution)?;
    let k0t = subcritical_level(ctx, &law, k0)?;
    let open0 = law.open_probability(Level::At(0));
    if open0 >= ctx.pc {
        return Err(LabError::Hypothesis(format!("G(]0, inf]) = {open0} is not below p_c = {}", ctx.pc)));
    }
    let d = ctx.dimension();
    let mut tasks = Vec::new();
    for (i, &p) in schedule.iter().enumerate() {
        let l = height.height(p)?;
        tasks.extend(ctx.seeds(replicates.at(i, schedule.len())?).into_iter().map(|s| (p, l, s)));
    }
    let outs = ctx.par_map(&tasks, |&(p, l, seed)| {
        let field = CapacityField::new(law.clone(), seed);
        let z = zero_cutset_in(p, l, d, &field, k0t, ctx.budget)?;
        let area = (p as f64).powi(d as i32 - 1);
        let spec = format!("straight directed p={p} height={l} dimension={d}");
        let mut rec = ctx.record("zero_cutset", distribution, &spec, p, seed, z.capacity, z.cutset.len() as u64, area);
        rec.extra.insert("bound".into(), z.bound.format(ctx.quantum));
        rec.extra.insert("connected".into(), z.connected.to_string());
        rec.extra.insert("r_sum".into(), z.r_sum.to_string());
        rec.flags.insert("event".into(), z.event);
        rec.flags.insert("is_cutset".into(), z.is_cutset);
        rec.flags.insert("bound_holds".into(), z.capacity <= z.bound);
        Ok(rec)
    })?;
    let mut report = Report::new("zero_regime");
    let (mut cut, mut bound) = (Vec::new(), Vec::new());
    let mut events = 0;
    for r in &outs {
        if r.flags["event"] {
            events += 1;
            if !r.flags["is_cutset"] {
                cut.push(violation("zero_cutset_cuts", r.seed, r.scale, "E'(A, l) does not cut"));
            }
        }
        if !r.flags["bound_holds"] {
            bound.push(violation("zero_cutset_bound", r.seed, r.scale, format!("{} > {}", r.value, r.extra["bound"])));
        }
    }
    report.exact("zero_cutset_cuts", events, cut);
    report.exact("zero_cutset_bound", outs.len(), bound);
    let mut series = Series::new("zero_cutset");
    for &p in schedule {
        let vals: Vec<Option<f64>> = outs.iter().filter(|r| r.scale == p).map(|r| r.rescaled).collect();
        let events = outs.iter().filter(|r| r.scale == p && r.flags["event"]).count();
        report.notes.push(format!("p = {p}: event holds on {events} of {} samples", vals.len()));
        series.rows.push(SeriesRow { p, estimate: estimate(&vals) });
    }
    if ctx.replay() || schedule.len() < 2 {
        report.statistical("means_decrease", None, "needs two scales and the full replicate set".into());
    } else {
        let means: Vec<f64> = series.rows.iter().map(|r| r.estimate.mean).collect();
        let ok = means.windows(2).all(|w| w[1] < w[0]);
        report.statistical("means_decrease", Some(ok), format!("{means:?}"));
    }
    report.series.push(series);
    report.samples = outs;
    Ok(report)
}

pub fn annulus(ctx: &Ctx) -> Result<Report, LabError> {
    let Experiment::Annulus { distribution, p, height, l, replicates } = &ctx.cfg.experiment else {
        unreachable!("dispatch matches the kind")
    };
    let law = ctx.law(distribution)?;
    let d = ctx.dimension();
    let spec = canonical_cylinder(Direction::axis(d, d - 1), *p, *height, CylinderKind::Symmetric)?;
    let text = format_spec(&spec);
    let area = spec.rect.area();
    let seeds = ctx.seeds(*replicates);
    let outs = ctx.par_map(&seeds, |&seed| {
        let field = CapacityField::new(law.clone(), seed);
        let r = annulus_decomposition(&spec, *l, &field)?;
        let mut rec = ctx.cut_record("phi", distribution, &text, *p, seed, &r.phi, area);
        rec.extra.insert("annulus_sum".into(), r.rhs.format(ctx.quantum));
        rec.extra.insert("boxes".into(), r.boxes.len().to_string());
        rec.flags.insert("holds".into(), r.holds());
        Ok(rec)
    })?;
    let mut report = Report::new("annulus");
    let bad = outs
        .iter()
        .filter(|r| !r.flags["holds"])
        .map(|r| violation("annulus_bound", r.seed, *p, format!("{} > {}", r.value, r.extra["annulus_sum"])))
        .collect();
    report.exact("annulus_bound", outs.len(), bad);
    report.samples = outs;
    Ok(report)
}

pub fn animal(ctx: &Ctx) -> Result<Report, LabError> {
    let Experiment::Animal { distribution, direction, p, l, replicates, height } = &ctx.cfg.experiment else {
        unreachable!("dispatch matches the kind")
    };
    let law = ctx.law(distribution)?;
    let sc = Scale::new(ctx.direction(direction)?, *p, height.height(*p)?)?;
    let problem = sc.spec.build_problem(Terminals::TopBottom)?;
    let seeds = ctx.seeds(*replicates);
    let outs = ctx.par_map(&seeds, |&seed| {
        let field = CapacityField::new(law.clone(), seed);
        let r = max_flow(&problem, &field)?;
        let mut rec = ctx.cut_record("phi", distribution, &sc.text, *p, seed, &r, sc.area);
        if r.value.is_infinite() {
            return Ok((rec, None));
        }
        let eff = efficient(&r.cutset, &problem)?;
        let consistent = cut_is_consistent(&r, &sc.spec, &field)?;
        let g = coarsen(&r.cutset, *l)?;
        let ratio = g.ratio(r.cutset.len());
        rec.flags.insert("efficient".into(), eff && consistent);
        rec.flags.insert("connected".into(), g.is_connected());
        rec.extra.insert("boxes".into(), g.boxes.len().to_string());
        rec.extra.insert("ratio".into(), format!("{ratio}"));
        Ok((rec, Some(ratio)))
    })?;
    let mut report = Report::new("animal");
    let (mut eff, mut conn) = (Vec::new(), Vec::new());
    let mut evaluated = 0;
    let mut rows = Vec::new();
    let mut max_ratio: f64 = 0.0;
    for (rec, ratio) in &outs {
        let Some(ratio) = ratio else { continue };
        evaluated += 1;
        max_ratio = max_ratio.max(*ratio);
        if !rec.flags["efficient"] {
            eff.push(violation("minimal_cutset_efficient", rec.seed, *p, "minimal cutset is not efficient"));
        }
        if !rec.flags["connected"] {
            conn.push(violation("animal_connected", rec.seed, *p, "box set is not connected"));
        }
        rows.push(vec![
            rec.seed.to_string(),
            rec.cardinality.to_string(),
            rec.extra["boxes"].clone(),
            rec.extra["ratio"].clone(),
        ]);
    }
    report.exact("minimal_cutset_efficient", evaluated, eff);
    report.exact("animal_connected", evaluated, conn);
    report.notes.push(format!("largest |Gamma| L / |E| = {max_ratio}"));
    report.tables.push(Table {
        name: "animal".into(),
        header: ["seed", "edges", "boxes", "ratio"].map(String::from).to_vec(),
        rows,
    });
    report.samples = outs.into_iter().map(|o| o.0).collect();
    Ok(report)
}
