//! Runs one validated experiment and assembles its report and series.

use std::fmt::Write as _;

use fracspec::asymptotics::{
    analyze, classify_ideal, dixmier_trace_estimate, eccentricity_scan_auto, partial_sums, DixmierEstimate,
    EccentricityScan, EigenvalueSequence, SumKind, TraceMethod,
};
use fracspec::exemplars::{s_ratio, sigma_ratio, Profile};
use fracspec::fractal_geometry::{
    attractor_cloud, box_dimension_estimate, cloud_extent, contraction_limit, default_eps_grid, is_lattice,
    osc_evidence, similarity_dimension, translation_dimension_formula, LimitIfs,
};
use fracspec::spectral_triples::{
    gap_triple_of_ifs, hausdorff_functional, minkowski_link_check, pair_triple, pair_zeta_partial, sample,
    spectral_dimension, zeta_partial, zeta_residue, Enumeration, SpectralModel,
};
use fracspec::stats::{geomspace, Interval};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::config::{Budget, Exemplar, ExperimentConfig, Method, Params, SequenceSource};
use crate::json::{estimate, exact, fmt, num, nums};

pub const REPORT_FORMAT: &str = "fracspec-report/1";

#[derive(Debug)]
pub enum RunError {
    /// Input problems found while running, e.g. a malformed sequence file.
    Invalid(Vec<String>),
    /// A numerical precondition failed inside an operation.
    Numeric { op: &'static str, error: fracspec::Error },
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Invalid(issues) => write!(f, "{}", issues.join("\n")),
            RunError::Numeric { op, error } => write!(f, "{op}: {error}"),
        }
    }
}

type Result<T> = std::result::Result<T, RunError>;

fn at<T>(op: &'static str, r: fracspec::Result<T>) -> Result<T> {
    r.map_err(|error| RunError::Numeric { op, error })
}

/// Report plus named CSV series (file suffix, contents).
#[derive(Debug, Clone)]
pub struct Output {
    pub report: Value,
    pub series: Vec<(String, String)>,
}

#[derive(Default)]
struct Builder {
    results: Map<String, Value>,
    series: Vec<(String, String)>,
    entries_used: usize,
}

impl Builder {
    fn section(&mut self, key: &str, op: &str, params: Value, values: Value) {
        self.results.insert(
            key.to_string(),
            json!({ "op": op, "params": params, "values": values }),
        );
    }

    fn csv(&mut self, name: &str, header: &str, rows: impl IntoIterator<Item = Vec<f64>>) {
        let mut out = String::new();
        writeln!(out, "{header}").unwrap();
        for row in rows {
            let cells: Vec<String> = row.iter().map(|&x| fmt(x)).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        self.series.push((name.to_string(), out));
    }
}

fn interval(i: Interval) -> (f64, f64) {
    (i.lo, i.hi)
}

fn est(value: f64, i: Interval) -> Value {
    let (lo, hi) = interval(i);
    estimate(value, lo, hi)
}

fn kind_name(k: SumKind) -> &'static str {
    match k {
        SumKind::NonTraceClass => "NON_TRACE_CLASS",
        SumKind::TraceClass => "TRACE_CLASS",
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Ratio => "ratio",
        Method::Increment => "increment",
    }
}

pub fn run(cfg: &ExperimentConfig, budget: Budget) -> Result<Output> {
    let mut b = Builder::default();
    let series = cfg.series;
    match &cfg.params {
        Params::Sequence {
            source,
            exponents,
            tolerance,
        } => {
            let seq = build_sequence(source)?;
            b.entries_used = seq.cap();
            sequence_sections(&mut b, &seq, exponents, *tolerance, series)?;
        }
        Params::Exemplar {
            exemplar,
            cap,
            exponents,
            tolerance,
            lambda,
        } => {
            let (seq, profile) = match exemplar {
                Exemplar::TwoSlope(s) => (at("exemplars::sequence", s.sequence(*cap))?, Profile::TwoSlope(s)),
                Exemplar::Step(s) => (at("exemplars::sequence", s.sequence(*cap))?, Profile::Step(s)),
            };
            b.entries_used = seq.cap();
            sequence_sections(&mut b, &seq, exponents, *tolerance, series)?;
            ratio_sections(&mut b, profile, *cap, exponents, *lambda, series)?;
        }
        Params::IfsClassical {
            ifs,
            depth,
            seed_point,
            translation_depth,
            contraction,
        } => ifs_sections(&mut b, ifs, *depth, seed_point.as_deref(), *translation_depth, *contraction, cfg.seed, budget, series)?,
        Params::GapTriple {
            ifs,
            entries,
            interval,
            zeta_s,
            export_entries,
        } => {
            let model = at("spectral_triples::gap_triple_of_ifs", gap_triple_of_ifs(ifs, *entries, *interval))?;
            b.entries_used = model.eigen().cap();
            let dim = at("spectral_triples::spectral_dimension", spectral_dimension(&model))?;
            let reference = model.reference_dimension().ok();
            let list = &model.gaps;
            b.section(
                "gap_triple",
                "spectral_triples::gap_triple_of_ifs",
                json!({ "entries": entries, "interval": interval.map(|(a, c)| vec![num(a), num(c)]) }),
                json!({
                    "gap_count": model.gap_count(),
                    "entries": model.eigen().cap(),
                    "complete": list.complete_above == 0.0,
                    "complete_above": exact(list.complete_above),
                    "hull": [num(list.a), num(list.b)],
                }),
            );
            dimension_section(&mut b, &dim, reference, &model, series);
            for &s in zeta_s {
                let z = at("spectral_triples::zeta_partial", zeta_partial(&model, s, None))?;
                b.section(
                    &format!("zeta_s={s}"),
                    "spectral_triples::zeta_partial",
                    json!({ "s": num(s) }),
                    json!({
                        "value": estimate(z.value, z.value - z.tail.error, z.value + z.tail.error),
                        "truncated": exact(z.truncated),
                        "tail": estimate(z.tail.remainder, z.tail.remainder - z.tail.error, z.tail.remainder + z.tail.error),
                    }),
                );
            }
            if *export_entries && series {
                export(&mut b, &model);
            }
        }
        Params::PairTriple {
            ifs,
            entries,
            max_depth,
            seed_pair,
            zeta_s,
            residue,
            functionals,
            export_entries,
        } => {
            let limits = Enumeration {
                max_entries: *entries,
                max_depth: *max_depth,
            };
            let model = at("spectral_triples::pair_triple", pair_triple(ifs, seed_pair.clone(), limits))?;
            b.entries_used = model.eigen().cap();
            let dim = at("spectral_triples::spectral_dimension", spectral_dimension(&model))?;
            let critical = model.critical_exponent();
            let (x, y) = model.seed();
            b.section(
                "pair_triple",
                "spectral_triples::pair_triple",
                json!({ "entries": entries, "max_depth": max_depth, "seed_pair": { "x": nums(x), "y": nums(y) } }),
                json!({
                    "words": model.word_count(),
                    "entries": model.eigen().cap(),
                    "complete": model.is_complete(),
                    "level_boundaries": model.level_boundaries().len(),
                    "seed_distance": exact(model.seed_distance()),
                }),
            );
            dimension_section(&mut b, &dim, critical, &model, series);
            let d = critical.unwrap_or(dim.value);
            if *residue {
                if model.stationary_ratios().is_some() {
                    let r = at("spectral_triples::zeta_residue", zeta_residue(&model, d))?;
                    let dix = at(
                        "asymptotics::dixmier_trace_estimate",
                        model.eigen().power(d).and_then(|p| dixmier_trace_estimate(&p)),
                    )?;
                    b.section(
                        "zeta_residue",
                        "spectral_triples::zeta_residue",
                        json!({ "d": num(d) }),
                        json!({
                            "analytic": exact(r.analytic),
                            "numeric": estimate(r.numeric, r.numeric - r.numeric_error, r.numeric + r.numeric_error),
                            "residue_over_d": exact(r.analytic / d),
                        }),
                    );
                    dixmier_section(&mut b, "dixmier_at_d", &dix, d);
                    if series {
                        b.csv("residue.csv", "h,h_zeta", r.samples.iter().map(|&(h, v)| vec![h, v]));
                    }
                } else {
                    b.section(
                        "zeta_residue",
                        "spectral_triples::zeta_residue",
                        json!({ "d": num(d) }),
                        json!({ "skipped": "no closed-form zeta for this generation" }),
                    );
                }
            }
            for &s in zeta_s {
                let z = at("spectral_triples::pair_zeta_partial", pair_zeta_partial(&model, s, None))?;
                b.section(
                    &format!("zeta_s={s}"),
                    "spectral_triples::pair_zeta_partial",
                    json!({ "s": num(s) }),
                    json!({
                        "value": estimate(z.value, z.value - z.tail.error, z.value + z.tail.error),
                        "truncated": exact(z.truncated),
                        "closed_form": z.closed_form.map(exact),
                    }),
                );
            }
            let boundaries = model.level_boundaries();
            for f in functionals {
                let samples = at("spectral_triples::sample", sample(&model, &f.function))?;
                let late: Vec<usize> = boundaries[boundaries.len() / 2..].to_vec();
                let (method, subseq) = match f.method {
                    Method::Ratio => (TraceMethod::Ratio, None),
                    Method::Increment if late.len() >= 2 => (TraceMethod::Increment, Some(late.as_slice())),
                    Method::Increment => (TraceMethod::Increment, None),
                };
                let t = at(
                    "spectral_triples::hausdorff_functional",
                    hausdorff_functional(&model, &samples, d, subseq, method),
                )?;
                b.section(
                    &format!("functional:{}", f.name),
                    "spectral_triples::hausdorff_functional",
                    json!({
                        "d": num(d),
                        "method": method_name(f.method),
                        "subsequence": if subseq.is_some() { "level_boundaries" } else { "eccentricity_scan" },
                    }),
                    json!({
                        "value": est(t.value, t.band),
                        "measurable": t.measurable(),
                        "lipschitz": exact(samples.lipschitz),
                    }),
                );
            }
            if *export_entries && series {
                export(&mut b, &model);
            }
        }
        Params::LinkCheck {
            ifs,
            entries,
            interval,
            d,
        } => {
            let model = at("spectral_triples::gap_triple_of_ifs", gap_triple_of_ifs(ifs, *entries, *interval))?;
            b.entries_used = model.eigen().cap();
            let d = match d {
                Some(d) => *d,
                None => at("fractal_geometry::similarity_dimension", similarity_dimension(ifs))?,
            };
            let link = at("spectral_triples::minkowski_link_check", minkowski_link_check(&model, d))?;
            b.section(
                "link_check",
                "spectral_triples::minkowski_link_check",
                json!({ "entries": entries, "d": num(d) }),
                json!({
                    "trace": est(link.trace.value, link.trace.band),
                    "minkowski": est(link.minkowski.value, link.minkowski.band),
                    "rhs": est(link.rhs_value, link.rhs_band),
                    "lattice": link.lattice,
                    "overlap": link.overlap,
                    "asserted": link.asserted,
                }),
            );
            if series {
                let m = &link.minkowski;
                b.csv("minkowski.csv", "eps,ratio", m.eps.iter().zip(&m.ratios).map(|(&e, &r)| vec![e, r]));
            }
        }
    }
    let report = json!({
        "format": REPORT_FORMAT,
        "generator": concat!("fracspec ", env!("CARGO_PKG_VERSION")),
        "kind": cfg.kind.name(),
        "config": cfg.raw,
        "budget": { "entries": budget.entries, "words": budget.words as u64 },
        "usage": { "entries": b.entries_used },
        "results": Value::Object(b.results),
        "series": b.series.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
    });
    Ok(Output {
        report,
        series: b.series,
    })
}

fn build_sequence(source: &SequenceSource) -> Result<EigenvalueSequence> {
    match source {
        SequenceSource::Values(xs) => at("asymptotics::EigenvalueSequence", EigenvalueSequence::from_values(xs.clone())),
        SequenceSource::Formula {
            exponent,
            log_exponent,
            cap,
        } => {
            let (a, lb) = (*exponent, *log_exponent);
            at(
                "asymptotics::EigenvalueSequence",
                EigenvalueSequence::from_fn(move |n| (n as f64).powf(-a) * ((n + 1) as f64).ln().powf(-lb), *cap),
            )
        }
        SequenceSource::File(path) => {
            let where_ = "$.params.sequence.file";
            let text = std::fs::read_to_string(path)
                .map_err(|e| RunError::Invalid(vec![format!("{where_}: {}: {e}", path.display())]))?;
            let values = parse_sequence_csv(&text).map_err(|e| RunError::Invalid(vec![format!("{where_}: {e}")]))?;
            at("asymptotics::EigenvalueSequence", EigenvalueSequence::from_prefix(values))
        }
    }
}

/// `n,mu_n` rows after a header, with `n` running 1, 2, ….
pub fn parse_sequence_csv(text: &str) -> std::result::Result<Vec<f64>, String> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.split(',').next().map(str::trim) == Some("n") => {}
        _ => return Err("expected a header row starting with n".into()),
    }
    let mut values = Vec::new();
    for (i, line) in lines {
        let mut cells = line.split(',').map(str::trim);
        let (Some(n), Some(mu)) = (cells.next(), cells.next()) else {
            return Err(format!("line {}: expected n,mu_n", i + 1));
        };
        let n: usize = n.parse().map_err(|_| format!("line {}: bad index {n:?}", i + 1))?;
        if n != values.len() + 1 {
            return Err(format!("line {}: index {n} out of sequence", i + 1));
        }
        let mu: f64 = mu.parse().map_err(|_| format!("line {}: bad value {mu:?}", i + 1))?;
        values.push(mu);
    }
    if values.is_empty() {
        return Err("no rows".into());
    }
    Ok(values)
}

fn scan_values(scan: &EccentricityScan) -> Value {
    json!({
        "kind": kind_name(scan.kind),
        "tolerance": num(scan.tolerance),
        "scanned": scan.scanned.len(),
        "accepted": scan.accepted.len(),
        "first_accepted": scan.accepted.first(),
        "min_gap": exact(scan.min_gap),
        "min_gap_at": scan.min_gap_at,
        "trend": scan.trend.map(|t| json!({ "intercept": num(t.intercept), "slope": num(t.slope) })),
        "trend_eccentric": scan.trend_eccentric(),
    })
}

fn dixmier_section(b: &mut Builder, key: &str, d: &DixmierEstimate, exponent: f64) {
    b.section(
        key,
        "asymptotics::dixmier_trace_estimate",
        json!({ "exponent": num(exponent) }),
        json!({
            "value": est(d.value, d.band),
            "ratio_value": est(d.ratio_value, d.ratio_band),
            "measurable": d.measurable(),
        }),
    );
}

fn sequence_sections(
    b: &mut Builder,
    seq: &EigenvalueSequence,
    exponents: &[f64],
    tolerance: f64,
    series: bool,
) -> Result<()> {
    let r = at("asymptotics::analyze", analyze(seq))?;
    let cb = &r.c_bounds;
    b.section(
        "analyze",
        "asymptotics::analyze",
        json!({ "cap": seq.cap(), "exhausted": seq.is_exhausted() }),
        json!({
            "ord": est(r.order.value, r.order.interval),
            "dimension": est(r.dimension, r.dimension_interval),
            "c_lower": est(cb.lower, cb.lower_interval),
            "c_upper": est(cb.upper, cb.upper_interval),
            "c_scale_h": exact(cb.h),
            "c_upper_grid_max": exact(cb.upper_grid_max),
            "jump_dominated": cb.jump_dominated,
            "sandwich": r.sandwich_holds(0.0),
            "classification": r.classification.name(),
            "traceable_at_1": r.traceable_at_1,
            "eccentricity": scan_values(&r.scan),
        }),
    );
    if let Some(d) = &r.dixmier {
        dixmier_section(b, "dixmier", d, 1.0);
    }
    let ideal = at("asymptotics::classify_ideal", classify_ideal(seq, 1.0))?;
    b.section(
        "ideal",
        "asymptotics::classify_ideal",
        json!({ "alpha": num(1.0) }),
        json!({
            "classification": ideal.classification.name(),
            "memberships": ideal.memberships.iter().map(|c| c.name()).collect::<Vec<_>>(),
            "exponent": estimate(ideal.exponent, ideal.exponent - ideal.exponent_se, ideal.exponent + ideal.exponent_se),
            "log_exponent": estimate(
                ideal.log_exponent,
                ideal.log_exponent - ideal.log_exponent_se,
                ideal.log_exponent + ideal.log_exponent_se
            ),
        }),
    );
    let mut gap_rows: Vec<Vec<f64>> = r.scan.scanned.iter().zip(&r.scan.gaps).map(|(&n, &g)| vec![1.0, n as f64, g]).collect();
    for &gamma in exponents {
        let p = at("asymptotics::power", seq.power(gamma))?;
        let class = at("asymptotics::classify_ideal", classify_ideal(&p, 1.0))?;
        let scan = at("asymptotics::eccentricity_scan", eccentricity_scan_auto(&p, tolerance))?;
        gap_rows.extend(scan.scanned.iter().zip(&scan.gaps).map(|(&n, &g)| vec![gamma, n as f64, g]));
        b.section(
            &format!("power={gamma}"),
            "asymptotics::eccentricity_scan",
            json!({ "gamma": num(gamma), "tolerance": num(tolerance) }),
            json!({
                "classification": class.classification.name(),
                "eccentricity": scan_values(&scan),
                "eccentric": !scan.accepted.is_empty() || scan.trend_eccentric(),
            }),
        );
    }
    if series {
        let sums = at("asymptotics::partial_sums", partial_sums(seq, r.scan.kind, &r.scan.scanned))?;
        b.csv(
            "partial_sums.csv",
            "n,s_n",
            sums.indices.iter().zip(&sums.values).map(|(&n, &s)| vec![n as f64, s]),
        );
        b.csv("eccentricity.csv", "gamma,n,gap", gap_rows);
    }
    Ok(())
}

fn ratio_sections(
    b: &mut Builder,
    profile: Profile<'_>,
    cap: usize,
    exponents: &[f64],
    lambda: f64,
    series: bool,
) -> Result<()> {
    let mut gammas = vec![1.0];
    gammas.extend(exponents.iter().copied().filter(|&g| g != 1.0));
    let xs = geomspace((cap as f64).sqrt(), cap as f64 / lambda, 40);
    let mut rows = Vec::new();
    for &gamma in &gammas {
        let mut sig = Vec::with_capacity(xs.len());
        let mut ss = Vec::with_capacity(xs.len());
        for &x in &xs {
            let r = at("exemplars::sigma_ratio", sigma_ratio(profile, gamma, x, lambda, Some(cap)))?;
            let s = s_ratio(profile, gamma, x, lambda, Some(cap)).unwrap_or(f64::NAN);
            rows.push(vec![gamma, x, r, s]);
            sig.push(r);
            ss.push(s);
        }
        let late = &sig[sig.len() / 2..];
        let band = Interval::from_values(late.iter().copied()).unwrap();
        let s_late: Vec<f64> = ss[ss.len() / 2..].iter().copied().filter(|v| v.is_finite()).collect();
        b.section(
            &format!("ratios:gamma={gamma}"),
            "exemplars::sigma_ratio",
            json!({ "gamma": num(gamma), "lambda": num(lambda), "x_max": num(cap as f64 / lambda) }),
            json!({
                "sigma_ratio": est(*sig.last().unwrap(), band),
                "s_ratio": Interval::from_values(s_late.iter().copied()).map(|i| est(*s_late.last().unwrap(), i)),
            }),
        );
    }
    if series {
        b.csv("ratios.csv", "gamma,x,sigma_ratio,s_ratio", rows);
    }
    Ok(())
}

fn dimension_section<M: SpectralModel>(
    b: &mut Builder,
    dim: &fracspec::spectral_triples::SpectralDimension,
    reference: Option<f64>,
    model: &M,
    series: bool,
) {
    b.section(
        "spectral_dimension",
        "spectral_triples::spectral_dimension",
        json!({ "entries": model.eigen().cap() }),
        json!({
            "dimension": est(dim.value, dim.interval),
            "ord": est(dim.order.value, dim.order.interval),
            "log_ratio": dim.log_ratio.map(exact),
            "reference": reference.map(exact),
        }),
    );
    if series {
        let cap = model.eigen().cap();
        let mut ns: Vec<usize> = geomspace(2.0, cap as f64, 200).into_iter().map(|x| (x.round() as usize).clamp(2, cap)).collect();
        ns.dedup();
        let rows = ns.into_iter().filter_map(|n| {
            let mu = model.eigen().get(n).ok()?;
            Some(vec![n as f64, mu, (n as f64).ln() / mu.ln().abs()])
        });
        b.csv("dimension_ratios.csv", "n,mu_n,log_ratio", rows);
    }
}

fn export<M: SpectralModel>(b: &mut Builder, model: &M) {
    let mut buf = Vec::new();
    model.write_csv(&mut buf).expect("writing to memory");
    b.series.push(("entries.csv".into(), String::from_utf8(buf).expect("CSV is UTF-8")));
}

#[allow(clippy::too_many_arguments)]
fn ifs_sections(
    b: &mut Builder,
    ifs: &LimitIfs,
    depth: usize,
    seed_point: Option<&[f64]>,
    translation_depth: Option<usize>,
    contraction: Option<(usize, usize)>,
    seed: u64,
    budget: Budget,
    series: bool,
) -> Result<()> {
    let stationary_ratios = ifs.is_stationary().then(|| ifs.level_ratios(1)).transpose();
    let stationary_ratios = at("fractal_geometry::level_ratios", stationary_ratios)?;
    if let Some(ratios) = &stationary_ratios {
        let d = at("fractal_geometry::similarity_dimension", similarity_dimension(ifs))?;
        b.section(
            "similarity_dimension",
            "fractal_geometry::similarity_dimension",
            json!({ "ratios": nums(ratios) }),
            json!({ "dimension": exact(d), "lattice": is_lattice(ratios) }),
        );
    }
    if ifs.translation_flag() {
        let n = translation_depth.unwrap_or(depth);
        let t = at("fractal_geometry::translation_dimension_formula", translation_dimension_formula(ifs, n))?;
        b.section(
            "translation_dimension",
            "fractal_geometry::translation_dimension_formula",
            json!({ "depth": n }),
            json!({
                "dimension": estimate(t.value, t.liminf.min(t.value), t.value.max(t.liminf)),
                "liminf": exact(t.liminf),
                "closed_form": t.closed_form.map(exact),
            }),
        );
        if series {
            b.csv(
                "partial_ratios.csv",
                "n,r_n",
                t.partial_ratios.iter().enumerate().map(|(i, &r)| vec![(i + 1) as f64, r]),
            );
        }
    }
    let first = at("fractal_geometry::level", ifs.level(1))?[0].fixed_point();
    let seed_point = seed_point.map(<[f64]>::to_vec).unwrap_or(first);
    let cloud: Vec<Vec<f64>> = at("fractal_geometry::attractor_cloud", attractor_cloud(ifs, depth, &seed_point, budget.words))?
        .into_iter()
        .map(|p| p.1)
        .collect();
    let mut scale = 1.0;
    for n in 1..=depth {
        let ratios = at("fractal_geometry::level_ratios", ifs.level_ratios(n))?;
        scale *= ratios.iter().copied().fold(0.0, f64::max);
    }
    let resolution = scale * cloud_extent(&cloud).max(f64::MIN_POSITIVE);
    let eps = default_eps_grid(&cloud, resolution);
    let boxes = at("fractal_geometry::box_dimension_estimate", box_dimension_estimate(&cloud, &eps, resolution))?;
    b.section(
        "box_dimension",
        "fractal_geometry::box_dimension_estimate",
        json!({ "depth": depth, "points": cloud.len(), "seed_point": nums(&seed_point), "resolution": num(resolution) }),
        json!({ "dimension": estimate(boxes.slope, boxes.lower, boxes.upper) }),
    );
    if series {
        b.csv(
            "box_counts.csv",
            "eps,count",
            boxes.eps.iter().zip(&boxes.counts).map(|(&e, &c)| vec![e, c as f64]),
        );
    }
    if ifs.osc_box.is_some() {
        let od = depth.min(8);
        let o = at("fractal_geometry::osc_evidence", osc_evidence(ifs, od))?;
        b.section(
            "osc_evidence",
            "fractal_geometry::osc_evidence",
            json!({ "depth": od }),
            json!({ "asserted": o.asserted, "escaping": o.escaping, "overlapping_pairs": o.overlapping_pairs }),
        );
    }
    if let Some((points, cdepth)) = contraction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start: Vec<Vec<f64>> = (0..points).map(|_| (0..ifs.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let r = at("fractal_geometry::contraction_limit", contraction_limit(ifs, &start, cdepth, budget.words))?;
        b.section(
            "contraction",
            "fractal_geometry::contraction_limit",
            json!({ "points": points, "depth": cdepth, "seed": seed }),
            json!({
                "m": exact(r.m),
                "final_distance": exact(*r.distances.last().unwrap_or(&0.0)),
                "final_bound": exact(*r.bounds.last().unwrap_or(&0.0)),
                "bound_holds": r.bound_holds(1e-9),
            }),
        );
        if series {
            b.csv(
                "contraction.csv",
                "n,distance,bound",
                r.distances.iter().zip(&r.bounds).enumerate().map(|(i, (&d, &c))| vec![i as f64, d, c]),
            );
        }
    }
    Ok(())
}
