use fracspec::asymptotics::{
    dixmier_trace_estimate, eccentricity_scan, tail_estimate, EigenvalueSequence, SumKind, TraceMethod,
};
use fracspec::fractal_geometry::{
    cylinder_measure, gaps_from_interval_ifs, largest_gaps, similarity_dimension, Generation, GapList, LimitIfs,
    Similarity, Word,
};
use fracspec::spectral_triples::*;
use fracspec::Error;
use nalgebra::{DMatrix, DVector};

fn cantor() -> LimitIfs {
    LimitIfs::line(&[1.0 / 3.0, 1.0 / 3.0], &[0.0, 2.0 / 3.0]).unwrap()
}

fn non_lattice() -> LimitIfs {
    LimitIfs::line(&[0.5, 1.0 / 3.0], &[0.0, 2.0 / 3.0]).unwrap()
}

fn limits(max_entries: usize, max_depth: Option<usize>) -> Enumeration {
    Enumeration { max_entries, max_depth }
}

fn plane_map(r: f64, tx: f64, ty: f64) -> Similarity {
    Similarity::new(r, DMatrix::identity(2, 2), DVector::from_vec(vec![tx, ty])).unwrap()
}

/// Planar translation fractal: four corner squares of ratio 1/4, then three of ratio 1/3.
fn planar_translation() -> LimitIfs {
    let a = vec![
        plane_map(0.25, 0.0, 0.0),
        plane_map(0.25, 0.75, 0.0),
        plane_map(0.25, 0.0, 0.75),
        plane_map(0.25, 0.75, 0.75),
    ];
    let b = vec![plane_map(1.0 / 3.0, 0.0, 0.0), plane_map(1.0 / 3.0, 2.0 / 3.0, 0.0), plane_map(1.0 / 3.0, 0.0, 2.0 / 3.0)];
    LimitIfs::new(Generation::Periodic(vec![a, b])).unwrap()
}

/// Line translation fractal with gaps at every level: two maps of ratio 1/4, then three of ratio 1/5.
fn line_translation() -> LimitIfs {
    let a = vec![Similarity::line(0.25, 0.0).unwrap(), Similarity::line(0.25, 0.75).unwrap()];
    let b = vec![
        Similarity::line(0.2, 0.0).unwrap(),
        Similarity::line(0.2, 0.4).unwrap(),
        Similarity::line(0.2, 0.8).unwrap(),
    ];
    LimitIfs::new(Generation::Periodic(vec![a, b])).unwrap()
}

#[test]
fn cantor_gap_triple_level_three() {
    let model = gap_triple(gaps_from_interval_ifs(&cantor(), 3, None, 100).unwrap()).unwrap();
    let mu = model.eigen().to_vec();
    assert_eq!(mu.len(), 14);
    let mut expect = vec![1.0 / 3.0; 2];
    expect.extend([1.0 / 9.0; 4]);
    expect.extend([1.0 / 27.0; 8]);
    for (a, b) in mu.iter().zip(&expect) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn single_gap_gives_double_eigenvalue() {
    let model = gap_triple(GapList::new(0.0, 1.0, vec![(0.0, 1.0)], vec![]).unwrap()).unwrap();
    assert_eq!(model.eigen().to_vec(), vec![1.0, 1.0]);
    assert_eq!(model.tags(2), (&[0.0][..], &[1.0][..]));
}

#[test]
fn best_first_gaps_match_full_sort() {
    let fast = largest_gaps(&non_lattice(), 20_000, Some((0.0, 1.0))).unwrap();
    let model = gap_triple(fast).unwrap();
    // oracle: every gap of 24 levels, fully sorted
    let all = gaps_from_interval_ifs(&non_lattice(), 24, Some((0.0, 1.0)), 1 << 25).unwrap();
    let mut lens: Vec<f64> = all.gaps.iter().map(|g| g.hi - g.lo).collect();
    lens.sort_by(|a, b| b.total_cmp(a));
    let mu = model.eigen().to_vec();
    assert!(mu.len() >= 2 * 19_000);
    assert!(lens[mu.len() / 2] < all.complete_above || mu.len() / 2 < lens.len());
    for (k, v) in mu.iter().enumerate() {
        assert!((v - lens[k / 2]).abs() <= 1e-15 * lens[0], "entry {k}");
    }
}

#[test]
fn dimensions_of_cantor_models() {
    let d = similarity_dimension(&cantor()).unwrap();
    let gap = gap_triple(gaps_from_interval_ifs(&cantor(), 14, None, 1 << 15).unwrap()).unwrap();
    let g = spectral_dimension(&gap).unwrap();
    assert!((g.value - d).abs() < 0.01, "{g:?}");
    assert!(g.log_ratio.is_some());
    let pair = pair_triple(&cantor(), None, limits(usize::MAX, Some(14))).unwrap();
    let p = spectral_dimension(&pair).unwrap();
    // the point value sits 0.012 above d at this depth; the interval reaches it
    let miss = (p.interval.lo - d).max(d - p.interval.hi).max(0.0);
    assert!(miss < 0.01 && (p.value - d).abs() < 0.015, "{p:?}");
}

#[test]
fn abutting_halves_have_dimension_one() {
    let ifs = LimitIfs::line(&[0.5, 0.5], &[0.0, 0.5]).unwrap();
    let p = spectral_dimension(&pair_triple(&ifs, None, limits(200_000, None)).unwrap()).unwrap();
    assert!((p.value - 1.0).abs() < 0.02, "{p:?}");
}

#[test]
fn planar_translation_multiset() {
    let ifs = planar_translation();
    let seed = (vec![0.0, 0.0], vec![1.0, 0.0]);
    let m = pair_triple(&ifs, Some(seed), limits(usize::MAX, Some(10))).unwrap();
    let mu = m.eigen().to_vec();
    let mut at = 0;
    let (mut count, mut ratio) = (1usize, 1.0);
    for k in 1..=10 {
        let (p, r) = if k % 2 == 1 { (4, 0.25) } else { (3, 1.0 / 3.0) };
        count *= p;
        ratio *= r;
        for v in &mu[at..at + 2 * count] {
            assert!((v / ratio - 1.0).abs() < 1e-12, "level {k}");
        }
        at += 2 * count;
    }
    assert_eq!(at, mu.len());
}

#[test]
fn multiplicity_two_and_order() {
    let m = pair_triple(&non_lattice(), None, limits(100_000, None)).unwrap();
    let mu = m.eigen().to_vec();
    for k in (0..mu.len()).step_by(2) {
        assert_eq!(mu[k], mu[k + 1]);
        assert_eq!(m.tags(k + 1), m.tags(k + 2));
    }
    assert!(mu.windows(2).all(|w| w[1] <= w[0]));
    // oracle: all words up to a depth that covers the enumerated values, fully sorted
    let cutoff = *mu.last().unwrap() / m.seed_distance();
    let depth = (cutoff.ln() / 0.5f64.ln()).ceil() as usize + 1;
    let mut all: Vec<f64> = Vec::new();
    for k in 1..=depth {
        for w in non_lattice().words(k, 1 << 30).unwrap() {
            let r = non_lattice().word_ratio(&w).unwrap();
            if r >= cutoff * (1.0 - 1e-12) {
                all.push(r * m.seed_distance());
            }
        }
    }
    all.sort_by(|a, b| b.total_cmp(a));
    for k in 0..mu.len() / 2 {
        assert!((mu[2 * k] / all[k] - 1.0).abs() < 1e-12, "{k}");
    }
}

#[test]
fn tags_are_images_of_seed() {
    let ifs = non_lattice();
    let m = pair_triple(&ifs, Some((vec![0.1], vec![0.9])), limits(2000, None)).unwrap();
    for i in [0, 7, 500, 999] {
        let w = m.word(i);
        let map = ifs.word_map(&w).unwrap();
        let (x, y) = m.tags(2 * i + 1);
        assert!((map.apply(&[0.1])[0] - x[0]).abs() < 1e-14);
        assert!((map.apply(&[0.9])[0] - y[0]).abs() < 1e-14);
        assert!((m.eigen().get(2 * i + 1).unwrap() - 0.8 * ifs.word_ratio(&w).unwrap()).abs() < 1e-15);
    }
}

#[test]
fn cantor_zeta_against_closed_form() {
    let m = pair_triple(&cantor(), Some((vec![0.0], vec![1.0])), limits(400_000, None)).unwrap();
    let s = 0.8;
    let lam = 2.0 * 3f64.powf(-s);
    let oracle = 2.0 * lam / (1.0 - lam);
    let z = pair_zeta_partial(&m, s, None).unwrap();
    assert!((z.closed_form.unwrap() / oracle - 1.0).abs() < 1e-12);
    assert!((z.value / oracle - 1.0).abs() < 1e-12);
    // the same prefix without the closed tail: fitted remainder
    let bare = EigenvalueSequence::from_prefix(m.eigen().to_vec()).unwrap().power(s).unwrap();
    let fit = tail_estimate(&bare).unwrap();
    let err = (z.truncated + fit.remainder - oracle).abs();
    assert!(err <= 3.0 * fit.error + 0.01 * fit.remainder, "{err} vs {fit:?}");
}

#[test]
fn zeta_of_single_map_and_large_s() {
    let ifs = LimitIfs::line(&[0.5], &[0.0]).unwrap();
    let m = pair_triple(&ifs, Some((vec![0.0], vec![2.5])), limits(100, None)).unwrap();
    assert!((m.zeta_closed_form(1.0).unwrap() - 5.0).abs() < 1e-12);
    let c = pair_triple(&cantor(), None, limits(10_000, None)).unwrap();
    let zs: Vec<f64> = [1.0, 2.0, 4.0, 8.0, 16.0].iter().map(|&s| pair_zeta_partial(&c, s, None).unwrap().value).collect();
    assert!(zs.windows(2).all(|w| w[1] < w[0]), "{zs:?}");
    assert!(zs[4] < 1e-6);
}

#[test]
fn zeta_below_dimension_rejected() {
    let c = pair_triple(&cantor(), None, limits(1000, None)).unwrap();
    assert!(matches!(pair_zeta_partial(&c, 0.5, None), Err(Error::SBelowDimension { .. })));
}

#[test]
fn residues_by_both_routes() {
    let halves = LimitIfs::line(&[0.5, 0.5], &[0.0, 0.5]).unwrap();
    let m = pair_triple(&halves, Some((vec![0.0], vec![1.0])), limits(100, None)).unwrap();
    let r = zeta_residue(&m, 1.0).unwrap();
    let oracle = 2.0 / std::f64::consts::LN_2;
    assert!((r.analytic - oracle).abs() < 1e-12);
    assert!((r.numeric - oracle).abs() < 1e-6);

    let c = pair_triple(&cantor(), Some((vec![0.0], vec![1.0])), limits(100, None)).unwrap();
    let d = similarity_dimension(&cantor()).unwrap();
    let r = zeta_residue(&c, d).unwrap();
    assert!((r.analytic - 2.0 / 3f64.ln()).abs() < 1e-12);
    assert!((r.numeric - r.analytic).abs() < 1e-6);
}

#[test]
fn dixmier_trace_is_residue_over_dimension() {
    let ifs = non_lattice();
    let d = similarity_dimension(&ifs).unwrap();
    let m = pair_triple(&ifs, None, limits(1_000_000, None)).unwrap();
    let l = zeta_residue(&m, d).unwrap().analytic;
    let dx = dixmier_trace_estimate(&m.eigen().power(d).unwrap()).unwrap();
    assert!((dx.value / (l / d) - 1.0).abs() < 0.01, "{dx:?} vs {}", l / d);
}

#[test]
fn functional_of_constant_is_one() {
    let m = pair_triple(&non_lattice(), None, limits(200_000, None)).unwrap();
    let d = similarity_dimension(&non_lattice()).unwrap();
    let one = sample(&m, &TestFunction::Constant(1.0)).unwrap();
    let h = hausdorff_functional(&m, &one, d, None, TraceMethod::Ratio).unwrap();
    assert!((h.value - 1.0).abs() < 1e-12 && h.band.width() < 1e-12);
}

#[test]
fn cantor_first_cylinder_has_half_mass() {
    let m = pair_triple(&cantor(), None, limits(1_000_000, None)).unwrap();
    let d = similarity_dimension(&cantor()).unwrap();
    let weight = cylinder_measure(&cantor(), d, 1, 10).unwrap().weight(&Word(vec![0])).unwrap();
    assert!((weight - 0.5).abs() < 1e-12);
    let f = TestFunction::SmoothedIndicator { lo: vec![0.0], hi: vec![1.0 / 3.0], ramp: 0.1 };
    let h = hausdorff_functional(&m, &sample(&m, &f).unwrap(), d, None, TraceMethod::Ratio).unwrap();
    assert!((h.value - weight).abs() <= h.band.width(), "{h:?}");
    assert!(h.band.width() < 0.05);
    // along cylinder-aligned indices the ratio is exact
    let aligned = m.level_boundaries();
    let h = hausdorff_functional(&m, &sample(&m, &f).unwrap(), d, Some(&aligned), TraceMethod::Ratio).unwrap();
    assert!((h.value - 0.5).abs() < 1e-12);
}

#[test]
fn functional_is_monotone() {
    let m = pair_triple(&non_lattice(), None, limits(200_000, None)).unwrap();
    let d = similarity_dimension(&non_lattice()).unwrap();
    let f = TestFunction::SmoothedIndicator { lo: vec![0.0], hi: vec![0.5], ramp: 0.05 };
    let g = TestFunction::SmoothedIndicator { lo: vec![0.0], hi: vec![0.5], ramp: 0.1 };
    let h = TestFunction::Affine { gradient: vec![1.0], offset: 0.5 };
    let vf = hausdorff_functional(&m, &sample(&m, &f).unwrap(), d, None, TraceMethod::Ratio).unwrap().value;
    let vg = hausdorff_functional(&m, &sample(&m, &g).unwrap(), d, None, TraceMethod::Ratio).unwrap().value;
    let vh = hausdorff_functional(&m, &sample(&m, &h).unwrap(), d, None, TraceMethod::Ratio).unwrap().value;
    assert!(vf <= vg && vg <= vh, "{vf} {vg} {vh}");
}

#[test]
fn table_functions_need_every_tag() {
    let m = pair_triple(&cantor(), Some((vec![0.0], vec![1.0])), limits(usize::MAX, Some(1))).unwrap();
    let points = vec![(vec![0.0], 1.0), (vec![1.0 / 3.0], 2.0), (vec![2.0 / 3.0], 3.0)];
    let f = TestFunction::Table { points: points.clone(), tolerance: 1e-9 };
    assert!(matches!(sample(&m, &f), Err(Error::UndefinedTag { index: 3 })));
    let mut full = points;
    full.push((vec![1.0], 4.0));
    let s = sample(&m, &TestFunction::Table { points: full, tolerance: 1e-9 }).unwrap();
    assert_eq!(s.values, vec![1.5, 1.5, 3.5, 3.5]);
    assert!((s.lipschitz - 3.0).abs() < 1e-12);
}

#[test]
fn translation_functionals_match_cylinder_weights() {
    let ifs = line_translation();
    let m = pair_triple(&ifs, None, limits(2_000_000, None)).unwrap();
    let d = m.critical_exponent().unwrap();
    let weights = cylinder_measure(&ifs, d, 10, 1 << 20).unwrap();
    let aligned = m.level_boundaries();
    let late: Vec<usize> = aligned[aligned.len() / 2..].to_vec();
    for w in [Word(vec![0; 10]), Word(vec![1, 2, 0, 1, 1, 0, 0, 2, 1, 2])] {
        let map = ifs.word_map(&w).unwrap();
        let (a, b) = (map.apply(&[0.0])[0], map.apply(&[1.0])[0]);
        let ramp = 0.5 * 0.2 * (b - a);
        let f = TestFunction::SmoothedIndicator { lo: vec![a], hi: vec![b], ramp };
        let h = hausdorff_functional(&m, &sample(&m, &f).unwrap(), d, Some(&late), TraceMethod::Increment).unwrap();
        let expect = weights.weight(&w).unwrap();
        assert!((h.value / expect - 1.0).abs() < 1e-9 + h.band.width() / expect, "{w}: {h:?} vs {expect}");
    }
}

#[test]
fn seed_independence() {
    for ifs in [cantor(), non_lattice(), line_translation()] {
        let a = spectral_dimension(&pair_triple(&ifs, None, limits(400_000, None)).unwrap()).unwrap();
        let b = spectral_dimension(&pair_triple(&ifs, Some((vec![0.25], vec![0.3])), limits(400_000, None)).unwrap()).unwrap();
        let (lo, hi) = (a.interval.lo.min(b.interval.lo), a.interval.hi.max(b.interval.hi));
        assert!((a.value - b.value).abs() <= hi - lo + 1e-12, "{a:?} {b:?}");
    }
}

#[test]
fn scaling_covariance() {
    let c = 7.5;
    let a = pair_triple(&non_lattice(), None, limits(100_000, None)).unwrap();
    let b = pair_triple(&non_lattice().scaled(c), None, limits(100_000, None)).unwrap();
    for (x, y) in a.eigen().iter().zip(b.eigen().iter()) {
        assert!((y / (c * x) - 1.0).abs() < 1e-12);
    }
    let (da, db) = (spectral_dimension(&a).unwrap(), spectral_dimension(&b).unwrap());
    assert!((da.value - db.value).abs() < 0.01, "{da:?} {db:?}");
}

#[test]
fn self_similar_homogeneity_at_aligned_indices() {
    let m = pair_triple(&cantor(), Some((vec![0.0], vec![1.0])), limits(200_000, None)).unwrap();
    let d = similarity_dimension(&cantor()).unwrap();
    let mu: Vec<f64> = m.eigen().power(d).unwrap().to_vec();
    let aligned = m.level_boundaries();
    let lam_d = 3f64.powf(-d);
    let mut prev_full = 0.0;
    for &n in &aligned {
        let mut parts = [0.0; 2];
        let mut full = 0.0;
        for k in 0..n {
            full += mu[k];
            parts[m.first_digit(k / 2) as usize] += mu[k];
        }
        assert!(((parts[0] + parts[1]) / full - 1.0).abs() < 1e-12);
        for p in parts {
            assert!((p / (lam_d * (2.0 + prev_full)) - 1.0).abs() < 1e-12);
        }
        prev_full = full;
    }
}

#[test]
fn exponent_is_unique() {
    let m = pair_triple(&cantor(), None, limits(1_000_000, None)).unwrap();
    let d = similarity_dimension(&cantor()).unwrap();
    for (e, kind) in [(d - 0.15, SumKind::NonTraceClass), (d + 0.15, SumKind::TraceClass)] {
        let scan = eccentricity_scan(&m.eigen().power(e).unwrap(), kind, 0.02).unwrap();
        assert!(scan.accepted.is_empty() && scan.min_gap > 0.05, "{e}: {}", scan.min_gap);
    }
}

#[test]
fn minkowski_link_non_lattice_and_lattice() {
    let d = similarity_dimension(&non_lattice()).unwrap();
    let g = gap_triple_of_ifs(&non_lattice(), 400_000, Some((0.0, 1.0))).unwrap();
    let l = minkowski_link_check(&g, d).unwrap();
    assert_eq!(l.lattice, Some(false));
    assert!(l.asserted && l.overlap, "{l:?}");
    // oracle from the gap zeta residue: 2·Σ_g g^d / Σ_j λ_j^d log(1/λ_j), divided by d
    let g1: f64 = 1.0 / 6.0;
    let slope = 0.5f64.powf(d) * 2f64.ln() + (1.0 / 3.0f64).powf(d) * 3f64.ln();
    let oracle = 2.0 * g1.powf(d) / slope / d;
    assert!(l.trace.band.hull(l.rhs_value).contains(oracle) || (l.rhs_value / oracle - 1.0).abs() < 0.01, "{oracle} {l:?}");

    let dc = similarity_dimension(&cantor()).unwrap();
    let gc = gap_triple_of_ifs(&cantor(), 400_000, None).unwrap();
    let lc = minkowski_link_check(&gc, dc).unwrap();
    assert_eq!(lc.lattice, Some(true));
    assert!(!lc.asserted);
    assert!(lc.trace.band.width() > 0.0 && lc.rhs_band.width() > 0.0);
}

#[test]
fn link_check_rejects_zero_dimension() {
    let g = gap_triple(GapList::new(0.0, 3.0, vec![(1.0, 2.0)], vec![]).unwrap()).unwrap();
    assert!(matches!(minkowski_link_check(&g, 0.0), Err(Error::InvalidSpec(_))));
}

#[test]
fn csv_export_has_header_and_tags() {
    let m = pair_triple(&planar_translation(), None, limits(usize::MAX, Some(1))).unwrap();
    let mut buf = Vec::new();
    m.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,mu_k,tag_x1,tag_x2,tag_y1,tag_y2");
    assert_eq!(lines.len(), 9);
    assert_eq!(lines[1].split(',').count(), 6);
}
