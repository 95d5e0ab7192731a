use fracspec::asymptotics::{analyze, order_of_infinitesimal, EigenvalueSequence};
use fracspec::fractal_geometry::{
    contraction_limit, cylinder_measure, exact_gaps_from_interval_ifs, parse_rational, Generation, LimitIfs,
    Similarity,
};
use fracspec::spectral_triples::{pair_triple, spectral_dimension, Enumeration, SpectralModel};
use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

/// `μ_n = exp(−f(log n))` with `f` piecewise linear: random slopes on random breakpoints.
fn piecewise_sequence(slopes: &[f64], lengths: &[f64], cap: usize) -> EigenvalueSequence {
    let slopes = slopes.to_vec();
    let lengths = lengths.to_vec();
    let f = move |t: f64| {
        let (mut acc, mut start) = (0.0, 0.0);
        let mut k = 0;
        loop {
            let len = lengths[k % lengths.len()];
            let s = slopes[k % slopes.len()];
            if t <= start + len {
                return acc + s * (t - start);
            }
            acc += s * len;
            start += len;
            k += 1;
        }
    };
    EigenvalueSequence::from_fn(move |n| (-f((n as f64).ln())).exp(), cap).unwrap()
}

fn line_ifs(ratios: &[f64], translations: &[f64]) -> LimitIfs {
    LimitIfs::line(ratios, translations).unwrap()
}

fn random_level(dim: usize) -> impl Strategy<Value = Vec<Similarity>> {
    prop::collection::vec((0.1f64..0.5, prop::collection::vec(-1.0f64..1.0, dim)), 2..4).prop_map(move |maps| {
        maps.into_iter()
            .map(|(r, t)| Similarity::new(r, DMatrix::identity(dim, dim), DVector::from_vec(t)).unwrap())
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn order_is_homogeneous(
        slopes in prop::collection::vec(0.5f64..3.0, 1..4),
        lengths in prop::collection::vec(0.5f64..3.0, 1..4),
        alpha in 0.25f64..4.0,
    ) {
        let seq = piecewise_sequence(&slopes, &lengths, 100_000);
        let a = order_of_infinitesimal(&seq).unwrap();
        let b = order_of_infinitesimal(&seq.power(alpha).unwrap()).unwrap();
        prop_assert!((b.value / (alpha * a.value) - 1.0).abs() < 1e-9);
        prop_assert!((b.interval.lo / (alpha * a.interval.lo) - 1.0).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn sandwich_on_synthetic_sequences(
        slopes in prop::collection::vec(0.5f64..3.0, 1..4),
        lengths in prop::collection::vec(0.5f64..3.0, 1..4),
    ) {
        let seq = piecewise_sequence(&slopes, &lengths, 200_000);
        let r = analyze(&seq).unwrap();
        prop_assert!(r.sandwich_holds(0.02), "{:?} {:?}", r.c_bounds, r.dimension_interval);
    }

    #[test]
    fn cylinder_weights_sum_to_one(
        levels in prop::collection::vec(prop::collection::vec(0.05f64..0.6, 1..4), 1..4),
        s in 0.2f64..1.5,
        depth in 1usize..7,
    ) {
        let gen: Vec<Vec<Similarity>> = levels
            .iter()
            .map(|l| l.iter().map(|&r| Similarity::line(r, 0.0).unwrap()).collect())
            .collect();
        let ifs = LimitIfs::new(Generation::Periodic(gen)).unwrap();
        let m = cylinder_measure(&ifs, s, depth, 1 << 20).unwrap();
        prop_assert!((m.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rational_gaps_are_conserved(
        parts in prop::collection::vec((1u32..20, 1u32..20), 2..4),
        depth in 1usize..6,
    ) {
        // maps of length a_i/Q separated by gaps b_i/Q, filling [0, 1]
        let q: u32 = parts.iter().map(|p| p.0).sum::<u32>() + parts[..parts.len() - 1].iter().map(|p| p.1).sum::<u32>();
        let mut at = 0;
        let mut maps = Vec::new();
        for (i, &(a, b)) in parts.iter().enumerate() {
            maps.push(Similarity::line_rational(&format!("{a}/{q}"), false, &format!("{at}/{q}")).unwrap());
            at += a;
            if i + 1 < parts.len() {
                at += b;
            }
        }
        let ifs = LimitIfs::stationary(maps).unwrap();
        let zero = BigRational::from_integer(BigInt::from(0));
        let one = parse_rational("1").unwrap();
        let g = exact_gaps_from_interval_ifs(&ifs, depth, &zero, &one, 1 << 20).unwrap();
        prop_assert!(g.conserved());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn contraction_bound_on_limit_specs(
        levels in prop::collection::vec(random_level(2), 6..9),
        seed in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2), 1..4),
    ) {
        let depth = levels.len();
        let ifs = LimitIfs::new(Generation::Explicit(levels)).unwrap();
        let r = contraction_limit(&ifs, &seed, depth, 1 << 24).unwrap();
        prop_assert!(r.bound_holds(1e-9), "{:?} vs {:?}", r.distances, r.bounds);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(5))]

    #[test]
    fn dimension_does_not_depend_on_seed(
        maps in prop::collection::vec((0.1f64..0.45, 0.0f64..1.0), 2..4),
        x in 0.0f64..1.0,
        y in 0.0f64..1.0,
    ) {
        prop_assume!((x - y).abs() > 0.05);
        let ratios: Vec<f64> = maps.iter().map(|m| m.0).collect();
        let translations: Vec<f64> = maps.iter().map(|m| m.1).collect();
        let ifs = line_ifs(&ratios, &translations);
        let limits = Enumeration { max_entries: 400_000, max_depth: None };
        let a = spectral_dimension(&pair_triple(&ifs, None, limits).unwrap()).unwrap();
        let b = spectral_dimension(&pair_triple(&ifs, Some((vec![x], vec![y])), limits).unwrap()).unwrap();
        let hull = a.interval.hi.max(b.interval.hi) - a.interval.lo.min(b.interval.lo);
        prop_assert!((a.value - b.value).abs() <= hull + 1e-12, "{:?} {:?}", a, b);
    }

    #[test]
    fn enumeration_matches_full_sort(
        ratios in prop::collection::vec(0.2f64..0.6, 2..4),
    ) {
        let translations = vec![0.0; ratios.len()];
        let ifs = line_ifs(&ratios, &translations);
        let limits = Enumeration { max_entries: 50_000, max_depth: None };
        let m = pair_triple(&ifs, Some((vec![0.0], vec![1.0])), limits).unwrap();
        let mu = m.eigen().to_vec();
        let cutoff = *mu.last().unwrap();
        // all word ratios ≥ cutoff, by exhaustive search
        let mut all = Vec::new();
        let mut stack = vec![1.0f64];
        while let Some(r) = stack.pop() {
            for &l in &ratios {
                let c = r * l;
                if c >= cutoff * (1.0 - 1e-12) {
                    all.push(c);
                    stack.push(c);
                }
            }
        }
        all.sort_by(|a, b| b.total_cmp(a));
        prop_assert!(all.len() >= mu.len() / 2);
        for k in 0..mu.len() / 2 {
            prop_assert!((mu[2 * k] / all[k] - 1.0).abs() < 1e-12);
            prop_assert_eq!(mu[2 * k], mu[2 * k + 1]);
        }
    }
}
