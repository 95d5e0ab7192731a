use fracspec::asymptotics::{
    c_bounds, eccentricity_scan, order_of_infinitesimal, LogProfile, SumKind, DEFAULT_DT,
};
use fracspec::exemplars::{s_ratio, sigma_ratio, Gaps, Profile, StepSpec, TwoSlopeSpec};

const CAP: usize = 1_000_000;

fn linear_gaps() -> TwoSlopeSpec {
    TwoSlopeSpec::new(2.0, 1.0, Gaps::Linear).unwrap()
}

#[test]
fn constant_gaps_bounds_coincide() {
    let seq = TwoSlopeSpec::new(2.0, 1.0, Gaps::Constant(1.0))
        .unwrap()
        .sequence(CAP)
        .unwrap();
    let c = c_bounds(&LogProfile::from_sequence(&seq, DEFAULT_DT).unwrap()).unwrap();
    assert!((c.lower - 2.0 / 3.0).abs() < 0.05, "{c:?}");
    assert!((c.upper - 2.0 / 3.0).abs() < 0.05, "{c:?}");
}

#[test]
fn linear_gaps_bounds_and_order() {
    let seq = linear_gaps().sequence(CAP).unwrap();
    let c = c_bounds(&LogProfile::from_sequence(&seq, DEFAULT_DT).unwrap()).unwrap();
    assert!((c.lower - 0.5).abs() < 0.05, "{c:?}");
    assert!((c.upper - 1.0).abs() < 0.05, "{c:?}");
    let ord = order_of_infinitesimal(&seq).unwrap();
    assert!((ord.value - 1.5).abs() < 0.05, "{ord:?}");
}

#[test]
fn step_bounds_degenerate() {
    let seq = StepSpec::power(2.0).unwrap().sequence(CAP).unwrap();
    let c = c_bounds(&LogProfile::from_sequence(&seq, DEFAULT_DT).unwrap()).unwrap();
    assert!(c.lower < 0.05, "{c:?}");
    assert!(c.upper.is_infinite());
    assert!(c.jump_dominated);
    // μ_{n+1}/μ_n at the jumps: x_{n}/x_{n+1}
    let v = seq.to_vec();
    let jumps: Vec<f64> = (1..v.len()).filter(|&i| v[i] < v[i - 1]).map(|i| v[i] / v[i - 1]).collect();
    assert_eq!(jumps.len(), 4);
    assert!(jumps.windows(2).all(|w| w[1] < w[0]));
    assert!(*jumps.last().unwrap() < 1e-3);
}

#[test]
fn step_power_two_eccentric_at_breaks() {
    let seq = StepSpec::power(2.0).unwrap().sequence(CAP).unwrap();
    let sq = seq.power(2.0).unwrap();
    let scan = eccentricity_scan(&sq, SumKind::TraceClass, 0.02).unwrap();
    assert!(scan.accepted.contains(&8103), "{:?}", scan.accepted);
    // s_{2x}/s_x = (1 − 2x_n/x_{n+1}) …, oracle from the block formula
    let spec = StepSpec::power(2.0).unwrap();
    let r = s_ratio(Profile::Step(&spec), 2.0, 2.0 * 8103.0, 2.0, None).unwrap();
    assert!((1.0 / r - 1.0).abs() < 2.0 * 2.0 * 8103.0 / 8886111.0);
}

fn trapezoid_sigma(spec: &TwoSlopeSpec, gamma: f64, x: f64) -> f64 {
    // ∫₁ˣ μ(y)^γ dy = ∫₀^{log x} e^{t − γ f(t)} dt on a fine uniform t-grid
    let t1 = x.ln();
    let m = 400_000;
    let h = t1 / m as f64;
    let g = |t: f64| (t - gamma * spec.f(t)).exp();
    let mut acc = 0.5 * (g(0.0) + g(t1));
    for k in 1..m {
        acc += g(k as f64 * h);
    }
    acc * h
}

#[test]
fn exact_sigma_matches_trapezoid() {
    for (spec, gamma) in [
        (linear_gaps(), 2.0 / 3.0),
        (linear_gaps(), 0.5),
        (TwoSlopeSpec::new(2.0, 1.0, Gaps::Constant(1.0)).unwrap(), 0.8),
        (TwoSlopeSpec::new(3.0, 0.5, Gaps::Custom(vec![0.5, 1.0, 2.5])).unwrap(), 0.7),
    ] {
        for x in [10.0, 1e3, 5e4] {
            let exact = spec.sigma(gamma, x).unwrap();
            let oracle = trapezoid_sigma(&spec, gamma, x);
            assert!((exact / oracle - 1.0).abs() < 1e-6, "{spec:?} {gamma} {x}: {exact} {oracle}");
        }
    }
}

fn x_at(spec: &TwoSlopeSpec, k: usize) -> f64 {
    spec.pieces(100.0).b[k].exp()
}

#[test]
fn sigma_ratio_tends_to_one_inside_interval() {
    let spec = linear_gaps();
    // x = x_{2n+1}: ratio − 1 shrinks with n, at the rate predicted for γ = 2/3 and γ = 1/2
    for gamma in [2.0 / 3.0, 0.5] {
        let gaps: Vec<f64> = [3usize, 5, 7]
            .iter()
            .map(|&k| sigma_ratio(Profile::TwoSlope(&spec), gamma, x_at(&spec, k), 2.0, None).unwrap() - 1.0)
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gamma}: {gaps:?}");
        if gamma == 0.5 {
            // 1/a_{2n+1} rate: the α piece has constant density, the next β piece
            // grows like e^{u/2}, so ratio − 1 ≈ 2(λ^{1−β/α} − 1)/(a_{2n+1} + 2)
            let predicted = 2.0 * (2f64.powf(0.5) - 1.0) / (7.0 + 2.0);
            assert!((gaps[2] / predicted - 1.0).abs() < 0.05, "{gaps:?} vs {predicted}");
        }
    }
}

#[test]
fn s_ratio_tends_to_one_at_upper_end() {
    let spec = linear_gaps();
    // γ = 1 = c̄, x = x_{2n−1}, rate (λ^{α/β−1} − 1)/a_{2n}
    let gaps: Vec<f64> = [3usize, 5, 7, 9]
        .iter()
        .map(|&k| s_ratio(Profile::TwoSlope(&spec), 1.0, x_at(&spec, k), 2.0, None).unwrap() - 1.0)
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    let predicted = (2.0 - 1.0) / 10.0;
    assert!((gaps[3] / predicted - 1.0).abs() < 0.5, "{gaps:?}");
}

#[test]
fn sequence_tail_matches_integral() {
    let spec = linear_gaps();
    let seq = spec.sequence(10_000).unwrap().power(0.8).unwrap();
    let tail = seq.closed_tail().unwrap();
    let integral = spec.s(0.8, 10_000.5).unwrap();
    assert_eq!(tail, integral);
    assert!(tail > 0.0);
}
