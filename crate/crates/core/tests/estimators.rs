use fim_core::estimators::{log_likelihood, mle, MleOptions, SufficientStats};
use fim_core::process::{window_distribution, FiniteMarkovModel};
use fim_core::sampling::sample_finite;
use proptest::prelude::*;

/// Log-likelihood by walking the sequence: the exact law of the first
/// `order` symbols times every conditional.
fn direct(symbols: &[usize], m: &FiniteMarkovModel) -> f64 {
    let k = m.order();
    let head = window_distribution(m, k).unwrap().prob(&symbols[..k]).ln();
    head + (k..symbols.len()).map(|i| m.conditional(&symbols[i - k..i], symbols[i]).ln()).sum::<f64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn window_counts_reproduce_the_likelihood(
        name in prop_oneof![Just("toy-sub"), Just("toy-super"), Just("order-two"), Just("iid-bernoulli")],
        true_theta in 0.1..0.9f64,
        eval_theta in 0.1..0.9f64,
        len in 3usize..400,
        seed in any::<u64>(),
    ) {
        let truth = FiniteMarkovModel::builtin(name, &[true_theta]).unwrap();
        let s = sample_finite(&truth, len, seed).unwrap();
        let s = s.symbols().unwrap();
        let m = truth.with_theta(&[eval_theta]).unwrap();
        let stats = SufficientStats::from_symbols(s, m.alphabet(), m.order()).unwrap();
        let ll = log_likelihood(&stats, &m).unwrap().full;
        let want = direct(s, &m);
        prop_assert!((ll - want).abs() <= 1e-9 * want.abs().max(1.0), "{ll} vs {want}");
    }
}

#[test]
fn mle_maximizes_the_likelihood() {
    let truth = FiniteMarkovModel::builtin("toy-super", &[0.7]).unwrap();
    let s = sample_finite(&truth, 5000, 9).unwrap();
    let s = s.symbols().unwrap();
    let stats = SufficientStats::from_symbols(s, truth.alphabet(), 1).unwrap();
    let hat = mle(&stats, &truth, None, MleOptions::default()).unwrap();
    let ll = |t: f64| log_likelihood(&stats, &truth.with_theta(&[t]).unwrap()).unwrap().full;
    for t in (1..100).map(|i| i as f64 / 100.0) {
        assert!(ll(hat) >= ll(t) - 1e-9, "theta {t} beats the MLE {hat}");
    }
    assert!((hat - 0.7).abs() < 0.1);
}
