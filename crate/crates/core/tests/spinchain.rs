use fim_core::spinchain::{
    marginal, marginal_block_route, specific_heat, thermal_scheme, thermometry_report, SpinChainModel,
};
use proptest::prelude::*;

const RING: usize = 18;

/// Exact Gibbs averages on a periodic ring, with temperature derivatives
/// from `dP(A)/dT = (<1_A H> - P(A) <H>) / T^2`.
struct Ring {
    p1: [f64; 2],
    dp1: [f64; 2],
    p12: [f64; 4],
    dp12: [f64; 4],
    c: f64,
}

fn ring(b: f64, couplings: &[f64], t: f64) -> Ring {
    let mut z = 0.0;
    let mut eh = 0.0;
    let mut eh2 = 0.0;
    let mut a1 = [0.0; 2];
    let mut h1 = [0.0; 2];
    let mut a12 = [0.0; 4];
    let mut h12 = [0.0; 4];
    let energies: Vec<f64> = (0..1usize << RING)
        .map(|cfg| {
            let s = |i: usize| if cfg >> (i % RING) & 1 == 0 { 1.0 } else { -1.0 };
            let mut e = 0.0;
            for i in 0..RING {
                e -= b * s(i);
                for (k, j) in couplings.iter().enumerate() {
                    e -= j * s(i) * s(i + k + 1);
                }
            }
            e
        })
        .collect();
    let e0 = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    for (cfg, e) in energies.iter().enumerate() {
        let w = (-(e - e0) / t).exp();
        z += w;
        eh += w * e;
        eh2 += w * e * e;
        let s1 = cfg & 1;
        let s2 = cfg >> 1 & 1;
        a1[s1] += w;
        h1[s1] += w * e;
        a12[2 * s1 + s2] += w;
        h12[2 * s1 + s2] += w * e;
    }
    let mean = eh / z;
    let t2 = t * t;
    let deriv = |a: f64, h: f64| (h / z - a / z * mean) / t2;
    Ring {
        p1: [a1[0] / z, a1[1] / z],
        dp1: [deriv(a1[0], h1[0]), deriv(a1[1], h1[1])],
        p12: a12.map(|a| a / z),
        dp12: [0, 1, 2, 3].map(|i| deriv(a12[i], h12[i])),
        c: (eh2 / z - mean * mean) / (RING as f64 * t2),
    }
}

fn fisher(p: &[f64], dp: &[f64]) -> f64 {
    p.iter().zip(dp).map(|(p, d)| d * d / p).sum()
}

#[test]
fn transfer_matrix_matches_periodic_ring() {
    let cases: [(f64, Vec<f64>, f64); 5] = [
        (0.5, vec![1.0], 1.0),
        (0.5, vec![-1.0], 3.0),
        (2.0, vec![0.3], 0.8),
        (1.0, vec![-2.0, -1.0], 4.0),
        (0.4, vec![0.5, 0.25], 1.2),
    ];
    for (b, js, t) in cases {
        let m = SpinChainModel::new(b, &js, t).unwrap();
        let r = ring(b, &js, t);
        let rep = thermometry_report(&m, thermal_scheme()).unwrap();
        let f1 = fisher(&r.p1, &r.dp1);
        let f12 = fisher(&r.p12, &r.dp12);
        assert!((rep.f1 - f1).abs() < 1e-3 * f1, "{b} {js:?} {t}: F1 {} vs ring {f1}", rep.f1);
        assert!((rep.f12 - f12).abs() < 1e-3 * f12, "{b} {js:?} {t}: F12 {} vs ring {f12}", rep.f12);
        assert!((rep.c - r.c).abs() < 1e-3 * r.c, "{b} {js:?} {t}: c {} vs ring {}", rep.c, r.c);
        let p2 = marginal(&m, 2).unwrap();
        for (a, q) in p2.probs().iter().zip(&r.p12) {
            assert!((a - q).abs() < 1e-5, "{b} {js:?} {t}: {a} vs ring {q}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn marginals_are_consistent(b in -2.0..2.0f64, j in -2.0..2.0f64, alpha in -1.0..1.0f64, t in 0.5..5.0f64) {
        let m = SpinChainModel::nnn(b, j, alpha, t).unwrap();
        let w4 = marginal(&m, 4).unwrap();
        let w3 = marginal(&m, 3).unwrap();
        prop_assert!(w4.marginalize_last().max_abs_diff(&w3) < 1e-13);
        prop_assert!(w4.marginalize_first().max_abs_diff(&w3) < 1e-13);
        prop_assert!(marginal_block_route(&m, 3).unwrap().max_abs_diff(&w3) < 1e-10);
        prop_assert!((w4.total() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn thermal_information_is_monotone(b in -2.0..2.0f64, j in -2.0..2.0f64, t in 0.3..5.0f64) {
        let m = SpinChainModel::nearest(b, j, t).unwrap();
        let r = thermometry_report(&m, thermal_scheme()).unwrap();
        prop_assert!(r.f1 >= 0.0);
        prop_assert!(r.f12 >= r.f1 * (1.0 - 1e-9));
        prop_assert!(r.f >= 0.0);
        let c = specific_heat(&m, thermal_scheme()).unwrap();
        prop_assert!((c.c_over_t2 - r.f).abs() <= 1e-6 * r.f.max(1e-300));
    }
}
