use proptest::prelude::*;
use rtn_core::closed_form::*;
use rtn_core::Error;

fn obc(n: usize, d: usize, chi: usize, k: usize) -> EnsembleParams {
    EnsembleParams::chain(n, d, chi, k, Boundary::Obc).unwrap()
}

fn pbc(n: usize, d: usize, chi: usize, k: usize) -> EnsembleParams {
    EnsembleParams::chain(n, d, chi, k, Boundary::Pbc).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

// Direct product formula, no logs.
fn haar_direct(dim: f64, k: usize) -> f64 {
    let fact: f64 = (1..=k).map(|j| j as f64).product();
    let rising: f64 = (0..k).map(|j| dim + j as f64).product();
    dim * fact / rising
}

#[test]
fn haar_values() {
    assert_eq!(haar_ipr(2, 5, 1).value(), 1.0);
    assert!(rel(haar_ipr(2, 1, 2).value(), 2.0 / 3.0) < 1e-14);
    assert!(rel(haar_ipr(2, 3, 2).value(), 2.0 / 9.0) < 1e-14);
    assert!(rel(haar_fp(2, 4, 1).value(), 1.0 / 16.0) < 1e-14);
    assert!(rel(haar_fp(2, 1, 2).value(), 1.0 / 3.0) < 1e-14);
    for d in 2..=3 {
        for n in 1..=8 {
            for k in 1..=4 {
                let dim = (d as f64).powi(n as i32);
                let ipr = haar_ipr(d, n, k);
                assert!(rel(ipr.value(), haar_direct(dim, k)) < 1e-12);
                assert!((haar_fp(d, n, k).ln + dim.ln() - ipr.ln).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn haar_survives_huge_dimension() {
    let v = haar_ipr(2, 2000, 3);
    // D * 6 / (D (D+1) (D+2)) = 6 / D² to double precision
    assert!(v.ln.is_finite());
    assert!((v.ln + 2.0 * ln_dim(2, 2000) - 6f64.ln()).abs() < 1e-9);
}

#[test]
fn obc_examples() {
    assert!(rel(rmps_ipr_obc(&obc(3, 2, 2, 2), false).unwrap().value(), 0.24) < 1e-13);
    for (n, d, chi) in [(4, 2, 2), (6, 3, 9), (10, 2, 8)] {
        assert!((rmps_ipr_obc(&obc(n, d, chi, 1), false).unwrap().ln).abs() < 1e-14);
    }
}

#[test]
fn obc_direct_product() {
    // N=5, d=2, χ=4 (r=2), k=3, written out by hand
    let (chi, d) = (4.0f64, 2.0f64);
    let ratio = (chi + 1.0) * (chi + 2.0) / (d * (d * chi + 1.0) * (d * chi + 2.0));
    let want = 32.0 * ratio.powi(2) * 6.0 / (8.0 * 9.0 * 10.0);
    assert!(rel(rmps_ipr_obc(&obc(5, 2, 4, 3), false).unwrap().value(), want) < 1e-13);
}

#[test]
fn obc_haar_endpoint() {
    for d in 2..=3usize {
        for n in 1..=6usize {
            let chi = d.pow(n as u32 - 1);
            for k in 1..=4 {
                let v = rmps_ipr_obc(&obc(n, d, chi, k), false).unwrap();
                assert!(rel(v.value(), haar_ipr(d, n, k).value()) < 1e-12, "d={d} n={n} k={k}");
            }
        }
    }
}

#[test]
fn obc_domain_errors() {
    assert!(matches!(rmps_ipr_obc(&obc(3, 2, 8, 2), false), Err(Error::Domain(_))));
    assert!(matches!(rmps_ipr_obc(&obc(8, 2, 3, 2), false), Err(Error::Domain(_))));
    let cont = rmps_ipr_obc(&obc(8, 2, 3, 2), true).unwrap();
    let lo = rmps_ipr_obc(&obc(8, 2, 2, 2), false).unwrap();
    let hi = rmps_ipr_obc(&obc(8, 2, 4, 2), false).unwrap();
    assert!(cont.value() < lo.value() && cont.value() > hi.value());
    assert!(rmps_ipr_obc(&pbc(4, 2, 2, 2), false).is_err());
}

#[test]
fn obc_is_monotone_in_chi() {
    for d in 2..=3usize {
        for k in 2..=4 {
            let n = 9;
            let mut prev = f64::INFINITY;
            let mut chi = 1;
            while chi <= d.pow(n as u32 - 1) {
                let v = rmps_ipr_obc(&obc(n, d, chi, k), false).unwrap().value();
                assert!(v <= prev * (1.0 + 1e-14));
                prev = v;
                chi *= d;
            }
        }
    }
}

#[test]
fn leading_correction() {
    let p = obc(10, 2, 100, 2);
    let ratio = rmps_ipr_leading(&p).ratio_to(haar_ipr(2, 10, 2));
    assert!((ratio - 1.005f64.powi(10)).abs() < 1e-12);
    assert!((ratio - 1.05114).abs() < 1e-5);
    assert_eq!(rmps_ipr_leading(&p.with_k(1)).ln, haar_ipr(2, 10, 1).ln);
}

#[test]
fn leading_correction_misses_only_the_edge_sites() {
    // The leading form counts N bulk sites, the exact one N - r - 1, so
    // the two differ by about (r+1) k(k-1)/(4χ) at d=2 once χ > N.
    for n in [8usize, 16, 32, 64] {
        for r in (n.ilog2() as usize + 1)..(n - 1).min(14) {
            for k in 2..=3 {
                let p = obc(n, 2, 1 << r, k);
                let exact = rmps_ipr_obc(&p, false).unwrap();
                let gap = rmps_ipr_leading(&p).ratio_to(exact) - 1.0;
                let edge = (r + 1) as f64 * (k * (k - 1)) as f64 / (4.0 * p.chi as f64);
                assert!(gap > 0.0 && gap <= 2.0 * edge, "n={n} r={r} k={k} gap={gap} edge={edge}");
            }
        }
    }
}

#[test]
fn scaling_ratio_values() {
    assert_eq!(scaling_ratio(3.0, 1), 1.0);
    assert!((scaling_ratio(1.0, 2) - std::f64::consts::E).abs() < 1e-12);
    assert!((scaling_ratio(2.0, 3) - 4.481689).abs() < 1e-6);
}

#[test]
fn scaling_limit_gap_shrinks_with_n() {
    for k in 2..=3 {
        for gamma in [1.0, 2.0] {
            let mut prev = f64::INFINITY;
            for n in [8usize, 16, 32, 64] {
                let chi = (n as f64 * gamma / 2.0) as usize;
                let r = rmps_ipr_obc(&obc(n, 2, chi, k), false).unwrap().ratio_to(haar_ipr(2, n, k));
                let gap = (r - scaling_ratio(gamma, k)).abs();
                assert!(gap < prev, "k={k} gamma={gamma} n={n}");
                prev = gap;
            }
        }
    }
}

#[test]
fn pbc_examples() {
    let want = 8.0 * ((6.0f64 / 20.0).powi(3) + (2.0f64 / 12.0).powi(3));
    let v = rmps_ipr_pbc(&pbc(3, 2, 2, 2)).unwrap().value();
    assert!(rel(v, want) < 1e-13);
    assert!((v - 0.253037).abs() < 1e-6);
    for (n, d, chi) in [(3, 2, 2), (7, 3, 4), (12, 2, 1)] {
        assert!(rmps_ipr_pbc(&pbc(n, d, chi, 1)).unwrap().ln.abs() < 1e-14);
    }
    assert!(rmps_ipr_pbc(&obc(3, 2, 2, 2)).is_err());
}

#[test]
fn chi_one_triple_point() {
    for d in 2..=3 {
        for n in 1..=10 {
            for k in 1..=4 {
                let a = rmps_ipr_obc(&obc(n, d, 1, k), false).unwrap().value();
                let b = rmps_ipr_pbc(&pbc(n, d, 1, k)).unwrap().value();
                let c = rps_ipr(n, d, k).value();
                assert!(rel(a, c) < 1e-12 && rel(b, c) < 1e-12, "d={d} n={n} k={k}");
            }
        }
    }
}

#[test]
fn product_state_values() {
    assert!((rps_ipr(7, 3, 1).value() - 1.0).abs() < 1e-14);
    assert!(rel(rps_ipr(2, 2, 2).value(), 4.0 / 9.0) < 1e-14);
    for n in 1..=10 {
        for k in 1..=4 {
            let want = 2f64.powi(n as i32) * ((k + 1) as f64).powi(-(n as i32));
            assert!(rel(rps_ipr(n, 2, k).value(), want) < 1e-12);
        }
    }
}

#[test]
fn fp_model_values() {
    assert_eq!(fp_scaling_model(16, 4.0, 1, 0.6), 1.0);
    assert!((fp_scaling_model(16, 4.0, 2, 0.6) - 1.0375f64.powi(16)).abs() < 1e-12);
    assert!((fp_scaling_model(16, 4.0, 2, 0.6) - 1.8022).abs() < 1e-4);
}

#[test]
fn lognormal_parameters() {
    let (mu, s2) = rps_lognormal_params(2);
    assert!((mu - (2f64.ln() - 1.0)).abs() < 1e-15);
    assert!((mu + 0.306853).abs() < 1e-6);
    assert_eq!(s2, 1.0);
    let (mu, s2) = rps_lognormal_params(3);
    assert!((mu + 0.401388).abs() < 1e-6);
    assert!((s2 - 1.25).abs() < 1e-15);
    let pi2_6 = std::f64::consts::PI.powi(2) / 6.0;
    for d in 2..40 {
        let (_, s2) = rps_lognormal_params(d);
        assert!(s2 > 0.0);
        assert!((s2 - (pi2_6 - trigamma_int(d))).abs() < 1e-14);
    }
}

#[test]
fn params_validation() {
    assert!(EnsembleParams::chain(0, 2, 1, 1, Boundary::Obc).is_err());
    assert!(EnsembleParams::chain(4, 1, 1, 1, Boundary::Obc).is_err());
    assert!(EnsembleParams::chain(4, 2, 0, 1, Boundary::Obc).is_err());
    let sq = EnsembleParams::square(3, 2, 2, 2).unwrap();
    assert_eq!(sq.n, 9);
    assert_eq!(obc(6, 2, 8, 2).exact_r(), Some(3));
    assert_eq!(obc(6, 2, 6, 2).exact_r(), None);
}

proptest! {
    #[test]
    fn k1_is_normalized(n in 1usize..40, d in 2usize..5, r in 0u32..6) {
        let chi = d.pow(r);
        prop_assume!((r as usize) < n);
        prop_assert!(rmps_ipr_obc(&obc(n, d, chi, 1), false).unwrap().ln.abs() < 1e-12);
        prop_assert!(rmps_ipr_pbc(&pbc(n, d, chi, 1)).unwrap().ln.abs() < 1e-12);
    }

    #[test]
    fn obc_lies_between_haar_and_product(n in 2usize..30, r in 0u32..5, k in 2usize..5) {
        prop_assume!((r as usize) < n);
        let v = rmps_ipr_obc(&obc(n, 2, 1 << r, k), false).unwrap().ln;
        prop_assert!(v >= haar_ipr(2, n, k).ln - 1e-10);
        prop_assert!(v <= rps_ipr(n, 2, k).ln + 1e-10);
    }
}
