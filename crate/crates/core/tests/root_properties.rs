use indstab::contour::{winding_zero_count, ComplexFn, ContourSpec};
use indstab::cpoly::{evaluate_trinomial, DensePolynomial, Precision};
use indstab::graphs::TrinomialSpec;
use indstab::roots::{all_roots_dense, match_root_multisets, trinomial_roots, SolverConfig};
use num_integer::Integer;
use std::sync::Arc;

#[test]
fn vieta_modulus_product() {
    let cfg = SolverConfig::default();
    for p in 2..=12u32 {
        for q in 1..p {
            let roots = trinomial_roots(&TrinomialSpec::new(p, q).unwrap(), &cfg).unwrap();
            assert!((roots.modulus_product() - 1.0).abs() < 1e-8, "{p},{q}");
            if p.gcd(&q) == 1 {
                let real_in_unit = roots
                    .roots()
                    .iter()
                    .any(|z| z.im.abs() < 1e-12 && z.re > 0.0 && z.re < 1.0);
                assert!(real_in_unit, "{p},{q}");
                assert!(roots.roots().iter().any(|z| z.norm() > 1.0));
            }
        }
    }
}

#[test]
fn conjugate_closed() {
    for precision in [Precision::Standard, Precision::Extended] {
        let cfg = SolverConfig::default().with_precision(precision);
        for n in 1..=60u32 {
            for m in 1..=n {
                let roots = trinomial_roots(&TrinomialSpec::new(n, m).unwrap(), &cfg).unwrap();
                assert_eq!(roots.len(), n as usize);
                assert!(roots.is_conjugate_closed(1e-9), "{n},{m} {precision}");
            }
        }
    }
}

#[test]
fn dense_and_structured_agree() {
    let cfg = SolverConfig::default();
    for n in 1..=60u32 {
        for m in (1..=n).step_by(if n > 20 { 7 } else { 1 }) {
            let t = TrinomialSpec::new(n, m).unwrap();
            let structured = trinomial_roots(&t, &cfg).unwrap();
            let dense_poly = DensePolynomial::from_int_polynomial(&t.to_int_polynomial(), Precision::Standard).unwrap();
            let dense = all_roots_dense(&dense_poly, &cfg).unwrap();
            let gap = match_root_multisets(structured.roots(), dense.roots()).unwrap();
            assert!(gap < 1e-8, "{n},{m}: {gap}");
        }
    }
}

#[test]
fn residuals_within_tolerance() {
    let cfg = SolverConfig::default();
    for (n, m) in [(22, 11), (300, 3), (206, 200), (150, 100), (97, 13)] {
        let t = TrinomialSpec::new(n, m).unwrap();
        let roots = trinomial_roots(&t, &cfg).unwrap();
        assert!(roots.max_residual() <= 1e-10);
        for z in roots.roots() {
            let v = evaluate_trinomial(&t, *z, Precision::Extended).value;
            let scale = z.norm().powi(n as i32) + z.norm().powi(m as i32) + 1.0;
            assert!(v.norm() / scale < 1e-10, "{n},{m} at {z}");
        }
    }
}

#[test]
fn winding_matches_degree() {
    let cfg = SolverConfig::default();
    for (n, m) in [(7, 6), (9, 1), (12, 8), (30, 15), (5, 5)] {
        let t = TrinomialSpec::new(n, m).unwrap();
        let roots = trinomial_roots(&t, &cfg).unwrap();
        let bound = roots
            .roots()
            .iter()
            .map(|z| z.re.abs().max(z.im.abs()))
            .fold(0.0, f64::max)
            + 0.25;
        let rect = ContourSpec::new(-bound, bound, -bound, bound, 512).unwrap();
        let func: ComplexFn = Arc::new(move |z| evaluate_trinomial(&t, z, Precision::Standard).value);
        assert_eq!(winding_zero_count(&func, &rect).unwrap(), n as i64, "{n},{m}");
        assert!(roots.roots().iter().all(|z| rect.strictly_contains(*z)));
    }
}

#[test]
fn gamma_encloses_small_cases() {
    // Φ(K_{6,7}) on γ, Φ(K_{1,9}) on γ
    for (n, m) in [(7u32, 6u32), (9, 1)] {
        let t = TrinomialSpec::new(n, m).unwrap();
        let func: ComplexFn = Arc::new(move |z| evaluate_trinomial(&t, z, Precision::Standard).value);
        assert_eq!(winding_zero_count(&func, &ContourSpec::gamma()).unwrap(), n as i64);
    }
}
