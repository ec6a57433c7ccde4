//! Oracle tests for the grid, field, and truncated-series layers.
//!
//! Each numerical routine is checked against an independently coded
//! reference: symbolic derivatives for the spectral differentiation, a naive
//! double-loop convolution for series products, a geometric (Neumann) series
//! for the metric inverse, and hand-expanded compositional inverses.

use apekit_core::grid::{ScalarField, SymTensorField, TorusGrid};
use apekit_core::series::{ScalarSeries, TensorSeries};
use nalgebra::DMatrix;
use proptest::prelude::*;
use std::f64::consts::PI;

fn grid2(samples: usize) -> TorusGrid {
    TorusGrid::new(&[2.0 * PI, 1.0], samples).unwrap()
}

#[test]
fn spectral_derivative_matches_symbolic_product_rule() {
    let g = grid2(32);
    let (l0, l1) = (g.periods()[0], g.periods()[1]);
    let f = ScalarField::from_fn(&g, |y| (2.0 * PI * y[0] / l0).sin());
    let h = ScalarField::from_fn(&g, |y| (4.0 * PI * y[1] / l1).cos());
    let fh = f.mul(&h).unwrap();

    // Independent symbolic derivative of the product.
    let oracle = ScalarField::from_fn(&g, |y| {
        let (a, b) = (2.0 * PI * y[0] / l0, 4.0 * PI * y[1] / l1);
        (2.0 * PI / l0) * a.cos() * b.cos()
    });
    let d0 = fh.spectral_derivative(0).unwrap();
    assert!(d0.approx_eq(&oracle, 1e-11), "d/dy0 of product");

    let oracle1 = ScalarField::from_fn(&g, |y| {
        let (a, b) = (2.0 * PI * y[0] / l0, 4.0 * PI * y[1] / l1);
        -(4.0 * PI / l1) * a.sin() * b.sin()
    });
    let d1 = fh.spectral_derivative(1).unwrap();
    assert!(d1.approx_eq(&oracle1, 1e-11), "d/dy1 of product");

    // Product rule holds for the computed derivatives themselves.
    let lhs = fh.spectral_derivative(0).unwrap();
    let rhs = f
        .spectral_derivative(0)
        .unwrap()
        .mul(&h)
        .unwrap()
        .add(&f.mul(&h.spectral_derivative(0).unwrap()).unwrap())
        .unwrap();
    assert!(lhs.approx_eq(&rhs, 1e-11));
}

#[test]
fn uniform_fields_differentiate_to_exact_zero() {
    let g = grid2(8);
    let c = ScalarField::uniform(&g, 7.25);
    let d = c.spectral_derivative(0).unwrap();
    assert_eq!(d.max_abs(), 0.0);
    assert!(d.is_uniform());
}

#[test]
fn derivative_of_nonsmooth_data_stays_finite_and_periodic_modes_are_exact() {
    // A single resolved Fourier mode must differentiate to round-off.
    let g = TorusGrid::new(&[3.0], 16).unwrap();
    let l = g.periods()[0];
    let f = ScalarField::from_fn(&g, |y| (2.0 * PI * 5.0 * y[0] / l).sin());
    let d = f.spectral_derivative(0).unwrap();
    let oracle = ScalarField::from_fn(&g, |y| (2.0 * PI * 5.0 / l) * (2.0 * PI * 5.0 * y[0] / l).cos());
    assert!(d.approx_eq(&oracle, 1e-11));
}

#[test]
fn integrate_uses_torus_volume() {
    let g = TorusGrid::new(&[2.0, 5.0], 8).unwrap();
    assert_eq!(ScalarField::uniform(&g, 3.0).integrate(), 30.0);
    // A pure mode integrates to zero on the periodic grid.
    let f = ScalarField::from_fn(&g, |y| (2.0 * PI * y[0] / 2.0).cos());
    assert!(f.integrate().abs() < 1e-12);
    // sin^2 integrates to half the volume.
    let s2 = ScalarField::from_fn(&g, |y| (2.0 * PI * y[1] / 5.0).sin().powi(2));
    assert!((s2.integrate() - 5.0).abs() < 1e-12);
}

#[test]
fn grid_validation_rejects_bad_inputs() {
    assert!(TorusGrid::new(&[], 8).is_err());
    assert!(TorusGrid::new(&[1.0], 7).is_err());
    assert!(TorusGrid::new(&[1.0], 2).is_err());
    assert!(TorusGrid::new(&[0.0], 8).is_err());
    let g = grid2(8);
    let f = ScalarField::uniform(&g, 1.0);
    assert!(f.spectral_derivative(2).is_err());
    let other = TorusGrid::new(&[1.0, 1.0], 8).unwrap();
    assert!(f.add(&ScalarField::uniform(&other, 1.0)).is_err());
}

/// Naive reference convolution on raw coefficient vectors.
fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let k = a.len().min(b.len());
    let mut out = vec![0.0; k];
    for (m, slot) in out.iter_mut().enumerate() {
        for i in 0..=m {
            *slot += a[i] * b[m - i];
        }
    }
    out
}

#[test]
fn series_multiply_matches_convolution_oracle() {
    let g = TorusGrid::new(&[1.0], 4).unwrap();
    let a = [1.0, -0.5, 0.25, 3.0, -2.0, 0.125];
    let b = [2.0, 1.0, -1.0, 0.5, 4.0, -0.75];
    let sa = ScalarSeries::from_uniform_coeffs(&g, &a);
    let sb = ScalarSeries::from_uniform_coeffs(&g, &b);
    let prod = sa.mul(&sb).unwrap();
    let oracle = convolve(&a, &b);
    for (k, want) in oracle.iter().enumerate() {
        assert!(
            (prod.coeff(k).value_at(0) - want).abs() < 1e-14,
            "order {k}"
        );
    }
    // Truncation drops to the shorter operand.
    let short = ScalarSeries::from_uniform_coeffs(&g, &b[..3]);
    assert_eq!(sa.mul(&short).unwrap().truncation(), 2);
}

#[test]
fn series_reciprocal_and_exp_are_inverse_structures() {
    let g = TorusGrid::new(&[1.0], 4).unwrap();
    let f = ScalarSeries::from_uniform_coeffs(&g, &[2.0, -1.0, 0.5, 0.25, -0.125, 1.0, 0.5]);
    let r = f.reciprocal().unwrap();
    let one = f.mul(&r).unwrap();
    assert!((one.coeff(0).value_at(0) - 1.0).abs() < 1e-14);
    for k in 1..=one.truncation() {
        assert!(one.coeff(k).max_abs() < 1e-13, "order {k}");
    }

    // exp(t) * exp(-t) = 1
    let t = ScalarSeries::from_uniform_coeffs(&g, &[0.3, 1.0, -0.5, 0.2, 0.1, -0.05, 0.01]);
    let e = t.exp().unwrap();
    let em = t.scale(-1.0).exp().unwrap();
    let prod = e.mul(&em).unwrap();
    assert!((prod.coeff(0).value_at(0) - 1.0).abs() < 1e-13);
    for k in 1..=prod.truncation() {
        assert!(prod.coeff(k).max_abs() < 1e-12, "order {k}");
    }
    // Constant term exponentiates pointwise.
    assert!((e.coeff(0).value_at(0) - 0.3f64.exp()).abs() < 1e-15);
}

#[test]
fn metric_inverse_matches_neumann_series_oracle() {
    let g = TorusGrid::new(&[1.0, 1.0], 4).unwrap();
    let s = DMatrix::from_row_slice(2, 2, &[0.3, -0.1, -0.1, 0.2]);
    let id = DMatrix::identity(2, 2);

    // h = id + x^2 s, inverse = id - x^2 s + x^4 s^2 - x^6 s^3 ...
    let mut h = TensorSeries::zero(&g, 6);
    h.set_coeff(0, SymTensorField::identity(&g)).unwrap();
    h.set_coeff(2, SymTensorField::uniform(&g, s.clone()).unwrap())
        .unwrap();
    let inv = h.metric_inverse().unwrap();

    let powers = [
        id.clone(),
        &s * 1.0,
        &s * &s,
        &(&s * &s) * &s,
    ];
    for (k, want) in [(0usize, 0usize), (2, 1), (4, 2), (6, 3)] {
        let sign = if want % 2 == 0 { 1.0 } else { -1.0 };
        let expect = &powers[want] * sign;
        let got = inv.coeff(k).value_at(0);
        assert!((got - &expect).iter().all(|e| e.abs() < 1e-13), "order {k}");
    }
    for k in [1usize, 3, 5] {
        assert!(inv.coeff(k).sup_norm() < 1e-14);
    }

    // Residual oracle: h * h^{-1} = identity through the truncation.
    let prod = h.matmul_series(&inv).unwrap();
    assert!((prod.coeff(0).value_at(0) - &id).iter().all(|e| e.abs() < 1e-14));
    for k in 1..=prod.truncation() {
        assert!(prod.coeff(k).sup_norm() < 1e-13, "order {k}");
    }
}

#[test]
fn metric_inverse_rejects_singular_leading_coefficient() {
    let g = TorusGrid::new(&[1.0], 4).unwrap();
    let mut h = TensorSeries::zero(&g, 2);
    h.set_coeff(0, SymTensorField::uniform(&g, DMatrix::zeros(1, 1)).unwrap())
        .unwrap();
    assert!(h.metric_inverse().is_err());
}

#[test]
fn compose_matches_hand_expanded_geometric_series() {
    let g = TorusGrid::new(&[1.0], 4).unwrap();
    // f = x + x^2 + ... (x/(1-x)); inverse is x - x^2 + x^3 - ... (x/(1+x)).
    let k = 8;
    let f = ScalarSeries::from_uniform_coeffs(&g, &{
        let mut v = vec![0.0; k + 1];
        v[1..].fill(1.0);
        v
    });
    let inv = f.compositional_inverse().unwrap();
    for j in 1..=k {
        let want = if j % 2 == 1 { 1.0 } else { -1.0 };
        assert!(
            (inv.coeff(j).value_at(0) - want).abs() < 1e-12,
            "order {j}: {}",
            inv.coeff(j).value_at(0)
        );
    }
    // Round trip both ways.
    let id = ScalarSeries::identity(&g, k);
    let fwd = f.compose(&inv).unwrap();
    let bwd = inv.compose(&f).unwrap();
    for j in 0..=k {
        let want = if j == 1 { 1.0 } else { 0.0 };
        assert!((fwd.coeff(j).value_at(0) - want).abs() < 1e-12);
        assert!((bwd.coeff(j).value_at(0) - want).abs() < 1e-12);
    }
    assert!(fwd.approx_eq(&id, 1e-12));
}

#[test]
fn compose_requires_zero_constant_and_tangency() {
    let g = TorusGrid::new(&[1.0], 4).unwrap();
    let f = ScalarSeries::from_uniform_coeffs(&g, &[0.0, 1.0, 2.0]);
    let bad_const = ScalarSeries::from_uniform_coeffs(&g, &[0.5, 1.0, 0.0]);
    assert!(f.compose(&bad_const).is_err());
    let bad_lin = ScalarSeries::from_uniform_coeffs(&g, &[0.0, 2.0, 0.0]);
    assert!(f.compose(&bad_lin).is_err());
    assert!(bad_lin.compositional_inverse().is_err());
}

#[test]
fn div_x_pow_flags_uncancelled_low_orders() {
    let g = TorusGrid::new(&[1.0], 4).unwrap();
    let ok = ScalarSeries::from_uniform_coeffs(&g, &[0.0, 0.0, 3.0, 1.0]);
    let shifted = ok.div_x_pow(2).unwrap();
    assert_eq!(shifted.truncation(), 1);
    assert!((shifted.coeff(0).value_at(0) - 3.0).abs() < 1e-15);

    let bad = ScalarSeries::from_uniform_coeffs(&g, &[0.0, 1e-3, 3.0, 1.0]);
    assert!(bad.div_x_pow(2).is_err());
}

#[test]
fn tensor_scalar_products_and_traces() {
    let g = TorusGrid::new(&[1.0, 1.0], 4).unwrap();
    let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, -1.0]);
    let b = DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 1.5]);
    let mut t = TensorSeries::zero(&g, 3);
    t.set_coeff(1, SymTensorField::uniform(&g, a.clone()).unwrap())
        .unwrap();
    t.set_coeff(2, SymTensorField::uniform(&g, b.clone()).unwrap())
        .unwrap();

    let s = ScalarSeries::from_uniform_coeffs(&g, &[2.0, 0.0, -1.0, 0.0]);
    let ts = t.mul_scalar_series(&s).unwrap();
    // (a x + b x^2) * (2 - x^2) = 2a x + 2b x^2 - a x^3 ...
    assert!((ts.coeff(1).value_at(0) - &(&a * 2.0)).iter().all(|e| e.abs() < 1e-14));
    assert!((ts.coeff(2).value_at(0) - &(&b * 2.0)).iter().all(|e| e.abs() < 1e-14));
    assert!((ts.coeff(3).value_at(0) - &(&a * -1.0)).iter().all(|e| e.abs() < 1e-14));

    let tt = t.matmul_series(&t).unwrap();
    // coefficient at x^2 is a*a; at x^3 is a*b + b*a
    assert!((tt.coeff(2).value_at(0) - &(&a * &a)).iter().all(|e| e.abs() < 1e-14));
    let ab_ba = &a * &b + &b * &a;
    assert!((tt.coeff(3).value_at(0) - &ab_ba).iter().all(|e| e.abs() < 1e-14));

    let tr = tt.trace_series();
    assert!((tr.coeff(2).value_at(0) - (&a * &a).trace()).abs() < 1e-14);
}

#[test]
fn serialization_round_trips_exactly() {
    let g = TorusGrid::new(&[2.0 * PI, 1.5], 4).unwrap();
    let f = ScalarField::from_fn(&g, |y| (y[0] * 1.7).sin() * (y[1] * 0.3).cos() + PI);
    let series = ScalarSeries::new(&g, vec![f.clone(), f.scale(1.0 / 3.0)]).unwrap();
    let text = serde_json::to_string(&series.to_json()).unwrap();
    let parsed: apekit_core::series::SeriesJson = serde_json::from_str(&text).unwrap();
    let back = ScalarSeries::from_json(&parsed).unwrap();
    for k in 0..=1 {
        for node in 0..g.node_count() {
            // Bitwise identical after the round trip.
            assert_eq!(
                series.coeff(k).value_at(node),
                back.coeff(k).value_at(node)
            );
        }
    }

    let t = TensorSeries::new(
        &g,
        vec![
            SymTensorField::from_fn(&g, |y| {
                DMatrix::from_row_slice(2, 2, &[1.0 + y[0], y[1], y[1], 2.0 - y[0] / 7.0])
            })
            .unwrap(),
        ],
    )
    .unwrap();
    let text = serde_json::to_string(&t.to_json()).unwrap();
    let parsed: apekit_core::series::SeriesJson = serde_json::from_str(&text).unwrap();
    let back = TensorSeries::from_json(&parsed).unwrap();
    for node in 0..g.node_count() {
        assert_eq!(t.coeff(0).value_at(node), back.coeff(0).value_at(node));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn series_product_commutes_and_distributes(
        a in proptest::collection::vec(-3.0f64..3.0, 5),
        b in proptest::collection::vec(-3.0f64..3.0, 5),
        c in proptest::collection::vec(-3.0f64..3.0, 5),
    ) {
        let g = TorusGrid::new(&[1.0], 4).unwrap();
        let sa = ScalarSeries::from_uniform_coeffs(&g, &a);
        let sb = ScalarSeries::from_uniform_coeffs(&g, &b);
        let sc = ScalarSeries::from_uniform_coeffs(&g, &c);
        let ab = sa.mul(&sb).unwrap();
        let ba = sb.mul(&sa).unwrap();
        prop_assert!(ab.approx_eq(&ba, 1e-12));
        let lhs = sa.mul(&sb.add(&sc).unwrap()).unwrap();
        let rhs = sa.mul(&sb).unwrap().add(&sa.mul(&sc).unwrap()).unwrap();
        prop_assert!(lhs.approx_eq(&rhs, 1e-11));
    }

    #[test]
    fn derivative_satisfies_product_rule_in_series_ring(
        a in proptest::collection::vec(-2.0f64..2.0, 6),
        b in proptest::collection::vec(-2.0f64..2.0, 6),
    ) {
        let g = TorusGrid::new(&[1.0], 4).unwrap();
        let sa = ScalarSeries::from_uniform_coeffs(&g, &a);
        let sb = ScalarSeries::from_uniform_coeffs(&g, &b);
        let lhs = sa.mul(&sb).unwrap().derivative_x().unwrap();
        let rhs = sa.derivative_x().unwrap().mul(&sb).unwrap()
            .add(&sa.mul(&sb.derivative_x().unwrap()).unwrap()).unwrap();
        // Product rule holds through the shared truncation.
        for k in 0..=rhs.truncation().min(lhs.truncation()) {
            prop_assert!((lhs.coeff(k).value_at(0) - rhs.coeff(k).value_at(0)).abs() < 1e-11);
        }
    }

    #[test]
    fn compositional_inverse_round_trips(
        tail in proptest::collection::vec(-0.8f64..0.8, 4),
    ) {
        let g = TorusGrid::new(&[1.0], 4).unwrap();
        let mut coeffs = vec![0.0, 1.0];
        coeffs.extend(tail);
        let f = ScalarSeries::from_uniform_coeffs(&g, &coeffs);
        let inv = f.compositional_inverse().unwrap();
        let round = f.compose(&inv).unwrap();
        let id = ScalarSeries::identity(&g, f.truncation());
        prop_assert!(round.approx_eq(&id, 1e-9));
    }
}
