//! Matrix elements and kicked amplitudes checked against direct quadrature on
//! the sphere. Nothing here goes through the closed-form couplings.

use std::f64::consts::PI;

use num_complex::Complex64;
use orient_core::propagator::kick_operator_apply;
use orient_core::{build_cos2_theta, build_cos_theta, AngularBasis, RotorWavefunction};

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 1..n {
        let k = k as f64;
        let p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Normalized `Y_j^0(θ)` with the φ-independent factor only.
fn y_j0(j: usize, x: f64) -> f64 {
    ((2 * j + 1) as f64 / (4.0 * PI)).sqrt() * legendre(j, x).0
}

#[test]
fn gauss_legendre_integrates_polynomials() {
    let rule = gauss_legendre(20);
    let s: f64 = rule.iter().map(|(x, w)| w * x.powi(10)).sum();
    assert!((s - 2.0 / 11.0).abs() < 1e-14);
}

#[test]
fn m1_cos_element_by_2d_quadrature() {
    // Y_1^1 = -sqrt(3/8π) sinθ e^{iφ},  Y_2^1 = -sqrt(15/8π) sinθ cosθ e^{iφ}
    let (nt, np) = (800, 64);
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..nt {
        let th = PI * (a as f64 + 0.5) / nt as f64;
        for b in 0..np {
            let ph = 2.0 * PI * (b as f64 + 0.5) / np as f64;
            let e = Complex64::from_polar(1.0, ph);
            let y11 = -(3.0 / (8.0 * PI)).sqrt() * th.sin() * e;
            let y21 = -(15.0 / (8.0 * PI)).sqrt() * th.sin() * th.cos() * e;
            acc += y11.conj() * th.cos() * y21 * th.sin();
        }
    }
    let quad = acc.re * (PI / nt as f64) * (2.0 * PI / np as f64);
    let op = build_cos_theta(&AngularBasis::new(1, 4).unwrap());
    assert!((quad - 0.4472135955).abs() < 1e-5, "{quad}");
    assert!((op.get(0, 1) - quad).abs() < 1e-5);
}

#[test]
fn cos_and_cos2_elements_by_quadrature() {
    let rule = gauss_legendre(96);
    // ∫ Y_a Y_b f(cosθ) dΩ = 2π ∫ Y_a Y_b f(x) dx
    let element = |a: usize, b: usize, pow: i32| -> f64 {
        2.0 * PI * rule.iter().map(|&(x, w)| w * y_j0(a, x) * y_j0(b, x) * x.powi(pow)).sum::<f64>()
    };
    let basis = AngularBasis::new(0, 24).unwrap();
    let cos = build_cos_theta(&basis);
    let cos2 = build_cos2_theta(&basis);
    for a in 0..24 {
        for b in 0..24 {
            assert!((cos.get(a, b) - element(a, b, 1)).abs() < 1e-12, "cos ({a},{b})");
            assert!((cos2.get(a, b) - element(a, b, 2)).abs() < 1e-12, "cos2 ({a},{b})");
        }
    }
    assert!((element(0, 2, 2) - 2.0 / (3.0 * 5f64.sqrt())).abs() < 1e-14);
    let diag20 = element(20, 20, 2);
    assert!((diag20 - 0.5003).abs() < 1e-4, "{diag20}");
}

#[test]
fn hcp_kick_populations_by_quadrature() {
    // c_j = <j| e^{iA cosθ} |0> = sqrt(2j+1)/2 ∫ P_j(x) e^{iAx} dx
    let a = 3.0;
    let rule = gauss_legendre(120);
    let basis = AngularBasis::new(0, 30).unwrap();
    let ground = RotorWavefunction::level(basis, 0).unwrap();
    let kicked = kick_operator_apply(&ground, &build_cos_theta(&basis), a).unwrap();
    for j in 0..=30usize {
        let c: Complex64 = rule
            .iter()
            .map(|&(x, w)| Complex64::from_polar(w * legendre(j, x).0, a * x))
            .sum::<Complex64>()
            * (((2 * j + 1) as f64).sqrt() / 2.0);
        let got = kicked.amplitudes()[j];
        assert!((got.norm_sqr() - c.norm_sqr()).abs() < 1e-8, "j = {j}");
        // phases included
        assert!((got - c).norm() < 1e-8, "j = {j}: {got} vs {c}");
    }
}

#[test]
fn laser_kick_populations_by_quadrature() {
    let a = 2.5;
    let rule = gauss_legendre(120);
    let basis = AngularBasis::new(0, 30).unwrap();
    let ground = RotorWavefunction::level(basis, 0).unwrap();
    let kicked = kick_operator_apply(&ground, &build_cos2_theta(&basis), a).unwrap();
    for j in 0..=28usize {
        let c: Complex64 = rule
            .iter()
            .map(|&(x, w)| Complex64::from_polar(w * legendre(j, x).0, a * x * x))
            .sum::<Complex64>()
            * (((2 * j + 1) as f64).sqrt() / 2.0);
        assert!((kicked.amplitudes()[j] - c).norm() < 1e-8, "j = {j}");
    }
}
