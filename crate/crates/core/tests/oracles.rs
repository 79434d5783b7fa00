//! Reference values computed independently with 60-digit arbitrary-precision
//! quadrature of the defining integrals (mpmath), compared with the double
//! precision implementations.
#![allow(clippy::excessive_precision)]

use repeatcap_core::dual::{
    g_duplication, g_sticky, i_p, lambda1_sticky, lambda2_sticky, lambda_trunc_geomdel,
    lambdas_duplication, r_p,
};
use repeatcap_core::numerics::{eta_integral, log_gamma_via_integral, log_integral_li};

fn close(got: f64, want: f64, tol: f64) {
    assert!(
        (got - want).abs() <= tol * want.abs().max(1.0),
        "got {got:.17e}, want {want:.17e}"
    );
}

#[test]
fn sticky_lambdas() {
    close(
        lambda1_sticky(1.0, 0.3).unwrap(),
        0.071893786197869777803,
        1e-10,
    );
    close(
        lambda2_sticky(1.0, 0.3).unwrap(),
        0.055759985980788052224,
        1e-10,
    );
    close(g_sticky(10, 0.3).unwrap(), 4.0329961688007605261, 1e-10);
}

#[test]
fn duplication_lambdas() {
    let [l1, l2, l3] = lambdas_duplication(1.0, 0.2).unwrap();
    close(l1, -0.092122593933244474086, 1e-10);
    close(l2, -0.0032862145255545543681, 1e-10);
    close(l3, -0.057080149698141749318, 1e-10);
    close(g_duplication(7, 0.2).unwrap(), 1.5870197399259026607, 1e-10);
}

#[test]
fn truncated_lambdas() {
    let (a, b) = lambda_trunc_geomdel(5, 0.5).unwrap();
    close(a, 1.1402575189568394979, 1e-10);
    close(b, 8.2303472862872657111, 1e-10);
    // At p = 0.9 the second base changes sign inside the integration range.
    let (a, b) = lambda_trunc_geomdel(4, 0.9).unwrap();
    close(a, 0.017075276913050586134, 1e-10);
    close(b, 0.87039829383206923085, 1e-10);
    let (a, _) = lambda_trunc_geomdel(0, 0.5).unwrap();
    close(a, 0.58937378738095651032, 1e-10);
}

#[test]
fn remainder_and_envelope() {
    close(r_p(1, 0.6).unwrap(), 0.23067516190042703664, 1e-9);
    close(r_p(3, 0.6).unwrap(), 0.040692915413135163022, 1e-9);
    assert!((r_p(10, 0.6).unwrap() - 0.000073550333372423952944).abs() < 1e-11);
    close(i_p(0.6).unwrap(), 0.45365037849566484275, 1e-9);
}

#[test]
fn logarithmic_integral_and_eta() {
    for (z, li, eta) in [
        (0.5, -0.37867104306108797673, -0.57149874365246466842),
        (0.3, -0.15741490289468947725, -0.1935268184196798533),
        (0.8, -1.1340119573823271909, -3.0825292679722122459),
    ] {
        close(log_integral_li(z).unwrap(), li, 1e-12);
        close(eta_integral(z).unwrap(), eta, 1e-10);
    }
}

#[test]
fn log_gamma_integral_representation() {
    for (z, want) in [
        (0.1, -0.049872441259839724148),
        (2.5, 1.2009736023470742248),
        (20.0, 42.33561646075348503),
    ] {
        close(log_gamma_via_integral(z, 1e-12).unwrap(), want, 1e-10);
    }
}

/// Composite Simpson on the naive sticky integrands, as a second,
/// non-arbitrary-precision cross-check over a small grid. The numerator is
/// evaluated term by term, which loses digits near `t = 0`; the first
/// `[0, a]` piece is therefore a trapezoid with a linearly extrapolated
/// value at zero.
fn simpson_lambda(f: impl Fn(f64) -> f64) -> f64 {
    let a = 1e-4;
    let head = 0.5 * a * ((2.0 * f(a) - f(2.0 * a)) + f(a));
    // t = 1 - (1 - a)(1 - s)^4 clusters nodes near t = 1 where the
    // integrand decays like 1/log(1 - t).
    let g = |s: f64| {
        let w = 1.0 - s;
        let t = 1.0 - (1.0 - a) * w.powi(4);
        let jac = 4.0 * (1.0 - a) * w.powi(3);
        if jac == 0.0 {
            0.0
        } else {
            f(t) * jac
        }
    };
    let n = 20_000;
    let h = 1.0 / n as f64;
    let mut sum = g(0.0) + g(1.0);
    for i in 1..n {
        sum += g(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    head + sum * h / 3.0
}

#[test]
fn sticky_lambdas_against_simpson() {
    for &p in &[0.1, 0.5, 0.9] {
        for &y in &[1.0, 2.0, 7.0, 30.0] {
            let den = |t: f64| t * (-t).ln_1p();
            let f1 = |t: f64| {
                (1.0 + t - t * y * (1.0 - p) - (1.0 - t).powf(y - 1.0) / (1.0 - p * t).powf(y))
                    / den(t)
            };
            let f2 = |t: f64| (1.0 - t * y * p - (1.0 + p * t).powf(-y)) / den(t);
            let l1 = lambda1_sticky(y, p).unwrap();
            let l2 = lambda2_sticky(y, p).unwrap();
            assert!(
                (l1 - simpson_lambda(f1)).abs() < 1e-6 * l1.abs().max(1.0),
                "Λ₁ y={y} p={p}"
            );
            assert!(
                (l2 - simpson_lambda(f2)).abs() < 1e-6 * l2.abs().max(1.0),
                "Λ₂ y={y} p={p}"
            );
        }
    }
}
