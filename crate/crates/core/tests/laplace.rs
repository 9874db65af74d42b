#![allow(clippy::excessive_precision)]

use maxassign_core::{log_laplace, log_laplace_asymptotic, GammaModel};

// ln L(rho) from closed forms evaluated at 40 digits:
// exponential gamma: L = 2 sqrt(rho) K_1(2 sqrt(rho)); uniform gamma: L = e^-rho - rho E_1(rho).
const ORACLE: [(f64, f64, f64); 7] = [
    (1e-6, -0.000013661180122198396262, -0.0000142383967585526903),
    (0.01, -0.045840285267260736738, -0.051640156659643234783),
    (1.0, -1.2739241220005685821, -1.9072005785983454712),
    (10.0, -5.1213948519174666911, -12.472582971982388881),
    (100.0, -18.25804196681190971, -104.62478415575800909),
    (1e4, -197.12317963120413161, -10009.210540331990842),
    (1e6, -1995.9735699644387367, -1000013.8155125579603),
];

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn exponential_matches_bessel_closed_form() {
    for &(rho, exp_oracle, _) in &ORACLE {
        let got = log_laplace(&GammaModel::StdExponential, rho).unwrap();
        assert!(
            rel(got, exp_oracle) < 1e-9,
            "rho={rho}: {got} vs {exp_oracle}"
        );
    }
}

#[test]
fn uniform_matches_exponential_integral_closed_form() {
    for &(rho, _, uni_oracle) in &ORACLE {
        let got = log_laplace(&GammaModel::Uniform01, rho).unwrap();
        assert!(
            rel(got, uni_oracle) < 1e-9,
            "rho={rho}: {got} vs {uni_oracle}"
        );
    }
}

#[test]
fn no_underflow_where_laplace_is_below_f64_range() {
    // L(1e6) ~ e^-1e6 for uniform gamma; the log must still be finite and accurate.
    let got = log_laplace(&GammaModel::Uniform01, 1e6).unwrap();
    assert!(got.is_finite() && got < -700.0);
    let got = log_laplace(&GammaModel::Constant(0.5), 1e6).unwrap();
    assert_eq!(got, -2e6);
}

#[test]
fn normalisation_and_strict_monotonicity() {
    let grid: Vec<f64> = (-12..=12).map(|k| 10f64.powf(k as f64 / 2.0)).collect();
    let mut models = GammaModel::built_in();
    models.push(GammaModel::PolynomialTail { alpha: 1.5 });
    models.push(GammaModel::Constant(0.25));
    for m in &models {
        assert_eq!(log_laplace(m, 0.0).unwrap(), 0.0, "{m}");
        let vals: Vec<f64> = grid.iter().map(|&r| log_laplace(m, r).unwrap()).collect();
        assert!(vals[0] < 0.0, "{m}");
        for w in vals.windows(2) {
            assert!(w[1] < w[0], "{m}: {vals:?}");
        }
    }
}

#[test]
fn asymptotic_relative_gap_shrinks() {
    for m in [
        GammaModel::StdExponential,
        GammaModel::Uniform01,
        GammaModel::PolynomialTail { alpha: 2.0 },
        GammaModel::PolynomialTail { alpha: 3.0 },
        GammaModel::PolynomialTail { alpha: 1.5 },
    ] {
        let gaps: Vec<f64> = [1e2, 1e3, 1e4]
            .iter()
            .map(|&rho| {
                let exact = log_laplace(&m, rho).unwrap();
                let asy = log_laplace_asymptotic(&m, rho).unwrap();
                ((exact - asy) / exact).abs()
            })
            .collect();
        assert!(
            gaps[1] <= gaps[0] + 1e-12 && gaps[2] <= gaps[1] + 1e-12,
            "{m}: {gaps:?}"
        );
        assert!(gaps[2] < 0.01, "{m}: {gaps:?}");
    }
}

#[test]
fn exponential_asymptotic_at_ten_thousand() {
    let asy = log_laplace_asymptotic(&GammaModel::StdExponential, 1e4).unwrap();
    let exact = log_laplace(&GammaModel::StdExponential, 1e4).unwrap();
    assert!((asy + 197.13).abs() < 0.01, "{asy}");
    assert!(rel(asy, exact) < 0.01);
}
