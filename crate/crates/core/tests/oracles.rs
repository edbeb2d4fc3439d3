//! Independent oracles: 40-digit reference values, direct quadrature of the
//! Bessel integral, and finite differences of every analytic derivative.

use ret_core::closure::{
    evaluate_closure, ClosureValues, EquilibriumClosure, GerochLindblom, MonatomicJuttner, PolyatomicAcpr,
    PolyatomicPr,
};
use ret_core::special_functions::{bessel_k_scaled, bessel_ratio_g, bessel_ratio_g_derivatives};
use ret_core::spline::CubicSpline;
use ret_core::state_models::{
    evaluate, JuttnerGas, Omega, PhysicalConstants, PolyatomicGas, StateEvaluation, StateModel, ThermalState,
};

// x, e^x K₂(x), e^x K₃(x), G(x); mpmath at 40 digits
const REFERENCE: [(f64, f64, f64, f64); 6] = [
    (0.01, 20200.498385676554694, 8080300.3329190801176, 400.00499881965931298),
    (0.5, 12.448148218621052351, 102.31619545718020452, 8.2193908411314140176),
    (2.0, 1.8750450621394599911, 4.7835669713476085554, 2.5511744053177436626),
    (10.0, 0.47378524855575641596, 0.60028067001809131751, 1.2669889403436091893),
    (50.0, 0.1839498181997819611, 0.19328254401479813149, 1.0507351728115338395),
    (300.0, 0.072813034950722357695, 0.07342132213326804075, 1.0083540973529994084),
];

fn close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * y.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn scaled_bessel_against_reference() {
    for (x, k2, k3, g) in REFERENCE {
        let a = bessel_k_scaled(2, x).unwrap();
        let b = bessel_k_scaled(3, x).unwrap();
        assert!(close(a, k2, 1e-13), "K2({x}): {a} vs {k2}");
        assert!(close(b, k3, 1e-13), "K3({x}): {b} vs {k3}");
        let ours = bessel_ratio_g(x).unwrap();
        assert!(close(ours, g, 5e-15), "G({x}): {ours} vs {g}");
    }
}

/// `e^x K_n(x) = ∫₀^∞ exp(−x(cosh t − 1)) cosh(nt) dt` by the trapezoid rule,
/// which converges geometrically for this analytic, rapidly decaying integrand.
fn quadrature(n: u32, x: f64) -> f64 {
    let h: f64 = 1e-3;
    let mut sum = 0.5;
    let mut t = h;
    loop {
        let f = (-x * (t.cosh() - 1.0) + n as f64 * t).exp() * 0.5 * (1.0 + (-2.0 * n as f64 * t).exp());
        sum += f;
        if f < 1e-18 * sum {
            break;
        }
        t += h;
    }
    sum * h
}

#[test]
fn scaled_bessel_against_quadrature() {
    for x in [0.05, 0.3, 1.0, 3.7, 12.0, 24.9, 25.1, 80.0, 700.0] {
        for n in [2u32, 3] {
            let q = quadrature(n, x);
            let ours = bessel_k_scaled(n, x).unwrap();
            assert!(close(ours, q, 1e-11), "K{n}({x}): {ours} vs quadrature {q}");
        }
    }
}

#[test]
fn g_derivatives_against_finite_differences() {
    for gamma in [0.05, 0.7, 3.0, 11.0, 24.0, 26.0, 90.0, 400.0] {
        let h = 1e-3 * gamma;
        let at = |x: f64| bessel_ratio_g_derivatives(x).unwrap();
        let (_, gp, gpp) = at(gamma);
        let fd = |k: fn((f64, f64, f64)) -> f64| {
            (-k(at(gamma + 2.0 * h)) + 8.0 * k(at(gamma + h)) - 8.0 * k(at(gamma - h)) + k(at(gamma - 2.0 * h)))
                / (12.0 * h)
        };
        assert!(close(gp, fd(|t| t.0), 1e-8), "G'({gamma}) {gp} vs {}", fd(|t| t.0));
        assert!(close(gpp, fd(|t| t.1), 1e-7), "G''({gamma}) {gpp} vs {}", fd(|t| t.1));
    }
}

#[test]
fn juttner_energy_against_reference() {
    let k = PhysicalConstants::default();
    for (gamma, _, _, g) in REFERENCE {
        let s = ThermalState::new(2.5, k.temperature_for_gamma(gamma)).unwrap();
        let ev = evaluate(&JuttnerGas, s, &k).unwrap();
        assert!(close(ev.e / s.rho, g - 1.0 / gamma, 1e-14), "γ = {gamma}");
        assert!(close(ev.p, s.rho * s.temperature, 1e-15));
    }
}

fn perturbed_omega() -> Omega {
    let knots: Vec<f64> = (0..30).map(|i| (0.01f64.ln() + i as f64 * (1e4f64 / 0.01).ln() / 29.0).exp()).collect();
    let values = knots.iter().map(|g| 0.3 / (1.0 + g)).collect();
    Omega::PerturbedMonatomic(CubicSpline::new(knots, values).unwrap())
}

fn states() -> Vec<ThermalState> {
    let mut out = Vec::new();
    for rho in [0.01, 1.0, 300.0] {
        for t in [0.003, 0.08, 1.0, 40.0] {
            out.push(ThermalState::new(rho, t).unwrap());
        }
    }
    out
}

/// Fourth-order central difference in `ρ` or `T` with a relative step.
fn fd(f: &dyn Fn(f64, f64) -> f64, s: ThermalState, along_rho: bool) -> f64 {
    let x = if along_rho { s.rho } else { s.temperature };
    let h = 1e-3 * x;
    let at = |d: f64| {
        if along_rho {
            f(s.rho + d, s.temperature)
        } else {
            f(s.rho, s.temperature + d)
        }
    };
    (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h)
}

fn check_derivative(name: &str, analytic: f64, numeric: f64, value_scale: f64) {
    let scale = analytic.abs().max(value_scale);
    assert!(
        (analytic - numeric).abs() <= 1e-8 * scale,
        "{name}: analytic {analytic:e} vs finite difference {numeric:e}"
    );
}

#[test]
fn model_derivatives_against_finite_differences() {
    let k = PhysicalConstants::default();
    let models: Vec<Box<dyn StateModel>> = vec![Box::new(JuttnerGas), Box::new(PolyatomicGas::new(perturbed_omega()))];
    for model in &models {
        for s in states() {
            let ev = evaluate(model.as_ref(), s, &k).unwrap();
            let ev_at = |r: f64, t: f64| evaluate(model.as_ref(), ThermalState::new(r, t).unwrap(), &k).unwrap();
            let fields: [(&str, fn(&StateEvaluation) -> f64, f64, f64); 4] = [
                ("p_rho", |e| e.p, ev.p_rho, ev.p / s.rho),
                ("p_T", |e| e.p, ev.p_t, ev.p / s.temperature),
                ("e_rho", |e| e.e, ev.e_rho, ev.e / s.rho),
                ("e_T", |e| e.e, ev.e_t, ev.e / s.temperature),
            ];
            for (name, get, analytic, scale) in fields {
                let numeric = fd(&|r, t| get(&ev_at(r, t)), s, name.ends_with("rho"));
                check_derivative(&format!("{} {name} at {s:?}", model.name()), analytic, numeric, scale);
            }
        }
    }
}

#[test]
fn closure_derivatives_against_finite_differences() {
    let k = PhysicalConstants::default();
    let poly = PolyatomicGas::new(perturbed_omega());
    let cases: Vec<(Box<dyn EquilibriumClosure>, Box<dyn StateModel>)> = vec![
        (Box::new(MonatomicJuttner), Box::new(JuttnerGas)),
        (Box::new(PolyatomicAcpr::new(perturbed_omega())), Box::new(poly.clone())),
        (Box::new(PolyatomicPr::new(perturbed_omega())), Box::new(poly)),
        (Box::new(GerochLindblom::new(0.3, 1.0)), Box::new(JuttnerGas)),
    ];
    for (closure, model) in &cases {
        for s in states() {
            let v = evaluate_closure(closure.as_ref(), s, model.as_ref(), &k).unwrap();
            let v_at = |r: f64, t: f64| {
                evaluate_closure(closure.as_ref(), ThermalState::new(r, t).unwrap(), model.as_ref(), &k).unwrap()
            };
            let scale = v.a.abs().max(v.b.abs()).max(s.rho * k.c * k.c);
            let fields: [(&str, fn(&ClosureValues) -> f64, f64, bool); 4] = [
                ("a_rho", |c| c.a, v.a_rho, true),
                ("a_T", |c| c.a, v.a_t, false),
                ("b_rho", |c| c.b, v.b_rho, true),
                ("b_T", |c| c.b, v.b_t, false),
            ];
            for (name, get, analytic, along_rho) in fields {
                let numeric = fd(&|r, t| get(&v_at(r, t)), s, along_rho);
                let x = if along_rho { s.rho } else { s.temperature };
                check_derivative(&format!("{} {name} at {s:?}", closure.name()), analytic, numeric, scale / x);
            }
        }
    }
}
