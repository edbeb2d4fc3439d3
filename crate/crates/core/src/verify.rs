//! Verification suites and coefficient export driven by a [`LoadedConfig`].

use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::classical_limit::{
    classical_coefficients, classical_compatibility_residual, default_c_sequence, rescaled_coefficients,
    ClassicalCoefficients, ClassicalError, RESCALINGS,
};
use crate::closure::{
    compatibility_residual, compatibility_scale, evaluate_closure, heatflux_condition_residuals,
    monatomic_production, polyatomic_production, production_coefficients, ClosureError, ClosureValues,
    ProductionCoefficients,
};
use crate::config::{ClosureSpec, ConfigError, LoadedConfig, ModelSpec, Suite};
use crate::covariant::{FourVector, METRIC};
use crate::eckart_check::{eckart_fields_with_acceleration, projection_residuals, EckartError, FieldPoint};
use crate::main_field::{
    a_from_gamma1, a_from_potential, equilibrium_main_field, euler_convexity, potential_coefficients,
};
use crate::report::{Cell, Provenance, Status, SuiteReport, Table, VerificationReport};
use crate::state_models::{evaluate, ModelError, StateEvaluation, ThermalState};
use crate::sweep::{self, Execution};

pub const RNG_DESCRIPTION: &str = "chacha8, seed_from_u64(seed), stream = point index";

/// Labels of the classical-symbol map attached to production reports.
pub const LMR_SYMBOL_MAP: [(&str, &str); 3] = [("B1_pi", "-a3 c^2 / 4"), ("B3", "a2"), ("B4", "a1")];

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical error: {0}")]
    Runtime(String),
    #[error("cannot write {path}: {message}")]
    Io { path: String, message: String },
}

impl From<ClosureError> for VerifyError {
    fn from(e: ClosureError) -> Self {
        VerifyError::Runtime(e.to_string())
    }
}

impl From<ModelError> for VerifyError {
    fn from(e: ModelError) -> Self {
        VerifyError::Runtime(e.to_string())
    }
}

impl From<EckartError> for VerifyError {
    fn from(e: EckartError) -> Self {
        VerifyError::Runtime(e.to_string())
    }
}

impl From<ClassicalError> for VerifyError {
    fn from(e: ClassicalError) -> Self {
        match e {
            ClassicalError::BadSequence(m) => VerifyError::Config(ConfigError::Invalid(format!("c_sequence: {m}"))),
            other => VerifyError::Runtime(other.to_string()),
        }
    }
}

impl VerifyError {
    /// Process exit code: 2 for configuration problems, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            VerifyError::Config(_) => 2,
            VerifyError::Runtime(_) | VerifyError::Io { .. } => 3,
        }
    }
}

type Res<T> = Result<T, VerifyError>;

fn collect<T>(v: Vec<Res<T>>) -> Res<Vec<T>> {
    v.into_iter().collect()
}

fn relative(r: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        r.abs() / scale
    } else {
        r.abs()
    }
}

struct Ctx<'a> {
    cfg: &'a LoadedConfig,
    exec: Execution,
}

impl Ctx<'_> {
    fn grid(&self) -> Vec<ThermalState> {
        self.cfg.config.grid.states()
    }

    fn values(&self, state: ThermalState) -> Res<(StateEvaluation, ClosureValues)> {
        let k = &self.cfg.config.constants;
        let ev = evaluate(self.cfg.model.as_ref(), state, k)?;
        let v = evaluate_closure(self.cfg.closure.as_ref(), state, self.cfg.model.as_ref(), k)?;
        Ok((ev, v))
    }

    fn field_points(&self, count: usize) -> Vec<FieldPoint> {
        let fp = &self.cfg.config.field_points;
        let c = self.cfg.config.constants.c;
        (0..count as u64).map(|i| fp.family.point(&fp.family.sample(fp.seed, i), c)).collect()
    }
}

fn compatibility(ctx: &Ctx) -> Res<SuiteReport> {
    let k = ctx.cfg.config.constants;
    let rows = collect(sweep::map(ctx.exec, &ctx.grid(), |&s| {
        let (ev, v) = ctx.values(s)?;
        Ok(relative(compatibility_residual(&v, &ev)?, compatibility_scale(&v, &ev, &k)))
    }))?;
    let mut rep = SuiteReport::from_residuals(
        Suite::Compatibility.name(),
        ctx.cfg.config.tolerances.compatibility,
        "max(|a|, |b|, rho c^2)",
        &rows,
    );
    report_worst(&mut rep, &ctx.grid(), &rows);
    Ok(rep)
}

fn report_worst(rep: &mut SuiteReport, states: &[ThermalState], rel: &[f64]) {
    for (s, r) in states.iter().zip(rel) {
        if !(*r <= rep.tolerance) {
            rep.diagnose(format!("rho = {}, T = {}: relative residual {r:e}", s.rho, s.temperature));
        }
    }
}

/// Closed-form production coefficients when one exists for the configured
/// closure and model.
fn reference_production(
    cfg: &LoadedConfig,
    v: &ClosureValues,
    ev: &StateEvaluation,
) -> Res<Option<ProductionCoefficients>> {
    let c = &cfg.config;
    let p = c.perturbation;
    if p.delta_a != 0.0 || p.delta_b != 0.0 {
        return Ok(None);
    }
    let k = &c.constants;
    Ok(match (&c.closure, &c.model) {
        (ClosureSpec::MonatomicJuttner, ModelSpec::Juttner) => Some(monatomic_production(ev.state, &c.transport, k)?),
        (ClosureSpec::PolyatomicAcpr | ClosureSpec::PolyatomicPr { .. }, ModelSpec::Juttner | ModelSpec::Polyatomic { .. }) => {
            Some(polyatomic_production(v, ev, &c.transport, k)?)
        }
        (ClosureSpec::GerochLindblom { c1, c2 }, _) => {
            let tr = &c.transport;
            Some(ProductionCoefficients {
                a1: -c2 / tr.chi,
                a2: -v.b / tr.mu,
                a3: -4.0 / (k.c * k.c * tr.nu) * (c1 + 2.0 * v.b / 3.0),
            })
        }
        _ => None,
    })
}

fn production(ctx: &Ctx) -> Res<SuiteReport> {
    let cfg = ctx.cfg;
    let k = cfg.config.constants;
    let states = ctx.grid();
    let rows = collect(sweep::map(ctx.exec, &states, |&s| {
        let (ev, v) = ctx.values(s)?;
        let generic = production_coefficients(&v, &ev, &cfg.config.transport, &k)?;
        let reference = reference_production(cfg, &v, &ev)?;
        Ok((generic, reference))
    }))?;
    let negative_a2 = rows.iter().filter(|(g, _)| g.a2 < 0.0).count();
    let has_reference = rows.iter().all(|(_, r)| r.is_some());
    let rel: Vec<f64> = rows
        .iter()
        .filter_map(|(g, r)| {
            r.map(|r| {
                [(g.a1, r.a1), (g.a2, r.a2), (g.a3, r.a3)]
                    .iter()
                    .map(|(x, y)| relative(x - y, y.abs()))
                    .fold(0.0, f64::max)
            })
        })
        .collect();
    let mut rep = SuiteReport::from_residuals(
        Suite::Production.name(),
        cfg.config.tolerances.production,
        "|closed-form coefficient|",
        &rel,
    );
    if has_reference {
        report_worst(&mut rep, &states, &rel);
    } else {
        rep.status = Status::Skip;
        rep.diagnose("no closed-form production coefficients for this closure; generic values only".into());
    }
    rep.detail("points", states.len());
    rep.detail("a2_negative_points", negative_a2);
    rep.detail(
        "lmr_symbol_map",
        LMR_SYMBOL_MAP.iter().map(|(s, f)| (s.to_string(), f.to_string())).collect::<std::collections::BTreeMap<_, _>>(),
    );
    Ok(rep)
}

fn heatflux(ctx: &Ctx) -> Res<SuiteReport> {
    let cfg = ctx.cfg;
    let k = cfg.config.constants;
    let chi = cfg.config.transport.chi;
    let states = ctx.grid();
    let rel = collect(sweep::map(ctx.exec, &states, |&s| {
        let (ev, v) = ctx.values(s)?;
        let prod = production_coefficients(&v, &ev, &cfg.config.transport, &k)?;
        let (r1, r2) = heatflux_condition_residuals(&v, &ev, chi, prod.a1);
        let t = s.temperature;
        let enthalpy = ev.e + ev.p;
        let s1 = (enthalpy * v.b_rho).abs().max(((4.0 * v.a + v.b) * ev.p_rho).abs()).max((chi * prod.a1 * t * ev.p_rho).abs());
        let s2 = (enthalpy * v.b_t).abs().max(((4.0 * v.a + v.b) * ev.p_t).abs()).max((chi * prod.a1 * ev.enthalpy_defect()).abs());
        Ok(relative(r1, s1).max(relative(r2, s2)))
    }))?;
    let mut rep = SuiteReport::from_residuals(
        Suite::Heatflux.name(),
        cfg.config.tolerances.heatflux,
        "largest term of each condition",
        &rel,
    );
    report_worst(&mut rep, &states, &rel);
    Ok(rep)
}

/// One row of the per-point projection table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionRow {
    pub t: f64,
    pub x: f64,
    pub r_trace: f64,
    pub r_heat: f64,
    pub r_shear: f64,
    pub scale: f64,
}

pub fn projection_rows(cfg: &LoadedConfig, exec: Execution) -> Result<Vec<ProjectionRow>, VerifyError> {
    let ctx = Ctx { cfg, exec };
    let fp = &cfg.config.field_points;
    let k = cfg.config.constants;
    collect(sweep::map_indices(exec, fp.count, |i| {
        let sample = fp.family.sample(fp.seed, i as u64);
        let pt = fp.family.point(&sample, k.c);
        let (ev, v) = ctx.values(pt.state)?;
        let prod = production_coefficients(&v, &ev, &cfg.config.transport, &k)?;
        let r = projection_residuals(&pt, &v, &prod, &cfg.config.transport, &ev, &k)?;
        Ok(ProjectionRow {
            t: sample.time,
            x: sample.x,
            r_trace: r.trace.abs(),
            r_heat: r.heat_norm(),
            r_shear: r.shear_norm(),
            scale: r.scale,
        })
    }))
}

fn projection(ctx: &Ctx) -> Res<SuiteReport> {
    let rows = projection_rows(ctx.cfg, ctx.exec)?;
    let rel: Vec<f64> = rows
        .iter()
        .map(|r| relative(r.r_trace.max(r.r_heat).max(r.r_shear), r.scale))
        .collect();
    let mut rep = SuiteReport::from_residuals(
        Suite::Projection.name(),
        ctx.cfg.config.tolerances.projection,
        "rho c^3 max(|d rho|/rho, |dT|/T, |dU|/c)",
        &rel,
    );
    for (r, x) in rows.iter().zip(&rel) {
        if !(*x <= rep.tolerance) {
            rep.diagnose(format!(
                "t = {}, x = {}: trace {:e}, heat {:e}, shear {:e} (relative {x:e})",
                r.t, r.x, r.r_trace, r.r_heat, r.r_shear
            ));
        }
    }
    let heat: Vec<f64> = rows.iter().map(|r| relative(r.r_heat, r.scale)).collect();
    rep.detail("max_relative_heat", crate::report::max(&heat));
    rep.detail("seed", ctx.cfg.config.field_points.seed);
    Ok(rep)
}

fn main_field(ctx: &Ctx) -> Res<SuiteReport> {
    let k = ctx.cfg.config.constants;
    let states = ctx.grid();
    let u = FourVector::from_three_velocity([0.3 * k.c, -0.2 * k.c, 0.1 * k.c], k.c);
    let rows = collect(sweep::map(ctx.exec, &states, |&s| {
        let (ev, v) = ctx.values(s)?;
        let via_b = crate::closure::a_from_b(v.b, v.b_rho, v.b_t, &ev)?;
        let via_gamma1 = a_from_gamma1(v.b, v.b_rho, v.b_t, &ev)?;
        let pc = potential_coefficients(&v, &ev, &k)?;
        let via_potential = a_from_potential(&pc, &ev, &k);
        let scale = via_b.abs().max(v.b.abs()).max(s.rho * k.c * k.c);
        let identity = relative(via_gamma1 - via_b, scale).max(relative(via_potential - via_b, scale));
        let mf = equilibrium_main_field(s, &u, ctx.cfg.model.as_ref(), &k)?;
        let norm = mf.lambda_vec.dot(&mf.lambda_vec);
        Ok((identity, relative(norm - mf.g0, mf.g0)))
    }))?;
    let rel: Vec<f64> = rows.iter().map(|(a, b)| a.max(*b)).collect();
    let mut rep = SuiteReport::from_residuals(
        Suite::MainField.name(),
        ctx.cfg.config.tolerances.main_field,
        "max(|a|, |b|, rho c^2); G0 for the normalisation",
        &rel,
    );
    report_worst(&mut rep, &states, &rel);
    rep.detail(
        "max_normalisation_residual",
        crate::report::max(&rows.iter().map(|r| r.1).collect::<Vec<_>>()),
    );
    Ok(rep)
}

fn convexity(ctx: &Ctx) -> Res<SuiteReport> {
    let k = ctx.cfg.config.constants;
    let states = ctx.grid();
    let rows = collect(sweep::map(ctx.exec, &states, |&s| {
        let ev = evaluate(ctx.cfg.model.as_ref(), s, &k)?;
        let conv = euler_convexity(&ev, &k);
        let hmax = conv.hessian.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
        Ok((ev.is_thermodynamically_stable(), conv.negative_definite, relative(conv.asymmetry, hmax)))
    }))?;
    // a stable state must come out negative definite; unstable states are
    // reported, not failed
    let mismatches = rows.iter().filter(|(stable, nd, _)| *stable && !nd).count();
    let asym: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let mut rep = SuiteReport::from_residuals(Suite::Convexity.name(), f64::INFINITY, "max |hessian entry|", &asym);
    rep.tolerance = 0.0;
    rep.failures = mismatches;
    rep.status = if mismatches == 0 { Status::Pass } else { Status::Fail };
    for (s, (stable, nd, _)) in states.iter().zip(&rows) {
        if !nd {
            let why = if *stable { "stable state not negative definite" } else { "indefinite (p_rho <= 0 or e_T <= 0)" };
            rep.diagnose(format!("rho = {}, T = {}: {why}", s.rho, s.temperature));
        }
    }
    rep.detail("negative_definite_points", rows.iter().filter(|r| r.1).count());
    rep.detail("indefinite_points", rows.iter().filter(|r| !r.1).count());
    rep.detail("unstable_points", rows.iter().filter(|r| !r.0).count());
    Ok(rep)
}

/// Classical limits at every configured state.
pub fn classical_runs(cfg: &LoadedConfig, exec: Execution) -> Res<Vec<(ThermalState, ClassicalCoefficients)>> {
    let c = &cfg.config;
    let states: Vec<ThermalState> = c
        .classical
        .states
        .iter()
        .map(|[rho, t]| ThermalState::new(*rho, *t))
        .collect::<Result<_, _>>()?;
    collect(sweep::map(exec, &states, |&s| {
        let seq = c.classical.c_sequence.clone().unwrap_or_else(|| default_c_sequence(s, &c.constants));
        let coeffs = classical_coefficients(
            cfg.closure.as_ref(),
            cfg.model.as_ref(),
            &c.transport,
            s,
            &c.constants,
            &seq,
            c.classical.tolerance,
        )?;
        Ok((s, coeffs))
    }))
}

#[derive(Serialize)]
struct ClassicalRow {
    rho: f64,
    temperature: f64,
    converged: bool,
    convergence_rate: Option<f64>,
    gamma_max: f64,
    limits: Vec<(String, f64, f64, Option<f64>)>,
    residual: Option<f64>,
    warnings: Vec<String>,
}

fn classical(ctx: &Ctx) -> Res<SuiteReport> {
    let cfg = ctx.cfg;
    let k = cfg.config.constants;
    let runs = classical_runs(cfg, ctx.exec)?;
    let mut rel = Vec::new();
    let mut rows = Vec::new();
    let mut unconverged = 0;
    let mut diagnostics = Vec::new();
    for (s, coeffs) in &runs {
        let residual = if coeffs.converged {
            let r = classical_compatibility_residual(coeffs, cfg.closure.as_ref(), cfg.model.as_ref(), *s, &k)?;
            rel.push(r.value.abs());
            Some(r.value)
        } else {
            unconverged += 1;
            let bad: Vec<&str> = coeffs.estimates().iter().filter(|(_, e)| !e.converged).map(|(n, _)| *n).collect();
            diagnostics.push(format!(
                "rho = {}, T = {}: no classical limit for {}",
                s.rho,
                s.temperature,
                bad.join(", ")
            ));
            None
        };
        rows.push(ClassicalRow {
            rho: s.rho,
            temperature: s.temperature,
            converged: coeffs.converged,
            convergence_rate: coeffs.convergence_rate,
            gamma_max: coeffs.gamma_max,
            limits: coeffs
                .estimates()
                .iter()
                .map(|(n, e)| (n.to_string(), e.value, e.error_estimate, e.rate))
                .collect(),
            residual,
            warnings: coeffs.warnings.clone(),
        });
    }
    let mut rep = SuiteReport::from_residuals(
        Suite::ClassicalLimit.name(),
        cfg.config.tolerances.classical_residual,
        "rho c^2 (compatibility residual, extrapolated)",
        &rel,
    );
    for d in diagnostics {
        rep.diagnose(d);
    }
    if unconverged > 0 && rep.status == Status::Pass {
        rep.status = Status::SkipWithDiagnostics;
    }
    rep.detail("rescalings", RESCALINGS.iter().map(|(a, b)| format!("{a} = {b}")).collect::<Vec<_>>());
    rep.detail("states", rows);
    Ok(rep)
}

fn entropy_production_suite(ctx: &Ctx) -> Res<SuiteReport> {
    let cfg = ctx.cfg;
    let c = cfg.config.constants.c;
    let tr = cfg.config.transport;
    let points = ctx.field_points(cfg.config.field_points.count);
    let rows = collect(sweep::map(ctx.exec, &points, |pt| {
        let (sigma, scale) = sigma_with_scale(pt, &tr, c)?;
        Ok((sigma, scale))
    }))?;
    // a check fails when σ < −tol·scale
    let rel: Vec<f64> = rows.iter().map(|(s, sc)| relative(s.min(0.0), *sc)).collect();
    let mut rep = SuiteReport::from_residuals(
        Suite::EntropyProduction.name(),
        cfg.config.tolerances.entropy_production,
        "sum of |heat|, |shear| and |bulk| contributions",
        &rel,
    );
    rep.detail("min_sigma", rows.iter().map(|r| r.0).fold(f64::INFINITY, f64::min));
    Ok(rep)
}

/// `σ` for Eckart fields at a point, with the sum of the magnitudes of its
/// heat, shear and bulk contributions.
pub fn sigma_with_scale(
    pt: &FieldPoint,
    transport: &crate::closure::TransportCoefficients,
    c: f64,
) -> Result<(f64, f64), EckartError> {
    let u_dot = pt.kinematic_acceleration();
    let fields = eckart_fields_with_acceleration(pt, transport, &u_dot, c)?;
    let t = pt.state.temperature;
    let sigma = crate::covariant::entropy_production(t, &fields, &pt.grad_t, &pt.grad_u, &pt.u, c);
    let u_dot_lower = crate::covariant::lower(&u_dot);
    let heat: f64 = (0..4)
        .map(|a| (fields.q.0[a] * (pt.grad_t[a] - t / (c * c) * u_dot_lower[a])).abs())
        .sum::<f64>()
        / (t * t);
    let mut shear = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            shear += (fields.t.get(a, b) * METRIC[b] * pt.grad_u[a][b]).abs();
        }
    }
    let bulk = (fields.pi * pt.expansion()).abs();
    Ok((sigma, heat + (shear + bulk) / t))
}

fn run_suite(ctx: &Ctx, suite: Suite) -> Res<SuiteReport> {
    match suite {
        Suite::Compatibility => compatibility(ctx),
        Suite::Production => production(ctx),
        Suite::Heatflux => heatflux(ctx),
        Suite::Projection => projection(ctx),
        Suite::MainField => main_field(ctx),
        Suite::Convexity => convexity(ctx),
        Suite::ClassicalLimit => classical(ctx),
        Suite::EntropyProduction => entropy_production_suite(ctx),
    }
}

/// Runs the selected suites (all configured ones when `suites` is empty).
pub fn run_verify(cfg: &LoadedConfig, suites: &[Suite], exec: Execution) -> Res<VerificationReport> {
    let ctx = Ctx { cfg, exec };
    let selected = cfg.config.selected_suites(suites);
    let reports = collect(sweep::map(exec, &selected, |s| run_suite(&ctx, *s)))?;
    let provenance = Provenance {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config_sha256: cfg.sha256.clone(),
        rng: RNG_DESCRIPTION,
        seed: cfg.config.field_points.seed,
    };
    Ok(VerificationReport::new(
        provenance,
        cfg.model.name().to_owned(),
        cfg.closure.name(),
        reports,
    ))
}

/// Coefficient table over the grid.
pub fn coefficient_table(cfg: &LoadedConfig, exec: Execution) -> Res<Table> {
    let ctx = Ctx { cfg, exec };
    let k = cfg.config.constants;
    let lmr = cfg.config.export.lmr_symbols;
    let mut columns = vec![
        "rho", "T", "gamma", "a", "b", "a1", "a2", "a3", "compatibility_residual", "heatflux_r1", "heatflux_r2",
    ];
    if lmr {
        columns.extend(["B1_pi", "B3", "B4"]);
    }
    let rows = collect(sweep::map(exec, &ctx.grid(), |&s| {
        let (ev, v) = ctx.values(s)?;
        let prod = production_coefficients(&v, &ev, &cfg.config.transport, &k)?;
        let (r1, r2) = heatflux_condition_residuals(&v, &ev, cfg.config.transport.chi, prod.a1);
        let mut row = vec![
            s.rho,
            s.temperature,
            k.gamma(s.temperature),
            v.a,
            v.b,
            prod.a1,
            prod.a2,
            prod.a3,
            compatibility_residual(&v, &ev)?,
            r1,
            r2,
        ];
        if lmr {
            let sym = prod.lmr_symbols(k.c);
            row.extend([sym.b1_pi, sym.b3, sym.b4]);
        }
        Ok(row.into_iter().map(Cell::Num).collect::<Vec<_>>())
    }))?;
    let mut table = Table::new(&columns);
    for r in rows {
        table.push(r);
    }
    Ok(table)
}

pub fn projection_table(cfg: &LoadedConfig, exec: Execution) -> Res<Table> {
    let mut table = Table::new(&["t", "x", "r_trace", "r_heat", "r_shear", "scale"]);
    for r in projection_rows(cfg, exec)? {
        table.push([r.t, r.x, r.r_trace, r.r_heat, r.r_shear, r.scale].map(Cell::Num).to_vec());
    }
    Ok(table)
}

/// Rows per light speed with the rescaled coefficients, followed by the
/// extrapolated limit, its error estimate and the fitted rate.
pub fn classical_table(cfg: &LoadedConfig, exec: Execution) -> Res<Table> {
    let c = &cfg.config;
    let mut table = Table::new(&["rho", "T", "row", "c", "gamma", "a_C", "b_C", "a1_C", "a2_C", "a3_C"]);
    for (s, coeffs) in classical_runs(cfg, exec)? {
        let head = |kind: &str| vec![Cell::Num(s.rho), Cell::Num(s.temperature), Cell::Text(kind.to_owned())];
        for &cv in &coeffs.c_sequence {
            let kc = c.constants.with_c(cv);
            let vals = rescaled_coefficients(cfg.closure.as_ref(), cfg.model.as_ref(), &c.transport, s, &kc)?;
            let mut row = head("c");
            row.extend([Cell::Num(cv), Cell::Num(kc.gamma(s.temperature))]);
            row.extend(vals.map(Cell::Num));
            table.push(row);
        }
        let est = coeffs.estimates();
        let summary: [(&str, Box<dyn Fn(usize) -> Cell>); 3] = [
            ("limit", Box::new(|i| Cell::Num(est[i].1.value))),
            ("error", Box::new(|i| Cell::Num(est[i].1.error_estimate))),
            ("rate", Box::new(|i| est[i].1.rate.map_or(Cell::Empty, Cell::Num))),
        ];
        for (kind, f) in summary {
            let mut row = head(kind);
            row.extend([Cell::Empty, Cell::Empty]);
            row.extend((0..5).map(&f));
            table.push(row);
        }
    }
    Ok(table)
}

fn write_file(path: &Path, bytes: &[u8]) -> Res<()> {
    std::fs::write(path, bytes).map_err(|e| VerifyError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn csv_bytes(table: &Table) -> Vec<u8> {
    let mut buf = Vec::new();
    table.write_csv(&mut buf).expect("writing to memory");
    buf
}

/// Writes `coefficients`, `projection` and `classical` tables as CSV and
/// JSON into `out`. Returns the written paths.
pub fn run_export(cfg: &LoadedConfig, out: &Path, exec: Execution) -> Res<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(out).map_err(|e| VerifyError::Io {
        path: out.display().to_string(),
        message: e.to_string(),
    })?;
    let tables = [
        ("coefficients", coefficient_table(cfg, exec)?),
        ("projection", projection_table(cfg, exec)?),
        ("classical", classical_table(cfg, exec)?),
    ];
    let mut written = Vec::new();
    for (name, table) in &tables {
        let csv_path = out.join(format!("{name}.csv"));
        write_file(&csv_path, &csv_bytes(table))?;
        let json_path = out.join(format!("{name}.json"));
        write_file(&json_path, table.to_json().as_bytes())?;
        written.extend([csv_path, json_path]);
    }
    Ok(written)
}
