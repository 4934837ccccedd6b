//! The acceptance check list, shared by `verify-all` and the acceptance tests.

use std::f64::consts::PI;
use std::time::Instant;

use fdlab_core::bingmap::{self, eval, eval_cut, eval_square, fiber, invert, BingMap, FiberKind, SingularLocus};
use fdlab_core::coords::cyl_to_cart;
use fdlab_core::exterior::{check_wedge_inequality, verify_commutation, verify_pullback_estimate, BumpForm, KCovector};
use fdlab_core::quadrature::{
    box_counting, change_of_variables_check, divergence_fit, half_line_distance, integrate_kp_schedule, log_scales, preimage_components,
    ExclusionTube, GridSpec, TrendModel, EPS_SCHEDULE,
};
use fdlab_core::sampling::{par_map, stratum_seed, CartBox, CylBox};
use fdlab_core::thresholds::{cellularity_p, fig1_table, hausdorff_exponent, ExponentValue};
use fdlab_core::{CartPoint, CylPoint, Mat3, SquareFirstCoordinate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::mesh::{torus_mesh, Which};
use crate::report::Check;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Multiplies every sample count.
    pub scale: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 0, scale: 1.0 }
    }
}

impl VerifyConfig {
    fn n(&self, full: usize) -> usize {
        ((full as f64 * self.scale).round() as usize).max(1)
    }

    fn rng(&self, id: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(stratum_seed(self.seed, id))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub checks: Vec<Check>,
    pub data: Value,
    pub pass: bool,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn to_json(&self) -> Value {
        json!({ "id": self.id, "name": self.name, "pass": self.pass, "checks": self.checks, "data": self.data })
    }

    pub fn summary(&self) -> Check {
        Check::flag(format!("{:02}_{}", self.id, self.name), self.pass)
    }
}

pub const CRITERIA: [&str; 14] = [
    "interface_continuity",
    "derivative_correctness",
    "jacobian_consistency",
    "integrability_threshold",
    "fiber_catalogue",
    "inversion_round_trip",
    "monotonicity_h0",
    "wedge_inequality",
    "pullback_norm_estimate",
    "weak_commutation",
    "change_of_variables",
    "exponent_tables",
    "dimension_estimates",
    "meshes",
];

pub const FORM_CRITERIA: [usize; 3] = [8, 9, 10];

pub fn run(id: usize, cfg: &VerifyConfig) -> CriterionResult {
    let start = Instant::now();
    let (checks, data) = match id {
        1 => interface_continuity(cfg),
        2 => derivative_correctness(cfg),
        3 => jacobian_consistency(cfg),
        4 => integrability_threshold(cfg),
        5 => fiber_catalogue(),
        6 => inversion_round_trip(cfg),
        7 => monotonicity(cfg),
        8 => wedge_inequality(cfg),
        9 => pullback_norm(cfg),
        10 => weak_commutation(cfg),
        11 => change_of_variables(cfg),
        12 => exponent_tables(),
        13 => dimension_estimates(),
        14 => meshes(),
        _ => panic!("no criterion {id}"),
    };
    let seconds = start.elapsed().as_secs_f64();
    let mut checks = checks;
    match id {
        1 => checks.push(Check::flag("runtime_under_10s", seconds < 10.0)),
        4 => checks.push(Check::flag("runtime_under_600s", seconds <= 600.0)),
        12 => checks.push(Check::flag("runtime_under_1s", seconds < 1.0)),
        _ => {}
    }
    let pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
    CriterionResult { id, name: CRITERIA[id - 1], checks, data, pass, seconds }
}

pub fn run_all(cfg: &VerifyConfig, ids: &[usize]) -> Vec<CriterionResult> {
    ids.iter().map(|&id| run(id, cfg)).collect()
}

fn uniform_cyl<R: Rng>(rng: &mut R, b: &CylBox) -> CylPoint {
    CylPoint::new(rng.random_range(b.r.0..b.r.1), rng.random_range(b.theta.0..b.theta.1), rng.random_range(b.z.0..b.z.1))
}

/// Rejection samples from the default box.
fn points_where<R: Rng>(rng: &mut R, n: usize, keep: impl Fn(CylPoint) -> bool) -> Vec<CylPoint> {
    let b = CylBox::default();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = uniform_cyl(rng, &b);
        if keep(p) {
            out.push(p);
        }
    }
    out
}

fn max_f64(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

/// Parallel map over a slice in fixed chunks, results in order.
fn par_over<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync) -> Vec<U> {
    const CHUNK: usize = 4096;
    par_map(items.len().div_ceil(CHUNK), |c| items[c * CHUNK..((c + 1) * CHUNK).min(items.len())].iter().map(&f).collect::<Vec<_>>())
        .into_iter()
        .flatten()
        .collect()
}

fn interface_continuity(cfg: &VerifyConfig) -> (Vec<Check>, Value) {
    let n = cfg.n(1_000_000);
    let mut rng = cfg.rng(1);
    let pts: Vec<CylPoint> = (0..n)
        .map(|_| {
            let r: f64 = rng.random_range(0.0..=1.0);
            let z = if rng.random_bool(0.5) { r } else { -r };
            CylPoint::new(r, rng.random_range(-PI..PI), z)
        })
        .collect();
    let diff = max_f64(par_over(&pts, |&p| eval_square(p).dist(eval_cut(p))));
    (vec![Check::below("max_formula_gap", diff, 1e-12)], json!({ "points": n }))
}

fn smooth_points(cfg: &VerifyConfig, id: usize, n: usize, margin: f64) -> Vec<CylPoint> {
    points_where(&mut cfg.rng(id), n, |p| SingularLocus::nonsmooth_distance(p) > margin)
}

fn frob(m: &Mat3) -> f64 {
    m.frobenius()
}

fn derivative_correctness(cfg: &VerifyConfig) -> (Vec<Check>, Value) {
    let n = cfg.n(10_000);
    let pts = smooth_points(cfg, 2, n, 0.05);
    let errs = par_over(&pts, |&p| {
        let a = bingmap::frame_differential(p, 0.05).expect("smooth point");
        let f = bingmap::fd_differential(p, 1e-5, 0.05).expect("smooth point");
        frob(&(a - f)) / frob(&a)
    });
    (vec![Check::below("max_relative_error", max_f64(errs), 1e-6)], json!({ "points": n, "step": 1e-5, "margin": 0.05 }))
}

fn jacobian_consistency(cfg: &VerifyConfig) -> (Vec<Check>, Value) {
    let n = cfg.n(10_000);
    let pts = smooth_points(cfg, 2, n, 0.05);
    let errs = par_over(&pts, |&p| {
        let d = bingmap::frame_differential_ae(p).det();
        (bingmap::jacobian(p) - d).abs() / d.abs()
    });
    let m = cfg.n(1_000_000);
    let random = points_where(&mut cfg.rng(3), m, |p| SingularLocus::degeneracy_distance(p) > 0.0);
    let nonpositive = par_over(&random, |&p| bingmap::jacobian(p) <= 0.0).into_iter().filter(|&b| b).count();
    (
        vec![
            Check::below("max_relative_error", max_f64(errs), 1e-10),
            Check::new("nonpositive_jacobians", nonpositive as f64, nonpositive == 0),
        ],
        json!({ "points": n, "positivity_points": m }),
    )
}

pub const KP_EXPONENTS: [f64; 4] = [0.30, 0.40, 0.45, 0.50];

fn integrability_threshold(cfg: &VerifyConfig) -> (Vec<Check>, Value) {
    let n = cfg.n(10_000_000);
    let tubes: Vec<ExclusionTube> = EPS_SCHEDULE.iter().map(|&e| ExclusionTube::uniform(e)).collect();
    let est = match integrate_kp_schedule(&KP_EXPONENTS, &CylBox::default(), &tubes, n, cfg.seed) {
        Ok(e) => e,
        Err(e) => return (vec![Check::flag(format!("integration: {e}"), false)], Value::Null),
    };
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (p, row) in KP_EXPONENTS.iter().zip(&est) {
        let samples: Vec<(f64, f64)> = row.iter().map(|e| (e.tube.eps_theta, e.value)).collect();
        let fit = divergence_fit(&samples);
        let label = format!("p{p:.2}");
        match fit {
            Ok(f) => {
                if *p < 0.5 {
                    checks.push(Check::new(format!("{label}_constant"), f.tail_change, f.model == TrendModel::Constant));
                } else {
                    checks.push(Check::flag(format!("{label}_log"), f.model == TrendModel::Log));
                    checks.push(Check::new(format!("{label}_slope_positive"), f.b, f.b > 0.0));
                    checks.push(Check::new(format!("{label}_r2"), f.r2, f.r2 > 0.99));
                }
                rows.push(json!({
                    "p": p,
                    "eps": EPS_SCHEDULE,
                    "values": row.iter().map(|e| e.value).collect::<Vec<_>>(),
                    "stderr": row.iter().map(|e| e.stderr).collect::<Vec<_>>(),
                    "model": f.model.name(),
                    "a": f.a,
                    "b": f.b,
                    "alpha": f.alpha,
                    "r2": f.r2,
                    "tail_change": f.tail_change,
                }));
            }
            Err(e) => checks.push(Check::flag(format!("{label}_fit: {e}"), false)),
        }
    }
    (checks, json!({ "samples": n, "fits": rows }))
}

pub const FIBER_CASES: [(f64, FiberKind); 7] = [
    (0.0, FiberKind::Circle),
    (0.25, FiberKind::FigureEight),
    (0.5, FiberKind::FigureEight),
    (0.75, FiberKind::FigureEight),
    (1.0, FiberKind::Circle),
    (1.5, FiberKind::Arc),
    (2.0, FiberKind::Arc),
];

fn fiber_catalogue() -> (Vec<Check>, Value) {
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (t, kind) in FIBER_CASES {
        let f = match fiber(CartPoint::new(-t, 0.0, 0.0)) {
            Ok(f) => f,
            Err(e) => {
                checks.push(Check::flag(format!("t{t}: {e}"), false));
                continue;
            }
        };
        checks.push(Check::flag(format!("t{t}_kind_{}", kind.name()), f.kind == kind));
        let res = f.max_residual(1000);
        checks.push(Check::below(format!("t{t}_residual"), res, 1e-9));
        if kind == FiberKind::Arc {
            let ends = f.components[0].endpoints().map(|(a, b)| (cyl_to_cart(a), cyl_to_cart(b)));
            let h = t - 1.0;
            let exact = ends.is_some_and(|(a, b)| {
                let want = [CartPoint::new(0.0, 0.0, -h), CartPoint::new(0.0, 0.0, h)];
                (a == want[0] && b == want[1]) || (a == want[1] && b == want[0])
            });
            checks.push(Check::flag(format!("t{t}_endpoints_exact"), exact));
        }
        rows.push(json!({ "t": t, "kind": f.kind.name(), "components": f.components.len(), "residual": res }));
    }
    (checks, json!({ "fibers": rows }))
}

/// Distance from the Jacobian degeneracy set at which a point counts as generic.
pub const GENERIC_DISTANCE: f64 = 0.01;

fn inversion_round_trip(cfg: &VerifyConfig) -> (Vec<Check>, Value) {
    let n = cfg.n(10_000);
    let pts = points_where(&mut cfg.rng(6), n, |p| SingularLocus::degeneracy_distance(p) >= GENERIC_DISTANCE);
    let out = par_over(&pts, |&p| invert(eval(p), 1e-12).map(|q| cyl_to_cart(q).dist(cyl_to_cart(p))));
    let failures = out.iter().filter(|r| r.is_err()).count();
    let worst = max_f64(out.iter().filter_map(|r| r.as_ref().ok().copied()));
    (
        vec![Check::new("failures", failures as f64, failures == 0), Check::below("max_error", worst, 1e-8)],
        json!({ "points": n, "generic_distance": GENERIC_DISTANCE }),
    )
}

pub const BALL_RADIUS: f64 = 0.1;
pub const BALL_RESOLUTION: usize = 128;

fn monotonicity(cfg: &VerifyConfig) -> (Vec<Check>, Value) {
    let random = cfg.n(90).min(90);
    let mut rng = cfg.rng(7);
    let mut centres: Vec<CartPoint> = (0..random).map(|_| eval(uniform_cyl(&mut rng, &CylBox::default()))).collect();
    centres.extend((0..10).map(|i| CartPoint::new(-3.0 * i as f64 / 9.0, 0.0, 0.0)));
    let counts: Vec<Result<usize, String>> = centres
        .iter()
        .map(|&y| {
            preimage_components(&BingMap, y, BALL_RADIUS, &GridSpec::bing(y, BALL_RADIUS, BALL_RESOLUTION))
                .map(|r| r.components)
                .map_err(|e| e.to_string())
        })
        .collect();
    let connected = counts.iter().filter(|c| matches!(c, Ok(1))).count();
    let control_spec = GridSpec { resolution: BALL_RESOLUTION, bbox: CartBox::new([-2.0; 3], [2.0; 3]).expect("box"), lipschitz: 4.0 };
    let control = preimage_components(&SquareFirstCoordinate, CartPoint::new(1.0, 0.0, 0.0), BALL_RADIUS, &control_spec);
    let control_count = control.as_ref().map(|r| r.components).unwrap_or(0);
    let bad: Vec<Value> = centres
        .iter()
        .zip(&counts)
        .filter(|(_, c)| !matches!(c, Ok(1)))
        .map(|(y, c)| json!({ "centre": [y.x, y.y, y.z], "result": format!("{c:?}") }))
        .collect();
    (
        vec![
            Check::new("connected_balls", connected as f64, connected == centres.len()),
            Check::new("control_components", control_count as f64, control_count == 2),
        ],
        json!({ "balls": centres.len(), "on_half_line": 10, "radius": BALL_RADIUS, "resolution": BALL_RESOLUTION, "failures": bad }),
    )
}

fn random_positive_matrix<R: Rng>(rng: &mut R) -> Mat3 {
    loop {
        let mut m = Mat3(std::array::from_fn(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0))));
        if m.det() < 0.0 {
            m.0[0] = m.0[0].map(|v| -v);
        }
        if m.det() > 1e-9 {
            return m;
        }
    }
}

fn wedge_inequality(cfg: &VerifyConfig) -> (Vec<Check>, Value) {
    let n = cfg.n(100_000);
    let mut rng = cfg.rng(8);
    let mats: Vec<Mat3> = (0..n).map(|_| random_positive_matrix(&mut rng)).collect();
    let m = cfg.n(10_000);
    let pts = points_where(&mut rng, m, |p| SingularLocus::nonsmooth_distance(p) > 1e-3 && bingmap::jacobian(p) > 0.0);
    let smooth: Vec<Mat3> = pts.iter().map(|&p| bingmap::frame_differential_ae(p)).collect();
    let mut checks = Vec::new();
    for (label, set) in [("random", &mats), ("map", &smooth)] {
        for k in [1, 2] {
            let bad = par_over(set, |a| !check_wedge_inequality(a, k).unwrap_or(false)).into_iter().filter(|&b| b).count();
            checks.push(Check::new(format!("{label}_k{k}_violations"), bad as f64, bad == 0));
        }
    }
    (checks, json!({ "matrices": n, "map_points": m }))
}

/// Box at distance at least 0.1 from the degeneracy set.
pub fn pullback_box() -> CartBox {
    CartBox::new([0.1, 0.1, 0.1], [1.5, 1.0, 0.9]).expect("box")
}

pub const PULLBACK_CONFIGS: [(usize, f64, f64); 3] = [(1, 3.0, 1.0), (2, 1.5, 2.0), (1, 4.0, 0.5)];

fn image_form(k: usize) -> BumpForm {
    let coeffs = match k {
        1 => KCovector::new(1, &[1.0, -0.5, 0.25]),
        _ => KCovector::new(2, &[0.3, 1.0, -0.7]),
    }
    .expect("coefficients");
    BumpForm::new(CartPoint::new(-0.2, 0.1, 0.1), [4.0; 3], [0.2, -0.1, 0.3], coeffs).expect("bump")
}

fn pullback_norm(cfg: &VerifyConfig) -> (Vec<Check>, Value) {
    let n = cfg.n(1_000_000);
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (i, (k, p, q)) in PULLBACK_CONFIGS.into_iter().enumerate() {
        let label = format!("k{k}_p{p}_q{q}");
        match verify_pullback_estimate(&BingMap, &image_form(k), p, q, &pullback_box(), n, stratum_seed(cfg.seed, 90 + i)) {
            Ok(r) => {
                checks.push(
                    Check::new(label.clone(), r.lhs - r.rhs, r.pass).with_stderr((r.lhs_stderr.powi(2) + r.rhs_stderr.powi(2)).sqrt()),
                );
                rows.push(json!({ "k": k, "p": p, "q": q, "r": r.r, "lhs": r.lhs, "lhs_stderr": r.lhs_stderr, "rhs": r.rhs, "rhs_stderr": r.rhs_stderr }));
            }
            Err(e) => checks.push(Check::flag(format!("{label}: {e}"), false)),
        }
    }
    (checks, json!({ "samples": n, "configs": rows }))
}

/// Domain bump centres and half-widths, each straddling at least one stratum.
pub const BUMPS: [([f64; 3], f64); 5] =
    [([0.8, 0.1, 0.1], 0.4), ([-0.9, 0.2, -0.1], 0.35), ([0.0, 0.0, 0.5], 0.6), ([1.1, -0.3, 0.0], 0.3), ([0.3, 0.5, -0.4], 0.45)];

fn commutation_pair(i: usize, k: usize) -> (BumpForm, BumpForm) {
    let (c, half) = BUMPS[i];
    let s = i as f64;
    let omega_coeffs = if k == 1 {
        KCovector::new(1, &[1.0, 0.5 - 0.2 * s, 0.3 * s - 0.4])
    } else {
        KCovector::new(2, &[0.2 * s - 0.3, 1.0, 0.6 - 0.1 * s])
    }
    .expect("coefficients");
    let eta_coeffs = if k == 1 { KCovector::new(1, &[0.4, -1.0 + 0.3 * s, 0.7]).expect("coefficients") } else { KCovector::scalar(1.0) };
    let omega = BumpForm::new(CartPoint::new(c[0], c[1], c[2]), [half; 3], [0.3, -0.2 * s, 0.1], omega_coeffs).expect("bump");
    let y = eval(CartPoint::new(c[0], c[1], c[2]).to_cyl());
    let eta =
        BumpForm::new(CartPoint::new(y.x + 0.3, y.y - 0.2, y.z + 0.1), [1.5; 3], [0.2, 0.4 - 0.1 * s, -0.3], eta_coeffs).expect("bump");
    (omega, eta)
}

fn weak_commutation(cfg: &VerifyConfig) -> (Vec<Check>, Value) {
    let n = cfg.n(1_000_000);
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for i in 0..BUMPS.len() {
        for k in [1, 2] {
            let (omega, eta) = commutation_pair(i, k);
            let label = format!("pair{i}_k{k}");
            match verify_commutation(&BingMap, &omega, &eta, n, stratum_seed(cfg.seed, 100 + 2 * i + k)) {
                Ok(r) => {
                    checks.push(Check::new(label, r.residual, r.pass).with_stderr(r.stderr));
                    rows.push(json!({ "pair": i, "k": k, "left": r.left, "right": r.right, "residual": r.residual, "stderr": r.stderr }));
                }
                Err(e) => checks.push(Check::flag(format!("{label}: {e}"), false)),
            }
        }
    }
    (checks, json!({ "samples": n, "pairs": rows }))
}

pub const COV_RADIUS: f64 = 0.05;

fn change_of_variables(cfg: &VerifyConfig) -> (Vec<Check>, Value) {
    let n = cfg.n(1_000_000);
    let mut rng = cfg.rng(11);
    let mut centres = Vec::new();
    while centres.len() < 10 {
        let y = eval(uniform_cyl(&mut rng, &CylBox::default()));
        if half_line_distance(y) >= 2.0 * COV_RADIUS {
            centres.push(y);
        }
    }
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (i, y) in centres.iter().enumerate() {
        let label = format!("ball{i}");
        match change_of_variables_check(*y, COV_RADIUS, n, stratum_seed(cfg.seed, 110 + i)) {
            Ok(r) => {
                checks.push(Check::new(label, r.integral - r.ball_volume, r.pass).with_stderr(r.stderr));
                rows.push(json!({ "centre": [y.x, y.y, y.z], "integral": r.integral, "stderr": r.stderr, "ball_volume": r.ball_volume }));
            }
            Err(e) => checks.push(Check::flag(format!("{label}: {e}"), false)),
        }
    }
    (checks, json!({ "samples": n, "radius": COV_RADIUS, "balls": rows }))
}

/// The published table of critical exponents, rows `n = 3..=8`, entries `k = 1..n-1`.
pub const FIG1: [&[(i64, i64)]; 6] = [
    &[(1, 2), (1, 2)],
    &[(1, 1), (1, 1), (1, 1)],
    &[(3, 2), (2, 3), (2, 3), (3, 2)],
    &[(2, 1), (1, 1), (1, 1), (1, 1), (2, 1)],
    &[(5, 2), (4, 3), (3, 4), (3, 4), (4, 3), (5, 2)],
    &[(3, 1), (5, 3), (1, 1), (1, 1), (1, 1), (5, 3), (3, 1)],
];

fn exponent_tables() -> (Vec<Check>, Value) {
    let q = |n, d| ExponentValue::new(n, d).expect("rational");
    let table = fig1_table(8).ok();
    let matches = table.as_ref().is_some_and(|t| {
        t.rows.len() == FIG1.len()
            && t.rows
                .iter()
                .zip(FIG1)
                .all(|(row, want)| row.values.len() == want.len() && row.values.iter().zip(want).all(|(v, &(a, b))| *v == q(a, b)))
    });
    let checks = vec![
        Check::flag("fig1_table_8", matches),
        Check::flag("hausdorff_3_2", hausdorff_exponent(3, q(2, 1)).ok() == Some(q(1, 1))),
        Check::flag("hausdorff_3_half", hausdorff_exponent(3, q(1, 2)).ok() == Some(q(2, 1))),
        Check::flag("cellularity_3", cellularity_p(3).ok() == Some(q(1, 2))),
    ];
    (checks, json!({ "n_max": 8 }))
}

fn cloud_dimension(cloud: &[CartPoint]) -> Result<f64, String> {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in cloud {
        for (a, v) in p.to_array().into_iter().enumerate() {
            lo[a] = lo[a].min(v);
            hi[a] = hi[a].max(v);
        }
    }
    let diam = (0..3).map(|a| (hi[a] - lo[a]).powi(2)).sum::<f64>().sqrt();
    let d = if diam > 0.0 { diam } else { 1.0 };
    box_counting(cloud, &log_scales(1e-3 * d, 1e-1 * d, 5)).map(|e| e.dimension).map_err(|e| e.to_string())
}

pub const DIMENSION_POINTS: usize = 100_000;

fn dimension_estimates() -> (Vec<Check>, Value) {
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (label, t) in [("circle", 0.0), ("figure_eight", 0.5), ("arc", 2.0)] {
        match fiber(CartPoint::new(-t, 0.0, 0.0)).map_err(|e| e.to_string()).and_then(|f| cloud_dimension(&f.cloud(DIMENSION_POINTS))) {
            Ok(d) => {
                checks.push(Check::new(label, d, (0.9..=1.1).contains(&d)));
                rows.push(json!({ "fiber": label, "t": t, "dimension": d }));
            }
            Err(e) => checks.push(Check::flag(format!("{label}: {e}"), false)),
        }
    }
    let y = CartPoint::new(0.3, 0.2, 0.1);
    match fiber(y).map_err(|e| e.to_string()).and_then(|f| cloud_dimension(&f.cloud(DIMENSION_POINTS))) {
        Ok(d) => {
            checks.push(Check::below("singleton", d, 0.2));
            rows.push(json!({ "fiber": "singleton", "target": [y.x, y.y, y.z], "dimension": d }));
        }
        Err(e) => checks.push(Check::flag(format!("singleton: {e}"), false)),
    }
    (
        checks,
        json!({ "points_per_component": DIMENSION_POINTS, "estimates": rows, "positive_h1_fibers_need_p_below": 2, "observed_threshold": 0.5 }),
    )
}

pub const MESH_RESOLUTION: usize = 64;

fn meshes() -> (Vec<Check>, Value) {
    let mut checks = Vec::new();
    for (c, chi) in [(0.25, 0), (0.5, 0), (0.75, 0), (1.5, 2), (2.0, 2)] {
        match torus_mesh(c, MESH_RESOLUTION) {
            Ok(m) => {
                let e = m.euler_characteristic();
                checks.push(Check::new(format!("euler_c{c}"), e as f64, e == chi));
                checks.push(Check::flag(format!("closed_c{c}"), m.is_closed_oriented()));
            }
            Err(e) => checks.push(Check::flag(format!("euler_c{c}: {e}"), false)),
        }
    }
    match crate::mesh::export_mesh(0.5, MESH_RESOLUTION, Which::Image) {
        Ok(m) => {
            let ring: Vec<CartPoint> = m.params.iter().zip(&m.vertices).filter(|(p, _)| p.theta == 0.0).map(|(_, v)| *v).collect();
            let spread = max_f64(ring.iter().map(|v| v.dist(ring[0])));
            let offset = ring[0].dist(CartPoint::new(-0.5, 0.0, 0.0));
            checks.push(Check::below("image_ring_spread", spread, 1e-12));
            checks.push(Check::below("image_ring_offset", offset, 1e-12));
        }
        Err(e) => checks.push(Check::flag(format!("image: {e}"), false)),
    }
    (checks, json!({ "resolution": MESH_RESOLUTION }))
}
