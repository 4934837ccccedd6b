use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fdlab_core::bingmap::{self, fiber, invert, BingMap, SingularLocus, DEFAULT_MARGIN};
use fdlab_core::coords::{cart_to_cyl, classify_region, cyl_to_cart, jacobian_case, torus_level, Region};
use fdlab_core::quadrature::{
    box_counting, divergence_fit, energy_epq, integrate_kp_schedule, log_scales, preimage_components, Domain, ExclusionTube, GridSpec,
    IntegralEstimate, EPS_SCHEDULE,
};
use fdlab_core::sampling::{CartBox, CylBox};
use fdlab_core::thresholds::fig1_table;
use fdlab_core::{CartPoint, CylPoint, Mat3, SquareFirstCoordinate};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::mesh::{self, Which};
use crate::report::{error_kind, Check, ErrorInfo, Report};
use crate::table::table_csv;
use crate::verify::{self, VerifyConfig, FORM_CRITERIA};

#[derive(Debug, Parser, Serialize)]
#[command(name = "fdlab", version, about = "Evaluate and verify a monotone Sobolev map of finite distortion")]
pub struct Cli {
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Add wall-clock times to the report.
    #[arg(long, global = true)]
    pub timings: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshKind {
    Domain,
    Image,
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let v: Vec<f64> = s.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"))).collect::<Result<_, _>>()?;
    match v[..] {
        [a, b, c] if v.iter().all(|x| x.is_finite()) => Ok([a, b, c]),
        _ => Err("expected three finite numbers a,b,c".into()),
    }
}

fn parse_id(t: &str) -> Result<usize, String> {
    match t.trim().parse::<usize>() {
        Ok(i) if (1..=14).contains(&i) => Ok(i),
        _ => Err(format!("{t:?} is not a criterion id in 1..=14")),
    }
}

#[derive(Debug, Args, Serialize)]
#[group(required = true, multiple = false)]
pub struct PointArgs {
    /// Cylindrical point r,theta,z.
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
    pub point: Option<[f64; 3]>,
    /// Cartesian point x,y,z.
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
    pub cart: Option<[f64; 3]>,
}

impl PointArgs {
    fn cyl(&self) -> CylPoint {
        match (self.point, self.cart) {
            (Some([r, t, z]), _) => CylPoint::new(r, t, z),
            (_, Some(c)) => cart_to_cyl(CartPoint::from_array(c)),
            _ => unreachable!("clap requires one of --point, --cart"),
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct TargetArg {
    /// Image point x,y,z.
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
    pub target: [f64; 3],
}

#[derive(Debug, Args, Serialize)]
pub struct KpArgs {
    /// Distortion exponents.
    #[arg(long = "p", value_delimiter = ',', default_values_t = [0.3, 0.4, 0.45, 0.5])]
    pub p: Vec<f64>,
    /// Exclusion-tube widths.
    #[arg(long, value_delimiter = ',', default_values_t = EPS_SCHEDULE)]
    pub eps: Vec<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Evaluate h.
    Eval(PointArgs),
    /// Differential and Jacobian.
    Jac {
        #[command(flatten)]
        at: PointArgs,
        #[arg(long, default_value_t = DEFAULT_MARGIN)]
        margin: f64,
    },
    /// Outer distortion K = |Dh|^3 / J.
    Distortion {
        #[command(flatten)]
        at: PointArgs,
        #[arg(long, default_value_t = DEFAULT_MARGIN)]
        margin: f64,
    },
    /// Fiber over a target point.
    Fiber {
        #[command(flatten)]
        target: TargetArg,
        /// Samples per component for the residual check.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Preimage of a target point off the non-injective half-line.
    Invert {
        #[command(flatten)]
        target: TargetArg,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Integral of K^p outside exclusion tubes.
    Integrate(KpArgs),
    /// Integrate, then classify the trend in eps.
    Fit(KpArgs),
    /// Connected components of the preimage of a ball.
    Components {
        #[command(flatten)]
        target: TargetArg,
        #[arg(long, default_value_t = 0.1)]
        radius: f64,
        #[arg(long, default_value_t = 128)]
        resolution: usize,
        /// Use the non-monotone control map (x^2, y, z) instead of h.
        #[arg(long)]
        control: bool,
    },
    /// Box-counting dimension of a fiber.
    Dimension {
        #[command(flatten)]
        target: TargetArg,
        /// Points per fiber component.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 5)]
        scales: usize,
    },
    /// Energy of |Dh|^p + J^-q over the default box minus a tube.
    Energy {
        #[arg(long = "p", default_value_t = 3.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
    },
    /// Critical exponents, exact rationals.
    Table {
        #[arg(long, default_value_t = 8)]
        nmax: u32,
    },
    /// Form checks: wedge inequality, pullback estimate, weak commutation.
    VerifyForms {
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
    /// The full acceptance check list.
    VerifyAll {
        /// Multiplies every sample count.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',', value_parser = parse_id)]
        only: Option<Vec<usize>>,
    },
    /// Triangulate T_c or its image and write an OBJ file.
    ExportMesh {
        #[arg(long)]
        level: f64,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        #[arg(long, value_enum, default_value_t = MeshKind::Domain)]
        which: MeshKind,
        #[arg(long)]
        mesh: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Eval(_) => "eval",
            Command::Jac { .. } => "jac",
            Command::Distortion { .. } => "distortion",
            Command::Fiber { .. } => "fiber",
            Command::Invert { .. } => "invert",
            Command::Integrate(_) => "integrate",
            Command::Fit(_) => "fit",
            Command::Components { .. } => "components",
            Command::Dimension { .. } => "dimension",
            Command::Energy { .. } => "energy",
            Command::Table { .. } => "table",
            Command::VerifyForms { .. } => "verify-forms",
            Command::VerifyAll { .. } => "verify-all",
            Command::ExportMesh { .. } => "export-mesh",
        }
    }

    fn csv_capable(&self) -> bool {
        matches!(self, Command::Table { .. } | Command::Integrate(_) | Command::Fit(_))
    }
}

/// What to print and the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

fn arr(p: CartPoint) -> Value {
    json!([p.x, p.y, p.z])
}

fn cyl(p: CylPoint) -> Value {
    json!([p.r, p.theta, p.z])
}

fn mat(m: &Mat3) -> Value {
    json!(m.0)
}

fn point_data(p: CylPoint) -> Value {
    json!({
        "cyl": cyl(p),
        "cart": arr(cyl_to_cart(p)),
        "region": match classify_region(p) { Region::Square => "SQUARE", Region::Cut => "CUT" },
        "level": torus_level(p).value(),
    })
}

fn estimate_json(e: &IntegralEstimate) -> Value {
    json!({
        "p": e.p,
        "eps": e.tube.eps_theta,
        "value": e.value,
        "stderr": e.stderr,
        "samples": e.samples,
        "by_case": { "inner": e.by_case[0], "cone": e.by_case[1], "outer": e.by_case[2] },
    })
}

fn config_echo(cli: &Cli, format: Format) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("seed".into(), json!(cli.seed));
    m.insert("format".into(), json!(format));
    m.insert("output".into(), json!(cli.output));
    m.insert("args".into(), serde_json::to_value(&cli.command).expect("arguments serialise"));
    m
}

type Body = Result<(Vec<Check>, Value, Option<String>), fdlab_core::Error>;

/// Runs a parsed command line. Never exits; the caller prints `text` and
/// exits with `code`.
pub fn run(cli: &Cli) -> Outcome {
    let format = cli.format.unwrap_or(if matches!(cli.command, Command::Table { .. }) { Format::Csv } else { Format::Json });
    if format == Format::Csv && !cli.command.csv_capable() {
        return Outcome { text: format!("error: --format csv is not available for {}\n", cli.command.name()), code: 2 };
    }
    let start = Instant::now();
    let mut report = Report::new(cli.command.name(), config_echo(cli, format));
    let mut timings = Map::new();
    let body: Body = execute(cli, &mut timings);
    match body {
        Ok((checks, data, csv)) => {
            report.checks = checks;
            report.data = data;
            if format == Format::Csv {
                let code = report.exit_code();
                return Outcome { text: csv.unwrap_or_default(), code };
            }
        }
        Err(e) => {
            report.error = Some(ErrorInfo { kind: error_kind(&e).to_string(), message: e.to_string() });
        }
    }
    if cli.timings {
        timings.insert("total_seconds".into(), json!(start.elapsed().as_secs_f64()));
        report.timings = Some(timings);
    }
    Outcome { text: report.to_json(), code: report.exit_code() }
}

fn execute(cli: &Cli, timings: &mut Map<String, Value>) -> Body {
    let seed = cli.seed;
    match &cli.command {
        Command::Eval(at) => {
            let p = at.cyl();
            let y = bingmap::eval(p);
            Ok((vec![], json!({ "point": point_data(p), "value": arr(y) }), None))
        }
        Command::Jac { at, margin } => {
            let p = at.cyl();
            let frame = bingmap::frame_differential(p, *margin)?;
            let cart = frame * bingmap::frame_rotation(p).transpose();
            let j = bingmap::jacobian(p);
            let det = frame.det();
            let rel = if det != 0.0 { (j - det).abs() / det.abs() } else { (j - det).abs() };
            Ok((
                vec![Check::below("closed_form_vs_det", rel, 1e-10)],
                json!({
                    "point": point_data(p),
                    "frame_differential": mat(&frame),
                    "cartesian_differential": mat(&cart),
                    "jacobian": j,
                    "case": jacobian_case(p).name(),
                }),
                None,
            ))
        }
        Command::Distortion { at, margin } => {
            let p = at.cyl();
            let k = bingmap::distortion(p, *margin)?;
            let norm = bingmap::frame_differential(p, *margin)?.spectral_norm();
            Ok((
                vec![],
                json!({ "point": point_data(p), "distortion": k, "norm": norm, "jacobian": bingmap::jacobian(p), "degeneracy_distance": SingularLocus::degeneracy_distance(p) }),
                None,
            ))
        }
        Command::Fiber { target, samples } => {
            let y = CartPoint::from_array(target.target);
            let f = fiber(y)?;
            let res = f.max_residual(*samples);
            let comps: Vec<Value> = f
                .components
                .iter()
                .map(|c| {
                    let mut v = json!({ "curve": format!("{c:?}") });
                    if let Some((a, b)) = c.endpoints() {
                        v["endpoints"] = json!([arr(cyl_to_cart(a)), arr(cyl_to_cart(b))]);
                    }
                    v
                })
                .collect();
            Ok((
                vec![Check::below("max_residual", res, 1e-9)],
                json!({ "target": arr(y), "kind": f.kind.name(), "components": comps, "wedge": f.wedge.map(arr) }),
                None,
            ))
        }
        Command::Invert { target, tol } => {
            let y = CartPoint::from_array(target.target);
            let p = invert(y, *tol)?;
            let res = bingmap::eval(p).dist(y);
            Ok((vec![Check::new("residual", res, res <= *tol)], json!({ "target": arr(y), "preimage": point_data(p) }), None))
        }
        Command::Integrate(a) | Command::Fit(a) => {
            let tubes: Vec<ExclusionTube> = a.eps.iter().map(|&e| ExclusionTube::uniform(e)).collect();
            let t0 = Instant::now();
            let est = integrate_kp_schedule(&a.p, &CylBox::default(), &tubes, a.samples, seed)?;
            timings.insert("integrate_seconds".into(), json!(t0.elapsed().as_secs_f64()));
            let mut csv = String::from("p,eps,value,stderr\n");
            for e in est.iter().flatten() {
                csv.push_str(&format!("{},{},{},{}\n", e.p, e.tube.eps_theta, e.value, e.stderr));
            }
            let rows: Vec<Value> = est.iter().flatten().map(estimate_json).collect();
            if matches!(cli.command, Command::Integrate(_)) {
                return Ok((vec![], json!({ "estimates": rows }), Some(csv)));
            }
            let mut fits = Vec::new();
            let mut fit_csv = String::from("p,model,a,b,alpha,r2,tail_change\n");
            for row in &est {
                let f = divergence_fit(&row.iter().map(|e| (e.tube.eps_theta, e.value)).collect::<Vec<_>>())?;
                fit_csv.push_str(&format!("{},{},{},{},{},{},{}\n", row[0].p, f.model.name(), f.a, f.b, f.alpha, f.r2, f.tail_change));
                fits.push(json!({ "p": row[0].p, "model": f.model.name(), "a": f.a, "b": f.b, "alpha": f.alpha, "r2": f.r2, "tail_change": f.tail_change }));
            }
            Ok((vec![], json!({ "estimates": rows, "fits": fits }), Some(fit_csv)))
        }
        Command::Components { target, radius, resolution, control } => {
            let y = CartPoint::from_array(target.target);
            let rep = if *control {
                let spec = GridSpec { resolution: *resolution, bbox: CartBox::new([-2.0; 3], [2.0; 3])?, lipschitz: 4.0 };
                preimage_components(&SquareFirstCoordinate, y, *radius, &spec)?
            } else {
                preimage_components(&BingMap, y, *radius, &GridSpec::bing(y, *radius, *resolution))?
            };
            Ok((
                vec![],
                json!({
                    "target": arr(y),
                    "components": rep.components,
                    "occupied": rep.occupied,
                    "resolution": rep.resolution,
                    "retries": rep.retries,
                    "refined": rep.refined,
                    "bbox": { "lo": rep.bbox.lo, "hi": rep.bbox.hi },
                }),
                None,
            ))
        }
        Command::Dimension { target, samples, scales } => {
            let y = CartPoint::from_array(target.target);
            let f = fiber(y)?;
            let cloud = f.cloud(*samples);
            let mut lo = [f64::INFINITY; 3];
            let mut hi = [f64::NEG_INFINITY; 3];
            for p in &cloud {
                for (a, v) in p.to_array().into_iter().enumerate() {
                    lo[a] = lo[a].min(v);
                    hi[a] = hi[a].max(v);
                }
            }
            let diam = (0..3).map(|a| (hi[a] - lo[a]).powi(2)).sum::<f64>().sqrt();
            let d = if diam > 0.0 { diam } else { 1.0 };
            let est = box_counting(&cloud, &log_scales(1e-3 * d, 1e-1 * d, *scales))?;
            Ok((vec![], json!({ "target": arr(y), "kind": f.kind.name(), "dimension": est.dimension, "counts": est.counts }), None))
        }
        Command::Energy { p, q, eps, samples } => {
            let e = energy_epq(&BingMap, *p, *q, &Domain::Cyl(CylBox::default()), ExclusionTube::uniform(*eps), *samples, seed)?;
            Ok((vec![], json!({ "p": p, "q": q, "eps": eps, "value": e.value, "stderr": e.stderr, "samples": e.samples }), None))
        }
        Command::Table { nmax } => {
            let t = fig1_table(*nmax)?;
            let rows: Vec<Value> =
                t.rows.iter().map(|r| json!({ "n": r.n, "values": r.values.iter().map(|v| v.to_string()).collect::<Vec<_>>() })).collect();
            Ok((vec![], json!({ "rows": rows }), Some(table_csv(&t))))
        }
        Command::VerifyForms { scale } => Ok(verify_body(&VerifyConfig { seed, scale: *scale }, &FORM_CRITERIA, timings)),
        Command::VerifyAll { scale, only } => {
            let all: Vec<usize> = (1..=14).collect();
            Ok(verify_body(&VerifyConfig { seed, scale: *scale }, only.as_deref().unwrap_or(&all), timings))
        }
        Command::ExportMesh { level, resolution, which, mesh: path } => {
            let which = match which {
                MeshKind::Domain => Which::Domain,
                MeshKind::Image => Which::Image,
            };
            let write = |f: &dyn Fn(&mut std::fs::File) -> std::io::Result<()>| {
                std::fs::File::create(path)
                    .and_then(|mut file| f(&mut file))
                    .map_err(|_| fdlab_core::Error::OutOfRange("cannot write mesh file"))
            };
            match mesh::export_mesh(*level, *resolution, which) {
                Ok(m) => {
                    write(&|f| m.write_obj(f))?;
                    let mut checks = vec![];
                    if which == Which::Domain {
                        checks.push(Check::flag("closed_oriented", m.is_closed_oriented()));
                    }
                    Ok((
                        checks,
                        json!({
                            "path": path,
                            "which": format!("{which:?}").to_lowercase(),
                            "vertices": m.vertices.len(),
                            "faces": m.faces.len(),
                            "euler_characteristic": m.euler_characteristic(),
                        }),
                        None,
                    ))
                }
                Err(fdlab_core::Error::DegenerateLevel) => {
                    write(&|f| mesh::circle_polyline(*resolution, f))?;
                    Err(fdlab_core::Error::DegenerateLevel)
                }
                Err(e) => Err(e),
            }
        }
    }
}

fn verify_body(cfg: &VerifyConfig, ids: &[usize], timings: &mut Map<String, Value>) -> (Vec<Check>, Value, Option<String>) {
    let results = verify::run_all(cfg, ids);
    for r in &results {
        timings.insert(format!("{:02}_{}", r.id, r.name), json!(r.seconds));
    }
    (
        results.iter().map(|r| r.summary()).collect(),
        json!({ "scale": cfg.scale, "criteria": results.iter().map(|r| r.to_json()).collect::<Vec<_>>() }),
        None,
    )
}
