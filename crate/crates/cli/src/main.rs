//! Command line front end: load body/ribbon/rod specs, run the volume,
//! trace, section, rod and surface-bound operations, and emit CSV/JSON.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::{Point3, Vector3};

use guldin_core::body::{
    cross_section, halfspace_volume, monte_carlo_volume, ray_boundary_distance, section_area,
    SectionPlane, SliceQuad,
};
use guldin_core::curve::{trace_centroid_curve, CutOptions, TraceOptions};
use guldin_core::frames::perpendicular_unit;
use guldin_core::rod::bent_rod_centroid;
use guldin_core::spec::{BodySpec, RibbonSpec, RodConditions, RodFileSpec, RodResult};
use guldin_core::surface::{area_lower_bound, equality_defect, BoundaryTrace};
use guldin_core::volume::{centroid_curve_volume, pappus_volume, SliceSeries};
use guldin_core::{Error, ErrorClass};

/// Central table of numeric defaults. Every tunable the subcommands expose
/// bottoms out here so acceptance runs are reproducible.
mod defaults {
    /// Polar samples per cross-section.
    pub const SECTION_SAMPLES: usize = 256;
    /// Relative tolerance of adaptive slice-volume quadrature.
    pub const QUAD_REL_TOL: f64 = 1e-9;
    /// Composite Gauss-Legendre panels along a ribbon.
    pub const PANELS: usize = 64;
    /// Gauss-Legendre nodes per panel.
    pub const GL_ORDER: usize = 4;
    /// Trace step as a fraction of the bounding radius.
    pub const STEP_FRACTION: f64 = 1.0 / 500.0;
    /// Backward delta stop as a fraction of bounding_radius^3.
    pub const DELTA_MIN_FRACTION: f64 = 1e-6;
    /// Area floor as a fraction of bounding_radius^2.
    pub const AREA_FLOOR_FRACTION: f64 = 1e-6;
    /// Monte-Carlo sample count.
    pub const MC_SAMPLES: u64 = 10_000_000;
    /// Monte-Carlo seed.
    pub const MC_SEED: u64 = 0;
    /// Period of the t parameter for boundary-trace grids.
    pub const T_PERIOD: f64 = 2.0 * std::f64::consts::PI;
}

#[derive(Parser)]
#[command(
    name = "guldin",
    version,
    about = "volumes and centroids of solids sliced perpendicular to curved paths"
)]
struct Cli {
    /// Emit errors to stderr as machine-readable JSON.
    #[arg(long, global = true)]
    json_errors: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract one perpendicular cross-section profile.
    Section(SectionArgs),
    /// Volume by centroid-line, half-space, or perpendicular-slice
    /// integration.
    Volume(VolumeArgs),
    /// Trace the centroid curve through a point of a convex body.
    Trace(TraceArgs),
    /// Volume and centroid of a bent rod from a rod spec file.
    Rod(RodArgs),
    /// Lower bound for the lateral surface area of a swept solid.
    SurfaceBound(SurfaceArgs),
    /// Monte-Carlo volume/centroid oracle.
    Oracle(OracleArgs),
}

fn parse_triple(text: &str) -> Result<[f64; 3], String> {
    let parts: Vec<_> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z got `{text}`"));
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad component `{part}`: {e}"))?;
    }
    Ok(out)
}

#[derive(Args)]
struct SectionArgs {
    /// Body spec JSON path.
    #[arg(long)]
    body: PathBuf,
    /// Plane reference point "x,y,z".
    #[arg(long, value_parser = parse_triple)]
    point: [f64; 3],
    /// Plane normal "x,y,z".
    #[arg(long, value_parser = parse_triple)]
    normal: [f64; 3],
    /// Polar samples (even, >= 16).
    #[arg(long, default_value_t = defaults::SECTION_SAMPLES)]
    samples: usize,
    /// Write the profile CSV here (otherwise CSV goes to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VolumeArgs {
    #[arg(long)]
    body: PathBuf,
    /// centroid-line | halfspace | pappus
    #[arg(long)]
    mode: String,
    /// Axis of the centroid line (centroid-line mode).
    #[arg(long, value_parser = parse_triple)]
    axis: Option<[f64; 3]>,
    /// Reference point (centroid-line: a point on the line, default body
    /// hint; halfspace: point on the plane).
    #[arg(long, value_parser = parse_triple)]
    point: Option<[f64; 3]>,
    /// Half-space outward normal (halfspace mode).
    #[arg(long, value_parser = parse_triple)]
    normal: Option<[f64; 3]>,
    /// Ribbon spec JSON (pappus mode).
    #[arg(long)]
    ribbon: Option<PathBuf>,
    #[arg(long, default_value_t = defaults::PANELS)]
    panels: usize,
    #[arg(long, default_value_t = defaults::GL_ORDER)]
    gl_order: usize,
    #[arg(long, default_value_t = defaults::SECTION_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = defaults::QUAD_REL_TOL)]
    rel_tol: f64,
}

#[derive(Args)]
struct TraceArgs {
    #[arg(long)]
    body: PathBuf,
    /// Start point "x,y,z" (interior, or on the boundary).
    #[arg(long, value_parser = parse_triple)]
    p0: [f64; 3],
    /// Arc-length step.
    #[arg(long)]
    h: Option<f64>,
    /// Also trace backward toward the boundary (negative s).
    #[arg(long)]
    two_sided: bool,
    #[arg(long)]
    delta_min: Option<f64>,
    #[arg(long)]
    delta_max: Option<f64>,
    #[arg(long)]
    area_floor: Option<f64>,
    #[arg(long, default_value_t = defaults::SECTION_SAMPLES)]
    samples: usize,
    /// Write the trace CSV here and print a JSON summary to stdout;
    /// without it the CSV goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RodArgs {
    /// Rod spec JSON path.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SurfaceArgs {
    /// Body spec JSON (sections taken along --ribbon).
    #[arg(long)]
    body: Option<PathBuf>,
    /// Ribbon spec JSON.
    #[arg(long)]
    ribbon: PathBuf,
    /// Boundary trace CSV grid (s,t,u,v) instead of a body.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, default_value_t = defaults::PANELS)]
    sections: usize,
    #[arg(long, default_value_t = defaults::GL_ORDER)]
    gl_order: usize,
    #[arg(long, default_value_t = defaults::SECTION_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = defaults::T_PERIOD)]
    t_period: f64,
}

#[derive(Args)]
struct OracleArgs {
    /// Body spec JSON.
    #[arg(long)]
    body: Option<PathBuf>,
    /// Rod spec JSON (tube membership oracle).
    #[arg(long)]
    rod: Option<PathBuf>,
    #[arg(long, default_value_t = defaults::MC_SEED)]
    seed: u64,
    #[arg(short = 'n', long = "samples", default_value_t = defaults::MC_SAMPLES)]
    samples: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let class = err.class();
            if cli.json_errors {
                let payload = serde_json::json!({
                    "error": match class {
                        ErrorClass::Validation => "validation",
                        ErrorClass::Numerical => "numerical",
                        ErrorClass::Io => "io",
                    },
                    "message": err.to_string(),
                });
                eprintln!("{payload}");
            } else {
                eprintln!("error: {err}");
            }
            match class {
                ErrorClass::Validation => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(cmd: &Command) -> Result<(), Error> {
    match cmd {
        Command::Section(args) => run_section(args),
        Command::Volume(args) => run_volume(args),
        Command::Trace(args) => run_trace(args),
        Command::Rod(args) => run_rod(args),
        Command::SurfaceBound(args) => run_surface(args),
        Command::Oracle(args) => run_oracle(args),
    }
}

fn unit(v: [f64; 3], what: &str) -> Result<Vector3<f64>, Error> {
    let v = Vector3::from(v);
    if v.norm() < 1e-300 {
        return Err(Error::InvalidInput(format!("{what} must be nonzero")));
    }
    Ok(v.normalize())
}

fn run_section(args: &SectionArgs) -> Result<(), Error> {
    let body = BodySpec::from_path(&args.body)?.build()?;
    let plane = SectionPlane::new(unit(args.normal, "plane normal")?, Point3::from(args.point))?;
    let profile = cross_section(&body, &plane, args.samples)?;
    let summary = serde_json::json!({
        "area": profile.area,
        "centroid": [profile.centroid.x, profile.centroid.y, profile.centroid.z],
        "local_centroid": [profile.local_centroid.0, profile.local_centroid.1],
        "iu": profile.iu,
        "iv": profile.iv,
        "iuv": profile.iuv,
        "perimeter": profile.perimeter,
        "boundary_line_centroid": [
            profile.boundary_line_centroid.0,
            profile.boundary_line_centroid.1
        ],
        "empty": profile.is_empty(),
    });
    match &args.out {
        Some(path) => {
            let mut file = std::fs::File::create(path)?;
            profile.write_csv(&mut file)?;
            println!("{summary}");
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            profile.write_csv(&mut stdout)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn run_volume(args: &VolumeArgs) -> Result<(), Error> {
    let body = BodySpec::from_path(&args.body)?.build()?;
    let value = match args.mode.as_str() {
        "centroid-line" => {
            let axis = unit(
                args.axis
                    .ok_or_else(|| Error::InvalidInput("centroid-line mode needs --axis".into()))?,
                "axis",
            )?;
            let point = args
                .point
                .map(Point3::from)
                .unwrap_or_else(|| body.interior_hint());
            if !body.contains(&point) {
                return Err(Error::NotInterior(point.x, point.y, point.z));
            }
            // Chord of the body through `point` along the axis; slice areas
            // are integrated along it.
            let forward = ray_boundary_distance(&body, &point, &axis)?;
            let backward = ray_boundary_distance(&body, &point, &(-axis))?;
            let origin = point - axis * backward;
            let length = forward + backward;
            let samples = args.samples;
            let area = |s: f64| {
                section_area(&body, &axis, &(origin + axis * s), samples).unwrap_or(0.0)
            };
            let frame = guldin_core::frames::Frame::new(axis, perpendicular_unit(&axis))?;
            let ribbon = guldin_core::frames::Ribbon::line(origin, frame, length)?;
            centroid_curve_volume(&ribbon, area, args.rel_tol)?
        }
        "halfspace" => {
            let normal = unit(
                args.normal
                    .ok_or_else(|| Error::InvalidInput("halfspace mode needs --normal".into()))?,
                "normal",
            )?;
            let point = args
                .point
                .ok_or_else(|| Error::InvalidInput("halfspace mode needs --point".into()))?;
            halfspace_volume(
                &body,
                &normal,
                &Point3::from(point),
                &SliceQuad {
                    rel_tol: args.rel_tol,
                    area_samples: args.samples,
                },
            )?
        }
        "pappus" => {
            let ribbon_path = args
                .ribbon
                .as_ref()
                .ok_or_else(|| Error::InvalidInput("pappus mode needs --ribbon".into()))?;
            let ribbon = RibbonSpec::from_path(ribbon_path)?.build()?;
            let series =
                SliceSeries::from_body(&body, &ribbon, args.panels, args.gl_order, args.samples)?;
            pappus_volume(&series)?
        }
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown volume mode `{other}` (expected centroid-line, halfspace, or pappus)"
            )))
        }
    };
    println!(
        "{}",
        serde_json::json!({ "mode": args.mode, "volume": value })
    );
    Ok(())
}

fn run_trace(args: &TraceArgs) -> Result<(), Error> {
    let body = BodySpec::from_path(&args.body)?.build()?;
    let rb = body.bounding_radius();
    let mut opts = TraceOptions::for_body(&body);
    opts.step = args.h.unwrap_or(rb * defaults::STEP_FRACTION);
    opts.two_sided = args.two_sided;
    opts.delta_min = args
        .delta_min
        .unwrap_or(defaults::DELTA_MIN_FRACTION * rb.powi(3));
    if let Some(dmax) = args.delta_max {
        opts.delta_max = Some(dmax);
    }
    opts.area_floor = args
        .area_floor
        .unwrap_or(defaults::AREA_FLOOR_FRACTION * rb * rb);
    opts.cut = CutOptions {
        section_samples: args.samples,
        ..CutOptions::default()
    };

    let trace = trace_centroid_curve(&body, &Point3::from(args.p0), &opts)?;
    match &args.out {
        Some(path) => {
            let mut file = std::fs::File::create(path)?;
            trace.write_csv(&mut file)?;
            let (s0, s1) = (
                trace.samples.first().map(|t| t.s).unwrap_or(0.0),
                trace.samples.last().map(|t| t.s).unwrap_or(0.0),
            );
            println!(
                "{}",
                serde_json::json!({
                    "samples": trace.samples.len(),
                    "s_range": [s0, s1],
                    "delta_range": [
                        trace.samples.first().map(|t| t.delta).unwrap_or(0.0),
                        trace.samples.last().map(|t| t.delta).unwrap_or(0.0)
                    ],
                    "stop_backward": trace.stop_backward.to_string(),
                    "stop_forward": trace.stop_forward.to_string(),
                    "nonunique_s": trace.nonunique_s,
                    "diagnostics": trace.diagnostics,
                })
            );
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            trace.write_csv(&mut stdout)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn run_rod(args: &RodArgs) -> Result<(), Error> {
    let spec = RodFileSpec::from_path(&args.spec)?;
    let rod = spec.build()?;
    let (volume, centroid) = bent_rod_centroid(&rod)?;
    let result = RodResult {
        volume,
        centroid: [centroid.x, centroid.y, centroid.z],
        conditions: RodConditions {
            a: true,
            b: true,
            c: true,
        },
    };
    let text = serde_json::to_string(&result)?;
    if let Some(path) = &args.out {
        std::fs::write(path, format!("{text}\n"))?;
    }
    println!("{text}");
    Ok(())
}

fn run_surface(args: &SurfaceArgs) -> Result<(), Error> {
    let ribbon = RibbonSpec::from_path(&args.ribbon)?.build()?;
    let trace = match (&args.body, &args.trace) {
        (Some(body_path), None) => {
            let body = BodySpec::from_path(body_path)?.build()?;
            BoundaryTrace::from_body(&body, &ribbon, args.sections, args.gl_order, args.samples)?
        }
        (None, Some(trace_path)) => {
            let file = std::fs::File::open(trace_path)?;
            BoundaryTrace::from_csv(std::io::BufReader::new(file), &ribbon, args.t_period)?
        }
        _ => {
            return Err(Error::InvalidInput(
                "surface-bound needs exactly one of --body or --trace".into(),
            ))
        }
    };
    let bound = area_lower_bound(&trace)?;
    let defect = equality_defect(&trace);
    println!(
        "{}",
        serde_json::json!({ "area_lower_bound": bound, "equality_defect": defect })
    );
    Ok(())
}

fn run_oracle(args: &OracleArgs) -> Result<(), Error> {
    let est = match (&args.body, &args.rod) {
        (Some(body_path), None) => {
            let body = BodySpec::from_path(body_path)?.build()?;
            let bbox = body.bounding_box();
            monte_carlo_volume(|p| body.contains(p), &bbox, args.seed, args.samples)?
        }
        (None, Some(rod_path)) => {
            let rod = RodFileSpec::from_path(rod_path)?.build()?;
            let (bbox, membership) = rod_membership(&rod)?;
            monte_carlo_volume(membership, &bbox, args.seed, args.samples)?
        }
        _ => {
            return Err(Error::InvalidInput(
                "oracle needs exactly one of --body or --rod".into(),
            ))
        }
    };
    let mut payload = serde_json::json!({
        "volume": est.volume,
        "std_error": est.std_error,
        "accepted": est.accepted,
        "samples": est.samples,
    });
    if let (Some(mean), Some(se)) = (est.mean_point, est.point_std_error) {
        payload["centroid"] = serde_json::json!([mean.x, mean.y, mean.z]);
        payload["centroid_std_error"] = serde_json::json!([se.x, se.y, se.z]);
    }
    println!("{payload}");
    Ok(())
}

type RodMembership = Box<dyn Fn(&Point3<f64>) -> bool + Sync>;

/// Membership oracle for a rod swept along one of the closed-form ribbons.
/// Sampled ribbons have no cheap inverse, so they are rejected here.
fn rod_membership(
    rod: &guldin_core::rod::RodSpec,
) -> Result<(guldin_core::body::BoundingBox, RodMembership), Error> {
    use guldin_core::body::BoundingBox;
    use guldin_core::frames::Ribbon;
    let profile = rod.profile.clone();
    match &rod.ribbon {
        Ribbon::Line(_) => {
            let start = rod.ribbon.eval(0.0);
            let length = rod.ribbon.length();
            let frame = start.frame;
            let origin = start.point;
            let reach = 2.0 * profile.extent.max(profile.area.sqrt());
            let half = Vector3::repeat(reach + length);
            let bbox = BoundingBox::centered(origin + frame.tangent * (length / 2.0), half);
            let f = move |p: &Point3<f64>| {
                let d = p - origin;
                let s = d.dot(&frame.tangent);
                if !(0.0..=length).contains(&s) {
                    return false;
                }
                profile.contains(d.dot(&frame.normal), d.dot(&frame.binormal))
            };
            Ok((bbox, Box::new(f)))
        }
        Ribbon::Arc(_) => {
            // Arc ribbons live in a plane; reconstruct center and axes from
            // the evaluated start frame.
            let start = rod.ribbon.eval(0.0);
            let radius = 1.0 / rod.ribbon.curvatures(0.0).kappa_n;
            let center = start.point + start.frame.normal * radius;
            let e1 = (start.point - center) / radius;
            let e2 = start.frame.tangent;
            let e3 = start.frame.binormal;
            let alpha = rod.ribbon.length() / radius;
            let reach = profile.extent.max(profile.area.sqrt()) * 2.0;
            let bbox = BoundingBox::centered(center, Vector3::repeat(radius + reach));
            let f = move |p: &Point3<f64>| {
                let d = p - center;
                let x = d.dot(&e1);
                let y = d.dot(&e2);
                let z = d.dot(&e3);
                let th = y.atan2(x);
                let th = if th < 0.0 {
                    th + 2.0 * std::f64::consts::PI
                } else {
                    th
                };
                if th > alpha {
                    return false;
                }
                let dist = (x * x + y * y).sqrt();
                profile.contains(radius - dist, z)
            };
            Ok((bbox, Box::new(f)))
        }
        _ => Err(Error::InvalidInput(
            "oracle --rod supports line and circular-arc ribbons".into(),
        )),
    }
}
