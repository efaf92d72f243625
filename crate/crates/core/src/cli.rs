//! Batch front end: one job per invocation, JSON in and out, OBJ side files.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::calculus::{
    census, common_stabilization, connect_sum, dehn_twist, k_stabilize_with_site, realize_slope, replay, GeometricRef,
    KSplittingRecord, KnotInfo, SlopeRealizer, StabilizationTrace,
};
use crate::error::{Error, Result};
use crate::geom::{make_tube_surface, CurveOnSurface, TubeOptions, TubeSurface};
use crate::io::{load_surface, read_json, to_json, KnotCurveFile, SurfaceFile};
use crate::linking::surface_slope_with;
use crate::selftest::run_selftest;

#[derive(Debug, Parser)]
#[command(name = "ksplit", version, about = "Surface slopes and K-splitting moves for knots in Heegaard surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub args: JobArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Surface slope of a chart curve (--surface, --input curve).
    Slope,
    /// Mesh report of a surface, or the genus of a record.
    Genus,
    /// Dehn twist by --k meridians, of a record or of a chart curve.
    Twist,
    /// One K-stabilization, symbolic or geometric.
    Stabilize,
    /// Connected sum of two records.
    ConnectSum,
    /// A splitting of the knot in --input with slope --target-slope.
    RealizeSlope,
    /// Weak-reduction census of a record.
    Decompose,
    /// Common K-stabilization of two records with traces.
    CommonStab,
    /// Surface mesh, and the curve if given, as Wavefront OBJ.
    ExportObj,
    /// Seeded invariant suite.
    Selftest,
    /// Replays a stabilization trace.
    Replay,
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct JobArgs {
    /// Input JSON file; repeat for two-record commands.
    #[arg(long, global = true)]
    pub input: Vec<PathBuf>,
    /// Spatial graph JSON whose tube neighbourhood is the surface.
    #[arg(long, global = true)]
    pub surface: Option<PathBuf>,
    /// Tube radius; overrides the surface file.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub radius: Option<f64>,
    /// Pushoff distance; defaults to a fifth of the tube radius.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub k: Option<i64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub target_slope: Option<i64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub extra_stabs: u32,
    /// Seed for projection directions and stabilization sites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Writes the JSON result here, and any mesh next to it as `.obj`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

/// A parsed and checked job.
#[derive(Debug, Clone)]
pub struct JobSpec {
    pub command: Command,
    pub inputs: Vec<PathBuf>,
    pub surface: Option<PathBuf>,
    pub radius: Option<f64>,
    pub epsilon: Option<f64>,
    pub k: Option<i64>,
    pub target_slope: Option<i64>,
    pub extra_stabs: u32,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

fn positive(name: &str, v: Option<f64>) -> Result<()> {
    match v {
        Some(x) if !(x.is_finite() && x > 0.0) => Err(Error::input(format!("--{name} must be positive, got {x}"))),
        _ => Ok(()),
    }
}

impl JobSpec {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let a = cli.args;
        positive("radius", a.radius)?;
        positive("epsilon", a.epsilon)?;
        for p in a.input.iter().chain(&a.surface) {
            if !p.is_file() {
                return Err(Error::input(format!("{} does not exist", p.display())));
            }
        }
        let job = JobSpec {
            command: cli.command,
            inputs: a.input,
            surface: a.surface,
            radius: a.radius,
            epsilon: a.epsilon,
            k: a.k,
            target_slope: a.target_slope,
            extra_stabs: a.extra_stabs,
            seed: a.seed,
            out: a.out,
        };
        let inputs = match job.command {
            Command::Selftest => 0..=0,
            Command::Genus | Command::ExportObj => 0..=1,
            Command::ConnectSum | Command::CommonStab => 2..=2,
            _ => 1..=1,
        };
        if !inputs.contains(&job.inputs.len()) {
            return Err(Error::input(format!(
                "{:?} takes {} to {} --input files, got {}",
                job.command,
                inputs.start(),
                inputs.end(),
                job.inputs.len()
            )));
        }
        let needs_surface = matches!(job.command, Command::Slope | Command::ExportObj);
        if needs_surface && job.surface.is_none() {
            return Err(Error::input(format!("{:?} needs --surface", job.command)));
        }
        if job.command == Command::Twist && job.k.is_none() {
            return Err(Error::input("twist needs --k"));
        }
        if job.command == Command::RealizeSlope && job.target_slope.is_none() {
            return Err(Error::input("realize-slope needs --target-slope"));
        }
        Ok(job)
    }

    fn input(&self, i: usize) -> &Path {
        &self.inputs[i]
    }

    fn surface(&self) -> Result<Option<(SurfaceFile, TubeOptions)>> {
        let Some(path) = &self.surface else { return Ok(None) };
        let file = load_surface(path)?;
        let mut opts = file.tube.options();
        if self.radius.is_some() {
            opts.radius = self.radius;
        }
        Ok(Some((file, opts)))
    }

    fn tube(&self) -> Result<Option<Arc<TubeSurface>>> {
        Ok(match self.surface()? {
            Some((file, opts)) => Some(Arc::new(make_tube_surface(&file.graph, &opts)?)),
            None => None,
        })
    }

    fn curve(&self, host: &Arc<TubeSurface>) -> Result<(CurveOnSurface, KnotInfo)> {
        let file: KnotCurveFile = read_json(self.input(0))?;
        Ok((CurveOnSurface::from_spec(host, &file.curve)?, file.knot_info()))
    }

    fn geometric_record(&self, host: &Arc<TubeSurface>) -> Result<KSplittingRecord> {
        let (curve, knot) = self.curve(host)?;
        KSplittingRecord::from_geometry(knot, GeometricRef::new(curve, self.epsilon, self.seed))
    }
}

/// What a job produces: JSON for stdout and optionally an OBJ side file.
#[derive(Debug, Clone, PartialEq)]
pub struct JobOutput {
    pub json: Value,
    pub obj: Option<String>,
}

fn value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable value")
}

fn symbolic(json: Value) -> JobOutput {
    JobOutput { json, obj: None }
}

/// The host mesh followed by the curve as an OBJ polyline.
pub fn obj_with_curve(host: &TubeSurface, curve: Option<&CurveOnSurface>) -> String {
    let mut s = String::from("o surface\n");
    s.push_str(&host.mesh().to_obj());
    if let Some(c) = curve {
        let offset = host.mesh().vertices().len();
        let pts = c.points().vertices();
        s.push_str("o knot\n");
        for p in pts {
            let _ = writeln!(s, "v {} {} {}", p.x, p.y, p.z);
        }
        s.push('l');
        for i in 0..pts.len() {
            let _ = write!(s, " {}", offset + i + 1);
        }
        if c.points().is_closed() {
            let _ = write!(s, " {}", offset + 1);
        }
        s.push('\n');
    }
    s
}

fn geometric_output(json: Value, r: &KSplittingRecord) -> JobOutput {
    let curve = &r.geometry().expect("geometric record").curve;
    let mut json = json;
    json["curve"] = value(&curve.spec());
    JobOutput { json, obj: Some(obj_with_curve(curve.host(), Some(curve))) }
}

pub fn run(job: &JobSpec) -> Result<JobOutput> {
    match job.command {
        Command::Slope => {
            let host = job.tube()?.expect("checked");
            let (curve, _) = job.curve(&host)?;
            let eps = job.epsilon.unwrap_or(0.2 * host.radius());
            Ok(symbolic(value(&surface_slope_with(&curve, eps, job.seed)?)))
        }
        Command::Genus => match job.tube()? {
            Some(host) => Ok(symbolic(value(host.report()))),
            None => {
                let r: KSplittingRecord = read_json(job.input(0))?;
                Ok(symbolic(json!({ "genus": r.genus() })))
            }
        },
        Command::Twist => {
            let k = job.k.expect("checked");
            match job.tube()? {
                Some(host) => {
                    let r = job.geometric_record(&host)?;
                    let t = dehn_twist(&r, k)?;
                    Ok(geometric_output(json!({ "record": value(&t), "slope_before": r.slope(), "k": k }), &t))
                }
                None => {
                    let r: KSplittingRecord = read_json(job.input(0))?;
                    Ok(symbolic(value(&dehn_twist(&r, k)?)))
                }
            }
        }
        Command::Stabilize => match job.tube()? {
            Some(host) => {
                let r = job.geometric_record(&host)?;
                let (s, site) = k_stabilize_with_site(&r)?;
                Ok(geometric_output(json!({ "record": value(&s), "site": value(&site) }), &s))
            }
            None => {
                let r: KSplittingRecord = read_json(job.input(0))?;
                Ok(symbolic(value(&k_stabilize_with_site(&r)?.0)))
            }
        },
        Command::ConnectSum => {
            let a: KSplittingRecord = read_json(job.input(0))?;
            let b: KSplittingRecord = read_json(job.input(1))?;
            Ok(symbolic(value(&connect_sum(&a, &b)?)))
        }
        Command::RealizeSlope => {
            let knot: KnotInfo = read_json(job.input(0))?;
            knot.validate()?;
            let target = job.target_slope.expect("checked");
            match job.surface()? {
                Some((file, opts)) => {
                    let re = SlopeRealizer::new(&knot, &file.graph, &opts, job.epsilon, job.seed)?.realize(target)?;
                    let json = json!({
                        "record": value(&re.record),
                        "base_slope": re.base_slope,
                        "twist_count": re.twist_count,
                    });
                    Ok(geometric_output(json, &re.record))
                }
                None => {
                    let (r, twists) = realize_slope(&knot, target)?;
                    Ok(symbolic(json!({ "record": value(&r), "base_slope": 0, "twist_count": twists })))
                }
            }
        }
        Command::Decompose => {
            let r: KSplittingRecord = read_json(job.input(0))?;
            Ok(symbolic(value(&census(&r)?)))
        }
        Command::CommonStab => {
            let a: KSplittingRecord = read_json(job.input(0))?;
            let b: KSplittingRecord = read_json(job.input(1))?;
            let (r, ta, tb) = common_stabilization(&a, &b, job.extra_stabs)?;
            let replay_matches = replay(&ta)? == r && replay(&tb)? == r;
            Ok(symbolic(json!({
                "record": value(&r),
                "trace_a": value(&ta),
                "trace_b": value(&tb),
                "replay_matches": replay_matches,
            })))
        }
        Command::ExportObj => {
            let host = job.tube()?.expect("checked");
            let curve = match job.inputs.is_empty() {
                true => None,
                false => Some(job.curve(&host)?.0),
            };
            Ok(JobOutput { json: value(host.report()), obj: Some(obj_with_curve(&host, curve.as_ref())) })
        }
        Command::Selftest => {
            let report = run_selftest(job.seed);
            eprint!("{}", report.render());
            Ok(symbolic(json!({ "all_passed": report.all_passed(), "report": value(&report) })))
        }
        Command::Replay => {
            let trace: StabilizationTrace = read_json(job.input(0))?;
            let r = replay(&trace)?;
            let canonical = to_json(&trace) == to_json(&serde_json::from_str::<StabilizationTrace>(&to_json(&trace))?);
            Ok(symbolic(json!({
                "record": value(&r),
                "replay_matches": r == trace.output,
                "canonical": canonical,
            })))
        }
    }
}

/// Runs a job and writes its outputs; returns the process exit code.
/// JSON goes to stdout, except for `export-obj` without `--out`, which
/// prints the OBJ text.
pub fn execute(job: &JobSpec) -> Result<i32> {
    let out = run(job)?;
    let text = to_json(&out.json) + "\n";
    match (&job.out, &out.obj, job.command) {
        // Without --out the mesh itself is the result.
        (None, Some(obj), Command::ExportObj) => emit(obj)?,
        (None, _, _) => emit(&text)?,
        (Some(path), Some(obj), Command::ExportObj) => {
            write(path, obj)?;
            emit(&text)?;
        }
        (Some(path), obj, _) => {
            write(path, &text)?;
            if let Some(obj) = obj {
                write(&path.with_extension("obj"), obj)?;
            }
            emit(&text)?;
        }
    }
    let ok = match job.command {
        Command::Selftest => out.json["all_passed"] == Value::Bool(true),
        Command::CommonStab | Command::Replay => out.json["replay_matches"] == Value::Bool(true),
        _ => true,
    };
    Ok(if ok { 0 } else { 2 })
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::input(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> std::result::Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("ksplit").chain(args.iter().copied()))
    }

    #[test]
    fn flags_are_global_and_accept_negative_values() {
        let cli = parse(&["twist", "--k", "-3", "--seed", "9"]).unwrap();
        assert_eq!(cli.command, Command::Twist);
        assert_eq!((cli.args.k, cli.args.seed), (Some(-3), 9));
        let cli = parse(&["--target-slope", "-5", "realize-slope"]).unwrap();
        assert_eq!(cli.args.target_slope, Some(-5));
        assert!(parse(&["frobnicate"]).is_err());
    }

    #[test]
    fn job_specs_are_checked() {
        let e = JobSpec::from_cli(parse(&["slope", "--input", "/nonexistent.json"]).unwrap()).unwrap_err();
        assert_eq!(e.exit_code(), 1);
        let e = JobSpec::from_cli(parse(&["connect-sum"]).unwrap()).unwrap_err();
        assert!(e.to_string().contains("--input"));
        let e = JobSpec::from_cli(parse(&["selftest", "--epsilon", "-1"]).unwrap()).unwrap_err();
        assert!(e.to_string().contains("epsilon"));
        assert!(JobSpec::from_cli(parse(&["selftest", "--seed", "3"]).unwrap()).is_ok());
    }
}
