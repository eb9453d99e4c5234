//! Command-line front end. Every subcommand prints one JSON document.
//!
//! Exit codes: 0 success, 1 domain error, 2 usage error.

use std::ffi::OsString;
use std::fs;

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hinge::{self, Phases, ScalingGrid};
use crate::json::{self, AnySample, AnyScene, HingeJson, MatrixJson, RelationJson, SampleJson, SceneJson};
use crate::linalg::{self, CMatrix, Field, RANK_TOL};
use crate::metric::{self, Euclidean, GrassmannGap, Metric};
use crate::quotient::{QuotientScene, MAX_EXHAUSTIVE_CHART};
use crate::{random, symspace};

#[derive(Debug, Parser)]
#[command(name = "sepquot", version, about = "Separated quotients, hinges and their samples")]
struct Cli {
    #[command(flatten)]
    opts: Options,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Options {
    /// Gap tolerance for equality, fixed points and limit acceptance.
    #[arg(long, global = true, default_value_t = hinge::DEFAULT_TOL)]
    tol: f64,
    /// Singular value threshold for ranks.
    #[arg(long, global = true, default_value_t = RANK_TOL)]
    rank_tol: f64,
    /// Number of log-spaced moduli in scaling grids.
    #[arg(long, global = true, default_value_t = ScalingGrid::DEFAULT_MODULI)]
    grid_moduli: usize,
    /// Number of phases in complex scaling grids.
    #[arg(long, global = true, default_value_t = ScalingGrid::DEFAULT_PHASES)]
    grid_phases: usize,
    /// Probe values: `a..b` for the powers of ten from a to b, or a comma list.
    #[arg(long, global = true, default_value = "1e1..1e6")]
    probes: String,
    /// Seed for random conjugators.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Field for generated matrices: real or complex.
    #[arg(long, global = true, default_value = "complex", value_parser = parse_field)]
    field: Field,
}

fn parse_field(s: &str) -> std::result::Result<Field, String> {
    match s {
        "real" => Ok(Field::Real),
        "complex" => Ok(Field::Complex),
        other => Err(format!("unknown field {other:?} (expected real or complex)")),
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Relation-level queries.
    #[command(subcommand)]
    Relation(RelationCommand),
    /// Hinge construction, validation, sampling and limits.
    #[command(subcommand)]
    Hinge(HingeCommand),
    /// Orbit closures.
    #[command(subcommand)]
    Orbit(OrbitCommand),
    /// Hausdorff distance between two samples.
    Hausdorff { a: String, b: String },
    /// Separated quotient of a scene.
    #[command(subcommand)]
    Quotient(QuotientCommand),
    /// Positive definite boundary hinges.
    #[command(subcommand)]
    Symspace(SymspaceCommand),
}

#[derive(Debug, Subcommand)]
enum RelationCommand {
    /// Ker, Im, Dom, Indef, the induced operator and the fixed-point flag.
    Invariants { relation: String },
}

#[derive(Debug, Subcommand)]
enum HingeCommand {
    /// Check the hinge axioms.
    Validate { hinge: String },
    /// Hinge of the graph of an invertible matrix.
    OfMatrix { matrix: String },
    /// Limit hinge of a family of invertible matrices.
    Limit(FamilyArgs),
    /// Sample a hinge as a closed set.
    Sample { hinge: String },
    /// Recover a hinge from its sample.
    Extract { sample: String },
}

#[derive(Debug, Args)]
struct FamilyArgs {
    /// Exponents a of g(t) = L·diag(t^a)·R.
    #[arg(long, value_delimiter = ',', conflicts_with = "matrices")]
    diag: Option<Vec<f64>>,
    /// Size of the matrices; must match the number of exponents.
    #[arg(long)]
    n: Option<usize>,
    /// Left conjugator L (matrix JSON).
    #[arg(long)]
    left: Option<String>,
    /// Right conjugator R (matrix JSON).
    #[arg(long)]
    right: Option<String>,
    /// Draw L and R as random unitaries from the seed.
    #[arg(long)]
    random_conjugators: bool,
    /// Explicit sequence g_1, g_2, … (matrix JSON files) instead of a formula.
    #[arg(long, num_args = 1.., conflicts_with = "diag")]
    matrices: Option<Vec<String>>,
}

#[derive(Debug, Subcommand)]
enum OrbitCommand {
    /// Sample the orbit closure of the graph of an invertible operator.
    Sample { relation: String },
    /// Hausdorff limit of the orbit closures of a family.
    Limit {
        #[command(flatten)]
        family: FamilyArgs,
        /// Hausdorff tolerance for the tail of the sequence to count as convergent.
        #[arg(long, default_value_t = 0.05)]
        cauchy_tol: f64,
    },
}

#[derive(Debug, Subcommand)]
enum QuotientCommand {
    /// Members of the separated quotient and the admissible label sets.
    Run { scene: String },
}

#[derive(Debug, Subcommand)]
enum SymspaceCommand {
    /// Boundary hinge of S(t) = Cᵀ·diag(t^a)·C.
    Boundary {
        #[arg(long, value_delimiter = ',', required = true)]
        diag: Vec<f64>,
        /// Conjugator C (real matrix JSON); a random orthogonal matrix if absent.
        #[arg(long)]
        conjugator: Option<String>,
    },
}

pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    match execute(&cli).and_then(|v| json::to_string(&v)) {
        Ok(text) => Outcome {
            code: 0,
            stdout: text + "\n",
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: 1,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

/// File contents, or the argument itself when it is inline JSON.
fn read_input(arg: &str) -> Result<String> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        Ok(arg.to_string())
    } else {
        Ok(fs::read_to_string(arg)?)
    }
}

fn read_doc<T: serde::de::DeserializeOwned>(arg: &str) -> Result<T> {
    Ok(serde_json::from_str(&read_input(arg)?)?)
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn parse_probes(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::Invalid(format!("cannot parse probes {spec:?}"));
    let probes = if let Some((a, b)) = spec.split_once("..") {
        let a: f64 = a.trim().parse().map_err(|_| bad())?;
        let b: f64 = b.trim().parse().map_err(|_| bad())?;
        if !(a > 0.0 && b >= a) {
            return Err(bad());
        }
        let (lo, hi) = (a.log10().round() as i32, b.log10().round() as i32);
        (lo..=hi).map(|k| 10f64.powi(k)).collect()
    } else {
        spec.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?
    };
    if probes.len() < 2 || probes.iter().any(|t| !t.is_finite()) {
        return Err(bad());
    }
    Ok(probes)
}

impl Options {
    fn grid(&self, field: Field) -> ScalingGrid {
        let grid = ScalingGrid::for_field(field).with_moduli(self.grid_moduli);
        match field {
            Field::Complex => grid.with_phases(Phases::Circle(self.grid_phases)),
            Field::Real => grid,
        }
    }
}

/// A family `t ↦ g(t)` given by a formula, or an explicit sequence.
enum Family {
    Formula {
        left: CMatrix,
        exponents: Vec<f64>,
        right: CMatrix,
        field: Field,
    },
    Sequence(Vec<CMatrix>, Field),
}

impl Family {
    fn from_args(args: &FamilyArgs, opts: &Options) -> Result<Family> {
        if let Some(files) = &args.matrices {
            let mut field = Field::Real;
            let mut mats = Vec::new();
            for f in files {
                let (m, fd) = json::matrix_from_str(&read_input(f)?)?;
                field = field.join(fd);
                mats.push(m);
            }
            if mats.len() < 2 {
                return Err(Error::Invalid("need at least two matrices".into()));
            }
            return Ok(Family::Sequence(mats, field.join(opts.field)));
        }
        let exponents = args
            .diag
            .clone()
            .ok_or_else(|| Error::Invalid("give --diag exponents or --matrices".into()))?;
        let n = exponents.len();
        if let Some(m) = args.n {
            if m != n {
                return Err(Error::Invalid(format!("--n {m} but {n} exponents")));
            }
        }
        let mut field = opts.field;
        let mut rng = random::seeded(opts.seed);
        let mut conjugator = |given: &Option<String>| -> Result<CMatrix> {
            match given {
                Some(f) => {
                    let (m, fd) = json::matrix_from_str(&read_input(f)?)?;
                    field = field.join(fd);
                    if m.shape() != (n, n) {
                        return Err(Error::Dimension(format!("conjugator must be {n}x{n}")));
                    }
                    Ok(m)
                }
                None if args.random_conjugators => Ok(random::unitary(&mut rng, opts.field, n)),
                None => Ok(CMatrix::identity(n, n)),
            }
        };
        let left = conjugator(&args.left)?;
        let right = conjugator(&args.right)?;
        Ok(Family::Formula {
            left,
            exponents,
            right,
            field,
        })
    }

    fn field(&self) -> Field {
        match self {
            Family::Formula { field, .. } | Family::Sequence(_, field) => *field,
        }
    }

    fn at(&self, t: f64) -> CMatrix {
        match self {
            Family::Formula {
                left,
                exponents,
                right,
                ..
            } => {
                let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                    exponents.len(),
                    exponents.iter().map(|&a| Complex64::new(t.powf(a), 0.0)),
                ));
                left * d * right
            }
            Family::Sequence(mats, _) => mats[(t as usize).min(mats.len() - 1)].clone(),
        }
    }

    fn probes(&self, opts: &Options) -> Result<Vec<f64>> {
        match self {
            Family::Formula { .. } => parse_probes(&opts.probes),
            Family::Sequence(mats, _) => Ok((0..mats.len()).map(|j| j as f64).collect()),
        }
    }
}

fn relation_invariants(r: &crate::linrel::LinearRelation, tol: f64) -> Result<Value> {
    let inv = r.invariant_subspaces();
    let field = r.field();
    let frame = |s: &crate::linrel::Subspace| MatrixJson::from_matrix(s.frame(), field);
    let operator = match r.induced_operator() {
        Ok(op) => json!({
            "size": op.size(),
            "dom_quotient_basis": MatrixJson::from_matrix(&op.dom_quotient_basis, field),
            "im_quotient_basis": MatrixJson::from_matrix(&op.im_quotient_basis, field),
            "matrix": MatrixJson::from_matrix(&op.matrix, field),
        }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    Ok(json!({
        "n": r.n(),
        "field": field.as_str(),
        "dims": {
            "ker": inv.ker.dim(),
            "im": inv.im.dim(),
            "dom": inv.dom.dim(),
            "indef": inv.indef.dim(),
        },
        "ker": frame(&inv.ker),
        "im": frame(&inv.im),
        "dom": frame(&inv.dom),
        "indef": frame(&inv.indef),
        "operator": operator,
        "fixed_part_gap": r.fixed_part_gap(),
        "scaling_fixed": r.is_scaling_fixed(tol),
    }))
}

fn quotient_report<M: Metric>(scene: &QuotientScene<M>, tol: f64) -> Result<Value> {
    let members = scene.separated_quotient(tol)?;
    let members: Vec<Value> = members
        .iter()
        .map(|m| {
            json!({
                "labels": m.labels,
                "size": m.set.len(),
                "resolution": m.set.resolution(),
            })
        })
        .collect();
    let admissible = if scene.chart().len() <= MAX_EXHAUSTIVE_CHART {
        to_value(&scene.admissible_sets()?)?
    } else {
        Value::Null
    };
    Ok(json!({ "members": members, "admissible": admissible }))
}

fn execute(cli: &Cli) -> Result<Value> {
    let opts = &cli.opts;
    match &cli.command {
        Command::Relation(RelationCommand::Invariants { relation }) => {
            let r = read_doc::<RelationJson>(relation)?.to_relation(opts.rank_tol)?;
            relation_invariants(&r, opts.tol)
        }
        Command::Hinge(cmd) => match cmd {
            HingeCommand::Validate { hinge } => {
                let h = read_doc::<HingeJson>(hinge)?.to_hinge(opts.rank_tol)?;
                to_value(&hinge::validate_hinge(&h, opts.tol))
            }
            HingeCommand::OfMatrix { matrix } => {
                let (a, field) = json::matrix_from_str(&read_input(matrix)?)?;
                let h = hinge::hinge_of_invertible(field.join(opts.field), &a)?;
                to_value(&HingeJson::from_hinge(&h))
            }
            HingeCommand::Limit(args) => {
                let family = Family::from_args(args, opts)?;
                let probes = family.probes(opts)?;
                let h = hinge::hinge_limit(family.field(), |t| family.at(t), &probes, opts.tol)?;
                to_value(&HingeJson::from_hinge(&h))
            }
            HingeCommand::Sample { hinge } => {
                let h = read_doc::<HingeJson>(hinge)?.to_hinge(opts.rank_tol)?;
                let s = hinge::hinge_to_sample(&h, &opts.grid(h.field()))?;
                to_value(&SampleJson::from_relations(&s)?)
            }
            HingeCommand::Extract { sample } => match read_doc::<SampleJson>(sample)?.to_sample(opts.rank_tol)? {
                AnySample::Grassmann(s) => {
                    let h = hinge::extract_hinge_from_sample(&s, opts.tol)?;
                    to_value(&HingeJson::from_hinge(&h))
                }
                AnySample::Euclidean(_) => Err(Error::SpaceMismatch("euclidean".into(), "grassmann-gap".into())),
            },
        },
        Command::Orbit(cmd) => match cmd {
            OrbitCommand::Sample { relation } => {
                let r = read_doc::<RelationJson>(relation)?.to_relation(opts.rank_tol)?;
                let s = hinge::orbit_closure_sample(&r, &opts.grid(r.field()))?;
                to_value(&SampleJson::from_relations(&s)?)
            }
            OrbitCommand::Limit { family: args, cauchy_tol } => {
                let family = Family::from_args(args, opts)?;
                let mats: Vec<CMatrix> = family.probes(opts)?.into_iter().map(|t| family.at(t)).collect();
                let grid = opts.grid(family.field());
                let s = hinge::limit_of_orbit_closures(family.field(), &mats, &grid, *cauchy_tol)?;
                to_value(&SampleJson::from_relations(&s)?)
            }
        },
        Command::Hausdorff { a, b } => {
            let a = read_doc::<SampleJson>(a)?.to_sample(opts.rank_tol)?;
            let b = read_doc::<SampleJson>(b)?.to_sample(opts.rank_tol)?;
            let d = match (&a, &b) {
                (AnySample::Euclidean(x), AnySample::Euclidean(y)) => metric::hausdorff_distance(&Euclidean, x, y)?,
                (AnySample::Grassmann(x), AnySample::Grassmann(y)) => metric::hausdorff_distance(&GrassmannGap, x, y)?,
                _ => return Err(Error::SpaceMismatch("euclidean".into(), "grassmann-gap".into())),
            };
            Ok(json!({ "distance": d }))
        }
        Command::Quotient(QuotientCommand::Run { scene }) => match read_doc::<SceneJson>(scene)?.to_scene(opts.rank_tol)? {
            AnyScene::Euclidean(s) => quotient_report(&s, opts.tol),
            AnyScene::Grassmann(s) => quotient_report(&s, opts.tol),
        },
        Command::Symspace(SymspaceCommand::Boundary { diag, conjugator }) => {
            let n = diag.len();
            let c = match conjugator {
                Some(f) => {
                    let (m, _) = json::matrix_from_str(&read_input(f)?)?;
                    if m.shape() != (n, n) {
                        return Err(Error::Dimension(format!("conjugator must be {n}x{n}")));
                    }
                    symspace::real_matrix(&m)?
                }
                None => linalg::real_part(&random::unitary(&mut random::seeded(opts.seed), Field::Real, n)),
            };
            let family = |t: f64| {
                let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, diag.iter().map(|&a| t.powf(a))));
                let s = c.transpose() * d * &c;
                (&s + s.transpose()) * 0.5
            };
            let probes = parse_probes(&opts.probes)?;
            let pd = symspace::pd_boundary_hinge(family, &probes, opts.tol)?;
            Ok(json!({
                "hinge": to_value(&HingeJson::from_hinge(pd.hinge()))?,
                "report": to_value(pd.report())?,
            }))
        }
    }
}
