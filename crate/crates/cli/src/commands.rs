//! Command drivers. Each returns the text for stdout (or `--out`), an
//! optional note for stderr and the exit status.

use std::path::Path;

use biconformal::biconformal::{verify_identities, BiconformalData};
use biconformal::classify::classify;
use biconformal::fixtures::random_polynomial_field;
use biconformal::normalform::{Curve, Integrator, NormalFormState, NormalSystem, Trajectory};
use biconformal::Error;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::problem::{parse_problem, ProblemFile, Settings};
use crate::report;
use crate::CliError;

/// Exit status when a zero the command asserts fails.
pub const EXIT_NONZERO: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub status: i32,
}

impl Output {
    fn ok(stdout: String) -> Output {
        Output { stdout, stderr: String::new(), status: 0 }
    }
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

pub fn load(path: &Path) -> Result<ProblemFile, CliError> {
    parse_problem(&read(path)?)
}

/// Builds the data with settings taken from `flags`, then the file, then defaults.
pub fn data(problem: &ProblemFile, flags: Settings) -> Result<BiconformalData, CliError> {
    let (metric, projectors) = problem.build(&flags.or(problem.settings))?;
    Ok(BiconformalData::new(&metric, &projectors)?)
}

/// Every structurally nonzero component of the bi-conformal objects.
pub fn analyze(problem: &ProblemFile, flags: Settings) -> Result<Output, CliError> {
    let d = data(problem, flags)?;
    let mut objects = Map::new();
    let pp = d.projectors();
    let mut put = |name: &str, t: &biconformal::geometry::TensorField| {
        objects.insert(name.to_string(), report::tensor(t));
    };
    put("g", d.metric().g());
    put("P", pp.p());
    put("Pi", pp.pi());
    put("S", pp.s());
    put("M", d.m_tensor());
    put("E", d.e());
    put("W", d.w());
    put("T", d.t());
    put("A", d.a());
    put("B", d.b());
    put("L", d.l());
    put("u", d.u());
    put("gamma_bar", d.gbar().field());
    put("R_bar", d.rbar()?);
    let mut scalars = Map::new();
    for (name, part) in [("0", d.l0()), ("1", d.l1())] {
        match part {
            Ok((l, r)) => {
                objects.insert(format!("L{name}"), report::tensor(l));
                scalars.insert(format!("R_bar{name}"), json!(r.to_string()));
            }
            // these objects do not exist at this rank
            Err(Error::DegenerateRank { .. }) => {}
            Err(e) => return Err(e.into()),
        }
    }
    let value = json!({
        "schema": report::SCHEMA,
        "coordinates": d.metric().chart().names(),
        "n": d.n(),
        "p": d.p(),
        "tensors": objects,
        "scalars": scalars,
    });
    Ok(Output::ok(report::to_text(&value)))
}

pub fn classify_cmd(problem: &ProblemFile, flags: Settings, as_json: bool) -> Result<Output, CliError> {
    let r = classify(&data(problem, flags)?)?;
    let summary = report::classification_summary(&r);
    Ok(if as_json {
        Output { stdout: report::to_text(&report::classification(&r)), stderr: summary, status: 0 }
    } else {
        Output::ok(summary)
    })
}

/// Runs the identity battery with a polynomial test field drawn from `field_seed`.
pub fn verify(problem: &ProblemFile, flags: Settings, field_seed: Option<u64>, as_json: bool) -> Result<Output, CliError> {
    let settings = flags.or(problem.settings);
    let d = data(problem, flags)?;
    let xi = random_polynomial_field(d.metric().chart(), field_seed.unwrap_or(settings.seed()));
    let r = verify_identities(&d, &xi)?;
    let stdout = if as_json { report::to_text(&report::identities(&r)) } else { report::identities_text(&r) };
    let status = if r.all_pass() { 0 } else { EXIT_NONZERO };
    Ok(Output { stdout, stderr: String::new(), status })
}

/// Initial state file. Omitted entries are zero; `psi[c][a]` is `Ψ_c^a`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    #[serde(default)]
    pub xi: Option<Vec<f64>>,
    #[serde(default)]
    pub psi: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub phi: f64,
    #[serde(default)]
    pub chi: f64,
    #[serde(default)]
    pub phi_star: Option<Vec<f64>>,
    #[serde(default)]
    pub phi_bar: Option<Vec<f64>>,
    #[serde(default)]
    pub chi_star: Option<Vec<f64>>,
    #[serde(default)]
    pub chi_bar: Option<Vec<f64>>,
}

impl StateFile {
    pub fn to_state(&self, n: usize) -> Result<NormalFormState, CliError> {
        let vector = |name: &str, v: &Option<Vec<f64>>| -> Result<Vec<f64>, CliError> {
            match v {
                None => Ok(vec![0.0; n]),
                Some(v) if v.len() == n => Ok(v.clone()),
                Some(v) => Err(CliError::MissingComponent {
                    what: format!("state `{name}` needs {n} entries, got {}", v.len()),
                }),
            }
        };
        let psi = match &self.psi {
            None => vec![0.0; n * n],
            Some(rows) if rows.len() == n && rows.iter().all(|r| r.len() == n) => rows.concat(),
            Some(_) => return Err(CliError::MissingComponent { what: format!("state `psi` must be {n}×{n}") }),
        };
        Ok(NormalFormState {
            xi: vector("xi", &self.xi)?,
            psi,
            phi: self.phi,
            chi: self.chi,
            phi_star: vector("phi_star", &self.phi_star)?,
            phi_bar: vector("phi_bar", &self.phi_bar)?,
            chi_star: vector("chi_star", &self.chi_star)?,
            chi_bar: vector("chi_bar", &self.chi_bar)?,
        })
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum IntegratorName {
    Euler,
    Midpoint,
    #[default]
    Rk4,
}

/// Polyline through `points`, integrated with fixed `step` in coordinate arc length.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    pub points: Vec<Vec<f64>>,
    pub step: f64,
    #[serde(default)]
    pub integrator: IntegratorName,
}

impl CurveFile {
    pub fn to_curve(&self, n: usize) -> Result<Curve, CliError> {
        if self.points.len() < 2 || self.points.iter().any(|p| p.len() != n) {
            return Err(CliError::MissingComponent {
                what: format!("curve needs at least two points with {n} coordinates each"),
            });
        }
        if !(self.step > 0.0) {
            return Err(CliError::MissingComponent { what: "curve step must be positive".into() });
        }
        let integrator = match self.integrator {
            IntegratorName::Euler => Integrator::Euler,
            IntegratorName::Midpoint => Integrator::Midpoint,
            IntegratorName::Rk4 => Integrator::Rk4,
        };
        Ok(Curve::polyline(self.points.clone(), self.step).with_integrator(integrator))
    }
}

fn json_file<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: format!("{}: {e}", path.display()),
    })
}

fn trajectory_json(tr: &Trajectory, n: usize) -> Value {
    let names = NormalFormState::column_names(n);
    let samples: Vec<Value> = tr
        .samples
        .iter()
        .map(|s| {
            json!({
                "t": s.t,
                "point": s.point,
                "state": s.state.to_vec(),
                "res_I": s.residuals.projector,
                "res_II": s.residuals.trace_forms,
            })
        })
        .collect();
    json!({ "schema": report::SCHEMA, "columns": names, "samples": samples })
}

pub fn transport(
    problem: &ProblemFile,
    flags: Settings,
    state: &Path,
    curve: &Path,
    as_json: bool,
) -> Result<Output, CliError> {
    let d = data(problem, flags)?;
    let n = d.n();
    let state = json_file::<StateFile>(state)?.to_state(n)?;
    let curve = json_file::<CurveFile>(curve)?.to_curve(n)?;
    let system = NormalSystem::new(&d)?;
    let tr = system.transport(&state, &curve)?;
    let (res_i, res_ii) = tr.max_residuals();
    let stdout = if as_json { report::to_text(&trajectory_json(&tr, n)) } else { tr.to_csv() };
    Ok(Output {
        stdout,
        stderr: format!("{} samples, max residuals {res_i:e} / {res_ii:e}\n", tr.samples.len()),
        status: 0,
    })
}
