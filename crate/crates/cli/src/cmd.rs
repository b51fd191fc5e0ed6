use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use dbar_core::field::io::{column_names, load_cfld, save_cfld, slice_rows, write_csv};
use dbar_core::field::support_info;
use dbar_core::solver::{solve as solve_form, solve_1d_punctured, solve_vanishing, SolveOptions, SolveResult};
use dbar_core::testdata::{annulus_moment_free, bump_field, exact_form, mass_bump};
use dbar_core::verify::{self, Suite};
use dbar_core::zeroset::{disc_family, separation, PolynomialF};
use dbar_core::{Error, GridSpec, QForm, C64};
use serde_json::{json, Value};

use crate::{Case, ExportArgs, Format, MakeArgs, SolveArgs, VerifyArgs};

pub const REPORT_SCHEMA: &str = "dbar-solve-report/1";
pub const ERROR_SCHEMA: &str = "dbar-error/1";
pub const VERIFY_SCHEMA: &str = "dbar-verify/1";
pub const FIELD_SCHEMA: &str = "dbar-field/1";

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Core(Error),
    /// Number of failed suites.
    Checks(usize),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Core(e) => e.exit_code() as u8,
            Failure::Checks(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Core(e) => write!(f, "{}: {e}", e.class()),
            Failure::Checks(n) => write!(f, "{n} suite(s) failed"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

type Outcome = Result<(), Failure>;

fn read_poly(path: &Path) -> Result<PolynomialF, Failure> {
    Ok(PolynomialF::from_json(&fs::read_to_string(path)?)?)
}

fn emit(path: Option<&PathBuf>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, format!("{text}\n"))?,
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}")?;
        }
    }
    Ok(())
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

pub fn make(a: &MakeArgs) -> Outcome {
    let n = a.grid.n;
    let grid = GridSpec::uniform(n, a.grid.res, a.grid.pad)?;
    let q = a.q.unwrap_or(n);
    if a.case != Case::ExactForm && q != n {
        return Err(Failure::Usage(format!("{:?} makes top-degree forms; --q must be {n}", a.case)));
    }
    let omega = match a.case {
        Case::Bump => QForm::top(bump_field(n, 0.5, a.seed).sample(&grid)?),
        Case::MassBump => QForm::top(mass_bump(n, 0.4).sample(&grid)?),
        Case::AnnulusMomentFree => QForm::top(annulus_moment_free(n)?.sample(&grid)?),
        Case::ExactForm => {
            let radii = vec![0.5; n];
            let (omega, t) = exact_form(&grid, q, &radii, a.seed)?;
            let truth = a.truth.clone().unwrap_or_else(|| with_suffix(&a.out, "T.cfld"));
            save_cfld(&truth, &t)?;
            omega
        }
        Case::OffZ => {
            let path = a.poly.as_ref().ok_or_else(|| Failure::Usage("off-Z needs --poly".into()))?;
            let f = read_poly(path)?;
            if f.n() != n {
                return Err(Error::Domain(format!("polynomial in {} variables, grid in {n}", f.n())).into());
            }
            let phi = bump_field(n, 0.4, a.seed).sample(&grid)?;
            let sup = support_info(&phi, a.tol_support);
            for k in 0..n {
                separation(&f, k, &sup, &grid)?;
            }
            QForm::top(phi)
        }
    };
    save_cfld(&a.out, &omega)?;
    Ok(())
}

fn error_json(e: &Error) -> Value {
    let mut v = json!({
        "schema": ERROR_SCHEMA,
        "class": e.class(),
        "code": e.exit_code(),
        "message": e.to_string(),
    });
    let details = match e {
        Error::MomentObstruction { puncture, order, value } => json!({ "puncture": puncture, "order": order, "value": value }),
        Error::StructureObstruction { spec, value } => json!({ "spec": spec, "value": value }),
        Error::PunctureTooClose { axis, distance, limit } => json!({ "axis": axis, "distance": distance, "limit": limit }),
        Error::SupportTouchesZ { axis, delta, limit } => json!({ "axis": axis, "delta": delta, "limit": limit }),
        Error::SupportNotCompact { axis, radius } => json!({ "axis": axis, "radius": radius }),
        Error::NotClosed { value, tol } => json!({ "value": value, "tol": tol }),
        Error::SupportLeak { tail, tol } => json!({ "tail": tail, "tol": tol }),
        Error::StarCondition { what, ratio } => json!({ "what": what, "ratio": ratio }),
        _ => Value::Null,
    };
    if !details.is_null() {
        v["details"] = details;
    }
    v
}

fn run_solver(a: &SolveArgs, omega: &QForm, opts: &SolveOptions) -> Result<SolveResult, Failure> {
    let f = a.poly.as_deref().map(read_poly).transpose()?;
    match (f, a.vanish_order) {
        (Some(f), Some(k)) => Ok(solve_vanishing(omega, &f, k, opts)?),
        (None, Some(_)) => Err(Failure::Usage("--vanish-order needs --poly".into())),
        (Some(f), None) => {
            if omega.grid().n() != 1 || omega.q() != 1 {
                return Err(Failure::Usage("--poly without --vanish-order is supported for n = 1 only".into()));
            }
            let phi = omega.coeff_or_zero(&[]);
            let discs = disc_family(&f, 0, &support_info(&phi, opts.tol_support), omega.grid())?;
            Ok(solve_1d_punctured(&phi, Some(&discs), opts)?)
        }
        (None, None) => Ok(solve_form(omega, opts)?),
    }
}

pub fn solve(a: &SolveArgs) -> Outcome {
    let omega = load_cfld(&a.input)?;
    if let Some(q) = a.q {
        if q != omega.q() {
            return Err(Error::Domain(format!("--q {q} but the file holds a form of degree {}", omega.q())).into());
        }
    }
    let opts = SolveOptions { l_max: a.lmax, tol_moment: a.tol_moment, tol_support: a.tol_support, r: a.r, ..Default::default() };
    match run_solver(a, &omega, &opts) {
        Ok(res) => {
            let out = a.out.clone().unwrap_or_else(|| with_suffix(&a.input, "solution.cfld"));
            save_cfld(&out, &res.solution)?;
            let report = json!({ "schema": REPORT_SCHEMA, "solution": out.display().to_string(), "report": res.report });
            emit(a.report.as_ref(), &serde_json::to_string_pretty(&report).expect("report serializes"))
        }
        Err(Failure::Core(e)) => {
            emit(a.report.as_ref(), &serde_json::to_string_pretty(&error_json(&e)).expect("error serializes"))?;
            Err(Failure::Core(e))
        }
        Err(other) => Err(other),
    }
}

pub fn verify(a: &VerifyArgs) -> Outcome {
    let suites = Suite::parse(&a.suite).map_err(|_| {
        let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
        Failure::Usage(format!("unknown suite {}; expected all or one of {}", a.suite, names.join(", ")))
    })?;
    if let Some(r) = a.res {
        eprintln!("note: --res {r} is recorded only; suites run at their pinned resolutions");
    }
    let mut reports = Vec::new();
    for s in suites {
        let r = verify::run(s, a.seed);
        eprintln!("[{}] criterion {} {} ({:.1} s)", if r.pass { "PASS" } else { "FAIL" }, r.criterion, r.suite, r.seconds);
        for c in &r.checks {
            eprintln!("    {c}");
        }
        reports.push(r);
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    let summary = json!({
        "schema": VERIFY_SCHEMA,
        "seed": a.seed,
        "requested_res": a.res,
        "pass": failed == 0,
        "suites": reports,
    });
    emit(a.report.as_ref(), &serde_json::to_string_pretty(&summary).expect("summary serializes"))?;
    if failed > 0 {
        return Err(Failure::Checks(failed));
    }
    Ok(())
}

fn parse_pair<'s>(spec: &'s str, what: &str) -> Result<(&'s str, &'s str), Failure> {
    spec.split_once('=').ok_or_else(|| Error::Parse(format!("bad {what} spec {spec:?}, expected KEY=VALUE")).into())
}

fn parse_num<T: std::str::FromStr>(s: &str, spec: &str) -> Result<T, Failure> {
    s.trim().parse().map_err(|_| Error::Parse(format!("bad number {s:?} in {spec:?}")).into())
}

/// Real-axis pins from `--fix AXIS=INDEX` and `--at k=RE[,IM]`.
fn slice_pins(grid: &GridSpec, fix: &[String], at: &[String]) -> Result<Vec<(usize, usize)>, Failure> {
    let mut pins = Vec::new();
    for spec in fix {
        let (a, i) = parse_pair(spec, "--fix")?;
        pins.push((parse_num(a, spec)?, parse_num(i, spec)?));
    }
    for spec in at {
        let (k, v) = parse_pair(spec, "--at")?;
        let k: usize = parse_num(k, spec)?;
        if k == 0 || k > grid.n() {
            return Err(Error::Domain(format!("bad slice: variable {k} outside 1..={}", grid.n())).into());
        }
        let (re, im) = match v.split_once(',') {
            Some((re, im)) => (parse_num(re, spec)?, parse_num(im, spec)?),
            None => (parse_num(v, spec)?, 0.0),
        };
        let z = C64::new(re, im);
        for (axis, x) in [(2 * (k - 1), z.re), (2 * k - 1, z.im)] {
            let nearest = (0..grid.res()[axis])
                .min_by(|&i, &j| (grid.coord(axis, i) - x).abs().total_cmp(&(grid.coord(axis, j) - x).abs()))
                .expect("nonempty axis");
            pins.push((axis, nearest));
        }
    }
    Ok(pins)
}

fn parse_index(spec: &str, n: usize) -> Result<Vec<usize>, Failure> {
    if spec.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut j = Vec::new();
    for part in spec.split(',') {
        let i: usize = parse_num(part, spec)?;
        if i == 0 || i > n {
            return Err(Error::Domain(format!("index entry {i} outside 1..={n}")).into());
        }
        j.push(i - 1);
    }
    Ok(j)
}

pub fn export(a: &ExportArgs) -> Outcome {
    let form = load_cfld(&a.input)?;
    let grid = form.grid().clone();
    let index = match &a.coeff {
        Some(s) => parse_index(s, grid.n())?,
        None => form.iter().next().map(|(j, _)| j.clone()).unwrap_or_default(),
    };
    let field = form.coeff_or_zero(&index);
    let pins = slice_pins(&grid, &a.fix, &a.at)?;
    let text = match a.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&mut buf, &field, &pins)?;
            String::from_utf8(buf).expect("ascii csv")
        }
        Format::Json => {
            let rows = slice_rows(&field, &pins)?;
            let doc = json!({
                "schema": FIELD_SCHEMA,
                "n": grid.n(),
                "q": form.q(),
                "index": index.iter().map(|i| i + 1).collect::<Vec<_>>(),
                "res": grid.res(),
                "extent": grid.extent(),
                "columns": column_names(&grid),
                "rows": rows,
            });
            serde_json::to_string(&doc).expect("field serializes") + "\n"
        }
    };
    match &a.out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
