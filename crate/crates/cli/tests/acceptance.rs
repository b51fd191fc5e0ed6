//! Acceptance criteria 1 to 12, one line each. Criteria 1 to 11 run the library's verification
//! suites with seed 42; criterion 12 checks the file format, exit codes and determinism through
//! the `dbar` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use dbar_core::field::io::{load_cfld, read_cfld, write_cfld};
use dbar_core::verify::{self, Check, Suite};
use dbar_core::Error;

const SEED: u64 = 42;

fn dbar(args: &[&str]) -> i32 {
    let o = Command::new(env!("CARGO_BIN_EXE_dbar")).args(args).output().expect("binary runs");
    o.status.code().unwrap_or(-1)
}

fn every_error() -> Vec<Error> {
    vec![
        Error::Sample { index: 0 },
        Error::Domain(String::new()),
        Error::Grid(String::new()),
        Error::PunctureTooClose { axis: 0, distance: 0.0, limit: 0.0 },
        Error::DegenerateLine { axis: 0 },
        Error::SupportTouchesZ { axis: 0, delta: 0.0, limit: 0.0 },
        Error::SupportNotCompact { axis: 0, radius: 0.0 },
        Error::Geometry(String::new()),
        Error::MomentObstruction { puncture: 0, order: 0, value: 0.0 },
        Error::StructureObstruction { spec: String::new(), value: 0.0 },
        Error::NotClosed { value: 0.0, tol: 0.0 },
        Error::SupportLeak { tail: 0.0, tol: 0.0 },
        Error::StarCondition { what: String::new(), ratio: 0.0 },
        Error::Depth(0),
        Error::Format(String::new()),
        Error::Parse(String::new()),
        Error::Io(std::io::Error::other("x")),
    ]
}

fn round_trip(path: &Path) -> bool {
    let bytes = fs::read(path).unwrap();
    let Ok(form) = read_cfld(&mut bytes.as_slice()) else { return false };
    let mut again = Vec::new();
    write_cfld(&mut again, &form).is_ok() && again == bytes
}

fn infrastructure(dir: &Path) -> Vec<Check> {
    let f = |name: &str| dir.join(name).to_str().unwrap().to_owned();
    let mut checks = Vec::new();

    let made = [
        dbar(&["make", "bump", "--n", "1", "--res", "512", "-o", &f("b1.cfld")]),
        dbar(&["make", "bump", "--n", "1", "--res", "512", "-o", &f("b2.cfld")]),
        dbar(&["make", "exact-form", "--n", "2", "--q", "1", "--res", "24", "-o", &f("e1.cfld")]),
        dbar(&["make", "exact-form", "--n", "2", "--q", "1", "--res", "24", "-o", &f("e2.cfld")]),
    ];
    checks.push(Check::holds("make runs", made.iter().all(|&c| c == 0)));
    let rt = ["b1.cfld", "e1.cfld", "e1.T.cfld"].iter().all(|n| round_trip(&dir.join(n)));
    checks.push(Check::holds("CFLD1 round trip is bit-exact", rt));

    let same = |a: &str, b: &str| match (fs::read(dir.join(a)), fs::read(dir.join(b))) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    };
    checks.push(Check::holds(
        "make is byte-deterministic",
        same("b1.cfld", "b2.cfld") && same("e1.cfld", "e2.cfld") && same("e1.T.cfld", "e2.T.cfld"),
    ));
    dbar(&["make", "exact-form", "--n", "1", "--res", "256", "-o", &f("x.cfld")]);
    let solved = [
        dbar(&["solve", &f("x.cfld"), "-o", &f("s1.cfld"), "--report", &f("s1.json")]),
        dbar(&["solve", &f("x.cfld"), "-o", &f("s2.cfld"), "--report", &f("s2.json")]),
    ];
    checks.push(Check::holds("solve exits 0", solved == [0, 0]));
    checks.push(Check::holds("solve is byte-deterministic", same("s1.cfld", "s2.cfld")));
    checks.push(Check::holds("solution loads", load_cfld(&dir.join("s1.cfld")).is_ok()));

    let mut codes: Vec<i32> = every_error().iter().map(Error::exit_code).collect();
    let reserved = codes.iter().any(|&c| c <= 2);
    codes.sort();
    codes.dedup();
    checks.push(Check::holds("one distinct code per error class, none of 0, 1, 2", codes.len() == every_error().len() && !reserved));

    fs::write(dir.join("z.json"), r#"{"n":1,"terms":[{"exp":[1],"re":1.0}]}"#).unwrap();
    fs::write(dir.join("junk.cfld"), b"junk").unwrap();
    dbar(&["make", "mass-bump", "--res", "64", "-o", &f("m.cfld")]);
    let cli = [
        ("solve mass-bump -> 20", dbar(&["solve", &f("m.cfld"), "--report", &f("m.json")]), 20),
        ("make off-Z touching Z -> 15", dbar(&["make", "off-Z", "--poly", &f("z.json"), "-o", &f("o.cfld")]), 15),
        ("solve damaged file -> 30", dbar(&["solve", &f("junk.cfld")]), 30),
        ("solve missing file -> 32", dbar(&["solve", &f("missing.cfld")]), 32),
        ("unknown subcommand -> 2", dbar(&["frobnicate"]), 2),
        ("unknown suite -> 2", dbar(&["verify", "nope"]), 2),
        ("verify norm-bound -> 0", dbar(&["verify", "norm-bound", "--report", &f("v.json")]), 0),
    ];
    for (name, got, want) in cli {
        checks.push(Check::holds(format!("exit code {name} (got {got})"), got == want));
    }
    checks
}

fn line(pass: bool, criterion: usize, name: &str, seconds: f64, checks: &[Check]) {
    println!("[{}] criterion {criterion:>2} {name} ({seconds:.1} s)", if pass { "PASS" } else { "FAIL" });
    for c in checks {
        println!("        {c}");
    }
}

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for suite in Suite::ALL {
        let r = verify::run(suite, SEED);
        line(r.pass, r.criterion, r.suite, r.seconds, &r.checks);
        if !r.pass {
            failed.push(r.criterion);
        }
    }

    let t0 = Instant::now();
    let dir = tempfile::tempdir().expect("temp dir");
    let checks = infrastructure(dir.path());
    let pass = checks.iter().all(|c| c.pass);
    line(pass, 12, "infrastructure", t0.elapsed().as_secs_f64(), &checks);
    if !pass {
        failed.push(12);
    }

    if failed.is_empty() {
        println!("acceptance: all 12 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
