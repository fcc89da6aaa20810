//! Golden transcripts of CLI invocations, and parse-print round trips on
//! the canonical output they contain.

use std::fs;
use std::path::PathBuf;

use wittlab::cli::execute;

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../tests/golden")
}

fn commands() -> Vec<String> {
    fs::read_to_string(golden_dir().join("cases.txt"))
        .expect("cases.txt")
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect()
}

fn run(cmd: &str) -> (i32, String) {
    let mut argv = vec!["wittlab".to_string()];
    argv.extend(shlex::split(cmd).expect("balanced quotes"));
    let out = execute(argv);
    (out.exit, format!("{}{}", out.stdout, out.stderr))
}

fn transcript() -> String {
    let mut s = String::new();
    for cmd in commands() {
        let (code, out) = run(&cmd);
        s.push_str(&format!("=== {cmd}\nexit: {code}\n{out}"));
    }
    s
}

#[test]
fn transcripts_match() {
    let path = golden_dir().join("expected.txt");
    let got = transcript();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, &got).expect("write expected.txt");
        return;
    }
    let want = fs::read_to_string(&path).expect("expected.txt; run with UPDATE_GOLDEN=1 to create");
    let (g, w): (Vec<_>, Vec<_>) = (got.split("=== ").collect(), want.split("=== ").collect());
    for (a, b) in g.iter().zip(&w) {
        assert_eq!(a, b, "golden transcript differs");
    }
    assert_eq!(g.len(), w.len());
}

#[test]
fn transcripts_are_deterministic() {
    let first = transcript();
    for _ in 0..2 {
        assert_eq!(transcript(), first);
    }
}

/// Every printed Witt vector and series evaluates back to itself.
#[test]
fn witt_output_reparses() {
    let mut checked = 0;
    for cmd in commands().iter().filter(|c| c.starts_with("witt ")) {
        let (code, out) = run(cmd);
        if code != 0 {
            continue;
        }
        let argv = shlex::split(cmd).unwrap();
        let flag = |name: &str| argv.iter().position(|a| a == name).map(|i| argv[i + 1].clone());
        let (m, ring) = match (flag("--m"), flag("--ring")) {
            (Some(m), Some(r)) => (m, r),
            _ => {
                // context form: `... in W(m, R)`
                let src = &argv[2];
                let inner = src.rsplit_once("in W(").unwrap().1.trim_end().strip_suffix(')').unwrap();
                let (m, r) = inner.split_once(',').unwrap();
                (m.trim().to_string(), r.trim().to_string())
            }
        };
        let lines: Vec<&str> = out.lines().collect();
        if !lines[0].starts_with("W{") {
            continue;
        }
        let m_out = lines[0].trim_start_matches("W{m=").split(';').next().unwrap();
        let m = if m_out != m { m_out.to_string() } else { m };
        let series = lines[1].trim_start_matches("series: ");
        for literal in [lines[0], series] {
            let again = execute(["wittlab", "witt", "coords", &format!("({literal})"), "--m", &m, "--ring", &ring]);
            assert_eq!(again.exit, 0, "{literal}: {}", again.stderr);
            assert_eq!(again.stdout, out, "reparse of {literal}");
            checked += 1;
        }
    }
    assert!(checked >= 10, "only {checked} round trips");
}
