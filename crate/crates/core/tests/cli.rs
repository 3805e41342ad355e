use sijections::cli::{run, EXIT_BUDGET, EXIT_FAIL, EXIT_OK, EXIT_USAGE};
use sijections::elem::Elem;

fn sij(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let code = run(std::iter::once("sij").chain(args.iter().copied()), &mut out);
    (code, String::from_utf8(out).unwrap())
}

#[test]
fn documented_examples() {
    assert_eq!(
        sij(&["gt", "size", "--k", "1,3,5"]),
        (EXIT_OK, "8\n".into())
    );
    let (code, out) = sij(&["asm", "enumerate", "--n", "3"]);
    assert_eq!((code, out.lines().count()), (EXIT_OK, 7));
    assert_eq!(
        sij(&["gamma", "verify", "--k", "0,2", "--x", "auto"]),
        (EXIT_OK, "valid; compatible: eta_top, eta_inv\n".into())
    );
}

#[test]
fn weighted_sum_lines() {
    let want = "1 u X1^1\n1 v X1^-1\n1 w\n";
    assert_eq!(
        sij(&["weighted", "sum", "--side", "gmt", "--k", "0"]),
        (EXIT_OK, want.into())
    );
    assert_eq!(
        sij(&["weighted", "sum", "--side", "arsgt", "--k", "0"]),
        (EXIT_OK, want.into())
    );
}

#[test]
fn apply_round_trips_through_the_parser() {
    let (code, out) = sij(&["--format", "json", "gt", "list", "--k", "1,3,5"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let items = v.as_array().unwrap();
    assert_eq!(items.len(), 8);
    for it in items {
        let s = it["elem"].as_str().unwrap();
        assert_eq!(Elem::parse(s).unwrap().to_string(), s);
    }
    let first = items[0]["elem"].as_str().unwrap();
    let (code, img) = sij(&[
        "sij", "apply", "--op", "pi", "--k", "1,3,5", "--i", "1", "--elem", first,
    ]);
    assert_eq!(code, EXIT_OK);
    let (side, e) = img.trim().split_once(' ').unwrap();
    let back = if side == "domain" { "dom" } else { "cod" };
    let (code, again) = sij(&[
        "sij", "apply", "--op", "pi", "--k", "1,3,5", "--i", "1", "--side", back, "--elem", e,
    ]);
    assert_eq!(
        (code, again.trim()),
        (EXIT_OK, format!("domain {first}").as_str())
    );
}

#[test]
fn output_is_deterministic() {
    let a = sij(&["gmt", "list", "--k", "0,2", "--mode", "unsigned"]);
    let b = sij(&["gmt", "list", "--k", "0,2", "--mode", "unsigned"]);
    assert_eq!(a, b);
    assert!(a.1.lines().count() > 0);
}

#[test]
fn exit_codes() {
    assert_eq!(sij(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(
        sij(&["gt", "list", "--format", "dot", "--k", "1"]).0,
        EXIT_USAGE
    );
    assert_eq!(
        sij(&["sij", "verify", "--op", "beta", "--a", "0"]).0,
        EXIT_USAGE
    );
    assert_eq!(
        sij(&["sij", "verify", "--op", "iota-mt", "--k", "0,1,2"]).0,
        EXIT_FAIL
    );
}

/// The budget is process-wide, so this runs the binary in its own process.
#[test]
fn budget_exit_code() {
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_sij"))
        .args(["gt", "size", "--k", "0,5"])
        .env("SIJ_BUDGET", "3")
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_BUDGET));
    assert!(String::from_utf8_lossy(&status.stderr).contains("budget"));
}

#[test]
fn dot_export() {
    let (code, out) = sij(&[
        "--format", "dot", "sij", "table", "--op", "pi", "--k", "0,2", "--i", "1",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("graph sijection {"));
}

#[test]
fn single_acceptance_criterion() {
    let (code, out) = sij(&["acceptance", "--criterion", "10"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.starts_with("PASS 10"));
}
