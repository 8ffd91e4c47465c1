use std::path::PathBuf;
use std::process::Command;
use waldspurger::cli::{parse_sweep, run_command, RunConfig};
use waldspurger::Error;

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn load(name: &str) -> RunConfig {
    RunConfig::parse(&std::fs::read_to_string(config(name)).unwrap()).unwrap()
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_waldspurger"))
}

#[test]
fn epsilon_report_for_inert_against_ramified() {
    let out = run_command("epsilon", &load("epsilon_inert_ramified.toml"), &[]).unwrap();
    assert_eq!(out.report["report"]["epsilon"], -1);
    assert!(out.verified);
}

#[test]
fn reference_integral_report() {
    let out = run_command("integrate", &load("case1_reference.toml"), &[]).unwrap();
    let r = &out.report["report"];
    assert_eq!(r["predicted"][0], "1/6");
    assert_eq!(r["support_measure"], "1/6");
    assert_eq!(r["matches"], true);
    assert_eq!(r["all_phases_zero"], true);
    assert!((r["brute"][0].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-9);
}

#[test]
fn routes_agree_on_the_reference_instance() {
    let a = run_command("integrate", &load("case1_reference.toml"), &[]).unwrap();
    let b = run_command("integrate", &load("appendix_route.toml"), &[]).unwrap();
    assert_eq!(a.report["report"]["predicted"], b.report["report"]["predicted"]);
    let (x, y) = (a.report["report"]["brute"][0].as_f64().unwrap(), b.report["report"]["brute"][0].as_f64().unwrap());
    assert!((x - y).abs() < 1e-9);
}

#[test]
fn fixed_depth_pass_agrees() {
    let mut cfg = load("case1_reference.toml");
    cfg.run.depth = Some(4);
    let out = run_command("integrate", &cfg, &[]).unwrap();
    assert_eq!(out.report["report"]["at_depth"]["agrees"], true);
    assert!(out.verified);
}

#[test]
fn config_errors_name_the_field() {
    let bad = RunConfig::parse("[context]\np = 5\n[L]\nkind = \"cubic\"\n[theta]\nconductor = 2\n[E]\nkind = \"inert\"\n[chi]\nconductor = 0\n").unwrap();
    match run_command("epsilon", &bad, &[]) {
        Err(Error::Config(msg)) => assert!(msg.contains("[L] kind"), "{msg}"),
        other => panic!("{other:?}"),
    }
    assert!(RunConfig::parse("[context]\nq = 5\n").is_err());
    assert!(matches!(run_command("epsilon", &RunConfig::default(), &[]), Err(Error::Config(_))));
    assert_eq!(parse_sweep("1..4").unwrap(), (1, 4));
    assert!(parse_sweep("4..1").is_err());
}

#[test]
fn star_violation_is_rejected_with_its_hypothesis() {
    let mut cfg = load("case1_reference.toml");
    cfg.chi = Some(waldspurger::cli::CharSpec { conductor: 2, alpha: 1, tame: 0, unif: None });
    let err = run_command("conductor", &cfg, &[]).unwrap_err();
    assert!(err.to_string().contains("(*) violated"));
}

#[test]
fn binary_exit_codes_and_determinism() {
    let run = |args: &[&str]| bin().args(args).output().unwrap();
    let ok = run(&[config("case1_reference.toml").to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0));
    let again = run(&[config("case1_reference.toml").to_str().unwrap()]);
    assert_eq!(ok.stdout, again.stdout);
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["integrate", "/nonexistent.toml"]).status.code(), Some(2));
    let out = std::env::temp_dir().join("waldspurger_cli_test.json");
    let pretty = run(&["existence", config("existence_inert_ramified.toml").to_str().unwrap(), "--pretty", "--out", out.to_str().unwrap()]);
    assert_eq!(pretty.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&pretty.stdout).contains("report.epsilon"));
    let written: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(written["report"]["division"], true);
    let suite = run(&["verify-suite", "7,6"]);
    assert_eq!(suite.status.code(), Some(0));
}

#[test]
fn every_reference_config_runs() {
    for entry in std::fs::read_dir(config("")).unwrap() {
        let path = entry.unwrap().path();
        let cfg = RunConfig::parse(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let cmd = cfg.run.command.clone().unwrap();
        let out = run_command(&cmd, &cfg, &[]).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(out.verified, "{}", path.display());
    }
}
