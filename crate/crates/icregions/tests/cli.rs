//! End-to-end checks of the command-line surface: JSON inputs, subcommands,
//! report determinism and the exit-code contract.

use icregions::channel::{build, ChannelSpec, ProblemSpec};
use icregions::cli::{self, execute, Cli};
use clap::Parser;
use std::path::PathBuf;

fn spec_file(dir: &tempfile::TempDir) -> PathBuf {
    let spec = ProblemSpec {
        channel: ChannelSpec::noiseless_binary(),
        input: build::crng_trivial_uniform(),
    };
    let path = dir.path().join("spec.json");
    std::fs::write(&path, serde_json::to_string_pretty(&spec).unwrap()).unwrap();
    path
}

fn cmg_spec_file(dir: &tempfile::TempDir) -> PathBuf {
    let spec = ProblemSpec {
        channel: ChannelSpec::noiseless_binary(),
        input: build::cmg_trivial_uniform(),
    };
    let path = dir.path().join("cmg.json");
    std::fs::write(&path, serde_json::to_string_pretty(&spec).unwrap()).unwrap();
    path
}

fn run(args: &[&str]) -> Result<String, cli::CliError> {
    let mut argv = vec!["icr"];
    argv.extend(args);
    execute(Cli::parse_from(argv))
}

#[test]
fn region_build_reports_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_file(&dir);
    let out = run(&[
        "region",
        "build",
        "--input",
        spec.to_str().unwrap(),
        "--variant",
        "crng-base",
    ])
    .unwrap();
    assert!(out.starts_with("37 inequalities"), "{out}");
    let out = run(&[
        "region",
        "build",
        "--input",
        spec.to_str().unwrap(),
        "--variant",
        "crng-tilde",
        "--format",
        "json",
    ])
    .unwrap();
    let sys: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(sys["ineqs"].as_array().unwrap().len(), 16);
}

#[test]
fn region_member_accepts_and_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_file(&dir);
    let out = run(&[
        "region",
        "member",
        "--input",
        spec.to_str().unwrap(),
        "--variant",
        "crng-tilde",
        "--point",
        "R0=0,R1=1,R2=1",
    ])
    .unwrap();
    assert_eq!(out.lines().next().unwrap(), "ACCEPT");
    let out = run(&[
        "region",
        "member",
        "--input",
        spec.to_str().unwrap(),
        "--variant",
        "crng-tilde",
        "--point",
        "R0=0,R1=1.2,R2=1",
    ])
    .unwrap();
    assert_eq!(out.lines().next().unwrap(), "REJECT");
    assert!(out.contains("violates crng-Ri[i=1]"), "{out}");
}

#[test]
fn malformed_json_maps_to_parse_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{ not json").unwrap();
    let err = run(&[
        "region",
        "build",
        "--input",
        path.to_str().unwrap(),
        "--variant",
        "hk",
    ])
    .unwrap_err();
    assert_eq!(err.code(), cli::exit_code::PARSE);
}

#[test]
fn family_mismatch_maps_to_validation_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_file(&dir);
    let err = run(&[
        "region",
        "build",
        "--input",
        spec.to_str().unwrap(),
        "--variant",
        "hk",
    ])
    .unwrap_err();
    assert_eq!(err.code(), cli::exit_code::VALIDATION);
}

#[test]
fn sweep_hits_the_square_corner() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_file(&dir);
    let out = run(&[
        "sweep",
        "--input",
        spec.to_str().unwrap(),
        "--variant",
        "crng-tilde",
        "--slice",
        "0",
        "--angles",
        "9",
    ])
    .unwrap();
    let mid = out.lines().nth(5).unwrap(); // 45 degrees with 9 angles
    let fields: Vec<&str> = mid.split(',').collect();
    let support: f64 = fields[1].parse().unwrap();
    let r1: f64 = fields[2].parse().unwrap();
    let r2: f64 = fields[3].parse().unwrap();
    assert!((support - 2f64.sqrt()).abs() < 1e-9);
    assert!((r1 - 1.0).abs() < 1e-9 && (r2 - 1.0).abs() < 1e-9);
    // The first angle maximizes R1 alone.
    let first = out.lines().nth(1).unwrap();
    let fields: Vec<&str> = first.split(',').collect();
    let support: f64 = fields[1].parse().unwrap();
    assert!((support - 1.0).abs() < 1e-9);
}

#[test]
fn compare_slice_against_eliminated_form() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_file(&dir);
    let out = run(&[
        "region",
        "compare",
        "--input",
        spec.to_str().unwrap(),
        "--variant",
        "crng-base",
        "--slice",
        "0",
        "--variant-b",
        "crng-eliminated0",
        "--dirs",
        "8",
        "--points",
        "60",
        "--seed",
        "5",
        "--format",
        "json",
    ])
    .unwrap();
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["a_only"], 0);
    assert_eq!(report["b_only"], 0);
    assert!(report["max_support_gap"].as_f64().unwrap() < 1e-7);
    // Byte-identical on re-run.
    let again = run(&[
        "region",
        "compare",
        "--input",
        spec.to_str().unwrap(),
        "--variant",
        "crng-base",
        "--slice",
        "0",
        "--variant-b",
        "crng-eliminated0",
        "--dirs",
        "8",
        "--points",
        "60",
        "--seed",
        "5",
        "--format",
        "json",
    ])
    .unwrap();
    assert_eq!(out, again);
}

#[test]
fn region_project_eliminates_binning_rates() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_file(&dir);
    let out = run(&[
        "region",
        "project",
        "--input",
        spec.to_str().unwrap(),
        "--variant",
        "crng-base",
        "--eliminate",
        "r00,r10,r11,r20,r22",
        "--prune",
    ])
    .unwrap();
    assert!(out.contains("after eliminating [r00, r10, r11, r20, r22]"), "{out}");
    let err = run(&[
        "region",
        "project",
        "--input",
        spec.to_str().unwrap(),
        "--variant",
        "crng-base",
        "--eliminate",
        "r00",
        "--fm-cap",
        "9999999",
    ])
    .unwrap_err();
    assert_eq!(err.code(), cli::exit_code::CAP);
}

#[test]
fn jxg_support_matches_capacity() {
    let dir = tempfile::tempdir().unwrap();
    let spec = cmg_spec_file(&dir);
    let out = run(&[
        "region",
        "support",
        "--input",
        spec.to_str().unwrap(),
        "--variant",
        "jxg-reduced",
        "--direction",
        "R1=1",
    ])
    .unwrap();
    assert!(out.starts_with("support 1.000000000000"), "{out}");
}

#[test]
fn codec_gen_simulate_exact_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let code_path = dir.path().join("code.json");
    run(&[
        "codec",
        "gen",
        "--output",
        code_path.to_str().unwrap(),
        "--n",
        "4",
        "--q",
        "2",
        "--lf",
        "2",
        "--lg",
        "1",
        "--noise",
        "0.05",
        "--coupling",
        "0.02",
        "--seed",
        "9",
    ])
    .unwrap();
    let sim = run(&[
        "codec",
        "simulate",
        "--input",
        code_path.to_str().unwrap(),
        "--trials",
        "20000",
        "--seed",
        "4",
        "--format",
        "csv",
    ])
    .unwrap();
    let fields: Vec<&str> = sim.lines().nth(1).unwrap().split(',').collect();
    let error_rate: f64 = fields[3].parse().unwrap();
    let exact = run(&["codec", "exact", "--input", code_path.to_str().unwrap()]).unwrap();
    let exact_value: f64 = exact
        .lines()
        .next()
        .unwrap()
        .trim_start_matches("error probability ")
        .parse()
        .unwrap();
    assert!(
        (error_rate - exact_value).abs() < 0.02,
        "simulate {error_rate} vs exact {exact_value}"
    );
    // Replays are byte-identical.
    let again = run(&[
        "codec",
        "simulate",
        "--input",
        code_path.to_str().unwrap(),
        "--trials",
        "20000",
        "--seed",
        "4",
        "--format",
        "csv",
    ])
    .unwrap();
    assert_eq!(sim, again);
}

#[test]
fn hash_check_exact_dense() {
    let out = run(&[
        "codec",
        "hash-check",
        "--hash-mode",
        "dense",
        "--n",
        "3",
        "--l",
        "2",
        "--exact",
    ])
    .unwrap();
    assert!(out.contains("alpha_hat 1.000000"), "{out}");
    assert!(out.contains("beta_hat 0"), "{out}");
}

#[test]
fn usage_errors_take_clap_exit_code_two() {
    // --trials 0 violates the declared range; clap reports a usage error
    // whose exit code is 2, matching the parse-error contract.
    let result = Cli::try_parse_from([
        "icr", "codec", "simulate", "--input", "x.json", "--trials", "0",
    ]);
    let err = result.unwrap_err();
    assert_eq!(err.exit_code(), cli::exit_code::PARSE);
}

#[test]
fn compare_jxg_against_embedded_tilde() {
    // The reduced JXG region on a CMG/JXG input never pokes out of the
    // aggregate CRNG region on the relabeled input.
    let dir = tempfile::tempdir().unwrap();
    let jxg = cmg_spec_file(&dir);
    let embedded = ProblemSpec {
        channel: ChannelSpec::noiseless_binary(),
        input: icregions::regions::jxg_to_crng_embed(&build::cmg_trivial_uniform()).unwrap(),
    };
    let crng_path = dir.path().join("embedded.json");
    std::fs::write(&crng_path, serde_json::to_string(&embedded).unwrap()).unwrap();
    let out = run(&[
        "region",
        "compare",
        "--input",
        jxg.to_str().unwrap(),
        "--variant",
        "jxg-reduced",
        "--variant-b",
        "crng-tilde",
        "--input-b",
        crng_path.to_str().unwrap(),
        "--dirs",
        "16",
        "--points",
        "120",
        "--seed",
        "3",
        "--format",
        "json",
    ])
    .unwrap();
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["a_only"], 0, "{out}");
}
