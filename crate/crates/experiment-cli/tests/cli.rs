use std::fs;
use std::process::Command as Proc;

use experiment_cli::manifest::{write_artifact, MANIFEST_FILE};
use experiment_cli::*;
use gap_lab::{gap_sheet_lattice, zero_set, LatticeGrid};
use model_core::{make_lattice_field, Law};

const MINIMAL_GAP: &str = r#"
[experiment]
command = "gap"
seed = 5

[gap]
law = { kind = "geometric", p = 0.5 }
width = 8
"#;

fn config_error_path(text: &str) -> String {
    match parse_config(text) {
        Err(CliError::Config { path, .. }) => path,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn minimal_gap_config_parses() {
    let c = parse_config(MINIMAL_GAP).unwrap();
    assert_eq!(c.command(), Command::Gap);
    assert_eq!(c.experiment.seed, 5);
    assert_eq!(c.experiment.replicates, 1);
    assert_eq!(c.gap().width, 8);
    assert_eq!(c.gap().horizon(), 16);
}

#[test]
fn unknown_and_missing_keys_are_named() {
    assert_eq!(config_error_path(&MINIMAL_GAP.replace("width = 8", "widht = 8")), "gap.widht");
    assert_eq!(config_error_path(&format!("{MINIMAL_GAP}\nextra = 1\n")), "gap.extra");
    assert_eq!(config_error_path("[experiment]\ncommand = \"gap\"\nsede = 2\n"), "experiment.sede");
    let missing = config_error_path("[experiment]\ncommand = \"gap\"\n");
    assert!(missing.is_empty() || missing == "experiment", "{missing}");
    let err = parse_config("[experiment]\ncommand = \"gap\"\n").unwrap_err().to_string();
    assert!(err.contains("seed"), "{err}");
    assert_eq!(config_error_path(&MINIMAL_GAP.replace("width = 8", "width = \"eight\"")), "gap.width");
    assert_eq!(config_error_path(&MINIMAL_GAP.replace("command = \"gap\"", "command = \"draw\"")), "experiment.command");
    assert_eq!(config_error_path(&MINIMAL_GAP.replace("width = 8", "width = 0")), "gap.width");
    assert_eq!(config_error_path(&MINIMAL_GAP.replace("p = 0.5", "p = 1.5")), "gap.law.p");
}

#[test]
fn config_round_trips_through_toml() {
    let mut c = parse_config(MINIMAL_GAP).unwrap();
    c.busemann = Some(Default::default());
    c.verify = Some(Default::default());
    c.experiment.threads = Some(2);
    let back = parse_config(&c.to_toml()).unwrap();
    assert_eq!(back, c);
}

#[test]
fn gap_on_an_eight_by_eight_grid_writes_64_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&parse_config(MINIMAL_GAP).unwrap(), dir.path()).unwrap();
    let csv = fs::read_to_string(dir.path().join("gap_r0.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,y,G"));
    assert_eq!(lines.count(), 64);
    assert!(out.passed);
    assert!(out.manifest.verify_digests(dir.path()).is_empty());
    let names: Vec<&str> = out.manifest.artifacts.iter().map(|a| a.path.as_str()).collect();
    assert!(names.contains(&"gap_r0.svg") && names.contains(&"zeros_r0.svg") && names.contains(&"gap_r0.bin"));
    assert_eq!(out.manifest.environments.len(), 1);
}

fn csv_bytes(cfg: &ExperimentConfig) -> Vec<(String, Vec<u8>)> {
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(cfg, dir.path()).unwrap();
    out.manifest
        .artifacts
        .iter()
        .filter(|a| !a.path.ends_with(".json"))
        .map(|a| (a.path.clone(), fs::read(dir.path().join(&a.path)).unwrap()))
        .collect()
}

#[test]
fn identical_configs_give_identical_artifacts_at_any_thread_count() {
    let mut cfg = parse_config(MINIMAL_GAP).unwrap();
    cfg.experiment.replicates = 3;
    let first = csv_bytes(&cfg);
    assert_eq!(csv_bytes(&cfg), first);
    for threads in [1, 4, 8] {
        cfg.experiment.threads = Some(threads);
        assert_eq!(csv_bytes(&cfg), first, "{threads} threads");
    }
}

#[test]
fn every_command_runs_on_a_small_config() {
    let text = r#"
[experiment]
command = "sample"
seed = 9
replicates = 2

[sample]
model = { kind = "lattice", law = { kind = "exponential" } }
times = [4, 8]

[classify]
width = 8
points = 6
radii = [0.5]

[busemann]
model = { kind = "lattice", law = { kind = "geometric", p = 0.5 } }
base = 8
horizon = 24
thetas = [-0.2, 0.2]
reach = 8
step = 2
delta = 0.05
scan = { window = [-0.4, 0.4], steps = 8, threshold = 0.5, keep = 2 }

[dim]
width = 16

[verify]
lattice = 20
cloud = 20
"#;
    let base = parse_config(text).unwrap();
    for cmd in [Command::Sample, Command::Classify, Command::Busemann, Command::Dim, Command::Verify] {
        let mut cfg = base.clone();
        cfg.experiment.command = cmd;
        let dir = tempfile::tempdir().unwrap();
        let out = run_experiment(&cfg, dir.path()).unwrap_or_else(|e| panic!("{}: {e}", cmd.name()));
        assert!(out.passed, "{}", cmd.name());
        assert!(!out.manifest.artifacts.is_empty());
        assert!(out.manifest.verify_digests(dir.path()).is_empty());
        let m = Manifest::from_json(&fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap()).unwrap();
        assert_eq!(m.artifacts, out.manifest.artifacts);
        let on_disk: Vec<String> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .filter(|n| n != MANIFEST_FILE)
            .collect();
        assert_eq!(on_disk.len(), m.artifacts.len(), "{}: every file is referenced", cmd.name());
    }
}

#[test]
fn svg_renders_are_deterministic() {
    let one = vec![vec![Some(3.0)]];
    let svg = render_svg(SvgInput::Heatmap(&one), &SvgStyle::default());
    assert_eq!(svg.matches("<rect").count(), 1);
    assert_eq!(svg, render_svg(SvgInput::Heatmap(&one), &SvgStyle::default()));
    let with_gap = vec![vec![Some(1.0), None], vec![Some(2.0), Some(0.0)]];
    assert_eq!(render_svg(SvgInput::Heatmap(&with_gap), &SvgStyle::default()).matches("#d0d0d0").count(), 1);

    let f = make_lattice_field(4, 32, 32, Law::Geometric { p: 0.5 }).unwrap();
    let sheet = gap_sheet_lattice(&f, &LatticeGrid::centered(16, 32)).unwrap();
    let z = zero_set(&sheet);
    let layers = [Layer { color: "red".into(), cells: z.cells.clone() }];
    let svg = render_svg(SvgInput::Overlay { rows: 16, cols: 16, layers: &layers }, &SvgStyle::default());
    assert_eq!(svg.matches(r#"class="mark""#).count(), z.len());
}

#[test]
fn manifests_reference_digests() {
    let dir = tempfile::tempdir().unwrap();
    let empty = Manifest::new(None);
    write_manifest(dir.path(), &empty).unwrap();
    let back = Manifest::from_json(&fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(back, empty);
    assert!(back.artifacts.is_empty());

    let mut m = Manifest::new(None);
    write_artifact(dir.path(), &mut m, "a.csv", "test/1", b"x,y\n1,2\n").unwrap();
    assert!(m.verify_digests(dir.path()).is_empty());
    assert_eq!(m.artifacts[0].sha256, digest(b"x,y\n1,2\n"));
    fs::write(dir.path().join("a.csv"), b"x,y\n1,3\n").unwrap();
    assert_eq!(m.verify_digests(dir.path()), vec!["a.csv".to_string()]);
}

#[test]
fn binary_exit_status_follows_checks() {
    let bin = env!("CARGO_BIN_EXE_lpp-exp");
    let dir = tempfile::tempdir().unwrap();
    let status = Proc::new(bin).args(["verify", "--seed", "2", "--threads", "2", "--out"]).arg(dir.path()).status().unwrap();
    assert!(status.success());
    let m = Manifest::from_json(&fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(m.config.unwrap().experiment.seed, 2);

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[experiment]\ncommand = \"gap\"\nseed = 1\nbogus = 3\n").unwrap();
    let out = Proc::new(bin).args(["gap", "--config"]).arg(&bad).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("experiment.bogus"));
}
