use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sauq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sauq")).args(args).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("study.toml");
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

const SMALL: &str = r#"
seed = 7

[model]
name = "ishigami"

[[methods]]
kind = "sobol"
n = 500

[[methods]]
kind = "morris"
trajectories = 10
levels = 4
"#;

#[test]
fn list_models_names_every_model() {
    let out = sauq(&["list-models"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["ishigami", "sobol_g", "morris_fn", "mcfc", "sfs1", "sfs4"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing from:\n{text}");
    }
}

#[test]
fn shipped_configs_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut n = 0;
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        let out = sauq(&["validate", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}: {}", p.display(), String::from_utf8_lossy(&out.stderr));
        n += 1;
    }
    assert!(n >= 5);
}

#[test]
fn config_errors_exit_2_with_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "seed = 1\n[model]\nname = \"ishigami\"\n\n[[methods]]\nkind = \"sobol\"\nn = 10\nbogus = 3\n");
    let out = sauq(&["validate", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line"), "{err}");

    let missing = sauq(&["run", tmp.path().join("nope.toml").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));

    let no_seed = write_config(tmp.path(), "[model]\nname = \"ishigami\"\n[[methods]]\nkind = \"oat\"\n");
    assert_eq!(sauq(&["validate", &no_seed]).status.code(), Some(2));

    let unknown_model = write_config(tmp.path(), "seed = 1\n[model]\nname = \"nope\"\n[[methods]]\nkind = \"oat\"\n");
    assert_eq!(sauq(&["validate", &unknown_model]).status.code(), Some(2));
}

#[test]
fn runtime_failure_exits_3_and_keeps_going() {
    // exactly linear output makes the partial correlation system singular
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "seed = 1\n[model]\nname = \"sfs1\"\n[[methods]]\nkind = \"pcc\"\nn_s = 200\n[[methods]]\nkind = \"src\"\nn_s = 200\n",
    );
    let out_dir = tmp.path().join("out");
    let out = sauq(&["run", &cfg, "--output-dir", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out_dir.join("pcc.FAILED").exists());
    assert!(out_dir.join("src.csv").exists());
}

#[test]
fn run_is_reproducible_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let ra = sauq(&["run", &cfg, "--output-dir", a.to_str().unwrap(), "--threads", "1"]);
    let rb = sauq(&["run", &cfg, "--output-dir", b.to_str().unwrap(), "--threads", "3"]);
    assert_eq!(ra.status.code(), Some(0), "{}", String::from_utf8_lossy(&ra.stderr));
    assert_eq!(rb.status.code(), Some(0));
    for f in ["sobol.csv", "morris.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn seed_and_format_flags_apply() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    sauq(&["run", &cfg, "--output-dir", a.to_str().unwrap(), "--seed", "8", "--format", "json"]);
    sauq(&["run", &cfg, "--output-dir", b.to_str().unwrap()]);
    let resolved = fs::read_to_string(a.join("resolved_config.toml")).unwrap();
    assert!(resolved.contains("seed = 8"), "{resolved}");
    let json: serde_json::Value = serde_json::from_slice(&fs::read(a.join("sobol.json")).unwrap()).unwrap();
    assert!(json.is_array() || json.is_object());
    assert_ne!(fs::read(a.join("resolved_config.toml")).unwrap(), fs::read(b.join("resolved_config.toml")).unwrap());
}
