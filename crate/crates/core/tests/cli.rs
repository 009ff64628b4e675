use std::path::PathBuf;
use std::process::{Command, Output};

use mirrorsym::experiments::{Experiment, ExperimentConfig};

fn mirrorsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mirrorsym"))
        .args(args)
        .env_remove("MIRRORSYM_CONFIG")
        .env_remove("MIRRORSYM_SEED")
        .env_remove("MIRRORSYM_OUT")
        .env_remove("MIRRORSYM_THREADS")
        .output()
        .expect("binary runs")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mirrorsym-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

const SMALL_SWEEP: &str = "
[model]
models = linear(d=4), hadamard(d=4)
[trainer]
steps = 200
[sweep]
learning_rate = 0.01, 0.05
[metrics]
eval_size = 20
";

#[test]
fn sweep_writes_echo_and_table() {
    let cfg = scratch("sweep.cfg", SMALL_SWEEP);
    let out = mirrorsym(&["sweep-sparsity", "--config", cfg.to_str().unwrap(), "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# seed = 5"));
    let table: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(table[0], "model,lr,replicate,sparsity,loss,diverged");
    assert_eq!(table.len(), 1 + 2 * 2 * 3);
}

#[test]
fn out_flag_and_env_agree_with_stdout() {
    let cfg = scratch("env.cfg", SMALL_SWEEP);
    let target = cfg.with_file_name("result.csv");
    let stdout = mirrorsym(&["sweep-sparsity", "--config", cfg.to_str().unwrap()]).stdout;
    let out = Command::new(env!("CARGO_BIN_EXE_mirrorsym"))
        .arg("sweep-sparsity")
        .env("MIRRORSYM_CONFIG", &cfg)
        .env("MIRRORSYM_OUT", &target)
        .env("MIRRORSYM_THREADS", "1")
        .env_remove("MIRRORSYM_SEED")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&target).unwrap();
    let strip = |s: &str| -> String {
        s.lines()
            .filter(|l| !l.starts_with("# output"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&written), strip(&String::from_utf8(stdout).unwrap()));
}

#[test]
fn verify_exit_codes() {
    let ok = mirrorsym(&["verify"]);
    assert_eq!(ok.status.code(), Some(0));
    let faulty = scratch("fault.cfg", "[verify]\ninject_fault = gradient_sign\n");
    let bad = mirrorsym(&["verify", "--config", faulty.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    let text = String::from_utf8(bad.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("gradient[") && l.contains(",false,")));
}

#[test]
fn config_errors_exit_two_with_line_numbers() {
    let cfg = scratch("typo.cfg", "[trainer]\nsteps = 10\nstepz = 3\n");
    let out = mirrorsym(&["sweep-sparsity", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3"), "{err}");

    let missing = mirrorsym(&["lyapunov", "--config", "/nonexistent/mirrorsym.cfg"]);
    assert_eq!(missing.status.code(), Some(2));

    let bad_value = scratch("value.cfg", "[distribution]\nh = three_point(1)\n");
    let out = mirrorsym(&["lyapunov", "--config", bad_value.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn defaults_print_a_parseable_config() {
    for name in ["sweep-sparsity", "sweep-rank", "continual", "lyapunov", "verify"] {
        let out = mirrorsym(&["defaults", name]);
        assert_eq!(out.status.code(), Some(0));
        let text: String = String::from_utf8(out.stdout)
            .unwrap()
            .lines()
            .map(|l| format!("{}\n", l.trim_start_matches("# ")))
            .collect();
        let experiment: Experiment = name.parse().unwrap();
        let parsed = ExperimentConfig::parse(&text, experiment).unwrap();
        assert_eq!(parsed, ExperimentConfig::defaults(experiment));
    }
}
