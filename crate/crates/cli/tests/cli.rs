use std::fs;
use std::path::{Path, PathBuf};

use kaon_cli::config::{parse_entries, RunConfig, RunMode};
use kaon_cli::run::config_from_summary;
use kaon_cli::{main_with_args, EXIT_CONFIG, EXIT_IO, EXIT_OK};
use kaon_core::protocols::Mode;
use kaon_core::{Constants, TimeConvention};

const MINIMAL: &str = "mode = teleport\nalpha_re = 0.6\nbeta_re = 0.8\nt_x = 0.5\nn_runs = 2000\nseed = 1\n";

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("kaon-teleport").chain(args.iter().copied());
    let code = main_with_args(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn minimal_teleport_config_fills_defaults() {
    let cfg = RunConfig::parse(MINIMAL, None).unwrap();
    assert_eq!(cfg.mode, RunMode::Teleport);
    assert_eq!(cfg.constants, Constants::paper());
    assert_eq!(cfg.kin.convention, TimeConvention::Paper);
    assert_eq!((cfg.kin.gamma_a, cfg.kin.gamma_d), (1.0, 1.0));
    assert_eq!(cfg.grid.points(), vec![0.5, 1.5, 2.5, 3.5, 4.5]);
    assert_eq!(cfg.retain, kaon_core::RetainPolicy::default());
    assert_eq!(cfg.workers, None);
    assert!(matches!(cfg.protocol, Some(Mode::Teleport { .. })));
}

#[test]
fn lorentz_factor_pairs_follow_each_other() {
    let cfg = RunConfig::parse(&format!("{MINIMAL}gamma_b = 2.5\ngamma_c = 3\n"), None).unwrap();
    assert_eq!((cfg.kin.gamma_a, cfg.kin.gamma_b, cfg.kin.gamma_c, cfg.kin.gamma_d), (2.5, 2.5, 3.0, 3.0));
}

#[test]
fn config_errors_name_the_key() {
    let cases = [
        ("mode = teleport\nalpha_re = 2\nbeta_re = 0\nt_x = 0\nn_runs = 1\nseed = 1\n", "normalization"),
        ("mode = teleport\nbeta_re = 1\nt_x = 0\nn_runs = 1\nseed = 1\n", "alpha_re"),
        (&MINIMAL.replace("seed = 1\n", ""), "seed"),
        (&MINIMAL.replace("t_x = 0.5\n", ""), "t_x"),
        (&format!("{MINIMAL}bogus = 1\n"), "bogus"),
        (&format!("{MINIMAL}gamma_l = nan\n"), "gamma_l"),
        (&format!("{MINIMAL}epsilon_re = 0.5\n"), "epsilon_re"),
        (&format!("{MINIMAL}gamma_c = 0.5\n"), "gamma_c"),
        (&format!("{MINIMAL}t_m_start = 0.1\n"), "t_m_start"),
        (&format!("{MINIMAL}c1_re = 1\n"), "c1_re"),
        (&format!("{MINIMAL}retain = phi5\n"), "retain"),
        (&format!("{MINIMAL}workers = 0\n"), "workers"),
        (&format!("{MINIMAL}n_runs = 3\n"), "n_runs"),
        ("mode = general\nc1_re = 1\nc2_re = 0\nw1_k0_re = 1\nt_x = 0\nn_runs = 1\nseed = 1\n", "w2_k0_re"),
    ];
    for (text, key) in cases {
        let err = RunConfig::parse(text, None).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_CONFIG);
        assert!(err.to_string().contains(key), "{key}: {err}");
    }
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "t.cfg", &format!("{MINIMAL}epsilon_re = 0.001\n"));
    let cmd = kaon_cli::command();
    let m = cmd
        .try_get_matches_from(["kaon-teleport", "teleport", "--config", &cfg, "--epsilon-re", "0.002", "--runs", "7", "--t-m-steps", "2"])
        .unwrap();
    let (parsed, force) = kaon_cli::load_config(&m).unwrap();
    assert!(!force);
    assert_eq!(parsed.constants.epsilon.re, 0.002);
    assert_eq!(parsed.n_runs, 7);
    assert_eq!(parsed.grid.steps, 2);
}

#[test]
fn positional_mode_must_agree_with_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "t.cfg", MINIMAL);
    let (code, _, err) = run(&["swap", "--config", &cfg]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(err.contains("mode"), "{err}");
}

#[test]
fn bad_command_lines_are_config_errors() {
    assert_eq!(run(&["teleprt"]).0, EXIT_CONFIG);
    assert_eq!(run(&["teleport", "--no-such-flag", "1"]).0, EXIT_CONFIG);
    assert_eq!(run(&["teleport", "--config", "/nonexistent/file.cfg"]).0, EXIT_IO);
}

#[test]
fn existing_output_needs_force() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "t.cfg", MINIMAL);
    let out = dir.path().join("out");
    fs::create_dir(&out).unwrap();
    let out = out.to_str().unwrap();
    let (code, _, err) = run(&["teleport", "--config", &cfg, "--out", out]);
    assert_eq!(code, EXIT_IO, "{err}");
    assert!(err.contains("--force"));
    assert!(!Path::new(out).join("events.csv").exists());
    let (code, stdout, err) = run(&["teleport", "--config", &cfg, "--out", out, "--force"]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(stdout.contains("check.outcome_chi2="));
    for f in ["events.csv", "observables.csv", "summary.txt"] {
        assert!(Path::new(out).join(f).exists(), "{f}");
    }
}

fn csv_lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().map(String::from).collect()
}

#[test]
fn teleport_outputs_follow_the_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "t.cfg", MINIMAL);
    let out = dir.path().join("out");
    let (code, _, err) = run(&["teleport", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    let events = csv_lines(&out.join("events.csv"));
    assert_eq!(events[0], "run_index,outcome,retained,b_result,d_result,t_m");
    assert_eq!(events.len(), 1 + 5 * 2000);
    for (k, line) in events[1..].iter().enumerate() {
        let cols: Vec<_> = line.split(',').collect();
        assert_eq!(cols.len(), 6);
        assert_eq!(cols[0], k.to_string());
        assert_eq!(cols[4], "");
        if cols[1].starts_with("spoiled") {
            assert_eq!((cols[2], cols[3]), ("false", ""));
        } else {
            assert!(["K0", "K0bar", "decayed"].contains(&cols[3]));
            assert_eq!(cols[2] == "true", cols[1] == "phi4");
        }
    }
    let obs = csv_lines(&out.join("observables.csv"));
    assert_eq!(obs[0], "t_m,subensemble,xi_exact,paper_approx,mc_value,mc_stderr,n_used");
    assert_eq!(obs.len(), 1 + 5 * 5);
    let subs: Vec<_> = obs[1..6].iter().map(|l| l.split(',').nth(1).unwrap().to_string()).collect();
    assert_eq!(subs, ["all", "phi1", "phi2", "phi3", "phi4"]);
    assert!(obs[1].starts_with("0.500000000000,all,"));
}

#[test]
fn swap_and_general_report_asymmetries() {
    let dir = tempfile::tempdir().unwrap();
    let swap = write_config(dir.path(), "s.cfg", "mode = swap\nt_x = 0.3\nt_z = 0.1\nn_runs = 3000\nseed = 9\nt_m_steps = 3\n");
    let out = dir.path().join("swap");
    let (code, _, err) = run(&["swap", "--config", &swap, "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    let obs = csv_lines(&out.join("observables.csv"));
    assert_eq!(obs[0], "t_m,subensemble,asym_exact,paper_approx,mc_value,mc_stderr,n_used");
    // at the collision the Ψ₋ subensemble is perfectly anticorrelated
    let phi4: Vec<_> = obs[5].split(',').collect();
    assert_eq!((phi4[1], phi4[2], phi4[4]), ("phi4", "1.00000000000", "1.00000000000"));
    let events = csv_lines(&out.join("events.csv"));
    assert!(events[1..].iter().any(|l| l.split(',').nth(4).is_some_and(|d| !d.is_empty())));

    let general = "mode = general\nc1_re = 0.6\nc2_im = 0.8\nw1_k0_re = 1\nw2_k0_re = 0.6\nw2_k0bar_re = 0.8\nt_x = 0.2\nt_z = 0.2\nn_runs = 2000\nseed = 3\n";
    let gcfg = write_config(dir.path(), "g.cfg", general);
    let out = dir.path().join("general");
    let (code, _, err) = run(&["general", "--config", &gcfg, "--out", out.to_str().unwrap(), "--workers", "2"]);
    assert_eq!(code, EXIT_OK, "{err}");
    let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("fidelity.phi4=1.00000000000"), "{summary}");
    assert!(summary.contains("check.probability_total=pass"));
}

#[test]
fn summary_config_echo_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let text = "mode = general\nc1_re = 0.6\nc2_im = 0.8\nw1_k0_re = 1\nw2_k0_re = 0.6\nw2_k0bar_im = 0.8\nt_x = 0.7\nt_z = 0.1\n\
                n_runs = 500\nseed = 18446744073709551615\nepsilon_re = 0.0016\nepsilon_im = 0.0015\ngamma_a = 1.1\ngamma_c = 2.3\n\
                time_convention = standard\nretain = phi3,phi4\nworkers = 3\nt_m_start = 0.9\nt_m_stop = 1.3\nt_m_steps = 2\n";
    let out = dir.path().join("out");
    let text = format!("{text}out_dir = {}\n", out.display());
    let cfg_path = write_config(dir.path(), "g.cfg", &text);
    let (code, _, err) = run(&["general", "--config", &cfg_path]);
    assert_eq!(code, EXIT_OK, "{err}");
    let original = RunConfig::parse(&text, None).unwrap();
    let echoed = config_from_summary(&fs::read_to_string(out.join("summary.txt")).unwrap()).unwrap();
    assert_eq!(original, echoed);
    // and the plain text form is stable
    assert_eq!(RunConfig::parse(&original.to_config_text(), None).unwrap(), original);
    assert_eq!(parse_entries(&original.to_config_text()).unwrap().len(), original.entries().len());
}

#[test]
fn verify_mode_passes() {
    let (code, stdout, _) = run(&["verify"]);
    assert_eq!(code, EXIT_OK, "{stdout}");
    assert!(stdout.contains("0 failed"));
    assert!(!stdout.contains("FAIL"));
}

#[test]
fn golden_events_match() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = golden_dir().join("teleport_100.cfg");
    let (code, _, err) = run(&["teleport", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    let got = fs::read(out.join("events.csv")).unwrap();
    let want = fs::read(golden_dir().join("teleport_100_events.csv")).unwrap();
    assert!(got == want, "events.csv differs from the golden file");
}
