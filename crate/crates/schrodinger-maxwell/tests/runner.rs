use schrodinger_maxwell::runner::config::*;
use schrodinger_maxwell::runner::output::*;
use schrodinger_maxwell::runner::study::*;
use schrodinger_maxwell::runner::*;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn small_tm(scheme: &str, t: f64) -> String {
    format!(
        r#"
name = "small"
scheme = "{scheme}"
t_final = {t:?}

[grid]
dim = 2
m = 8
lengths = [2.0, 2.0]

[pgrid]
left = -10.0
right = 10.0
n = 16

[problem]
kind = "tm_plane_wave"
"#
    )
}

fn small_pec(t: f64) -> String {
    format!(
        r#"
name = "small-pec"
scheme = "upwind_char"
t_final = {t:?}

[grid]
dim = 1
m = 16
lengths = [15.0]

[pgrid]
left = -10.0
right = 10.0
n = 16

[problem]
kind = "pec"

[boundary]
left = "perfect_conductor"
right = "perfect_conductor"

[evolution]
dt = 0.01
"#
    )
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("schrmax-test-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

fn is_config_error<T: std::fmt::Debug>(r: Result<T, RunError>) -> bool {
    matches!(r, Err(RunError::Config(_)))
}

// ---------- configs ----------

#[test]
fn presets_parse_and_validate() {
    let names: Vec<_> = presets::names().collect();
    assert_eq!(names.len(), 9);
    for n in &names {
        let c = presets::load(n).unwrap();
        assert_eq!(&c.name, n);
    }
    for n in ["periodic-2d-tm", "pec-1d", "impedance-1d", "interface-1d", "gaussian-pulse-inhomogeneous"] {
        assert!(names.contains(&n));
    }
    let e = presets::find("nope").err().unwrap();
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn unknown_keys_are_rejected() {
    let base = small_tm("schr1_spectral", 1.0);
    assert!(ScenarioConfig::from_toml(&base).is_ok());
    assert!(is_config_error(ScenarioConfig::from_toml(&format!("colour = 1\n{base}"))));
    assert!(is_config_error(ScenarioConfig::from_toml(&base.replace("n = 16", "n = 16\nwidth = 3"))));
    assert!(is_config_error(ScenarioConfig::from_toml(&base.replace("kind = \"tm_plane_wave\"", "kind = \"tm_plane_wave\"\nspeed = 2"))));
    let json = ScenarioConfig::from_toml(&base).unwrap().to_json();
    assert!(ScenarioConfig::from_json(&json).is_ok());
    assert!(is_config_error(ScenarioConfig::from_json(&json.replacen('{', "{\"extra\": true,", 1))));
}

#[test]
fn validation_lists_every_problem() {
    let bad = small_tm("schr2_yee", -1.0).replace("dim = 2\nm = 8\nlengths = [2.0, 2.0]", "dim = 1\nm = 8\nlengths = [2.0]").replace("n = 16", "n = 15");
    let msg = match ScenarioConfig::from_toml(&bad) {
        Err(RunError::Config(m)) => m,
        other => panic!("{other:?}"),
    };
    assert!(msg.contains("t_final"), "{msg}");
    assert!(msg.contains("pgrid"), "{msg}");
    assert!(msg.contains("schr2_yee"), "{msg}");
    assert!(is_config_error(ScenarioConfig::from_toml(&small_pec(1.0).replace("scheme = \"upwind_char\"", "scheme = \"schr1_spectral\""))));
    assert!(is_config_error(ScenarioConfig::from_toml(&small_pec(1.0).replace("dt = 0.01", "dt = 0.0"))));
    assert!(is_config_error(ScenarioConfig::from_toml(&small_tm("schr1_spectral", 1.0).replace("t_final = 1.0", "t_final = 1.0\nsnapshots = [2.0]"))));
}

#[test]
fn manifests_round_trip() {
    for n in presets::names() {
        let c = presets::load(n).unwrap();
        assert_eq!(ScenarioConfig::from_toml(&c.to_toml()).unwrap(), c, "{n}");
        assert_eq!(ScenarioConfig::from_json(&c.to_json()).unwrap(), c, "{n}");
    }
    assert!(presets::load("impedance-1d").unwrap().pgrid.fit);
    assert!(!presets::load("pec-1d").unwrap().to_toml().contains("fit"));
}

// ---------- runs and artifacts ----------

#[test]
fn runs_are_deterministic() {
    for text in [small_tm("schr1_spectral", 0.5), small_tm("schr2_yee", 0.5), small_pec(0.2)] {
        let c = ScenarioConfig::from_toml(&text).unwrap();
        let (a, b) = (run(&c).unwrap(), run(&c).unwrap());
        assert_eq!(fields_csv(&a.frames, c.grid.dim), fields_csv(&b.frames, c.grid.dim));
        assert_eq!(diagnostics_json(&a), diagnostics_json(&b));
        assert_eq!(manifest_toml(&a), manifest_toml(&b));
    }
}

#[test]
fn manifest_reruns_to_the_same_output() {
    let c = ScenarioConfig::from_toml(&small_pec(0.2).replace("kind = \"pec\"", "kind = \"impedance\"").replace("perfect_conductor", "impedance").replace("n = 16", "n = 16\nfit = true")).unwrap();
    let a = run(&c).unwrap();
    let again = ScenarioConfig::from_toml(&manifest_toml(&a)).unwrap();
    assert_eq!(again, c);
    assert_eq!(diagnostics_json(&run(&again).unwrap()), diagnostics_json(&a));
}

#[test]
fn zero_time_runs_have_no_drift() {
    let c = ScenarioConfig::from_toml(&small_tm("schr1_spectral", 0.0)).unwrap();
    let out = run(&c).unwrap();
    assert_eq!(out.report.energy_drift, 0.0);
    // sampling the closed form at the nodes is exact for the spectral scheme
    assert!(out.report.err_eb <= 1e-14);
    let y = run(&ScenarioConfig::from_toml(&small_tm("schr2_yee", 0.0)).unwrap()).unwrap();
    assert_eq!(y.report.energy_drift, 0.0);
    assert_eq!(y.report.div_b_drift, Some(0.0));
}

#[test]
fn csv_layout_and_precision() {
    let c = ScenarioConfig::from_toml(&small_pec(0.1)).unwrap();
    let out = run(&c).unwrap();
    let csv = fields_csv(&out.frames, 1);
    assert!(!csv.contains('\r'));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,x,component,re,im"));
    let rows: Vec<&str> = lines.collect();
    assert!(!rows.is_empty());
    for row in &rows {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 5, "{row}");
        for v in [cols[0], cols[1], cols[3], cols[4]] {
            let mantissa = v.trim_start_matches('-').split('e').next().unwrap();
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{v}");
            v.parse::<f64>().unwrap();
        }
    }
    let x = 0.1f64 + 0.2;
    assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    let tm = run(&ScenarioConfig::from_toml(&small_tm("schr1_spectral", 0.1)).unwrap()).unwrap();
    assert!(fields_csv(&tm.frames, 2).starts_with("t,x,y,component,re,im\n"));
}

#[test]
fn diagnostics_json_carries_paper_reference() {
    let tm = run(&ScenarioConfig::from_toml(&small_tm("schr1_spectral", 0.3)).unwrap()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&diagnostics_json(&tm)).unwrap();
    assert_eq!(v["paper_reference"]["err_eb"], 3.72e-15);
    for key in ["energy_initial", "energy_final", "energy_drift", "div_b_drift", "gauss_f4", "gauss_f8", "err_eb", "complexity"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    let pec = run(&ScenarioConfig::from_toml(&small_pec(0.1)).unwrap()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&diagnostics_json(&pec)).unwrap();
    assert!(v["paper_reference"].is_null());
    assert!(v["details"]["wall_residual"].as_f64().unwrap() <= 1e-14);
}

#[test]
fn outputs_are_written_atomically() {
    let dir = scratch("atomic");
    let p = dir.join("sub").join("a.txt");
    write_atomic(&p, "one").unwrap();
    write_atomic(&p, "two").unwrap();
    assert_eq!(fs::read_to_string(&p).unwrap(), "two");
    let left: Vec<_> = fs::read_dir(p.parent().unwrap()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(left.len(), 1, "{left:?}");
    let out = run(&ScenarioConfig::from_toml(&small_pec(0.1)).unwrap()).unwrap();
    let written = write_outputs(&out, &dir.join("run")).unwrap();
    let names: Vec<_> = written.iter().map(|p| p.file_name().unwrap().to_str().unwrap().to_string()).collect();
    assert_eq!(names, [FIELDS_FILE, DIAGNOSTICS_FILE, MANIFEST_FILE]);
    assert!(write_atomic(&dir, "x").is_err());
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn table1_at_zero_time_has_exact_zero_drift() {
    let t = table1(&Table1Overrides { t_final: Some(0.0), m: Some(8), n: Some(16) }).unwrap();
    let measured: Vec<_> = t.entries.iter().filter_map(|e| e.measured).collect();
    assert_eq!(measured.len(), 2);
    for m in &measured {
        assert_eq!(m.energy_drift, 0.0);
        assert!(m.div_b_drift.map_or(true, |d| d == 0.0));
    }
    assert!(t.render().contains("schr2 (paper)"));
}

#[test]
fn convergence_needs_three_levels() {
    let base = ScenarioConfig::from_toml(&small_pec(0.2)).unwrap();
    let r = convergence(&base, &[Scheme::UpwindChar], &[16, 32], SweepAxis::Space, None);
    assert!(is_config_error(r));
    assert!(is_config_error(convergence(&base, &[], &[16, 32, 64], SweepAxis::Space, None)));
    let t = convergence(&base, &[Scheme::UpwindChar, Scheme::Yee1d], &[16, 32, 64], SweepAxis::Space, Some(2)).unwrap();
    assert_eq!(t.points.len(), 6);
    assert!(t.points.iter().all(|p| p.err.is_finite() && p.err > 0.0));
}

#[test]
fn error_codes() {
    assert_eq!(RunError::Config(String::new()).exit_code(), 2);
    assert_eq!(RunError::Numerical(String::new()).exit_code(), 3);
}

// ---------- binary ----------

fn schrmax(args: &[&str], cwd: &Path) -> (i32, String, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_schrmax")).args(args).current_dir(cwd).output().unwrap();
    (o.status.code().unwrap(), String::from_utf8(o.stdout).unwrap(), String::from_utf8(o.stderr).unwrap())
}

#[test]
fn cli_exit_codes() {
    let dir = scratch("cli");
    let (code, out, _) = schrmax(&["presets", "list"], &dir);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 9);
    let (code, out, _) = schrmax(&["presets", "show", "pec-1d"], &dir);
    assert_eq!(code, 0);
    assert!(ScenarioConfig::from_toml(&out).is_ok());
    assert_eq!(schrmax(&["presets", "show", "nope"], &dir).0, 2);

    fs::write(dir.join("bad.toml"), format!("bogus = 1\n{}", small_pec(0.1))).unwrap();
    let (code, _, err) = schrmax(&["run", "bad.toml"], &dir);
    assert_eq!(code, 2);
    assert!(err.contains("bogus"), "{err}");
    assert_eq!(schrmax(&["run", "missing.toml"], &dir).0, 2);

    let strict = small_pec(0.1) + "\n[checks]\nerr_eb_range = [0.0, 1e-30]\n";
    fs::write(dir.join("strict.toml"), strict).unwrap();
    assert_eq!(schrmax(&["run", "strict.toml", "--out", "o1"], &dir).0, 0);
    assert_eq!(schrmax(&["run", "strict.toml", "--out", "o1", "--check"], &dir).0, 4);

    // the direct RK4 reference would need more than its step budget
    let huge = small_tm("schr1_spectral", 1e5).replace("m = 8", "m = 4").replace("t_final", "reference = true\nt_final");
    fs::write(dir.join("huge.toml"), huge).unwrap();
    let (code, _, err) = schrmax(&["run", "huge.toml", "--out", "o2"], &dir);
    assert_eq!(code, 3, "{err}");

    assert_eq!(schrmax(&["convergence", "--config", "strict.toml", "--levels", "16,32"], &dir).0, 2);
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn cli_outputs_do_not_depend_on_jobs() {
    let dir = scratch("jobs");
    fs::write(dir.join("c.toml"), small_pec(0.2)).unwrap();
    for (j, out) in [("1", "a"), ("3", "b")] {
        let (code, stdout, err) = schrmax(&["--jobs", j, "run", "c.toml", "--out", out], &dir);
        assert_eq!(code, 0, "{err}");
        assert_eq!(stdout.matches("wrote").count(), 3);
    }
    for f in [FIELDS_FILE, DIAGNOSTICS_FILE, MANIFEST_FILE] {
        assert_eq!(fs::read(dir.join("a").join(f)).unwrap(), fs::read(dir.join("b").join(f)).unwrap(), "{f}");
    }
    let manifest = dir.join("a").join(MANIFEST_FILE);
    let (code, _, _) = schrmax(&["run", manifest.to_str().unwrap(), "--out", "c"], &dir);
    assert_eq!(code, 0);
    assert_eq!(fs::read(dir.join("a").join(FIELDS_FILE)).unwrap(), fs::read(dir.join("c").join(FIELDS_FILE)).unwrap());
    let (code, _, _) = schrmax(&["convergence", "--config", "c.toml", "--levels", "16,32,64", "--json", "conv.json"], &dir);
    assert_eq!(code, 0);
    assert!(serde_json::from_str::<serde_json::Value>(&fs::read_to_string(dir.join("conv.json")).unwrap()).is_ok());
    fs::remove_dir_all(&dir).unwrap();
}
