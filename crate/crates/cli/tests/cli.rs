use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twistlab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("spawn twistlab")
}

fn run_config(cmd: &str, config: &Path, extra: &[&str], out: &Path) -> Output {
    let mut args = vec![cmd, "--config", config.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args, out)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Data rows of a CSV artifact, skipping `#` lines.
fn rows(path: &Path) -> Vec<csv::StringRecord> {
    let text = std::fs::read_to_string(path).unwrap();
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    csv::Reader::from_reader(body.as_bytes()).records().map(|r| r.unwrap()).collect()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("config.toml");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn lpoly_genus_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config("lpoly", &configs().join("genus2.toml"), &[], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("degree 4"), "{out}");
    assert!(out.contains("W=+1"), "{out}");
    let r = rows(&dir.path().join("lpoly.csv"));
    assert_eq!(r.len(), 1);
    assert_eq!(&r[0][3], "4");
    assert_eq!(&r[0][4], "4");
    assert_eq!(&r[0][5], "+1");
    let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.contains("W=+1"));
}

#[test]
fn zeta_cover_reports_forced_factor() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config("zeta-cover", &configs().join("cubic_covers.toml"), &["--budget", "8"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("8 numerators divisible by 1+5T^2"), "{}", stdout(&o));
    let r = rows(&dir.path().join("zeta_cover.csv"));
    assert_eq!(r.len(), 8);
    for row in &r {
        assert_eq!(&row[1], "3");
        assert!(row[4].parse::<u32>().unwrap() >= 1);
    }
}

#[test]
fn factorize_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config("factorize", &configs().join("cubic_covers.toml"), &["--budget", "5"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let r = rows(&dir.path().join("factorize.csv"));
    assert_eq!(r.len(), 5);
    assert!(r.iter().all(|row| &row[4] == "true"));
}

#[test]
fn classify_symplectic_type_ii() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config("classify", &configs().join("classify_h1.toml"), &[], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let r = rows(&dir.path().join("classify.csv"));
    let ii: Vec<_> = r.iter().filter(|row| &row[8] == "ii").collect();
    assert!(!ii.is_empty());
    for row in ii {
        assert_eq!(&row[4], "true", "H1");
        assert_eq!(&row[6], "true", "odd conductor degree");
    }
}

#[test]
fn forced_zeros_divide() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config("forced-zeros", &configs().join("forced_zeros.toml"), &[], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let r = rows(&dir.path().join("forced_zeros.csv"));
    assert_eq!(r.len(), 12);
    for row in &r {
        assert_eq!(&row[3], "1 0 -49");
        assert_eq!(&row[5], "true");
    }
}

#[test]
fn heegner_orders_are_odd() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config("heegner", &configs().join("heegner.toml"), &["--budget", "300"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    for row in rows(&dir.path().join("heegner.csv")) {
        assert_eq!(row[6].parse::<u32>().unwrap() % 2, 1);
    }
}

#[test]
fn reruns_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "[field]\nq = 5\n[rep]\nkind = \"trivial\"\n[family]\nd = 2\nn = 2\ndegree = 5\n\
         [experiment]\nseed = 4\nbudget = 12\nhaar_samples = 1000\norbit = 1\n",
    );
    let strip = |p: PathBuf| -> String {
        std::fs::read_to_string(p).unwrap().lines().filter(|l| !l.starts_with("# generated")).collect::<Vec<_>>().join("\n")
    };
    let mut seen = Vec::new();
    for (k, threads) in ["1", "3"].iter().enumerate() {
        let out = dir.path().join(format!("run{k}"));
        let o = run_config("equidist", &config, &["--threads", threads], &out);
        assert!(o.status.success(), "{}", stderr(&o));
        seen.push((strip(out.join("equidist_members.csv")), strip(out.join("equidist_moments.csv"))));
    }
    assert_eq!(seen[0], seen[1]);
    assert!(seen[0].0.lines().count() > 5);
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "[field]\nq = 5\n[rep]\nkind = \"trivial\"\n[family]\nd = 2\ndegree = 3\nsplit = [\"t\"]\n\
         [experiment]\nseed = 4\nbudget = 1000\n",
    );
    let o = run_config("density", &config, &["--seed", "77"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("density.csv")).unwrap();
    assert!(text.contains("# seed: 77\n"));
}

#[test]
fn unknown_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[field]\nq = 5\ncolour = 1\n");
    let o = run_config("lpoly", &config, &[], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("colour"), "{}", stderr(&o));
}

#[test]
fn missing_key_exits_2_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[field]\nq = 5\n[rep]\nkind = \"trivial\"\n[family]\nd = 2\n");
    let o = run_config("density", &config, &[], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`family.degree`"), "{}", stderr(&o));
    let o = run(&["lpoly"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_values_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[field]\nq = 6\n[rep]\nkind = \"trivial\"\n");
    assert_eq!(run_config("lpoly", &config, &[], dir.path()).status.code(), Some(2));
    let config = write_config(
        dir.path(),
        "[field]\nq = 5\n[rep]\nkind = \"trivial\"\n[family]\nd = 2\ndegree = 5\n\
         [experiment]\nseed = 4\nbudget = 12\nhaar_samples = 300\n",
    );
    let o = run_config("equidist", &config, &[], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let config = write_config(dir.path(), "[field]\nq = 5\n[rep]\nkind = \"trivial\"\n[family]\nd = 2\nsplit = [\"t^2+1\"]\n");
    let o = run_config("classify", &config, &["--seed", "1"], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn library_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[field]\nq = 5\n[rep]\nkind = \"trivial\"\n[family]\nd = 2\ndegree = 3\n");
    let o = run_config("lpoly", &config, &[], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("geometrically trivial"), "{}", stderr(&o));
    let config = write_config(
        dir.path(),
        "[field]\nq = 5\n[rep]\nkind = \"trivial\"\n[family]\nd = 2\nf = \"t^3+t+1\"\n[experiment]\nseed = 1\n",
    );
    let o = run_config("forced-zeros", &config, &[], dir.path());
    assert_eq!(o.status.code(), Some(2), "missing degree: {}", stderr(&o));
    let config = write_config(
        dir.path(),
        "[field]\nq = 7\n[rep]\nkind = \"elliptic\"\nA = \"5*t+1\"\nB = \"5\"\n[family]\nd = 4\ndegree = 4\n\
         ramified = [\"t\", \"t+4\"]\n[experiment]\nseed = 6\nbudget = 50\n",
    );
    let o = run_config("forced-zeros", &config, &[], dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).contains("table limit"), "{}", stderr(&o));
}
