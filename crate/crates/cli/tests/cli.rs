use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn fluxvol(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fluxvol"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// The value after `V = ` on the first summary line.
fn printed_volume(o: &Output) -> f64 {
    let s = stdout(o);
    let v = s.split("V = ").nth(1).expect("summary line");
    v.split_whitespace().next().unwrap().parse().unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn axisym_thm1_volume() {
    let d = TempDir::new().unwrap();
    let o = fluxvol(
        d.path(),
        &[
            "volume",
            "--field",
            "axisym",
            "--method",
            "thm1",
            "--psi",
            "0.02",
            "--n",
            "20",
            "--reference",
            "exact",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(rel(printed_volume(&o), 0.789548) < 1e-4);
    let csv = std::fs::read_to_string(d.path().join("volume.csv")).unwrap();
    assert!(csv.starts_with("method,region,Psi,dVdPsi,V_cum\r\n"));
    assert_eq!(csv.lines().count(), 22);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.path().join("volume.json")).unwrap()).unwrap();
    assert_eq!(meta["field"]["model"], "axisym");
    assert_eq!(meta["method"], "thm1");
}

#[test]
fn island_volume_through_section_point() {
    let d = TempDir::new().unwrap();
    let o = fluxvol(
        d.path(),
        &[
            "volume", "--field", "helical", "--method", "thm3p", "--region", "island", "--y2", "0.55", "--n", "100",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(rel(printed_volume(&o), 0.155206) < 5e-3);
}

#[test]
fn empty_grid_interval_warns_and_gives_zero() {
    let d = TempDir::new().unwrap();
    let o = fluxvol(
        d.path(),
        &[
            "volume",
            "--field",
            "helical",
            "--method",
            "grid",
            "--psi1",
            "0",
            "--psi2",
            "0",
            "--grid-counts",
            "20,20",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(printed_volume(&o), 0.0);
    assert!(stderr(&o).contains("no node"));
    let meta = std::fs::read_to_string(d.path().join("volume.json")).unwrap();
    assert!(meta.contains("warnings"));
}

#[test]
fn config_errors_exit_one_and_name_the_key() {
    let d = TempDir::new().unwrap();
    let o = fluxvol(d.path(), &["volume", "--psi", "-0.01", "--n", "ten"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("`n`"));

    std::fs::write(d.path().join("bad.cfg"), "field = helical\nwidth = 3\n").unwrap();
    let o = fluxvol(d.path(), &["volume", "--config", "bad.cfg"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("`width`"));

    let o = fluxvol(d.path(), &["volume", "--method", "thm1", "--psi", "-0.01"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("`method`"));

    let o = fluxvol(d.path(), &["volume", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn numerical_failures_exit_two() {
    let d = TempDir::new().unwrap();
    let args = [
        "volume",
        "--method",
        "thm3p",
        "--psi",
        "-0.006",
        "--n",
        "4",
        "--set",
        "tol.rel=1e-300",
        "--set",
        "tol.abs=1e-300",
    ];
    let o = fluxvol(d.path(), &args);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("row 1"), "{}", stderr(&o));
}

#[test]
fn output_is_byte_identical_across_runs_and_threads() {
    let d = TempDir::new().unwrap();
    let args = [
        "volume",
        "--method",
        "thm4,contour",
        "--region",
        "outer",
        "--psi",
        "-0.0235",
        "--n",
        "8",
        "--out",
    ];
    let mut outputs = Vec::new();
    for (threads, name) in [("1", "a.csv"), ("4", "b.csv"), ("4", "c.csv")] {
        let mut a: Vec<&str> = args.to_vec();
        a.push(name);
        let o = Command::new(env!("CARGO_BIN_EXE_fluxvol"))
            .current_dir(d.path())
            .env("RAYON_NUM_THREADS", threads)
            .args(&a)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        outputs.push((
            std::fs::read(d.path().join(name)).unwrap(),
            std::fs::read(d.path().join(name).with_extension("json")).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
}

#[test]
fn printed_config_round_trips() {
    let d = TempDir::new().unwrap();
    std::fs::write(
        d.path().join("run.cfg"),
        "# outer profile\nfield=helical\nmethod = thm4\nregion=outer\npsi = 0.01\nhelical.eps = 0.006\n",
    )
    .unwrap();
    let o = fluxvol(d.path(), &["config", "--config", "run.cfg", "--n", "40"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let first = stdout(&o);
    assert!(first.contains("n = 40\n"));
    assert!(first.contains("helical.eps = 0.006\n"));
    std::fs::write(d.path().join("again.cfg"), &first).unwrap();
    let o = fluxvol(d.path(), &["config", "--config", "again.cfg"]);
    assert_eq!(stdout(&o), first);
}

#[test]
fn diagnostics_return_time_spot_check() {
    let d = TempDir::new().unwrap();
    let o = fluxvol(
        d.path(),
        &[
            "diagnostics",
            "--region",
            "inner",
            "--levels",
            "-0.01031",
            "--out",
            "d.csv",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let mut rd = csv::Reader::from_path(d.path().join("d.csv")).unwrap();
    let rec = rd.records().next().unwrap().unwrap();
    let t: f64 = rec[2].parse().unwrap();
    assert!((t - 15.60).abs() < 0.05, "{t}");
    assert_eq!(&rec[11], "ok");
}

#[test]
fn explicit_levels_need_a_region() {
    let d = TempDir::new().unwrap();
    let o = fluxvol(d.path(), &["diagnostics", "--levels", "-0.01"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("`region`"));
}

#[test]
fn negative_lists_parse_as_values() {
    let d = TempDir::new().unwrap();
    let o = fluxvol(
        d.path(),
        &["config", "--levels", "-0.01,-0.005", "--grid-x", "-0.5,0.5"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("levels = -0.01,-0.005\n"), "{s}");
    assert!(s.contains("grid.x = -0.5,0.5\n"), "{s}");
}
