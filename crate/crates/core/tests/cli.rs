use std::process::{Command, Output};

use ffep::harness::{Table, DEFAULT_ORDER_GRID};

fn ffep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn table(out: &Output) -> Table {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    Table::read_from(out.stdout.as_slice()).unwrap()
}

#[test]
fn integrate_harmonic_avf_has_initial_row() {
    let out = ffep(&[
        "integrate",
        "--problem",
        "harmonic",
        "--method",
        "avf",
        "--h",
        "0.1",
        "--t-end",
        "1",
    ]);
    let t = table(&out);
    assert_eq!(t.rows.len(), 11);
    assert_eq!(t.header, ["t", "y1", "y2", "H", "dH", "iterations"]);
    assert_eq!(t.rows[0][..3], [0.0, 1.0, 0.0]);
}

#[test]
fn integrate_ffep1_preserves_energy() {
    let out = ffep(&[
        "integrate",
        "--problem",
        "euler-a",
        "--method",
        "ffep1",
        "--h",
        "0.2",
        "--t-end",
        "1",
    ]);
    let t = table(&out);
    assert_eq!(t.rows.len(), 6);
    for h in t.column("H").unwrap() {
        assert!((h - 1.0).abs() <= 1e-12, "{h}");
    }
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["integrate", "--problem", "euler-a", "--method", "rk4"][..],
        &["integrate", "--problem", "pendulum", "--method", "epcm1"],
        &["integrate", "--problem", "euler-a", "--method", "legendre"],
        &[
            "integrate",
            "--problem",
            "euler-a",
            "--method",
            "legendre-9",
        ],
        &[
            "integrate",
            "--problem",
            "euler-a",
            "--method",
            "epcm1",
            "--h",
            "-1",
        ],
        &["integrate", "--problem", "euler-a", "--method", "avf"],
        &[
            "integrate",
            "--problem",
            "euler-a",
            "--method",
            "epcm1",
            "--r",
            "2",
        ],
        &["frobnicate"],
    ] {
        let out = ffep(args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn empty_interval_is_a_numerical_failure() {
    let out = ffep(&[
        "energy-study",
        "--problem",
        "euler-a",
        "--method",
        "epcm1",
        "--t-end",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn legendre_with_stage_flag() {
    let a = table(&ffep(&[
        "integrate",
        "--problem",
        "euler-a",
        "--method",
        "legendre",
        "--r",
        "3",
        "--t-end",
        "0.4",
    ]));
    let b = table(&ffep(&[
        "integrate",
        "--problem",
        "euler-a",
        "--method",
        "legendre-3",
        "--t-end",
        "0.4",
    ]));
    assert_eq!(a.rows, b.rows);
    assert_eq!(a.get_meta("method"), Some("legendre-3"));
}

#[test]
fn energy_study_decimation_keeps_last_step() {
    let out = ffep(&[
        "energy-study",
        "--problem",
        "euler-a",
        "--method",
        "epcm1",
        "--h",
        "0.2",
        "--t-end",
        "2.2",
    ]);
    let t = table(&out);
    let times = t.column("t").unwrap();
    assert_eq!(times.len(), 3);
    assert_eq!(times[0], 0.0);
    assert!((times[1] - 2.0).abs() < 1e-12);
    assert!((times[2] - 2.2).abs() < 1e-12);
    assert_eq!(t.rows[0][2], -17.0);
}

#[test]
fn order_study_default_grid_and_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("order.csv");
    let out = ffep(&[
        "order-study",
        "--problem",
        "euler-a",
        "--method",
        "epcm1",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let t = Table::read_from(std::io::BufReader::new(std::fs::File::open(&path).unwrap())).unwrap();
    assert_eq!(t.column("h").unwrap(), DEFAULT_ORDER_GRID.to_vec());
    let slope: f64 = t.get_meta("slope").unwrap().parse().unwrap();
    assert!((1.85..=2.15).contains(&slope));
    assert!(t.get_meta("reference").unwrap().contains("closed-form"));
}

#[test]
fn order_study_self_reference_is_recorded() {
    let out = ffep(&[
        "order-study",
        "--problem",
        "euler-b",
        "--method",
        "ffep1",
        "--t-end",
        "1",
        "--h-grid",
        "0.02,0.01,0.005",
    ]);
    let t = table(&out);
    assert!(t.get_meta("reference").unwrap().contains("self-reference"));
    assert_eq!(t.get_meta("omega"), Some("50.0"));
}
