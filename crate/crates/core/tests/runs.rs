use std::f64::consts::TAU;
use std::process::Command;

use anisoflow::harness::record::read_rows;
use anisoflow::harness::{presets, run, run_batch, verify, FlowConfig};
use anisoflow::par::Execution;
use anisoflow::stepper::{evolve, Cadence, StepConfig};
use anisoflow::{AnisotropyFn, PolyCurve, Vec2, WulffGeometry};
use proptest::prelude::*;

fn short(name: &str, t_final: f64) -> FlowConfig {
    presets::preset(name)
        .unwrap()
        .with_overrides(&[format!("t_final={t_final}")])
        .unwrap()
}

fn csv_bytes(config: &FlowConfig) -> Vec<u8> {
    let outcome = run(config, None).unwrap();
    let mut buf = Vec::new();
    outcome.record.write_csv(&mut buf).unwrap();
    buf
}

#[test]
fn identical_configs_give_identical_series() {
    let config = short("fig5b", 0.02);
    assert_eq!(csv_bytes(&config), csv_bytes(&config));
}

#[test]
fn batch_modes_agree() {
    let configs: Vec<FlowConfig> = ["fig5a", "fig5c", "iso-ellipse"]
        .iter()
        .map(|n| short(n, 0.01))
        .collect();
    let bytes = |exec| -> Vec<Vec<u8>> {
        run_batch(&configs, exec)
            .into_iter()
            .map(|o| {
                let mut buf = Vec::new();
                o.unwrap().record.write_csv(&mut buf).unwrap();
                buf
            })
            .collect()
    };
    assert_eq!(bytes(Execution::Sequential), bytes(Execution::Parallel));
}

#[test]
fn every_preset_parses_and_validates() {
    let names: Vec<&str> = presets::names().collect();
    assert!(names.len() >= 10);
    for name in names {
        let c = presets::preset(name).unwrap();
        c.validate().unwrap();
        assert_eq!(c.name, name);
    }
}

#[test]
fn series_csv_round_trips_through_verify() {
    let outcome = run(&short("fig5d", 0.01), None).unwrap();
    let mut buf = Vec::new();
    outcome.record.write_csv(&mut buf).unwrap();
    let rows = read_rows(buf.as_slice()).unwrap();
    assert_eq!(rows, outcome.record.rows);
    assert!(verify::check_rows(&rows).is_empty());
}

#[test]
fn mesh_ratio_relaxes_exponentially() {
    let outcome = run(&short("fig3", 0.05), None).unwrap();
    let rows = &outcome.record.rows;
    let omega = outcome.config.omega;
    let early = rows.iter().take_while(|r| r.t <= 0.004).last().unwrap();
    let rate = (rows[0].mesh_ratio / early.mesh_ratio).ln() / early.t;
    assert!(rate > 0.5 * omega, "decay rate {rate}");
    let late = rows
        .iter()
        .filter(|r| r.t >= 0.02)
        .map(|r| r.mesh_ratio)
        .fold(0.0, f64::max);
    assert!(late < 1e-4, "{late}");
}

#[test]
fn circle_is_self_similar_under_isotropic_flow() {
    let n = 128;
    let circle = PolyCurve::new(
        (0..n)
            .map(|i| Vec2::from_angle(TAU * i as f64 / n as f64))
            .collect(),
    )
    .unwrap();
    let wulff = WulffGeometry::new(AnisotropyFn::isotropic()).unwrap();
    let record = evolve(
        circle,
        &wulff,
        &StepConfig::default(),
        0.1,
        &Cadence::default(),
    );
    assert!(record.completed());
    let last = record.rows.last().unwrap();
    assert!((last.ratio - record.rows[0].ratio).abs() < 1e-12);
    assert!(last.mesh_ratio < 1e-12);
}

#[test]
fn clockwise_start_is_rejected() {
    let n = 32;
    let cw = PolyCurve::new(
        (0..n)
            .map(|i| Vec2::from_angle(-TAU * i as f64 / n as f64))
            .collect(),
    )
    .unwrap();
    let wulff = WulffGeometry::new(AnisotropyFn::isotropic()).unwrap();
    let record = evolve(cw, &wulff, &StepConfig::default(), 0.1, &Cadence::default());
    assert!(record.failure.is_some());
    assert!(record.rows.is_empty());
}

fn blob() -> impl Strategy<Value = (PolyCurve, AnisotropyFn)> {
    (
        24usize..96,
        prop::collection::vec((-0.08..0.08f64, 0.0..TAU), 3),
        2u32..=6,
        0.0..0.9f64,
    )
        .prop_map(|(n, harmonics, m, f)| {
            let pts = (0..n)
                .map(|i| {
                    let th = TAU * i as f64 / n as f64;
                    let r = 1.0
                        + harmonics
                            .iter()
                            .enumerate()
                            .map(|(k, (a, p))| a * ((k + 2) as f64 * th + p).cos())
                            .sum::<f64>();
                    r * Vec2::from_angle(th)
                })
                .collect();
            let sigma = AnisotropyFn::cosine(f / (m * m - 1) as f64, m).unwrap();
            (PolyCurve::new(pts).unwrap(), sigma)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn steps_stay_dominant_and_dissipative((curve, sigma) in blob()) {
        let wulff = WulffGeometry::new(sigma).unwrap();
        let config = StepConfig { max_tau: 1e-3, ..StepConfig::default() };
        let record = evolve(curve, &wulff, &config, 0.02, &Cadence::default());
        prop_assert!(record.completed(), "{:?}", record.failure);
        prop_assert!(record.min_dominance_margin > 0.0);
        prop_assert!(record.max_relative_residual <= 1e-12);
        let rows = &record.rows;
        prop_assert!(rows.windows(2).all(|w| w[1].t > w[0].t));
        let rise = rows.windows(2).map(|w| w[1].ratio - w[0].ratio).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(rise <= 1e-9, "ratio rose by {rise}");
    }
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_anisoflow"))
}

#[test]
fn cli_lists_presets_and_prints_constants() {
    let out = cli().args(["preset", "list"]).output().unwrap();
    assert!(out.status.success());
    let listing = String::from_utf8(out.stdout).unwrap();
    assert!(listing.lines().any(|l| l == "fig6"));

    let out = cli()
        .args([
            "constants",
            "--sigma",
            "cosine:eps=0.33,m=2",
            "--mu",
            "constant",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let area: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("wulff_area_sigma = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((area - std::f64::consts::PI / 2.0 * (2.0 - 0.33 * 0.33 * 3.0)).abs() < 1e-12);
}

#[test]
fn cli_runs_a_preset_and_verifies_it() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli()
        .args(["preset", "fig5a", "--override", "t_final=0.01", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let run_dir = dir.path().join("fig5a");
    for f in [
        "series.csv",
        "config.toml",
        "summary.toml",
        "snapshots/00000.txt",
        "svg/00000.svg",
    ] {
        assert!(run_dir.join(f).exists(), "missing {f}");
    }
    let out = cli()
        .arg("verify")
        .arg(run_dir.join("series.csv"))
        .output()
        .unwrap();
    assert!(out.status.success());

    let config = run_dir.join("config.toml");
    let out = cli()
        .arg("run")
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("again"))
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let a = std::fs::read(run_dir.join("series.csv")).unwrap();
    let b = std::fs::read(dir.path().join("again/fig5a/series.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn cli_rejects_bad_input() {
    let out = cli().args(["preset", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = cli()
        .args(["preset", "fig3", "--override", "lambda=-1", "--show"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bad.csv");
    let outcome = run(&short("fig5a", 0.005), None).unwrap();
    let mut rows = outcome.record.rows.clone();
    rows[2].ratio = rows[1].ratio + 1e-6;
    let mut buf = Vec::new();
    anisoflow::harness::record::write_rows(&rows, &mut buf).unwrap();
    std::fs::write(&csv, buf).unwrap();
    let out = cli().arg("verify").arg(&csv).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
