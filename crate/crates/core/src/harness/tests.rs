use super::*;
use crate::spacetime::FaultTag;

fn cfg(eps: f64, shots: usize) -> RunConfig {
    RunConfig {
        eps,
        shots,
        ..RunConfig::default()
    }
}

#[test]
fn noiseless_runs_never_fail() {
    let r = run_memory(&cfg(0.0, 40)).unwrap();
    assert_eq!(r.failures, 0);
    assert!(r.shots.iter().all(|s| s.bit_out == Some(s.bit_in)));
    assert!(r.shots.iter().any(|s| s.bit_in == 1));
}

#[test]
fn reports_are_deterministic() {
    let c = cfg(1e-3, 30);
    assert_eq!(run_memory(&c).unwrap().to_json(), run_memory(&c).unwrap().to_json());
    let other = RunConfig { seed: 2, ..c.clone() };
    assert_ne!(run_memory(&c).unwrap().to_json(), run_memory(&other).unwrap().to_json());
}

#[test]
fn wilson_bounds() {
    let (lo, hi) = wilson_interval(0, 100);
    assert_eq!(lo, 0.0);
    assert!((hi - 0.0370).abs() < 1e-3);
    let (lo, hi) = wilson_interval(50, 100);
    assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
    assert_eq!(wilson_interval(0, 0), (0.0, 1.0));
}

#[test]
fn validation_rejects_small_codes() {
    assert!(RunConfig { d: 3, ..cfg(0.0, 1) }.validate().is_err());
    assert!(RunConfig { l: 6, ..cfg(0.0, 1) }.validate().is_err());
    assert!(cfg(0.0, 0).validate().is_err());
    assert!(cfg(0.0, 1).validate().is_ok());
}

#[test]
fn key_value_and_json_configs() {
    let base = RunConfig::default();
    let c = parse_config("# memory\nL = 12\nd=5\neps=0.001\nfaults = qubitZ, measFlip\n", &base).unwrap();
    assert_eq!((c.l, c.d, c.eps), (12, 5, 0.001));
    assert_eq!(c.faults, vec![FaultTag::QubitZ, FaultTag::MeasFlip]);
    assert_eq!(c.t, base.t);
    let j = parse_config(r#"{"L": 10, "masterSeed": 9}"#, &base).unwrap();
    assert_eq!((j.l, j.seed), (10, 9));
    assert!(matches!(parse_config("L 12", &base), Err(ConfigError::Syntax(1))));
}

#[test]
fn grids_take_the_cartesian_product() {
    let base = RunConfig { shots: 4, ..RunConfig::default() };
    assert!(parse_grid("", &base).unwrap().is_empty());
    assert_eq!(sweep(&[]).unwrap(), format!("{CSV_HEADER}\n"));
    let grid = parse_grid("L=8,10,12\neps=0,0.0001,0.001\n", &base).unwrap();
    assert_eq!(grid.len(), 9);
    assert_eq!((grid[0].l, grid[0].eps), (8, 0.0));
    assert_eq!((grid[8].l, grid[8].eps), (12, 0.001));
    let csv = sweep(&grid).unwrap();
    assert_eq!(csv.lines().count(), 10);
    assert!(csv.lines().skip(1).all(|r| r.split(',').count() == CSV_HEADER.split(',').count()));
}

#[test]
fn duplicate_rows_differ_only_in_runtime() {
    let c = RunConfig { shots: 6, eps: 1e-3, ..RunConfig::default() };
    let csv = sweep(&[c.clone(), c]).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|r| r.split(',').collect()).collect();
    let n = rows[0].len();
    assert_eq!(rows[0][..n - 1], rows[1][..n - 1]);
}

#[test]
fn chart_is_svg_with_a_line_per_size() {
    let csv = format!("{CSV_HEADER}\n8,8,0.001,10,6,4,10,1,0.1,0,0.4,1,1\n8,8,0.01,10,6,4,10,1,0.5,0.2,0.8,1,1\n12,8,0.001,10,6,4,10,1,0,0,0.3,1,1\n");
    let svg = svg_chart(&csv);
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<polyline").count(), 2);
    assert!(svg_chart(CSV_HEADER).contains("</svg>"));
}

#[test]
fn saturated_noise_completes_every_shot() {
    let c = RunConfig {
        eps: 1.0 - 0.5f64.powf(0.1),
        shots: 400,
        ..RunConfig::default()
    };
    assert!((c.cube_p() - 0.5).abs() < 1e-9);
    let r = run_memory(&c).unwrap();
    assert_eq!(r.shots.len(), 400);
    assert!(r.shots.iter().enumerate().all(|(k, s)| s.shot == k));
    // escalations count as failures, so the rate sits at or near 1
    assert!(r.fail_rate >= 0.25, "{}", r.fail_rate);
}
