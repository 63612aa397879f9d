//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::fs;
use std::path::Path;
use std::process::Command;

use sweepwidth::sweep::{scenarios, sweep_one};
use sweepwidth::units::distance_to_horizon_km;
use sweepwidth::{
    analytic_w, calculate_w, read_results, run_experiment, Catalog, ComparisonReport,
    ExperimentConfig, HumanEye, HumanEyeConfig, Mode, ModelConstants, Scenario,
};

const ORACLE_TOL_KM: f64 = 0.002;
const MC_GAP_FRACTION: f64 = 0.01;
const HORIZON_TOL_KM: f64 = 0.001;
const MC_ROWS: u32 = 600_000;
const MC_SEED: u64 = 42;

/// Scenarios and the exhaustive W each must reach, from a brute-force scan.
const CONVERGENCE_CASES: [(&str, u32, f64, f64); 5] = [
    ("Raft 1-person", 150, 1.9, 3.8),
    ("Raft 1-person", 150, 37.0, 14.90),
    ("Raft 4-person", 300, 9.3, 18.6),
    ("Ship 92", 600, 37.0, 108.4),
    ("Power boat 2", 150, 5.6, 11.2),
];

type Outcome = Result<String, String>;

struct Fixture {
    eye_cfg: HumanEyeConfig,
    eye: HumanEye,
    constants: ModelConstants,
    catalog: Catalog,
    scenarios: Vec<Scenario>,
    exhaustive_w: Vec<f64>,
}

impl Fixture {
    fn new() -> Self {
        let eye_cfg = HumanEyeConfig {
            wavelength_m: 550e-9,
            pupil_diameter_m: 5e-3,
        };
        let constants = ModelConstants::default();
        assert_eq!(constants.sea_length_m, 54_200);
        let catalog = Catalog::default_catalog();
        let scenarios = scenarios(&catalog, &constants).unwrap();
        let eye = HumanEye::new(eye_cfg).unwrap();
        let cfg = ExperimentConfig::default();
        let exhaustive_w = scenarios
            .iter()
            .map(|s| calculate_w(&run_experiment(&eye, s, &cfg).unwrap()))
            .collect();
        Fixture {
            eye_cfg,
            eye,
            constants,
            catalog,
            scenarios,
            exhaustive_w,
        }
    }

    fn index_of(&self, object: &str, alt: u32, vis: f64) -> usize {
        self.scenarios
            .iter()
            .position(|s| s.object.name == object && s.altitude_m == alt && s.visibility_km == vis)
            .unwrap()
    }
}

fn oracle_equivalence(f: &Fixture) -> Outcome {
    if f.scenarios.len() != 306 {
        return Err(format!("{} scenarios, expected 306", f.scenarios.len()));
    }
    let mut worst = 0.0f64;
    for (s, &w) in f.scenarios.iter().zip(&f.exhaustive_w) {
        let closed = analytic_w(&f.eye_cfg, s, &f.constants).unwrap();
        let diff = (w - closed).abs();
        worst = worst.max(diff);
        if diff > ORACLE_TOL_KM {
            return Err(format!(
                "{} {} m {} km: exhaustive {w} vs analytic {closed}",
                s.object.name, s.altitude_m, s.visibility_km
            ));
        }
    }
    Ok(format!("306 scenarios, max |diff| = {worst:.3e} km"))
}

fn convergence_at_seed(f: &Fixture, seed: u64) -> Outcome {
    let mut notes = Vec::new();
    for (name, alt, vis, target) in CONVERGENCE_CASES {
        let i = f.index_of(name, alt, vis);
        let ex = f.exhaustive_w[i];
        if (ex - target).abs() > 1e-9 {
            return Err(format!(
                "{name}: exhaustive W {ex} differs from target {target}"
            ));
        }
        let cfg = ExperimentConfig {
            rows: MC_ROWS,
            seed,
            stream: i as u64,
            mode: Mode::MonteCarlo,
            ..ExperimentConfig::default()
        };
        let mc = sweep_one(&f.eye, &f.scenarios[i], &cfg).unwrap().w_km;
        let gap = ex - mc;
        if mc > ex {
            return Err(format!("{name} {alt} {vis}: mc {mc} > exhaustive {ex}"));
        }
        if gap > MC_GAP_FRACTION * ex {
            return Err(format!(
                "{name} {alt} {vis}: gap {gap} km exceeds 1% of {ex}"
            ));
        }
        notes.push(format!("{ex}:{:.4}%", 100.0 * gap / ex));
    }
    Ok(format!("seed {seed}, gaps {}", notes.join(" ")))
}

fn horizon_fixture(_: &Fixture) -> Outcome {
    let mut got = Vec::new();
    for (alt, want) in [(150.0, 46.908), (300.0, 66.338), (600.0, 93.816)] {
        let d = distance_to_horizon_km(alt).unwrap().value();
        if (d - want).abs() > HORIZON_TOL_KM {
            return Err(format!("{alt} m: {d} km, expected {want}"));
        }
        got.push(format!("{d:.4}"));
    }
    Ok(got.join("/"))
}

fn step_function(f: &Fixture) -> Outcome {
    let cfg = ExperimentConfig::default();
    for s in &f.scenarios {
        let data = run_experiment(&f.eye, s, &cfg).unwrap();
        let mut prev = 1.0;
        for (x, c) in data.iter_all() {
            let frac = c.fraction();
            if frac != 0.0 && frac != 1.0 {
                return Err(format!("{}: fractional value at x = {x}", s.object.name));
            }
            if prev == 0.0 && frac == 1.0 {
                return Err(format!(
                    "{} {} {}: 0 -> 1 transition at x = {x}",
                    s.object.name, s.altitude_m, s.visibility_km
                ));
            }
            prev = frac;
        }
    }
    Ok("every detected set is a prefix".into())
}

fn monotonicity(f: &Fixture) -> Outcome {
    let mut by_size: Vec<_> = f.catalog.iter().collect();
    by_size.sort_by_key(|o| o.size_m);
    let mut checks = 0;
    for &alt in &f.constants.altitudes_m {
        for &vis in &f.constants.visibilities_km {
            let ws: Vec<f64> = by_size
                .iter()
                .map(|o| f.exhaustive_w[f.index_of(&o.name, alt, vis)])
                .collect();
            if let Some(k) = ws.windows(2).position(|w| w[1] < w[0]) {
                return Err(format!(
                    "alt {alt} vis {vis}: W drops from {} to {} between {} and {}",
                    ws[k],
                    ws[k + 1],
                    by_size[k].name,
                    by_size[k + 1].name
                ));
            }
            checks += 1;
        }
    }
    for o in &f.catalog {
        for &alt in &f.constants.altitudes_m {
            let ws: Vec<f64> = f
                .constants
                .visibilities_km
                .iter()
                .map(|&v| f.exhaustive_w[f.index_of(&o.name, alt, v)])
                .collect();
            if ws.windows(2).any(|w| w[1] < w[0]) {
                return Err(format!(
                    "{} at {alt} m: W not monotone in visibility: {ws:?}",
                    o.name
                ));
            }
            checks += 1;
        }
    }
    Ok(format!("{checks} sequences non-decreasing"))
}

fn cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_sweepwidth"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "sweepwidth {args:?} exited {}: {}",
            out.status,
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(())
}

fn mc_sweep(dir: &Path, seed: u64, tag: &str) -> Result<Vec<u8>, String> {
    let path = dir.join(format!("mc_{seed}_{tag}.csv"));
    let seed = seed.to_string();
    cli(&[
        "sweep",
        "--mode",
        "mc",
        "--seed",
        &seed,
        "--rows",
        "100000",
        "--out",
        path.to_str().unwrap(),
    ])?;
    fs::read(&path).map_err(|e| e.to_string())
}

fn body(bytes: &[u8]) -> Vec<&[u8]> {
    bytes
        .split(|&b| b == b'\n')
        .filter(|l| !l.starts_with(b"#"))
        .collect()
}

fn determinism(f: &Fixture, dir: &Path) -> Outcome {
    let a = mc_sweep(dir, 7, "a")?;
    let b = mc_sweep(dir, 7, "b")?;
    if body(&a) != body(&b) {
        return Err("two seed-7 runs differ".into());
    }
    if a != b {
        return Err("two seed-7 runs differ in their metadata line".into());
    }
    let c = mc_sweep(dir, 8, "a")?;
    let ra = read_results(a.as_slice()).map_err(|e| e.to_string())?;
    let rc = read_results(c.as_slice()).map_err(|e| e.to_string())?;
    if ra.len() != 306 || rc.len() != 306 {
        return Err("expected 306 rows per results file".into());
    }
    let changed = ra
        .iter()
        .zip(&rc)
        .filter(|(x, y)| x.coverage_fraction != y.coverage_fraction)
        .count();
    if changed == 0 {
        return Err("seed 8 left every coverage_fraction unchanged".into());
    }
    let bounds = convergence_at_seed(f, 7)?;
    Ok(format!(
        "byte-identical reruns, seed 8 changes {changed}/306 coverage values; {bounds}"
    ))
}

fn self_comparison(dir: &Path) -> Outcome {
    let results = dir.join("self.csv");
    let report = dir.join("self_report.csv");
    cli(&[
        "sweep",
        "--mode",
        "exhaustive",
        "--out",
        results.to_str().unwrap(),
    ])?;
    cli(&[
        "compare",
        "--model",
        results.to_str().unwrap(),
        "--reference",
        results.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ])?;
    let text = fs::read(&report).map_err(|e| e.to_string())?;
    let r = ComparisonReport::read_csv(text.as_slice()).map_err(|e| e.to_string())?;
    if r.summary.cells_compared != 306 {
        return Err(format!("{} cells compared", r.summary.cells_compared));
    }
    if r.summary.mape_percent != Some(0.0) {
        return Err(format!("MAPE {:?}", r.summary.mape_percent));
    }
    if let Some(c) = r.cells.iter().find(|c| c.ratio != 1.0) {
        return Err(format!("ratio {} at {}", c.ratio, c.key));
    }
    Ok("306 cells, MAPE 0, every ratio 1.0".into())
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let fixture = Fixture::new();

    let criteria: Vec<(&str, Outcome)> = vec![
        ("1 oracle equivalence", oracle_equivalence(&fixture)),
        (
            "2 Monte Carlo convergence",
            convergence_at_seed(&fixture, MC_SEED),
        ),
        ("3 horizon fixture", horizon_fixture(&fixture)),
        ("4 step-function LRC", step_function(&fixture)),
        ("5 monotonicity", monotonicity(&fixture)),
        ("6 determinism", determinism(&fixture, dir.path())),
        ("7 self-comparison", self_comparison(dir.path())),
    ];

    let mut failed = 0;
    for (name, outcome) in &criteria {
        match outcome {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name}: {why}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
