use std::fs;
use std::path::Path;

use homeomatch::bench::{ExperimentSpec, SweepVariable};

fn config_dir() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn every_shipped_config_parses() {
    let mut names = Vec::new();
    for entry in fs::read_dir(config_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let spec = ExperimentSpec::parse(&fs::read_to_string(&path).unwrap())
                .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert_eq!(spec.timeout_secs, 60.0, "{}", spec.name);
            names.push(spec.name);
        }
    }
    names.sort();
    assert_eq!(names, ["exp1", "exp2", "exp3", "exp4", "exp5", "strategy"]);
}

#[test]
fn desk_scale_ranges() {
    let load = |name: &str| {
        ExperimentSpec::parse(&fs::read_to_string(config_dir().join(format!("{name}.toml"))).unwrap()).unwrap()
    };
    let max = |spec: &ExperimentSpec, var: SweepVariable| {
        let sweep = spec.sweep.as_ref().unwrap();
        assert_eq!(sweep.variable, var);
        sweep.values.iter().cloned().fold(f64::MIN, f64::max)
    };
    assert_eq!(max(&load("exp1"), SweepVariable::N2), 2000.0);
    assert!(max(&load("exp2"), SweepVariable::N1) <= 40.0);
    assert!(max(&load("exp3"), SweepVariable::M2) <= 12.0);
    assert!(max(&load("exp4"), SweepVariable::H) <= 4.0);
    assert_eq!(max(&load("exp5"), SweepVariable::Labels), 200.0);
    assert!(load("strategy").repetitions >= 20);
}
