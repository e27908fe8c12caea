//! The shipped example specs parse cleanly and describe the presets.

use mfneuro::experiment::{parse_spec, Command};
use mfneuro::presets;

fn load(name: &str) -> mfneuro::experiment::ExperimentSpec {
    let path = format!("{}/../../configs/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_spec(&std::fs::read_to_string(&path).unwrap()).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn fhn_config_is_the_fhn_preset() {
    let spec = load("fhn_two_population.toml");
    assert_eq!(spec.command, Command::ChaosSweep);
    assert_eq!(spec.network, presets::fhn_two_population(16));
    assert_eq!(spec.network.hash(), presets::fhn_two_population(16).hash());
    assert_eq!(spec.run.sweep, vec![16, 64, 256, 1024]);
    assert!(spec.run.n_paths >= 200);
}

#[test]
fn hh_config_is_the_hh_preset() {
    let spec = load("hh_two_population.toml");
    assert_eq!(spec.command, Command::Simulate);
    assert_eq!(spec.network, presets::hh_two_population(256));
}

#[test]
fn quick_config_parses() {
    let spec = load("quick.toml");
    assert_eq!(spec.network.n_total(), 8);
    assert_eq!(spec.network.grid.n_steps, 100);
    assert_eq!(spec.run.marginal_k, 2);
}
