#![allow(dead_code)]

pub mod supercell;

use std::path::PathBuf;

use guided_bands::graph::{
    build_cylinder, load_and_validate, CylinderModel, GuidedPotential, PeriodicGraphSpec,
};

pub const CONFIGS: [&str; 8] = [
    "square.json",
    "square_q3.json",
    "chain_no_bridge_loops.json",
    "pendant_flatband.json",
    "big_measure.json",
    "small_measure.json",
    "gapped_chain.json",
    "planar_guide.json",
];

pub fn example_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(name)
}

pub fn load(name: &str) -> (PeriodicGraphSpec, CylinderModel, GuidedPotential) {
    let text = std::fs::read_to_string(example_path(name)).unwrap();
    let spec = load_and_validate(&text).unwrap().spec;
    let cyl = build_cylinder(&spec);
    let q = GuidedPotential::from_spec(&spec);
    (spec, cyl, q)
}
