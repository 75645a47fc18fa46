#![allow(dead_code)]

use std::path::PathBuf;

use circle_euler::pl::LiftPL;
use circle_euler::rational::ratio;
use circle_euler::scenario::ActionScenario;
use rand::Rng;

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

pub fn load_scenario(name: &str) -> ActionScenario {
    let text = std::fs::read_to_string(scenario_path(name)).expect("scenario file");
    ActionScenario::parse(&text).expect("valid scenario")
}

pub fn rotation<R: Rng>(rng: &mut R) -> LiftPL {
    let q = rng.gen_range(1..=12);
    LiftPL::rotation(ratio(rng.gen_range(0..q), q))
}

/// `[(0, 0), (c, d)]` with `c, d` in `(0, 1)` on a grid of eighths; fixes 0.
pub fn two_piece<R: Rng>(rng: &mut R) -> LiftPL {
    let c = rng.gen_range(1..8);
    let d = rng.gen_range(1..8);
    LiftPL::new(vec![(ratio(0, 1), ratio(0, 1)), (ratio(c, 8), ratio(d, 8))]).expect("increasing")
}

/// A product of one to three rotations and two-piece maps.
pub fn random_map<R: Rng>(rng: &mut R) -> LiftPL {
    let mut f = LiftPL::identity();
    for _ in 0..rng.gen_range(1..=3) {
        let g = if rng.gen_bool(0.5) { rotation(rng) } else { two_piece(rng) };
        f = f.compose(&g);
    }
    f
}
