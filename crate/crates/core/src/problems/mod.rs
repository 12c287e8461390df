//! Problem front-ends: multiple-object tracking, cutting stock, and the
//! benchmark matrices.

mod cutstock;
mod fixtures;
mod mot;

pub use cutstock::{build_cutting_stock, slack_bits, CutStockQubo, CutStockSpec, CutVariable, DemandEncoding};
pub use fixtures::{
    build_preset, cut5_spec, cut6_spec, fixture_info, gauge_deviation, mot5_spec, mot9_spec,
    printed_fixture, FixtureInfo, FIXTURE_NAMES,
};
pub use mot::{build_mot, mot_constraints, DetectionLink, MotSpec};
