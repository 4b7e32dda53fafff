//! Benchmark fixtures for the solver pipeline.

use signguard_core::channel::ChannelModel;
use signguard_core::galois_rs::CodeParams;
use signguard_core::{solve_instance, Instance, SolvedInstance};

/// The largest and smallest reference codes.
pub fn codes() -> [(&'static str, CodeParams); 2] {
    [("7_3_5_8", CodeParams::new(7, 3, 5, 8).unwrap()), ("15_3_13_16", CodeParams::new(15, 3, 13, 16).unwrap())]
}

pub fn channel(code: &CodeParams, p_e: f64) -> ChannelModel {
    ChannelModel::for_code(code, p_e).unwrap()
}

pub fn solved(code: CodeParams, p_e: f64) -> SolvedInstance {
    solve_instance(&Instance::new(code, p_e)).unwrap()
}
