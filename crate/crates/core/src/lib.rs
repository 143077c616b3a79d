pub mod caratheodory;
pub mod combination;
pub mod error;
pub mod geometry;
pub mod greedy_hull;
pub mod shadow_cover;
pub mod eval;
pub mod io;
pub mod synth;
