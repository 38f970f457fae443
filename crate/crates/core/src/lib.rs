pub mod color;
pub mod config;
pub mod geometry;
pub mod graph;
pub mod layout;
pub mod metrics;
pub mod model;
pub mod render;
pub mod session;
pub mod style;
pub mod svg;
pub mod synth;
