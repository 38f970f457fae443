//! Command line renderer and HTTP authoring service for organic narrative charts.

pub mod cli;
pub mod server;
