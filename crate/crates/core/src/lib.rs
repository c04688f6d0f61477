//! Planted k-coloring on expander hosts.
//!
//! An instance is the edge-intersection of a host graph with the complete
//! k-partite graph of a planted partition. This crate provides
//!
//! - [`graph`]: graph and coloring types with exact oracles,
//! - [`generators`]: random hosts, planted partitions and instances,
//! - [`spectral`]: dense and iterative adjacency eigensolvers and spectrum checks,
//! - [`pipeline`]: the spectral 3-coloring pipeline and its variants,
//! - [`twosat`]: 2SAT and the two-color list-coloring reduction,
//! - [`forge`]: hardness constructions with computed certificates.

pub mod forge;
pub mod generators;
pub mod graph;
pub mod io;
pub mod pipeline;
pub mod seed;
pub mod spectral;
pub mod twosat;


mod flow;

pub use generators::{Model, PlantedInstance};
pub use graph::{Color, Coloring, Graph, GraphError, VertexSet};
pub use seed::Seed;
