//! Spectral checks for the second-smallest eigenvalue of
//! `L(G) + (1/n) L(complement of G²)` and the bounds that follow from it:
//!
//! * `λ′₂(G) ≥ 1`,
//! * `n λ₂(G) ≥ λ₂(G²)`,
//! * `λ₂(G) ≥ 1 − |D_G|/n`, with `D_G` the vertices of eccentricity at least 3,
//! * `λ₂(G) + λ₂(Ḡ) ≥ 1`.
//!
//! [`theorem`] turns each into a signed margin, [`search`] scans graph
//! families and hill-climbs for small margins, and [`io`] reads and writes
//! graph6.

pub mod format;
pub mod graph;
pub mod io;
pub mod search;
pub mod spectral;
pub mod theorem;

pub use graph::{Distance, DistanceMatrix, Graph, GraphError, MAX_ORDER};
pub use io::{
    parse_edge_list, parse_graph6, parse_graph6_lines, write_graph6, Graph6Error, InputError, Strictness,
};
pub use search::{
    all_graphs, extremal_search, gnp, scan, RandomFamily, ScanOptions, ScanSummary, SearchConfig,
    SearchError, SearchOutcome,
};
pub use spectral::{
    combined_matrix, lambda2, lambda2_prime, laplacian, SpectralError, Spectrum, SymmetricMatrix,
};
pub use theorem::{Check, CheckReport, TheoremError, EPSILON};
