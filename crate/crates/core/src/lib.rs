//! Linearization of quadratic and order-d shortest path instances on acyclic
//! digraphs.
//!
//! An order-d instance assigns a rational cost to every arc subset of size at
//! most d; the cost of an s-t path is the sum over all its subsets of size at
//! most d. The instance is *linearizable* when a plain arc-cost function
//! reproduces every path cost. This crate decides linearizability, returns the
//! unique reduced-form linearizing function when it exists, solves the
//! all-paths-equal-cost problem, and computes a basis of the linear subspace
//! of all linearizable instances on a fixed digraph. Brute-force deciders are
//! included as independent ground truth for desk-scale verification.
//!
//! All arithmetic is exact: the decision compares sums for equality, so there
//! is no floating-point mode.

pub mod apec;
pub mod costs;
pub mod generate;
pub mod graph;
pub mod instance;
mod linalg;
pub mod linearizer;
pub mod oracle;
pub mod subspace;

pub use apec::{
    compute_gamma, corresponding_apec_instance, solve_apec, solve_apec1, source_beta,
    ApecInstance, ApecVerdict, GammaTable,
};
pub use costs::{
    eval_linear, eval_order_d, linear_as_order_d, parse_rational, rat, reduce_form, LinearCost,
    OrderDCost, Rational,
};
pub use generate::{generate, Family, Generated, GeneratorSpec, Mode};
pub use graph::{
    build_dag, choose_nonbasic_system, count_paths, enumerate_paths, nonbasic_path,
    prune_to_covered, restrict_to_prefix_subgraph, topological_arc_order, ArcId, ArcOrder, Dag,
    NonbasicSystem, Path, VertexId,
};
pub use instance::{
    read_cost_file, read_instance, read_instance_str, write_cost_file, write_instance,
};
pub use linearizer::{
    linearize, linearize_with, val_of_arc, verify_linearization, FailureWitness, LinVerdict,
    LinearizeOptions,
};
pub use oracle::{
    enumerate_two_path_systems, oracle_linearize_lp, oracle_linearize_tps, two_path_linearizable,
    two_path_linearizing_cost, TwoPathSystem,
};
pub use subspace::{
    assemble_matrix, kernel_basis, project_onto_subspace, Basis, CostVector, LinearMapMatrix,
    SubsetIndex,
};

/// Errors shared by the whole crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("input digraph contains a directed cycle")]
    CycleDetected,
    #[error("source and sink coincide")]
    SourceEqualsSink,
    #[error("arc endpoint {vertex} outside vertex range 0..{count}")]
    DanglingVertexReference { vertex: u32, count: u32 },
    #[error("arc list is empty")]
    EmptyArcList,
    #[error("no source-to-sink path exists")]
    NoStPath,
    #[error("path enumeration exceeded limit {0}")]
    TooManyPaths(usize),
    #[error("two-path system enumeration exceeded limit {0}")]
    TooManySystems(usize),
    #[error("the source vertex has no nonbasic path")]
    SourceHasNoNonbasicPath,
    #[error("vertex {0} is not reachable from the source")]
    VertexUnreachable(u32),
    #[error("arc sequence does not form a path")]
    MalformedPath,
    #[error("arc id {0} does not exist in the ambient graph")]
    UnknownArc(u32),
    #[error("arc id {0} outside range 1..={1}")]
    ArcIdOutOfRange(u32, u32),
    #[error("order mismatch: got {0}, expected at most {1}")]
    OrderMismatch(usize, u32),
    #[error("arc {0} is repeated inside a subset key")]
    RepeatedArcInKey(u32),
    #[error("arc {0} is not strongly basic")]
    NotStronglyBasic(u32),
    #[error("property (pi) does not hold for arc {0}")]
    PropertyPiViolated(u32),
    #[error("two-path system is not linearizable")]
    NotLinearizable,
    #[error("vector length {got} does not match basis dimension {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("line {line}: duplicate cost key")]
    DuplicateCostKey { line: usize },
    #[error("unsupported generator parameters: {0}")]
    UnsupportedParams(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
