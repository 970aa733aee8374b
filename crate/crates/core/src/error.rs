use crate::rational::Rational;
use thiserror::Error;

/// A pair of indistinguishable states, or a direction along which the
/// feasible set moves without touching the proposed set.
#[derive(Debug, Clone, PartialEq)]
pub enum NotIdentifyingWitness {
    /// Indices of two distinct solutions that agree on the set.
    SolutionPair(usize, usize),
    /// Nonzero direction in the affine hull that vanishes on the set.
    Direction(Vec<Rational>),
    /// Two distinct s-t paths (arc ids in order) that agree on the set.
    PathPair(Vec<usize>, Vec<usize>),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("arc {arc} is a self-loop, which this setting does not accept")]
    SelfLoop { arc: usize },
    #[error("arc id {arc} out of range (graph has {arc_count} arcs)")]
    InvalidArc { arc: usize, arc_count: usize },
    #[error("element id {element} out of range (ground set has {size} elements)")]
    InvalidElement { element: usize, size: usize },
    #[error("node id {node} out of range (graph has {node_count} nodes)")]
    InvalidNode { node: usize, node_count: usize },
    #[error("source and sink must differ")]
    SameSourceSink,
    #[error("weight of element {element} is negative")]
    NegativeWeight { element: usize },
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("sink is not reachable from source")]
    NoStPath,
    #[error("graph contains a directed cycle (arcs {cycle:?})")]
    NotAcyclic { cycle: Vec<usize> },
    #[error("more than {cap} s-t paths; instance too large for enumeration")]
    PathExplosion { cap: usize },
    #[error("search exceeded {cap} subsets")]
    SubsetExplosion { cap: u64 },
    #[error("ground set of size {size} exceeds the enumeration cap {cap}")]
    EnumerationExplosion { size: usize, cap: usize },
    #[error("elimination exceeded its cap: {0}")]
    EliminationExplosion(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("the given set is not a basis of the matroid")]
    NotABasis,
    #[error("element {element} already belongs to the basis")]
    ElementInBasis { element: usize },
    #[error("oracle is inconsistent: {0}")]
    OracleInconsistent(String),
    #[error("point is not in the base polyhedron")]
    NotABase,
    #[error("no strictly interior base could be certified for component {component:?}")]
    InteriorBaseNotFound { component: Vec<usize> },
    #[error("set is not identifying")]
    NotIdentifying(NotIdentifyingWitness),
    #[error("target is not an element of the solution list")]
    TargetNotInX,
    #[error("cost oracle has no subgradient at the target")]
    NoSubgradient,
    #[error("target lies outside the affine hull of the basis")]
    TargetOutsideAffineHull,
    #[error("invalid affine basis: {0}")]
    InvalidBasis(String),
    #[error("tolls would need negative entries (elements {elements:?}) but nonnegative tolls were required")]
    NegativeTolls { elements: Vec<usize> },
    #[error("vertex-cover rewrite failed: {0}")]
    RewriteFailed(String),
}

impl Error {
    /// True for errors signalling that an enumeration budget was exhausted.
    pub fn is_cap_exceeded(&self) -> bool {
        matches!(
            self,
            Error::PathExplosion { .. }
                | Error::SubsetExplosion { .. }
                | Error::EnumerationExplosion { .. }
                | Error::EliminationExplosion(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
