//! Exact small-system checks of the qutrit⊗qubit stabilizer algebra.

pub mod checks;
pub mod operator;
pub mod spectrum;
pub mod stabilizers;
pub mod state;

pub use checks::{
    check_global_conjugation, check_identity, check_spectrum, check_ungauge_projection,
    derive_parafermion_convention, ground_state, identity_suite, IdentityResult, SpectrumResult,
    UngaugeReport,
};
pub use operator::{Edge, Exponent, Factor, Operator, Word};
pub use stabilizers::{build_stabilizer, LabLattice, Site, StabilizerKind};
pub use state::SmallState;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("state holds {0} edges, at most 8 are supported")]
    TooManyEdges(usize),
    #[error("operator acts on {0}, which is not part of the state")]
    SupportMismatch(Edge),
    #[error("unknown stabilizer kind {0:?}")]
    UnknownKind(String),
    #[error("site {0} lies outside the lattice")]
    SiteOutside(Site),
    #[error("{0:?} is not defined on site {1}")]
    WrongSite(StabilizerKind, Site),
    #[error("{0:?} is not Hermitian")]
    NotHermitian(StabilizerKind),
    #[error("cannot parse lattice {0:?}")]
    BadLattice(String),
    #[error("spectrum block of size {0} is too large")]
    BlockTooLarge(usize),
    #[error("outcome pattern has odd parity on plaquettes {0:?}")]
    OddBoundary(Vec<(i32, i32)>),
    #[error("outcome pattern has {got} entries, lattice has {expected} edges")]
    OutcomeLength { got: usize, expected: usize },
    #[error("ground-state projection vanished")]
    EmptyProjection,
}
