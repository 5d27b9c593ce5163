//! Scale sequences, nested lattices and exact joint Gaussian sampling of
//! the renormalized averages.
//!
//! Replica `k` of a run with master seed `s` draws its normals from
//! `ChaCha20Rng::seed_from_u64(s)` with `set_stream(k)`.

mod concentric;
mod gaussian;
mod lattice;
mod layout;
mod sequence;

pub use concentric::{ln_increment_variances, sample_concentric, ConcentricPaths};
pub use gaussian::{
    fill_standard_normal, replica_rng, sample_field, CholeskyFactor, FieldSample, GaussianSampler,
    SymMatrix, JITTER_LADDER,
};
pub use lattice::{build_lattice, LatticeLevel, MultiLattice};
pub use layout::{
    assemble_covariance, covariance_entry, FieldLayout, PathSpan, SiteBlock, Variable,
    DEFAULT_MAX_POINTS,
};
pub use sequence::{
    custom_sequence, make_sequence, validate_sequence, ScaleSequence, SequenceDiagnostics,
    SequenceKind, DEFAULT_UNDERFLOW_FLOOR,
};
