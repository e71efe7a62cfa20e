//! Exact q-series machinery for Andrews–Gordon type identities with parity
//! restrictions: truncated power series, partition counting oracles, a
//! lattice-path bijection, Bailey pairs and multisum/product verification.

pub mod qseries;
pub mod partitions;
pub mod lattice_paths;
pub mod multisum;
pub mod identities;
pub mod bailey;
