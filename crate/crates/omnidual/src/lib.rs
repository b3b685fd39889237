//! Exact verification of Dirac-Jacobi structures and weak dual pairs on
//! trivialized line bundles over polynomial charts.

pub mod cli_io;
pub mod der_calculus;
pub mod dual_pairs;
pub mod exact_scalars;
pub mod linalg;
pub mod omni_fiber;
pub mod structures;
