//! Tensor Kronecker products: dense tensors, the Kronecker product and its
//! mixed-product identities, tensor eigenpairs, decompositions, Kronecker
//! hypergraphs and polynomial dynamics.

pub mod bench;
pub mod decomp;
pub mod dynamics;
pub mod error;
pub mod hypergraph;
pub mod io;
pub mod kron;
pub mod linalg;
pub mod samples;
pub mod spectral;
pub mod tensor;

pub use error::{KronError, Result};
pub use hypergraph::Hypergraph;
pub use kron::{kron, KronFactored};
pub use tensor::{DenseTensor, StructureKind};
