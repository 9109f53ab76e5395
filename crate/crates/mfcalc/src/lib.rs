//! Exact symbolic calculus for ℤ/2-graded matrix factorizations over
//! multivariate polynomial rings: the tensor/pullback/pushforward functor
//! package, Koszul duality from DG-modules over an exterior algebra, kernel
//! convolution with certified middle-variable elimination, and a reduction
//! engine that produces explicit homotopy-equivalence certificates.

pub mod error;
pub mod ring;
pub mod matrix;
pub mod mf;
pub mod reduce;
pub mod dgmod;
pub mod koszul;
pub mod scenario;
pub mod convolution;
pub mod textio;
pub mod acceptance;

pub use error::Error;
