//! Exact truncated power series over ℚ(i) and a finite-order test for
//! pseudosphericality of Levi-nondegenerate real hypersurfaces in ℂⁿ⁺¹.
//!
//! The algebra is generic over [`scalar::Coefficient`]; the aliases below fix
//! the Gaussian rationals used by the pipeline in [`job`].

#![allow(clippy::needless_range_loop)]

pub mod flatness;
pub mod hypersurface;
pub mod job;
pub mod parser;
pub mod pde;
pub mod scalar;
pub mod series;

pub use flatness::{
    cross_check, hachtroudi_tensor, is_pseudospherical, main_theorem_tensor, Verdict,
};
pub use hypersurface::{apply_biholomorphism, check_reality, from_graph, make_model};
pub use parser::parse_series;
pub use pde::{derive_associated_system, jet_transfer_second};
pub use scalar::GaussianRational;
pub use series::{Monomial, VariableContext};

/// Truncated series with Gaussian-rational coefficients.
pub type Series = series::TruncatedSeries<GaussianRational>;
/// Square matrix of [`Series`].
pub type Matrix = series::SeriesMatrix<GaussianRational>;
/// Hypersurface `w̄ = Θ(z, z̄, w̄)` in complex defining form.
pub type Model = hypersurface::HypersurfaceModel<GaussianRational>;
/// Second-order system `y_{x_k1 x_k2} = F_{k1,k2}(x, y, y_x)`.
pub type System = pde::PdeSystem<GaussianRational>;
/// Fourth-order tensor attached to a model or a system.
pub type Tensor = flatness::FlatnessTensor<GaussianRational>;
