//! Spectra of `-d^2/dx^2 + V` with one-periodic `V`.

pub mod bounds;
pub mod fourier;
pub mod gamma;
pub mod modes;
pub mod section;

pub use bounds::{
    c_lambda, coupling_exponent, error_constants, lipschitz_bound_k, main_error_bound, pi1_threshold,
    quadrature_error_bound, schatten_bound, ErrorBoundInput, Pi1Certificate,
};
pub use fourier::{approx_fourier, FourierTruncation};
pub use gamma::{
    exterior_shift, main_gamma, parameterless_gamma, provisional_gamma, Evaluation, SchrodingerAlgoParams,
    SearchSquares, ThetaGrid, Threshold,
};
pub use modes::ModeIndexing;
pub use section::{build_bs_section, galerkin_matrix, reg_det, BirmanSchwingerSection};
