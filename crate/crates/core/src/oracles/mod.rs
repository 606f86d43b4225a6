//! Independent reference methods used to cross-check the scans.

pub mod charpoly;
pub mod fd;
pub mod hill;
pub mod theta_scan;

pub use charpoly::char_poly_roots;
pub use fd::truncated_fd_spectrum;
pub use hill::{discriminant_spectrum, hill_discriminant, Discriminant};
pub use theta_scan::theta_scan_spectrum;
