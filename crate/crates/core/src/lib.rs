//! Forward solvers for 2-D TM scattering from inhomogeneous dielectric cylinders.
//!
//! Two matrix-vector product backends drive the same Bi-CGSTAB iteration:
//!
//! * [`polar`]: the ring/harmonic operator. The induced source is expanded in
//!   angular harmonics per ring, the Hankel addition theorem splits the vector
//!   potential into outward and inward parts, and both parts are accumulated
//!   ring by ring from precomputed background-only radial integrals. Only 1-D
//!   FFTs over each ring are needed and no zero padding.
//! * [`cartesian`]: the conventional zero-padded 2-D FFT convolution with
//!   equivalent-circular-cell Green integrals.
//!
//! [`oracle`] holds independent references (layered-cylinder series, direct
//! quadrature of the volume integral, error metrics) and [`experiment`] wires
//! scenarios, solvers and references into comparison and benchmark runs.

pub mod cartesian;
pub mod error;
pub mod experiment;
pub mod model;
pub mod oracle;
pub mod polar;
pub mod quad;
pub mod solver;
pub mod specfun;
pub mod validation;

pub use error::{Error, Result};
pub use num_complex::Complex64;
