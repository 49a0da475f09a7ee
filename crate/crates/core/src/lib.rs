//! Correlation- and entanglement-induced geometric phases of two-qubit mixed
//! states via relative-state decompositions.
//!
//! A loop in the A-subsystem state space induces, for every pure member of a
//! decomposition of ϱ, a relative-state geometric phase. The first moment of
//! the resulting phase distribution defines the correlation-induced phase Γ
//! (spectral decomposition) and the entanglement-induced phase Γ^E
//! (entanglement-minimizing decomposition, constructed with the two-qubit
//! optimal-decomposition procedure). The `interferometry` module simulates
//! the Mach–Zehnder scheme in which both phases appear as fringe shifts.
//!
//! ```
//! use entphase::geophase::{self, BlochLoop};
//! use entphase::states;
//!
//! let loop_ = BlochLoop::constant_latitude(0.45 * std::f64::consts::PI, 4096).unwrap();
//! let rho = states::mems_state(0.5).unwrap();
//! let gamma = geophase::correlation_induced_phase(&rho, &loop_).unwrap();
//! let gamma_e = geophase::entanglement_induced_phase(&rho, &loop_).unwrap();
//! assert!(gamma.phase > gamma_e.phase);
//! ```

pub mod error;
pub mod geophase;
pub mod interferometry;
pub mod linalg;
pub mod states;
pub mod wootters;

pub use error::{Error, Result};
pub use num_complex::Complex64;
