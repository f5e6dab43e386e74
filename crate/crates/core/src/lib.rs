//! Simulation and classification of two-qubit quantum correlations.
//!
//! The crate covers the full pipeline for the family
//! `rho(p, theta) = p |psi><psi| + (1 - p) I_A/2 (x) rho_B`:
//! exact correlation criteria (PPT, Horodecki CHSH bound, two-setting
//! steering radius), a photon-counting measurement simulator with
//! tomographic reconstruction, three small classifiers trained on the
//! simulated data, and a symmetric-extension feasibility check for
//! separability beyond PPT.

pub mod criteria;
pub mod error;
pub mod linalg;
pub mod measurement;
pub mod ml;
pub mod optimize;
pub mod sdp;
pub mod states;

pub use error::{Error, Result};
