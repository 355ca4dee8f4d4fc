//! Numerical engine for the r-th mean curvatures `S_r` of translation
//! hypersurfaces, i.e. graphs of `F(x) = f_1(x_1) + ... + f_n(x_n)` in
//! Euclidean `(n+1)`-space.
//!
//! The crate is organised bottom-up:
//!
//! - [`sympoly`]: elementary symmetric polynomials and the Newton,
//!   Maclaurin and zero-propagation inequalities between their means.
//! - [`profile`]: single-variable profile curves with analytic derivatives
//!   up to third order.
//! - [`hypersurface`]: metric, second fundamental form, shape operator and
//!   `S_r` at a point, computed by a closed form and by two oracles.
//! - [`families`]: the vertical-cylinder and generalized periodic Enneper
//!   families with vanishing `S_r`.
//! - [`odesolve`]: fixed-step RK4 confirmation of the log-cos profiles.
//! - [`verify`]: grid scans, constancy detection and finite-difference
//!   checks of the derivative identities behind the classification.

pub mod error;
pub mod families;
pub mod hypersurface;
pub mod odesolve;
pub mod profile;
pub mod stencil;
pub mod sympoly;
pub mod verify;

pub use error::{Error, Result};
pub use families::{CylinderParams, EnneperParams, LemmaFamily};
pub use hypersurface::{Orientation, PointFrame, TranslationGraph};
pub use profile::{Interval, Profile, ProfileKind};
pub use sympoly::SymInput;
