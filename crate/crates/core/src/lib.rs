//! Exact character values of Weil representations of finite symplectic
//! modules over `Z/m`, `m` odd, with a numeric matrix oracle to check them.

pub mod bforms;
pub mod error;
pub mod finmod;
pub mod gauss;
pub mod intmat;
pub mod modsign;
pub mod weil;
pub mod spgroup;
pub mod zmod;

pub use error::{Error, Result};
