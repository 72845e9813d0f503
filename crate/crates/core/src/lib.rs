//! Closed characteristics on compact convex hypersurfaces in ℝ²ⁿ.
//!
//! The numerical core is generic over the scalar type (`f32` or `f64`);
//! the aliases below fix it to `f64`, which every tolerance default assumes.

pub mod config;
pub mod error;
pub mod floquet;
pub mod geometry;
pub mod index;
pub mod linalg;
pub mod ode;
pub mod orbit;
pub mod resonance;
pub mod scalar;
pub mod symplectic;

pub use config::Tolerances;
pub use error::{Error, Result};
pub use scalar::Float;

pub type SymplecticMatrix = symplectic::SymplecticMatrix<f64>;
pub type BasicNormalForm = symplectic::BasicNormalForm<f64>;
pub type CircleSpectrum = symplectic::CircleSpectrum<f64>;
pub type ConvexBody = geometry::ConvexBody<f64>;
pub type PhiFunction = geometry::PhiFunction<f64>;
pub type HamiltonianModel = geometry::HamiltonianModel<f64>;
pub type FenchelDual = geometry::FenchelDual<f64>;
pub type ClosedCharacteristic = orbit::ClosedCharacteristic<f64>;
pub type MonodromyData = floquet::MonodromyData<f64>;
