//! Convex hypersurfaces, the Hamiltonians built on their gauge, and duals.

pub mod body;
pub mod fenchel;
pub mod hamiltonian;
pub mod phi;
pub mod sampling;
pub mod spec;

pub use body::{BodyKind, ConvexBody, GaugeJet, Monomial, Polynomial};
pub use fenchel::{fenchel, DualJet, FenchelDual};
pub use hamiltonian::{HamiltonianForm, HamiltonianJet, HamiltonianModel, ModelBounds};
pub use phi::{build_phi, PhiFunction};
pub use sampling::{validate_body, BodyReport};
pub use spec::BodySpec;
