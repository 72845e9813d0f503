//! Symplectic index theory of sampled paths.

pub mod normal_form;
pub mod omega;
pub mod path;
pub mod profile;
pub mod rational;
pub mod synthetic;

pub use omega::{omega_index, PreparedPath};
pub use path::{iterate_path, SymplecticPath};
pub use normal_form::normal_form_decomposition;
pub use profile::{ekeland_index, iteration_profile, splitting_numbers, IndexFunction, IndexProfile, IterationEntry};
pub use rational::MinimalPeriod;
