//! Closed characteristics: closed forms on ellipsoids, shooting, the dual
//! action, and deduplication into geometrically distinct orbits.

pub mod characteristic;
pub mod dedup;
pub mod dual_action;
pub mod ellipsoid;
pub mod shooting;

pub use characteristic::{characteristic_field, ClosedCharacteristic, OrbitJson, OrbitSource};
pub use dedup::{deduplicate, group_orbits, hausdorff, OrbitGroup};
pub use dual_action::{critical_value, dual_action, monotonicity_audit, DualActionOptions, DualActionResult, FourierLoop};
pub use ellipsoid::{ellipsoid_orbits, ellipsoid_period};
pub use shooting::{shoot, ShootOptions, ShootReport};
