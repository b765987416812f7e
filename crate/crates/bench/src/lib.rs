//! Shared fixtures for the dalat benchmarks.

use std::sync::Arc;

use dalat_core::lattice::{Lattice, LatticeKind};

/// Standard square patch used by all benchmarks.
pub fn square(radius: u32) -> Arc<Lattice> {
    Arc::new(Lattice::generate(LatticeKind::Square, radius).expect("valid patch"))
}

/// Standard rhombic patch (alpha = pi/3).
pub fn rhombic(radius: u32) -> Arc<Lattice> {
    Arc::new(
        Lattice::generate(
            LatticeKind::Rhombic {
                alpha: std::f64::consts::PI / 3.0,
            },
            radius,
        )
        .expect("valid patch"),
    )
}
