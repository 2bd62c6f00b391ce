//! Shared fixtures for the criterion benchmarks.

use unso_core::bench::{gaussian_matrix, TABLE_SHAPES};
use unso_core::densemat::FlopsCounter;
use unso_core::ortho::preprocess;
use unso_core::{Matrix, Scaling};

/// Scaled wide inputs for each reference shape, seed 0.
pub fn scaled_inputs(scaling: Scaling) -> Vec<((usize, usize), Matrix)> {
    TABLE_SHAPES
        .iter()
        .map(|&(h, w)| {
            let m = gaussian_matrix(h, w, 0);
            let mut c = FlopsCounter::new();
            let p = preprocess(&m, scaling, &mut c).expect("gaussian input is not degenerate");
            ((h, w), p.x)
        })
        .collect()
}

pub fn label((h, w): (usize, usize)) -> String {
    format!("{h}x{w}")
}
