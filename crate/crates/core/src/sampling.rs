//! Deterministic quasi-uniform direction sampling.

use nalgebra::Vector3;

/// Quasi-uniform unit directions from the spherical Fibonacci lattice.
///
/// Deterministic for a given `n`; no point lands exactly on a pole or axis,
/// and cap-counting error shrinks like the lattice spacing, which makes the
/// set suitable both for feasibility scans and for solid-angle estimates.
pub fn fibonacci_sphere(n: usize) -> Vec<Vector3<f64>> {
    let golden_angle = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden_angle * i as f64;
            Vector3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

/// Fraction of the sphere (in steradians) covered by a predicate, estimated
/// on a Fibonacci lattice of `n` directions.
pub fn solid_angle_of(n: usize, mut feasible: impl FnMut(&Vector3<f64>) -> bool) -> f64 {
    let dirs = fibonacci_sphere(n);
    let count = dirs.iter().filter(|d| feasible(d)).count();
    4.0 * std::f64::consts::PI * count as f64 / n as f64
}
