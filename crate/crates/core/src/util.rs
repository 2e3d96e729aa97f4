//! Small numeric helpers shared across modules.

/// Trapezoidal integral of `y` over the (possibly nonuniform) abscissa `x`.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = 0.0;
    for k in 1..x.len() {
        acc += 0.5 * (y[k] + y[k - 1]) * (x[k] - x[k - 1]);
    }
    acc
}

/// Trapezoidal integral on a uniform grid with spacing `dx`.
pub fn trapezoid_uniform(y: &[f64], dx: f64) -> f64 {
    if y.len() < 2 {
        return 0.0;
    }
    let interior: f64 = y[1..y.len() - 1].iter().sum();
    dx * (0.5 * y[0] + interior + 0.5 * y[y.len() - 1])
}

/// SplitMix64 step; used to derive independent sub-seeds from a master seed.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic sub-seed for the `k`-th stream of a named role.
pub fn derive_seed(master: u64, role: &str, k: u64) -> u64 {
    let mut h = master;
    for &b in role.as_bytes() {
        h = splitmix64(h ^ u64::from(b));
    }
    splitmix64(h ^ k)
}

/// Index of the last element of `xs` that is <= `x`, clamped to `xs.len() - 2`
/// so it always names a valid interval start. `xs` must be sorted ascending.
pub fn interval_index(xs: &[f64], x: f64) -> usize {
    debug_assert!(xs.len() >= 2);
    let idx = xs.partition_point(|&v| v <= x);
    idx.saturating_sub(1).min(xs.len() - 2)
}

/// True when `a` and `b` agree within `rel` relative tolerance
/// (absolute floor `abs` for values near zero).
pub fn approx_eq(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    let diff = (a - b).abs();
    diff <= abs || diff <= rel * a.abs().max(b.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_linear_is_exact() {
        let x: Vec<f64> = vec![0.0, 0.3, 1.0, 1.4, 2.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        // integral of 2x+1 over [0,2] = 6
        assert!((trapezoid(&x, &y) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn derive_seed_is_stable_and_distinct() {
        let a = derive_seed(42, "film", 0);
        let b = derive_seed(42, "film", 1);
        let c = derive_seed(42, "substrate", 0);
        assert_eq!(a, derive_seed(42, "film", 0));
        assert_ne!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn interval_index_brackets() {
        let xs = vec![0.0, 1.0, 2.5, 4.0];
        assert_eq!(interval_index(&xs, -1.0), 0);
        assert_eq!(interval_index(&xs, 0.5), 0);
        assert_eq!(interval_index(&xs, 1.0), 1);
        assert_eq!(interval_index(&xs, 3.9), 2);
        assert_eq!(interval_index(&xs, 9.0), 2);
    }
}
