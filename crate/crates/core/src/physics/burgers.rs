use crate::Scalar;

/// Lax-Friedrichs-type splitting `f± = (u^2/2 ± |u| u) / 2`.
pub fn burgers_flux_split<S: Scalar>(u: S) -> (S, S) {
    let f = u * u * 0.5;
    let fd = u.abs_a() * u;
    ((f + fd) * 0.5, (f - fd) * 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_values() {
        assert_eq!(burgers_flux_split(2.0), (3.0, -1.0));
        assert_eq!(burgers_flux_split(0.0), (0.0, 0.0));
        assert_eq!(burgers_flux_split(-1.0), (-0.25, 0.75));
    }

    #[test]
    fn parts_sum_to_flux() {
        for &u in &[-3.7, -0.2, 0.0, 0.9, 5.5] {
            let (p, m) = burgers_flux_split(u);
            assert!((p + m - u * u / 2.0).abs() <= 1e-15 * u * u);
            assert!((p - m - u.abs() * u).abs() <= 1e-15 * u * u);
        }
    }
}
