//! Dense vector primitives.
//!
//! All solver state lives in plain `Vec<f64>` / `&[f64]`. Dimension
//! mismatches are caller bugs and panic.

/// Inner product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "dot: dimension mismatch {} vs {}", a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm.
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `alpha * a + b` as a new vector.
pub fn axpy(alpha: f64, a: &[f64], b: &[f64]) -> Vec<f64> {
    assert_eq!(a.len(), b.len(), "axpy: dimension mismatch {} vs {}", a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| alpha * x + y).collect()
}

/// `alpha * a` as a new vector.
pub fn scale(alpha: f64, a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| alpha * x).collect()
}

/// `a - b` as a new vector.
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    assert_eq!(a.len(), b.len(), "sub: dimension mismatch {} vs {}", a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_norm_axpy() {
        assert_eq!(dot(&[1.0, 2.0], &[3.0, 4.0]), 11.0);
        assert_eq!(norm(&[3.0, 4.0]), 5.0);
        assert_eq!(axpy(2.0, &[1.0, 0.0], &[0.0, 1.0]), vec![2.0, 1.0]);
        assert_eq!(scale(-1.0, &[1.0, -2.0]), vec![-1.0, 2.0]);
        assert_eq!(sub(&[3.0, 1.0], &[1.0, 1.0]), vec![2.0, 0.0]);
    }

    #[test]
    fn zero_vector_has_zero_norm() {
        assert_eq!(norm(&[0.0; 7]), 0.0);
        assert_eq!(norm(&[]), 0.0);
    }

    #[test]
    #[should_panic(expected = "dimension mismatch")]
    fn dot_rejects_mismatched_lengths() {
        dot(&[1.0], &[1.0, 2.0]);
    }

    #[test]
    #[should_panic(expected = "dimension mismatch")]
    fn axpy_rejects_mismatched_lengths() {
        axpy(1.0, &[1.0], &[1.0, 2.0]);
    }
}
