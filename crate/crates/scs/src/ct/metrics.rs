//! Image quality metrics against a known ground truth.

use super::Image;

fn check_pair(x: &Image, reference: &Image) -> f64 {
    assert_eq!(x.n(), reference.n(), "metrics: image size mismatch");
    let peak = reference.as_slice().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!(peak > 0.0, "metrics: reference peak must be positive");
    peak
}

/// Peak signal-to-noise ratio in decibels: `10 log10(peak / mse)` with the
/// peak of the reference image. The peak enters linearly here, not squared;
/// for unit-range references the two conventions coincide. A perfect match
/// returns `+inf`.
pub fn psnr(x: &Image, reference: &Image) -> f64 {
    let peak = check_pair(x, reference);
    let count = x.as_slice().len() as f64;
    let mse = x
        .as_slice()
        .iter()
        .zip(reference.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / count;
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (peak / mse).log10()
    }
}

/// Global structural similarity with explicit stabilizers.
pub fn ssim_with(x: &Image, reference: &Image, c1: f64, c2: f64) -> f64 {
    assert_eq!(x.n(), reference.n(), "metrics: image size mismatch");
    let a = x.as_slice();
    let b = reference.as_slice();
    let count = a.len() as f64;
    let mu_x = a.iter().sum::<f64>() / count;
    let mu_y = b.iter().sum::<f64>() / count;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    let mut cov = 0.0;
    for (&ai, &bi) in a.iter().zip(b) {
        var_x += (ai - mu_x) * (ai - mu_x);
        var_y += (bi - mu_y) * (bi - mu_y);
        cov += (ai - mu_x) * (bi - mu_y);
    }
    var_x /= count;
    var_y /= count;
    cov /= count;
    ((2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2))
        / ((mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2))
}

/// Global structural similarity with the usual stabilizers
/// `C1 = (0.01 peak)^2`, `C2 = (0.03 peak)^2` from the reference peak.
pub fn ssim(x: &Image, reference: &Image) -> f64 {
    let peak = check_pair(x, reference);
    ssim_with(x, reference, (0.01 * peak).powi(2), (0.03 * peak).powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn uniform(n: usize, v: f64) -> Image {
        Image::from_vec(n, vec![v; n * n])
    }

    #[test]
    fn psnr_of_a_uniform_offset_is_twenty_db() {
        // Reference peak 1, error 0.1 everywhere: mse = 0.01, psnr = 20.
        let reference = uniform(8, 1.0);
        let shifted = uniform(8, 0.9);
        assert!((psnr(&shifted, &reference) - 20.0).abs() < 1e-12);
    }

    #[test]
    fn doubling_the_error_costs_six_db() {
        let reference = uniform(8, 1.0);
        let a = psnr(&uniform(8, 0.9), &reference);
        let b = psnr(&uniform(8, 0.8), &reference);
        assert!((a - b - 6.020599913279623).abs() < 1e-12);
    }

    #[test]
    fn perfect_match_is_infinite() {
        let reference = uniform(4, 0.5);
        assert_eq!(psnr(&reference.clone(), &reference), f64::INFINITY);
    }

    #[test]
    #[should_panic(expected = "peak must be positive")]
    fn zero_reference_is_rejected() {
        let z = uniform(4, 0.0);
        psnr(&z.clone(), &z);
    }

    #[test]
    fn ssim_of_identical_images_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let img = Image::from_vec(8, (0..64).map(|_| rng.random_range(0.1..1.0)).collect());
        assert!((ssim(&img.clone(), &img) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_images_far_apart_score_near_zero() {
        // x = 0, y = 1 with default stabilizers: the closed form gives
        // 1e-4 / 1.0001.
        let x = uniform(6, 0.0);
        let y = uniform(6, 1.0);
        let got = ssim(&x, &y);
        assert!((got - 9.999000099990002e-5).abs() < 1e-15);
    }

    #[test]
    fn ssim_is_symmetric_and_penalizes_shifts() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let a = Image::from_vec(8, (0..64).map(|_| rng.random_range(0.1..1.0)).collect());
        let b = Image::from_vec(8, (0..64).map(|_| rng.random_range(0.1..1.0)).collect());
        let c1 = 1e-4;
        let c2 = 9e-4;
        assert_eq!(ssim_with(&a, &b, c1, c2), ssim_with(&b, &a, c1, c2));
        let shifted = Image::from_vec(8, a.as_slice().iter().map(|v| v * 0.5).collect());
        assert!(ssim_with(&shifted, &a, c1, c2) < 1.0);
    }
}
