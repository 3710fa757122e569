use core::f64::consts::{FRAC_1_SQRT_2, PI};

/// `1 / sqrt(2π)`
pub(crate) const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density.
#[inline]
pub fn std_normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * libm::exp(-0.5 * x * x)
}

/// Standard normal CDF `Φ(x)`, accurate to a few ulps through `erfc`.
#[inline]
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail `1 − Φ(x)` without cancellation.
#[inline]
pub fn std_normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

pub(crate) const TWO_PI: f64 = 2.0 * PI;

#[cfg(test)]
mod tests {
    use super::*;

    // 30-digit reference values
    const REFERENCE: [(f64, f64); 6] = [
        (1.959964, 0.975_000_000_903_557_6),
        (-1.0, 0.158_655_253_931_457_05),
        (3.5, 0.999_767_370_920_964_5),
        (-6.0, 9.865_876_450_376_98e-10),
        (-8.0, 6.220_960_574_271_784e-16),
        (0.1, 0.539_827_837_277_029),
    ];

    #[test]
    fn cdf_matches_reference() {
        for (x, want) in REFERENCE {
            let got = std_normal_cdf(x);
            assert!((got - want).abs() <= 1e-12, "Φ({x}) = {got}, want {want}");
        }
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert!((std_normal_cdf(1.959964) - 0.975).abs() < 1e-8);
        assert!(std_normal_cdf(-40.0) < 1e-300);
        assert_eq!(std_normal_cdf(f64::NEG_INFINITY), 0.0);
        assert_eq!(std_normal_cdf(f64::INFINITY), 1.0);
    }

    #[test]
    fn cdf_is_monotone_on_fine_grid() {
        let mut prev = 0.0;
        for i in -8000..=8000 {
            let v = std_normal_cdf(i as f64 / 1000.0);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn sf_complements_cdf() {
        for i in -50..=50 {
            let x = i as f64 / 7.0;
            assert!((std_normal_sf(x) + std_normal_cdf(x) - 1.0).abs() < 1e-15);
        }
        assert!((std_normal_pdf(0.0) - FRAC_1_SQRT_2PI).abs() < 1e-17);
    }
}
