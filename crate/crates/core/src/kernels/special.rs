//! Error-function family.
//!
//! Rational approximations from FreeBSD `s_erf.c` (Sun Microsystems, 1993,
//! freely redistributable with this notice), via the Go port. All arithmetic
//! is plain IEEE `f64`, so results do not depend on the platform libm.
#![allow(clippy::excessive_precision)]

use crate::scalar::Scalar;

const ERX: f64 = 8.45062911510467529297e-01;

const EFX: f64 = 1.28379167095512586316e-01;
const EFX8: f64 = 1.02703333676410069053e+00;
const PP0: f64 = 1.28379167095512558561e-01;
const PP1: f64 = -3.25042107247001499370e-01;
const PP2: f64 = -2.84817495755985104766e-02;
const PP3: f64 = -5.77027029648944159157e-03;
const PP4: f64 = -2.37630166566501626084e-05;
const QQ1: f64 = 3.97917223959155352819e-01;
const QQ2: f64 = 6.50222499887672944485e-02;
const QQ3: f64 = 5.08130628187576562776e-03;
const QQ4: f64 = 1.32494738004321644526e-04;
const QQ5: f64 = -3.96022827877536812320e-06;

const PA0: f64 = -2.36211856075265944077e-03;
const PA1: f64 = 4.14856118683748331666e-01;
const PA2: f64 = -3.72207876035701323847e-01;
const PA3: f64 = 3.18346619901161753674e-01;
const PA4: f64 = -1.10894694282396677476e-01;
const PA5: f64 = 3.54783043256182359371e-02;
const PA6: f64 = -2.16637559486879084300e-03;
const QA1: f64 = 1.06420880400844228286e-01;
const QA2: f64 = 5.40397917702171048937e-01;
const QA3: f64 = 7.18286544141962662868e-02;
const QA4: f64 = 1.26171219808761642112e-01;
const QA5: f64 = 1.36370839120290507362e-02;
const QA6: f64 = 1.19844998467991074170e-02;

const RA0: f64 = -9.86494403484714822705e-03;
const RA1: f64 = -6.93858572707181764372e-01;
const RA2: f64 = -1.05586262253232909814e+01;
const RA3: f64 = -6.23753324503260060396e+01;
const RA4: f64 = -1.62396669462573470355e+02;
const RA5: f64 = -1.84605092906711035994e+02;
const RA6: f64 = -8.12874355063065934246e+01;
const RA7: f64 = -9.81432934416914548592e+00;
const SA1: f64 = 1.96512716674392571292e+01;
const SA2: f64 = 1.37657754143519042600e+02;
const SA3: f64 = 4.34565877475229228821e+02;
const SA4: f64 = 6.45387271733267880336e+02;
const SA5: f64 = 4.29008140027567833386e+02;
const SA6: f64 = 1.08635005541779435134e+02;
const SA7: f64 = 6.57024977031928170135e+00;
const SA8: f64 = -6.04244152148580987438e-02;

const RB0: f64 = -9.86494292470009928597e-03;
const RB1: f64 = -7.99283237680523006574e-01;
const RB2: f64 = -1.77579549177547519889e+01;
const RB3: f64 = -1.60636384855821916062e+02;
const RB4: f64 = -6.37566443368389627722e+02;
const RB5: f64 = -1.02509513161107724954e+03;
const RB6: f64 = -4.83519191608651397019e+02;
const SB1: f64 = 3.03380607434824582924e+01;
const SB2: f64 = 3.25792512996573918826e+02;
const SB3: f64 = 1.53672958608443695994e+03;
const SB4: f64 = 3.19985821950859553908e+03;
const SB5: f64 = 2.55305040643316442583e+03;
const SB6: f64 = 4.74528541206955367215e+02;
const SB7: f64 = -2.24409524465858183362e+01;

const VERY_TINY: f64 = 2.848094538889218e-306;
const TINY: f64 = 1.387_778_780_781_445_7e-17;
const SMALL: f64 = 3.725_290_298_461_914e-9;

/// Tail rational `R/S` for `x >= 1.25`: `erfc(x) = exp(-x² - 0.5625 + R/S) / x`.
fn tail_ratio(x: f64) -> f64 {
    let s = 1.0 / (x * x);
    if x < 1.0 / 0.35 {
        let r = RA0 + s * (RA1 + s * (RA2 + s * (RA3 + s * (RA4 + s * (RA5 + s * (RA6 + s * RA7))))));
        let q = 1.0 + s * (SA1 + s * (SA2 + s * (SA3 + s * (SA4 + s * (SA5 + s * (SA6 + s * (SA7 + s * SA8)))))));
        r / q
    } else {
        let r = RB0 + s * (RB1 + s * (RB2 + s * (RB3 + s * (RB4 + s * (RB5 + s * RB6)))));
        let q = 1.0 + s * (SB1 + s * (SB2 + s * (SB3 + s * (SB4 + s * (SB5 + s * (SB6 + s * SB7))))));
        r / q
    }
}

/// `exp(-x² - 0.5625 + R/S) / x` with the split-`x²` trick for accuracy.
fn tail(x: f64) -> f64 {
    let z = f64::from_bits(x.to_bits() & 0xffff_ffff_0000_0000);
    (-z * z - 0.5625).exp() * ((z - x) * (z + x) + tail_ratio(x)).exp() / x
}

/// Error function.
pub fn erf_f64(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_infinite() {
        return x.signum();
    }
    let neg = x < 0.0;
    let x = x.abs();
    let v = if x < 0.84375 {
        if x < SMALL {
            if x < VERY_TINY {
                0.125 * (8.0 * x + EFX8 * x)
            } else {
                x + EFX * x
            }
        } else {
            let z = x * x;
            let r = PP0 + z * (PP1 + z * (PP2 + z * (PP3 + z * PP4)));
            let s = 1.0 + z * (QQ1 + z * (QQ2 + z * (QQ3 + z * (QQ4 + z * QQ5))));
            x + x * (r / s)
        }
    } else if x < 1.25 {
        let s = x - 1.0;
        let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
        let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
        ERX + p / q
    } else if x >= 6.0 {
        1.0
    } else {
        1.0 - tail(x)
    };
    if neg {
        -v
    } else {
        v
    }
}

/// Complementary error function `1 - erf(x)`, accurate in the right tail.
pub fn erfc_f64(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    if x == f64::NEG_INFINITY {
        return 2.0;
    }
    let neg = x < 0.0;
    let a = x.abs();
    if a < 0.84375 {
        let t = if a < TINY {
            a
        } else {
            let z = a * a;
            let r = PP0 + z * (PP1 + z * (PP2 + z * (PP3 + z * PP4)));
            let s = 1.0 + z * (QQ1 + z * (QQ2 + z * (QQ3 + z * (QQ4 + z * QQ5))));
            let y = r / s;
            if a < 0.25 {
                a + a * y
            } else {
                0.5 + (a * y + (a - 0.5))
            }
        };
        return if neg { 1.0 + t } else { 1.0 - t };
    }
    if a < 1.25 {
        let s = a - 1.0;
        let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
        let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
        return if neg { 1.0 + ERX + p / q } else { 1.0 - ERX - p / q };
    }
    if a < 28.0 {
        if neg && a > 6.0 {
            return 2.0;
        }
        let r = tail(a);
        return if neg { 2.0 - r } else { r };
    }
    if neg {
        2.0
    } else {
        0.0
    }
}

/// Scaled complementary error function `exp(x²)·erfc(x)`.
///
/// Finite for every finite `x` where the result is representable; decays like
/// `1/(x√π)` as `x → ∞`.
pub fn erfcx_f64(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        // erfc(-x) = 2 - erfc(x)
        return 2.0 * (x * x).exp() - erfcx_f64(-x);
    }
    if x < 1.25 {
        return (x * x).exp() * erfc_f64(x);
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    (tail_ratio(x) - 0.5625).exp() / x
}

/// Standard normal CDF `Φ(x)`.
pub fn norm_cdf_f64(x: f64) -> f64 {
    0.5 * erfc_f64(-x / std::f64::consts::SQRT_2)
}

/// Generic [`erfc_f64`].
pub fn erfc<T: Scalar>(x: T) -> T {
    T::lit(erfc_f64(x.f64()))
}

/// Generic [`erfcx_f64`].
pub fn erfcx<T: Scalar>(x: T) -> T {
    T::lit(erfcx_f64(x.f64()))
}

/// Generic [`erf_f64`].
pub fn erf<T: Scalar>(x: T) -> T {
    T::lit(erf_f64(x.f64()))
}

/// Generic [`norm_cdf_f64`].
pub fn norm_cdf<T: Scalar>(x: T) -> T {
    T::lit(norm_cdf_f64(x.f64()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn erfc_matches_reference_values() {
        // 40-digit references
        let cases = [
            (-3.0, 1.999_977_909_503_001_4),
            (-0.5, 1.520_499_877_813_046_5),
            (0.0, 1.0),
            (0.3, 0.671_373_240_540_872_58),
            (1.0, 0.157_299_207_050_285_13),
            (2.0, 4.677_734_981_047_265_8e-3),
            (5.0, 1.537_459_794_428_034_9e-12),
            (10.0, 2.088_487_583_762_544_8e-45),
        ];
        for (x, want) in cases {
            assert!(rel(erfc_f64(x), want) < 1e-14, "erfc({x})");
        }
        assert_eq!(erfc_f64(30.0), 0.0);
        assert_eq!(erfc_f64(f64::NEG_INFINITY), 2.0);
    }

    #[test]
    fn erfcx_matches_reference_values() {
        let cases = [
            (-2.0, 108.940_904_389_977_97),
            (0.0, 1.0),
            (0.5, 0.615_690_344_192_925_87),
            (1.3, 0.357_642_669_086_090_33),
            (2.0, 0.255_395_676_310_505_74),
            (3.0, 0.179_001_151_181_389_95),
            (10.0, 0.056_140_992_743_822_586),
            (100.0, 5.641_613_782_989_433e-3),
            (1e4, 5.641_895_807_268_084e-5),
        ];
        for (x, want) in cases {
            assert!(rel(erfcx_f64(x), want) < 1e-14, "erfcx({x}) = {}", erfcx_f64(x));
        }
    }

    #[test]
    fn erfcx_is_continuous_at_branch_points() {
        for b in [1.25, 1.0 / 0.35] {
            let lo = erfcx_f64(b - 1e-12);
            let hi = erfcx_f64(b + 1e-12);
            assert!(rel(lo, hi) < 1e-11, "b={b} lo={lo} hi={hi}");
        }
    }

    #[test]
    fn erf_and_erfc_sum_to_one() {
        for i in -60..=60 {
            let x = i as f64 * 0.1;
            assert!((erf_f64(x) + erfc_f64(x) - 1.0).abs() < 2e-16 * 4.0);
        }
    }

    #[test]
    fn norm_cdf_values() {
        assert_eq!(norm_cdf_f64(0.0), 0.5);
        assert!((norm_cdf_f64(2.0) - 0.977_249_868_051_820_8).abs() < 1e-15);
        assert!((norm_cdf::<f32>(1.0) - 0.841_344_7).abs() < 1e-6);
    }
}
