//! Double-precision error function, its antiderivative, and the bell
//! density `chi(x) = (erf(x + 1) - erf(x - 1)) / 4` built from it.
//!
//! `erf`/`erfc` follow the split-domain rational scheme of FreeBSD msun
//! `s_erf.c` (coefficients reproduced below):
//!
//! ```text
//! Copyright (C) 1993 by Sun Microsystems, Inc. All rights reserved.
//! Developed at SunPro, a Sun Microsystems, Inc. business.
//! Permission to use, copy, modify, and distribute this
//! software is freely granted, provided that this notice
//! is preserved.
//! ```
//!
//! | range of `|x|`        | method                                         |
//! |-----------------------|------------------------------------------------|
//! | `[0, 0.84375)`        | `x + x * P(x^2)/Q(x^2)`                        |
//! | `[0.84375, 1.25)`     | `erx + P1(s)/Q1(s)`, `s = |x| - 1`             |
//! | `[1.25, 1/0.35)`      | `erfc = exp(-x^2 - 0.5625 + R1/S1) / x`        |
//! | `[1/0.35, 28)`        | `erfc = exp(-x^2 - 0.5625 + R2/S2) / x`        |
//!
//! The density is evaluated through `erfc` away from the origin so that
//! it keeps full *relative* accuracy deep in the tails, where the naive
//! difference of two values of `erf` close to one would cancel to zero.

use std::f64::consts::PI;

/// `1 / sqrt(pi)`
pub const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

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
const SMALL: f64 = 3.725_290_298_461_914e-9; // 2^-28
const ERFC_TINY: f64 = 1.387_778_780_781_445_7e-17; // 2^-56

#[inline]
fn small_ratio(z: f64) -> f64 {
    let r = PP0 + z * (PP1 + z * (PP2 + z * (PP3 + z * PP4)));
    let s = 1.0 + z * (QQ1 + z * (QQ2 + z * (QQ3 + z * (QQ4 + z * QQ5))));
    r / s
}

#[inline]
fn near_one_ratio(s: f64) -> f64 {
    let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
    let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
    p / q
}

/// `R/S` correction of the asymptotic form, valid for `|x| >= 1.25`.
#[inline]
fn tail_correction(ax: f64) -> f64 {
    let s = 1.0 / (ax * ax);
    let (r, q) = if ax < 1.0 / 0.35 {
        (
            RA0 + s * (RA1 + s * (RA2 + s * (RA3 + s * (RA4 + s * (RA5 + s * (RA6 + s * RA7)))))),
            1.0 + s
                * (SA1
                    + s * (SA2 + s * (SA3 + s * (SA4 + s * (SA5 + s * (SA6 + s * (SA7 + s * SA8))))))),
        )
    } else {
        (
            RB0 + s * (RB1 + s * (RB2 + s * (RB3 + s * (RB4 + s * (RB5 + s * RB6))))),
            1.0 + s * (SB1 + s * (SB2 + s * (SB3 + s * (SB4 + s * (SB5 + s * (SB6 + s * SB7)))))),
        )
    };
    r / q
}

/// `erfc(ax)` for `1.25 <= ax < 28`.
#[inline]
fn erfc_asymptotic(ax: f64) -> f64 {
    // Split x^2 so that exp(-x^2) is formed without rounding in the exponent.
    let z = f64::from_bits(ax.to_bits() & 0xffff_ffff_0000_0000);
    (-z * z - 0.5625).exp() * ((z - ax) * (z + ax) + tail_correction(ax)).exp() / ax
}

/// Gauss error function.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let value = if ax < 0.84375 {
        if ax < SMALL {
            if ax < VERY_TINY {
                0.125 * (8.0 * ax + EFX8 * ax)
            } else {
                ax + EFX * ax
            }
        } else {
            ax + ax * small_ratio(ax * ax)
        }
    } else if ax < 1.25 {
        ERX + near_one_ratio(ax - 1.0)
    } else if ax >= 6.0 {
        1.0
    } else {
        1.0 - erfc_asymptotic(ax)
    };
    value.copysign(x)
}

/// Complementary error function `1 - erf(x)`, relatively accurate for large `x`.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let negative = x < 0.0;
    if ax < 0.84375 {
        if ax < ERFC_TINY {
            return 1.0 - x;
        }
        let y = small_ratio(ax * ax);
        if negative {
            return 1.0 + (ax + ax * y);
        }
        if ax < 0.25 {
            return 1.0 - (ax + ax * y);
        }
        return 0.5 - (ax * y + (ax - 0.5));
    }
    if ax < 1.25 {
        let p = near_one_ratio(ax - 1.0);
        return if negative { 1.0 + ERX + p } else { 1.0 - ERX - p };
    }
    if negative {
        return if ax >= 6.0 { 2.0 } else { 2.0 - erfc_asymptotic(ax) };
    }
    if ax < 28.0 {
        erfc_asymptotic(ax)
    } else {
        0.0
    }
}

/// Scaled complementary error function `exp(x^2) * erfc(x)` for `x >= 0`.
///
/// Never underflows: for large `x` it behaves like `1 / (x sqrt(pi))`.
pub fn erfcx(x: f64) -> f64 {
    debug_assert!(x >= 0.0 || x.is_nan());
    if x < 1.25 {
        (x * x).exp() * erfc(x)
    } else if x < 28.0 {
        (tail_correction(x) - 0.5625).exp() / x
    } else {
        // erfcx(x) ~ 1/(x sqrt(pi)) * sum_k (-1)^k (2k-1)!! / (2x^2)^k
        let w = 1.0 / (2.0 * x * x);
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..=8 {
            term *= -((2 * k - 1) as f64) * w;
            sum += term;
        }
        FRAC_1_SQRT_PI * sum / x
    }
}

/// Antiderivative of `erf` with the integration constant fixed to zero:
/// `x erf(x) + exp(-x^2) / sqrt(pi)`.
pub fn erf_antiderivative(x: f64) -> f64 {
    x * erf(x) + (-x * x).exp() * FRAC_1_SQRT_PI
}

/// Bell density `(erf(x + 1) - erf(x - 1)) / 4`.
pub fn chi(x: f64) -> f64 {
    let u = x.abs();
    if u <= 1.0 {
        0.25 * (erf(u + 1.0) - erf(u - 1.0))
    } else {
        0.25 * (erfc(u - 1.0) - erfc(u + 1.0))
    }
}

/// Natural logarithm of [`chi`], finite far beyond the point where `chi` underflows.
pub fn ln_chi(x: f64) -> f64 {
    let u = x.abs();
    if u < 20.0 {
        chi(u).ln()
    } else {
        // chi(u) = exp(-(u-1)^2)/4 * (erfcx(u-1) - erfcx(u+1) exp(-4u))
        let bracket = erfcx(u - 1.0) - erfcx(u + 1.0) * (-4.0 * u).exp();
        -(u - 1.0) * (u - 1.0) + bracket.ln() - 4f64.ln()
    }
}

/// Derivative of the bell density, `(exp(-(x+1)^2) - exp(-(x-1)^2)) / (2 sqrt(pi))`.
pub fn chi_derivative(x: f64) -> f64 {
    let p = x + 1.0;
    let m = x - 1.0;
    ((-p * p).exp() - (-m * m).exp()) / (2.0 * PI.sqrt())
}

/// Upper envelope `exp(-(x - 1)^2) / sqrt(pi)` of the density, valid for `x >= 1`.
pub fn chi_envelope(x: f64) -> f64 {
    let m = x - 1.0;
    (-m * m).exp() * FRAC_1_SQRT_PI
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(z: f64) -> f64 {
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    a
}

/// Gamma function for `x > 0` (Lanczos, g = 7, nine terms), with reflection below 1/2.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    if x == x.floor() && x <= 23.0 {
        // exact factorials
        return (1..x as u64).fold(1.0, |acc, k| acc * k as f64);
    }
    ln_gamma(x).exp()
}

/// `ln Gamma(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}
