//! Reference-element shape functions and Gauss quadrature.
//!
//! Shape functions are parameterized by the local coordinate
//! `t = (x - x_left)/h` in `[0, 1]`; derivatives are with respect to the
//! physical coordinate `x`.

/// Gauss-Legendre rule mapped to `[0, 1]` (weights sum to 1).
#[derive(Debug, Clone, Copy)]
pub struct GaussRule {
    points: &'static [(f64, f64)],
}

// Nodes/weights on [-1, 1], mapped to [0, 1] via t = (x+1)/2, w/2.
const GAUSS_2: [(f64, f64); 2] = [
    (0.211_324_865_405_187_1, 0.5),
    (0.788_675_134_594_812_9, 0.5),
];

const GAUSS_4: [(f64, f64); 4] = [
    (0.069_431_844_202_973_71, 0.173_927_422_568_726_95),
    (0.330_009_478_207_571_87, 0.326_072_577_431_273_05),
    (0.669_990_521_792_428_13, 0.326_072_577_431_273_05),
    (0.930_568_155_797_026_3, 0.173_927_422_568_726_95),
];

const GAUSS_8: [(f64, f64); 8] = [
    (0.019_855_071_751_231_84, 0.050_614_268_145_188_13),
    (0.101_666_761_293_186_63, 0.111_190_517_226_687_24),
    (0.237_233_795_041_835_5, 0.156_853_322_938_943_62),
    (0.408_282_678_752_175_05, 0.181_341_891_689_181_0),
    (0.591_717_321_247_825_0, 0.181_341_891_689_181_0),
    (0.762_766_204_958_164_5, 0.156_853_322_938_943_62),
    (0.898_333_238_706_813_4, 0.111_190_517_226_687_24),
    (0.980_144_928_248_768_2, 0.050_614_268_145_188_13),
];

impl GaussRule {
    /// Exact for polynomials of degree <= 3; used for pure P1 terms.
    pub fn two_point() -> Self {
        GaussRule { points: &GAUSS_2 }
    }

    /// Exact for polynomials of degree <= 7; used for Hermite and
    /// mixed terms.
    pub fn four_point() -> Self {
        GaussRule { points: &GAUSS_4 }
    }

    /// Exact for polynomials of degree <= 15; reserved for oracles.
    pub fn eight_point() -> Self {
        GaussRule { points: &GAUSS_8 }
    }

    /// Iterates `(t, weight)` pairs; multiply weights by the element
    /// length to integrate over a physical element.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().copied()
    }
}

/// P1 shape values `[1-t, t]`.
pub fn p1_values(t: f64) -> [f64; 2] {
    [1.0 - t, t]
}

/// P1 shape x-derivatives on an element of length `h`.
pub fn p1_derivs(h: f64) -> [f64; 2] {
    [-1.0 / h, 1.0 / h]
}

/// Hermite cubic shape values for DOFs
/// `[value_left, slope_left, value_right, slope_right]`.
pub fn hermite_values(t: f64, h: f64) -> [f64; 4] {
    [
        1.0 - 3.0 * t * t + 2.0 * t * t * t,
        h * t * (1.0 - t) * (1.0 - t),
        3.0 * t * t - 2.0 * t * t * t,
        h * t * t * (t - 1.0),
    ]
}

/// Hermite cubic first x-derivatives.
pub fn hermite_d1(t: f64, h: f64) -> [f64; 4] {
    [
        -6.0 * t * (1.0 - t) / h,
        (1.0 - t) * (1.0 - 3.0 * t),
        6.0 * t * (1.0 - t) / h,
        t * (3.0 * t - 2.0),
    ]
}

/// Hermite cubic second x-derivatives.
pub fn hermite_d2(t: f64, h: f64) -> [f64; 4] {
    [
        (-6.0 + 12.0 * t) / (h * h),
        (-4.0 + 6.0 * t) / h,
        (6.0 - 12.0 * t) / (h * h),
        (6.0 * t - 2.0) / h,
    ]
}
