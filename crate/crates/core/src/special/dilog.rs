use std::f64::consts::PI;

use num_complex::Complex64;

// B_{2k} / (2k+1)!, k = 1..21
pub(super) const BERNOULLI_EVEN: [f64; 21] = [
    2.777_777_777_777_777_6e-2,
    -2.777_777_777_777_778e-4,
    4.724_111_866_969_01e-6,
    -9.185_773_074_661_964e-8,
    1.897_886_998_897_1e-9,
    -4.064_761_645_144_225_6e-11,
    8.921_691_020_456_452e-13,
    -1.993_929_586_072_107_4e-14,
    4.518_980_029_619_918e-16,
    -1.035_651_761_218_124_7e-17,
    2.395_218_621_026_187e-19,
    -5.581_785_874_325_009e-21,
    1.309_150_755_418_321_2e-22,
    -3.087_419_802_426_740_3e-24,
    7.315_975_652_702_203e-26,
    -1.740_845_657_234_001e-27,
    4.157_635_644_613_9e-29,
    -9.962_148_488_284_622e-31,
    2.394_034_424_896_165e-32,
    -5.768_347_355_367_39e-34,
    1.393_179_479_647_008e-35,
];

/// Principal-branch dilogarithm Li₂(z), cut along [1, ∞).
pub fn dilog(z: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let zeta2 = PI * PI / 6.0;
    if z == one {
        return Complex64::new(zeta2, 0.0);
    }
    if z.norm() > 1.0 {
        // Li₂(z) = −Li₂(1/z) − π²/6 − ½ log²(−z)
        let l = (-z).ln();
        return -dilog_unit(one / z) - zeta2 - 0.5 * l * l;
    }
    dilog_unit(z)
}

// |z| <= 1
fn dilog_unit(z: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    if z.norm() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if z.re > 0.5 {
        if z == one {
            return Complex64::new(PI * PI / 6.0, 0.0);
        }
        // reflection: Li₂(z) = −Li₂(1−z) + π²/6 − log z · log(1−z)
        let w = one - z;
        return -bernoulli_series(w) + PI * PI / 6.0 - z.ln() * w.ln();
    }
    bernoulli_series(z)
}

// Σ B_n uⁿ⁺¹/(n+1)! with u = −log(1−z); valid for |u| < 2π
fn bernoulli_series(z: Complex64) -> Complex64 {
    let u = -(Complex64::new(1.0, 0.0) - z).ln();
    let u2 = u * u;
    let mut s = u - u2 / 4.0;
    let mut pw = u * u2;
    for c in BERNOULLI_EVEN {
        let t = pw * c;
        s += t;
        if t.norm() < 1e-18 * s.norm() {
            break;
        }
        pw *= u2;
    }
    s
}
