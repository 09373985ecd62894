use serde::{Deserialize, Serialize};

/// Hue in degrees `[0, 360)`, saturation and value in `[0, 1]`.
/// Achromatic pixels carry hue 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HsvPixel {
    pub h: f64,
    pub s: f64,
    pub v: f64,
}

pub fn rgb_to_hsv(r: u8, g: u8, b: u8) -> HsvPixel {
    let (rf, gf, bf) = (r as f64, g as f64, b as f64);
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = (max - min) as f64;
    let v = max as f64 / 255.0;
    if max == 0 || delta == 0.0 {
        return HsvPixel { h: 0.0, s: 0.0, v };
    }
    let s = delta / max as f64;
    let sector = if max == r {
        ((gf - bf) / delta).rem_euclid(6.0)
    } else if max == g {
        (bf - rf) / delta + 2.0
    } else {
        (rf - gf) / delta + 4.0
    };
    let mut h = 60.0 * sector;
    if h >= 360.0 {
        h -= 360.0;
    }
    HsvPixel { h, s, v }
}

/// Inverse conversion, rounding each channel to the nearest byte.
pub fn hsv_to_rgb(p: HsvPixel) -> [u8; 3] {
    let v = p.v.clamp(0.0, 1.0) * 255.0;
    let s = p.s.clamp(0.0, 1.0);
    let c = v * s;
    let hp = p.h.rem_euclid(360.0) / 60.0;
    let x = c * (1.0 - (hp.rem_euclid(2.0) - 1.0).abs());
    let (r1, g1, b1) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    let q = |f: f64| (f + m).round().clamp(0.0, 255.0) as u8;
    [q(r1), q(g1), q(b1)]
}

/// Circular distance between two hues, in `[0, 180]`.
pub fn hue_distance(h1: f64, h2: f64) -> f64 {
    let d = (h1 - h2).abs().rem_euclid(360.0);
    d.min(360.0 - d)
}

/// Rounding slack for threshold ties; far below the smallest non-zero
/// channel difference between two 8-bit pixels.
const TIE_EPS: f64 = 1e-9;

/// Per-channel limits for the graphics comparison. A percentage applies to
/// each channel's full range: 15% is 54 degrees of hue, 0.15 saturation,
/// 0.15 value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HsvThresholds {
    pub hue_deg: f64,
    pub sat: f64,
    pub val: f64,
}

impl HsvThresholds {
    pub fn from_percent(percent: f64) -> HsvThresholds {
        HsvThresholds { hue_deg: 3.6 * percent, sat: percent / 100.0, val: percent / 100.0 }
    }

    /// True when any channel differs by more than its limit. Differences
    /// within `TIE_EPS` of a limit count as equal to it.
    #[inline]
    pub fn exceeded(&self, a: HsvPixel, b: HsvPixel) -> bool {
        hue_distance(a.h, b.h) > self.hue_deg + TIE_EPS
            || (a.s - b.s).abs() > self.sat + TIE_EPS
            || (a.v - b.v).abs() > self.val + TIE_EPS
    }
}

impl Default for HsvThresholds {
    fn default() -> Self {
        HsvThresholds::from_percent(15.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_tie_is_not_exceeded() {
        let t = HsvThresholds::default();
        assert!(!t.exceeded(rgb_to_hsv(140, 21, 107), rgb_to_hsv(129, 0, 70)));
        assert!(t.exceeded(rgb_to_hsv(140, 22, 107), rgb_to_hsv(129, 0, 70)));
    }

    #[test]
    fn primary_and_gray_conversions() {
        assert_eq!(rgb_to_hsv(255, 0, 0), HsvPixel { h: 0.0, s: 1.0, v: 1.0 });
        let gray = rgb_to_hsv(128, 128, 128);
        assert_eq!((gray.h, gray.s), (0.0, 0.0));
        assert!((gray.v - 0.502).abs() < 1e-3);
        assert_eq!(rgb_to_hsv(0, 255, 255), HsvPixel { h: 180.0, s: 1.0, v: 1.0 });
    }

    #[test]
    fn hue_distance_wraps() {
        assert_eq!(hue_distance(0.0, 359.0), 1.0);
        assert_eq!(hue_distance(10.0, 355.0), 15.0);
        assert_eq!(hue_distance(90.0, 270.0), 180.0);
    }

    #[test]
    fn default_thresholds_are_fifteen_percent_of_range() {
        let t = HsvThresholds::default();
        assert!((t.hue_deg - 54.0).abs() < 1e-9);
        assert_eq!((t.sat, t.val), (0.15, 0.15));
    }

    #[test]
    fn round_trip_on_sampled_grid() {
        for r in (0..=255u32).step_by(5) {
            for g in (0..=255u32).step_by(5) {
                for b in (0..=255u32).step_by(5) {
                    let back = hsv_to_rgb(rgb_to_hsv(r as u8, g as u8, b as u8));
                    for (orig, got) in [r as u8, g as u8, b as u8].iter().zip(back) {
                        assert!(orig.abs_diff(got) <= 1, "({r},{g},{b}) -> {back:?}");
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn hue_distance_symmetric_and_bounded(a in 0.0f64..360.0, b in 0.0f64..360.0) {
            let d = hue_distance(a, b);
            prop_assert_eq!(d, hue_distance(b, a));
            prop_assert!((0.0..=180.0).contains(&d));
        }

        #[test]
        fn hsv_ranges_hold(r: u8, g: u8, b: u8) {
            let p = rgb_to_hsv(r, g, b);
            prop_assert!((0.0..360.0).contains(&p.h));
            prop_assert!((0.0..=1.0).contains(&p.s));
            prop_assert!((0.0..=1.0).contains(&p.v));
            if p.s == 0.0 { prop_assert_eq!(p.h, 0.0); }
        }
    }
}
