/// Result of an Otsu split: values `<= threshold` form the low class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OtsuSplit {
    pub threshold: u8,
    pub n_lo: u64,
    pub n_hi: u64,
    pub mean_lo: f64,
    pub mean_hi: f64,
}

impl OtsuSplit {
    /// True when the low (dark) class is the smaller one.
    pub fn dark_is_minority(&self) -> bool {
        self.n_lo <= self.n_hi
    }

    pub fn contrast(&self) -> f64 {
        self.mean_hi - self.mean_lo
    }
}

/// Otsu's threshold over a 256-bin histogram. When several thresholds reach
/// the same between-class variance (an empty gap between two modes), the
/// middle of that plateau is taken. `None` when fewer than two levels occur.
pub fn otsu(hist: &[u32; 256]) -> Option<OtsuSplit> {
    let total: u64 = hist.iter().map(|&c| c as u64).sum();
    let sum: u64 = hist.iter().enumerate().map(|(v, &c)| v as u64 * c as u64).sum();
    let (mut w0, mut sum0) = (0u64, 0u64);
    let mut best: Option<(f64, usize, usize)> = None;
    for t in 0..255usize {
        w0 += hist[t] as u64;
        sum0 += t as u64 * hist[t] as u64;
        let w1 = total - w0;
        if w0 == 0 {
            continue;
        }
        if w1 == 0 {
            break;
        }
        let m0 = sum0 as f64 / w0 as f64;
        let m1 = (sum - sum0) as f64 / w1 as f64;
        let var = w0 as f64 * w1 as f64 * (m0 - m1) * (m0 - m1);
        match best {
            Some((b, lo, _)) if var == b => best = Some((b, lo, t)),
            Some((b, _, _)) if var <= b => {}
            _ => best = Some((var, t, t)),
        }
    }
    let (_, lo, hi) = best?;
    let threshold = (lo + hi) / 2;
    let n_lo: u64 = hist[..=threshold].iter().map(|&c| c as u64).sum();
    let s_lo: u64 = hist[..=threshold].iter().enumerate().map(|(v, &c)| v as u64 * c as u64).sum();
    let n_hi = total - n_lo;
    Some(OtsuSplit {
        threshold: threshold as u8,
        n_lo,
        n_hi,
        mean_lo: s_lo as f64 / n_lo as f64,
        mean_hi: (sum - s_lo) as f64 / n_hi as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist(pairs: &[(u8, u32)]) -> [u32; 256] {
        let mut h = [0u32; 256];
        for &(v, c) in pairs {
            h[v as usize] += c;
        }
        h
    }

    #[test]
    fn two_modes_split_at_gap_middle() {
        let s = otsu(&hist(&[(0, 30), (255, 70)])).unwrap();
        assert_eq!(s.threshold, 127);
        assert_eq!((s.n_lo, s.n_hi), (30, 70));
        assert!(s.dark_is_minority());
        assert_eq!(s.contrast(), 255.0);
    }

    #[test]
    fn single_level_has_no_split() {
        assert!(otsu(&hist(&[(90, 10)])).is_none());
        assert!(otsu(&[0; 256]).is_none());
    }

    #[test]
    fn matches_brute_force_variance_maximum() {
        let h = hist(&[(10, 5), (40, 9), (120, 3), (200, 20), (230, 4)]);
        let s = otsu(&h).unwrap();
        let var_at = |t: usize| {
            let lo: Vec<(usize, f64)> = (0..=t).map(|v| (v, h[v] as f64)).collect();
            let hi: Vec<(usize, f64)> = (t + 1..256).map(|v| (v, h[v] as f64)).collect();
            let w0: f64 = lo.iter().map(|x| x.1).sum();
            let w1: f64 = hi.iter().map(|x| x.1).sum();
            if w0 == 0.0 || w1 == 0.0 {
                return 0.0;
            }
            let m0 = lo.iter().map(|x| x.0 as f64 * x.1).sum::<f64>() / w0;
            let m1 = hi.iter().map(|x| x.0 as f64 * x.1).sum::<f64>() / w1;
            w0 * w1 * (m0 - m1).powi(2)
        };
        let best = (0..255).map(var_at).fold(0.0, f64::max);
        assert!((var_at(s.threshold as usize) - best).abs() < 1e-6);
    }
}
