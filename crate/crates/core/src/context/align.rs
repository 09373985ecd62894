//! Exhaustive integer translation search.
//!
//! The cost of a shift is the mean absolute luma difference over the pixels
//! where both rasters overlap. Candidates are visited in tie-break order
//! (smallest `|dx|+|dy|`, then `dy`, then `dx`), so the first strictly better
//! cost wins and equal costs keep the earlier shift. Partial sums abort a
//! candidate as soon as it can no longer win, which keeps the search exact.
//! Shifts that leave less than half of the trusted raster overlapping are
//! skipped, so a sliver of blank border cannot win on a mean of zero.

use super::frame::Frame;
use super::geometry::{Rect, Shift};
use super::plane::GrayPlane;

/// Result of a translation search. `cost_sum / overlap` is the mean
/// absolute difference at `shift`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alignment {
    pub shift: Shift,
    pub cost_sum: u64,
    pub overlap: u64,
}

impl Alignment {
    /// Strict comparison of mean costs without division.
    pub fn cheaper_than(&self, other: &Alignment) -> bool {
        (self.cost_sum as u128) * (other.overlap as u128) < (other.cost_sum as u128) * (self.overlap as u128)
    }

    pub fn mean_cost(&self) -> f64 {
        if self.overlap == 0 {
            f64::INFINITY
        } else {
            self.cost_sum as f64 / self.overlap as f64
        }
    }
}

/// Search radius for a region: 10% of its larger side, rounded up.
pub fn search_bound(w: u32, h: u32) -> u32 {
    w.max(h).div_ceil(10)
}

fn candidates(bound: u32) -> Vec<Shift> {
    let b = bound as i32;
    let mut out: Vec<Shift> = (-b..=b).flat_map(|dy| (-b..=b).map(move |dx| Shift { dx, dy })).collect();
    out.sort_by_key(|s| (s.manhattan(), s.dy, s.dx));
    out
}

fn row_prefix_sums(p: &GrayPlane) -> Vec<u32> {
    let w = p.width as usize + 1;
    let mut out = vec![0u32; w * p.height as usize];
    for y in 0..p.height as usize {
        let row = p.row(y as u32);
        let acc = &mut out[y * w..(y + 1) * w];
        for x in 0..row.len() {
            acc[x + 1] = acc[x] + row[x] as u32;
        }
    }
    out
}

/// Core search: trusted pixel `p` is compared with local pixel
/// `origin + p + shift`.
///
/// Before a candidate is scanned, the sum over rows of the absolute
/// difference of row totals (a lower bound on its cost) is checked against
/// the best so far.
fn search(local: &GrayPlane, origin: (i64, i64), trusted: &GrayPlane, bound: u32) -> Alignment {
    let (ox, oy) = origin;
    let (lw, lh) = (local.width as i64, local.height as i64);
    let (tw, th) = (trusted.width as i64, trusted.height as i64);
    let tsum = row_prefix_sums(trusted);
    let lsum = row_prefix_sums(local);
    let (tstride, lstride) = (tw as usize + 1, lw as usize + 1);
    let mut best: Option<Alignment> = None;

    let cannot_win = |sum: u64, overlap: u64, best: &Option<Alignment>| {
        best.as_ref()
            .is_some_and(|b| (sum as u128) * (b.overlap as u128) >= (b.cost_sum as u128) * (overlap as u128))
    };

    for shift in candidates(bound) {
        let (dx, dy) = (shift.dx as i64, shift.dy as i64);
        let x0 = 0.max(-ox - dx);
        let x1 = tw.min(lw - ox - dx);
        let y0 = 0.max(-oy - dy);
        let y1 = th.min(lh - oy - dy);
        if x1 <= x0 || y1 <= y0 {
            continue;
        }
        let overlap = ((x1 - x0) * (y1 - y0)) as u64;
        if overlap * 2 < (tw * th) as u64 {
            continue;
        }
        let lx0 = (ox + x0 + dx) as usize;
        let span = (x1 - x0) as usize;
        if best.is_some() {
            let mut lower = 0u64;
            for y in y0..y1 {
                let t = &tsum[y as usize * tstride..];
                let l = &lsum[(oy + y + dy) as usize * lstride..];
                let ts = t[x0 as usize + span] - t[x0 as usize];
                let ls = l[lx0 + span] - l[lx0];
                lower += ts.abs_diff(ls) as u64;
            }
            if cannot_win(lower, overlap, &best) {
                continue;
            }
        }
        let mut sum = 0u64;
        let mut aborted = false;
        for y in y0..y1 {
            let trow = trusted.row(y as u32);
            let lrow = local.row((oy + y + dy) as u32);
            sum += trow[x0 as usize..x0 as usize + span]
                .iter()
                .zip(&lrow[lx0..lx0 + span])
                .map(|(a, b)| a.abs_diff(*b) as u64)
                .sum::<u64>();
            if cannot_win(sum, overlap, &best) {
                aborted = true;
                break;
            }
        }
        if aborted {
            continue;
        }
        let cand = Alignment { shift, cost_sum: sum, overlap };
        if best.as_ref().is_none_or(|b| cand.cheaper_than(b)) {
            best = Some(cand);
            if sum == 0 {
                break;
            }
        }
    }
    best.unwrap_or(Alignment { shift: Shift::ZERO, cost_sum: 0, overlap: 0 })
}

/// Best shift of `local` against `trusted` (same size) within `±bound`.
/// A positive `dx` means the local content sits further right.
pub fn align_translation(local: &GrayPlane, trusted: &GrayPlane, bound: u32) -> Shift {
    search(local, (0, 0), trusted, bound).shift
}

/// Aligns the content of `rect` in `trusted` against the surrounding area of
/// `local`, so shifted content may come from outside the rect itself.
pub fn align_in_frame(local: &Frame, trusted: &Frame, rect: &Rect, bound: u32) -> Alignment {
    let window = rect.inflate_clipped(bound, local.width(), local.height());
    let local_plane = GrayPlane::from_frame_rect(local, &window);
    let trusted_plane = GrayPlane::from_frame_rect(trusted, rect);
    let origin = (rect.x as i64 - window.x as i64, rect.y as i64 - window.y as i64);
    search(&local_plane, origin, &trusted_plane, bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn textured(w: u32, h: u32, seed: u32) -> GrayPlane {
        let mut p = GrayPlane::new(w, h, 0);
        for y in 0..h {
            for x in 0..w {
                let v = (x.wrapping_mul(37) ^ y.wrapping_mul(91) ^ seed).wrapping_mul(2654435761) >> 24;
                p.set(x, y, v as u8);
            }
        }
        p
    }

    /// Independent oracle: every shift, mean cost as f64, explicit tie-break.
    fn brute(local: &GrayPlane, trusted: &GrayPlane, bound: i32) -> Shift {
        let mut best: Option<(f64, (u32, i32, i32))> = None;
        for dy in -bound..=bound {
            for dx in -bound..=bound {
                let (mut sum, mut n) = (0f64, 0f64);
                for y in 0..trusted.height as i32 {
                    for x in 0..trusted.width as i32 {
                        let (lx, ly) = (x + dx, y + dy);
                        if lx < 0 || ly < 0 || lx >= local.width as i32 || ly >= local.height as i32 {
                            continue;
                        }
                        sum += (trusted.get(x as u32, y as u32) as f64 - local.get(lx as u32, ly as u32) as f64).abs();
                        n += 1.0;
                    }
                }
                if n == 0.0 || 2.0 * n < (trusted.width * trusted.height) as f64 {
                    continue;
                }
                let key = ((dx.unsigned_abs() + dy.unsigned_abs()), dy, dx);
                let cost = sum / n;
                let better = match best {
                    None => true,
                    Some((c, k)) => cost < c - 1e-12 || ((cost - c).abs() <= 1e-12 && key < k),
                };
                if better {
                    best = Some((cost, key));
                }
            }
        }
        let (_, (_, dy, dx)) = best.unwrap();
        Shift { dx, dy }
    }

    #[test]
    fn identical_planes_align_at_origin() {
        let p = textured(20, 12, 1);
        assert_eq!(align_translation(&p, &p, 2), Shift::ZERO);
    }

    #[test]
    fn bound_is_ceil_of_tenth() {
        assert_eq!(search_bound(100, 20), 10);
        assert_eq!(search_bound(101, 20), 11);
        assert_eq!(search_bound(5, 3), 1);
    }

    #[test]
    fn recovers_right_down_shift_inside_frame() {
        // Trusted content is a textured block on white; local has it 3 px right, 2 px down.
        let (w, h) = (60u32, 40u32);
        let tex = textured(30, 20, 7);
        let paint = |ox: u32, oy: u32| {
            let mut px = vec![255u8; (w * h * 3) as usize];
            for y in 0..20 {
                for x in 0..30 {
                    let v = tex.get(x, y);
                    let i = (((oy + y) * w + ox + x) * 3) as usize;
                    px[i..i + 3].copy_from_slice(&[v, v / 2, 255 - v]);
                }
            }
            Frame::new(w, h, px, 0).unwrap()
        };
        let trusted = paint(10, 10);
        let local = paint(13, 12);
        let rect = Rect::new(10, 10, 30, 20).unwrap();
        let a = align_in_frame(&local, &trusted, &rect, search_bound(30, 20));
        assert_eq!(a.shift, Shift { dx: 3, dy: 2 });
        assert_eq!(a.cost_sum, 0);
    }

    #[test]
    fn matches_exhaustive_oracle_on_random_planes() {
        for seed in 0..25u32 {
            let base = textured(14, 9, seed);
            let mut local = GrayPlane::new(14, 9, 0);
            let (sx, sy) = ((seed % 5) as i32 - 2, (seed % 3) as i32 - 1);
            for y in 0..9i32 {
                for x in 0..14i32 {
                    let (bx, by) = (x - sx, y - sy);
                    let v = if (0..14).contains(&bx) && (0..9).contains(&by) {
                        base.get(bx as u32, by as u32).saturating_add((seed % 4) as u8)
                    } else {
                        (x * 17 + y * 5) as u8
                    };
                    local.set(x as u32, y as u32, v);
                }
            }
            assert_eq!(align_translation(&local, &base, 3), brute(&local, &base, 3), "seed {seed}");
        }
    }

    #[test]
    fn flat_planes_tie_at_origin() {
        let a = GrayPlane::new(8, 8, 50);
        let b = GrayPlane::new(8, 8, 60);
        assert_eq!(align_translation(&a, &b, 3), Shift::ZERO);
    }
}
