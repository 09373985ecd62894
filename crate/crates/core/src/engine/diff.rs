use crate::context::{Frame, FrameError, Rect};
use crate::output::components;

pub const DIFF_MARGIN: u32 = 2;

/// Boxes around connected groups of changed pixels, inflated by
/// [`DIFF_MARGIN`] and clipped to the frame.
pub fn frame_diff_bbox(prev: &Frame, cur: &Frame) -> Result<Vec<Rect>, FrameError> {
    prev.same_size(cur)?;
    let (w, h) = (cur.width(), cur.height());
    let (a, b) = (prev.pixels(), cur.pixels());
    if a == b {
        return Ok(Vec::new());
    }
    let row = w as usize * 3;
    let mut mask = vec![false; (w * h) as usize];
    for y in 0..h as usize {
        let (ra, rb) = (&a[y * row..(y + 1) * row], &b[y * row..(y + 1) * row]);
        if ra == rb {
            continue;
        }
        for x in 0..w as usize {
            if ra[3 * x..3 * x + 3] != rb[3 * x..3 * x + 3] {
                mask[y * w as usize + x] = true;
            }
        }
    }
    Ok(components(&mask, w, h).into_iter().map(|c| c.rect.inflate_clipped(DIFF_MARGIN, w, h)).collect())
}

/// Whether any diff rect touches `r`.
pub fn touches(diff: &[Rect], r: &Rect) -> bool {
    diff.iter().any(|d| d.intersects(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_and_single_pixel() {
        let a = Frame::filled(40, 30, [255, 255, 255], 0).unwrap();
        assert!(frame_diff_bbox(&a, &a).unwrap().is_empty());
        let mut px = a.pixels().to_vec();
        let k = (20 * 40 + 10) * 3;
        px[k] = 0;
        let b = Frame::new(40, 30, px, 0).unwrap();
        let d = frame_diff_bbox(&a, &b).unwrap();
        assert_eq!(d.len(), 1);
        assert!(d[0].contains_point(10, 20));
        assert!(d[0].w <= 5 && d[0].h <= 5);
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let a = Frame::filled(4, 4, [0, 0, 0], 0).unwrap();
        let b = Frame::filled(5, 4, [0, 0, 0], 0).unwrap();
        assert!(frame_diff_bbox(&a, &b).is_err());
    }
}
