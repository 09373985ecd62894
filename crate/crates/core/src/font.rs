//! Bundled fixed-width bitmap font: 8x14 cells covering printable ASCII.
//!
//! Each glyph is fourteen row bytes, bit 0 is the leftmost column. Row 0,
//! row 13 and column 7 are always blank, so adjacent cells never touch.

pub const GLYPH_W: u32 = 8;
pub const GLYPH_H: u32 = 14;

static GLYPHS: [(char, [u8; 14]); 95] = [
    (' ', [0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00]),
    ('!', [0x00, 0x18, 0x18, 0x3C, 0x3C, 0x3C, 0x18, 0x18, 0x18, 0x00, 0x18, 0x18, 0x00, 0x00]),
    ('"', [0x00, 0x36, 0x36, 0x36, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00]),
    ('#', [0x00, 0x36, 0x36, 0x36, 0x7F, 0x7F, 0x36, 0x7F, 0x7F, 0x36, 0x36, 0x36, 0x00, 0x00]),
    ('$', [0x00, 0x0C, 0x0C, 0x3E, 0x03, 0x03, 0x1E, 0x30, 0x30, 0x1F, 0x0C, 0x0C, 0x00, 0x00]),
    ('%', [0x00, 0x00, 0x00, 0x63, 0x33, 0x33, 0x18, 0x0C, 0x0C, 0x66, 0x63, 0x63, 0x00, 0x00]),
    ('&', [0x00, 0x1C, 0x1C, 0x36, 0x1C, 0x1C, 0x6E, 0x3B, 0x3B, 0x33, 0x6E, 0x6E, 0x00, 0x00]),
    ('\'', [0x00, 0x06, 0x06, 0x06, 0x03, 0x03, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00]),
    ('(', [0x00, 0x18, 0x18, 0x0C, 0x06, 0x06, 0x06, 0x06, 0x06, 0x0C, 0x18, 0x18, 0x00, 0x00]),
    (')', [0x00, 0x06, 0x06, 0x0C, 0x18, 0x18, 0x18, 0x18, 0x18, 0x0C, 0x06, 0x06, 0x00, 0x00]),
    ('*', [0x00, 0x00, 0x00, 0x66, 0x3C, 0x3C, 0x7F, 0x3C, 0x3C, 0x66, 0x00, 0x00, 0x00, 0x00]),
    ('+', [0x00, 0x00, 0x00, 0x0C, 0x0C, 0x0C, 0x3F, 0x0C, 0x0C, 0x0C, 0x00, 0x00, 0x00, 0x00]),
    (',', [0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C, 0x0C, 0x06, 0x00]),
    ('-', [0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x3F, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00]),
    ('.', [0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C, 0x0C, 0x00, 0x00]),
    ('/', [0x00, 0x60, 0x60, 0x30, 0x18, 0x18, 0x0C, 0x06, 0x06, 0x03, 0x01, 0x01, 0x00, 0x00]),
    ('0', [0x00, 0x3E, 0x3E, 0x63, 0x73, 0x73, 0x7B, 0x6F, 0x6F, 0x67, 0x3E, 0x3E, 0x00, 0x00]),
    ('1', [0x00, 0x0C, 0x0C, 0x0E, 0x0C, 0x0C, 0x0C, 0x0C, 0x0C, 0x0C, 0x3F, 0x3F, 0x00, 0x00]),
    ('2', [0x00, 0x1E, 0x1E, 0x33, 0x30, 0x30, 0x1C, 0x06, 0x06, 0x33, 0x3F, 0x3F, 0x00, 0x00]),
    ('3', [0x00, 0x1E, 0x1E, 0x33, 0x30, 0x30, 0x1C, 0x30, 0x30, 0x33, 0x1E, 0x1E, 0x00, 0x00]),
    ('4', [0x00, 0x38, 0x38, 0x3C, 0x36, 0x36, 0x33, 0x7F, 0x7F, 0x30, 0x78, 0x78, 0x00, 0x00]),
    ('5', [0x00, 0x3F, 0x3F, 0x03, 0x1F, 0x1F, 0x30, 0x30, 0x30, 0x33, 0x1E, 0x1E, 0x00, 0x00]),
    ('6', [0x00, 0x1C, 0x1C, 0x06, 0x03, 0x03, 0x1F, 0x33, 0x33, 0x33, 0x1E, 0x1E, 0x00, 0x00]),
    ('7', [0x00, 0x3F, 0x3F, 0x33, 0x30, 0x30, 0x18, 0x0C, 0x0C, 0x0C, 0x0C, 0x0C, 0x00, 0x00]),
    ('8', [0x00, 0x1E, 0x1E, 0x33, 0x33, 0x33, 0x1E, 0x33, 0x33, 0x33, 0x1E, 0x1E, 0x00, 0x00]),
    ('9', [0x00, 0x1E, 0x1E, 0x33, 0x33, 0x33, 0x3E, 0x30, 0x30, 0x18, 0x0E, 0x0E, 0x00, 0x00]),
    (':', [0x00, 0x00, 0x00, 0x0C, 0x0C, 0x0C, 0x00, 0x00, 0x00, 0x0C, 0x0C, 0x0C, 0x00, 0x00]),
    (';', [0x00, 0x00, 0x00, 0x0C, 0x0C, 0x0C, 0x00, 0x00, 0x00, 0x0C, 0x0C, 0x0C, 0x06, 0x00]),
    ('<', [0x00, 0x18, 0x18, 0x0C, 0x06, 0x06, 0x03, 0x06, 0x06, 0x0C, 0x18, 0x18, 0x00, 0x00]),
    ('=', [0x00, 0x00, 0x00, 0x00, 0x3F, 0x3F, 0x00, 0x00, 0x00, 0x3F, 0x00, 0x00, 0x00, 0x00]),
    ('>', [0x00, 0x06, 0x06, 0x0C, 0x18, 0x18, 0x30, 0x18, 0x18, 0x0C, 0x06, 0x06, 0x00, 0x00]),
    ('?', [0x00, 0x1E, 0x1E, 0x33, 0x30, 0x30, 0x18, 0x0C, 0x0C, 0x00, 0x0C, 0x0C, 0x00, 0x00]),
    ('@', [0x00, 0x3E, 0x3E, 0x63, 0x7B, 0x7B, 0x7B, 0x7B, 0x7B, 0x03, 0x1E, 0x1E, 0x00, 0x00]),
    ('A', [0x00, 0x0C, 0x0C, 0x1E, 0x33, 0x33, 0x33, 0x3F, 0x3F, 0x33, 0x33, 0x33, 0x00, 0x00]),
    ('B', [0x00, 0x3F, 0x3F, 0x66, 0x66, 0x66, 0x3E, 0x66, 0x66, 0x66, 0x3F, 0x3F, 0x00, 0x00]),
    ('C', [0x00, 0x3C, 0x3C, 0x66, 0x03, 0x03, 0x03, 0x03, 0x03, 0x66, 0x3C, 0x3C, 0x00, 0x00]),
    ('D', [0x00, 0x1F, 0x1F, 0x36, 0x66, 0x66, 0x66, 0x66, 0x66, 0x36, 0x1F, 0x1F, 0x00, 0x00]),
    ('E', [0x00, 0x7F, 0x7F, 0x46, 0x16, 0x16, 0x1E, 0x16, 0x16, 0x46, 0x7F, 0x7F, 0x00, 0x00]),
    ('F', [0x00, 0x7F, 0x7F, 0x46, 0x16, 0x16, 0x1E, 0x16, 0x16, 0x06, 0x0F, 0x0F, 0x00, 0x00]),
    ('G', [0x00, 0x3C, 0x3C, 0x66, 0x03, 0x03, 0x03, 0x73, 0x73, 0x66, 0x7C, 0x7C, 0x00, 0x00]),
    ('H', [0x00, 0x33, 0x33, 0x33, 0x33, 0x33, 0x3F, 0x33, 0x33, 0x33, 0x33, 0x33, 0x00, 0x00]),
    ('I', [0x00, 0x1E, 0x1E, 0x0C, 0x0C, 0x0C, 0x0C, 0x0C, 0x0C, 0x0C, 0x1E, 0x1E, 0x00, 0x00]),
    ('J', [0x00, 0x78, 0x78, 0x30, 0x30, 0x30, 0x30, 0x33, 0x33, 0x33, 0x1E, 0x1E, 0x00, 0x00]),
    ('K', [0x00, 0x67, 0x67, 0x66, 0x36, 0x36, 0x1E, 0x36, 0x36, 0x66, 0x67, 0x67, 0x00, 0x00]),
    ('L', [0x00, 0x0F, 0x0F, 0x06, 0x06, 0x06, 0x06, 0x46, 0x46, 0x66, 0x7F, 0x7F, 0x00, 0x00]),
    ('M', [0x00, 0x63, 0x63, 0x77, 0x7F, 0x7F, 0x7F, 0x6B, 0x6B, 0x63, 0x63, 0x63, 0x00, 0x00]),
    ('N', [0x00, 0x63, 0x63, 0x67, 0x6F, 0x6F, 0x7B, 0x73, 0x73, 0x63, 0x63, 0x63, 0x00, 0x00]),
    ('O', [0x00, 0x1C, 0x1C, 0x36, 0x63, 0x63, 0x63, 0x63, 0x63, 0x36, 0x1C, 0x1C, 0x00, 0x00]),
    ('P', [0x00, 0x3F, 0x3F, 0x66, 0x66, 0x66, 0x3E, 0x06, 0x06, 0x06, 0x0F, 0x0F, 0x00, 0x00]),
    ('Q', [0x00, 0x1E, 0x1E, 0x33, 0x33, 0x33, 0x33, 0x3B, 0x3B, 0x1E, 0x38, 0x38, 0x00, 0x00]),
    ('R', [0x00, 0x3F, 0x3F, 0x66, 0x66, 0x66, 0x3E, 0x36, 0x36, 0x66, 0x67, 0x67, 0x00, 0x00]),
    ('S', [0x00, 0x1E, 0x1E, 0x33, 0x07, 0x07, 0x0E, 0x38, 0x38, 0x33, 0x1E, 0x1E, 0x00, 0x00]),
    ('T', [0x00, 0x3F, 0x3F, 0x2D, 0x0C, 0x0C, 0x0C, 0x0C, 0x0C, 0x0C, 0x1E, 0x1E, 0x00, 0x00]),
    ('U', [0x00, 0x33, 0x33, 0x33, 0x33, 0x33, 0x33, 0x33, 0x33, 0x33, 0x3F, 0x3F, 0x00, 0x00]),
    ('V', [0x00, 0x33, 0x33, 0x33, 0x33, 0x33, 0x33, 0x33, 0x33, 0x1E, 0x0C, 0x0C, 0x00, 0x00]),
    ('W', [0x00, 0x63, 0x63, 0x63, 0x63, 0x63, 0x6B, 0x7F, 0x7F, 0x77, 0x63, 0x63, 0x00, 0x00]),
    ('X', [0x00, 0x63, 0x63, 0x63, 0x36, 0x36, 0x1C, 0x1C, 0x1C, 0x36, 0x63, 0x63, 0x00, 0x00]),
    ('Y', [0x00, 0x33, 0x33, 0x33, 0x33, 0x33, 0x1E, 0x0C, 0x0C, 0x0C, 0x1E, 0x1E, 0x00, 0x00]),
    ('Z', [0x00, 0x7F, 0x7F, 0x63, 0x31, 0x31, 0x18, 0x4C, 0x4C, 0x66, 0x7F, 0x7F, 0x00, 0x00]),
    ('[', [0x00, 0x1E, 0x1E, 0x06, 0x06, 0x06, 0x06, 0x06, 0x06, 0x06, 0x1E, 0x1E, 0x00, 0x00]),
    ('\\', [0x00, 0x03, 0x03, 0x06, 0x0C, 0x0C, 0x18, 0x30, 0x30, 0x60, 0x40, 0x40, 0x00, 0x00]),
    (']', [0x00, 0x1E, 0x1E, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x1E, 0x1E, 0x00, 0x00]),
    ('^', [0x00, 0x08, 0x08, 0x1C, 0x36, 0x36, 0x63, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00]),
    ('_', [0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x7F, 0x00]),
    ('`', [0x00, 0x0C, 0x0C, 0x0C, 0x18, 0x18, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00]),
    ('a', [0x00, 0x00, 0x00, 0x00, 0x1E, 0x1E, 0x30, 0x3E, 0x3E, 0x33, 0x6E, 0x6E, 0x00, 0x00]),
    ('b', [0x00, 0x07, 0x07, 0x06, 0x06, 0x06, 0x3E, 0x66, 0x66, 0x66, 0x3B, 0x3B, 0x00, 0x00]),
    ('c', [0x00, 0x00, 0x00, 0x00, 0x1E, 0x1E, 0x33, 0x03, 0x03, 0x33, 0x1E, 0x1E, 0x00, 0x00]),
    ('d', [0x00, 0x38, 0x38, 0x30, 0x30, 0x30, 0x3E, 0x33, 0x33, 0x33, 0x6E, 0x6E, 0x00, 0x00]),
    ('e', [0x00, 0x00, 0x00, 0x00, 0x1E, 0x1E, 0x33, 0x3F, 0x3F, 0x03, 0x1E, 0x1E, 0x00, 0x00]),
    ('f', [0x00, 0x1C, 0x1C, 0x36, 0x06, 0x06, 0x0F, 0x06, 0x06, 0x06, 0x0F, 0x0F, 0x00, 0x00]),
    ('g', [0x00, 0x00, 0x00, 0x00, 0x6E, 0x6E, 0x33, 0x33, 0x33, 0x3E, 0x30, 0x30, 0x1F, 0x00]),
    ('h', [0x00, 0x07, 0x07, 0x06, 0x36, 0x36, 0x6E, 0x66, 0x66, 0x66, 0x67, 0x67, 0x00, 0x00]),
    ('i', [0x00, 0x0C, 0x0C, 0x00, 0x0E, 0x0E, 0x0C, 0x0C, 0x0C, 0x0C, 0x1E, 0x1E, 0x00, 0x00]),
    ('j', [0x00, 0x30, 0x30, 0x00, 0x30, 0x30, 0x30, 0x30, 0x30, 0x33, 0x33, 0x33, 0x1E, 0x00]),
    ('k', [0x00, 0x07, 0x07, 0x06, 0x66, 0x66, 0x36, 0x1E, 0x1E, 0x36, 0x67, 0x67, 0x00, 0x00]),
    ('l', [0x00, 0x0E, 0x0E, 0x0C, 0x0C, 0x0C, 0x0C, 0x0C, 0x0C, 0x0C, 0x1E, 0x1E, 0x00, 0x00]),
    ('m', [0x00, 0x00, 0x00, 0x00, 0x33, 0x33, 0x7F, 0x7F, 0x7F, 0x6B, 0x63, 0x63, 0x00, 0x00]),
    ('n', [0x00, 0x00, 0x00, 0x00, 0x1F, 0x1F, 0x33, 0x33, 0x33, 0x33, 0x33, 0x33, 0x00, 0x00]),
    ('o', [0x00, 0x00, 0x00, 0x00, 0x1E, 0x1E, 0x33, 0x33, 0x33, 0x33, 0x1E, 0x1E, 0x00, 0x00]),
    ('p', [0x00, 0x00, 0x00, 0x00, 0x3B, 0x3B, 0x66, 0x66, 0x66, 0x3E, 0x06, 0x06, 0x0F, 0x00]),
    ('q', [0x00, 0x00, 0x00, 0x00, 0x6E, 0x6E, 0x33, 0x33, 0x33, 0x3E, 0x30, 0x30, 0x78, 0x00]),
    ('r', [0x00, 0x00, 0x00, 0x00, 0x3B, 0x3B, 0x6E, 0x66, 0x66, 0x06, 0x0F, 0x0F, 0x00, 0x00]),
    ('s', [0x00, 0x00, 0x00, 0x00, 0x3E, 0x3E, 0x03, 0x1E, 0x1E, 0x30, 0x1F, 0x1F, 0x00, 0x00]),
    ('t', [0x00, 0x08, 0x08, 0x0C, 0x3E, 0x3E, 0x0C, 0x0C, 0x0C, 0x2C, 0x18, 0x18, 0x00, 0x00]),
    ('u', [0x00, 0x00, 0x00, 0x00, 0x33, 0x33, 0x33, 0x33, 0x33, 0x33, 0x6E, 0x6E, 0x00, 0x00]),
    ('v', [0x00, 0x00, 0x00, 0x00, 0x33, 0x33, 0x33, 0x33, 0x33, 0x1E, 0x0C, 0x0C, 0x00, 0x00]),
    ('w', [0x00, 0x00, 0x00, 0x00, 0x63, 0x63, 0x6B, 0x7F, 0x7F, 0x7F, 0x36, 0x36, 0x00, 0x00]),
    ('x', [0x00, 0x00, 0x00, 0x00, 0x63, 0x63, 0x36, 0x1C, 0x1C, 0x36, 0x63, 0x63, 0x00, 0x00]),
    ('y', [0x00, 0x00, 0x00, 0x00, 0x33, 0x33, 0x33, 0x33, 0x33, 0x3E, 0x30, 0x30, 0x1F, 0x00]),
    ('z', [0x00, 0x00, 0x00, 0x00, 0x3F, 0x3F, 0x19, 0x0C, 0x0C, 0x26, 0x3F, 0x3F, 0x00, 0x00]),
    ('{', [0x00, 0x38, 0x38, 0x0C, 0x0C, 0x0C, 0x07, 0x0C, 0x0C, 0x0C, 0x38, 0x38, 0x00, 0x00]),
    ('|', [0x00, 0x18, 0x18, 0x18, 0x18, 0x18, 0x00, 0x18, 0x18, 0x18, 0x18, 0x18, 0x00, 0x00]),
    ('}', [0x00, 0x07, 0x07, 0x0C, 0x0C, 0x0C, 0x38, 0x0C, 0x0C, 0x0C, 0x07, 0x07, 0x00, 0x00]),
    ('~', [0x00, 0x6E, 0x6E, 0x3B, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00]),
];

/// Row bitmap of a printable ASCII character.
pub fn glyph(c: char) -> Option<&'static [u8; 14]> {
    let i = (c as u32).checked_sub(0x20)? as usize;
    GLYPHS.get(i).filter(|(g, _)| *g == c).map(|(_, rows)| rows)
}

/// Whether pixel `(x, y)` of the cell for `c` is ink. Unknown characters are blank.
#[inline]
pub fn ink(c: char, x: u32, y: u32) -> bool {
    x < GLYPH_W && y < GLYPH_H && glyph(c).is_some_and(|rows| rows[y as usize] >> x & 1 == 1)
}

/// All glyphs in code-point order.
pub fn glyphs() -> impl Iterator<Item = (char, &'static [u8; 14])> {
    GLYPHS.iter().map(|(c, rows)| (*c, rows))
}

pub fn is_printable(c: char) -> bool {
    (' '..='~').contains(&c)
}

/// Rendered width of a single line in pixels.
pub fn text_width(s: &str) -> u32 {
    s.chars().count() as u32 * GLYPH_W
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn covers_printable_ascii_in_order() {
        let chars: Vec<char> = glyphs().map(|(c, _)| c).collect();
        assert_eq!(chars, (' '..='~').collect::<Vec<_>>());
        assert!(glyph('\n').is_none());
        assert!(glyph('é').is_none());
    }

    #[test]
    fn glyphs_are_distinct_and_keep_blank_margins() {
        let mut seen = HashSet::new();
        for (c, rows) in glyphs() {
            assert!(seen.insert(*rows), "duplicate bitmap for {c:?}");
            assert_eq!(rows[0], 0);
            assert_eq!(rows[13], 0);
            assert!(rows.iter().all(|r| r & 0x80 == 0), "{c:?} touches column 7");
            if c != ' ' {
                assert!(rows.iter().any(|r| *r != 0), "{c:?} is empty");
            }
        }
    }

    #[test]
    fn ink_reads_bits_left_to_right() {
        // '!' is a centred bar.
        assert!(ink('!', 3, 2) && ink('!', 4, 2));
        assert!(!ink('!', 0, 2) && !ink('!', 7, 2));
        assert!(!ink('!', 9, 2));
    }
}
