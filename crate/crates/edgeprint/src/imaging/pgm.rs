//! PGM (portable graymap) reader and writer.
//!
//! Reads both the binary (`P5`) and ASCII (`P2`) encodings with a maxval of
//! at most 255; comments (`#` to end of line) are allowed wherever whitespace
//! is. Writing always produces the canonical binary form
//! `P5\n<w> <h>\n255\n<pixels>`, so decode/encode round-trips are
//! byte-identical modulo comments and header whitespace. Parse errors carry
//! the byte offset they were detected at.

use super::GrayImage;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PgmError {
    #[error("byte {offset}: not a PGM file (magic must be P5 or P2)")]
    BadMagic { offset: usize },
    #[error("byte {offset}: expected an unsigned decimal integer")]
    BadToken { offset: usize },
    #[error("byte {offset}: dimension must be positive and sane, got {value}")]
    BadDimension { offset: usize, value: u64 },
    #[error("byte {offset}: maxval {value} out of range (1..=255)")]
    MaxvalOutOfRange { offset: usize, value: u64 },
    #[error("byte {offset}: pixel data truncated, expected {expected} samples, found {found}")]
    Truncated {
        offset: usize,
        expected: usize,
        found: usize,
    },
    #[error("byte {offset}: sample {value} exceeds maxval {maxval}")]
    SampleOutOfRange {
        offset: usize,
        value: u64,
        maxval: u64,
    },
    #[error("byte {offset}: trailing data after pixel raster")]
    TrailingData { offset: usize },
}

/// Largest accepted dimension; blocks absurd headers before allocation.
const MAX_DIM: u64 = 1 << 20;

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Cursor { bytes, pos: 0 }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    /// Skips whitespace runs and `#` comments (through end of line).
    fn skip_separators(&mut self) {
        while let Some(b) = self.peek() {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(b) = self.peek() {
                    self.pos += 1;
                    if b == b'\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    /// Reads one unsigned decimal token. The reported offset is the position
    /// where the token should have started.
    fn read_u64(&mut self) -> Result<(u64, usize), PgmError> {
        self.skip_separators();
        let start = self.pos;
        let mut value: u64 = 0;
        let mut digits = 0;
        while let Some(b) = self.peek() {
            if b.is_ascii_digit() {
                value = value
                    .saturating_mul(10)
                    .saturating_add(u64::from(b - b'0'));
                self.pos += 1;
                digits += 1;
            } else {
                break;
            }
        }
        if digits == 0 {
            return Err(PgmError::BadToken { offset: start });
        }
        // A digit run must end at whitespace, a comment, or EOF.
        match self.peek() {
            None => {}
            Some(b) if b.is_ascii_whitespace() || b == b'#' => {}
            Some(_) => return Err(PgmError::BadToken { offset: start }),
        }
        Ok((value, start))
    }
}

/// Decodes a P5 or P2 graymap from raw bytes.
pub fn load_pgm(bytes: &[u8]) -> Result<GrayImage, PgmError> {
    let mut cur = Cursor::new(bytes);
    let binary = match (bytes.first(), bytes.get(1)) {
        (Some(b'P'), Some(b'5')) => true,
        (Some(b'P'), Some(b'2')) => false,
        _ => return Err(PgmError::BadMagic { offset: 0 }),
    };
    cur.pos = 2;
    match cur.peek() {
        Some(b) if b.is_ascii_whitespace() || b == b'#' => {}
        _ => return Err(PgmError::BadMagic { offset: 2 }),
    }

    let (width, w_off) = cur.read_u64()?;
    if width == 0 || width > MAX_DIM {
        return Err(PgmError::BadDimension {
            offset: w_off,
            value: width,
        });
    }
    let (height, h_off) = cur.read_u64()?;
    if height == 0 || height > MAX_DIM {
        return Err(PgmError::BadDimension {
            offset: h_off,
            value: height,
        });
    }
    let (maxval, m_off) = cur.read_u64()?;
    if maxval == 0 || maxval > 255 {
        return Err(PgmError::MaxvalOutOfRange {
            offset: m_off,
            value: maxval,
        });
    }

    let expected = (width as usize) * (height as usize);
    let pixels = if binary {
        read_raster_binary(&mut cur, expected)?
    } else {
        read_raster_ascii(&mut cur, expected, maxval)?
    };

    // GrayImage invariants hold by construction here.
    Ok(GrayImage::new(width as usize, height as usize, pixels).expect("validated header"))
}

fn read_raster_binary(cur: &mut Cursor<'_>, expected: usize) -> Result<Vec<u8>, PgmError> {
    // Exactly one whitespace byte separates the maxval from the raster.
    match cur.peek() {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => {
            return Err(PgmError::Truncated {
                offset: cur.pos,
                expected,
                found: 0,
            })
        }
    }
    let found = cur.bytes.len() - cur.pos;
    if found < expected {
        return Err(PgmError::Truncated {
            offset: cur.bytes.len(),
            expected,
            found,
        });
    }
    if found > expected {
        return Err(PgmError::TrailingData {
            offset: cur.pos + expected,
        });
    }
    Ok(cur.bytes[cur.pos..].to_vec())
}

fn read_raster_ascii(
    cur: &mut Cursor<'_>,
    expected: usize,
    maxval: u64,
) -> Result<Vec<u8>, PgmError> {
    let mut pixels = Vec::with_capacity(expected);
    for found in 0..expected {
        cur.skip_separators();
        if cur.peek().is_none() {
            return Err(PgmError::Truncated {
                offset: cur.pos,
                expected,
                found,
            });
        }
        let (value, offset) = cur.read_u64()?;
        if value > maxval {
            return Err(PgmError::SampleOutOfRange {
                offset,
                value,
                maxval,
            });
        }
        pixels.push(value as u8);
    }
    cur.skip_separators();
    if cur.peek().is_some() {
        return Err(PgmError::TrailingData { offset: cur.pos });
    }
    Ok(pixels)
}

/// Encodes the canonical binary form: `P5\n<w> <h>\n255\n` followed by the
/// raw pixel rows.
pub fn save_pgm(image: &GrayImage) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", image.width(), image.height());
    let mut out = Vec::with_capacity(header.len() + image.pixels().len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(image.pixels());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_header_for_single_pixel() {
        let img = GrayImage::filled(1, 1, 0).unwrap();
        assert_eq!(save_pgm(&img), b"P5\n1 1\n255\n\x00");
    }

    #[test]
    fn decodes_p5_with_space_separators() {
        let img = load_pgm(b"P5 2 2 255 \x00\xff\x80\x07").unwrap();
        assert_eq!((img.width(), img.height()), (2, 2));
        assert_eq!(img.pixels(), &[0, 255, 128, 7]);
    }

    #[test]
    fn decodes_p2_ascii() {
        let img = load_pgm(b"P2\n3 1\n255\n0 128 255\n").unwrap();
        assert_eq!(img.pixels(), &[0, 128, 255]);
    }

    #[test]
    fn header_comments_are_ignored() {
        let with = load_pgm(b"P5\n# camera rig 3\n2 1\n# gain 4\n255\n\x01\x02").unwrap();
        let without = load_pgm(b"P5\n2 1\n255\n\x01\x02").unwrap();
        assert_eq!(with, without);
    }

    #[test]
    fn rejects_bad_magic() {
        assert_eq!(load_pgm(b"P6\n1 1\n255\n\x00"), Err(PgmError::BadMagic { offset: 0 }));
        assert_eq!(load_pgm(b""), Err(PgmError::BadMagic { offset: 0 }));
        // Magic not followed by a separator.
        assert_eq!(load_pgm(b"P55 1 1 255 "), Err(PgmError::BadMagic { offset: 2 }));
    }

    #[test]
    fn rejects_zero_dimension_with_offset() {
        assert_eq!(
            load_pgm(b"P5\n0 4\n255\n"),
            Err(PgmError::BadDimension { offset: 3, value: 0 })
        );
        assert_eq!(
            load_pgm(b"P5\n4 0\n255\n"),
            Err(PgmError::BadDimension { offset: 5, value: 0 })
        );
    }

    #[test]
    fn rejects_maxval_out_of_range() {
        assert_eq!(
            load_pgm(b"P5\n1 1\n65535\n\x00\x00"),
            Err(PgmError::MaxvalOutOfRange { offset: 7, value: 65535 })
        );
        assert_eq!(
            load_pgm(b"P5\n1 1\n0\n\x00"),
            Err(PgmError::MaxvalOutOfRange { offset: 7, value: 0 })
        );
    }

    #[test]
    fn rejects_truncated_raster() {
        assert_eq!(
            load_pgm(b"P5\n2 2\n255\n\x00\x01\x02"),
            Err(PgmError::Truncated { offset: 14, expected: 4, found: 3 })
        );
        assert_eq!(
            load_pgm(b"P2\n2 2\n255\n0 1 2"),
            Err(PgmError::Truncated { offset: 16, expected: 4, found: 3 })
        );
    }

    #[test]
    fn rejects_trailing_bytes() {
        assert!(matches!(
            load_pgm(b"P5\n1 1\n255\n\x00\x00"),
            Err(PgmError::TrailingData { .. })
        ));
        assert!(matches!(
            load_pgm(b"P2\n1 1\n255\n0 7"),
            Err(PgmError::TrailingData { .. })
        ));
    }

    #[test]
    fn rejects_non_numeric_token() {
        assert_eq!(load_pgm(b"P5\nab 4\n255\n"), Err(PgmError::BadToken { offset: 3 }));
        assert_eq!(load_pgm(b"P5\n4x 4\n255\n"), Err(PgmError::BadToken { offset: 3 }));
    }

    #[test]
    fn rejects_ascii_sample_above_maxval() {
        assert_eq!(
            load_pgm(b"P2\n2 1\n15\n3 16\n"),
            Err(PgmError::SampleOutOfRange { offset: 12, value: 16, maxval: 15 })
        );
    }

    proptest! {
        #[test]
        fn round_trips_random_images(
            w in 1usize..24,
            h in 1usize..24,
            data in proptest::collection::vec(any::<u8>(), 0..600),
        ) {
            prop_assume!(data.len() >= w * h);
            let img = GrayImage::new(w, h, data[..w * h].to_vec()).unwrap();
            let bytes = save_pgm(&img);
            let back = load_pgm(&bytes).unwrap();
            prop_assert_eq!(&back, &img);
            // Re-encoding is byte-identical.
            prop_assert_eq!(save_pgm(&back), bytes);
        }
    }
}
