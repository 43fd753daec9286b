//! Binary PGM (`P5`, maxval 255) encoding.

use super::GrayImage;
use crate::error::{Error, Result};

pub fn write_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

pub fn read_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut cursor = Header { bytes, pos: 0 };
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(Error::MalformedHeader("missing P5 magic".into()));
    }
    cursor.pos = 2;
    let width = cursor.number("width")?;
    let height = cursor.number("height")?;
    let maxval = cursor.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::MalformedHeader("zero image dimension".into()));
    }
    if maxval != 255 {
        return Err(Error::UnsupportedMaxval(maxval));
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(cursor.pos) {
        Some(b) if b.is_ascii_whitespace() => cursor.pos += 1,
        _ => return Err(Error::MalformedHeader("no whitespace after maxval".into())),
    }
    let expected = (width as usize)
        .checked_mul(height as usize)
        .ok_or_else(|| Error::MalformedHeader("image too large".into()))?;
    let payload = &bytes[cursor.pos..];
    if payload.len() < expected {
        return Err(Error::TruncatedPayload { expected, found: payload.len() });
    }
    GrayImage::new(width as usize, height as usize, payload[..expected].to_vec())
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn skip_separators(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, field: &str) -> Result<u32> {
        let start = self.pos;
        self.skip_separators();
        if self.pos == start {
            return Err(Error::MalformedHeader(format!("expected whitespace before {field}")));
        }
        let digits_start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return Err(Error::MalformedHeader(format!("missing {field}")));
        }
        std::str::from_utf8(&self.bytes[digits_start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MalformedHeader(format!("{field} out of range")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_images_round_trip() {
        let one = GrayImage::new(1, 1, vec![0]).unwrap();
        assert_eq!(read_pgm(&write_pgm(&one)).unwrap(), one);
        let four = GrayImage::new(2, 2, vec![0, 85, 170, 255]).unwrap();
        let bytes = write_pgm(&four);
        assert_eq!(&bytes[..11], b"P5\n2 2\n255\n");
        assert_eq!(read_pgm(&bytes).unwrap(), four);
    }

    #[test]
    fn header_comments_and_spacing() {
        let bytes = b"P5 # made by hand\n3   1\n# maxval next\n255\n\x01\x02\x03";
        let img = read_pgm(bytes).unwrap();
        assert_eq!((img.width(), img.height()), (3, 1));
        assert_eq!(img.pixels(), &[1, 2, 3]);
    }

    #[test]
    fn wide_maxval_is_unsupported() {
        assert_eq!(read_pgm(b"P5\n1 1\n65535\n\x00\x00"), Err(Error::UnsupportedMaxval(65535)));
    }

    #[test]
    fn malformed_and_truncated() {
        assert!(matches!(read_pgm(b"P2\n1 1\n255\n0"), Err(Error::MalformedHeader(_))));
        assert!(matches!(read_pgm(b"P5\n1\n"), Err(Error::MalformedHeader(_))));
        assert!(matches!(read_pgm(b"P5\n0 4\n255\n"), Err(Error::MalformedHeader(_))));
        assert!(matches!(read_pgm(b"P5\n2 x\n255\n"), Err(Error::MalformedHeader(_))));
        assert!(matches!(read_pgm(b"P5\n1 1\n255"), Err(Error::MalformedHeader(_))));
        assert_eq!(
            read_pgm(b"P5\n2 2\n255\n\x00\x01\x02"),
            Err(Error::TruncatedPayload { expected: 4, found: 3 })
        );
    }

    #[test]
    fn payload_may_start_with_whitespace_byte() {
        let img = GrayImage::new(2, 1, vec![b' ', b'\n']).unwrap();
        assert_eq!(read_pgm(&write_pgm(&img)).unwrap(), img);
    }
}
