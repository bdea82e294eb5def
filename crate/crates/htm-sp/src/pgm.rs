//! Binary PGM (P5, 8-bit) reading and writing.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::encoder::GrayFrame;
use crate::error::{Error, Result};

pub fn read_pgm(path: impl AsRef<Path>) -> Result<GrayFrame> {
    let path = path.as_ref();
    let mut reader = BufReader::new(File::open(path).map_err(|e| Error::io(path, e))?);
    let mut data = Vec::new();
    reader
        .read_to_end(&mut data)
        .map_err(|e| Error::io(path, e))?;
    parse_pgm(&data).map_err(|e| Error::format(format!("{}: {e}", path.display())))
}

pub fn write_pgm(frame: &GrayFrame, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut writer = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    write_pgm_to(frame, &mut writer).map_err(|e| Error::io(path, e))
}

fn write_pgm_to<W: Write>(frame: &GrayFrame, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "P5")?;
    writeln!(w, "{} {}", frame.width(), frame.height())?;
    writeln!(w, "255")?;
    w.write_all(frame.pixels())?;
    w.flush()
}

/// Parses a binary PGM. Header tokens may be separated by any whitespace and
/// interleaved with `#` comments; a single whitespace byte separates the
/// maxval from the raster.
fn parse_pgm(data: &[u8]) -> std::result::Result<GrayFrame, String> {
    if data.len() < 2 || &data[..2] != b"P5" {
        return Err("missing P5 magic number".into());
    }
    let mut pos = 2;
    let mut tokens = [0usize; 3];
    for slot in &mut tokens {
        // skip whitespace and comments
        loop {
            while pos < data.len() && data[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < data.len() && data[pos] == b'#' {
                while pos < data.len() && data[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < data.len() && data[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err("truncated header".into());
        }
        let text = std::str::from_utf8(&data[start..pos]).expect("digits are ascii");
        *slot = text.parse().map_err(|e| format!("bad header value: {e}"))?;
    }
    let [width, height, maxval] = tokens;
    if maxval != 255 {
        return Err(format!("unsupported maxval {maxval}, expected 255"));
    }
    if pos >= data.len() || !data[pos].is_ascii_whitespace() {
        return Err("missing whitespace before raster".into());
    }
    pos += 1;
    let expected = width * height;
    let raster = &data[pos..];
    if raster.len() != expected {
        return Err(format!(
            "raster holds {} bytes, expected {width}x{height} = {expected}",
            raster.len()
        ));
    }
    GrayFrame::new(width, height, raster.to_vec()).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_preserves_pixels() {
        let pixels: Vec<u8> = (0..12 * 7).map(|i| (i * 13 % 256) as u8).collect();
        let frame = GrayFrame::new(12, 7, pixels).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("frame.pgm");
        write_pgm(&frame, &path).unwrap();
        assert_eq!(read_pgm(&path).unwrap(), frame);
    }

    #[test]
    fn comments_in_header_are_skipped() {
        let data = b"P5\n# made by hand\n3 2\n# another comment\n255\n\x00\x01\x02\x03\x04\x05";
        let frame = parse_pgm(data).unwrap();
        assert_eq!((frame.width(), frame.height()), (3, 2));
        assert_eq!(frame.pixels(), &[0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn bad_magic_and_short_raster_are_rejected() {
        assert!(parse_pgm(b"P6\n1 1\n255\n\x00").is_err());
        assert!(parse_pgm(b"P5\n2 2\n255\n\x00\x01").is_err());
        assert!(parse_pgm(b"P5\n1 1\n65535\n\x00\x00").is_err());
    }

    #[test]
    fn missing_file_reports_the_path() {
        let err = read_pgm("/no/such/frame.pgm").unwrap_err();
        assert!(err.to_string().contains("/no/such/frame.pgm"));
    }
}
