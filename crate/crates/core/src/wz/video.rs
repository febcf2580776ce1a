//! Raw / Y4M luma IO and a synthetic test sequence.

use std::fs;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::bands::FrameBuffer;
use crate::{Error, Result};

/// Concatenated 8-bit luma planes.
pub fn read_raw(path: &Path, width: usize, height: usize, frames: Option<usize>) -> Result<Vec<FrameBuffer>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let size = width * height;
    if size == 0 || bytes.len() % size != 0 {
        return Err(Error::Format {
            what: "raw video",
            detail: format!("{} bytes is not a whole number of {width}x{height} frames", bytes.len()),
        });
    }
    let available = bytes.len() / size;
    let count = frames.unwrap_or(available);
    if count > available {
        return Err(Error::Format {
            what: "raw video",
            detail: format!("requested {count} frames, file holds {available}"),
        });
    }
    bytes
        .chunks_exact(size)
        .take(count)
        .map(|c| FrameBuffer::new(width, height, c.to_vec()))
        .collect()
}

pub fn write_raw(path: &Path, frames: &[FrameBuffer]) -> Result<()> {
    let mut out = Vec::with_capacity(frames.iter().map(|f| f.data().len()).sum());
    for f in frames {
        out.extend_from_slice(f.data());
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Bytes of chroma following each luma plane for a Y4M colour space tag.
fn chroma_bytes(tag: &str, width: usize, height: usize) -> Option<usize> {
    let (cw, ch) = (width.div_ceil(2), height.div_ceil(2));
    match tag {
        "mono" => Some(0),
        t if t.starts_with("420") => Some(2 * cw * ch),
        "422" => Some(2 * cw * height),
        "444" => Some(2 * width * height),
        _ => None,
    }
}

/// Luma planes of a YUV4MPEG2 stream.
pub fn parse_y4m(bytes: &[u8]) -> Result<Vec<FrameBuffer>> {
    let bad = |detail: String| Error::Format { what: "Y4M", detail };
    let header_end = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| bad("missing header line".into()))?;
    let header = std::str::from_utf8(&bytes[..header_end]).map_err(|e| bad(e.to_string()))?;
    let mut tokens = header.split(' ');
    if tokens.next() != Some("YUV4MPEG2") {
        return Err(bad("missing YUV4MPEG2 signature".into()));
    }
    let (mut width, mut height, mut colour) = (0usize, 0usize, "420jpeg".to_string());
    for t in tokens {
        let (tag, val) = t.split_at(t.len().min(1));
        match tag {
            "W" => width = val.parse().map_err(|_| bad(format!("bad width {val:?}")))?,
            "H" => height = val.parse().map_err(|_| bad(format!("bad height {val:?}")))?,
            "C" => colour = val.to_string(),
            _ => {}
        }
    }
    let chroma = chroma_bytes(&colour, width, height).ok_or_else(|| bad(format!("unsupported colour space {colour}")))?;
    let luma = width * height;
    let mut frames = Vec::new();
    let mut pos = header_end + 1;
    while pos < bytes.len() {
        let line_end = bytes[pos..]
            .iter()
            .position(|&b| b == b'\n')
            .map(|p| pos + p)
            .ok_or_else(|| bad("truncated frame header".into()))?;
        if !bytes[pos..line_end].starts_with(b"FRAME") {
            return Err(bad(format!("expected FRAME at byte {pos}")));
        }
        let start = line_end + 1;
        let end = start + luma + chroma;
        if end > bytes.len() {
            return Err(bad(format!("frame {} is truncated", frames.len())));
        }
        frames.push(FrameBuffer::new(width, height, bytes[start..start + luma].to_vec())?);
        pos = end;
    }
    Ok(frames)
}

pub fn read_y4m(path: &Path) -> Result<Vec<FrameBuffer>> {
    parse_y4m(&fs::read(path).map_err(|e| Error::io(path, e))?)
}

/// Writes 4:2:0 Y4M at 15 fps with neutral chroma.
pub fn write_y4m(path: &Path, frames: &[FrameBuffer]) -> Result<()> {
    let Some(first) = frames.first() else {
        return Err(Error::invalid("no frames to write"));
    };
    let (w, h) = (first.width(), first.height());
    let chroma = vec![128u8; chroma_bytes("420jpeg", w, h).expect("known tag")];
    let mut out = Vec::new();
    write!(out, "YUV4MPEG2 W{w} H{h} F15:1 Ip A1:1 C420jpeg\n").expect("writing to a Vec");
    for f in frames {
        if !f.same_size(first) {
            return Err(Error::invalid("frames differ in size"));
        }
        out.extend_from_slice(b"FRAME\n");
        out.extend_from_slice(f.data());
        out.extend_from_slice(&chroma);
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads `.y4m` by extension, raw otherwise (which needs the frame size).
pub fn read_video(path: &Path, width: Option<usize>, height: Option<usize>, frames: Option<usize>) -> Result<Vec<FrameBuffer>> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("y4m")) {
        let mut v = read_y4m(path)?;
        if let Some(n) = frames {
            if n > v.len() {
                return Err(Error::Format {
                    what: "Y4M",
                    detail: format!("requested {n} frames, file holds {}", v.len()),
                });
            }
            v.truncate(n);
        }
        Ok(v)
    } else {
        match (width, height) {
            (Some(w), Some(h)) => read_raw(path, w, h, frames),
            _ => Err(Error::invalid("raw video needs --width and --height")),
        }
    }
}

pub fn write_video(path: &Path, frames: &[FrameBuffer]) -> Result<()> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("y4m")) {
        write_y4m(path, frames)
    } else {
        write_raw(path, frames)
    }
}

/// Smooth moving content: a drifting textured background, a disc and a
/// bar on separate trajectories, plus mild sensor noise.
pub fn synthetic_sequence(width: usize, height: usize, frames: usize, seed: u64) -> Result<Vec<FrameBuffer>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    (0..frames)
        .map(|t| {
            let t = t as f64;
            let (cx, cy) = (0.25 * width as f64 + 2.0 * t, 0.4 * height as f64 + 1.0 * t);
            let radius = 0.12 * height as f64;
            let bar_x = 0.7 * width as f64 - 1.5 * t;
            let mut data = Vec::with_capacity(width * height);
            for y in 0..height {
                for x in 0..width {
                    let (xf, yf) = (x as f64, y as f64);
                    let u = xf - 0.8 * t;
                    let mut v = 70.0
                        + 50.0 * yf / height as f64
                        + 18.0 * (u / 9.0 + phase).sin() * (yf / 13.0).cos()
                        + 6.0 * (u / 3.7 + yf / 5.1).sin();
                    let d = ((xf - cx).powi(2) + (yf - cy).powi(2)).sqrt();
                    v += 70.0 * smoothstep(radius + 2.0, radius - 2.0, d);
                    let bar = smoothstep(6.0, 3.0, (xf - bar_x).abs()) * smoothstep(0.85, 0.8, yf / height as f64);
                    v = v * (1.0 - bar) + 40.0 * bar;
                    v += rng.random_range(-1.5..1.5);
                    data.push(v.round().clamp(0.0, 255.0) as u8);
                }
            }
            FrameBuffer::new(width, height, data)
        })
        .collect()
}

/// 1 at `d ≤ inner`, 0 at `d ≥ outer`, cubic in between.
fn smoothstep(outer: f64, inner: f64, d: f64) -> f64 {
    let x = ((outer - d) / (outer - inner)).clamp(0.0, 1.0);
    x * x * (3.0 - 2.0 * x)
}
