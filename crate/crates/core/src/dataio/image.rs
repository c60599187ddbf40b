//! 8-bit RGB images <-> pure quaternion matrices (`R i + G j + B k`).

use std::fs;
use std::io::Cursor;
use std::path::Path;

use crate::error::{Error, Result};
use crate::qcore::QMatrix;

/// Interleaved 8-bit RGB pixels, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl RgbImage {
    /// R → i plane, G → j plane, B → k plane; the real plane stays zero.
    /// Values are kept on the 0..255 scale.
    pub fn to_qmatrix(&self) -> QMatrix {
        let n = self.width * self.height;
        let mut planes: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; n]);
        for (k, px) in self.data.chunks_exact(3).enumerate() {
            planes[1][k] = f64::from(px[0]);
            planes[2][k] = f64::from(px[1]);
            planes[3][k] = f64::from(px[2]);
        }
        QMatrix::from_planes(self.height, self.width, planes).expect("plane sizes match")
    }

    /// Drops the real plane, rounds to nearest and clamps each channel to [0, 255].
    pub fn from_qmatrix(m: &QMatrix) -> Self {
        let (rows, cols) = m.dims();
        let mut data = Vec::with_capacity(rows * cols * 3);
        for k in 0..rows * cols {
            for c in 1..4 {
                data.push(to_byte(m.plane(c)[k]));
            }
        }
        RgbImage {
            width: cols,
            height: rows,
            data,
        }
    }
}

fn to_byte(x: f64) -> u8 {
    if x.is_nan() {
        0
    } else {
        x.round().clamp(0.0, 255.0) as u8
    }
}

fn image_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Image {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

fn is_png(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("png"))
}

/// Parses a binary PPM (P6) with maxval 255.
pub fn decode_ppm(bytes: &[u8]) -> std::result::Result<RgbImage, String> {
    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
            pos += 1;
        }
        if start == pos {
            return Err("truncated PPM header".into());
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    if fields[0] != "P6" {
        return Err(format!("unsupported PPM magic {:?}, expected P6", fields[0]));
    }
    let parse = |s: &str, what: &str| {
        s.parse::<usize>()
            .map_err(|_| format!("bad PPM {what} {s:?}"))
    };
    let width = parse(&fields[1], "width")?;
    let height = parse(&fields[2], "height")?;
    let maxval = parse(&fields[3], "maxval")?;
    if maxval != 255 {
        return Err(format!("PPM maxval {maxval} is not 8-bit (255)"));
    }
    // exactly one whitespace byte separates the header from the raster
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err("truncated PPM header".into());
    }
    pos += 1;
    let len = width * height * 3;
    if bytes.len() < pos + len {
        return Err(format!(
            "PPM raster has {} bytes, {len} expected",
            bytes.len() - pos
        ));
    }
    Ok(RgbImage {
        width,
        height,
        data: bytes[pos..pos + len].to_vec(),
    })
}

pub fn encode_ppm(img: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.data);
    out
}

fn decode_png(bytes: Vec<u8>) -> std::result::Result<RgbImage, String> {
    let decoder = png::Decoder::new(Cursor::new(bytes));
    let mut reader = decoder.read_info().map_err(|e| e.to_string())?;
    let (color, depth) = reader.output_color_type();
    if color != png::ColorType::Rgb || depth != png::BitDepth::Eight {
        return Err(format!(
            "expected 8-bit RGB, found {color:?} at {depth:?}"
        ));
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| "PNG too large".to_string())?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf).map_err(|e| e.to_string())?;
    let (width, height) = (info.width as usize, info.height as usize);
    let stride = info.line_size;
    let mut data = Vec::with_capacity(width * height * 3);
    for row in buf.chunks(stride).take(height) {
        data.extend_from_slice(&row[..width * 3]);
    }
    Ok(RgbImage {
        width,
        height,
        data,
    })
}

fn encode_png(img: &RgbImage) -> std::result::Result<Vec<u8>, String> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, img.width as u32, img.height as u32);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc.write_header().map_err(|e| e.to_string())?;
        writer.write_image_data(&img.data).map_err(|e| e.to_string())?;
    }
    Ok(out)
}

/// Reads a PNG (by extension) or binary PPM file.
pub fn read_rgb(path: &Path) -> Result<RgbImage> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let decoded = if is_png(path) || bytes.starts_with(b"\x89PNG") {
        decode_png(bytes)
    } else {
        decode_ppm(&bytes)
    };
    decoded.map_err(|m| image_err(path, m))
}

pub fn write_rgb(path: &Path, img: &RgbImage) -> Result<()> {
    let bytes = if is_png(path) {
        encode_png(img).map_err(|m| image_err(path, m))?
    } else {
        encode_ppm(img)
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Loads a color image as a pure quaternion matrix.
pub fn load_image(path: impl AsRef<Path>) -> Result<QMatrix> {
    Ok(read_rgb(path.as_ref())?.to_qmatrix())
}

/// Writes the imaginary planes of `m` as an RGB image (PNG for `.png`,
/// binary PPM otherwise).
pub fn save_image(path: impl AsRef<Path>, m: &QMatrix) -> Result<()> {
    write_rgb(path.as_ref(), &RgbImage::from_qmatrix(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::Quaternion as Q;

    #[test]
    fn single_pixels() {
        let red = RgbImage { width: 1, height: 1, data: vec![255, 0, 0] };
        assert_eq!(red.to_qmatrix().get(0, 0), Q::I.scale(255.0));
        let black = RgbImage { width: 1, height: 1, data: vec![0, 0, 0] };
        assert!(black.to_qmatrix().is_zero());
    }

    #[test]
    fn ppm_fixture_bytes() {
        let raster: Vec<u8> = (0u8..12).map(|b| b * 20 + 3).collect();
        let mut file = b"P6\n# fixture\n2 2\n255\n".to_vec();
        file.extend_from_slice(&raster);
        let img = decode_ppm(&file).unwrap();
        let m = img.to_qmatrix();
        assert!(m.is_pure());
        assert_eq!(m.dims(), (2, 2));
        for (k, px) in raster.chunks(3).enumerate() {
            let q = m.get(k / 2, k % 2);
            assert_eq!([q.w1, q.w2, q.w3], [px[0] as f64, px[1] as f64, px[2] as f64]);
        }
        assert_eq!(decode_ppm(&encode_ppm(&img)).unwrap(), img);
    }

    #[test]
    fn ppm_rejections() {
        assert!(decode_ppm(b"P3\n1 1\n255\n0 0 0").is_err());
        assert!(decode_ppm(b"P6\n1 1\n65535\n\0\0\0\0\0\0").is_err());
        assert!(decode_ppm(b"P6\n2 2\n255\n\0\0\0").is_err());
        assert!(decode_ppm(b"P6\n2").is_err());
    }

    #[test]
    fn export_rounds_and_clamps() {
        let m = QMatrix::from_fn(1, 2, |_, j| {
            if j == 0 {
                Q::new(7.0, -3.0, 254.6, 300.0)
            } else {
                Q::pure(10.49, f64::NAN, 0.5)
            }
        });
        let img = RgbImage::from_qmatrix(&m);
        assert_eq!(img.data, vec![0, 255, 255, 10, 0, 1]);
    }

    #[test]
    fn png_round_trip_and_depth_check() {
        let dir = tempfile::tempdir().unwrap();
        let img = RgbImage { width: 3, height: 2, data: (0u8..18).map(|b| b * 13).collect() };
        let path = dir.path().join("x.png");
        write_rgb(&path, &img).unwrap();
        assert_eq!(read_rgb(&path).unwrap(), img);

        let gray = dir.path().join("g.png");
        {
            let f = std::fs::File::create(&gray).unwrap();
            let mut enc = png::Encoder::new(f, 2, 2);
            enc.set_color(png::ColorType::Grayscale);
            enc.set_depth(png::BitDepth::Eight);
            enc.write_header().unwrap().write_image_data(&[0, 1, 2, 3]).unwrap();
        }
        assert!(matches!(load_image(&gray), Err(Error::Image { .. })));
        assert!(matches!(load_image(dir.path().join("missing.ppm")), Err(Error::Io { .. })));
    }
}
