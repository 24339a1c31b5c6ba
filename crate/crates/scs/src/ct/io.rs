//! File formats for images and projection data.
//!
//! Images travel either as 16-bit binary PGM plus a text sidecar recording
//! the original float range (display-friendly, quantized) or as raw CSV
//! (lossless). Sinograms go to CSV with one `view,det,value` row per ray.
//! Floats are written in shortest round-trip form, so CSV files are exact
//! and reruns produce byte-identical output.

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use super::{Image, Sinogram};

const PGM_MAX: f64 = 65535.0;

/// Sidecar location for a PGM file: the same name with `.txt` appended.
pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".txt");
    std::path::PathBuf::from(name)
}

/// PGM bytes (P5, 16-bit big-endian samples, rescaled to the image's own
/// range) and the sidecar text recording that range, for callers that
/// handle file placement themselves.
pub fn pgm_parts(img: &Image) -> (Vec<u8>, String) {
    let n = img.n();
    let lo = img.as_slice().iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = img.as_slice().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut out = Vec::with_capacity(32 + 2 * n * n);
    let _ = write!(out, "P5\n{n} {n}\n65535\n");
    for &v in img.as_slice() {
        let q = (((v - lo) / span) * PGM_MAX).round().clamp(0.0, PGM_MAX) as u16;
        out.extend_from_slice(&q.to_be_bytes());
    }
    (out, format!("n = {n}\nmin = {lo}\nmax = {hi}\n"))
}

/// Write a 16-bit PGM and a sidecar `<file>.txt` with the original float
/// range so the values can be recovered up to quantization.
pub fn write_pgm(path: &Path, img: &Image) -> io::Result<()> {
    let (pgm, sidecar) = pgm_parts(img);
    fs::write(path, pgm)?;
    fs::write(sidecar_path(path), sidecar)
}

fn bad_data(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

/// Read back a PGM written by [`write_pgm`], using the sidecar to undo the
/// range scaling.
pub fn read_pgm(path: &Path) -> io::Result<Image> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    // Header: magic, width, height, maxval, single whitespace, then samples.
    let mut pos = 0;
    let mut token = || -> io::Result<String> {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad_data("truncated PGM header"));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    if token()? != "P5" {
        return Err(bad_data("not a binary PGM file"));
    }
    let w: usize = token()?.parse().map_err(|_| bad_data("bad PGM width"))?;
    let h: usize = token()?.parse().map_err(|_| bad_data("bad PGM height"))?;
    let maxval: u32 = token()?.parse().map_err(|_| bad_data("bad PGM maxval"))?;
    if w != h {
        return Err(bad_data("expected a square image"));
    }
    if maxval != 65535 {
        return Err(bad_data("expected 16-bit samples"));
    }
    let data_start = pos + 1; // single whitespace after maxval
    let need = 2 * w * h;
    if bytes.len() < data_start + need {
        return Err(bad_data("truncated PGM samples"));
    }

    let sidecar = fs::read_to_string(sidecar_path(path))?;
    let mut lo = f64::NAN;
    let mut hi = f64::NAN;
    for line in sidecar.lines() {
        if let Some((key, value)) = line.split_once('=') {
            match key.trim() {
                "min" => lo = value.trim().parse().map_err(|_| bad_data("bad sidecar min"))?,
                "max" => hi = value.trim().parse().map_err(|_| bad_data("bad sidecar max"))?,
                _ => {}
            }
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(bad_data("sidecar missing min/max"));
    }
    let span = if hi > lo { hi - lo } else { 0.0 };
    let data = bytes[data_start..data_start + need]
        .chunks_exact(2)
        .map(|p| {
            let q = u16::from_be_bytes([p[0], p[1]]) as f64;
            lo + (q / PGM_MAX) * span
        })
        .collect();
    Ok(Image::from_vec(w, data))
}

/// Lossless image dump: one CSV row per image row, no header.
pub fn write_image_csv(path: &Path, img: &Image) -> io::Result<()> {
    let n = img.n();
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for row in img.as_slice().chunks(n) {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()
}

pub fn read_image_csv(path: &Path) -> io::Result<Image> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_path(path)?;
    let mut data = Vec::new();
    let mut n = 0;
    for record in r.records() {
        let record = record.map_err(|e| bad_data(e.to_string()))?;
        if n == 0 {
            n = record.len();
        } else if record.len() != n {
            return Err(bad_data("ragged image CSV"));
        }
        for field in record.iter() {
            data.push(field.parse::<f64>().map_err(|_| bad_data("bad float in image CSV"))?);
        }
    }
    if data.len() != n * n {
        return Err(bad_data("image CSV is not square"));
    }
    Ok(Image::from_vec(n, data))
}

/// Projection data as `view,det,value` rows in view-major order.
pub fn write_sinogram_csv(path: &Path, sino: &Sinogram) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["view", "det", "value"])?;
    for view in 0..sino.n_views() {
        for det in 0..sino.n_det() {
            w.write_record([view.to_string(), det.to_string(), sino.get(view, det).to_string()])?;
        }
    }
    w.flush()
}

pub fn read_sinogram_csv(path: &Path) -> io::Result<Sinogram> {
    let mut r = csv::Reader::from_path(path)?;
    let mut rows: Vec<(usize, usize, f64)> = Vec::new();
    for record in r.records() {
        let record = record.map_err(|e| bad_data(e.to_string()))?;
        if record.len() != 3 {
            return Err(bad_data("expected view,det,value rows"));
        }
        let view = record[0].parse().map_err(|_| bad_data("bad view index"))?;
        let det = record[1].parse().map_err(|_| bad_data("bad detector index"))?;
        let value = record[2].parse().map_err(|_| bad_data("bad sinogram value"))?;
        rows.push((view, det, value));
    }
    let n_views = rows.iter().map(|r| r.0).max().map_or(0, |m| m + 1);
    let n_det = rows.iter().map(|r| r.1).max().map_or(0, |m| m + 1);
    if rows.len() != n_views * n_det {
        return Err(bad_data("incomplete sinogram CSV"));
    }
    let mut sino = Sinogram::new(n_views, n_det);
    for (view, det, value) in rows {
        sino.as_mut_slice()[view * n_det + det] = value;
    }
    Ok(sino)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use tempfile::tempdir;

    fn random_image(n: usize, seed: u64) -> Image {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Image::from_vec(n, (0..n * n).map(|_| rng.random_range(-0.2..1.3)).collect())
    }

    #[test]
    fn pgm_round_trip_is_exact_up_to_quantization() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("img.pgm");
        let img = random_image(9, 31);
        write_pgm(&path, &img).unwrap();
        let back = read_pgm(&path).unwrap();
        assert_eq!(back.n(), 9);
        let lo = img.as_slice().iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = img.as_slice().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let step = (hi - lo) / 65535.0;
        for (a, b) in img.as_slice().iter().zip(back.as_slice()) {
            assert!((a - b).abs() <= 0.5 * step + 1e-12);
        }
    }

    #[test]
    fn constant_image_survives_the_degenerate_range() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("flat.pgm");
        let img = Image::from_vec(4, vec![0.25; 16]);
        write_pgm(&path, &img).unwrap();
        let back = read_pgm(&path).unwrap();
        for &v in back.as_slice() {
            assert_eq!(v, 0.25);
        }
    }

    #[test]
    fn image_csv_round_trip_is_lossless() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("img.csv");
        let img = random_image(7, 5);
        write_image_csv(&path, &img).unwrap();
        let back = read_image_csv(&path).unwrap();
        assert_eq!(img.as_slice(), back.as_slice());
    }

    #[test]
    fn sinogram_csv_round_trip_is_lossless() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("sino.csv");
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let sino =
            Sinogram::from_vec(3, 5, (0..15).map(|_| rng.random_range(-2.0..2.0)).collect());
        write_sinogram_csv(&path, &sino).unwrap();
        let back = read_sinogram_csv(&path).unwrap();
        assert_eq!(back.n_views(), 3);
        assert_eq!(back.n_det(), 5);
        assert_eq!(sino.as_slice(), back.as_slice());
    }

    #[test]
    fn unreadable_files_are_reported() {
        let dir = tempdir().unwrap();
        let missing = dir.path().join("nope.pgm");
        assert!(read_pgm(&missing).is_err());
        let bad = dir.path().join("bad.csv");
        fs::write(&bad, "1,2\n3\n").unwrap();
        assert!(read_image_csv(&bad).is_err());
    }
}
