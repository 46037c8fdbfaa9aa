//! Training sets on disk (one subdirectory of PGM files per class) and a
//! small synthetic eye-patch set.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{io_error, Error, Result};
use crate::model::LabeledImage;
use crate::pgm::{read_pgm, write_pgm, Image};

pub const SYNTHETIC_SIDE: usize = 16;
pub const SYNTHETIC_PER_CLASS: usize = 5;

/// Every `*.pgm` under `dir/<class>/`, classes and files in name order.
pub fn load_dir(dir: &Path) -> Result<Vec<LabeledImage>> {
    let mut classes: Vec<_> = std::fs::read_dir(dir)
        .map_err(io_error(dir))?
        .collect::<std::io::Result<Vec<_>>>()
        .map_err(io_error(dir))?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.is_dir())
        .collect();
    classes.sort();
    let mut out = Vec::new();
    for class in classes {
        let label = class.file_name().unwrap_or_default().to_string_lossy().into_owned();
        let mut files: Vec<_> = std::fs::read_dir(&class)
            .map_err(io_error(&class))?
            .collect::<std::io::Result<Vec<_>>>()
            .map_err(io_error(&class))?
            .into_iter()
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")))
            .collect();
        files.sort();
        for f in files {
            out.push(LabeledImage { label: label.clone(), image: read_pgm(&f)? });
        }
    }
    if out.is_empty() {
        return Err(Error::TooFewImages(0));
    }
    Ok(out)
}

/// Writes `samples` as `dir/<label>/<label>_<i>.pgm`.
pub fn write_dir(dir: &Path, samples: &[LabeledImage]) -> Result<()> {
    for (i, s) in samples.iter().enumerate() {
        let class = dir.join(&s.label);
        std::fs::create_dir_all(&class).map_err(io_error(&class))?;
        write_pgm(&class.join(format!("{}_{i:02}.pgm", s.label)), &s.image)?;
    }
    Ok(())
}

/// Ten 16×16 eye patches, five `open` and five `closed`, with integer
/// pixels so they survive a PGM round trip unchanged.
pub fn synthetic_eyes() -> Vec<LabeledImage> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_e1e5);
    let mut out = Vec::with_capacity(2 * SYNTHETIC_PER_CLASS);
    for label in ["closed", "open"] {
        for _ in 0..SYNTHETIC_PER_CLASS {
            let image = eye_patch(label == "open", &mut rng);
            out.push(LabeledImage { label: label.to_string(), image });
        }
    }
    out
}

fn eye_patch(open: bool, rng: &mut impl Rng) -> Image {
    let n = SYNTHETIC_SIDE;
    let skin: f64 = rng.gen_range(150.0..190.0);
    let cx = 7.5 + rng.gen_range(-1.0..1.0);
    let cy = 7.5 + rng.gen_range(-0.8..0.8);
    let iris = rng.gen_range(2.2..3.2);
    let lid = rng.gen_range(0.6..1.4);
    let mut pixels = Vec::with_capacity(n * n);
    for y in 0..n {
        for x in 0..n {
            let (dx, dy) = (x as f64 - cx, y as f64 - cy);
            let mut v = skin;
            if open {
                let eye = (dx / 6.0).powi(2) + (dy / 3.5).powi(2);
                if eye <= 1.0 {
                    v = 235.0;
                }
                let r = dx.hypot(dy);
                if r <= iris {
                    v = 70.0;
                }
                if r <= 0.45 * iris {
                    v = 15.0;
                }
            } else {
                // A dark lid crease bending slightly downwards.
                let crease = cy + 0.04 * dx * dx;
                if dx.abs() <= 6.0 && (y as f64 - crease).abs() <= lid {
                    v = 45.0;
                }
            }
            v += rng.gen_range(-6.0..6.0);
            pixels.push(v.round().clamp(0.0, 255.0));
        }
    }
    Image::new(n, n, pixels).expect("valid synthetic image")
}
