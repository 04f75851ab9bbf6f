//! Seeded synthetic corpora: vignetted tissue frames, bubble scenes with
//! exact ground truth, a bubble-coverage ladder, and study traces.
//!
//! The real capsule datasets cannot be redistributed, so every property that
//! needs image or trace input runs against these generators instead. All
//! generation is deterministic in the seed.

use std::f32::consts::TAU;
use std::fs;
use std::path::Path;

use agrb_core::controller::{StudyTrace, TraceFrame};
use agrb_core::frame::RgbImage;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, Result};

/// Ground-truth circle of a synthetic bubble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruthCircle {
    pub cx: f32,
    pub cy: f32,
    pub radius: f32,
}

/// One generated bubble scene and its exact geometry.
#[derive(Debug, Clone)]
pub struct BubbleScene {
    pub image: RgbImage,
    pub circles: Vec<TruthCircle>,
    /// Exact rasterized union coverage of the ground-truth discs.
    pub coverage: f64,
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(
        seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
            .wrapping_add(stream),
    )
}

/// Smooth random field as a sum of low-frequency cosine bumps, range about
/// [-amplitude, amplitude].
fn smooth_field(rng: &mut ChaCha8Rng, width: usize, height: usize, amplitude: f32) -> Vec<f32> {
    let mut field = vec![0f32; width * height];
    let waves = 6;
    for _ in 0..waves {
        let wavelength = rng.gen_range(48.0f32..160.0);
        let angle = rng.gen_range(0.0f32..TAU);
        let phase = rng.gen_range(0.0f32..TAU);
        let amp = amplitude * rng.gen_range(0.5f32..1.0) / waves as f32 * 2.0;
        let (fx, fy) = (angle.cos() / wavelength, angle.sin() / wavelength);
        for y in 0..height {
            for x in 0..width {
                field[y * width + x] += amp * (TAU * (fx * x as f32 + fy * y as f32) + phase).cos();
            }
        }
    }
    field
}

/// Endoscopy-like background: reddish tissue with smooth intensity blobs, a
/// strong circular vignette, and faint sensor noise.
pub fn tissue_image(seed: u64, index: u64, width: usize, height: usize) -> RgbImage {
    let mut rng = rng_for(seed, index);
    let base_r = rng.gen_range(168.0f32..196.0);
    let base_g = rng.gen_range(92.0f32..118.0);
    let base_b = rng.gen_range(76.0f32..100.0);
    let luma_field = smooth_field(&mut rng, width, height, 26.0);
    let chroma_field = smooth_field(&mut rng, width, height, 9.0);
    let vignette = rng.gen_range(0.55f32..0.7);
    let noise_amp = 2;

    let cx = width as f32 / 2.0;
    let cy = height as f32 / 2.0;
    let rmax2 = cx * cx + cy * cy;
    let mut data = Vec::with_capacity(width * height * 3);
    for y in 0..height {
        for x in 0..width {
            let d2 = (x as f32 - cx).powi(2) + (y as f32 - cy).powi(2);
            let shade = 1.0 - vignette * d2 / rmax2;
            let l = luma_field[y * width + x];
            let c = chroma_field[y * width + x];
            let mut noise = || rng.gen_range(-noise_amp..=noise_amp) as f32;
            let r = ((base_r + l + c) * shade + noise()).clamp(0.0, 255.0) as u8;
            let g = ((base_g + l * 0.8 - c) * shade + noise()).clamp(0.0, 255.0) as u8;
            let b = ((base_b + l * 0.7) * shade + noise()).clamp(0.0, 255.0) as u8;
            data.extend_from_slice(&[r, g, b]);
        }
    }
    RgbImage::new(width, height, data).expect("generator builds a consistent buffer")
}

/// Draws one bubble: a bright specular ring with a small highlight and a
/// slightly glassy interior.
fn render_bubble(image: &mut RgbImage, circle: TruthCircle) {
    let TruthCircle { cx, cy, radius: r } = circle;
    let ring_half_width = 1.6f32;
    let x0 = ((cx - r - 2.0).floor().max(0.0)) as usize;
    let x1 = ((cx + r + 2.0).ceil() as usize).min(image.width);
    let y0 = ((cy - r - 2.0).floor().max(0.0)) as usize;
    let y1 = ((cy + r + 2.0).ceil() as usize).min(image.height);
    // the highlight sits well inside the center-distance suppression zone
    // and fades smoothly so it does not read as a second circle
    let (hx, hy) = (cx - 0.13 * r, cy - 0.13 * r);
    let hr = (r * 0.16).max(1.2);
    for y in y0..y1 {
        for x in x0..x1 {
            let dx = x as f32 + 0.5 - cx;
            let dy = y as f32 + 0.5 - cy;
            let d = (dx * dx + dy * dy).sqrt();
            let i = (y * image.width + x) * 3;
            let blend = |v: u8, target: f32, w: f32| -> u8 {
                (v as f32 + (target - v as f32) * w.clamp(0.0, 1.0)).clamp(0.0, 255.0) as u8
            };
            if (d - r).abs() <= ring_half_width {
                // specular ring
                let w = 1.0 - (d - r).abs() / ring_half_width;
                let w = w * 0.95;
                image.data[i] = blend(image.data[i], 248.0, w);
                image.data[i + 1] = blend(image.data[i + 1], 242.0, w);
                image.data[i + 2] = blend(image.data[i + 2], 236.0, w);
            } else if d < r - ring_half_width {
                // glassy interior: mild darkening
                image.data[i] = blend(image.data[i], 70.0, 0.18);
                image.data[i + 1] = blend(image.data[i + 1], 45.0, 0.18);
                image.data[i + 2] = blend(image.data[i + 2], 45.0, 0.18);
                let hd = ((x as f32 + 0.5 - hx).powi(2) + (y as f32 + 0.5 - hy).powi(2)).sqrt();
                if hd <= hr {
                    let t = 1.0 - (hd / hr) * (hd / hr);
                    let w = t * t * 0.55;
                    image.data[i] = blend(image.data[i], 235.0, w);
                    image.data[i + 1] = blend(image.data[i + 1], 228.0, w);
                    image.data[i + 2] = blend(image.data[i + 2], 222.0, w);
                }
            }
        }
    }
}

fn union_coverage(circles: &[TruthCircle], width: usize, height: usize) -> f64 {
    let mut covered = vec![false; width * height];
    for c in circles {
        let r2 = c.radius * c.radius;
        let y0 = (c.cy - c.radius).floor().max(0.0) as usize;
        let y1 = ((c.cy + c.radius).ceil() as usize).min(height);
        for y in y0..y1 {
            let dy = y as f32 + 0.5 - c.cy;
            for x in ((c.cx - c.radius).floor().max(0.0) as usize)
                ..(((c.cx + c.radius).ceil() as usize).min(width))
            {
                let dx = x as f32 + 0.5 - c.cx;
                if dx * dx + dy * dy <= r2 {
                    covered[y * width + x] = true;
                }
            }
        }
    }
    covered.iter().filter(|&&m| m).count() as f64 / (width * height) as f64
}

/// Generates a bubble scene: separated bubbles on tissue, radii in the
/// detector's working range.
pub fn bubble_scene(seed: u64, index: u64, width: usize, height: usize) -> BubbleScene {
    let mut image = tissue_image(seed ^ 0xb0bb1e, index, width, height);
    let mut rng = rng_for(seed ^ 0xb0bb1e, index.wrapping_add(1 << 32));
    let count = rng.gen_range(3usize..=10);
    let mut circles: Vec<TruthCircle> = Vec::new();
    let mut attempts = 0;
    while circles.len() < count && attempts < 400 {
        attempts += 1;
        let radius = rng.gen_range(8.0f32..28.0);
        let cx = rng.gen_range(radius + 4.0..width as f32 - radius - 4.0);
        let cy = rng.gen_range(radius + 4.0..height as f32 - radius - 4.0);
        let separated = circles
            .iter()
            .all(|c| (c.cx - cx).hypot(c.cy - cy) >= c.radius + radius + 8.0);
        if separated {
            circles.push(TruthCircle { cx, cy, radius });
        }
    }
    for &c in &circles {
        render_bubble(&mut image, c);
    }
    let coverage = union_coverage(&circles, width, height);
    BubbleScene {
        image,
        circles,
        coverage,
    }
}

/// Generates one rung of the coverage ladder: bubbles are added to a fixed
/// tissue base until the union of their discs reaches the target fraction.
pub fn ladder_scene(
    seed: u64,
    level: u64,
    target: f64,
    width: usize,
    height: usize,
) -> BubbleScene {
    let mut image = tissue_image(seed ^ 0x1adde5, 0, width, height);
    let mut rng = rng_for(seed ^ 0x1adde5, level.wrapping_add(1 << 33));
    let mut circles: Vec<TruthCircle> = Vec::new();
    let mut coverage = 0.0;
    let mut attempts = 0;
    while coverage < target && attempts < 4000 {
        attempts += 1;
        let radius = rng.gen_range(10.0f32..30.0);
        let cx = rng.gen_range(radius..width as f32 - radius);
        let cy = rng.gen_range(radius..height as f32 - radius);
        // allow touching but not heavy stacking, so area accrues steadily
        let acceptable = circles
            .iter()
            .all(|c| (c.cx - cx).hypot(c.cy - cy) >= (c.radius + radius) * 0.75);
        if acceptable {
            circles.push(TruthCircle { cx, cy, radius });
            coverage = union_coverage(&circles, width, height);
        }
    }
    for &c in &circles {
        render_bubble(&mut image, c);
    }
    BubbleScene {
        image,
        circles,
        coverage,
    }
}

/// Parameters of the study-trace generator.
#[derive(Debug, Clone, Copy)]
pub struct TraceParams {
    pub frames: usize,
    /// Probability of entering a bubble episode at any clear frame.
    pub bubble_entry_prob: f64,
    /// Bubble episode length range, frames.
    pub bubble_len: (usize, usize),
    /// Number of pathology episodes.
    pub pathologies: usize,
    /// Pathology episode length range, frames (3 s at 2 fps is 6 frames).
    pub pathology_len: (usize, usize),
}

impl Default for TraceParams {
    fn default() -> Self {
        Self {
            frames: 600,
            bubble_entry_prob: 0.02,
            bubble_len: (8, 50),
            pathologies: 4,
            pathology_len: (6, 14),
        }
    }
}

/// Synthesizes a study: clear stretches with a high CR, bubble episodes with
/// a low CR, and pathology episodes spanning at least three seconds.
pub fn synthetic_trace(seed: u64, index: u64, params: &TraceParams) -> StudyTrace {
    let mut rng = rng_for(seed ^ 0x7ace, index);
    let mut frames = Vec::with_capacity(params.frames);
    let mut bubble_left = 0usize;
    for _ in 0..params.frames {
        if bubble_left == 0 && rng.gen_bool(params.bubble_entry_prob) {
            bubble_left = rng.gen_range(params.bubble_len.0..=params.bubble_len.1);
        }
        let (cr, view) = if bubble_left > 0 {
            bubble_left -= 1;
            let cr: f64 = (rng.gen_range(1.6f64..2.9) + rng.gen_range(-0.2f64..0.2)).max(1.2);
            (cr, "reduced")
        } else {
            let cr = rng.gen_range(4.3f64..7.2);
            (cr, "good")
        };
        frames.push(TraceFrame {
            cr,
            pathology: false,
            view_label: Some(view.to_string()),
        });
    }
    // pathology episodes at spread-out anchors
    for _ in 0..params.pathologies {
        let len = rng.gen_range(params.pathology_len.0..=params.pathology_len.1);
        if params.frames <= len {
            break;
        }
        let start = rng.gen_range(0..params.frames - len);
        for f in frames.iter_mut().skip(start).take(len) {
            f.pathology = true;
        }
    }
    StudyTrace { frames }
}

fn write_ppm(dir: &Path, name: &str, image: &RgbImage) -> Result<std::path::PathBuf> {
    let path = dir.join(name);
    crate::formats::store_ppm(&path, image)?;
    Ok(path)
}

/// Writes `count` mosaicked tissue frames as PGM plus the RGB originals as
/// PPM. Returns the PGM paths.
pub fn generate_tissue_corpus(
    dir: &Path,
    seed: u64,
    count: usize,
    width: usize,
    height: usize,
) -> Result<Vec<std::path::PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
    let mut paths = Vec::with_capacity(count);
    for i in 0..count {
        let rgb = tissue_image(seed, i as u64, width, height);
        let frame =
            agrb_core::frame::mosaic_rggb(&rgb).map_err(|e| CliError::Data(e.to_string()))?;
        write_ppm(dir, &format!("tissue_{i:04}.ppm"), &rgb)?;
        let path = dir.join(format!("tissue_{i:04}.pgm"));
        crate::formats::store_frame(&path, &frame, crate::formats::FrameFormat::Pgm8, true)?;
        paths.push(path);
    }
    Ok(paths)
}

/// Writes a bubble corpus with `manifest.csv` (per-image truth summary) and
/// `circles.csv` (per-circle truth rows).
pub fn generate_bubble_corpus(
    dir: &Path,
    seed: u64,
    count: usize,
    width: usize,
    height: usize,
) -> Result<Vec<(std::path::PathBuf, BubbleScene)>> {
    fs::create_dir_all(dir).map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
    let mut manifest = String::from("file,bubbles,coverage\n");
    let mut circles_csv = String::from("file,cx,cy,radius\n");
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let scene = bubble_scene(seed, i as u64, width, height);
        let name = format!("bubble_{i:04}.ppm");
        let path = write_ppm(dir, &name, &scene.image)?;
        manifest.push_str(&format!(
            "{name},{},{:.6}\n",
            scene.circles.len(),
            scene.coverage
        ));
        for c in &scene.circles {
            circles_csv.push_str(&format!("{name},{:.2},{:.2},{:.2}\n", c.cx, c.cy, c.radius));
        }
        out.push((path, scene));
    }
    fs::write(dir.join("manifest.csv"), manifest)
        .map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
    fs::write(dir.join("circles.csv"), circles_csv)
        .map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
    Ok(out)
}

/// Writes the 0..=60% coverage ladder and its manifest.
pub fn generate_ladder_corpus(
    dir: &Path,
    seed: u64,
    width: usize,
    height: usize,
) -> Result<Vec<(std::path::PathBuf, BubbleScene, f64)>> {
    fs::create_dir_all(dir).map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
    let mut manifest = String::from("file,target_coverage,true_coverage\n");
    let mut out = Vec::new();
    for level in 0..=6u64 {
        let target = level as f64 * 0.10;
        let scene = ladder_scene(seed, level, target, width, height);
        let name = format!("ladder_{:02}.ppm", level * 10);
        let path = write_ppm(dir, &name, &scene.image)?;
        manifest.push_str(&format!("{name},{target:.2},{:.6}\n", scene.coverage));
        out.push((path, scene, target));
    }
    fs::write(dir.join("manifest.csv"), manifest)
        .map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
    Ok(out)
}

/// Writes `count` synthetic study traces.
pub fn generate_trace_corpus(
    dir: &Path,
    seed: u64,
    count: usize,
    params: &TraceParams,
) -> Result<Vec<std::path::PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
    let mut paths = Vec::with_capacity(count);
    for i in 0..count {
        let trace = synthetic_trace(seed, i as u64, params);
        let path = dir.join(format!("trace_{i:04}.csv"));
        crate::trace::store_trace(&path, &trace)?;
        paths.push(path);
    }
    Ok(paths)
}
