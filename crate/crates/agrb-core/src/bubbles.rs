//! Bubble detection and view-coverage measurement.
//!
//! Pipeline: 8-bit grayscale, 5x5 median blur, Canny edge detection, then a
//! two-stage gradient Hough circle transform. Centers collect votes along
//! each edge pixel's gradient line (both polarities) over the admissible
//! radius range; accepted centers get their radius from an edge-support
//! histogram. Coverage is the area of the union of detected discs clipped to
//! the image.

use alloc::vec;
use alloc::vec::Vec;

use crate::frame::{PlaneSet, RgbImage};

/// Detector parameters tuned for capsule-endoscopy bubbles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoughParams {
    pub radius_min: u32,
    pub radius_max: u32,
    /// Minimum distance between accepted centers, pixels.
    pub min_center_distance: f32,
    /// High Canny threshold; the low one is fixed at half of it.
    pub canny_high: i32,
    /// Votes an accumulator cell needs to seed a circle.
    pub accumulator_threshold: f32,
    /// Inverse ratio of accumulator resolution to image resolution; values
    /// below 1 make the accumulator finer than the image.
    pub inverse_accumulator_ratio: f32,
}

impl Default for HoughParams {
    fn default() -> Self {
        Self {
            radius_min: 3,
            radius_max: 30,
            min_center_distance: 10.0,
            canny_high: 100,
            accumulator_threshold: 23.0,
            inverse_accumulator_ratio: 0.9,
        }
    }
}

/// 8-bit single-channel image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Self {
        assert_eq!(data.len(), width * height);
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> u8 {
        self.data[row * self.width + col]
    }

    #[inline]
    fn at_clamped(&self, row: isize, col: isize) -> u8 {
        let r = row.clamp(0, self.height as isize - 1) as usize;
        let c = col.clamp(0, self.width as isize - 1) as usize;
        self.data[r * self.width + c]
    }
}

/// Integer BT.601-style luma: (77 R + 150 G + 29 B + 128) >> 8.
pub fn to_grayscale(rgb: &RgbImage) -> GrayImage {
    let mut data = Vec::with_capacity(rgb.width * rgb.height);
    for px in rgb.data.chunks_exact(3) {
        let y = (77 * px[0] as u32 + 150 * px[1] as u32 + 29 * px[2] as u32 + 128) >> 8;
        data.push(y as u8);
    }
    GrayImage::new(rgb.width, rgb.height, data)
}

/// Grayscale view of a Bayer frame: the luminance plane passed through.
pub fn luma_grayscale(planes: &PlaneSet) -> GrayImage {
    let data = planes
        .y
        .data
        .iter()
        .map(|&v| v.clamp(0, 255) as u8)
        .collect();
    GrayImage::new(planes.y.width, planes.y.height, data)
}

/// 5x5 median filter with edge replication.
pub fn median_blur_5x5(src: &GrayImage) -> GrayImage {
    let mut out = vec![0u8; src.width * src.height];
    let mut hist = [0u16; 256];
    for y in 0..src.height {
        for x in 0..src.width {
            hist.fill(0);
            for dy in -2isize..=2 {
                for dx in -2isize..=2 {
                    hist[src.at_clamped(y as isize + dy, x as isize + dx) as usize] += 1;
                }
            }
            // 13th of 25
            let mut seen = 0u16;
            for (value, &count) in hist.iter().enumerate() {
                seen += count;
                if seen >= 13 {
                    out[y * src.width + x] = value as u8;
                    break;
                }
            }
        }
    }
    GrayImage {
        width: src.width,
        height: src.height,
        data: out,
    }
}

/// Sobel gradients plus the thinned binary edge mask.
#[derive(Debug, Clone)]
pub struct EdgeMap {
    pub width: usize,
    pub height: usize,
    pub mask: Vec<bool>,
    pub gx: Vec<i32>,
    pub gy: Vec<i32>,
}

impl EdgeMap {
    pub fn edge_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }
}

/// Canny detector: 3x3 Sobel, sector-quantized non-maximum suppression, and
/// two-threshold hysteresis with low = high / 2. Magnitudes are compared in
/// the squared domain so the edge path stays in integer arithmetic.
pub fn canny_edges(gray: &GrayImage, high_threshold: i32) -> EdgeMap {
    let (w, h) = (gray.width, gray.height);
    let mut gx = vec![0i32; w * h];
    let mut gy = vec![0i32; w * h];
    let mut mag2 = vec![0i64; w * h];
    for y in 0..h {
        for x in 0..w {
            let p = |dy: isize, dx: isize| gray.at_clamped(y as isize + dy, x as isize + dx) as i32;
            let sx = (p(-1, 1) + 2 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2 * p(0, -1) + p(1, -1));
            let sy = (p(1, -1) + 2 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2 * p(-1, 0) + p(-1, 1));
            gx[y * w + x] = sx;
            gy[y * w + x] = sy;
            mag2[y * w + x] = (sx as i64) * (sx as i64) + (sy as i64) * (sy as i64);
        }
    }

    // tan(22.5 deg) in Q12; sector tests stay integral
    const TAN_22_5_Q12: i64 = 1697;
    let low2 = {
        let low = high_threshold / 2;
        (low as i64) * (low as i64)
    };
    let high2 = (high_threshold as i64) * (high_threshold as i64);

    let mut thinned = vec![0i64; w * h];
    for y in 0..h {
        for x in 0..w {
            let m = mag2[y * w + x];
            if m < low2 {
                continue;
            }
            let ax = (gx[y * w + x] as i64).abs();
            let ay = (gy[y * w + x] as i64).abs();
            let neighbor = |dy: isize, dx: isize| -> i64 {
                let ny = y as isize + dy;
                let nx = x as isize + dx;
                if ny < 0 || nx < 0 || ny >= h as isize || nx >= w as isize {
                    0
                } else {
                    mag2[ny as usize * w + nx as usize]
                }
            };
            // pick the two neighbors along the gradient direction
            let (n_prev, n_next) = if ay * 4096 <= ax * TAN_22_5_Q12 {
                (neighbor(0, -1), neighbor(0, 1))
            } else if ax * 4096 <= ay * TAN_22_5_Q12 {
                (neighbor(-1, 0), neighbor(1, 0))
            } else if (gx[y * w + x] >= 0) == (gy[y * w + x] >= 0) {
                (neighbor(-1, -1), neighbor(1, 1))
            } else {
                (neighbor(-1, 1), neighbor(1, -1))
            };
            // strict on the earlier neighbor so plateau edges thin to one pixel
            if m > n_prev && m >= n_next {
                thinned[y * w + x] = m;
            }
        }
    }

    // hysteresis: flood from strong seeds across weak neighbors
    let mut mask = vec![false; w * h];
    let mut stack = Vec::new();
    for i in 0..w * h {
        if thinned[i] >= high2 && !mask[i] {
            mask[i] = true;
            stack.push(i);
            while let Some(j) = stack.pop() {
                let (jy, jx) = (j / w, j % w);
                for dy in -1isize..=1 {
                    for dx in -1isize..=1 {
                        let ny = jy as isize + dy;
                        let nx = jx as isize + dx;
                        if ny < 0 || nx < 0 || ny >= h as isize || nx >= w as isize {
                            continue;
                        }
                        let n = ny as usize * w + nx as usize;
                        if !mask[n] && thinned[n] >= low2 {
                            mask[n] = true;
                            stack.push(n);
                        }
                    }
                }
            }
        }
    }

    EdgeMap {
        width: w,
        height: h,
        mask,
        gx,
        gy,
    }
}

/// One detected circle with its accumulator score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub cx: f32,
    pub cy: f32,
    pub radius: f32,
    pub score: f32,
}

/// Detected circles; pairwise center distance respects the configured
/// minimum.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CircleSet {
    pub circles: Vec<Circle>,
}

impl CircleSet {
    pub fn len(&self) -> usize {
        self.circles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.circles.is_empty()
    }
}

#[inline]
fn splat_bilinear(acc: &mut [f32], aw: usize, ah: usize, fx: f32, fy: f32) {
    let x = fx - 0.5;
    let y = fy - 0.5;
    let x0 = libm::floorf(x) as isize;
    let y0 = libm::floorf(y) as isize;
    let wx1 = x - x0 as f32;
    let wy1 = y - y0 as f32;
    for (dy, wy) in [(0isize, 1.0 - wy1), (1, wy1)] {
        for (dx, wx) in [(0isize, 1.0 - wx1), (1, wx1)] {
            let cx = x0 + dx;
            let cy = y0 + dy;
            if cx >= 0 && cy >= 0 && (cx as usize) < aw && (cy as usize) < ah {
                acc[cy as usize * aw + cx as usize] += wx * wy;
            }
        }
    }
}

/// Two-stage gradient Hough transform over a prepared edge map.
pub fn hough_circles(edges: &EdgeMap, params: &HoughParams) -> CircleSet {
    let (w, h) = (edges.width, edges.height);
    let dp = params.inverse_accumulator_ratio;
    let aw = libm::ceilf(w as f32 / dp) as usize;
    let ah = libm::ceilf(h as f32 / dp) as usize;
    let mut acc = vec![0f32; aw * ah];

    let edge_pixels: Vec<(usize, usize)> = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .filter(|&(x, y)| edges.mask[y * w + x])
        .collect();

    // center voting along the gradient line, both polarities, one deposit
    // per accumulator cell crossed
    for &(x, y) in &edge_pixels {
        let gx = edges.gx[y * w + x] as f32;
        let gy = edges.gy[y * w + x] as f32;
        let norm = libm::sqrtf(gx * gx + gy * gy);
        if norm <= 0.0 {
            continue;
        }
        let ux = gx / norm;
        let uy = gy / norm;
        for dir in [1.0f32, -1.0] {
            let mut r = params.radius_min as f32;
            while r <= params.radius_max as f32 {
                let cx = x as f32 + 0.5 + dir * ux * r;
                let cy = y as f32 + 0.5 + dir * uy * r;
                if cx >= 0.0 && cy >= 0.0 && cx < w as f32 && cy < h as f32 {
                    splat_bilinear(&mut acc, aw, ah, cx / dp, cy / dp);
                }
                r += dp;
            }
        }
    }

    // accumulator peaks: threshold plus 8-neighbor local maximum
    let mut candidates: Vec<(f32, usize, usize)> = Vec::new();
    for ay in 0..ah {
        for ax in 0..aw {
            let v = acc[ay * aw + ax];
            if v < params.accumulator_threshold {
                continue;
            }
            let mut is_peak = true;
            'scan: for dy in -1isize..=1 {
                for dx in -1isize..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let ny = ay as isize + dy;
                    let nx = ax as isize + dx;
                    if ny < 0 || nx < 0 || ny >= ah as isize || nx >= aw as isize {
                        continue;
                    }
                    let n = acc[ny as usize * aw + nx as usize];
                    // strict against earlier cells keeps exactly one peak per plateau
                    let earlier = dy < 0 || (dy == 0 && dx < 0);
                    if (earlier && n >= v) || (!earlier && n > v) {
                        is_peak = false;
                        break 'scan;
                    }
                }
            }
            if is_peak {
                candidates.push((v, ax, ay));
            }
        }
    }
    candidates.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap()
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });

    // greedy suppression under the minimum center distance
    let min_d2 = params.min_center_distance * params.min_center_distance;
    let mut centers: Vec<(f32, f32, f32)> = Vec::new();
    for &(votes, ax, ay) in &candidates {
        let cx = (ax as f32 + 0.5) * dp;
        let cy = (ay as f32 + 0.5) * dp;
        if centers
            .iter()
            .all(|&(ox, oy, _)| (ox - cx) * (ox - cx) + (oy - cy) * (oy - cy) >= min_d2)
        {
            centers.push((cx, cy, votes));
        }
    }

    // radius from the edge-support histogram around each center; edge pixels
    // must point roughly along the radial direction to count
    let mut circles = Vec::new();
    let rmax_f = params.radius_max as f32 + 1.5;
    for &(cx, cy, votes) in &centers {
        let mut hist = vec![0u32; params.radius_max as usize + 2];
        for &(x, y) in &edge_pixels {
            let dx = x as f32 + 0.5 - cx;
            let dy = y as f32 + 0.5 - cy;
            let d = libm::sqrtf(dx * dx + dy * dy);
            if d < params.radius_min as f32 - 1.5 || d > rmax_f || d <= 0.0 {
                continue;
            }
            let gx = edges.gx[y * w + x] as f32;
            let gy = edges.gy[y * w + x] as f32;
            let gnorm = libm::sqrtf(gx * gx + gy * gy);
            if gnorm <= 0.0 {
                continue;
            }
            let align = (dx * gx + dy * gy) / (d * gnorm);
            if align * align < 0.64 {
                continue;
            }
            let bin = libm::roundf(d) as usize;
            if bin >= params.radius_min as usize && bin <= params.radius_max as usize {
                hist[bin] += 1;
            }
        }
        let mut best_r = params.radius_min as usize;
        let mut best_support = 0u32;
        for (r, &support) in hist
            .iter()
            .enumerate()
            .take(params.radius_max as usize + 1)
            .skip(params.radius_min as usize)
        {
            if support > best_support {
                best_support = support;
                best_r = r;
            }
        }
        if best_support > 0 {
            circles.push(Circle {
                cx,
                cy,
                radius: best_r as f32,
                score: votes,
            });
        }
    }

    CircleSet { circles }
}

/// Obscured-area summary for one image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageReport {
    pub bubble_count: usize,
    /// Union of detected discs intersected with the image, over image area.
    pub coverage_fraction: f64,
    pub mean_radius: f64,
    pub median_radius: f64,
}

/// Rasterizes the union of discs clipped to the image and reports the
/// covered fraction plus radius statistics.
pub fn coverage(circles: &CircleSet, width: usize, height: usize) -> CoverageReport {
    let mut covered = vec![false; width * height];
    for c in &circles.circles {
        let r2 = c.radius * c.radius;
        let y0 = libm::floorf(c.cy - c.radius).max(0.0) as usize;
        let y1 = (libm::ceilf(c.cy + c.radius).max(0.0) as usize).min(height.saturating_sub(1));
        for y in y0..=y1.min(height - 1) {
            let dy = y as f32 + 0.5 - c.cy;
            let span2 = r2 - dy * dy;
            if span2 < 0.0 {
                continue;
            }
            let span = libm::sqrtf(span2);
            let x0 = libm::floorf(c.cx - span).max(0.0) as usize;
            let x1 = (libm::ceilf(c.cx + span) as usize).min(width);
            for x in x0..x1 {
                let dx = x as f32 + 0.5 - c.cx;
                if dx * dx + dy * dy <= r2 {
                    covered[y * width + x] = true;
                }
            }
        }
    }
    let marked = covered.iter().filter(|&&m| m).count();
    let mut radii: Vec<f64> = circles.circles.iter().map(|c| c.radius as f64).collect();
    radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mean_radius = if radii.is_empty() {
        0.0
    } else {
        radii.iter().sum::<f64>() / radii.len() as f64
    };
    let median_radius = match radii.len() {
        0 => 0.0,
        n if n % 2 == 1 => radii[n / 2],
        n => (radii[n / 2 - 1] + radii[n / 2]) / 2.0,
    };
    CoverageReport {
        bubble_count: circles.len(),
        coverage_fraction: marked as f64 / (width * height) as f64,
        mean_radius,
        median_radius,
    }
}

/// Full analyzer pipeline on a grayscale image: median blur, Canny, Hough,
/// coverage.
pub fn analyze_gray(gray: &GrayImage, params: &HoughParams) -> (CircleSet, CoverageReport) {
    let blurred = median_blur_5x5(gray);
    let edges = canny_edges(&blurred, params.canny_high);
    let circles = hough_circles(&edges, params);
    let report = coverage(&circles, gray.width, gray.height);
    (circles, report)
}

/// Full analyzer pipeline on an RGB image.
pub fn analyze_rgb(rgb: &RgbImage, params: &HoughParams) -> (CircleSet, CoverageReport) {
    analyze_gray(&to_grayscale(rgb), params)
}
