//! Machine-parseable CSV reports with fixed column orders.

use agrb_core::bubbles::{Circle, CoverageReport};
use agrb_core::energy::{EnergyReport, SweepCell};
use agrb_core::frame::RgbImage;
use agrb_core::metrics::FrameMetrics;
use agrb_core::FrameStats;

pub const METRICS_HEADER: &str =
    "file,width,height,bits_original,bits_compressed,cr,saved_pct,mse,psnr_db,zero_ac_pct,encode_ms";
pub const BUBBLE_HEADER: &str =
    "file,width,height,bubbles,coverage,mean_radius_px,median_radius_px";
pub const SIMULATE_HEADER: &str =
    "study_id,threshold,reduced_fps,baseline_uj,comp_only_uj,controller_uj,reduction_comp_pct,reduction_ctrl_pct";
pub const SWEEP_HEADER: &str = "threshold,reduced_fps,missed,energy_mj,reduction_pct";

fn db(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else {
        format!("{v:.2}")
    }
}

/// One encode/metrics row; `encode_ms` is blank when not measured.
pub fn metrics_row(
    file: &str,
    width: usize,
    height: usize,
    stats: &FrameStats,
    metrics: Option<&FrameMetrics>,
    encode_ms: Option<f64>,
) -> String {
    let (mse, psnr) = metrics.map_or((String::new(), String::new()), |m| {
        (format!("{:.4}", m.mse), db(m.psnr))
    });
    format!(
        "{file},{width},{height},{},{},{:.4},{:.2},{mse},{psnr},{:.2},{}",
        stats.bits_original,
        stats.bits_compressed,
        stats.compression_ratio(),
        100.0 * (1.0 - 1.0 / stats.compression_ratio()),
        100.0 * stats.zero_ac_fraction(),
        encode_ms.map_or(String::new(), |ms| format!("{ms:.2}")),
    )
}

pub fn bubble_row(file: &str, width: usize, height: usize, report: &CoverageReport) -> String {
    format!(
        "{file},{width},{height},{},{:.6},{:.2},{:.2}",
        report.bubble_count, report.coverage_fraction, report.mean_radius, report.median_radius
    )
}

/// Aggregate block over many coverage reports, mirroring the bubble-table
/// row structure: counts, then coverage statistics over images that contain
/// at least one bubble, then radius statistics.
pub fn aggregate_block(reports: &[CoverageReport], all_radii: &[f64]) -> String {
    let frames = reports.len();
    let with_bubbles: Vec<&CoverageReport> =
        reports.iter().filter(|r| r.bubble_count > 0).collect();
    let detected: usize = reports.iter().map(|r| r.bubble_count).sum();
    let coverages: Vec<f64> = with_bubbles.iter().map(|r| r.coverage_fraction).collect();
    let mean = |v: &[f64]| {
        if v.is_empty() {
            0.0
        } else {
            v.iter().sum::<f64>() / v.len() as f64
        }
    };
    let median = |v: &[f64]| -> f64 {
        if v.is_empty() {
            return 0.0;
        }
        let mut s = v.to_vec();
        s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if s.len() % 2 == 1 {
            s[s.len() / 2]
        } else {
            (s[s.len() / 2 - 1] + s[s.len() / 2]) / 2.0
        }
    };
    let std = |v: &[f64]| {
        if v.len() < 2 {
            return 0.0;
        }
        let m = mean(v);
        (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64).sqrt()
    };
    let mut out = String::from("metric,value\n");
    out.push_str(&format!("frames,{frames}\n"));
    out.push_str(&format!("frames_with_bubbles,{}\n", with_bubbles.len()));
    out.push_str(&format!("bubbles_detected,{detected}\n"));
    out.push_str(&format!(
        "mean_coverage_pct,{:.2}\n",
        100.0 * mean(&coverages)
    ));
    out.push_str(&format!(
        "median_coverage_pct,{:.2}\n",
        100.0 * median(&coverages)
    ));
    out.push_str(&format!(
        "std_coverage_pct,{:.3}\n",
        100.0 * std(&coverages)
    ));
    out.push_str(&format!("mean_radius_px,{:.2}\n", mean(all_radii)));
    out.push_str(&format!("median_radius_px,{:.2}\n", median(all_radii)));
    out
}

pub fn simulate_row(
    study_id: &str,
    threshold: f64,
    reduced_fps: f64,
    report: &EnergyReport,
) -> String {
    format!(
        "{study_id},{threshold:.2},{reduced_fps:.2},{:.2},{:.2},{:.2},{:.2},{:.2}",
        report.baseline.total_uj(),
        report.compression_only.total_uj(),
        report.controller.total_uj(),
        report.reduction_compression_pct,
        report.reduction_controller_pct,
    )
}

pub fn sweep_row(cell: &SweepCell) -> String {
    format!(
        "{:.2},{:.2},{},{:.3},{:.2}",
        cell.cr_threshold,
        cell.reduced_fps,
        cell.missed_pathologies,
        cell.controller_total_nj as f64 / 1_000_000.0,
        cell.reduction_controller_pct,
    )
}

/// Draws circle outlines (3 px pen) into an RGB image for visual inspection.
pub fn annotate_circles(image: &mut RgbImage, circles: &[Circle]) {
    for c in circles {
        let steps = (c.radius as usize * 8).max(64);
        for s in 0..steps {
            let a = s as f32 / steps as f32 * std::f32::consts::TAU;
            let x = c.cx + c.radius * a.cos();
            let y = c.cy + c.radius * a.sin();
            if x < 0.0 || y < 0.0 {
                continue;
            }
            let (x, y) = (x as usize, y as usize);
            if x < image.width && y < image.height {
                let i = (y * image.width + x) * 3;
                image.data[i] = 0;
                image.data[i + 1] = 255;
                image.data[i + 2] = 0;
            }
        }
    }
}
