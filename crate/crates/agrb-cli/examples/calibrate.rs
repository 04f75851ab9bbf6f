//! Desk calibration harness: prints codec and detector operating points on
//! the synthetic corpora.

use agrb_cli::synth;
use agrb_core::bubbles::{analyze_rgb, HoughParams};
use agrb_core::codec::{decode_frame, encode_frame, TableSelection};
use agrb_core::frame::mosaic_rggb;
use agrb_core::metrics::{mse, psnr};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let what = args.get(1).map(String::as_str).unwrap_or("tissue");
    let n: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(20);

    if what == "tissue" {
        let mut crs = Vec::new();
        let mut psnrs = Vec::new();
        for i in 0..n {
            let rgb = synth::tissue_image(7, i as u64, 320, 320);
            let frame = mosaic_rggb(&rgb).unwrap();
            let (stream, stats) = encode_frame(&frame, &TableSelection::Default);
            let decoded = decode_frame(&stream, None).unwrap();
            let m = mse(frame.samples(), decoded.frame.samples()).unwrap();
            let db = psnr(m, 255.0);
            crs.push(stats.compression_ratio());
            psnrs.push(db);
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let min = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        println!(
            "tissue n={n}: CR mean {:.3} [{:.3}, {:.3}]  PSNR mean {:.2} [{:.2}, {:.2}]",
            mean(&crs),
            min(&crs),
            max(&crs),
            mean(&psnrs),
            min(&psnrs),
            max(&psnrs)
        );
    }

    if what == "bubbles" {
        let params = HoughParams::default();
        let mut tp = 0usize;
        let mut fp = 0usize;
        let mut truth_total = 0usize;
        let mut cov_pairs: Vec<(f64, f64)> = Vec::new();
        for i in 0..n {
            let scene = synth::bubble_scene(7, i as u64, 320, 320);
            let (circles, report) = analyze_rgb(&scene.image, &params);
            truth_total += scene.circles.len();
            let mut used = vec![false; scene.circles.len()];
            for c in &circles.circles {
                let hit = scene.circles.iter().enumerate().find(|(j, t)| {
                    !used[*j]
                        && (t.cx - c.cx).abs() <= 5.0
                        && (t.cy - c.cy).abs() <= 5.0
                        && (t.radius - c.radius).abs() <= 5.0
                });
                match hit {
                    Some((j, _)) => {
                        used[j] = true;
                        tp += 1;
                    }
                    None => {
                        fp += 1;
                        if std::env::var("FP_DEBUG").is_ok() {
                            let nearest = scene
                                .circles
                                .iter()
                                .map(|t| ((t.cx - c.cx).hypot(t.cy - c.cy), t.radius))
                                .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                            println!(
                                "  fp img {i}: r={:.0} score={:.0} at ({:.0},{:.0}) nearest truth d={:.1} r={:.0}",
                                c.radius, c.score, c.cx, c.cy,
                                nearest.map(|n| n.0).unwrap_or(-1.0),
                                nearest.map(|n| n.1).unwrap_or(-1.0)
                            );
                        }
                    }
                }
            }
            cov_pairs.push((scene.coverage, report.coverage_fraction));
        }
        let recall = tp as f64 / truth_total as f64;
        let precision = tp as f64 / (tp + fp).max(1) as f64;
        // Spearman rank correlation of measured vs true coverage
        let rank = |v: Vec<f64>| -> Vec<f64> {
            let mut idx: Vec<usize> = (0..v.len()).collect();
            idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap());
            let mut r = vec![0.0; v.len()];
            for (pos, &i) in idx.iter().enumerate() {
                r[i] = pos as f64;
            }
            r
        };
        let xs = rank(cov_pairs.iter().map(|p| p.0).collect());
        let ys = rank(cov_pairs.iter().map(|p| p.1).collect());
        let mx = xs.iter().sum::<f64>() / xs.len() as f64;
        let my = ys.iter().sum::<f64>() / ys.len() as f64;
        let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let vx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let vy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
        let rho = cov / (vx.sqrt() * vy.sqrt());
        println!(
            "bubbles n={n}: recall {recall:.3} ({tp}/{truth_total})  precision {precision:.3} ({fp} fp)  coverage rank-corr {rho:.3}"
        );
    }

    #[allow(clippy::needless_range_loop)]
    if what == "controller" {
        use agrb_core::controller::{missed_pathologies, run_trace, ControllerConfig};
        let thresholds = [2.0, 2.8, 3.6, 4.4, 5.2];
        let rates = [0.4, 0.67, 1.0, 1.5, 2.0];
        let mut violations = 0usize;
        for t in 0..n {
            let trace = synth::synthetic_trace(21, t as u64, &synth::TraceParams::default());
            let mut skipped = [[0usize; 5]; 5];
            let mut missed = [[0usize; 5]; 5];
            for (i, &thr) in thresholds.iter().enumerate() {
                for (j, &fps) in rates.iter().enumerate() {
                    let cfg = ControllerConfig {
                        nominal_fps: 2.0,
                        reduced_fps: fps,
                        cr_threshold: thr,
                    };
                    let schedule = run_trace(&trace, &cfg).unwrap();
                    skipped[i][j] = schedule.skipped(trace.len());
                    missed[i][j] = missed_pathologies(&trace, &schedule);
                }
            }
            for j in 0..5 {
                for i in 1..5 {
                    if skipped[i][j] < skipped[i - 1][j] {
                        violations += 1;
                        println!(
                            "trace {t}: skipped not monotone in threshold at rate {j}: {} -> {}",
                            skipped[i - 1][j],
                            skipped[i][j]
                        );
                    }
                    if missed[i][j] < missed[i - 1][j] {
                        violations += 1;
                        println!(
                            "trace {t}: missed not monotone in threshold at rate {j}: {:?}",
                            missed
                        );
                    }
                }
            }
            for i in 0..5 {
                for j in 1..5 {
                    // rates ascending: lower rate (smaller j) must miss >= higher rate
                    if missed[i][j - 1] < missed[i][j] {
                        violations += 1;
                        println!(
                            "trace {t}: missed not monotone in rate at threshold {i}: {:?}",
                            missed[i]
                        );
                    }
                }
            }
        }
        println!("controller monotonicity over {n} traces: {violations} violations");
    }

    if what == "ladder" {
        for level in 0..=6u64 {
            let target = level as f64 * 0.10;
            let scene = synth::ladder_scene(7, level, target, 320, 320);
            let frame = mosaic_rggb(&scene.image).unwrap();
            let (_, stats) = encode_frame(&frame, &TableSelection::Default);
            println!(
                "ladder {:>3.0}%: true coverage {:.3}  CR {:.3}",
                target * 100.0,
                scene.coverage,
                stats.compression_ratio()
            );
        }
    }
}
