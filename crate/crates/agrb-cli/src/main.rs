//! `agrb`: Bayer-mosaic codec and capsule-imaging analysis CLI.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use agrb_core::bubbles::{analyze_gray, analyze_rgb, GrayImage, HoughParams};
use agrb_core::codec::{decode_frame, encode_frame, TableSelection};
use agrb_core::controller::{run_trace, ControllerConfig};
use agrb_core::energy::simulate_study;
use agrb_core::metrics::FrameMetrics;
use clap::{Parser, Subcommand};

use agrb_cli::config::Config;
use agrb_cli::error::{CliError, Result};
use agrb_cli::formats::{
    load_frame, load_ppm, load_quant_tables, load_stream, store_frame, store_ppm, store_stream,
    FrameFormat,
};
use agrb_cli::report;
use agrb_cli::synth::{self, TraceParams};
use agrb_cli::trace::load_trace;

#[derive(Parser)]
#[command(
    name = "agrb",
    about = "Bayer-mosaic compression, bubble analysis, frame-rate control, and energy simulation",
    version
)]
struct Cli {
    /// Configuration file (key = value with [sections]); flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress a mosaic (PGM/CBAY) into a stream file.
    Encode {
        input: PathBuf,
        output: PathBuf,
        /// All-zero shifts: bit-exact round trip.
        #[arg(long, conflicts_with = "tables")]
        lossless: bool,
        /// External quantization table file (zigzag-ordered shifts).
        #[arg(long)]
        tables: Option<PathBuf>,
        /// Print a per-frame statistics row.
        #[arg(long)]
        stats: bool,
    },
    /// Decompress a stream file back to a mosaic.
    Decode {
        input: PathBuf,
        output: PathBuf,
        /// Table file for streams encoded with external tables.
        #[arg(long)]
        tables: Option<PathBuf>,
    },
    /// Fidelity (and optionally compression) metrics between two mosaics.
    Metrics {
        original: PathBuf,
        reconstructed: PathBuf,
        /// Stream file the reconstruction came from; enables the CR columns.
        #[arg(long)]
        stream: Option<PathBuf>,
    },
    /// Subsample an RGB image (PPM) through the RGGB filter array.
    Mosaic { input: PathBuf, output: PathBuf },
    /// Detect bubbles and report view coverage for one or more images.
    Bubbles {
        /// Input images: PPM (RGB) or PGM (grayscale).
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Write per-image rows to this file instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write annotated copies (detected circles drawn) into a directory.
        #[arg(long)]
        annotate: Option<PathBuf>,
        /// Append an aggregate statistics block.
        #[arg(long)]
        aggregate: bool,
    },
    /// Run the frame-rate controller and energy accounting over traces.
    Simulate {
        /// Study trace CSV files (index,cr,pathology,view).
        #[arg(long = "trace", required = true)]
        traces: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        reduced_fps: Option<f64>,
        #[arg(long)]
        nominal_fps: Option<f64>,
    },
    /// Evaluate (threshold x reduced rate) combinations over traces.
    Sweep {
        #[arg(long = "trace", required = true)]
        traces: Vec<PathBuf>,
        /// Comma-separated CR thresholds.
        #[arg(long, value_delimiter = ',', required = true)]
        thresholds: Vec<f64>,
        /// Comma-separated reduced frame rates.
        #[arg(long, value_delimiter = ',', required = true)]
        rates: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate seeded synthetic corpora.
    Synth {
        #[command(subcommand)]
        what: SynthCommand,
    },
}

#[derive(Subcommand)]
enum SynthCommand {
    /// Vignetted tissue frames: RGB originals plus RGGB mosaics.
    Tissue {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 320)]
        width: usize,
        #[arg(long, default_value_t = 320)]
        height: usize,
    },
    /// Bubble scenes with exact ground-truth circles and coverage.
    Bubbles {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 320)]
        width: usize,
        #[arg(long, default_value_t = 320)]
        height: usize,
    },
    /// Coverage ladder from 0% to 60% in 10% steps on a fixed base frame.
    Ladder {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 320)]
        width: usize,
        #[arg(long, default_value_t = 320)]
        height: usize,
    },
    /// Study traces with bubble episodes and pathology labels.
    Traces {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 600)]
        frames: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<Config> {
    match path {
        Some(p) => Config::load(p),
        None => Ok(Config::default()),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn table_selection(
    lossless: bool,
    tables: &Option<PathBuf>,
    config: &Config,
) -> Result<TableSelection> {
    if lossless {
        return Ok(TableSelection::Lossless);
    }
    if let Some(path) = tables {
        return Ok(TableSelection::External(load_quant_tables(path)?));
    }
    if let Some(t) = config.quant_tables()? {
        return Ok(TableSelection::External(t));
    }
    Ok(TableSelection::Default)
}

fn run(cli: Cli) -> Result<()> {
    let config = load_config(&cli.config)?;
    match cli.command {
        Command::Encode {
            input,
            output,
            lossless,
            tables,
            stats,
        } => {
            let frame = load_frame(&input, FrameFormat::from_path(&input))?;
            let selection = table_selection(lossless, &tables, &config)?;
            let started = Instant::now();
            let (stream, frame_stats) = encode_frame(&frame, &selection);
            let encode_ms = started.elapsed().as_secs_f64() * 1000.0;
            store_stream(&output, &stream)?;
            if stats {
                println!("{}", report::METRICS_HEADER);
                println!(
                    "{}",
                    report::metrics_row(
                        &input.display().to_string(),
                        frame.width(),
                        frame.height(),
                        &frame_stats,
                        None,
                        Some(encode_ms),
                    )
                );
            }
            Ok(())
        }
        Command::Decode {
            input,
            output,
            tables,
        } => {
            let stream = load_stream(&input)?;
            let external = tables.as_deref().map(load_quant_tables).transpose()?;
            let decoded = decode_frame(&stream, external.as_ref())
                .map_err(|e| CliError::Data(e.to_string()))?;
            store_frame(
                &output,
                &decoded.frame,
                FrameFormat::from_path(&output),
                true,
            )
        }
        Command::Metrics {
            original,
            reconstructed,
            stream,
        } => {
            let a = load_frame(&original, FrameFormat::from_path(&original))?;
            let b = load_frame(&reconstructed, FrameFormat::from_path(&reconstructed))?;
            let (aw, ah) = (a.original_width(), a.original_height());
            if (aw, ah) != (b.original_width(), b.original_height()) {
                return Err(CliError::Data(format!(
                    "dimension mismatch: {}x{} vs {}x{}",
                    aw,
                    ah,
                    b.original_width(),
                    b.original_height()
                )));
            }
            let ac = a.crop_to_original();
            let bc = b.crop_to_original();
            let (bits_compressed, cr_cols) = match stream {
                Some(path) => {
                    let s = load_stream(&path)?;
                    let bits = 8 * s.byte_len() as u64;
                    let m = FrameMetrics::new(a.bits(), bits, &ac.samples, &bc.samples)
                        .map_err(|e| CliError::Data(e.to_string()))?;
                    (
                        bits.to_string(),
                        format!("{:.4},{:.2}", m.cr, 100.0 * m.saved_fraction),
                    )
                }
                None => (String::new(), ",".to_string()),
            };
            let mse = agrb_core::metrics::mse(&ac.samples, &bc.samples)
                .map_err(|e| CliError::Data(e.to_string()))?;
            let psnr = agrb_core::metrics::psnr(mse, 255.0);
            let psnr_text = if psnr.is_infinite() {
                "inf".to_string()
            } else {
                format!("{psnr:.2}")
            };
            println!("{}", report::METRICS_HEADER);
            println!(
                "{},{aw},{ah},{},{bits_compressed},{cr_cols},{mse:.4},{psnr_text},,",
                reconstructed.display(),
                a.bits(),
            );
            Ok(())
        }
        Command::Mosaic { input, output } => {
            let rgb = load_ppm(&input)?;
            let frame =
                agrb_core::frame::mosaic_rggb(&rgb).map_err(|e| CliError::Data(e.to_string()))?;
            store_frame(&output, &frame, FrameFormat::from_path(&output), true)
        }
        Command::Bubbles {
            inputs,
            report: report_path,
            annotate,
            aggregate,
        } => {
            let params = HoughParams::default();
            let mut rows = String::from(report::BUBBLE_HEADER);
            rows.push('\n');
            let mut reports = Vec::new();
            let mut all_radii = Vec::new();
            for input in &inputs {
                let magic = fs::read(input)
                    .map_err(|e| CliError::Data(format!("{}: {e}", input.display())))?;
                let (width, height, circles, cov) = if magic.starts_with(b"P6") {
                    let rgb = load_ppm(input)?;
                    let (circles, cov) = analyze_rgb(&rgb, &params);
                    if let Some(dir) = &annotate {
                        fs::create_dir_all(dir)
                            .map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
                        let mut annotated = rgb.clone();
                        report::annotate_circles(&mut annotated, &circles.circles);
                        let name = input
                            .file_name()
                            .map(|n| n.to_string_lossy().into_owned())
                            .unwrap_or_else(|| "image.ppm".into());
                        store_ppm(&dir.join(name), &annotated)?;
                    }
                    (rgb.width, rgb.height, circles, cov)
                } else {
                    let (w, h, data) = agrb_cli::formats::load_pgm(input)?;
                    let gray = GrayImage::new(w, h, data);
                    let (circles, cov) = analyze_gray(&gray, &params);
                    (w, h, circles, cov)
                };
                all_radii.extend(circles.circles.iter().map(|c| c.radius as f64));
                rows.push_str(&report::bubble_row(
                    &input.display().to_string(),
                    width,
                    height,
                    &cov,
                ));
                rows.push('\n');
                reports.push(cov);
            }
            if aggregate {
                rows.push('\n');
                rows.push_str(&report::aggregate_block(&reports, &all_radii));
            }
            emit(&report_path, &rows)
        }
        Command::Simulate {
            traces,
            out,
            threshold,
            reduced_fps,
            nominal_fps,
        } => {
            let mut controller = config.controller()?;
            if let Some(v) = threshold {
                controller.cr_threshold = v;
            }
            if let Some(v) = reduced_fps {
                controller.reduced_fps = v;
            }
            if let Some(v) = nominal_fps {
                controller.nominal_fps = v;
            }
            controller
                .validate()
                .map_err(|e| CliError::Data(e.to_string()))?;
            let model = config.energy()?;
            let runtime = config.runtime()?;
            let mut rows = String::from(report::SIMULATE_HEADER);
            rows.push('\n');
            for path in &traces {
                let trace = load_trace(path)?;
                let schedule =
                    run_trace(&trace, &controller).map_err(|e| CliError::Data(e.to_string()))?;
                let study = simulate_study(&trace, &schedule, &controller, &model, &runtime)
                    .map_err(|e| CliError::Data(e.to_string()))?;
                let id = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| path.display().to_string());
                rows.push_str(&report::simulate_row(
                    &id,
                    controller.cr_threshold,
                    controller.reduced_fps,
                    &study,
                ));
                rows.push('\n');
            }
            emit(&out, &rows)
        }
        Command::Sweep {
            traces,
            thresholds,
            rates,
            out,
        } => {
            let base = config.controller()?;
            let model = config.energy()?;
            let runtime = config.runtime()?;
            let loaded: Vec<_> = traces
                .iter()
                .map(|p| load_trace(p))
                .collect::<Result<_>>()?;
            let mut rows = String::from(report::SWEEP_HEADER);
            rows.push('\n');
            for &cr_threshold in &thresholds {
                for &fps in &rates {
                    let controller = ControllerConfig {
                        nominal_fps: base.nominal_fps,
                        reduced_fps: fps,
                        cr_threshold,
                    };
                    controller
                        .validate()
                        .map_err(|e| CliError::Data(e.to_string()))?;
                    let mut missed = 0usize;
                    let mut controller_nj = 0i64;
                    let mut baseline_nj = 0i64;
                    for trace in &loaded {
                        let schedule = run_trace(trace, &controller)
                            .map_err(|e| CliError::Data(e.to_string()))?;
                        missed += agrb_core::controller::missed_pathologies(trace, &schedule);
                        let study = simulate_study(trace, &schedule, &controller, &model, &runtime)
                            .map_err(|e| CliError::Data(e.to_string()))?;
                        controller_nj += study.controller.total_nj();
                        baseline_nj += study.baseline.total_nj();
                    }
                    let reduction = if baseline_nj == 0 {
                        0.0
                    } else {
                        100.0 * (baseline_nj - controller_nj) as f64 / baseline_nj as f64
                    };
                    rows.push_str(&format!(
                        "{cr_threshold:.2},{fps:.2},{missed},{:.3},{reduction:.2}\n",
                        controller_nj as f64 / 1_000_000.0,
                    ));
                }
            }
            emit(&out, &rows)
        }
        Command::Synth { what } => match what {
            SynthCommand::Tissue {
                out,
                seed,
                count,
                width,
                height,
            } => {
                let seed = config.synth_seed()?.unwrap_or(seed);
                let count = config.synth_count()?.unwrap_or(count);
                synth::generate_tissue_corpus(&out, seed, count, width, height).map(|_| ())
            }
            SynthCommand::Bubbles {
                out,
                seed,
                count,
                width,
                height,
            } => {
                let seed = config.synth_seed()?.unwrap_or(seed);
                let count = config.synth_count()?.unwrap_or(count);
                synth::generate_bubble_corpus(&out, seed, count, width, height).map(|_| ())
            }
            SynthCommand::Ladder {
                out,
                seed,
                width,
                height,
            } => {
                let seed = config.synth_seed()?.unwrap_or(seed);
                synth::generate_ladder_corpus(&out, seed, width, height).map(|_| ())
            }
            SynthCommand::Traces {
                out,
                seed,
                count,
                frames,
            } => {
                let seed = config.synth_seed()?.unwrap_or(seed);
                let count = config.synth_count()?.unwrap_or(count);
                let params = TraceParams {
                    frames,
                    ..Default::default()
                };
                synth::generate_trace_corpus(&out, seed, count, &params).map(|_| ())
            }
        },
    }
}
