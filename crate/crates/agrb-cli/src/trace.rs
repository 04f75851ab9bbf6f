//! Study-trace CSV: `index,cr,pathology,view` with a mandatory header row.
//!
//! `pathology` is 0/1; `view` may be empty. Indices must be contiguous
//! from 0.

use std::path::Path;

use agrb_core::controller::{StudyTrace, TraceFrame};

use crate::error::{CliError, Result};

pub const TRACE_HEADER: &str = "index,cr,pathology,view";

pub fn parse_trace(text: &str, origin: &str) -> Result<StudyTrace> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == TRACE_HEADER => {}
        _ => {
            return Err(CliError::Data(format!(
                "{origin}: line 1: expected header {TRACE_HEADER:?}"
            )))
        }
    }
    let mut frames = Vec::new();
    for (lineno, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(CliError::Data(format!(
                "{origin}: line {}: expected 4 fields, found {}",
                lineno + 1,
                fields.len()
            )));
        }
        let index: usize = fields[0].trim().parse().map_err(|_| {
            CliError::Data(format!(
                "{origin}: line {}: bad index {:?}",
                lineno + 1,
                fields[0]
            ))
        })?;
        if index != frames.len() {
            return Err(CliError::Data(format!(
                "{origin}: line {}: index {index} breaks contiguity (expected {})",
                lineno + 1,
                frames.len()
            )));
        }
        let cr: f64 = fields[1].trim().parse().map_err(|_| {
            CliError::Data(format!(
                "{origin}: line {}: bad cr {:?}",
                lineno + 1,
                fields[1]
            ))
        })?;
        if cr <= 0.0 || cr.is_nan() {
            return Err(CliError::Data(format!(
                "{origin}: line {}: cr must be positive",
                lineno + 1
            )));
        }
        let pathology = match fields[2].trim() {
            "0" => false,
            "1" => true,
            other => {
                return Err(CliError::Data(format!(
                    "{origin}: line {}: pathology flag must be 0 or 1, found {other:?}",
                    lineno + 1
                )))
            }
        };
        let view = fields[3].trim();
        frames.push(TraceFrame {
            cr,
            pathology,
            view_label: if view.is_empty() {
                None
            } else {
                Some(view.to_string())
            },
        });
    }
    if frames.is_empty() {
        return Err(CliError::Data(format!("{origin}: trace has no frames")));
    }
    Ok(StudyTrace { frames })
}

pub fn load_trace(path: &Path) -> Result<StudyTrace> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    parse_trace(&text, &path.display().to_string())
}

pub fn format_trace(trace: &StudyTrace) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for (i, f) in trace.frames.iter().enumerate() {
        out.push_str(&format!(
            "{i},{:.4},{},{}\n",
            f.cr,
            f.pathology as u8,
            f.view_label.as_deref().unwrap_or("")
        ));
    }
    out
}

pub fn store_trace(path: &Path, trace: &StudyTrace) -> Result<()> {
    std::fs::write(path, format_trace(trace))
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}
