//! Line-oriented `key = value` configuration with `[section]` headers.
//!
//! One file drives every command; command-line flags override file values.
//! Recognized sections and keys:
//!
//! ```text
//! [quant]       luma, chroma            (16 zigzag-ordered shifts each)
//! [controller]  nominal_fps, reduced_fps, cr_threshold
//! [energy]      capture_sensor_uj, capture_leds_uj, capture_core_uj,
//!               compression_power_mw, transceiver_power_mw, idle_power_mw,
//!               radio_bits_per_sec, frame_bits
//! [runtime]     a_ms, b_per_cr, cr0, c_ms
//! [synth]       seed, count, width, height
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use agrb_core::controller::ControllerConfig;
use agrb_core::energy::{EnergyModel, RuntimeModel};
use agrb_core::QuantTable;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default)]
pub struct Config {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl Config {
    pub fn parse(text: &str, origin: &str) -> Result<Config> {
        let mut config = Config::default();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') {
                if !line.ends_with(']') {
                    return Err(CliError::Data(format!(
                        "{origin}: line {}: unterminated section header",
                        lineno + 1
                    )));
                }
                section = line[1..line.len() - 1].trim().to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Data(format!(
                    "{origin}: line {}: expected key = value",
                    lineno + 1
                ))
            })?;
            config
                .sections
                .entry(section.clone())
                .or_default()
                .insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        Config::parse(&text, &path.display().to_string())
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections
            .get(section)
            .and_then(|s| s.get(key))
            .map(String::as_str)
    }

    fn get_parsed<T: std::str::FromStr>(&self, section: &str, key: &str) -> Result<Option<T>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(text) => text.parse::<T>().map(Some).map_err(|_| {
                CliError::Data(format!("config [{section}] {key}: bad value {text:?}"))
            }),
        }
    }

    /// Controller parameters with file overrides applied to the defaults.
    pub fn controller(&self) -> Result<ControllerConfig> {
        let mut c = ControllerConfig::default();
        if let Some(v) = self.get_parsed("controller", "nominal_fps")? {
            c.nominal_fps = v;
        }
        if let Some(v) = self.get_parsed("controller", "reduced_fps")? {
            c.reduced_fps = v;
        }
        if let Some(v) = self.get_parsed("controller", "cr_threshold")? {
            c.cr_threshold = v;
        }
        c.validate().map_err(|e| CliError::Data(e.to_string()))?;
        Ok(c)
    }

    /// Energy model with file overrides (energies in uJ, powers in mW).
    pub fn energy(&self) -> Result<EnergyModel> {
        let mut m = EnergyModel::default();
        let uj_to_nj = |v: f64| (v * 1000.0).round() as i64;
        let mw_to_uw = |v: f64| (v * 1000.0).round() as i64;
        if let Some(v) = self.get_parsed::<f64>("energy", "capture_sensor_uj")? {
            m.capture_sensor_nj = uj_to_nj(v);
        }
        if let Some(v) = self.get_parsed::<f64>("energy", "capture_leds_uj")? {
            m.capture_leds_nj = uj_to_nj(v);
        }
        if let Some(v) = self.get_parsed::<f64>("energy", "capture_core_uj")? {
            m.capture_core_nj = uj_to_nj(v);
        }
        if let Some(v) = self.get_parsed::<f64>("energy", "compression_power_mw")? {
            m.compression_power_uw = mw_to_uw(v);
        }
        if let Some(v) = self.get_parsed::<f64>("energy", "transceiver_power_mw")? {
            m.transceiver_power_uw = mw_to_uw(v);
        }
        if let Some(v) = self.get_parsed::<f64>("energy", "idle_power_mw")? {
            m.idle_power_uw = mw_to_uw(v);
        }
        if let Some(v) = self.get_parsed("energy", "radio_bits_per_sec")? {
            m.radio_bits_per_sec = v;
        }
        if let Some(v) = self.get_parsed("energy", "frame_bits")? {
            m.frame_bits = v;
        }
        m.validate().map_err(|e| CliError::Data(e.to_string()))?;
        Ok(m)
    }

    /// Compression runtime model with file overrides.
    pub fn runtime(&self) -> Result<RuntimeModel> {
        let mut r = RuntimeModel::default();
        if let Some(v) = self.get_parsed("runtime", "a_ms")? {
            r.a_ms = v;
        }
        if let Some(v) = self.get_parsed("runtime", "b_per_cr")? {
            r.b_per_cr = v;
        }
        if let Some(v) = self.get_parsed("runtime", "cr0")? {
            r.cr0 = v;
        }
        if let Some(v) = self.get_parsed("runtime", "c_ms")? {
            r.c_ms = v;
        }
        Ok(r)
    }

    /// Quantization tables from the [quant] section, when present.
    pub fn quant_tables(&self) -> Result<Option<QuantTable>> {
        let (luma, chroma) = match (self.get("quant", "luma"), self.get("quant", "chroma")) {
            (None, None) => return Ok(None),
            (Some(l), Some(c)) => (l, c),
            _ => {
                return Err(CliError::Data(
                    "config [quant] needs both luma and chroma".into(),
                ))
            }
        };
        let parse16 = |text: &str, what: &str| -> Result<[u8; 16]> {
            let parts: Vec<&str> = text.split(',').map(str::trim).collect();
            if parts.len() != 16 {
                return Err(CliError::Data(format!(
                    "config [quant] {what}: expected 16 shifts"
                )));
            }
            let mut out = [0u8; 16];
            for (slot, part) in out.iter_mut().zip(parts) {
                *slot = part
                    .parse()
                    .map_err(|_| CliError::Data(format!("config [quant] {what}: bad {part:?}")))?;
            }
            Ok(out)
        };
        let table =
            QuantTable::from_zigzag_shifts(&parse16(luma, "luma")?, &parse16(chroma, "chroma")?)
                .map_err(|e| CliError::Data(e.to_string()))?;
        Ok(Some(table))
    }

    pub fn synth_seed(&self) -> Result<Option<u64>> {
        self.get_parsed("synth", "seed")
    }

    pub fn synth_count(&self) -> Result<Option<usize>> {
        self.get_parsed("synth", "count")
    }
}
