use serde::Deserialize;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

/// Settings shared by all subcommands. Command-line flags override the file.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub radius_schedule: Vec<u64>,
    pub m_max: Option<u64>,
    /// Exponent constant of the relation search bound.
    pub lattice_c: f64,
    /// Numeric candidates per radius in the relation search.
    pub enumeration_budget: u64,
    pub format: Format,
    /// Worker threads; 0 lets rayon decide. `LLTERM_THREADS` wins over this.
    pub threads: usize,
}

impl Default for Config {
    fn default() -> Self {
        let w = llterm_core::witness::WitnessConfig::default();
        Config {
            radius_schedule: llterm_core::decision::SearchConfig::default().radius_schedule,
            m_max: None,
            lattice_c: w.lattice_c,
            enumeration_budget: w.enumeration_budget,
            format: Format::Text,
            threads: 0,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let cfg: Config = toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.radius_schedule.is_empty() {
            return Err("radius_schedule must not be empty".into());
        }
        if self.radius_schedule.windows(2).any(|w| w[0] >= w[1]) {
            return Err("radius_schedule must be strictly increasing".into());
        }
        if !(self.lattice_c.is_finite() && self.lattice_c > 0.0) {
            return Err("lattice_c must be positive".into());
        }
        if self.m_max == Some(0) {
            return Err("m_max must be positive".into());
        }
        Ok(())
    }

    pub fn analyze_config(&self) -> llterm_core::decision::AnalyzeConfig {
        let mut a = llterm_core::decision::AnalyzeConfig::default();
        a.search.radius_schedule = self.radius_schedule.clone();
        a.certify.m_max = self.m_max;
        a.witness.lattice_c = self.lattice_c;
        a.witness.enumeration_budget = self.enumeration_budget;
        a
    }

    pub fn thread_count(&self) -> Result<usize, String> {
        match std::env::var("LLTERM_THREADS") {
            Ok(v) => v.trim().parse().map_err(|_| format!("LLTERM_THREADS: not a number: {v}")),
            Err(_) => Ok(self.threads),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_partial_file() {
        let c: Config = toml::from_str("radius_schedule = [4, 16]\nformat = \"json\"\n").unwrap();
        assert_eq!(c.radius_schedule, vec![4, 16]);
        assert_eq!(c.format, Format::Json);
        assert_eq!(c.m_max, None);
        assert!(c.validate().is_ok());
        assert!(toml::from_str::<Config>("colour = 1").is_err());
        let bad: Config = toml::from_str("radius_schedule = [8, 2]").unwrap();
        assert!(bad.validate().is_err());
    }
}
