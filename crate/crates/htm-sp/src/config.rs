//! Spatial Pooler configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// All tunable Spatial Pooler parameters.
///
/// The defaults follow the standard benchmark configuration: 2048 columns,
/// 128 proximal synapses per column, min overlap 8, winners set size 40,
/// permanence increment/decrement 0.1, initial permanence 0.21 and an
/// initial inhibition radius of 80 columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpConfig {
    /// Number of columns in the pooler.
    pub num_columns: usize,
    /// Proximal synapses per column.
    pub synapses_per_column: usize,
    /// Overlap cutoff: raw overlaps below this count are zeroed.
    pub min_overlap: u32,
    /// `n` in the winner-take-all inhibition rule: a column activates only
    /// if its overlap strictly exceeds the n-th largest overlap among its
    /// neighbors (floored at 1).
    pub winners_set_size: usize,
    /// Permanence increase applied to synapses on active input bits of a
    /// winning column.
    pub perm_increment: f64,
    /// Permanence decrease applied to the remaining synapses of a winning
    /// column.
    pub perm_decrement: f64,
    /// Permanence assigned to every synapse at initialization.
    pub initial_permanence: f64,
    /// Permanence at or above which a synapse counts as connected.
    #[serde(default = "default_connected_threshold")]
    pub connected_threshold: f64,
    /// Neighborhood half-width (in column index space) before adaptation.
    pub initial_inhibition_radius: usize,
    /// Upper bound of the boost factor.
    #[serde(default = "default_max_boost")]
    pub max_boost: f64,
    /// Window length for the duty-cycle moving averages.
    #[serde(default = "default_duty_cycle_period")]
    pub duty_cycle_period: u32,
    /// Bits per input frame. Zero means "derive from the encoder geometry"
    /// when the config is loaded as part of an experiment file.
    #[serde(default)]
    pub input_size: usize,
    /// Seed for all randomized initialization.
    #[serde(default = "default_rng_seed")]
    pub rng_seed: u64,
}

fn default_connected_threshold() -> f64 {
    0.2
}

fn default_max_boost() -> f64 {
    2.0
}

fn default_duty_cycle_period() -> u32 {
    1000
}

fn default_rng_seed() -> u64 {
    1
}

impl Default for SpConfig {
    fn default() -> Self {
        SpConfig {
            num_columns: 2048,
            synapses_per_column: 128,
            min_overlap: 8,
            winners_set_size: 40,
            perm_increment: 0.1,
            perm_decrement: 0.1,
            initial_permanence: 0.21,
            connected_threshold: default_connected_threshold(),
            initial_inhibition_radius: 80,
            max_boost: default_max_boost(),
            duty_cycle_period: default_duty_cycle_period(),
            input_size: 240 * 134,
            rng_seed: default_rng_seed(),
        }
    }
}

impl SpConfig {
    /// Checks every invariant; the error names the first violated one.
    pub fn validate(&self) -> Result<()> {
        fn fraction(name: &str, v: f64) -> Result<()> {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::config(format!("{name} must lie in [0, 1], got {v}")));
            }
            Ok(())
        }

        if self.num_columns == 0 {
            return Err(Error::config("num_columns must be positive"));
        }
        if self.synapses_per_column == 0 {
            return Err(Error::config("synapses_per_column must be positive"));
        }
        if self.winners_set_size == 0 {
            return Err(Error::config("winners_set_size must be positive"));
        }
        if self.initial_inhibition_radius == 0 {
            return Err(Error::config("initial_inhibition_radius must be positive"));
        }
        if self.duty_cycle_period == 0 {
            return Err(Error::config("duty_cycle_period must be positive"));
        }
        if self.input_size == 0 {
            return Err(Error::config("input_size must be positive"));
        }
        fraction("initial_permanence", self.initial_permanence)?;
        fraction("connected_threshold", self.connected_threshold)?;
        fraction("perm_increment", self.perm_increment)?;
        fraction("perm_decrement", self.perm_decrement)?;
        if self.winners_set_size > self.num_columns {
            return Err(Error::config(format!(
                "winners_set_size ({}) must not exceed num_columns ({})",
                self.winners_set_size, self.num_columns
            )));
        }
        if self.min_overlap as usize > self.synapses_per_column {
            return Err(Error::config(format!(
                "min_overlap ({}) must not exceed synapses_per_column ({})",
                self.min_overlap, self.synapses_per_column
            )));
        }
        if self.synapses_per_column > self.input_size {
            return Err(Error::config(format!(
                "synapses_per_column ({}) must not exceed input_size ({})",
                self.synapses_per_column, self.input_size
            )));
        }
        if self.input_size > u32::MAX as usize {
            return Err(Error::config("input_size must fit in 32 bits"));
        }
        if !self.max_boost.is_finite() || self.max_boost < 1.0 {
            return Err(Error::config(format!(
                "max_boost must be >= 1, got {}",
                self.max_boost
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        SpConfig::default().validate().unwrap();
    }

    #[test]
    fn errors_name_the_violated_invariant() {
        let mut cfg = SpConfig::default();
        cfg.min_overlap = 500;
        let err = cfg.validate().unwrap_err().to_string();
        assert!(err.contains("min_overlap"), "{err}");

        let mut cfg = SpConfig::default();
        cfg.initial_permanence = 1.5;
        let err = cfg.validate().unwrap_err().to_string();
        assert!(err.contains("initial_permanence"), "{err}");

        let mut cfg = SpConfig::default();
        cfg.winners_set_size = cfg.num_columns + 1;
        assert!(cfg.validate().is_err());

        let mut cfg = SpConfig::default();
        cfg.synapses_per_column = cfg.input_size + 1;
        assert!(cfg.validate().is_err());

        let mut cfg = SpConfig::default();
        cfg.max_boost = 0.5;
        assert!(cfg.validate().unwrap_err().to_string().contains("max_boost"));
    }
}
