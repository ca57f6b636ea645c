//! Experiment configurations shipped with the crate.

use crate::error::{Error, Result};
use crate::montecarlo::ExperimentConfig;

const PRESETS: [(&str, &str); 7] = [
    ("fig2", include_str!("../presets/fig2.json")),
    ("fig3", include_str!("../presets/fig3.json")),
    ("fig4", include_str!("../presets/fig4.json")),
    ("fig5", include_str!("../presets/fig5.json")),
    ("fig6", include_str!("../presets/fig6.json")),
    ("fig7", include_str!("../presets/fig7.json")),
    ("fig8", include_str!("../presets/fig8.json")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn source(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn load(name: &str) -> Result<ExperimentConfig> {
    let text = source(name).ok_or_else(|| {
        Error::InvalidSpec(format!("unknown preset `{name}` (available: {})", names().collect::<Vec<_>>().join(", ")))
    })?;
    ExperimentConfig::from_json(text)
}
