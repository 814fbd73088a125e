//! Built-in experiment configurations.

use crate::error::{Error, Result};
use crate::harness::config::FlowConfig;

const PRESETS: &[(&str, &str)] = &[
    ("fig3", include_str!("../../presets/fig3.toml")),
    ("fig4", include_str!("../../presets/fig4.toml")),
    ("fig5a", include_str!("../../presets/fig5a.toml")),
    ("fig5b", include_str!("../../presets/fig5b.toml")),
    ("fig5c", include_str!("../../presets/fig5c.toml")),
    ("fig5d", include_str!("../../presets/fig5d.toml")),
    ("fig5e", include_str!("../../presets/fig5e.toml")),
    ("fig6", include_str!("../../presets/fig6.toml")),
    ("stationary", include_str!("../../presets/stationary.toml")),
    (
        "iso-ellipse",
        include_str!("../../presets/iso-ellipse.toml"),
    ),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn source(name: &str) -> Option<&'static str> {
    let name = if name == "counterexample" {
        "fig6"
    } else {
        name
    };
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn preset(name: &str) -> Result<FlowConfig> {
    let text = source(name).ok_or_else(|| {
        Error::config(
            "preset",
            format!(
                "unknown preset `{name}`; known: {}",
                names().collect::<Vec<_>>().join(", ")
            ),
        )
    })?;
    FlowConfig::from_toml(text)
}
