//! Shipped scenario configs, one per numerical experiment.

use super::config::ScenarioConfig;
use super::RunError;

pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub toml: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "periodic-2d-tm",
        summary: "2-D periodic TM plane wave, Fourier spectral discretization",
        toml: include_str!("../../presets/periodic-2d-tm.toml"),
    },
    Preset {
        name: "periodic-2d-tm-yee",
        summary: "2-D periodic TM plane wave, Yee staggered grid with integral recovery",
        toml: include_str!("../../presets/periodic-2d-tm-yee.toml"),
    },
    Preset {
        name: "pec-1d",
        summary: "1-D sourced problem between conducting walls, upwind characteristic scheme",
        toml: include_str!("../../presets/pec-1d.toml"),
    },
    Preset {
        name: "pec-1d-yee",
        summary: "1-D sourced problem between conducting walls, Yee scheme",
        toml: include_str!("../../presets/pec-1d-yee.toml"),
    },
    Preset {
        name: "impedance-1d",
        summary: "1-D sourced problem between impedance walls, upwind characteristic scheme",
        toml: include_str!("../../presets/impedance-1d.toml"),
    },
    Preset {
        name: "impedance-1d-yee",
        summary: "1-D sourced problem between impedance walls, Yee scheme",
        toml: include_str!("../../presets/impedance-1d-yee.toml"),
    },
    Preset {
        name: "interface-1d",
        summary: "plane wave hitting a matched-impedance dielectric interface at x = 0",
        toml: include_str!("../../presets/interface-1d.toml"),
    },
    Preset {
        name: "interface-1d-contrast",
        summary: "plane wave hitting an interface with an impedance jump (nonzero reflection)",
        toml: include_str!("../../presets/interface-1d-contrast.toml"),
    },
    Preset {
        name: "gaussian-pulse-inhomogeneous",
        summary: "Gaussian pulse crossing a smooth tanh permittivity ramp, checked against direct RK4",
        toml: include_str!("../../presets/gaussian-pulse-inhomogeneous.toml"),
    },
];

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|p| p.name)
}

pub fn find(name: &str) -> Result<&'static Preset, RunError> {
    PRESETS.iter().find(|p| p.name == name).ok_or_else(|| {
        RunError::Config(format!(
            "unknown preset `{name}` (available: {})",
            names().collect::<Vec<_>>().join(", ")
        ))
    })
}

pub fn load(name: &str) -> Result<ScenarioConfig, RunError> {
    ScenarioConfig::from_toml(find(name)?.toml)
}
