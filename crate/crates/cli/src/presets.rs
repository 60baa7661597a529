//! Bundled experiment configurations. They only use built-in systems and
//! fix every seed, so their outputs are bit-stable.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetKind {
    /// Capacity experiment for `ipc`, `tipc`, `simulate` and `basis`.
    Experiment,
    /// NARMA10 analysis suite for `narma`.
    Suite,
}

pub struct Preset {
    pub name: &'static str,
    pub kind: PresetKind,
    pub text: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "fig1a_legendre",
        kind: PresetKind::Experiment,
        text: include_str!("../presets/fig1a_legendre.toml"),
    },
    Preset {
        name: "fig1b_limit_cycle",
        kind: PresetKind::Experiment,
        text: include_str!("../presets/fig1b_limit_cycle.toml"),
    },
    Preset {
        name: "esn1d_tipc",
        kind: PresetKind::Experiment,
        text: include_str!("../presets/esn1d_tipc.toml"),
    },
    Preset {
        name: "fig2a_narma",
        kind: PresetKind::Experiment,
        text: include_str!("../presets/fig2a_narma.toml"),
    },
    Preset {
        name: "fig2b",
        kind: PresetKind::Suite,
        text: include_str!("../presets/fig2b.toml"),
    },
    Preset {
        name: "fig3",
        kind: PresetKind::Suite,
        text: include_str!("../presets/fig3.toml"),
    },
    Preset {
        name: "figA1",
        kind: PresetKind::Suite,
        text: include_str!("../presets/figA1.toml"),
    },
    Preset {
        name: "figA3",
        kind: PresetKind::Suite,
        text: include_str!("../presets/figA3.toml"),
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

pub fn names(kind: PresetKind) -> Vec<&'static str> {
    PRESETS.iter().filter(|p| p.kind == kind).map(|p| p.name).collect()
}
