//! Built-in experiment presets.
//!
//! The desk-scale variant runs in minutes; `full_grid = true` layers the
//! full grid on top.

pub struct Preset {
    pub name: &'static str,
    pub desk: &'static str,
    pub full: Option<&'static str>,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "fig1",
        desk: include_str!("../presets/fig1.toml"),
        full: None,
    },
    Preset {
        name: "dgi-grid",
        desk: include_str!("../presets/dgi-grid.toml"),
        full: Some(include_str!("../presets/dgi-grid.full.toml")),
    },
    Preset {
        name: "fdi-grid",
        desk: include_str!("../presets/fdi-grid.toml"),
        full: Some(include_str!("../presets/fdi-grid.full.toml")),
    },
    Preset {
        name: "mvn-grid",
        desk: include_str!("../presets/mvn-grid.toml"),
        full: Some(include_str!("../presets/mvn-grid.full.toml")),
    },
    Preset {
        name: "seir",
        desk: include_str!("../presets/seir.toml"),
        full: Some(include_str!("../presets/seir.full.toml")),
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}
