//! Figure recipes as TOML, parsed by the same path as user configs.

use crate::config::{ConfigError, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Run,
    Spectrum,
}

impl Kind {
    pub fn command(self) -> &'static str {
        match self {
            Kind::Run => "run",
            Kind::Spectrum => "spectrum",
        }
    }
}

pub struct Preset {
    pub name: &'static str,
    pub kind: Kind,
    pub about: &'static str,
    pub toml: &'static str,
}

/// Names that expand to several presets.
pub const GROUPS: &[(&str, &[&str])] = &[
    ("fig1", &["fig1a", "fig1b", "fig1c"]),
    ("fig2", &["fig2a", "fig2b", "fig2c"]),
    ("fig3", &["fig3a", "fig3b", "fig3c", "fig3d"]),
    ("fig7", &["fig7a", "fig7b"]),
];

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "fig1a",
        kind: Kind::Spectrum,
        about: "1D dispersion, theta = pi/4",
        toml: r#"name = "fig1a"

[walk]
family = "one_d"
theta = "pi/4"

[spectrum]
grid = 401
"#,
    },
    Preset {
        name: "fig1b",
        kind: Kind::Spectrum,
        about: "1D effective dispersion, theta = pi/4, phi = 2pi/3",
        toml: r#"name = "fig1b"

[walk]
family = "one_d"
theta = "pi/4"

[spectrum]
grid = 401
p = 3
"#,
    },
    Preset {
        name: "fig1c",
        kind: Kind::Spectrum,
        about: "1D effective dispersion, theta = pi/4, phi = 2pi/4",
        toml: r#"name = "fig1c"

[walk]
family = "one_d"
theta = "pi/4"

[spectrum]
grid = 401
p = 4
"#,
    },
    Preset {
        name: "fig2a",
        kind: Kind::Run,
        about: "Grover walk, no field, t = 600",
        toml: r#"name = "fig2a"
steps = 600
initial = "grover-symmetric"

[walk]
family = "grover2d"
"#,
    },
    Preset {
        name: "fig2b",
        kind: Kind::Run,
        about: "Grover walk, phi_x = 2pi/120, phi_y = 0, t = 600",
        toml: r#"name = "fig2b"
steps = 600
initial = "grover-symmetric"

[walk]
family = "grover2d"

[field]
x = "2pi*1/120"
"#,
    },
    Preset {
        name: "fig2c",
        kind: Kind::Run,
        about: "Grover walk, phi_x = phi_y = 2pi/120, t = 600",
        toml: r#"name = "fig2c"
steps = 600
initial = "grover-symmetric"

[walk]
family = "grover2d"

[field]
x = "2pi*1/120"
y = "2pi*1/120"

[periods]
series = ["sigma_d", "sigma_a"]
"#,
    },
    Preset {
        name: "fig3a",
        kind: Kind::Spectrum,
        about: "alternate walk dispersion, theta_x = theta_y = pi/4",
        toml: r#"name = "fig3a"

[walk]
family = "alternate2d"
delta_theta = 0.0
"#,
    },
    Preset {
        name: "fig3b",
        kind: Kind::Spectrum,
        about: "alternate walk stroboscopic dispersion, phi_x = 2pi/9, delta_theta = 0",
        toml: r#"name = "fig3b"

[walk]
family = "alternate2d"
delta_theta = 0.0

[spectrum]
p = 9
axis = "x"
"#,
    },
    Preset {
        name: "fig3c",
        kind: Kind::Spectrum,
        about: "alternate walk stroboscopic dispersion, phi_x = 2pi/8, delta_theta = 0",
        toml: r#"name = "fig3c"

[walk]
family = "alternate2d"
delta_theta = 0.0

[spectrum]
p = 8
axis = "x"
"#,
    },
    Preset {
        name: "fig3d",
        kind: Kind::Spectrum,
        about: "alternate walk stroboscopic dispersion, phi_x = 2pi/8, delta_theta = 0.05",
        toml: r#"name = "fig3d"

[walk]
family = "alternate2d"
delta_theta = 0.05

[spectrum]
p = 8
axis = "x"
"#,
    },
    Preset {
        name: "fig4",
        kind: Kind::Run,
        about: "alternate walk, phi_x = 2pi/120, delta_theta in {0, 0.1, 0.2}, t = 1000",
        toml: r#"name = "fig4"
steps = 1000
initial = "plus-i"

[walk]
family = "alternate2d"

[field]
x = "2pi*1/120"

[sweep]
delta_theta = [0.0, 0.1, 0.2]
"#,
    },
    Preset {
        name: "fig5",
        kind: Kind::Run,
        about: "alternate walk, phi_x = 2 phi_y = 2pi/120, delta_theta in {0, 0.1, 0.2}, t = 1000",
        toml: r#"name = "fig5"
steps = 1000
initial = "plus-i"
snapshot_times = [600]

[walk]
family = "alternate2d"

[field]
x = "2pi*1/120"
y = "2pi*1/240"

[sweep]
delta_theta = [0.0, 0.1, 0.2]
"#,
    },
    Preset {
        name: "fig6",
        kind: Kind::Run,
        about: "DFT walk, no field, t = 600",
        toml: r#"name = "fig6"
steps = 600
initial = "dft-symmetric"

[walk]
family = "dft2d"
"#,
    },
    Preset {
        name: "fig6a",
        kind: Kind::Spectrum,
        about: "DFT walk dispersion",
        toml: r#"name = "fig6a"

[walk]
family = "dft2d"
"#,
    },
    Preset {
        name: "fig7a",
        kind: Kind::Run,
        about: "DFT walk, phi_x = 2pi/120, phi_y = 0, t = 600",
        toml: r#"name = "fig7a"
steps = 600
initial = "dft-symmetric"

[walk]
family = "dft2d"

[field]
x = "2pi*1/120"
"#,
    },
    Preset {
        name: "fig7b",
        kind: Kind::Run,
        about: "DFT walk, phi_x = phi_y = 2pi/120, t = 600",
        toml: r#"name = "fig7b"
steps = 600
initial = "dft-symmetric"

[walk]
family = "dft2d"

[field]
x = "2pi*1/120"
y = "2pi*1/120"
"#,
    },
    Preset {
        name: "fig8",
        kind: Kind::Run,
        about: "Hadamard walk, no field, t = 600",
        toml: r#"name = "fig8"
steps = 600
initial = "dft-symmetric"

[walk]
family = "hadamard2d"
"#,
    },
    Preset {
        name: "fig8a",
        kind: Kind::Spectrum,
        about: "Hadamard walk dispersion",
        toml: r#"name = "fig8a"

[walk]
family = "hadamard2d"
"#,
    },
    Preset {
        name: "fig9",
        kind: Kind::Run,
        about: "Hadamard walk, phi_x = 2pi/120, phi_y = 0, t = 1000",
        toml: r#"name = "fig9"
steps = 1000
initial = "dft-symmetric"

[walk]
family = "hadamard2d"

[field]
x = "2pi*1/120"
"#,
    },
    Preset {
        name: "fig10",
        kind: Kind::Run,
        about: "Hadamard walk, phi_x = phi_y = 2pi/120, t = 1000",
        toml: r#"name = "fig10"
steps = 1000
initial = "dft-symmetric"

[walk]
family = "hadamard2d"

[field]
x = "2pi*1/120"
y = "2pi*1/120"
"#,
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

/// The presets a name stands for: itself, or the members of a group.
pub fn expand(name: &str) -> Result<Vec<&'static Preset>, ConfigError> {
    if let Some((_, members)) = GROUPS.iter().find(|(g, _)| *g == name) {
        return Ok(members
            .iter()
            .map(|m| find(m).expect("group member"))
            .collect());
    }
    find(name).map(|p| vec![p]).ok_or_else(|| {
        ConfigError(format!(
            "unknown preset '{name}' (see `eqwalk presets list`)"
        ))
    })
}

impl Preset {
    pub fn config(&self) -> RunConfig {
        RunConfig::from_toml(self.toml).expect("presets parse")
    }
}
