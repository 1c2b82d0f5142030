//! Named run configurations, one per standard scan or density family.
//!
//! Presets are partial config documents. A user config naming a preset is
//! merged on top of it, key by key.

const COMMON_GRID: &str = r#"
[grid]
r_min = 1e-4
r_max = 20.0
n_intervals = 16000
"#;

struct Preset {
    name: &'static str,
    summary: &'static str,
    body: &'static str,
}

const PRESETS: &[Preset] = &[
    Preset {
        name: "fig2",
        summary: "free model, E vs omega for m = -1, 0, 1 with the gauge sector on",
        body: r#"
model = "free"
m_values = [-1, 0, 1]
levels = 3

[physics]
B0 = 0.5
PhiB = 0.5

[scan]
parameter = "omega"
values = [0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0]

[convergence]
check = true
tol_rel = 1e-6
"#,
    },
    Preset {
        name: "fig3",
        summary: "free model, E vs m in [-5, 5], six radial levels",
        body: r#"
model = "free"
levels = 6

[physics]
omega = 1.0
B0 = 0.5
PhiB = 0.5

[scan]
parameter = "m"
values = [-5, -4, -3, -2, -1, 0, 1, 2, 3, 4, 5]
"#,
    },
    Preset {
        name: "fig4",
        summary: "free model, densities at m = -1 for omega = 0.5, 1, 2",
        body: r#"
model = "free"
m = -1
levels = 3

[physics]
B0 = 0.5
PhiB = 0.5

[density]
omegas = [0.5, 1.0, 2.0]
n_r = [0, 1, 2]
"#,
    },
    Preset {
        name: "fig5",
        summary: "Cornell (a = 1, b = 0.02), E vs omega with the gauge sector on",
        body: r#"
m_values = [-1, 0, 1]
levels = 3

[model]
kind = "cornell"
a = 1.0
b = 0.02

[physics]
B0 = 0.5
PhiB = 0.5

[scan]
parameter = "omega"
values = [0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0]
"#,
    },
    Preset {
        name: "fig6",
        summary: "Cornell, E vs a at omega = 1, b = 0.02, gauge sector on",
        body: r#"
m_values = [-1, 0, 1]
levels = 3

[model]
kind = "cornell"
a = 1.0
b = 0.02

[physics]
omega = 1.0
B0 = 0.5
PhiB = 0.5

[scan]
parameter = "cornell_a"
values = [0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0]
"#,
    },
    Preset {
        name: "fig7",
        summary: "Cornell, E vs b in [0, 0.08] at omega = 1, a = 1, gauge sector on",
        body: r#"
m_values = [-1, 0, 1]
levels = 3

[model]
kind = "cornell"
a = 1.0
b = 0.02

[physics]
omega = 1.0
B0 = 0.5
PhiB = 0.5

[scan]
parameter = "cornell_b"
values = [0.0, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08]

[convergence]
check = true
tol_rel = 1e-6
"#,
    },
    Preset {
        name: "fig8",
        summary: "Cornell (a = 1, b = 0.02), densities at m = 1 for omega = 0.5, 1, 2",
        body: r#"
m = 1
levels = 3

[model]
kind = "cornell"
a = 1.0
b = 0.02

[density]
omegas = [0.5, 1.0, 2.0]
n_r = [0, 1, 2]
"#,
    },
    Preset {
        name: "fig9",
        summary: "Kratzer, E vs A at D = 1, omega = 1, gauge sector on",
        body: r#"
m_values = [-1, 0, 1]
levels = 3

[model]
kind = "kratzer"
A = 1.0
D = 1.0

[physics]
omega = 1.0
B0 = 0.5
PhiB = 0.5

[scan]
parameter = "kratzer_A"
values = [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0]
"#,
    },
    Preset {
        name: "fig10",
        summary: "Kratzer, E vs D at A = 1, omega = 1",
        body: r#"
m_values = [-1, 0, 1]
levels = 3

[model]
kind = "kratzer"
A = 1.0
D = 1.0

[physics]
omega = 1.0

[scan]
parameter = "kratzer_D"
values = [0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0]
"#,
    },
    Preset {
        name: "fig11",
        summary: "Kratzer (A = D = 1), densities at m = 1 for omega = 0.5, 1, 2, gauge sector on",
        body: r#"
m = 1
levels = 3

[model]
kind = "kratzer"
A = 1.0
D = 1.0

[physics]
B0 = 0.5
PhiB = 0.5

[density]
omegas = [0.5, 1.0, 2.0]
n_r = [0, 1, 2]
"#,
    },
    Preset {
        name: "fig12",
        summary: "Morse small-oscillation, E vs r0 at D = 1, a = 0.2, gauge sector on",
        body: r#"
m_values = [-1, 0, 1]
levels = 3

[model]
kind = "morse_small"
D = 1.0
a = 0.2
r0 = 5.0

[physics]
omega = 1.0
B0 = 0.5
PhiB = 0.5

[scan]
parameter = "morse_r0"
values = [2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0]
"#,
    },
    Preset {
        name: "fig13",
        summary: "Morse small-oscillation, E vs a at D = 1, r0 = 5, gauge sector on",
        body: r#"
m_values = [-1, 0, 1]
levels = 3

[model]
kind = "morse_small"
D = 1.0
a = 0.3
r0 = 5.0

[physics]
omega = 1.0
B0 = 0.5
PhiB = 0.5

[scan]
parameter = "morse_a"
values = [0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5]
"#,
    },
    Preset {
        name: "fig14",
        summary: "Morse small-oscillation (1, 0.3, 5), E vs omega, gauge sector on",
        body: r#"
m_values = [-1, 0, 1]
levels = 3

[model]
kind = "morse_small"
D = 1.0
a = 0.3
r0 = 5.0

[physics]
B0 = 0.5
PhiB = 0.5

[scan]
parameter = "omega"
values = [0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0]
"#,
    },
    Preset {
        name: "fig15",
        summary: "Morse small-oscillation (1, 0.3, 5), densities at m = 1, gauge sector on",
        body: r#"
m = 1
levels = 3

[model]
kind = "morse_small"
D = 1.0
a = 0.3
r0 = 5.0

[physics]
B0 = 0.5
PhiB = 0.5

[density]
omegas = [0.5, 1.0, 2.0]
n_r = [0, 1, 2]
"#,
    },
    Preset {
        name: "cornell_m",
        summary: "Cornell (a = 1, b = 0.02), E vs m in [-5, 5], six radial levels",
        body: r#"
levels = 6

[model]
kind = "cornell"
a = 1.0
b = 0.02

[physics]
omega = 1.0
B0 = 0.5
PhiB = 0.5

[scan]
parameter = "m"
values = [-5, -4, -3, -2, -1, 0, 1, 2, 3, 4, 5]
"#,
    },
    Preset {
        name: "kratzer_omega",
        summary: "Kratzer (A = D = 1), E vs omega",
        body: r#"
m_values = [-1, 0, 1]
levels = 3

[model]
kind = "kratzer"
A = 1.0
D = 1.0

[scan]
parameter = "omega"
values = [0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0]
"#,
    },
    Preset {
        name: "morse_m",
        summary: "Morse small-oscillation (1, 0.2, 10), E vs m in [-5, 5], six radial levels",
        body: r#"
levels = 6

[model]
kind = "morse_small"
D = 1.0
a = 0.2
r0 = 10.0

[physics]
omega = 1.0

[scan]
parameter = "m"
values = [-5, -4, -3, -2, -1, 0, 1, 2, 3, 4, 5]
"#,
    },
];

/// Names of all shipped presets, in display order.
pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|p| p.name)
}

/// One-line description of a preset.
pub fn summary(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|p| p.name == name).map(|p| p.summary)
}

/// Full preset document, including the shared grid table.
pub fn document(name: &str) -> Option<String> {
    PRESETS
        .iter()
        .find(|p| p.name == name)
        .map(|p| format!("preset = \"{}\"\n{}{}", p.name, p.body, COMMON_GRID))
}
