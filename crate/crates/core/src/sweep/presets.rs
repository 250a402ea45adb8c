//! Built-in sweeps, one per published figure panel.

use serde::Serialize;

use super::config::{
    Axis, CutoffSpec, FamilyKind, IndexRange, LabelSpec, Model, Output, Solver, SweepConfig, Variable,
};
use crate::label::Sign;
use crate::params::SystemParams;

#[derive(Clone, Debug, Serialize)]
pub struct Preset {
    pub name: &'static str,
    pub figure: &'static str,
    pub description: &'static str,
    pub config: SweepConfig,
}

fn params(omega_a: f64, omega_c: f64, g_ac: f64, g_om: f64) -> SystemParams {
    SystemParams { omega_a, omega_c, omega_m: 1.0, g_ac, g_om }
}

fn labels(families: &[FamilyKind], n: IndexRange, m: IndexRange) -> LabelSpec {
    LabelSpec { families: families.to_vec(), n, m, signs: Sign::BOTH.to_vec() }
}

fn config(
    name: &str,
    model: Model,
    params: SystemParams,
    axes: Vec<Axis>,
    solvers: &[Solver],
    labels: LabelSpec,
    outputs: &[Output],
) -> SweepConfig {
    SweepConfig {
        name: Some(name.to_string()),
        model,
        params,
        axes,
        solvers: solvers.to_vec(),
        labels,
        outputs: outputs.to_vec(),
        cutoffs: CutoffSpec::default(),
        tolerance: 1e-8,
        levels: None,
        workers: 1,
        notes: Vec::new(),
    }
}

const ALL_SOLVERS: [Solver; 3] = [Solver::Exact, Solver::Grwa, Solver::Rwa];
const ALL_OUTPUTS: [Output; 3] = [Output::Energies, Output::Fidelities, Output::Xi];

/// Energy sweep over `g_ac ∈ [0, 2ω_c]` with `ω_c = 5`, `g_om = 0.1`.
fn fig3(name: &str, omega_a: f64, families: &[FamilyKind], n: IndexRange, m: IndexRange) -> SweepConfig {
    config(
        name,
        Model::Hybrid,
        params(omega_a, 5.0, 0.0, 0.1),
        vec![Axis::linear(Variable::GAc, 0.0, 10.0, 41)],
        &ALL_SOLVERS,
        labels(families, n, m),
        &ALL_OUTPUTS,
    )
}

/// Upper end of the optomechanical sweep. The model is unbounded below in the
/// photon number, and past this coupling the tracked levels sit in a dense
/// band of strongly displaced states, so no exact level can be assigned.
const FIG4_G_OM_MAX: f64 = 0.4;

fn fig4(name: &str, g_ac: f64) -> SweepConfig {
    config(
        name,
        Model::Hybrid,
        params(5.0, 5.0, g_ac, 0.0),
        vec![Axis::linear(Variable::GOm, 0.0, FIG4_G_OM_MAX, 41)],
        &ALL_SOLVERS,
        labels(&[FamilyKind::Doublet], IndexRange::new(0, 1), IndexRange::new(0, 2)),
        &ALL_OUTPUTS,
    )
}

fn fig5(name: &str, omega_a: f64) -> SweepConfig {
    let mut l = labels(&[FamilyKind::QrmDoublet], IndexRange::single(3), IndexRange::single(0));
    l.signs = vec![Sign::Plus];
    config(
        name,
        Model::Rabi,
        params(omega_a, 1.0, 0.0, 0.0),
        vec![Axis::linear(Variable::GAc, 0.0, 3.0, 121)],
        &ALL_SOLVERS,
        l,
        &ALL_OUTPUTS,
    )
}

fn xi22(name: &str, g_om: f64, axes: Vec<Axis>, solvers: &[Solver]) -> SweepConfig {
    let mut l = labels(&[FamilyKind::Doublet], IndexRange::single(2), IndexRange::single(2));
    l.signs = vec![Sign::Plus];
    config(name, Model::Hybrid, params(1.0, 1.0, 0.0, g_om), axes, solvers, l, &[Output::Xi])
}

/// The static preset catalog.
pub fn presets() -> Vec<Preset> {
    use FamilyKind::*;
    let g_ac_map = Axis::linear(Variable::GAc, 0.0, 3.0, 121);
    let g_om_map = Axis::linear(Variable::GOm, 0.0, 1.0, 101);
    let mut fig4b = fig4("fig4b", 2.5);
    fig4b.notes.push(
        "g_ac = 2.5 omega_m follows the text; the figure caption lists 0.5 omega_m for both panels".to_string(),
    );
    let mut fig2b = config(
        "fig2b",
        Model::Rabi,
        params(5.0, 5.0, 0.0, 1.0),
        vec![Axis::linear(Variable::GAc, 0.0, 10.0, 201)],
        &[Solver::Grwa],
        labels(&[RabiFrequency, ShiftCoupling, EffectiveCoupling], IndexRange::List(vec![0, 4, 8]), IndexRange::single(0)),
        &[Output::Energies],
    );
    fig2b.notes.push("couplings are linear in g_om; g_om = omega_m makes the values read per unit g_om".to_string());
    vec![
        Preset {
            name: "fig2a",
            figure: "2(a)",
            description: "GRWA Rabi frequency T_0 vs g_ac; omega_a = omega_c = 5",
            config: config(
                "fig2a",
                Model::Rabi,
                params(5.0, 5.0, 0.0, 0.0),
                vec![Axis::linear(Variable::GAc, 0.0, 10.0, 201)],
                &[Solver::Grwa],
                labels(&[RabiFrequency], IndexRange::single(0), IndexRange::single(0)),
                &[Output::Energies],
            ),
        },
        Preset {
            name: "fig2b",
            figure: "2(b)",
            description: "g_shift, g_eff and T_N for N = 0, 4, 8 vs g_ac; omega_a = omega_c = 5",
            config: fig2b,
        },
        Preset {
            name: "fig3a",
            figure: "3(a)",
            description: "zero-polariton energies M = 0..5 vs g_ac; omega_a = omega_c = 5, g_om = 0.1",
            config: fig3("fig3a", 5.0, &[ZeroPolariton], IndexRange::single(0), IndexRange::new(0, 5)),
        },
        Preset {
            name: "fig3b",
            figure: "3(b)",
            description: "isolated-state energies N = 0..5 vs g_ac; omega_a = omega_c = 5, g_om = 0.1",
            config: fig3("fig3b", 5.0, &[Isolated], IndexRange::new(0, 5), IndexRange::single(0)),
        },
        Preset {
            name: "fig3c",
            figure: "3(c)",
            description: "doublet energies N = 0..1, M = 0..2 vs g_ac at resonance; g_om = 0.1",
            config: fig3("fig3c", 5.0, &[Doublet], IndexRange::new(0, 1), IndexRange::new(0, 2)),
        },
        Preset {
            name: "fig3d",
            figure: "3(d)",
            description: "doublet energies N = 0..1, M = 0..2 vs g_ac; omega_a = 10, omega_c = 5, g_om = 0.1",
            config: fig3("fig3d", 10.0, &[Doublet], IndexRange::new(0, 1), IndexRange::new(0, 2)),
        },
        Preset {
            name: "fig3e",
            figure: "3(e)",
            description: "fidelity of the N = 0, M = 2 doublet vs g_ac at resonance; g_om = 0.1",
            config: fig3("fig3e", 5.0, &[Doublet], IndexRange::single(0), IndexRange::single(2)),
        },
        Preset {
            name: "fig3f",
            figure: "3(f)",
            description: "fidelity of the N = 0, M = 2 doublet vs g_ac; omega_a = 10, omega_c = 5, g_om = 0.1",
            config: fig3("fig3f", 10.0, &[Doublet], IndexRange::single(0), IndexRange::single(2)),
        },
        Preset {
            name: "fig4a",
            figure: "4(a)",
            description: "doublet energies vs g_om; omega_a = omega_c = 5, g_ac = 0.5",
            config: fig4("fig4a", 0.5),
        },
        Preset {
            name: "fig4b",
            figure: "4(b)",
            description: "doublet energies vs g_om; omega_a = omega_c = 5, g_ac = 2.5",
            config: fig4b,
        },
        Preset {
            name: "fig5a",
            figure: "5(a)",
            description: "participation ratio of the N = 3 upper Rabi polariton vs g_ac; omega_a = omega_c = 1",
            config: fig5("fig5a", 1.0),
        },
        Preset {
            name: "fig5b",
            figure: "5(b)",
            description: "participation ratio of the N = 3 upper Rabi polariton vs g_ac; omega_c = 2 omega_a = 1",
            config: fig5("fig5b", 0.5),
        },
        Preset {
            name: "fig6a",
            figure: "6(a)",
            description: "GRWA participation ratio of (N, M) = (2, 2), + over (g_ac, g_om); all frequencies 1",
            config: xi22("fig6a", 0.0, vec![g_ac_map, g_om_map], &[Solver::Grwa]),
        },
        Preset {
            name: "fig6b",
            figure: "6(b)",
            description: "GRWA and RWA participation ratio of (2, 2), + vs g_ac at g_om = 0.05",
            config: xi22("fig6b", 0.05, vec![Axis::linear(Variable::GAc, 0.0, 3.0, 601)], &[Solver::Grwa, Solver::Rwa]),
        },
        Preset {
            name: "fig6c",
            figure: "6(c)",
            description: "RWA participation ratio of (2, 2) over (g_ac, g_om); all frequencies 1",
            config: xi22("fig6c", 0.0, vec![g_ac_map, g_om_map], &[Solver::Rwa]),
        },
        Preset {
            name: "fig6d",
            figure: "6(d)",
            description: "GRWA and RWA participation ratio of (2, 2), + vs g_om at g_ac = 0.3 and 1.5",
            config: xi22(
                "fig6d",
                0.0,
                vec![Axis::linear(Variable::GAc, 0.3, 1.5, 2), Axis::linear(Variable::GOm, 0.0, 1.0, 201)],
                &[Solver::Grwa, Solver::Rwa],
            ),
        },
    ]
}

pub fn preset(name: &str) -> Option<Preset> {
    presets().into_iter().find(|p| p.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_is_complete_and_valid() {
        let names: Vec<_> = presets().iter().map(|p| p.name).collect();
        for want in [
            "fig2a", "fig2b", "fig3a", "fig3b", "fig3c", "fig3d", "fig3e", "fig3f", "fig4a", "fig4b", "fig5a", "fig5b",
            "fig6a", "fig6b", "fig6c", "fig6d",
        ] {
            assert!(names.contains(&want), "{want}");
        }
        for p in presets() {
            p.config.validate().unwrap_or_else(|e| panic!("{}: {e}", p.name));
        }
    }

    #[test]
    fn fig4b_flags_caption() {
        let p = preset("fig4b").unwrap();
        assert_eq!(p.config.params.g_ac, 2.5);
        assert!(p.config.notes.iter().any(|n| n.contains("caption")));
    }

    #[test]
    fn fig5b_is_off_resonant() {
        let p = preset("fig5b").unwrap().config.params;
        assert_eq!(p.omega_c, 2.0 * p.omega_a);
    }
}
