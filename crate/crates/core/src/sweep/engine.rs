use std::time::Instant;

use log::{debug, info};
use rayon::prelude::*;
use serde::Serialize;

use super::config::{CutoffSpec, FamilyKind, Model, Output, RowLabel, Solver, SweepConfig};
use crate::entanglement::{participation_ratio_split, xi_analytic, xi_qrm_ground, xi_qrm_grwa, xi_qrm_rwa};
use crate::error::{Error, Result};
use crate::exact::{
    converge_with, hybrid_energies, match_embedded, match_qrm, solve_hybrid, solve_qrm, Assignment,
    ConvergenceOptions, ConvergenceReport, EigenSolution,
};
use crate::hybrid::{analytic_energy, embedding_cutoffs, hybrid_state_embed, sector_params};
use crate::label::{AnalyticStateLabel, Family, QrmLabel, Sign};
use crate::ops::{Cutoffs, SpaceLayout};
use crate::params::SystemParams;
use crate::qrm::{grwa_energy, grwa_frequencies, grwa_ground_energy, grwa_state_embed, jc_energy, jc_vector, Embedded};

/// One `(grid point, label, solver)` result.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub axis1: f64,
    pub axis2: Option<f64>,
    pub solver: Solver,
    pub label: RowLabel,
    /// In units of `omega_m`.
    pub energy: Option<f64>,
    pub fidelity: Option<f64>,
    pub xi: Option<f64>,
    /// Cutoffs of the exact solve behind this row, if any.
    pub cutoffs: Option<Cutoffs>,
    /// Eigen-residual of that solve.
    pub residual: Option<f64>,
}

/// Aggregate health of a sweep, stored in the manifest.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub grid_points: usize,
    pub rows: usize,
    pub max_residual: Option<f64>,
    /// Largest truncation loss of an embedded analytic state.
    pub max_truncation_loss: Option<f64>,
    pub max_dimension: Option<usize>,
    pub max_point_seconds: f64,
}

/// Cutoff search performed at one grid corner.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CornerConvergence {
    pub point: Vec<f64>,
    /// `"matched"`: the eigenvalues assigned to the tracked labels;
    /// `"lowest"`: the `levels` lowest eigenvalues.
    pub target: &'static str,
    pub levels: usize,
    pub report: ConvergenceReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutoffResolution {
    /// `"auto"` or `"explicit"`.
    pub mode: &'static str,
    pub cutoffs: Cutoffs,
    pub corners: Vec<CornerConvergence>,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub cutoffs: Option<CutoffResolution>,
    pub diagnostics: Diagnostics,
    pub wall_seconds: f64,
}

struct PointResult {
    rows: Vec<SweepRow>,
    residual: Option<f64>,
    loss: Option<f64>,
    dim: Option<usize>,
    seconds: f64,
}

fn needs_exact(cfg: &SweepConfig) -> bool {
    let states = cfg.labels.families.iter().any(|f| !f.is_quantity());
    states
        && (cfg.runs(Solver::Exact)
            || (cfg.wants(Output::Fidelities) && (cfg.runs(Solver::Grwa) || cfg.runs(Solver::Rwa))))
}

fn hybrid_family(l: &RowLabel) -> Family {
    match l.family {
        FamilyKind::ZeroPolariton => Family::ZeroPolariton { m: l.m.unwrap_or(0) },
        FamilyKind::Isolated => Family::Isolated { n: l.n.unwrap_or(0) },
        _ => Family::Doublet { n: l.n.unwrap_or(0), m: l.m.unwrap_or(0), sign: l.sign.unwrap_or(Sign::Plus) },
    }
}

fn qrm_label(l: &RowLabel) -> QrmLabel {
    match l.family {
        FamilyKind::QrmGround => QrmLabel::Ground,
        _ => QrmLabel::Doublet { n: l.n.unwrap_or(0), sign: l.sign.unwrap_or(Sign::Plus) },
    }
}

fn max_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn grwa_hybrid_states(p: &SystemParams, c: &Cutoffs, labels: &[RowLabel]) -> Result<Vec<(AnalyticStateLabel, Embedded)>> {
    labels
        .iter()
        .filter(|l| l.family.is_hybrid_state())
        .map(|l| {
            let label = AnalyticStateLabel::grwa(hybrid_family(l));
            Ok((label, hybrid_state_embed(label, p, c)?))
        })
        .collect()
}

fn grwa_qrm_states(p: &SystemParams, c: &Cutoffs, labels: &[RowLabel]) -> Result<Vec<(QrmLabel, Embedded)>> {
    labels
        .iter()
        .filter(|l| l.family.is_rabi_state())
        .map(|l| {
            let label = qrm_label(l);
            Ok((label, grwa_state_embed(label, p, c.photon)?))
        })
        .collect()
}

/// Elementwise largest embedding cutoffs over the grid.
fn embedding_start(cfg: &SweepConfig) -> Cutoffs {
    let (n, m) = cfg.index_bounds();
    let (mut pc, mut fc) = (2, 2);
    for point in cfg.grid() {
        let c = embedding_cutoffs(&cfg.params_at(&point), n, m);
        pc = pc.max(c.photon.dim());
        fc = fc.max(c.phonon.dim());
    }
    if cfg.model == Model::Rabi {
        fc = 2;
    }
    Cutoffs::new(pc, fc).expect("at least two levels")
}

fn corner_points(cfg: &SweepConfig) -> Vec<Vec<f64>> {
    let ends: Vec<[f64; 2]> = cfg
        .axes
        .iter()
        .map(|a| {
            let v = a.values();
            [v[0], v[v.len() - 1]]
        })
        .collect();
    let mut out: Vec<Vec<f64>> = match ends.as_slice() {
        [a] => a.iter().map(|&x| vec![x]).collect(),
        [a, b] => a.iter().flat_map(|&x| b.iter().map(move |&y| vec![x, y])).collect(),
        _ => Vec::new(),
    };
    out.dedup();
    out
}

/// Exact eigenvalues assigned to the tracked hybrid labels, sorted so that
/// near-degenerate tracked pairs may swap eigenvectors freely.
fn matched_hybrid_energies(p: &SystemParams, c: &Cutoffs, labels: &[RowLabel]) -> Result<Vec<f64>> {
    let sol = solve_hybrid(p, c, c.dim())?;
    let states = grwa_hybrid_states(p, c, labels)?;
    let refs: Vec<_> = states.iter().map(|(l, e)| (*l, e)).collect();
    let mut e = match_embedded(&sol, &refs)?
        .entries
        .into_iter()
        .map(|(_, a)| a.map(|a| sol.energies[a.index]).ok_or(Error::Empty("unmatched exact state")))
        .collect::<Result<Vec<f64>>>()?;
    e.sort_by(f64::total_cmp);
    Ok(e)
}

/// Index of the highest eigenvector claimed by any analytic GRWA state.
fn highest_match(sol: &EigenSolution, states: &[(AnalyticStateLabel, Embedded)]) -> Result<usize> {
    let refs: Vec<_> = states.iter().map(|(l, e)| (*l, e)).collect();
    let a = match_embedded(sol, &refs)?;
    Ok(a.entries.iter().filter_map(|(_, x)| x.map(|x| x.index)).max().unwrap_or(0))
}

// Without an explicit `levels` the search converges the lowest eigenvalues up
// to the highest one claimed by a tracked label. The optomechanical term makes
// the spectrum unbounded below (photon number n costs about
// ω_c n − g_om² n²/ω_m), so at strong g_om those drift with the photon cutoff
// forever; the search then falls back to the matched eigenvalues themselves.
fn converge_corner(cfg: &SweepConfig, point: &[f64], start: Cutoffs, opts: ConvergenceOptions) -> Result<CornerConvergence> {
    let p = cfg.params_at(point);
    let labels = cfg.row_labels();
    let tol = cfg.tolerance;
    let (target, levels, report) = match (cfg.model, cfg.levels) {
        (Model::Hybrid, Some(k)) => ("lowest", k, converge_with(start, tol, opts, |c| hybrid_energies(&p, c, k))?),
        (Model::Rabi, Some(k)) => {
            ("lowest", k, converge_with(start, tol, opts, |c| Ok(solve_qrm(&p, c.photon, k)?.energies))?)
        }
        (Model::Hybrid, None) => {
            let sol = solve_hybrid(&p, &start, start.dim())?;
            let k = highest_match(&sol, &grwa_hybrid_states(&p, &start, &labels)?)? + 1;
            match converge_with(start, tol, opts, |c| hybrid_energies(&p, c, k)) {
                Ok(r) => ("lowest", k, r),
                Err(Error::CutoffCeiling(msg)) => {
                    debug!("corner {point:?}: lowest {k} levels do not converge ({msg}); following matched levels");
                    let n = labels.iter().filter(|l| l.family.is_hybrid_state()).count();
                    ("matched", n, converge_with(start, tol, opts, |c| matched_hybrid_energies(&p, c, &labels))?)
                }
                Err(e) => return Err(e),
            }
        }
        (Model::Rabi, None) => {
            let sol = solve_qrm(&p, start.photon, 2 * start.photon.dim())?;
            let states = grwa_qrm_states(&p, &start, &labels)?;
            let refs: Vec<_> = states.iter().map(|(l, e)| (*l, e)).collect();
            let a = match_qrm(&sol, &refs)?;
            let k = a.entries.iter().filter_map(|(_, x)| x.map(|x| x.index)).max().unwrap_or(0) + 1;
            ("lowest", k, converge_with(start, tol, opts, |c| Ok(solve_qrm(&p, c.photon, k)?.energies))?)
        }
    };
    debug!("corner {:?}: {} after {} solves ({target})", point, report.cutoffs, report.evaluations);
    Ok(CornerConvergence { point: point.to_vec(), target, levels, report })
}

/// Cutoffs shared by every grid point: explicit, or the elementwise largest
/// result of the convergence search at the grid corners, started from the
/// smallest cutoffs that embed every tracked analytic state.
pub fn resolve_cutoffs(cfg: &SweepConfig) -> Result<Option<CutoffResolution>> {
    if !needs_exact(cfg) {
        return Ok(None);
    }
    match cfg.cutoffs {
        CutoffSpec::Explicit(c) => {
            Ok(Some(CutoffResolution { mode: "explicit", cutoffs: Cutoffs::new(c.photon.dim(), c.phonon.dim())?, corners: vec![] }))
        }
        CutoffSpec::Keyword(_) => {
            let start = embedding_start(cfg);
            let opts = ConvergenceOptions::default();
            let corners: Vec<CornerConvergence> = corner_points(cfg)
                .par_iter()
                .map(|pt| converge_corner(cfg, pt, start, opts))
                .collect::<Result<_>>()?;
            let (mut pc, mut fc) = (start.photon.dim(), start.phonon.dim());
            for c in &corners {
                pc = pc.max(c.report.cutoffs.photon.dim());
                fc = fc.max(c.report.cutoffs.phonon.dim());
            }
            if cfg.model == Model::Rabi {
                fc = 2;
            }
            let cutoffs = Cutoffs::new(pc, fc)?;
            info!("auto cutoffs: {cutoffs}");
            Ok(Some(CutoffResolution { mode: "auto", cutoffs, corners }))
        }
    }
}

struct Context<'a> {
    cfg: &'a SweepConfig,
    labels: Vec<RowLabel>,
    cutoffs: Option<Cutoffs>,
}

impl Context<'_> {
    fn row(&self, point: &[f64], solver: Solver, label: RowLabel) -> SweepRow {
        SweepRow {
            axis1: point[0],
            axis2: point.get(1).copied(),
            solver,
            label,
            energy: None,
            fidelity: None,
            xi: None,
            cutoffs: None,
            residual: None,
        }
    }

    fn finish_row(&self, mut r: SweepRow) -> SweepRow {
        if !self.cfg.wants(Output::Energies) {
            r.energy = None;
        }
        if !self.cfg.wants(Output::Fidelities) {
            r.fidelity = None;
        }
        if !self.cfg.wants(Output::Xi) {
            r.xi = None;
        }
        r
    }

    fn quantity(&self, p: &SystemParams, l: &RowLabel) -> f64 {
        let n = l.n.unwrap_or(0);
        let v = match l.family {
            FamilyKind::RabiFrequency => grwa_frequencies(n, p).t_n,
            FamilyKind::ShiftCoupling => sector_params(n, p).g_shift,
            _ => sector_params(n, p).g_eff,
        };
        v / p.omega_m
    }

    fn evaluate(&self, point: &[f64]) -> Result<PointResult> {
        let start = Instant::now();
        let p = self.cfg.params_at(point);
        let mut out = match self.cfg.model {
            Model::Hybrid => self.hybrid_point(point, &p)?,
            Model::Rabi => self.rabi_point(point, &p)?,
        };
        for l in self.labels.iter().filter(|l| l.family.is_quantity()) {
            let mut r = self.row(point, Solver::Grwa, *l);
            r.energy = Some(self.quantity(&p, l));
            out.rows.push(r);
        }
        out.rows.sort_by(|a, b| a.label.cmp(&b.label).then(a.solver.cmp(&b.solver)));
        out.rows = out.rows.into_iter().map(|r| self.finish_row(r)).collect();
        out.seconds = start.elapsed().as_secs_f64();
        Ok(out)
    }

    fn exact_hybrid(&self, p: &SystemParams) -> Result<Option<(Cutoffs, EigenSolution)>> {
        let Some(c) = self.cutoffs else { return Ok(None) };
        let k = self.cfg.levels.unwrap_or(c.dim()).min(c.dim());
        Ok(Some((c, solve_hybrid(p, &c, k)?)))
    }

    fn hybrid_point(&self, point: &[f64], p: &SystemParams) -> Result<PointResult> {
        let labels: Vec<RowLabel> = self.labels.iter().copied().filter(|l| l.family.is_hybrid_state()).collect();
        let mut rows = Vec::new();
        let (mut residual, mut loss, mut dim) = (None, None, None);
        let mut grwa_match: Vec<Option<Assignment>> = vec![None; labels.len()];
        let mut rwa_match: Vec<Option<Assignment>> = vec![None; labels.len()];
        let exact = if labels.is_empty() { None } else { self.exact_hybrid(p)? };
        if let Some((c, sol)) = &exact {
            residual = Some(sol.max_residual);
            dim = Some(c.dim());
            let states = grwa_hybrid_states(p, c, &labels)?;
            loss = states.iter().map(|(_, e)| e.truncation_loss).reduce(f64::max);
            let refs: Vec<_> = states.iter().map(|(l, e)| (*l, e)).collect();
            grwa_match = match_embedded(sol, &refs)?.entries.into_iter().map(|(_, a)| a).collect();
            if self.cfg.runs(Solver::Rwa) && self.cfg.wants(Output::Fidelities) {
                let rwa: Vec<_> = labels
                    .iter()
                    .map(|l| {
                        let label = AnalyticStateLabel::rwa(hybrid_family(l));
                        Ok((label, hybrid_state_embed(label, p, c)?))
                    })
                    .collect::<Result<_>>()?;
                loss = max_opt(loss, rwa.iter().map(|(_, e)| e.truncation_loss).reduce(f64::max));
                let refs: Vec<_> = rwa.iter().map(|(l, e)| (*l, e)).collect();
                rwa_match = match_embedded(sol, &refs)?.entries.into_iter().map(|(_, a)| a).collect();
            }
        }
        for (i, l) in labels.iter().enumerate() {
            let family = hybrid_family(l);
            for &solver in &self.cfg.solvers {
                let mut r = self.row(point, solver, *l);
                match solver {
                    Solver::Exact => {
                        let (c, sol) = exact.as_ref().expect("exact solve ran");
                        let a = grwa_match[i].ok_or(Error::Empty("unmatched exact state"))?;
                        r.energy = Some(sol.energies[a.index] / p.omega_m);
                        if self.cfg.wants(Output::Xi) {
                            let v = sol.real_state(a.index).expect("real solve");
                            r.xi = Some(participation_ratio_split(&v, 2 * c.photon.dim(), c.phonon.dim())?);
                        }
                        r.cutoffs = Some(*c);
                        r.residual = Some(sol.max_residual);
                    }
                    Solver::Grwa | Solver::Rwa => {
                        let label = match solver {
                            Solver::Grwa => AnalyticStateLabel::grwa(family),
                            _ => AnalyticStateLabel::rwa(family),
                        };
                        r.energy = Some(analytic_energy(label, p) / p.omega_m);
                        r.xi = Some(xi_analytic(label, p));
                        let m = if solver == Solver::Grwa { grwa_match[i] } else { rwa_match[i] };
                        r.fidelity = m.map(|a| a.fidelity);
                        if let Some((c, sol)) = &exact {
                            r.cutoffs = Some(*c);
                            r.residual = Some(sol.max_residual);
                        }
                    }
                }
                rows.push(r);
            }
        }
        Ok(PointResult { rows, residual, loss, dim, seconds: 0.0 })
    }

    fn rabi_point(&self, point: &[f64], p: &SystemParams) -> Result<PointResult> {
        let labels: Vec<RowLabel> = self.labels.iter().copied().filter(|l| l.family.is_rabi_state()).collect();
        let mut rows = Vec::new();
        let (mut residual, mut loss, mut dim) = (None, None, None);
        let mut grwa_match: Vec<Option<Assignment>> = vec![None; labels.len()];
        let mut rwa_match: Vec<Option<Assignment>> = vec![None; labels.len()];
        let exact = match (self.cutoffs, labels.is_empty()) {
            (Some(c), false) => {
                let k = self.cfg.levels.unwrap_or(2 * c.photon.dim()).min(2 * c.photon.dim());
                Some((c, solve_qrm(p, c.photon, k)?))
            }
            _ => None,
        };
        if let Some((c, sol)) = &exact {
            residual = Some(sol.max_residual);
            dim = Some(2 * c.photon.dim());
            let states = grwa_qrm_states(p, c, &labels)?;
            loss = states.iter().map(|(_, e)| e.truncation_loss).reduce(f64::max);
            let refs: Vec<_> = states.iter().map(|(l, e)| (*l, e)).collect();
            grwa_match = match_qrm(sol, &refs)?.entries.into_iter().map(|(_, a)| a).collect();
            if self.cfg.runs(Solver::Rwa) && self.cfg.wants(Output::Fidelities) {
                let layout = SpaceLayout::atom_photon(c.photon);
                let jc: Vec<_> = labels
                    .iter()
                    .map(|l| {
                        let label = qrm_label(l);
                        let v = jc_vector(label, p, c.photon.dim())?;
                        Ok((label, Embedded::finish(layout.clone(), v, 0.0, "photon")?))
                    })
                    .collect::<Result<_>>()?;
                let refs: Vec<_> = jc.iter().map(|(l, e)| (*l, e)).collect();
                rwa_match = match_qrm(sol, &refs)?.entries.into_iter().map(|(_, a)| a).collect();
            }
        }
        for (i, l) in labels.iter().enumerate() {
            let label = qrm_label(l);
            for &solver in &self.cfg.solvers {
                let mut r = self.row(point, solver, *l);
                match solver {
                    Solver::Exact => {
                        let (c, sol) = exact.as_ref().expect("exact solve ran");
                        let a = grwa_match[i].ok_or(Error::Empty("unmatched exact state"))?;
                        r.energy = Some(sol.energies[a.index] / p.omega_m);
                        let v = sol.real_state(a.index).expect("real solve");
                        r.xi = Some(participation_ratio_split(&v, 2, c.photon.dim())?);
                        r.cutoffs = Some(*c);
                        r.residual = Some(sol.max_residual);
                    }
                    Solver::Grwa => {
                        r.energy = Some(match label {
                            QrmLabel::Ground => grwa_ground_energy(p),
                            QrmLabel::Doublet { n, sign } => grwa_energy(n, sign, p),
                        } / p.omega_m);
                        r.xi = Some(match label {
                            QrmLabel::Ground => xi_qrm_ground(p).xi,
                            QrmLabel::Doublet { n, sign } => xi_qrm_grwa(n, sign, p).xi,
                        });
                        r.fidelity = grwa_match[i].map(|a| a.fidelity);
                    }
                    Solver::Rwa => {
                        r.energy = Some(jc_energy(label, p) / p.omega_m);
                        r.xi = Some(match label {
                            QrmLabel::Ground => 1.0,
                            QrmLabel::Doublet { n, .. } => xi_qrm_rwa(n, p).xi,
                        });
                        r.fidelity = rwa_match[i].map(|a| a.fidelity);
                    }
                }
                if let (Some((c, sol)), true) = (&exact, solver != Solver::Exact) {
                    r.cutoffs = Some(*c);
                    r.residual = Some(sol.max_residual);
                }
                rows.push(r);
            }
        }
        Ok(PointResult { rows, residual, loss, dim, seconds: 0.0 })
    }
}

/// Run a validated sweep. Rows come out in canonical order: grid points with
/// the outer axis slowest, then labels, then solvers (exact, grwa, rwa).
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let started = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {} workers: {e}", cfg.workers)))?;
    pool.install(|| {
        let cutoffs = resolve_cutoffs(cfg)?;
        let ctx = Context { cfg, labels: cfg.row_labels(), cutoffs: cutoffs.as_ref().map(|c| c.cutoffs) };
        let grid = cfg.grid();
        let points: Vec<PointResult> = grid.par_iter().map(|pt| ctx.evaluate(pt)).collect::<Result<_>>()?;
        let mut diagnostics = Diagnostics { grid_points: grid.len(), ..Default::default() };
        let mut rows = Vec::new();
        for pr in points {
            diagnostics.max_residual = max_opt(diagnostics.max_residual, pr.residual);
            diagnostics.max_truncation_loss = max_opt(diagnostics.max_truncation_loss, pr.loss);
            diagnostics.max_dimension = diagnostics.max_dimension.max(pr.dim);
            diagnostics.max_point_seconds = diagnostics.max_point_seconds.max(pr.seconds);
            rows.extend(pr.rows);
        }
        diagnostics.rows = rows.len();
        Ok(SweepResult { rows, cutoffs, diagnostics, wall_seconds: started.elapsed().as_secs_f64() })
    })
}

/// Rows a sweep will emit: grid size × labels × solvers, where scalar
/// families count for the grwa solver only.
pub fn expected_rows(cfg: &SweepConfig) -> usize {
    let labels = cfg.row_labels();
    let states = labels.iter().filter(|l| !l.family.is_quantity()).count();
    let quantities = labels.len() - states;
    cfg.grid().len() * (states * cfg.solvers.len() + quantities)
}
