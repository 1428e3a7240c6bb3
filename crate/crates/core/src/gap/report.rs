use nalgebra::DMatrix;
use serde_json::{json, Value};

use crate::bundles::segre_at;
use crate::error::{Error, Result};
use crate::linalg;
use crate::partitions::Partition;
use crate::scalar::C64;

use super::family::{MatrixFamily, Path};
use super::subspace::{gap_distance, smallest_singular_subspace, Subspace};

/// Default relative rank tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Default threshold for Cauchy convergence and cross-path agreement.
pub const DEFAULT_LIMIT_TOL: f64 = 1e-3;

/// Settings for probing the Jordanizability conditions near a point.
#[derive(Debug, Clone)]
pub struct ProbeConfig {
    /// Curves through the point; `None` uses the coordinate rays and the
    /// diagonal ray.
    pub paths: Option<Vec<Path>>,
    /// Parameters for the limit probes, decreasing to 0.
    pub samples: Vec<f64>,
    /// Parameters for the Segre-constancy probe; kept moderate so that
    /// rank decisions stay well separated from rounding.
    pub segre_samples: Vec<f64>,
    /// Relative rank tolerance.
    pub tol: f64,
    /// Cauchy and agreement threshold for limits.
    pub limit_tol: f64,
}

/// `2^{-first}, …, 2^{-last}`.
pub fn dyadic_samples(first: i32, last: i32) -> Vec<f64> {
    (first..=last).map(|j| 2f64.powi(-j)).collect()
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            paths: None,
            samples: dyadic_samples(1, 14),
            segre_samples: dyadic_samples(1, 8),
            tol: DEFAULT_TOL,
            limit_tol: DEFAULT_LIMIT_TOL,
        }
    }
}

/// Coordinate rays and the diagonal ray through `x0`, without duplicates.
pub fn default_paths(x0: &[C64]) -> Vec<Path> {
    let d = x0.len();
    let mut dirs: Vec<Vec<C64>> =
        (0..d).map(|i| (0..d).map(|j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect()).collect();
    let diag = vec![C64::new(1.0, 0.0); d];
    if !dirs.contains(&diag) {
        dirs.push(diag);
    }
    dirs.iter().map(|v| Path::ray(x0, v)).collect()
}

/// Whether the branch values at a point are pairwise separated.
fn off_coalescence(values: &[C64], tol: f64) -> bool {
    let scale = values.iter().map(|v| v.norm()).fold(1.0, f64::max);
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            if (values[i] - values[j]).norm() <= tol * scale {
                return false;
            }
        }
    }
    true
}

/// Generalized eigenspace of a branch with known multiplicity `m`: the `m`
/// smallest right singular directions of `(A − λ)^m`.
fn branch_eigenspace(a: &DMatrix<C64>, lambda: C64, m: usize) -> Subspace {
    let n = a.nrows();
    let shifted = a - DMatrix::<C64>::identity(n, n) * lambda;
    let mut power = DMatrix::<C64>::identity(n, n);
    for _ in 0..m {
        power = &power * &shifted;
    }
    smallest_singular_subspace(&power, m)
}

/// Jordan block sizes of a branch, read from the nilpotent part of `A`
/// compressed to the branch eigenspace.
fn branch_segre(a: &DMatrix<C64>, lambda: C64, m: usize, tol: f64) -> Vec<u32> {
    let n = a.nrows();
    let v = branch_eigenspace(a, lambda, m).basis().clone();
    let nil = v.adjoint() * (a - DMatrix::<C64>::identity(n, n) * lambda) * &v;
    let cut = tol * linalg::spectral_norm(a).max(1.0);
    let mut ranks = vec![m];
    let mut power = DMatrix::<C64>::identity(m, m);
    for _ in 0..m {
        power = &power * &nil;
        ranks.push(linalg::singular_values(&power).iter().filter(|&&s| s > cut).count());
    }
    let last = ranks.len() - 1;
    ranks[last] = 0;
    crate::bundles::blocks_from_ranks(&ranks)
}

fn sample_error(t: f64, x: &[C64]) -> Error {
    Error::CoalescentSample(format!("t = {t:e}, x = {x:?}"))
}

/// Probes the limit of a branch's generalized eigenspace along a path.
///
/// Returns the eigenspace at the last sample when consecutive gap distances
/// end below `tol` without growing; `None` otherwise. Samples on the
/// coalescence locus are rejected.
pub fn limit_along_path(
    family: &MatrixFamily,
    branch: usize,
    path: &Path,
    samples: &[f64],
    tol: f64,
) -> Result<Option<Subspace>> {
    Ok(probe_path(family, branch, path, samples, tol)?.limit)
}

/// Full record of a single limit probe.
#[derive(Debug, Clone)]
pub struct PathProbe {
    pub samples: Vec<f64>,
    pub gaps: Vec<f64>,
    pub last: Subspace,
    pub limit: Option<Subspace>,
}

fn probe_path(family: &MatrixFamily, branch: usize, path: &Path, samples: &[f64], tol: f64) -> Result<PathProbe> {
    let b = family.branches().get(branch).ok_or_else(|| Error::InvalidInput(format!("no branch {branch}")))?;
    if path.vars() != family.vars() {
        return Err(Error::Mismatch("path and family dimensions differ".into()));
    }
    if samples.len() < 2 {
        return Err(Error::InvalidInput("at least two samples are needed".into()));
    }
    let mut spaces = Vec::with_capacity(samples.len());
    for &t in samples {
        let x = path.eval(C64::new(t, 0.0));
        let values = family.branch_values(&x);
        if !off_coalescence(&values, DEFAULT_TOL) {
            return Err(sample_error(t, &x));
        }
        let a = family.eval(&x);
        spaces.push(branch_eigenspace(&a, values[branch], b.multiplicity));
    }
    let gaps: Vec<f64> = spaces.windows(2).map(|w| gap_distance(&w[0], &w[1])).collect::<Result<_>>()?;
    let last_gap = *gaps.last().expect("two samples give one gap");
    let shrinking = gaps.len() < 2 || last_gap <= 1.5 * gaps[gaps.len() - 2] || last_gap <= 1e-10;
    let last = spaces.pop().expect("samples are non-empty");
    let limit = (last_gap <= tol && shrinking).then(|| last.clone());
    Ok(PathProbe { samples: samples.to_vec(), gaps, last, limit })
}

/// Outcome of one path for one branch in a report.
#[derive(Debug, Clone)]
pub enum PathOutcome {
    /// The path runs inside the coalescence locus.
    Skipped,
    Probed(PathProbe),
}

/// Conditions of the holomorphic Jordanizability criterion at a point.
#[derive(Debug, Clone)]
pub struct JordanizabilityReport {
    /// Per-branch Segre data constant off the coalescence locus and
    /// compatible with the Jordan structure at the point.
    pub cond1: bool,
    /// Per branch: the eigenspace limit exists and agrees on all paths.
    pub cond2: Vec<bool>,
    /// The limits form a direct sum decomposition of `ℂⁿ`.
    pub cond3: bool,
    pub verdict: bool,
    /// Common limit per branch when it exists.
    pub limits: Vec<Option<Subspace>>,
    /// Segre characteristic per branch off the locus (first valid sample).
    pub branch_segre: Vec<Vec<u32>>,
    /// Segre characteristic of `A(x0)` at each distinct eigenvalue, with
    /// the union of the branch characteristics that meet there.
    pub base_segre: Vec<(Vec<u32>, Vec<u32>)>,
    /// Off-coalescence samples used for cond1 and samples skipped.
    pub segre_samples_used: usize,
    pub segre_samples_skipped: usize,
    /// `outcomes[branch][path]`.
    pub outcomes: Vec<Vec<PathOutcome>>,
}

impl JordanizabilityReport {
    pub fn cond2_all(&self) -> bool {
        self.cond2.iter().all(|&c| c)
    }

    pub fn to_json(&self) -> Value {
        let outcomes: Vec<Value> = self
            .outcomes
            .iter()
            .map(|per_branch| {
                Value::Array(
                    per_branch
                        .iter()
                        .map(|o| match o {
                            PathOutcome::Skipped => json!({"status": "skipped_coalescent"}),
                            PathOutcome::Probed(p) => json!({
                                "status": if p.limit.is_some() { "limit" } else { "no_limit" },
                                "samples": p.samples,
                                "gaps": p.gaps,
                                "last": p.last.to_json(),
                            }),
                        })
                        .collect(),
                )
            })
            .collect();
        json!({
            "cond1": self.cond1,
            "cond2": self.cond2,
            "cond3": self.cond3,
            "verdict": self.verdict,
            "limits": self.limits.iter().map(|l| l.as_ref().map_or(Value::Null, Subspace::to_json)).collect::<Vec<_>>(),
            "diagnostics": {
                "branch_segre": self.branch_segre,
                "base_segre": self.base_segre.iter().map(|(a, u)| json!({"actual": a, "branch_union": u})).collect::<Vec<_>>(),
                "segre_samples_used": self.segre_samples_used,
                "segre_samples_skipped": self.segre_samples_skipped,
                "paths": outcomes,
            }
        })
    }
}

/// Checks the three conditions of the holomorphic Jordanizability
/// criterion at `x0` by probing paths through it.
pub fn jordanizability_report(
    family: &MatrixFamily,
    x0: &[C64],
    config: &ProbeConfig,
) -> Result<JordanizabilityReport> {
    let r = family.branches().len();
    if r == 0 {
        return Err(Error::InvalidInput("eigenvalue branches are required".into()));
    }
    if x0.len() != family.vars() {
        return Err(Error::Mismatch("base point dimension differs from the family".into()));
    }
    let n = family.size();
    let paths = config.paths.clone().unwrap_or_else(|| default_paths(x0));

    // Condition 1: per-branch Segre data off the locus.
    let mut segre: Option<Vec<Vec<u32>>> = None;
    let mut constant = true;
    let (mut used, mut skipped) = (0, 0);
    for path in &paths {
        for &t in &config.segre_samples {
            let x = path.eval(C64::new(t, 0.0));
            let values = family.branch_values(&x);
            if !off_coalescence(&values, config.tol) {
                skipped += 1;
                continue;
            }
            used += 1;
            let a = family.eval(&x);
            let here: Vec<Vec<u32>> = family
                .branches()
                .iter()
                .zip(&values)
                .map(|(b, &v)| branch_segre(&a, v, b.multiplicity, config.tol))
                .collect();
            match &segre {
                None => segre = Some(here),
                Some(s) if *s != here => constant = false,
                _ => {}
            }
        }
    }
    let branch_segre = segre
        .ok_or_else(|| Error::NoValidSample(format!("every Segre sample near {x0:?} lies on the coalescence locus")))?;

    // Jordan structure at the point versus the branches meeting there.
    let a0 = family.eval(x0);
    let v0 = family.branch_values(x0);
    let scale = v0.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let mut groups: Vec<(C64, Vec<usize>)> = Vec::new();
    for (i, &v) in v0.iter().enumerate() {
        match groups.iter_mut().find(|(c, _)| (*c - v).norm() <= config.tol * scale) {
            Some((_, members)) => members.push(i),
            None => groups.push((v, vec![i])),
        }
    }
    let mut base_segre = Vec::new();
    let mut base_ok = true;
    for (mu, members) in &groups {
        let mult: usize = members.iter().map(|&i| family.branches()[i].multiplicity).sum();
        let actual = segre_at(&a0, *mu, mult, config.tol);
        let mut union: Vec<u32> = members.iter().flat_map(|&i| branch_segre[i].clone()).collect();
        union.sort_unstable_by(|a, b| b.cmp(a));
        let actual_p = Partition::new(actual.clone())?;
        if actual_p.parts() != union.as_slice() {
            base_ok = false;
        }
        base_segre.push((actual, union));
    }
    let cond1 = constant && base_ok;

    // Condition 2: limits of the eigenspaces along every path.
    let mut outcomes = Vec::with_capacity(r);
    let mut cond2 = Vec::with_capacity(r);
    let mut limits = Vec::with_capacity(r);
    let mut any_probe = false;
    for branch in 0..r {
        let mut per_path = Vec::with_capacity(paths.len());
        let mut found: Vec<Option<Subspace>> = Vec::new();
        for path in &paths {
            let valid: Vec<f64> = config
                .samples
                .iter()
                .copied()
                .filter(|&t| off_coalescence(&family.branch_values(&path.eval(C64::new(t, 0.0))), DEFAULT_TOL))
                .collect();
            if valid.len() < 2 {
                per_path.push(PathOutcome::Skipped);
                continue;
            }
            any_probe = true;
            let probe = probe_path(family, branch, path, &valid, config.limit_tol)?;
            found.push(probe.limit.clone());
            per_path.push(PathOutcome::Probed(probe));
        }
        let mut ok = !found.is_empty() && found.iter().all(Option::is_some);
        let mut common = None;
        if ok {
            let first = found[0].clone().expect("checked above");
            for other in found.iter().skip(1).flatten() {
                if gap_distance(&first, other)? > config.limit_tol {
                    ok = false;
                }
            }
            if ok {
                common = Some(first);
            }
        }
        cond2.push(ok);
        limits.push(common);
        outcomes.push(per_path);
    }
    if !any_probe {
        return Err(Error::NoValidSample(format!("every path through {x0:?} lies on the coalescence locus")));
    }

    // Condition 3: the limits span ℂⁿ as a direct sum.
    let cond3 = if limits.iter().all(Option::is_some) {
        let subs: Vec<&Subspace> = limits.iter().flatten().collect();
        let total: usize = subs.iter().map(|s| s.dim()).sum();
        let mut stacked = DMatrix::<C64>::zeros(n, total);
        let mut col = 0;
        for s in &subs {
            stacked.view_mut((0, col), (n, s.dim())).copy_from(s.basis());
            col += s.dim();
        }
        let smin = linalg::singular_values(&stacked).into_iter().fold(f64::INFINITY, f64::min);
        total == n && smin > 10.0 * config.limit_tol
    } else {
        false
    };

    let verdict = cond1 && cond2.iter().all(|&c| c) && cond3;
    Ok(JordanizabilityReport {
        cond1,
        cond2,
        cond3,
        verdict,
        limits,
        branch_segre,
        base_segre,
        segre_samples_used: used,
        segre_samples_skipped: skipped,
        outcomes,
    })
}
