//! Bundle descriptors, elementary degenerations, the closure order, the
//! Hasse diagram, and Jordan-type classification of constant matrices.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::partitions::{enumerate_double_partitions, Partition, SegreSymbol};
use crate::scalar::C64;

/// Numerical invariants of the bundle of a Segre symbol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleDescriptor {
    pub symbol: SegreSymbol,
    pub n: u32,
    pub codim: u32,
    pub dim: u32,
    pub is_regular: bool,
    pub is_diagonalizable: bool,
}

/// Codimension `Σ_j (λ_j1 + 3λ_j2 + 5λ_j3 + …) − rough length`.
pub fn codimension(s: &SegreSymbol) -> u32 {
    let weighted: u32 = s
        .partitions()
        .iter()
        .map(|p| p.parts().iter().enumerate().map(|(i, &q)| (2 * i as u32 + 1) * q).sum::<u32>())
        .sum();
    weighted - s.rough_length() as u32
}

pub fn describe(s: &SegreSymbol) -> BundleDescriptor {
    let n = s.n();
    let codim = codimension(s);
    BundleDescriptor {
        symbol: s.clone(),
        n,
        codim,
        dim: n * n - codim,
        is_regular: s.partitions().iter().all(|p| p.len() == 1),
        is_diagonalizable: s.partitions().iter().all(|p| p.parts().iter().all(|&q| q == 1)),
    }
}

pub fn dimension(s: &SegreSymbol) -> u32 {
    s.n() * s.n() - codimension(s)
}

/// Immediate degenerations of a bundle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Moves {
    /// Merges of two member partitions (two eigenvalues collide).
    pub type_one: Vec<SegreSymbol>,
    /// Single box moves inside one member partition.
    pub type_two: Vec<SegreSymbol>,
}

/// Part-wise sum of two partitions.
fn merge(a: &Partition, b: &Partition) -> Partition {
    let len = a.len().max(b.len());
    let parts =
        (0..len).map(|i| a.parts().get(i).copied().unwrap_or(0) + b.parts().get(i).copied().unwrap_or(0)).collect();
    Partition::from_sorted(parts)
}

/// Dominance covers of `p`: move one box from row `j` to a lower row `k`
/// with either `k = j + 1` or `p_j − p_k = 2`, keeping the rows monotone.
pub fn box_moves(p: &Partition) -> Vec<Partition> {
    let parts = p.parts();
    let mut out = BTreeSet::new();
    for j in 0..parts.len() {
        for k in (j + 1)..=parts.len() {
            let pk = parts.get(k).copied().unwrap_or(0);
            if !(k == j + 1 || parts[j] == pk + 2) {
                continue;
            }
            let mut q = parts.to_vec();
            if k == q.len() {
                q.push(0);
            }
            q[j] -= 1;
            q[k] += 1;
            if q.windows(2).all(|w| w[0] >= w[1]) {
                q.retain(|&x| x > 0);
                out.insert(Partition::from_sorted(q));
            }
        }
    }
    out.into_iter().collect()
}

pub fn elementary_moves(s: &SegreSymbol) -> Moves {
    let members = s.partitions();
    let dim = dimension(s);
    let mut one = BTreeSet::new();
    for i in 0..members.len() {
        for j in (i + 1)..members.len() {
            let mut rest: Vec<Partition> =
                members.iter().enumerate().filter(|&(k, _)| k != i && k != j).map(|(_, p)| p.clone()).collect();
            rest.push(merge(&members[i], &members[j]));
            one.insert(SegreSymbol::new(rest).expect("merge keeps members valid"));
        }
    }
    let mut two = BTreeSet::new();
    for (i, p) in members.iter().enumerate() {
        for q in box_moves(p) {
            let mut rest = members.to_vec();
            rest[i] = q;
            two.insert(SegreSymbol::new(rest).expect("box moves keep members valid"));
        }
    }
    let moves = Moves { type_one: one.into_iter().collect(), type_two: two.into_iter().collect() };
    for t in moves.type_one.iter().chain(&moves.type_two) {
        assert!(dimension(t) < dim, "move from {s} to {t} does not lower the dimension");
    }
    moves
}

fn all_moves(s: &SegreSymbol) -> Vec<SegreSymbol> {
    let m = elementary_moves(s);
    let mut all: Vec<SegreSymbol> = m.type_one.into_iter().chain(m.type_two).collect();
    all.sort();
    all.dedup();
    all
}

/// Whether `a ⊴ b`, i.e. `a` is reachable from `b` by elementary moves.
pub fn closure_leq(a: &SegreSymbol, b: &SegreSymbol) -> Result<bool> {
    if a.n() != b.n() {
        return Err(Error::Mismatch(format!("symbols of different sizes {} and {}", a.n(), b.n())));
    }
    let target_dim = dimension(a);
    let mut seen: BTreeSet<SegreSymbol> = BTreeSet::new();
    let mut queue = VecDeque::from([b.clone()]);
    seen.insert(b.clone());
    while let Some(s) = queue.pop_front() {
        if &s == a {
            return Ok(true);
        }
        if dimension(&s) <= target_dim {
            continue;
        }
        for t in all_moves(&s) {
            if dimension(&t) >= target_dim && seen.insert(t.clone()) {
                queue.push_back(t);
            }
        }
    }
    Ok(false)
}

/// Vertices and single-move edges `(covered, covering)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HasseDiagram {
    pub n: u32,
    pub vertices: Vec<SegreSymbol>,
    pub edges: Vec<(SegreSymbol, SegreSymbol)>,
}

pub fn hasse_diagram(n: u32) -> Result<HasseDiagram> {
    let vertices = enumerate_double_partitions(n)?;
    let mut edges = Vec::new();
    for s in &vertices {
        for t in all_moves(s) {
            edges.push((t, s.clone()));
        }
    }
    edges.sort();
    Ok(HasseDiagram { n, vertices, edges })
}

impl HasseDiagram {
    /// Drops every edge implied by a longer path.
    pub fn transitive_reduction(&self) -> HasseDiagram {
        let index = |s: &SegreSymbol| self.vertices.binary_search(s).expect("edge endpoint is a vertex");
        let nv = self.vertices.len();
        let mut succ = vec![Vec::new(); nv];
        for (lo, hi) in &self.edges {
            succ[index(hi)].push(index(lo));
        }
        let edges = self
            .edges
            .iter()
            .filter(|(lo, hi)| {
                let (target, start) = (index(lo), index(hi));
                // Reachable from `start` through an intermediate vertex?
                let mut seen = vec![false; nv];
                let mut stack: Vec<usize> = succ[start].iter().copied().filter(|&v| v != target).collect();
                while let Some(v) = stack.pop() {
                    if v == target {
                        return false;
                    }
                    if !seen[v] {
                        seen[v] = true;
                        stack.extend(succ[v].iter().copied());
                    }
                }
                true
            })
            .cloned()
            .collect();
        HasseDiagram { n: self.n, vertices: self.vertices.clone(), edges }
    }

    /// Graphviz text with one node per symbol, labeled by its letter string
    /// and dimension, and one edge per pair.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph hasse_{} {{", self.n);
        let _ = writeln!(out, "  rankdir=LR;");
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(out, "  n{i} [label=\"{} ({})\"];", letter_string(v), dimension(v));
        }
        for (lo, hi) in &self.edges {
            let a = self.vertices.binary_search(lo).expect("vertex");
            let b = self.vertices.binary_search(hi).expect("vertex");
            let _ = writeln!(out, "  n{a} -> n{b};");
        }
        out.push_str("}\n");
        out
    }
}

const LETTERS: [&str; 24] = [
    "α", "β", "γ", "δ", "ε", "ζ", "η", "θ", "ι", "κ", "λ", "μ", "ν", "ξ", "ο", "π", "ρ", "σ", "τ", "υ", "φ", "χ", "ψ",
    "ω",
];

fn superscript(k: u32) -> String {
    const SUP: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    k.to_string().chars().map(|c| SUP[c.to_digit(10).expect("decimal digit") as usize]).collect()
}

/// Letter notation: one letter per eigenvalue, one factor per Jordan block
/// with the block size as exponent, e.g. `α²βγ` for `{{2};{1};{1}}`.
pub fn letter_string(s: &SegreSymbol) -> String {
    let mut out = String::new();
    for (i, p) in s.partitions().iter().enumerate() {
        let letter = LETTERS.get(i).map_or_else(|| format!("e{i}"), |l| (*l).to_string());
        for &q in p.parts() {
            out.push_str(&letter);
            if q > 1 {
                out.push_str(&superscript(q));
            }
        }
    }
    out
}

/// Segre symbol of a constant matrix, with a conditioning flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub symbol: SegreSymbol,
    /// Cluster centers in the order of the symbol's members.
    pub eigenvalues: Vec<(f64, f64)>,
    /// Two clusters lie at a distance in `(tol, 10·tol)`.
    pub ill_conditioned: bool,
}

/// Clusters the spectrum within `tol` and reads each cluster's Jordan
/// structure from the ranks of `(A − μI)^k`.
pub fn classify_matrix(a: &DMatrix<C64>, tol: f64) -> Result<Classification> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::InvalidInput("classify_matrix needs a non-empty square matrix".into()));
    }
    if tol <= 0.0 {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let scale = linalg::spectral_norm(a).max(1.0);
    let eig = linalg::eigenvalues(a);
    let clusters = linalg::cluster(&eig, tol * scale);
    let mut ill = false;
    for i in 0..clusters.len() {
        for j in (i + 1)..clusters.len() {
            let dist = (clusters[i].0 - clusters[j].0).norm();
            if dist > tol * scale && dist < 10.0 * tol * scale {
                ill = true;
            }
        }
    }
    let mut members = Vec::new();
    let mut centers = Vec::new();
    for (mu, mult) in &clusters {
        let parts = segre_at(a, *mu, *mult, tol);
        members.push(Partition::new(parts)?);
        centers.push(*mu);
    }
    let symbol = SegreSymbol::new(members.clone())?;
    // Report centers aligned with the canonical member order.
    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (&members[i], &members[j]);
        b.weight()
            .cmp(&a.weight())
            .then_with(|| b.parts().cmp(a.parts()))
            .then_with(|| linalg::complex_order(centers[i], centers[j]))
    });
    Ok(Classification {
        symbol,
        eigenvalues: order.iter().map(|&i| (centers[i].re, centers[i].im)).collect(),
        ill_conditioned: ill,
    })
}

/// Jordan block sizes of `a` at `mu`, given the algebraic multiplicity.
///
/// Ranks of `(a − μ)^k` are cut at `tol·s^k` with `s = max(1, ‖a − μ‖)`,
/// so a shifted matrix that is zero up to rounding has rank 0.
pub fn segre_at(a: &DMatrix<C64>, mu: C64, mult: usize, tol: f64) -> Vec<u32> {
    let n = a.nrows();
    let shifted = a - DMatrix::<C64>::identity(n, n) * mu;
    let s = linalg::spectral_norm(&shifted).max(1.0);
    let mut ranks = vec![n];
    let mut power = DMatrix::<C64>::identity(n, n);
    let mut cut = tol;
    for _ in 0..mult {
        power = &power * &shifted;
        cut *= s;
        ranks.push(linalg::singular_values(&power).into_iter().filter(|&v| v > cut).count());
    }
    // The generalized eigenspace has dimension `mult` by construction.
    let last = ranks.len() - 1;
    ranks[last] = n - mult;
    blocks_from_ranks(&ranks)
}

/// Block sizes from the rank sequence `r_0 = n, r_1, …`: the number of
/// blocks of size at least `k` is `r_{k−1} − r_k`.
pub fn blocks_from_ranks(ranks: &[usize]) -> Vec<u32> {
    let mut at_least: Vec<usize> = Vec::new();
    for k in 1..ranks.len() {
        at_least.push(ranks[k - 1].saturating_sub(ranks[k]));
    }
    // Enforce monotonicity against rank noise.
    for k in 1..at_least.len() {
        at_least[k] = at_least[k].min(at_least[k - 1]);
    }
    let mut parts = Vec::new();
    for k in 0..at_least.len() {
        let next = at_least.get(k + 1).copied().unwrap_or(0);
        for _ in 0..at_least[k].saturating_sub(next) {
            parts.push(k as u32 + 1);
        }
    }
    parts.sort_unstable_by(|a, b| b.cmp(a));
    parts
}
