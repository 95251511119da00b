//! Quantum graphs: bond-scattering matrices, phase ensembles and
//! periodic-orbit families.
//!
//! Directed bonds are indexed `2b` for `(a, c)` and `2b + 1` for `(c, a)` where
//! bond `b` joins `a` and `c`, so the reversal of `d` is `d ^ 1`.
//!
//! A [`ScatteringSystem`] keeps the phase-free part of the bond-scattering
//! matrix, `S = diag(e^{i phi}) M`, so the same structure serves the ensemble
//! averages, the Monte Carlo estimates and the orbit enumeration. General
//! graphs and the ring graph both reduce to it.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::ring;

/// Tolerance for unitarity of assembled and vertex matrices.
pub const UNITARITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph with {vertex_count} vertices")]
    VertexOutOfRange { vertex: usize, vertex_count: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("more than one bond between vertices {0} and {1}")]
    MultiEdge(usize, usize),
    #[error("bond {bond} has non-positive length {length}")]
    NonPositiveLength { bond: usize, length: f64 },
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph needs at least one bond")]
    Empty,
    #[error("expected {expected} entries, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vertex matrix at vertex {vertex} is {got}x{got}, valency is {expected}")]
    VertexMatrixShape { vertex: usize, expected: usize, got: usize },
    #[error("vertex matrix at vertex {vertex} is not unitary (defect {defect:e})")]
    NonUnitaryVertexMatrix { vertex: usize, defect: f64 },
    #[error("invalid symmetry class {0}; expected 1 or 2")]
    InvalidBeta(u8),
    #[error("{free_phases} free phases; exact quadrature supports at most {max}")]
    TooManyPhases { free_phases: usize, max: usize },
    #[error("quadrature grid of {points} points cannot resolve degree {n}")]
    GridTooCoarse { points: usize, n: u32 },
    #[error("at least {min} samples are required, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("closed-walk enumeration bound {bound:e} exceeds {limit:e}")]
    EnumerationTooLarge { bound: f64, limit: f64 },
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown graph spec '{0}'")]
    UnknownSpec(String),
    #[error("ring parameters: {0}")]
    Ring(#[from] ring::RingError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub length: f64,
    /// `A_(a,b)`; the reverse direction carries `-flux`.
    pub flux: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    vertex_count: usize,
    bonds: Vec<Bond>,
    /// Neighbouring vertices of each vertex in bond order; this order fixes
    /// the rows and columns of the vertex matrices.
    neighbours: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(vertex_count: usize, bonds: Vec<Bond>) -> Result<Self, GraphError> {
        if bonds.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut neighbours = vec![Vec::new(); vertex_count];
        for (i, bond) in bonds.iter().enumerate() {
            for v in [bond.a, bond.b] {
                if v >= vertex_count {
                    return Err(GraphError::VertexOutOfRange {
                        vertex: v,
                        vertex_count,
                    });
                }
            }
            if bond.a == bond.b {
                return Err(GraphError::SelfLoop(bond.a));
            }
            if !bond.length.is_finite() || bond.length <= 0.0 {
                return Err(GraphError::NonPositiveLength {
                    bond: i,
                    length: bond.length,
                });
            }
            if neighbours[bond.a].contains(&bond.b) {
                return Err(GraphError::MultiEdge(bond.a, bond.b));
            }
            neighbours[bond.a].push(bond.b);
            neighbours[bond.b].push(bond.a);
        }
        let graph = Self {
            vertex_count,
            bonds,
            neighbours,
        };
        if !graph.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(graph)
    }

    /// Fully connected graph on `vertex_count` vertices, unit lengths, no flux.
    pub fn complete(vertex_count: usize) -> Result<Self, GraphError> {
        let mut bonds = Vec::new();
        for a in 0..vertex_count {
            for b in a + 1..vertex_count {
                bonds.push(Bond {
                    a,
                    b,
                    length: 1.0,
                    flux: 0.0,
                });
            }
        }
        Self::new(vertex_count, bonds)
    }

    /// Path `0 - 1 - ... - (vertex_count - 1)`.
    pub fn path(vertex_count: usize) -> Result<Self, GraphError> {
        let bonds = (1..vertex_count)
            .map(|b| Bond {
                a: b - 1,
                b,
                length: 1.0,
                flux: 0.0,
            })
            .collect();
        Self::new(vertex_count, bonds)
    }

    /// Text format: `V B` on the first line, then `B` lines `i j L A` with
    /// 1-based vertices. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let parse_err = |line: usize, message: &str| GraphError::Parse {
            line,
            message: message.to_string(),
        };
        let (line_no, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(parse_err(line_no, "header must be `V B`"));
        }
        let vertex_count: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(line_no, "V is not a non-negative integer"))?;
        let bond_count: usize = fields[1]
            .parse()
            .map_err(|_| parse_err(line_no, "B is not a non-negative integer"))?;
        let mut bonds = Vec::with_capacity(bond_count);
        for (line_no, line) in lines.by_ref().take(bond_count) {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(parse_err(line_no, "bond line must be `i j L A`"));
            }
            let vertex = |s: &str| -> Result<usize, GraphError> {
                let v: usize = s
                    .parse()
                    .map_err(|_| parse_err(line_no, "vertex is not a positive integer"))?;
                v.checked_sub(1)
                    .ok_or_else(|| parse_err(line_no, "vertices are 1-based"))
            };
            let real = |s: &str| -> Result<f64, GraphError> {
                s.parse().map_err(|_| parse_err(line_no, "expected a real number"))
            };
            bonds.push(Bond {
                a: vertex(fields[0])?,
                b: vertex(fields[1])?,
                length: real(fields[2])?,
                flux: real(fields[3])?,
            });
        }
        if bonds.len() != bond_count {
            return Err(parse_err(line_no, "fewer bond lines than declared"));
        }
        if let Some((line_no, _)) = lines.next() {
            return Err(parse_err(line_no, "more bond lines than declared"));
        }
        Self::new(vertex_count, bonds)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.vertex_count, self.bonds.len());
        for b in &self.bonds {
            out.push_str(&format!("{} {} {} {}\n", b.a + 1, b.b + 1, b.length, b.flux));
        }
        out
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &self.neighbours[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn directed_count(&self) -> usize {
        2 * self.bonds.len()
    }

    pub fn valency(&self, vertex: usize) -> usize {
        self.neighbours[vertex].len()
    }

    pub fn neighbours(&self, vertex: usize) -> &[usize] {
        &self.neighbours[vertex]
    }

    /// `(tail, head)` of directed bond `d`.
    pub fn endpoints(&self, d: usize) -> (usize, usize) {
        let bond = &self.bonds[d / 2];
        if d.is_multiple_of(2) {
            (bond.a, bond.b)
        } else {
            (bond.b, bond.a)
        }
    }

    fn local_index(&self, vertex: usize, neighbour: usize) -> usize {
        self.neighbours[vertex]
            .iter()
            .position(|&w| w == neighbour)
            .expect("adjacent vertices")
    }
}

/// Neumann vertex matrix `2/v - delta`.
pub fn neumann_sigma(valency: usize) -> DMatrix<f64> {
    let v = valency as f64;
    DMatrix::from_fn(valency, valency, |i, j| 2.0 / v - if i == j { 1.0 } else { 0.0 })
}

pub fn neumann_vertex_matrices(graph: &Graph) -> Vec<DMatrix<Complex64>> {
    (0..graph.vertex_count())
        .map(|v| neumann_sigma(graph.valency(v)).map(|x| Complex64::new(x, 0.0)))
        .collect()
}

/// Largest entry of `A^dagger A - I`.
pub fn unitarity_defect(m: &DMatrix<Complex64>) -> f64 {
    let product = m.adjoint() * m;
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((product[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// A bond-scattering matrix with the phases it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct BondScattering {
    pub matrix: DMatrix<Complex64>,
    pub phases: Vec<f64>,
}

impl BondScattering {
    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.matrix)
    }
}

/// `S_{(i,j),(j,m)} = e^{i phi_(i,j)} sigma^{(j)}_{i,m}`, zero unless the head
/// of the row bond is the tail of the column bond.
pub fn assemble_s(
    graph: &Graph,
    phases: &[f64],
    vertex_matrices: &[DMatrix<Complex64>],
) -> Result<BondScattering, GraphError> {
    let system = ScatteringSystem::from_graph(graph, vertex_matrices)?;
    system.s_matrix(phases)
}

/// `phi_(i,j) = (k + A_(i,j)) L_[i,j]`.
pub fn phase_from_geometry(graph: &Graph, k: f64) -> Vec<f64> {
    graph
        .bonds()
        .iter()
        .flat_map(|b| [(k + b.flux) * b.length, (k - b.flux) * b.length])
        .collect()
}

/// `U_{dd'} = |S_{dd'}|^2`.
pub fn classical_operator(s: &BondScattering) -> DMatrix<f64> {
    s.matrix.map(|z| z.norm_sqr())
}

/// `tr U^n`.
pub fn classical_trace(u: &DMatrix<f64>, n: u32) -> f64 {
    matrix_power(u, n).trace()
}

/// `s_n = tr S^n`.
pub fn quantum_trace(s: &BondScattering, n: u32) -> Complex64 {
    matrix_power(&s.matrix, n).trace()
}

fn matrix_power<T>(m: &DMatrix<T>, n: u32) -> DMatrix<T>
where
    T: nalgebra::Scalar + num_traits::Zero + num_traits::One + nalgebra::ClosedAddAssign + nalgebra::ClosedMulAssign,
{
    let mut result = DMatrix::<T>::identity(m.nrows(), m.ncols());
    let mut base = m.clone();
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    result
}

/// Symmetry class of the phase ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Beta {
    /// Time-reversal symmetric: `phi_d = phi_{d^}`, one phase per bond.
    Orthogonal,
    /// Broken time reversal: one independent phase per directed bond.
    Unitary,
}

impl Beta {
    pub fn value(self) -> u8 {
        match self {
            Beta::Orthogonal => 1,
            Beta::Unitary => 2,
        }
    }
}

impl TryFrom<u8> for Beta {
    type Error = GraphError;
    fn try_from(value: u8) -> Result<Self, Self::Error> {
        match value {
            1 => Ok(Beta::Orthogonal),
            2 => Ok(Beta::Unitary),
            other => Err(GraphError::InvalidBeta(other)),
        }
    }
}

/// Phase-free scattering structure `M` with `S = diag(e^{i phi}) M`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringSystem {
    structure: DMatrix<Complex64>,
    tails: Vec<usize>,
    heads: Vec<usize>,
    vertex_count: usize,
    /// `(d, d^)` for each undirected bond.
    bond_pairs: Vec<(usize, usize)>,
}

impl ScatteringSystem {
    pub fn from_graph(graph: &Graph, vertex_matrices: &[DMatrix<Complex64>]) -> Result<Self, GraphError> {
        if vertex_matrices.len() != graph.vertex_count() {
            return Err(GraphError::DimensionMismatch {
                expected: graph.vertex_count(),
                got: vertex_matrices.len(),
            });
        }
        for (vertex, sigma) in vertex_matrices.iter().enumerate() {
            let expected = graph.valency(vertex);
            if sigma.nrows() != expected || sigma.ncols() != expected {
                return Err(GraphError::VertexMatrixShape {
                    vertex,
                    expected,
                    got: sigma.nrows(),
                });
            }
            let defect = unitarity_defect(sigma);
            if defect > UNITARITY_TOLERANCE {
                return Err(GraphError::NonUnitaryVertexMatrix { vertex, defect });
            }
        }
        let dim = graph.directed_count();
        let mut structure = DMatrix::<Complex64>::zeros(dim, dim);
        let (mut tails, mut heads) = (Vec::with_capacity(dim), Vec::with_capacity(dim));
        for d in 0..dim {
            let (i, j) = graph.endpoints(d);
            tails.push(i);
            heads.push(j);
            for d2 in 0..dim {
                let (l, m) = graph.endpoints(d2);
                if l == j {
                    let sigma = &vertex_matrices[j];
                    structure[(d, d2)] = sigma[(graph.local_index(j, i), graph.local_index(j, m))];
                }
            }
        }
        Ok(Self {
            structure,
            tails,
            heads,
            vertex_count: graph.vertex_count(),
            bond_pairs: (0..graph.bond_count()).map(|b| (2 * b, 2 * b + 1)).collect(),
        })
    }

    /// Neumann conditions at every vertex.
    pub fn neumann(graph: &Graph) -> Self {
        Self::from_graph(graph, &neumann_vertex_matrices(graph)).expect("Neumann matrices are unitary")
    }

    /// The ring graph: one vertex, one loop, directed bonds `0` and `1`.
    pub fn ring(eta: f64) -> Result<Self, GraphError> {
        // validates eta
        ring::RingParams::new(eta, 0.0, 0.0)?;
        let sigma = ring::vertex_matrix(eta);
        Ok(Self {
            structure: DMatrix::from_fn(2, 2, |i, j| sigma[(i, j)]),
            tails: vec![0, 0],
            heads: vec![0, 0],
            vertex_count: 1,
            bond_pairs: vec![(0, 1)],
        })
    }

    /// `2B`.
    pub fn dimension(&self) -> usize {
        self.structure.nrows()
    }

    pub fn bond_count(&self) -> usize {
        self.bond_pairs.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn structure(&self) -> &DMatrix<Complex64> {
        &self.structure
    }

    pub fn tail(&self, d: usize) -> usize {
        self.tails[d]
    }

    pub fn head(&self, d: usize) -> usize {
        self.heads[d]
    }

    pub fn free_phase_count(&self, beta: Beta) -> usize {
        match beta {
            Beta::Orthogonal => self.bond_count(),
            Beta::Unitary => self.dimension(),
        }
    }

    /// Directed-bond phases from the free phases of the ensemble.
    pub fn expand_phases(&self, beta: Beta, free: &[f64]) -> Vec<f64> {
        match beta {
            Beta::Unitary => free.to_vec(),
            Beta::Orthogonal => {
                let mut phases = vec![0.0; self.dimension()];
                for (&(d, r), &phi) in self.bond_pairs.iter().zip(free) {
                    phases[d] = phi;
                    phases[r] = phi;
                }
                phases
            }
        }
    }

    pub fn s_matrix(&self, phases: &[f64]) -> Result<BondScattering, GraphError> {
        if phases.len() != self.dimension() {
            return Err(GraphError::DimensionMismatch {
                expected: self.dimension(),
                got: phases.len(),
            });
        }
        let mut matrix = self.structure.clone();
        for (d, &phi) in phases.iter().enumerate() {
            let factor = Complex64::from_polar(1.0, phi);
            matrix.row_mut(d).iter_mut().for_each(|z| *z *= factor);
        }
        Ok(BondScattering {
            matrix,
            phases: phases.to_vec(),
        })
    }

    fn transitions(&self) -> Vec<Vec<(usize, Complex64)>> {
        (0..self.dimension())
            .map(|d| {
                (0..self.dimension())
                    .filter(|&d2| self.structure[(d, d2)] != Complex64::new(0.0, 0.0))
                    .map(|d2| (d2, self.structure[(d, d2)]))
                    .collect()
            })
            .collect()
    }
}

/// Form-factor estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
}

/// Minimum Monte Carlo sample count.
pub const MIN_SAMPLES: usize = 100;
const MC_CHUNK: usize = 1024;

/// Monte Carlo `<|tr S^n|^2> / 2B` for every `1 <= n <= max_n` from the same
/// phase draws. Samples are split into fixed chunks, each with its own
/// ChaCha stream derived from `seed`, and merged in chunk order, so results
/// do not depend on the thread count.
pub fn mc_form_factor_range(
    system: &ScatteringSystem,
    beta: Beta,
    max_n: u32,
    samples: usize,
    seed: u64,
) -> Result<Vec<McEstimate>, GraphError> {
    if samples < MIN_SAMPLES {
        return Err(GraphError::TooFewSamples {
            min: MIN_SAMPLES,
            got: samples,
        });
    }
    let free = system.free_phase_count(beta);
    let dim = system.dimension() as f64;
    let chunks = samples.div_ceil(MC_CHUNK);
    let partials: Vec<(Vec<f64>, Vec<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let count = MC_CHUNK.min(samples - chunk * MC_CHUNK);
            let mut sum = vec![0.0; max_n as usize];
            let mut sum_sq = vec![0.0; max_n as usize];
            let mut draw = vec![0.0; free];
            for _ in 0..count {
                for phi in draw.iter_mut() {
                    *phi = rng.random_range(-PI..PI);
                }
                let s = system
                    .s_matrix(&system.expand_phases(beta, &draw))
                    .expect("phase count matches")
                    .matrix;
                let mut power = s.clone();
                for n in 1..=max_n as usize {
                    if n > 1 {
                        power = &power * &s;
                    }
                    let k = power.trace().norm_sqr() / dim;
                    sum[n - 1] += k;
                    sum_sq[n - 1] += k * k;
                }
            }
            (sum, sum_sq)
        })
        .collect();
    let mut sum = vec![0.0; max_n as usize];
    let mut sum_sq = vec![0.0; max_n as usize];
    for (s, s2) in partials {
        for i in 0..max_n as usize {
            sum[i] += s[i];
            sum_sq[i] += s2[i];
        }
    }
    let count = samples as f64;
    Ok(sum
        .iter()
        .zip(&sum_sq)
        .map(|(&s, &s2)| {
            let mean = s / count;
            let variance = ((s2 - s * mean) / (count - 1.0)).max(0.0);
            McEstimate {
                estimate: mean,
                stderr: (variance / count).sqrt(),
            }
        })
        .collect())
}

/// Monte Carlo form factor at a single `n`.
pub fn mc_form_factor(
    system: &ScatteringSystem,
    beta: Beta,
    n: u32,
    samples: usize,
    seed: u64,
) -> Result<McEstimate, GraphError> {
    let n = n.max(1);
    Ok(mc_form_factor_range(system, beta, n, samples, seed)?[n as usize - 1])
}

/// Largest number of free phases the grid quadrature accepts.
pub const MAX_QUADRATURE_PHASES: usize = 3;

/// Exact phase average `<|s_n|^2> / 2B` on the minimal grid of `n + 1`
/// points per free phase. `|s_n|^2` is a trigonometric polynomial of degree
/// at most `n` in each phase, so this grid integrates it exactly.
pub fn quadrature_form_factor(system: &ScatteringSystem, beta: Beta, n: u32) -> Result<f64, GraphError> {
    quadrature_form_factor_with_grid(system, beta, n, n as usize + 1)
}

pub fn quadrature_form_factor_with_grid(
    system: &ScatteringSystem,
    beta: Beta,
    n: u32,
    points: usize,
) -> Result<f64, GraphError> {
    let free = system.free_phase_count(beta);
    if free > MAX_QUADRATURE_PHASES {
        return Err(GraphError::TooManyPhases {
            free_phases: free,
            max: MAX_QUADRATURE_PHASES,
        });
    }
    if points < n as usize + 1 {
        return Err(GraphError::GridTooCoarse { points, n });
    }
    let total = points.pow(free as u32);
    let step = 2.0 * PI / points as f64;
    let mut sum = 0.0;
    let mut draw = vec![0.0; free];
    for index in 0..total {
        let mut rest = index;
        for phi in draw.iter_mut() {
            *phi = (rest % points) as f64 * step;
            rest /= points;
        }
        let s = system.s_matrix(&system.expand_phases(beta, &draw))?;
        sum += quantum_trace(&s, n).norm_sqr();
    }
    Ok(sum / total as f64 / system.dimension() as f64)
}

/// Traversal counts of an orbit family: per directed bond for
/// [`Beta::Unitary`], per undirected bond for [`Beta::Orthogonal`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FamilyKey {
    pub beta: Beta,
    pub counts: Vec<u32>,
}

impl FamilyKey {
    pub fn total(&self) -> u32 {
        self.counts.iter().sum()
    }
}

impl std::fmt::Display for FamilyKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.counts.iter().map(u32::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyEntry {
    /// Sum of the phase-free orbit amplitudes in the family.
    pub amplitude: Complex64,
    pub orbit_count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyTable {
    pub beta: Beta,
    pub n: u32,
    /// `2B`, the normalisation of the form factor.
    pub dimension: usize,
    pub families: BTreeMap<FamilyKey, FamilyEntry>,
}

impl FamilyTable {
    pub fn empty(beta: Beta, n: u32, dimension: usize) -> Self {
        Self {
            beta,
            n,
            dimension,
            families: BTreeMap::new(),
        }
    }

    pub fn orbit_count(&self) -> u64 {
        self.families.values().map(|e| e.orbit_count).sum()
    }
}

/// Enumeration budget on `2B * maxdeg^{n-1}`.
pub const ENUMERATION_LIMIT: f64 = 1e7;

/// Enumerates all closed walks of length `n` on the directed bonds (each
/// starting bond counted, so cyclic shifts are distinct orbits) and groups
/// their phase-free amplitudes by traversal counts.
pub fn enumerate_families(system: &ScatteringSystem, beta: Beta, n: u32) -> Result<FamilyTable, GraphError> {
    let dim = system.dimension();
    let transitions = system.transitions();
    let max_degree = transitions.iter().map(Vec::len).max().unwrap_or(0) as f64;
    let bound = dim as f64 * max_degree.powi(n.saturating_sub(1) as i32);
    if bound > ENUMERATION_LIMIT {
        return Err(GraphError::EnumerationTooLarge {
            bound,
            limit: ENUMERATION_LIMIT,
        });
    }
    let mut table = FamilyTable::empty(beta, n, dim);
    if n == 0 {
        return Ok(table);
    }
    let shards: Vec<BTreeMap<Vec<u32>, FamilyEntry>> = (0..dim)
        .into_par_iter()
        .map(|start| {
            let mut found = BTreeMap::new();
            let mut counts = vec![0u32; dim];
            counts[start] += 1;
            walk(&transitions, start, start, n - 1, Complex64::new(1.0, 0.0), &mut counts, &mut found);
            found
        })
        .collect();
    for shard in shards {
        for (counts, entry) in shard {
            let key = FamilyKey {
                beta,
                counts: match beta {
                    Beta::Unitary => counts,
                    Beta::Orthogonal => system.bond_pairs.iter().map(|&(d, r)| counts[d] + counts[r]).collect(),
                },
            };
            let slot = table.families.entry(key).or_insert(FamilyEntry {
                amplitude: Complex64::new(0.0, 0.0),
                orbit_count: 0,
            });
            slot.amplitude += entry.amplitude;
            slot.orbit_count += entry.orbit_count;
        }
    }
    Ok(table)
}

fn walk(
    transitions: &[Vec<(usize, Complex64)>],
    start: usize,
    current: usize,
    remaining: u32,
    amplitude: Complex64,
    counts: &mut Vec<u32>,
    found: &mut BTreeMap<Vec<u32>, FamilyEntry>,
) {
    if remaining == 0 {
        if let Some(&(_, closing)) = transitions[current].iter().find(|(d, _)| *d == start) {
            let slot = found.entry(counts.clone()).or_insert(FamilyEntry {
                amplitude: Complex64::new(0.0, 0.0),
                orbit_count: 0,
            });
            slot.amplitude += amplitude * closing;
            slot.orbit_count += 1;
        }
        return;
    }
    for &(next, factor) in &transitions[current] {
        counts[next] += 1;
        walk(transitions, start, next, remaining - 1, amplitude * factor, counts, found);
        counts[next] -= 1;
    }
}

/// `(1/2B) sum_L |sum_{p in L} A_p|^2`.
pub fn famsum_form_factor(table: &FamilyTable) -> f64 {
    if table.families.is_empty() {
        return 0.0;
    }
    table.families.values().map(|e| e.amplitude.norm_sqr()).sum::<f64>() / table.dimension as f64
}

/// Necessary conditions for a family to contain an orbit: in/out balance at
/// every vertex for [`Beta::Unitary`], even adjacent traversal count for
/// [`Beta::Orthogonal`]. They are not sufficient: a key whose support falls
/// apart into disconnected pieces passes but carries no single orbit.
pub fn family_feasibility(system: &ScatteringSystem, key: &FamilyKey) -> bool {
    let mut balance = vec![0i64; system.vertex_count()];
    match key.beta {
        Beta::Unitary => {
            if key.counts.len() != system.dimension() {
                return false;
            }
            for (d, &c) in key.counts.iter().enumerate() {
                balance[system.tail(d)] += c as i64;
                balance[system.head(d)] -= c as i64;
            }
            balance.iter().all(|&b| b == 0)
        }
        Beta::Orthogonal => {
            if key.counts.len() != system.bond_count() {
                return false;
            }
            for (&(d, _), &c) in system.bond_pairs.iter().zip(&key.counts) {
                let (a, b) = (system.tail(d), system.head(d));
                if a != b {
                    balance[a] += c as i64;
                    balance[b] += c as i64;
                }
            }
            balance.iter().all(|&b| b % 2 == 0)
        }
    }
}

/// Asymptotic circular-ensemble form factor at `tau = n / 2B`:
/// CUE `min(tau, 1)`, COE `2 tau - tau ln(1 + 2 tau)` for `tau <= 1` and
/// `2 - tau ln((2 tau + 1)/(2 tau - 1))` beyond.
pub fn rmt_reference(tau: f64, beta: Beta) -> f64 {
    let tau = tau.max(0.0);
    match beta {
        Beta::Unitary => tau.min(1.0),
        Beta::Orthogonal => {
            if tau <= 1.0 {
                2.0 * tau - tau * (1.0 + 2.0 * tau).ln()
            } else {
                2.0 - tau * ((2.0 * tau + 1.0) / (2.0 * tau - 1.0)).ln()
            }
        }
    }
}

/// Graph selection as accepted on the command line: `ring`, `ring:<eta>`,
/// `complete:<V>`, or a path to a graph file.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphSpec {
    Ring { eta: f64 },
    Complete { vertices: usize },
    File(std::path::PathBuf),
}

impl GraphSpec {
    pub fn parse(spec: &str) -> Result<Self, GraphError> {
        if spec == "ring" {
            return Ok(GraphSpec::Ring { eta: PI / 4.0 });
        }
        if let Some(eta) = spec.strip_prefix("ring:") {
            let eta: f64 = eta.parse().map_err(|_| GraphError::UnknownSpec(spec.to_string()))?;
            return Ok(GraphSpec::Ring { eta });
        }
        if let Some(v) = spec.strip_prefix("complete:") {
            let vertices: usize = v.parse().map_err(|_| GraphError::UnknownSpec(spec.to_string()))?;
            return Ok(GraphSpec::Complete { vertices });
        }
        let path = Path::new(spec);
        if path.is_file() {
            return Ok(GraphSpec::File(path.to_path_buf()));
        }
        Err(GraphError::UnknownSpec(spec.to_string()))
    }

    pub fn is_ring(&self) -> bool {
        matches!(self, GraphSpec::Ring { .. })
    }

    /// Neumann conditions for graphs, `sigma(eta)` for the ring.
    pub fn system(&self) -> Result<ScatteringSystem, GraphError> {
        match self {
            GraphSpec::Ring { eta } => ScatteringSystem::ring(*eta),
            GraphSpec::Complete { vertices } => Ok(ScatteringSystem::neumann(&Graph::complete(*vertices)?)),
            GraphSpec::File(path) => {
                let text = std::fs::read_to_string(path)?;
                Ok(ScatteringSystem::neumann(&Graph::parse(&text)?))
            }
        }
    }
}
