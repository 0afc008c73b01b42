//! Periodic hypercubic lattices, algebra-valued cochains, group-valued link
//! fields and gauge transformations.
//!
//! Two gauge-field representations coexist: algebra-valued cochains carry the
//! exact `d`/`[wedge]` split of the curvature, group-valued links carry exact
//! gauge covariance. Conversion is edgewise exp/log.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Result, YmtError};
use crate::groups::GaugeGroup;
use crate::lie::LieAlgebra;

/// Lexicographically ordered k-subsets of `0..n`.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return vec![];
    }
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// A periodic hypercubic lattice of dimension `n >= 2`.
///
/// Cells of every degree are enumerated implicitly: a k-cell is a base vertex
/// together with an ascending set of k directions. All iteration is in
/// lexicographic cell order, which fixes the reduction order of sums.
#[derive(Debug)]
pub struct Lattice {
    pub extents: Vec<usize>,
    /// Discrete volume weight per top cell (indexed by base vertex).
    pub volume_weight: Vec<f64>,
    strides: Vec<usize>,
    vertex_count: usize,
    /// combos[k] = ascending k-subsets of the direction set.
    combos: Vec<Vec<Vec<usize>>>,
    /// pair_index[mu][nu] for mu < nu.
    pair_index: Vec<Vec<usize>>,
}

impl Lattice {
    pub fn new(extents: Vec<usize>) -> Result<Arc<Self>> {
        Self::with_weight(extents, 1.0)
    }

    pub fn with_weight(extents: Vec<usize>, weight: f64) -> Result<Arc<Self>> {
        let n = extents.len();
        if n < 2 {
            return Err(YmtError::input("lattice dimension must be >= 2"));
        }
        if extents.contains(&0) {
            return Err(YmtError::input("lattice extents must be positive"));
        }
        if weight <= 0.0 {
            return Err(YmtError::input("volume weight must be positive"));
        }
        let mut strides = vec![1usize; n];
        for d in 1..n {
            strides[d] = strides[d - 1] * extents[d - 1];
        }
        let vertex_count: usize = extents.iter().product();
        let combos = (0..=n).map(|k| combinations(n, k)).collect::<Vec<_>>();
        let mut pair_index = vec![vec![usize::MAX; n]; n];
        for (p, pair) in combos[2].iter().enumerate() {
            pair_index[pair[0]][pair[1]] = p;
        }
        Ok(Arc::new(Lattice {
            extents,
            volume_weight: vec![weight; vertex_count],
            strides,
            vertex_count,
            combos,
            pair_index,
        }))
    }

    pub fn dim(&self) -> usize {
        self.extents.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.vertex_count * self.dim()
    }

    pub fn plaquette_count(&self) -> usize {
        self.vertex_count * self.combos[2].len()
    }

    pub fn cell_count(&self, k: usize) -> usize {
        if k > self.dim() {
            0
        } else {
            self.vertex_count * self.combos[k].len()
        }
    }

    pub fn combos_of(&self, k: usize) -> &[Vec<usize>] {
        &self.combos[k]
    }

    pub fn coords(&self, v: usize) -> Vec<usize> {
        let mut c = vec![0; self.dim()];
        let mut rem = v;
        for d in (0..self.dim()).rev() {
            c[d] = rem / self.strides[d];
            rem %= self.strides[d];
        }
        c
    }

    pub fn vertex_index(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(&self.strides)
            .zip(&self.extents)
            .map(|((c, s), e)| (c % e) * s)
            .sum()
    }

    /// Periodic neighbor of vertex `v` in direction `mu`.
    pub fn neighbor(&self, v: usize, mu: usize, forward: bool) -> usize {
        let e = self.extents[mu];
        let s = self.strides[mu];
        let coord = (v / s) % e;
        let next = if forward {
            (coord + 1) % e
        } else {
            (coord + e - 1) % e
        };
        v - coord * s + next * s
    }

    pub fn edge_index(&self, v: usize, mu: usize) -> usize {
        v * self.dim() + mu
    }

    pub fn edge_of(&self, e: usize) -> (usize, usize) {
        (e / self.dim(), e % self.dim())
    }

    pub fn plaquette_index(&self, v: usize, mu: usize, nu: usize) -> usize {
        debug_assert!(mu < nu);
        v * self.combos[2].len() + self.pair_index[mu][nu]
    }

    pub fn plaquette_of(&self, p: usize) -> (usize, usize, usize) {
        let np = self.combos[2].len();
        let pair = &self.combos[2][p % np];
        (p / np, pair[0], pair[1])
    }

    /// Cell index for base vertex and ascending direction set of size k.
    pub fn cell_index(&self, v: usize, dirs: &[usize]) -> usize {
        let k = dirs.len();
        let pos = self.combos[k]
            .iter()
            .position(|c| c == dirs)
            .expect("direction set must be ascending and in range");
        v * self.combos[k].len() + pos
    }

    /// Vertex shifted forward along every direction in `dirs`.
    pub fn shift(&self, v: usize, dirs: &[usize]) -> usize {
        let mut out = v;
        for &d in dirs {
            out = self.neighbor(out, d, true);
        }
        out
    }

    pub fn weight_at(&self, v: usize) -> f64 {
        self.volume_weight[v]
    }
}

// ---------------------------------------------------------------------------
// Scalar cochains of arbitrary degree (used by the topological machinery and
// the verification oracles).
// ---------------------------------------------------------------------------

/// A real-valued k-cochain on the lattice.
#[derive(Clone, Debug)]
pub struct ScalarCochain {
    pub lattice: Arc<Lattice>,
    pub degree: usize,
    pub values: Vec<f64>,
}

impl ScalarCochain {
    pub fn zeros(lattice: Arc<Lattice>, degree: usize) -> Self {
        let len = lattice.cell_count(degree);
        ScalarCochain { lattice, degree, values: vec![0.0; len] }
    }

    pub fn random(lattice: Arc<Lattice>, degree: usize, rng: &mut impl Rng, amp: f64) -> Self {
        let len = lattice.cell_count(degree);
        let values = (0..len).map(|_| rng.gen_range(-amp..amp)).collect();
        ScalarCochain { lattice, degree, values }
    }

    /// Cubical coboundary: for a (k+1)-cell with directions `S`,
    /// `(d w)(x, S) = sum_p (-1)^p [w(x + e_{S_p}, S minus S_p) - w(x, S minus S_p)]`.
    pub fn coboundary(&self) -> ScalarCochain {
        let lat = &self.lattice;
        let k = self.degree;
        let mut out = ScalarCochain::zeros(self.lattice.clone(), k + 1);
        let combos = lat.combos_of(k + 1);
        for v in 0..lat.vertex_count() {
            for (ci, dirs) in combos.iter().enumerate() {
                let mut acc = 0.0;
                for (pos, &d) in dirs.iter().enumerate() {
                    let mut face: Vec<usize> = dirs.clone();
                    face.remove(pos);
                    let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                    let fidx = lat.cell_index(v, &face);
                    let sidx = lat.cell_index(lat.neighbor(v, d, true), &face);
                    acc += sign * (self.values[sidx] - self.values[fidx]);
                }
                out.values[v * combos.len() + ci] = acc;
            }
        }
        out
    }

    /// Cubical cup product with scalar multiplication:
    /// `(a u b)(x, S) = sum over ordered partitions S = A | B of
    /// sgn(A,B) a(x, A) b(x + e_A, B)`, `sgn` the shuffle sign.
    pub fn cup(&self, other: &ScalarCochain) -> ScalarCochain {
        cup_with(
            &self.lattice,
            self.degree,
            other.degree,
            |cell| self.values[cell],
            |cell| other.values[cell],
            |a, b| a * b,
        )
    }
}

/// Shuffle sign of the ordered partition (A, B): parity of the number of
/// pairs (a, b) in A x B with b < a.
pub fn shuffle_sign(a: &[usize], b: &[usize]) -> f64 {
    let mut inv = 0usize;
    for &x in a {
        for &y in b {
            if y < x {
                inv += 1;
            }
        }
    }
    if inv.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Generic cubical cup product with a caller-supplied bilinear multiplication.
pub fn cup_with<A, B, M>(
    lattice: &Arc<Lattice>,
    p: usize,
    q: usize,
    alpha: A,
    beta: B,
    mul: M,
) -> ScalarCochain
where
    A: Fn(usize) -> f64,
    B: Fn(usize) -> f64,
    M: Fn(f64, f64) -> f64,
{
    // Scalar-valued fast path (both cochain evaluations return scalars).
    let k = p + q;
    let mut out = ScalarCochain::zeros(lattice.clone(), k);
    let combos = lattice.combos_of(k).to_vec();
    for v in 0..lattice.vertex_count() {
        for (ci, dirs) in combos.iter().enumerate() {
            let mut acc = 0.0;
            for asel in combinations(k, p) {
                let a_dirs: Vec<usize> = asel.iter().map(|&i| dirs[i]).collect();
                let b_dirs: Vec<usize> = (0..k)
                    .filter(|i| !asel.contains(i))
                    .map(|i| dirs[i])
                    .collect();
                let sign = shuffle_sign(&a_dirs, &b_dirs);
                let a_cell = lattice.cell_index(v, &a_dirs);
                let b_cell = lattice.cell_index(lattice.shift(v, &a_dirs), &b_dirs);
                acc += sign * mul(alpha(a_cell), beta(b_cell));
            }
            out.values[v * combos.len() + ci] = acc;
        }
    }
    out
}

/// Cup product of two algebra-valued 2-cochains against a bilinear pairing
/// `kappa`, producing a real 4-cochain. Requires a 4-dimensional lattice.
pub fn cup22_pairing(
    w1: &AlgebraCochain2,
    w2: &AlgebraCochain2,
    kappa: &dyn Fn(&DVector<f64>, &DVector<f64>) -> f64,
) -> Result<ScalarCochain> {
    let lat = &w1.lattice;
    if lat.dim() != 4 {
        return Err(YmtError::input("2-2 cup product requires lattice dimension 4"));
    }
    let mut out = ScalarCochain::zeros(lat.clone(), 4);
    let combos4 = lat.combos_of(4).to_vec();
    let combos2 = lat.combos_of(2).to_vec();
    for v in 0..lat.vertex_count() {
        for (ci, dirs) in combos4.iter().enumerate() {
            let mut acc = 0.0;
            for asel in combinations(4, 2) {
                let a_dirs: Vec<usize> = asel.iter().map(|&i| dirs[i]).collect();
                let b_dirs: Vec<usize> = (0..4)
                    .filter(|i| !asel.contains(i))
                    .map(|i| dirs[i])
                    .collect();
                let sign = shuffle_sign(&a_dirs, &b_dirs);
                let a_cell = lat.cell_index(v, &a_dirs);
                let b_cell = lat.cell_index(lat.shift(v, &a_dirs), &b_dirs);
                acc += sign * kappa(&w1.values[a_cell], &w2.values[b_cell]);
            }
            let _ = &combos2;
            out.values[v * combos4.len() + ci] = acc;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Algebra-valued cochains
// ---------------------------------------------------------------------------

/// Algebra-valued 1-cochain: one coefficient vector per directed edge.
/// Reversing an edge negates the value.
#[derive(Clone, Debug)]
pub struct AlgebraCochain1 {
    pub lattice: Arc<Lattice>,
    pub algebra: Arc<LieAlgebra>,
    pub values: Vec<DVector<f64>>,
}

/// Algebra-valued 2-cochain: one coefficient vector per oriented plaquette.
#[derive(Clone, Debug)]
pub struct AlgebraCochain2 {
    pub lattice: Arc<Lattice>,
    pub algebra: Arc<LieAlgebra>,
    pub values: Vec<DVector<f64>>,
}

impl AlgebraCochain1 {
    pub fn zeros(lattice: Arc<Lattice>, algebra: Arc<LieAlgebra>) -> Self {
        let values = vec![DVector::zeros(algebra.dim); lattice.edge_count()];
        AlgebraCochain1 { lattice, algebra, values }
    }

    pub fn random(
        lattice: Arc<Lattice>,
        algebra: Arc<LieAlgebra>,
        rng: &mut impl Rng,
        amp: f64,
    ) -> Self {
        let values = (0..lattice.edge_count())
            .map(|_| DVector::from_fn(algebra.dim, |_, _| rng.gen_range(-amp..amp)))
            .collect();
        AlgebraCochain1 { lattice, algebra, values }
    }

    /// Coboundary of a random vertex 0-cochain plus a random per-direction
    /// constant: a field with exactly flat coboundary, used by the holonomy
    /// fidelity checks where the continuum identity holds on the unit lattice.
    pub fn random_flat_coboundary(
        lattice: Arc<Lattice>,
        algebra: Arc<LieAlgebra>,
        rng: &mut impl Rng,
        amp: f64,
    ) -> Self {
        let phi: Vec<DVector<f64>> = (0..lattice.vertex_count())
            .map(|_| DVector::from_fn(algebra.dim, |_, _| rng.gen_range(-amp..amp)))
            .collect();
        let consts: Vec<DVector<f64>> = (0..lattice.dim())
            .map(|_| DVector::from_fn(algebra.dim, |_, _| rng.gen_range(-amp..amp)))
            .collect();
        let mut out = Self::zeros(lattice.clone(), algebra);
        for v in 0..lattice.vertex_count() {
            for (mu, cst) in consts.iter().enumerate() {
                let w = lattice.neighbor(v, mu, true);
                out.values[lattice.edge_index(v, mu)] = &phi[w] - &phi[v] + cst;
            }
        }
        out
    }

    /// Value on the edge `(v, mu)` with the requested orientation.
    pub fn value(&self, v: usize, mu: usize, forward: bool) -> DVector<f64> {
        let raw = &self.values[self.lattice.edge_index(v, mu)];
        if forward {
            raw.clone()
        } else {
            -raw
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        AlgebraCochain1 {
            lattice: self.lattice.clone(),
            algebra: self.algebra.clone(),
            values: self.values.iter().map(|v| v.scale(s)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if !Arc::ptr_eq(&self.lattice, &other.lattice) && self.lattice.extents != other.lattice.extents {
            return Err(YmtError::input("cochain addition across different lattices"));
        }
        if self.algebra.dim != other.algebra.dim {
            return Err(YmtError::input("cochain addition across different algebras"));
        }
        Ok(AlgebraCochain1 {
            lattice: self.lattice.clone(),
            algebra: self.algebra.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn norm_max(&self) -> f64 {
        self.values.iter().map(|v| v.abs().max()).fold(0.0, f64::max)
    }
}

impl AlgebraCochain2 {
    pub fn zeros(lattice: Arc<Lattice>, algebra: Arc<LieAlgebra>) -> Self {
        let values = vec![DVector::zeros(algebra.dim); lattice.plaquette_count()];
        AlgebraCochain2 { lattice, algebra, values }
    }

    pub fn random(
        lattice: Arc<Lattice>,
        algebra: Arc<LieAlgebra>,
        rng: &mut impl Rng,
        amp: f64,
    ) -> Self {
        let values = (0..lattice.plaquette_count())
            .map(|_| DVector::from_fn(algebra.dim, |_, _| rng.gen_range(-amp..amp)))
            .collect();
        AlgebraCochain2 { lattice, algebra, values }
    }

    pub fn value(&self, v: usize, mu: usize, nu: usize) -> DVector<f64> {
        // Orientation reversal (swapped directions) negates.
        if mu < nu {
            self.values[self.lattice.plaquette_index(v, mu, nu)].clone()
        } else {
            -&self.values[self.lattice.plaquette_index(v, nu, mu)]
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.values.len() != other.values.len() {
            return Err(YmtError::input("2-cochain addition shape mismatch"));
        }
        Ok(AlgebraCochain2 {
            lattice: self.lattice.clone(),
            algebra: self.algebra.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        AlgebraCochain2 {
            lattice: self.lattice.clone(),
            algebra: self.algebra.clone(),
            values: self.values.iter().map(|v| v.scale(s)).collect(),
        }
    }

    pub fn norm_max(&self) -> f64 {
        self.values.iter().map(|v| v.abs().max()).fold(0.0, f64::max)
    }

    /// Coboundary into real-per-component 3-cochains is only needed for the
    /// d.d = 0 diagnostics; sums the plaquette values over 3-cell boundaries.
    pub fn boundary_sum_3cells(&self) -> Vec<DVector<f64>> {
        let lat = &self.lattice;
        let combos3 = lat.combos_of(3).to_vec();
        let mut out = Vec::with_capacity(lat.vertex_count() * combos3.len());
        for v in 0..lat.vertex_count() {
            for dirs in &combos3 {
                let mut acc = DVector::zeros(self.algebra.dim);
                for (pos, &d) in dirs.iter().enumerate() {
                    let mut face = dirs.clone();
                    face.remove(pos);
                    let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                    let f0 = lat.cell_index(v, &face);
                    let f1 = lat.cell_index(lat.neighbor(v, d, true), &face);
                    acc += (&self.values[f1] - &self.values[f0]).scale(sign);
                }
                out.push(acc);
            }
        }
        out
    }
}

/// Section of the adjoint bundle: one algebra vector per vertex.
#[derive(Clone, Debug)]
pub struct VertexSection {
    pub lattice: Arc<Lattice>,
    pub algebra: Arc<LieAlgebra>,
    pub values: Vec<DVector<f64>>,
}

impl VertexSection {
    pub fn constant(lattice: Arc<Lattice>, algebra: Arc<LieAlgebra>, v: DVector<f64>) -> Self {
        let values = vec![v; lattice.vertex_count()];
        VertexSection { lattice, algebra, values }
    }

    pub fn random(
        lattice: Arc<Lattice>,
        algebra: Arc<LieAlgebra>,
        rng: &mut impl Rng,
        amp: f64,
    ) -> Self {
        let values = (0..lattice.vertex_count())
            .map(|_| DVector::from_fn(algebra.dim, |_, _| rng.gen_range(-amp..amp)))
            .collect();
        VertexSection { lattice, algebra, values }
    }
}

// ---------------------------------------------------------------------------
// Link fields and gauge transformations
// ---------------------------------------------------------------------------

/// Group-valued link field: one group matrix per directed edge; the value on
/// the reversed edge is the matrix inverse.
#[derive(Clone, Debug)]
pub struct LinkField {
    pub lattice: Arc<Lattice>,
    pub group: GaugeGroup,
    pub values: Vec<DMatrix<Complex64>>,
}

impl LinkField {
    pub fn identity(lattice: Arc<Lattice>, group: GaugeGroup) -> Self {
        let values = vec![group.identity(); lattice.edge_count()];
        LinkField { lattice, group, values }
    }

    /// Edgewise exponential of an algebra cochain.
    pub fn from_cochain(d: &AlgebraCochain1, group: &GaugeGroup) -> Self {
        let values = d.values.iter().map(|v| group.exp(v)).collect();
        LinkField {
            lattice: d.lattice.clone(),
            group: group.clone(),
            values,
        }
    }

    /// Edgewise principal log back to an algebra cochain.
    pub fn to_cochain(&self) -> Result<AlgebraCochain1> {
        let mut values = Vec::with_capacity(self.values.len());
        for v in &self.values {
            values.push(self.group.log(v)?);
        }
        Ok(AlgebraCochain1 {
            lattice: self.lattice.clone(),
            algebra: self.group.algebra.clone(),
            values,
        })
    }

    pub fn random(
        lattice: Arc<Lattice>,
        group: GaugeGroup,
        rng: &mut impl Rng,
        amp: f64,
    ) -> Self {
        let values = (0..lattice.edge_count())
            .map(|_| group.random(rng, amp))
            .collect();
        LinkField { lattice, group, values }
    }

    pub fn link(&self, v: usize, mu: usize) -> &DMatrix<Complex64> {
        &self.values[self.lattice.edge_index(v, mu)]
    }

    /// Value on a traversed edge: the stored matrix forward, its inverse
    /// (adjoint, the links being unitary) backward.
    pub fn traverse(&self, v: usize, mu: usize, forward: bool) -> DMatrix<Complex64> {
        let m = self.link(v, mu);
        if forward {
            m.clone()
        } else {
            m.adjoint()
        }
    }

    /// Validation residual: worst group-membership defect over all links.
    pub fn membership_residual(&self) -> f64 {
        self.values
            .iter()
            .map(|m| self.group.membership_residual(m))
            .fold(0.0, f64::max)
    }
}

/// Gauge transformation: one group matrix per vertex. Constant transforms are
/// tracked structurally because only they act exactly on algebra cochains.
#[derive(Clone, Debug)]
pub enum GaugeValues {
    Constant(DMatrix<Complex64>),
    PerVertex(Vec<DMatrix<Complex64>>),
}

#[derive(Clone, Debug)]
pub struct GaugeTransform {
    pub lattice: Arc<Lattice>,
    pub group: GaugeGroup,
    pub values: GaugeValues,
}

impl GaugeTransform {
    pub fn identity(lattice: Arc<Lattice>, group: GaugeGroup) -> Self {
        let id = group.identity();
        GaugeTransform { lattice, group, values: GaugeValues::Constant(id) }
    }

    pub fn constant(lattice: Arc<Lattice>, group: GaugeGroup, m: DMatrix<Complex64>) -> Self {
        GaugeTransform { lattice, group, values: GaugeValues::Constant(m) }
    }

    pub fn random(
        lattice: Arc<Lattice>,
        group: GaugeGroup,
        rng: &mut impl Rng,
        amp: f64,
    ) -> Self {
        let values = (0..lattice.vertex_count())
            .map(|_| group.random(rng, amp))
            .collect();
        GaugeTransform { lattice, group, values: GaugeValues::PerVertex(values) }
    }

    pub fn at(&self, v: usize) -> &DMatrix<Complex64> {
        match &self.values {
            GaugeValues::Constant(m) => m,
            GaugeValues::PerVertex(ms) => &ms[v],
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.values, GaugeValues::Constant(_))
    }

    pub fn inverse(&self) -> Self {
        let values = match &self.values {
            GaugeValues::Constant(m) => GaugeValues::Constant(m.adjoint()),
            GaugeValues::PerVertex(ms) => {
                GaugeValues::PerVertex(ms.iter().map(|m| m.adjoint()).collect())
            }
        };
        GaugeTransform {
            lattice: self.lattice.clone(),
            group: self.group.clone(),
            values,
        }
    }

    pub fn membership_residual(&self) -> f64 {
        match &self.values {
            GaugeValues::Constant(m) => self.group.membership_residual(m),
            GaugeValues::PerVertex(ms) => ms
                .iter()
                .map(|m| self.group.membership_residual(m))
                .fold(0.0, f64::max),
        }
    }
}

/// Either gauge-field representation of a connection.
#[derive(Clone, Debug)]
pub enum ConnectionRep {
    Cochain(AlgebraCochain1),
    Links(LinkField),
}

impl ConnectionRep {
    pub fn lattice(&self) -> &Arc<Lattice> {
        match self {
            ConnectionRep::Cochain(d) => &d.lattice,
            ConnectionRep::Links(u) => &u.lattice,
        }
    }

    pub fn algebra_dim(&self) -> usize {
        match self {
            ConnectionRep::Cochain(d) => d.algebra.dim,
            ConnectionRep::Links(u) => u.group.algebra.dim,
        }
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Coboundary of a 1-cochain: the signed boundary sum over each plaquette,
/// signs `(+, +, -, -)` along the oriented 4-loop.
pub fn coboundary(d: &AlgebraCochain1) -> AlgebraCochain2 {
    let lat = &d.lattice;
    let mut out = AlgebraCochain2::zeros(d.lattice.clone(), d.algebra.clone());
    for v in 0..lat.vertex_count() {
        for (pi, pair) in lat.combos_of(2).iter().enumerate() {
            let (mu, nu) = (pair[0], pair[1]);
            let v_mu = lat.neighbor(v, mu, true);
            let v_nu = lat.neighbor(v, nu, true);
            let val = &d.values[lat.edge_index(v, mu)]
                + &d.values[lat.edge_index(v_mu, nu)]
                - &d.values[lat.edge_index(v_nu, mu)]
                - &d.values[lat.edge_index(v, nu)];
            out.values[v * lat.combos_of(2).len() + pi] = val;
        }
    }
    out
}

/// Cup-bracket `(1/2) D [wedge] D`: per plaquette spanned by `(mu, nu)` at x,
/// `(1/2)[D(e_mu(x)), D(e_nu(x+mu))] - (1/2)[D(e_nu(x)), D(e_mu(x+nu))]`.
pub fn cup_bracket(d: &AlgebraCochain1) -> AlgebraCochain2 {
    let lat = &d.lattice;
    let alg = &d.algebra;
    let mut out = AlgebraCochain2::zeros(d.lattice.clone(), d.algebra.clone());
    for v in 0..lat.vertex_count() {
        for (pi, pair) in lat.combos_of(2).iter().enumerate() {
            let (mu, nu) = (pair[0], pair[1]);
            let v_mu = lat.neighbor(v, mu, true);
            let v_nu = lat.neighbor(v, nu, true);
            let first = alg
                .bracket(&d.values[lat.edge_index(v, mu)], &d.values[lat.edge_index(v_mu, nu)])
                .expect("matching algebra");
            let second = alg
                .bracket(&d.values[lat.edge_index(v, nu)], &d.values[lat.edge_index(v_nu, mu)])
                .expect("matching algebra");
            out.values[v * lat.combos_of(2).len() + pi] = (first - second).scale(0.5);
        }
    }
    out
}

/// Field strength `F_D = dD + (1/2) D [wedge] D` of an algebra cochain.
pub fn curvature(d: &AlgebraCochain1) -> AlgebraCochain2 {
    let db = coboundary(d);
    let cup = cup_bracket(d);
    db.add(&cup).expect("shapes agree")
}

/// Principal log of the plaquette holonomy of a link field, expressed in
/// algebra coordinates.
///
/// Fails with a singularity error naming the plaquette when a holonomy sits
/// at distance >= pi from the identity.
pub fn plaquette_curvature(u: &LinkField) -> Result<AlgebraCochain2> {
    let lat = &u.lattice;
    let mut out = AlgebraCochain2::zeros(u.lattice.clone(), u.group.algebra.clone());
    for v in 0..lat.vertex_count() {
        for (pi, pair) in lat.combos_of(2).iter().enumerate() {
            let (mu, nu) = (pair[0], pair[1]);
            let v_mu = lat.neighbor(v, mu, true);
            let v_nu = lat.neighbor(v, nu, true);
            let hol = u.link(v, mu) * u.link(v_mu, nu) * u.link(v_nu, mu).adjoint() * u.link(v, nu).adjoint();
            let p = v * lat.combos_of(2).len() + pi;
            match u.group.log(&hol) {
                Ok(coords) => out.values[p] = coords,
                Err(_) => {
                    return Err(YmtError::LogBranch {
                        plaquette: p,
                        vertex: v,
                        mu,
                        nu,
                        distance: u.group.log_distance(&hol),
                    })
                }
            }
        }
    }
    Ok(out)
}

/// Gauge action on links: `U'(e) = g(src) U(e) g(tgt)^-1`.
pub fn gauge_transform_links(u: &LinkField, g: &GaugeTransform) -> Result<LinkField> {
    if u.lattice.extents != g.lattice.extents {
        return Err(YmtError::input("gauge transform lattice mismatch"));
    }
    if u.group != g.group {
        return Err(YmtError::input("gauge transform group mismatch"));
    }
    let lat = &u.lattice;
    let mut values = Vec::with_capacity(u.values.len());
    for v in 0..lat.vertex_count() {
        for mu in 0..lat.dim() {
            let w = lat.neighbor(v, mu, true);
            values.push(g.at(v) * u.link(v, mu) * g.at(w).adjoint());
        }
    }
    Ok(LinkField {
        lattice: u.lattice.clone(),
        group: u.group.clone(),
        values,
    })
}

/// Gauge action on an algebra cochain. Exact only for constant transforms,
/// where it is the edgewise adjoint rotation.
pub fn gauge_transform_cochain(d: &AlgebraCochain1, g: &GaugeTransform) -> Result<AlgebraCochain1> {
    if !g.is_constant() {
        return Err(YmtError::input(
            "algebra cochains only carry the action of constant gauge transforms",
        ));
    }
    let ad = g.group.adjoint_coords(g.at(0));
    Ok(AlgebraCochain1 {
        lattice: d.lattice.clone(),
        algebra: d.algebra.clone(),
        values: d.values.iter().map(|v| &ad * v).collect(),
    })
}

/// Gauge action on a 2-cochain: pointwise adjoint at the plaquette base vertex.
pub fn gauge_transform_cochain2(w: &AlgebraCochain2, g: &GaugeTransform) -> AlgebraCochain2 {
    let lat = &w.lattice;
    let np = lat.combos_of(2).len();
    let mut values = Vec::with_capacity(w.values.len());
    let const_ad = if g.is_constant() {
        Some(g.group.adjoint_coords(g.at(0)))
    } else {
        None
    };
    for (p, val) in w.values.iter().enumerate() {
        let v = p / np;
        let ad = match &const_ad {
            Some(m) => m.clone(),
            None => g.group.adjoint_coords(g.at(v)),
        };
        values.push(&ad * val);
    }
    AlgebraCochain2 {
        lattice: w.lattice.clone(),
        algebra: w.algebra.clone(),
        values,
    }
}

/// Gauge action on a vertex section: `s'(x) = Ad_{g(x)} s(x)`.
pub fn gauge_transform_section(s: &VertexSection, g: &GaugeTransform) -> VertexSection {
    let values = s
        .values
        .iter()
        .enumerate()
        .map(|(v, val)| g.group.adjoint_coords(g.at(v)) * val)
        .collect();
    VertexSection {
        lattice: s.lattice.clone(),
        algebra: s.algebra.clone(),
        values,
    }
}

/// Covariant derivative of an adjoint-bundle section along a connection.
///
/// Link form: `Ad_{U_e} phi(tgt) - phi(src)`; algebra form:
/// `d phi(e) + [D(e), phi(src)]`.
pub fn covariant_derivative(conn: &ConnectionRep, phi: &VertexSection) -> Result<AlgebraCochain1> {
    let lat = phi.lattice.clone();
    if conn.lattice().extents != lat.extents {
        return Err(YmtError::input("covariant derivative lattice mismatch"));
    }
    if conn.algebra_dim() != phi.algebra.dim {
        return Err(YmtError::input("covariant derivative algebra mismatch"));
    }
    let mut out = AlgebraCochain1::zeros(lat.clone(), phi.algebra.clone());
    match conn {
        ConnectionRep::Links(u) => {
            for v in 0..lat.vertex_count() {
                for mu in 0..lat.dim() {
                    let w = lat.neighbor(v, mu, true);
                    let ad = u.group.adjoint_coords(u.link(v, mu));
                    out.values[lat.edge_index(v, mu)] = ad * &phi.values[w] - &phi.values[v];
                }
            }
        }
        ConnectionRep::Cochain(d) => {
            for v in 0..lat.vertex_count() {
                for mu in 0..lat.dim() {
                    let w = lat.neighbor(v, mu, true);
                    let grad = &phi.values[w] - &phi.values[v];
                    let br = d
                        .algebra
                        .bracket(&d.values[lat.edge_index(v, mu)], &phi.values[v])?;
                    out.values[lat.edge_index(v, mu)] = grad + br;
                }
            }
        }
    }
    Ok(out)
}

/// Push a gauge transform of the source group forward along an embedding
/// (vertexwise composition with the group map).
pub fn embed_gauge_transform(
    e: &crate::groups::GroupEmbedding,
    g: &GaugeTransform,
) -> GaugeTransform {
    let values = match &g.values {
        GaugeValues::Constant(m) => GaugeValues::Constant(e.embed_group(m)),
        GaugeValues::PerVertex(ms) => {
            GaugeValues::PerVertex(ms.iter().map(|m| e.embed_group(m)).collect())
        }
    };
    GaugeTransform {
        lattice: g.lattice.clone(),
        group: e.target.clone(),
        values,
    }
}
