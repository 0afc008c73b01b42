//! Finite-dimensional real Lie algebras given by structure constants.
//!
//! Structure constants are the source of truth: `[X_i, X_j] = sum_k c[i][j][k] X_k`.
//! Matrix representations are optional and only validated against the
//! constants, never required by the solvers.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, YmtError};
use crate::linalg;

/// Tolerance for the Jacobi identity and representation checks.
const ALGEBRA_TOL: f64 = 1e-12;

/// A finite-dimensional real Lie algebra in a fixed basis.
#[derive(Clone, Debug)]
pub struct LieAlgebra {
    pub name: String,
    /// Basis dimension `l`.
    pub dim: usize,
    /// Dense structure constants, `c[i][j][k]` addressed as `i*l*l + j*l + k`.
    c: Vec<f64>,
    /// Optional matrix representation of the basis (complex `d x d`).
    pub matrix_rep: Option<Vec<DMatrix<Complex64>>>,
    /// Cached pseudoinverse of the flattened representation basis, used to
    /// express represented matrices back in basis coordinates.
    rep_pinv: Option<DMatrix<f64>>,
}

/// One sparse structure-constant entry `(i, j, k, value)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SparseEntry(pub usize, pub usize, pub usize, pub f64);

/// JSON ingestion format for structure constants.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub name: String,
    pub dim: usize,
    pub c: Vec<SparseEntry>,
}

impl LieAlgebra {
    /// Build an algebra from dense structure constants, validating
    /// antisymmetry and the Jacobi identity.
    pub fn from_structure_constants(
        name: impl Into<String>,
        dim: usize,
        constants: &dyn Fn(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(YmtError::input("algebra dimension must be positive"));
        }
        let mut c = vec![0.0; dim * dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    c[(i * dim + j) * dim + k] = constants(i, j, k);
                }
            }
        }
        let a = LieAlgebra {
            name: name.into(),
            dim,
            c,
            matrix_rep: None,
            rep_pinv: None,
        };
        a.validate()?;
        Ok(a)
    }

    /// Ingest the sparse-triple JSON format.
    pub fn from_spec(spec: &AlgebraSpec) -> Result<Self> {
        let l = spec.dim;
        if l == 0 {
            return Err(YmtError::input("algebra dimension must be positive"));
        }
        let mut c = vec![0.0; l * l * l];
        for SparseEntry(i, j, k, v) in &spec.c {
            if *i >= l || *j >= l || *k >= l {
                return Err(YmtError::input(format!(
                    "structure constant index ({i},{j},{k}) out of range for dim {l}"
                )));
            }
            c[(*i * l + *j) * l + *k] = *v;
        }
        let a = LieAlgebra {
            name: spec.name.clone(),
            dim: l,
            c,
            matrix_rep: None,
            rep_pinv: None,
        };
        a.validate()?;
        Ok(a)
    }

    /// Attach a matrix representation, checking that commutators of the
    /// representatives reproduce the structure constants.
    pub fn with_matrix_rep(mut self, rep: Vec<DMatrix<Complex64>>) -> Result<Self> {
        if rep.len() != self.dim {
            return Err(YmtError::input(format!(
                "representation has {} matrices, algebra dimension is {}",
                rep.len(),
                self.dim
            )));
        }
        let d = rep[0].nrows();
        for m in &rep {
            if m.nrows() != d || m.ncols() != d {
                return Err(YmtError::input("representation matrices must share a square shape"));
            }
        }
        for i in 0..self.dim {
            for j in 0..self.dim {
                let comm = &rep[i] * &rep[j] - &rep[j] * &rep[i];
                let mut expected = DMatrix::<Complex64>::zeros(d, d);
                for (k, basis) in rep.iter().enumerate() {
                    expected += basis.scale(self.c_at(i, j, k));
                }
                if (&comm - &expected).norm() > 1e-10 {
                    return Err(YmtError::input(format!(
                        "representation commutator [{i},{j}] does not match structure constants"
                    )));
                }
            }
        }
        self.rep_pinv = Some(rep_flat_pinv(&rep));
        self.matrix_rep = Some(rep);
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let l = self.dim;
        for i in 0..l {
            for j in 0..l {
                for k in 0..l {
                    if (self.c_at(i, j, k) + self.c_at(j, i, k)).abs() > ALGEBRA_TOL {
                        return Err(YmtError::input(format!(
                            "structure constants not antisymmetric at ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        // Jacobi: sum_m c[i][j][m] c[m][k][n] + cyclic = 0.
        for i in 0..l {
            for j in 0..l {
                for k in 0..l {
                    for n in 0..l {
                        let mut s = 0.0;
                        for m in 0..l {
                            s += self.c_at(i, j, m) * self.c_at(m, k, n)
                                + self.c_at(j, k, m) * self.c_at(m, i, n)
                                + self.c_at(k, i, m) * self.c_at(m, j, n);
                        }
                        if s.abs() > ALGEBRA_TOL {
                            return Err(YmtError::input(format!(
                                "Jacobi identity fails at ({i},{j},{k},{n}): residual {s:e}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn c_at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[(i * self.dim + j) * self.dim + k]
    }

    /// Zero coefficient vector.
    pub fn zero(&self) -> DVector<f64> {
        DVector::zeros(self.dim)
    }

    /// Basis coefficient vector `e_i`.
    pub fn basis(&self, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim);
        v[i] = 1.0;
        v
    }

    /// Lie bracket of two coefficient vectors.
    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.dim || y.len() != self.dim {
            return Err(YmtError::input(format!(
                "bracket operands have dims {}/{}, algebra dimension is {}",
                x.len(),
                y.len(),
                self.dim
            )));
        }
        let mut out = DVector::zeros(self.dim);
        for i in 0..self.dim {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            for j in 0..self.dim {
                let f = xi * y[j];
                if f == 0.0 {
                    continue;
                }
                for k in 0..self.dim {
                    out[k] += f * self.c_at(i, j, k);
                }
            }
        }
        Ok(out)
    }

    /// Matrix of `ad_{X_i}` in the chosen basis: `(ad_i)[k][j] = c[i][j][k]`.
    pub fn ad_basis(&self, i: usize) -> DMatrix<f64> {
        let l = self.dim;
        let mut m = DMatrix::zeros(l, l);
        for j in 0..l {
            for k in 0..l {
                m[(k, j)] = self.c_at(i, j, k);
            }
        }
        m
    }

    /// Matrix of `ad_x` for an arbitrary coefficient vector.
    pub fn ad(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let l = self.dim;
        let mut m = DMatrix::zeros(l, l);
        for i in 0..l {
            if x[i] != 0.0 {
                m += self.ad_basis(i).scale(x[i]);
            }
        }
        m
    }

    /// Killing form `B[i][j] = tr(ad_i ad_j)` assembled from the structure
    /// constants.
    pub fn killing_form(&self) -> BilinearForm {
        let l = self.dim;
        let ads: Vec<DMatrix<f64>> = (0..l).map(|i| self.ad_basis(i)).collect();
        let mut b = DMatrix::zeros(l, l);
        for i in 0..l {
            for j in 0..l {
                b[(i, j)] = (&ads[i] * &ads[j]).trace();
            }
        }
        BilinearForm { matrix: b }
    }

    /// Basis of the space of ad-invariant bilinear forms.
    ///
    /// A form `B` is ad-invariant when `B([Z,X],Y) + B(X,[Z,Y]) = 0` for all
    /// basis `Z, X, Y`; in matrix terms, `ad_Z^T B + B ad_Z = 0` for every
    /// basis `Z`. The constraint operator is assembled as an `l^3 x l^2`
    /// matrix via Kronecker products and its nullspace taken by SVD.
    pub fn invariant_form_basis(&self) -> Vec<BilinearForm> {
        let l = self.dim;
        let mut constraint = DMatrix::zeros(l * l * l, l * l);
        let id = DMatrix::<f64>::identity(l, l);
        for z in 0..l {
            let adt = self.ad_basis(z).transpose();
            // vec(ad_Z^T B + B ad_Z) = (I (x) ad_Z^T + ad_Z^T (x) I) vec(B)
            // with column-major vec.
            let block = id.kronecker(&adt) + adt.kronecker(&id);
            constraint.rows_mut(z * l * l, l * l).copy_from(&block);
        }
        let ns = linalg::nullspace(&constraint);
        let mut out = Vec::with_capacity(ns.ncols());
        for j in 0..ns.ncols() {
            let col = ns.column(j);
            let mut m = DMatrix::zeros(l, l);
            for cidx in 0..l {
                for ridx in 0..l {
                    m[(ridx, cidx)] = col[cidx * l + ridx];
                }
            }
            out.push(BilinearForm { matrix: m });
        }
        debug_assert!(
            self.killing_in_span(&out),
            "Killing form must lie in the invariant span"
        );
        out
    }

    /// Whether the Killing form lies in the span of the given forms.
    pub fn killing_in_span(&self, forms: &[BilinearForm]) -> bool {
        let l = self.dim;
        let killing = self.killing_form();
        if killing.matrix.norm() < 1e-14 {
            return true;
        }
        if forms.is_empty() {
            return false;
        }
        let mut a = DMatrix::zeros(l * l, forms.len());
        for (j, f) in forms.iter().enumerate() {
            for cidx in 0..l {
                for ridx in 0..l {
                    a[(cidx * l + ridx, j)] = f.matrix[(ridx, cidx)];
                }
            }
        }
        let mut b = DVector::zeros(l * l);
        for cidx in 0..l {
            for ridx in 0..l {
                b[cidx * l + ridx] = killing.matrix[(ridx, cidx)];
            }
        }
        let sol = a.clone().svd(true, true).solve(&b, 1e-12).expect("svd solve");
        ((&a * sol) - b).norm() < 1e-8 * killing.matrix.norm().max(1.0)
    }

    /// Residual of `x` under the representation-coordinate round trip; used
    /// by tests as an independent route through the matrix representation.
    pub fn rep_matrix(&self, x: &DVector<f64>) -> Result<DMatrix<Complex64>> {
        let rep = self
            .matrix_rep
            .as_ref()
            .ok_or_else(|| YmtError::input(format!("algebra {} has no matrix representation", self.name)))?;
        let d = rep[0].nrows();
        let mut m = DMatrix::<Complex64>::zeros(d, d);
        for i in 0..self.dim {
            m += rep[i].scale(x[i]);
        }
        Ok(m)
    }

    /// Express a represented matrix back in basis coordinates (least squares
    /// against the flattened representation basis).
    pub fn rep_coords(&self, m: &DMatrix<Complex64>) -> Result<DVector<f64>> {
        let pinv = self
            .rep_pinv
            .as_ref()
            .ok_or_else(|| YmtError::input(format!("algebra {} has no matrix representation", self.name)))?;
        Ok(pinv * flatten_complex(m))
    }
}

fn flatten_complex(m: &DMatrix<Complex64>) -> DVector<f64> {
    let (r, c) = m.shape();
    let mut v = DVector::zeros(2 * r * c);
    for j in 0..c {
        for i in 0..r {
            v[2 * (j * r + i)] = m[(i, j)].re;
            v[2 * (j * r + i) + 1] = m[(i, j)].im;
        }
    }
    v
}

fn rep_flat_pinv(rep: &[DMatrix<Complex64>]) -> DMatrix<f64> {
    let d = rep[0].nrows();
    let mut basis = DMatrix::zeros(2 * d * d, rep.len());
    for (j, m) in rep.iter().enumerate() {
        basis.set_column(j, &flatten_complex(m));
    }
    linalg::pinv_full_column_rank(&basis)
}

/// A real bilinear form on the algebra, `B(x, y) = x^T M y`.
///
/// Symmetry is not required; degenerate and non-symmetric pairings are legal.
#[derive(Clone, Debug)]
pub struct BilinearForm {
    pub matrix: DMatrix<f64>,
}

impl BilinearForm {
    pub fn new(matrix: DMatrix<f64>) -> Self {
        BilinearForm { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn eval(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.matrix * y)[(0, 0)]
    }

    /// Max residual of the infinitesimal invariance identity
    /// `B([z,x],y) + B(x,[z,y])` over the basis triples.
    pub fn ad_invariance_residual(&self, algebra: &LieAlgebra) -> f64 {
        let l = algebra.dim;
        let mut worst: f64 = 0.0;
        for z in 0..l {
            let ad = algebra.ad_basis(z);
            let r = ad.transpose() * &self.matrix + &self.matrix * ad;
            worst = worst.max(r.abs().max());
        }
        worst
    }

    /// Euclidean form of a given dimension.
    pub fn euclidean(dim: usize) -> Self {
        BilinearForm {
            matrix: DMatrix::identity(dim, dim),
        }
    }
}

// ---------------------------------------------------------------------------
// Shipped catalog
// ---------------------------------------------------------------------------

fn epsilon3(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `u(1)`: one abelian generator, represented as the 1x1 matrix `i`.
pub fn u1() -> Arc<LieAlgebra> {
    let a = LieAlgebra::from_structure_constants("u1", 1, &|_, _, _| 0.0)
        .unwrap()
        .with_matrix_rep(vec![DMatrix::from_row_slice(1, 1, &[cplx(0.0, 1.0)])])
        .unwrap();
    Arc::new(a)
}

/// `u(1)^k`: k commuting generators represented as `i` on the diagonal.
pub fn u1k(k: usize) -> Arc<LieAlgebra> {
    let mut rep = Vec::with_capacity(k);
    for i in 0..k {
        let mut m = DMatrix::<Complex64>::zeros(k, k);
        m[(i, i)] = cplx(0.0, 1.0);
        rep.push(m);
    }
    let a = LieAlgebra::from_structure_constants(format!("u1^{k}"), k, &|_, _, _| 0.0)
        .unwrap()
        .with_matrix_rep(rep)
        .unwrap();
    Arc::new(a)
}

/// `su(2)` with `[X_i, X_j] = eps_ijk X_k`, represented by `X_k = -i sigma_k / 2`.
pub fn su2() -> Arc<LieAlgebra> {
    let x1 = DMatrix::from_row_slice(2, 2, &[cplx(0.0, 0.0), cplx(0.0, -0.5), cplx(0.0, -0.5), cplx(0.0, 0.0)]);
    let x2 = DMatrix::from_row_slice(2, 2, &[cplx(0.0, 0.0), cplx(-0.5, 0.0), cplx(0.5, 0.0), cplx(0.0, 0.0)]);
    let x3 = DMatrix::from_row_slice(2, 2, &[cplx(0.0, -0.5), cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.5)]);
    let a = LieAlgebra::from_structure_constants("su2", 3, &epsilon3)
        .unwrap()
        .with_matrix_rep(vec![x1, x2, x3])
        .unwrap();
    Arc::new(a)
}

/// Real 3x3 generator of rotations about axis `k`.
fn so3_generator(k: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::<Complex64>::zeros(3, 3);
    // (L_k)_{ij} = -eps_{kij}
    for i in 0..3 {
        for j in 0..3 {
            let v = -epsilon3(k, i, j);
            if v != 0.0 {
                m[(i, j)] = cplx(v, 0.0);
            }
        }
    }
    m
}

/// `so(3)` with the same epsilon structure constants, in the vector representation.
pub fn so3() -> Arc<LieAlgebra> {
    let rep = vec![so3_generator(0), so3_generator(1), so3_generator(2)];
    let a = LieAlgebra::from_structure_constants("so3", 3, &epsilon3)
        .unwrap()
        .with_matrix_rep(rep)
        .unwrap();
    Arc::new(a)
}

/// `so(2)`: one generator, the 2x2 rotation generator.
pub fn so2() -> Arc<LieAlgebra> {
    let j = DMatrix::from_row_slice(2, 2, &[cplx(0.0, 0.0), cplx(-1.0, 0.0), cplx(1.0, 0.0), cplx(0.0, 0.0)]);
    let a = LieAlgebra::from_structure_constants("so2", 1, &|_, _, _| 0.0)
        .unwrap()
        .with_matrix_rep(vec![j])
        .unwrap();
    Arc::new(a)
}

/// `su(2) (+) u(1)` as a block direct sum, represented in 3x3 blocks.
pub fn su2_plus_u1() -> Arc<LieAlgebra> {
    let su2_alg = su2();
    let constants = |i: usize, j: usize, k: usize| -> f64 {
        if i < 3 && j < 3 && k < 3 {
            epsilon3(i, j, k)
        } else {
            0.0
        }
    };
    let mut rep = Vec::with_capacity(4);
    for gen in su2_alg.matrix_rep.as_ref().unwrap() {
        let mut m = DMatrix::<Complex64>::zeros(3, 3);
        m.view_mut((0, 0), (2, 2)).copy_from(gen);
        rep.push(m);
    }
    let mut m = DMatrix::<Complex64>::zeros(3, 3);
    m[(2, 2)] = cplx(0.0, 1.0);
    rep.push(m);
    let a = LieAlgebra::from_structure_constants("su2+u1", 4, &constants)
        .unwrap()
        .with_matrix_rep(rep)
        .unwrap();
    Arc::new(a)
}

/// Look up a catalog algebra by name.
pub fn catalog(name: &str) -> Result<Arc<LieAlgebra>> {
    match name {
        "u1" => Ok(u1()),
        "u1^2" => Ok(u1k(2)),
        "u1^3" => Ok(u1k(3)),
        "su2" => Ok(su2()),
        "so3" => Ok(so3()),
        "so2" => Ok(so2()),
        "su2+u1" => Ok(su2_plus_u1()),
        other => Err(YmtError::input(format!(
            "unknown algebra '{other}' (catalog: u1, u1^2, u1^3, su2, so3, so2, su2+u1)"
        ))),
    }
}
