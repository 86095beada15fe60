//! Discrete Neumann resolvent `(I - xi * d²/dx²)^{-1}` and the Galerkin
//! form of the nonlocal stiffness term it induces.
//!
//! The auxiliary field lives in the continuous piecewise-linear space on
//! the same mesh as the beam; the Neumann conditions are natural, so the
//! resolvent system `(M + xi*K)` stays symmetric positive definite and
//! tridiagonal. The operator is self-adjoint and positive in the discrete
//! L² inner product with norm at most one (attained on constants).

use nalgebra::{DMatrix, DVector};

use crate::element::{p1_derivs, p1_values, GaussRule};
use crate::error::{CoreError, Result};
use crate::mesh::{DofLayout, Mesh};

/// Symmetric tridiagonal matrix stored as diagonal + off-diagonal.
#[derive(Debug, Clone)]
pub(crate) struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    fn zeros(n: usize) -> Self {
        SymTridiag {
            diag: vec![0.0; n],
            off: vec![0.0; n - 1],
        }
    }

    pub fn matvec(&self, v: &DVector<f64>) -> DVector<f64> {
        let n = self.diag.len();
        let mut out = DVector::zeros(n);
        for i in 0..n {
            let mut s = self.diag[i] * v[i];
            if i > 0 {
                s += self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * v[i + 1];
            }
            out[i] = s;
        }
        out
    }

    fn to_dense(&self) -> DMatrix<f64> {
        let n = self.diag.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = self.off[i];
                m[(i + 1, i)] = self.off[i];
            }
        }
        m
    }
}

/// LDLᵀ factorization of a symmetric tridiagonal SPD matrix.
#[derive(Debug, Clone)]
struct TridiagLdl {
    d: Vec<f64>,
    l: Vec<f64>,
}

impl TridiagLdl {
    fn factor(m: &SymTridiag) -> Result<Self> {
        let n = m.diag.len();
        let mut d = vec![0.0; n];
        let mut l = vec![0.0; n.saturating_sub(1)];
        d[0] = m.diag[0];
        if !(d[0] > 0.0) {
            return Err(CoreError::Numerical(
                "resolvent system is not positive definite".to_string(),
            ));
        }
        for i in 1..n {
            l[i - 1] = m.off[i - 1] / d[i - 1];
            d[i] = m.diag[i] - l[i - 1] * l[i - 1] * d[i - 1];
            if !(d[i] > 0.0) {
                return Err(CoreError::Numerical(
                    "resolvent system is not positive definite".to_string(),
                ));
            }
        }
        Ok(TridiagLdl { d, l })
    }

    fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let n = self.d.len();
        let mut x = rhs.clone();
        for i in 1..n {
            let c = self.l[i - 1] * x[i - 1];
            x[i] -= c;
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for i in (0..n - 1).rev() {
            let c = self.l[i] * x[i + 1];
            x[i] -= c;
        }
        x
    }

    /// Forward substitution `y = L^{-1} g` for one column.
    fn forward(&self, g: &mut [f64]) {
        for i in 1..g.len() {
            g[i] -= self.l[i - 1] * g[i - 1];
        }
    }
}

/// Assembles the P1 Neumann mass and stiffness matrices on `mesh`.
fn neumann_pair(mesh: &Mesh) -> (SymTridiag, SymTridiag) {
    let n = mesh.n_elem() + 1;
    let mut mass = SymTridiag::zeros(n);
    let mut stiff = SymTridiag::zeros(n);
    let rule = GaussRule::two_point();
    for e in 0..mesh.n_elem() {
        let (_, h) = mesh.element(e);
        let mut me = [[0.0; 2]; 2];
        let mut ke = [[0.0; 2]; 2];
        for (t, w) in rule.iter() {
            let vals = p1_values(t);
            let ders = p1_derivs(h);
            for a in 0..2 {
                for b in 0..2 {
                    me[a][b] += w * h * vals[a] * vals[b];
                    ke[a][b] += w * h * ders[a] * ders[b];
                }
            }
        }
        mass.diag[e] += me[0][0];
        mass.diag[e + 1] += me[1][1];
        mass.off[e] += me[0][1];
        stiff.diag[e] += ke[0][0];
        stiff.diag[e + 1] += ke[1][1];
        stiff.off[e] += ke[0][1];
    }
    (mass, stiff)
}

/// Discrete realization of the nonlocal resolvent on a fixed mesh.
///
/// The factorization is immutable after construction; concurrent solves
/// against it are fine.
#[derive(Debug, Clone)]
pub struct NeumannResolvent {
    xi: f64,
    mesh: Mesh,
    mass: SymTridiag,
    stiffness: SymTridiag,
    factor: TridiagLdl,
}

impl NeumannResolvent {
    pub fn new(mesh: Mesh, xi: f64) -> Result<Self> {
        if !(xi >= 0.0) {
            return Err(CoreError::InvalidArgument(format!(
                "resolvent length-scale parameter must be nonnegative (got {xi})"
            )));
        }
        let (mass, stiffness) = neumann_pair(&mesh);
        let mut system = mass.clone();
        for i in 0..system.diag.len() {
            system.diag[i] += xi * stiffness.diag[i];
        }
        for i in 0..system.off.len() {
            system.off[i] += xi * stiffness.off[i];
        }
        let factor = TridiagLdl::factor(&system)?;
        Ok(NeumannResolvent {
            xi,
            mesh,
            mass,
            stiffness,
            factor,
        })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    /// Number of auxiliary-space DOFs (one per mesh node).
    pub fn dim(&self) -> usize {
        self.mesh.n_elem() + 1
    }

    /// Applies the resolvent to a nodal grid function: returns the
    /// auxiliary field solving `(eta, psi) + xi (eta', psi') = (z, psi)`
    /// for every P1 test function `psi`. For `xi = 0` this is the
    /// identity on the P1 space.
    pub fn apply(&self, z: &DVector<f64>) -> Result<DVector<f64>> {
        if z.len() != self.dim() {
            return Err(CoreError::Dimension {
                expected: self.dim(),
                got: z.len(),
                context: "resolvent apply",
            });
        }
        let rhs = self.mass.matvec(z);
        Ok(self.factor.solve(&rhs))
    }

    /// Solves the weak problem against an already-assembled load vector
    /// `(z, psi)` (moment form), rather than nodal values of `z`.
    pub fn apply_to_load(&self, load: &DVector<f64>) -> Result<DVector<f64>> {
        if load.len() != self.dim() {
            return Err(CoreError::Dimension {
                expected: self.dim(),
                got: load.len(),
                context: "resolvent apply_to_load",
            });
        }
        Ok(self.factor.solve(load))
    }

    /// Eigenvalues of the discrete resolvent in decreasing order.
    ///
    /// All lie in `(0, 1]`; the constant mode gives exactly 1 for every
    /// `xi`, and mode `k` on a uniform mesh approaches
    /// `1/(1 + xi (k pi / L)^2)` at rate `h^2`.
    pub fn spectrum(&self) -> Vec<f64> {
        let mass = self.mass.to_dense();
        let mut system = self.stiffness.to_dense();
        system *= self.xi;
        system += &mass;
        let chol = system
            .cholesky()
            .expect("resolvent system is SPD by construction");
        let l = chol.l();
        let x = l
            .solve_lower_triangular(&mass)
            .expect("triangular solve of SPD factor");
        let y = l
            .solve_lower_triangular(&x.transpose())
            .expect("triangular solve of SPD factor");
        let sym = (&y + y.transpose()) * 0.5;
        let mut eigs: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
        eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        eigs
    }

    /// Symmetric Galerkin matrix of the nonlocal stiffness term
    /// `weight * (P v', u')` on a clamped longitudinal block.
    ///
    /// Computed as `weight * Yᵀ D^{-1} Y` with `Y = L^{-1} G`, where `G`
    /// maps block DOFs to auxiliary moments `(v', psi)`; the result is
    /// exactly symmetric positive semidefinite and zero when
    /// `weight = 0`.
    pub fn galerkin_stiffness(&self, layout: &DofLayout, field: usize, weight: f64) -> DMatrix<f64> {
        let block = layout.axial_block(field);
        let n_block = block.len();
        if weight == 0.0 {
            return DMatrix::zeros(n_block, n_block);
        }
        let n_aux = self.dim();
        // G[a, j] = integral of (basis_j)' * psi_a over the mesh.
        let mut g = DMatrix::<f64>::zeros(n_aux, n_block);
        let rule = GaussRule::two_point();
        for e in 0..self.mesh.n_elem() {
            let (_, h) = self.mesh.element(e);
            for (t, w) in rule.iter() {
                let vals = p1_values(t);
                let ders = p1_derivs(h);
                for (local_a, aux_node) in [e, e + 1].into_iter().enumerate() {
                    for (local_j, node_j) in [e, e + 1].into_iter().enumerate() {
                        if let Some(dof) = layout.axial_dof(field, node_j) {
                            let col = dof - block.start;
                            g[(aux_node, col)] += w * h * ders[local_j] * vals[local_a];
                        }
                    }
                }
            }
        }
        for mut col in g.column_iter_mut() {
            self.factor.forward(col.as_mut_slice());
        }
        let mut k = DMatrix::<f64>::zeros(n_block, n_block);
        for i in 0..n_block {
            for j in i..n_block {
                let mut s = 0.0;
                for a in 0..n_aux {
                    s += g[(a, i)] * g[(a, j)] / self.factor.d[a];
                }
                let v = weight * s;
                k[(i, j)] = v;
                k[(j, i)] = v;
            }
        }
        k
    }

    #[cfg(test)]
    pub(crate) fn mass_dense(&self) -> DMatrix<f64> {
        self.mass.to_dense()
    }

    #[cfg(test)]
    pub(crate) fn stiffness_dense(&self) -> DMatrix<f64> {
        self.stiffness.to_dense()
    }
}

/// Eigenvalues of the discrete resolvent with parameter `xi` on a uniform
/// mesh with `n_elem` cells over `[0, length]`, in decreasing order.
pub fn resolvent_spectrum(xi: f64, n_elem: usize, length: f64) -> Result<Vec<f64>> {
    let resolvent = NeumannResolvent::new(Mesh::uniform(length, n_elem)?, xi)?;
    Ok(resolvent.spectrum())
}
