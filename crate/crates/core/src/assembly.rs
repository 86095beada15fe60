//! Assembly of the semi-discrete closed-loop system
//! `M q'' + D q' + K q = 0` from a beam configuration.
//!
//! Longitudinal fields are discretized with C0 piecewise-linear elements,
//! bending with C1 Hermite cubics, matching the regularity of the weak
//! form with the minimal classical elements. The mass is consistent (not
//! lumped) so the rotational-inertia Gram stays consistent with the
//! bending kinetic energy. Boundary feedback appears as a diagonal
//! positive semidefinite damping matrix of rank equal to the number of
//! positive gains.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::element::{hermite_d1, hermite_d2, hermite_values, p1_derivs, p1_values, GaussRule};
use crate::error::{CoreError, Result};
use crate::mesh::{DofLayout, Mesh};
use crate::model::BeamConfig;
use crate::multilayer::MultilayerConfig;
use crate::resolvent::NeumannResolvent;

/// One collocated boundary feedback channel: `coef * |velocity(dof)|^2`
/// is its instantaneous dissipation rate.
#[derive(Debug, Clone, Serialize)]
pub struct DampingChannel {
    pub label: String,
    pub dof: usize,
    pub coef: f64,
}

/// The configuration a bundle was assembled from.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum ConfigSnapshot {
    ThreeLayer(BeamConfig),
    Multilayer(MultilayerConfig),
    Synthetic { label: String },
}

/// Assembled operators of the closed-loop system, immutable after
/// construction and safe to share across threads.
#[derive(Debug, Clone)]
pub struct OperatorBundle {
    pub mass: DMatrix<f64>,
    pub stiffness: DMatrix<f64>,
    pub damping: DMatrix<f64>,
    pub layout: DofLayout,
    pub mesh: Mesh,
    pub channels: Vec<DampingChannel>,
    pub config: ConfigSnapshot,
}

impl OperatorBundle {
    /// Builds a bundle from explicit operators, for synthetic systems and
    /// damping studies. Checks shapes and channel indices only.
    pub fn from_parts(
        mass: DMatrix<f64>,
        stiffness: DMatrix<f64>,
        damping: DMatrix<f64>,
        layout: DofLayout,
        mesh: Mesh,
        channels: Vec<DampingChannel>,
        label: &str,
    ) -> Result<Self> {
        let n = mass.nrows();
        for (m, context) in [
            (&mass, "mass"),
            (&stiffness, "stiffness"),
            (&damping, "damping"),
        ] {
            if m.nrows() != n || m.ncols() != n {
                return Err(CoreError::Dimension {
                    expected: n,
                    got: m.nrows().max(m.ncols()),
                    context: match context {
                        "mass" => "bundle mass matrix",
                        "stiffness" => "bundle stiffness matrix",
                        _ => "bundle damping matrix",
                    },
                });
            }
        }
        if let Some(c) = channels.iter().find(|c| c.dof >= n) {
            return Err(CoreError::Dimension {
                expected: n,
                got: c.dof,
                context: "damping channel dof",
            });
        }
        Ok(OperatorBundle {
            mass,
            stiffness,
            damping,
            layout,
            mesh,
            channels,
            config: ConfigSnapshot::Synthetic {
                label: label.to_string(),
            },
        })
    }

    pub fn n_dofs(&self) -> usize {
        self.mass.nrows()
    }

    /// Boundary trace DOFs: every longitudinal tip, then bending value
    /// and slope at the tip.
    pub fn trace_dofs(&self) -> Vec<usize> {
        let mut dofs: Vec<usize> = (0..self.layout.n_axial_fields())
            .map(|f| self.layout.axial_tip(f))
            .collect();
        dofs.push(self.layout.w_tip());
        dofs.push(self.layout.wx_tip());
        dofs
    }
}

/// Scatters `coef * (p1 mass)` of one longitudinal field into `out`.
pub(crate) fn add_p1_mass(
    out: &mut DMatrix<f64>,
    mesh: &Mesh,
    layout: &DofLayout,
    field: usize,
    coef: f64,
) {
    let rule = GaussRule::two_point();
    for e in 0..mesh.n_elem() {
        let (_, h) = mesh.element(e);
        let dofs = [layout.axial_dof(field, e), layout.axial_dof(field, e + 1)];
        for (t, w) in rule.iter() {
            let vals = p1_values(t);
            scatter_outer(out, &dofs, &vals, &dofs, &vals, coef * w * h);
        }
    }
}

/// Scatters `coef * (p1 stiffness)` of one longitudinal field into `out`.
pub(crate) fn add_p1_stiffness(
    out: &mut DMatrix<f64>,
    mesh: &Mesh,
    layout: &DofLayout,
    field: usize,
    coef: f64,
) {
    let rule = GaussRule::two_point();
    for e in 0..mesh.n_elem() {
        let (_, h) = mesh.element(e);
        let dofs = [layout.axial_dof(field, e), layout.axial_dof(field, e + 1)];
        for (_t, w) in rule.iter() {
            let ders = p1_derivs(h);
            scatter_outer(out, &dofs, &ders, &dofs, &ders, coef * w * h);
        }
    }
}

fn hermite_dofs(layout: &DofLayout, e: usize) -> [Option<usize>; 4] {
    [
        layout.w_value_dof(e),
        layout.w_slope_dof(e),
        layout.w_value_dof(e + 1),
        layout.w_slope_dof(e + 1),
    ]
}

/// Scatters `m_coef * (w, w) + d1_coef * (w', w')` over the bending
/// block: the consistent transverse mass plus the rotational-inertia
/// Gram.
pub(crate) fn add_hermite_mass(
    out: &mut DMatrix<f64>,
    mesh: &Mesh,
    layout: &DofLayout,
    m_coef: f64,
    d1_coef: f64,
) {
    let rule = GaussRule::four_point();
    for e in 0..mesh.n_elem() {
        let (_, h) = mesh.element(e);
        let dofs = hermite_dofs(layout, e);
        for (t, w) in rule.iter() {
            let vals = hermite_values(t, h);
            scatter_outer(out, &dofs, &vals, &dofs, &vals, m_coef * w * h);
            let d1 = hermite_d1(t, h);
            scatter_outer(out, &dofs, &d1, &dofs, &d1, d1_coef * w * h);
        }
    }
}

/// Scatters `coef * (w'', w'')` over the bending block.
pub(crate) fn add_hermite_bending(
    out: &mut DMatrix<f64>,
    mesh: &Mesh,
    layout: &DofLayout,
    coef: f64,
) {
    let rule = GaussRule::four_point();
    for e in 0..mesh.n_elem() {
        let (_, h) = mesh.element(e);
        let dofs = hermite_dofs(layout, e);
        for (t, w) in rule.iter() {
            let d2 = hermite_d2(t, h);
            scatter_outer(out, &dofs, &d2, &dofs, &d2, coef * w * h);
        }
    }
}

/// Scatters the Gram matrix of the shear functional
/// `f(q) = sum_i axial_coefs[i] * v_i(x) + wx_coef * w'(x)` with the
/// given weight: `weight * (f, f)`.
pub(crate) fn add_shear_coupling(
    out: &mut DMatrix<f64>,
    mesh: &Mesh,
    layout: &DofLayout,
    axial_coefs: &[f64],
    wx_coef: f64,
    weight: f64,
) {
    if weight == 0.0 {
        return;
    }
    let rule = GaussRule::four_point();
    let n_fields = axial_coefs.len();
    let mut local: Vec<(Option<usize>, f64)> = Vec::with_capacity(2 * n_fields + 4);
    for e in 0..mesh.n_elem() {
        let (_, h) = mesh.element(e);
        for (t, w) in rule.iter() {
            local.clear();
            let vals = p1_values(t);
            for (field, &c) in axial_coefs.iter().enumerate() {
                if c != 0.0 {
                    local.push((layout.axial_dof(field, e), c * vals[0]));
                    local.push((layout.axial_dof(field, e + 1), c * vals[1]));
                }
            }
            if wx_coef != 0.0 {
                let d1 = hermite_d1(t, h);
                let dofs = hermite_dofs(layout, e);
                for (dof, d) in dofs.into_iter().zip(d1) {
                    local.push((dof, wx_coef * d));
                }
            }
            let c = weight * w * h;
            for &(di, vi) in &local {
                let Some(i) = di else { continue };
                for &(dj, vj) in &local {
                    let Some(j) = dj else { continue };
                    out[(i, j)] += c * (vi * vj);
                }
            }
        }
    }
}

fn scatter_outer<const R: usize, const C: usize>(
    out: &mut DMatrix<f64>,
    rows: &[Option<usize>; R],
    row_vals: &[f64; R],
    cols: &[Option<usize>; C],
    col_vals: &[f64; C],
    scale: f64,
) {
    for a in 0..R {
        let Some(i) = rows[a] else { continue };
        for b in 0..C {
            let Some(j) = cols[b] else { continue };
            // Group the commutative product so (i, j) and (j, i)
            // take the identical FP path: assembly is exactly symmetric.
            out[(i, j)] += scale * (row_vals[a] * col_vals[b]);
        }
    }
}

fn three_layer_layout(mesh: &Mesh) -> DofLayout {
    DofLayout::new(mesh.n_elem(), 2)
}

/// Assembles the SPD mass matrix: block-diagonal longitudinal masses plus
/// the bending block with transverse mass and rotational inertia.
pub fn assemble_mass(config: &BeamConfig, mesh: &Mesh) -> DMatrix<f64> {
    let layout = three_layer_layout(mesh);
    let mut m = DMatrix::zeros(layout.total_dofs(), layout.total_dofs());
    let s = &config.layers.stiff;
    let p = &config.layers.piezo;
    add_p1_mass(&mut m, mesh, &layout, 0, s.rho * s.h);
    add_p1_mass(&mut m, mesh, &layout, 1, p.rho * p.h);
    add_hermite_mass(
        &mut m,
        mesh,
        &layout,
        config.derived.areal_mass,
        config.derived.rot_inertia,
    );
    m
}

/// Assembles the symmetric stiffness matrix: axial, nonlocal resolvent
/// (piezo field, zero weight in voltage mode), bending, and the shear
/// coupling Gram of `(-v1 + v3 + H w')/h2`.
pub fn assemble_stiffness(config: &BeamConfig, mesh: &Mesh) -> Result<DMatrix<f64>> {
    let layout = three_layer_layout(mesh);
    let mut k = DMatrix::zeros(layout.total_dofs(), layout.total_dofs());
    let s = &config.layers.stiff;
    let c = &config.layers.core;
    let p = &config.layers.piezo;
    let d = &config.derived;
    add_p1_stiffness(&mut k, mesh, &layout, 0, s.alpha * s.h);
    add_p1_stiffness(&mut k, mesh, &layout, 1, p.alpha * p.h);
    add_hermite_bending(&mut k, mesh, &layout, d.bend_stiffness);
    add_shear_coupling(&mut k, mesh, &layout, &[-1.0, 1.0], d.shear_arm, c.g / c.h);
    if d.pxi_weight > 0.0 {
        let resolvent = NeumannResolvent::new(mesh.clone(), d.xi)?;
        let k_pxi = resolvent.galerkin_stiffness(&layout, 1, d.pxi_weight);
        let block = layout.axial_block(1);
        let mut view = k.view_mut((block.start, block.start), (block.len(), block.len()));
        view += &k_pxi;
    }
    Ok(k)
}

/// Assembles the diagonal boundary damping matrix and its channel list.
///
/// In charge mode the piezo tip gain is scaled by `gamma/eps3` (the
/// charge source enters through a point load at the tip); in voltage mode
/// the gain applies directly.
pub fn assemble_damping(config: &BeamConfig, mesh: &Mesh) -> (DMatrix<f64>, Vec<DampingChannel>) {
    let layout = three_layer_layout(mesh);
    let g = &config.gains;
    let channels = vec![
        DampingChannel {
            label: "s1".to_string(),
            dof: layout.axial_tip(0),
            coef: g.s1,
        },
        DampingChannel {
            label: "s3".to_string(),
            dof: layout.axial_tip(1),
            coef: g.s3 * config.derived.charge_gain_scale,
        },
        DampingChannel {
            label: "k1".to_string(),
            dof: layout.wx_tip(),
            coef: g.k1,
        },
        DampingChannel {
            label: "k2".to_string(),
            dof: layout.w_tip(),
            coef: g.k2,
        },
    ];
    (damping_from_channels(&channels, layout.total_dofs()), channels)
}

pub(crate) fn damping_from_channels(channels: &[DampingChannel], n: usize) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(n, n);
    for c in channels {
        d[(c.dof, c.dof)] += c.coef;
    }
    d
}

/// Assembles the full operator bundle for a validated configuration.
pub fn assemble(config: &BeamConfig, mesh: &Mesh) -> Result<OperatorBundle> {
    let layout = three_layer_layout(mesh);
    let mass = assemble_mass(config, mesh);
    let stiffness = assemble_stiffness(config, mesh)?;
    let (damping, channels) = assemble_damping(config, mesh);
    Ok(OperatorBundle {
        mass,
        stiffness,
        damping,
        layout,
        mesh: mesh.clone(),
        channels,
        config: ConfigSnapshot::ThreeLayer(config.clone()),
    })
}

/// Interpolates closed-form fields onto the DOF vector: one function per
/// longitudinal field plus the bending deflection and its slope.
pub fn interpolate_fields(
    layout: &DofLayout,
    mesh: &Mesh,
    axial: &[&dyn Fn(f64) -> f64],
    w: &dyn Fn(f64) -> f64,
    wx: &dyn Fn(f64) -> f64,
) -> DVector<f64> {
    assert_eq!(axial.len(), layout.n_axial_fields());
    let mut q = DVector::zeros(layout.total_dofs());
    for (node, &x) in mesh.nodes().iter().enumerate() {
        for (field, f) in axial.iter().enumerate() {
            if let Some(dof) = layout.axial_dof(field, node) {
                q[dof] = f(x);
            }
        }
        if let Some(dof) = layout.w_value_dof(node) {
            q[dof] = w(x);
        }
        if let Some(dof) = layout.w_slope_dof(node) {
            q[dof] = wx(x);
        }
    }
    q
}
