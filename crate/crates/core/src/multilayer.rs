//! Multilayer sandwich beams: `m` compliant core layers alternating with
//! `m+1` stiff/piezoelectric face layers.
//!
//! Each odd (face) layer carries a longitudinal field with its own
//! nonlocal resolvent term and tip charge feedback; the single bending
//! field couples to all of them through the per-core shear angles
//! `phi_i = (B y)_i / h_i + N_i w'`, built from the incidence matrices of
//! the layup. At `m = 1` the assembly reduces entrywise to the
//! three-layer model.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::assembly::{
    add_hermite_bending, add_hermite_mass, add_p1_mass, add_p1_stiffness, add_shear_coupling,
    damping_from_channels, ConfigSnapshot, DampingChannel, OperatorBundle,
};
use crate::error::{CoreError, Result, Violation};
use crate::mesh::{DofLayout, Mesh};
use crate::model::BeamConfig;
use crate::resolvent::NeumannResolvent;

/// Face layer of the multilayer stack. `gamma = 0` marks a purely
/// elastic layer: it takes direct mechanical tip feedback instead of the
/// charge-scaled one, and contributes no resolvent term.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OddLayerParams {
    pub rho: f64,
    pub h: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub eps1: f64,
    pub eps3: f64,
}

/// Core layer of the multilayer stack: thickness and shear modulus.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EvenLayerParams {
    pub h: f64,
    pub g: f64,
}

/// Tip feedback gains: one longitudinal gain per face layer plus the
/// bending moment and transverse gains.
#[derive(Debug, Clone, Serialize)]
pub struct MultilayerGains {
    pub s: Vec<f64>,
    pub k1: f64,
    pub k2: f64,
}

/// Bending-field constants summed over the face layers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MultilayerDerived {
    pub areal_mass: f64,
    pub rot_inertia: f64,
    pub bend_stiffness: f64,
}

/// Validated multilayer beam description with `m = even.len()` cores and
/// `m + 1` faces.
#[derive(Debug, Clone, Serialize)]
pub struct MultilayerConfig {
    pub length: f64,
    pub odd: Vec<OddLayerParams>,
    pub even: Vec<EvenLayerParams>,
    pub gains: MultilayerGains,
    pub derived: MultilayerDerived,
}

impl MultilayerConfig {
    pub fn new(
        length: f64,
        odd: Vec<OddLayerParams>,
        even: Vec<EvenLayerParams>,
        gains: MultilayerGains,
    ) -> Result<Self> {
        let mut v = Vec::new();
        if !(length > 0.0) {
            v.push(Violation {
                field: "length".to_string(),
                reason: format!("beam length must be positive (got {length})"),
            });
        }
        if even.is_empty() {
            v.push(Violation {
                field: "layer.even".to_string(),
                reason: "at least one core layer is required".to_string(),
            });
        }
        if odd.len() != even.len() + 1 {
            v.push(Violation {
                field: "layer.odd".to_string(),
                reason: format!(
                    "need one more face layer than core layers (got {} faces, {} cores)",
                    odd.len(),
                    even.len()
                ),
            });
        }
        for (i, layer) in odd.iter().enumerate() {
            let field = |name: &str| format!("layer.odd[{i}].{name}");
            positive(&mut v, &field("rho"), layer.rho, "face density");
            positive(&mut v, &field("h"), layer.h, "face thickness");
            positive(&mut v, &field("alpha"), layer.alpha, "face stiffness");
            nonnegative(&mut v, &field("gamma"), layer.gamma, "piezoelectric coupling");
            positive(&mut v, &field("eps1"), layer.eps1, "in-plane permittivity");
            positive(&mut v, &field("eps3"), layer.eps3, "transverse permittivity");
        }
        for (i, layer) in even.iter().enumerate() {
            let field = |name: &str| format!("layer.even[{i}].{name}");
            positive(&mut v, &field("h"), layer.h, "core thickness");
            nonnegative(&mut v, &field("g"), layer.g, "core shear modulus");
        }
        if gains.s.len() != odd.len() {
            v.push(Violation {
                field: "gains.s".to_string(),
                reason: format!(
                    "need one longitudinal gain per face layer (got {}, expected {})",
                    gains.s.len(),
                    odd.len()
                ),
            });
        }
        for (i, s) in gains.s.iter().enumerate() {
            nonnegative(&mut v, &format!("gains.s[{i}]"), *s, "gains");
        }
        nonnegative(&mut v, "gains.k1", gains.k1, "gains");
        nonnegative(&mut v, "gains.k2", gains.k2, "gains");
        if !v.is_empty() {
            return Err(CoreError::Validation(v));
        }
        let derived = MultilayerDerived {
            areal_mass: odd.iter().map(|l| l.rho * l.h).sum(),
            rot_inertia: odd.iter().map(|l| l.rho * l.h.powi(3) / 12.0).sum::<f64>(),
            bend_stiffness: odd.iter().map(|l| l.alpha * l.h.powi(3) / 12.0).sum::<f64>(),
        };
        Ok(MultilayerConfig {
            length,
            odd,
            even,
            gains,
            derived,
        })
    }

    /// Number of core layers.
    pub fn n_cores(&self) -> usize {
        self.even.len()
    }

    /// Embeds a three-layer configuration as the `m = 1` multilayer with
    /// the stiff layer as a purely elastic face (`gamma = 0`).
    pub fn from_three_layer(config: &BeamConfig) -> Result<Self> {
        let s = &config.layers.stiff;
        let c = &config.layers.core;
        let p = &config.layers.piezo;
        MultilayerConfig::new(
            config.length,
            vec![
                OddLayerParams {
                    rho: s.rho,
                    h: s.h,
                    alpha: s.alpha,
                    gamma: 0.0,
                    eps1: 1.0,
                    eps3: 1.0,
                },
                OddLayerParams {
                    rho: p.rho,
                    h: p.h,
                    alpha: p.alpha,
                    gamma: p.gamma,
                    eps1: p.eps1,
                    eps3: p.eps3,
                },
            ],
            vec![EvenLayerParams { h: c.h, g: c.g }],
            MultilayerGains {
                s: vec![config.gains.s1, config.gains.s3],
                k1: config.gains.k1,
                k2: config.gains.k2,
            },
        )
    }
}

fn positive(v: &mut Vec<Violation>, field: &str, value: f64, what: &str) {
    if !(value > 0.0) {
        v.push(Violation {
            field: field.to_string(),
            reason: format!("{what} must be positive (got {value})"),
        });
    }
}

fn nonnegative(v: &mut Vec<Violation>, field: &str, value: f64, what: &str) {
    if !(value >= 0.0) {
        v.push(Violation {
            field: field.to_string(),
            reason: format!("{what} must be nonnegative (got {value})"),
        });
    }
}

/// Averaging and difference incidence matrices of the layup, both
/// `m x (m+1)`: `a` averages adjacent face thicknesses, `b` takes signed
/// differences of adjacent face displacements (rows sum to zero).
pub fn build_incidence(m: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if m < 1 {
        return Err(CoreError::InvalidArgument(
            "multilayer needs at least one core layer".to_string(),
        ));
    }
    let a = DMatrix::from_fn(m, m + 1, |i, j| if j == i || j == i + 1 { 0.5 } else { 0.0 });
    let b = DMatrix::from_fn(m, m + 1, |i, j| {
        if j == i || j == i + 1 {
            // (-1)^(i+j+1) with 1-based indices.
            if (i + j) % 2 == 0 {
                -1.0
            } else {
                1.0
            }
        } else {
            0.0
        }
    });
    Ok((a, b))
}

/// Shear lever arms `N_i = (h_{o,i} + h_{o,i+1})/(2 h_{e,i}) + 1`,
/// one per core layer.
pub fn shear_vector(config: &MultilayerConfig) -> DVector<f64> {
    let m = config.n_cores();
    let (a, _) = build_incidence(m).expect("validated config has m >= 1");
    let h_odd = DVector::from_iterator(m + 1, config.odd.iter().map(|l| l.h));
    let averaged = a * h_odd;
    DVector::from_fn(m, |i, _| averaged[i] / config.even[i].h + 1.0)
}

/// Assembles the multilayer operator bundle: one longitudinal block per
/// face layer followed by the bending block.
pub fn assemble_multilayer(config: &MultilayerConfig, mesh: &Mesh) -> Result<OperatorBundle> {
    let m = config.n_cores();
    let layout = DofLayout::new(mesh.n_elem(), m + 1);
    let n = layout.total_dofs();
    let (_, b) = build_incidence(m)?;
    let arms = shear_vector(config);

    let mut mass = DMatrix::zeros(n, n);
    for (i, layer) in config.odd.iter().enumerate() {
        add_p1_mass(&mut mass, mesh, &layout, i, layer.rho * layer.h);
    }
    add_hermite_mass(
        &mut mass,
        mesh,
        &layout,
        config.derived.areal_mass,
        config.derived.rot_inertia,
    );

    let mut stiffness = DMatrix::zeros(n, n);
    for (i, layer) in config.odd.iter().enumerate() {
        add_p1_stiffness(&mut stiffness, mesh, &layout, i, layer.alpha * layer.h);
        if layer.gamma > 0.0 {
            let xi = layer.eps1 * layer.h * layer.h / (12.0 * layer.eps3);
            let weight = layer.gamma * layer.gamma * layer.h / layer.eps3;
            let resolvent = NeumannResolvent::new(mesh.clone(), xi)?;
            let k_pxi = resolvent.galerkin_stiffness(&layout, i, weight);
            let block = layout.axial_block(i);
            let mut view =
                stiffness.view_mut((block.start, block.start), (block.len(), block.len()));
            view += &k_pxi;
        }
    }
    add_hermite_bending(&mut stiffness, mesh, &layout, config.derived.bend_stiffness);
    for (j, core) in config.even.iter().enumerate() {
        let coefs: Vec<f64> = (0..=m).map(|i| b[(j, i)]).collect();
        add_shear_coupling(
            &mut stiffness,
            mesh,
            &layout,
            &coefs,
            core.h * arms[j],
            core.g / core.h,
        );
    }

    let mut channels = Vec::with_capacity(m + 3);
    for (i, layer) in config.odd.iter().enumerate() {
        let coef = if layer.gamma > 0.0 {
            config.gains.s[i] * layer.gamma / layer.eps3
        } else {
            config.gains.s[i]
        };
        channels.push(DampingChannel {
            // Physical layer index: faces are layers 1, 3, ..., 2m+1.
            label: format!("s{}", 2 * i + 1),
            dof: layout.axial_tip(i),
            coef,
        });
    }
    channels.push(DampingChannel {
        label: "k1".to_string(),
        dof: layout.wx_tip(),
        coef: config.gains.k1,
    });
    channels.push(DampingChannel {
        label: "k2".to_string(),
        dof: layout.w_tip(),
        coef: config.gains.k2,
    });
    let damping = damping_from_channels(&channels, n);

    Ok(OperatorBundle {
        mass,
        stiffness,
        damping,
        layout,
        mesh: mesh.clone(),
        channels,
        config: ConfigSnapshot::Multilayer(config.clone()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::assemble;

    fn uniform_stack(m: usize, gamma: f64, g: f64, s: f64) -> MultilayerConfig {
        let odd = (0..=m)
            .map(|_| OddLayerParams {
                rho: 1.0,
                h: 0.1,
                alpha: 1.0,
                gamma,
                eps1: 1.0,
                eps3: 1.0,
            })
            .collect();
        let even = (0..m).map(|_| EvenLayerParams { h: 0.05, g }).collect();
        let gains = MultilayerGains {
            s: vec![s; m + 1],
            k1: s,
            k2: s,
        };
        MultilayerConfig::new(1.0, odd, even, gains).unwrap()
    }

    #[test]
    fn incidence_matrices_match_formulas() {
        let (a, b) = build_incidence(1).unwrap();
        assert_eq!(a.as_slice(), &[0.5, 0.5]);
        assert_eq!(b.as_slice(), &[-1.0, 1.0]);
        let (a2, b2) = build_incidence(2).unwrap();
        let expect_a = DMatrix::from_row_slice(2, 3, &[0.5, 0.5, 0.0, 0.0, 0.5, 0.5]);
        let expect_b = DMatrix::from_row_slice(2, 3, &[-1.0, 1.0, 0.0, 0.0, -1.0, 1.0]);
        assert_eq!(a2, expect_a);
        assert_eq!(b2, expect_b);
        assert!(build_incidence(0).is_err());
    }

    #[test]
    fn incidence_row_sums() {
        for m in 1..=6 {
            let (a, b) = build_incidence(m).unwrap();
            let ones = DVector::from_element(m + 1, 1.0);
            let a_sums = &a * &ones;
            let b_sums = &b * &ones;
            for i in 0..m {
                assert_eq!(a_sums[i], 1.0);
                assert_eq!(b_sums[i], 0.0, "rigid translation produces no shear");
            }
        }
    }

    #[test]
    fn shear_arms_reduce_to_three_layer_factor() {
        let config = MultilayerConfig::from_three_layer(&BeamConfig::reference()).unwrap();
        let arms = shear_vector(&config);
        assert_eq!(arms.len(), 1);
        // H/h2 with H = 0.15, h2 = 0.05.
        assert!((arms[0] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn equal_thickness_arms_are_two() {
        let odd = (0..3)
            .map(|_| OddLayerParams {
                rho: 1.0,
                h: 0.2,
                alpha: 1.0,
                gamma: 0.0,
                eps1: 1.0,
                eps3: 1.0,
            })
            .collect();
        let even = (0..2).map(|_| EvenLayerParams { h: 0.2, g: 1.0 }).collect();
        let gains = MultilayerGains {
            s: vec![0.0; 3],
            k1: 0.0,
            k2: 0.0,
        };
        let config = MultilayerConfig::new(1.0, odd, even, gains).unwrap();
        let arms = shear_vector(&config);
        assert!(arms.iter().all(|a| (a - 2.0).abs() < 1e-15));
    }

    #[test]
    fn mixed_thickness_arms_match_hand_formula() {
        let hs = [0.1, 0.3, 0.2];
        let he = [0.05, 0.15];
        let odd = hs
            .iter()
            .map(|&h| OddLayerParams {
                rho: 1.0,
                h,
                alpha: 1.0,
                gamma: 0.0,
                eps1: 1.0,
                eps3: 1.0,
            })
            .collect();
        let even = he.iter().map(|&h| EvenLayerParams { h, g: 1.0 }).collect();
        let gains = MultilayerGains {
            s: vec![0.0; 3],
            k1: 0.0,
            k2: 0.0,
        };
        let config = MultilayerConfig::new(1.0, odd, even, gains).unwrap();
        let arms = shear_vector(&config);
        for i in 0..2 {
            let expected = (hs[i] + hs[i + 1]) / (2.0 * he[i]) + 1.0;
            assert!((arms[i] - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn single_core_assembly_reduces_to_three_layer_bundle() {
        let three = BeamConfig::reference();
        let multi = MultilayerConfig::from_three_layer(&three).unwrap();
        let mesh = Mesh::uniform(1.0, 10).unwrap();
        let b3 = assemble(&three, &mesh).unwrap();
        let bm = assemble_multilayer(&multi, &mesh).unwrap();
        assert!((&b3.mass - &bm.mass).amax() < 1e-12);
        assert!((&b3.stiffness - &bm.stiffness).amax() < 1e-12);
        assert!((&b3.damping - &bm.damping).amax() < 1e-12);
    }

    #[test]
    fn decoupled_multilayer_is_block_diagonal() {
        let config = uniform_stack(2, 0.0, 0.0, 0.0);
        let mesh = Mesh::uniform(1.0, 4).unwrap();
        let bundle = assemble_multilayer(&config, &mesh).unwrap();
        let layout = &bundle.layout;
        for f in 0..2 {
            for g in (f + 1)..3 {
                for i in layout.axial_block(f) {
                    for j in layout.axial_block(g) {
                        assert_eq!(bundle.stiffness[(i, j)], 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn stiffness_is_coercive_for_small_stacks() {
        for m in 1..=3 {
            let config = uniform_stack(m, 0.1, 1.0, 0.5);
            let mesh = Mesh::uniform(1.0, 6).unwrap();
            let bundle = assemble_multilayer(&config, &mesh).unwrap();
            let eigs = bundle.stiffness.clone().symmetric_eigenvalues();
            assert!(
                eigs.iter().all(|e| *e > 1e-10),
                "m={m}: min eig {:?}",
                eigs.iter().cloned().fold(f64::INFINITY, f64::min)
            );
        }
    }

    #[test]
    fn layer_count_mismatch_is_rejected() {
        let odd = vec![
            OddLayerParams {
                rho: 1.0,
                h: 0.1,
                alpha: 1.0,
                gamma: 0.0,
                eps1: 1.0,
                eps3: 1.0,
            };
            3
        ];
        let even = vec![EvenLayerParams { h: 0.05, g: 1.0 }; 3];
        let gains = MultilayerGains {
            s: vec![0.0; 3],
            k1: 0.0,
            k2: 0.0,
        };
        let err = MultilayerConfig::new(1.0, odd, even, gains).unwrap_err();
        assert!(err.to_string().contains("one more face layer"));
    }
}
