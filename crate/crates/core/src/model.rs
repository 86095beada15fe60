//! Physical description of a three-layer ACL sandwich beam.
//!
//! The beam is a stiff elastic layer and a piezoelectric layer
//! sandwiching a compliant core that deforms only in shear. All
//! quantities are treated as consistent nondimensional values; units are
//! not enforced.

use serde::Serialize;

use crate::error::{CoreError, Result, Violation};

/// How the piezoelectric layer is driven.
///
/// Charge actuation keeps the induced-potential effect, which enters the
/// model as a nonlocal stiffness term on the piezoelectric layer and a
/// `gamma/eps3` scaling of its boundary feedback. Voltage actuation drops
/// both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Actuation {
    Charge,
    Voltage,
}

impl std::fmt::Display for Actuation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Actuation::Charge => write!(f, "charge"),
            Actuation::Voltage => write!(f, "voltage"),
        }
    }
}

/// Stiff host layer: density, thickness, axial stiffness modulus.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ElasticLayer {
    pub rho: f64,
    pub h: f64,
    pub alpha: f64,
}

/// Compliant core layer. Only its thickness and shear modulus enter the
/// reduced model; density and axial stiffness are retained for
/// completeness of the description.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CoreLayer {
    pub rho: f64,
    pub h: f64,
    pub alpha: f64,
    /// Shear modulus. Zero decouples the layers.
    pub g: f64,
}

/// Piezoelectric layer with electromechanical coupling `gamma` and
/// in-plane / transverse permittivities `eps1`, `eps3`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PiezoLayer {
    pub rho: f64,
    pub h: f64,
    pub alpha: f64,
    /// Piezoelectric coupling coefficient. Zero makes the layer purely
    /// elastic and the charge and voltage models coincide.
    pub gamma: f64,
    pub eps1: f64,
    pub eps3: f64,
}

/// The (stiff, core, piezo) triple making up the sandwich.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LayerStack {
    pub stiff: ElasticLayer,
    pub core: CoreLayer,
    pub piezo: PiezoLayer,
}

/// Collocated boundary feedback gains at the free end `x = L`.
///
/// `s1` acts on the stiff-layer tip velocity, `s3` on the piezoelectric
/// tip velocity (through the charge source in charge mode), `k1` on the
/// tip angular velocity (moment), `k2` on the tip transverse velocity.
/// The all-zero configuration is conservative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeedbackGains {
    pub s1: f64,
    pub s3: f64,
    pub k1: f64,
    pub k2: f64,
}

impl FeedbackGains {
    pub fn zero() -> Self {
        FeedbackGains {
            s1: 0.0,
            s3: 0.0,
            k1: 0.0,
            k2: 0.0,
        }
    }
}

/// Constants derived from the layer stack that parameterize the reduced
/// equations of motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedConstants {
    /// Areal mass of the face layers: `rho1*h1 + rho3*h3`.
    pub areal_mass: f64,
    /// Rotational inertia: `(rho1*h1^3 + rho3*h3^3)/12`.
    pub rot_inertia: f64,
    /// Bending stiffness: `(alpha1*h1^3 + alpha3*h3^3)/12`.
    pub bend_stiffness: f64,
    /// Shear geometry factor: `(h1 + 2*h2 + h3)/2`.
    pub shear_arm: f64,
    /// Squared length scale of the nonlocal resolvent:
    /// `eps1*h3^2/(12*eps3)`.
    pub xi: f64,
    /// Weight of the nonlocal stiffness term: `gamma^2*h3/eps3` in charge
    /// mode, zero in voltage mode.
    pub pxi_weight: f64,
    /// Scale applied to the `s3` boundary gain: `gamma/eps3` in charge
    /// mode, one in voltage mode.
    pub charge_gain_scale: f64,
}

/// Validated description of a three-layer beam: geometry, materials,
/// feedback gains, actuation mode, and the derived constants.
///
/// Immutable after construction; safe to share between threads.
#[derive(Debug, Clone, Serialize)]
pub struct BeamConfig {
    pub length: f64,
    pub layers: LayerStack,
    pub gains: FeedbackGains,
    pub actuation: Actuation,
    pub derived: DerivedConstants,
}

/// Computes the derived constants for a charge-actuated stack.
///
/// Fails with one violation per non-positive input field.
pub fn derive_constants(layers: &LayerStack) -> Result<DerivedConstants> {
    let violations = validate_layers(layers);
    if !violations.is_empty() {
        return Err(CoreError::Validation(violations));
    }
    Ok(constants_unchecked(layers, Actuation::Charge))
}

fn constants_unchecked(layers: &LayerStack, actuation: Actuation) -> DerivedConstants {
    let s = &layers.stiff;
    let c = &layers.core;
    let p = &layers.piezo;
    let (pxi_weight, charge_gain_scale) = match actuation {
        Actuation::Charge => (p.gamma * p.gamma * p.h / p.eps3, p.gamma / p.eps3),
        Actuation::Voltage => (0.0, 1.0),
    };
    DerivedConstants {
        areal_mass: s.rho * s.h + p.rho * p.h,
        rot_inertia: (s.rho * s.h.powi(3) + p.rho * p.h.powi(3)) / 12.0,
        bend_stiffness: (s.alpha * s.h.powi(3) + p.alpha * p.h.powi(3)) / 12.0,
        shear_arm: (s.h + 2.0 * c.h + p.h) / 2.0,
        xi: p.eps1 * p.h * p.h / (12.0 * p.eps3),
        pxi_weight,
        charge_gain_scale,
    }
}

fn check_positive(violations: &mut Vec<Violation>, field: &str, value: f64, what: &str) {
    if !(value > 0.0) {
        violations.push(Violation {
            field: field.to_string(),
            reason: format!("{what} must be positive (got {value})"),
        });
    }
}

fn check_nonnegative(violations: &mut Vec<Violation>, field: &str, value: f64, what: &str) {
    if !(value >= 0.0) {
        violations.push(Violation {
            field: field.to_string(),
            reason: format!("{what} must be nonnegative (got {value})"),
        });
    }
}

fn validate_layers(layers: &LayerStack) -> Vec<Violation> {
    let mut v = Vec::new();
    let s = &layers.stiff;
    check_positive(&mut v, "layer.stiff.rho", s.rho, "stiff layer density");
    check_positive(&mut v, "layer.stiff.h", s.h, "stiff layer thickness");
    check_positive(&mut v, "layer.stiff.alpha", s.alpha, "stiff layer stiffness");
    let c = &layers.core;
    check_positive(&mut v, "layer.core.rho", c.rho, "core density");
    check_positive(&mut v, "layer.core.h", c.h, "core thickness");
    check_positive(&mut v, "layer.core.alpha", c.alpha, "core stiffness");
    // Zero shear modulus decouples the layers; used by reference tests.
    check_nonnegative(&mut v, "layer.core.g", c.g, "core shear modulus");
    let p = &layers.piezo;
    check_positive(&mut v, "layer.piezo.rho", p.rho, "piezo layer density");
    check_positive(&mut v, "layer.piezo.h", p.h, "piezo layer thickness");
    check_positive(&mut v, "layer.piezo.alpha", p.alpha, "piezo layer stiffness");
    check_nonnegative(&mut v, "layer.piezo.gamma", p.gamma, "piezoelectric coupling");
    check_positive(&mut v, "layer.piezo.eps1", p.eps1, "in-plane permittivity");
    check_positive(&mut v, "layer.piezo.eps3", p.eps3, "transverse permittivity");
    v
}

fn validate_gains(gains: &FeedbackGains) -> Vec<Violation> {
    let mut v = Vec::new();
    check_nonnegative(&mut v, "gains.s1", gains.s1, "gains");
    check_nonnegative(&mut v, "gains.s3", gains.s3, "gains");
    check_nonnegative(&mut v, "gains.k1", gains.k1, "gains");
    check_nonnegative(&mut v, "gains.k2", gains.k2, "gains");
    v
}

impl BeamConfig {
    /// Validates all inputs and computes the derived constants.
    pub fn new(
        length: f64,
        layers: LayerStack,
        gains: FeedbackGains,
        actuation: Actuation,
    ) -> Result<Self> {
        let mut violations = Vec::new();
        if !(length > 0.0) {
            violations.push(Violation {
                field: "length".to_string(),
                reason: format!("beam length must be positive (got {length})"),
            });
        }
        violations.extend(validate_layers(&layers));
        violations.extend(validate_gains(&gains));
        if !violations.is_empty() {
            return Err(CoreError::Validation(violations));
        }
        Ok(BeamConfig {
            length,
            layers,
            gains,
            actuation,
            derived: constants_unchecked(&layers, actuation),
        })
    }

    /// Re-checks every invariant of an existing config.
    ///
    /// Returns the config unchanged when valid, otherwise the full list of
    /// violations (including a stale `derived` block).
    pub fn validate(self) -> Result<Self> {
        let checked = BeamConfig::new(self.length, self.layers, self.gains, self.actuation)?;
        if checked.derived != self.derived {
            return Err(CoreError::validation(
                "derived",
                "derived constants are inconsistent with the layer stack",
            ));
        }
        Ok(self)
    }

    /// Returns a copy with different gains.
    pub fn with_gains(&self, gains: FeedbackGains) -> Result<Self> {
        BeamConfig::new(self.length, self.layers, gains, self.actuation)
    }

    /// Returns a copy with a different actuation mode (derived constants
    /// are recomputed accordingly).
    pub fn with_actuation(&self, actuation: Actuation) -> Result<Self> {
        BeamConfig::new(self.length, self.layers, self.gains, actuation)
    }

    /// Reference configuration used by tests and the CLI when no config
    /// file is given: unit length, O(1) nondimensional moduli, thin faces
    /// and core, moderate gains. No physical claims attach to it.
    pub fn reference() -> Self {
        let layers = LayerStack {
            stiff: ElasticLayer {
                rho: 1.0,
                h: 0.1,
                alpha: 1.0,
            },
            core: CoreLayer {
                rho: 1.0,
                h: 0.05,
                alpha: 1.0,
                g: 1.0,
            },
            piezo: PiezoLayer {
                rho: 1.0,
                h: 0.1,
                alpha: 1.0,
                gamma: 0.1,
                eps1: 1.0,
                eps3: 1.0,
            },
        };
        let gains = FeedbackGains {
            s1: 0.5,
            s3: 0.5,
            k1: 0.5,
            k2: 0.5,
        };
        BeamConfig::new(1.0, layers, gains, Actuation::Charge)
            .expect("reference configuration is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layers(h1: f64, h2: f64, h3: f64) -> LayerStack {
        LayerStack {
            stiff: ElasticLayer {
                rho: 1.0,
                h: h1,
                alpha: 1.0,
            },
            core: CoreLayer {
                rho: 1.0,
                h: h2,
                alpha: 1.0,
                g: 1.0,
            },
            piezo: PiezoLayer {
                rho: 1.0,
                h: h3,
                alpha: 1.0,
                gamma: 0.1,
                eps1: 1.0,
                eps3: 1.0,
            },
        }
    }

    #[test]
    fn derived_constants_match_closed_forms() {
        let d = derive_constants(&layers(0.1, 0.05, 0.1)).unwrap();
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        assert!(rel(d.areal_mass, 0.2) < 1e-15);
        assert!(rel(d.rot_inertia, 2.0 * 0.001 / 12.0) < 1e-15);
        assert!(rel(d.bend_stiffness, 2.0 * 0.001 / 12.0) < 1e-15);
        assert!(rel(d.shear_arm, 0.15) < 1e-15);
        assert!(rel(d.xi, 0.01 / 12.0) < 1e-15);
        assert!(rel(d.pxi_weight, 0.01 * 0.1) < 1e-15);
        assert!(rel(d.charge_gain_scale, 0.1) < 1e-15);
    }

    #[test]
    fn derive_constants_rejects_nonpositive_fields() {
        let mut bad = layers(0.1, 0.05, 0.1);
        bad.core.h = 0.0;
        let err = derive_constants(&bad).unwrap_err();
        match err {
            CoreError::Validation(v) => {
                assert_eq!(v.len(), 1);
                assert_eq!(v[0].field, "layer.core.h");
                assert!(v[0].reason.contains("core thickness must be positive"));
            }
            other => panic!("expected validation error, got {other}"),
        }
    }

    #[test]
    fn negative_gain_is_rejected() {
        let gains = FeedbackGains {
            s1: -1.0,
            s3: 0.0,
            k1: 0.0,
            k2: 0.0,
        };
        let err = BeamConfig::new(1.0, layers(0.1, 0.05, 0.1), gains, Actuation::Charge)
            .unwrap_err();
        match err {
            CoreError::Validation(v) => {
                assert_eq!(v[0].field, "gains.s1");
                assert!(v[0].reason.contains("gains must be nonnegative"));
            }
            other => panic!("expected validation error, got {other}"),
        }
    }

    #[test]
    fn valid_config_round_trips_through_validate() {
        let config = BeamConfig::reference();
        let snapshot = format!("{config:?}");
        let checked = config.validate().unwrap();
        assert_eq!(format!("{checked:?}"), snapshot);
    }

    #[test]
    fn scaling_thicknesses_scales_derived_constants() {
        // m ~ c, K1 and K2 ~ c^3, H ~ c, xi ~ c^2 under h_i -> c*h_i.
        for &c in &[0.3, 2.0, 7.5] {
            let base = derive_constants(&layers(0.1, 0.05, 0.1)).unwrap();
            let scaled = derive_constants(&layers(0.1 * c, 0.05 * c, 0.1 * c)).unwrap();
            let rel = |a: f64, b: f64| ((a - b) / b).abs();
            assert!(rel(scaled.areal_mass, c * base.areal_mass) < 1e-12);
            assert!(rel(scaled.rot_inertia, c.powi(3) * base.rot_inertia) < 1e-12);
            assert!(rel(scaled.bend_stiffness, c.powi(3) * base.bend_stiffness) < 1e-12);
            assert!(rel(scaled.shear_arm, c * base.shear_arm) < 1e-12);
            assert!(rel(scaled.xi, c * c * base.xi) < 1e-12);
        }
    }

    #[test]
    fn voltage_mode_matches_gamma_zero_charge_mode_except_switches() {
        let mut stack = layers(0.1, 0.05, 0.1);
        stack.piezo.gamma = 0.0;
        let charge = BeamConfig::new(1.0, stack, FeedbackGains::zero(), Actuation::Charge)
            .unwrap()
            .derived;
        let voltage = BeamConfig::new(1.0, stack, FeedbackGains::zero(), Actuation::Voltage)
            .unwrap()
            .derived;
        assert_eq!(charge.areal_mass, voltage.areal_mass);
        assert_eq!(charge.rot_inertia, voltage.rot_inertia);
        assert_eq!(charge.bend_stiffness, voltage.bend_stiffness);
        assert_eq!(charge.shear_arm, voltage.shear_arm);
        assert_eq!(charge.xi, voltage.xi);
        assert_eq!(charge.pxi_weight, 0.0);
        assert_eq!(voltage.pxi_weight, 0.0);
        assert_eq!(charge.charge_gain_scale, 0.0);
        assert_eq!(voltage.charge_gain_scale, 1.0);
    }
}
