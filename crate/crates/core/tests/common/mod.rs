//! Shared test oracles, written independently of the library's element
//! and assembly code paths: closed-form shape evaluation with a separate
//! Gauss rule, a finite-difference resolvent on a fine grid, and a
//! complex Newton root finder for the damped-wave characteristic
//! equation.

use aclbeam::mesh::{DofLayout, Mesh};
use aclbeam::model::BeamConfig;
use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;

/// 5-point Gauss-Legendre rule on [0, 1] (exact through degree 9).
const GAUSS5: [(f64, f64); 5] = [
    (0.046_910_077_030_668_05, 0.236_926_885_056_189_08 / 2.0),
    (0.230_765_344_947_158_45, 0.478_628_670_499_366_47 / 2.0),
    (0.5, 0.568_888_888_888_888_9 / 2.0),
    (0.769_234_655_052_841_55, 0.478_628_670_499_366_47 / 2.0),
    (0.953_089_922_969_331_9, 0.236_926_885_056_189_08 / 2.0),
];

fn p1_at(t: f64, left: f64, right: f64) -> f64 {
    (1.0 - t) * left + t * right
}

fn hermite_at(t: f64, h: f64, dofs: [f64; 4]) -> f64 {
    let n1 = 1.0 - 3.0 * t * t + 2.0 * t * t * t;
    let n2 = h * t * (1.0 - t) * (1.0 - t);
    let n3 = 3.0 * t * t - 2.0 * t * t * t;
    let n4 = h * t * t * (t - 1.0);
    n1 * dofs[0] + n2 * dofs[1] + n3 * dofs[2] + n4 * dofs[3]
}

fn hermite_d1_at(t: f64, h: f64, dofs: [f64; 4]) -> f64 {
    let n1 = (-6.0 * t + 6.0 * t * t) / h;
    let n2 = 1.0 - 4.0 * t + 3.0 * t * t;
    let n3 = (6.0 * t - 6.0 * t * t) / h;
    let n4 = -2.0 * t + 3.0 * t * t;
    n1 * dofs[0] + n2 * dofs[1] + n3 * dofs[2] + n4 * dofs[3]
}

fn hermite_d2_at(t: f64, h: f64, dofs: [f64; 4]) -> f64 {
    let n1 = (-6.0 + 12.0 * t) / (h * h);
    let n2 = (-4.0 + 6.0 * t) / h;
    let n3 = (6.0 - 12.0 * t) / (h * h);
    let n4 = (-2.0 + 6.0 * t) / h;
    n1 * dofs[0] + n2 * dofs[1] + n3 * dofs[2] + n4 * dofs[3]
}

fn axial_nodal(layout: &DofLayout, q: &DVector<f64>, field: usize, node: usize) -> f64 {
    layout.axial_dof(field, node).map_or(0.0, |d| q[d])
}

fn hermite_nodal(layout: &DofLayout, q: &DVector<f64>, e: usize) -> [f64; 4] {
    [
        layout.w_value_dof(e).map_or(0.0, |d| q[d]),
        layout.w_slope_dof(e).map_or(0.0, |d| q[d]),
        layout.w_value_dof(e + 1).map_or(0.0, |d| q[d]),
        layout.w_slope_dof(e + 1).map_or(0.0, |d| q[d]),
    ]
}

/// Independent quadrature of the total energy integrand for a three-layer
/// configuration on a uniform mesh.
pub fn energy_quadrature(
    config: &BeamConfig,
    mesh: &Mesh,
    layout: &DofLayout,
    q: &DVector<f64>,
    v: &DVector<f64>,
) -> f64 {
    let s = &config.layers.stiff;
    let c = &config.layers.core;
    let p = &config.layers.piezo;
    let d = &config.derived;
    let mut twice_energy = 0.0;
    for e in 0..mesh.n_elem() {
        let (_, h) = mesh.element(e);
        let v1 = [
            axial_nodal(layout, q, 0, e),
            axial_nodal(layout, q, 0, e + 1),
        ];
        let v3 = [
            axial_nodal(layout, q, 1, e),
            axial_nodal(layout, q, 1, e + 1),
        ];
        let v1dot = [
            axial_nodal(layout, v, 0, e),
            axial_nodal(layout, v, 0, e + 1),
        ];
        let v3dot = [
            axial_nodal(layout, v, 1, e),
            axial_nodal(layout, v, 1, e + 1),
        ];
        let w = hermite_nodal(layout, q, e);
        let wdot = hermite_nodal(layout, v, e);
        let v1x = (v1[1] - v1[0]) / h;
        let v3x = (v3[1] - v3[0]) / h;
        for (t, weight) in GAUSS5 {
            let dx = weight * h;
            let kinetic = s.rho * s.h * p1_at(t, v1dot[0], v1dot[1]).powi(2)
                + p.rho * p.h * p1_at(t, v3dot[0], v3dot[1]).powi(2)
                + d.areal_mass * hermite_at(t, h, wdot).powi(2)
                + d.rot_inertia * hermite_d1_at(t, h, wdot).powi(2);
            let shear = p1_at(t, -v1[0], -v1[1])
                + p1_at(t, v3[0], v3[1])
                + d.shear_arm * hermite_d1_at(t, h, w);
            let potential = s.alpha * s.h * v1x * v1x
                + p.alpha * p.h * v3x * v3x
                + d.bend_stiffness * hermite_d2_at(t, h, w).powi(2)
                + c.g / c.h * shear * shear;
            twice_energy += dx * (kinetic + potential);
        }
    }
    if d.pxi_weight > 0.0 {
        twice_energy += d.pxi_weight * nonlocal_quadratic_form(config, mesh, layout, q);
    }
    0.5 * twice_energy
}

/// `(P v3', v3')` via an independently assembled auxiliary system solved
/// densely: closed-form uniform tridiagonal entries, LU solve, trapezoid
/// integration of the piecewise-linear auxiliary field against the
/// piecewise-constant derivative.
fn nonlocal_quadratic_form(
    config: &BeamConfig,
    mesh: &Mesh,
    layout: &DofLayout,
    q: &DVector<f64>,
) -> f64 {
    let n = mesh.n_elem();
    let h = mesh.length() / n as f64;
    let xi = config.derived.xi;
    let dim = n + 1;
    let mut system = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim {
        let boundary = i == 0 || i == n;
        system[(i, i)] = if boundary { h / 3.0 } else { 2.0 * h / 3.0 }
            + xi * if boundary { 1.0 / h } else { 2.0 / h };
        if i + 1 < dim {
            system[(i, i + 1)] = h / 6.0 - xi / h;
            system[(i + 1, i)] = h / 6.0 - xi / h;
        }
    }
    let mut load = DVector::<f64>::zeros(dim);
    let mut slope = vec![0.0; n];
    for e in 0..n {
        let left = axial_nodal(layout, q, 1, e);
        let right = axial_nodal(layout, q, 1, e + 1);
        let c = (right - left) / h;
        slope[e] = c;
        load[e] += c * h / 2.0;
        load[e + 1] += c * h / 2.0;
    }
    let eta = system.lu().solve(&load).expect("aux system is SPD");
    let mut form = 0.0;
    for e in 0..n {
        form += slope[e] * h * 0.5 * (eta[e] + eta[e + 1]);
    }
    form
}

/// Dense finite-difference solve of `(I - xi d2/dx2) eta = z` with
/// Neumann conditions on a uniform grid with `n` cells.
pub fn resolvent_fd(xi: f64, z: &dyn Fn(f64) -> f64, n: usize, length: f64) -> Vec<f64> {
    let h = length / n as f64;
    let dim = n + 1;
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    let mut rhs = DVector::<f64>::zeros(dim);
    let r = xi / (h * h);
    for i in 0..dim {
        rhs[i] = z(i as f64 * h);
        a[(i, i)] = 1.0 + 2.0 * r;
        if i == 0 {
            a[(0, 1)] = -2.0 * r;
        } else if i == n {
            a[(n, n - 1)] = -2.0 * r;
        } else {
            a[(i, i - 1)] = -r;
            a[(i, i + 1)] = -r;
        }
    }
    let eta = a.lu().solve(&rhs).expect("FD system is invertible");
    eta.iter().copied().collect()
}

/// First `count` upper-half-plane roots of
/// `cosh(lambda L) + s sinh(lambda L) = 0` by complex Newton iteration,
/// ordered by imaginary part.
pub fn damped_wave_roots(s: f64, length: f64, count: usize) -> Vec<C64> {
    let f = |l: C64| (l * length).cosh() + (l * length).sinh() * s;
    let fp = |l: C64| ((l * length).sinh() + (l * length).cosh() * s) * length;
    (1..=count)
        .map(|k| {
            let mut l = C64::new(-0.5, (k as f64 - 0.5) * std::f64::consts::PI / length);
            for _ in 0..60 {
                let step = f(l) / fp(l);
                l -= step;
                if step.norm() < 1e-14 {
                    break;
                }
            }
            assert!(
                f(l).norm() < 1e-12,
                "Newton failed for root {k}: residual {}",
                f(l).norm()
            );
            l
        })
        .collect()
}

/// Relative difference of two scalars against the second.
pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-300)
}
