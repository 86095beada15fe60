//! 1D mesh and degree-of-freedom bookkeeping.
//!
//! Longitudinal fields use continuous piecewise-linear elements, the
//! bending field uses Hermite cubics (value + slope per node). The beam
//! is clamped at `x = 0`: the clamped DOFs are eliminated from the global
//! numbering, not penalized.

use std::ops::Range;

use crate::error::{CoreError, Result};

/// Sorted node coordinates on `[0, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    nodes: Vec<f64>,
}

impl Mesh {
    /// Uniform mesh with `n_elem` elements on `[0, length]`.
    pub fn uniform(length: f64, n_elem: usize) -> Result<Self> {
        if !(length > 0.0) {
            return Err(CoreError::InvalidArgument(format!(
                "mesh length must be positive (got {length})"
            )));
        }
        if n_elem < 2 {
            return Err(CoreError::InvalidArgument(format!(
                "mesh needs at least 2 elements (got {n_elem})"
            )));
        }
        let h = length / n_elem as f64;
        let mut nodes: Vec<f64> = (0..=n_elem).map(|i| i as f64 * h).collect();
        // Pin the endpoint exactly.
        nodes[n_elem] = length;
        Ok(Mesh { nodes })
    }

    /// Mesh from explicit node coordinates (non-uniform allowed).
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(CoreError::InvalidArgument(
                "mesh needs at least 2 elements".to_string(),
            ));
        }
        if nodes[0] != 0.0 {
            return Err(CoreError::InvalidArgument(
                "first mesh node must be 0".to_string(),
            ));
        }
        if !nodes.windows(2).all(|w| w[1] > w[0]) {
            return Err(CoreError::InvalidArgument(
                "mesh nodes must be strictly increasing".to_string(),
            ));
        }
        Ok(Mesh { nodes })
    }

    pub fn n_elem(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn length(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Left endpoint and length of element `e`.
    pub fn element(&self, e: usize) -> (f64, f64) {
        (self.nodes[e], self.nodes[e + 1] - self.nodes[e])
    }
}

/// Global DOF numbering: one block per longitudinal field followed by the
/// bending block. With clamping, each longitudinal block holds the nodal
/// values at nodes `1..=n` and the bending block holds (value, slope)
/// pairs at nodes `1..=n`, interleaved per node.
#[derive(Debug, Clone, PartialEq)]
pub struct DofLayout {
    n_elem: usize,
    clamped: bool,
    axial: Vec<Range<usize>>,
    w: Range<usize>,
}

impl DofLayout {
    /// Layout with `n_axial` longitudinal fields, clamped at `x = 0`.
    pub fn new(n_elem: usize, n_axial: usize) -> Self {
        Self::build(n_elem, n_axial, true)
    }

    /// Free-free variant retaining the node-0 DOFs. Used by tests that
    /// probe rigid modes of individual energy terms.
    #[cfg(test)]
    pub(crate) fn unclamped(n_elem: usize, n_axial: usize) -> Self {
        Self::build(n_elem, n_axial, false)
    }

    fn build(n_elem: usize, n_axial: usize, clamped: bool) -> Self {
        let per_axial = if clamped { n_elem } else { n_elem + 1 };
        let per_w = 2 * per_axial;
        let mut axial = Vec::with_capacity(n_axial);
        let mut offset = 0;
        for _ in 0..n_axial {
            axial.push(offset..offset + per_axial);
            offset += per_axial;
        }
        DofLayout {
            n_elem,
            clamped,
            axial,
            w: offset..offset + per_w,
        }
    }

    pub fn n_elem(&self) -> usize {
        self.n_elem
    }

    pub fn n_axial_fields(&self) -> usize {
        self.axial.len()
    }

    pub fn total_dofs(&self) -> usize {
        self.w.end
    }

    /// Global index range of longitudinal field `field`.
    pub fn axial_block(&self, field: usize) -> Range<usize> {
        self.axial[field].clone()
    }

    /// Global index range of the bending block.
    pub fn w_block(&self) -> Range<usize> {
        self.w.clone()
    }

    /// Global DOF of longitudinal field `field` at mesh node `node`, or
    /// `None` when the node is clamped away.
    pub fn axial_dof(&self, field: usize, node: usize) -> Option<usize> {
        let local = self.local_node(node)?;
        Some(self.axial[field].start + local)
    }

    /// Global DOF of the bending value at mesh node `node`.
    pub fn w_value_dof(&self, node: usize) -> Option<usize> {
        let local = self.local_node(node)?;
        Some(self.w.start + 2 * local)
    }

    /// Global DOF of the bending slope at mesh node `node`.
    pub fn w_slope_dof(&self, node: usize) -> Option<usize> {
        let local = self.local_node(node)?;
        Some(self.w.start + 2 * local + 1)
    }

    fn local_node(&self, node: usize) -> Option<usize> {
        if self.clamped {
            node.checked_sub(1)
        } else {
            Some(node)
        }
    }

    /// Boundary DOF of longitudinal field `field` at `x = L`.
    pub fn axial_tip(&self, field: usize) -> usize {
        self.axial_dof(field, self.n_elem).unwrap()
    }

    /// Boundary DOF of the bending value at `x = L`.
    pub fn w_tip(&self) -> usize {
        self.w_value_dof(self.n_elem).unwrap()
    }

    /// Boundary DOF of the bending slope at `x = L`.
    pub fn wx_tip(&self) -> usize {
        self.w_slope_dof(self.n_elem).unwrap()
    }
}
