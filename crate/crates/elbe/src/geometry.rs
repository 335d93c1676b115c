//! Axis-parallel box calculus: bounds, intersection, containment residuals.
//!
//! Every loss and scoring function is built on top of these primitives.
//! A box is stored as a center vector plus a non-negative offset vector
//! (half-widths); the region it covers is `[center - offset, center + offset]`
//! with closed boundaries.

use crate::error::{Error, Result};

/// An axis-parallel box given by center and half-width (offset) vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ConceptBox {
    center: Vec<f64>,
    offset: Vec<f64>,
}

/// Scalar slack broadcast across all dimensions of a containment or
/// disjointness test. Negative values demand strict containment with slack;
/// positive values tolerate protrusion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Margin(pub f64);

impl Margin {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl ConceptBox {
    /// Builds a box, rejecting negative offsets and mismatched lengths.
    pub fn new(center: Vec<f64>, offset: Vec<f64>) -> Result<Self> {
        if center.len() != offset.len() {
            return Err(Error::DimMismatch {
                left: center.len(),
                right: offset.len(),
            });
        }
        if offset.iter().any(|&o| !(o >= 0.0)) {
            return Err(Error::Config(format!(
                "box offset must be elementwise non-negative, got {offset:?}"
            )));
        }
        Ok(Self { center, offset })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    /// Lower corner, `center - offset` elementwise.
    pub fn lower(&self) -> Vec<f64> {
        self.center
            .iter()
            .zip(&self.offset)
            .map(|(c, o)| c - o)
            .collect()
    }

    /// Upper corner, `center + offset` elementwise.
    pub fn upper(&self) -> Vec<f64> {
        self.center
            .iter()
            .zip(&self.offset)
            .map(|(c, o)| c + o)
            .collect()
    }

    pub fn volume(&self) -> f64 {
        self.offset.iter().map(|o| 2.0 * o).product()
    }

    /// Closed-boundary point membership.
    pub fn contains_point(&self, point: &[f64]) -> bool {
        debug_assert_eq!(point.len(), self.dim());
        self.center
            .iter()
            .zip(&self.offset)
            .zip(point)
            .all(|((c, o), p)| (c - o) <= *p && *p <= (c + o))
    }
}

/// Intersection of two boxes.
///
/// `box_min` is the elementwise max of the lower corners and `box_max` the
/// elementwise min of the upper corners. The result is empty only when
/// `box_max` is strictly below `box_min` in some dimension; touching boxes
/// yield a degenerate zero-offset box.
pub fn intersect(a: &ConceptBox, b: &ConceptBox) -> Result<Option<ConceptBox>> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let lo = a.lower();
    let hi = a.upper();
    let lo_b = b.lower();
    let hi_b = b.upper();
    let mut center = Vec::with_capacity(a.dim());
    let mut offset = Vec::with_capacity(a.dim());
    for i in 0..a.dim() {
        let box_min = lo[i].max(lo_b[i]);
        let box_max = hi[i].min(hi_b[i]);
        if box_max < box_min {
            return Ok(None);
        }
        center.push((box_min + box_max) / 2.0);
        offset.push((box_max - box_min) / 2.0);
    }
    Ok(Some(ConceptBox { center, offset }))
}

/// Per-dimension violation of `inner ⊆ outer` with slack `margin`:
/// `max(0, |c_in - c_out| + o_in - o_out - margin)`. All-zero means the
/// inner box sits inside the outer one with at least `margin` to spare in
/// every dimension.
pub fn containment_residual(
    inner: &ConceptBox,
    outer: &ConceptBox,
    margin: Margin,
) -> Result<Vec<f64>> {
    if inner.dim() != outer.dim() {
        return Err(Error::DimMismatch {
            left: inner.dim(),
            right: outer.dim(),
        });
    }
    Ok(inner
        .center
        .iter()
        .zip(&outer.center)
        .zip(inner.offset.iter().zip(&outer.offset))
        .map(|((ci, co), (oi, oo))| ((ci - co).abs() + oi - oo - margin.0).max(0.0))
        .collect())
}

/// Volume of the symmetric difference of two boxes divided by the volume of
/// their bounding union (`vol(a) + vol(b) - vol(a∩b)`). Zero for identical
/// boxes, one for disjoint ones. Returns `None` when the union has no volume.
pub fn symmetric_difference_ratio(a: &ConceptBox, b: &ConceptBox) -> Result<Option<f64>> {
    let inter = intersect(a, b)?.map(|i| i.volume()).unwrap_or(0.0);
    let union = a.volume() + b.volume() - inter;
    if union <= 0.0 {
        return Ok(None);
    }
    Ok(Some((a.volume() + b.volume() - 2.0 * inter) / union))
}
