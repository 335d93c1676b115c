//! Hinge losses for the seven normal forms plus the negative-sampling loss,
//! each with analytic subgradients for every participating center, offset,
//! and relation vector.
//!
//! All losses share the shape `||max(0, expr)||` with the L2 norm. The
//! subgradient conventions are: `d max(0,x)/dx = 0` at `x = 0`, and
//! `d|x|/dx = 0` at `x = 0`.

use std::collections::HashMap;

use crate::error::Result;
use crate::geometry::Margin;
use crate::ontology::{ConceptId, NormalizedAxiom, RelationId};
use crate::trainer::ModelParams;

/// Addressable parameter table rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamSlot {
    ConceptCenter(usize),
    ConceptOffset(usize),
    Relation(usize),
}

/// Sparse gradient: slot to per-dimension gradient vector.
pub type GradMap = HashMap<ParamSlot, Vec<f64>>;

/// A non-negative loss together with its gradients.
#[derive(Debug, Clone, Default)]
pub struct LossValue {
    pub value: f64,
    pub grads: GradMap,
}

impl LossValue {
    fn zero() -> Self {
        Self::default()
    }

    /// Adds `contrib` into the slot's gradient vector, summing on collision
    /// (the same symbol may fill several roles in one axiom).
    fn add_grad(&mut self, slot: ParamSlot, dim: usize, contrib: impl Fn(usize) -> f64) {
        let g = self.grads.entry(slot).or_insert_with(|| vec![0.0; dim]);
        for (i, gi) in g.iter_mut().enumerate() {
            *gi += contrib(i);
        }
    }

    /// Accumulates another loss into this one.
    pub fn merge(&mut self, other: LossValue) {
        self.value += other.value;
        for (slot, g) in other.grads {
            match self.grads.entry(slot) {
                std::collections::hash_map::Entry::Occupied(mut e) => {
                    for (a, b) in e.get_mut().iter_mut().zip(&g) {
                        *a += b;
                    }
                }
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(g);
                }
            }
        }
    }
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// NF1, `C ⊑ D`: hinge on the per-dimension containment residual
/// `max(0, |c_c - c_d| + o_c - o_d - margin)`.
pub fn loss_nf1(params: &ModelParams, c: ConceptId, d: ConceptId, m: Margin) -> Result<LossValue> {
    let dim = params.dim();
    let cc = params.concept_center(c)?;
    let dc = params.concept_center(d)?;
    let oc = params.concept_offset(c)?;
    let od = params.concept_offset(d)?;
    let g: Vec<f64> = (0..dim)
        .map(|i| ((cc[i] - dc[i]).abs() + oc[i] - od[i] - m.0).max(0.0))
        .collect();
    let s: Vec<f64> = (0..dim).map(|i| sign(cc[i] - dc[i])).collect();
    let value = l2(&g);
    let mut out = LossValue::zero();
    out.value = value;
    if value > 0.0 {
        let u: Vec<f64> = g.iter().map(|gi| gi / value).collect();
        out.add_grad(ParamSlot::ConceptCenter(c.0), dim, |i| u[i] * s[i]);
        out.add_grad(ParamSlot::ConceptCenter(d.0), dim, |i| -u[i] * s[i]);
        out.add_grad(ParamSlot::ConceptOffset(c.0), dim, |i| u[i]);
        out.add_grad(ParamSlot::ConceptOffset(d.0), dim, |i| -u[i]);
    }
    Ok(out)
}

/// NF2, `C ⊓ D ⊑ E`: the formal intersection box of C and D is held inside
/// E. The intersection bounds are taken as raw formulas, so the intermediate
/// offset may be negative when C and D are disjoint.
pub fn loss_nf2(
    params: &ModelParams,
    c: ConceptId,
    d: ConceptId,
    e: ConceptId,
    m: Margin,
) -> Result<LossValue> {
    let dim = params.dim();
    let cc = params.concept_center(c)?;
    let oc = params.concept_offset(c)?;
    let dc = params.concept_center(d)?;
    let od = params.concept_offset(d)?;
    let ec = params.concept_center(e)?;
    let oe = params.concept_offset(e)?;

    // per-dimension bound choice: true when the bound comes from C
    let mut low = vec![0.0; dim];
    let mut up = vec![0.0; dim];
    let mut low_from_c = vec![false; dim];
    let mut up_from_c = vec![false; dim];
    for i in 0..dim {
        let (lc, ld) = (cc[i] - oc[i], dc[i] - od[i]);
        let (uc, ud) = (cc[i] + oc[i], dc[i] + od[i]);
        low_from_c[i] = lc >= ld;
        up_from_c[i] = uc <= ud;
        low[i] = lc.max(ld);
        up[i] = uc.min(ud);
    }
    let g: Vec<f64> = (0..dim)
        .map(|i| {
            let nc = (low[i] + up[i]) / 2.0;
            let no = (up[i] - low[i]) / 2.0;
            ((nc - ec[i]).abs() + no - oe[i] - m.0).max(0.0)
        })
        .collect();
    let value = l2(&g);
    let mut out = LossValue::zero();
    out.value = value;
    if value > 0.0 {
        let mut d_low = vec![0.0; dim];
        let mut d_up = vec![0.0; dim];
        let mut s = vec![0.0; dim];
        for i in 0..dim {
            let u = g[i] / value;
            s[i] = sign((low[i] + up[i]) / 2.0 - ec[i]);
            // center contributes 0.5 to both bounds, offset -0.5/+0.5
            d_low[i] = u * (s[i] * 0.5 - 0.5);
            d_up[i] = u * (s[i] * 0.5 + 0.5);
        }
        let u: Vec<f64> = g.iter().map(|gi| gi / value).collect();
        out.add_grad(ParamSlot::ConceptCenter(c.0), dim, |i| {
            (if low_from_c[i] { d_low[i] } else { 0.0 })
                + (if up_from_c[i] { d_up[i] } else { 0.0 })
        });
        out.add_grad(ParamSlot::ConceptOffset(c.0), dim, |i| {
            (if low_from_c[i] { -d_low[i] } else { 0.0 })
                + (if up_from_c[i] { d_up[i] } else { 0.0 })
        });
        out.add_grad(ParamSlot::ConceptCenter(d.0), dim, |i| {
            (if low_from_c[i] { 0.0 } else { d_low[i] })
                + (if up_from_c[i] { 0.0 } else { d_up[i] })
        });
        out.add_grad(ParamSlot::ConceptOffset(d.0), dim, |i| {
            (if low_from_c[i] { 0.0 } else { -d_low[i] })
                + (if up_from_c[i] { 0.0 } else { d_up[i] })
        });
        out.add_grad(ParamSlot::ConceptCenter(e.0), dim, |i| -u[i] * s[i]);
        out.add_grad(ParamSlot::ConceptOffset(e.0), dim, |i| -u[i]);
    }
    Ok(out)
}

/// NF3, `C ⊑ ∃R.D`: containment of C in D translated by `-e_c(R)`.
pub fn loss_nf3(
    params: &ModelParams,
    c: ConceptId,
    r: RelationId,
    d: ConceptId,
    m: Margin,
) -> Result<LossValue> {
    let dim = params.dim();
    let cc = params.concept_center(c)?;
    let rc = params.relation_vec(r)?;
    let dc = params.concept_center(d)?;
    let oc = params.concept_offset(c)?;
    let od = params.concept_offset(d)?;
    let t: Vec<f64> = (0..dim).map(|i| cc[i] + rc[i] - dc[i]).collect();
    let g: Vec<f64> = (0..dim)
        .map(|i| (t[i].abs() + oc[i] - od[i] - m.0).max(0.0))
        .collect();
    let value = l2(&g);
    let mut out = LossValue::zero();
    out.value = value;
    if value > 0.0 {
        let u: Vec<f64> = g.iter().map(|gi| gi / value).collect();
        let s: Vec<f64> = t.iter().map(|&x| sign(x)).collect();
        out.add_grad(ParamSlot::ConceptCenter(c.0), dim, |i| u[i] * s[i]);
        out.add_grad(ParamSlot::Relation(r.0), dim, |i| u[i] * s[i]);
        out.add_grad(ParamSlot::ConceptCenter(d.0), dim, |i| -u[i] * s[i]);
        out.add_grad(ParamSlot::ConceptOffset(c.0), dim, |i| u[i]);
        out.add_grad(ParamSlot::ConceptOffset(d.0), dim, |i| -u[i]);
    }
    Ok(out)
}

/// NF4, `∃R.C ⊑ D`: hinge on `|c_c - r - c_d| - o_c - o_d - margin`; both
/// offsets are subtracted.
pub fn loss_nf4(
    params: &ModelParams,
    r: RelationId,
    c: ConceptId,
    d: ConceptId,
    m: Margin,
) -> Result<LossValue> {
    let dim = params.dim();
    let cc = params.concept_center(c)?;
    let rc = params.relation_vec(r)?;
    let dc = params.concept_center(d)?;
    let oc = params.concept_offset(c)?;
    let od = params.concept_offset(d)?;
    let t: Vec<f64> = (0..dim).map(|i| cc[i] - rc[i] - dc[i]).collect();
    let g: Vec<f64> = (0..dim)
        .map(|i| (t[i].abs() - oc[i] - od[i] - m.0).max(0.0))
        .collect();
    let value = l2(&g);
    let mut out = LossValue::zero();
    out.value = value;
    if value > 0.0 {
        let u: Vec<f64> = g.iter().map(|gi| gi / value).collect();
        let s: Vec<f64> = t.iter().map(|&x| sign(x)).collect();
        out.add_grad(ParamSlot::ConceptCenter(c.0), dim, |i| u[i] * s[i]);
        out.add_grad(ParamSlot::Relation(r.0), dim, |i| -u[i] * s[i]);
        out.add_grad(ParamSlot::ConceptCenter(d.0), dim, |i| -u[i] * s[i]);
        out.add_grad(ParamSlot::ConceptOffset(c.0), dim, |i| -u[i]);
        out.add_grad(ParamSlot::ConceptOffset(d.0), dim, |i| -u[i]);
    }
    Ok(out)
}

/// NF5, `C ⊓ D ⊑ ⊥`: zero when the boxes are already disjoint, otherwise a
/// hinge pushing them apart.
pub fn loss_nf5(params: &ModelParams, c: ConceptId, d: ConceptId, m: Margin) -> Result<LossValue> {
    let dim = params.dim();
    let cc = params.concept_center(c)?;
    let dc = params.concept_center(d)?;
    let oc = params.concept_offset(c)?;
    let od = params.concept_offset(d)?;
    // emptiness guard: strict "less than" test on the formal bounds
    let disjoint = (0..dim).any(|i| {
        let box_min = (cc[i] - oc[i]).max(dc[i] - od[i]);
        let box_max = (cc[i] + oc[i]).min(dc[i] + od[i]);
        box_max < box_min
    });
    if disjoint {
        return Ok(LossValue::zero());
    }
    let g: Vec<f64> = (0..dim)
        .map(|i| (-(cc[i] - dc[i]).abs() + oc[i] + od[i] + m.0).max(0.0))
        .collect();
    let value = l2(&g);
    let mut out = LossValue::zero();
    out.value = value;
    if value > 0.0 {
        let u: Vec<f64> = g.iter().map(|gi| gi / value).collect();
        let s: Vec<f64> = (0..dim).map(|i| sign(cc[i] - dc[i])).collect();
        out.add_grad(ParamSlot::ConceptCenter(c.0), dim, |i| -u[i] * s[i]);
        out.add_grad(ParamSlot::ConceptCenter(d.0), dim, |i| u[i] * s[i]);
        out.add_grad(ParamSlot::ConceptOffset(c.0), dim, |i| u[i]);
        out.add_grad(ParamSlot::ConceptOffset(d.0), dim, |i| u[i]);
    }
    Ok(out)
}

/// NF7, `C ⊑ ⊥`: the box must collapse to a point, `||e_o(c)||`.
pub fn loss_nf7(params: &ModelParams, c: ConceptId) -> Result<LossValue> {
    let dim = params.dim();
    let oc = params.concept_offset(c)?;
    let value = l2(oc);
    let mut out = LossValue::zero();
    out.value = value;
    if value > 0.0 {
        let g: Vec<f64> = oc.iter().map(|&o| o / value).collect();
        out.add_grad(ParamSlot::ConceptOffset(c.0), dim, |i| g[i]);
    }
    Ok(out)
}

/// NF6, `∃R.C ⊑ ⊥`: identical to NF7; the relation does not participate.
pub fn loss_nf6(params: &ModelParams, _r: RelationId, c: ConceptId) -> Result<LossValue> {
    loss_nf7(params, c)
}

/// Negative loss for a corrupted `C ⊑ ∃R.D`: pushes the translated boxes
/// apart.
pub fn loss_negative(
    params: &ModelParams,
    c: ConceptId,
    r: RelationId,
    d: ConceptId,
    m: Margin,
) -> Result<LossValue> {
    let dim = params.dim();
    let cc = params.concept_center(c)?;
    let rc = params.relation_vec(r)?;
    let dc = params.concept_center(d)?;
    let oc = params.concept_offset(c)?;
    let od = params.concept_offset(d)?;
    let t: Vec<f64> = (0..dim).map(|i| cc[i] + rc[i] - dc[i]).collect();
    let g: Vec<f64> = (0..dim)
        .map(|i| (-t[i].abs() + oc[i] + od[i] + m.0).max(0.0))
        .collect();
    let value = l2(&g);
    let mut out = LossValue::zero();
    out.value = value;
    if value > 0.0 {
        let u: Vec<f64> = g.iter().map(|gi| gi / value).collect();
        let s: Vec<f64> = t.iter().map(|&x| sign(x)).collect();
        out.add_grad(ParamSlot::ConceptCenter(c.0), dim, |i| -u[i] * s[i]);
        out.add_grad(ParamSlot::Relation(r.0), dim, |i| -u[i] * s[i]);
        out.add_grad(ParamSlot::ConceptCenter(d.0), dim, |i| u[i] * s[i]);
        out.add_grad(ParamSlot::ConceptOffset(c.0), dim, |i| u[i]);
        out.add_grad(ParamSlot::ConceptOffset(d.0), dim, |i| u[i]);
    }
    Ok(out)
}

/// Loss of a single normalized axiom, dispatched by shape.
pub fn axiom_loss(params: &ModelParams, axiom: &NormalizedAxiom, m: Margin) -> Result<LossValue> {
    match *axiom {
        NormalizedAxiom::Nf1 { c, d } => loss_nf1(params, c, d, m),
        NormalizedAxiom::Nf2 { c, d, e } => loss_nf2(params, c, d, e, m),
        NormalizedAxiom::Nf3 { c, r, d } => loss_nf3(params, c, r, d, m),
        NormalizedAxiom::Nf4 { r, c, d } => loss_nf4(params, r, c, d, m),
        NormalizedAxiom::Nf5 { c, d } => loss_nf5(params, c, d, m),
        NormalizedAxiom::Nf6 { r, c } => loss_nf6(params, r, c),
        NormalizedAxiom::Nf7 { c } => loss_nf7(params, c),
    }
}

/// Unweighted sum of axiom losses plus negative-sample losses, with
/// gradients accumulated per parameter slot.
pub fn batch_loss(
    axioms: &[NormalizedAxiom],
    negatives: &[(ConceptId, RelationId, ConceptId)],
    params: &ModelParams,
    m: Margin,
) -> Result<LossValue> {
    let mut total = LossValue::zero();
    for ax in axioms {
        total.merge(axiom_loss(params, ax, m)?);
    }
    for &(c, r, d) in negatives {
        total.merge(loss_negative(params, c, r, d, m)?);
    }
    Ok(total)
}
