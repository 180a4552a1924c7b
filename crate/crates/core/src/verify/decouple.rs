//! Decoupling of uncharged exceptional components: an (r, s) = (1, infinity)
//! component with no crosscap, no crosscap tail and no polarization to the
//! rest of the curve can be deleted without changing the other correlators.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::curve::{BranchPoint, SpectralCurveLocal};
use crate::error::{Error, Result};
use crate::recursion::{run, CorrelatorStore, EngineOptions, StoreDiff};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecouplingReport {
    /// Ids of the deleted components.
    pub removed: Vec<u32>,
    pub levels: usize,
    /// Entries of the reduced curve that were compared.
    pub entries: usize,
    pub diffs: Vec<StoreDiff>,
    pub pass: bool,
}

/// The curve with every decoupled exceptional component deleted, and the
/// ids that were removed. ShapeMismatch when there is nothing to delete.
pub fn decoupled_curve(curve: &SpectralCurveLocal) -> Result<(SpectralCurveLocal, Vec<u32>)> {
    let coupled: BTreeSet<u32> = curve.f02.keys().flat_map(|(a, b)| [a.0, b.0]).collect();
    let removable = |c: &crate::curve::Component| {
        c.r == 1 && c.s().is_none() && c.q.is_zero() && c.f_half1.is_empty() && !coupled.contains(&c.id)
    };
    let removed: Vec<u32> = curve.components().filter(|c| removable(c)).map(|c| c.id).collect();
    if removed.is_empty() {
        return Err(Error::ShapeMismatch("no uncharged, unpolarized exceptional component".into()));
    }
    let bps: Vec<BranchPoint> = curve
        .branch_points
        .iter()
        .filter_map(|bp| {
            let kept: Vec<_> = bp.components.iter().filter(|c| !removable(c)).cloned().collect();
            (!kept.is_empty()).then(|| BranchPoint::new(bp.id, kept))
        })
        .collect();
    if bps.is_empty() {
        return Err(Error::ShapeMismatch("deleting the exceptional components leaves nothing".into()));
    }
    let f02: Vec<_> = curve.f02.iter().map(|(&(a, b), v)| (a, b, v.clone())).collect();
    Ok((SpectralCurveLocal::new(bps, &f02, curve.crosscap)?, removed))
}

/// Runs the reduced curve and compares it level by level with `store`
/// restricted to the surviving components.
pub fn check_decoupling(
    curve: &SpectralCurveLocal,
    store: &CorrelatorStore,
    chi_max: u32,
    opts: &EngineOptions,
) -> Result<DecouplingReport> {
    let (reduced, removed) = decoupled_curve(curve)?;
    let kept: BTreeSet<u32> = reduced.components().map(|c| c.id).collect();
    let reference = run(&reduced, chi_max, opts)?.store;
    let restricted = store.restrict(&kept);
    let levels = reference.shared_levels(&restricted);
    let entries = levels.iter().map(|&(g2, n)| reference.level(g2, n).map_or(0, |l| l.len())).sum();
    let diffs = reference.diff(&restricted);
    let pass = diffs.is_empty() && !levels.is_empty();
    Ok(DecouplingReport { removed, levels: levels.len(), entries, diffs, pass })
}
