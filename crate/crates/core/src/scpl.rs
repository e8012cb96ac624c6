//! Parental labeling and batched seam removal.
//!
//! Tracing the backtrack indicators from every last-row pixel maps each
//! child to exactly one first-row parent. Children sharing a parent form
//! one class of a partition of the last row, and the cheapest child of
//! every class can be removed in the same pass: two seams traced from
//! different parents never touch, since a shared pixel would have a single
//! backtrack path.

use std::collections::BTreeMap;

use crate::energy::{sobel_energy, EnergyMap};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::seam_dp::{cumulative_energy, transpose, DpTables, Orientation, Seam};

/// First-row origin of every last-row column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParentLabels {
    labels: Vec<usize>,
}

impl ParentLabels {
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn parent_of(&self, child: usize) -> usize {
        self.labels[child]
    }

    /// Preimage of every parent, keyed by parent column, children ascending.
    pub fn preimages(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut sets: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (child, &parent) in self.labels.iter().enumerate() {
            sets.entry(parent).or_default().push(child);
        }
        sets
    }

    pub fn parent_count(&self) -> usize {
        self.preimages().len()
    }
}

/// Pairwise-disjoint seams removable in one pass, sorted by last-row column.
///
/// Offsets refer to the columns of the frame the batch was selected on
/// (rows of it, for horizontal batches).
#[derive(Clone, Debug, PartialEq)]
pub struct SeamBatch {
    pub orientation: Orientation,
    /// Width (vertical) or height (horizontal) of the frame the seams index into.
    pub extent: usize,
    pub seams: Vec<Seam>,
}

impl SeamBatch {
    pub fn empty(orientation: Orientation, extent: usize) -> Self {
        SeamBatch {
            orientation,
            extent,
            seams: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.seams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seams.is_empty()
    }
}

pub fn label_parents(tables: &DpTables) -> ParentLabels {
    let w = tables.width();
    let mut roots: Vec<usize> = (0..w).collect();
    let mut next = vec![0; w];
    for y in 1..tables.height() {
        for (x, root) in next.iter_mut().enumerate() {
            let from = (x as isize + isize::from(tables.back(x, y))) as usize;
            *root = roots[from];
        }
        std::mem::swap(&mut roots, &mut next);
    }
    ParentLabels { labels: roots }
}

/// Cheapest child of every parent, keeping at most `k` of them.
///
/// With `k` below the parent count the `k` cheapest candidates survive
/// (ties by last-row column). `Some(0)` yields an empty batch.
pub fn select_batch(tables: &DpTables, labels: &ParentLabels, k: Option<usize>) -> SeamBatch {
    let last = tables.last_row();
    let mut best: BTreeMap<usize, usize> = BTreeMap::new();
    for (child, &parent) in labels.labels().iter().enumerate() {
        let slot = best.entry(parent).or_insert(child);
        if last[child] < last[*slot] {
            *slot = child;
        }
    }

    let mut ends: Vec<usize> = best.into_values().collect();
    if let Some(k) = k {
        if k < ends.len() {
            ends.sort_by(|&a, &b| last[a].total_cmp(&last[b]).then(a.cmp(&b)));
            ends.truncate(k);
        }
    }
    ends.sort_unstable();

    SeamBatch {
        orientation: Orientation::Vertical,
        extent: tables.width(),
        seams: ends.into_iter().map(|end| tables.trace(end)).collect(),
    }
}

/// Removes every seam of the batch in a single pass over the frame.
pub fn remove_batch(frame: &Frame, batch: &SeamBatch) -> Result<Frame> {
    let (along, across) = match batch.orientation {
        Orientation::Vertical => (frame.width(), frame.height()),
        Orientation::Horizontal => (frame.height(), frame.width()),
    };
    if along != batch.extent {
        let found = match batch.orientation {
            Orientation::Vertical => (along, across),
            Orientation::Horizontal => (across, along),
        };
        let expected = match batch.orientation {
            Orientation::Vertical => (batch.extent, across),
            Orientation::Horizontal => (across, batch.extent),
        };
        return Err(Error::DimensionMismatch {
            expected,
            actual: found,
        });
    }
    if batch.is_empty() {
        return Ok(frame.clone());
    }
    match batch.orientation {
        Orientation::Vertical => remove_vertical(frame, &batch.seams),
        Orientation::Horizontal => Ok(transpose(&remove_vertical(
            &transpose(frame),
            &batch.seams,
        )?)),
    }
}

fn remove_vertical(frame: &Frame, seams: &[Seam]) -> Result<Frame> {
    let (w, h) = frame.dimensions();
    for seam in seams {
        let mut s = seam.clone();
        s.orientation = Orientation::Vertical;
        s.validate(w, h)?;
    }
    let b = seams.len();
    if b > w {
        return Err(Error::IntersectingSeams { row: 0 });
    }
    let c = frame.channels();
    let mut data = Vec::with_capacity((w - b) * h * c);
    let mut removed = vec![false; w];
    for y in 0..h {
        removed.iter_mut().for_each(|r| *r = false);
        for seam in seams {
            let x = seam.offsets[y];
            if std::mem::replace(&mut removed[x], true) {
                return Err(Error::IntersectingSeams { row: y });
            }
        }
        let row = frame.row(y);
        for (x, gone) in removed.iter().enumerate() {
            if !gone {
                data.extend_from_slice(&row[x * c..(x + 1) * c]);
            }
        }
    }
    Frame::new(w - b, h, c, data)
}

/// Supplies energy maps for the frame being carved between batches.
pub trait EnergyTracker {
    /// Called after every batch is removed from the reference frame.
    fn removed(&mut self, _batch: &SeamBatch) -> Result<()> {
        Ok(())
    }

    /// Energy for the current reference frame (in its natural orientation).
    fn energy(&mut self, reference: &Frame) -> Result<EnergyMap>;
}

/// Recomputes Sobel energy on the carved frame.
#[derive(Clone, Copy, Debug, Default)]
pub struct GradientRefresh;

impl EnergyTracker for GradientRefresh {
    fn energy(&mut self, reference: &Frame) -> Result<EnergyMap> {
        sobel_energy(reference)
    }
}

/// How many seams one DP pass may remove.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BatchPolicy {
    /// Classic seam carving: one seam per pass.
    Single,
    /// One seam per parent, capped by the seams still needed.
    PerParent,
}

/// Carves `frame` along one axis down to `target`.
///
/// `initial` is the energy for the first pass (natural orientation); later
/// passes ask the tracker. Returns the carved frame and the applied batches,
/// one per DP pass.
pub fn carve_axis(
    frame: &Frame,
    initial: Option<EnergyMap>,
    orientation: Orientation,
    target: usize,
    policy: BatchPolicy,
    tracker: &mut dyn EnergyTracker,
) -> Result<(Frame, Vec<SeamBatch>)> {
    let extent = |f: &Frame| match orientation {
        Orientation::Vertical => f.width(),
        Orientation::Horizontal => f.height(),
    };
    let source_len = extent(frame);
    if target < 1 || target > source_len {
        return Err(Error::InvalidTarget { target, source_len });
    }

    let mut current = frame.clone();
    let mut energy = initial;
    let mut batches = Vec::new();
    while extent(&current) > target {
        let map = match energy.take() {
            Some(m) => m,
            None => tracker.energy(&current)?,
        };
        if map.dimensions() != current.dimensions() {
            return Err(Error::DimensionMismatch {
                expected: current.dimensions(),
                actual: map.dimensions(),
            });
        }
        let map = match orientation {
            Orientation::Vertical => map,
            Orientation::Horizontal => map.transposed(),
        };
        let tables = cumulative_energy(&map);
        let remaining = extent(&current) - target;
        let k = match policy {
            BatchPolicy::Single => 1,
            BatchPolicy::PerParent => remaining,
        };
        let mut batch = select_batch(&tables, &label_parents(&tables), Some(k));
        batch.orientation = orientation;
        for seam in &mut batch.seams {
            seam.orientation = orientation;
        }
        current = remove_batch(&current, &batch)?;
        tracker.removed(&batch)?;
        batches.push(batch);
    }
    Ok((current, batches))
}

/// Reduces the width to `target_width`, one parent-labeled batch per DP pass.
pub fn scpl_carve(
    frame: &Frame,
    energy: &EnergyMap,
    target_width: usize,
) -> Result<(Frame, Vec<SeamBatch>)> {
    carve_axis(
        frame,
        Some(energy.clone()),
        Orientation::Vertical,
        target_width,
        BatchPolicy::PerParent,
        &mut GradientRefresh,
    )
}

/// Reduces the width to `target_width` one minimal seam at a time.
pub fn sc_carve(
    frame: &Frame,
    energy: &EnergyMap,
    target_width: usize,
) -> Result<(Frame, Vec<SeamBatch>)> {
    carve_axis(
        frame,
        Some(energy.clone()),
        Orientation::Vertical,
        target_width,
        BatchPolicy::Single,
        &mut GradientRefresh,
    )
}
