//! Cumulative-energy dynamic programming and single-seam operations.
//!
//! All carving is done on vertical seams; horizontal seams are vertical
//! seams of the transposed frame.

use crate::energy::EnergyMap;
use crate::error::{Error, Result};
use crate::frame::Frame;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// One column offset per row.
    Vertical,
    /// One row offset per column.
    Horizontal,
}

/// An 8-connected monotone path with one pixel per row (vertical) or column (horizontal).
#[derive(Clone, Debug, PartialEq)]
pub struct Seam {
    pub orientation: Orientation,
    pub offsets: Vec<usize>,
    pub cost: f64,
}

impl Seam {
    pub fn vertical(offsets: Vec<usize>, cost: f64) -> Self {
        Seam {
            orientation: Orientation::Vertical,
            offsets,
            cost,
        }
    }

    /// Column of the seam's pixel in the last row.
    pub fn end(&self) -> usize {
        *self.offsets.last().expect("seam has at least one offset")
    }

    /// Checks length, range and 8-connectivity against a frame of `width` x `height`.
    pub fn validate(&self, width: usize, height: usize) -> Result<()> {
        let (len, limit) = match self.orientation {
            Orientation::Vertical => (height, width),
            Orientation::Horizontal => (width, height),
        };
        if self.offsets.len() != len {
            return Err(Error::SeamLength {
                expected: len,
                actual: self.offsets.len(),
            });
        }
        for (index, &offset) in self.offsets.iter().enumerate() {
            if offset >= limit {
                return Err(Error::SeamOutOfRange {
                    index,
                    offset,
                    limit,
                });
            }
            if index > 0 && offset.abs_diff(self.offsets[index - 1]) > 1 {
                return Err(Error::DisconnectedSeam { index });
            }
        }
        Ok(())
    }
}

/// Cumulative energy table and the backtrack indicators that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct DpTables {
    width: usize,
    height: usize,
    ce: Vec<f64>,
    back: Vec<i8>,
}

impl DpTables {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn ce(&self, x: usize, y: usize) -> f64 {
        self.ce[y * self.width + x]
    }

    /// Column delta (-1, 0 or +1) to the predecessor in row `y - 1`.
    pub fn back(&self, x: usize, y: usize) -> i8 {
        self.back[y * self.width + x]
    }

    pub fn last_row(&self) -> &[f64] {
        &self.ce[(self.height - 1) * self.width..]
    }

    /// Follows the indicators from last-row column `end` up to row 0.
    pub fn trace(&self, end: usize) -> Seam {
        let mut offsets = vec![0; self.height];
        let mut x = end;
        for y in (0..self.height).rev() {
            offsets[y] = x;
            x = (x as isize + isize::from(self.back(x, y))) as usize;
        }
        Seam::vertical(offsets, self.ce(end, self.height - 1))
    }
}

/// Row-by-row `CE(i, j) = e(i, j) + min(CE(i-1, j-1), CE(i-1, j), CE(i-1, j+1))`.
///
/// Ties go to the leftmost predecessor; out-of-range neighbors are skipped.
pub fn cumulative_energy(map: &EnergyMap) -> DpTables {
    let (w, h) = map.dimensions();
    let mut ce = Vec::with_capacity(w * h);
    ce.extend_from_slice(map.row(0));
    let mut back = vec![0i8; w * h];

    for y in 1..h {
        let prev_start = (y - 1) * w;
        for (x, &e) in map.row(y).iter().enumerate() {
            let mut best = ce[prev_start + x];
            let mut delta = 0i8;
            if x > 0 {
                let left = ce[prev_start + x - 1];
                if left <= best {
                    best = left;
                    delta = -1;
                }
            }
            if x + 1 < w {
                let right = ce[prev_start + x + 1];
                if right < best {
                    best = right;
                    delta = 1;
                }
            }
            ce.push(e + best);
            back[y * w + x] = delta;
        }
    }

    DpTables {
        width: w,
        height: h,
        ce,
        back,
    }
}

/// Index of the smallest value, first occurrence on ties.
pub(crate) fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = i;
        }
    }
    best
}

/// The cheapest vertical seam.
pub fn min_seam(tables: &DpTables) -> Seam {
    tables.trace(argmin(tables.last_row()))
}

/// Removes one vertical seam; every row loses exactly one pixel.
pub fn remove_seam(frame: &Frame, seam: &Seam) -> Result<Frame> {
    if seam.orientation != Orientation::Vertical {
        return Err(Error::Orientation);
    }
    seam.validate(frame.width(), frame.height())?;
    let c = frame.channels();
    let mut data = Vec::with_capacity((frame.width() - 1) * frame.height() * c);
    for (y, &x) in seam.offsets.iter().enumerate() {
        let row = frame.row(y);
        data.extend_from_slice(&row[..x * c]);
        data.extend_from_slice(&row[(x + 1) * c..]);
    }
    Frame::new(frame.width() - 1, frame.height(), c, data)
}

/// Swaps rows and columns.
pub fn transpose(frame: &Frame) -> Frame {
    let (w, h) = frame.dimensions();
    let c = frame.channels();
    let src = frame.data();
    let mut data = vec![0u8; src.len()];
    for y in 0..h {
        for x in 0..w {
            let from = (y * w + x) * c;
            let to = (x * h + y) * c;
            data[to..to + c].copy_from_slice(&src[from..from + c]);
        }
    }
    Frame::new(h, w, c, data).expect("transpose preserves data length")
}
