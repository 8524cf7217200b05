use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::MalformedInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// `self ⊂ other` up to `tol` at both ends.
    pub fn within(&self, other: &Interval, tol: f64) -> bool {
        self.lo >= other.lo - tol && self.hi <= other.hi + tol
    }

    /// Intersection with `(-∞, cap]`, if nonempty.
    pub fn capped(&self, cap: f64) -> Option<Interval> {
        (self.lo <= cap).then(|| Interval {
            lo: self.lo,
            hi: self.hi.min(cap),
        })
    }
}

/// Disjoint closed intervals in increasing order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

impl IntervalSet {
    /// Merges overlapping and touching intervals.
    pub fn from_intervals(list: &[Interval]) -> Result<Self> {
        for iv in list {
            if iv.lo.is_nan() || iv.hi.is_nan() || iv.lo > iv.hi {
                return Err(Error::MalformedInterval {
                    lo: iv.lo,
                    hi: iv.hi,
                });
            }
        }
        let mut sorted = list.to_vec();
        sorted.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
        let mut merged: Vec<Interval> = Vec::with_capacity(sorted.len());
        for iv in sorted {
            match merged.last_mut() {
                Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
                _ => merged.push(iv),
            }
        }
        Ok(IntervalSet { intervals: merged })
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(Interval::len).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains(x))
    }

    /// Open gaps between consecutive components, as `(lo, hi)` pairs.
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        self.intervals
            .windows(2)
            .map(|w| (w[0].hi, w[1].lo))
            .collect()
    }
}

/// Normalized union and its Lebesgue measure.
pub fn union_measure(list: &[Interval]) -> Result<(IntervalSet, f64)> {
    let set = IntervalSet::from_intervals(list)?;
    let m = set.measure();
    Ok((set, m))
}
