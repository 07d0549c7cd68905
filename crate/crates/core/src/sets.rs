//! Finite unions of closed energy intervals.

use serde::{Deserialize, Serialize};

/// Sign of `D'` on a band.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
    /// 1-based position from the bottom of the spectrum.
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monotonicity: Option<Monotonicity>,
}

impl Band {
    pub fn new(lo: f64, hi: f64, index: usize) -> Self {
        Self { lo, hi, index, monotonicity: None }
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, e: f64) -> bool {
        self.lo <= e && e <= self.hi
    }
}

/// Sorted intervals, pairwise disjoint except possibly for shared endpoints.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectralSet {
    pub bands: Vec<Band>,
}

impl SpectralSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Wraps bands that already satisfy the ordering invariant.
    pub fn from_bands(mut bands: Vec<Band>) -> Self {
        bands.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        Self { bands }
    }

    /// Union of arbitrary closed intervals; overlapping ones are merged,
    /// touching ones kept separate.
    pub fn from_intervals(intervals: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut iv: Vec<(f64, f64)> = intervals.into_iter().filter(|(a, b)| a <= b).collect();
        iv.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
        for (a, b) in iv {
            match out.last_mut() {
                Some(last) if a < last.1 => last.1 = last.1.max(b),
                _ => out.push((a, b)),
            }
        }
        Self::indexed(out)
    }

    fn indexed(iv: Vec<(f64, f64)>) -> Self {
        Self {
            bands: iv
                .into_iter()
                .enumerate()
                .map(|(i, (lo, hi))| Band::new(lo, hi, i + 1))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bands.is_empty()
    }

    pub fn intervals(&self) -> Vec<(f64, f64)> {
        self.bands.iter().map(|b| (b.lo, b.hi)).collect()
    }

    /// Same set with touching intervals fused.
    pub fn merged(&self) -> Self {
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(self.len());
        for b in &self.bands {
            match out.last_mut() {
                Some(last) if b.lo <= last.1 => last.1 = last.1.max(b.hi),
                _ => out.push((b.lo, b.hi)),
            }
        }
        Self::indexed(out)
    }

    /// Lebesgue measure.
    pub fn measure(&self) -> f64 {
        self.merged().bands.iter().map(Band::length).sum()
    }

    pub fn contains(&self, e: f64) -> bool {
        self.distance(e) == 0.0
    }

    /// `dist(e, self)`; infinite for the empty set.
    pub fn distance(&self, e: f64) -> f64 {
        let i = self.bands.partition_point(|b| b.hi < e);
        let mut d = f64::INFINITY;
        if let Some(b) = self.bands.get(i) {
            d = d.min((b.lo - e).max(0.0));
        }
        if i > 0 {
            d = d.min(e - self.bands[i - 1].hi);
        }
        d
    }

    pub fn intersect(&self, other: &SpectralSet) -> SpectralSet {
        let (a, b) = (self.merged().intervals(), other.merged().intervals());
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = a[i].0.max(b[j].0);
            let hi = a[i].1.min(b[j].1);
            if lo <= hi {
                out.push((lo, hi));
            }
            if a[i].1 < b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::indexed(out)
    }

    pub fn union(&self, other: &SpectralSet) -> SpectralSet {
        Self::from_intervals(self.intervals().into_iter().chain(other.intervals())).merged()
    }

    /// Whether every point of `self` lies within `slack` of `other`.
    pub fn is_subset_of(&self, other: &SpectralSet, slack: f64) -> bool {
        let widened =
            SpectralSet::from_intervals(other.intervals().into_iter().map(|(a, b)| (a - slack, b + slack)))
                .merged();
        self.merged().bands.iter().all(|b| {
            widened.bands.iter().any(|w| w.lo <= b.lo && b.hi <= w.hi)
        })
    }

    pub fn lowest(&self) -> Option<f64> {
        self.bands.first().map(|b| b.lo)
    }

    pub fn highest(&self) -> Option<f64> {
        self.bands.iter().map(|b| b.hi).reduce(f64::max)
    }
}

/// Lebesgue measure of a spectral set.
pub fn set_measure(s: &SpectralSet) -> f64 {
    s.measure()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measure_examples() {
        let r = 2f64.sqrt();
        let s = SpectralSet::from_intervals([(-2.0 * r, 2.0 * r)]);
        assert!((set_measure(&s) - 4.0 * r).abs() < 1e-15);
        let s = SpectralSet::from_intervals([(-2.0, 0.0), (0.0, 2.0)]);
        assert_eq!(s.len(), 2);
        assert_eq!(set_measure(&s), 4.0);
        assert_eq!(set_measure(&SpectralSet::empty()), 0.0);
    }

    #[test]
    fn overlapping_intervals_merge() {
        let s = SpectralSet::from_intervals([(1.0, 3.0), (0.0, 1.5), (5.0, 6.0)]);
        assert_eq!(s.intervals(), vec![(0.0, 3.0), (5.0, 6.0)]);
    }

    #[test]
    fn intersection_and_distance() {
        let a = SpectralSet::from_intervals([(0.0, 2.0), (3.0, 5.0)]);
        let b = SpectralSet::from_intervals([(1.0, 4.0)]);
        assert_eq!(a.intersect(&b).intervals(), vec![(1.0, 2.0), (3.0, 4.0)]);
        assert_eq!(a.distance(2.5), 0.5);
        assert_eq!(a.distance(-1.0), 1.0);
        assert_eq!(a.distance(7.0), 2.0);
        assert_eq!(a.distance(4.0), 0.0);
        assert!(b.is_subset_of(&SpectralSet::from_intervals([(0.5, 4.5)]), 0.0));
        assert!(!a.is_subset_of(&b, 0.1));
    }
}
