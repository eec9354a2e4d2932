//! Axis-aligned boxes in page coordinates (origin top-left, y grows downward).

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BBox<T> {
    #[serde(rename = "l")]
    pub left: T,
    #[serde(rename = "t")]
    pub top: T,
    #[serde(rename = "r")]
    pub right: T,
    #[serde(rename = "b")]
    pub bottom: T,
}

impl<T: Scalar> BBox<T> {
    pub fn new(left: T, top: T, right: T, bottom: T) -> Self {
        Self { left, top, right, bottom }
    }

    pub fn width(&self) -> T {
        self.right - self.left
    }

    pub fn height(&self) -> T {
        self.bottom - self.top
    }

    pub fn area(&self) -> T {
        self.width() * self.height()
    }

    /// Finite, non-negative and correctly oriented.
    pub fn is_valid(&self) -> bool {
        let coords = [self.left, self.top, self.right, self.bottom];
        coords.iter().all(|c| c.is_finite() && *c >= T::zero())
            && self.left <= self.right
            && self.top <= self.bottom
    }

    pub fn union(&self, other: &Self) -> Self {
        Self {
            left: self.left.min(other.left),
            top: self.top.min(other.top),
            right: self.right.max(other.right),
            bottom: self.bottom.max(other.bottom),
        }
    }

    pub fn intersection(&self, other: &Self) -> Option<Self> {
        let b = Self {
            left: self.left.max(other.left),
            top: self.top.max(other.top),
            right: self.right.min(other.right),
            bottom: self.bottom.min(other.bottom),
        };
        (b.left <= b.right && b.top <= b.bottom).then_some(b)
    }

    /// True when `other` lies inside `self`, allowing `tol` slack on each side.
    pub fn contains(&self, other: &Self, tol: T) -> bool {
        other.left >= self.left - tol
            && other.top >= self.top - tol
            && other.right <= self.right + tol
            && other.bottom <= self.bottom + tol
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        (self.left - other.left).abs() <= tol
            && (self.top - other.top).abs() <= tol
            && (self.right - other.right).abs() <= tol
            && (self.bottom - other.bottom).abs() <= tol
    }

    /// Union over a non-empty iterator of boxes.
    pub fn union_all<'a, I>(boxes: I) -> Option<Self>
    where
        I: IntoIterator<Item = &'a Self>,
    {
        boxes.into_iter().fold(None, |acc, b| match acc {
            None => Some(*b),
            Some(a) => Some(a.union(b)),
        })
    }
}

/// Horizontal overlap length, never negative.
pub fn x_overlap<T: Scalar>(a: &BBox<T>, b: &BBox<T>) -> T {
    (a.right.min(b.right) - a.left.max(b.left)).max(T::zero())
}

/// Vertical overlap length, never negative.
pub fn y_overlap<T: Scalar>(a: &BBox<T>, b: &BBox<T>) -> T {
    (a.bottom.min(b.bottom) - a.top.max(b.top)).max(T::zero())
}

/// Signed vertical gap from the bottom of `a` to the top of `b`; negative
/// when the boxes overlap vertically.
pub fn v_gap<T: Scalar>(a: &BBox<T>, b: &BBox<T>) -> T {
    b.top - a.bottom
}

/// Area of the union of a set of rectangles (coordinate compression; inputs
/// are expected to be small).
pub fn union_area<T: Scalar>(boxes: &[BBox<T>]) -> T {
    let mut xs: Vec<T> = boxes.iter().flat_map(|b| [b.left, b.right]).collect();
    let mut ys: Vec<T> = boxes.iter().flat_map(|b| [b.top, b.bottom]).collect();
    let cmp = |a: &T, b: &T| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal);
    xs.sort_by(cmp);
    xs.dedup();
    ys.sort_by(cmp);
    ys.dedup();
    let mut total = T::zero();
    for xw in xs.windows(2) {
        for yw in ys.windows(2) {
            let cell = BBox::new(xw[0], yw[0], xw[1], yw[1]);
            let covered = boxes.iter().any(|b| {
                b.left <= cell.left && b.right >= cell.right && b.top <= cell.top && b.bottom >= cell.bottom
            });
            if covered {
                total = total + cell.area();
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bb(l: f64, t: f64, r: f64, b: f64) -> BBox<f64> {
        BBox::new(l, t, r, b)
    }

    #[test]
    fn identical_boxes() {
        let a = bb(3.0, 4.0, 13.0, 10.0);
        assert_eq!(x_overlap(&a, &a), 10.0);
        assert_eq!(v_gap(&a, &a), -6.0);
    }

    #[test]
    fn disjoint_boxes() {
        assert_eq!(x_overlap(&bb(0.0, 0.0, 10.0, 10.0), &bb(20.0, 0.0, 30.0, 10.0)), 0.0);
    }

    #[test]
    fn partial_overlap_and_gap() {
        let a = bb(0.0, 0.0, 10.0, 10.0);
        let b = bb(5.0, 12.0, 15.0, 20.0);
        assert_eq!(x_overlap(&a, &b), 5.0);
        assert_eq!(v_gap(&a, &b), 2.0);
    }

    #[test]
    fn f32_works_too() {
        let a = BBox::<f32>::new(0.0, 0.0, 10.0, 10.0);
        let b = BBox::<f32>::new(5.0, 12.0, 15.0, 20.0);
        assert_eq!(x_overlap(&a, &b), 5.0f32);
    }

    #[test]
    fn union_area_counts_overlap_once() {
        let boxes = [bb(0.0, 0.0, 10.0, 10.0), bb(5.0, 5.0, 15.0, 15.0)];
        assert_eq!(union_area(&boxes), 175.0);
        assert_eq!(union_area::<f64>(&[]), 0.0);
    }

    #[test]
    fn validity() {
        assert!(bb(0.0, 0.0, 1.0, 1.0).is_valid());
        assert!(!bb(2.0, 0.0, 1.0, 1.0).is_valid());
        assert!(!bb(-1.0, 0.0, 1.0, 1.0).is_valid());
        assert!(!bb(0.0, 0.0, f64::INFINITY, 1.0).is_valid());
    }
}
