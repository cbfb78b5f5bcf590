//! Axis-aligned boxes in PDF user space (points, origin bottom-left).

use serde::{Deserialize, Serialize};

/// An axis-aligned rectangle in PDF user space. Units are points (1/72 inch)
/// with the origin at the bottom-left of the page, so `y1` is the top edge.
///
/// Invariant: `x0 <= x1`, `y0 <= y1`, all coordinates finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl BBox {
    /// Builds a box from two corner points, normalizing corner order.
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self {
            x0: x0.min(x1),
            y0: y0.min(y1),
            x1: x0.max(x1),
            y1: y0.max(y1),
        }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> (f64, f64) {
        ((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0)
    }

    pub fn is_valid(&self) -> bool {
        self.x0.is_finite()
            && self.y0.is_finite()
            && self.x1.is_finite()
            && self.y1.is_finite()
            && self.x0 <= self.x1
            && self.y0 <= self.y1
    }

    /// Area of the intersection, 0 when disjoint. Commutative.
    pub fn overlap_area(&self, other: &BBox) -> f64 {
        let w = (self.x1.min(other.x1) - self.x0.max(other.x0)).max(0.0);
        let h = (self.y1.min(other.y1) - self.y0.max(other.y0)).max(0.0);
        w * h
    }

    /// Smallest box containing both. Associative and commutative.
    pub fn union(&self, other: &BBox) -> BBox {
        BBox {
            x0: self.x0.min(other.x0),
            y0: self.y0.min(other.y0),
            x1: self.x1.max(other.x1),
            y1: self.y1.max(other.y1),
        }
    }

    /// Intersection over union, in [0, 1]. 0 for disjoint or degenerate pairs.
    pub fn iou(&self, other: &BBox) -> f64 {
        let inter = self.overlap_area(other);
        let uni = self.area() + other.area() - inter;
        if uni <= 0.0 {
            0.0
        } else {
            inter / uni
        }
    }

    /// The box grown by `margin` points on every side.
    pub fn expand(&self, margin: f64) -> BBox {
        BBox {
            x0: self.x0 - margin,
            y0: self.y0 - margin,
            x1: self.x1 + margin,
            y1: self.y1 + margin,
        }
    }

    /// True when `other` lies entirely inside this box.
    pub fn contains(&self, other: &BBox) -> bool {
        self.x0 <= other.x0 && self.y0 <= other.y0 && self.x1 >= other.x1 && self.y1 >= other.y1
    }

    /// Clamps this box to `bounds`, keeping it valid.
    pub fn clamp_to(&self, bounds: &BBox) -> BBox {
        BBox {
            x0: self.x0.max(bounds.x0).min(bounds.x1),
            y0: self.y0.max(bounds.y0).min(bounds.y1),
            x1: self.x1.min(bounds.x1).max(bounds.x0),
            y1: self.y1.min(bounds.y1).max(bounds.y0),
        }
    }
}

/// Union over a non-empty slice of boxes.
pub fn union_all(boxes: &[BBox]) -> Option<BBox> {
    let (first, rest) = boxes.split_first()?;
    Some(rest.iter().fold(*first, |acc, b| acc.union(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn overlap_basic() {
        let a = BBox::new(0.0, 0.0, 10.0, 10.0);
        let b = BBox::new(5.0, 5.0, 15.0, 15.0);
        assert_eq!(a.overlap_area(&b), 25.0);
        assert_eq!(b.overlap_area(&a), 25.0);
    }

    #[test]
    fn overlap_disjoint() {
        let a = BBox::new(0.0, 0.0, 10.0, 10.0);
        let b = BBox::new(20.0, 20.0, 30.0, 30.0);
        assert_eq!(a.overlap_area(&b), 0.0);
    }

    #[test]
    fn overlap_self_is_area() {
        let a = BBox::new(2.0, 3.0, 7.0, 11.0);
        assert_eq!(a.overlap_area(&a), a.area());
    }

    #[test]
    fn union_basic() {
        let a = BBox::new(0.0, 0.0, 1.0, 1.0);
        let b = BBox::new(2.0, 2.0, 3.0, 3.0);
        assert_eq!(a.union(&b), BBox::new(0.0, 0.0, 3.0, 3.0));
    }

    #[test]
    fn union_idempotent() {
        let a = BBox::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!(a.union(&a), a);
    }

    fn arb_bbox() -> impl Strategy<Value = BBox> {
        (0.0..500.0f64, 0.0..500.0f64, 1.0..200.0f64, 1.0..200.0f64)
            .prop_map(|(x, y, w, h)| BBox::new(x, y, x + w, y + h))
    }

    proptest! {
        // overlap never exceeds the smaller operand's area
        #[test]
        fn overlap_bounded_by_min_area(a in arb_bbox(), b in arb_bbox()) {
            let o = a.overlap_area(&b);
            prop_assert!(o <= a.area().min(b.area()) + 1e-9);
            prop_assert!((o - b.overlap_area(&a)).abs() < 1e-9);
        }

        // union over a shuffled list equals union over the original list
        #[test]
        fn union_order_invariant(mut boxes in prop::collection::vec(arb_bbox(), 1..12), seed in any::<u64>()) {
            let sorted = union_all(&boxes).unwrap();
            // cheap deterministic shuffle
            let n = boxes.len();
            for i in 0..n {
                let j = ((seed as usize).wrapping_mul(31).wrapping_add(i * 17)) % n;
                boxes.swap(i, j);
            }
            let shuffled = union_all(&boxes).unwrap();
            prop_assert_eq!(sorted, shuffled);
        }

        #[test]
        fn union_contains_both(a in arb_bbox(), b in arb_bbox()) {
            let u = a.union(&b);
            prop_assert!(u.contains(&a));
            prop_assert!(u.contains(&b));
            prop_assert_eq!(u, b.union(&a));
        }
    }
}
