//! Points, boxes and trajectories on the quarter lattice.

use serde::{Deserialize, Serialize};

/// Lattice point `(i, j)`; the first coordinate indexes the hat strand.
pub type Point = (usize, usize);

/// Box `⟦1, n1⟧ × ⟦1, n2⟧`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoxSize {
    pub n1: usize,
    pub n2: usize,
}

impl BoxSize {
    pub fn new(n1: usize, n2: usize) -> Self {
        BoxSize { n1, n2 }
    }

    pub fn square(n: usize) -> Self {
        BoxSize { n1: n, n2: n }
    }

    pub fn contains(&self, p: Point) -> bool {
        p.0 >= 1 && p.1 >= 1 && p.0 <= self.n1 && p.1 <= self.n2
    }

    /// `‖n‖ = n1 + n2`.
    pub fn norm(&self) -> usize {
        self.n1 + self.n2
    }

    pub fn cells(&self) -> usize {
        self.n1 * self.n2
    }
}

/// Strict componentwise order `a ≺ b`.
pub fn strictly_below(a: Point, b: Point) -> bool {
    a.0 < b.0 && a.1 < b.1
}

/// Renewal points of one trajectory, strictly increasing in both
/// coordinates. The origin is implicit and never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Trajectory {
    pub points: Vec<Point>,
}

impl Trajectory {
    pub fn new(points: Vec<Point>) -> Self {
        Trajectory { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points lying in the box.
    pub fn restrict(&self, b: BoxSize) -> Trajectory {
        Trajectory {
            points: self.points.iter().copied().filter(|p| b.contains(*p)).collect(),
        }
    }

    pub fn is_strictly_increasing(&self) -> bool {
        let mut prev = (0, 0);
        for &p in &self.points {
            if !strictly_below(prev, p) {
                return false;
            }
            prev = p;
        }
        true
    }

    /// Jumps `(a, b)` between consecutive points, starting from the origin.
    pub fn jumps(&self) -> Vec<Point> {
        let mut prev = (0, 0);
        self.points
            .iter()
            .map(|&p| {
                let j = (p.0 - prev.0, p.1 - prev.1);
                prev = p;
                j
            })
            .collect()
    }
}

/// Dense `(n1+1) × (n2+1)` array indexed from `(0, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    pub n1: usize,
    pub n2: usize,
    data: Vec<T>,
}

impl<T: Clone> Grid<T> {
    pub fn filled(n1: usize, n2: usize, value: T) -> Self {
        Grid {
            n1,
            n2,
            data: vec![value; (n1 + 1) * (n2 + 1)],
        }
    }
}

impl<T> Grid<T> {
    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i <= self.n1 && j <= self.n2);
        i * (self.n2 + 1) + j
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[self.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut T {
        let k = self.idx(i, j);
        &mut self.data[k]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jumps_and_restriction() {
        let t = Trajectory::new(vec![(1, 2), (3, 3), (5, 9)]);
        assert_eq!(t.jumps(), vec![(1, 2), (2, 1), (2, 6)]);
        assert!(t.is_strictly_increasing());
        assert_eq!(t.restrict(BoxSize::new(4, 4)).points, vec![(1, 2), (3, 3)]);
        assert!(!Trajectory::new(vec![(1, 1), (1, 2)]).is_strictly_increasing());
    }
}
