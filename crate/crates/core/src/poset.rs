//! Finite products of extended-nonnegative-real chains and antichains of
//! minimal elements representing their upper sets.

use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PosetError {
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("descriptor mismatch: {0}")]
    Descriptor(String),
    #[error("coordinate {index} is {value}; coordinates must be nonnegative or +inf")]
    Coordinate { index: usize, value: f64 },
}

/// Orientation of a chain inside a product. `Decreasing` is the opposite order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Axis {
    pub name: String,
    pub unit: String,
    pub direction: Direction,
}

impl Axis {
    pub fn new(name: impl Into<String>, unit: impl Into<String>) -> Self {
        Self { name: name.into(), unit: unit.into(), direction: Direction::Increasing }
    }

    pub fn reversed(mut self) -> Self {
        self.direction = match self.direction {
            Direction::Increasing => Direction::Decreasing,
            Direction::Decreasing => Direction::Increasing,
        };
        self
    }
}

/// A product of chains. Two descriptors are compatible when their
/// directions agree coordinate by coordinate; names and units are labels.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PosetDescriptor {
    axes: Arc<[Axis]>,
}

impl PosetDescriptor {
    pub fn new(axes: Vec<Axis>) -> Self {
        Self { axes: axes.into() }
    }

    /// `n` anonymous increasing coordinates.
    pub fn increasing(n: usize) -> Self {
        Self::new((0..n).map(|i| Axis::new(format!("x{i}"), "")).collect())
    }

    pub fn from_directions(dirs: &[Direction]) -> Self {
        Self::new(
            dirs.iter()
                .enumerate()
                .map(|(i, &direction)| Axis { name: format!("x{i}"), unit: String::new(), direction })
                .collect(),
        )
    }

    /// The one-point poset, unit of the product.
    pub fn unit() -> Self {
        Self::new(Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn direction(&self, i: usize) -> Direction {
        self.axes[i].direction
    }

    pub fn opposite(&self) -> Self {
        Self::new(self.axes.iter().cloned().map(Axis::reversed).collect())
    }

    pub fn product(&self, other: &Self) -> Self {
        Self::new(self.axes.iter().chain(other.axes.iter()).cloned().collect())
    }

    /// Drops coordinate `i`.
    pub fn without(&self, i: usize) -> Self {
        Self::new(
            self.axes
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, a)| a.clone())
                .collect(),
        )
    }

    pub fn compatible(&self, other: &Self) -> bool {
        self.dim() == other.dim()
            && self.axes.iter().zip(other.axes.iter()).all(|(a, b)| a.direction == b.direction)
    }

    pub fn ensure_compatible(&self, other: &Self) -> Result<(), PosetError> {
        if self.compatible(other) {
            Ok(())
        } else {
            Err(PosetError::Descriptor(format!("{self:?} vs {other:?}")))
        }
    }

    pub fn conforms(&self, p: &Point) -> Result<(), PosetError> {
        if p.dim() == self.dim() {
            Ok(())
        } else {
            Err(PosetError::Dimension { expected: self.dim(), got: p.dim() })
        }
    }

    /// Least element of the product.
    pub fn bottom(&self) -> Point {
        Point(
            self.axes
                .iter()
                .map(|a| match a.direction {
                    Direction::Increasing => 0.0,
                    Direction::Decreasing => f64::INFINITY,
                })
                .collect(),
        )
    }

    /// Greatest element of the product.
    pub fn top(&self) -> Point {
        Point(
            self.axes
                .iter()
                .map(|a| match a.direction {
                    Direction::Increasing => f64::INFINITY,
                    Direction::Decreasing => 0.0,
                })
                .collect(),
        )
    }

    /// Order test. Exact float comparison.
    pub fn leq(&self, a: &Point, b: &Point) -> Result<bool, PosetError> {
        self.conforms(a)?;
        self.conforms(b)?;
        Ok(self.leq_unchecked(a, b))
    }

    pub(crate) fn leq_unchecked(&self, a: &Point, b: &Point) -> bool {
        self.axes.iter().zip(a.0.iter().zip(b.0.iter())).all(|(axis, (x, y))| match axis.direction {
            Direction::Increasing => x <= y,
            Direction::Decreasing => x >= y,
        })
    }

    /// Component-wise least upper bound.
    pub fn join(&self, a: &Point, b: &Point) -> Point {
        Point(
            self.axes
                .iter()
                .zip(a.0.iter().zip(b.0.iter()))
                .map(|(axis, (&x, &y))| match axis.direction {
                    Direction::Increasing => x.max(y),
                    Direction::Decreasing => x.min(y),
                })
                .collect(),
        )
    }
}

impl fmt::Debug for PosetDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("⟨")?;
        for (i, a) in self.axes.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", a.name)?;
            if !a.unit.is_empty() {
                write!(f, " [{}]", a.unit)?;
            }
            if a.direction == Direction::Decreasing {
                f.write_str("ᵒᵖ")?;
            }
        }
        f.write_str("⟩")
    }
}

pub type Coords = SmallVec<[f64; 6]>;

/// A point of a product of extended-nonnegative-real chains.
#[derive(Clone, PartialEq)]
pub struct Point(Coords);

impl Point {
    pub fn new(coords: impl IntoIterator<Item = f64>) -> Result<Self, PosetError> {
        let coords: Coords = coords.into_iter().collect();
        for (index, &value) in coords.iter().enumerate() {
            if value.is_nan() || value < 0.0 {
                return Err(PosetError::Coordinate { index, value });
            }
        }
        Ok(Self(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn concat(&self, other: &Point) -> Point {
        Point(self.0.iter().chain(other.0.iter()).copied().collect())
    }

    pub fn with_inserted(&self, i: usize, value: f64) -> Point {
        let mut c = self.0.clone();
        c.insert(i, value);
        Point(c)
    }

    pub fn without(&self, i: usize) -> Point {
        let mut c = self.0.clone();
        c.remove(i);
        Point(c)
    }

    pub fn split_at(&self, i: usize) -> (Point, Point) {
        (Point(self.0[..i].iter().copied().collect()), Point(self.0[i..].iter().copied().collect()))
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// Shorthand for tests and examples; panics on invalid coordinates.
#[macro_export]
macro_rules! pt {
    ($($x:expr),* $(,)?) => {
        $crate::poset::Point::new([$($x as f64),*]).expect("valid point")
    };
}

/// Minimal elements of an upper set. The empty antichain is the empty
/// upper set.
#[derive(Clone)]
pub struct Antichain {
    desc: PosetDescriptor,
    points: Vec<Point>,
}

impl Antichain {
    pub fn empty(desc: PosetDescriptor) -> Self {
        Self { desc, points: Vec::new() }
    }

    pub fn singleton(desc: PosetDescriptor, p: Point) -> Result<Self, PosetError> {
        desc.conforms(&p)?;
        Ok(Self { desc, points: vec![p] })
    }

    /// Minimal elements of the upper closure of `points`.
    pub fn from_points(desc: PosetDescriptor, points: impl IntoIterator<Item = Point>) -> Result<Self, PosetError> {
        let mut ac = Self::empty(desc);
        for p in points {
            ac.insert_mut(p)?;
        }
        Ok(ac)
    }

    pub fn descriptor(&self) -> &PosetDescriptor {
        &self.desc
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn insert(&self, x: Point) -> Result<Self, PosetError> {
        let mut out = self.clone();
        out.insert_mut(x)?;
        Ok(out)
    }

    /// In-place insert; returns whether `x` was kept.
    pub fn insert_mut(&mut self, x: Point) -> Result<bool, PosetError> {
        self.desc.conforms(&x)?;
        Ok(self.insert_unchecked(x))
    }

    pub(crate) fn insert_unchecked(&mut self, x: Point) -> bool {
        if self.points.iter().any(|m| self.desc.leq_unchecked(m, &x)) {
            return false;
        }
        let desc = &self.desc;
        self.points.retain(|m| !desc.leq_unchecked(&x, m));
        self.points.push(x);
        true
    }

    /// Whether `x` lies in the represented upper set.
    pub fn dominates(&self, x: &Point) -> Result<bool, PosetError> {
        self.desc.conforms(x)?;
        Ok(self.dominates_unchecked(x))
    }

    pub(crate) fn dominates_unchecked(&self, x: &Point) -> bool {
        self.points.iter().any(|m| self.desc.leq_unchecked(m, x))
    }

    pub fn union(&self, other: &Self) -> Result<Self, PosetError> {
        self.desc.ensure_compatible(&other.desc)?;
        let mut out = self.clone();
        for p in &other.points {
            out.insert_unchecked(p.clone());
        }
        Ok(out)
    }

    /// Meet of upper sets: minimal pairwise joins.
    pub fn intersection(&self, other: &Self) -> Result<Self, PosetError> {
        self.desc.ensure_compatible(&other.desc)?;
        let mut out = Self::empty(self.desc.clone());
        for p in &self.points {
            for q in &other.points {
                out.insert_unchecked(self.desc.join(p, q));
            }
        }
        Ok(out)
    }

    /// Set equality, ignoring point order.
    pub fn same_set(&self, other: &Self) -> bool {
        self.points.len() == other.points.len() && self.points.iter().all(|p| other.points.contains(p))
    }

    /// Set equality up to a relative tolerance per coordinate.
    pub fn approx_eq(&self, other: &Self, rel_tol: f64) -> bool {
        let close = |a: &Point, b: &Point| {
            a.0.iter().zip(b.0.iter()).all(|(&x, &y)| {
                x == y || (x - y).abs() <= rel_tol * x.abs().max(y.abs()).max(1.0)
            })
        };
        self.points.len() == other.points.len()
            && self.points.iter().all(|p| other.points.iter().any(|q| close(p, q)))
            && other.points.iter().all(|q| self.points.iter().any(|p| close(p, q)))
    }

    /// Smallest value of coordinate `i` over the upper set; +inf when empty.
    pub fn min_coord(&self, i: usize) -> f64 {
        self.points.iter().map(|p| p.0[i]).fold(f64::INFINITY, f64::min)
    }

    pub fn map_points(&self, desc: PosetDescriptor, f: impl Fn(&Point) -> Point) -> Self {
        let mut out = Self::empty(desc);
        for p in &self.points {
            out.insert_unchecked(f(p));
        }
        out
    }
}

impl PartialEq for Antichain {
    fn eq(&self, other: &Self) -> bool {
        self.desc.compatible(&other.desc) && self.same_set(other)
    }
}

impl fmt::Debug for Antichain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.points.iter()).finish()
    }
}
