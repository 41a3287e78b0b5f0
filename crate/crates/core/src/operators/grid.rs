use crate::error::{Error, Result};
use crate::num::{c, Real};

/// Node placement rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Uniform,
    Geometric,
}

impl Spacing {
    pub fn as_str(self) -> &'static str {
        match self {
            Spacing::Uniform => "uniform",
            Spacing::Geometric => "geometric",
        }
    }
}

/// Radial nodes r₀ = R₁ < … < r_n = R₂.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid<T> {
    nodes: Vec<T>,
    pub spacing: Spacing,
}

pub const MIN_CELLS: usize = 16;

impl<T: Real> RadialGrid<T> {
    /// `n` equal cells on [r1, r2].
    pub fn uniform(r1: T, r2: T, n: usize) -> Result<Self> {
        Self::check(r1, r2, n)?;
        let h = (r2 - r1) / T::from_count(n);
        let mut nodes: Vec<T> = (0..=n).map(|i| r1 + h * T::from_count(i)).collect();
        nodes[n] = r2;
        Ok(Self { nodes, spacing: Spacing::Uniform })
    }

    /// `n` cells with constant ratio r_{i+1}/r_i.
    pub fn geometric(r1: T, r2: T, n: usize) -> Result<Self> {
        Self::check(r1, r2, n)?;
        if !(r1 > T::zero()) {
            return Err(Error::InvalidGrid("geometric spacing needs r1 > 0".into()));
        }
        let q = (r2 / r1).ln() / T::from_count(n);
        let mut nodes: Vec<T> = (0..=n).map(|i| r1 * (q * T::from_count(i)).exp()).collect();
        nodes[n] = r2;
        Ok(Self { nodes, spacing: Spacing::Geometric })
    }

    pub fn new(r1: T, r2: T, n: usize, spacing: Spacing) -> Result<Self> {
        match spacing {
            Spacing::Uniform => Self::uniform(r1, r2, n),
            Spacing::Geometric => Self::geometric(r1, r2, n),
        }
    }

    fn check(r1: T, r2: T, n: usize) -> Result<()> {
        if n < MIN_CELLS {
            return Err(Error::InvalidGrid(format!("need at least {MIN_CELLS} cells, got {n}")));
        }
        if !(r2 > r1) || !(r1 >= T::zero()) {
            return Err(Error::InvalidGrid(format!("bad interval [{}, {}]", r1.as_f64(), r2.as_f64())));
        }
        Ok(())
    }

    /// Number of cells.
    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Number of interior nodes (dimension of Dirichlet grid functions).
    pub fn interior(&self) -> usize {
        self.nodes.len() - 2
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn r1(&self) -> T {
        self.nodes[0]
    }

    pub fn r2(&self) -> T {
        self.nodes[self.nodes.len() - 1]
    }

    /// Width of cell `i` (between nodes i and i+1).
    pub fn h(&self, i: usize) -> T {
        self.nodes[i + 1] - self.nodes[i]
    }

    /// Midpoint of cell `i`.
    pub fn center(&self, i: usize) -> T {
        (self.nodes[i + 1] + self.nodes[i]) * c::<T>(0.5)
    }

    /// Dual-cell length of node `i`: half of each adjacent cell.
    pub fn dual(&self, i: usize) -> T {
        let half = c::<T>(0.5);
        let n = self.cells();
        let left = if i > 0 { self.h(i - 1) } else { T::zero() };
        let right = if i < n { self.h(i) } else { T::zero() };
        (left + right) * half
    }

    /// Radius of interior node `j` (j = 0 is node 1).
    pub fn interior_node(&self, j: usize) -> T {
        self.nodes[j + 1]
    }

    /// Interior radii.
    pub fn interior_nodes(&self) -> &[T] {
        &self.nodes[1..self.nodes.len() - 1]
    }

    /// Largest cell width.
    pub fn max_h(&self) -> T {
        (0..self.cells()).fold(T::zero(), |m, i| m.max(self.h(i)))
    }
}
