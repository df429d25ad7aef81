use serde::{Deserialize, Serialize};

/// A simple point configuration on `[0,1]^d`, `d ∈ {1, 2}`. Points are
/// stored as `[x, y]` with `y = 0` in dimension one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimpleConfig {
    pub dim: usize,
    pub points: Vec<[f64; 2]>,
}

impl SimpleConfig {
    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            points: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The configuration with one point appended.
    pub fn with_point(&self, point: [f64; 2]) -> Self {
        let mut points = self.points.clone();
        points.push(point);
        Self {
            dim: self.dim,
            points,
        }
    }
}
