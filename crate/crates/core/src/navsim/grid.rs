use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::Vec2;
use crate::math::{floor, sqrt};

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum GridError {
    #[error("grid must be at least 1x1")]
    Empty,
    #[error("resolution must be positive and finite")]
    BadResolution,
    #[error("cell count does not match dimensions")]
    CellCount,
    #[error("inflation radius must be non-negative and finite")]
    BadRadius,
}

/// Free/occupied bitmap. Cell `(col, row)` spans
/// `origin + [col, col+1) × [row, row+1)` times `resolution`; row 0 is the
/// minimum-y row.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    width: usize,
    height: usize,
    resolution: f64,
    origin: Vec2,
    cells: Vec<bool>,
}

impl OccupancyGrid {
    /// All-free grid.
    pub fn new(width: usize, height: usize, resolution: f64, origin: Vec2) -> Result<Self, GridError> {
        Self::from_cells(width, height, resolution, origin, vec![false; width * height])
    }

    /// `cells` is row-major starting at row 0 (minimum y); `true` is occupied.
    pub fn from_cells(
        width: usize,
        height: usize,
        resolution: f64,
        origin: Vec2,
        cells: Vec<bool>,
    ) -> Result<Self, GridError> {
        if width == 0 || height == 0 {
            return Err(GridError::Empty);
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(GridError::BadResolution);
        }
        if cells.len() != width * height {
            return Err(GridError::CellCount);
        }
        Ok(Self { width, height, resolution, origin, cells })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn origin(&self) -> Vec2 {
        self.origin
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn is_occupied(&self, col: usize, row: usize) -> bool {
        self.cells[row * self.width + col]
    }

    pub fn set_occupied(&mut self, col: usize, row: usize, occupied: bool) {
        self.cells[row * self.width + col] = occupied;
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|c| **c).count()
    }

    /// Cell containing map point `p`, if inside the grid.
    pub fn cell_of(&self, p: Vec2) -> Option<(usize, usize)> {
        if !p.is_finite() {
            return None;
        }
        let c = floor((p.x - self.origin.x) / self.resolution);
        let r = floor((p.y - self.origin.y) / self.resolution);
        if c < 0.0 || r < 0.0 || c >= self.width as f64 || r >= self.height as f64 {
            return None;
        }
        Some((c as usize, r as usize))
    }

    pub fn cell_center(&self, col: usize, row: usize) -> Vec2 {
        Vec2::new(
            self.origin.x + (col as f64 + 0.5) * self.resolution,
            self.origin.y + (row as f64 + 0.5) * self.resolution,
        )
    }

    /// Marks every free cell whose center lies within `radius` meters of any
    /// point of an occupied cell.
    pub fn inflate(&self, radius: f64) -> Result<OccupancyGrid, GridError> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(GridError::BadRadius);
        }
        let r = radius / self.resolution;
        let r2 = r * r;
        let reach = floor(r + 0.5) as isize;
        let mut out = self.clone();
        for row in 0..self.height {
            for col in 0..self.width {
                if !self.is_occupied(col, row) {
                    continue;
                }
                for dr in -reach..=reach {
                    for dc in -reach..=reach {
                        let (c, rr) = (col as isize + dc, row as isize + dr);
                        if c < 0 || rr < 0 || c >= self.width as isize || rr >= self.height as isize {
                            continue;
                        }
                        // distance from neighbour centre to the occupied cell's square, in cells
                        let gx = ((dc.unsigned_abs() as f64) - 0.5).max(0.0);
                        let gy = ((dr.unsigned_abs() as f64) - 0.5).max(0.0);
                        if gx * gx + gy * gy <= r2 {
                            out.cells[rr as usize * self.width + c as usize] = true;
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Radius in meters that circumscribes a rectangular footprint.
    pub fn circumscribed_radius(length: f64, width: f64) -> f64 {
        0.5 * sqrt(length * length + width * width)
    }
}
