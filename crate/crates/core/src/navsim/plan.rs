use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::OccupancyGrid;
use crate::geometry::Vec2;
use crate::math::abs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum PlanError {
    #[error("start or goal lies outside the grid")]
    OutOfBounds,
    #[error("no collision-free path")]
    NoPath,
}

const SQRT_2: f64 = core::f64::consts::SQRT_2;

const NEIGHBOURS: [(isize, isize); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];

#[derive(Debug, Clone, Copy)]
struct OpenEntry {
    f: f64,
    seq: u64,
    node: usize,
}

impl PartialEq for OpenEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for OpenEntry {}

impl PartialOrd for OpenEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OpenEntry {
    // BinaryHeap is a max-heap: reverse so the smallest f (then seq) pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        other.f.total_cmp(&self.f).then_with(|| other.seq.cmp(&self.seq))
    }
}

fn octile(a: (usize, usize), b: (usize, usize)) -> f64 {
    let dx = abs(a.0 as f64 - b.0 as f64);
    let dy = abs(a.1 as f64 - b.1 as f64);
    let (lo, hi) = if dx < dy { (dx, dy) } else { (dy, dx) };
    hi - lo + SQRT_2 * lo
}

/// 8-connected A* from the cell containing `start` to the cell containing
/// `goal`. Diagonal steps may not cut an occupied corner. Returns cell centers
/// from start to goal.
pub fn plan(grid: &OccupancyGrid, start: Vec2, goal: Vec2) -> Result<Vec<Vec2>, PlanError> {
    let s = grid.cell_of(start).ok_or(PlanError::OutOfBounds)?;
    let g = grid.cell_of(goal).ok_or(PlanError::OutOfBounds)?;
    if grid.is_occupied(s.0, s.1) || grid.is_occupied(g.0, g.1) {
        return Err(PlanError::NoPath);
    }
    let (w, h) = (grid.width(), grid.height());
    let idx = |c: (usize, usize)| c.1 * w + c.0;
    let mut cost = vec![f64::INFINITY; w * h];
    let mut parent = vec![usize::MAX; w * h];
    let mut closed = vec![false; w * h];
    let mut open = BinaryHeap::new();
    let mut seq = 0u64;

    cost[idx(s)] = 0.0;
    open.push(OpenEntry { f: octile(s, g), seq, node: idx(s) });

    while let Some(OpenEntry { node, .. }) = open.pop() {
        if closed[node] {
            continue;
        }
        closed[node] = true;
        if node == idx(g) {
            break;
        }
        let (col, row) = ((node % w) as isize, (node / w) as isize);
        for (dc, dr) in NEIGHBOURS {
            let (nc, nr) = (col + dc, row + dr);
            if nc < 0 || nr < 0 || nc >= w as isize || nr >= h as isize {
                continue;
            }
            let (nc, nr) = (nc as usize, nr as usize);
            if grid.is_occupied(nc, nr) {
                continue;
            }
            let step = if dc != 0 && dr != 0 {
                if grid.is_occupied(nc, row as usize) || grid.is_occupied(col as usize, nr) {
                    continue;
                }
                SQRT_2
            } else {
                1.0
            };
            let n = nr * w + nc;
            let tentative = cost[node] + step;
            if tentative < cost[n] {
                cost[n] = tentative;
                parent[n] = node;
                seq += 1;
                open.push(OpenEntry { f: tentative + octile((nc, nr), g), seq, node: n });
            }
        }
    }

    if !closed[idx(g)] {
        return Err(PlanError::NoPath);
    }
    let mut cells = Vec::new();
    let mut cur = idx(g);
    while cur != usize::MAX {
        cells.push(grid.cell_center(cur % w, cur / w));
        cur = parent[cur];
    }
    cells.reverse();
    Ok(cells)
}

/// Polyline length of a path, meters.
pub fn path_length(path: &[Vec2]) -> f64 {
    path.windows(2).map(|p| p[0].distance(&p[1])).sum()
}
