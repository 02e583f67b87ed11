//! The planning task as a search problem over the 8-connected grid.

use std::f64::consts::SQRT_2;

use arrayvec::ArrayVec;

use crate::map::{GridIndex, OccupancyGrid, WorldPoint};
use crate::{Error, Result};

/// Neighbor offsets `(dcol, drow)` in successor order N, NE, E, SE, S, SW, W, NW.
/// North is +row (+y in the map frame).
pub const NEIGHBOR_OFFSETS: [(isize, isize); 8] = [
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
    (-1, 0),
    (-1, 1),
];

pub type Successors = ArrayVec<(GridIndex, f64), 8>;

#[derive(Debug, Clone, Copy)]
pub struct SearchProblem<'g> {
    pub grid: &'g OccupancyGrid,
    pub start: GridIndex,
    pub goal: GridIndex,
    pub cardinal_cost: f64,
    pub diagonal_cost: f64,
}

impl<'g> SearchProblem<'g> {
    /// Unit cardinal and √2 diagonal step costs.
    pub fn new(grid: &'g OccupancyGrid, start: GridIndex, goal: GridIndex) -> Result<Self> {
        let problem = Self {
            grid,
            start,
            goal,
            cardinal_cost: 1.0,
            diagonal_cost: SQRT_2,
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, i) in [("start", self.start), ("goal", self.goal)] {
            if !self.grid.contains(i) {
                return Err(Error::InvalidProblem(format!(
                    "{name} {i:?} is out of bounds"
                )));
            }
            if !self.grid.is_free(i) {
                return Err(Error::InvalidProblem(format!("{name} {i:?} is not free")));
            }
        }
        if !(self.cardinal_cost > 0.0 && self.diagonal_cost >= self.cardinal_cost) {
            return Err(Error::InvalidProblem(format!(
                "step costs {} / {} must satisfy 0 < cardinal <= diagonal",
                self.cardinal_cost, self.diagonal_cost
            )));
        }
        Ok(())
    }

    pub fn is_goal(&self, n: GridIndex) -> bool {
        n == self.goal
    }

    /// Free in-bounds neighbors of `n` with their step costs. A diagonal move
    /// needs both cardinal cells it passes between to be Free.
    pub fn successors(&self, n: GridIndex) -> Successors {
        let grid = self.grid;
        let free_at = |dc: isize, dr: isize| -> Option<GridIndex> {
            let c = n.col.checked_add_signed(dc)?;
            let r = n.row.checked_add_signed(dr)?;
            let i = GridIndex::new(c, r);
            grid.is_free(i).then_some(i)
        };
        let mut out = Successors::new();
        for (dc, dr) in NEIGHBOR_OFFSETS {
            let Some(m) = free_at(dc, dr) else { continue };
            if dc != 0 && dr != 0 {
                if free_at(dc, 0).is_none() || free_at(0, dr).is_none() {
                    continue;
                }
                out.push((m, self.diagonal_cost));
            } else {
                out.push((m, self.cardinal_cost));
            }
        }
        out
    }

    /// Step cost between two cells if `to` is a legal successor of `from`.
    pub fn step_cost(&self, from: GridIndex, to: GridIndex) -> Option<f64> {
        self.successors(from)
            .into_iter()
            .find(|&(m, _)| m == to)
            .map(|(_, c)| c)
    }
}

/// Free cell whose center is nearest to `p`; ties go to the smaller row,
/// then the smaller column.
pub fn snap_to_free(grid: &OccupancyGrid, p: WorldPoint) -> Result<GridIndex> {
    let mut best: Option<(f64, GridIndex)> = None;
    // indices() walks rows in ascending order, so strict `<` keeps the tie-break
    for i in grid.indices().filter(|&i| grid.is_free(i)) {
        let c = grid.grid_to_world(i)?;
        let d2 = (c.x - p.x).powi(2) + (c.y - p.y).powi(2);
        if best.is_none_or(|(bd, _)| d2 < bd) {
            best = Some((d2, i));
        }
    }
    best.map(|(_, i)| i).ok_or(Error::NoFreeCell)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{MapOrigin, Occupancy};

    fn free(w: usize, h: usize) -> OccupancyGrid {
        OccupancyGrid::filled(w, h, 1.0, MapOrigin::default(), Occupancy::Free).unwrap()
    }

    fn wall_5x5() -> OccupancyGrid {
        let mut g = free(5, 5);
        for row in 0..4 {
            g.set(GridIndex::new(2, row), Occupancy::Occupied).unwrap();
        }
        g
    }

    #[test]
    fn interior_node_has_eight_successors() {
        let g = free(5, 5);
        let p = SearchProblem::new(&g, GridIndex::new(0, 0), GridIndex::new(4, 4)).unwrap();
        let s = p.successors(GridIndex::new(2, 2));
        assert_eq!(s.len(), 8);
        assert_eq!(s.iter().filter(|(_, c)| *c == 1.0).count(), 4);
        assert_eq!(s.iter().filter(|(_, c)| *c == SQRT_2).count(), 4);
        let order: Vec<_> = s.iter().map(|(m, _)| (m.col, m.row)).collect();
        assert_eq!(
            order,
            vec![
                (2, 3),
                (3, 3),
                (3, 2),
                (3, 1),
                (2, 1),
                (1, 1),
                (1, 2),
                (1, 3)
            ]
        );
    }

    #[test]
    fn corner_has_three_successors() {
        let g = free(5, 5);
        let p = SearchProblem::new(&g, GridIndex::new(0, 0), GridIndex::new(4, 4)).unwrap();
        assert_eq!(p.successors(GridIndex::new(0, 0)).len(), 3);
    }

    #[test]
    fn corner_cutting_is_excluded() {
        let g = wall_5x5();
        let p = SearchProblem::new(&g, GridIndex::new(0, 2), GridIndex::new(4, 2)).unwrap();
        let s: Vec<GridIndex> = p
            .successors(GridIndex::new(1, 3))
            .iter()
            .map(|(m, _)| *m)
            .collect();
        // candidates: N(1,4) NE(2,4)x E(2,3)occ SE(2,2)occ S(1,2) SW(0,2) W(0,3) NW(0,4)
        assert_eq!(
            s,
            vec![
                GridIndex::new(1, 4),
                GridIndex::new(1, 2),
                GridIndex::new(0, 2),
                GridIndex::new(0, 3),
                GridIndex::new(0, 4),
            ]
        );
    }

    #[test]
    fn rejects_blocked_endpoints() {
        let g = wall_5x5();
        assert!(matches!(
            SearchProblem::new(&g, GridIndex::new(2, 0), GridIndex::new(4, 2)),
            Err(Error::InvalidProblem(_))
        ));
        assert!(matches!(
            SearchProblem::new(&g, GridIndex::new(0, 0), GridIndex::new(9, 2)),
            Err(Error::InvalidProblem(_))
        ));
    }

    #[test]
    fn snap_exact_center() {
        let g = free(4, 4);
        let c = g.grid_to_world(GridIndex::new(3, 1)).unwrap();
        assert_eq!(snap_to_free(&g, c).unwrap(), GridIndex::new(3, 1));
    }

    #[test]
    fn snap_from_occupied_to_single_free_neighbor() {
        let mut g =
            OccupancyGrid::filled(3, 3, 1.0, MapOrigin::default(), Occupancy::Occupied).unwrap();
        g.set(GridIndex::new(1, 2), Occupancy::Free).unwrap();
        let p = g.grid_to_world(GridIndex::new(1, 1)).unwrap();
        assert_eq!(snap_to_free(&g, p).unwrap(), GridIndex::new(1, 2));
    }

    #[test]
    fn snap_tie_prefers_smaller_row() {
        let mut g =
            OccupancyGrid::filled(4, 4, 1.0, MapOrigin::default(), Occupancy::Occupied).unwrap();
        g.set(GridIndex::new(1, 2), Occupancy::Free).unwrap();
        g.set(GridIndex::new(2, 1), Occupancy::Free).unwrap();
        // center of (1,1)-(2,2) block is equidistant from both
        let p = WorldPoint::new(2.0, 2.0);
        let d = |i| g.grid_to_world(i).unwrap().distance(&p);
        assert_eq!(d(GridIndex::new(1, 2)), d(GridIndex::new(2, 1)));
        assert_eq!(snap_to_free(&g, p).unwrap(), GridIndex::new(2, 1));
    }

    #[test]
    fn snap_without_free_cells() {
        let g = OccupancyGrid::filled(2, 2, 1.0, MapOrigin::default(), Occupancy::Unknown).unwrap();
        assert!(matches!(
            snap_to_free(&g, WorldPoint::new(0.0, 0.0)),
            Err(Error::NoFreeCell)
        ));
    }
}
