//! Tiling problems over 2^n x 2^n corridors.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::stack::Symbol;

pub type Tile = Symbol;

/// Largest corridor exponent the brute-force solver accepts.
pub const MAX_SOLVER_N: u32 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TilingError {
    #[error("tile {0} is not declared")]
    UnknownTile(String),
    #[error("grid has {actual} cells, a 2^{n} x 2^{n} corridor needs {expected}")]
    DimensionMismatch { n: u32, expected: usize, actual: usize },
    #[error("corridor exponent {n} exceeds the solver limit {limit}")]
    ResourceBound { n: u32, limit: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TilingProblem {
    tiles: BTreeSet<Tile>,
    horizontal: BTreeSet<(Tile, Tile)>,
    vertical: BTreeSet<(Tile, Tile)>,
    init: Tile,
    fin: Tile,
}

impl TilingProblem {
    pub fn new(
        tiles: impl IntoIterator<Item = Tile>,
        horizontal: impl IntoIterator<Item = (Tile, Tile)>,
        vertical: impl IntoIterator<Item = (Tile, Tile)>,
        init: Tile,
        fin: Tile,
    ) -> Result<Self, TilingError> {
        let p = TilingProblem {
            tiles: tiles.into_iter().collect(),
            horizontal: horizontal.into_iter().collect(),
            vertical: vertical.into_iter().collect(),
            init,
            fin,
        };
        let pairs = p.horizontal.iter().chain(&p.vertical);
        for t in [&p.init, &p.fin].into_iter().chain(pairs.flat_map(|(a, b)| [a, b])) {
            if !p.tiles.contains(t) {
                return Err(TilingError::UnknownTile(t.to_string()));
            }
        }
        Ok(p)
    }

    pub fn tiles(&self) -> &BTreeSet<Tile> {
        &self.tiles
    }

    pub fn horizontal(&self) -> &BTreeSet<(Tile, Tile)> {
        &self.horizontal
    }

    pub fn vertical(&self) -> &BTreeSet<(Tile, Tile)> {
        &self.vertical
    }

    pub fn init(&self) -> &Tile {
        &self.init
    }

    pub fn fin(&self) -> &Tile {
        &self.fin
    }

    fn h(&self, a: &Tile, b: &Tile) -> bool {
        self.horizontal.contains(&(a.clone(), b.clone()))
    }

    fn v(&self, a: &Tile, b: &Tile) -> bool {
        self.vertical.contains(&(a.clone(), b.clone()))
    }
}

/// Row-major grid of tiles with side `2^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TilingSolution {
    n: u32,
    cells: Vec<Tile>,
}

impl TilingSolution {
    pub fn new(n: u32, cells: Vec<Tile>) -> Result<Self, TilingError> {
        let expected = cell_count(n);
        if cells.len() != expected {
            return Err(TilingError::DimensionMismatch {
                n,
                expected,
                actual: cells.len(),
            });
        }
        Ok(TilingSolution { n, cells })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn side(&self) -> usize {
        1 << self.n
    }

    pub fn cells(&self) -> &[Tile] {
        &self.cells
    }

    pub fn get(&self, row: usize, col: usize) -> &Tile {
        &self.cells[row * self.side() + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Tile]> {
        self.cells.chunks(self.side())
    }
}

pub fn cell_count(n: u32) -> usize {
    1usize << (2 * n)
}

fn require_dimension(n: u32, s: &TilingSolution) -> Result<(), TilingError> {
    if s.n != n {
        return Err(TilingError::DimensionMismatch {
            n,
            expected: cell_count(n),
            actual: s.cells.len(),
        });
    }
    Ok(())
}

/// Corners, adjacency relations, and the rule that the initial and final
/// tiles occur only in the first and last cell.
pub fn check_solution(p: &TilingProblem, n: u32, s: &TilingSolution) -> Result<bool, TilingError> {
    if !check_relations(p, n, s)? {
        return Ok(false);
    }
    let last = s.cells.len() - 1;
    let misplaced = s.cells.iter().enumerate().any(|(idx, t)| {
        (idx != 0 && *t == p.init) || (idx != last && *t == p.fin)
    });
    Ok(!misplaced)
}

/// Corners and adjacency relations only.
pub fn check_relations(p: &TilingProblem, n: u32, s: &TilingSolution) -> Result<bool, TilingError> {
    require_dimension(n, s)?;
    let side = s.side();
    if s.cells[0] != p.init || s.cells[s.cells.len() - 1] != p.fin {
        return Ok(false);
    }
    for r in 0..side {
        for c in 0..side {
            let t = s.get(r, c);
            if c + 1 < side && !p.h(t, s.get(r, c + 1)) {
                return Ok(false);
            }
            if r + 1 < side && !p.v(t, s.get(r + 1, c)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The row-major lexicographically least solution, by backtracking.
pub fn solve_bruteforce(p: &TilingProblem, n: u32) -> Result<Option<TilingSolution>, TilingError> {
    if n > MAX_SOLVER_N {
        return Err(TilingError::ResourceBound {
            n,
            limit: MAX_SOLVER_N,
        });
    }
    let tiles: Vec<&Tile> = p.tiles.iter().collect();
    let side = 1usize << n;
    let total = side * side;
    let mut grid: Vec<&Tile> = Vec::with_capacity(total);
    let mut next = vec![0usize; total];
    let fits = |grid: &[&Tile], t: &Tile| {
        let idx = grid.len();
        let (r, c) = (idx / side, idx % side);
        if (idx == 0) != (*t == p.init) || (idx == total - 1) != (*t == p.fin) {
            return false;
        }
        (c == 0 || p.h(grid[idx - 1], t)) && (r == 0 || p.v(grid[idx - side], t))
    };
    loop {
        let idx = grid.len();
        if idx == total {
            let cells = grid.iter().map(|&t| t.clone()).collect();
            return Ok(Some(TilingSolution { n, cells }));
        }
        match (next[idx]..tiles.len()).find(|&k| fits(&grid, tiles[k])) {
            Some(k) => {
                next[idx] = k + 1;
                grid.push(tiles[k]);
                if idx + 1 < total {
                    next[idx + 1] = 0;
                }
            }
            None => {
                if grid.pop().is_none() {
                    return Ok(None);
                }
            }
        }
    }
}

/// Every assignment of tiles to the grid, row-major lexicographic.
pub fn all_assignments(p: &TilingProblem, n: u32) -> impl Iterator<Item = TilingSolution> + '_ {
    let tiles: Vec<Tile> = p.tiles.iter().cloned().collect();
    let total = cell_count(n);
    let count = tiles.len().checked_pow(total as u32).unwrap_or(usize::MAX);
    (0..count).map(move |mut code| {
        let mut cells = vec![tiles[0].clone(); total];
        for cell in cells.iter_mut().rev() {
            *cell = tiles[code % tiles.len()].clone();
            code /= tiles.len();
        }
        TilingSolution { n, cells }
    })
}
