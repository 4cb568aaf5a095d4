//! Geometry constructors. Each returns an uncoloured [`Geometry`]; presets
//! and callers turn it into a [`Lattice`](super::Lattice).

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};

/// Sites, bonds and boundary flags before colouring and ancilla assignment.
#[derive(Clone, Debug, PartialEq)]
pub struct Geometry {
    pub name: String,
    pub positions: Vec<[f64; 2]>,
    /// Bonds as `(a, b)` with `a < b`.
    pub pairs: Vec<(usize, usize)>,
    pub boundary: Vec<bool>,
    pub label_offset: usize,
}

/// How the rim of a kagome or Lieb patch is closed off.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryStyle {
    /// Dangling bonds are kept, leaving coordination-3 (pumped) rim sites.
    Open,
    /// Rim sites that would end up with odd coordination are trimmed away.
    Closed,
}

impl std::str::FromStr for BoundaryStyle {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "open" => Ok(Self::Open),
            "closed" => Ok(Self::Closed),
            other => Err(Error::config(
                "lattice",
                format!("unknown boundary style `{other}` (open, closed)"),
            )),
        }
    }
}

impl Geometry {
    /// Reject empty graphs, self-loops, out-of-range sites and duplicate bonds.
    pub(crate) fn check(&self) -> Result<()> {
        let n = self.positions.len();
        if n == 0 {
            return Err(Error::InvalidLattice("no sites".into()));
        }
        if self.boundary.len() != n {
            return Err(Error::InvalidLattice(
                "boundary flags do not match site count".into(),
            ));
        }
        let mut seen = BTreeSet::new();
        for &(a, b) in &self.pairs {
            if a == b || a >= n || b >= n {
                return Err(Error::InvalidLattice(format!("bad bond ({a}, {b})")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidLattice(format!("duplicate bond ({a}, {b})")));
            }
        }
        Ok(())
    }

    /// Arbitrary graph. Sites whose coordination is below the maximum are
    /// tagged boundary; positions are spread on a circle.
    pub fn from_edges(name: &str, n_sites: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let pairs = normalise(edges);
        let mut degree = vec![0usize; n_sites];
        for &(a, b) in &pairs {
            if a >= n_sites || b >= n_sites {
                return Err(Error::InvalidLattice(format!("bad bond ({a}, {b})")));
            }
            degree[a] += 1;
            degree[b] += 1;
        }
        let max = degree.iter().copied().max().unwrap_or(0);
        let positions = (0..n_sites)
            .map(|i| {
                let phi = std::f64::consts::TAU * i as f64 / n_sites.max(1) as f64;
                [phi.cos(), phi.sin()]
            })
            .collect();
        let g = Self {
            name: name.to_string(),
            positions,
            pairs,
            boundary: degree.iter().map(|&d| d < max).collect(),
            label_offset: 0,
        };
        g.check()?;
        Ok(g)
    }

    pub fn chain(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        let mut g = Self::from_edges(&format!("chain({n})"), n, &edges)?;
        g.positions = (0..n).map(|i| [i as f64, 0.0]).collect();
        Ok(g)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidLattice("a cycle needs at least 3 sites".into()));
        }
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        edges.push((0, n - 1));
        Self::from_edges(&format!("cycle({n})"), n, &edges)
    }

    /// Centre 0 joined to `leaves` outer sites.
    pub fn star(leaves: usize) -> Result<Self> {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        let mut g = Self::from_edges(&format!("star({leaves})"), leaves + 1, &edges)?;
        g.positions[0] = [0.0, 0.0];
        Ok(g)
    }

    /// Rectangular patch of `w` by `h` plaquettes.
    pub fn square(w: usize, h: usize) -> Result<Self> {
        let mut grid = Grid::new(w + 1, h + 1);
        grid.fill(|_, _| true);
        grid.into_geometry(&format!("square({w},{h})"))
    }

    /// Lieb patch of `w` by `h` plaquettes: lattice points plus bond midpoints.
    /// The closed style removes each corner point together with its two
    /// midpoints.
    pub fn lieb(w: usize, h: usize, style: BoundaryStyle) -> Result<Self> {
        let (cols, rows) = (2 * w + 1, 2 * h + 1);
        let mut grid = Grid::new(cols, rows);
        let corner = |x: usize, y: usize| {
            let near_x = x <= 1 || x + 2 >= cols;
            let near_y = y <= 1 || y + 2 >= rows;
            let on_rim = x == 0 || y == 0 || x + 1 == cols || y + 1 == rows;
            near_x && near_y && on_rim
        };
        grid.fill(|x, y| {
            let hole = x % 2 == 1 && y % 2 == 1;
            !hole && !(style == BoundaryStyle::Closed && corner(x, y))
        });
        let name = match style {
            BoundaryStyle::Open => format!("lieb({w},{h})"),
            BoundaryStyle::Closed => format!("lieb({w},{h},closed)"),
        };
        grid.into_geometry(&name)
    }

    /// Kagome patch of `cols` chains, each `rows` sites long, joined by
    /// columns of bridge sites.
    pub fn kagome(rows: usize, cols: usize, style: BoundaryStyle) -> Result<Self> {
        if rows < 2 || cols < 1 {
            return Err(Error::InvalidLattice(
                "kagome patch needs rows >= 2, cols >= 1".into(),
            ));
        }
        let rows = rows as i32;
        let chain = Column::Chain((0..rows).collect());
        let bridge = |parity: i32| {
            let lo = match style {
                BoundaryStyle::Open => -1,
                BoundaryStyle::Closed => 0,
            };
            let hi = match style {
                BoundaryStyle::Open => rows - 1,
                BoundaryStyle::Closed => rows - 2,
            };
            Column::Bridge((lo..=hi).filter(|y| y.rem_euclid(2) == parity).collect())
        };
        let mut columns = Vec::new();
        match style {
            BoundaryStyle::Open => {
                for c in 0..cols {
                    if c > 0 {
                        columns.push(bridge(((c - 1) % 2) as i32));
                    }
                    columns.push(chain.clone());
                }
            }
            BoundaryStyle::Closed => {
                for c in 0..cols {
                    columns.push(bridge((c % 2) as i32));
                    columns.push(chain.clone());
                }
                columns.push(bridge((cols % 2) as i32));
            }
        }
        let name = match style {
            BoundaryStyle::Open => format!("kagome({rows},{cols})"),
            BoundaryStyle::Closed => format!("kagome({rows},{cols},closed)"),
        };
        kagome_columns(&name, &columns, 0)
    }
}

pub(crate) fn normalise(edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut pairs: Vec<_> = edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    pairs.sort_unstable();
    pairs
}

/// Occupancy mask on a rectangular grid, numbered row-major over occupied cells.
pub(crate) struct Grid {
    cols: usize,
    rows: usize,
    occupied: Vec<bool>,
}

impl Grid {
    pub(crate) fn new(cols: usize, rows: usize) -> Self {
        Self {
            cols,
            rows,
            occupied: vec![false; cols * rows],
        }
    }

    pub(crate) fn fill(&mut self, keep: impl Fn(usize, usize) -> bool) {
        for y in 0..self.rows {
            for x in 0..self.cols {
                self.occupied[y * self.cols + x] = keep(x, y);
            }
        }
    }

    fn inside(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.cols && (y as usize) < self.rows
    }

    /// Bonds join occupied cells adjacent along a row or column. A site
    /// is boundary when one of its eight surrounding cells lies outside the
    /// shape; interior holes of the Lieb lattice do not count as outside.
    pub(crate) fn into_geometry(self, name: &str) -> Result<Geometry> {
        let mut id = HashMap::new();
        let mut positions = Vec::new();
        for y in 0..self.rows {
            for x in 0..self.cols {
                if self.occupied[y * self.cols + x] {
                    id.insert((x, y), positions.len());
                    positions.push([x as f64, -(y as f64)]);
                }
            }
        }
        let mut pairs = Vec::new();
        for (&(x, y), &i) in &id {
            for (nx, ny) in [(x + 1, y), (x, y + 1)] {
                if let Some(&j) = id.get(&(nx, ny)) {
                    pairs.push((i.min(j), i.max(j)));
                }
            }
        }
        pairs.sort_unstable();
        let in_shape = |x: i64, y: i64| -> bool {
            if !self.inside(x, y) {
                return false;
            }
            let (ux, uy) = (x as usize, y as usize);
            if self.occupied[uy * self.cols + ux] {
                return true;
            }
            // A hole is inside when both its row and column neighbours are occupied.
            let occ =
                |a: i64, b: i64| self.inside(a, b) && self.occupied[b as usize * self.cols + a as usize];
            occ(x - 1, y) && occ(x + 1, y) && occ(x, y - 1) && occ(x, y + 1)
        };
        let mut boundary = vec![false; positions.len()];
        for (&(x, y), &i) in &id {
            let (x, y) = (x as i64, y as i64);
            boundary[i] = (-1..=1)
                .flat_map(|dy| (-1..=1).map(move |dx| (dx, dy)))
                .any(|(dx, dy)| !in_shape(x + dx, y + dy));
        }
        let g = Geometry {
            name: name.to_string(),
            positions,
            pairs,
            boundary,
            label_offset: 0,
        };
        g.check()?;
        Ok(g)
    }
}

/// One column of the kagome strip model. Chain sites sit at integer heights
/// `y` and are bonded vertically; a bridge entry `y` sits between heights `y`
/// and `y + 1` and bonds to those sites in both neighbouring chains.
#[derive(Clone, Debug)]
pub(crate) enum Column {
    Chain(BTreeSet<i32>),
    Bridge(BTreeSet<i32>),
}

impl Column {
    fn ys(&self) -> &BTreeSet<i32> {
        match self {
            Column::Chain(s) | Column::Bridge(s) => s,
        }
    }
}

pub(crate) fn chain_col(lo: i32, hi: i32) -> Column {
    Column::Chain((lo..=hi).collect())
}

pub(crate) fn bridge_col(ys: &[i32]) -> Column {
    Column::Bridge(ys.iter().copied().collect())
}

/// Build a kagome patch from columns. Sites are numbered along a snake:
/// even columns top to bottom, odd columns bottom to top. Boundary sites are
/// the outer columns together with the end sites of every column.
pub(crate) fn kagome_columns(name: &str, columns: &[Column], label_offset: usize) -> Result<Geometry> {
    let dx = 3f64.sqrt() / 2.0;
    let mut id = HashMap::new();
    let mut positions = Vec::new();
    let mut boundary = Vec::new();
    let last = columns.len().saturating_sub(1);
    for (c, col) in columns.iter().enumerate() {
        let ys: Vec<i32> = if c % 2 == 0 {
            col.ys().iter().copied().collect()
        } else {
            col.ys().iter().rev().copied().collect()
        };
        let (lo, hi) = (col.ys().first().copied(), col.ys().last().copied());
        for y in ys {
            id.insert((c, y), positions.len());
            let height = match col {
                Column::Chain(_) => y as f64,
                Column::Bridge(_) => y as f64 + 0.5,
            };
            positions.push([c as f64 * dx, -height]);
            boundary.push(c == 0 || c == last || Some(y) == lo || Some(y) == hi);
        }
    }
    let mut pairs = Vec::new();
    for (c, col) in columns.iter().enumerate() {
        match col {
            Column::Chain(ys) => {
                for &y in ys {
                    if ys.contains(&(y + 1)) {
                        pairs.push((id[&(c, y)], id[&(c, y + 1)]));
                    }
                }
            }
            Column::Bridge(ys) => {
                for &y in ys {
                    let here = id[&(c, y)];
                    for nc in [c.wrapping_sub(1), c + 1] {
                        if let Some(Column::Chain(chain)) = columns.get(nc) {
                            for ny in [y, y + 1] {
                                if chain.contains(&ny) {
                                    let there = id[&(nc, ny)];
                                    pairs.push((here.min(there), here.max(there)));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let pairs = normalise(&pairs);
    let g = Geometry {
        name: name.to_string(),
        positions,
        pairs,
        boundary,
        label_offset,
    };
    g.check()?;
    Ok(g)
}
