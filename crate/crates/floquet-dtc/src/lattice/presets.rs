//! Named lattice presets and the parser for generic builder expressions
//! such as `square(4,4)`, `kagome(5,7,open)` or `lieb(2,2)`.
//!
//! Device-sized patches (`Kagome82`, `Lieb40`, `Kagome53-I`) keep the 1-based
//! site labels of their device layouts through [`Lattice::label_offset`]; all other
//! presets are labelled from 0.

use super::builders::{bridge_col, chain_col, kagome_columns, Grid};
use super::{AncillaStrategy, BoundaryStyle, Geometry, Lattice};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    Kagome82,
    Lieb40,
    Kagome53I,
    Kagome53II,
    Square25,
    Square24,
    Square16,
    Kagome30,
    Kagome29,
    Kagome21,
    Kagome19,
    Lieb21,
    Lieb28,
    Triangular19,
    HeavyHex28,
}

impl Preset {
    pub const ALL: [Preset; 15] = [
        Preset::Kagome82,
        Preset::Lieb40,
        Preset::Kagome53I,
        Preset::Kagome53II,
        Preset::Square25,
        Preset::Square24,
        Preset::Square16,
        Preset::Kagome30,
        Preset::Kagome29,
        Preset::Kagome21,
        Preset::Kagome19,
        Preset::Lieb21,
        Preset::Lieb28,
        Preset::Triangular19,
        Preset::HeavyHex28,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Kagome82 => "Kagome82",
            Preset::Lieb40 => "Lieb40",
            Preset::Kagome53I => "Kagome53-I",
            Preset::Kagome53II => "Kagome53-II",
            Preset::Square25 => "Square25",
            Preset::Square24 => "Square24",
            Preset::Square16 => "Square16",
            Preset::Kagome30 => "Kagome30",
            Preset::Kagome29 => "Kagome29",
            Preset::Kagome21 => "Kagome21",
            Preset::Kagome19 => "Kagome19",
            Preset::Lieb21 => "Lieb21",
            Preset::Lieb28 => "Lieb28",
            Preset::Triangular19 => "Triangular19",
            Preset::HeavyHex28 => "HeavyHex28",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(name))
    }

    pub fn default_strategy(self) -> AncillaStrategy {
        match self {
            Preset::Kagome82
            | Preset::Kagome53I
            | Preset::Kagome53II
            | Preset::Kagome30
            | Preset::Kagome29
            | Preset::Kagome21
            | Preset::Kagome19 => AncillaStrategy::KagomeTriangles,
            Preset::Lieb40 | Preset::Lieb21 | Preset::Lieb28 => AncillaStrategy::LiebMidpoints,
            _ => AncillaStrategy::PerEdge,
        }
    }

    /// Reference boundary labels, in the preset's own numbering.
    pub fn reference_boundary(self) -> Option<&'static [usize]> {
        match self {
            Preset::Kagome82 => Some(&[
                1, 2, 3, 4, 5, 6, 7, 10, 11, 17, 18, 21, 22, 28, 29, 32, 33, 39, 40, 43, 44, 50, 51, 54, 55,
                61, 62, 65, 66, 72, 73, 76, 77, 78, 79, 80, 81, 82,
            ]),
            Preset::Lieb40 => Some(&[
                1, 2, 3, 4, 5, 6, 7, 8, 11, 12, 18, 19, 22, 23, 29, 30, 33, 34, 35, 36, 37, 38, 39, 40,
            ]),
            Preset::Kagome53I => Some(&[
                1, 2, 3, 4, 5, 6, 8, 9, 13, 14, 16, 17, 21, 22, 24, 25, 29, 30, 32, 33, 37, 38, 40, 41, 45,
                46, 48, 49, 50, 51, 52, 53,
            ]),
            Preset::Square25 => Some(&[0, 1, 2, 3, 4, 5, 9, 10, 14, 15, 19, 20, 21, 22, 23, 24]),
            Preset::Kagome30 => Some(&[0, 1, 2, 3, 4, 6, 7, 12, 13, 16, 17, 22, 23, 25, 26, 27, 28, 29]),
            Preset::Lieb21 => Some(&[0, 1, 2, 3, 4, 5, 7, 8, 12, 13, 15, 16, 17, 18, 19, 20]),
            _ => None,
        }
    }

    /// The preset's geometry with boundary tags taken from the reference
    /// list where one exists.
    pub fn geometry(self) -> Result<Geometry> {
        let mut g = self.shape()?;
        if let Some(list) = self.reference_boundary() {
            let offset = g.label_offset;
            g.boundary = vec![false; g.positions.len()];
            for &label in list {
                g.boundary[label - offset] = true;
            }
        }
        Ok(g)
    }

    /// The preset's geometry with boundary tags from the builder's own rule.
    pub fn shape(self) -> Result<Geometry> {
        let mut g = match self {
            Preset::Kagome82 => {
                let odd = [-1, 1, 3, 5];
                let even = [0, 2, 4, 6];
                let mut cols = vec![chain_col(0, 5), bridge_col(&odd)];
                for i in 0..6 {
                    cols.push(chain_col(0, 6));
                    let bridge = if i % 2 == 0 && i < 5 { &even } else { &odd };
                    cols.push(bridge_col(bridge));
                }
                cols.push(chain_col(0, 5));
                with_offset(kagome_columns("", &cols, 0)?, 1)
            }
            Preset::Lieb40 => with_offset(Geometry::lieb(3, 3, BoundaryStyle::Open)?, 1),
            Preset::Kagome53I => with_offset(Geometry::kagome(5, 7, BoundaryStyle::Open)?, 1),
            Preset::Kagome53II => Geometry::kagome(7, 5, BoundaryStyle::Closed)?,
            Preset::Square25 => Geometry::square(4, 4)?,
            Preset::Square16 => Geometry::square(3, 3)?,
            Preset::Square24 => {
                let mut grid = Grid::new(6, 6);
                grid.fill(|x, y| {
                    let ex = x.min(5 - x);
                    let ey = y.min(5 - y);
                    ex + ey >= 2
                });
                grid.into_geometry("")?
            }
            Preset::Kagome30 => kagome_columns(
                "",
                &[
                    chain_col(1, 4),
                    bridge_col(&[0, 2, 4]),
                    chain_col(0, 5),
                    bridge_col(&[-1, 1, 3, 5]),
                    chain_col(0, 5),
                    bridge_col(&[0, 2, 4]),
                    chain_col(1, 4),
                ],
                0,
            )?,
            Preset::Kagome29 => kagome_columns(
                "",
                &[
                    bridge_col(&[3, 5]),
                    chain_col(2, 7),
                    bridge_col(&[2, 4, 6]),
                    chain_col(2, 8),
                    bridge_col(&[3, 5, 7]),
                    chain_col(3, 8),
                    bridge_col(&[4, 6]),
                ],
                0,
            )?,
            Preset::Kagome21 => kagome_columns(
                "",
                &[
                    chain_col(2, 6),
                    bridge_col(&[1, 3, 5]),
                    chain_col(1, 5),
                    bridge_col(&[0, 2, 4]),
                    chain_col(0, 4),
                ],
                0,
            )?,
            Preset::Kagome19 => kagome_columns(
                "",
                &[
                    bridge_col(&[1]),
                    chain_col(0, 3),
                    bridge_col(&[0, 2]),
                    chain_col(0, 4),
                    bridge_col(&[1, 3]),
                    chain_col(1, 4),
                    bridge_col(&[2]),
                ],
                0,
            )?,
            Preset::Lieb21 => Geometry::lieb(2, 2, BoundaryStyle::Open)?,
            Preset::Lieb28 => Geometry::lieb(3, 3, BoundaryStyle::Closed)?,
            Preset::Triangular19 => triangular_hexagon(2)?,
            Preset::HeavyHex28 => heavy_hex_28()?,
        };
        g.name = self.name().to_string();
        Ok(g)
    }

    pub fn build(self) -> Result<Lattice> {
        self.geometry()?.into_lattice(self.default_strategy())
    }
}

fn with_offset(mut g: Geometry, offset: usize) -> Geometry {
    g.label_offset = offset;
    g
}

/// Hexagonal flake of the triangular lattice with `radius` rings.
fn triangular_hexagon(radius: i32) -> Result<Geometry> {
    let mut cells = Vec::new();
    for r in -radius..=radius {
        for q in -radius..=radius {
            if (q + r).abs() <= radius {
                cells.push((q, r));
            }
        }
    }
    let index = |q: i32, r: i32| cells.iter().position(|&c| c == (q, r));
    let mut edges = Vec::new();
    for (i, &(q, r)) in cells.iter().enumerate() {
        for (dq, dr) in [(1, 0), (0, 1), (-1, 1)] {
            if let Some(j) = index(q + dq, r + dr) {
                edges.push((i, j));
            }
        }
    }
    let mut g = Geometry::from_edges("", cells.len(), &edges)?;
    g.positions = cells
        .iter()
        .map(|&(q, r)| [q as f64 + 0.5 * r as f64, -(r as f64) * 3f64.sqrt() / 2.0])
        .collect();
    Ok(g)
}

/// Three heavy-hex plaquettes around a shared vertex: a top row of five
/// sites, two rows of nine, joined by vertical bridge sites.
fn heavy_hex_28() -> Result<Geometry> {
    let mut positions = Vec::new();
    let mut edges = Vec::new();
    let row = |xs: std::ops::RangeInclusive<i32>, y: f64, positions: &mut Vec<[f64; 2]>| {
        let start = positions.len();
        for x in xs {
            positions.push([x as f64, y]);
        }
        start
    };
    let top = row(2..=6, 4.0, &mut positions);
    for i in 0..4 {
        edges.push((top + i, top + i + 1));
    }
    let upper_bridges = positions.len();
    positions.push([2.0, 3.0]);
    positions.push([6.0, 3.0]);
    let middle = row(0..=8, 2.0, &mut positions);
    for i in 0..8 {
        edges.push((middle + i, middle + i + 1));
    }
    let lower_bridges = positions.len();
    for x in [0.0, 4.0, 8.0] {
        positions.push([x, 1.0]);
    }
    let bottom = row(0..=8, 0.0, &mut positions);
    for i in 0..8 {
        edges.push((bottom + i, bottom + i + 1));
    }
    edges.push((top, upper_bridges));
    edges.push((upper_bridges, middle + 2));
    edges.push((top + 4, upper_bridges + 1));
    edges.push((upper_bridges + 1, middle + 6));
    for (k, x) in [0, 4, 8].into_iter().enumerate() {
        edges.push((middle + x, lower_bridges + k));
        edges.push((lower_bridges + k, bottom + x));
    }
    let mut g = Geometry::from_edges("", positions.len(), &edges)?;
    g.positions = positions;
    Ok(g)
}

/// Build a preset by name, or a generic builder expression:
/// `square(w,h)`, `kagome(rows,cols[,open|closed])`, `lieb(w,h[,open|closed])`,
/// `chain(n)`, `cycle(n)`, `star(leaves)`.
pub fn build_preset(name: &str) -> Result<Lattice> {
    if let Some(p) = Preset::from_name(name) {
        return p.build();
    }
    if let Some(g) = parse_builder(name)? {
        return g.into_lattice(AncillaStrategy::PerEdge);
    }
    let mut valid: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
    valid.extend(["square(w,h)", "kagome(rows,cols,style)", "lieb(w,h,style)"]);
    Err(Error::UnknownPreset {
        name: name.to_string(),
        valid: valid.join(", "),
    })
}

fn parse_builder(expr: &str) -> Result<Option<Geometry>> {
    let expr = expr.trim();
    let Some((head, rest)) = expr.split_once('(') else {
        return Ok(None);
    };
    let Some(args) = rest.strip_suffix(')') else {
        return Ok(None);
    };
    let args: Vec<&str> = args.split(',').map(str::trim).collect();
    let num = |i: usize| -> Result<usize> {
        args.get(i)
            .and_then(|a| a.parse().ok())
            .ok_or_else(|| Error::config("lattice", format!("`{expr}`: argument {} must be a count", i + 1)))
    };
    let style =
        |i: usize| -> Result<BoundaryStyle> { args.get(i).map_or(Ok(BoundaryStyle::Open), |s| s.parse()) };
    let g = match head.trim() {
        "square" => Geometry::square(num(0)?, num(1)?)?,
        "kagome" => Geometry::kagome(num(0)?, num(1)?, style(2)?)?,
        "lieb" => Geometry::lieb(num(0)?, num(1)?, style(2)?)?,
        "chain" => Geometry::chain(num(0)?)?,
        "cycle" => Geometry::cycle(num(0)?)?,
        "star" => Geometry::star(num(0)?)?,
        _ => return Ok(None),
    };
    Ok(Some(g))
}
