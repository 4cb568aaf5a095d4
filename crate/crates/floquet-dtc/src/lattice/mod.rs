//! Lattice graphs: sites, bonds, gate layers, ancilla groups and region tags.
//!
//! A [`Lattice`] is immutable once built. Bonds are stored in cycle order,
//! sorted by `(layer, a, b)` with `a < b`, so iterating [`Lattice::edges`]
//! visits the two-qubit gates exactly as a Floquet cycle applies them.

mod ancilla;
mod builders;
mod coloring;
mod json;
pub mod presets;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use builders::{BoundaryStyle, Geometry};
pub use json::LatticeDocument;
pub use presets::{build_preset, Preset};

/// Gate-layer colour of a bond. Colours 0..4 are drawn red, blue, green, yellow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Layer(pub u8);

/// Identifier of the ancilla qubit whose phase gadget implements a bond.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AncillaId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub layer: Layer,
    pub ancilla: AncillaId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SiteTag {
    Boundary,
    Bulk,
}

/// Coordination number modulo four. `Q4` collects coordination 0, 4, 8, ...
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoordinationClass {
    Q1,
    Q2,
    Q3,
    Q4,
}

impl CoordinationClass {
    pub fn of(coordination: usize) -> Self {
        match coordination % 4 {
            1 => Self::Q1,
            2 => Self::Q2,
            3 => Self::Q3,
            _ => Self::Q4,
        }
    }

    pub fn is_pumped(self) -> bool {
        matches!(self, Self::Q1 | Self::Q3)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AncillaStrategy {
    /// One ancilla per bond.
    PerEdge,
    /// The three bonds of each elementary triangle share an ancilla.
    KagomeTriangles,
    /// The two bonds meeting at each Lieb midpoint share an ancilla.
    LiebMidpoints,
}

impl AncillaStrategy {
    pub fn name(self) -> &'static str {
        match self {
            Self::PerEdge => "per_edge",
            Self::KagomeTriangles => "kagome_triangles",
            Self::LiebMidpoints => "lieb_midpoints",
        }
    }
}

impl fmt::Display for AncillaStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AncillaStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per_edge" => Ok(Self::PerEdge),
            "kagome_triangles" => Ok(Self::KagomeTriangles),
            "lieb_midpoints" => Ok(Self::LiebMidpoints),
            other => Err(Error::config(
                "ancilla",
                format!("unknown strategy `{other}` (per_edge, kagome_triangles, lieb_midpoints)"),
            )),
        }
    }
}

/// A named set of sites over which magnetizations are averaged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub name: String,
    pub sites: Vec<usize>,
}

impl Region {
    pub fn new(name: impl Into<String>, mut sites: Vec<usize>) -> Self {
        sites.sort_unstable();
        sites.dedup();
        Self {
            name: name.into(),
            sites,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Lattice {
    name: String,
    positions: Vec<[f64; 2]>,
    edges: Vec<Edge>,
    boundary: Vec<bool>,
    neighbors: Vec<Vec<usize>>,
    label_offset: usize,
    strategy: Option<AncillaStrategy>,
}

impl Lattice {
    pub(crate) fn assemble(
        geometry: Geometry,
        layers: Vec<Layer>,
        ancillas: Vec<AncillaId>,
        strategy: Option<AncillaStrategy>,
    ) -> Result<Self> {
        let Geometry {
            name,
            positions,
            pairs,
            boundary,
            label_offset,
        } = geometry;
        let n = positions.len();
        let mut edges: Vec<Edge> = pairs
            .iter()
            .zip(layers)
            .zip(ancillas)
            .map(|((&(a, b), layer), ancilla)| Edge { a, b, layer, ancilla })
            .collect();
        edges.sort_by_key(|e| (e.layer, e.a, e.b));
        let mut neighbors = vec![Vec::new(); n];
        for e in &edges {
            neighbors[e.a].push(e.b);
            neighbors[e.b].push(e.a);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        let lattice = Self {
            name,
            positions,
            edges,
            boundary,
            neighbors,
            label_offset,
            strategy,
        };
        lattice.validate()?;
        Ok(lattice)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n_sites();
        if self.boundary.len() != n {
            return Err(Error::InvalidLattice(format!(
                "{} boundary flags for {n} sites",
                self.boundary.len()
            )));
        }
        let mut seen = HashSet::new();
        for e in &self.edges {
            if e.a >= e.b || e.b >= n {
                return Err(Error::InvalidLattice(format!("bad bond ({}, {})", e.a, e.b)));
            }
            if !seen.insert((e.a, e.b)) {
                return Err(Error::InvalidLattice(format!(
                    "duplicate bond ({}, {})",
                    e.a, e.b
                )));
            }
        }
        for (site, list) in self.neighbors.iter().enumerate() {
            let mut layers: Vec<Layer> = self
                .edges
                .iter()
                .filter(|e| e.a == site || e.b == site)
                .map(|e| e.layer)
                .collect();
            layers.sort_unstable();
            if layers.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidLattice(format!(
                    "site {site} has two bonds in one layer"
                )));
            }
            debug_assert_eq!(layers.len(), list.len());
        }
        let mut group_sizes = std::collections::HashMap::new();
        for e in &self.edges {
            *group_sizes.entry(e.ancilla).or_insert(0usize) += 1;
        }
        if let Some((g, size)) = group_sizes.iter().find(|(_, &s)| s > 3) {
            return Err(Error::InvalidLattice(format!(
                "ancilla {} drives {size} bonds (at most 3)",
                g.0
            )));
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_sites(&self) -> usize {
        self.positions.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.positions
    }

    /// Bonds in cycle order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, site: usize) -> &[usize] {
        &self.neighbors[site]
    }

    pub fn coordination(&self, site: usize) -> usize {
        self.neighbors[site].len()
    }

    pub fn coordination_class(&self, site: usize) -> CoordinationClass {
        CoordinationClass::of(self.coordination(site))
    }

    pub fn max_coordination(&self) -> usize {
        self.neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Offset between file ids (always 0-based) and the labels used in the
    /// lattice's conventional labelling (1 for the device-sized patches).
    pub fn label_offset(&self) -> usize {
        self.label_offset
    }

    pub fn ancilla_strategy(&self) -> Option<AncillaStrategy> {
        self.strategy
    }

    pub fn tag(&self, site: usize) -> SiteTag {
        if self.boundary[site] {
            SiteTag::Boundary
        } else {
            SiteTag::Bulk
        }
    }

    pub fn boundary_sites(&self) -> Vec<usize> {
        (0..self.n_sites()).filter(|&s| self.boundary[s]).collect()
    }

    pub fn bulk_sites(&self) -> Vec<usize> {
        (0..self.n_sites()).filter(|&s| !self.boundary[s]).collect()
    }

    /// Sites whose coordination is odd: the qubits that acquire a Z charge
    /// every two periods.
    pub fn charge_pump_set(&self) -> Vec<usize> {
        (0..self.n_sites())
            .filter(|&s| self.coordination_class(s).is_pumped())
            .collect()
    }

    pub fn n_layers(&self) -> usize {
        self.edges
            .iter()
            .map(|e| e.layer.0 as usize + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn n_ancillas(&self) -> usize {
        self.edges
            .iter()
            .map(|e| e.ancilla.0 as usize + 1)
            .max()
            .unwrap_or(0)
    }

    /// Number of bonds driven by each ancilla, indexed by ancilla id.
    pub fn ancilla_usage(&self) -> Vec<usize> {
        let mut usage = vec![0; self.n_ancillas()];
        for e in &self.edges {
            usage[e.ancilla.0 as usize] += 1;
        }
        usage
    }

    /// Resolve a built-in region name: `all`, `boundary`, `bulk`, `pumped`, `unpumped`.
    pub fn region(&self, name: &str) -> Result<Region> {
        let pumped: HashSet<usize> = self.charge_pump_set().into_iter().collect();
        let sites: Vec<usize> = match name {
            "all" => (0..self.n_sites()).collect(),
            "boundary" => self.boundary_sites(),
            "bulk" => self.bulk_sites(),
            "pumped" => pumped.iter().copied().collect(),
            "unpumped" => (0..self.n_sites()).filter(|s| !pumped.contains(s)).collect(),
            _ => return Err(Error::Region(name.to_string())),
        };
        if sites.is_empty() {
            return Err(Error::Region(name.to_string()));
        }
        Ok(Region::new(name, sites))
    }

    /// Check that a caller-supplied region is usable on this lattice.
    pub fn check_region(&self, region: &Region) -> Result<()> {
        if region.sites.is_empty() || region.sites.iter().any(|&s| s >= self.n_sites()) {
            return Err(Error::Region(region.name.clone()));
        }
        Ok(())
    }

    /// Rebuild with a different ancilla grouping; layers and tags are kept.
    pub fn with_ancillas(&self, strategy: AncillaStrategy) -> Result<Self> {
        let geometry = self.geometry();
        let pairs = geometry.pairs.clone();
        let layers = pairs.iter().map(|p| self.layer_of(*p)).collect();
        let ancillas = ancilla::assign(self.n_sites(), &pairs, strategy)?;
        Self::assemble(geometry, layers, ancillas, Some(strategy))
    }

    fn layer_of(&self, pair: (usize, usize)) -> Layer {
        self.edges
            .iter()
            .find(|e| (e.a, e.b) == pair)
            .map(|e| e.layer)
            .expect("pair taken from this lattice")
    }

    /// The bare geometry with bonds sorted by `(a, b)`.
    pub fn geometry(&self) -> Geometry {
        let mut pairs: Vec<(usize, usize)> = self.edges.iter().map(|e| (e.a, e.b)).collect();
        pairs.sort_unstable();
        Geometry {
            name: self.name.clone(),
            positions: self.positions.clone(),
            pairs,
            boundary: self.boundary.clone(),
            label_offset: self.label_offset,
        }
    }

    /// A copy with sites renamed by `perm` (old id `s` becomes `perm[s]`).
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n_sites();
        let mut check = perm.to_vec();
        check.sort_unstable();
        if check != (0..n).collect::<Vec<_>>() {
            return Err(Error::InvalidLattice("relabeling is not a permutation".into()));
        }
        let mut positions = vec![[0.0; 2]; n];
        let mut boundary = vec![false; n];
        for s in 0..n {
            positions[perm[s]] = self.positions[s];
            boundary[perm[s]] = self.boundary[s];
        }
        let pairs = self
            .edges
            .iter()
            .map(|e| {
                let (a, b) = (perm[e.a], perm[e.b]);
                (a.min(b), a.max(b))
            })
            .collect();
        let geometry = Geometry {
            name: self.name.clone(),
            positions,
            pairs,
            boundary,
            label_offset: self.label_offset,
        };
        let layers = self.edges.iter().map(|e| e.layer).collect();
        let ancillas = self.edges.iter().map(|e| e.ancilla).collect();
        Self::assemble(geometry, layers, ancillas, self.strategy)
    }
}

impl Geometry {
    /// Colour the bonds and group them into ancillas.
    pub fn into_lattice(mut self, strategy: AncillaStrategy) -> Result<Lattice> {
        self.check()?;
        self.pairs = builders::normalise(&self.pairs);
        let layers = coloring::color_edges(self.positions.len(), &self.pairs);
        let ancillas = ancilla::assign(self.positions.len(), &self.pairs, strategy)?;
        Lattice::assemble(self, layers, ancillas, Some(strategy))
    }
}

pub use coloring::color_edges;
