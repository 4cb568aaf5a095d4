//! JSON interchange form of a lattice. Site ids are always 0-based.

use serde::{Deserialize, Serialize};

use super::{AncillaId, AncillaStrategy, Geometry, Lattice, Layer, SiteTag};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeDocument {
    #[serde(default)]
    pub name: Option<String>,
    pub n_sites: usize,
    #[serde(default)]
    pub positions: Option<Vec<[f64; 2]>>,
    /// `[i, j]` or `[i, j, layer, ancilla]`.
    pub edges: Vec<Vec<usize>>,
    #[serde(default)]
    pub tags: Option<Vec<SiteTag>>,
    /// Difference between the lattice's conventional labels and file ids.
    #[serde(default)]
    pub label_offset: usize,
}

impl LatticeDocument {
    pub fn from_lattice(lattice: &Lattice) -> Self {
        Self {
            name: Some(lattice.name().to_string()),
            n_sites: lattice.n_sites(),
            positions: Some(lattice.positions().to_vec()),
            edges: lattice
                .edges()
                .iter()
                .map(|e| vec![e.a, e.b, e.layer.0 as usize, e.ancilla.0 as usize])
                .collect(),
            tags: Some((0..lattice.n_sites()).map(|s| lattice.tag(s)).collect()),
            label_offset: lattice.label_offset(),
        }
    }

    /// Rebuild a lattice. Bonds given without layer and ancilla are coloured
    /// and grouped per bond; fully specified bonds are taken verbatim.
    pub fn into_lattice(self) -> Result<Lattice> {
        let bad = |msg: String| Error::InvalidLattice(msg);
        let pairs: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|e| match e.as_slice() {
                [a, b] | [a, b, _, _] => Ok((*a.min(b), *a.max(b))),
                other => Err(bad(format!("bond entry {other:?} must have 2 or 4 fields"))),
            })
            .collect::<Result<_>>()?;
        let full = self.edges.iter().all(|e| e.len() == 4);
        if !full && self.edges.iter().any(|e| e.len() == 4) {
            return Err(bad("bond entries mix 2- and 4-field forms".into()));
        }
        let mut geometry =
            Geometry::from_edges(self.name.as_deref().unwrap_or("inline"), self.n_sites, &pairs)?;
        geometry.pairs = pairs;
        geometry.label_offset = self.label_offset;
        if let Some(positions) = self.positions {
            if positions.len() != self.n_sites {
                return Err(bad(format!(
                    "{} positions for {} sites",
                    positions.len(),
                    self.n_sites
                )));
            }
            geometry.positions = positions;
        }
        if let Some(tags) = self.tags {
            if tags.len() != self.n_sites {
                return Err(bad(format!("{} tags for {} sites", tags.len(), self.n_sites)));
            }
            geometry.boundary = tags.iter().map(|t| *t == SiteTag::Boundary).collect();
        }
        if !full {
            return geometry.into_lattice(AncillaStrategy::PerEdge);
        }
        geometry.check()?;
        let layers = self.edges.iter().map(|e| Layer(e[2] as u8)).collect();
        let ancillas = self.edges.iter().map(|e| AncillaId(e[3] as u32)).collect();
        Lattice::assemble(geometry, layers, ancillas, None)
    }
}
