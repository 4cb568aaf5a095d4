use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// Tensor product of single-site Paulis; identity on sites not listed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliString {
    ops: BTreeMap<usize, Pauli>,
}

impl PauliString {
    pub fn new(ops: impl IntoIterator<Item = (usize, Pauli)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (site, p) in ops {
            if map.insert(site, p).is_some() {
                return Err(Error::InvalidCircuit(format!(
                    "site {site} repeated in Pauli string"
                )));
            }
        }
        if map.is_empty() {
            return Err(Error::InvalidCircuit("empty Pauli string".into()));
        }
        Ok(Self { ops: map })
    }

    pub fn single(site: usize, p: Pauli) -> Self {
        Self {
            ops: BTreeMap::from([(site, p)]),
        }
    }

    /// Parse whitespace-separated factors such as `"Z0 Z1"` or `"X3 Y4"`.
    pub fn parse(text: &str) -> Result<Self> {
        let factor = |tok: &str| -> Result<(usize, Pauli)> {
            let bad = || Error::InvalidCircuit(format!("bad Pauli factor `{tok}`"));
            let (head, site) = tok.split_at(1);
            let p = match head {
                "X" => Pauli::X,
                "Y" => Pauli::Y,
                "Z" => Pauli::Z,
                _ => return Err(bad()),
            };
            Ok((site.parse().map_err(|_| bad())?, p))
        };
        Self::new(text.split_whitespace().map(factor).collect::<Result<Vec<_>>>()?)
    }

    pub fn ops(&self) -> impl Iterator<Item = (usize, Pauli)> + '_ {
        self.ops.iter().map(|(&s, &p)| (s, p))
    }

    pub fn max_site(&self) -> usize {
        *self.ops.keys().next_back().expect("non-empty")
    }

    /// Bit masks of sites flipped (X or Y) and phased (Z or Y), and the
    /// number of Y factors.
    pub(crate) fn masks(&self) -> (usize, usize, u32) {
        let (mut x, mut z, mut y) = (0, 0, 0);
        for (&s, &p) in &self.ops {
            match p {
                Pauli::X => x |= 1 << s,
                Pauli::Z => z |= 1 << s,
                Pauli::Y => {
                    x |= 1 << s;
                    z |= 1 << s;
                    y += 1;
                }
            }
        }
        (x, z, y)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.ops.iter().map(|(s, p)| format!("{p:?}{s}")).collect();
        f.write_str(&parts.join(" "))
    }
}
