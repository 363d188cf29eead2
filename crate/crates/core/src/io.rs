//! JSON instance files: one self-contained problem (ground set, matroids,
//! objective, stream) that the CLI can generate, save, load and solve.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ground::{ElementId, Stream};
use crate::hardgen::{
    matching_partitions, planted_solution, ChainFamilyInstance, CoordinateInstance, HiddenChainInstance,
    RandomInstance, RandomObjective,
};
use crate::matching::LayerGraph;
use crate::matroids::{
    coordinate_matroid, CoordinateSystem, HiddenChainSystem, MatroidRef, PartitionMatroid, UniformMatroid,
};
use crate::num::{format_fraction, parse_fraction, Rational};
use crate::submodular::{Cardinality, ChainFamilyFn, Coverage, Cut, ValueOracle, ValueRef};

pub const SCHEMA_VERSION: u32 = 1;

/// A rational written as `"a/b"` (or `"a"`) in JSON.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fraction(pub Rational);

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_fraction(&self.0))
    }
}

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_fraction(&text).map(Fraction).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Elements {
    /// Coordinate vectors, one per element.
    Vectors { vectors: Vec<Vec<u16>> },
    /// `(layer, edge, copy)` per element, layers and copies 1-based.
    EdgeCopies { labels: Vec<[u32; 3]> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatroidSpec {
    Partition {
        block_of: Vec<u32>,
        capacity: Vec<u32>,
    },
    Uniform {
        rank: usize,
    },
    /// Coordinate `coordinate` (1-based) of the element vectors over alphabet `1..=p`.
    Coordinate {
        p: usize,
        coordinate: usize,
    },
    /// Matroid `index` (1-based) of the hidden-chain system.
    HiddenChain {
        k: usize,
        m: usize,
        index: usize,
        hidden: Vec<ElementId>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub vertices: u32,
    pub edges: Vec<(u32, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObjectiveSpec {
    Cardinality,
    Coverage { covers: Vec<Vec<u32>>, weights: Vec<Fraction> },
    Cut { vertices: usize, edges: Vec<(u32, u32, Fraction)> },
    ChainFamily { layers: Vec<LayerSpec>, copies: u32, eps: Fraction, o: Vec<u32> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub schema_version: u32,
    pub id: String,
    pub family: String,
    pub seed: u64,
    pub ground_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Elements>,
    pub matroids: Vec<MatroidSpec>,
    pub objective: ObjectiveSpec,
    pub monotone: bool,
    pub stream_order: Vec<ElementId>,
    #[serde(default)]
    pub hidden: Vec<ElementId>,
}

impl InstanceFile {
    pub fn from_hidden_chain(inst: &HiddenChainInstance, seed: u64) -> Self {
        let sys = &inst.system;
        let (k, m) = (sys.k(), sys.m());
        InstanceFile {
            schema_version: SCHEMA_VERSION,
            id: format!("hidden_chain-k{k}-m{m}-s{seed}"),
            family: "hidden_chain".into(),
            seed,
            ground_size: sys.ground_size(),
            elements: None,
            matroids: (1..=k)
                .map(|index| MatroidSpec::HiddenChain { k, m, index, hidden: sys.hidden().to_vec() })
                .collect(),
            objective: ObjectiveSpec::Cardinality,
            monotone: true,
            stream_order: inst.stream.order().to_vec(),
            hidden: sys.hidden().to_vec(),
        }
    }

    pub fn from_coordinate(inst: &CoordinateInstance, seed: u64) -> Self {
        InstanceFile {
            schema_version: SCHEMA_VERSION,
            id: format!("coordinate-p{}-m{}-k{}-s{seed}", inst.p, inst.m, inst.k),
            family: "coordinate".into(),
            seed,
            ground_size: inst.ground_size(),
            elements: Some(Elements::Vectors { vectors: inst.layers.iter().flatten().cloned().collect() }),
            matroids: (1..=inst.k).map(|coordinate| MatroidSpec::Coordinate { p: inst.p, coordinate }).collect(),
            objective: ObjectiveSpec::Cardinality,
            monotone: true,
            stream_order: inst.stream().order().to_vec(),
            hidden: inst.hidden().iter().collect(),
        }
    }

    pub fn from_chain_family(inst: &ChainFamilyInstance, seed: u64) -> Self {
        let f = &inst.family;
        let labels = (0..f.ground_size() as ElementId)
            .map(|u| {
                let d = f.decode(u);
                [d.layer as u32, d.edge as u32, d.copy]
            })
            .collect();
        let layers =
            f.layers().iter().map(|g| LayerSpec { vertices: g.vertices(), edges: g.edges().to_vec() }).collect();
        InstanceFile {
            schema_version: SCHEMA_VERSION,
            id: format!("chain_family-p{}-n{}-s{seed}", f.p(), f.copies()),
            family: "chain_family".into(),
            seed,
            ground_size: f.ground_size(),
            elements: Some(Elements::EdgeCopies { labels }),
            matroids: matching_partitions(f).iter().map(partition_spec).collect(),
            objective: ObjectiveSpec::ChainFamily {
                layers,
                copies: f.copies(),
                eps: Fraction(f.eps().clone()),
                o: f.indices().to_vec(),
            },
            monotone: true,
            stream_order: inst.stream.order().to_vec(),
            hidden: planted_solution(f).iter().collect(),
        }
    }

    pub fn from_random(inst: &RandomInstance, seed: u64) -> Self {
        let n = inst.stream.ground_size();
        let (tag, objective) = match &inst.objective {
            RandomObjective::Coverage(c) => (
                "coverage",
                ObjectiveSpec::Coverage {
                    covers: c.covers().to_vec(),
                    weights: c.weights().iter().cloned().map(Fraction).collect(),
                },
            ),
            RandomObjective::Cut(c) => (
                "cut",
                ObjectiveSpec::Cut {
                    vertices: c.ground_size(),
                    edges: c.edges().iter().map(|(a, b, w)| (*a, *b, Fraction(w.clone()))).collect(),
                },
            ),
        };
        InstanceFile {
            schema_version: SCHEMA_VERSION,
            id: format!("random_partition-{tag}-n{n}-k{}-s{seed}", inst.partitions.len()),
            family: "random_partition".into(),
            seed,
            ground_size: n,
            elements: None,
            matroids: inst.partitions.iter().map(partition_spec).collect(),
            monotone: inst.value_oracle().is_monotone(),
            objective,
            stream_order: inst.stream.order().to_vec(),
            hidden: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("instance serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(Error::Format(format!("unsupported schema version {}", file.schema_version)));
        }
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }

    pub fn stream(&self) -> Result<Stream> {
        Stream::new(self.stream_order.clone(), self.ground_size)
    }

    fn vectors(&self) -> Result<&[Vec<u16>]> {
        match &self.elements {
            Some(Elements::Vectors { vectors }) => Ok(vectors),
            _ => Err(Error::Format("coordinate matroid needs element vectors".into())),
        }
    }

    pub fn matroids(&self) -> Result<Vec<MatroidRef>> {
        if self.matroids.is_empty() {
            return Err(Error::NoMatroids);
        }
        let mut out = Vec::with_capacity(self.matroids.len());
        for spec in &self.matroids {
            let m: MatroidRef = match spec {
                MatroidSpec::Partition { block_of, capacity } => {
                    Arc::new(PartitionMatroid::new(block_of.clone(), capacity.clone())?)
                }
                MatroidSpec::Uniform { rank } => {
                    Arc::new(UniformMatroid { ground_size: self.ground_size, rank: *rank })
                }
                MatroidSpec::Coordinate { p, coordinate } => {
                    let vectors = self.vectors()?;
                    let k = vectors.first().map_or(0, Vec::len);
                    let sys = CoordinateSystem::new(*p, k, vectors.to_vec())?;
                    Arc::new(coordinate_matroid(&sys, *coordinate)?)
                }
                MatroidSpec::HiddenChain { k, m, index, hidden } => {
                    Arc::new(HiddenChainSystem::new(*k, *m, hidden.clone())?.matroid(*index)?)
                }
            };
            if m.ground_size() != self.ground_size {
                return Err(Error::GroundMismatch(m.ground_size(), self.ground_size));
            }
            out.push(m);
        }
        Ok(out)
    }

    pub fn objective(&self) -> Result<ValueRef> {
        let f: ValueRef = match &self.objective {
            ObjectiveSpec::Cardinality => Arc::new(Cardinality { ground_size: self.ground_size }),
            ObjectiveSpec::Coverage { covers, weights } => {
                Arc::new(Coverage::new(covers.clone(), weights.iter().map(|w| w.0.clone()).collect())?)
            }
            ObjectiveSpec::Cut { vertices, edges } => {
                Arc::new(Cut::new(*vertices, edges.iter().map(|(a, b, w)| (*a, *b, w.0.clone())).collect())?)
            }
            ObjectiveSpec::ChainFamily { layers, copies, eps, o } => {
                let graphs =
                    layers.iter().map(|l| LayerGraph::new(l.vertices, l.edges.clone())).collect::<Result<Vec<_>>>()?;
                Arc::new(ChainFamilyFn::new(graphs, *copies, eps.0.clone(), o.clone())?)
            }
        };
        if f.ground_size() != self.ground_size {
            return Err(Error::GroundMismatch(f.ground_size(), self.ground_size));
        }
        if f.is_monotone() != self.monotone {
            return Err(Error::Format("monotone flag disagrees with the objective".into()));
        }
        Ok(f)
    }
}

fn partition_spec(m: &PartitionMatroid) -> MatroidSpec {
    MatroidSpec::Partition { block_of: m.block_of().to_vec(), capacity: m.capacity().to_vec() }
}
