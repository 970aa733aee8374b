//! JSON file formats shared by the command line tool.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::element_set::ElementSet;
use crate::error::{Error, Result};
use crate::explicit::{SolutionList, SolutionListFile};
use crate::flow::relevant_arcs;
use crate::graph::{bfs_path, enumerate_st_paths, Digraph, StPair, WeightedGroundSet};
use crate::instances::{GeneratedInstance, InstanceMeta};
use crate::linalg;
use crate::linear::AffineBasis;
use crate::matroid::BuiltinMatroid;
use crate::polymatroid::{BudgetAdditive, Coverage, MatroidRank, Polymatroid, TablePolymatroid};
use crate::rational::{self, Rational, RawRational};
use crate::tolls::{CostOracle, LinearCost, SeparableQuadratic};

/// `{"nodes", "arcs", "s", "t", "weights"?, "meta"?}`; arc ids follow the
/// order of `arcs`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub nodes: usize,
    pub arcs: Vec<(usize, usize)>,
    pub s: usize,
    pub t: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<RawRational>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<InstanceMeta>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub graph: Digraph,
    pub st: StPair,
    pub weights: WeightedGroundSet,
    pub meta: InstanceMeta,
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<Instance> {
        let graph = Digraph::new(self.nodes, self.arcs)?;
        let st = StPair::new(&graph, self.s, self.t)?;
        let weights = match self.weights {
            None => WeightedGroundSet::unit(graph.arc_count()),
            Some(raw) => {
                let w =
                    WeightedGroundSet::new(raw.into_iter().map(RawRational::into_rational).collect::<Result<_>>()?)?;
                w.expect_size(graph.arc_count())?;
                w
            }
        };
        Ok(Instance {
            graph,
            st,
            weights,
            meta: self.meta.unwrap_or_default(),
        })
    }
}

impl From<&GeneratedInstance> for InstanceFile {
    fn from(g: &GeneratedInstance) -> Self {
        InstanceFile {
            nodes: g.graph.node_count(),
            arcs: g.graph.arcs().to_vec(),
            s: g.st.source,
            t: g.st.sink,
            weights: None,
            meta: Some(g.meta.clone()),
        }
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    from_json::<InstanceFile>(text)?.into_instance()
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidParams(format!("malformed JSON: {e}")))
}

/// Resolves `"e1,e2,3,B"` against the instance metadata: each token is a
/// named arc, a named arc set or a numeric id. The result is sorted.
pub fn resolve_arc_set(text: &str, meta: &InstanceMeta, arc_count: usize) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for token in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if let Some(&a) = meta.named_arcs.get(token) {
            out.push(a);
        } else if let Some(set) = meta.arc_sets.get(token) {
            out.extend_from_slice(set);
        } else if let Ok(a) = token.parse::<usize>() {
            out.push(a);
        } else {
            return Err(Error::InvalidParams(format!("unknown arc name {token:?}")));
        }
    }
    out.sort_unstable();
    out.dedup();
    if let Some(&a) = out.iter().find(|&&a| a >= arc_count) {
        return Err(Error::InvalidArc { arc: a, arc_count });
    }
    Ok(out)
}

/// A set given as a JSON array of ids or as `{"S": [...]}`.
pub fn parse_set_json(text: &str) -> Result<Vec<usize>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum SetFile {
        Plain(Vec<usize>),
        Wrapped {
            #[serde(rename = "S")]
            set: Vec<usize>,
        },
    }
    let mut v = match from_json::<SetFile>(text)? {
        SetFile::Plain(v) | SetFile::Wrapped { set: v } => v,
    };
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

/// Weights given as a JSON array or as `{"weights": [...]}`.
pub fn parse_weights(text: &str) -> Result<WeightedGroundSet> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum WeightFile {
        Plain(Vec<RawRational>),
        Wrapped { weights: Vec<RawRational> },
    }
    let raw = match from_json::<WeightFile>(text)? {
        WeightFile::Plain(v) | WeightFile::Wrapped { weights: v } => v,
    };
    WeightedGroundSet::new(raw.into_iter().map(RawRational::into_rational).collect::<Result<_>>()?)
}

/// A comma separated list of rationals, or a bit string such as `0110`.
pub fn parse_point(text: &str) -> Result<Vec<Rational>> {
    let text = text.trim();
    if !text.contains(',') && text.len() > 1 && text.chars().all(|c| c == '0' || c == '1') {
        return Ok(text.chars().map(|c| rational::int(i64::from(c == '1'))).collect());
    }
    text.split(',').map(|t| rational::parse(t.trim())).collect()
}

pub fn point_to_bits(point: &[Rational]) -> Result<Vec<bool>> {
    point
        .iter()
        .map(|v| {
            if *v == rational::int(0) {
                Ok(false)
            } else if *v == rational::int(1) {
                Ok(true)
            } else {
                Err(Error::InvalidParams("target must be a 0/1 vector".into()))
            }
        })
        .collect()
}

pub fn parse_solutions(text: &str) -> Result<SolutionList> {
    SolutionList::from_file(&from_json::<SolutionListFile>(text)?)
}

pub fn parse_basis(text: &str) -> Result<AffineBasis> {
    from_json(text)
}

/// Incidence vectors of the simple `s`-`t` paths of an instance.
pub fn path_solutions(inst: &Instance, max_paths: usize) -> Result<SolutionList> {
    let m = inst.graph.arc_count();
    let paths = enumerate_st_paths(&inst.graph, inst.st, max_paths)?;
    if paths.is_empty() {
        return Err(Error::NoStPath);
    }
    SolutionList::new(
        m,
        paths
            .iter()
            .map(|p| {
                let mut v = vec![false; m];
                for &a in p {
                    v[a] = true;
                }
                v
            })
            .collect(),
    )
}

/// An affine basis of the unit flow polytope: one s-t path plus that path
/// moved along each basis vector of the circulations on the relevant arcs.
pub fn flow_basis(inst: &Instance) -> Result<AffineBasis> {
    let g = &inst.graph;
    let relevant = relevant_arcs(g, inst.st)?;
    let path = bfs_path(g, inst.st.source, inst.st.sink, |_| true).ok_or(Error::NoStPath)?;
    let zero = rational::int(0);
    let one = rational::int(1);
    let incidence: Vec<Vec<Rational>> = (0..g.node_count())
        .map(|v| {
            relevant
                .iter()
                .map(|&a| {
                    if g.tail(a) == v {
                        one.clone()
                    } else if g.head(a) == v {
                        -one.clone()
                    } else {
                        zero.clone()
                    }
                })
                .collect()
        })
        .collect();
    let mut base = vec![zero.clone(); g.arc_count()];
    for a in path {
        base[a] = one.clone();
    }
    let mut points = vec![base.clone()];
    for v in linalg::null_space(&incidence, relevant.len()) {
        let mut p = base.clone();
        for (&a, d) in relevant.iter().zip(v) {
            p[a] += d;
        }
        points.push(p);
    }
    AffineBasis::new(points)
}

/// `{"kind": "graphic", ...}` or an instance/graph file whose arcs become
/// the edges of a graphic matroid.
pub fn parse_matroid(text: &str) -> Result<BuiltinMatroid> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum MatroidFile {
        Builtin(BuiltinMatroid),
        Arcs { nodes: usize, arcs: Vec<(usize, usize)> },
        Edges { nodes: usize, edges: Vec<(usize, usize)> },
    }
    match from_json::<MatroidFile>(text)? {
        MatroidFile::Builtin(m) => match m {
            BuiltinMatroid::Uniform { k, n } => BuiltinMatroid::uniform(k, n),
            BuiltinMatroid::Graphic { nodes, edges } => BuiltinMatroid::graphic(nodes, edges),
            BuiltinMatroid::Partition { blocks, capacities } => BuiltinMatroid::partition(blocks, capacities),
            BuiltinMatroid::Free { n } => BuiltinMatroid::free(n),
        },
        MatroidFile::Arcs { nodes, arcs: edges } | MatroidFile::Edges { nodes, edges } => {
            BuiltinMatroid::graphic(nodes, edges)
        }
    }
}

/// Polymatroid description. Tables map a subset key (`""`, `"0"`, `"0,2"`,
/// ...) to `f` of that subset and must list every subset.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PolymatroidFile {
    Table {
        n: usize,
        subsets: BTreeMap<String, RawRational>,
    },
    MatroidRank {
        matroid: serde_json::Value,
    },
    Coverage {
        covers: Vec<Vec<usize>>,
        #[serde(with = "rational::serde_rational_vec")]
        item_weights: Vec<Rational>,
    },
    BudgetAdditive {
        #[serde(with = "rational::serde_rational")]
        budget: Rational,
        #[serde(with = "rational::serde_rational_vec")]
        a: Vec<Rational>,
    },
}

pub const MAX_TABLE_ELEMENTS: usize = 12;

pub fn parse_polymatroid(text: &str) -> Result<Box<dyn Polymatroid>> {
    Ok(match from_json::<PolymatroidFile>(text)? {
        PolymatroidFile::Table { n, subsets } => {
            if n > MAX_TABLE_ELEMENTS {
                return Err(Error::EnumerationExplosion {
                    size: n,
                    cap: MAX_TABLE_ELEMENTS,
                });
            }
            let mut values: Vec<Option<Rational>> = vec![None; 1 << n];
            for (key, v) in subsets {
                let mask = parse_subset_key(&key, n)?;
                values[mask.0 as usize] = Some(v.into_rational()?);
            }
            let values = values
                .into_iter()
                .enumerate()
                .map(|(mask, v)| {
                    v.ok_or_else(|| {
                        Error::InvalidParams(format!("table misses subset {:?}", ElementSet(mask as u64).to_vec()))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Box::new(TablePolymatroid::new(n, values)?)
        }
        PolymatroidFile::MatroidRank { matroid } => Box::new(MatroidRank(parse_matroid(&matroid.to_string())?)),
        PolymatroidFile::Coverage { covers, item_weights } => Box::new(Coverage::new(covers, item_weights)?),
        PolymatroidFile::BudgetAdditive { budget, a } => Box::new(BudgetAdditive::new(budget, a)?),
    })
}

fn parse_subset_key(key: &str, n: usize) -> Result<ElementSet> {
    let mut set = ElementSet::default();
    for token in key.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let e: usize = token
            .parse()
            .map_err(|_| Error::InvalidParams(format!("bad subset key {key:?}")))?;
        if e >= n {
            return Err(Error::InvalidElement { element: e, size: n });
        }
        set.insert(e);
    }
    Ok(set)
}

/// `{"kind": "linear", "c": [...]}` or
/// `{"kind": "quadratic", "a": [...], "b": [...]}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CostFile {
    Linear {
        #[serde(with = "rational::serde_rational_vec")]
        c: Vec<Rational>,
    },
    Quadratic {
        #[serde(with = "rational::serde_rational_vec")]
        a: Vec<Rational>,
        #[serde(default, with = "rational::serde_rational_vec")]
        b: Vec<Rational>,
    },
}

pub fn parse_cost(text: &str) -> Result<Box<dyn CostOracle>> {
    Ok(match from_json::<CostFile>(text)? {
        CostFile::Linear { c } => Box::new(LinearCost(c)),
        CostFile::Quadratic { a, mut b } => {
            if b.is_empty() {
                b = vec![rational::int(0); a.len()];
            }
            Box::new(SeparableQuadratic::new(a, b)?)
        }
    })
}
