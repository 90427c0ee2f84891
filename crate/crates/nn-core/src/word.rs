//! Repetition-compressed layer words: sequences whose elements are either a
//! single layer (an atom) or a group of elements repeated k times. Loop
//! constructions compile to one group per loop with the loop's repetition
//! count, so the word stays small while the flat layer sequence it denotes
//! can be astronomically long.

use crate::layer::Layer;
use crate::NnError;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub enum RcNode {
    Atom(Arc<Layer>),
    Group { body: Vec<RcNode>, repeat: u64 },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RcWord {
    pub nodes: Vec<RcNode>,
}

/// Flattened layer count above which [`RcWord::flatten`] refuses to
/// materialize.
pub const FLATTEN_LIMIT: u128 = 100_000_000;

impl RcWord {
    pub fn atom(layer: Arc<Layer>) -> RcNode {
        RcNode::Atom(layer)
    }

    /// Number of layers the word denotes after expanding every group.
    pub fn layer_count(&self) -> u128 {
        fn count(nodes: &[RcNode]) -> u128 {
            nodes
                .iter()
                .map(|n| match n {
                    RcNode::Atom(_) => 1,
                    RcNode::Group { body, repeat } => count(body) * *repeat as u128,
                })
                .sum()
        }
        count(&self.nodes)
    }

    /// Number of groups, at every nesting level.
    pub fn group_count(&self) -> usize {
        fn count(nodes: &[RcNode]) -> usize {
            nodes
                .iter()
                .map(|n| match n {
                    RcNode::Atom(_) => 0,
                    RcNode::Group { body, .. } => 1 + count(body),
                })
                .sum()
        }
        count(&self.nodes)
    }

    /// Number of atom occurrences written in the word (repetition not
    /// expanded).
    pub fn atom_count(&self) -> usize {
        fn count(nodes: &[RcNode]) -> usize {
            nodes
                .iter()
                .map(|n| match n {
                    RcNode::Atom(_) => 1,
                    RcNode::Group { body, .. } => count(body),
                })
                .sum()
        }
        count(&self.nodes)
    }

    /// Number of structurally distinct layers among the word's atoms.
    pub fn distinct_atom_count(&self) -> usize {
        let mut seen: HashSet<&Layer> = HashSet::new();
        fn walk<'a>(nodes: &'a [RcNode], seen: &mut HashSet<&'a Layer>) {
            for n in nodes {
                match n {
                    RcNode::Atom(layer) => {
                        seen.insert(layer.as_ref());
                    }
                    RcNode::Group { body, .. } => walk(body, seen),
                }
            }
        }
        walk(&self.nodes, &mut seen);
        seen.len()
    }

    /// Expand every group into the flat layer sequence it denotes. Layers
    /// are shared, so the result costs one pointer per flattened position.
    pub fn flatten(&self) -> Result<Vec<Arc<Layer>>, NnError> {
        let total = self.layer_count();
        if total > FLATTEN_LIMIT {
            return Err(NnError::TooManyLayers(total));
        }
        let mut out = Vec::with_capacity(total as usize);
        fn walk(nodes: &[RcNode], out: &mut Vec<Arc<Layer>>) {
            for n in nodes {
                match n {
                    RcNode::Atom(layer) => out.push(Arc::clone(layer)),
                    RcNode::Group { body, repeat } => {
                        for _ in 0..*repeat {
                            walk(body, out);
                        }
                    }
                }
            }
        }
        walk(&self.nodes, &mut out);
        Ok(out)
    }

    /// Visit every denoted layer in order. Groups re-visit their shared
    /// bodies, so the touched layer set stays small and hot.
    pub fn for_each_layer<E>(
        &self,
        f: &mut impl FnMut(&Arc<Layer>) -> Result<(), E>,
    ) -> Result<(), E> {
        fn walk<E>(
            nodes: &[RcNode],
            f: &mut impl FnMut(&Arc<Layer>) -> Result<(), E>,
        ) -> Result<(), E> {
            for n in nodes {
                match n {
                    RcNode::Atom(layer) => f(layer)?,
                    RcNode::Group { body, repeat } => {
                        for _ in 0..*repeat {
                            walk(body, f)?;
                        }
                    }
                }
            }
            Ok(())
        }
        walk(&self.nodes, f)
    }

    /// Rebuild the word with every atom transformed by `f`. Atoms that share
    /// a layer keep sharing the transformed layer.
    pub fn map_atoms(&self, f: &mut impl FnMut(&Layer) -> Layer) -> RcWord {
        let mut cache: HashMap<*const Layer, Arc<Layer>> = HashMap::new();
        fn walk(
            nodes: &[RcNode],
            cache: &mut HashMap<*const Layer, Arc<Layer>>,
            f: &mut impl FnMut(&Layer) -> Layer,
        ) -> Vec<RcNode> {
            nodes
                .iter()
                .map(|n| match n {
                    RcNode::Atom(layer) => {
                        let key = Arc::as_ptr(layer);
                        let mapped = cache
                            .entry(key)
                            .or_insert_with(|| Arc::new(f(layer)))
                            .clone();
                        RcNode::Atom(mapped)
                    }
                    RcNode::Group { body, repeat } => RcNode::Group {
                        body: walk(body, cache, f),
                        repeat: *repeat,
                    },
                })
                .collect()
        }
        RcWord {
            nodes: walk(&self.nodes, &mut cache, f),
        }
    }

    /// Input width of the first denoted layer.
    pub fn first_in_width(&self) -> Option<usize> {
        fn first(nodes: &[RcNode]) -> Option<usize> {
            for n in nodes {
                match n {
                    RcNode::Atom(layer) => return Some(layer.in_width()),
                    RcNode::Group { body, repeat } => {
                        if *repeat > 0 {
                            if let Some(w) = first(body) {
                                return Some(w);
                            }
                        }
                    }
                }
            }
            None
        }
        first(&self.nodes)
    }

    /// Output width of the last denoted layer.
    pub fn last_out_width(&self) -> Option<usize> {
        fn last(nodes: &[RcNode]) -> Option<usize> {
            for n in nodes.iter().rev() {
                match n {
                    RcNode::Atom(layer) => return Some(layer.out_width()),
                    RcNode::Group { body, repeat } => {
                        if *repeat > 0 {
                            if let Some(w) = last(body) {
                                return Some(w);
                            }
                        }
                    }
                }
            }
            None
        }
        last(&self.nodes)
    }
}

/// Debug rendering: atoms as `atom#k` indexed by first occurrence, groups as
/// `( ... )^{n}`.
impl fmt::Display for RcWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut ids: Vec<*const Layer> = Vec::new();
        fn walk(
            nodes: &[RcNode],
            ids: &mut Vec<*const Layer>,
            f: &mut fmt::Formatter<'_>,
        ) -> fmt::Result {
            let mut first = true;
            for n in nodes {
                if !first {
                    write!(f, " ")?;
                }
                first = false;
                match n {
                    RcNode::Atom(layer) => {
                        let key = Arc::as_ptr(layer);
                        let id = match ids.iter().position(|p| *p == key) {
                            Some(i) => i,
                            None => {
                                ids.push(key);
                                ids.len() - 1
                            }
                        };
                        write!(f, "atom#{id}")?;
                    }
                    RcNode::Group { body, repeat } => {
                        write!(f, "( ")?;
                        walk(body, ids, f)?;
                        write!(f, " )^{{{repeat}}}")?;
                    }
                }
            }
            Ok(())
        }
        walk(&self.nodes, &mut ids, f)
    }
}
