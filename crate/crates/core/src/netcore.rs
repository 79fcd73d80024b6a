// SPDX-License-Identifier: Apache-2.0

//! Weighted directed layers stored as dense adjacency matrices, and the
//! constructions over stacks of them: degrees, strongly connected
//! components, union and intersection networks, node restriction.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::math;
use crate::{Error, Result};

/// One network layer: node labels and a weighted adjacency matrix where
/// `weights[(i, j)]` is the weight of the arc `i → j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerGraph {
    name: String,
    labels: Vec<String>,
    weights: Matrix,
    directed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeMode {
    In,
    Out,
    /// Distinct neighbours in either direction.
    Total,
}

impl LayerGraph {
    /// Validated constructor: square, finite, nonnegative, loop-free and
    /// symmetric when `directed` is false.
    pub fn new(name: impl Into<String>, labels: Vec<String>, weights: Matrix, directed: bool) -> Result<Self> {
        let g = Self::with_loops(name, labels, weights, directed)?;
        for i in 0..g.len() {
            let w = g.weights[(i, i)];
            if w != 0.0 {
                return Err(Error::SelfLoop { node: i, value: w });
            }
        }
        Ok(g)
    }

    /// Like [`LayerGraph::new`] but tolerates a nonzero diagonal. Raw inputs
    /// go through this before the diagonal is cleared during assembly.
    pub fn with_loops(name: impl Into<String>, labels: Vec<String>, weights: Matrix, directed: bool) -> Result<Self> {
        let n = labels.len();
        if weights.rows() != n || weights.cols() != n {
            return Err(Error::ShapeMismatch {
                rows: weights.rows(),
                cols: weights.cols(),
                labels: n,
            });
        }
        for i in 0..n {
            for j in 0..n {
                let w = weights[(i, j)];
                if !w.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                if w < 0.0 {
                    return Err(Error::NegativeWeight {
                        row: i,
                        col: j,
                        value: w,
                    });
                }
            }
        }
        if !directed {
            if let Some((row, col, _)) = weights.asymmetry() {
                return Err(Error::NotSymmetric { row, col });
            }
        }
        Ok(Self {
            name: name.into(),
            labels,
            weights,
            directed,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn has_loops(&self) -> bool {
        (0..self.len()).any(|i| self.weights[(i, i)] != 0.0)
    }

    /// Number of arcs (off-diagonal nonzeros); undirected edges count once.
    pub fn edge_count(&self) -> usize {
        let n = self.len();
        let mut count = 0;
        for i in 0..n {
            for j in 0..n {
                if i != j && self.weights[(i, j)] != 0.0 && (self.directed || i < j) {
                    count += 1;
                }
            }
        }
        count
    }

    /// Degree of `node`, counting nonzero off-diagonal entries.
    pub fn degree(&self, node: usize, mode: DegreeMode) -> Result<usize> {
        let n = self.len();
        if node >= n {
            return Err(Error::IndexOutOfRange { index: node, len: n });
        }
        let w = &self.weights;
        let count = (0..n)
            .filter(|&j| j != node)
            .filter(|&j| match mode {
                DegreeMode::Out => w[(node, j)] != 0.0,
                DegreeMode::In => w[(j, node)] != 0.0,
                DegreeMode::Total => w[(node, j)] != 0.0 || w[(j, node)] != 0.0,
            })
            .count();
        Ok(count)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Same layer with the diagonal set to zero; also returns how many
    /// nonzero diagonal entries were cleared.
    pub fn zero_diagonal(&self) -> (Self, usize) {
        let mut w = self.weights.clone();
        let mut cleared = 0;
        for i in 0..self.len() {
            if w[(i, i)] != 0.0 {
                w[(i, i)] = 0.0;
                cleared += 1;
            }
        }
        let g = Self {
            name: self.name.clone(),
            labels: self.labels.clone(),
            weights: w,
            directed: self.directed,
        };
        (g, cleared)
    }

    /// Same layer with every weight divided by `s` (`s > 0`).
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            name: self.name.clone(),
            labels: self.labels.clone(),
            weights: self.weights.scaled(1.0 / s),
            directed: self.directed,
        }
    }

    /// Layer with identical structure but nodes re-indexed by `perm`:
    /// new node `a` is old node `perm[a]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.len())?;
        let labels = perm.iter().map(|&p| self.labels[p].clone()).collect();
        let weights = Matrix::from_fn(perm.len(), perm.len(), |a, b| self.weights[(perm[a], perm[b])]);
        Ok(Self {
            name: self.name.clone(),
            labels,
            weights,
            directed: self.directed,
        })
    }

    /// Strongly connected components; for undirected layers these are the
    /// connected components.
    pub fn strongly_connected_components(&self) -> SccPartition {
        let n = self.len();
        let adj: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).filter(|&j| j != i && self.weights[(i, j)] != 0.0).collect())
            .collect();
        SccPartition::from_adjacency(&adj)
    }

    fn binarized(&self) -> Matrix {
        let n = self.len();
        Matrix::from_fn(n, n, |i, j| {
            if i != j && self.weights[(i, j)] != 0.0 {
                1.0
            } else {
                0.0
            }
        })
    }
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: perm.len(),
        });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidInput(String::from("not a permutation")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Partition of the nodes into maximal strongly connected components.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SccPartition {
    /// Component id of each node; ids index into `components`.
    pub component_of: Vec<usize>,
    /// Components by descending size, ties broken by smallest member. Each
    /// component lists its nodes in ascending order.
    pub components: Vec<Vec<usize>>,
}

impl SccPartition {
    /// Iterative Tarjan over an adjacency list.
    pub fn from_adjacency(adj: &[Vec<usize>]) -> Self {
        const UNVISITED: usize = usize::MAX;
        let n = adj.len();
        let mut index = vec![UNVISITED; n];
        let mut lowlink = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack: Vec<usize> = Vec::new();
        let mut next_index = 0usize;
        let mut raw: Vec<Vec<usize>> = Vec::new();
        // (node, position in its adjacency list)
        let mut call: Vec<(usize, usize)> = Vec::new();

        for root in 0..n {
            if index[root] != UNVISITED {
                continue;
            }
            call.push((root, 0));
            while let Some(&(v, pos)) = call.last() {
                if pos == 0 && index[v] == UNVISITED {
                    index[v] = next_index;
                    lowlink[v] = next_index;
                    next_index += 1;
                    stack.push(v);
                    on_stack[v] = true;
                }
                if let Some(&w) = adj[v].get(pos) {
                    if let Some(top) = call.last_mut() {
                        top.1 += 1;
                    }
                    if index[w] == UNVISITED {
                        call.push((w, 0));
                    } else if on_stack[w] {
                        lowlink[v] = lowlink[v].min(index[w]);
                    }
                    continue;
                }
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    lowlink[parent] = lowlink[parent].min(lowlink[v]);
                }
                if lowlink[v] == index[v] {
                    let mut comp = Vec::new();
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    raw.push(comp);
                }
            }
        }

        raw.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        let mut component_of = vec![0; n];
        for (id, comp) in raw.iter().enumerate() {
            for &v in comp {
                component_of[v] = id;
            }
        }
        Self {
            component_of,
            components: raw,
        }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn largest(&self) -> Option<&[usize]> {
        self.components.first().map(Vec::as_slice)
    }

    pub fn same_component(&self, a: usize, b: usize) -> bool {
        self.component_of[a] == self.component_of[b]
    }
}

/// Ordered stack of layers over one shared node set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiNet {
    labels: Vec<String>,
    layers: Vec<LayerGraph>,
}

impl MultiNet {
    pub fn new(layers: Vec<LayerGraph>) -> Result<Self> {
        let first = layers.first().ok_or(Error::EmptyLayers)?;
        let labels = first.labels.clone();
        for l in &layers[1..] {
            if l.labels != labels {
                return Err(Error::LabelMismatch { layer: l.name.clone() });
            }
        }
        Ok(Self { labels, layers })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn layers(&self) -> &[LayerGraph] {
        &self.layers
    }

    pub fn into_layers(self) -> Vec<LayerGraph> {
        self.layers
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    fn any_directed(&self) -> bool {
        self.layers.iter().any(|l| l.directed)
    }

    /// Binary layer with an arc wherever every layer has one.
    pub fn intersection_network(&self) -> LayerGraph {
        let n = self.node_count();
        let mut acc = self.layers[0].binarized();
        for l in &self.layers[1..] {
            let b = l.binarized();
            acc = acc.hadamard(&b).expect("layers share a shape");
        }
        debug_assert_eq!(acc.rows(), n);
        LayerGraph {
            name: String::from("intersection"),
            labels: self.labels.clone(),
            weights: acc,
            directed: self.any_directed(),
        }
    }

    /// Binary layer with an arc wherever at least one layer has one: the
    /// layers are summed and the sum binarized, with the diagonal cleared.
    pub fn union_network(&self) -> LayerGraph {
        let n = self.node_count();
        let sum = Matrix::from_fn(n, n, |i, j| {
            self.layers.iter().map(|l| math::abs(l.weights[(i, j)])).sum::<f64>()
        });
        let weights = Matrix::from_fn(n, n, |i, j| if i != j && sum[(i, j)] != 0.0 { 1.0 } else { 0.0 });
        LayerGraph {
            name: String::from("union"),
            labels: self.labels.clone(),
            weights,
            directed: self.any_directed(),
        }
    }

    /// Sub-network induced on `keep`. Indices are deduplicated and taken in
    /// ascending order so the original label order is preserved.
    pub fn restrict(&self, keep: &[usize]) -> Result<Self> {
        let n = self.node_count();
        if keep.is_empty() {
            return Err(Error::EmptySelection);
        }
        if let Some(&bad) = keep.iter().find(|&&k| k >= n) {
            return Err(Error::IndexOutOfRange { index: bad, len: n });
        }
        let mut idx = keep.to_vec();
        idx.sort_unstable();
        idx.dedup();
        let labels: Vec<String> = idx.iter().map(|&i| self.labels[i].clone()).collect();
        let layers = self
            .layers
            .iter()
            .map(|l| LayerGraph {
                name: l.name.clone(),
                labels: labels.clone(),
                weights: Matrix::from_fn(idx.len(), idx.len(), |a, b| l.weights[(idx[a], idx[b])]),
                directed: l.directed,
            })
            .collect();
        Ok(Self { labels, layers })
    }

    /// Relabels nodes: new node `a` is old node `perm[a]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let layers = self
            .layers
            .iter()
            .map(|l| l.permuted(perm))
            .collect::<Result<Vec<_>>>()?;
        Self::new(layers)
    }
}
