use crate::{CommutativeError, Result};
use ncmetric_linalg::HermitianMatrix;
use ncmetric_triple::DistanceValue;
use petgraph::algo::dijkstra;
use petgraph::graph::{NodeIndex, UnGraph};

/// Weighted graph of a commutative Dirac operator; edge length 1/|D_ij|.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

pub fn graph_from_dirac(d: &HermitianMatrix) -> Result<DiracGraph> {
    let n = d.dim();
    let mut edges = vec![];
    for i in 0..n {
        if d.get(i, i).norm() != 0.0 {
            return Err(CommutativeError::NonZeroDiagonal(i));
        }
        for j in i + 1..n {
            let z = d.get(i, j);
            if z.im != 0.0 {
                return Err(CommutativeError::NotReal(i, j));
            }
            if z.re != 0.0 {
                edges.push((i, j, 1.0 / z.re.abs()));
            }
        }
    }
    Ok(DiracGraph { n, edges })
}

impl DiracGraph {
    fn to_petgraph(&self) -> UnGraph<(), f64> {
        let mut g = UnGraph::with_capacity(self.n, self.edges.len());
        for _ in 0..self.n {
            g.add_node(());
        }
        for &(i, j, l) in &self.edges {
            g.add_edge(NodeIndex::new(i), NodeIndex::new(j), l);
        }
        g
    }
}

/// Shortest-path length; +∞ when disconnected.
pub fn geodesic_length(g: &DiracGraph, i: usize, j: usize) -> DistanceValue {
    if i == j {
        return DistanceValue::finite(0.0);
    }
    let pg = g.to_petgraph();
    let dist = dijkstra(&pg, NodeIndex::new(i), Some(NodeIndex::new(j)), |e| *e.weight());
    match dist.get(&NodeIndex::new(j)) {
        Some(&l) => DistanceValue::finite(l),
        None => DistanceValue::infinite(),
    }
}
