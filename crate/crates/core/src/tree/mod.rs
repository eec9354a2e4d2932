//! Reading-tree construction.
//!
//! Spans are visited in reverse reading order (bottom-right first). A body
//! adopts the still-unparented bodies below it that belong to the same entry,
//! forming a body chain; a header adopts every unparented span in the region
//! it dominates. Whatever is left unparented hangs off the synthetic root.

mod blocks;
mod cluster;
mod order;
mod relations;

use serde::{Deserialize, Serialize};

pub use blocks::{body_chains, directory_blocks, DirectoryBlock};
pub use cluster::{casing_class, cluster_headers, CasingClass};
pub use order::{reading_sequence, same_band};
pub use relations::{median_line_height, LayoutContext};

use crate::geometry::BBox;
use crate::scalar::Scalar;
use crate::segmenter::{LabeledSpan, SpanLabel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeParams<T> {
    /// Fraction of the shorter box two spans must overlap vertically to share a band.
    pub band_overlap_frac: T,
    /// Alignment slack in points.
    pub align_tol: T,
    /// Largest gap between chained bodies, in median line heights.
    pub gap_factor: T,
    /// Fraction of a span's width a header must overlap to cover it.
    pub min_x_overlap_frac: T,
    /// Font-size gap (points) that separates header size clusters.
    pub size_cluster_tol: T,
}

impl<T: Scalar> Default for TreeParams<T> {
    fn default() -> Self {
        Self {
            band_overlap_frac: T::of(0.5),
            align_tol: T::of(5.0),
            gap_factor: T::of(1.5),
            min_x_overlap_frac: T::of(0.3),
            size_cluster_tol: T::of(0.5),
        }
    }
}

impl<T: Scalar> TreeParams<T> {
    pub fn validate(&self) -> Result<(), String> {
        let unit = |v: T| v > T::zero() && v <= T::one();
        if !unit(self.band_overlap_frac) {
            return Err("band_overlap_frac must lie in (0, 1]".into());
        }
        if !unit(self.min_x_overlap_frac) {
            return Err("min_x_overlap_frac must lie in (0, 1]".into());
        }
        for (name, v) in [("align_tol", self.align_tol), ("gap_factor", self.gap_factor), ("size_cluster_tol", self.size_cluster_tol)] {
            if !(v.is_finite() && v > T::zero()) {
                return Err(format!("{name} must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeKind {
    Root,
    Header,
    Body,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode<T> {
    pub id: NodeId,
    #[serde(rename = "label")]
    pub kind: NodeKind,
    pub text: String,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    pub cluster: Option<u32>,
    pub bbox: Option<BBox<T>>,
}

/// Node `i` has id `i`; node 0 is the synthetic root and ids follow reading
/// order, so children lists are sorted by id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadingTree<T> {
    pub nodes: Vec<TreeNode<T>>,
}

impl<T: Scalar> ReadingTree<T> {
    pub fn root_only() -> Self {
        Self::from_links(Vec::new()).expect("empty tree is valid")
    }

    pub fn node(&self, id: NodeId) -> &TreeNode<T> {
        &self.nodes[id.0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() <= 1
    }

    /// Builds a tree from explicit parent links. Entry `i` becomes node `i + 1`;
    /// `parent` refers to another entry index, `None` meaning the root.
    pub fn from_links(entries: Vec<TreeLink<T>>) -> Result<Self, String> {
        let n = entries.len();
        let mut nodes = vec![TreeNode {
            id: NodeId::ROOT,
            kind: NodeKind::Root,
            text: String::new(),
            parent: None,
            children: Vec::new(),
            cluster: None,
            bbox: None,
        }];
        for (i, e) in entries.iter().enumerate() {
            if e.kind == NodeKind::Root {
                return Err(format!("entry {i} cannot be a root"));
            }
            if let Some(p) = e.parent {
                if p >= n || p == i {
                    return Err(format!("entry {i} has invalid parent {p}"));
                }
            }
        }
        for (i, e) in entries.into_iter().enumerate() {
            nodes.push(TreeNode {
                id: NodeId(i + 1),
                kind: e.kind,
                text: e.text,
                parent: Some(e.parent.map_or(NodeId::ROOT, |p| NodeId(p + 1))),
                children: Vec::new(),
                cluster: e.cluster,
                bbox: e.bbox,
            });
        }
        for i in 1..nodes.len() {
            let p = nodes[i].parent.expect("set above").0;
            nodes[p].children.push(NodeId(i));
        }
        let tree = Self { nodes };
        if let Some(cycle) = tree.first_cycle() {
            return Err(format!("parent links form a cycle through node {}", cycle.0));
        }
        Ok(tree)
    }

    fn first_cycle(&self) -> Option<NodeId> {
        for start in 0..self.nodes.len() {
            let mut at = NodeId(start);
            let mut steps = 0;
            while let Some(p) = self.nodes[at.0].parent {
                at = p;
                steps += 1;
                if steps > self.nodes.len() {
                    return Some(NodeId(start));
                }
            }
        }
        None
    }

    /// Path from the first node below the root down to `id`, inclusive.
    pub fn path_to(&self, id: NodeId) -> Vec<NodeId> {
        let mut path = vec![id];
        let mut at = id;
        while let Some(p) = self.nodes[at.0].parent {
            if p == NodeId::ROOT {
                break;
            }
            path.push(p);
            at = p;
        }
        path.reverse();
        path
    }

    /// All structural rules a reading tree must satisfy; empty when valid.
    ///
    /// Leaves are bodies, except for headers that ended up with no children,
    /// which hang directly off the root. Bodies only have body children (body
    /// chains). A header never parents a header of its own cluster.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.nodes.is_empty() || self.nodes[0].kind != NodeKind::Root || self.nodes[0].parent.is_some() {
            out.push("node 0 must be a parentless root".to_string());
            return out;
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if node.id != NodeId(i) {
                out.push(format!("node at index {i} carries id {}", node.id.0));
            }
            if i > 0 {
                match node.parent {
                    None => out.push(format!("node {i} has no parent")),
                    Some(p) if p.0 >= self.nodes.len() => out.push(format!("node {i} has dangling parent {}", p.0)),
                    Some(p) => {
                        let listed = self.nodes[p.0].children.iter().filter(|c| c.0 == i).count();
                        if listed != 1 {
                            out.push(format!("node {i} appears {listed} times among its parent's children"));
                        }
                    }
                }
                if node.kind == NodeKind::Root {
                    out.push(format!("node {i} is a second root"));
                }
            }
            for c in &node.children {
                if c.0 >= self.nodes.len() || self.nodes[c.0].parent != Some(NodeId(i)) {
                    out.push(format!("node {i} lists child {} whose parent differs", c.0));
                }
            }
            match node.kind {
                NodeKind::Body => {
                    if node.children.iter().any(|c| c.0 < self.nodes.len() && self.nodes[c.0].kind != NodeKind::Body) {
                        out.push(format!("body node {i} has a non-body child"));
                    }
                }
                NodeKind::Header => {
                    if node.children.is_empty() && node.parent != Some(NodeId::ROOT) {
                        out.push(format!("header node {i} is a leaf below another header"));
                    }
                    for c in &node.children {
                        if let Some(child) = self.nodes.get(c.0) {
                            if child.kind == NodeKind::Header && child.cluster.is_some() && child.cluster == node.cluster {
                                out.push(format!("header {i} parents header {} of the same cluster", c.0));
                            }
                        }
                    }
                }
                NodeKind::Root => {}
            }
        }
        if let Some(c) = self.first_cycle() {
            out.push(format!("cycle through node {}", c.0));
        }
        out
    }
}

/// One node of a tree given by explicit parent links.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeLink<T> {
    pub kind: NodeKind,
    pub text: String,
    pub parent: Option<usize>,
    pub cluster: Option<u32>,
    pub bbox: Option<BBox<T>>,
}

/// Builds the reading tree of one page from its labelled spans (Neither spans
/// are skipped).
pub fn build_tree<T: Scalar>(spans: &[LabeledSpan<T>], p: &TreeParams<T>) -> ReadingTree<T> {
    let seq = reading_sequence(spans, p);
    let ctx = LayoutContext::new(seq.iter().map(|&i| &spans[i]).collect(), p);
    let n = ctx.spans.len();
    let mut parent: Vec<Option<usize>> = vec![None; n];

    for c in (0..n).rev() {
        match ctx.spans[c].label {
            SpanLabel::Body => {
                for (b, slot) in parent.iter_mut().enumerate().skip(c + 1) {
                    if slot.is_none() && ctx.spans[b].label == SpanLabel::Body && ctx.same_entry(c, b) {
                        *slot = Some(c);
                    }
                }
            }
            SpanLabel::Header => {
                for (m, slot) in parent.iter_mut().enumerate().skip(c + 1) {
                    if slot.is_none() && ctx.can_parent(c, m) {
                        *slot = Some(c);
                    }
                }
            }
            SpanLabel::Neither => {}
        }
    }

    // Headers that dominate nothing move to the root, repeatedly, since a
    // move can leave the former parent childless in turn.
    loop {
        let mut child_count = vec![0usize; n];
        for p in parent.iter().flatten() {
            child_count[*p] += 1;
        }
        let orphans: Vec<usize> = (0..n)
            .filter(|&i| ctx.spans[i].label == SpanLabel::Header && child_count[i] == 0 && parent[i].is_some())
            .collect();
        if orphans.is_empty() {
            break;
        }
        for i in orphans {
            parent[i] = None;
        }
    }

    let links = (0..n)
        .map(|i| TreeLink {
            kind: if ctx.spans[i].label == SpanLabel::Header { NodeKind::Header } else { NodeKind::Body },
            text: ctx.spans[i].text.clone(),
            parent: parent[i],
            cluster: ctx.clusters[i],
            bbox: Some(ctx.spans[i].bbox),
        })
        .collect();
    ReadingTree::from_links(links).expect("parents always point at later-visited nodes")
}
