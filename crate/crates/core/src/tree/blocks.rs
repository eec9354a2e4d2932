use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

use super::{NodeId, NodeKind, ReadingTree};

/// One root-to-leaf reading unit: the header stack and the body it applies to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DirectoryBlock {
    pub headers: Vec<String>,
    pub body: String,
}

/// Body nodes grouped by chain, one entry per chain head (a body whose
/// parent is not a body), each listed in id order.
pub fn body_chains<T: Scalar>(t: &ReadingTree<T>) -> Vec<Vec<NodeId>> {
    let mut out = Vec::new();
    for node in &t.nodes {
        if node.kind != NodeKind::Body {
            continue;
        }
        if node.parent.map(|p| t.node(p).kind) == Some(NodeKind::Body) {
            continue;
        }
        let mut chain = Vec::new();
        collect_chain(t, node.id, &mut chain);
        chain.sort();
        out.push(chain);
    }
    out
}

/// One block per body chain, in reading order. Header-only leaves produce
/// no block.
pub fn directory_blocks<T: Scalar>(t: &ReadingTree<T>) -> Vec<DirectoryBlock> {
    body_chains(t)
        .into_iter()
        .map(|chain| {
            let headers = t
                .path_to(chain[0])
                .into_iter()
                .filter(|id| t.node(*id).kind == NodeKind::Header)
                .map(|id| t.node(id).text.clone())
                .collect();
            let body = chain.iter().map(|id| t.node(*id).text.trim()).filter(|s| !s.is_empty()).collect::<Vec<_>>().join(" ");
            DirectoryBlock { headers, body }
        })
        .collect()
}

fn collect_chain<T>(t: &ReadingTree<T>, id: NodeId, acc: &mut Vec<NodeId>) {
    acc.push(id);
    for c in &t.nodes[id.0].children {
        collect_chain(t, *c, acc);
    }
}
