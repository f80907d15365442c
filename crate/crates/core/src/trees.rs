//! Unlabeled rooted trees with canonical nested-parentheses codes.
//!
//! A tree is encoded as `(` + concatenation of the children's codes, sorted
//! lexicographically, + `)`. Sorting child codes at every node (AHU style)
//! makes the code a canonical form: two trees are isomorphic as rooted
//! trees iff their codes are equal.

use std::collections::HashMap;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct TreeCode(pub Vec<u8>);

impl fmt::Display for TreeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", std::str::from_utf8(&self.0).unwrap())
    }
}

/// The one-vertex tree (level 0: zero edges).
pub fn single_vertex() -> TreeCode {
    TreeCode(b"()".to_vec())
}

#[derive(Clone, Debug)]
struct Node {
    children: Vec<Node>,
}

fn parse(code: &[u8]) -> Node {
    fn inner(code: &[u8], pos: &mut usize) -> Node {
        assert_eq!(code[*pos], b'(');
        *pos += 1;
        let mut children = Vec::new();
        while code[*pos] != b')' {
            children.push(inner(code, pos));
        }
        *pos += 1;
        Node { children }
    }
    let mut pos = 0;
    inner(code, &mut pos)
}

fn encode(node: &Node) -> Vec<u8> {
    let mut kid_codes: Vec<Vec<u8>> = node.children.iter().map(encode).collect();
    kid_codes.sort();
    let mut out = vec![b'('];
    for k in kid_codes {
        out.extend(k);
    }
    out.push(b')');
    out
}

pub fn canonicalize(code: &TreeCode) -> TreeCode {
    TreeCode(encode(&parse(&code.0)))
}

pub fn edge_count(code: &TreeCode) -> usize {
    code.0.len() / 2 - 1
}

fn attach_at(node: &Node, target: usize, counter: &mut usize) -> Option<Node> {
    // preorder index; attach a new leaf under the node with that index
    let my = *counter;
    *counter += 1;
    if my == target {
        let mut n = node.clone();
        n.children.push(Node { children: Vec::new() });
        return Some(n);
    }
    let mut children = Vec::with_capacity(node.children.len());
    let mut hit = false;
    for c in &node.children {
        if hit {
            children.push(c.clone());
        } else if let Some(nc) = attach_at(c, target, counter) {
            children.push(nc);
            hit = true;
        } else {
            children.push(c.clone());
        }
    }
    if hit {
        Some(Node { children })
    } else {
        None
    }
}

/// All trees obtained by attaching one leaf, with the number of vertices of
/// `code` producing each canonical result.
pub fn attachments(code: &TreeCode) -> Vec<(TreeCode, u32)> {
    let root = parse(&code.0);
    let nverts = code.0.len() / 2;
    let mut out: HashMap<TreeCode, u32> = HashMap::new();
    for target in 0..nverts {
        let mut counter = 0;
        let attached = attach_at(&root, target, &mut counter).expect("target in range");
        *out.entry(TreeCode(encode(&attached))).or_insert(0) += 1;
    }
    let mut v: Vec<(TreeCode, u32)> = out.into_iter().collect();
    v.sort();
    v
}

fn remove_leaf(node: &Node, target: usize, counter: &mut usize) -> Option<Node> {
    // drop the leaf with the given preorder index (root has index 0 and is
    // never removed even when it has no children)
    let my = *counter;
    *counter += 1;
    let _ = my;
    let mut children = Vec::with_capacity(node.children.len());
    let mut hit = false;
    for c in &node.children {
        if hit {
            children.push(c.clone());
            continue;
        }
        let idx = *counter;
        if c.children.is_empty() && idx == target {
            *counter += 1;
            hit = true;
            continue; // drop it
        }
        if let Some(nc) = remove_leaf(c, target, counter) {
            children.push(nc);
            hit = true;
        } else {
            children.push(c.clone());
        }
    }
    if hit {
        Some(Node { children })
    } else {
        None
    }
}

/// For each tree `t` obtainable by removing one terminal edge from `code`,
/// the number of removable edges of `code` giving `t`.
pub fn removals(code: &TreeCode) -> HashMap<TreeCode, u32> {
    let root = parse(&code.0);
    let nverts = code.0.len() / 2;
    let mut out: HashMap<TreeCode, u32> = HashMap::new();
    for target in 1..nverts {
        let mut counter = 0;
        if let Some(t) = remove_leaf(&root, target, &mut counter) {
            *out.entry(TreeCode(encode(&t))).or_insert(0) += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_sorting() {
        // root with children (leaf, path2) in either order gives same code
        let a = TreeCode(b"(()(()))".to_vec());
        let b = TreeCode(b"((())())".to_vec());
        assert_eq!(canonicalize(&a), canonicalize(&b));
    }

    #[test]
    fn attach_counts_on_cherry() {
        // cherry = root with two leaf children; attaching at either leaf
        // gives the same tree, so that target must have count 2
        let cherry = TreeCode(b"(()())".to_vec());
        let at = attachments(&cherry);
        let total: u32 = at.iter().map(|(_, n)| n).sum();
        assert_eq!(total, 3); // three vertices
        assert!(at.iter().any(|(_, n)| *n == 2));
    }

    #[test]
    fn removals_of_path3() {
        // path with 3 edges has a single removable leaf
        let p3 = TreeCode(b"(((())))".to_vec());
        let r = removals(&p3);
        assert_eq!(r.len(), 1);
        assert_eq!(r.values().sum::<u32>(), 1);
    }

    #[test]
    fn level_one_edge_counts() {
        let t1 = single_vertex();
        let at = attachments(&t1);
        assert_eq!(at.len(), 1);
        assert_eq!(at[0].1, 1);
        assert_eq!(edge_count(&at[0].0), 1);
    }
}
