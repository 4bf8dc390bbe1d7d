//! Genealogy of code classes under elementary geometric shortenings.
//!
//! Starting from an ancestor code, every (point, single vertex) deletion
//! produces a candidate descendant; candidates are identified up to
//! label-preserving code equivalence, and the classes form an acyclic
//! graph graded by the number of points. Vertices within one point are
//! pre-identified under the diagram symmetries acting as `±1` on local
//! homology (which provably never merges distinct classes); the general
//! equivalence pass does the rest.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigUint;

use crate::codes::{equivalent, LabeledCode};
use crate::{Error, Result};

/// One equivalence class of codes in the genealogy.
#[derive(Clone, Debug)]
pub struct GenealogyNode {
    pub id: usize,
    pub code: LabeledCode,
    /// Number of singular points.
    pub nu: usize,
    pub label_multiset: String,
    /// Number of exceptional curves.
    pub rank: usize,
    pub k_order: BigUint,
    pub fingerprint: String,
}

#[derive(Clone, Debug)]
pub struct GenealogyDag {
    pub nodes: Vec<GenealogyNode>,
    /// Witnessed deletions per (parent, child) pair.
    pub edges: BTreeMap<(usize, usize), Vec<String>>,
    pub root: usize,
    /// False when the node cap stopped the expansion early.
    pub complete: bool,
}

/// A permutation-invariant fingerprint: equivalent codes always agree on
/// it, so it buckets the exact equivalence search.
pub fn fingerprint(code: &LabeledCode) -> Result<String> {
    let mut per_vector: Vec<String> = Vec::new();
    for v in code.all_vectors()? {
        let mut cells: Vec<String> = code
            .points()
            .iter()
            .zip(&v.chars)
            .map(|(p, c)| {
                let vals: Vec<String> = c.values.iter().map(|q| q.to_string()).collect();
                format!("{}:{}", p.label, vals.join(","))
            })
            .collect();
        cells.sort();
        let h = v
            .h_value
            .as_ref()
            .map_or("-".to_string(), |h| h.to_string());
        per_vector.push(format!("o{}|h{}|{}", v.order(), h, cells.join(";")));
    }
    per_vector.sort();
    Ok(format!(
        "nu{}|{}|K{}|{}",
        code.num_points(),
        code.label_multiset(),
        code.k_order(),
        per_vector.join("#")
    ))
}

/// All elementary geometric shortenings of a code, one per (point, vertex)
/// up to the safe diagram symmetries, deduplicated up to equivalence.
/// Each survivor carries a witnessing deletion description.
pub fn descendants(code: &LabeledCode) -> Result<Vec<(String, LabeledCode)>> {
    let mut out: Vec<(String, LabeledCode, String)> = Vec::new();
    for (z, point) in code.points().iter().enumerate() {
        let cfg = &code.configs()[z];
        let syms = cfg.sign_symmetries();
        let mut reps: Vec<usize> = Vec::new();
        let mut seen = vec![false; cfg.vertex_count() + 1];
        for v in cfg.vertices() {
            if seen[v] {
                continue;
            }
            reps.push(v);
            for s in &syms {
                seen[s[v - 1]] = true;
            }
        }
        for v in reps {
            let s = std::iter::once(v).collect();
            let child = code.shorten_geometric(&point.id, &s)?;
            let witness = format!("{}-v{}", point.id, v);
            let fp = fingerprint(&child)?;
            let mut duplicate = false;
            for (efp, existing, _) in &out {
                if *efp == fp && equivalent(existing, &child)?.is_some() {
                    duplicate = true;
                    break;
                }
            }
            if !duplicate {
                out.push((fp, child, witness));
            }
        }
    }
    Ok(out.into_iter().map(|(_, c, w)| (w, c)).collect())
}

fn make_node(id: usize, code: LabeledCode) -> Result<GenealogyNode> {
    let fp = fingerprint(&code)?;
    Ok(GenealogyNode {
        id,
        nu: code.num_points(),
        label_multiset: code.label_multiset(),
        rank: code.rank(),
        k_order: code.k_order(),
        fingerprint: fp,
        code,
    })
}

/// Breadth-first closure of [`descendants`] from an ancestor, with one
/// node per equivalence class. Stops (and marks the result incomplete)
/// when `max_nodes` is exceeded.
pub fn build_dag(
    ancestor: &LabeledCode,
    max_depth: Option<usize>,
    max_nodes: usize,
) -> Result<GenealogyDag> {
    let mut nodes = vec![make_node(0, ancestor.clone())?];
    let mut registry: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    registry.insert(nodes[0].fingerprint.clone(), vec![0]);
    let mut edges: BTreeMap<(usize, usize), Vec<String>> = BTreeMap::new();
    let mut queue = std::collections::VecDeque::from([(0usize, 0usize)]);
    let mut complete = true;
    while let Some((id, depth)) = queue.pop_front() {
        if max_depth.is_some_and(|d| depth >= d) {
            continue;
        }
        let children = descendants(&nodes[id].code)?;
        for (witness, child) in children {
            let fp = fingerprint(&child)?;
            let mut child_id = None;
            if let Some(cands) = registry.get(&fp) {
                for &c in cands {
                    if equivalent(&nodes[c].code, &child)?.is_some() {
                        child_id = Some(c);
                        break;
                    }
                }
            }
            let child_id = match child_id {
                Some(c) => c,
                None => {
                    if nodes.len() >= max_nodes {
                        complete = false;
                        continue;
                    }
                    let c = nodes.len();
                    nodes.push(make_node(c, child)?);
                    registry.entry(fp).or_default().push(c);
                    queue.push_back((c, depth + 1));
                    c
                }
            };
            let w = edges.entry((id, child_id)).or_default();
            if !w.contains(&witness) {
                w.push(witness);
            }
        }
    }
    Ok(GenealogyDag {
        nodes,
        edges,
        root: 0,
        complete,
    })
}

impl GenealogyDag {
    /// Number of classes per point count, largest first.
    pub fn counts_by_nu(&self) -> BTreeMap<usize, usize> {
        let mut counts = BTreeMap::new();
        for n in &self.nodes {
            *counts.entry(n.nu).or_insert(0) += 1;
        }
        counts
    }

    pub fn to_dot(&self) -> String {
        let mut order: Vec<&GenealogyNode> = self.nodes.iter().collect();
        order.sort_by_key(|n| (std::cmp::Reverse(n.nu), n.id));
        let mut s = String::from("digraph genealogy {\n");
        s.push_str("  rankdir=TB;\n  node [shape=box];\n");
        for n in &order {
            let _ = writeln!(
                s,
                "  n{} [label=\"nu={} | {} | |K|={}\"];",
                n.id, n.nu, n.label_multiset, n.k_order
            );
        }
        for ((a, b), witnesses) in &self.edges {
            let _ = writeln!(s, "  n{a} -> n{b} [label=\"{}\"];", witnesses.join(","));
        }
        if !self.complete {
            s.push_str("  incomplete [shape=plaintext, label=\"(truncated: node cap)\"];\n");
        }
        s.push_str("}\n");
        s
    }

    pub fn to_csv(&self) -> String {
        let mut order: Vec<&GenealogyNode> = self.nodes.iter().collect();
        order.sort_by_key(|n| (std::cmp::Reverse(n.nu), n.id));
        let mut s = String::from("nu,labels,K_order,k2_dim,rank\n");
        for n in &order {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                n.nu,
                n.label_multiset,
                n.k_order,
                n.code.k2_dimension(),
                n.rank
            );
        }
        s
    }
}

/// Convenience: an error when the DAG hit its cap (used by callers that
/// must not continue with partial data).
pub fn require_complete(dag: &GenealogyDag) -> Result<()> {
    if dag.complete {
        Ok(())
    } else {
        Err(Error::ResourceCap(
            "genealogy expansion exceeded the node cap; partial graph flagged incomplete".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn cayley_chain() {
        let e = catalog::get("cayley-cubic").unwrap();
        let dag = build_dag(&e.strict, None, 1000).unwrap();
        assert!(dag.complete);
        // One class per point count 4, 3, 2, 1, 0.
        assert_eq!(dag.nodes.len(), 5);
        let counts = dag.counts_by_nu();
        for nu in 0..=4usize {
            assert_eq!(counts.get(&nu), Some(&1), "nu = {nu}");
        }
        // All four single-point shortenings of the ancestor are equivalent.
        let d = descendants(&e.strict).unwrap();
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn single_cusp_descends_one_way() {
        let points = vec![crate::codes::SingularPoint {
            id: "c".into(),
            label: crate::ade::DynkinLabel::a(2),
        }];
        let code = LabeledCode::from_kernel_gamma(points, &[], None).unwrap();
        // Both vertices are mirror images; one candidate class remains,
        // an A_1 point with trivial code.
        let d = descendants(&code).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].1.num_points(), 1);
        assert!(d[0].1.h1().is_trivial());
    }

    #[test]
    fn empty_code_has_no_descendants() {
        let code = LabeledCode::from_kernel_gamma(vec![], &[], None).unwrap();
        assert!(descendants(&code).unwrap().is_empty());
        let dag = build_dag(&code, None, 10).unwrap();
        assert_eq!(dag.nodes.len(), 1);
        assert!(dag.edges.is_empty());
    }

    #[test]
    fn depth_zero_is_a_single_node() {
        let e = catalog::get("cayley-cubic").unwrap();
        let dag = build_dag(&e.strict, Some(0), 1000).unwrap();
        assert_eq!(dag.nodes.len(), 1);
    }

    #[test]
    fn rank_decreases_by_one_along_edges() {
        let e = catalog::get("three-cusp-cubic").unwrap();
        let dag = build_dag(&e.strict, None, 1000).unwrap();
        assert!(dag.complete);
        for (&(a, b), _) in &dag.edges {
            assert_eq!(dag.nodes[a].rank, dag.nodes[b].rank + 1);
            // The child order divides the parent order times nothing: it
            // embeds into the parent's restriction.
            let pa = dag.nodes[a].k_order.clone();
            let pb = dag.nodes[b].k_order.clone();
            assert!(num_integer::Integer::is_multiple_of(&pa, &pb) || pb <= pa);
        }
    }

    #[test]
    fn dot_and_csv_are_well_formed() {
        let e = catalog::get("cayley-cubic").unwrap();
        let dag = build_dag(&e.strict, None, 1000).unwrap();
        let dot = dag.to_dot();
        assert!(dot.starts_with("digraph genealogy {"));
        assert!(dot.trim_end().ends_with('}'));
        assert_eq!(dot.matches("->").count(), dag.edges.len());
        // 5 nodes, 4 edges in the chain.
        assert_eq!(dag.nodes.len(), 5);
        assert_eq!(dag.edges.len(), 4);

        let csv = dag.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("nu,labels,K_order,k2_dim,rank"));
        assert_eq!(csv.lines().count(), 1 + dag.nodes.len());
    }

    #[test]
    fn node_cap_flags_incomplete() {
        let e = catalog::get("cayley-cubic").unwrap();
        let dag = build_dag(&e.strict, None, 2).unwrap();
        assert!(!dag.complete);
        assert!(require_complete(&dag).is_err());
    }

    #[test]
    fn traversal_order_does_not_matter() {
        // A depth-limited run agrees with the full run on every class the
        // depth can reach (rank drops by exactly one per step).
        let e = catalog::get("three-cusp-cubic").unwrap();
        let full = build_dag(&e.strict, None, 1000).unwrap();
        let limited = build_dag(&e.strict, Some(2), 1000).unwrap();
        let count_by_rank = |dag: &GenealogyDag, r: usize| {
            dag.nodes.iter().filter(|n| n.rank == r).count()
        };
        let top = e.strict.rank();
        for r in top - 2..=top {
            assert_eq!(count_by_rank(&full, r), count_by_rank(&limited, r), "rank {r}");
        }
    }
}
