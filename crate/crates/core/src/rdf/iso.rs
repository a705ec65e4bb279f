//! Graph isomorphism up to blank-node relabeling.
//!
//! Blank nodes are first partitioned by iterated neighbourhood hashing, then a
//! backtracking search only tries candidates from the matching colour class.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::hash::{Hash, Hasher};

use super::{BlankNode, Graph, Term, Triple};

const REFINEMENT_ROUNDS: usize = 4;

/// `true` iff some bijection between the blank nodes of `a` and `b` maps `a` exactly onto `b`.
pub fn isomorphic(a: &Graph, b: &Graph) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let (ground_a, blank_a): (Vec<Triple>, Vec<Triple>) = a.iter().partition(is_ground);
    let (ground_b, blank_b): (Vec<Triple>, Vec<Triple>) = b.iter().partition(is_ground);
    if ground_a.len() != ground_b.len() || !ground_a.iter().all(|t| b.contains(t)) {
        return false;
    }
    if blank_a.is_empty() {
        return true;
    }

    let colors_a = colour(&blank_a);
    let colors_b = colour(&blank_b);
    if histogram(&colors_a) != histogram(&colors_b) {
        return false;
    }

    let mut order: Vec<&BlankNode> = colors_a.keys().collect();
    // rarest colours first keeps the branching factor low
    let hist = histogram(&colors_a);
    order.sort_by_key(|n| (hist[&colors_a[*n]], n.label().to_string()));

    let target: HashSet<&Triple> = blank_b.iter().collect();
    let mut mapping: HashMap<BlankNode, BlankNode> = HashMap::new();
    let mut used: HashSet<BlankNode> = HashSet::new();
    search(&order, 0, &colors_a, &colors_b, &blank_a, &target, &mut mapping, &mut used)
}

fn is_ground(t: &Triple) -> bool {
    !t.subject().is_blank() && !t.object().is_blank()
}

fn blanks_of(t: &Triple) -> impl Iterator<Item = &BlankNode> {
    [t.subject(), t.object()].into_iter().filter_map(|term| match term {
        Term::Blank(b) => Some(b),
        _ => None,
    })
}

fn hash_of<T: Hash>(value: &T) -> u64 {
    let mut h = DefaultHasher::new();
    value.hash(&mut h);
    h.finish()
}

fn histogram(colors: &HashMap<BlankNode, u64>) -> BTreeMap<u64, usize> {
    let mut out = BTreeMap::new();
    for c in colors.values() {
        *out.entry(*c).or_insert(0) += 1;
    }
    out
}

fn colour(triples: &[Triple]) -> HashMap<BlankNode, u64> {
    let mut colors: HashMap<BlankNode, u64> = HashMap::new();
    for t in triples {
        for b in blanks_of(t) {
            colors.insert(b.clone(), 0);
        }
    }
    for _ in 0..REFINEMENT_ROUNDS {
        let mut features: HashMap<&BlankNode, Vec<u64>> = HashMap::new();
        let render = |term: &Term| -> u64 {
            match term {
                Term::Blank(b) => hash_of(&("blank", colors[b])),
                other => hash_of(&("term", other.to_string())),
            }
        };
        for t in triples {
            let p = t.predicate().as_str();
            if let Term::Blank(s) = t.subject() {
                features
                    .entry(s)
                    .or_default()
                    .push(hash_of(&("out", p, render(t.object()))));
            }
            if let Term::Blank(o) = t.object() {
                features
                    .entry(o)
                    .or_default()
                    .push(hash_of(&("in", p, render(t.subject()))));
            }
        }
        let next: HashMap<BlankNode, u64> = features
            .into_iter()
            .map(|(node, mut f)| {
                f.sort_unstable();
                (node.clone(), hash_of(&(colors[node], f)))
            })
            .collect();
        colors = next;
    }
    colors
}

fn map_term(term: &Term, mapping: &HashMap<BlankNode, BlankNode>) -> Option<Term> {
    match term {
        Term::Blank(b) => mapping.get(b).map(|m| Term::Blank(m.clone())),
        other => Some(other.clone()),
    }
}

#[allow(clippy::too_many_arguments)]
fn search(
    order: &[&BlankNode],
    depth: usize,
    colors_a: &HashMap<BlankNode, u64>,
    colors_b: &HashMap<BlankNode, u64>,
    source: &[Triple],
    target: &HashSet<&Triple>,
    mapping: &mut HashMap<BlankNode, BlankNode>,
    used: &mut HashSet<BlankNode>,
) -> bool {
    let Some(&node) = order.get(depth) else {
        return true;
    };
    let want = colors_a[node];
    let mut candidates: Vec<&BlankNode> = colors_b
        .iter()
        .filter(|(b, c)| **c == want && !used.contains(*b))
        .map(|(b, _)| b)
        .collect();
    candidates.sort();
    for cand in candidates {
        mapping.insert(node.clone(), cand.clone());
        used.insert(cand.clone());
        if consistent(node, source, target, mapping)
            && search(order, depth + 1, colors_a, colors_b, source, target, mapping, used)
        {
            return true;
        }
        mapping.remove(node);
        used.remove(cand);
    }
    false
}

/// Every fully mapped triple touching `node` must exist in the target.
fn consistent(
    node: &BlankNode,
    source: &[Triple],
    target: &HashSet<&Triple>,
    mapping: &HashMap<BlankNode, BlankNode>,
) -> bool {
    source
        .iter()
        .filter(|t| blanks_of(t).any(|b| b == node))
        .all(|t| match (map_term(t.subject(), mapping), map_term(t.object(), mapping)) {
            (Some(s), Some(o)) => {
                let mapped = Triple::new(s, t.predicate().clone(), o).expect("subject kind preserved");
                target.contains(&mapped)
            }
            _ => true,
        })
}
