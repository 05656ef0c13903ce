//! The all-paths-equal-cost problem: the order-1 dynamic program, the
//! gamma table, the corresponding instance of one order lower attached to a
//! strongly basic arc, and the source-arc bridge between both problems.

use std::collections::hash_map::Entry;
use std::collections::{BTreeSet, HashMap, VecDeque};

use num_traits::Zero;

use crate::costs::{eval_order_d, ArcKey, LinearCost, OrderDCost, Rational};
use crate::graph::{
    choose_nonbasic_system, nonbasic_path, restrict_to_prefix_subgraph, ArcId, Dag,
    NonbasicSystem, Path, VertexId,
};
use crate::linearizer::{linearize, LinVerdict};
use crate::{Error, Result};

/// An all-paths-equal-cost instance; the sink may be any vertex, so
/// restricted subgraphs are instances too.
#[derive(Debug, Clone)]
pub struct ApecInstance {
    pub dag: Dag,
    pub q: OrderDCost,
}

impl ApecInstance {
    pub fn new(dag: Dag, q: OrderDCost) -> Result<Self> {
        if q.arc_count() != dag.arc_count() {
            return Err(Error::DimensionMismatch {
                got: q.arc_count() as usize,
                expected: dag.arc_count() as usize,
            });
        }
        Ok(ApecInstance { dag, q })
    }

    pub fn order(&self) -> u32 {
        self.q.d()
    }
}

/// Outcome of an all-paths-equal-cost decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ApecVerdict {
    /// Every path costs `beta`.
    AllEqual { beta: Rational },
    /// Two concrete paths with distinct costs.
    Unequal { witness: (Path, Path) },
}

impl ApecVerdict {
    pub fn all_equal(&self) -> bool {
        matches!(self, ApecVerdict::AllEqual { .. })
    }

    pub fn beta(&self) -> Option<&Rational> {
        match self {
            ApecVerdict::AllEqual { beta } => Some(beta),
            ApecVerdict::Unequal { .. } => None,
        }
    }

    pub fn witness(&self) -> Option<(&Path, &Path)> {
        match self {
            ApecVerdict::AllEqual { .. } => None,
            ApecVerdict::Unequal { witness } => Some((&witness.0, &witness.1)),
        }
    }
}

/// Fixed s-w paths along a breadth-first out-tree from the source, as parent
/// arcs per vertex.
pub(crate) struct BfsTree {
    pub(crate) parent: Vec<Option<ArcId>>,
}

impl BfsTree {
    pub(crate) fn new(dag: &Dag) -> Self {
        let mut parent = vec![None; dag.vertex_count() as usize];
        let mut seen = vec![false; dag.vertex_count() as usize];
        seen[dag.source() as usize] = true;
        let mut queue = VecDeque::from([dag.source()]);
        while let Some(v) = queue.pop_front() {
            for &a in dag.out_arcs(v) {
                let h = dag.arc(a).head;
                if !seen[h as usize] {
                    seen[h as usize] = true;
                    parent[h as usize] = Some(a);
                    queue.push_back(h);
                }
            }
        }
        BfsTree { parent }
    }

    /// The tree path from the source to `v`.
    pub(crate) fn path_to(&self, dag: &Dag, v: VertexId) -> Path {
        let mut arcs = Vec::new();
        let mut cur = v;
        while let Some(a) = self.parent[cur as usize] {
            arcs.push(a);
            cur = dag.arc(a).tail;
        }
        arcs.reverse();
        Path::new_unchecked(cur, v, arcs)
    }
}

/// Order-1 all-paths-equal-cost by dynamic programming in O(m): fix one s-w
/// path per vertex along a BFS out-tree, then every arc must close
/// consistently.
pub fn solve_apec1(inst: &ApecInstance) -> Result<ApecVerdict> {
    if inst.order() != 1 {
        return Err(Error::OrderMismatch(inst.order() as usize, 1));
    }
    let dag = &inst.dag;
    let q = &inst.q;
    let tree = BfsTree::new(dag);
    let n = dag.vertex_count() as usize;
    let mut y: Vec<Rational> = vec![Rational::zero(); n];
    for &v in dag.topo_vertices() {
        if let Some(a) = tree.parent[v as usize] {
            let t = dag.arc(a).tail as usize;
            y[v as usize] = &y[t] + q.get(&[a]);
        }
    }
    for arc in dag.arcs() {
        let via_arc = &y[arc.tail as usize] + q.get(&[arc.id]);
        if via_arc != y[arc.head as usize] {
            // Two fixed prefixes to `arc.head` with different order-1 cost;
            // any common continuation to the sink keeps them apart.
            let continuation = dag
                .some_path(arc.head, dag.sink())
                .expect("covered dag vertices reach the sink");
            let p1 = tree.path_to(dag, arc.head).concat(&continuation);
            let p2 = tree
                .path_to(dag, arc.tail)
                .push_arc(dag, arc.id)
                .concat(&continuation);
            debug_assert_ne!(
                eval_order_d(q, &p1).unwrap(),
                eval_order_d(q, &p2).unwrap()
            );
            return Ok(ApecVerdict::Unequal { witness: (p1, p2) });
        }
    }
    let beta = &y[dag.sink() as usize] + q.empty_set_value();
    Ok(ApecVerdict::AllEqual { beta })
}

/// Read-only view of the strict gamma values at the vertex currently visited
/// by [`walk_gamma`]: `γ'(B, x) = Σ_{∅ ≠ C ⊆ N_x, |C| ≤ d − |B|} q(B ∪ C)`,
/// the part of `γ(B, x) = q(B) + γ'(B, x)` contributed by the nonbasic path.
/// Keys absent from the view are zero.
pub(crate) struct GammaView<'a> {
    map: &'a HashMap<ArcKey, Rational>,
}

impl GammaView<'_> {
    pub(crate) fn prime(&self, key: &[ArcId]) -> Option<&Rational> {
        self.map.get(key).filter(|v| !v.is_zero())
    }

    /// Nonzero strict entries at the current vertex. Entries whose key meets
    /// the current nonbasic path are bookkeeping intermediates, not gamma
    /// values; callers filter them out.
    pub(crate) fn entries(&self) -> impl Iterator<Item = (&ArcKey, &Rational)> {
        self.map.iter().filter(|(_, v)| !v.is_zero())
    }
}

/// Walks the nonbasic in-tree from the sink downwards, maintaining the
/// sparse strict table `γ'(·, x)` for the current vertex `x` and calling
/// `visit` once per vertex of `V \ {s}`.
///
/// Entering `x` through its nonbasic arc `e` rewrites the parent table by
/// `γ'(B, x) = γ'(B, y) + q(B ∪ {e}) + γ'(B ∪ {e}, y)`: one delta per stored
/// q-key containing `e` plus one per live table entry containing `e`. The
/// deltas are undone when the walk leaves the subtree, so total work is
/// proportional to the deltas, not to the tree size times the table size.
pub(crate) fn walk_gamma<F>(dag: &Dag, ns: &NonbasicSystem, q: &OrderDCost, mut visit: F)
where
    F: FnMut(VertexId, &GammaView),
{
    let children = ns.in_tree_children(dag);
    let mut q_keys_with_arc: HashMap<ArcId, Vec<&ArcKey>> = HashMap::new();
    for (key, _) in q.entries() {
        for &a in key {
            q_keys_with_arc.entry(a).or_default().push(key);
        }
    }
    let mut map: HashMap<ArcKey, Rational> = HashMap::new();
    let mut live_with_arc: HashMap<ArcId, Vec<ArcKey>> = HashMap::new();

    enum Op {
        Enter(VertexId, Option<ArcId>),
        Undo(Vec<(ArcKey, Rational)>),
    }
    let mut stack = vec![Op::Enter(dag.sink(), None)];
    while let Some(op) = stack.pop() {
        match op {
            Op::Enter(v, via) => {
                let mut undo = Vec::new();
                if let Some(e) = via {
                    let mut deltas: Vec<(ArcKey, Rational)> = Vec::new();
                    for &key in q_keys_with_arc.get(&e).into_iter().flatten() {
                        let target: ArcKey = key.iter().copied().filter(|&b| b != e).collect();
                        deltas.push((target, q.get(key)));
                    }
                    for key in live_with_arc.get(&e).cloned().unwrap_or_default() {
                        let Some(value) = map.get(&key).filter(|v| !v.is_zero()).cloned() else {
                            continue;
                        };
                        let target: ArcKey = key.iter().copied().filter(|&b| b != e).collect();
                        deltas.push((target, value));
                    }
                    for (target, value) in deltas {
                        match map.entry(target.clone()) {
                            Entry::Occupied(mut slot) => *slot.get_mut() += &value,
                            Entry::Vacant(slot) => {
                                slot.insert(value.clone());
                                for &b in &target {
                                    live_with_arc.entry(b).or_default().push(target.clone());
                                }
                            }
                        }
                        undo.push((target, value));
                    }
                }
                stack.push(Op::Undo(undo));
                visit(v, &GammaView { map: &map });
                for &c in children[v as usize].iter().rev() {
                    stack.push(Op::Enter(c, ns.nonbasic_arc(c)));
                }
            }
            Op::Undo(undo) => {
                for (key, value) in undo.into_iter().rev() {
                    if let Some(slot) = map.get_mut(&key) {
                        *slot -= value;
                    }
                }
            }
        }
    }
}

/// Materialized gamma values `γ(B, x)` for all vertices `x ≠ s` and the
/// relevant subsets with `|B| ≤ d − 1` disjoint from the nonbasic path of
/// `x`; absent entries are zero. Values with `|B| = d` equal `q(B)` directly
/// and are not stored.
#[derive(Debug, Clone)]
pub struct GammaTable {
    d: u32,
    per_vertex: Vec<HashMap<ArcKey, Rational>>,
}

impl GammaTable {
    pub fn d(&self) -> u32 {
        self.d
    }

    /// `γ(B, x)` for `|B| ≤ d − 1` and `B` disjoint from `N_x`.
    pub fn get(&self, key: &[ArcId], x: VertexId) -> Rational {
        let mut k = key.to_vec();
        k.sort_unstable();
        self.per_vertex[x as usize]
            .get(&k)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Number of stored nonzero entries.
    pub fn entry_count(&self) -> usize {
        self.per_vertex.iter().map(|m| m.len()).sum()
    }
}

/// Builds the full gamma table by walking the nonbasic in-tree; the stored
/// value is `q(B) + γ'(B, x)`.
pub fn compute_gamma(q: &OrderDCost, ns: &NonbasicSystem, dag: &Dag) -> GammaTable {
    let max_len = (q.d() - 1) as usize;
    let mut path_arcs: Vec<Vec<ArcId>> = vec![Vec::new(); dag.vertex_count() as usize];
    for v in dag.vertices() {
        if v != dag.source() {
            path_arcs[v as usize] = nonbasic_path(ns, dag, v)
                .expect("non-source vertices have a nonbasic path")
                .arc_set();
        }
    }
    let mut per_vertex: Vec<HashMap<ArcKey, Rational>> =
        vec![HashMap::new(); dag.vertex_count() as usize];
    walk_gamma(dag, ns, q, |v, view| {
        let on_path = &path_arcs[v as usize];
        let valid = |key: &ArcKey| {
            key.len() <= max_len && key.iter().all(|a| on_path.binary_search(a).is_err())
        };
        let mut table: HashMap<ArcKey, Rational> = HashMap::new();
        for (key, value) in view.entries() {
            if valid(key) {
                table.insert(key.clone(), value.clone());
            }
        }
        for (key, value) in q.entries() {
            if valid(key) {
                *table.entry(key.clone()).or_insert_with(Rational::zero) += value;
            }
        }
        table.retain(|_, value| !value.is_zero());
        per_vertex[v as usize] = table;
    });
    GammaTable {
        d: q.d(),
        per_vertex,
    }
}

pub(crate) fn remove_sorted(key: &[ArcId], drop: &[ArcId]) -> ArcKey {
    key.iter()
        .copied()
        .filter(|a| drop.binary_search(a).is_err())
        .collect()
}

fn insert_sorted(key: &[ArcId], a: ArcId) -> ArcKey {
    let mut k = key.to_vec();
    let pos = k.partition_point(|&b| b < a);
    k.insert(pos, a);
    k
}

/// Builds the order-(d−1) instance `I^(a)` attached to the strongly basic arc
/// `a = (u, v)`: the graph restricted to the arcs on s-u paths with sink `u`,
/// and cost
/// `q^(a)(B) = Σ_{C ⊆ N_u, |C| ≤ d−|B|} q(B∪C) − Σ_{C ⊆ a·N_v, |C| ≤ d−|B|} q(B∪C)`
/// read off the gamma table, so that evaluating `q^(a)` over an s-u path `P`
/// yields `f(P·N_u) − f(P·a·N_v)`.
///
/// Candidate subsets `B` are enumerated from the stored keys of `q` minus the
/// nonbasic-path arcs; everything else is provably zero.
pub fn corresponding_apec_instance(
    a: ArcId,
    q: &OrderDCost,
    ns: &NonbasicSystem,
    dag: &Dag,
    gamma: &GammaTable,
) -> Result<ApecInstance> {
    let d = q.d();
    if d < 2 {
        return Err(Error::OrderMismatch(d as usize, 2));
    }
    if !dag.has_arc(a) {
        return Err(Error::UnknownArc(a));
    }
    if !ns.is_strongly_basic(dag, a) {
        return Err(Error::NotStronglyBasic(a));
    }
    let arc = dag.arc(a);
    let sub = restrict_to_prefix_subgraph(dag, arc.tail)?;
    let to_sub: HashMap<ArcId, ArcId> = sub
        .arc_labels()
        .iter()
        .enumerate()
        .map(|(i, &old)| (old, (i + 1) as ArcId))
        .collect();
    let n_u = nonbasic_path(ns, dag, arc.tail)?.arc_set();
    let n_v = nonbasic_path(ns, dag, arc.head)?.arc_set();

    let mut candidates: BTreeSet<ArcKey> = BTreeSet::new();
    for (key, _) in q.entries() {
        let mut variants = vec![remove_sorted(key, &n_u), remove_sorted(key, &n_v)];
        if key.binary_search(&a).is_ok() {
            let mut without_a = remove_sorted(key, &n_v);
            without_a.retain(|&b| b != a);
            variants.push(without_a);
        }
        for b in variants {
            if b.len() < d as usize && b.iter().all(|id| to_sub.contains_key(id)) {
                candidates.insert(b);
            }
        }
    }

    let mut q_sub = OrderDCost::with_arc_count(d - 1, sub.arc_count());
    for b in candidates {
        let with_a = insert_sorted(&b, a);
        let second = if with_a.len() == d as usize {
            q.get(&with_a)
        } else {
            gamma.get(&with_a, arc.head)
        };
        let value = gamma.get(&b, arc.tail) - gamma.get(&b, arc.head) - second;
        if !value.is_zero() {
            let sub_key: ArcKey = b.iter().map(|id| to_sub[id]).collect();
            q_sub.set(&sub_key, value)?;
        }
    }
    ApecInstance::new(sub, q_sub)
}

/// The cost function with value `beta` on every arc leaving the source and 0
/// elsewhere; it is in reduced form with respect to every nonbasic system.
pub fn source_beta(dag: &Dag, beta: &Rational) -> LinearCost {
    let mut c = LinearCost::zero(dag);
    if !beta.is_zero() {
        for &a in dag.out_arcs(dag.source()) {
            c.set(a, beta.clone()).expect("source arcs exist in the dag");
        }
    }
    c
}

/// Decides all-paths-equal-cost for any order. Order 1 runs the dynamic
/// program; higher orders are equal-cost exactly when the instance is
/// linearizable with a reduced-form cost of source-`β` shape.
pub fn solve_apec(inst: &ApecInstance) -> Result<ApecVerdict> {
    if inst.order() == 1 {
        return solve_apec1(inst);
    }
    let dag = &inst.dag;
    let ns = choose_nonbasic_system(dag);
    match linearize(dag, &inst.q, &ns)? {
        LinVerdict::NotLinearizable(w) => {
            let sys = w.two_path_system(dag, &ns)?;
            let four = sys.four_paths();
            let mut hi = 0;
            let mut lo = 0;
            let costs = four
                .iter()
                .map(|p| eval_order_d(&inst.q, p))
                .collect::<Result<Vec<_>>>()?;
            for i in 1..4 {
                if costs[i] > costs[hi] {
                    hi = i;
                }
                if costs[i] < costs[lo] {
                    lo = i;
                }
            }
            debug_assert_ne!(costs[hi], costs[lo]);
            Ok(ApecVerdict::Unequal {
                witness: (four[hi].clone(), four[lo].clone()),
            })
        }
        LinVerdict::Linearizable(c) => {
            // Equal-cost iff the reduced form is source_beta: zero on every
            // strongly basic arc and one common value on the source arcs.
            for a in ns.strongly_basic_arcs(dag) {
                if !c.get(a).is_zero() {
                    let arc = dag.arc(a);
                    let prefix = dag
                        .some_path(dag.source(), arc.tail)
                        .expect("strongly basic tails are reachable");
                    let through = prefix
                        .push_arc(dag, a)
                        .concat(&nonbasic_path(&ns, dag, arc.head)?);
                    let around = prefix.concat(&nonbasic_path(&ns, dag, arc.tail)?);
                    debug_assert_ne!(
                        eval_order_d(&inst.q, &through).unwrap(),
                        eval_order_d(&inst.q, &around).unwrap()
                    );
                    return Ok(ApecVerdict::Unequal {
                        witness: (through, around),
                    });
                }
            }
            let sources = dag.out_arcs(dag.source());
            let beta = c.get(sources[0]);
            for &sa in &sources[1..] {
                if c.get(sa) != beta {
                    let first = source_arc_path(dag, &ns, sources[0])?;
                    let other = source_arc_path(dag, &ns, sa)?;
                    debug_assert_ne!(
                        eval_order_d(&inst.q, &other).unwrap(),
                        eval_order_d(&inst.q, &first).unwrap()
                    );
                    return Ok(ApecVerdict::Unequal {
                        witness: (other, first),
                    });
                }
            }
            Ok(ApecVerdict::AllEqual { beta })
        }
    }
}

fn source_arc_path(dag: &Dag, ns: &NonbasicSystem, a: ArcId) -> Result<Path> {
    let arc = dag.arc(a);
    let head_to_sink = nonbasic_path(ns, dag, arc.head)?;
    Ok(Path::new_unchecked(arc.tail, arc.head, vec![a]).concat(&head_to_sink))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costs::{linear_as_order_d, rat};
    use crate::graph::{build_dag, enumerate_paths};

    fn diamond() -> Dag {
        build_dag(4, &[(0, 1), (1, 3), (0, 2), (2, 3)], 0, 3).unwrap()
    }

    fn double_diamond() -> Dag {
        build_dag(
            7,
            &[
                (0, 1),
                (0, 2),
                (1, 3),
                (2, 3),
                (3, 4),
                (3, 5),
                (4, 6),
                (5, 6),
            ],
            0,
            6,
        )
        .unwrap()
    }

    #[test]
    fn apec1_single_path_always_equal() {
        let dag = build_dag(3, &[(0, 1), (1, 2)], 0, 2).unwrap();
        let mut q = OrderDCost::zero(1, &dag);
        q.set(&[], rat(3)).unwrap();
        q.set(&[1], rat(5)).unwrap();
        q.set(&[2], rat(-1)).unwrap();
        let verdict = solve_apec1(&ApecInstance::new(dag, q).unwrap()).unwrap();
        assert_eq!(verdict, ApecVerdict::AllEqual { beta: rat(7) });
    }

    #[test]
    fn apec1_detects_unequal_diamond() {
        let dag = diamond();
        let mut q = OrderDCost::zero(1, &dag);
        q.set(&[1], rat(1)).unwrap();
        q.set(&[3], rat(2)).unwrap();
        let inst = ApecInstance::new(dag, q).unwrap();
        let verdict = solve_apec1(&inst).unwrap();
        let (p1, p2) = verdict.witness().expect("unequal");
        assert_ne!(
            eval_order_d(&inst.q, p1).unwrap(),
            eval_order_d(&inst.q, p2).unwrap()
        );
    }

    #[test]
    fn apec1_symmetric_diamond_is_equal() {
        let dag = diamond();
        let mut q = OrderDCost::zero(1, &dag);
        for a in 1..=4 {
            q.set(&[a], rat(1)).unwrap();
        }
        let verdict = solve_apec1(&ApecInstance::new(dag, q).unwrap()).unwrap();
        assert_eq!(verdict, ApecVerdict::AllEqual { beta: rat(2) });
    }

    #[test]
    fn gamma_at_sink_equals_q() {
        let dag = diamond();
        let ns = choose_nonbasic_system(&dag);
        let mut q = OrderDCost::zero(2, &dag);
        q.set(&[], rat(7)).unwrap();
        q.set(&[2], rat(3)).unwrap();
        let gamma = compute_gamma(&q, &ns, &dag);
        assert_eq!(gamma.get(&[], dag.sink()), rat(7));
        assert_eq!(gamma.get(&[2], dag.sink()), rat(3));
    }

    #[test]
    fn gamma_on_diamond_middle_vertex() {
        let dag = diamond();
        let ns = choose_nonbasic_system(&dag);
        let mut q = OrderDCost::zero(2, &dag);
        q.set(&[], rat(7)).unwrap();
        q.set(&[2], rat(3)).unwrap();
        // N_u = ((u,t)) so γ(∅, u) = q(∅) + q({(u,t)}).
        let gamma = compute_gamma(&q, &ns, &dag);
        assert_eq!(gamma.get(&[], 1), rat(10));
    }

    #[test]
    fn gamma_matches_direct_enumeration() {
        // γ(B, x) = Σ_{C ⊆ N_x, |C| ≤ d−|B|} q(B ∪ C) by brute force over all
        // subsets of the nonbasic path.
        let dag = double_diamond();
        let ns = choose_nonbasic_system(&dag);
        let d = 3;
        let mut q = OrderDCost::zero(d, &dag);
        q.set(&[], rat(2)).unwrap();
        q.set(&[1], rat(-3)).unwrap();
        q.set(&[5], rat(4)).unwrap();
        q.set(&[2, 6], rat(1)).unwrap();
        q.set(&[5, 7], rat(-2)).unwrap();
        q.set(&[1, 5, 7], rat(9)).unwrap();
        q.set(&[3, 6, 8], rat(5)).unwrap();
        let gamma = compute_gamma(&q, &ns, &dag);
        let all_arcs: Vec<ArcId> = (1..=dag.arc_count()).collect();
        for x in 1..dag.vertex_count() {
            let nx = nonbasic_path(&ns, &dag, x).unwrap().arc_set();
            // All B over the whole arc set with |B| ≤ d−1.
            for mask in 0u32..(1 << all_arcs.len()) {
                let b: Vec<ArcId> = all_arcs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &a)| a)
                    .collect();
                if b.len() > (d - 1) as usize || b.iter().any(|a| nx.contains(a)) {
                    continue;
                }
                let mut expected = Rational::zero();
                for cmask in 0u32..(1 << nx.len()) {
                    let c: Vec<ArcId> = nx
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| cmask >> i & 1 == 1)
                        .map(|(_, &a)| a)
                        .collect();
                    if c.len() <= (d as usize - b.len()) {
                        let mut key = b.clone();
                        key.extend(&c);
                        key.sort_unstable();
                        expected += q.get(&key);
                    }
                }
                assert_eq!(gamma.get(&b, x), expected, "B={b:?} x={x}");
            }
        }
    }

    #[test]
    fn corresponding_instance_of_zero_is_zero() {
        let dag = double_diamond();
        let ns = choose_nonbasic_system(&dag);
        let q = OrderDCost::zero(2, &dag);
        let gamma = compute_gamma(&q, &ns, &dag);
        let inst = corresponding_apec_instance(6, &q, &ns, &dag, &gamma).unwrap();
        assert!(inst.q.is_zero());
        assert_eq!(inst.order(), 1);
    }

    #[test]
    fn corresponding_instance_rejects_non_strongly_basic() {
        let dag = double_diamond();
        let ns = choose_nonbasic_system(&dag);
        let q = OrderDCost::zero(2, &dag);
        let gamma = compute_gamma(&q, &ns, &dag);
        // Arc 1 leaves the source, arc 5 is nonbasic.
        assert!(matches!(
            corresponding_apec_instance(1, &q, &ns, &dag, &gamma),
            Err(Error::NotStronglyBasic(1))
        ));
        assert!(matches!(
            corresponding_apec_instance(5, &q, &ns, &dag, &gamma),
            Err(Error::NotStronglyBasic(5))
        ));
    }

    #[test]
    fn corresponding_instance_worked_example() {
        // q({(x1,u),(u,y1)}) = 1 and nothing else; with nonbasic arcs chosen
        // by smallest id the strongly basic arc is a = (u,y2) = arc 6, so
        // the key {3,5} meets N_u = (5,7) in arc 5:
        // q^(a)({3}) = γ({3},u) − γ({3},y2) − γ({3,6},y2)
        //            = q({3,5}) − 0 − 0 = 1.
        let dag = double_diamond();
        let ns = choose_nonbasic_system(&dag);
        let mut q = OrderDCost::zero(2, &dag);
        q.set(&[3, 5], rat(1)).unwrap();
        let gamma = compute_gamma(&q, &ns, &dag);
        let inst = corresponding_apec_instance(6, &q, &ns, &dag, &gamma).unwrap();
        // Sub-dag is the first diamond; arc labels 1..4 are preserved.
        assert_eq!(inst.dag.arc_count(), 4);
        assert_eq!(inst.q.entry_count(), 1);
        assert_eq!(inst.q.get(&[3]), rat(1));
        // Eq. (6) identity: eval(q^(a), P) = f(P·N_u) − f(P·a·N_v).
        for p in enumerate_paths(&inst.dag, 16).unwrap() {
            let lifted = p.relabel(&inst.dag);
            let n_u = nonbasic_path(&ns, &dag, 3).unwrap();
            let n_v = nonbasic_path(&ns, &dag, 5).unwrap();
            let through_nu = lifted.concat(&n_u);
            let through_a = lifted.push_arc(&dag, 6).concat(&n_v);
            assert_eq!(
                eval_order_d(&inst.q, &p).unwrap(),
                eval_order_d(&q, &through_nu).unwrap()
                    - eval_order_d(&q, &through_a).unwrap()
            );
        }
    }

    #[test]
    fn corresponding_instance_of_linear_cost_is_constant() {
        // For q embedding a linear c, only the empty set survives:
        // q^(a)(∅) = c(N_u) − c(a) − c(N_v).
        let dag = double_diamond();
        let ns = choose_nonbasic_system(&dag);
        let mut c = LinearCost::zero(&dag);
        for a in 1..=8 {
            c.set(a, rat(a as i64)).unwrap();
        }
        let q = linear_as_order_d(&c, 2);
        let gamma = compute_gamma(&q, &ns, &dag);
        let inst = corresponding_apec_instance(6, &q, &ns, &dag, &gamma).unwrap();
        // N_u = (5,7): c = 12; a = 6; N_v = (8): c = 8.
        assert_eq!(inst.q.empty_set_value(), rat(12 - 6 - 8));
        assert!(inst
            .q
            .entries()
            .all(|(key, _)| key.is_empty()));
    }

    #[test]
    fn source_beta_costs_beta_on_every_path() {
        let dag = double_diamond();
        let c = source_beta(&dag, &rat(5));
        assert_eq!(c.get(1), rat(5));
        assert_eq!(c.get(2), rat(5));
        assert_eq!(c.get(3), rat(0));
        for p in enumerate_paths(&dag, 16).unwrap() {
            assert_eq!(crate::costs::eval_linear(&c, &p).unwrap(), rat(5));
        }
        assert!(source_beta(&dag, &rat(0)).is_zero());
    }

    #[test]
    fn source_beta_is_reduced_form_fixed_point() {
        let dag = double_diamond();
        let ns = choose_nonbasic_system(&dag);
        let c = source_beta(&dag, &rat(7));
        assert_eq!(crate::costs::reduce_form(&c, &ns, &dag), c);
    }

    #[test]
    fn solve_apec_zero_instance_any_order() {
        for d in [1, 2, 3] {
            let dag = double_diamond();
            let q = OrderDCost::zero(d, &dag);
            let verdict = solve_apec(&ApecInstance::new(dag, q).unwrap()).unwrap();
            assert_eq!(verdict, ApecVerdict::AllEqual { beta: rat(0) });
        }
    }

    #[test]
    fn solve_apec_detects_planted_interaction() {
        let dag = double_diamond();
        let mut q = OrderDCost::zero(2, &dag);
        q.set(&[3, 5], rat(1)).unwrap();
        let inst = ApecInstance::new(dag, q).unwrap();
        let verdict = solve_apec(&inst).unwrap();
        let (p1, p2) = verdict.witness().expect("paths cost 1,0,0,0");
        assert_ne!(
            eval_order_d(&inst.q, p1).unwrap(),
            eval_order_d(&inst.q, p2).unwrap()
        );
    }

    #[test]
    fn solve_apec_source_beta_instance() {
        let dag = double_diamond();
        let q = linear_as_order_d(&source_beta(&dag, &rat(7)), 2);
        let inst = ApecInstance::new(dag, q).unwrap();
        let verdict = solve_apec(&inst).unwrap();
        assert_eq!(verdict, ApecVerdict::AllEqual { beta: rat(7) });
    }

    #[test]
    fn solve_apec_matches_exhaustive_enumeration() {
        // Linear costs that keep both diamonds balanced: all paths equal.
        let dag = double_diamond();
        let mut c = LinearCost::zero(&dag);
        c.set(1, rat(1)).unwrap();
        c.set(2, rat(2)).unwrap();
        c.set(3, rat(4)).unwrap();
        c.set(4, rat(3)).unwrap();
        c.set(5, rat(6)).unwrap();
        c.set(6, rat(1)).unwrap();
        c.set(7, rat(0)).unwrap();
        c.set(8, rat(5)).unwrap();
        let q = linear_as_order_d(&c, 2);
        let inst = ApecInstance::new(dag, q).unwrap();
        let verdict = solve_apec(&inst).unwrap();
        let costs: Vec<Rational> = enumerate_paths(&inst.dag, 16)
            .unwrap()
            .iter()
            .map(|p| eval_order_d(&inst.q, p).unwrap())
            .collect();
        let all_equal = costs.windows(2).all(|w| w[0] == w[1]);
        assert_eq!(verdict.all_equal(), all_equal);
        if let Some(beta) = verdict.beta() {
            assert_eq!(beta, &costs[0]);
        }
    }
}
