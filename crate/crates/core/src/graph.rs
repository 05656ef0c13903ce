//! Acyclic digraphs with a designated source and sink, paths as arc
//! sequences, topological arc orders, nonbasic-arc systems and
//! reachability-restricted subgraphs.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::{Error, Result};

/// Dense vertex id, `0..n`.
pub type VertexId = u32;
/// Dense arc id, `1..=m`.
pub type ArcId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub id: ArcId,
    pub tail: VertexId,
    pub head: VertexId,
}

/// An acyclic digraph with source `s` and sink `t`.
///
/// Vertex ids are dense `0..n`, arc ids dense `1..=m`. Graphs produced by
/// [`prune_to_covered`] and [`restrict_to_prefix_subgraph`] carry side tables
/// mapping their dense ids back to the ids of the graph they were derived
/// from; freshly built graphs carry identity tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    vertex_count: u32,
    arcs: Vec<Arc>,
    source: VertexId,
    sink: VertexId,
    out_arcs: Vec<Vec<ArcId>>,
    in_arcs: Vec<Vec<ArcId>>,
    topo_vertices: Vec<VertexId>,
    topo_position: Vec<u32>,
    vertex_labels: Vec<u32>,
    arc_labels: Vec<ArcId>,
}

impl Dag {
    pub fn vertex_count(&self) -> u32 {
        self.vertex_count
    }

    pub fn arc_count(&self) -> u32 {
        self.arcs.len() as u32
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn sink(&self) -> VertexId {
        self.sink
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Panics when `id` is not a valid arc id of this graph.
    pub fn arc(&self, id: ArcId) -> Arc {
        self.arcs[(id - 1) as usize]
    }

    pub fn has_arc(&self, id: ArcId) -> bool {
        id >= 1 && (id as usize) <= self.arcs.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        0..self.vertex_count
    }

    /// Outgoing arc ids of `v`, ascending.
    pub fn out_arcs(&self, v: VertexId) -> &[ArcId] {
        &self.out_arcs[v as usize]
    }

    /// Incoming arc ids of `v`, ascending.
    pub fn in_arcs(&self, v: VertexId) -> &[ArcId] {
        &self.in_arcs[v as usize]
    }

    /// Vertices in a deterministic topological order (lexicographically
    /// smallest one).
    pub fn topo_vertices(&self) -> &[VertexId] {
        &self.topo_vertices
    }

    pub fn topo_position(&self, v: VertexId) -> u32 {
        self.topo_position[v as usize]
    }

    /// Label of `v` in the graph this one was derived from.
    pub fn vertex_label(&self, v: VertexId) -> u32 {
        self.vertex_labels[v as usize]
    }

    /// Label of arc `id` in the graph this one was derived from.
    pub fn arc_label(&self, id: ArcId) -> ArcId {
        self.arc_labels[(id - 1) as usize]
    }

    pub fn arc_labels(&self) -> &[ArcId] {
        &self.arc_labels
    }

    /// True when every arc lies on at least one source-sink path.
    pub fn is_covered(&self) -> bool {
        let fwd = self.reachable_from(self.source);
        let bwd = self.reaching_to(self.sink);
        self.arcs
            .iter()
            .all(|a| fwd[a.tail as usize] && bwd[a.head as usize])
    }

    /// Vertices reachable from `v` (including `v`), as a membership vector.
    pub fn reachable_from(&self, v: VertexId) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count as usize];
        let mut stack = vec![v];
        seen[v as usize] = true;
        while let Some(x) = stack.pop() {
            for &a in &self.out_arcs[x as usize] {
                let h = self.arc(a).head;
                if !seen[h as usize] {
                    seen[h as usize] = true;
                    stack.push(h);
                }
            }
        }
        seen
    }

    /// Vertices that can reach `v` (including `v`), as a membership vector.
    pub fn reaching_to(&self, v: VertexId) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count as usize];
        let mut stack = vec![v];
        seen[v as usize] = true;
        while let Some(x) = stack.pop() {
            for &a in &self.in_arcs[x as usize] {
                let t = self.arc(a).tail;
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// Full reachability: `result[v]` answers "is `u` reachable from `v`"
    /// through [`Reachability::reaches`].
    pub fn reachability(&self) -> Reachability {
        let words = (self.vertex_count as usize).div_ceil(64);
        let mut bits = vec![0u64; words * self.vertex_count as usize];
        for &v in self.topo_vertices.iter().rev() {
            let vi = v as usize;
            bits[vi * words + vi / 64] |= 1u64 << (vi % 64);
            for &a in &self.out_arcs[vi] {
                let h = self.arc(a).head as usize;
                for w in 0..words {
                    let word = bits[h * words + w];
                    bits[vi * words + w] |= word;
                }
            }
        }
        Reachability { words, bits }
    }

    /// Any `from`-to-`to` path, following smallest arc ids; `None` when
    /// unreachable.
    pub fn some_path(&self, from: VertexId, to: VertexId) -> Option<Path> {
        if from == to {
            return Some(Path::trivial(from));
        }
        let back = self.reaching_to(to);
        if !back[from as usize] {
            return None;
        }
        let mut arcs = Vec::new();
        let mut cur = from;
        while cur != to {
            let &a = self.out_arcs[cur as usize]
                .iter()
                .find(|&&a| back[self.arc(a).head as usize])
                .expect("vertex on a path to `to` has a continuing arc");
            arcs.push(a);
            cur = self.arc(a).head;
        }
        Some(Path::new_unchecked(from, to, arcs))
    }

    /// All `from`-to-`to` paths in lexicographic arc order; errors when more
    /// than `limit` exist.
    pub fn paths_between(&self, from: VertexId, to: VertexId, limit: usize) -> Result<Vec<Path>> {
        let (paths, truncated) = self.collect_paths(from, to, limit);
        if truncated {
            return Err(Error::TooManyPaths(limit));
        }
        Ok(paths)
    }

    /// The first `cap` `from`-to-`to` paths in lexicographic arc order.
    pub fn first_paths(&self, from: VertexId, to: VertexId, cap: usize) -> Vec<Path> {
        self.collect_paths(from, to, cap).0
    }

    fn collect_paths(&self, from: VertexId, to: VertexId, cap: usize) -> (Vec<Path>, bool) {
        let back = self.reaching_to(to);
        let mut found = Vec::new();
        if !back[from as usize] {
            return (found, false);
        }
        // Iterative DFS; out-arc lists are ascending, so paths come out in
        // lexicographic order.
        let mut stack: Vec<(VertexId, usize)> = vec![(from, 0)];
        let mut arcs: Vec<ArcId> = Vec::new();
        if from == to {
            if cap == 0 {
                return (found, true);
            }
            found.push(Path::trivial(from));
            return (found, false);
        }
        while !stack.is_empty() {
            let top = stack.len() - 1;
            let v = stack[top].0;
            if v == to && !arcs.is_empty() {
                if found.len() == cap {
                    return (found, true);
                }
                found.push(Path::new_unchecked(from, to, arcs.clone()));
                stack.pop();
                arcs.pop();
                continue;
            }
            let outs = &self.out_arcs[v as usize];
            let mut advanced = false;
            while stack[top].1 < outs.len() {
                let a = outs[stack[top].1];
                stack[top].1 += 1;
                let h = self.arc(a).head;
                if back[h as usize] {
                    arcs.push(a);
                    stack.push((h, 0));
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                stack.pop();
                arcs.pop();
            }
        }
        (found, false)
    }
}

/// Dense bitset answering vertex-to-vertex reachability queries.
pub struct Reachability {
    words: usize,
    bits: Vec<u64>,
}

impl Reachability {
    /// True when `to` is reachable from `from` (vertices reach themselves).
    pub fn reaches(&self, from: VertexId, to: VertexId) -> bool {
        let t = to as usize;
        self.bits[from as usize * self.words + t / 64] >> (t % 64) & 1 == 1
    }
}

/// A directed path specified as a sequence of arcs. The empty sequence is the
/// trivial path at its declared vertex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    start: VertexId,
    end: VertexId,
    arcs: Vec<ArcId>,
}

impl Path {
    /// The trivial path of length 0 at `v`.
    pub fn trivial(v: VertexId) -> Self {
        Path {
            start: v,
            end: v,
            arcs: Vec::new(),
        }
    }

    /// Builds a path from a nonempty arc sequence, validating that
    /// consecutive arcs chain head-to-tail and no vertex repeats.
    pub fn from_arcs(dag: &Dag, arcs: Vec<ArcId>) -> Result<Self> {
        let first = *arcs.first().ok_or(Error::MalformedPath)?;
        for &a in &arcs {
            if !dag.has_arc(a) {
                return Err(Error::UnknownArc(a));
            }
        }
        let start = dag.arc(first).tail;
        let mut seen = vec![start];
        let mut cur = start;
        for &a in &arcs {
            let arc = dag.arc(a);
            if arc.tail != cur {
                return Err(Error::MalformedPath);
            }
            cur = arc.head;
            if seen.contains(&cur) {
                return Err(Error::MalformedPath);
            }
            seen.push(cur);
        }
        Ok(Path {
            start,
            end: cur,
            arcs,
        })
    }

    pub(crate) fn new_unchecked(start: VertexId, end: VertexId, arcs: Vec<ArcId>) -> Self {
        Path { start, end, arcs }
    }

    pub fn start(&self) -> VertexId {
        self.start
    }

    pub fn end(&self) -> VertexId {
        self.end
    }

    pub fn arcs(&self) -> &[ArcId] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn contains_arc(&self, a: ArcId) -> bool {
        self.arcs.contains(&a)
    }

    /// Concatenation `self · other`; panics unless `other` starts where
    /// `self` ends.
    pub fn concat(&self, other: &Path) -> Path {
        assert_eq!(self.end, other.start, "paths do not chain");
        let mut arcs = self.arcs.clone();
        arcs.extend_from_slice(&other.arcs);
        Path {
            start: self.start,
            end: other.end,
            arcs,
        }
    }

    /// Concatenation `self · a` for an arc starting at the end of `self`.
    pub fn push_arc(&self, dag: &Dag, a: ArcId) -> Path {
        let arc = dag.arc(a);
        assert_eq!(self.end, arc.tail, "arc does not extend the path");
        let mut arcs = self.arcs.clone();
        arcs.push(a);
        Path {
            start: self.start,
            end: arc.head,
            arcs,
        }
    }

    /// Arc ids as a sorted set, for subset queries.
    pub fn arc_set(&self) -> Vec<ArcId> {
        let mut set = self.arcs.clone();
        set.sort_unstable();
        set
    }

    /// Rewrites the path through a relabeling table (`labels[id-1]` is the
    /// target id) and start/end vertex labels; used to lift paths out of
    /// derived subgraphs.
    pub fn relabel(&self, sub: &Dag) -> Path {
        Path {
            start: sub.vertex_label(self.start),
            end: sub.vertex_label(self.end),
            arcs: self.arcs.iter().map(|&a| sub.arc_label(a)).collect(),
        }
    }
}

/// A total order on arcs consistent with arc succession along every path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcOrder {
    order: Vec<ArcId>,
    position: Vec<u32>,
}

impl ArcOrder {
    pub fn order(&self) -> &[ArcId] {
        &self.order
    }

    pub fn position(&self, a: ArcId) -> u32 {
        self.position[(a - 1) as usize]
    }
}

/// One outgoing nonbasic arc per vertex in `V \ {s,t}`; the chosen arcs form
/// an in-tree rooted at the sink spanning `V \ {s}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonbasicSystem {
    nonbasic_of: Vec<Option<ArcId>>,
    member: Vec<bool>,
}

impl NonbasicSystem {
    /// The nonbasic arc leaving `v`, if `v` has one.
    pub fn nonbasic_arc(&self, v: VertexId) -> Option<ArcId> {
        self.nonbasic_of[v as usize]
    }

    /// True when `a` belongs to the system.
    pub fn is_nonbasic(&self, a: ArcId) -> bool {
        self.member[(a - 1) as usize]
    }

    /// True when `a` is basic and does not leave the source.
    pub fn is_strongly_basic(&self, dag: &Dag, a: ArcId) -> bool {
        !self.is_nonbasic(a) && dag.arc(a).tail != dag.source()
    }

    /// Strongly basic arcs in ascending id order.
    pub fn strongly_basic_arcs(&self, dag: &Dag) -> Vec<ArcId> {
        dag.arcs()
            .iter()
            .map(|a| a.id)
            .filter(|&a| self.is_strongly_basic(dag, a))
            .collect()
    }

    /// In-tree children: `children[v]` lists the vertices whose nonbasic arc
    /// points at `v`, ascending.
    pub fn in_tree_children(&self, dag: &Dag) -> Vec<Vec<VertexId>> {
        let mut children = vec![Vec::new(); dag.vertex_count() as usize];
        for (v, arc) in self.nonbasic_of.iter().enumerate() {
            if let Some(a) = arc {
                children[dag.arc(*a).head as usize].push(v as VertexId);
            }
        }
        children
    }
}

/// Builds and validates a [`Dag`]. Rejects cyclic inputs, `s == t`, empty arc
/// lists and out-of-range endpoints.
pub fn build_dag(
    vertex_count: u32,
    arc_list: &[(VertexId, VertexId)],
    source: VertexId,
    sink: VertexId,
) -> Result<Dag> {
    if arc_list.is_empty() {
        return Err(Error::EmptyArcList);
    }
    if source == sink {
        return Err(Error::SourceEqualsSink);
    }
    for &v in [source, sink].iter() {
        if v >= vertex_count {
            return Err(Error::DanglingVertexReference {
                vertex: v,
                count: vertex_count,
            });
        }
    }
    let mut arcs = Vec::with_capacity(arc_list.len());
    let mut out_arcs = vec![Vec::new(); vertex_count as usize];
    let mut in_arcs = vec![Vec::new(); vertex_count as usize];
    for (i, &(tail, head)) in arc_list.iter().enumerate() {
        for &v in [tail, head].iter() {
            if v >= vertex_count {
                return Err(Error::DanglingVertexReference {
                    vertex: v,
                    count: vertex_count,
                });
            }
        }
        if tail == head {
            return Err(Error::CycleDetected);
        }
        let id = (i + 1) as ArcId;
        arcs.push(Arc { id, tail, head });
        out_arcs[tail as usize].push(id);
        in_arcs[head as usize].push(id);
    }

    // Deterministic topological order: Kahn's algorithm with a min-heap gives
    // the lexicographically smallest one; failure to place every vertex means
    // a cycle.
    let mut indeg: Vec<u32> = in_arcs.iter().map(|l| l.len() as u32).collect();
    let mut heap: BinaryHeap<Reverse<VertexId>> = (0..vertex_count)
        .filter(|&v| indeg[v as usize] == 0)
        .map(Reverse)
        .collect();
    let mut topo_vertices = Vec::with_capacity(vertex_count as usize);
    while let Some(Reverse(v)) = heap.pop() {
        topo_vertices.push(v);
        for &a in &out_arcs[v as usize] {
            let h = arcs[(a - 1) as usize].head;
            indeg[h as usize] -= 1;
            if indeg[h as usize] == 0 {
                heap.push(Reverse(h));
            }
        }
    }
    if topo_vertices.len() != vertex_count as usize {
        return Err(Error::CycleDetected);
    }
    let mut topo_position = vec![0u32; vertex_count as usize];
    for (i, &v) in topo_vertices.iter().enumerate() {
        topo_position[v as usize] = i as u32;
    }

    Ok(Dag {
        vertex_count,
        arcs,
        source,
        sink,
        out_arcs,
        in_arcs,
        topo_vertices,
        topo_position,
        vertex_labels: (0..vertex_count).collect(),
        arc_labels: (1..=arc_list.len() as ArcId).collect(),
    })
}

/// Keeps a subset of vertices and arcs, renumbering both densely. Labels
/// record the ids of the graph passed in (one level, not composed), so
/// derived paths lift back exactly one level.
fn subgraph(dag: &Dag, keep_vertex: &[bool], keep_arc: &[bool], sink: VertexId) -> Result<Dag> {
    let mut vertex_map = vec![u32::MAX; dag.vertex_count() as usize];
    let mut vertex_labels = Vec::new();
    for v in dag.vertices() {
        if keep_vertex[v as usize] {
            vertex_map[v as usize] = vertex_labels.len() as u32;
            vertex_labels.push(v);
        }
    }
    let mut arc_list = Vec::new();
    let mut arc_labels = Vec::new();
    for arc in dag.arcs() {
        if keep_arc[(arc.id - 1) as usize] {
            arc_list.push((
                vertex_map[arc.tail as usize],
                vertex_map[arc.head as usize],
            ));
            arc_labels.push(arc.id);
        }
    }
    let mut sub = build_dag(
        vertex_labels.len() as u32,
        &arc_list,
        vertex_map[dag.source() as usize],
        vertex_map[sink as usize],
    )?;
    sub.vertex_labels = vertex_labels;
    sub.arc_labels = arc_labels;
    Ok(sub)
}

/// Restricts to the arcs lying on at least one s-t path. Idempotent; errors
/// with [`Error::NoStPath`] when the sink is unreachable.
pub fn prune_to_covered(dag: &Dag) -> Result<Dag> {
    let fwd = dag.reachable_from(dag.source());
    let bwd = dag.reaching_to(dag.sink());
    if !fwd[dag.sink() as usize] {
        return Err(Error::NoStPath);
    }
    let keep_vertex: Vec<bool> = dag
        .vertices()
        .map(|v| fwd[v as usize] && bwd[v as usize])
        .collect();
    let keep_arc: Vec<bool> = dag
        .arcs()
        .iter()
        .map(|a| fwd[a.tail as usize] && bwd[a.head as usize])
        .collect();
    if !keep_arc.iter().any(|&k| k) {
        return Err(Error::NoStPath);
    }
    subgraph(dag, &keep_vertex, &keep_arc, dag.sink())
}

/// The subgraph `(V_u, A_u)` of vertices and arcs on at least one s-u path,
/// with sink `u`.
pub fn restrict_to_prefix_subgraph(dag: &Dag, u: VertexId) -> Result<Dag> {
    if u == dag.source() {
        return Err(Error::SourceEqualsSink);
    }
    let fwd = dag.reachable_from(dag.source());
    if u as usize >= fwd.len() || !fwd[u as usize] {
        return Err(Error::VertexUnreachable(u));
    }
    let bwd = dag.reaching_to(u);
    let keep_vertex: Vec<bool> = dag
        .vertices()
        .map(|v| fwd[v as usize] && bwd[v as usize])
        .collect();
    let keep_arc: Vec<bool> = dag
        .arcs()
        .iter()
        .map(|a| fwd[a.tail as usize] && bwd[a.head as usize])
        .collect();
    subgraph(dag, &keep_vertex, &keep_arc, u)
}

/// Deterministic topological arc order: repeatedly emit the smallest arc id
/// all of whose predecessors (arcs that can precede it on some path) are
/// already emitted.
pub fn topological_arc_order(dag: &Dag) -> ArcOrder {
    let reach = dag.reachability();
    let m = dag.arc_count() as usize;
    // a' must precede a whenever head(a') reaches tail(a).
    let mut indeg = vec![0u32; m];
    let mut succs: Vec<Vec<usize>> = vec![Vec::new(); m];
    for a in dag.arcs() {
        for b in dag.arcs() {
            if a.id != b.id && reach.reaches(a.head, b.tail) {
                succs[(a.id - 1) as usize].push((b.id - 1) as usize);
                indeg[(b.id - 1) as usize] += 1;
            }
        }
    }
    let mut heap: BinaryHeap<Reverse<usize>> = (0..m).filter(|&i| indeg[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(m);
    while let Some(Reverse(i)) = heap.pop() {
        order.push((i + 1) as ArcId);
        for &j in &succs[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                heap.push(Reverse(j));
            }
        }
    }
    debug_assert_eq!(order.len(), m, "arc dependency graph is acyclic");
    let mut position = vec![0u32; m];
    for (i, &a) in order.iter().enumerate() {
        position[(a - 1) as usize] = i as u32;
    }
    ArcOrder { order, position }
}

/// Picks the outgoing arc with smallest id for every vertex in `V \ {s,t}`
/// of a covered dag and checks the in-tree property.
pub fn choose_nonbasic_system(dag: &Dag) -> NonbasicSystem {
    let mut nonbasic_of = vec![None; dag.vertex_count() as usize];
    let mut member = vec![false; dag.arc_count() as usize];
    for v in dag.vertices() {
        if v == dag.source() || v == dag.sink() {
            continue;
        }
        let a = *dag
            .out_arcs(v)
            .first()
            .expect("covered dag vertices other than the sink have outgoing arcs");
        nonbasic_of[v as usize] = Some(a);
        member[(a - 1) as usize] = true;
    }
    let ns = NonbasicSystem {
        nonbasic_of,
        member,
    };
    // In a covered dag the chosen arcs always form an in-tree rooted at t:
    // following them strictly increases the topological position and only the
    // sink lacks a continuation.
    debug_assert!(dag.vertices().filter(|&v| v != dag.source()).all(|v| {
        let mut cur = v;
        loop {
            match ns.nonbasic_arc(cur) {
                Some(a) => cur = dag.arc(a).head,
                None => break cur == dag.sink(),
            }
        }
    }));
    ns
}

/// The unique v-t path along nonbasic arcs; trivial for `v = t`, an error for
/// `v = s`.
pub fn nonbasic_path(ns: &NonbasicSystem, dag: &Dag, v: VertexId) -> Result<Path> {
    if v == dag.source() {
        return Err(Error::SourceHasNoNonbasicPath);
    }
    let mut arcs = Vec::new();
    let mut cur = v;
    while let Some(a) = ns.nonbasic_arc(cur) {
        arcs.push(a);
        cur = dag.arc(a).head;
    }
    debug_assert_eq!(cur, dag.sink());
    Ok(Path::new_unchecked(v, cur, arcs))
}

/// All s-t paths in lexicographic arc order; errors when more than `limit`
/// paths exist.
pub fn enumerate_paths(dag: &Dag, limit: usize) -> Result<Vec<Path>> {
    dag.paths_between(dag.source(), dag.sink(), limit)
}

/// Number of s-t paths, saturating at `u128::MAX`.
pub fn count_paths(dag: &Dag) -> u128 {
    let mut count = vec![0u128; dag.vertex_count() as usize];
    count[dag.source() as usize] = 1;
    for &v in dag.topo_vertices() {
        if count[v as usize] == 0 {
            continue;
        }
        for &a in dag.out_arcs(v) {
            let h = dag.arc(a).head as usize;
            count[h] = count[h].saturating_add(count[v as usize]);
        }
    }
    count[dag.sink() as usize]
}
