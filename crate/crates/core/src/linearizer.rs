//! Decides linearizability of an order-d instance on a covered acyclic
//! digraph and produces the reduced-form linearizing arc-cost function.
//!
//! For d ≥ 2 the instance is linearizable exactly when, for every strongly
//! basic arc `a = (u, v)`, the attached order-(d−1) instance `I^(a)` has
//! all-paths-equal cost. One walk of the nonbasic in-tree accumulates every
//! `q^(a)` from the gamma recurrence, each `I^(a)` is decided (recursing
//! through orders until the order-1 dynamic program), and the reduced-form
//! cost is assembled from the common costs.

use std::collections::HashMap;

use num_traits::Zero;
use rayon::prelude::*;

use crate::apec::{solve_apec, walk_gamma, ApecInstance, ApecVerdict, GammaTable};
use crate::costs::{
    eval_linear, eval_order_d, reduce_form, ArcKey, LinearCost, OrderDCost, Rational,
};
use crate::graph::{
    enumerate_paths, nonbasic_path, restrict_to_prefix_subgraph, ArcId, Dag, NonbasicSystem, Path,
    VertexId,
};
use crate::oracle::TwoPathSystem;
use crate::{Error, Result};

/// Certificate that an instance is not linearizable: two s-u paths across
/// which `val(a, ·)` of the strongly basic arc differs, hence a violated
/// two-path system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailureWitness {
    pub arc: ArcId,
    pub path_a: Path,
    pub path_b: Path,
}

impl FailureWitness {
    /// The induced two-path system `(u, P, Q, N_u, a·N_v)`; its four paths
    /// violate the exchange equality.
    pub fn two_path_system(&self, dag: &Dag, ns: &NonbasicSystem) -> Result<TwoPathSystem> {
        let arc = dag.arc(self.arc);
        let n_u = nonbasic_path(ns, dag, arc.tail)?;
        let n_v = nonbasic_path(ns, dag, arc.head)?;
        Ok(TwoPathSystem {
            vertex: arc.tail,
            p1: self.path_a.clone(),
            p2: self.path_b.clone(),
            q1: n_u,
            q2: Path::new_unchecked(arc.tail, arc.head, vec![self.arc]).concat(&n_v),
        })
    }
}

/// Outcome of a linearization decision.
#[derive(Debug, Clone)]
pub enum LinVerdict {
    /// The unique reduced-form linearizing cost function.
    Linearizable(LinearCost),
    NotLinearizable(FailureWitness),
}

impl LinVerdict {
    pub fn is_linearizable(&self) -> bool {
        matches!(self, LinVerdict::Linearizable(_))
    }

    pub fn cost(&self) -> Option<&LinearCost> {
        match self {
            LinVerdict::Linearizable(c) => Some(c),
            LinVerdict::NotLinearizable(_) => None,
        }
    }

    pub fn witness(&self) -> Option<&FailureWitness> {
        match self {
            LinVerdict::Linearizable(_) => None,
            LinVerdict::NotLinearizable(w) => Some(w),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LinearizeOptions {
    /// Solve the per-arc subproblems on the rayon pool. The verdict is
    /// identical to the sequential one: the failing arc with smallest id
    /// wins.
    pub parallel: bool,
}

/// Euler intervals of the nonbasic in-tree; `x ∈ subtree(y)` answers
/// "does the nonbasic path of x pass through y", which is exactly
/// "is y's nonbasic arc on N_x" when applied to arc tails.
struct EulerTour {
    tin: Vec<u32>,
    tout: Vec<u32>,
}

impl EulerTour {
    fn new(dag: &Dag, ns: &NonbasicSystem) -> Self {
        let children = ns.in_tree_children(dag);
        let n = dag.vertex_count() as usize;
        let mut tin = vec![0u32; n];
        let mut tout = vec![0u32; n];
        let mut clock = 0u32;
        enum Op {
            Enter(VertexId),
            Leave(VertexId),
        }
        let mut stack = vec![Op::Enter(dag.sink())];
        while let Some(op) = stack.pop() {
            match op {
                Op::Enter(v) => {
                    tin[v as usize] = clock;
                    clock += 1;
                    stack.push(Op::Leave(v));
                    for &c in children[v as usize].iter().rev() {
                        stack.push(Op::Enter(c));
                    }
                }
                Op::Leave(v) => tout[v as usize] = clock,
            }
        }
        EulerTour { tin, tout }
    }

    fn in_subtree(&self, x: VertexId, root: VertexId) -> bool {
        self.tin[root as usize] <= self.tin[x as usize]
            && self.tin[x as usize] < self.tout[root as usize]
    }
}

/// Decides linearizability; see [`linearize_with`].
pub fn linearize(dag: &Dag, q: &OrderDCost, ns: &NonbasicSystem) -> Result<LinVerdict> {
    linearize_with(dag, q, ns, &LinearizeOptions::default())
}

/// Decides linearizability of `(dag, q)` with respect to the nonbasic system
/// `ns` and returns the reduced-form linearizing cost or a failure witness.
pub fn linearize_with(
    dag: &Dag,
    q: &OrderDCost,
    ns: &NonbasicSystem,
    opts: &LinearizeOptions,
) -> Result<LinVerdict> {
    for (key, _) in q.entries() {
        if key.len() > q.d() as usize {
            return Err(Error::OrderMismatch(key.len(), q.d()));
        }
        for &a in key {
            if !dag.has_arc(a) {
                return Err(Error::UnknownArc(a));
            }
        }
    }
    if q.d() == 1 {
        return Ok(LinVerdict::Linearizable(linearize_order_one(dag, q, ns)?));
    }

    let d = q.d();
    let source = dag.source();
    let reach = dag.reachability();
    let euler = EulerTour::new(dag, ns);

    // Arc b lies on the nonbasic path N_x iff b is nonbasic and x sits in the
    // in-tree subtree rooted at b's tail.
    let on_nonbasic_path = |b: ArcId, x: VertexId| -> bool {
        ns.is_nonbasic(b) && euler.in_subtree(x, dag.arc(b).tail)
    };
    // Arc b belongs to A_u iff its head reaches u (tails are always reachable
    // from the source in a covered dag).
    let in_prefix_graph = |b: ArcId, u: VertexId| -> bool {
        let head = dag.arc(b).head;
        head == u || reach.reaches(head, u)
    };

    let strongly_basic = ns.strongly_basic_arcs(dag);
    let mut arcs_by_tail: Vec<Vec<ArcId>> = vec![Vec::new(); dag.vertex_count() as usize];
    let mut arcs_by_head: Vec<Vec<ArcId>> = vec![Vec::new(); dag.vertex_count() as usize];
    for &a in &strongly_basic {
        let arc = dag.arc(a);
        arcs_by_tail[arc.tail as usize].push(a);
        arcs_by_head[arc.head as usize].push(a);
    }
    let mut source_arcs_by_head: Vec<Vec<ArcId>> = vec![Vec::new(); dag.vertex_count() as usize];
    for &a in dag.out_arcs(source) {
        source_arcs_by_head[dag.arc(a).head as usize].push(a);
    }

    // Static postings: stored q-keys containing each strongly basic arc.
    let mut q_keys_with_arc: HashMap<ArcId, Vec<&ArcKey>> = HashMap::new();
    for (key, _) in q.entries() {
        for &b in key {
            q_keys_with_arc.entry(b).or_default().push(key);
        }
    }

    // Accumulates q^(a) per strongly basic arc a = (u, v). In terms of the
    // strict gamma values the two brackets of the attached cost collapse to
    //   q^(a)(B) = γ'(B, u) − γ'(B, v) − q(B ∪ {a}) − γ'(B ∪ {a}, v)
    // (the q(B) parts cancel), collected at the visits of u and v by
    // iterating the live strict table; entries cancelling to zero are
    // dropped on the fly.
    let mut acc: HashMap<ArcId, HashMap<ArcKey, Rational>> = strongly_basic
        .iter()
        .map(|&a| (a, HashMap::new()))
        .collect();
    let mut source_cost: HashMap<ArcId, Rational> = HashMap::new();

    // The static −q(B ∪ {a}) term, independent of the walk.
    for &a in &strongly_basic {
        let u = dag.arc(a).tail;
        for &key in q_keys_with_arc.get(&a).into_iter().flatten() {
            let b: ArcKey = key.iter().copied().filter(|&c| c != a).collect();
            if b.iter().all(|&c| in_prefix_graph(c, u)) {
                let map = acc.get_mut(&a).expect("accumulator exists");
                accumulate(map, b, -q.get(key));
            }
        }
    }

    walk_gamma(dag, ns, q, |x, view| {
        let tail_arcs = &arcs_by_tail[x as usize];
        let head_arcs = &arcs_by_head[x as usize];
        let src_arcs = &source_arcs_by_head[x as usize];
        if tail_arcs.is_empty() && head_arcs.is_empty() && src_arcs.is_empty() {
            return;
        }
        for (entry, g) in view.entries() {
            if entry.iter().any(|&b| on_nonbasic_path(b, x)) {
                // Bookkeeping intermediate, not a gamma value at x.
                continue;
            }
            let small = entry.len() < d as usize;
            if small && !tail_arcs.is_empty() && entry.iter().all(|&b| in_prefix_graph(b, x)) {
                for &a in tail_arcs {
                    let map = acc.get_mut(&a).expect("accumulator exists");
                    accumulate(map, entry.clone(), g.clone());
                }
            }
            for &a in head_arcs {
                let u = dag.arc(a).tail;
                if entry.binary_search(&a).is_ok() {
                    let b: ArcKey = entry.iter().copied().filter(|&c| c != a).collect();
                    if b.iter().all(|&c| in_prefix_graph(c, u)) {
                        let map = acc.get_mut(&a).expect("accumulator exists");
                        accumulate(map, b, -g.clone());
                    }
                } else if small && entry.iter().all(|&b| in_prefix_graph(b, u)) {
                    let map = acc.get_mut(&a).expect("accumulator exists");
                    accumulate(map, entry.clone(), -g.clone());
                }
            }
        }
        for &a in src_arcs {
            // c(s, x) = f(a · N_x) = q(∅) + γ'(∅, x) + q({a}) + γ'({a}, x).
            let mut value = q.empty_set_value() + q.get(&[a]);
            if let Some(g) = view.prime(&[]) {
                value += g;
            }
            if let Some(g) = view.prime(&[a]) {
                value += g;
            }
            source_cost.insert(a, value);
        }
    });

    // Materialize and decide the nontrivial subinstances. Instances whose
    // cost collapsed to a constant (only the empty subset) are trivially
    // all-equal with that constant.
    let mut beta: HashMap<ArcId, Rational> = HashMap::new();
    let mut jobs: Vec<(ArcId, ApecInstance)> = Vec::new();
    let mut sub_cache: HashMap<VertexId, (Dag, HashMap<ArcId, ArcId>)> = HashMap::new();
    for &a in &strongly_basic {
        let entries = acc.remove(&a).expect("accumulator exists");
        if entries.is_empty() {
            beta.insert(a, Rational::zero());
            continue;
        }
        if entries.len() == 1 {
            if let Some(value) = entries.get(&ArcKey::new()) {
                beta.insert(a, value.clone());
                continue;
            }
        }
        let u = dag.arc(a).tail;
        let (sub, to_sub) = match sub_cache.get(&u) {
            Some(cached) => cached.clone(),
            None => {
                let sub = restrict_to_prefix_subgraph(dag, u)?;
                let to_sub: HashMap<ArcId, ArcId> = sub
                    .arc_labels()
                    .iter()
                    .enumerate()
                    .map(|(i, &old)| (old, (i + 1) as ArcId))
                    .collect();
                sub_cache.insert(u, (sub.clone(), to_sub.clone()));
                (sub, to_sub)
            }
        };
        let mut q_sub = OrderDCost::with_arc_count(d - 1, sub.arc_count());
        for (key, value) in entries {
            let sub_key: ArcKey = key.iter().map(|id| to_sub[id]).collect();
            q_sub.set(&sub_key, value)?;
        }
        jobs.push((a, ApecInstance::new(sub, q_sub)?));
    }

    let verdicts: Vec<(ArcId, Result<ApecVerdict>)> = if opts.parallel {
        jobs.par_iter()
            .map(|(a, inst)| (*a, solve_apec(inst)))
            .collect()
    } else {
        jobs.iter().map(|(a, inst)| (*a, solve_apec(inst))).collect()
    };

    let mut failure: Option<FailureWitness> = None;
    for ((a, verdict), (_, inst)) in verdicts.into_iter().zip(&jobs) {
        match verdict? {
            ApecVerdict::AllEqual { beta: b } => {
                beta.insert(a, b);
            }
            ApecVerdict::Unequal { witness } => {
                if failure.as_ref().is_none_or(|f| a < f.arc) {
                    failure = Some(FailureWitness {
                        arc: a,
                        path_a: witness.0.relabel(&inst.dag),
                        path_b: witness.1.relabel(&inst.dag),
                    });
                }
            }
        }
    }
    if let Some(witness) = failure {
        return Ok(LinVerdict::NotLinearizable(witness));
    }

    // Assemble the reduced form: the common cost of I^(a) is
    // f(P·N_u) − f(P·a·N_v), so the linearizing value val(a) is its negation;
    // source arcs take the full cost of their nonbasic completion; nonbasic
    // arcs stay at zero.
    let mut cost = LinearCost::zero(dag);
    for (a, b) in beta {
        cost.set(a, -b)?;
    }
    for (a, value) in source_cost {
        cost.set(a, value)?;
    }
    Ok(LinVerdict::Linearizable(cost))
}

fn accumulate(map: &mut HashMap<ArcKey, Rational>, key: ArcKey, delta: Rational) {
    use std::collections::hash_map::Entry;
    match map.entry(key) {
        Entry::Occupied(mut slot) => {
            *slot.get_mut() += delta;
            if slot.get().is_zero() {
                slot.remove();
            }
        }
        Entry::Vacant(slot) => {
            if !delta.is_zero() {
                slot.insert(delta);
            }
        }
    }
}

/// Order-1 instances are always linearizable: take the singleton values,
/// fold q(∅) onto the source arcs, and reduce.
fn linearize_order_one(dag: &Dag, q: &OrderDCost, ns: &NonbasicSystem) -> Result<LinearCost> {
    let mut c = LinearCost::zero(dag);
    for (key, value) in q.entries() {
        if let [a] = key[..] {
            c.set(a, value.clone())?;
        }
    }
    let constant = q.empty_set_value();
    if !constant.is_zero() {
        for &a in dag.out_arcs(dag.source()) {
            c.add(a, constant.clone())?;
        }
    }
    Ok(reduce_form(&c, ns, dag))
}

/// `val(a)` of a strongly basic arc with certified property (π): the common
/// value of `f(P·a·N_v) − f(P·N_u)` over all s-u paths `P`. Errors with
/// [`Error::PropertyPiViolated`] when the value depends on the path.
pub fn val_of_arc(
    a: ArcId,
    q: &OrderDCost,
    ns: &NonbasicSystem,
    dag: &Dag,
    gamma: &GammaTable,
) -> Result<Rational> {
    let inst = crate::apec::corresponding_apec_instance(a, q, ns, dag, gamma)?;
    match solve_apec(&inst)? {
        ApecVerdict::AllEqual { beta } => Ok(-beta),
        ApecVerdict::Unequal { .. } => Err(Error::PropertyPiViolated(a)),
    }
}

/// True iff `c` reproduces the order-d cost of every s-t path; enumeration is
/// bounded by `limit`.
pub fn verify_linearization(
    dag: &Dag,
    q: &OrderDCost,
    c: &LinearCost,
    limit: usize,
) -> Result<bool> {
    for p in enumerate_paths(dag, limit)? {
        if eval_linear(c, &p)? != eval_order_d(q, &p)? {
            return Ok(false);
        }
    }
    Ok(true)
}
