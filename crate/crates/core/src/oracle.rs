//! Independent brute-force deciders used as ground truth: two-path-system
//! enumeration, the exchange-equality test, and direct linearization by
//! exact rational elimination over the path-incidence system.

use num_traits::Zero;

use crate::costs::{eval_order_d, LinearCost, OrderDCost, Rational};
use crate::graph::{
    choose_nonbasic_system, enumerate_paths, nonbasic_path, ArcId, Dag, Path,
};
use crate::linalg;
use crate::linearizer::{FailureWitness, LinVerdict};
use crate::{Error, Result};

/// Two s-v paths and two v-t paths; the degenerate cases `p1 = p2`,
/// `q1 = q2`, `v = s` and `v = t` are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoPathSystem {
    pub vertex: crate::graph::VertexId,
    pub p1: Path,
    pub p2: Path,
    pub q1: Path,
    pub q2: Path,
}

impl TwoPathSystem {
    /// The four concatenations `p1·q1, p1·q2, p2·q1, p2·q2`.
    pub fn four_paths(&self) -> [Path; 4] {
        [
            self.p1.concat(&self.q1),
            self.p1.concat(&self.q2),
            self.p2.concat(&self.q1),
            self.p2.concat(&self.q2),
        ]
    }
}

/// The exchange equality `f(P1·Q1) + f(P2·Q2) = f(P1·Q2) + f(P2·Q1)` under
/// the order-d cost `q`; this is exactly linearizability of the system.
pub fn two_path_linearizable(tps: &TwoPathSystem, q: &OrderDCost) -> Result<bool> {
    let [p11, p12, p21, p22] = tps.four_paths();
    Ok(
        eval_order_d(q, &p11)? + eval_order_d(q, &p22)?
            == eval_order_d(q, &p12)? + eval_order_d(q, &p21)?,
    )
}

/// Every two-path system of the covered dag, deduplicated by `p1 ≤ p2` and
/// `q1 ≤ q2` lexicographically; errors when more than `limit` systems exist.
pub fn enumerate_two_path_systems(dag: &Dag, limit: usize) -> Result<Vec<TwoPathSystem>> {
    let mut out = Vec::new();
    for v in dag.vertices() {
        let into = dag
            .paths_between(dag.source(), v, limit.saturating_add(1))
            .map_err(|_| Error::TooManySystems(limit))?;
        let from = dag
            .paths_between(v, dag.sink(), limit.saturating_add(1))
            .map_err(|_| Error::TooManySystems(limit))?;
        for i in 0..into.len() {
            for j in i..into.len() {
                for k in 0..from.len() {
                    for l in k..from.len() {
                        if out.len() == limit {
                            return Err(Error::TooManySystems(limit));
                        }
                        out.push(TwoPathSystem {
                            vertex: v,
                            p1: into[i].clone(),
                            p2: into[j].clone(),
                            q1: from[k].clone(),
                            q2: from[l].clone(),
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// True iff every two-path system passes the exchange equality; on covered
/// acyclic digraphs this decides linearizability.
pub fn oracle_linearize_tps(dag: &Dag, q: &OrderDCost, limit: usize) -> Result<bool> {
    for tps in enumerate_two_path_systems(dag, limit)? {
        if !two_path_linearizable(&tps, q)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Brute-force search for a strongly basic arc whose `val(a, P)` depends on
/// the s-u path, by evaluating the defining paths directly.
pub(crate) fn find_pi_violation(
    dag: &Dag,
    q: &OrderDCost,
    ns: &crate::graph::NonbasicSystem,
    limit: usize,
) -> Result<Option<FailureWitness>> {
    for a in ns.strongly_basic_arcs(dag) {
        let arc = dag.arc(a);
        let n_u = nonbasic_path(ns, dag, arc.tail)?;
        let n_v = nonbasic_path(ns, dag, arc.head)?;
        let a_n_v = Path::new_unchecked(arc.tail, arc.head, vec![a]).concat(&n_v);
        let mut first: Option<(Rational, Path)> = None;
        for p in dag.paths_between(dag.source(), arc.tail, limit)? {
            let val =
                eval_order_d(q, &p.concat(&a_n_v))? - eval_order_d(q, &p.concat(&n_u))?;
            match &first {
                None => first = Some((val, p)),
                Some((v0, p0)) => {
                    if *v0 != val {
                        return Ok(Some(FailureWitness {
                            arc: a,
                            path_a: p0.clone(),
                            path_b: p,
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Decides linearizability by solving the exact linear system
/// `{ Σ_{a ∈ P} c(a) = f(P) : P ∈ P_st }` over the unknown arc costs with
/// fraction-free elimination. On YES the solution is returned in reduced
/// form; on NO a violated two-path system is located by brute force.
pub fn oracle_linearize_lp(dag: &Dag, q: &OrderDCost, limit: usize) -> Result<LinVerdict> {
    let paths = enumerate_paths(dag, limit)?;
    let m = dag.arc_count() as usize;
    let mut rows = Vec::with_capacity(paths.len());
    let mut rhs = Vec::with_capacity(paths.len());
    for p in &paths {
        let mut row = vec![Rational::zero(); m];
        for &a in p.arcs() {
            row[(a - 1) as usize] = Rational::from_integer(1.into());
        }
        rows.push(row);
        rhs.push(eval_order_d(q, p)?);
    }
    let ns = choose_nonbasic_system(dag);
    match linalg::solve_any(m, rows, rhs) {
        Some(solution) => {
            let mut c = LinearCost::zero(dag);
            for (i, value) in solution.into_iter().enumerate() {
                c.set((i + 1) as ArcId, value)?;
            }
            Ok(LinVerdict::Linearizable(crate::costs::reduce_form(
                &c, &ns, dag,
            )))
        }
        None => {
            let witness = find_pi_violation(dag, q, &ns, limit)?
                .expect("non-linearizable instances violate property (pi) at some strongly basic arc");
            Ok(LinVerdict::NotLinearizable(witness))
        }
    }
}

/// A linearizing cost supported on at most four representative arcs of a
/// linearizable two-path system, reproducing all four concatenation costs.
pub fn two_path_linearizing_cost(tps: &TwoPathSystem, q: &OrderDCost) -> Result<LinearCost> {
    if !two_path_linearizable(tps, q)? {
        return Err(Error::NotLinearizable);
    }
    let mut c = LinearCost::with_arc_count(q.arc_count());
    let f = |p: &Path| eval_order_d(q, p);
    // First arc of `path` not contained in any of the other three segments.
    let representative = |path: &Path, others: [&Path; 3]| -> ArcId {
        *path
            .arcs()
            .iter()
            .find(|&&a| others.iter().all(|o| !o.contains_arc(a)))
            .expect("distinct segments of a two-path system have a private arc")
    };
    match (tps.p1 == tps.p2, tps.q1 == tps.q2) {
        (true, true) => {
            let full = tps.p1.concat(&tps.q1);
            let first = full.arcs()[0];
            c.set(first, f(&full)?)?;
        }
        (true, false) => {
            let e1 = representative(&tps.q1, [&tps.q2, &tps.p1, &tps.p2]);
            let e2 = representative(&tps.q2, [&tps.q1, &tps.p1, &tps.p2]);
            c.set(e1, f(&tps.p1.concat(&tps.q1))?)?;
            c.set(e2, f(&tps.p1.concat(&tps.q2))?)?;
        }
        (false, true) => {
            let a1 = representative(&tps.p1, [&tps.p2, &tps.q1, &tps.q2]);
            let a2 = representative(&tps.p2, [&tps.p1, &tps.q1, &tps.q2]);
            c.set(a1, f(&tps.p1.concat(&tps.q1))?)?;
            c.set(a2, f(&tps.p2.concat(&tps.q1))?)?;
        }
        (false, false) => {
            let a1 = representative(&tps.p1, [&tps.p2, &tps.q1, &tps.q2]);
            let a2 = representative(&tps.p2, [&tps.p1, &tps.q1, &tps.q2]);
            let e1 = representative(&tps.q1, [&tps.q2, &tps.p1, &tps.p2]);
            // The 4x4 system pinned by c(e2) = 0.
            let f12 = f(&tps.p1.concat(&tps.q2))?;
            c.set(a1, f12.clone())?;
            c.set(a2, f(&tps.p2.concat(&tps.q2))?)?;
            c.set(e1, f(&tps.p1.concat(&tps.q1))? - f12)?;
        }
    }
    Ok(c)
}
