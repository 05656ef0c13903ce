//! The linear subspace of all linearizable order-d instances on a fixed
//! covered acyclic digraph, computed as the kernel of an explicitly
//! assembled matrix.
//!
//! Instances are vectors indexed by the arc subsets of size at most d. The
//! residuals collected by the linearization recursion — order-1 dynamic
//! program rows at the base, reduced-form/source-shape rows at intermediate
//! levels — are linear in the instance, so running the pipeline on every
//! standard basis vector yields the columns of a matrix whose kernel is
//! exactly the subspace.

use std::collections::HashMap;

use num_traits::Zero;
use rayon::prelude::*;

use crate::apec::{compute_gamma, corresponding_apec_instance, ApecInstance, BfsTree};
use crate::costs::{eval_order_d, ArcKey, LinearCost, OrderDCost, Rational};
use crate::graph::{choose_nonbasic_system, nonbasic_path, ArcId, Dag, NonbasicSystem, Path};
use crate::linalg;
use crate::{Error, Result};

/// The arc subsets of size at most d over arcs `1..=m`, in lexicographic
/// order with the empty set first; fixes the coordinate system of
/// [`CostVector`]s.
#[derive(Debug, Clone)]
pub struct SubsetIndex {
    arc_count: u32,
    d: u32,
    subsets: Vec<ArcKey>,
    position: HashMap<ArcKey, usize>,
}

impl SubsetIndex {
    pub fn new(arc_count: u32, d: u32) -> Self {
        let mut subsets = Vec::new();
        let mut current = ArcKey::new();
        fn rec(current: &mut ArcKey, start: ArcId, m: u32, d: usize, out: &mut Vec<ArcKey>) {
            out.push(current.clone());
            if current.len() == d {
                return;
            }
            for a in start..=m {
                current.push(a);
                rec(current, a + 1, m, d, out);
                current.pop();
            }
        }
        rec(&mut current, 1, arc_count, d as usize, &mut subsets);
        let position = subsets
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i))
            .collect();
        SubsetIndex {
            arc_count,
            d,
            subsets,
            position,
        }
    }

    /// Dimension `D = Σ_{k=0..d} C(m, k)`.
    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    pub fn arc_count(&self) -> u32 {
        self.arc_count
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn subsets(&self) -> &[ArcKey] {
        &self.subsets
    }

    pub fn position(&self, key: &[ArcId]) -> Option<usize> {
        let mut k = key.to_vec();
        k.sort_unstable();
        self.position.get(&k).copied()
    }
}

/// An order-d instance as a dense coordinate vector over a [`SubsetIndex`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostVector {
    values: Vec<Rational>,
}

impl CostVector {
    pub fn zeros(dim: usize) -> Self {
        CostVector {
            values: vec![Rational::zero(); dim],
        }
    }

    pub fn from_order_d(index: &SubsetIndex, q: &OrderDCost) -> Result<Self> {
        let mut v = CostVector::zeros(index.len());
        for (key, value) in q.entries() {
            let pos = index
                .position(key)
                .ok_or(Error::OrderMismatch(key.len(), index.d()))?;
            v.values[pos] = value.clone();
        }
        Ok(v)
    }

    pub fn to_order_d(&self, index: &SubsetIndex) -> Result<OrderDCost> {
        if self.values.len() != index.len() {
            return Err(Error::DimensionMismatch {
                got: self.values.len(),
                expected: index.len(),
            });
        }
        let mut q = OrderDCost::with_arc_count(index.d(), index.arc_count());
        for (key, value) in index.subsets().iter().zip(&self.values) {
            if !value.is_zero() {
                q.set(key, value.clone())?;
            }
        }
        Ok(q)
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn get(&self, i: usize) -> &Rational {
        &self.values[i]
    }

    pub fn set(&mut self, i: usize, value: Rational) {
        self.values[i] = value;
    }

    pub fn scaled_add(&mut self, coeff: &Rational, other: &CostVector) {
        for (slot, value) in self.values.iter_mut().zip(&other.values) {
            *slot += coeff * value;
        }
    }

    fn dot(&self, other: &CostVector) -> Rational {
        let mut sum = Rational::zero();
        for (a, b) in self.values.iter().zip(&other.values) {
            if !a.is_zero() && !b.is_zero() {
                sum += a * b;
            }
        }
        sum
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }
}

/// The residual matrix: an instance vector is linearizable exactly when the
/// matrix maps it to zero.
#[derive(Debug, Clone)]
pub struct LinearMapMatrix {
    index: SubsetIndex,
    rows: Vec<Vec<Rational>>,
}

impl LinearMapMatrix {
    pub fn index(&self) -> &SubsetIndex {
        &self.index
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn dimension(&self) -> usize {
        self.index.len()
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    /// The residual vector `M x`.
    pub fn apply(&self, x: &CostVector) -> Result<Vec<Rational>> {
        if x.dim() != self.dimension() {
            return Err(Error::DimensionMismatch {
                got: x.dim(),
                expected: self.dimension(),
            });
        }
        Ok(self
            .rows
            .iter()
            .map(|row| {
                let mut sum = Rational::zero();
                for (a, b) in row.iter().zip(x.values()) {
                    if !a.is_zero() && !b.is_zero() {
                        sum += a * b;
                    }
                }
                sum
            })
            .collect())
    }
}

/// A basis of the subspace of linearizable instances.
#[derive(Debug, Clone)]
pub struct Basis {
    dimension: usize,
    vectors: Vec<CostVector>,
}

impl Basis {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vectors(&self) -> &[CostVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Residual rows of the linearization decision for one instance: zero on
/// every coordinate iff the instance is linearizable.
fn lin_residuals(dag: &Dag, ns: &NonbasicSystem, q: &OrderDCost, out: &mut Vec<Rational>) -> Result<()> {
    if q.d() == 1 {
        // Order-1 instances are always linearizable: no constraints.
        return Ok(());
    }
    let gamma = compute_gamma(q, ns, dag);
    for a in ns.strongly_basic_arcs(dag) {
        let inst = corresponding_apec_instance(a, q, ns, dag, &gamma)?;
        apec_residuals(&inst, out)?;
    }
    Ok(())
}

/// Residual rows of the all-paths-equal-cost decision: the order-1 dynamic
/// program closes every arc at the base; otherwise the linearization rows
/// plus the requirement that the reduced-form cost has source shape.
fn apec_residuals(inst: &ApecInstance, out: &mut Vec<Rational>) -> Result<()> {
    let dag = &inst.dag;
    if inst.order() == 1 {
        let tree = BfsTree::new(dag);
        let mut y: Vec<Rational> = vec![Rational::zero(); dag.vertex_count() as usize];
        for &v in dag.topo_vertices() {
            if let Some(a) = tree.parent[v as usize] {
                let t = dag.arc(a).tail as usize;
                y[v as usize] = &y[t] + inst.q.get(&[a]);
            }
        }
        for arc in dag.arcs() {
            out.push(&y[arc.tail as usize] + inst.q.get(&[arc.id]) - &y[arc.head as usize]);
        }
        return Ok(());
    }
    let ns = choose_nonbasic_system(dag);
    lin_residuals(dag, &ns, &inst.q, out)?;
    let cost = reduced_cost_formula(dag, &ns, &inst.q)?;
    for a in ns.strongly_basic_arcs(dag) {
        out.push(cost.get(a));
    }
    let sources = dag.out_arcs(dag.source());
    let first = cost.get(sources[0]);
    for &a in &sources[1..] {
        out.push(cost.get(a) - &first);
    }
    Ok(())
}

/// The linear formula behind the reduced-form linearizing cost: meaningful
/// as a cost function whenever the residuals vanish, linear in the instance
/// always.
fn reduced_cost_formula(dag: &Dag, ns: &NonbasicSystem, q: &OrderDCost) -> Result<LinearCost> {
    if q.d() == 1 {
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
        return Ok(crate::costs::reduce_form(&c, ns, dag));
    }
    let gamma = compute_gamma(q, ns, dag);
    let mut c = LinearCost::zero(dag);
    for a in ns.strongly_basic_arcs(dag) {
        let inst = corresponding_apec_instance(a, q, ns, dag, &gamma)?;
        c.set(a, -beta_formula(&inst)?)?;
    }
    for &a in dag.out_arcs(dag.source()) {
        let arc = dag.arc(a);
        let completion = Path::new_unchecked(arc.tail, arc.head, vec![a])
            .concat(&nonbasic_path(ns, dag, arc.head)?);
        c.set(a, eval_order_d(q, &completion)?)?;
    }
    Ok(c)
}

/// The linear formula for the common path cost of an all-equal instance.
fn beta_formula(inst: &ApecInstance) -> Result<Rational> {
    let dag = &inst.dag;
    if inst.order() == 1 {
        let tree = BfsTree::new(dag);
        let fixed = tree.path_to(dag, dag.sink());
        let mut beta = inst.q.empty_set_value();
        for &a in fixed.arcs() {
            beta += inst.q.get(&[a]);
        }
        return Ok(beta);
    }
    let ns = choose_nonbasic_system(dag);
    let cost = reduced_cost_formula(dag, &ns, &inst.q)?;
    Ok(cost.get(dag.out_arcs(dag.source())[0]))
}

fn residual_vector(dag: &Dag, ns: &NonbasicSystem, q: &OrderDCost) -> Result<Vec<Rational>> {
    let mut out = Vec::new();
    lin_residuals(dag, ns, q, &mut out)?;
    Ok(out)
}

/// Assembles the residual matrix column by column: one pipeline run per
/// standard basis vector of the instance space.
pub fn assemble_matrix(dag: &Dag, d: u32, ns: &NonbasicSystem) -> Result<LinearMapMatrix> {
    assemble_matrix_with(dag, d, ns, false)
}

/// As [`assemble_matrix`]; columns are built on the rayon pool when
/// `parallel` is set.
pub fn assemble_matrix_with(
    dag: &Dag,
    d: u32,
    ns: &NonbasicSystem,
    parallel: bool,
) -> Result<LinearMapMatrix> {
    let index = SubsetIndex::new(dag.arc_count(), d);
    let column_for = |key: &ArcKey| -> Result<Vec<Rational>> {
        let mut q = OrderDCost::with_arc_count(d, dag.arc_count());
        q.set(key, Rational::from_integer(1.into()))?;
        residual_vector(dag, ns, &q)
    };
    let columns: Vec<Vec<Rational>> = if parallel {
        index
            .subsets()
            .par_iter()
            .map(column_for)
            .collect::<Result<_>>()?
    } else {
        index
            .subsets()
            .iter()
            .map(column_for)
            .collect::<Result<_>>()?
    };
    let k = columns.first().map(Vec::len).unwrap_or(0);
    debug_assert!(columns.iter().all(|c| c.len() == k));
    let mut rows = vec![vec![Rational::zero(); index.len()]; k];
    for (j, column) in columns.into_iter().enumerate() {
        for (i, value) in column.into_iter().enumerate() {
            if !value.is_zero() {
                rows[i][j] = value;
            }
        }
    }
    Ok(LinearMapMatrix { index, rows })
}

/// Kernel of the residual matrix by exact Gauss-Jordan elimination; the
/// basis is in the echelon pattern fixed by the lexicographic column order.
pub fn kernel_basis(matrix: &LinearMapMatrix) -> Basis {
    let vectors = linalg::kernel(matrix.rows.clone(), matrix.dimension())
        .into_iter()
        .map(|values| CostVector { values })
        .collect();
    Basis {
        dimension: matrix.dimension(),
        vectors,
    }
}

/// Orthogonal projection of `x` onto the span of the basis, solving the
/// Gram system exactly; linearizable vectors project to themselves.
pub fn project_onto_subspace(x: &CostVector, basis: &Basis) -> Result<CostVector> {
    if x.dim() != basis.dimension() {
        return Err(Error::DimensionMismatch {
            got: x.dim(),
            expected: basis.dimension(),
        });
    }
    if basis.is_empty() {
        return Ok(CostVector::zeros(basis.dimension()));
    }
    let k = basis.len();
    let gram: Vec<Vec<Rational>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| basis.vectors[i].dot(&basis.vectors[j]))
                .collect()
        })
        .collect();
    let rhs: Vec<Rational> = (0..k).map(|i| basis.vectors[i].dot(x)).collect();
    let coefficients = linalg::solve_any(k, gram, rhs)
        .expect("Gram matrix of independent vectors is invertible");
    let mut projection = CostVector::zeros(basis.dimension());
    for (coeff, vector) in coefficients.iter().zip(&basis.vectors) {
        if !coeff.is_zero() {
            projection.scaled_add(coeff, vector);
        }
    }
    Ok(projection)
}
