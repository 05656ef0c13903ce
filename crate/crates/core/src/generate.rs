//! Seeded instance generators: graph families and cost modes, deterministic
//! per (family, parameters, seed).

use std::collections::BTreeSet;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::costs::{linear_as_order_d, LinearCost, OrderDCost, Rational};
use crate::graph::{build_dag, choose_nonbasic_system, count_paths, prune_to_covered, ArcId, Dag, VertexId};
use crate::oracle::TwoPathSystem;
use crate::subspace::{assemble_matrix, kernel_basis, CostVector, SubsetIndex};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    RandomDag,
    Layered,
    Grid,
    TwoPath,
    DoubleDiamond,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random-dag" => Ok(Family::RandomDag),
            "layered" => Ok(Family::Layered),
            "grid" => Ok(Family::Grid),
            "two-path" => Ok(Family::TwoPath),
            "double-diamond" => Ok(Family::DoubleDiamond),
            other => Err(Error::UnsupportedParams(format!(
                "unknown family `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Arbitrary,
    Linearizable,
    NonLinearizable,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "arbitrary" => Ok(Mode::Arbitrary),
            "linearizable" => Ok(Mode::Linearizable),
            "non-linearizable" => Ok(Mode::NonLinearizable),
            other => Err(Error::UnsupportedParams(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeneratorSpec {
    pub family: Family,
    /// Target arc count; families with rigid shapes round it to the nearest
    /// feasible size.
    pub m: Option<u32>,
    pub width: Option<u32>,
    pub layers: Option<u32>,
    pub rows: Option<u32>,
    pub cols: Option<u32>,
    pub d: u32,
    pub seed: u64,
    pub mode: Mode,
}

impl GeneratorSpec {
    pub fn new(family: Family, d: u32, seed: u64, mode: Mode) -> Self {
        GeneratorSpec {
            family,
            m: None,
            width: None,
            layers: None,
            rows: None,
            cols: None,
            d,
            seed,
            mode,
        }
    }
}

/// A generated instance; `planted` carries the violated two-path system of
/// non-linearizable mode.
#[derive(Debug, Clone)]
pub struct Generated {
    pub dag: Dag,
    pub q: OrderDCost,
    pub planted: Option<TwoPathSystem>,
}

/// The fixed 8-arc double diamond: two diamonds chained through one middle
/// vertex.
pub fn double_diamond_dag() -> Dag {
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
    .expect("fixed graph is valid")
}

/// Two internally disjoint s-t paths with `len1` and `len2` arcs.
pub fn two_path_dag(len1: u32, len2: u32) -> Result<Dag> {
    if len1 < 1 || len2 < 1 {
        return Err(Error::UnsupportedParams(
            "two-path lengths must be at least 1".into(),
        ));
    }
    let n = len1 + len2; // s, t and len_i - 1 inner vertices per path
    let t = n - 1;
    let mut arcs = Vec::new();
    let mut next_inner = 1;
    for len in [len1, len2] {
        let mut cur = 0;
        for step in 0..len {
            let nxt = if step + 1 == len {
                t
            } else {
                let v = next_inner;
                next_inner += 1;
                v
            };
            arcs.push((cur, nxt));
            cur = nxt;
        }
    }
    build_dag(n, &arcs, 0, t)
}

/// `layers` layers of `width` vertices: the source feeds the first layer,
/// consecutive layers are complete bipartite, the last layer feeds the sink.
/// `m = 2·width + width²·(layers − 1)`.
pub fn layered_dag(width: u32, layers: u32) -> Result<Dag> {
    if width < 1 || layers < 1 {
        return Err(Error::UnsupportedParams(
            "layered graphs need width ≥ 1 and layers ≥ 1".into(),
        ));
    }
    let n = 2 + width * layers;
    let t = n - 1;
    let vertex = |layer: u32, i: u32| 1 + layer * width + i;
    let mut arcs = Vec::new();
    for i in 0..width {
        arcs.push((0, vertex(0, i)));
    }
    for layer in 1..layers {
        for i in 0..width {
            for j in 0..width {
                arcs.push((vertex(layer - 1, i), vertex(layer, j)));
            }
        }
    }
    for i in 0..width {
        arcs.push((vertex(layers - 1, i), t));
    }
    build_dag(n, &arcs, 0, t)
}

/// Directed two-dimensional grid: arcs go right and down from the top-left
/// source to the bottom-right sink.
pub fn grid_dag(rows: u32, cols: u32) -> Result<Dag> {
    if rows < 1 || cols < 1 || rows * cols < 2 {
        return Err(Error::UnsupportedParams(
            "grid needs at least two vertices".into(),
        ));
    }
    let vertex = |i: u32, j: u32| i * cols + j;
    let mut arcs = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            if j + 1 < cols {
                arcs.push((vertex(i, j), vertex(i, j + 1)));
            }
            if i + 1 < rows {
                arcs.push((vertex(i, j), vertex(i + 1, j)));
            }
        }
    }
    build_dag(rows * cols, &arcs, 0, rows * cols - 1)
}

/// Random covered dag with at most `m_target` arcs: a random backbone s-t
/// path plus random forward arcs, pruned to the covered part.
fn random_dag(m_target: u32, rng: &mut ChaCha8Rng) -> Result<Dag> {
    let m = m_target.max(1);
    let mut n = (m / 2 + 3).max(4);
    while (n - 1) * n / 2 < m {
        n += 1;
    }
    let mut arcs: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
    let mut v = 0;
    while v < n - 1 {
        let step = rng.random_range(1..=3.min(n - 1 - v));
        arcs.insert((v, v + step));
        v += step;
    }
    let mut guard = 0;
    while (arcs.len() as u32) < m && guard < 10_000 {
        let tail = rng.random_range(0..n - 1);
        let head = rng.random_range(tail + 1..n);
        arcs.insert((tail, head));
        guard += 1;
    }
    let arc_list: Vec<(VertexId, VertexId)> = arcs.into_iter().collect();
    let dag = build_dag(n, &arc_list, 0, n - 1)?;
    prune_to_covered(&dag)
}

fn random_value(rng: &mut ChaCha8Rng, max_den: i64) -> Rational {
    let mut num = 0;
    while num == 0 {
        num = rng.random_range(-9..=9);
    }
    let den = rng.random_range(1..=max_den);
    Rational::new(num.into(), den.into())
}

fn arbitrary_costs(dag: &Dag, d: u32, rng: &mut ChaCha8Rng) -> Result<OrderDCost> {
    let m = dag.arc_count();
    let mut q = OrderDCost::zero(d, dag);
    let entries = 2 * m as usize + 2;
    for _ in 0..entries {
        let k = rng.random_range(0..=d.min(m)) as usize;
        let key = sample_arcs(m, k, rng);
        q.add(&key, random_value(rng, 4))?;
    }
    Ok(q)
}

fn sample_arcs(m: u32, k: usize, rng: &mut ChaCha8Rng) -> Vec<ArcId> {
    let mut set = BTreeSet::new();
    while set.len() < k {
        set.insert(rng.random_range(1..=m));
    }
    set.into_iter().collect()
}

/// Dimension of the instance space, saturating.
fn space_dimension(m: u32, d: u32) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for k in 0..=d.min(m) {
        if k > 0 {
            binom = binom.saturating_mul((m - k + 1) as u128) / k as u128;
        }
        total = total.saturating_add(binom);
    }
    total
}

fn linearizable_costs(dag: &Dag, d: u32, rng: &mut ChaCha8Rng) -> Result<OrderDCost> {
    let m = dag.arc_count();
    if space_dimension(m, d) <= 64 {
        // Sample from the span of a computed basis of the subspace.
        let ns = choose_nonbasic_system(dag);
        let matrix = assemble_matrix(dag, d, &ns)?;
        let basis = kernel_basis(&matrix);
        let index = SubsetIndex::new(m, d);
        let mut x = CostVector::zeros(index.len());
        if !basis.is_empty() {
            let picks = rng.random_range(1..=basis.len().min(6));
            for _ in 0..picks {
                let i = rng.random_range(0..basis.len());
                let coeff = random_value(rng, 2);
                x.scaled_add(&coeff, &basis.vectors()[i]);
            }
        }
        return x.to_order_d(&index);
    }
    // Large graphs: embed a random linear cost, plus a constant shift that
    // every source arc absorbs.
    let mut c = LinearCost::zero(dag);
    for arc in dag.arcs() {
        c.set(arc.id, random_value(rng, 2))?;
    }
    let mut q = linear_as_order_d(&c, d);
    q.set(&[], random_value(rng, 2))?;
    Ok(q)
}

/// A planting spot: a vertex with two distinct incoming s-v paths and two
/// distinct outgoing v-t paths.
fn find_plant(dag: &Dag, rng: &mut ChaCha8Rng) -> Option<TwoPathSystem> {
    let mut spots = Vec::new();
    for v in dag.vertices() {
        if v == dag.source() || v == dag.sink() {
            continue;
        }
        let into = dag.first_paths(dag.source(), v, 2);
        let from = dag.first_paths(v, dag.sink(), 2);
        if into.len() == 2 && from.len() == 2 {
            spots.push((v, into, from));
        }
    }
    if spots.is_empty() {
        return None;
    }
    let (vertex, into, from) = spots.swap_remove(rng.random_range(0..spots.len()));
    let [p1, p2] = <[_; 2]>::try_from(into).expect("two paths");
    let [q1, q2] = <[_; 2]>::try_from(from).expect("two paths");
    Some(TwoPathSystem {
        vertex,
        p1,
        p2,
        q1,
        q2,
    })
}

fn non_linearizable_costs(
    dag: &Dag,
    d: u32,
    rng: &mut ChaCha8Rng,
) -> Result<(OrderDCost, TwoPathSystem)> {
    if d < 2 {
        return Err(Error::UnsupportedParams(
            "non-linearizable instances need order d ≥ 2".into(),
        ));
    }
    let mut q = linearizable_costs(dag, d, rng)?;
    let Some(system) = find_plant(dag, rng) else {
        return Err(Error::UnsupportedParams(
            "every instance of this graph is linearizable; nothing to plant".into(),
        ));
    };
    // One interaction entry supported on a private arc of P1 and a private
    // arc of Q1 unbalances exactly one of the four concatenations.
    let b1 = *system
        .p1
        .arcs()
        .iter()
        .find(|a| !system.p2.contains_arc(**a))
        .expect("distinct paths have a private arc");
    let b2 = *system
        .q1
        .arcs()
        .iter()
        .find(|a| !system.q2.contains_arc(**a))
        .expect("distinct paths have a private arc");
    let delta = Rational::from_integer(rng.random_range(1..=9).into());
    let key = if b1 < b2 { [b1, b2] } else { [b2, b1] };
    q.add(&key, delta)?;
    Ok((q, system))
}

/// Generates the instance described by `spec`; identical specs produce
/// identical instances.
pub fn generate(spec: &GeneratorSpec) -> Result<Generated> {
    if spec.d < 1 {
        return Err(Error::UnsupportedParams("order d must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let dag = match spec.family {
        Family::DoubleDiamond => double_diamond_dag(),
        Family::TwoPath => {
            let m = spec
                .m
                .ok_or_else(|| Error::UnsupportedParams("two-path needs --m".into()))?;
            if m < 2 {
                return Err(Error::UnsupportedParams("two-path needs m ≥ 2".into()));
            }
            two_path_dag(m.div_ceil(2), m / 2)?
        }
        Family::Layered => match (spec.width, spec.layers, spec.m) {
            (Some(w), Some(l), _) => layered_dag(w, l)?,
            (None, None, Some(m)) => {
                // Width 2 lattice: m = 4·layers, rounded up.
                let layers = m.div_ceil(4).max(1);
                layered_dag(2, layers)?
            }
            _ => {
                return Err(Error::UnsupportedParams(
                    "layered needs --width and --layers, or --m".into(),
                ))
            }
        },
        Family::Grid => match (spec.rows, spec.cols) {
            (Some(r), Some(c)) => grid_dag(r, c)?,
            _ => return Err(Error::UnsupportedParams("grid needs --rows and --cols".into())),
        },
        Family::RandomDag => {
            let m = spec
                .m
                .ok_or_else(|| Error::UnsupportedParams("random-dag needs --m".into()))?;
            random_dag(m, &mut rng)?
        }
    };
    debug_assert!(dag.is_covered());
    debug_assert!(count_paths(&dag) >= 1);
    match spec.mode {
        Mode::Arbitrary => {
            let q = arbitrary_costs(&dag, spec.d, &mut rng)?;
            Ok(Generated {
                dag,
                q,
                planted: None,
            })
        }
        Mode::Linearizable => {
            let q = linearizable_costs(&dag, spec.d, &mut rng)?;
            Ok(Generated {
                dag,
                q,
                planted: None,
            })
        }
        Mode::NonLinearizable => {
            let (q, planted) = non_linearizable_costs(&dag, spec.d, &mut rng)?;
            Ok(Generated {
                dag,
                q,
                planted: Some(planted),
            })
        }
    }
}
