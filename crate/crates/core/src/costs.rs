//! Linear and order-d interaction cost functions over exact rationals,
//! path-objective evaluation and the reduced-form transformation.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_traits::Zero;

use crate::graph::{ArcId, Dag, NonbasicSystem, Path};
use crate::{Error, Result};

/// Exact rational number; always kept in lowest terms with a positive
/// denominator. Linearizability is an equality-based decision, so there is no
/// floating-point mode anywhere in this crate.
pub type Rational = num_rational::BigRational;

/// Shorthand for an integer-valued [`Rational`].
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Parses `p/q` or a plain integer `p`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    Rational::from_str(s.trim()).map_err(|e| Error::ParseError {
        line: 0,
        message: format!("invalid rational `{s}`: {e}"),
    })
}

/// A canonical arc subset: sorted, deduplicated ids.
pub type ArcKey = Vec<ArcId>;

fn canonical_key(key: &[ArcId]) -> Result<ArcKey> {
    let mut k = key.to_vec();
    k.sort_unstable();
    for w in k.windows(2) {
        if w[0] == w[1] {
            return Err(Error::RepeatedArcInKey(w[0]));
        }
    }
    Ok(k)
}

/// True when the sorted slice `sub` is a subset of the sorted slice `sup`.
pub(crate) fn is_subset(sub: &[ArcId], sup: &[ArcId]) -> bool {
    let mut i = 0;
    for &x in sub {
        while i < sup.len() && sup[i] < x {
            i += 1;
        }
        if i == sup.len() || sup[i] != x {
            return false;
        }
        i += 1;
    }
    true
}

/// A map arc -> rational; arcs without an entry cost 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCost {
    arc_count: u32,
    values: BTreeMap<ArcId, Rational>,
}

impl LinearCost {
    /// The zero function on the arcs of `dag`.
    pub fn zero(dag: &Dag) -> Self {
        Self::with_arc_count(dag.arc_count())
    }

    pub fn with_arc_count(arc_count: u32) -> Self {
        LinearCost {
            arc_count,
            values: BTreeMap::new(),
        }
    }

    pub fn arc_count(&self) -> u32 {
        self.arc_count
    }

    /// Sets `c(arc) = value`; zero entries are not stored.
    pub fn set(&mut self, arc: ArcId, value: Rational) -> Result<()> {
        if arc < 1 || arc > self.arc_count {
            return Err(Error::ArcIdOutOfRange(arc, self.arc_count));
        }
        if value.is_zero() {
            self.values.remove(&arc);
        } else {
            self.values.insert(arc, value);
        }
        Ok(())
    }

    pub fn add(&mut self, arc: ArcId, value: Rational) -> Result<()> {
        let current = self.get(arc);
        self.set(arc, current + value)
    }

    pub fn get(&self, arc: ArcId) -> Rational {
        self.values.get(&arc).cloned().unwrap_or_else(Rational::zero)
    }

    /// Nonzero entries in ascending arc order.
    pub fn iter(&self) -> impl Iterator<Item = (ArcId, &Rational)> {
        self.values.iter().map(|(&a, v)| (a, v))
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// True when no stored entry is negative.
    pub fn is_nonnegative(&self) -> bool {
        self.values.values().all(|v| v >= &Rational::zero())
    }
}

/// A sparse order-d interaction cost function: rational values on canonical
/// arc subsets of size at most d, including the empty set. Absent subsets
/// cost 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderDCost {
    d: u32,
    arc_count: u32,
    entries: BTreeMap<ArcKey, Rational>,
}

impl OrderDCost {
    /// The zero function of order `d` on the arcs of `dag`.
    pub fn zero(d: u32, dag: &Dag) -> Self {
        Self::with_arc_count(d, dag.arc_count())
    }

    pub fn with_arc_count(d: u32, arc_count: u32) -> Self {
        assert!(d >= 1, "interaction order must be at least 1");
        OrderDCost {
            d,
            arc_count,
            entries: BTreeMap::new(),
        }
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn arc_count(&self) -> u32 {
        self.arc_count
    }

    /// Sets `q(key) = value` for a subset of at most d arcs; zero entries are
    /// dropped, `&[]` addresses `q(∅)`.
    pub fn set(&mut self, key: &[ArcId], value: Rational) -> Result<()> {
        let k = self.checked_key(key)?;
        if value.is_zero() {
            self.entries.remove(&k);
        } else {
            self.entries.insert(k, value);
        }
        Ok(())
    }

    pub fn add(&mut self, key: &[ArcId], value: Rational) -> Result<()> {
        let k = self.checked_key(key)?;
        let current = self.entries.get(&k).cloned().unwrap_or_else(Rational::zero);
        let next = current + value;
        if next.is_zero() {
            self.entries.remove(&k);
        } else {
            self.entries.insert(k, next);
        }
        Ok(())
    }

    fn checked_key(&self, key: &[ArcId]) -> Result<ArcKey> {
        if key.len() > self.d as usize {
            return Err(Error::OrderMismatch(key.len(), self.d));
        }
        for &a in key {
            if a < 1 || a > self.arc_count {
                return Err(Error::ArcIdOutOfRange(a, self.arc_count));
            }
        }
        canonical_key(key)
    }

    pub fn get(&self, key: &[ArcId]) -> Rational {
        match canonical_key(key) {
            Ok(k) => self.entries.get(&k).cloned().unwrap_or_else(Rational::zero),
            Err(_) => Rational::zero(),
        }
    }

    pub fn empty_set_value(&self) -> Rational {
        self.entries
            .get(&Vec::new())
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Nonzero entries in lexicographic key order (`∅` first).
    pub fn entries(&self) -> impl Iterator<Item = (&ArcKey, &Rational)> {
        self.entries.iter()
    }

    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `SPP(P, c) = Σ_{a ∈ P} c(a)`.
pub fn eval_linear(c: &LinearCost, p: &Path) -> Result<Rational> {
    let mut sum = Rational::zero();
    for &a in p.arcs() {
        if a < 1 || a > c.arc_count() {
            return Err(Error::UnknownArc(a));
        }
        sum += c.get(a);
    }
    Ok(sum)
}

/// `SPP_d(P, q) = Σ_{S ⊆ P, |S| ≤ d} q(S)`, including the `S = ∅` term.
///
/// Iterates over the stored keys only, adding those contained in `P`.
pub fn eval_order_d(q: &OrderDCost, p: &Path) -> Result<Rational> {
    for &a in p.arcs() {
        if a < 1 || a > q.arc_count() {
            return Err(Error::UnknownArc(a));
        }
    }
    let path_set = p.arc_set();
    let mut sum = Rational::zero();
    for (key, value) in q.entries() {
        if is_subset(key, &path_set) {
            sum += value;
        }
    }
    Ok(sum)
}

/// The reduced form of `c`: the unique linear function with value 0 on every
/// nonbasic arc and the same cost as `c` on every s-t path.
///
/// Uses vertex potentials `φ(v) = c(N_v)`, `φ(s) = 0` and
/// `red(c)(u,v) = c(u,v) + φ(v) − φ(u)`; path costs telescope and nonbasic
/// arcs cancel. Runs in O(n + m).
pub fn reduce_form(c: &LinearCost, ns: &NonbasicSystem, dag: &Dag) -> LinearCost {
    let n = dag.vertex_count() as usize;
    let mut potential: Vec<Rational> = vec![Rational::zero(); n];
    // Nonbasic arcs point topologically forward, so a reverse sweep sees the
    // head before the tail.
    for &v in dag.topo_vertices().iter().rev() {
        if let Some(a) = ns.nonbasic_arc(v) {
            let head = dag.arc(a).head as usize;
            potential[v as usize] = c.get(a) + &potential[head];
        }
    }
    let mut reduced = LinearCost::with_arc_count(dag.arc_count());
    for arc in dag.arcs() {
        let value = c.get(arc.id) + &potential[arc.head as usize] - &potential[arc.tail as usize];
        reduced.set(arc.id, value).expect("arc id from the dag");
    }
    reduced
}

/// Embeds a linear cost as an order-d function: `q({a}) = c(a)`, everything
/// else 0.
pub fn linear_as_order_d(c: &LinearCost, d: u32) -> OrderDCost {
    let mut q = OrderDCost::with_arc_count(d, c.arc_count());
    for (a, v) in c.iter() {
        q.set(&[a], v.clone()).expect("arc ids already validated");
    }
    q
}
