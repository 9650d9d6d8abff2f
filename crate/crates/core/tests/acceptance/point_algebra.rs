//! Brute-force point algebra: a network is consistent iff some total
//! preorder of its variables satisfies every constraint.

use htep::model::Relation;
use htep::tpn::{PointNetwork, TemporalConstraint, TimePoint};
use htep::Rational;

pub const RELATIONS: [Relation; 6] =
    [Relation::Lt, Relation::Le, Relation::Eq, Relation::Ne, Relation::Gt, Relation::Ge];

/// Every total preorder of `n` variables, as a rank per variable.
pub fn preorders(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut ranks = vec![0u8; n];
    loop {
        let max = ranks.iter().copied().max().unwrap_or(0);
        if (0..=max).all(|r| ranks.contains(&r)) {
            out.push(ranks.clone());
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            ranks[i] += 1;
            if (ranks[i] as usize) < n {
                break;
            }
            ranks[i] = 0;
            i += 1;
        }
    }
}

pub fn rank_holds(rel: Relation, a: u8, b: u8) -> bool {
    match rel {
        Relation::Lt => a < b,
        Relation::Le => a <= b,
        Relation::Eq => a == b,
        Relation::Ne => a != b,
        Relation::Gt => a > b,
        Relation::Ge => a >= b,
    }
}

/// Bit set over preorders.
#[derive(Clone)]
pub struct Mask(Vec<u64>);

impl Mask {
    pub fn full(n: usize) -> Mask {
        let mut m = Mask(vec![u64::MAX; n.div_ceil(64)]);
        if !n.is_multiple_of(64) {
            *m.0.last_mut().unwrap() = (1u64 << (n % 64)) - 1;
        }
        m
    }

    fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Mask {
        let mut m = Mask(vec![0; n.div_ceil(64)]);
        for i in (0..n).filter(|&i| f(i)) {
            m.0[i / 64] |= 1 << (i % 64);
        }
        m
    }

    pub fn and(&self, other: &Mask) -> Mask {
        Mask(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    pub fn intersects(&self, other: &Mask) -> bool {
        self.0.iter().zip(&other.0).any(|(a, b)| a & b != 0)
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }
}

pub struct Table {
    pub pairs: Vec<(usize, usize)>,
    /// `masks[pair][relation]`
    masks: Vec<Vec<Mask>>,
    pub full: Mask,
}

impl Table {
    pub fn new(n: usize) -> Table {
        let orders = preorders(n);
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let masks = pairs
            .iter()
            .map(|&(i, j)| {
                RELATIONS
                    .iter()
                    .map(|&rel| Mask::from_fn(orders.len(), |k| rank_holds(rel, orders[k][i], orders[k][j])))
                    .collect()
            })
            .collect();
        Table { pairs, masks, full: Mask::full(orders.len()) }
    }

    pub fn mask(&self, pair: usize, rel: usize) -> &Mask {
        &self.masks[pair][rel]
    }
}

pub fn network(n: usize) -> PointNetwork<Rational> {
    let mut net = PointNetwork::new();
    for _ in 0..n {
        net.add_point();
    }
    net
}

pub fn constraint(i: usize, rel: Relation, j: usize) -> TemporalConstraint<Rational> {
    TemporalConstraint::new(TimePoint(i as u32), rel, TimePoint(j as u32))
}

#[derive(Default, Debug)]
pub struct Tally {
    pub networks: u64,
    pub consistent: u64,
    pub mismatches: u64,
}

/// Walks every assignment of {none} ∪ RELATIONS to the variable pairs.
/// Inconsistency is monotone on both sides (more constraints never repair
/// it, and an inconsistent network stays flagged), so once both agree on
/// inconsistency the subtree is counted without being built.
pub fn exhaustive(n: usize) -> Tally {
    let table = Table::new(n);
    let mut tally = Tally::default();
    walk(&table, 0, network(n), table.full.clone(), &mut tally);
    tally
}

fn walk(table: &Table, pair: usize, net: PointNetwork<Rational>, mask: Mask, tally: &mut Tally) {
    let planner = net.is_consistent();
    let brute = !mask.is_empty();
    if planner != brute {
        tally.mismatches += 1;
    }
    let remaining = (table.pairs.len() - pair) as u32;
    if !planner && !brute {
        tally.networks += 7u64.pow(remaining);
        return;
    }
    if pair == table.pairs.len() {
        tally.networks += 1;
        tally.consistent += planner as u64;
        return;
    }
    let (i, j) = table.pairs[pair];
    if pair + 1 == table.pairs.len() {
        // leaves: ask the network without materializing the children
        tally.networks += 1 + RELATIONS.len() as u64;
        tally.consistent += planner as u64;
        for (r, &rel) in RELATIONS.iter().enumerate() {
            let planner = net.consistent_with(&constraint(i, rel, j));
            if planner != mask.intersects(table.mask(pair, r)) {
                tally.mismatches += 1;
            }
            tally.consistent += planner as u64;
        }
        return;
    }
    walk(table, pair + 1, net.clone(), mask.clone(), tally);
    for (r, &rel) in RELATIONS.iter().enumerate() {
        let mut child = net.clone();
        child.insert(constraint(i, rel, j));
        walk(table, pair + 1, child, mask.and(table.mask(pair, r)), tally);
    }
}
