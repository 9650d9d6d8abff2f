//! Random point networks with durations. Schedules are checked with an own
//! evaluator, infeasibility with a difference-constraint solver that
//! branches on `!=`.

use htep::model::Relation;
use htep::tpn::{PointNetwork, TemporalConstraint, TimePoint};
use htep::Rational;
use rand::rngs::StdRng;
use rand::Rng;

use crate::point_algebra::RELATIONS;

const INF: i64 = i64::MAX / 4;

#[derive(Clone, Copy, Debug)]
pub enum Item {
    Order(usize, Relation, usize),
    /// `x[j] - x[i] = d`
    Duration(usize, usize, i64),
}

pub fn random_items(rng: &mut StdRng, n: usize) -> Vec<Item> {
    let count = rng.gen_range(1..=12);
    let mut ne = 0;
    let mut items = Vec::with_capacity(count);
    while items.len() < count {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        if rng.gen_bool(0.3) {
            items.push(Item::Duration(i, j, rng.gen_range(1..=4)));
        } else {
            let rel = RELATIONS[rng.gen_range(0..RELATIONS.len())];
            if rel == Relation::Ne {
                ne += 1;
                if ne > 6 {
                    continue;
                }
            }
            items.push(Item::Order(i, rel, j));
        }
    }
    items
}

pub fn build(n: usize, items: &[Item]) -> PointNetwork<Rational> {
    let mut net = PointNetwork::new();
    for _ in 0..n {
        net.add_point();
    }
    for item in items {
        let c = match *item {
            Item::Order(i, rel, j) => TemporalConstraint::new(TimePoint(i as u32), rel, TimePoint(j as u32)),
            Item::Duration(i, j, d) => {
                TemporalConstraint::duration(TimePoint(i as u32), TimePoint(j as u32), Rational::from_integer(d))
            }
        };
        net.insert(c);
    }
    net
}

/// Does `times` satisfy every item, with strict relations separated by at
/// least `eps` and every point at or after point 0?
pub fn satisfies(times: &[Rational], items: &[Item], eps: Rational) -> Result<(), String> {
    if let Some(i) = (0..times.len()).find(|&i| times[i] < times[0]) {
        return Err(format!("p{i} before the origin"));
    }
    for item in items {
        let ok = match *item {
            Item::Order(i, rel, j) => {
                let (a, b) = (times[i], times[j]);
                match rel {
                    Relation::Lt => b - a >= eps,
                    Relation::Gt => a - b >= eps,
                    Relation::Le => a <= b,
                    Relation::Ge => a >= b,
                    Relation::Eq => a == b,
                    Relation::Ne => b - a >= eps || a - b >= eps,
                }
            }
            Item::Duration(i, j, d) => times[j] - times[i] == Rational::from_integer(d),
        };
        if !ok {
            return Err(format!("{item:?} fails under {times:?}"));
        }
    }
    Ok(())
}

/// Feasibility with the separation scaled to 1 and durations to `scale`.
pub fn feasible(n: usize, items: &[Item], scale: i64) -> bool {
    let mut edges = Vec::new();
    let mut ne = Vec::new();
    // x[b] - x[a] >= gap
    let mut ge = |a: usize, b: usize, gap: i64| edges.push((b, a, -gap));
    for i in 1..n {
        ge(0, i, 0);
    }
    for item in items {
        match *item {
            Item::Order(i, rel, j) => match rel {
                Relation::Lt => ge(i, j, 1),
                Relation::Gt => ge(j, i, 1),
                Relation::Le => ge(i, j, 0),
                Relation::Ge => ge(j, i, 0),
                Relation::Eq => {
                    ge(i, j, 0);
                    ge(j, i, 0);
                }
                Relation::Ne => ne.push((i, j)),
            },
            Item::Duration(i, j, d) => {
                ge(i, j, d * scale);
                ge(j, i, -d * scale);
            }
        }
    }
    (0..1u32 << ne.len()).any(|choice| {
        let mut all = edges.clone();
        for (k, &(i, j)) in ne.iter().enumerate() {
            let (a, b) = if choice >> k & 1 == 0 { (i, j) } else { (j, i) };
            all.push((b, a, -1));
        }
        no_negative_cycle(n, &all)
    })
}

/// Edges are `x[v] - x[u] <= w`.
pub fn no_negative_cycle(n: usize, edges: &[(usize, usize, i64)]) -> bool {
    let mut dist = vec![vec![INF; n]; n];
    for (i, row) in dist.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(u, v, w) in edges {
        dist[u][v] = dist[u][v].min(w);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if dist[i][k] != INF && dist[k][j] != INF {
                    dist[i][j] = dist[i][j].min(dist[i][k] + dist[k][j]);
                }
            }
        }
    }
    (0..n).all(|i| dist[i][i] >= 0)
}
