//! Independent oracles shared by the integration tests. Nothing here calls
//! into the verifier or solver internals; fairness conditions are evaluated
//! from their fractional definitions with exact rationals.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::ops::{Add, Sub};

use propavg::instance::{Allocation, Instance};
use propavg::matching::BipartiteGraph;
use propavg::Notion;

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Exact rational with positive denominator, always reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Q {
    num: i128,
    den: i128,
}

impl Q {
    pub fn new(num: i128, den: i128) -> Self {
        assert!(den != 0);
        let s = if den < 0 { -1 } else { 1 };
        let g = gcd(num, den).max(1);
        Q {
            num: s * num / g,
            den: s * den / g,
        }
    }

    pub fn int(v: impl Into<i128>) -> Self {
        Q::new(v.into(), 1)
    }

    pub fn zero() -> Self {
        Q::int(0)
    }
}

impl Add for Q {
    type Output = Q;
    fn add(self, o: Q) -> Q {
        let l = self.den / gcd(self.den, o.den) * o.den;
        Q::new(self.num * (l / self.den) + o.num * (l / o.den), l)
    }
}

impl Sub for Q {
    type Output = Q;
    fn sub(self, o: Q) -> Q {
        self + Q::new(-o.num, o.den)
    }
}

impl PartialOrd for Q {
    fn partial_cmp(&self, o: &Q) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Q {
    fn cmp(&self, o: &Q) -> Ordering {
        (*self - *o).num.cmp(&0)
    }
}

/// `v_i(S)` by a plain loop over the valuation row.
pub fn naive_value(inst: &Instance, agent: usize, goods: impl IntoIterator<Item = usize>) -> i128 {
    let mut total = 0i128;
    for g in goods {
        total += inst.row(agent)[g] as i128;
    }
    total
}

pub fn naive_min(inst: &Instance, agent: usize, goods: impl IntoIterator<Item = usize>) -> i128 {
    let mut best: Option<i128> = None;
    for g in goods {
        let v = inst.row(agent)[g] as i128;
        best = Some(best.map_or(v, |b: i128| b.min(v)));
    }
    best.unwrap_or(0)
}

pub fn naive_max(inst: &Instance, agent: usize, goods: impl IntoIterator<Item = usize>) -> i128 {
    goods
        .into_iter()
        .map(|g| inst.row(agent)[g] as i128)
        .max()
        .unwrap_or(0)
}

/// `d_i(X)` straight from its definition, as a rational.
pub fn rational_deficiency(inst: &Instance, alloc: &Allocation, agent: usize, notion: Notion) -> Q {
    let n = alloc.n_agents() as i128;
    if n == 1 {
        return Q::zero();
    }
    let others: Vec<usize> = (0..alloc.n_agents()).filter(|&k| k != agent).collect();
    let mins: Vec<i128> = others
        .iter()
        .map(|&k| naive_min(inst, agent, alloc.bundle(k).iter()))
        .collect();
    match notion {
        Notion::Prop => Q::zero(),
        Notion::Prop1 => Q::int(
            others
                .iter()
                .map(|&k| naive_max(inst, agent, alloc.bundle(k).iter()))
                .max()
                .unwrap_or(0),
        ),
        Notion::PropM => Q::int(mins.iter().copied().max().unwrap_or(0)),
        Notion::PropAvg => Q::new(mins.iter().sum(), n - 1),
        Notion::AvgEfx => Q::new(mins.iter().sum(), n),
        Notion::PropX => Q::int(mins.iter().copied().min().unwrap_or(0)),
        _ => panic!("no deficiency for {notion}"),
    }
}

/// Verdict from the fractional definition of each notion.
pub fn rational_satisfied(
    inst: &Instance,
    alloc: &Allocation,
    agent: usize,
    notion: Notion,
) -> bool {
    let n = alloc.n_agents();
    let own = naive_value(inst, agent, alloc.bundle(agent).iter());
    let total = naive_value(inst, agent, 0..inst.n_goods());
    let others = (0..n).filter(|&k| k != agent);
    match notion {
        Notion::Ef => others
            .into_iter()
            .all(|k| own >= naive_value(inst, agent, alloc.bundle(k).iter())),
        Notion::Ef1 => others.into_iter().all(|k| {
            let b = alloc.bundle(k);
            b.is_empty()
                || own >= naive_value(inst, agent, b.iter()) - naive_max(inst, agent, b.iter())
        }),
        Notion::Efx => others.into_iter().all(|k| {
            let b = alloc.bundle(k);
            own >= naive_value(inst, agent, b.iter()) - naive_min(inst, agent, b.iter())
        }),
        _ => {
            let threshold =
                Q::new(total, n as i128) - rational_deficiency(inst, alloc, agent, notion);
            Q::int(own) >= threshold
        }
    }
}

/// Size of a maximum matching by trying every choice for every left vertex.
pub fn brute_force_matching_size(g: &BipartiteGraph, excluded: Option<usize>) -> usize {
    fn go(g: &BipartiteGraph, excluded: Option<usize>, left: usize, used: &mut Vec<bool>) -> usize {
        if left == g.left_size() {
            return 0;
        }
        let mut best = go(g, excluded, left + 1, used);
        for &r in g.neighbors(left) {
            if Some(r) != excluded && !used[r] {
                used[r] = true;
                best = best.max(1 + go(g, excluded, left + 1, used));
                used[r] = false;
            }
        }
        best
    }
    go(g, excluded, 0, &mut vec![false; g.right_size()])
}

/// Checks `|S| + slack <= |Γ(S)|` for every non-empty left subset.
pub fn hall_holds(g: &BipartiteGraph, excluded: Option<usize>, slack: usize) -> bool {
    let n = g.left_size();
    (1u32..(1 << n)).all(|mask| {
        let mut nbrs = vec![false; g.right_size()];
        let mut size = 0;
        for l in 0..n {
            if mask & (1 << l) != 0 {
                size += 1;
                for &r in g.neighbors(l) {
                    if Some(r) != excluded {
                        nbrs[r] = true;
                    }
                }
            }
        }
        size + slack <= nbrs.iter().filter(|&&b| b).count()
    })
}

pub fn random_graph<R: rand::Rng>(
    rng: &mut R,
    left: usize,
    right: usize,
    density: f64,
) -> BipartiteGraph {
    let mut g = BipartiteGraph::new(left, right);
    for l in 0..left {
        for r in 0..right {
            if rng.gen_bool(density) {
                g.add_edge(l, r).unwrap();
            }
        }
    }
    g
}
