//! Randomized instances for the order and composition laws, with
//! brute-force references on integer grids.

use proptest::prelude::*;

use codesign::dp::{self, DesignProblem};
use codesign::interval::{lift_op, DPInterval, LiftOp};
use codesign::poset::{Antichain, Direction, Point, PosetDescriptor};

pub type Cell = [u32; 2];

/// A DP on `{0..=side}²` given by generators: `(f, r)` is feasible when
/// some generator `(gf, gr)` has `f ≤ gf` and `gr ≤ r`.
#[derive(Debug, Clone)]
pub struct GenDp {
    pub side: u32,
    pub gens: Vec<(Cell, Cell)>,
}

fn le(a: Cell, b: Cell) -> bool {
    a[0] <= b[0] && a[1] <= b[1]
}

pub fn point(c: Cell) -> Point {
    Point::new([c[0] as f64, c[1] as f64]).unwrap()
}

impl GenDp {
    pub fn feasible(&self, f: Cell, r: Cell) -> bool {
        self.gens.iter().any(|&(gf, gr)| le(f, gf) && le(gr, r))
    }

    pub fn dp(&self) -> DesignProblem {
        let gens = self.gens.clone();
        let res = PosetDescriptor::increasing(2);
        DesignProblem::new("gen", PosetDescriptor::increasing(2), res.clone(), move |f| {
            let pts = gens
                .iter()
                .filter(|(gf, _)| f.get(0) <= gf[0] as f64 && f.get(1) <= gf[1] as f64)
                .map(|&(_, gr)| point(gr));
            Ok(Antichain::from_points(res.clone(), pts)?)
        })
    }
}

pub fn cells(side: u32) -> Vec<Cell> {
    (0..=side).flat_map(|i| (0..=side).map(move |j| [i, j])).collect()
}

/// Minimal cells of the grid upper set `member`.
pub fn grid_minimal(side: u32, member: impl Fn(usize) -> bool) -> Vec<Cell> {
    let w = side as usize + 1;
    cells(side)
        .into_iter()
        .enumerate()
        .filter(|&(k, c)| {
            member(k) && (c[0] == 0 || !member(k - w)) && (c[1] == 0 || !member(k - 1))
        })
        .map(|(_, c)| c)
        .collect()
}

/// Whether an antichain is exactly the given set of grid cells.
pub fn same_cells(ac: &Antichain, cells: &[Cell]) -> bool {
    ac.len() == cells.len() && cells.iter().all(|&c| ac.points().contains(&point(c)))
}

fn gen_dp(side: u32, max_gens: usize) -> impl Strategy<Value = GenDp> {
    let cell = (0..=side, 0..=side).prop_map(|(a, b)| [a, b]);
    prop::collection::vec((cell.clone(), cell), 0..=max_gens).prop_map(move |gens| GenDp { side, gens })
}

/// Three DPs on a common grid of side 2 to 20.
pub fn gen_dps() -> impl Strategy<Value = (GenDp, GenDp, GenDp)> {
    (2u32..=20).prop_flat_map(|side| (gen_dp(side, 6), gen_dp(side, 6), gen_dp(side, 6)))
}

type Bits = Vec<u64>;

fn bits(n: usize) -> Bits {
    vec![0; n.div_ceil(64)]
}

fn set(b: &mut Bits, k: usize) {
    b[k / 64] |= 1 << (k % 64);
}

fn get(b: &Bits, k: usize) -> bool {
    b[k / 64] >> (k % 64) & 1 == 1
}

/// Exhaustive: `(f, r)` feasible for `a ; b` iff some grid `m` has `(f, m)`
/// feasible for `a` and `(m, r)` feasible for `b`.
pub fn check_series_grid(a: &GenDp, b: &GenDp) -> Result<(), String> {
    let cs = cells(a.side);
    let rows: Vec<Bits> = cs
        .iter()
        .map(|&m| {
            let mut row = bits(cs.len());
            for (k, &r) in cs.iter().enumerate() {
                if b.feasible(m, r) {
                    set(&mut row, k);
                }
            }
            row
        })
        .collect();
    let s = dp::series(&a.dp(), &b.dp()).map_err(|e| e.to_string())?;
    for &f in &cs {
        let mut reach = bits(cs.len());
        for (m, row) in cs.iter().zip(&rows) {
            if a.feasible(f, *m) {
                reach.iter_mut().zip(row).for_each(|(x, y)| *x |= y);
            }
        }
        let brute = grid_minimal(a.side, |k| get(&reach, k));
        let got = s.eval(&point(f)).map_err(|e| e.to_string())?;
        if !same_cells(&got, &brute) {
            return Err(format!("series at {f:?}: {got:?} vs {brute:?}"));
        }
    }
    Ok(())
}

/// Exhaustive over the grid for both operands' common functionality.
pub fn check_intersection_union_grid(a: &GenDp, b: &GenDp) -> Result<(), String> {
    let cs = cells(a.side);
    let meet = dp::intersection(&a.dp(), &b.dp()).map_err(|e| e.to_string())?;
    let join = dp::union(&a.dp(), &b.dp()).map_err(|e| e.to_string())?;
    for &f in &cs {
        let both = grid_minimal(a.side, |k| a.feasible(f, cs[k]) && b.feasible(f, cs[k]));
        let either = grid_minimal(a.side, |k| a.feasible(f, cs[k]) || b.feasible(f, cs[k]));
        let (m, j) = (meet.eval(&point(f)).map_err(|e| e.to_string())?, join.eval(&point(f)).map_err(|e| e.to_string())?);
        if !same_cells(&m, &both) {
            return Err(format!("intersection at {f:?}: {m:?} vs {both:?}"));
        }
        if !same_cells(&j, &either) {
            return Err(format!("union at {f:?}: {j:?} vs {either:?}"));
        }
    }
    Ok(())
}

/// `(f₁, f₂) → (r₁, r₂)` feasible iff both halves are, on a sample of
/// functionality pairs and every resource pair's grid minimal set.
pub fn check_parallel_grid(a: &GenDp, b: &GenDp, picks: &[(usize, usize)]) -> Result<(), String> {
    let cs = cells(a.side);
    let p = dp::parallel(&a.dp(), &b.dp()).map_err(|e| e.to_string())?;
    for &(i, j) in picks {
        let (f1, f2) = (cs[i % cs.len()], cs[j % cs.len()]);
        let ma = grid_minimal(a.side, |k| a.feasible(f1, cs[k]));
        let mb = grid_minimal(a.side, |k| b.feasible(f2, cs[k]));
        let got = p.eval(&point(f1).concat(&point(f2))).map_err(|e| e.to_string())?;
        let ok = got.len() == ma.len() * mb.len()
            && ma.iter().all(|&x| mb.iter().all(|&y| got.points().contains(&point(x).concat(&point(y)))));
        if !ok {
            return Err(format!("parallel at {f1:?},{f2:?}: {got:?}"));
        }
    }
    Ok(())
}

fn eq_on_grid(x: &DesignProblem, y: &DesignProblem, side: u32, what: &str) -> Result<(), String> {
    for f in cells(side) {
        let (p, q) = (x.eval(&point(f)).map_err(|e| e.to_string())?, y.eval(&point(f)).map_err(|e| e.to_string())?);
        if p != q {
            return Err(format!("{what} at {f:?}: {p:?} vs {q:?}"));
        }
    }
    Ok(())
}

pub fn check_series_associative(a: &GenDp, b: &GenDp, c: &GenDp) -> Result<(), String> {
    let e = |r: Result<DesignProblem, dp::DpError>| r.map_err(|e| e.to_string());
    let (da, db, dc) = (a.dp(), b.dp(), c.dp());
    let left = e(dp::series(&e(dp::series(&da, &db))?, &dc))?;
    let right = e(dp::series(&da, &e(dp::series(&db, &dc))?))?;
    eq_on_grid(&left, &right, a.side, "associativity")
}

/// Commutativity, associativity, idempotence and absorption.
pub fn check_lattice_laws(a: &GenDp, b: &GenDp, c: &GenDp) -> Result<(), String> {
    let e = |r: Result<DesignProblem, dp::DpError>| r.map_err(|e| e.to_string());
    let (da, db, dc) = (a.dp(), b.dp(), c.dp());
    for (op, name) in [(dp::union as fn(&_, &_) -> _, "union"), (dp::intersection, "intersection")] {
        eq_on_grid(&e(op(&da, &db))?, &e(op(&db, &da))?, a.side, &format!("{name} commutes"))?;
        eq_on_grid(&e(op(&e(op(&da, &db))?, &dc))?, &e(op(&da, &e(op(&db, &dc))?))?, a.side, &format!("{name} associates"))?;
        eq_on_grid(&e(op(&da, &da))?, &da, a.side, &format!("{name} idempotent"))?;
    }
    eq_on_grid(&e(dp::union(&da, &e(dp::intersection(&da, &db))?))?, &da, a.side, "absorption ∪∩")?;
    eq_on_grid(&e(dp::intersection(&da, &e(dp::union(&da, &db))?))?, &da, a.side, "absorption ∩∪")
}

/// Random points over mixed-direction products, with repeated values and
/// +inf so ties and extremes occur.
pub fn points_strategy() -> impl Strategy<Value = (Vec<Direction>, Vec<Point>)> {
    let value = prop_oneof![4 => (0u32..4).prop_map(|v| v as f64), 1 => Just(f64::INFINITY)];
    (1usize..=4).prop_flat_map(move |dim| {
        let dir = prop_oneof![Just(Direction::Increasing), Just(Direction::Decreasing)];
        let pt = prop::collection::vec(value.clone(), dim).prop_map(|v| Point::new(v).unwrap());
        (prop::collection::vec(dir, dim), prop::collection::vec(pt, 3..12))
    })
}

pub fn check_order_axioms(dirs: &[Direction], pts: &[Point]) -> Result<(), String> {
    let d = PosetDescriptor::from_directions(dirs);
    let op = d.opposite();
    let leq = |a: &Point, b: &Point| d.leq(a, b).unwrap();
    for a in pts {
        if !leq(a, a) || !leq(&d.bottom(), a) || !leq(a, &d.top()) {
            return Err(format!("reflexivity or bounds at {a:?}"));
        }
        for b in pts {
            if leq(a, b) && leq(b, a) && a != b {
                return Err(format!("antisymmetry {a:?} {b:?}"));
            }
            if op.leq(a, b).unwrap() != leq(b, a) {
                return Err(format!("opposite {a:?} {b:?}"));
            }
            let j = d.join(a, b);
            if !leq(a, &j) || !leq(b, &j) {
                return Err(format!("join bound {a:?} {b:?}"));
            }
            for c in pts {
                if leq(a, b) && leq(b, c) && !leq(a, c) {
                    return Err(format!("transitivity {a:?} {b:?} {c:?}"));
                }
                if leq(a, c) && leq(b, c) && !leq(&j, c) {
                    return Err(format!("join least {a:?} {b:?} {c:?}"));
                }
            }
        }
    }
    let prod = d.product(&d);
    for (a, b) in pts.iter().zip(pts.iter().skip(1)) {
        let pa = a.concat(b);
        let pb = b.concat(a);
        if prod.leq(&pa, &pb).unwrap() != (leq(a, b) && leq(b, a)) {
            return Err(format!("product {a:?} {b:?}"));
        }
    }
    Ok(())
}

/// Minimal elements regardless of insertion order, pairwise incomparable,
/// and generating the same upper set as the input.
pub fn check_antichain_canonical(dirs: &[Direction], pts: &[Point]) -> Result<(), String> {
    let d = PosetDescriptor::from_directions(dirs);
    let ac = Antichain::from_points(d.clone(), pts.iter().cloned()).unwrap();
    let rev = Antichain::from_points(d.clone(), pts.iter().rev().cloned()).unwrap();
    if !ac.same_set(&rev) {
        return Err(format!("order dependent: {ac:?} vs {rev:?}"));
    }
    for (i, a) in ac.points().iter().enumerate() {
        if !pts.contains(a) {
            return Err(format!("{a:?} is not an input"));
        }
        for b in &ac.points()[i + 1..] {
            if d.leq(a, b).unwrap() || d.leq(b, a).unwrap() {
                return Err(format!("comparable {a:?} {b:?}"));
            }
        }
        if pts.iter().any(|p| d.leq(p, a).unwrap() && p != a) {
            return Err(format!("{a:?} is not minimal"));
        }
    }
    if let Some(p) = pts.iter().find(|p| !ac.dominates(p).unwrap()) {
        return Err(format!("{p:?} lost"));
    }
    Ok(())
}

/// Nested generator DPs: `lower ⊆ mid ⊆ upper`. Going down the chain,
/// generators are dropped and moved towards harder corners.
#[derive(Debug, Clone)]
pub struct Nested {
    pub lower: GenDp,
    pub mid: GenDp,
    pub upper: GenDp,
}

pub fn nested() -> impl Strategy<Value = Nested> {
    (2u32..=12).prop_flat_map(|side| {
        let cell = (0..=side, 0..=side).prop_map(|(a, b)| [a, b]);
        let gen = (cell.clone(), cell, 0u32..3, 0u32..3, 0u32..3, 0u32..3, 0u8..3);
        prop::collection::vec(gen, 1..6).prop_map(move |gs| {
            let shift = |(gf, gr): (Cell, Cell), df: u32, dr: u32| {
                ([gf[0].saturating_sub(df), gf[1].saturating_sub(df)], [(gr[0] + dr).min(side), (gr[1] + dr).min(side)])
            };
            let (mut lower, mut mid, mut upper) = (Vec::new(), Vec::new(), Vec::new());
            for (gf, gr, df1, dr1, df2, dr2, keep) in gs {
                upper.push((gf, gr));
                if keep >= 1 {
                    mid.push(shift((gf, gr), df1, dr1));
                }
                if keep >= 2 {
                    lower.push(shift((gf, gr), df1 + df2, dr1 + dr2));
                }
            }
            Nested { lower: GenDp { side, gens: lower }, mid: GenDp { side, gens: mid }, upper: GenDp { side, gens: upper } }
        })
    })
}

/// Upper-set inclusion, exact on antichains.
fn included(x: &DesignProblem, y: &DesignProblem, fs: &[Point]) -> Result<bool, String> {
    for f in fs {
        let (a, b) = (x.eval(f).map_err(|e| e.to_string())?, y.eval(f).map_err(|e| e.to_string())?);
        if a.points().iter().any(|p| !b.dominates(p).unwrap()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every lifted operation keeps `lower ⊆ op(mid…) ⊆ upper` on the grid.
pub fn check_interval_lifting(x: &Nested, y: &Nested) -> Result<(), String> {
    let iv = |n: &Nested| DPInterval::new(n.lower.dp(), n.upper.dp()).unwrap();
    let (ix, iy) = (iv(x), iv(y));
    let side = x.upper.side.max(y.upper.side);
    let fs2: Vec<Point> = cells(side).into_iter().map(point).collect();
    let fs4: Vec<Point> = fs2.iter().step_by(3).flat_map(|a| fs2.iter().step_by(5).map(move |b| a.concat(b))).collect();
    for op in [LiftOp::Series, LiftOp::Parallel, LiftOp::Union, LiftOp::Intersection] {
        let lifted = lift_op(op, &[ix.clone(), iy.clone()]).map_err(|e| e.to_string())?;
        let mid = match op {
            LiftOp::Series => dp::series(&x.mid.dp(), &y.mid.dp()),
            LiftOp::Parallel => dp::parallel(&x.mid.dp(), &y.mid.dp()),
            LiftOp::Union => dp::union(&x.mid.dp(), &y.mid.dp()),
            _ => dp::intersection(&x.mid.dp(), &y.mid.dp()),
        }
        .map_err(|e| e.to_string())?;
        let fs = if op == LiftOp::Parallel { &fs4 } else { &fs2 };
        let ok = included(lifted.lower(), &mid, fs)? && included(&mid, lifted.upper(), fs)?;
        if !ok {
            return Err(format!("{op:?} lifting is not nested"));
        }
    }
    Ok(())
}
