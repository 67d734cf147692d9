//! Local sizes on trees, outer sizes, super-level measures and outer Lebesgue quasinorms.
//!
//! Every size below is an integral or supremum of the pointwise norm `‖F(η, y, t)‖_X`, so
//! the computations work on the array of node magnitudes. Because of that, restricting a
//! field to the complement of a set never increases a size and the outer size (supremum
//! over trees and removal sets) is attained with nothing removed.
//!
//! Super-level measures are bounded from above by a greedy cover: repeatedly remove the
//! tree carrying the largest local size of the residual (ties go to the larger top scale,
//! then to the top closer to `x = 0`, then to the earlier tree) until the residual outer
//! size is at most `λ`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::pairing_unchecked;
use crate::tfs::{OuterField, Region, RowRanges, Strip, TfsGrid, Tree, TreeDictionary};

/// A local size on trees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SizeSpec {
    /// `L^p` over the full tree, its inner part or its outer part, for `dθ dζ dσ/σ`.
    Lp { p: f64, region: Region },
    /// Square function over the outer part.
    R,
    /// `R + L^∞`.
    F,
    /// `R + L¹_in`.
    FStar,
}

impl SizeSpec {
    pub fn lp(p: f64, region: Region) -> Result<Self> {
        let s = SizeSpec::Lp { p, region };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if let SizeSpec::Lp { p, .. } = self {
            if p.is_nan() || *p <= 0.0 {
                return Err(Error::Domain(format!("size exponent {p} must lie in (0, inf]")));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> String {
        match self {
            SizeSpec::Lp { p, region } => format!("L{p}_{region:?}").to_lowercase(),
            SizeSpec::R => "R".into(),
            SizeSpec::F => "F".into(),
            SizeSpec::FStar => "F*".into(),
        }
    }

    /// Summands `(region, exponent)`; the size is the sum of the corresponding `L^p` sizes.
    fn terms(&self) -> Vec<(Region, f64)> {
        match *self {
            SizeSpec::Lp { p, region } => vec![(region, p)],
            SizeSpec::R => vec![(Region::Out, 2.0)],
            SizeSpec::F => vec![(Region::Out, 2.0), (Region::Full, f64::INFINITY)],
            SizeSpec::FStar => vec![(Region::Out, 2.0), (Region::In, 1.0)],
        }
    }

    /// Constant in the quasi-triangle inequality of the size.
    pub fn triangle_constant(&self) -> f64 {
        match *self {
            SizeSpec::Lp { p, .. } if p < 1.0 => 2f64.powf(1.0 / p - 1.0),
            _ => 1.0,
        }
    }
}

fn region_slot(r: Region) -> usize {
    match r {
        Region::Full => 0,
        Region::In => 1,
        Region::Out => 2,
    }
}

/// `L^p` size of a magnitude array over the given rows of a tree with top scale `s`.
fn lp_over_rows(grid: &TfsGrid, mags: &[f64], rows: &[RowRanges], s: f64, p: f64) -> f64 {
    if p.is_infinite() {
        let mut m = 0.0_f64;
        for row in rows {
            for &(a, b) in row.ranges() {
                let base = grid.index(row.k, row.i, 0);
                for &v in &mags[base + a..base + b] {
                    m = m.max(v);
                }
            }
        }
        return m;
    }
    let mut total = 0.0;
    for row in rows {
        let base = grid.index(row.k, row.i, 0);
        let mut acc = 0.0;
        for &(a, b) in row.ranges() {
            for &v in &mags[base + a..base + b] {
                acc += if p == 1.0 {
                    v
                } else if p == 2.0 {
                    v * v
                } else {
                    v.powf(p)
                };
            }
        }
        total += acc * (grid.weight(row.k) / s);
    }
    if p == 1.0 {
        total
    } else if p == 2.0 {
        total.sqrt()
    } else {
        total.powf(1.0 / p)
    }
}

/// Row decompositions of a tree for the regions a size needs.
#[derive(Debug, Clone)]
struct TreeRows {
    rows: [Option<Vec<RowRanges>>; 3],
}

impl TreeRows {
    fn new(tree: &Tree, grid: &TfsGrid, spec: &SizeSpec) -> Self {
        let mut rows: [Option<Vec<RowRanges>>; 3] = [None, None, None];
        rows[0] = Some(tree.rows(grid, Region::Full));
        for (region, _) in spec.terms() {
            let slot = region_slot(region);
            if rows[slot].is_none() {
                rows[slot] = Some(tree.rows(grid, region));
            }
        }
        TreeRows { rows }
    }

    fn get(&self, region: Region) -> &[RowRanges] {
        self.rows[region_slot(region)].as_deref().unwrap_or(&[])
    }

    fn size(&self, grid: &TfsGrid, mags: &[f64], s: f64, spec: &SizeSpec) -> f64 {
        spec.terms()
            .into_iter()
            .map(|(region, p)| lp_over_rows(grid, mags, self.get(region), s, p))
            .sum()
    }

    /// Zeroes the tree's nodes; returns whether anything changed.
    fn clear(&self, grid: &TfsGrid, mags: &mut [f64], keep: &mut [bool]) -> bool {
        let mut changed = false;
        for row in self.get(Region::Full) {
            let base = grid.index(row.k, row.i, 0);
            for &(a, b) in row.ranges() {
                for idx in base + a..base + b {
                    changed |= mags[idx] != 0.0;
                    mags[idx] = 0.0;
                    keep[idx] = false;
                }
            }
        }
        changed
    }
}

/// Local size of the magnitude array `mags` (one entry per grid node) on `tree`.
pub fn local_size_of_magnitudes(grid: &TfsGrid, mags: &[f64], tree: &Tree, spec: &SizeSpec) -> Result<f64> {
    spec.validate()?;
    if mags.len() != grid.len() {
        return Err(Error::Shape(format!("{} magnitudes on a grid of {} nodes", mags.len(), grid.len())));
    }
    Ok(TreeRows::new(tree, grid, spec).size(grid, mags, tree.top.s, spec))
}

/// `‖F‖_{S(T)}`.
pub fn local_size(field: &OuterField, tree: &Tree, spec: &SizeSpec) -> Result<f64> {
    local_size_of_magnitudes(field.grid(), &field.magnitudes(), tree, spec)
}

/// A dictionary with the row decompositions of its trees, reusable across fields.
#[derive(Debug, Clone)]
pub struct SizeContext<'a> {
    grid: &'a TfsGrid,
    dict: &'a TreeDictionary,
    spec: SizeSpec,
    rows: Vec<TreeRows>,
}

impl<'a> SizeContext<'a> {
    pub fn new(grid: &'a TfsGrid, dict: &'a TreeDictionary, spec: SizeSpec) -> Result<Self> {
        spec.validate()?;
        if dict.is_empty() {
            return Err(Error::Config("tree dictionary is empty".into()));
        }
        let rows = dict.trees.iter().map(|t| TreeRows::new(t, grid, &spec)).collect();
        Ok(SizeContext { grid, dict, spec, rows })
    }

    pub fn grid(&self) -> &TfsGrid {
        self.grid
    }

    pub fn dictionary(&self) -> &TreeDictionary {
        self.dict
    }

    pub fn spec(&self) -> SizeSpec {
        self.spec
    }

    fn check(&self, mags: &[f64]) -> Result<()> {
        if mags.len() != self.grid.len() {
            return Err(Error::Shape(format!("{} magnitudes on a grid of {} nodes", mags.len(), self.grid.len())));
        }
        Ok(())
    }

    #[inline]
    fn size(&self, i: usize, mags: &[f64]) -> f64 {
        self.rows[i].size(self.grid, mags, self.dict.trees[i].top.s, &self.spec)
    }

    /// Local size on dictionary tree `i`.
    pub fn local_size(&self, i: usize, mags: &[f64]) -> Result<f64> {
        self.check(mags)?;
        Ok(self.size(i, mags))
    }

    /// Local sizes on every dictionary tree, in dictionary order.
    pub fn local_sizes(&self, mags: &[f64]) -> Result<Vec<f64>> {
        self.check(mags)?;
        Ok((0..self.dict.len()).map(|i| self.size(i, mags)).collect())
    }

    /// Marks the nodes lying in at least one dictionary tree.
    pub fn union_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.grid.len()];
        for rows in &self.rows {
            for row in rows.get(Region::Full) {
                let base = self.grid.index(row.k, row.i, 0);
                for &(a, b) in row.ranges() {
                    mask[base + a..base + b].iter_mut().for_each(|m| *m = true);
                }
            }
        }
        mask
    }

    pub fn outer_size(&self, mags: &[f64]) -> Result<f64> {
        self.check(mags)?;
        Ok((0..self.dict.len()).map(|i| self.size(i, mags)).fold(0.0, f64::max))
    }

    /// Greedy cover run while the residual outer size exceeds `stop`, restricted to the
    /// trees in `active` (all trees if `None`). Returns the trace and the residual mask.
    pub fn greedy(&self, mags: &[f64], stop: f64, active: Option<&[usize]>) -> Result<(GreedyTrace, Vec<bool>)> {
        self.check(mags)?;
        let mut mags = mags.to_vec();
        let mut keep = vec![true; mags.len()];
        let all: Vec<usize>;
        let active = match active {
            Some(a) => a,
            None => {
                all = (0..self.dict.len()).collect();
                &all
            }
        };
        let mut heap: BinaryHeap<Candidate> = active
            .iter()
            .map(|&i| Candidate::new(self.size(i, &mags), &self.dict.trees[i], i))
            .filter(|c| c.size > 0.0)
            .collect();
        let mut trace = GreedyTrace {
            levels: Vec::new(),
            costs: vec![0.0],
            picks: Vec::new(),
        };
        loop {
            // Sizes only decrease under removal, so stored keys bound the current ones from above.
            let top = loop {
                match heap.pop() {
                    None => break None,
                    Some(c) => {
                        let fresh = self.size(c.index, &mags);
                        if fresh == c.size {
                            break Some(c);
                        }
                        if fresh > 0.0 {
                            heap.push(Candidate { size: fresh, ..c });
                        }
                    }
                }
            };
            let level = top.map_or(0.0, |c| c.size);
            let level = trace.levels.last().map_or(level, |&prev: &f64| prev.min(level));
            trace.levels.push(level);
            let Some(c) = top else { break };
            if c.size <= stop {
                break;
            }
            self.rows[c.index].clear(self.grid, &mut mags, &mut keep);
            trace.picks.push(c.index);
            let cost = trace.costs.last().unwrap() + self.dict.trees[c.index].measure();
            trace.costs.push(cost);
        }
        trace.costs.truncate(trace.levels.len());
        Ok((trace, keep))
    }

    /// `‖F‖_{L^p_μ S}` of a magnitude array.
    pub fn outer_lp(&self, mags: &[f64], p: f64) -> Result<f64> {
        check_outer_exponent(p)?;
        if p.is_infinite() {
            return self.outer_size(mags);
        }
        Ok(self.greedy(mags, 0.0, None)?.0.lp(p))
    }

    /// Greedy upper bound for `μ(‖F‖_S > λ)` with its certificate.
    pub fn super_level_measure(&self, mags: &[f64], lambda: f64) -> Result<(f64, CoverSelection)> {
        if !(lambda > 0.0) {
            return Err(Error::Domain(format!("super-level threshold {lambda} must be positive")));
        }
        let (trace, keep) = self.greedy(mags, lambda, None)?;
        let residual_size = *trace.levels.last().unwrap();
        if residual_size > lambda {
            return Err(Error::Numeric(format!(
                "greedy cover left residual size {residual_size} above {lambda}"
            )));
        }
        let cost = *trace.costs.last().unwrap();
        Ok((
            cost,
            CoverSelection {
                chosen: trace.picks,
                cost,
                keep,
                residual_size,
            },
        ))
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    size: f64,
    scale: f64,
    abs_x: f64,
    index: usize,
}

impl Candidate {
    fn new(size: f64, tree: &Tree, index: usize) -> Self {
        Candidate {
            size,
            scale: tree.top.s,
            abs_x: tree.top.x.abs(),
            index,
        }
    }
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size
            .total_cmp(&other.size)
            .then(self.scale.total_cmp(&other.scale))
            .then(other.abs_x.total_cmp(&self.abs_x))
            .then(other.index.cmp(&self.index))
    }
}

/// Trees chosen by the greedy cover and what is left of the field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverSelection {
    /// Dictionary indices in the order they were chosen.
    pub chosen: Vec<usize>,
    /// `Σ μ(T)` over the chosen trees.
    pub cost: f64,
    /// `false` exactly on the union of the chosen trees.
    #[serde(skip)]
    pub keep: Vec<bool>,
    /// Outer size of the residual field.
    pub residual_size: f64,
}

impl CoverSelection {
    /// `1_{X∖V} F` for the selected union `V`.
    pub fn residual(&self, field: &OuterField) -> OuterField {
        field.masked_by(&self.keep)
    }
}

/// Full run of the greedy cover until the residual vanishes on every tree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreedyTrace {
    /// `levels[k]` is the residual outer size after `k` picks (nonincreasing, last entry 0).
    pub levels: Vec<f64>,
    /// `costs[k]` is the cost of the first `k` picks.
    pub costs: Vec<f64>,
    pub picks: Vec<usize>,
}

impl GreedyTrace {
    /// Greedy upper bound for `μ(‖F‖_S > λ)`.
    pub fn measure_at(&self, lambda: f64) -> f64 {
        let k = self.levels.iter().position(|&m| m <= lambda).unwrap_or(self.levels.len() - 1);
        self.costs[k]
    }

    /// `(∫ λ^p μ(λ) dλ/λ)^{1/p}` for the step function `μ`.
    pub fn lp(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.levels[0];
        }
        let mut total = 0.0;
        for k in 1..self.levels.len() {
            let (hi, lo) = (self.levels[k - 1], self.levels[k]);
            if hi > lo {
                total += self.costs[k] * (hi.powf(p) - lo.powf(p)) / p;
            }
        }
        total.powf(1.0 / p)
    }

    /// `sup_λ λ μ(λ)^{1/p}`.
    pub fn weak_lp(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.levels[0];
        }
        (1..self.levels.len())
            .map(|k| self.levels[k - 1] * self.costs[k].powf(1.0 / p))
            .fold(0.0, f64::max)
    }
}

/// `‖F‖_{L^∞_μ S} = sup_T ‖F‖_{S(T)}` over the dictionary.
pub fn outer_size(field: &OuterField, dict: &TreeDictionary, spec: &SizeSpec) -> Result<f64> {
    outer_size_of_magnitudes(field.grid(), &field.magnitudes(), dict, spec)
}

pub fn outer_size_of_magnitudes(grid: &TfsGrid, mags: &[f64], dict: &TreeDictionary, spec: &SizeSpec) -> Result<f64> {
    SizeContext::new(grid, dict, *spec)?.outer_size(mags)
}

/// Greedy upper bound for `μ(‖F‖_S > λ)` with its certificate cover.
pub fn super_level_measure(
    field: &OuterField,
    lambda: f64,
    dict: &TreeDictionary,
    spec: &SizeSpec,
) -> Result<(f64, CoverSelection)> {
    SizeContext::new(field.grid(), dict, *spec)?.super_level_measure(&field.magnitudes(), lambda)
}

/// Greedy trace of the field run to exhaustion.
pub fn greedy_trace(field: &OuterField, dict: &TreeDictionary, spec: &SizeSpec) -> Result<GreedyTrace> {
    Ok(SizeContext::new(field.grid(), dict, *spec)?.greedy(&field.magnitudes(), 0.0, None)?.0)
}

fn check_outer_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p <= 0.0 {
        return Err(Error::Domain(format!("outer exponent {p} must lie in (0, inf]")));
    }
    Ok(())
}

/// `‖F‖_{L^p_μ S}`; the super-level measure is the greedy step function, integrated exactly.
pub fn outer_lp_quasinorm(field: &OuterField, p: f64, dict: &TreeDictionary, spec: &SizeSpec) -> Result<f64> {
    check_outer_exponent(p)?;
    SizeContext::new(field.grid(), dict, *spec)?.outer_lp(&field.magnitudes(), p)
}

/// `‖F‖_{L^{p,∞}_μ S} = sup_λ λ μ(‖F‖_S > λ)^{1/p}`.
pub fn outer_weak_lp_quasinorm(field: &OuterField, p: f64, dict: &TreeDictionary, spec: &SizeSpec) -> Result<f64> {
    check_outer_exponent(p)?;
    if p.is_infinite() {
        return outer_size(field, dict, spec);
    }
    Ok(greedy_trace(field, dict, spec)?.weak_lp(p))
}

/// Cheapest sub-collection whose removal brings the outer size to at most `λ`, by
/// enumerating every subset. Limited to 16 trees.
pub fn super_level_measure_exhaustive(
    field: &OuterField,
    lambda: f64,
    dict: &TreeDictionary,
    spec: &SizeSpec,
) -> Result<(f64, Vec<usize>)> {
    spec.validate()?;
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("super-level threshold {lambda} must be positive")));
    }
    let n = dict.len();
    if n > 16 {
        return Err(Error::CostGuard(format!("exhaustive cover search over {n} trees")));
    }
    let grid = field.grid();
    let mags = field.magnitudes();
    let rows: Vec<TreeRows> = dict.trees.iter().map(|t| TreeRows::new(t, grid, spec)).collect();
    let mut best: Option<(f64, u32)> = None;
    let mut work = vec![0.0; mags.len()];
    let mut keep = vec![true; mags.len()];
    for subset in 0u32..(1u32 << n) {
        let cost: f64 = (0..n).filter(|&i| subset >> i & 1 == 1).map(|i| dict.trees[i].measure()).sum();
        if best.is_some_and(|(c, _)| c <= cost) {
            continue;
        }
        work.copy_from_slice(&mags);
        for i in (0..n).filter(|&i| subset >> i & 1 == 1) {
            rows[i].clear(grid, &mut work, &mut keep);
        }
        let residual = (0..n)
            .map(|i| rows[i].size(grid, &work, dict.trees[i].top.s, spec))
            .fold(0.0, f64::max);
        if residual <= lambda {
            best = Some((cost, subset));
        }
    }
    let (cost, subset) = best.expect("removing every tree leaves zero size");
    Ok((cost, (0..n).filter(|&i| subset >> i & 1 == 1).collect()))
}

/// Strip size `ν(D)^{-1/q} ‖1_D F‖_{L^q_μ S}` of a magnitude array.
fn strip_size(ctx: &SizeContext, mags: &[f64], nodes: &[usize], active: &[usize], strip: &Strip, q: f64) -> Result<f64> {
    let mut local = vec![0.0; mags.len()];
    let mut any = false;
    for &i in nodes {
        local[i] = mags[i];
        any |= mags[i] != 0.0;
    }
    if !any {
        return Ok(0.0);
    }
    let trace = ctx.greedy(&local, 0.0, Some(active))?.0;
    Ok(if q.is_infinite() {
        trace.levels[0]
    } else {
        trace.lp(q) * strip.measure().powf(-1.0 / q)
    })
}

/// `‖F‖_{L^p_ν sL^q_μ S}`: outer `L^p` over strips of the strip sizes, with the
/// `ν`-super-level measures bounded by a greedy strip cover.
pub fn iterated_quasinorm(
    field: &OuterField,
    p: f64,
    q: f64,
    strips: &[Strip],
    dict: &TreeDictionary,
    spec: &SizeSpec,
) -> Result<f64> {
    check_outer_exponent(p)?;
    let ctx = SizeContext::new(field.grid(), dict, *spec)?;
    Ok(iterated_trace(&ctx, &field.magnitudes(), q, strips)?.lp(p))
}

/// Greedy strip-cover trace behind [`iterated_quasinorm`].
pub fn iterated_trace(ctx: &SizeContext, mags: &[f64], q: f64, strips: &[Strip]) -> Result<GreedyTrace> {
    check_outer_exponent(q)?;
    ctx.check(mags)?;
    if strips.is_empty() {
        return Err(Error::Config("strip dictionary is empty".into()));
    }
    let grid = ctx.grid;
    let mut mags = mags.to_vec();
    let nodes: Vec<Vec<usize>> = strips
        .iter()
        .map(|d| {
            (0..grid.len())
                .filter(|&i| {
                    let n = grid.node(i);
                    d.contains(n.y, n.t)
                })
                .collect()
        })
        .collect();
    // trees meeting a strip: both lie over |y − x| < s, so they can only meet if the tops are close
    let active: Vec<Vec<usize>> = strips
        .iter()
        .map(|d| {
            (0..ctx.dict.len())
                .filter(|&i| {
                    let t = &ctx.dict.trees[i].top;
                    (t.x - d.x).abs() < t.s + d.s
                })
                .collect()
        })
        .collect();
    let mut sizes = (0..strips.len())
        .map(|j| strip_size(ctx, &mags, &nodes[j], &active[j], &strips[j], q))
        .collect::<Result<Vec<f64>>>()?;
    let mut trace = GreedyTrace {
        levels: Vec::new(),
        costs: vec![0.0],
        picks: Vec::new(),
    };
    let mut touched = vec![false; grid.len()];
    loop {
        let best = (0..strips.len()).max_by(|&a, &b| {
            sizes[a]
                .total_cmp(&sizes[b])
                .then(strips[a].s.total_cmp(&strips[b].s))
                .then(strips[b].x.abs().total_cmp(&strips[a].x.abs()))
                .then(b.cmp(&a))
        });
        let level = best.map_or(0.0, |i| sizes[i]);
        let level = trace.levels.last().map_or(level, |&prev: &f64| prev.min(level));
        trace.levels.push(level);
        let Some(pick) = best.filter(|&i| sizes[i] > 0.0) else {
            *trace.levels.last_mut().unwrap() = 0.0;
            break;
        };
        touched.iter_mut().for_each(|t| *t = false);
        for &i in &nodes[pick] {
            if mags[i] != 0.0 {
                touched[i] = true;
                mags[i] = 0.0;
            }
        }
        trace.picks.push(pick);
        let cost = trace.costs.last().unwrap() + strips[pick].measure();
        trace.costs.push(cost);
        for j in 0..strips.len() {
            if sizes[j] > 0.0 && nodes[j].iter().any(|&i| touched[i]) {
                sizes[j] = strip_size(ctx, &mags, &nodes[j], &active[j], &strips[j], q)?;
            }
        }
    }
    Ok(trace)
}

/// Strips with the tops of the dictionary's trees (duplicates removed).
pub fn strips_of(dict: &TreeDictionary) -> Vec<Strip> {
    let mut out: Vec<Strip> = Vec::new();
    for t in &dict.trees {
        let d = Strip { x: t.top.x, s: t.top.s };
        if !out.contains(&d) {
            out.push(d);
        }
    }
    out
}

fn check_dual(f: &OuterField, g: &OuterField) -> Result<()> {
    if f.grid() != g.grid() {
        return Err(Error::Shape("fields live on different grids".into()));
    }
    if f.space().dim() != g.space().dim() {
        return Err(Error::Shape("fields take values in spaces of different dimension".into()));
    }
    let expected = f.space().dual().p();
    if expected != g.space().p() {
        return Err(Error::Shape(format!(
            "second field lives in ℓ^{} but the dual of ℓ^{} is ℓ^{expected}",
            g.space().p(),
            f.space().p()
        )));
    }
    Ok(())
}

/// `|⟨F; G⟩|` at every node.
pub fn pairing_magnitudes(f: &OuterField, g: &OuterField) -> Result<Vec<f64>> {
    check_dual(f, g)?;
    Ok((0..f.grid().len()).map(|i| pairing_unchecked(f.at(i), g.at(i)).norm()).collect())
}

/// `∫ |⟨F; G⟩| dη dy dt` as a weighted node sum.
pub fn pairing_integral(f: &OuterField, g: &OuterField) -> Result<f64> {
    let mags = pairing_magnitudes(f, g)?;
    let grid = f.grid();
    let per_level = grid.eta.n * grid.y.n;
    Ok(mags
        .chunks(per_level)
        .enumerate()
        .map(|(k, c)| c.iter().sum::<f64>() * grid.weight(k))
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderRatio {
    pub lhs: f64,
    pub size_f: f64,
    pub size_g: f64,
    pub ratio: f64,
    /// Nonzero left-hand side against a vanishing right-hand side.
    pub violation: bool,
}

impl HolderRatio {
    pub fn new(lhs: f64, size_f: f64, size_g: f64) -> Self {
        let rhs = size_f * size_g;
        let (ratio, violation) = if rhs > 0.0 {
            (lhs / rhs, false)
        } else if lhs > 0.0 {
            (f64::INFINITY, true)
        } else {
            (0.0, false)
        };
        HolderRatio { lhs, size_f, size_g, ratio, violation }
    }
}

/// `‖1_{X∖A} ⟨F; G⟩‖_{L¹(T)} / (‖F‖_{F(T)} ‖G‖_{F*(T)})` with `A` the union of `excluded`.
pub fn size_holder_check(f: &OuterField, g: &OuterField, tree: &Tree, excluded: &[Tree]) -> Result<HolderRatio> {
    let grid = f.grid();
    let mut pair = pairing_magnitudes(f, g)?;
    for (i, v) in pair.iter_mut().enumerate() {
        let n = grid.node(i);
        if excluded.iter().any(|a| a.contains(n.eta, n.y, n.t, Region::Full)) {
            *v = 0.0;
        }
    }
    let lhs = local_size_of_magnitudes(grid, &pair, tree, &SizeSpec::Lp { p: 1.0, region: Region::Full })?;
    Ok(HolderRatio::new(lhs, local_size(f, tree, &SizeSpec::F)?, local_size(g, tree, &SizeSpec::FStar)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::NormedSpace;
    use crate::tfs::{GeometricAxis, Top, UniformAxis};
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const THETA: (f64, f64) = (-0.25, 1.125);
    const THETA_IN: (f64, f64) = (-0.25, 0.99);

    fn grid(eta: usize, y: usize, ratio: f64) -> TfsGrid {
        TfsGrid::new(
            UniformAxis::spanning(-2.0, 2.0, eta).unwrap(),
            UniformAxis::spanning(-4.0, 4.0, y).unwrap(),
            GeometricAxis::spanning(0.25, 4.0, ratio).unwrap(),
        )
    }

    fn tree(xi: f64, x: f64, s: f64) -> Tree {
        Tree::new(Top { xi, x, s }, THETA, THETA_IN).unwrap()
    }

    fn random_field(grid: TfsGrid, space: NormedSpace, seed: u64, density: f64) -> OuterField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        OuterField::from_fn(grid, space, |_| {
            let on = rng.gen_bool(density);
            (0..space.dim())
                .map(|_| {
                    if on {
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect()
        })
        .unwrap()
    }

    /// Node-by-node evaluation from the membership predicate.
    fn direct_size(field: &OuterField, tree: &Tree, spec: &SizeSpec) -> f64 {
        let grid = field.grid();
        let mags = field.magnitudes();
        let term = |region: Region, p: f64| {
            let mut acc: f64 = 0.0;
            for i in 0..grid.len() {
                let n = grid.node(i);
                if tree.contains(n.eta, n.y, n.t, region) {
                    let (k, _, _) = grid.split(i);
                    if p.is_infinite() {
                        acc = acc.max(mags[i]);
                    } else {
                        acc += mags[i].powf(p) * grid.weight(k) / tree.top.s;
                    }
                }
            }
            if p.is_infinite() {
                acc
            } else {
                acc.powf(1.0 / p)
            }
        };
        match *spec {
            SizeSpec::Lp { p, region } => term(region, p),
            SizeSpec::R => term(Region::Out, 2.0),
            SizeSpec::F => term(Region::Out, 2.0) + term(Region::Full, f64::INFINITY),
            SizeSpec::FStar => term(Region::Out, 2.0) + term(Region::In, 1.0),
        }
    }

    fn all_specs() -> Vec<SizeSpec> {
        vec![
            SizeSpec::Lp { p: 1.0, region: Region::Full },
            SizeSpec::Lp { p: 2.0, region: Region::In },
            SizeSpec::Lp { p: 0.5, region: Region::Out },
            SizeSpec::Lp { p: 3.0, region: Region::Full },
            SizeSpec::Lp { p: f64::INFINITY, region: Region::Out },
            SizeSpec::R,
            SizeSpec::F,
            SizeSpec::FStar,
        ]
    }

    #[test]
    fn rejects_bad_exponents() {
        assert!(SizeSpec::lp(0.0, Region::Full).is_err());
        assert!(SizeSpec::lp(-1.0, Region::Full).is_err());
        let g = grid(9, 9, 2.0);
        let f = OuterField::zeros(g, NormedSpace::scalar());
        let dict = TreeDictionary::new(THETA, THETA_IN, vec![Top { xi: 0.0, x: 0.0, s: 1.0 }]).unwrap();
        assert!(outer_lp_quasinorm(&f, 0.0, &dict, &SizeSpec::R).is_err());
        assert!(super_level_measure(&f, 0.0, &dict, &SizeSpec::R).is_err());
    }

    #[test]
    fn local_size_matches_direct_summation() {
        let g = grid(33, 33, 2f64.sqrt());
        let space = NormedSpace::new(3, 1.5).unwrap();
        let f = random_field(g, space, 7, 0.7);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let t = tree(rng.gen_range(-1.5..1.5), rng.gen_range(-3.0..3.0), rng.gen_range(0.5..4.0));
            for spec in all_specs() {
                let a = local_size(&f, &t, &spec).unwrap();
                let b = direct_size(&f, &t, &spec);
                assert!((a - b).abs() <= 1e-12 * b.max(1e-300), "{spec:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn zero_field_has_zero_sizes() {
        let g = grid(17, 17, 2.0);
        let f = OuterField::zeros(g, NormedSpace::new(2, 2.0).unwrap());
        let dict = TreeDictionary::lattice(&g, THETA, THETA_IN, 4, 4, 0.5, 4.0).unwrap();
        for spec in all_specs() {
            assert_eq!(local_size(&f, &dict.trees[0], &spec).unwrap(), 0.0);
            assert_eq!(outer_size(&f, &dict, &spec).unwrap(), 0.0);
            let (cost, cover) = super_level_measure(&f, 1.0, &dict, &spec).unwrap();
            assert_eq!(cost, 0.0);
            assert!(cover.chosen.is_empty());
            assert_eq!(outer_lp_quasinorm(&f, 2.0, &dict, &spec).unwrap(), 0.0);
        }
        let strips = strips_of(&dict);
        assert_eq!(iterated_quasinorm(&f, 2.0, 3.0, &strips, &dict, &SizeSpec::F).unwrap(), 0.0);
    }

    #[test]
    fn constant_field_linfty_size() {
        let g = grid(17, 17, 2.0);
        let space = NormedSpace::new(2, 2.0).unwrap();
        let c = [Complex64::new(3.0, 0.0), Complex64::new(0.0, 4.0)];
        let f = OuterField::from_fn(g, space, |_| c.to_vec()).unwrap();
        let spec = SizeSpec::Lp { p: f64::INFINITY, region: Region::Full };
        assert_eq!(local_size(&f, &tree(0.0, 0.0, 2.0), &spec).unwrap(), 5.0);
    }

    /// `(Σ_{T^out} w / s)^{1/2}` for the unit indicator of `T^out`, summed node by node.
    fn out_volume(g: &TfsGrid, t: &Tree, region: Region) -> f64 {
        (0..g.len())
            .filter(|&i| {
                let n = g.node(i);
                t.contains(n.eta, n.y, n.t, region)
            })
            .map(|i| g.weight(g.split(i).0) / t.top.s)
            .sum()
    }

    #[test]
    fn r_size_of_outer_indicator() {
        for (ne, ny, ratio) in [(33, 33, 2f64.sqrt()), (65, 65, 2f64.powf(0.25))] {
            let g = grid(ne, ny, ratio);
            let t = tree(0.25, 0.5, 2.0);
            let space = NormedSpace::new(2, 3.0).unwrap();
            let f = OuterField::from_fn(g, space, |n| {
                let on = t.contains(n.eta, n.y, n.t, Region::Out) as i32 as f64;
                vec![Complex64::new(on, 0.0), Complex64::new(0.0, 0.0)]
            })
            .unwrap();
            let vol = out_volume(&g, &t, Region::Out);
            assert!(vol > 0.0);
            let r = local_size(&f, &t, &SizeSpec::R).unwrap();
            assert!((r - vol.sqrt()).abs() <= 1e-12 * vol.sqrt());
        }
    }

    #[test]
    fn removal_never_increases_sizes() {
        let g = grid(17, 17, 2.0);
        let space = NormedSpace::new(2, 2.0).unwrap();
        let f = random_field(g, space, 9, 0.8);
        let dict = TreeDictionary::lattice(&g, THETA, THETA_IN, 4, 4, 0.5, 4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for spec in all_specs() {
            for _ in 0..5 {
                let removed: Vec<Tree> = (0..3).map(|_| dict.trees[rng.gen_range(0..dict.len())]).collect();
                let h = f.masked(|n| !removed.iter().any(|t| t.contains(n.eta, n.y, n.t, Region::Full)));
                for t in dict.trees.iter().step_by(7) {
                    assert!(local_size(&h, t, &spec).unwrap() <= local_size(&f, t, &spec).unwrap());
                }
            }
        }
    }

    #[test]
    fn single_tree_field() {
        let g = grid(33, 33, 2f64.sqrt());
        let t = tree(0.0, 0.0, 2.0);
        let dict = TreeDictionary::new(THETA, THETA_IN, vec![t.top, Top { xi: 1.0, x: -2.0, s: 1.0 }]).unwrap();
        let space = NormedSpace::scalar();
        let f = OuterField::from_fn(g, space, |n| {
            vec![Complex64::new(if t.contains(n.eta, n.y, n.t, Region::Full) { 2.0 } else { 0.0 }, 0.0)]
        })
        .unwrap();
        for spec in [SizeSpec::Lp { p: 2.0, region: Region::Full }, SizeSpec::R, SizeSpec::FStar] {
            let size = local_size(&f, &t, &spec).unwrap();
            assert_eq!(outer_size(&f, &dict, &spec).unwrap(), size);
            for p in [0.5, 1.0, 2.0, 3.5] {
                let v = outer_lp_quasinorm(&f, p, &dict, &spec).unwrap();
                let closed = size * (t.top.s / p).powf(1.0 / p);
                assert!((v - closed).abs() <= 1e-12 * closed, "{spec:?} p={p}: {v} vs {closed}");
            }
            let (cost, cover) = super_level_measure(&f, size / 2.0, &dict, &spec).unwrap();
            assert!(cost <= t.top.s);
            assert_eq!(cover.chosen, vec![0]);
            assert!(cover.residual(&f).is_zero());
            assert_eq!(super_level_measure(&f, size, &dict, &spec).unwrap().0, 0.0);
        }
    }

    #[test]
    fn greedy_certificate_and_monotonicity() {
        let g = grid(17, 17, 2f64.sqrt());
        let space = NormedSpace::new(2, 2.0).unwrap();
        let dict = TreeDictionary::lattice(&g, THETA, THETA_IN, 4, 4, 0.5, 4.0).unwrap();
        for seed in 0..3 {
            let f = random_field(g, space, seed, 0.5);
            for spec in [SizeSpec::F, SizeSpec::Lp { p: 2.0, region: Region::Full }] {
                let top = outer_size(&f, &dict, &spec).unwrap();
                let mut prev = f64::INFINITY;
                for k in 1..=12 {
                    let lambda = top * k as f64 / 10.0;
                    let (cost, cover) = super_level_measure(&f, lambda, &dict, &spec).unwrap();
                    let residual = outer_size(&cover.residual(&f), &dict, &spec).unwrap();
                    assert!(residual <= lambda);
                    assert_eq!(residual, cover.residual_size);
                    assert!(cost <= prev);
                    let expect: f64 = cover.chosen.iter().map(|&i| dict.trees[i].measure()).sum();
                    assert_eq!(cost, expect);
                    prev = cost;
                }
            }
        }
    }

    #[test]
    fn greedy_against_exhaustive() {
        let g = grid(17, 17, 2.0);
        let space = NormedSpace::scalar();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let bound = 1.0 + 12f64.ln();
        for seed in 0..4 {
            let tops: Vec<Top> = (0..12)
                .map(|_| Top {
                    xi: rng.gen_range(-1.0..1.0),
                    x: rng.gen_range(-2.0..2.0),
                    s: [0.5, 1.0, 2.0][rng.gen_range(0..3)],
                })
                .collect();
            let dict = TreeDictionary::new(THETA, THETA_IN, tops).unwrap();
            let f = random_field(g, space, 100 + seed, 0.6);
            let spec = SizeSpec::Lp { p: 1.0, region: Region::Full };
            let top = outer_size(&f, &dict, &spec).unwrap();
            for frac in [0.1, 0.4, 0.8] {
                let (greedy_cost, _) = super_level_measure(&f, top * frac, &dict, &spec).unwrap();
                let (opt, chosen) = super_level_measure_exhaustive(&f, top * frac, &dict, &spec).unwrap();
                let check: f64 = chosen.iter().map(|&i| dict.trees[i].measure()).sum();
                assert_eq!(check, opt);
                assert!(greedy_cost >= opt - 1e-12);
                assert!(greedy_cost <= opt * bound + 1e-12, "{greedy_cost} vs {opt}");
            }
        }
    }

    #[test]
    fn linfty_quasinorm_is_outer_size() {
        let g = grid(17, 17, 2.0);
        let dict = TreeDictionary::lattice(&g, THETA, THETA_IN, 4, 4, 0.5, 4.0).unwrap();
        let f = random_field(g, NormedSpace::new(2, 1.0).unwrap(), 4, 0.5);
        for spec in all_specs() {
            assert_eq!(
                outer_lp_quasinorm(&f, f64::INFINITY, &dict, &spec).unwrap(),
                outer_size(&f, &dict, &spec).unwrap()
            );
        }
    }

    #[test]
    fn weak_below_strong_up_to_constant() {
        let g = grid(17, 17, 2.0);
        let dict = TreeDictionary::lattice(&g, THETA, THETA_IN, 4, 4, 0.5, 4.0).unwrap();
        let f = random_field(g, NormedSpace::scalar(), 5, 0.5);
        for p in [1.0, 2.0, 4.0] {
            let strong = outer_lp_quasinorm(&f, p, &dict, &SizeSpec::R).unwrap();
            let weak = outer_weak_lp_quasinorm(&f, p, &dict, &SizeSpec::R).unwrap();
            // λ^p μ(λ) ≤ p ∫_0^λ τ^p μ(τ) dτ/τ for nonincreasing μ
            assert!(weak <= strong * p.powf(1.0 / p) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn iterated_single_strip() {
        let g = grid(17, 33, 2f64.sqrt());
        let t = tree(0.0, 0.5, 2.0);
        let dict = TreeDictionary::new(THETA, THETA_IN, vec![t.top]).unwrap();
        let strip = Strip::new(0.5, 2.0).unwrap();
        let f = random_field(g, NormedSpace::new(2, 2.0).unwrap(), 12, 0.9);
        let f = f.masked(|n| t.contains(n.eta, n.y, n.t, Region::Full));
        for spec in [SizeSpec::F, SizeSpec::FStar] {
            for (p, q) in [(2.0, 3.0), (1.5, 1.0), (4.0, 2.0)] {
                let v = iterated_quasinorm(&f, p, q, &[strip], &dict, &spec).unwrap();
                let inner = outer_lp_quasinorm(&f, q, &dict, &spec).unwrap();
                let hand = (strip.s / p).powf(1.0 / p) * strip.s.powf(-1.0 / q) * inner;
                assert!((v - hand).abs() <= 1e-12 * hand);
            }
        }
    }

    #[test]
    fn pairing_integral_cell() {
        let g = grid(9, 9, 2.0);
        let space = NormedSpace::new(2, 3.0).unwrap();
        let cell = g.index(2, 4, 5);
        let unit = |n: crate::tfs::Node| {
            let on = (n.eta, n.y, n.t) == {
                let c = g.node(cell);
                (c.eta, c.y, c.t)
            };
            vec![Complex64::new(on as i32 as f64, 0.0), Complex64::new(0.0, 0.0)]
        };
        let f = OuterField::from_fn(g, space, unit).unwrap();
        let h = OuterField::from_fn(g, space.dual(), unit).unwrap();
        assert_eq!(pairing_integral(&f, &h).unwrap(), g.weight(2));
        assert_eq!(pairing_integral(&f, &OuterField::zeros(g, space.dual())).unwrap(), 0.0);
        assert!(pairing_integral(&f, &f).is_err());
    }

    #[test]
    fn size_holder_closed_form() {
        let g = grid(33, 33, 2f64.sqrt());
        let space = NormedSpace::new(2, 2.0).unwrap();
        let t = tree(0.0, 0.0, 3.0);
        let f = OuterField::from_fn(g, space, |_| vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
        let h = OuterField::from_fn(g, space.dual(), |_| vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
        let r = size_holder_check(&f, &h, &t, &[]).unwrap();
        let (full, inner, outer) = (
            out_volume(&g, &t, Region::Full),
            out_volume(&g, &t, Region::In),
            out_volume(&g, &t, Region::Out),
        );
        let expected = full / ((outer.sqrt() + 1.0) * (outer.sqrt() + inner));
        assert!((r.ratio - expected).abs() <= 1e-12 * expected);
        assert!(r.ratio <= 1.0);
        let z = size_holder_check(&f, &OuterField::zeros(g, space.dual()), &t, &[]).unwrap();
        assert_eq!(z.ratio, 0.0);
        assert!(!z.violation);
        let cut = size_holder_check(&f, &h, &t, &[t]).unwrap();
        assert_eq!(cut.lhs, 0.0);
    }

    #[test]
    fn size_holder_random_pairs_bounded() {
        let g = grid(17, 17, 2f64.sqrt());
        let space = NormedSpace::new(2, 1.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for s in 0..20 {
            let f = random_field(g, space, 200 + s, 0.5);
            let h = random_field(g, space.dual(), 300 + s, 0.5);
            let t = tree(rng.gen_range(-1.0..1.0), rng.gen_range(-2.0..2.0), rng.gen_range(1.0..4.0));
            let r = size_holder_check(&f, &h, &t, &[]).unwrap();
            // ∫_in |⟨F;G⟩| ≤ L^∞ L¹_in and ∫_out |⟨F;G⟩| ≤ R(F) R(G)
            assert!(r.ratio <= 1.0 + 1e-12, "{r:?}");
        }
    }

    fn small_dict(g: &TfsGrid) -> TreeDictionary {
        TreeDictionary::lattice(g, THETA, THETA_IN, 4, 4, 1.0, 4.0).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn homogeneity(seed in 0u64..1000, scale in 0.1f64..10.0, p in 0.5f64..4.0) {
            let g = grid(9, 17, 2.0);
            let dict = small_dict(&g);
            let f = random_field(g, NormedSpace::new(2, 2.0).unwrap(), seed, 0.5);
            let h = f.scale(Complex64::new(scale, 0.0));
            for spec in [SizeSpec::F, SizeSpec::Lp { p: 1.5, region: Region::Full }] {
                let a = outer_lp_quasinorm(&f, p, &dict, &spec).unwrap();
                let b = outer_lp_quasinorm(&h, p, &dict, &spec).unwrap();
                prop_assert!((b - scale * a).abs() <= 1e-10 * scale * a.max(1e-300));
                let a = outer_size(&f, &dict, &spec).unwrap();
                let b = outer_size(&h, &dict, &spec).unwrap();
                prop_assert!((b - scale * a).abs() <= 1e-12 * scale * a.max(1e-300));
            }
        }

        #[test]
        fn super_level_nonincreasing(seed in 0u64..1000) {
            let g = grid(9, 17, 2.0);
            let dict = small_dict(&g);
            let f = random_field(g, NormedSpace::new(2, 4.0).unwrap(), seed, 0.5);
            let spec = SizeSpec::R;
            let trace = greedy_trace(&f, &dict, &spec).unwrap();
            prop_assert!(trace.levels.windows(2).all(|w| w[0] >= w[1]));
            prop_assert_eq!(*trace.levels.last().unwrap(), 0.0);
            let top = trace.levels[0];
            let mut prev = f64::INFINITY;
            for k in 1..20 {
                let m = super_level_measure(&f, top * k as f64 / 16.0, &dict, &spec).unwrap().0;
                prop_assert!(m <= prev);
                prop_assert_eq!(m, trace.measure_at(top * k as f64 / 16.0));
                prev = m;
            }
        }

        #[test]
        fn quasi_subadditive(seed in 0u64..1000, p in prop::sample::select(vec![0.5, 1.0, 2.0, 4.0])) {
            let g = grid(9, 17, 2.0);
            let dict = small_dict(&g);
            let space = NormedSpace::new(2, 2.0).unwrap();
            let f = random_field(g, space, seed, 0.4);
            let h = random_field(g, space, seed + 5000, 0.4);
            let spec = SizeSpec::Lp { p: 2.0, region: Region::Full };
            let sum = outer_lp_quasinorm(&f.add(&h).unwrap(), p, &dict, &spec).unwrap();
            let a = outer_lp_quasinorm(&f, p, &dict, &spec).unwrap();
            let b = outer_lp_quasinorm(&h, p, &dict, &spec).unwrap();
            let c = 2f64.powf(1.0 / p) * spec.triangle_constant();
            prop_assert!(sum <= c * (a + b) * (1.0 + 1e-12), "{} > {} ({}, {})", sum, c * (a + b), a, b);
        }
    }
}
