//! Branch tracking along curves.
//!
//! Sorted root tuples sampled along a curve are relabeled into discretely
//! differentiable branches: a left-to-right sweep detects near-contacts of
//! adjacent branches and decides swap / no-swap by minimizing the discrete
//! second difference, which distinguishes transversal crossings (slopes
//! differ; swap) from tangential contacts (kept unswapped by default).
//! The paired system is then measured: Lipschitz constant, derivative
//! jumps away from crossings, total variation of the derivative, a
//! Sobolev-type norm, and midpoint-convexity defects of the partial sums.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::curve::SampledCurve;
use crate::error::{HyperError, Result};
use crate::hyperpoly::{char_roots, Direction, HomPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossAction {
    Swap,
    NoSwap,
}

/// One resolved near-contact of a pair of branches. Swap decisions are
/// logged at the grid step where they happen; a window that closes without
/// any swap produces a single no-swap entry. `window` is the inclusive
/// grid-index range over which the pair stayed within detection distance.
#[derive(Debug, Clone, Serialize)]
pub struct CrossingEvent {
    pub index: usize,
    pub window: (usize, usize),
    pub pair: (usize, usize),
    pub action: CrossAction,
    pub slope_gap: f64,
    /// The swap / no-swap costs were closer than the tie tolerance at some
    /// step of this window; resolved by the documented no-swap default.
    pub ambiguous: bool,
    /// Part of a simultaneous contact of three or more branches, resolved
    /// by minimum-cost assignment.
    pub multi: bool,
}

/// A continuous relabeling of sorted tuples along a grid: `labels[i][j]`
/// is branch j at grid point i, and equals `sorted[i][perms[i][j]]`.
#[derive(Debug, Clone)]
pub struct BranchSystem {
    pub t0: f64,
    pub t1: f64,
    pub labels: Vec<Vec<f64>>,
    pub perms: Vec<Vec<usize>>,
    pub crossing_log: Vec<CrossingEvent>,
}

impl BranchSystem {
    pub fn nsteps(&self) -> usize {
        self.labels.len() - 1
    }

    pub fn nbranches(&self) -> usize {
        self.labels[0].len()
    }

    pub fn dt(&self) -> f64 {
        (self.t1 - self.t0) / self.nsteps() as f64
    }

    pub fn t(&self, i: usize) -> f64 {
        self.t0 + (self.t1 - self.t0) * (i as f64 / self.nsteps() as f64)
    }

    pub fn branch(&self, j: usize) -> Vec<f64> {
        self.labels.iter().map(|row| row[j]).collect()
    }

    /// Treat sorted data itself as the labeling (identity permutations,
    /// empty log). This is the reference point the pairing improves on,
    /// and the natural system for single-branch data.
    pub fn sorted_identity(sorted: &SampledCurve<Vec<f64>>) -> Result<Self> {
        let rows = validate_rows(sorted)?;
        let d = rows[0].len();
        Ok(Self {
            t0: sorted.t0(),
            t1: sorted.t1(),
            perms: vec![(0..d).collect(); rows.len()],
            labels: rows,
            crossing_log: Vec::new(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct PairOptions {
    /// Contact-window width in units of (slope gap)·Δt.
    pub kappa: f64,
    /// Tie tolerance for the swap criterion, relative to the local slope scale.
    pub tie_rel_tol: f64,
}

impl Default for PairOptions {
    fn default() -> Self {
        Self {
            kappa: 4.0,
            tie_rel_tol: 1e-9,
        }
    }
}

fn validate_rows(sorted: &SampledCurve<Vec<f64>>) -> Result<Vec<Vec<f64>>> {
    let d = sorted.values()[0].len();
    if d == 0 {
        return Err(HyperError::InvalidInput("empty root tuples".into()));
    }
    let mut rows = Vec::with_capacity(sorted.values().len());
    for (i, row) in sorted.values().iter().enumerate() {
        if row.len() != d {
            return Err(HyperError::DimensionMismatch {
                context: format!("row {} has {} entries, expected {}", i, row.len(), d),
            });
        }
        if row.iter().any(|x| !x.is_finite()) {
            return Err(HyperError::InvalidInput(format!(
                "non-finite root sample at grid index {}",
                i
            )));
        }
        let mut r = row.clone();
        r.sort_by(|a, b| b.partial_cmp(a).unwrap());
        rows.push(r);
    }
    Ok(rows)
}

/// Minimum-cost perfect assignment (Hungarian algorithm with potentials,
/// O(k^3)); returns the column assigned to each row.
fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let inf = f64::INFINITY;
    let mut u = vec![0.0_f64; n + 1];
    let mut v = vec![0.0_f64; n + 1];
    let mut p = vec![0usize; n + 1]; // p[col] = matched row (1-based; 0 = free)
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut ans = vec![0usize; n];
    for j in 1..=n {
        if p[j] != 0 {
            ans[p[j] - 1] = j - 1;
        }
    }
    ans
}

struct Window {
    start: usize,
    last: usize,
    had_tie: bool,
    multi: bool,
    last_slope_gap: f64,
    swaps: Vec<CrossingEvent>,
}

fn close_window(key: (usize, usize), w: Window, log: &mut Vec<CrossingEvent>) {
    if w.swaps.is_empty() {
        log.push(CrossingEvent {
            index: w.last,
            window: (w.start, w.last),
            pair: key,
            action: CrossAction::NoSwap,
            slope_gap: w.last_slope_gap,
            ambiguous: w.had_tie,
            multi: w.multi,
        });
    } else {
        for mut ev in w.swaps {
            ev.window = (w.start, w.last);
            ev.ambiguous = ev.ambiguous || w.had_tie;
            ev.multi = ev.multi || w.multi;
            log.push(ev);
        }
    }
}

/// Relabel sorted tuples into continuous branches.
///
/// The sweep keeps each branch at its sorted position until a contact is
/// detected: adjacent positions whose gap at the next sample is below
/// κ·|slope gap|·Δt form a contact group. Within a group the new values
/// are assigned to branches so as to minimize the summed second
/// differences |value − 2·current + previous| — straight continuation
/// wins at a transversal crossing, which is exactly a swap of sorted
/// positions. Near-ties go to the no-swap default and are marked
/// ambiguous. Groups of three or more are resolved by minimum-cost
/// assignment and marked as multi-contacts.
pub fn pair_branches(sorted: &SampledCurve<Vec<f64>>, opts: &PairOptions) -> Result<BranchSystem> {
    if !(opts.kappa > 0.0) || !(opts.tie_rel_tol >= 0.0) {
        return Err(HyperError::InvalidInput("bad pairing options".into()));
    }
    let rows = validate_rows(sorted)?;
    let n = sorted.nsteps();
    let d = rows[0].len();
    let dt = sorted.dt();

    let mut labels: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut perms: Vec<Vec<usize>> = Vec::with_capacity(n + 1);
    let mut pos: Vec<usize> = (0..d).collect(); // branch -> sorted position
    labels.push(rows[0].clone());
    perms.push(pos.clone());
    if n >= 1 {
        // No slope history yet: continue the sorted labeling.
        labels.push(rows[1].clone());
        perms.push(pos.clone());
    }

    let mut windows: BTreeMap<(usize, usize), Window> = BTreeMap::new();
    let mut log: Vec<CrossingEvent> = Vec::new();

    for i in 1..n {
        let (prev, cur) = (&labels[i - 1], &labels[i]);
        let delta: Vec<f64> = (0..d).map(|j| (cur[j] - prev[j]) / dt).collect();
        let mut occ = vec![0usize; d]; // position -> branch
        for j in 0..d {
            occ[pos[j]] = j;
        }
        let next_row = &rows[i + 1];

        // Link adjacent positions whose next-sample gap is inside the window.
        let mut linked = vec![false; d.saturating_sub(1)];
        for p in 0..d.saturating_sub(1) {
            let slope_gap = (delta[occ[p]] - delta[occ[p + 1]]).abs();
            let gap = next_row[p] - next_row[p + 1];
            if gap < opts.kappa * slope_gap * dt {
                linked[p] = true;
            }
        }

        let mut new_pos = pos.clone();
        let mut touched: Vec<(usize, usize)> = Vec::new(); // pairs in contact this step
        let mut p = 0usize;
        while p < d {
            let mut q = p;
            while q + 1 < d && linked[q] {
                q += 1;
            }
            if q > p {
                let group_pos: Vec<usize> = (p..=q).collect();
                let branches: Vec<usize> = group_pos.iter().map(|&pp| occ[pp]).collect();
                let k = branches.len();
                let sd = |b: usize, pp: usize| (next_row[pp] - 2.0 * cur[b] + prev[b]).abs();

                let mut tie_here = false;
                let assign: Vec<usize> = if k == 2 {
                    let (b0, b1) = (branches[0], branches[1]);
                    let c_keep = sd(b0, group_pos[0]) + sd(b1, group_pos[1]);
                    let c_swap = sd(b0, group_pos[1]) + sd(b1, group_pos[0]);
                    let slope_scale = delta[b0].abs().max(delta[b1].abs());
                    let tie_tol = opts.tie_rel_tol * slope_scale;
                    if (c_keep - c_swap).abs() <= tie_tol {
                        tie_here = true;
                        vec![0, 1]
                    } else if c_swap < c_keep {
                        vec![1, 0]
                    } else {
                        vec![0, 1]
                    }
                } else {
                    // Multi-contact: minimum-cost assignment with a tiny bias
                    // toward the current position so exact ties stay put.
                    let vscale = branches
                        .iter()
                        .map(|&b| cur[b].abs())
                        .fold(1.0_f64, f64::max);
                    let bias = 1e-13 * vscale;
                    let cost: Vec<Vec<f64>> = (0..k)
                        .map(|r| {
                            (0..k)
                                .map(|c| {
                                    sd(branches[r], group_pos[c]) + if r == c { 0.0 } else { bias }
                                })
                                .collect()
                        })
                        .collect();
                    min_cost_assignment(&cost)
                };

                for r in 0..k {
                    new_pos[branches[r]] = group_pos[assign[r]];
                }

                // Window bookkeeping per unordered branch pair in the group.
                for r1 in 0..k {
                    for r2 in (r1 + 1)..k {
                        let (a, b) = (branches[r1], branches[r2]);
                        let key = (a.min(b), a.max(b));
                        touched.push(key);
                        let sg = (delta[a] - delta[b]).abs();
                        let w = windows.entry(key).or_insert(Window {
                            start: i,
                            last: i + 1,
                            had_tie: false,
                            multi: false,
                            last_slope_gap: sg,
                            swaps: Vec::new(),
                        });
                        w.last = i + 1;
                        w.last_slope_gap = sg;
                        w.had_tie |= tie_here;
                        w.multi |= k > 2;
                        if assign[r1] > assign[r2] {
                            w.swaps.push(CrossingEvent {
                                index: i + 1,
                                window: (w.start, w.last),
                                pair: key,
                                action: CrossAction::Swap,
                                slope_gap: sg,
                                ambiguous: false,
                                multi: k > 2,
                            });
                        }
                    }
                }
            }
            p = q + 1;
        }

        // Close windows whose pair separated this step.
        let stale: Vec<(usize, usize)> = windows
            .keys()
            .filter(|k| !touched.contains(k))
            .copied()
            .collect();
        for key in stale {
            let w = windows.remove(&key).unwrap();
            close_window(key, w, &mut log);
        }

        pos = new_pos;
        labels.push((0..d).map(|j| rows[i + 1][pos[j]]).collect());
        perms.push(pos.clone());
    }

    // Flush windows still open at the right endpoint.
    let remaining: Vec<(usize, usize)> = windows.keys().copied().collect();
    for key in remaining {
        let w = windows.remove(&key).unwrap();
        close_window(key, w, &mut log);
    }

    Ok(BranchSystem {
        t0: sorted.t0(),
        t1: sorted.t1(),
        labels,
        perms,
        crossing_log: log,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RefinementEntry {
    pub nsteps: usize,
    pub tv_derivative: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegularityReport {
    /// Largest cell-slope magnitude over all branches.
    pub lipschitz: f64,
    /// Largest jump of the discrete derivative across adjacent cells,
    /// measured outside crossing windows.
    pub c1_defect: f64,
    /// Largest per-branch total variation of the discrete derivative.
    pub tv_derivative: f64,
    /// Sum over branches of the L1 norms of value and derivative plus the
    /// derivative's total variation (second-derivative mass).
    pub w21_norm: f64,
    /// Worst midpoint-convexity violation of the partial sums of the
    /// sorted data along the grid.
    pub dc_convexity_defect: f64,
    /// Total variation of the derivative recomputed on nested coarser
    /// grids; growth under refinement signals a derivative of unbounded
    /// variation.
    pub refinement_trace: Vec<RefinementEntry>,
}

fn branch_tv(values: &[f64], dt: f64) -> f64 {
    let slopes: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]) / dt).collect();
    slopes.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Regularity statistics of a branch system; `refinements` lists coarser
/// grid sizes (each dividing the base grid) for the TV refinement trace.
pub fn regularity_report(bs: &BranchSystem, refinements: &[usize]) -> Result<RegularityReport> {
    let n = bs.nsteps();
    if n < 8 {
        return Err(HyperError::GridTooCoarse { nsteps: n, min: 8 });
    }
    for w in refinements.windows(2) {
        if w[1] <= w[0] {
            return Err(HyperError::InvalidInput(
                "refinement sizes must be strictly increasing".into(),
            ));
        }
    }
    let d = bs.nbranches();
    let dt = bs.dt();

    let slopes: Vec<Vec<f64>> = (0..d)
        .map(|j| {
            (0..n)
                .map(|i| (bs.labels[i + 1][j] - bs.labels[i][j]) / dt)
                .collect()
        })
        .collect();

    let lipschitz = slopes
        .iter()
        .flatten()
        .map(|m| m.abs())
        .fold(0.0_f64, f64::max);

    // Exclude derivative jumps inside logged crossing windows: a correct
    // pairing is smooth there, but the jump location itself belongs to the
    // contact and is measured by the crossing log, not by c1_defect.
    let mut excluded = vec![false; n + 1];
    for ev in &bs.crossing_log {
        for p in ev.window.0..=ev.window.1.min(n) {
            excluded[p] = true;
        }
    }
    let mut c1_defect = 0.0_f64;
    for j in 0..d {
        for i in 1..n {
            if !excluded[i] {
                c1_defect = c1_defect.max((slopes[j][i] - slopes[j][i - 1]).abs());
            }
        }
    }

    let tvs: Vec<f64> = slopes
        .iter()
        .map(|s| s.windows(2).map(|w| (w[1] - w[0]).abs()).sum())
        .collect();
    let tv_derivative = tvs.iter().copied().fold(0.0_f64, f64::max);

    let mut w21_norm = 0.0_f64;
    for j in 0..d {
        let mut l1_val = 0.0;
        for i in 0..n {
            l1_val += 0.5 * (bs.labels[i][j].abs() + bs.labels[i + 1][j].abs()) * dt;
        }
        let l1_deriv: f64 = slopes[j].iter().map(|m| m.abs() * dt).sum();
        w21_norm += l1_val + l1_deriv + tvs[j];
    }

    // Midpoint convexity of the partial sums of the sorted tuples.
    let sorted_rows: Vec<Vec<f64>> = bs
        .labels
        .iter()
        .map(|row| {
            let mut r = row.clone();
            r.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let mut acc = 0.0;
            r.iter_mut().for_each(|x| {
                acc += *x;
                *x = acc;
            });
            r
        })
        .collect();
    let mut dc_convexity_defect = 0.0_f64;
    for i in 1..n {
        for k in 0..d {
            let mid = sorted_rows[i][k] - 0.5 * (sorted_rows[i - 1][k] + sorted_rows[i + 1][k]);
            dc_convexity_defect = dc_convexity_defect.max(mid.max(0.0));
        }
    }

    let mut refinement_trace = Vec::with_capacity(refinements.len());
    for &nk in refinements {
        if nk == 0 || n % nk != 0 {
            return Err(HyperError::RefinementMismatch {
                requested: nk,
                base: n,
            });
        }
        let stride = n / nk;
        let cdt = dt * stride as f64;
        let mut worst = 0.0_f64;
        for j in 0..d {
            let vals: Vec<f64> = (0..=nk).map(|i| bs.labels[i * stride][j]).collect();
            worst = worst.max(branch_tv(&vals, cdt));
        }
        refinement_trace.push(RefinementEntry {
            nsteps: nk,
            tv_derivative: worst,
        });
    }

    Ok(RegularityReport {
        lipschitz,
        c1_defect,
        tv_derivative,
        w21_norm,
        dc_convexity_defect,
        refinement_trace,
    })
}

/// Sorted characteristic roots along a point curve; failures carry the
/// grid index.
pub fn sorted_branches(
    f: &HomPoly,
    v: &Direction,
    curve: &SampledCurve<Vec<f64>>,
) -> Result<SampledCurve<Vec<f64>>> {
    curve.try_map(|x| Ok(char_roots(f, v, x)?.values))
}

/// Write branches as CSV: `t,lam1,...,lamd,perm`, where `perm` is the
/// grid point's sorted-position permutation joined with dashes.
pub fn save_branches_csv(bs: &BranchSystem, path: &Path) -> Result<()> {
    let d = bs.nbranches();
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["t".to_string()];
    header.extend((1..=d).map(|j| format!("lam{}", j)));
    header.push("perm".to_string());
    w.write_record(&header)?;
    for i in 0..=bs.nsteps() {
        let mut rec = vec![bs.t(i).to_string()];
        rec.extend(bs.labels[i].iter().map(|x| x.to_string()));
        rec.push(
            bs.perms[i]
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join("-"),
        );
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub c1_bound: f64,
    pub w21_norm: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub sup_c1: f64,
    pub sup_w21: f64,
    pub failures: usize,
}

/// Run a tracking pipeline once per parameter value; failed rows are
/// recorded and skipped in the suprema.
pub fn uniform_sweep(
    params: &[f64],
    mut pipeline: impl FnMut(f64) -> Result<(BranchSystem, RegularityReport)>,
) -> SweepTable {
    let mut rows = Vec::with_capacity(params.len());
    let (mut sup_c1, mut sup_w21) = (0.0_f64, 0.0_f64);
    let mut failures = 0usize;
    for &r in params {
        match pipeline(r) {
            Ok((_, rep)) => {
                sup_c1 = sup_c1.max(rep.lipschitz);
                sup_w21 = sup_w21.max(rep.w21_norm);
                rows.push(SweepRow {
                    param: r,
                    c1_bound: rep.lipschitz,
                    w21_norm: rep.w21_norm,
                    error: None,
                });
            }
            Err(e) => {
                failures += 1;
                rows.push(SweepRow {
                    param: r,
                    c1_bound: f64::NAN,
                    w21_norm: f64::NAN,
                    error: Some(e.to_string()),
                });
            }
        }
    }
    SweepTable {
        rows,
        sup_c1,
        sup_w21,
        failures,
    }
}
