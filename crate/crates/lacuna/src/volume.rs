//! Numerical volume functions V(c) = double integral of dx dy / x over
//! sublevel regions, their Gelfand-Leray derivatives, vanishing-lens
//! periods, and the ramification probe combining a period with the exact
//! monodromy obstruction.
//!
//! Quadrature strategy: for a region cut out by polynomial constraints
//! g_i(x, y) <= 0, the y-measure of the slice at fixed x is computed exactly
//! (up to f64 root finding) by isolating all real roots of each g_i(x, .)
//! with a derivative-recursion bisection; the outer x-integral of
//! (1/x) * len(x) is then done by adaptive Gauss-Legendre refinement.  The
//! open Gauss nodes tolerate the integrable sqrt singularities at fold
//! points of the region boundary.

use crate::algebra::Rat;
use crate::families::{
    boundary_critical_values, eval_f, interior_critical_points, Class, CritKind, CriticalPoint,
    FamilyError,
};
use num_traits::ToPrimitive;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum VolumeError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("wall in c: level {c} is within {dist:.3e} of the critical value {nu}")]
    WallInC { c: f64, nu: f64, dist: f64 },
    #[error("pole on domain: the region touches S = {{x=0}}")]
    PoleOnDomain,
    #[error("near-critical level: distance {dist:.3e} to critical value {nu}")]
    NearCritical { nu: f64, dist: f64 },
    #[error("no interior critical value within {tol:.1e} of {nu}")]
    NotACriticalValue { nu: f64, tol: f64 },
    #[error("lens at critical point with |x| = {x_abs:.3e} touches S")]
    LensTouchesS { x_abs: f64 },
    #[error("epsilon {eps:.3e} too large: lens of radius {rho:.3e} leaks through its isolating ball")]
    EpsilonTooLarge { eps: f64, rho: f64 },
    #[error("component index {index} out of range ({count} components)")]
    BadComponent { index: usize, count: usize },
    #[error("quadrature failed to reach tolerance {tol:.1e} (estimate {estimate:.3e})")]
    Tolerance { tol: f64, estimate: f64 },
    #[error("{0}")]
    Numeric(String),
}

/// Dense bivariate polynomial with f64 coefficients, c[i][j] x^i y^j.
#[derive(Clone, Debug)]
pub struct Poly2 {
    pub c: Vec<Vec<f64>>,
}

impl Poly2 {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut acc = 0.0;
        for ci in self.c.iter().rev() {
            let mut row = 0.0;
            for cj in ci.iter().rev() {
                row = row * y + cj;
            }
            acc = acc * x + row;
        }
        acc
    }

    /// Coefficients of y -> p(x, y) at fixed x, ascending.
    pub fn y_poly(&self, x: f64) -> Vec<f64> {
        let deg_y = self.c.iter().map(|r| r.len()).max().unwrap_or(1);
        let mut out = vec![0.0; deg_y];
        let mut xp = 1.0;
        for ci in &self.c {
            for (j, cj) in ci.iter().enumerate() {
                out[j] += cj * xp;
            }
            xp *= x;
        }
        out
    }

    /// Partial derivative in y.
    pub fn dy(&self) -> Poly2 {
        Poly2 {
            c: self
                .c
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .skip(1)
                        .map(|(j, v)| v * j as f64)
                        .collect()
                })
                .collect(),
        }
    }

    pub fn shift_const(&self, d: f64) -> Poly2 {
        let mut out = self.clone();
        if out.c.is_empty() {
            out.c.push(vec![0.0]);
        }
        if out.c[0].is_empty() {
            out.c[0].push(0.0);
        }
        out.c[0][0] += d;
        out
    }

    pub fn scale(&self, s: f64) -> Poly2 {
        Poly2 {
            c: self
                .c
                .iter()
                .map(|r| r.iter().map(|v| v * s).collect())
                .collect(),
        }
    }

    /// (x - a)^2 + (y - b)^2 - r^2.
    pub fn circle(a: f64, b: f64, r: f64) -> Poly2 {
        Poly2 {
            c: vec![
                vec![a * a + b * b - r * r, -2.0 * b, 1.0],
                vec![-2.0 * a, 0.0, 0.0],
                vec![1.0, 0.0, 0.0],
            ],
        }
    }
}

/// f_lambda as a Poly2.
pub fn f_poly2(class: Class, lambda: &[Rat]) -> Poly2 {
    let l: Vec<f64> = lambda.iter().map(|v| v.to_f64().unwrap()).collect();
    let s = class.sign().as_i32() as f64;
    match class {
        Class::B { k, .. } => {
            // p(x) + s y^2
            let mut c = vec![vec![0.0; 3]; k + 1];
            for (i, li) in l.iter().enumerate() {
                c[i][0] = *li;
            }
            c[k][0] = 1.0;
            c[0][2] = s;
            Poly2 { c }
        }
        Class::C { k, .. } => {
            // x y + s y^k + sum l_i y^i
            let mut c = vec![vec![0.0; k + 1], vec![0.0; k + 1]];
            c[1][1] = 1.0;
            c[0][k] += s;
            for (i, li) in l.iter().enumerate() {
                c[0][i] += *li;
            }
            Poly2 { c }
        }
        Class::F4 { .. } => {
            // s x^2 + y^3 + l3 x + l2 y + l1 x y + l0
            Poly2 {
                c: vec![
                    vec![l[0], l[2], 0.0, 1.0],
                    vec![l[3], l[1], 0.0, 0.0],
                    vec![s, 0.0, 0.0, 0.0],
                ],
            }
        }
    }
}

/// All real roots of the f64 polynomial (ascending coefficients) in
/// [lo, hi], via recursive critical-point bracketing.
pub fn poly1_roots(coeffs: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let mut cs: Vec<f64> = coeffs.to_vec();
    while cs.last().map_or(false, |v| v.abs() < 1e-300) {
        cs.pop();
    }
    if cs.len() <= 1 {
        return vec![];
    }
    if cs.len() == 2 {
        let r = -cs[0] / cs[1];
        return if r >= lo && r <= hi { vec![r] } else { vec![] };
    }
    let deriv: Vec<f64> = cs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, v)| v * i as f64)
        .collect();
    let mut brackets = vec![lo];
    brackets.extend(poly1_roots(&deriv, lo, hi));
    brackets.push(hi);
    let eval = |x: f64| {
        let mut acc = 0.0;
        for v in cs.iter().rev() {
            acc = acc * x + v;
        }
        acc
    };
    let mut roots = vec![];
    for w in brackets.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let (fa, fb) = (eval(a), eval(b));
        if fa == 0.0 {
            if roots.last().map_or(true, |&r: &f64| (r - a as f64).abs() > 1e-14) {
                roots.push(a);
            }
            continue;
        }
        if fa * fb > 0.0 {
            continue;
        }
        let (mut a, mut b, mut fa) = (a, b, fa);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let fm = eval(m);
            if fa * fm <= 0.0 {
                b = m;
            } else {
                a = m;
                fa = fm;
            }
        }
        roots.push(0.5 * (a + b));
    }
    if eval(hi) == 0.0 {
        roots.push(hi);
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // double roots are only located to ~sqrt(machine eps); merge accordingly
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-7 * (1.0 + a.abs().max(b.abs())));
    roots
}

/// Grid flood-fill component labels, shared by the region machinery.
#[derive(Clone, Debug)]
pub struct ComponentMask {
    x0: f64,
    y0: f64,
    h: f64,
    n: usize,
    ids: Vec<i32>, // -1: outside
}

impl ComponentMask {
    fn cell(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let i = ((x - self.x0) / self.h).floor() as i64;
        let j = ((y - self.y0) / self.h).floor() as i64;
        if i < 0 || j < 0 || i >= self.n as i64 || j >= self.n as i64 {
            return None;
        }
        Some((i as usize, j as usize))
    }

    /// Component id at a point.  Unlabeled cells (thin tips and slivers the
    /// grid missed) are resolved by growing rings of neighbors: the nearest
    /// labeled cells belong to the blob the point is part of.
    pub fn lookup(&self, x: f64, y: f64) -> Option<i32> {
        let (i, j) = self.cell(x, y)?;
        let direct = self.ids[i * self.n + j];
        if direct >= 0 {
            return Some(direct);
        }
        for radius in 1i64..=24 {
            let mut votes: Vec<i32> = vec![];
            for di in -radius..=radius {
                for dj in -radius..=radius {
                    if di.abs() != radius && dj.abs() != radius {
                        continue; // ring boundary only
                    }
                    let (a, b) = (i as i64 + di, j as i64 + dj);
                    if a < 0 || b < 0 || a >= self.n as i64 || b >= self.n as i64 {
                        continue;
                    }
                    let id = self.ids[a as usize * self.n + b as usize];
                    if id >= 0 {
                        votes.push(id);
                    }
                }
            }
            if !votes.is_empty() {
                votes.sort();
                // majority of the nearest ring
                let mut best = (0usize, votes[0]);
                let mut run = (0usize, votes[0]);
                for &v in &votes {
                    if v == run.1 {
                        run.0 += 1;
                    } else {
                        run = (1, v);
                    }
                    if run.0 > best.0 {
                        best = run;
                    }
                }
                return Some(best.1);
            }
        }
        None
    }
}

/// One connected component of { side * (f - c) <= 0 } inside the working
/// disk.
#[derive(Clone, Debug, Serialize)]
pub struct RegionSpec {
    pub class: Class,
    #[serde(skip)]
    pub lambda: Vec<Rat>,
    pub c: f64,
    /// +1: f <= c, -1: f >= c.
    pub side: i32,
    pub component: usize,
    pub s_avoiding: bool,
    pub disk_radius: f64,
    pub bbox: [f64; 4],
    #[serde(skip)]
    pub mask: Option<ComponentMask>,
    #[serde(skip)]
    pub needs_mask: bool,
}

/// Radius of the fixed working disk the sublevel sets are clipped to.  It
/// depends on lambda only: keeping it independent of c makes V(c) values at
/// different levels mutually comparable (the window does not move), so
/// dV/dc from the moving f = c boundary matches finite differences even
/// for unbounded sublevel components.
fn working_radius(class: Class, lambda: &[Rat]) -> f64 {
    let prof = crate::families::profile_poly(class, lambda).unwrap();
    let base = prof.cauchy_bound().to_f64().unwrap();
    let b2 = match class {
        Class::F4 { sign } => crate::families::f4_d_poly(lambda, sign)
            .cauchy_bound()
            .to_f64()
            .unwrap(),
        _ => 0.0,
    };
    (base.max(b2) + 3.0).max(4.0)
}

/// Every critical value of f and of f|_S, numerically.
pub fn all_critical_values(class: Class, lambda: &[Rat]) -> Result<Vec<f64>, FamilyError> {
    let mut out: Vec<f64> = interior_critical_points(class, lambda)?
        .iter()
        .map(|cp| cp.value)
        .collect();
    out.extend(boundary_critical_values(class, lambda)?);
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(out)
}

const MASK_N: usize = 512;

/// Connected components of { side*(f - c) <= 0 } inside the working disk,
/// each labeled S-avoiding or S-touching, in deterministic order.
pub fn region_components(
    class: Class,
    lambda: &[Rat],
    c: f64,
    side: i32,
) -> Result<Vec<RegionSpec>, VolumeError> {
    let crit = all_critical_values(class, lambda)?;
    for nu in &crit {
        let d = (c - nu).abs();
        if d < 1e-9 * (1.0 + c.abs()) {
            return Err(VolumeError::WallInC { c, nu: *nu, dist: d });
        }
    }
    let r = working_radius(class, lambda);
    let fill = |x0: f64, y0: f64, h: f64, n: usize| -> Vec<bool> {
        let mut inside = vec![false; n * n];
        for i in 0..n {
            let x = x0 + (i as f64 + 0.5) * h;
            for j in 0..n {
                let y = y0 + (j as f64 + 0.5) * h;
                if x * x + y * y > r * r {
                    continue;
                }
                let v = eval_f(class, lambda, x, y) - c;
                inside[i * n + j] = (side as f64) * v <= 0.0;
            }
        }
        inside
    };
    // pass 1: coarse scan of the working disk to bound the occupied area,
    // so the fine grid's resolution adapts to the region's actual scale
    let nc = MASK_N;
    let hc = 2.0 * r / nc as f64;
    let coarse = fill(-r, -r, hc, nc);
    let mut occ = [nc, 0usize, nc, 0usize];
    for i in 0..nc {
        for j in 0..nc {
            if coarse[i * nc + j] {
                occ[0] = occ[0].min(i);
                occ[1] = occ[1].max(i);
                occ[2] = occ[2].min(j);
                occ[3] = occ[3].max(j);
            }
        }
    }
    if occ[0] > occ[1] {
        return Ok(vec![]);
    }
    // pass 2: fine square grid over the occupied box plus a margin
    let x0 = (-r + occ[0] as f64 * hc - 3.0 * hc).max(-r);
    let y0 = (-r + occ[2] as f64 * hc - 3.0 * hc).max(-r);
    let x1 = (-r + (occ[1] + 1) as f64 * hc + 3.0 * hc).min(r);
    let y1 = (-r + (occ[3] + 1) as f64 * hc + 3.0 * hc).min(r);
    let n = MASK_N;
    let h = (x1 - x0).max(y1 - y0) / n as f64;
    let inside = fill(x0, y0, h, n);
    let mut ids = vec![-1i32; n * n];
    let mut comps: Vec<(usize, [usize; 4], f64)> = vec![]; // (id, cellbox, min|x| cell center)
    let mut next = 0i32;
    for start in 0..n * n {
        if !inside[start] || ids[start] >= 0 {
            continue;
        }
        let id = next;
        next += 1;
        let mut stack = vec![start];
        ids[start] = id;
        let mut bbox = [n, 0usize, n, 0usize]; // imin imax jmin jmax
        let mut minx = f64::INFINITY;
        while let Some(cell) = stack.pop() {
            let (i, j) = (cell / n, cell % n);
            bbox[0] = bbox[0].min(i);
            bbox[1] = bbox[1].max(i);
            bbox[2] = bbox[2].min(j);
            bbox[3] = bbox[3].max(j);
            let xc = x0 + (i as f64 + 0.5) * h;
            minx = minx.min(xc.abs());
            let mut push = |ni: i64, nj: i64, stack: &mut Vec<usize>| {
                if ni < 0 || nj < 0 || ni >= n as i64 || nj >= n as i64 {
                    return;
                }
                let idx = ni as usize * n + nj as usize;
                if inside[idx] && ids[idx] < 0 {
                    ids[idx] = id;
                    stack.push(idx);
                }
            };
            push(i as i64 - 1, j as i64, &mut stack);
            push(i as i64 + 1, j as i64, &mut stack);
            push(i as i64, j as i64 - 1, &mut stack);
            push(i as i64, j as i64 + 1, &mut stack);
        }
        comps.push((id as usize, [bbox[0], bbox[1], bbox[2], bbox[3]], minx));
    }
    // deterministic order: by bbox position
    comps.sort_by(|a, b| (a.1[0], a.1[2]).cmp(&(b.1[0], b.1[2])));
    let mask = ComponentMask {
        x0,
        y0,
        h,
        n,
        ids,
    };
    let mut out = vec![];
    let boxes: Vec<[f64; 4]> = comps
        .iter()
        .map(|(_, cb, _)| {
            [
                x0 + cb[0] as f64 * h - 2.0 * h,
                x0 + (cb[1] + 1) as f64 * h + 2.0 * h,
                y0 + cb[2] as f64 * h - 2.0 * h,
                y0 + (cb[3] + 1) as f64 * h + 2.0 * h,
            ]
        })
        .collect();
    let many = comps.len() > 1;
    for (slot, (id, _, minx)) in comps.iter().enumerate() {
        let bb = boxes[slot];
        // relabel so the target component is id 0, all others 1
        let ids: Vec<i32> = mask
            .ids
            .iter()
            .map(|&v| if v == *id as i32 { 0 } else if v >= 0 { 1 } else { -1 })
            .collect();
        out.push(RegionSpec {
            class,
            lambda: lambda.to_vec(),
            c,
            side,
            component: slot,
            s_avoiding: *minx > 2.0 * h,
            disk_radius: r,
            bbox: bb,
            mask: Some(ComponentMask { ids, ..mask.clone() }),
            needs_mask: many,
        });
    }
    Ok(out)
}

/// y-intervals of { all g <= 0 } on the segment { x } x [ylo, yhi], plus the
/// list of interval endpoints that are roots of constraint `track`.
fn inside_segments(
    x: f64,
    ylo: f64,
    yhi: f64,
    constraints: &[Poly2],
    track: usize,
) -> (Vec<(f64, f64)>, Vec<f64>) {
    let mut cuts: Vec<(f64, bool)> = vec![(ylo, false), (yhi, false)];
    for (ci, g) in constraints.iter().enumerate() {
        for r in poly1_roots(&g.y_poly(x), ylo, yhi) {
            cuts.push((r, ci == track));
        }
    }
    cuts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut segs = vec![];
    let mut tracked = vec![];
    for w in 0..cuts.len() - 1 {
        let (a, b) = (cuts[w].0, cuts[w + 1].0);
        if b - a < 1e-14 {
            continue;
        }
        let m = 0.5 * (a + b);
        if constraints.iter().all(|g| g.eval(x, m) <= 0.0) {
            segs.push((a, b));
        }
    }
    // tracked endpoints adjacent to exactly one inside segment
    for &(r, is_tracked) in &cuts {
        if !is_tracked {
            continue;
        }
        let left = segs.iter().any(|&(_, b)| (b - r).abs() < 1e-12);
        let right = segs.iter().any(|&(a, _)| (a - r).abs() < 1e-12);
        if left != right {
            tracked.push(r);
        }
    }
    (segs, tracked)
}

/// Adaptive Gauss-Legendre on [a, b]: compare one panel against two halves,
/// recurse where they disagree.
fn adaptive_gauss(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
    const XS: [f64; 6] = [
        0.125_233_408_511_468_9,
        0.367_831_498_998_180_1,
        0.587_317_954_286_617_4,
        0.769_902_674_194_304_9,
        0.904_117_256_370_474_9,
        0.981_560_634_246_719_3,
    ];
    const WS: [f64; 6] = [
        0.249_147_045_813_402_8,
        0.233_492_536_538_354_8,
        0.203_167_426_723_065_9,
        0.160_078_328_543_346_2,
        0.106_939_325_995_318_2,
        0.047_175_336_386_511_83,
    ];
    let panel = |a: f64, b: f64| -> f64 {
        let m = 0.5 * (a + b);
        let hw = 0.5 * (b - a);
        let mut s = 0.0;
        for (x, w) in XS.iter().zip(WS) {
            s += w * (f(m + hw * x) + f(m - hw * x));
        }
        s * hw
    };
    let whole = panel(a, b);
    let m = 0.5 * (a + b);
    let halves = panel(a, m) + panel(m, b);
    if (whole - halves).abs() <= tol || depth == 0 {
        return halves;
    }
    adaptive_gauss(f, a, m, 0.5 * tol, depth - 1) + adaptive_gauss(f, m, b, 0.5 * tol, depth - 1)
}

/// Integral of dx dy / x over { all g <= 0 } intersected with
/// [bx0,bx1] x [by0,by1], optionally filtered by a component mask.
fn integrate_region(
    constraints: &[Poly2],
    bbox: [f64; 4],
    mask: Option<(&ComponentMask, i32)>,
    tol: f64,
) -> Result<f64, VolumeError> {
    let [bx0, bx1, by0, by1] = bbox;
    if bx0 <= 0.0 && bx1 >= 0.0 {
        // slices at x = 0 must be empty for the integral to exist; the
        // caller screens S-avoidance, so this is a defensive check
        let (segs, _) = inside_segments(0.0, by0, by1, constraints, usize::MAX);
        if segs.iter().any(|&(a, b)| b - a > 1e-9) {
            return Err(VolumeError::PoleOnDomain);
        }
    }
    let integrand = |x: f64| -> f64 {
        if x.abs() < 1e-12 {
            return 0.0;
        }
        let (segs, _) = inside_segments(x, by0, by1, constraints, usize::MAX);
        let mut len = 0.0;
        for (a, b) in segs {
            if let Some((m, want)) = mask {
                match m.lookup(x, 0.5 * (a + b)) {
                    Some(id) if id == want => {}
                    Some(_) => continue,
                    None => {} // unlabeled sliver: keep (constraints decide)
                }
            }
            len += b - a;
        }
        len / x
    };
    let v = adaptive_gauss(&integrand, bx0, bx1, tol * 0.25, 32);
    Ok(v)
}

/// Adaptive quadrature of `integrand` over [a, b], split at the bisected
/// jump locations of `count_at` (the fold points of the region boundary)
/// and integrated per piece under x = m + hw*sin(t), which flattens
/// sqrt-type endpoint singularities.
fn integrate_cuts(
    count_at: &dyn Fn(f64) -> usize,
    integrand: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
) -> f64 {
    let nscan = 1024usize;
    let step = (b - a) / nscan as f64;
    let counts: Vec<usize> = (0..=nscan).map(|i| count_at(a + i as f64 * step)).collect();
    let mut cuts = vec![a];
    for i in 0..nscan {
        if counts[i] != counts[i + 1] {
            let (mut u, mut v) = (a + i as f64 * step, a + (i + 1) as f64 * step);
            let cu = counts[i];
            for _ in 0..60 {
                let m = 0.5 * (u + v);
                if count_at(m) == cu {
                    u = m;
                } else {
                    v = m;
                }
            }
            cuts.push(0.5 * (u + v));
        }
    }
    cuts.push(b);
    let mut total = 0.0;
    let per = tol / (cuts.len() - 1).max(1) as f64;
    for w in cuts.windows(2) {
        let (u, v) = (w[0], w[1]);
        if v - u < 1e-13 || count_at(0.5 * (u + v)) == 0 {
            continue;
        }
        let m = 0.5 * (u + v);
        let hw = 0.5 * (v - u);
        let g = |t: f64| -> f64 { integrand(m + hw * t.sin()) * hw * t.cos() };
        total += adaptive_gauss(
            &g,
            -std::f64::consts::FRAC_PI_2,
            std::f64::consts::FRAC_PI_2,
            per,
            24,
        );
    }
    total
}

/// Volume of an S-avoiding region component: integral of dx dy / x over the
/// component within the working disk.  The integral ranges over the whole
/// window, with the component mask deciding membership; no grid-derived
/// bounding box ever truncates the exact slices.
pub fn volume_integral(region: &RegionSpec, tol: f64) -> Result<f64, VolumeError> {
    if !region.s_avoiding {
        return Err(VolumeError::PoleOnDomain);
    }
    let f = f_poly2(region.class, &region.lambda);
    let g = f.shift_const(-region.c).scale(region.side as f64);
    let r = region.disk_radius;
    let disk = Poly2::circle(0.0, 0.0, r);
    let constraints = vec![g, disk];
    let mask = if region.needs_mask {
        region.mask.as_ref().map(|m| (m, 0i32))
    } else {
        None
    };
    let member_segs = |x: f64| -> Vec<(f64, f64)> {
        let (segs, _) = inside_segments(x, -r, r, &constraints, usize::MAX);
        segs.into_iter()
            .filter(|&(a, b)| match mask {
                Some((m, want)) => m.lookup(x, 0.5 * (a + b)) == Some(want),
                None => true,
            })
            .collect()
    };
    // defensive: an S-avoiding component must have an empty slice at x = 0
    if member_segs(0.0).iter().any(|&(a, b)| b - a > 1e-9) {
        return Err(VolumeError::PoleOnDomain);
    }
    let count_at = |x: f64| member_segs(x).len();
    let integrand = |x: f64| -> f64 {
        if x.abs() < 1e-12 {
            return 0.0;
        }
        member_segs(x).iter().map(|&(a, b)| b - a).sum::<f64>() / x
    };
    Ok(integrate_cuts(&count_at, &integrand, -r, r, tol * 0.25))
}

/// dV/dc: line integral over the moving part of the boundary (the f = c
/// piece) of (1/x) dl / |grad f| = sum over y-crossings of 1/(x |f_y|).
pub fn gelfand_leray_derivative(
    class: Class,
    lambda: &[Rat],
    c: f64,
    component: usize,
    tol: f64,
) -> Result<f64, VolumeError> {
    let crit = all_critical_values(class, lambda)?;
    for nu in &crit {
        let d = (c - nu).abs();
        if d < 1e-4 * (1.0 + c.abs()) {
            return Err(VolumeError::NearCritical { nu: *nu, dist: d });
        }
    }
    let regions = region_components(class, lambda, c, 1)?;
    let region = regions
        .get(component)
        .ok_or(VolumeError::BadComponent { index: component, count: regions.len() })?;
    gelfand_leray_of_region(region, tol)
}

pub fn gelfand_leray_of_region(region: &RegionSpec, tol: f64) -> Result<f64, VolumeError> {
    if !region.s_avoiding {
        return Err(VolumeError::PoleOnDomain);
    }
    let f = f_poly2(region.class, &region.lambda);
    let g = f.shift_const(-region.c).scale(region.side as f64);
    let fy = f.dy();
    let r = region.disk_radius;
    let disk = Poly2::circle(0.0, 0.0, r);
    let constraints = vec![g, disk];
    let mask = if region.needs_mask {
        region.mask.as_ref().map(|m| (m, 0i32))
    } else {
        None
    };
    // f = c crossings at this x that border a member segment of the region
    let member_crossings = |x: f64| -> Vec<f64> {
        let (segs, tracked) = inside_segments(x, -r, r, &constraints, 0);
        tracked
            .into_iter()
            .filter(|yj| {
                let adj = segs
                    .iter()
                    .find(|&&(a, b)| (a - yj).abs() < 1e-12 || (b - yj).abs() < 1e-12);
                match (adj, mask) {
                    (Some(&(a, b)), Some((m, want))) => {
                        m.lookup(x, 0.5 * (a + b)) == Some(want)
                    }
                    _ => true,
                }
            })
            .collect()
    };
    let count_at = |x: f64| member_crossings(x).len();
    let integrand = |x: f64| -> f64 {
        if x.abs() < 1e-12 {
            return 0.0;
        }
        member_crossings(x)
            .iter()
            .map(|&yj| 1.0 / (x * fy.eval(x, yj).abs().max(1e-12)))
            .sum()
    };
    Ok(integrate_cuts(&count_at, &integrand, -r, r, tol * 0.25))
}

/// The vanishing lens at an interior Morse point with critical value nu:
/// for a minimum the set { nu <= f <= nu + eps }, for a maximum
/// { nu - eps <= f <= nu }, for a saddle the band { nu <= f <= nu + eps }
/// clipped to the isolating ball of radius |x*|/2 around the critical
/// point.  Returns the integral of dx dy / x over the lens.
pub fn cap_period(
    class: Class,
    lambda: &[Rat],
    nu: f64,
    eps: f64,
    tol: f64,
) -> Result<f64, VolumeError> {
    let cps = interior_critical_points(class, lambda)?;
    let match_tol = 1e-6 * (1.0 + nu.abs());
    let cp = cps
        .iter()
        .min_by(|a, b| {
            (a.value - nu)
                .abs()
                .partial_cmp(&(b.value - nu).abs())
                .unwrap()
        })
        .filter(|cp| (cp.value - nu).abs() <= match_tol)
        .ok_or(VolumeError::NotACriticalValue { nu, tol: match_tol })?;
    let x_abs = cp.x.abs();
    if x_abs < 1e-6 {
        return Err(VolumeError::LensTouchesS { x_abs });
    }
    let rho = lens_rho(&cps, cp);
    let f = f_poly2(class, lambda);
    let sigma = if cp.kind == CritKind::Max { -1.0 } else { 1.0 };
    if cp.kind != CritKind::Saddle {
        // extremum: require the band not to leak through the ball
        let mut edge = f64::INFINITY;
        for i in 0..128 {
            let a = std::f64::consts::TAU * i as f64 / 128.0;
            let v = f.eval(cp.x + rho * a.cos(), cp.y + rho * a.sin());
            edge = edge.min(sigma * (v - cp.value));
        }
        if edge < eps * (1.0 - 1e-6) {
            return Err(VolumeError::EpsilonTooLarge { eps, rho });
        }
    }
    // sigma (f - nu) in [0, eps], inside the ball
    let band_lo = f.shift_const(-cp.value).scale(-sigma);
    let band_hi = f.shift_const(-(cp.value + sigma * eps)).scale(sigma);
    let ball = Poly2::circle(cp.x, cp.y, rho);
    let bbox = [cp.x - rho, cp.x + rho, cp.y - rho, cp.y + rho];
    let v = integrate_region(&[band_lo, band_hi, ball], bbox, None, tol)?;
    if v.abs() <= 10.0 * tol {
        return Err(VolumeError::Tolerance { tol, estimate: v });
    }
    Ok(v)
}

/// Radius of the isolating ball around a Morse point: half its distance to
/// S, further capped by half the distance to any other critical point.
fn lens_rho(cps: &[CriticalPoint], cp: &CriticalPoint) -> f64 {
    let mut rho = 0.5 * cp.x.abs();
    for other in cps {
        let d = ((other.x - cp.x).powi(2) + (other.y - cp.y).powi(2)).sqrt();
        if d > 1e-12 {
            rho = rho.min(0.5 * d);
        }
    }
    rho
}

/// A default lens thickness for the Morse point: a fixed fraction of the
/// variation of f across the same isolating ball cap_period uses.
pub fn auto_epsilon(class: Class, lambda: &[Rat], cp: &CriticalPoint) -> f64 {
    let f = f_poly2(class, lambda);
    let cps = interior_critical_points(class, lambda).unwrap_or_default();
    let rho = lens_rho(&cps, cp);
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for i in 0..64 {
        let a = std::f64::consts::TAU * i as f64 / 64.0;
        let v = (f.eval(cp.x + rho * a.cos(), cp.y + rho * a.sin()) - cp.value).abs();
        lo = lo.min(v);
        hi = hi.max(v);
    }
    match cp.kind {
        CritKind::Saddle => 0.3 * hi.max(1e-9),
        // the leak check admits anything below the ball-edge variation
        _ => 0.8 * lo.max(1e-9),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ProbeVerdict {
    #[serde(rename = "NON-ALGEBRAIC-EVIDENCE")]
    NonAlgebraicEvidence,
    #[serde(rename = "NO-OBSTRUCTION-FOUND")]
    NoObstructionFound,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub class_label: String,
    pub verdict: ProbeVerdict,
    pub is_lacuna: bool,
    pub level_empty: bool,
    pub note: String,
    /// Monodromy data when an obstruction search ran.
    pub generator: Option<usize>,
    pub coupling: Option<i64>,
    pub witness_kind: Option<crate::monodromy::WitnessKind>,
    pub critical_value: Option<f64>,
    pub epsilon: Option<f64>,
    pub cap_period: Option<f64>,
}

/// Theorem-2 style probe: for a non-lacuna component, combine the exact
/// monodromy obstruction for the Petrovsky class of an S-avoiding component
/// with a nonzero vanishing-lens period.
pub fn ramification_probe(
    class: Class,
    lambda: &[Rat],
    component: Option<usize>,
) -> Result<ProbeReport, VolumeError> {
    let topo = crate::curvetopo::level_topology(class, lambda)?;
    let lacuna = crate::atlas::is_lacuna(&topo);
    let label = class.to_string();
    if topo.is_empty() {
        return Ok(ProbeReport {
            class_label: label,
            verdict: ProbeVerdict::NoObstructionFound,
            is_lacuna: true,
            level_empty: true,
            note: "real level set empty: V = 0 identically".into(),
            generator: None,
            coupling: None,
            witness_kind: None,
            critical_value: None,
            epsilon: None,
            cap_period: None,
        });
    }
    if lacuna {
        return Ok(ProbeReport {
            class_label: label,
            verdict: ProbeVerdict::NoObstructionFound,
            is_lacuna: true,
            level_empty: false,
            note: "every component meets S: Petrovsky class trivial, no obstruction".into(),
            generator: None,
            coupling: None,
            witness_kind: None,
            critical_value: None,
            epsilon: None,
            cap_period: None,
        });
    }
    // target: an S-avoiding component (the given index must be one)
    let target = match component {
        Some(i) => {
            let cc = topo.components.get(i).ok_or(VolumeError::BadComponent {
                index: i,
                count: topo.components.len(),
            })?;
            if cc.boundary_points > 0 {
                return Err(VolumeError::Numeric(
                    "selected component meets S; choose an S-avoiding one".into(),
                ));
            }
            i
        }
        None => topo
            .components
            .iter()
            .position(|cc| cc.boundary_points == 0)
            .expect("non-lacuna has an S-avoiding component"),
    };
    let _ = target;
    // representative Petrovsky class in the cap/tube basis
    let model = crate::monodromy::eta_matrix(class);
    let mut pi = vec![0i64; model.dim];
    match class {
        Class::B { .. } => pi[1] = 1, // first interior cap
        Class::C { .. } => pi[0] = 1, // the Leray tube beta_0
        Class::F4 { .. } => pi[0] = 1, // beta_1, the oval as vanishing cycle
    }
    let obs = crate::monodromy::obstruction(&model, &pi, crate::monodromy::DEFAULT_WORD_LEN);
    if !obs.obstructed {
        return Ok(ProbeReport {
            class_label: label,
            verdict: ProbeVerdict::NoObstructionFound,
            is_lacuna: false,
            level_empty: false,
            note: "word search found no nonzero coupling".into(),
            generator: None,
            coupling: None,
            witness_kind: None,
            critical_value: None,
            epsilon: None,
            cap_period: None,
        });
    }
    let w = obs.witness.unwrap();
    // Morse point for the lens: try every interior point clear of S
    // (extrema first) and keep the one with the fattest period.  When the
    // given witness has no usable point (e.g. the C saddle sits on S), the
    // period is still an invariant of the component, so retry at nearby
    // deformations that provably stay in the same chamber.
    let tol = 1e-7;
    let base_sig = crate::atlas::signature_of_topology(&topo);
    let mut candidates: Vec<Vec<Rat>> = vec![lambda.to_vec()];
    for num in [1i64, -1, 4, -4, 16, -16] {
        let mut lam2 = lambda.to_vec();
        lam2[1] = &lam2[1] + crate::algebra::rat(num, 64);
        candidates.push(lam2);
    }
    let mut best: Option<(CriticalPoint, f64, f64)> = None;
    let mut last_err: Option<VolumeError> = None;
    'outer: for (ci, lam2) in candidates.iter().enumerate() {
        if ci > 0 {
            // same chamber check: identical signature and verdict
            match crate::curvetopo::level_topology(class, lam2) {
                Ok(t2) => {
                    if crate::atlas::signature_of_topology(&t2) != base_sig
                        || crate::atlas::is_lacuna(&t2) != lacuna
                    {
                        continue;
                    }
                }
                Err(_) => continue,
            }
        }
        let Ok(cps) = interior_critical_points(class, lam2) else { continue };
        let mut usable: Vec<&CriticalPoint> =
            cps.iter().filter(|cp| cp.x.abs() > 1e-5).collect();
        usable.sort_by_key(|cp| cp.kind == CritKind::Saddle);
        for cand in usable {
            let e = auto_epsilon(class, lam2, cand);
            match cap_period(class, lam2, cand.value, e, tol) {
                Ok(p) => {
                    if best.as_ref().map_or(true, |(_, _, bp)| p.abs() > bp.abs()) {
                        best = Some((cand.clone(), e, p));
                    }
                    if p.abs() > 1e-3 {
                        break 'outer;
                    }
                }
                Err(err) => last_err = Some(err),
            }
        }
        if best.as_ref().map_or(false, |(_, _, p)| p.abs() > 1e-3) {
            break;
        }
    }
    let (cp, eps, period) = best.ok_or_else(|| {
        last_err.unwrap_or_else(|| {
            VolumeError::Numeric("no interior Morse point clear of S; perturb lambda".into())
        })
    })?;
    let cp = &cp;
    let verdict = if w.coupling != 0 && period.abs() > 10.0 * tol {
        ProbeVerdict::NonAlgebraicEvidence
    } else {
        ProbeVerdict::NoObstructionFound
    };
    Ok(ProbeReport {
        class_label: label,
        verdict,
        is_lacuna: false,
        level_empty: false,
        note: format!(
            "gamma_{} adds {} x period {:.6e} per loop",
            w.generator, w.coupling, period
        ),
        generator: Some(w.generator),
        coupling: Some(w.coupling),
        witness_kind: Some(w.kind),
        critical_value: Some(cp.value),
        epsilon: Some(eps),
        cap_period: Some(period),
    })
}

/// Total volume over the S-avoiding components of { f <= c }.
pub fn total_volume(class: Class, lambda: &[Rat], c: f64, tol: f64) -> Result<f64, VolumeError> {
    let mut v = 0.0;
    for reg in region_components(class, lambda, c, 1)? {
        if reg.s_avoiding {
            v += volume_integral(&reg, tol)?;
        }
    }
    Ok(v)
}

/// One-sided limit of V(c) as c -> nu from above (dir = +1) or below
/// (dir = -1).  Near a Morse value V(nu + dir t) = V0 + A t + C t ln t, so
/// three samples at t = d, d/2, d/4 determine V0 exactly up to O(t^2).
pub fn v_side_limit(
    class: Class,
    lambda: &[Rat],
    nu: f64,
    dir: i32,
    d: f64,
    tol: f64,
) -> Result<f64, VolumeError> {
    let ts = [d, d / 2.0, d / 4.0];
    let mut m = [[0.0f64; 4]; 3];
    for (i, t) in ts.iter().enumerate() {
        let v = total_volume(class, lambda, nu + dir as f64 * t, tol)?;
        m[i] = [1.0, *t, t * t.ln(), v];
    }
    // Gaussian elimination, solving for V0
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())
            .unwrap();
        m.swap(col, piv);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for j in col..4 {
                m[row][j] -= f * m[col][j];
            }
        }
    }
    let x2 = m[2][3] / m[2][2];
    let x1 = (m[1][3] - m[1][2] * x2) / m[1][1];
    let x0 = (m[0][3] - m[0][1] * x1 - m[0][2] * x2) / m[0][0];
    Ok(x0)
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumeSeries {
    pub c: Vec<f64>,
    pub v: Vec<f64>,
    pub dv_dc: Vec<f64>,
    pub critical_values: Vec<f64>,
    /// (nu, dV/dc just below, dV/dc just above) for each crossed nu.
    pub jumps: Vec<(f64, f64, f64)>,
}

/// V(c) summed over the S-avoiding components of { f <= c }, on a uniform
/// grid over [c0, c1]; grid points colliding with critical values are
/// nudged.
pub fn volume_series(
    class: Class,
    lambda: &[Rat],
    c0: f64,
    c1: f64,
    npts: usize,
    tol: f64,
) -> Result<VolumeSeries, VolumeError> {
    let crit = all_critical_values(class, lambda)?;
    let crossed: Vec<f64> = crit
        .iter()
        .copied()
        .filter(|nu| *nu > c0 && *nu < c1)
        .collect();
    let mut cs = vec![];
    for i in 0..npts {
        let mut c = c0 + (c1 - c0) * i as f64 / (npts.max(2) - 1) as f64;
        while crit.iter().any(|nu| (c - nu).abs() < 1e-6 * (1.0 + c.abs())) {
            c += (c1 - c0) * 1e-4;
        }
        cs.push(c);
    }
    let total_v = |c: f64| -> Result<f64, VolumeError> {
        let mut v = 0.0;
        for reg in region_components(class, lambda, c, 1)? {
            if reg.s_avoiding {
                v += volume_integral(&reg, tol)?;
            }
        }
        Ok(v)
    };
    let total_dv = |c: f64| -> Result<f64, VolumeError> {
        let mut v = 0.0;
        for reg in region_components(class, lambda, c, 1)? {
            if reg.s_avoiding {
                v += gelfand_leray_of_region(&reg, tol)?;
            }
        }
        Ok(v)
    };
    let mut v = vec![];
    let mut dv = vec![];
    for &c in &cs {
        v.push(total_v(c)?);
        dv.push(total_dv(c)?);
    }
    let mut jumps = vec![];
    for nu in &crossed {
        let gaps: Vec<f64> = crit
            .iter()
            .filter(|o| (*o - nu).abs() > 1e-12)
            .map(|o| (o - nu).abs())
            .collect();
        let gap = gaps.iter().cloned().fold(0.1, f64::min).min(0.1);
        let d = 0.05 * gap.max(1e-4);
        jumps.push((*nu, total_dv(nu - d)?, total_dv(nu + d)?));
    }
    Ok(VolumeSeries {
        c: cs,
        v,
        dv_dc: dv,
        critical_values: crossed,
        jumps,
    })
}
