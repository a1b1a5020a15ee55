//! Exact topology of the real zero level curve V = {f_lambda = 0} relative to
//! the boundary line S = {x = 0}, for lambda off the discriminant, and its
//! stabilization by a nondegenerate quadratic form in extra variables.
//!
//! All decisions here are exact: they come down to counting and ordering real
//! roots of rational polynomials, which `algebra` does by Sturm bisection.

use crate::algebra::{
    isolate_roots, rat_i, refine_root, resultant, root_signs, sign, Poly, Rat, RootSigns,
};
use crate::families::{
    f4_d_poly, f4_t_poly, profile_poly, require_off_wall, Class, FamilyError, Sign,
};
use num_traits::Zero;
use serde::Serialize;

/// One connected component of the zero level curve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveComponent {
    pub compact: bool,
    /// Number of transversal intersection points with S.
    pub boundary_points: usize,
    /// For components disjoint from S (B, F4): the sign of x on the
    /// component.  For the two C branches: the sign of y.  None otherwise.
    pub side: Option<i32>,
}

/// Extra exact data kept for F4, consumed by the census signature.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct F4Details {
    /// Real roots of f|_S = y^3 + lambda_2 y + lambda_0 (1 or 3).
    pub n_boundary_roots: usize,
    /// Signs of the second x-sheet at each S-crossing of the noncompact
    /// component, ascending in y, with the crossing adjacent to the fold
    /// ("nose") of the component dropped.  Empty when the noncompact
    /// component crosses S only once.
    pub branch_signs: Vec<i32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelCurveTopology {
    pub class: Class,
    pub components: Vec<CurveComponent>,
    /// Distinct-real-root tally of the profile polynomial (p for B, g for C,
    /// the boundary cubic for F4).
    pub profile_signs: RootSigns,
    pub f4: Option<F4Details>,
}

impl LevelCurveTopology {
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
    pub fn all_meet_boundary(&self) -> bool {
        self.components.iter().all(|c| c.boundary_points > 0)
    }
}

/// Topology of {f_lambda = 0} in the (x, y)-plane.  `lambda` must be off the
/// discriminant.
pub fn level_topology(class: Class, lambda: &[Rat]) -> Result<LevelCurveTopology, FamilyError> {
    require_off_wall(class, lambda)?;
    match class {
        Class::B { .. } => topology_b(class, lambda),
        Class::C { .. } => topology_c(class, lambda),
        Class::F4 { .. } => topology_f4(class, lambda),
    }
}

/// B_k^s: f = p(x) + s y^2; the curve lives over { s p <= 0 } with
/// y = +-sqrt(-p/s), one component per maximal interval, except that when
/// s p < 0 on all of R the two graphs never join and give two components.
fn topology_b(class: Class, lambda: &[Rat]) -> Result<LevelCurveTopology, FamilyError> {
    let s = class.sign().as_i32();
    let p = profile_poly(class, lambda)?;
    let rs = root_signs(&p);
    let m = rs.pos + rs.neg; // p(0) != 0 and disc != 0: all roots simple
    let zero_interval = rs.neg; // 0 lies in interval index rs.neg of m+1
    let mut components = vec![];
    if m == 0 {
        // p has constant sign, sign of p = +1 (monic, even degree or no roots)
        if s < 0 {
            // two full graphs y = +-sqrt(p), each crossing S once
            for _ in 0..2 {
                components.push(CurveComponent {
                    compact: false,
                    boundary_points: 1,
                    side: None,
                });
            }
        }
        // s > 0: empty curve
    } else {
        for i in 0..=m {
            // sign of p on interval i: + on the last one, alternating leftwards
            let p_sign = if (m - i) % 2 == 0 { 1 } else { -1 };
            if s * p_sign >= 0 {
                continue;
            }
            let compact = i > 0 && i < m;
            let crosses = i == zero_interval;
            components.push(CurveComponent {
                compact,
                boundary_points: if crosses { 2 } else { 0 },
                side: if crosses {
                    None
                } else if i < zero_interval {
                    Some(-1)
                } else {
                    Some(1)
                },
            });
        }
    }
    Ok(LevelCurveTopology {
        class,
        components,
        profile_signs: rs,
        f4: None,
    })
}

/// C_k^s: f = x y + g(y); off the wall g(0) != 0, so the curve is the graph
/// x = -g(y)/y over y > 0 and over y < 0: always exactly two noncompact
/// branches, meeting S at the roots of g on their side.
fn topology_c(class: Class, lambda: &[Rat]) -> Result<LevelCurveTopology, FamilyError> {
    let g = profile_poly(class, lambda)?;
    let rs = root_signs(&g);
    let components = vec![
        CurveComponent {
            compact: false,
            boundary_points: rs.pos,
            side: Some(1),
        },
        CurveComponent {
            compact: false,
            boundary_points: rs.neg,
            side: Some(-1),
        },
    ];
    Ok(LevelCurveTopology {
        class,
        components,
        profile_signs: rs,
        f4: None,
    })
}

/// Disjoint isolating intervals for the roots of two coprime squarefree
/// polynomials, merged and sorted; each entry tags its origin.
fn merged_disjoint_roots(a: &Poly, b: &Poly) -> Vec<(Rat, Rat, bool)> {
    let mut ia = isolate_roots(a, None);
    let mut ib = isolate_roots(b, None);
    let asf = a.squarefree_part();
    let bsf = b.squarefree_part();
    loop {
        let mut all: Vec<(Rat, Rat, bool)> = ia
            .iter()
            .map(|(l, h)| (l.clone(), h.clone(), true))
            .chain(ib.iter().map(|(l, h)| (l.clone(), h.clone(), false)))
            .collect();
        all.sort_by(|x, y| x.0.cmp(&y.0));
        let disjoint = all.windows(2).all(|w| w[0].1 < w[1].0);
        if disjoint {
            return all;
        }
        let shrink = |iv: Vec<(Rat, Rat)>, p: &Poly| {
            iv.into_iter()
                .map(|(l, h)| {
                    let w = (&h - &l) / rat_i(4);
                    refine_root(p, l, h, &w)
                })
                .collect::<Vec<_>>()
        };
        ia = shrink(ia, &asf);
        ib = shrink(ib, &bsf);
    }
}

/// F4^s: f = s x^2 + t(y) x + c(y).  Two x-sheets over { D = t^2 - 4sc > 0 },
/// one component per maximal interval of that set; S-crossings are the roots
/// of c, always interior to those intervals off the wall.
fn topology_f4(class: Class, lambda: &[Rat]) -> Result<LevelCurveTopology, FamilyError> {
    let sgn = class.sign();
    let s = sgn.as_i32();
    let c = profile_poly(class, lambda)?;
    let t = f4_t_poly(lambda);
    let d = f4_d_poly(lambda, sgn);
    // A root shared by c and t is a crossing sitting exactly on a fold of the
    // x-projection (D = t^2 there): the signature is not defined.
    if resultant(&c, &t).is_zero() {
        return Err(FamilyError::ProjectionDegeneracy);
    }
    let rs = root_signs(&c);
    let merged = merged_disjoint_roots(&d, &c);
    let d_roots: Vec<usize> = merged
        .iter()
        .enumerate()
        .filter(|(_, e)| e.2)
        .map(|(i, _)| i)
        .collect();
    let nd = d_roots.len();
    debug_assert!(nd == 1 || nd == 3);
    // D ~ -4s y^3: for s=+1, D > 0 left of the first root and on (d2, d3);
    // for s=-1, right of the last root and on (d1, d2).
    let mut intervals: Vec<(Option<usize>, Option<usize>)> = vec![]; // merged-index bounds
    if s > 0 {
        intervals.push((None, Some(d_roots[0])));
        if nd == 3 {
            intervals.push((Some(d_roots[1]), Some(d_roots[2])));
        }
    } else {
        intervals.push((Some(d_roots[nd - 1]), None));
        if nd == 3 {
            intervals.push((Some(d_roots[0]), Some(d_roots[1])));
        }
    }
    let in_interval = |i: usize, iv: &(Option<usize>, Option<usize>)| -> bool {
        iv.0.map_or(true, |a| i > a) && iv.1.map_or(true, |b| i < b)
    };
    let tsf = t.clone();
    // sign of t at an isolated algebraic point, by refining the isolating
    // interval of `p`'s root until t has constant sign on it
    let sign_t_at_root = |p: &Poly, mut lo: Rat, mut hi: Rat| -> i32 {
        let psf = p.squarefree_part();
        loop {
            let sl = sign(&tsf.eval(&lo));
            let sh = sign(&tsf.eval(&hi));
            if sl == sh && sl != 0 {
                return sl;
            }
            let w = (&hi - &lo) / rat_i(4);
            let r = refine_root(&psf, lo, hi, &w);
            lo = r.0;
            hi = r.1;
        }
    };
    let mut components = vec![];
    let mut branch_signs = vec![];
    for (which, iv) in intervals.iter().enumerate() {
        let compact = which == 1; // the unbounded interval is pushed first
        let crossings: Vec<usize> = merged
            .iter()
            .enumerate()
            .filter(|(i, e)| !e.2 && in_interval(*i, iv))
            .map(|(i, _)| i)
            .collect();
        let ncross = crossings.len();
        debug_assert!(if compact { ncross % 2 == 0 } else { ncross % 2 == 1 });
        let side = if ncross == 0 {
            // rational point strictly inside the interval: between the
            // isolating boxes of its algebraic endpoints
            let a = merged[iv.0.unwrap()].1.clone();
            let b = merged[iv.1.unwrap()].0.clone();
            let ym = (&a + &b) / rat_i(2);
            debug_assert!(d.eval(&ym) > Rat::zero());
            // on a component missing S both sheets share the sign of the
            // root sum -t(ym)/s
            Some(-s * sign(&t.eval(&ym)))
        } else {
            None
        };
        if !compact && ncross > 1 {
            // second x-sheet sign at each crossing is -s * sign(t); drop the
            // crossing nearest the fold of the noncompact component
            let keep: Vec<usize> = if s > 0 {
                crossings[..ncross - 1].to_vec()
            } else {
                crossings[1..].to_vec()
            };
            for i in keep {
                let e = &merged[i];
                branch_signs.push(-s * sign_t_at_root(&c, e.0.clone(), e.1.clone()));
            }
        }
        components.push(CurveComponent {
            compact,
            boundary_points: ncross,
            side,
        });
    }
    Ok(LevelCurveTopology {
        class,
        components,
        profile_signs: rs,
        f4: Some(F4Details {
            n_boundary_roots: rs.pos + rs.neg + usize::from(rs.zero),
            branch_signs,
        }),
    })
}

/// A connected component of the stabilized zero level
/// { f_lambda + Q_{r,s}(z) = 0 } in n = 2 + r + s variables, where
/// Q = z_1^2 + .. + z_r^2 - z_{r+1}^2 - .. - z_{r+s}^2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabComponent {
    pub compact: bool,
    pub meets_boundary: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilizedTopology {
    pub r: usize,
    pub s: usize,
    pub components: Vec<StabComponent>,
}

impl StabilizedTopology {
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
    pub fn all_meet_boundary(&self) -> bool {
        self.components.iter().all(|c| c.meets_boundary)
    }
}

/// Topology of the suspension of the zero level by Q_{r,s}; exact.
pub fn stabilized_topology(
    class: Class,
    lambda: &[Rat],
    r: usize,
    s: usize,
) -> Result<StabilizedTopology, FamilyError> {
    require_off_wall(class, lambda)?;
    if r + s == 0 {
        // plain n = 2 topology
        let t = level_topology(class, lambda)?;
        return Ok(StabilizedTopology {
            r,
            s,
            components: t
                .components
                .iter()
                .map(|c| StabComponent {
                    compact: c.compact,
                    meets_boundary: c.boundary_points > 0,
                })
                .collect(),
        });
    }
    match class {
        Class::B { .. } => stabilized_b(class, lambda, r, s),
        Class::C { .. } => stabilized_c(class, lambda, r, s),
        Class::F4 { .. } => stabilized_f4(class, lambda, r, s),
    }
}

/// B: f + Q = p(x) + phi(y, z) with phi of inertia (a, b).
fn stabilized_b(
    class: Class,
    lambda: &[Rat],
    r: usize,
    s: usize,
) -> Result<StabilizedTopology, FamilyError> {
    let (a, b) = match class.sign() {
        Sign::Plus => (1 + r, s),
        Sign::Minus => (r, 1 + s),
    };
    let p = profile_poly(class, lambda)?;
    let rs = root_signs(&p);
    let m = rs.pos + rs.neg;
    let mut components = vec![];
    if b == 0 || a == 0 {
        // definite phi: solutions over { p <= 0 } (a > 0) or { p >= 0 }
        // (b > 0); one sphere bundle per maximal interval, each connected
        // since the sphere dimension a + b - 1 >= 1 here.
        let want = if b == 0 { -1 } else { 1 };
        if m == 0 {
            if want == 1 {
                components.push(StabComponent {
                    compact: false,
                    meets_boundary: true,
                });
            }
        } else {
            for i in 0..=m {
                let p_sign = if (m - i) % 2 == 0 { 1 } else { -1 };
                if p_sign != want {
                    continue;
                }
                components.push(StabComponent {
                    compact: i > 0 && i < m,
                    meets_boundary: i == rs.neg,
                });
            }
        }
    } else {
        // indefinite phi: nonempty; every fiber over x is nonempty, so the
        // whole set meets S.  Two sheets only for inertia (1,1) with p
        // root-free (then v^2 = p + u^2 > 0 splits by the sign of v).
        let two = a == 1 && b == 1 && m == 0;
        for _ in 0..if two { 2 } else { 1 } {
            components.push(StabComponent {
                compact: false,
                meets_boundary: true,
            });
        }
    }
    Ok(StabilizedTopology { r, s, components })
}

/// C: f + Q = x y + g(y) + Q(z).  The two half-space sheets y > 0 and y < 0
/// persist; they glue across { y = 0 } exactly when Q(z) = -lambda_0 has a
/// solution, and that slice contains x = 0 points, so a merged set meets S.
fn stabilized_c(
    class: Class,
    lambda: &[Rat],
    r: usize,
    s: usize,
) -> Result<StabilizedTopology, FamilyError> {
    let g = profile_poly(class, lambda)?;
    let rs = root_signs(&g);
    let l0 = sign(&lambda[0]);
    let merged = if r > 0 && s > 0 {
        true
    } else if s == 0 {
        l0 < 0 // need -l0 in [0, inf), l0 != 0 off the wall
    } else {
        l0 > 0
    };
    // sheet on side sigma meets S iff g(y) + Q(z) = 0 is solvable there:
    // a root of g on that side, or the range of -Q covers the sign of g
    let meets = |side_roots: usize| -> bool {
        if side_roots > 0 || (r > 0 && s > 0) {
            return true;
        }
        // no roots on the side: sign of g there is the sign at 0, i.e. l0
        if s == 0 {
            l0 < 0
        } else {
            l0 > 0
        }
    };
    let components = if merged {
        vec![StabComponent {
            compact: false,
            meets_boundary: true,
        }]
    } else {
        vec![
            StabComponent {
                compact: false,
                meets_boundary: meets(rs.pos),
            },
            StabComponent {
                compact: false,
                meets_boundary: meets(rs.neg),
            },
        ]
    };
    Ok(StabilizedTopology { r, s, components })
}

/// F4: after completing the square in x, f + Q = phi(x', z) - D(y)/(4 sgn)
/// with phi = sgn x'^2 + Q; S corresponds to Q(z) = -c(y).
fn stabilized_f4(
    class: Class,
    lambda: &[Rat],
    r: usize,
    s: usize,
) -> Result<StabilizedTopology, FamilyError> {
    let sgn = class.sign();
    let (a, b) = match sgn {
        Sign::Plus => (1 + r, s),
        Sign::Minus => (r, 1 + s),
    };
    if a > 0 && b > 0 {
        // indefinite phi: connected (D has a real root, where the fibers
        // degenerate to cones) and -c has full range, so it meets S.
        return Ok(StabilizedTopology {
            r,
            s,
            components: vec![StabComponent {
                compact: false,
                meets_boundary: true,
            }],
        });
    }
    // definite phi: same y-intervals { D >= 0 } as in the plane, one
    // connected sphere-bundle component per interval (sphere dim >= 1 since
    // r + s >= 1 here).  Crossing S needs Q(z) = -c(y): for phi positive
    // definite that is c(y) <= 0 somewhere on the interval, for negative
    // definite c(y) >= 0.
    let c = profile_poly(class, lambda)?;
    let d = f4_d_poly(lambda, sgn);
    let want = if b == 0 { -1 } else { 1 }; // acceptable sign of c
    let merged = merged_disjoint_roots(&d, &c);
    let d_idx: Vec<usize> = merged
        .iter()
        .enumerate()
        .filter(|(_, e)| e.2)
        .map(|(i, _)| i)
        .collect();
    let nd = d_idx.len();
    let si = sgn.as_i32();
    let mut intervals: Vec<(Option<usize>, Option<usize>)> = vec![];
    if si > 0 {
        intervals.push((None, Some(d_idx[0])));
        if nd == 3 {
            intervals.push((Some(d_idx[1]), Some(d_idx[2])));
        }
    } else {
        intervals.push((Some(d_idx[nd - 1]), None));
        if nd == 3 {
            intervals.push((Some(d_idx[0]), Some(d_idx[1])));
        }
    }
    let mut components = vec![];
    for (which, iv) in intervals.iter().enumerate() {
        let compact = which == 1;
        let crossings = merged
            .iter()
            .enumerate()
            .filter(|(i, e)| {
                !e.2 && iv.0.map_or(true, |a| *i > a) && iv.1.map_or(true, |b| *i < b)
            })
            .count();
        let meets = if crossings > 0 {
            true
        } else {
            // c has constant sign on the interval; sample a rational point
            let ym = match (iv.0, iv.1) {
                (Some(a), Some(b)) => (&merged[a].1 + &merged[b].0) / rat_i(2),
                (None, Some(a)) => &merged[a].0 - rat_i(1) - c.cauchy_bound(),
                (Some(a), None) => &merged[a].1 + rat_i(1) + c.cauchy_bound(),
                (None, None) => unreachable!(),
            };
            sign(&c.eval(&ym)) == want
        };
        components.push(StabComponent {
            compact,
            meets_boundary: meets,
        });
    }
    Ok(StabilizedTopology { r, s, components })
}
