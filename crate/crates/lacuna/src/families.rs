//! The three boundary classes and their miniversal deformations.
//!
//! Normal forms on (R^2, S = {x = 0}):
//!   B_k^s : f = x^k + s y^2 + sum_{i<k} lambda_i x^i
//!   C_k^s : f = x y + s y^k + sum_{i<k} lambda_i y^i
//!   F_4^s : f = s x^2 + y^3 + lambda_3 x + lambda_2 y + lambda_1 x y + lambda_0
//!
//! The real discriminant Sigma splits into an "ordinary" sheet (a critical
//! point of f on the zero level away from S) and a "boundary" sheet (a
//! degenerate zero of f restricted to S).  Both are cut out here by exact
//! rational equations in lambda, so membership is decidable.

use crate::algebra::{discriminant, rat_i, Poly, Rat};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
    pub fn as_rat(self) -> Rat {
        rat_i(self.as_i32() as i64)
    }
    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// A singularity class together with its sign variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Class {
    B { k: usize, sign: Sign },
    C { k: usize, sign: Sign },
    F4 { sign: Sign },
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Class::B { k, sign } => write!(f, "B{}{}", k, sign.symbol()),
            Class::C { k, sign } => write!(f, "C{}{}", k, sign.symbol()),
            Class::F4 { sign } => write!(f, "F4{}", sign.symbol()),
        }
    }
}

impl std::str::FromStr for Class {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (body, sign) = match s.chars().last() {
            Some('+') => (&s[..s.len() - 1], Sign::Plus),
            Some('-') => (&s[..s.len() - 1], Sign::Minus),
            _ => return Err(format!("class '{s}' must end in + or -")),
        };
        if body.eq_ignore_ascii_case("F4") {
            return Ok(Class::F4 { sign });
        }
        let (fam, num) = body.split_at(1);
        let k: usize = num
            .parse()
            .map_err(|_| format!("bad class index in '{s}'"))?;
        if k < 2 {
            return Err(format!("class index must be >= 2 in '{s}'"));
        }
        match fam {
            "B" | "b" => Ok(Class::B { k, sign }),
            "C" | "c" => Ok(Class::C { k, sign }),
            _ => Err(format!("unknown family '{fam}' in '{s}'")),
        }
    }
}

impl Class {
    pub fn sign(&self) -> Sign {
        match *self {
            Class::B { sign, .. } | Class::C { sign, .. } | Class::F4 { sign } => sign,
        }
    }

    /// Number of deformation parameters lambda_0 .. lambda_{dim-1}.
    pub fn dim(&self) -> usize {
        match *self {
            Class::B { k, .. } | Class::C { k, .. } => k,
            Class::F4 { .. } => 4,
        }
    }

    /// Milnor number of the boundary singularity (rank of the full local
    /// homology model; the relative model has rank one less).
    pub fn mu(&self) -> usize {
        match *self {
            Class::B { k, .. } | Class::C { k, .. } => k,
            Class::F4 { .. } => 4,
        }
    }

    /// Monomials spanning the miniversal deformation, in lambda order.
    pub fn deformation_monomials(&self) -> Vec<String> {
        match *self {
            Class::B { k, .. } => (0..k)
                .map(|i| match i {
                    0 => "1".into(),
                    1 => "x".into(),
                    _ => format!("x^{i}"),
                })
                .collect(),
            Class::C { k, .. } => (0..k)
                .map(|i| match i {
                    0 => "1".into(),
                    1 => "y".into(),
                    _ => format!("y^{i}"),
                })
                .collect(),
            Class::F4 { .. } => vec!["1".into(), "x*y".into(), "y".into(), "x".into()],
        }
    }

    pub fn normal_form(&self) -> String {
        let s = if self.sign() == Sign::Plus { "+" } else { "-" };
        match *self {
            Class::B { k, .. } => format!("x^{k} {s} y^2 + sum_i lambda_i x^i (i<{k})"),
            Class::C { k, .. } => format!("x*y {s} y^{k} + sum_i lambda_i y^i (i<{k})"),
            Class::F4 { .. } => {
                format!("{s}x^2 + y^3 + lambda_3 x + lambda_2 y + lambda_1 x*y + lambda_0")
            }
        }
    }

    /// Quasi-homogeneous weight of lambda_i (weight of f normalized to 1);
    /// used to scale census sampling boxes.
    pub fn lambda_weights(&self) -> Vec<f64> {
        match *self {
            Class::B { k, .. } => (0..k).map(|i| 1.0 - i as f64 / k as f64).collect(),
            Class::C { k, .. } => (0..k).map(|i| 1.0 - i as f64 / k as f64).collect(),
            // x: 1/2, y: 1/3 -> weights of 1, xy, y, x
            Class::F4 { .. } => vec![1.0, 1.0 / 6.0, 2.0 / 3.0, 1.0 / 2.0],
        }
    }
}

/// Errors shared by the family-driven modules.
#[derive(Debug, thiserror::Error)]
pub enum FamilyError {
    #[error("lambda has {got} entries, class {class} needs {need}")]
    BadDimension { class: Class, got: usize, need: usize },
    #[error("lambda lies on the discriminant ({sheet} sheet vanishes)")]
    OnWall { sheet: &'static str },
    #[error("projection degeneracy: a level-curve crossing sits exactly over a fold of the x-projection; perturb lambda")]
    ProjectionDegeneracy,
    #[error("{0}")]
    Invalid(String),
}

fn check_dim(class: Class, lambda: &[Rat]) -> Result<(), FamilyError> {
    if lambda.len() != class.dim() {
        return Err(FamilyError::BadDimension {
            class,
            got: lambda.len(),
            need: class.dim(),
        });
    }
    Ok(())
}

/// Restriction of f to the boundary line S = {x = 0}, as an exact polynomial:
/// B: p(x) is returned instead (the x-profile, f = p(x) + s y^2);
/// C: g(y) = s y^k + sum lambda_i y^i;  F4: y^3 + lambda_2 y + lambda_0.
pub fn profile_poly(class: Class, lambda: &[Rat]) -> Result<Poly, FamilyError> {
    check_dim(class, lambda)?;
    Ok(match class {
        Class::B { k, .. } => {
            let mut c = lambda.to_vec();
            c.resize(k + 1, Rat::zero());
            c[k] = Rat::one();
            Poly::new(c)
        }
        Class::C { k, sign } => {
            let mut c = lambda.to_vec();
            c.resize(k + 1, Rat::zero());
            c[k] = sign.as_rat();
            Poly::new(c)
        }
        Class::F4 { .. } => Poly::new(vec![
            lambda[0].clone(),
            lambda[2].clone(),
            Rat::zero(),
            Rat::one(),
        ]),
    })
}

/// For F4: t(y) = lambda_3 + lambda_1 y, the linear coefficient of x in f.
pub fn f4_t_poly(lambda: &[Rat]) -> Poly {
    Poly::new(vec![lambda[3].clone(), lambda[1].clone()])
}

/// For F4: D(y) = t(y)^2 - 4 s c(y), discriminant of f in x; the level curve
/// has two x-sheets exactly over { D > 0 }.
pub fn f4_d_poly(lambda: &[Rat], sign: Sign) -> Poly {
    let t = f4_t_poly(lambda);
    let c = Poly::new(vec![
        lambda[0].clone(),
        lambda[2].clone(),
        Rat::zero(),
        Rat::one(),
    ]);
    &(&t * &t) - &c.scale(&(rat_i(4) * sign.as_rat()))
}

/// Exact value of the ordinary-sheet discriminant equation at lambda.
pub fn wall_ordinary(class: Class, lambda: &[Rat]) -> Result<Rat, FamilyError> {
    check_dim(class, lambda)?;
    Ok(match class {
        Class::B { .. } => discriminant(&profile_poly(class, lambda)?),
        Class::C { .. } => lambda[0].clone(),
        Class::F4 { sign } => discriminant(&f4_d_poly(lambda, sign)),
    })
}

/// Exact value of the boundary-sheet discriminant equation at lambda.
pub fn wall_boundary(class: Class, lambda: &[Rat]) -> Result<Rat, FamilyError> {
    check_dim(class, lambda)?;
    Ok(match class {
        Class::B { .. } => lambda[0].clone(),
        Class::C { .. } | Class::F4 { .. } => discriminant(&profile_poly(class, lambda)?),
    })
}

/// True iff lambda lies on the real discriminant Sigma_R (either sheet).
pub fn on_wall(class: Class, lambda: &[Rat]) -> Result<bool, FamilyError> {
    Ok(wall_ordinary(class, lambda)?.is_zero() || wall_boundary(class, lambda)?.is_zero())
}

pub fn require_off_wall(class: Class, lambda: &[Rat]) -> Result<(), FamilyError> {
    if wall_ordinary(class, lambda)?.is_zero() {
        return Err(FamilyError::OnWall { sheet: "ordinary" });
    }
    if wall_boundary(class, lambda)?.is_zero() {
        return Err(FamilyError::OnWall { sheet: "boundary" });
    }
    Ok(())
}

/// f evaluated in doubles, for the numerical modules.
pub fn eval_f(class: Class, lambda: &[Rat], x: f64, y: f64) -> f64 {
    let l: Vec<f64> = lambda.iter().map(|v| v.to_f64().unwrap()).collect();
    let s = class.sign().as_i32() as f64;
    match class {
        Class::B { k, .. } => {
            let mut p = 1.0;
            for i in (0..k).rev() {
                p = p * x + l[i];
            }
            // horner gave x^k + ... evaluated as ((1*x + l_{k-1})x + ...)x + l_0
            p + s * y * y
        }
        Class::C { k, .. } => {
            let mut g = s;
            for i in (0..k).rev() {
                g = g * y + l[i];
            }
            x * y + g
        }
        Class::F4 { .. } => s * x * x + y * y * y + l[3] * x + l[2] * y + l[1] * x * y + l[0],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum CritKind {
    Min,
    Max,
    Saddle,
}

/// An interior (x != 0) critical point of f, located numerically from exact
/// root isolation of the critical equations.
#[derive(Clone, Debug, Serialize)]
pub struct CriticalPoint {
    pub x: f64,
    pub y: f64,
    pub value: f64,
    pub kind: CritKind,
}

/// All nondegenerate interior critical points of f_lambda, sorted by value.
/// Points whose Hessian determinant is (numerically) zero are skipped:
/// they carry no Morse datum for the lens constructions.
pub fn interior_critical_points(
    class: Class,
    lambda: &[Rat],
) -> Result<Vec<CriticalPoint>, FamilyError> {
    check_dim(class, lambda)?;
    let tol = crate::algebra::rat(1, 1i64 << 40);
    let s = class.sign().as_i32() as f64;
    let mut out = vec![];
    match class {
        Class::B { .. } => {
            let p = profile_poly(class, lambda)?;
            let dp = p.derivative();
            for xc in crate::algebra::real_roots_f64(&dp, &tol) {
                let ppxx = dp.derivative().eval_f64(xc);
                if ppxx.abs() < 1e-9 {
                    // non-Morse (flat) point: no Morse datum to report
                    continue;
                }
                let kind = match (ppxx > 0.0, s > 0.0) {
                    (true, true) => CritKind::Min,
                    (false, false) => CritKind::Max,
                    _ => CritKind::Saddle,
                };
                out.push(CriticalPoint {
                    x: xc,
                    y: 0.0,
                    value: p.eval_f64(xc),
                    kind,
                });
            }
        }
        Class::C { .. } => {
            // unique critical point: y = 0, x = -g'(0), value g(0); Hessian
            // [[0,1],[1,g''(0)]] has determinant -1: always a saddle.
            let g = profile_poly(class, lambda)?;
            out.push(CriticalPoint {
                x: -g.derivative().eval_f64(0.0),
                y: 0.0,
                value: g.eval_f64(0.0),
                kind: CritKind::Saddle,
            });
        }
        Class::F4 { sign } => {
            // x = -t(y)/(2s); y solves 2s c'(y) = t(y) t'(y).
            let t = f4_t_poly(lambda);
            let c = Poly::new(vec![
                lambda[0].clone(),
                lambda[2].clone(),
                Rat::zero(),
                Rat::one(),
            ]);
            let h = &c.derivative().scale(&(rat_i(2) * sign.as_rat())) - &(&t * &t.derivative());
            for yc in crate::algebra::real_roots_f64(&h, &tol) {
                let tv = t.eval_f64(yc);
                let xc = -tv / (2.0 * s);
                let value = c.eval_f64(yc) - tv * tv / (4.0 * s);
                // Hessian [[2s, l1], [l1, 6y]]
                let l1 = lambda[1].to_f64().unwrap();
                let det = 12.0 * s * yc - l1 * l1;
                if det.abs() < 1e-9 {
                    // non-Morse point: no Morse datum to report
                    continue;
                }
                let kind = if det < 0.0 {
                    CritKind::Saddle
                } else if s > 0.0 {
                    CritKind::Min
                } else {
                    CritKind::Max
                };
                out.push(CriticalPoint { x: xc, y: yc, value, kind });
            }
        }
    }
    out.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap());
    Ok(out)
}

/// Critical values of the restriction f|_S (exact zero locus is the profile
/// for C and F4; for B the restriction is lambda_0 + s y^2).
pub fn boundary_critical_values(class: Class, lambda: &[Rat]) -> Result<Vec<f64>, FamilyError> {
    check_dim(class, lambda)?;
    let tol = crate::algebra::rat(1, 1i64 << 40);
    Ok(match class {
        Class::B { .. } => vec![lambda[0].to_f64().unwrap()],
        Class::C { .. } | Class::F4 { .. } => {
            let g = profile_poly(class, lambda)?;
            crate::algebra::real_roots_f64(&g.derivative(), &tol)
                .into_iter()
                .map(|y| g.eval_f64(y))
                .collect()
        }
    })
}
