//! Exact univariate polynomial arithmetic over the rationals.
//!
//! Everything downstream (wall membership, level-curve topology, the census)
//! reduces to sign determinations about real roots of rational polynomials,
//! so this module provides them exactly: Sturm counts on open intervals and
//! half-lines, root-sign tallies, resultants, discriminants and isolating
//! intervals refined by bisection.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

pub type Rat = BigRational;

/// Convenience constructor for a rational from an integer pair.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_i(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// Parse "3", "-1/4" or a plain decimal like "0.125" into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|e| format!("bad numerator: {e}"))?;
        let d: BigInt = d.trim().parse().map_err(|e| format!("bad denominator: {e}"))?;
        if d.is_zero() {
            return Err("zero denominator".into());
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((i, f)) = s.split_once('.') {
        let neg = i.trim_start().starts_with('-');
        let i: BigInt = if i.is_empty() || i == "-" {
            BigInt::zero()
        } else {
            i.parse().map_err(|e| format!("bad integer part: {e}"))?
        };
        let fdigits = f.len() as u32;
        let f: BigInt = if f.is_empty() {
            BigInt::zero()
        } else {
            f.parse().map_err(|e| format!("bad fractional part: {e}"))?
        };
        let den = BigInt::from(10u32).pow(fdigits);
        let mag = i.abs() * &den + f;
        let mag = if neg { -mag } else { mag };
        return Ok(Rat::new(mag, den));
    }
    let n: BigInt = s.parse().map_err(|e| format!("bad rational literal: {e}"))?;
    Ok(Rat::from(n))
}

/// One end of a (half-)open interval on the real line.
#[derive(Clone, Debug, PartialEq)]
pub enum Endpoint {
    NegInf,
    Finite(Rat),
    PosInf,
}

/// Dense univariate polynomial, coefficients ascending, no trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| rat_i(c)).collect())
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Rat]) -> Self {
        let mut p = Poly::one();
        for r in roots {
            p = &p * &Poly::new(vec![-r.clone(), Rat::one()]);
        }
        p
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![Rat::one()] }
    }

    pub fn monomial(deg: usize, c: Rat) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Rat::zero(); deg + 1];
        coeffs[deg] = c;
        Poly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; zero polynomial reports None.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn leading(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rat::from(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Divide out the positive content so coefficients stay small along
    /// remainder sequences; the sign of every value is preserved.
    fn normalize_content(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut den_lcm = BigInt::one();
        for c in &self.coeffs {
            den_lcm = num_integer::lcm(den_lcm, c.denom().clone());
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den_lcm / c.denom()))
            .collect();
        let mut g = BigInt::zero();
        for v in &ints {
            g = num_integer::gcd(g, v.clone());
        }
        if g.is_zero() {
            return Poly::zero();
        }
        Poly::new(ints.into_iter().map(|v| Rat::from(v / &g)).collect())
    }

    /// Euclidean division; returns (quotient, remainder).
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.deg();
        let dl = d.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() < d.coeffs.len() {
            return (Poly::zero(), self.clone());
        }
        let qlen = rem.len() - d.coeffs.len() + 1;
        let mut q = vec![Rat::zero(); qlen];
        for i in (0..qlen).rev() {
            let c = rem[i + dd].clone() / &dl;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    let t = dc * &c;
                    rem[i + j] -= t;
                }
            }
            q[i] = c;
        }
        rem.truncate(dd);
        (Poly::new(q), Poly::new(rem))
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.normalize_content();
        let mut b = other.normalize_content();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r.normalize_content();
        }
        if a.is_zero() {
            return a;
        }
        let lc = a.leading();
        a.scale(&(Rat::one() / lc))
    }

    /// p / gcd(p, p'): same distinct real roots, all simple.
    pub fn squarefree_part(&self) -> Poly {
        if self.deg() == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        if g.deg() == 0 {
            return self.clone();
        }
        let (q, r) = self.divrem(&g);
        debug_assert!(r.is_zero());
        q
    }

    /// Sign of p just before +inf (+1/-1), 0 only for the zero polynomial.
    pub fn sign_at_pos_inf(&self) -> i32 {
        sign(&self.leading())
    }

    pub fn sign_at_neg_inf(&self) -> i32 {
        let s = sign(&self.leading());
        if self.deg() % 2 == 1 {
            -s
        } else {
            s
        }
    }

    pub fn sign_at(&self, x: &Endpoint) -> i32 {
        match x {
            Endpoint::NegInf => self.sign_at_neg_inf(),
            Endpoint::PosInf => self.sign_at_pos_inf(),
            Endpoint::Finite(v) => sign(&self.eval(v)),
        }
    }

    /// 1 + max |a_i| / |a_n|: every real root lies strictly inside (-B, B).
    pub fn cauchy_bound(&self) -> Rat {
        let lc = self.leading().abs();
        let mut m = Rat::zero();
        for c in &self.coeffs[..self.coeffs.len().saturating_sub(1)] {
            let v = c.abs() / &lc;
            if v > m {
                m = v;
            }
        }
        m + Rat::one()
    }
}

impl std::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + rhs.coeff(i));
        }
        Poly::new(out)
    }
}

impl std::ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - rhs.coeff(i));
        }
        Poly::new(out)
    }
}

impl std::ops::Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

pub fn sign(x: &Rat) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Sturm chain of the squarefree part, content-normalized at every step.
pub struct SturmChain {
    chain: Vec<Poly>,
}

impl SturmChain {
    pub fn new(p: &Poly) -> Self {
        let ps = p.squarefree_part().normalize_content();
        let mut chain = vec![ps.clone()];
        if ps.deg() >= 1 {
            chain.push(ps.derivative().normalize_content());
            loop {
                let n = chain.len();
                let (_, r) = chain[n - 2].divrem(&chain[n - 1]);
                if r.is_zero() {
                    break;
                }
                chain.push((-&r).normalize_content());
            }
        }
        SturmChain { chain }
    }

    fn variations(&self, x: &Endpoint) -> usize {
        let mut v = 0;
        let mut last = 0;
        for p in &self.chain {
            let s = p.sign_at(x);
            if s != 0 {
                if last != 0 && s != last {
                    v += 1;
                }
                last = s;
            }
        }
        v
    }

    /// Number of distinct real roots of the underlying polynomial in the
    /// open interval (lo, hi).
    pub fn count_open(&self, lo: &Endpoint, hi: &Endpoint) -> usize {
        if self.chain.is_empty() || self.chain[0].is_zero() {
            return 0; // conventionally: the zero polynomial reports no isolated roots
        }
        if self.chain[0].deg() == 0 {
            return 0;
        }
        // V(lo) - V(hi) counts roots in (lo, hi]; drop hi if it is a root.
        let mut n = self.variations(lo) as isize - self.variations(hi) as isize;
        if let Endpoint::Finite(b) = hi {
            if self.chain[0].eval(b).is_zero() {
                n -= 1;
            }
        }
        n.max(0) as usize
    }
}

/// Distinct real roots of p in the open interval (lo, hi).
pub fn count_real_roots(p: &Poly, lo: &Endpoint, hi: &Endpoint) -> usize {
    SturmChain::new(p).count_open(lo, hi)
}

/// (positive roots, negative roots, has a root at zero), distinct roots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct RootSigns {
    pub pos: usize,
    pub neg: usize,
    pub zero: bool,
}

pub fn root_signs(p: &Poly) -> RootSigns {
    let ch = SturmChain::new(p);
    let z = Endpoint::Finite(Rat::zero());
    RootSigns {
        pos: ch.count_open(&z, &Endpoint::PosInf),
        neg: ch.count_open(&Endpoint::NegInf, &z),
        zero: !p.is_zero() && p.eval(&Rat::zero()).is_zero(),
    }
}

/// Resultant via the Sylvester matrix, exact Gaussian elimination.
pub fn resultant(p: &Poly, q: &Poly) -> Rat {
    let (m, n) = (p.deg(), q.deg());
    if p.is_zero() || q.is_zero() {
        return Rat::zero();
    }
    if m == 0 {
        return pow_rat(&p.coeff(0), n as u32);
    }
    if n == 0 {
        return pow_rat(&q.coeff(0), m as u32);
    }
    let size = m + n;
    let mut a = vec![vec![Rat::zero(); size]; size];
    for i in 0..n {
        for j in 0..=m {
            a[i][i + j] = p.coeff(m - j);
        }
    }
    for i in 0..m {
        for j in 0..=n {
            a[n + i][i + j] = q.coeff(n - j);
        }
    }
    det(a)
}

fn pow_rat(x: &Rat, e: u32) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

fn det(mut a: Vec<Vec<Rat>>) -> Rat {
    let n = a.len();
    let mut d = Rat::one();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero());
        let piv = match piv {
            Some(p) => p,
            None => return Rat::zero(),
        };
        if piv != col {
            a.swap(piv, col);
            d = -d;
        }
        let pv = a[col][col].clone();
        d *= &pv;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &pv;
            for c in col..n {
                let t = &a[col][c] * &f;
                a[r][c] -= t;
            }
        }
    }
    d
}

/// (-1)^{d(d-1)/2} Res(p, p') / lc(p).
pub fn discriminant(p: &Poly) -> Rat {
    let d = p.deg();
    assert!(d >= 1, "discriminant needs degree >= 1");
    if d == 1 {
        return Rat::one();
    }
    let r = resultant(p, &p.derivative());
    let s = if (d * (d - 1) / 2) % 2 == 1 { -Rat::one() } else { Rat::one() };
    s * r / p.leading()
}

/// Isolating intervals (open, endpoints non-roots, one simple root of the
/// squarefree part each), ascending, refined to width <= `width` when given.
pub fn isolate_roots(p: &Poly, width: Option<&Rat>) -> Vec<(Rat, Rat)> {
    let ps = p.squarefree_part().normalize_content();
    if ps.deg() == 0 {
        return vec![];
    }
    let chain = SturmChain::new(&ps);
    let b = ps.cauchy_bound();
    let lo = -&b;
    let hi = b.clone();
    // endpoints strictly beyond the Cauchy bound are never roots
    let mut work = vec![(lo, hi)];
    let mut done = vec![];
    while let Some((lo, hi)) = work.pop() {
        let n = chain.count_open(&Endpoint::Finite(lo.clone()), &Endpoint::Finite(hi.clone()));
        match n {
            0 => {}
            1 => done.push((lo, hi)),
            _ => {
                let mut mid = (&lo + &hi) / rat_i(2);
                let mut step = (&hi - &lo) / rat_i(64);
                while ps.eval(&mid).is_zero() {
                    mid += &step;
                    step /= rat_i(2);
                }
                work.push((lo, mid.clone()));
                work.push((mid, hi));
            }
        }
    }
    done.sort_by(|a, b| a.0.cmp(&b.0));
    let target = match width {
        Some(w) => w.clone(),
        None => {
            let b = ps.cauchy_bound();
            (b * rat_i(2)) / Rat::from(BigInt::from(1u64 << 30))
        }
    };
    done.into_iter()
        .map(|(lo, hi)| refine_root(&ps, lo, hi, &target))
        .collect()
}

/// Shrink an isolating interval of a squarefree polynomial by sign bisection.
pub fn refine_root(ps: &Poly, mut lo: Rat, mut hi: Rat, width: &Rat) -> (Rat, Rat) {
    let slo = sign(&ps.eval(&lo));
    debug_assert!(slo != 0 && slo == -sign(&ps.eval(&hi)));
    while &(&hi - &lo) > width {
        let mut mid = (&lo + &hi) / rat_i(2);
        if ps.eval(&mid).is_zero() {
            // nudge off the root; the interval still isolates it
            mid += (&hi - &lo) / rat_i(1024);
            if ps.eval(&mid).is_zero() {
                break;
            }
        }
        if sign(&ps.eval(&mid)) == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Midpoints of isolating intervals as f64, for downstream numerics.
pub fn real_roots_f64(p: &Poly, tol: &Rat) -> Vec<f64> {
    isolate_roots(p, Some(tol))
        .into_iter()
        .map(|(lo, hi)| ((lo + hi) / rat_i(2)).to_f64().unwrap())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(cs: &[i64]) -> Poly {
        Poly::from_ints(cs)
    }

    #[test]
    fn eval_and_arith() {
        // (x-1)(x+2) = x^2 + x - 2
        let f = p(&[-2, 1, 1]);
        assert_eq!(f.eval(&rat_i(1)), rat_i(0));
        assert_eq!(f.eval(&rat_i(-2)), rat_i(0));
        assert_eq!(f.eval(&rat_i(3)), rat_i(10));
        let g = &p(&[-1, 1]) * &p(&[2, 1]);
        assert_eq!(g, f);
        let (q, r) = f.divrem(&p(&[-1, 1]));
        assert_eq!(q, p(&[2, 1]));
        assert!(r.is_zero());
    }

    #[test]
    fn gcd_and_squarefree() {
        let f = &p(&[-1, 1]) * &p(&[-1, 1]); // (x-1)^2
        let g = &f * &p(&[3, 1]);
        assert_eq!(g.gcd(&f), f); // monic already
        assert_eq!(g.squarefree_part(), &p(&[-1, 1]) * &p(&[3, 1]));
    }

    #[test]
    fn sturm_counts() {
        // x^3 - x: roots -1, 0, 1
        let f = p(&[0, -1, 0, 1]);
        assert_eq!(count_real_roots(&f, &Endpoint::NegInf, &Endpoint::PosInf), 3);
        assert_eq!(
            count_real_roots(&f, &Endpoint::Finite(rat_i(0)), &Endpoint::PosInf),
            1
        );
        assert_eq!(
            count_real_roots(&f, &Endpoint::Finite(rat(-1, 2)), &Endpoint::Finite(rat(1, 2))),
            1
        );
        // open interval: endpoints that are roots do not count
        assert_eq!(
            count_real_roots(&f, &Endpoint::Finite(rat_i(-1)), &Endpoint::Finite(rat_i(1))),
            1
        );
        // multiplicities collapse
        let g = &f * &f;
        assert_eq!(count_real_roots(&g, &Endpoint::NegInf, &Endpoint::PosInf), 3);
        // no real roots
        assert_eq!(
            count_real_roots(&p(&[1, 0, 1]), &Endpoint::NegInf, &Endpoint::PosInf),
            0
        );
    }

    #[test]
    fn root_sign_counts() {
        let f = &p(&[-1, 1]) * &(&p(&[2, 1]) * &p(&[0, 1])); // roots 1, -2, 0
        let rs = root_signs(&f);
        assert_eq!(rs, RootSigns { pos: 1, neg: 1, zero: true });
        let g = p(&[1, 0, 1]);
        assert_eq!(root_signs(&g), RootSigns { pos: 0, neg: 0, zero: false });
    }

    #[test]
    fn resultant_oracle() {
        // res(x-1, x+1) = 2
        assert_eq!(resultant(&p(&[-1, 1]), &p(&[1, 1])), rat_i(2));
        // res(x^2, x-3) = 9
        assert_eq!(resultant(&p(&[0, 0, 1]), &p(&[-3, 1])), rat_i(9));
        // symmetric up to (-1)^{mn}
        let f = p(&[1, 2, 0, 1]);
        let g = p(&[-3, 1, 1]);
        let r1 = resultant(&f, &g);
        let r2 = resultant(&g, &f);
        assert_eq!(r1, r2); // mn = 6 even
        // common root forces zero
        let h = &p(&[-1, 1]) * &p(&[5, 1]);
        let k = &p(&[-1, 1]) * &p(&[7, 2]);
        assert!(resultant(&h, &k).is_zero());
    }

    #[test]
    fn discriminant_oracle() {
        // x^2 + bx + c -> b^2 - 4c
        let f = Poly::new(vec![rat_i(3), rat_i(5), rat_i(1)]);
        assert_eq!(discriminant(&f), rat_i(25 - 12));
        // x^3 + px + q -> -4p^3 - 27q^2
        let g = Poly::new(vec![rat_i(2), rat_i(-1), rat_i(0), rat_i(1)]);
        assert_eq!(discriminant(&g), rat_i(4 - 108));
        // double root -> 0
        let h = &p(&[-1, 1]) * &(&p(&[-1, 1]) * &p(&[4, 1]));
        assert!(discriminant(&h).is_zero());
    }

    #[test]
    fn isolation_and_refinement() {
        let f = p(&[0, -1, 0, 1]); // -1, 0, 1
        let iv = isolate_roots(&f, Some(&rat(1, 1000)));
        assert_eq!(iv.len(), 3);
        let mids: Vec<f64> = iv
            .iter()
            .map(|(a, b)| ((a + b) / rat_i(2)).to_f64().unwrap())
            .collect();
        for (m, expect) in mids.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((m - expect).abs() < 2e-3, "{m} vs {expect}");
        }
        for (a, b) in &iv {
            assert!(&(b - a) <= &rat(1, 1000));
            assert!(!f.eval(a).is_zero() && !f.eval(b).is_zero());
        }
    }

    #[test]
    fn isolation_matches_float_oracle_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12345);
        for _ in 0..300 {
            let deg = rng.gen_range(1..=8);
            let mut cs: Vec<Rat> = (0..=deg).map(|_| rat(rng.gen_range(-40i64..=40), 8)).collect();
            if cs[deg].is_zero() {
                cs[deg] = Rat::one();
            }
            let f = Poly::new(cs);
            let iv = isolate_roots(&f, Some(&rat(1, 1 << 20)));
            let oracle = float_roots(&f);
            assert_eq!(iv.len(), oracle.len(), "poly {:?}", f);
            for ((a, b), r) in iv.iter().zip(oracle) {
                let m = ((a + b) / rat_i(2)).to_f64().unwrap();
                assert!((m - r).abs() < 1e-4, "{m} vs {r} for {:?}", f);
            }
        }
    }

    /// Float bisection on a sign grid: independent root oracle for tests.
    fn float_roots(f: &Poly) -> Vec<f64> {
        let fs = f.squarefree_part();
        let b = fs.cauchy_bound().to_f64().unwrap() + 1.0;
        let n = 200_000;
        let mut roots = vec![];
        let mut x0 = -b;
        let mut s0 = fs.eval_f64(x0);
        for i in 1..=n {
            let x1 = -b + 2.0 * b * (i as f64) / (n as f64);
            let s1 = fs.eval_f64(x1);
            if s0 == 0.0 {
                roots.push(x0);
            } else if s0 * s1 < 0.0 {
                let (mut lo, mut hi) = (x0, x1);
                for _ in 0..80 {
                    let m = 0.5 * (lo + hi);
                    if fs.eval_f64(m) * fs.eval_f64(lo) <= 0.0 {
                        hi = m;
                    } else {
                        lo = m;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            x0 = x1;
            s0 = s1;
        }
        roots
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_rat("3").unwrap(), rat_i(3));
        assert_eq!(parse_rat("-1/4").unwrap(), rat(-1, 4));
        assert_eq!(parse_rat("0.125").unwrap(), rat(1, 8));
        assert_eq!(parse_rat("-0.5").unwrap(), rat(-1, 2));
        assert!(parse_rat("1/0").is_err());
    }
}
