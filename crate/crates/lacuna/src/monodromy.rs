//! Integer monodromy models on the distinguished bases of caps and tubes.
//!
//! The generator gamma_i acts by the Picard-Lefschetz rule
//! gamma_i(beta_j) = beta_j + eta_ij beta_i, so M_i = I + e_i (x) eta_{i,:}.
//! Diagonal entries are 0 (transvection, infinite order when the row is
//! nonzero) or -2 (reflection, order two).  Everything here is exact i64
//! arithmetic.

use crate::families::Class;
use serde::Serialize;
use std::collections::{HashSet, VecDeque};

pub type Mat = Vec<Vec<i64>>;
pub type Veci = Vec<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BasisLabel {
    Cap,
    Tube,
}

#[derive(Clone, Debug, Serialize)]
pub struct MonodromyModel {
    pub class: Class,
    pub dim: usize,
    pub labels: Vec<BasisLabel>,
    pub eta: Mat,
    /// Labels of the critical values the generators loop around, in
    /// generator order; index 0 is the boundary one for B and C.
    pub critical_values: Vec<String>,
}

/// The eta matrix of the class, rows indexing generators.
///
/// B_k: first row (-2, 1, 0, ..., 0); rows i >= 2 carry the off-diagonal
/// band eta_{i,i+-1} = (-1)^{k-i}, except that eta_{2,1} = 0 as printed.
/// The band rule is the extension of the printed alternating-sign pattern
/// to general k; for k <= 3 the printed bottom-row and second-row patterns
/// overlap and the second-row reading (leading zero) is used.
/// C_k: first row zero; rows 2..k tridiagonal (1, -2, 1).
/// F4: the fixed 4x4 matrix.
pub fn eta_matrix(class: Class) -> MonodromyModel {
    let (eta, labels): (Mat, Vec<BasisLabel>) = match class {
        Class::F4 { .. } => (
            vec![
                vec![0, 1, 0, 0],
                vec![-1, 0, 0, 0],
                vec![1, 0, -2, 1],
                vec![-1, 1, 1, -2],
            ],
            vec![
                BasisLabel::Cap,
                BasisLabel::Cap,
                BasisLabel::Tube,
                BasisLabel::Tube,
            ],
        ),
        Class::B { k, .. } => {
            let mut m = vec![vec![0i64; k]; k];
            m[0][0] = -2;
            if k > 1 {
                m[0][1] = 1;
            }
            for i in 1..k {
                // 1-indexed row i+1: band value (-1)^{k-(i+1)}
                let v = if (k - (i + 1)) % 2 == 0 { 1 } else { -1 };
                if i + 1 < k {
                    m[i][i + 1] = v;
                }
                if i >= 2 {
                    m[i][i - 1] = v;
                }
                // i == 1: eta_{2,1} stays 0
            }
            let mut labels = vec![BasisLabel::Tube; k];
            labels[0] = BasisLabel::Cap; // the boundary cycle, self-index -2
            (m, labels)
        }
        Class::C { k, .. } => {
            let mut m = vec![vec![0i64; k]; k];
            for i in 1..k {
                m[i][i] = -2;
                m[i][i - 1] = 1;
                if i + 1 < k {
                    m[i][i + 1] = 1;
                }
            }
            let mut labels = vec![BasisLabel::Cap; k];
            labels[0] = BasisLabel::Tube; // beta_0, the Leray tube class
            (m, labels)
        }
    };
    let dim = eta.len();
    MonodromyModel {
        class,
        dim,
        labels,
        eta,
        critical_values: (0..dim)
            .map(|i| match class {
                Class::F4 { .. } => format!("nu_{}", i + 1),
                _ if i == 0 => "nu_0 (boundary)".into(),
                _ => format!("nu_{i}"),
            })
            .collect(),
    }
}

/// M_i = I + e_i (x) eta_{i,:}; `i` is 1-based.
pub fn generator(model: &MonodromyModel, i: usize) -> Mat {
    assert!(i >= 1 && i <= model.dim, "generator index out of range");
    let mut m = identity(model.dim);
    for j in 0..model.dim {
        m[i - 1][j] += model.eta[i - 1][j];
    }
    m
}

/// Inverse generator; exact because the diagonal is 0 or -2.
pub fn generator_inverse(model: &MonodromyModel, i: usize) -> Mat {
    let d = model.eta[i - 1][i - 1];
    match d {
        -2 => generator(model, i), // order two
        0 => {
            let mut m = identity(model.dim);
            for j in 0..model.dim {
                m[i - 1][j] -= model.eta[i - 1][j];
            }
            m
        }
        _ => unreachable!("diagonal entries are 0 or -2"),
    }
}

pub fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn mat_vec(a: &Mat, v: &Veci) -> Veci {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(r, x)| r * x).sum())
        .collect()
}

/// Integer determinant by fraction-free Bareiss elimination.
pub fn det_i64(m: &Mat) -> i64 {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let piv = (k + 1..n).find(|&r| a[r][k] != 0);
            match piv {
                Some(p) => {
                    a.swap(k, p);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    (sign * a[n - 1][n - 1]) as i64
}

/// Apply a word of signed 1-based generator indices, left to right.
pub fn apply_word(model: &MonodromyModel, word: &[i64], v: &Veci) -> Veci {
    assert_eq!(v.len(), model.dim);
    let mut out = v.clone();
    for &g in word {
        assert!(g != 0 && g.unsigned_abs() as usize <= model.dim, "bad index");
        let m = if g > 0 {
            generator(model, g as usize)
        } else {
            generator_inverse(model, (-g) as usize)
        };
        out = mat_vec(&m, &out);
    }
    out
}

/// Conjugate eta by a diagonal sign matrix: eta_ij -> eps_i eps_j eta_ij.
/// Orientation changes of basis elements act exactly like this.
pub fn flip_orientations(model: &MonodromyModel, eps: &[i64]) -> MonodromyModel {
    assert_eq!(eps.len(), model.dim);
    assert!(eps.iter().all(|&e| e == 1 || e == -1));
    let mut out = model.clone();
    for i in 0..model.dim {
        for j in 0..model.dim {
            out.eta[i][j] = eps[i] * eps[j] * model.eta[i][j];
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    pub indecomposable: bool,
    /// When decomposable: a partition of the 1-based basis indices into
    /// mutually non-coupled blocks.
    pub blocks: Vec<Vec<usize>>,
}

/// Connectivity of the coupling graph: edge {i,j} iff eta_ij or eta_ji != 0.
pub fn decomposition(eta: &Mat) -> DecompositionReport {
    let n = eta.len();
    let mut seen = vec![false; n];
    let mut blocks = vec![];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut block = vec![];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(i) = stack.pop() {
            block.push(i + 1);
            for j in 0..n {
                if i != j && !seen[j] && (eta[i][j] != 0 || eta[j][i] != 0) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        block.sort();
        blocks.push(block);
    }
    DecompositionReport {
        indecomposable: blocks.len() <= 1,
        blocks,
    }
}

pub fn is_indecomposable(model: &MonodromyModel) -> bool {
    decomposition(&model.eta).indecomposable
}

#[derive(Clone, Debug, Serialize)]
pub struct RankReport {
    /// dim H_{n-1}(A cap X \ S) at n = 2.
    pub absolute: usize,
    /// dim of the relative group; equals the basis size of the model.
    pub relative: usize,
    pub model_dim: usize,
}

pub fn rank_report(class: Class) -> RankReport {
    let (absolute, relative) = match class {
        Class::F4 { .. } => (5, 4),
        Class::B { k, .. } | Class::C { k, .. } => (k + 1, k),
    };
    RankReport {
        absolute,
        relative,
        model_dim: eta_matrix(class).dim,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WitnessKind {
    /// eta_ii = 0: iterating gamma_i adds the coupling once per loop, so the
    /// beta_i coefficient grows linearly without bound.
    Transvection,
    /// eta_ii = -2: gamma_i itself has order two; the nonzero coupling still
    /// feeds the volume continuation a fixed increment per passage.
    ReflectionCoupling,
}

#[derive(Clone, Debug, Serialize)]
pub struct ObstructionWitness {
    /// 1-based generator index.
    pub generator: usize,
    pub kind: WitnessKind,
    /// eta_{i,:} . v — the pairing-like coefficient added to the beta_i
    /// coordinate by one application of gamma_i.
    pub coupling: i64,
    /// Word (signed indices) moving pi to the state v where the coupling
    /// fires; empty when pi couples directly.
    pub word: Vec<i64>,
    /// v, gamma_i v, gamma_i^2 v, gamma_i^3 v.
    pub orbit: Vec<Veci>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ObstructionVerdict {
    pub obstructed: bool,
    pub witness: Option<ObstructionWitness>,
}

/// Breadth-first search over words up to `max_len` for a generator whose
/// row couples nonzero to some image of pi.  Transvection witnesses are
/// preferred over reflection couplings; among each kind the shortest word
/// wins (breadth-first order).
pub fn obstruction(model: &MonodromyModel, pi: &Veci, max_len: usize) -> ObstructionVerdict {
    assert!(pi.iter().any(|&c| c != 0), "pi must be nonzero");
    let mut queue: VecDeque<(Veci, Vec<i64>)> = VecDeque::new();
    let mut seen: HashSet<Veci> = HashSet::new();
    queue.push_back((pi.clone(), vec![]));
    seen.insert(pi.clone());
    let mut fallback: Option<ObstructionWitness> = None;
    let witness_at = |v: &Veci, word: &[i64], i: usize| -> Option<ObstructionWitness> {
        let c: i64 = model.eta[i].iter().zip(v).map(|(e, x)| e * x).sum();
        if c == 0 {
            return None;
        }
        let kind = if model.eta[i][i] == 0 {
            WitnessKind::Transvection
        } else {
            WitnessKind::ReflectionCoupling
        };
        let g = generator(model, i + 1);
        let mut orbit = vec![v.clone()];
        for _ in 0..3 {
            orbit.push(mat_vec(&g, orbit.last().unwrap()));
        }
        Some(ObstructionWitness {
            generator: i + 1,
            kind,
            coupling: c,
            word: word.to_vec(),
            orbit,
        })
    };
    while let Some((v, word)) = queue.pop_front() {
        for i in 0..model.dim {
            if let Some(w) = witness_at(&v, &word, i) {
                if w.kind == WitnessKind::Transvection {
                    return ObstructionVerdict {
                        obstructed: true,
                        witness: Some(w),
                    };
                }
                if fallback.is_none() {
                    fallback = Some(w);
                }
            }
        }
        if word.len() >= max_len || seen.len() > 200_000 {
            continue;
        }
        for g in 1..=model.dim as i64 {
            for sg in [g, -g] {
                let next = apply_word(model, &[sg], &v);
                if seen.insert(next.clone()) {
                    let mut w2 = word.clone();
                    w2.push(sg);
                    queue.push_back((next, w2));
                }
            }
        }
    }
    ObstructionVerdict {
        obstructed: fallback.is_some(),
        witness: fallback,
    }
}

pub const DEFAULT_WORD_LEN: usize = 6;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::Sign;

    fn f4() -> MonodromyModel {
        eta_matrix(Class::F4 { sign: Sign::Plus })
    }
    fn bk(k: usize) -> MonodromyModel {
        eta_matrix(Class::B { k, sign: Sign::Plus })
    }
    fn ck(k: usize) -> MonodromyModel {
        eta_matrix(Class::C { k, sign: Sign::Plus })
    }

    #[test]
    fn eta_fixed_entries() {
        let m = f4();
        assert_eq!(
            m.eta,
            vec![
                vec![0, 1, 0, 0],
                vec![-1, 0, 0, 0],
                vec![1, 0, -2, 1],
                vec![-1, 1, 1, -2],
            ]
        );
        let c4 = ck(4);
        assert_eq!(c4.eta[0], vec![0, 0, 0, 0]);
        assert_eq!(c4.eta[1], vec![1, -2, 1, 0]);
        assert_eq!(c4.eta[2], vec![0, 1, -2, 1]);
        assert_eq!(c4.eta[3], vec![0, 0, 1, -2]);
        let b7 = bk(7);
        assert_eq!(b7.eta[0], vec![-2, 1, 0, 0, 0, 0, 0]);
        // row 2: leading zero, then (-1)^k = -1 for k=7
        assert_eq!(b7.eta[1], vec![0, 0, -1, 0, 0, 0, 0]);
        // penultimate row (..., -1, 0, -1), last row (..., 1, 0)
        assert_eq!(b7.eta[5], vec![0, 0, 0, 0, -1, 0, -1]);
        assert_eq!(b7.eta[6], vec![0, 0, 0, 0, 0, 1, 0]);
        // band alternates sign row to row
        for k in 2..=10 {
            let m = bk(k);
            for i in 2..k {
                let v = if (k - (i + 1)) % 2 == 0 { 1 } else { -1 };
                assert_eq!(m.eta[i][i - 1], v);
                if i + 1 < k {
                    assert_eq!(m.eta[i][i + 1], v);
                }
            }
            assert_eq!(m.eta[1][0], 0);
        }
    }

    #[test]
    fn diagonal_and_unimodularity() {
        for model in [f4(), bk(2), bk(5), bk(10), ck(2), ck(7)] {
            for i in 0..model.dim {
                assert!(model.eta[i][i] == 0 || model.eta[i][i] == -2);
                let g = generator(&model, i + 1);
                assert_eq!(det_i64(&g).abs(), 1, "{} gen {}", model.class, i + 1);
                let inv = generator_inverse(&model, i + 1);
                assert_eq!(mat_mul(&g, &inv), identity(model.dim));
            }
        }
    }

    #[test]
    fn involution_iff_reflection() {
        for model in [f4(), bk(6), ck(5)] {
            for i in 0..model.dim {
                let g = generator(&model, i + 1);
                let sq = mat_mul(&g, &g);
                if model.eta[i][i] == -2 {
                    assert_eq!(sq, identity(model.dim));
                } else if model.eta[i].iter().any(|&e| e != 0) {
                    // infinite order: closed form M^m = I + m e eta
                    let mut p = identity(model.dim);
                    for m in 1..=12 {
                        p = mat_mul(&g, &p);
                        assert_ne!(p, identity(model.dim));
                        let mut expect = identity(model.dim);
                        for j in 0..model.dim {
                            expect[i][j] += m * model.eta[i][j];
                        }
                        assert_eq!(p, expect);
                    }
                }
            }
        }
    }

    #[test]
    fn generator_examples() {
        let m = f4();
        // M3 beta_3 = -beta_3
        let v = mat_vec(&generator(&m, 3), &vec![0, 0, 1, 0]);
        assert_eq!(v, vec![0, 0, -1, 0]);
        // M1 beta_2 = beta_2 + beta_1
        let v = mat_vec(&generator(&m, 1), &vec![0, 1, 0, 0]);
        assert_eq!(v, vec![1, 1, 0, 0]);
        // gamma_4(beta_3) = beta_3 + beta_4
        let v = mat_vec(&generator(&m, 4), &vec![0, 0, 1, 0]);
        assert_eq!(v, vec![0, 0, 1, 1]);
    }

    #[test]
    fn word_application() {
        let m = f4();
        let b2 = vec![0, 1, 0, 0];
        assert_eq!(apply_word(&m, &[], &b2), b2);
        // (1,1,...,1) m times on beta_2 adds m beta_1
        for mm in 1..=5 {
            let word: Vec<i64> = vec![1; mm];
            let got = apply_word(&m, &word, &b2);
            assert_eq!(got, vec![mm as i64, 1, 0, 0]);
        }
        // (3,3) is the identity
        let v = vec![1, -2, 3, 4];
        assert_eq!(apply_word(&m, &[3, 3], &v), v);
        // inverses cancel
        assert_eq!(apply_word(&m, &[2, -2, 4, -4], &v), v);
    }

    #[test]
    fn indecomposability() {
        assert!(is_indecomposable(&f4()));
        for k in 2..=10 {
            assert!(is_indecomposable(&bk(k)), "B_{k}");
            assert!(is_indecomposable(&ck(k)), "C_{k}");
        }
        // synthetic block model
        let blocky = vec![
            vec![-2, 1, 0, 0],
            vec![1, 0, 0, 0],
            vec![0, 0, -2, 1],
            vec![0, 0, 1, 0],
        ];
        let rep = decomposition(&blocky);
        assert!(!rep.indecomposable);
        assert_eq!(rep.blocks, vec![vec![1, 2], vec![3, 4]]);
    }

    #[test]
    fn rank_reports() {
        let r = rank_report(Class::F4 { sign: Sign::Plus });
        assert_eq!((r.absolute, r.relative), (5, 4));
        assert_eq!(r.model_dim, 4);
        let r = rank_report(Class::B { k: 3, sign: Sign::Minus });
        assert_eq!((r.absolute, r.relative), (4, 3));
        let r = rank_report(Class::C { k: 4, sign: Sign::Plus });
        assert_eq!((r.absolute, r.relative), (5, 4));
        for k in 2..=10 {
            for class in [Class::B { k, sign: Sign::Plus }, Class::C { k, sign: Sign::Plus }] {
                let r = rank_report(class);
                assert_eq!(r.relative, r.model_dim);
                assert_eq!(r.absolute, r.relative + 1);
            }
        }
    }

    #[test]
    fn obstruction_f4_oval() {
        let m = f4();
        let v = obstruction(&m, &vec![1, 0, 0, 0], DEFAULT_WORD_LEN);
        assert!(v.obstructed);
        let w = v.witness.unwrap();
        assert_eq!(w.kind, WitnessKind::Transvection);
        assert_eq!(w.generator, 2);
        assert_eq!(w.coupling, -1);
        // orbit: beta_1, beta_1 - beta_2, beta_1 - 2 beta_2, ...
        assert_eq!(w.orbit[1], vec![1, -1, 0, 0]);
        assert_eq!(w.orbit[3], vec![1, -3, 0, 0]);
    }

    #[test]
    fn obstruction_c4_tube() {
        let m = ck(4);
        let v = obstruction(&m, &vec![1, 0, 0, 0], DEFAULT_WORD_LEN);
        assert!(v.obstructed);
        let w = v.witness.unwrap();
        // C has no nonzero transvection row: gamma_1 (row 2, eta_21 = 1)
        // couples through its reflection
        assert_eq!(w.kind, WitnessKind::ReflectionCoupling);
        assert_eq!(w.generator, 2);
        assert_eq!(w.coupling, 1);
        assert!(w.word.is_empty());
    }

    #[test]
    fn obstruction_block_negative() {
        // pi confined to a block with zero rows cannot couple
        let model = MonodromyModel {
            class: Class::C { k: 4, sign: Sign::Plus },
            dim: 4,
            labels: vec![BasisLabel::Tube; 4],
            eta: vec![
                vec![0, 0, 0, 0],
                vec![0, 0, 0, 0],
                vec![0, 0, -2, 1],
                vec![0, 0, 1, -2],
            ],
            critical_values: (0..4).map(|i| format!("nu_{i}")).collect(),
        };
        let v = obstruction(&model, &vec![1, 1, 0, 0], DEFAULT_WORD_LEN);
        assert!(!v.obstructed);
        assert!(v.witness.is_none());
    }

    #[test]
    fn obstruction_b_families() {
        // B_2: only the boundary reflection couples (row 2 is zero)
        let v = obstruction(&bk(2), &vec![0, 1], DEFAULT_WORD_LEN);
        assert!(v.obstructed);
        assert_eq!(v.witness.as_ref().unwrap().kind, WitnessKind::ReflectionCoupling);
        // B_k, k >= 3: transvection witnesses exist for cap vectors
        for k in 3..=7 {
            let m = bk(k);
            for j in 1..k {
                let mut pi = vec![0i64; k];
                pi[j] = 1;
                let v = obstruction(&m, &pi, DEFAULT_WORD_LEN);
                assert!(v.obstructed, "B_{k} e_{j}");
                assert_eq!(
                    v.witness.unwrap().kind,
                    WitnessKind::Transvection,
                    "B_{k} e_{j}"
                );
            }
        }
    }

    #[test]
    fn orientation_flip_conjugates() {
        let m = f4();
        let eps = vec![1, -1, 1, -1];
        let f = flip_orientations(&m, &eps);
        assert_eq!(f.eta[0][1], -1);
        assert_eq!(f.eta[2][2], -2); // diagonal fixed
        // flipping twice restores
        assert_eq!(flip_orientations(&f, &eps).eta, m.eta);
        // generators stay unimodular
        for i in 1..=4 {
            assert_eq!(det_i64(&generator(&f, i)).abs(), 1);
        }
    }
}
