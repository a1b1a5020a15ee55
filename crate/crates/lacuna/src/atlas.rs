//! Census of the connected components of the complement of the real
//! discriminant, keyed by topological signature, with lacuna verdicts.
//!
//! For B and C a component is characterized by the root-sign pair (p, q) of
//! the profile polynomial.  For F4 the signature refines the obvious key
//! (number of boundary roots, component shapes) with the side of an oval
//! missing S and the second-sheet signs at the non-fold crossings of the
//! noncompact component; this refinement is what separates all eight
//! components and is validated against the expected count — a mismatch
//! aborts rather than merging or splitting heuristically.

use crate::algebra::{parse_rat, rat, rat_i, Poly, Rat};
use crate::curvetopo::{level_topology, stabilized_topology, LevelCurveTopology};
use crate::families::{Class, FamilyError, Sign};
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ComponentSignature {
    /// B and C: root counts of the profile on each side of 0.
    PQ { p: usize, q: usize },
    /// F4 refined key.
    F4 {
        boundary_roots: usize,
        /// (compact, meets_S) per component, sorted.
        components: Vec<(bool, bool)>,
        /// Sign of x on an oval missing S; 0 when every component meets S.
        oval_side: i32,
        /// Second-sheet signs at non-fold S-crossings of the noncompact
        /// component, ascending in y.
        branch_signs: Vec<i32>,
    },
}

impl fmt::Display for ComponentSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentSignature::PQ { p, q } => write!(f, "({p},{q})"),
            ComponentSignature::F4 {
                boundary_roots,
                components,
                oval_side,
                branch_signs,
            } => {
                let comps: Vec<String> = components
                    .iter()
                    .map(|(c, m)| {
                        format!("{}{}", if *c { "oval" } else { "nc" }, if *m { "*S" } else { "" })
                    })
                    .collect();
                let side = match oval_side {
                    1 => "right",
                    -1 => "left",
                    _ => "none",
                };
                let bs: String = branch_signs
                    .iter()
                    .map(|s| if *s > 0 { '+' } else { '-' })
                    .collect();
                write!(
                    f,
                    "F4[roots={boundary_roots};{};side={side};branch={}]",
                    comps.join("+"),
                    if bs.is_empty() { "none" } else { &bs }
                )
            }
        }
    }
}

/// Signature of the component of the discriminant complement containing
/// lambda.
pub fn signature_of(class: Class, lambda: &[Rat]) -> Result<ComponentSignature, FamilyError> {
    let t = level_topology(class, lambda)?;
    Ok(signature_of_topology(&t))
}

pub fn signature_of_topology(t: &LevelCurveTopology) -> ComponentSignature {
    match t.class {
        Class::B { .. } | Class::C { .. } => ComponentSignature::PQ {
            p: t.profile_signs.pos,
            q: t.profile_signs.neg,
        },
        Class::F4 { .. } => {
            let det = t.f4.as_ref().expect("F4 topology carries details");
            let mut components: Vec<(bool, bool)> = t
                .components
                .iter()
                .map(|c| (c.compact, c.boundary_points > 0))
                .collect();
            components.sort();
            let oval_side = t
                .components
                .iter()
                .find_map(|c| c.side)
                .unwrap_or(0);
            ComponentSignature::F4 {
                boundary_roots: det.n_boundary_roots,
                components,
                oval_side,
                branch_signs: det.branch_signs.clone(),
            }
        }
    }
}

/// Relation between a component and lacunahood: the level set is empty or
/// every connected component meets the boundary.
pub fn is_lacuna(topology: &LevelCurveTopology) -> bool {
    topology.is_empty() || topology.all_meet_boundary()
}

pub fn is_lacuna_at(class: Class, lambda: &[Rat]) -> Result<bool, FamilyError> {
    Ok(is_lacuna(&level_topology(class, lambda)?))
}

/// Closed-form Theorem-1 expectations: (components, lacunas).
pub fn expected_counts(class: Class) -> (usize, usize) {
    match class {
        Class::B { k, sign } => {
            if k % 2 == 0 {
                let h = k / 2;
                ((h + 1) * (h + 1), if sign == Sign::Plus { 2 } else { 1 })
            } else {
                let h = (k - 1) / 2;
                ((h + 1) * (h + 2), 1)
            }
        }
        Class::C { k, .. } => {
            if k % 2 == 0 {
                let h = k / 2;
                ((h + 1) * (h + 1), h * h)
            } else {
                let h = (k - 1) / 2;
                ((h + 1) * (h + 2), h * h + h)
            }
        }
        Class::F4 { .. } => (8, 4),
    }
}

/// Rule values for the stabilized census lacuna count.
pub fn expected_stabilized_lacunas(class: Class, r: usize, s: usize) -> usize {
    let (all, n2) = expected_counts(class);
    if r + s == 0 {
        return n2;
    }
    match class {
        Class::B { sign, .. } | Class::F4 { sign } => {
            let matching = (sign == Sign::Plus && s == 0) || (sign == Sign::Minus && r == 0);
            if matching {
                n2
            } else {
                all
            }
        }
        Class::C { k, sign } => {
            if k % 2 == 1 {
                let h = (k - 1) / 2;
                if r == 0 || s == 0 {
                    (h + 1) * (h + 1)
                } else {
                    all
                }
            } else {
                let matching = (sign == Sign::Plus && s == 0) || (sign == Sign::Minus && r == 0);
                if matching {
                    n2
                } else {
                    all
                }
            }
        }
    }
}

/// Serialize rationals as exact "num/den" strings.
mod rat_vec_serde {
    use super::*;
    use serde::de::Error;
    pub fn serialize<S: serde::Serializer>(v: &Vec<Rat>, s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(|r| r.to_string()).collect();
        strs.serialize(s)
    }
    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
        let strs: Vec<String> = Vec::deserialize(d)?;
        strs.iter()
            .map(|t| parse_rat(t).map_err(D::Error::custom))
            .collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AtlasRecord {
    pub signature: ComponentSignature,
    pub signature_label: String,
    #[serde(with = "rat_vec_serde")]
    pub witness: Vec<Rat>,
    pub is_lacuna: bool,
    /// Random samples observed in this component (the constructed witness
    /// itself is not counted).
    pub population: usize,
    /// True when the witness came from the deterministic constructions
    /// rather than sampling.
    pub constructed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CensusReport {
    pub class: Class,
    pub class_label: String,
    pub seed: u64,
    pub budget: usize,
    pub component_count: usize,
    pub lacuna_count: usize,
    pub expected_components: usize,
    pub expected_lacunas: usize,
    pub complete: bool,
    pub records: Vec<AtlasRecord>,
}

#[derive(Debug, thiserror::Error)]
pub enum AtlasError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("signature mismatch for {class}: {detail}")]
    SignatureMismatch { class: Class, detail: String },
    #[error("census counts for {class} disagree with the expected table: got {got_components} components / {got_lacunas} lacunas, expected {expected_components} / {expected_lacunas}")]
    CountMismatch {
        class: Class,
        got_components: usize,
        got_lacunas: usize,
        expected_components: usize,
        expected_lacunas: usize,
    },
    #[error("insufficient sampling for {class}: {found} of {expected} signatures found with budget {budget}")]
    InsufficientSampling {
        class: Class,
        found: usize,
        expected: usize,
        budget: usize,
    },
    #[error("cache i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("cache decode: {0}")]
    Decode(#[from] serde_json::Error),
}

/// Deterministic witness for the B/C component (p, q): profile with simple
/// roots at +1/10, .., +p/10 and -13/100, .., -13q/100, filled to degree k
/// by near-double quadratic factors (x - e)^2 + 1/400 that stay rootless.
/// The asymmetric negative ladder keeps later numerical probes away from
/// coincidences at x = 0.
pub fn pq_witness(class: Class, p: usize, q: usize) -> Result<Vec<Rat>, FamilyError> {
    let k = match class {
        Class::B { k, .. } | Class::C { k, .. } => k,
        Class::F4 { .. } => {
            return Err(FamilyError::Invalid("pq_witness needs B or C".into()))
        }
    };
    if p + q > k || (k - p - q) % 2 != 0 {
        return Err(FamilyError::Invalid(format!(
            "(p,q)=({p},{q}) not admissible for {class}"
        )));
    }
    for bump in [rat(1, 400), rat(1, 1000)] {
        let mut poly = Poly::one();
        for i in 1..=p {
            poly = &poly * &Poly::new(vec![rat(-(i as i64), 10), rat_i(1)]);
        }
        for j in 1..=q {
            poly = &poly * &Poly::new(vec![rat(13 * j as i64, 100), rat_i(1)]);
        }
        for m in 1..=(k - p - q) / 2 {
            let e = rat((p as i64 + m as i64) * 10 + 5, 100);
            let lin = Poly::new(vec![-e, rat_i(1)]);
            let quad = &(&lin * &lin) + &Poly::new(vec![bump.clone()]);
            poly = &poly * &quad;
        }
        debug_assert_eq!(poly.deg(), k);
        let sgn = class.sign().as_rat();
        let lambda: Vec<Rat> = (0..k)
            .map(|i| match class {
                Class::B { .. } => poly.coeff(i),
                _ => &sgn * poly.coeff(i),
            })
            .collect();
        if crate::families::on_wall(class, &lambda)? {
            continue;
        }
        let sig = signature_of(class, &lambda)?;
        if sig == (ComponentSignature::PQ { p, q }) {
            return Ok(lambda);
        }
    }
    Err(FamilyError::Invalid(format!(
        "could not construct witness for {class} ({p},{q})"
    )))
}

/// Frozen representatives of the eight F4^+ components (validated against
/// the level-curve grid oracle); F4^- representatives come from the exact
/// correspondence (x, y, f) -> (x, -y, -f), i.e. lambda -> (-l0, l1, l2, -l3).
const F4_PLUS_REPS_MILLI: [[i64; 4]; 8] = [
    [200, 300, 500, 700],
    [623, 45, -1225, -1724],
    [1078, 468, -882, 1644],
    [75, 1589, -1103, -1099],
    [-53, -1042, -1848, 1505],
    [5, -5715, -920, 5254],
    [-5, 4827, -379, -3232],
    [-120, 1494, -1979, 1285],
];

pub fn f4_witnesses(sign: Sign) -> Vec<Vec<Rat>> {
    F4_PLUS_REPS_MILLI
        .iter()
        .map(|m| {
            let mut v: Vec<Rat> = m.iter().map(|&x| rat(x, 1000)).collect();
            if sign == Sign::Minus {
                v[0] = -v[0].clone();
                v[3] = -v[3].clone();
            }
            v
        })
        .collect()
}

/// All admissible (p, q) keys for a B/C class.
pub fn admissible_pq(k: usize) -> Vec<(usize, usize)> {
    let mut out = vec![];
    for p in 0..=k {
        for q in 0..=k - p {
            if (k - p - q) % 2 == 0 {
                out.push((p, q));
            }
        }
    }
    out.sort();
    out
}

pub fn sample_lambda<R: Rng>(class: Class, rng: &mut R) -> Vec<Rat> {
    let weights = class.lambda_weights();
    // amplitude 2^a, a in [-6, 2]: small amplitudes shrink high-weight
    // coordinates fastest, walking the quasi-homogeneous cone
    let a: f64 = rng.gen_range(-6.0..2.0);
    let amp = 2f64.powf(a);
    weights
        .iter()
        .map(|w| {
            let u: f64 = rng.gen_range(-2.5..2.5);
            let v = u / w.max(0.15) * amp.powf(*w);
            rat((v * 1e6).round() as i64, 1_000_000)
        })
        .collect()
}

/// Run the census for one class: deterministic witnesses first (full
/// coverage), then `budget` random samples to populate the records.
pub fn census(class: Class, budget: usize, seed: u64) -> Result<CensusReport, AtlasError> {
    let (expected_components, expected_lacunas) = expected_counts(class);
    let mut records: BTreeMap<ComponentSignature, AtlasRecord> = BTreeMap::new();
    let mut add = |lambda: Vec<Rat>, constructed: bool| -> Result<(), AtlasError> {
        let topo = level_topology(class, &lambda)?;
        let sig = signature_of_topology(&topo);
        let lac = is_lacuna(&topo);
        match records.get_mut(&sig) {
            Some(rec) => {
                if rec.is_lacuna != lac {
                    return Err(AtlasError::SignatureMismatch {
                        class,
                        detail: format!(
                            "signature {sig} produced conflicting lacuna verdicts"
                        ),
                    });
                }
                if constructed {
                    rec.constructed = true;
                    rec.witness = lambda;
                } else {
                    rec.population += 1;
                }
            }
            None => {
                records.insert(
                    sig.clone(),
                    AtlasRecord {
                        signature_label: sig.to_string(),
                        signature: sig,
                        witness: lambda,
                        is_lacuna: lac,
                        population: usize::from(!constructed),
                        constructed,
                    },
                );
            }
        }
        Ok(())
    };
    match class {
        Class::B { k, .. } | Class::C { k, .. } => {
            for (p, q) in admissible_pq(k) {
                add(pq_witness(class, p, q)?, true)?;
            }
        }
        Class::F4 { sign } => {
            for w in f4_witnesses(sign) {
                add(w, true)?;
            }
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ class_hash(class));
    let mut accepted = 0usize;
    let mut tries = 0usize;
    while accepted < budget && tries < budget * 50 {
        tries += 1;
        let lambda = sample_lambda(class, &mut rng);
        if crate::families::on_wall(class, &lambda)? {
            continue;
        }
        match level_topology(class, &lambda) {
            Ok(_) => {}
            Err(FamilyError::ProjectionDegeneracy) => continue,
            Err(e) => return Err(e.into()),
        }
        add(lambda, false)?;
        accepted += 1;
    }
    let component_count = records.len();
    let lacuna_count = records.values().filter(|r| r.is_lacuna).count();
    if component_count > expected_components {
        return Err(AtlasError::SignatureMismatch {
            class,
            detail: format!(
                "observed {component_count} signatures, expected at most {expected_components}: {:?}",
                records.keys().map(|s| s.to_string()).collect::<Vec<_>>()
            ),
        });
    }
    let complete = component_count == expected_components;
    if !complete {
        return Err(AtlasError::InsufficientSampling {
            class,
            found: component_count,
            expected: expected_components,
            budget,
        });
    }
    if lacuna_count != expected_lacunas {
        return Err(AtlasError::CountMismatch {
            class,
            got_components: component_count,
            got_lacunas: lacuna_count,
            expected_components,
            expected_lacunas,
        });
    }
    Ok(CensusReport {
        class,
        class_label: class.to_string(),
        seed,
        budget,
        component_count,
        lacuna_count,
        expected_components,
        expected_lacunas,
        complete,
        records: records.into_values().collect(),
    })
}

fn class_hash(class: Class) -> u64 {
    let mut h = Sha256::new();
    h.update(class.to_string().as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().unwrap())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabilizedRecord {
    pub signature_label: String,
    pub is_lacuna: bool,
    pub component_count: usize,
    pub all_meet_boundary: bool,
    pub empty: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabilizedCensusReport {
    pub class_label: String,
    pub r: usize,
    pub s: usize,
    pub component_count: usize,
    pub lacuna_count: usize,
    pub expected_lacunas: usize,
    pub records: Vec<StabilizedRecord>,
}

/// Stabilized lacuna count over the deterministic witnesses of the census.
pub fn stabilized_census(
    class: Class,
    r: usize,
    s: usize,
) -> Result<StabilizedCensusReport, AtlasError> {
    let base = census(class, 0, 0)?;
    let mut records = vec![];
    for rec in &base.records {
        let st = stabilized_topology(class, &rec.witness, r, s)?;
        let lac = st.is_empty() || st.all_meet_boundary();
        records.push(StabilizedRecord {
            signature_label: rec.signature_label.clone(),
            is_lacuna: lac,
            component_count: st.components.len(),
            all_meet_boundary: st.all_meet_boundary(),
            empty: st.is_empty(),
        });
    }
    let lacuna_count = records.iter().filter(|r| r.is_lacuna).count();
    let expected = expected_stabilized_lacunas(class, r, s);
    if lacuna_count != expected {
        return Err(AtlasError::CountMismatch {
            class,
            got_components: records.len(),
            got_lacunas: lacuna_count,
            expected_components: base.expected_components,
            expected_lacunas: expected,
        });
    }
    Ok(StabilizedCensusReport {
        class_label: class.to_string(),
        r,
        s,
        component_count: records.len(),
        lacuna_count,
        expected_lacunas: expected,
        records,
    })
}

/// Content-addressed on-disk cache for census reports, keyed by
/// (class, seed, budget).
pub fn census_cached(
    class: Class,
    budget: usize,
    seed: u64,
    cache_dir: &std::path::Path,
) -> Result<CensusReport, AtlasError> {
    let key = format!("census:{class}:{seed}:{budget}");
    let mut h = Sha256::new();
    h.update(key.as_bytes());
    let name = format!("{:x}.json", h.finalize());
    let path = cache_dir.join(name);
    if path.exists() {
        let data = std::fs::read_to_string(&path)?;
        let rep: CensusReport = serde_json::from_str(&data)?;
        return Ok(rep);
    }
    let rep = census(class, budget, seed)?;
    std::fs::create_dir_all(cache_dir)?;
    std::fs::write(&path, serde_json::to_string_pretty(&rep)?)?;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(s: &str) -> Class {
        s.parse().unwrap()
    }

    #[test]
    fn signature_examples() {
        // B2+, p = x^2 - 1
        let lam = vec![rat_i(-1), rat_i(0)];
        let sig = signature_of(class("B2+"), &lam).unwrap();
        assert_eq!(sig, ComponentSignature::PQ { p: 1, q: 1 });
        assert!(is_lacuna_at(class("B2+"), &lam).unwrap());
        // C2+, g = y^2 - 1
        let sig = signature_of(class("C2+"), &lam).unwrap();
        assert_eq!(sig, ComponentSignature::PQ { p: 1, q: 1 });
        assert!(is_lacuna_at(class("C2+"), &lam).unwrap());
        // C2+, g = y^2 + 1: two components, neither meets S
        let lam = vec![rat_i(1), rat_i(0)];
        assert!(!is_lacuna_at(class("C2+"), &lam).unwrap());
        // B2+, p = x^2 + 1: empty
        assert!(is_lacuna_at(class("B2+"), &lam).unwrap());
    }

    #[test]
    fn f4_nonlacuna_signature_shape() {
        let w = f4_witnesses(Sign::Plus);
        // pattern B rep: oval missing S next to a noncompact piece on S
        let sig = signature_of(class("F4+"), &w[1]).unwrap();
        match sig {
            ComponentSignature::F4 { boundary_roots, components, .. } => {
                assert_eq!(boundary_roots, 1);
                assert_eq!(components, vec![(false, true), (true, false)]);
            }
            _ => panic!("wrong signature kind"),
        }
        assert!(!is_lacuna_at(class("F4+"), &w[1]).unwrap());
    }

    #[test]
    fn expected_table() {
        assert_eq!(expected_counts(class("B4+")), (9, 2));
        assert_eq!(expected_counts(class("B4-")), (9, 1));
        assert_eq!(expected_counts(class("B5+")), (12, 1));
        assert_eq!(expected_counts(class("C5+")), (12, 6));
        assert_eq!(expected_counts(class("C4-")), (9, 4));
        assert_eq!(expected_counts(class("F4-")), (8, 4));
    }

    #[test]
    fn pq_witness_roundtrip_all() {
        for k in 2..=6 {
            for sgn in ['+', '-'] {
                for fam in ['B', 'C'] {
                    let c = class(&format!("{fam}{k}{sgn}"));
                    for (p, q) in admissible_pq(k) {
                        let lam = pq_witness(c, p, q).unwrap();
                        assert_eq!(
                            signature_of(c, &lam).unwrap(),
                            ComponentSignature::PQ { p, q },
                            "{c} ({p},{q})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn census_small_classes() {
        let rep = census(class("B4+"), 200, 7).unwrap();
        assert_eq!(rep.component_count, 9);
        assert_eq!(rep.lacuna_count, 2);
        let lac: Vec<&str> = rep
            .records
            .iter()
            .filter(|r| r.is_lacuna)
            .map(|r| r.signature_label.as_str())
            .collect();
        assert_eq!(lac, vec!["(0,0)", "(1,1)"]);
        let rep = census(class("C5-"), 200, 7).unwrap();
        assert_eq!((rep.component_count, rep.lacuna_count), (12, 6));
        // C lacunas are exactly { (p,q) : p,q >= 1 }
        for r in &rep.records {
            if let ComponentSignature::PQ { p, q } = r.signature {
                assert_eq!(r.is_lacuna, p >= 1 && q >= 1);
            }
        }
        let rep = census(class("F4+"), 400, 7).unwrap();
        assert_eq!((rep.component_count, rep.lacuna_count), (8, 4));
        let rep = census(class("F4-"), 400, 7).unwrap();
        assert_eq!((rep.component_count, rep.lacuna_count), (8, 4));
    }

    #[test]
    fn b_odd_single_lacuna_identified() {
        // the paper reports one lacuna for B_{2k+1} without naming it; the
        // census pins it to (1,0) for plus and (0,1) for minus
        for k in [3usize, 5] {
            let rep = census(Class::B { k, sign: Sign::Plus }, 0, 0).unwrap();
            let lac: Vec<_> = rep.records.iter().filter(|r| r.is_lacuna).collect();
            assert_eq!(lac.len(), 1);
            assert_eq!(lac[0].signature, ComponentSignature::PQ { p: 1, q: 0 });
            let rep = census(Class::B { k, sign: Sign::Minus }, 0, 0).unwrap();
            let lac: Vec<_> = rep.records.iter().filter(|r| r.is_lacuna).collect();
            assert_eq!(lac[0].signature, ComponentSignature::PQ { p: 0, q: 1 });
        }
    }

    #[test]
    fn stabilized_census_examples() {
        let rep = stabilized_census(class("B4+"), 2, 0).unwrap();
        assert_eq!(rep.lacuna_count, 2);
        let rep = stabilized_census(class("C5+"), 3, 0).unwrap();
        assert_eq!(rep.lacuna_count, 9);
        let rep = stabilized_census(class("C4+"), 1, 1).unwrap();
        assert_eq!(rep.lacuna_count, 9);
        assert_eq!(rep.component_count, 9);
    }

    #[test]
    fn census_cache_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let a = census_cached(class("B3+"), 50, 3, dir.path()).unwrap();
        let b = census_cached(class("B3+"), 50, 3, dir.path()).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
