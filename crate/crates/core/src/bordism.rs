//! Integral bordism ranks over `Z₂` and the crystal classification built on
//! them.
//!
//! All groups involved are elementary abelian 2-groups, so a group is its
//! `Z₂`-rank and `Ω_p ≅ ⊕_{r+s=p} H_r(M; Z₂) ⊗ Ω_s` reduces to
//! `rank = Σ_{r+s=p} h_r·ω_s`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `(Z₂)^rank`; rank 0 is the trivial group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Z2Group {
    pub rank: u64,
}

impl Z2Group {
    pub const TRIVIAL: Z2Group = Z2Group { rank: 0 };

    pub fn new(rank: u64) -> Self {
        Self { rank }
    }

    pub fn is_trivial(self) -> bool {
        self.rank == 0
    }

    pub fn direct_sum(self, other: Self) -> Self {
        Self::new(self.rank + other.rank)
    }
}

impl fmt::Display for Z2Group {
    /// `Z2^k`, including `Z2^0` for the trivial group.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z2^{}", self.rank)
    }
}

/// Entry `r` is the rank of `H_r(M; Z₂)`. Degrees past the end are zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyTable {
    pub name: String,
    #[serde(rename = "h")]
    pub z2_ranks: Vec<u64>,
}

impl HomologyTable {
    pub fn new(name: impl Into<String>, z2_ranks: Vec<u64>) -> Result<Self> {
        match z2_ranks.first() {
            Some(&h0) if h0 >= 1 => Ok(Self { name: name.into(), z2_ranks }),
            _ => Err(Error::InvalidInput("a nonempty manifold has h_0 ≥ 1".into())),
        }
    }

    pub fn rank(&self, r: usize) -> u64 {
        self.z2_ranks.get(r).copied().unwrap_or(0)
    }

    /// The table of a disjoint union.
    pub fn disjoint_union(&self, other: &Self) -> Self {
        let len = self.z2_ranks.len().max(other.z2_ranks.len());
        Self {
            name: format!("{} + {}", self.name, other.name),
            z2_ranks: (0..len).map(|r| self.rank(r) + other.rank(r)).collect(),
        }
    }
}

/// Entry `s` is the `Z₂`-rank of the coefficient group `Ω_s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BordismCoefficients {
    pub z2_ranks: Vec<u64>,
}

impl BordismCoefficients {
    pub fn new(z2_ranks: Vec<u64>) -> Result<Self> {
        if z2_ranks.first() != Some(&1) {
            return Err(Error::InvalidInput("coefficient table must start with ω₀ = 1".into()));
        }
        Ok(Self { z2_ranks })
    }

    pub fn rank(&self, s: usize) -> Result<u64> {
        self.z2_ranks
            .get(s)
            .copied()
            .ok_or(Error::TableTooShort { table: "coefficient", degree: s })
    }
}

impl Default for BordismCoefficients {
    fn default() -> Self {
        default_coefficients()
    }
}

/// Shipped table for `s = 0..7`. Only `ω₇ = 1` is fixed by the theory used
/// here; `ω₀ = 1` is forced, `ω₁ = 0` and `ω₂ = 1` are what the torus and
/// `ℝP³` instances require, and the rest is placeholder data.
pub fn default_coefficients() -> BordismCoefficients {
    BordismCoefficients { z2_ranks: vec![1, 0, 1, 0, 2, 1, 3, 1] }
}

/// `rank Ω_p = Σ_{r+s=p} h_r·ω_s`.
pub fn integral_bordism(p: usize, homology: &HomologyTable, coeffs: &BordismCoefficients) -> Result<Z2Group> {
    let mut rank: u64 = 0;
    for r in 0..=p {
        let h = homology.rank(r);
        if h == 0 {
            continue;
        }
        let w = coeffs.rank(p - r)?;
        rank = h
            .checked_mul(w)
            .and_then(|t| rank.checked_add(t))
            .ok_or_else(|| Error::Overflow(format!("bordism rank in degree {p}")))?;
    }
    Ok(Z2Group::new(rank))
}

/// Kernel `K` of a short exact sequence `0 → K → total → quotient → 0`.
pub fn short_exact_kernel(total: Z2Group, quotient: Z2Group) -> Result<Z2Group> {
    total
        .rank
        .checked_sub(quotient.rank)
        .map(Z2Group::new)
        .ok_or_else(|| Error::Inconsistent(format!("quotient {quotient} is larger than {total}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Admissibility {
    #[default]
    None,
    HomotopySphereFull,
    SphereFull,
}

impl Admissibility {
    pub fn is_full(self) -> bool {
        !matches!(self, Admissibility::None)
    }
}

impl std::str::FromStr for Admissibility {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "homotopy-sphere-full" => Ok(Self::HomotopySphereFull),
            "sphere-full" => Ok(Self::SphereFull),
            other => Err(Error::InvalidInput(format!(
                "unknown hypothesis `{other}` (expected none, homotopy-sphere-full or sphere-full)"
            ))),
        }
    }
}

/// Under a full admissibility hypothesis every admissible Cauchy datum lies in
/// one bordism class, so the group collapses.
pub fn apply_admissibility(group: Z2Group, hypothesis: Admissibility) -> Z2Group {
    if hypothesis.is_full() {
        Z2Group::TRIVIAL
    } else {
        group
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationVerdict {
    pub extended_crystal: bool,
    pub extended_0_crystal: bool,
    pub zero_crystal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crystal_group_label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crystal_dimension: Option<u32>,
}

/// Known crystal groups by manifold label.
pub const CRYSTAL_LOOKUP: &[(&str, &str, u32)] = &[("torus-2d", "p4m", 2), ("rp3-3d", "p4m", 2)];

/// `n` is kept for the record; the verdict depends only on the group, the
/// obstruction flag and the lookup.
pub fn classify(_n: usize, bordism: Z2Group, obstruction_zero: bool, known_group: Option<&str>) -> ClassificationVerdict {
    let extended_0_crystal = bordism.is_trivial();
    let hit = known_group.and_then(|k| CRYSTAL_LOOKUP.iter().find(|(name, _, _)| *name == k));
    ClassificationVerdict {
        extended_crystal: true,
        extended_0_crystal,
        zero_crystal: extended_0_crystal && obstruction_zero,
        crystal_group_label: hit.map(|(_, g, _)| g.to_string()),
        crystal_dimension: hit.map(|(_, _, d)| *d),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttractorVerdict {
    SingularGlobalAttractor,
    SmoothGlobalAttractor,
    None,
}

pub fn attractor_verdict(hypothesis: Admissibility) -> AttractorVerdict {
    match hypothesis {
        Admissibility::HomotopySphereFull => AttractorVerdict::SingularGlobalAttractor,
        Admissibility::SphereFull => AttractorVerdict::SmoothGlobalAttractor,
        Admissibility::None => AttractorVerdict::None,
    }
}

/// A shipped manifold with the data its bordism workflow needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifoldPreset {
    pub key: &'static str,
    pub homology: HomologyTable,
    pub n: usize,
    pub obstruction_zero: bool,
    pub known_group: Option<&'static str>,
}

pub const PRESET_KEYS: [&str; 4] = ["r2", "r8", "torus2", "rp3"];

pub fn preset(key: &str) -> Result<ManifoldPreset> {
    let (name, h, n, obstruction_zero, known_group): (&str, Vec<u64>, usize, bool, Option<&'static str>) = match key {
        "r2" => ("R^2", vec![1, 0, 0], 2, true, None),
        "r8" => ("R^8", vec![1, 0, 0, 0, 0, 0, 0, 0], 8, true, None),
        "torus2" => ("T^2", vec![1, 2, 1], 2, false, Some("torus-2d")),
        "rp3" => ("RP^3", vec![1, 1, 1, 1], 3, false, Some("rp3-3d")),
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown preset `{other}` (expected one of {})",
                PRESET_KEYS.join(", ")
            )))
        }
    };
    Ok(ManifoldPreset {
        key: PRESET_KEYS.iter().find(|k| **k == key).expect("matched above"),
        homology: HomologyTable::new(name, h)?,
        n,
        obstruction_zero,
        known_group,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(h: &[u64]) -> HomologyTable {
        HomologyTable::new("M", h.to_vec()).unwrap()
    }

    #[test]
    fn fixtures() {
        let c = default_coefficients();
        assert_eq!(integral_bordism(1, &table(&[1, 2, 1]), &c).unwrap(), Z2Group::new(2));
        assert_eq!(integral_bordism(2, &table(&[1, 1, 1, 1]), &c).unwrap(), Z2Group::new(2));
        assert_eq!(integral_bordism(7, &table(&[1, 0, 0, 0, 0, 0, 0, 0]), &c).unwrap(), Z2Group::new(1));
        assert_eq!(integral_bordism(1, &table(&[1, 0]), &c).unwrap(), Z2Group::TRIVIAL);
    }

    #[test]
    fn default_table() {
        let c = default_coefficients();
        assert_eq!(c.rank(0).unwrap(), 1);
        assert_eq!(c.rank(1).unwrap(), 0);
        assert_eq!(c.rank(7).unwrap(), 1);
        assert_eq!(c.z2_ranks.len(), 8);
    }

    #[test]
    fn short_table_names_degree() {
        let c = BordismCoefficients::new(vec![1, 0]).unwrap();
        let err = integral_bordism(3, &table(&[1]), &c).unwrap_err();
        assert_eq!(err, Error::TableTooShort { table: "coefficient", degree: 3 });
        assert!(BordismCoefficients::new(vec![0, 1]).is_err());
        assert!(HomologyTable::new("empty", vec![]).is_err());
    }

    #[test]
    fn kernels() {
        assert_eq!(short_exact_kernel(Z2Group::new(1), Z2Group::TRIVIAL).unwrap(), Z2Group::new(1));
        assert_eq!(short_exact_kernel(Z2Group::new(2), Z2Group::new(2)).unwrap(), Z2Group::TRIVIAL);
        assert_eq!(short_exact_kernel(Z2Group::new(3), Z2Group::new(1)).unwrap(), Z2Group::new(2));
        assert!(matches!(
            short_exact_kernel(Z2Group::new(1), Z2Group::new(2)),
            Err(Error::Inconsistent(_))
        ));
    }

    #[test]
    fn admissibility() {
        use Admissibility::*;
        assert_eq!(apply_admissibility(Z2Group::new(1), HomotopySphereFull), Z2Group::TRIVIAL);
        for h in [None, HomotopySphereFull, SphereFull] {
            assert_eq!(apply_admissibility(Z2Group::TRIVIAL, h), Z2Group::TRIVIAL);
        }
        assert_eq!(apply_admissibility(Z2Group::new(2), None), Z2Group::new(2));
        assert_eq!("sphere-full".parse::<Admissibility>().unwrap(), SphereFull);
        assert!("full".parse::<Admissibility>().is_err());
    }

    #[test]
    fn classification_cases() {
        let v = classify(2, Z2Group::TRIVIAL, true, None);
        assert!(v.extended_0_crystal && v.zero_crystal);
        assert_eq!(v.crystal_group_label, Option::None);

        let v = classify(2, Z2Group::new(2), false, Some("torus-2d"));
        assert!(v.extended_crystal && !v.extended_0_crystal && !v.zero_crystal);
        assert_eq!(v.crystal_group_label.as_deref(), Some("p4m"));
        assert_eq!(v.crystal_dimension, Some(2));

        let r8 = preset("r8").unwrap();
        let g = integral_bordism(7, &r8.homology, &default_coefficients()).unwrap();
        let g = apply_admissibility(g, Admissibility::HomotopySphereFull);
        let v = classify(8, g, r8.obstruction_zero, r8.known_group);
        assert!(v.extended_0_crystal && v.zero_crystal);

        // the two flags are independent inputs
        let v = classify(3, Z2Group::TRIVIAL, false, None);
        assert!(v.extended_0_crystal && !v.zero_crystal);
    }

    #[test]
    fn attractors() {
        assert_eq!(attractor_verdict(Admissibility::HomotopySphereFull), AttractorVerdict::SingularGlobalAttractor);
        assert_eq!(attractor_verdict(Admissibility::SphereFull), AttractorVerdict::SmoothGlobalAttractor);
        assert_eq!(attractor_verdict(Admissibility::None), AttractorVerdict::None);
    }

    #[test]
    fn group_strings() {
        assert_eq!(Z2Group::new(2).to_string(), "Z2^2");
        assert_eq!(Z2Group::TRIVIAL.to_string(), "Z2^0");
    }

    #[test]
    fn presets() {
        for key in PRESET_KEYS {
            assert_eq!(preset(key).unwrap().key, key);
        }
        assert!(preset("s7").is_err());
    }
}
