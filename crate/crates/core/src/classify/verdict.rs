use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::report::float_repr;

/// Function spaces on which `C_φ` is analysed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpaceTag {
    /// `C^m(ℝ)`; `None` is `C^∞(ℝ)`.
    C(Option<u32>),
    /// `𝒪^m(ℝ)`.
    Om(u32),
    /// `𝒪_M(ℝ)`.
    OM,
    Schwartz,
    /// Real-analytic functions `𝒜(ℝ)`.
    Analytic,
}

impl SpaceTag {
    /// Smoothness order carried by the space; `None` for infinitely smooth.
    pub fn order(self) -> Option<u32> {
        match self {
            SpaceTag::C(m) => m,
            SpaceTag::Om(m) => Some(m),
            SpaceTag::OM | SpaceTag::Schwartz | SpaceTag::Analytic => None,
        }
    }

    pub fn is_continuous_only(self) -> bool {
        self == SpaceTag::C(Some(0))
    }

    pub fn is_polynomially_weighted(self) -> bool {
        matches!(self, SpaceTag::Om(_) | SpaceTag::OM)
    }
}

impl fmt::Display for SpaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceTag::C(None) => f.write_str("cinf"),
            SpaceTag::C(Some(m)) => write!(f, "c{m}"),
            SpaceTag::Om(m) => write!(f, "om:{m}"),
            SpaceTag::OM => f.write_str("oM"),
            SpaceTag::Schwartz => f.write_str("schwartz"),
            SpaceTag::Analytic => f.write_str("analytic"),
        }
    }
}

impl FromStr for SpaceTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::InvalidArgument(format!("unknown space `{s}`; expected c0, c1, cinf, om:<m>, oM, schwartz or analytic"));
        match s {
            "cinf" => Ok(SpaceTag::C(None)),
            "oM" => Ok(SpaceTag::OM),
            "schwartz" => Ok(SpaceTag::Schwartz),
            "analytic" => Ok(SpaceTag::Analytic),
            _ => {
                if let Some(m) = s.strip_prefix("om:") {
                    m.parse().map(SpaceTag::Om).map_err(|_| bad())
                } else if let Some(m) = s.strip_prefix('c') {
                    m.parse().map(|m| SpaceTag::C(Some(m))).map_err(|_| bad())
                } else {
                    Err(bad())
                }
            }
        }
    }
}

impl Serialize for SpaceTag {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SpaceTag {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "name", content = "space", rename_all = "snake_case")]
pub enum Property {
    PowerBounded,
    MeanErgodic,
    IterateConvergence,
    StronglyRunaway,
    Supercyclic,
    WeaklySupercyclic,
    Mixing,
    SymbolFor(SpaceTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    ProvenTrue,
    ProvenFalse,
    EmpiricalTrue,
    EmpiricalFalse,
    Inconclusive,
}

impl Status {
    pub fn is_proven(self) -> bool {
        matches!(self, Status::ProvenTrue | Status::ProvenFalse)
    }

    /// `Some(true)` for the two true statuses, `Some(false)` for the false ones.
    pub fn truth(self) -> Option<bool> {
        match self {
            Status::ProvenTrue | Status::EmpiricalTrue => Some(true),
            Status::ProvenFalse | Status::EmpiricalFalse => Some(false),
            Status::Inconclusive => None,
        }
    }
}

/// What a status rests on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Exact reasoning on a recognized affine or polynomial symbol.
    StructuralFamily,
    /// An exact rule applied to a certified numerical fact, such as a
    /// bracketed root.
    CertifiedRule,
    GridEvidence,
}

/// Fixed table of rule tags a verdict may cite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Citation {
    #[serde(rename = "polynomial-pb-me")]
    PolynomialPbMe,
    #[serde(rename = "fixed-point-obstruction")]
    FixedPointObstruction,
    #[serde(rename = "supercyclic-profile-c0")]
    SupercyclicProfileC0,
    #[serde(rename = "weakly-supercyclic-profile")]
    WeaklySupercyclicProfile,
    #[serde(rename = "mixing-equivalence-cm")]
    MixingEquivalenceCm,
    #[serde(rename = "mixing-equivalence-c0")]
    MixingEquivalenceC0,
    #[serde(rename = "mixing-analytic")]
    MixingAnalytic,
    #[serde(rename = "translation-mixing-om")]
    TranslationMixingOm,
    #[serde(rename = "mixing-open-problem-om")]
    MixingOpenProblemOm,
    #[serde(rename = "iterates-bounded-om")]
    IteratesBoundedOm,
    #[serde(rename = "iterates-bounded-oM")]
    IteratesBoundedOM,
    #[serde(rename = "iterates-bounded-cm")]
    IteratesBoundedCm,
    #[serde(rename = "monotone-attracting-fixed-point")]
    MonotoneAttractingFixedPoint,
    #[serde(rename = "mean-ergodic-iterates-over-n")]
    MeanErgodicIteratesOverN,
    #[serde(rename = "mean-ergodic-escape-tail")]
    MeanErgodicEscapeTail,
    #[serde(rename = "mean-ergodic-single-fixed-point")]
    MeanErgodicSingleFixedPoint,
    #[serde(rename = "schwartz-symbol-conditions")]
    SchwartzSymbolConditions,
    #[serde(rename = "schwartz-power-bounded-conditions")]
    SchwartzPowerBoundedConditions,
    #[serde(rename = "symbol-membership-om")]
    SymbolMembershipOm,
    #[serde(rename = "strongly-runaway-increasing")]
    StronglyRunawayIncreasing,
    #[serde(rename = "empirical")]
    Empirical,
}

impl Citation {
    pub const ALL: [Citation; 21] = [
        Citation::PolynomialPbMe,
        Citation::FixedPointObstruction,
        Citation::SupercyclicProfileC0,
        Citation::WeaklySupercyclicProfile,
        Citation::MixingEquivalenceCm,
        Citation::MixingEquivalenceC0,
        Citation::MixingAnalytic,
        Citation::TranslationMixingOm,
        Citation::MixingOpenProblemOm,
        Citation::IteratesBoundedOm,
        Citation::IteratesBoundedOM,
        Citation::IteratesBoundedCm,
        Citation::MonotoneAttractingFixedPoint,
        Citation::MeanErgodicIteratesOverN,
        Citation::MeanErgodicEscapeTail,
        Citation::MeanErgodicSingleFixedPoint,
        Citation::SchwartzSymbolConditions,
        Citation::SchwartzPowerBoundedConditions,
        Citation::SymbolMembershipOm,
        Citation::StronglyRunawayIncreasing,
        Citation::Empirical,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Citation::PolynomialPbMe => "polynomial-pb-me",
            Citation::FixedPointObstruction => "fixed-point-obstruction",
            Citation::SupercyclicProfileC0 => "supercyclic-profile-c0",
            Citation::WeaklySupercyclicProfile => "weakly-supercyclic-profile",
            Citation::MixingEquivalenceCm => "mixing-equivalence-cm",
            Citation::MixingEquivalenceC0 => "mixing-equivalence-c0",
            Citation::MixingAnalytic => "mixing-analytic",
            Citation::TranslationMixingOm => "translation-mixing-om",
            Citation::MixingOpenProblemOm => "mixing-open-problem-om",
            Citation::IteratesBoundedOm => "iterates-bounded-om",
            Citation::IteratesBoundedOM => "iterates-bounded-oM",
            Citation::IteratesBoundedCm => "iterates-bounded-cm",
            Citation::MonotoneAttractingFixedPoint => "monotone-attracting-fixed-point",
            Citation::MeanErgodicIteratesOverN => "mean-ergodic-iterates-over-n",
            Citation::MeanErgodicEscapeTail => "mean-ergodic-escape-tail",
            Citation::MeanErgodicSingleFixedPoint => "mean-ergodic-single-fixed-point",
            Citation::SchwartzSymbolConditions => "schwartz-symbol-conditions",
            Citation::SchwartzPowerBoundedConditions => "schwartz-power-bounded-conditions",
            Citation::SymbolMembershipOm => "symbol-membership-om",
            Citation::StronglyRunawayIncreasing => "strongly-runaway-increasing",
            Citation::Empirical => "empirical",
        }
    }

    /// One-line statement of the rule behind the tag.
    pub fn statement(self) -> &'static str {
        match self {
            Citation::PolynomialPbMe => {
                "for polynomial φ, C_φ is power bounded iff mean ergodic iff φ = ax+b with |a|<1, a=-1, or a=1 and b=0"
            }
            Citation::FixedPointObstruction => {
                "if φ(a)=a or φ'(a)=0 for some a then C_φ is not weakly supercyclic on spaces inside C^1"
            }
            Citation::SupercyclicProfileC0 => {
                "on C(ℝ), C_φ weakly supercyclic forces φ injective, monotone and fixed-point free"
            }
            Citation::WeaklySupercyclicProfile => {
                "φ strongly runaway with φ'>0 makes C_φ weakly supercyclic and mixing on C^m"
            }
            Citation::MixingEquivalenceCm => "on C^m(ℝ), m>=1, weak supercyclicity of C_φ is equivalent to mixing",
            Citation::MixingEquivalenceC0 => "on C(ℝ), weak supercyclicity of C_φ is equivalent to mixing",
            Citation::MixingAnalytic => "on 𝒜(ℝ), mixing rules reuse the smooth criteria",
            Citation::TranslationMixingOm => "translations x+d, d≠0, induce mixing operators on 𝒪^m(ℝ) and 𝒪_M(ℝ)",
            Citation::MixingOpenProblemOm => {
                "whether C_φ is mixing on 𝒪^m or 𝒪_M for general runaway φ with φ'>0 is open"
            }
            Citation::IteratesBoundedOm => "C_φ power bounded on 𝒪^m iff |φ_n^(i)(x)| <= C(1+x²)^p uniformly in n",
            Citation::IteratesBoundedOM => "C_φ power bounded on 𝒪_M iff the 𝒪^m conditions hold for every m",
            Citation::IteratesBoundedCm => "C_φ power bounded on C^m iff {φ_n} is bounded in C^m(ℝ)",
            Citation::MonotoneAttractingFixedPoint => {
                "for monotone φ, C_φ is power bounded iff φ has an attracting fixed point a and C_{φ_n} -> C_a"
            }
            Citation::MeanErgodicIteratesOverN => "C_φ mean ergodic forces φ_n/n -> 0",
            Citation::MeanErgodicEscapeTail => "φ(x)-x bounded away from 0 on a monotone tail rules out mean ergodicity",
            Citation::MeanErgodicSingleFixedPoint => "for non-decreasing φ, mean ergodicity forces Fix(φ) to be a single point",
            Citation::SchwartzSymbolConditions => {
                "φ is a symbol for 𝒮 iff |φ^(j)| <= C(1+φ²)^p and |φ(x)| >= |x|^(1/k) for |x| >= k"
            }
            Citation::SchwartzPowerBoundedConditions => {
                "C_φ power bounded on 𝒮 iff the symbol conditions hold for all φ_n uniformly in n"
            }
            Citation::SymbolMembershipOm => "φ ∈ 𝒪^m iff |φ^(i)(x)| <= C(1+x²)^p for i <= m",
            Citation::StronglyRunawayIncreasing => {
                "increasing φ is strongly runaway iff it has no fixed point; images of K are [φ_n(a), φ_n(b)]"
            }
            Citation::Empirical => "grid evidence only",
        }
    }
}

impl fmt::Display for Citation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub description: String,
    #[serde(with = "float_repr")]
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub property: Property,
    pub status: Status,
    pub citation: Citation,
    pub provenance: Provenance,
    pub witnesses: Vec<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Verdict {
    /// Builds a verdict, demoting `Proven*` to the matching empirical status
    /// when the provenance is grid evidence.
    pub fn new(property: Property, status: Status, citation: Citation, provenance: Provenance) -> Self {
        let status = match (status, provenance) {
            (Status::ProvenTrue, Provenance::GridEvidence) => Status::EmpiricalTrue,
            (Status::ProvenFalse, Provenance::GridEvidence) => Status::EmpiricalFalse,
            (s, _) => s,
        };
        Verdict { property, status, citation, provenance, witnesses: Vec::new(), note: None }
    }

    pub fn proven(property: Property, truth: bool, citation: Citation, provenance: Provenance) -> Self {
        let status = if truth { Status::ProvenTrue } else { Status::ProvenFalse };
        Verdict::new(property, status, citation, provenance)
    }

    pub fn empirical(property: Property, truth: bool, citation: Citation) -> Self {
        let status = if truth { Status::EmpiricalTrue } else { Status::EmpiricalFalse };
        Verdict::new(property, status, citation, Provenance::GridEvidence)
    }

    pub fn inconclusive(property: Property, citation: Citation) -> Self {
        Verdict::new(property, Status::Inconclusive, citation, Provenance::GridEvidence)
    }

    pub fn with(mut self, description: impl Into<String>, value: f64) -> Self {
        self.witnesses.push(Witness { description: description.into(), value });
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// No proven status rests on grid evidence.
    pub fn is_sound(&self) -> bool {
        !(self.status.is_proven() && self.provenance == Provenance::GridEvidence)
    }

    pub fn witness(&self, description: &str) -> Option<f64> {
        self.witnesses.iter().find(|w| w.description == description).map(|w| w.value)
    }
}

/// Sorts verdicts by property, keeping the insertion order of equal ones.
pub fn sort_verdicts(verdicts: &mut [Verdict]) {
    verdicts.sort_by_key(|v| v.property);
}
