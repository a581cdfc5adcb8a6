//! Cruxes, covers, hereditariness and extension closure over finite families.
//!
//! A [`Family`] plays the role of the class of structures a property is
//! relative to. Every operation here enumerates induced substructures of the
//! family's hosts exhaustively, so hosts are limited to
//! [`MAX_FREE_ELEMENTS`] elements outside the constants.

mod checks;
mod family;
mod frame;

use thiserror::Error;

use crate::logic::LogicError;
use crate::report::{join_elements, Report};
use crate::structure::{Element, Structure, StructureError};

pub use checks::{
    check_duality, dominating_set_sentence, duality_sides, find_k_cruxes, is_crux,
    is_hereditary_over, is_k_ary_cover, is_k_ary_cover_in, is_k_extension_closed_over,
    is_k_hereditary_over, recheck_counterexample, witness_sets,
};
pub use family::{Family, Scope};

/// Hosts with more non-constant elements than this are rejected.
pub const MAX_FREE_ELEMENTS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PreservationError {
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("empty collection of substructures")]
    EmptyCollection,
    #[error("the base structure is not an induced substructure of the extension")]
    NotAnExtension,
    #[error("element {0} is not in the universe")]
    NotInUniverse(Element),
    #[error("host has {size} non-constant elements; at most {limit} can be enumerated")]
    HostTooLarge { size: usize, limit: usize },
    #[error("family would contain {count} structures; limit is {limit}")]
    FamilyTooLarge { count: u128, limit: u128 },
    #[error("sampling produced only {got} of {wanted} structures")]
    SamplingExhausted { got: usize, wanted: usize },
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// Cruxes of size at most `k` found in one structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CruxReport {
    pub structure_id: String,
    pub k: usize,
    /// Lexicographic order of sorted element lists; the empty set comes first.
    pub cruxes: Vec<Vec<Element>>,
    pub exhaustive: bool,
}

/// A collection of induced substructures of `host`, given by their universes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverWitness {
    pub host: Structure,
    pub members: Vec<Vec<Element>>,
    pub k: usize,
}

impl CoverWitness {
    pub fn member_structures(&self) -> Result<Vec<Structure>, StructureError> {
        self.members
            .iter()
            .map(|m| self.host.induced_substructure(m))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Counterexample {
    /// `host` is a model but its substructure on `subset` is not.
    Substructure { host: Structure, subset: Vec<Element> },
    /// `host` is a model without any crux of size at most `k`.
    NoCrux { host: Structure, k: usize },
    /// `host` is not a model although the models among its substructures cover it.
    Cover(CoverWitness),
    /// The two sides of the hereditary / extension-closed duality disagree.
    Duality {
        k_hereditary: Box<PropertyVerdict>,
        extension_closed: Box<PropertyVerdict>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyVerdict {
    pub holds: bool,
    pub counterexample: Option<Counterexample>,
    pub hosts_checked: usize,
    /// Formula evaluations. A lattice evaluates each member once; listed
    /// hosts evaluate each of their substructures.
    pub substructures_checked: u64,
    /// False when the family was sampled, so membership was not relativized.
    pub exhaustive: bool,
}

/// Text form of `s` with its universe renumbered to `1..=N` if needed, and
/// `elements` translated the same way.
fn exported(s: &Structure, elements: &[Element]) -> (String, Vec<Element>) {
    let rank = |e: Element| s.universe().binary_search(&e).map_or(e, |i| i as Element + 1);
    let text = s
        .compacted()
        .to_text()
        .expect("a compacted universe is contiguous");
    (text, elements.iter().map(|&e| rank(e)).collect())
}

impl Counterexample {
    /// Adds the counterexample under `prefix`; structures are written in the
    /// text format with universes renumbered to `1..=N`.
    pub fn write_to(&self, r: &mut Report, prefix: &str) {
        match self {
            Counterexample::Substructure { host, subset } => {
                let (text, subset) = exported(host, subset);
                r.push(format!("{prefix}.kind"), "substructure");
                r.push(format!("{prefix}.host"), text);
                r.push(format!("{prefix}.subset"), join_elements(&subset));
            }
            Counterexample::NoCrux { host, k } => {
                let (text, _) = exported(host, &[]);
                r.push(format!("{prefix}.kind"), "no-crux");
                r.push(format!("{prefix}.host"), text);
                r.push(format!("{prefix}.k"), k);
            }
            Counterexample::Cover(w) => {
                r.push(format!("{prefix}.kind"), "cover");
                let (text, _) = exported(&w.host, &[]);
                r.push(format!("{prefix}.host"), text);
                r.push(format!("{prefix}.k"), w.k);
                for m in &w.members {
                    let (_, m) = exported(&w.host, m);
                    r.push(format!("{prefix}.member"), join_elements(&m));
                }
            }
            Counterexample::Duality {
                k_hereditary,
                extension_closed,
            } => {
                r.push(format!("{prefix}.kind"), "duality");
                r.extend_prefixed(&format!("{prefix}.k_hereditary"), &k_hereditary.to_report());
                r.extend_prefixed(&format!("{prefix}.extension_closed"), &extension_closed.to_report());
            }
        }
    }
}

impl PropertyVerdict {
    pub fn to_report(&self) -> Report {
        let mut r = Report::new("property");
        r.push("holds", self.holds);
        r.push("exhaustive", self.exhaustive);
        r.push("hosts_checked", self.hosts_checked);
        r.push("substructures_checked", self.substructures_checked);
        if let Some(cx) = &self.counterexample {
            cx.write_to(&mut r, "counterexample");
        }
        r
    }
}

impl CruxReport {
    pub fn to_report(&self) -> Report {
        let mut r = Report::new("crux");
        r.push("structure", &self.structure_id);
        r.push("k", self.k);
        r.push("exhaustive", self.exhaustive);
        r.push("count", self.cruxes.len());
        for c in &self.cruxes {
            r.push("crux", join_elements(c));
        }
        r
    }
}

/// A stable identifier for a structure, derived from its contents.
pub fn structure_id(s: &Structure) -> String {
    // FNV-1a rather than the std hasher, so ids do not change between toolchains.
    let text = format!("{:?}|{:?}|{:?}", s.vocab().to_string(), s.universe(), s.constants());
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut feed = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    };
    feed(text.as_bytes());
    for r in s.relations() {
        for t in r.tuples() {
            for e in t {
                feed(&e.to_le_bytes());
            }
            feed(b";");
        }
        feed(b"|");
    }
    format!("s{h:016x}")
}
