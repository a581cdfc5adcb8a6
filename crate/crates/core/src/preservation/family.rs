use std::collections::HashSet;
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;

use crate::random::seeded;
use crate::structure::{enumerate_substructures, Element, Structure, Vocabulary};

use super::PreservationError;

/// Upper bound on the number of structures [`Family::all_structures`] will build.
pub const MAX_FAMILY_SIZE: u128 = 1 << 21;

/// Which structures count as members when a condition is relativized to the family.
#[derive(Debug, Clone)]
pub enum Scope {
    /// Every structure.
    All,
    /// Every structure with at most this many elements.
    MaxSize(usize),
    /// Exactly the listed structures (compared as labelled structures).
    Listed(HashSet<Structure>),
    /// The induced substructures of one structure.
    SubstructuresOf(Structure),
}

#[derive(Debug, Clone)]
pub(crate) enum Hosts {
    List(Vec<Structure>),
    /// Every induced substructure of the ambient structure, in lexicographic order.
    Lattice(Structure),
}

/// A finite class of structures to quantify over.
#[derive(Debug, Clone)]
pub struct Family {
    label: String,
    pub(crate) hosts: Hosts,
    scope: Scope,
    exhaustive: bool,
}

impl Family {
    /// An explicit list. Membership is the list itself when it is closed under
    /// induced substructures, and every structure otherwise.
    pub fn explicit(label: impl Into<String>, hosts: Vec<Structure>) -> Family {
        let set: HashSet<Structure> = hosts.iter().cloned().collect();
        let closed = hosts
            .iter()
            .all(|h| enumerate_substructures(h, None).all(|s| set.contains(&s)));
        Family {
            label: label.into(),
            hosts: Hosts::List(hosts),
            scope: if closed { Scope::Listed(set) } else { Scope::All },
            exhaustive: true,
        }
    }

    /// An explicit list with a caller-chosen membership scope.
    pub fn with_scope(label: impl Into<String>, hosts: Vec<Structure>, scope: Scope) -> Family {
        Family {
            label: label.into(),
            hosts: Hosts::List(hosts),
            scope,
            exhaustive: true,
        }
    }

    /// Every labelled structure over `vocab` on a universe `1..=m` with `1 <= m <= max_size`.
    pub fn all_structures(vocab: &Arc<Vocabulary>, max_size: usize) -> Result<Family, PreservationError> {
        let mut count: u128 = 0;
        for m in 1..=max_size as u128 {
            let bits: u128 = vocab.relations().iter().map(|r| m.pow(r.arity as u32)).sum();
            if bits > 64 {
                count = u128::MAX;
                break;
            }
            count = count.saturating_add((1u128 << bits).saturating_mul(m.pow(vocab.constants().len() as u32)));
        }
        if count > MAX_FAMILY_SIZE {
            return Err(PreservationError::FamilyTooLarge {
                count,
                limit: MAX_FAMILY_SIZE,
            });
        }
        let mut hosts = Vec::with_capacity(count as usize);
        for m in 1..=max_size as Element {
            all_of_size(vocab, m, &mut hosts);
        }
        Ok(Family {
            label: format!("all structures over {} with at most {max_size} elements", vocab),
            hosts: Hosts::List(hosts),
            scope: Scope::MaxSize(max_size),
            exhaustive: true,
        })
    }

    /// All induced substructures of `ambient`.
    pub fn substructure_lattice(label: impl Into<String>, ambient: Structure) -> Family {
        Family {
            label: label.into(),
            hosts: Hosts::Lattice(ambient.clone()),
            scope: Scope::SubstructuresOf(ambient),
            exhaustive: true,
        }
    }

    /// `count` structures drawn from `generate`, which may reject a draw by
    /// returning `None`. Membership is not relativized for sampled families.
    pub fn sampled(
        label: impl Into<String>,
        count: usize,
        seed: u64,
        mut generate: impl FnMut(&mut ChaCha8Rng) -> Option<Structure>,
    ) -> Result<Family, PreservationError> {
        let mut rng = seeded(seed);
        let mut hosts = Vec::with_capacity(count);
        let mut attempts = 0usize;
        while hosts.len() < count {
            if attempts >= count.saturating_mul(100).max(100) {
                return Err(PreservationError::SamplingExhausted {
                    got: hosts.len(),
                    wanted: count,
                });
            }
            attempts += 1;
            if let Some(s) = generate(&mut rng) {
                hosts.push(s);
            }
        }
        Ok(Family {
            label: label.into(),
            hosts: Hosts::List(hosts),
            scope: Scope::All,
            exhaustive: false,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn scope(&self) -> &Scope {
        &self.scope
    }

    pub fn is_exhaustive(&self) -> bool {
        self.exhaustive
    }

    pub fn len(&self) -> usize {
        match &self.hosts {
            Hosts::List(h) => h.len(),
            Hosts::Lattice(a) => {
                let free = a.size() - a.pinned().len();
                (1usize << free) - usize::from(a.pinned().is_empty())
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The hosts in order; lattice hosts are built on the fly.
    pub fn hosts(&self) -> Box<dyn Iterator<Item = Structure> + '_> {
        match &self.hosts {
            Hosts::List(h) => Box::new(h.iter().cloned()),
            Hosts::Lattice(a) => Box::new(enumerate_substructures(a, None)),
        }
    }

    /// Whether `s` belongs to the family for the purpose of relativized conditions.
    pub fn admits(&self, s: &Structure) -> bool {
        match &self.scope {
            Scope::All => true,
            Scope::MaxSize(m) => s.size() <= *m,
            Scope::Listed(set) => set.contains(s),
            Scope::SubstructuresOf(a) => s.is_substructure_of(a).unwrap_or(false),
        }
    }
}

fn all_of_size(vocab: &Arc<Vocabulary>, m: Element, out: &mut Vec<Structure>) {
    let mut slots: Vec<(usize, Vec<Element>)> = Vec::new();
    for (ri, r) in vocab.relations().iter().enumerate() {
        for idx in 0..(m as u64).pow(r.arity as u32) {
            let mut rest = idx;
            let t: Vec<Element> = (0..r.arity)
                .map(|_| {
                    let e = (rest % m as u64) as Element + 1;
                    rest /= m as u64;
                    e
                })
                .collect();
            slots.push((ri, t));
        }
    }
    let nconst = vocab.constants().len();
    let assignments = (m as u64).pow(nconst as u32);
    for a in 0..assignments {
        let mut rest = a;
        let consts: Vec<Element> = (0..nconst)
            .map(|_| {
                let e = (rest % m as u64) as Element + 1;
                rest /= m as u64;
                e
            })
            .collect();
        for mask in 0u64..1 << slots.len() {
            let mut b = Structure::builder(vocab.clone(), 1..=m);
            for (i, (ri, t)) in slots.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    b.add_tuple(&vocab.relations()[*ri].name, t);
                }
            }
            for (c, &e) in vocab.constants().iter().zip(&consts) {
                b.set_constant(c, e);
            }
            out.push(b.build().expect("enumerated structure is valid"));
        }
    }
}
