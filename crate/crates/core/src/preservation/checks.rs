use std::sync::Arc;

use rayon::prelude::*;

use crate::logic::{CompiledFormula, Formula, LogicError, Term};
use crate::logic::Assignment;
use crate::structure::{is_extension, subsets_containing, Element, Structure};

use super::family::{Family, Hosts};
use super::frame::Frame;
use super::{Counterexample, CoverWitness, CruxReport, PreservationError, PropertyVerdict};

const ADMITTED: u8 = 1;
const MODEL: u8 = 2;

fn compile_sentence(f: &Formula, s: &Structure) -> Result<CompiledFormula, PreservationError> {
    let c = CompiledFormula::new(f, s.vocab())?;
    if !c.is_sentence() {
        let free: Vec<String> = f.free_vars().into_iter().collect();
        return Err(LogicError::NotASentence(free.join(", ")).into());
    }
    Ok(c)
}

fn any_host(family: &Family) -> Option<Structure> {
    match &family.hosts {
        Hosts::List(h) => h.first().cloned(),
        Hosts::Lattice(a) => Some(a.clone()),
    }
}

struct HostOutcome<T> {
    index: usize,
    frame: Arc<Frame>,
    host: u64,
    value: T,
}

impl Family {
    fn ambient(&self, index: usize) -> &Structure {
        match &self.hosts {
            Hosts::List(h) => &h[index],
            Hosts::Lattice(a) => a,
        }
    }

    fn materialize<T>(&self, o: &HostOutcome<T>) -> Structure {
        let a = self.ambient(o.index);
        if o.host == o.frame.full() {
            a.clone()
        } else {
            a.restrict_sorted(o.frame.elements(o.host))
        }
    }
}

/// Evaluates `g` on every induced substructure of every host and hands each
/// host's table of `(submask, flags)` to `visit`. Results keep host order.
fn scan<T: Send>(
    family: &Family,
    g: &CompiledFormula,
    visit: impl Fn(&Frame, u64, &[(u64, u8)]) -> T + Sync,
) -> Result<(Vec<HostOutcome<T>>, u64), PreservationError> {
    match &family.hosts {
        Hosts::List(hosts) => {
            let outcomes: Result<Vec<_>, PreservationError> = hosts
                .par_iter()
                .enumerate()
                .map(|(index, h)| {
                    let frame = Arc::new(Frame::new(h.universe(), &h.pinned())?);
                    let entries: Vec<(u64, u8)> = frame
                        .submasks(frame.full())
                        .into_par_iter()
                        .map(|m| {
                            let sub = if m == frame.full() {
                                h.clone()
                            } else {
                                h.restrict_sorted(frame.elements(m))
                            };
                            let mut flags = 0;
                            if family.admits(&sub) {
                                flags |= ADMITTED;
                            }
                            if g.check(&sub) {
                                flags |= MODEL;
                            }
                            (m, flags)
                        })
                        .collect();
                    let value = visit(&frame, frame.full(), &entries);
                    Ok((
                        HostOutcome {
                            index,
                            host: frame.full(),
                            frame,
                            value,
                        },
                        entries.len() as u64,
                    ))
                })
                .collect();
            let outcomes = outcomes?;
            let total = outcomes.iter().map(|o| o.1).sum();
            Ok((outcomes.into_iter().map(|o| o.0).collect(), total))
        }
        Hosts::Lattice(a) => {
            let (frame, table, evaluated) = lattice_table(a, g)?;
            let frame = Arc::new(frame);
            let pinned = a.pinned();
            let hosts: Vec<u64> = subsets_containing(a.universe(), &pinned, None)
                .map(|s| frame.mask_of(&s))
                .collect();
            let outcomes: Vec<HostOutcome<T>> = hosts
                .into_par_iter()
                .map(|host| {
                    let entries: Vec<(u64, u8)> = frame
                        .submasks(host)
                        .into_iter()
                        .map(|m| (m, table[m as usize]))
                        .collect();
                    let value = visit(&frame, host, &entries);
                    HostOutcome {
                        index: 0,
                        frame: frame.clone(),
                        host,
                        value,
                    }
                })
                .collect();
            Ok((outcomes, evaluated))
        }
    }
}

/// Flags for every member of the substructure lattice of `a`, indexed by
/// mask, and the number of members evaluated.
fn lattice_table(a: &Structure, g: &CompiledFormula) -> Result<(Frame, Vec<u8>, u64), PreservationError> {
    let frame = Frame::new(a.universe(), &a.pinned())?;
    let masks = frame.submasks(frame.full());
    let flags: Vec<(u64, u8)> = masks
        .par_iter()
        .map(|&m| {
            let sub = a.restrict_sorted(frame.elements(m));
            (m, ADMITTED | if g.check(&sub) { MODEL } else { 0 })
        })
        .collect();
    let mut table = vec![0u8; 1 << frame.len()];
    for (m, f) in flags {
        table[m as usize] = f;
    }
    Ok((frame, table, masks.len() as u64))
}

fn host_flags(host: u64, entries: &[(u64, u8)]) -> u8 {
    entries
        .iter()
        .find(|e| e.0 == host)
        .map(|e| e.1)
        .expect("host is among its own submasks")
}

fn lex_first(frame: &Frame, masks: impl Iterator<Item = u64>) -> Option<Vec<Element>> {
    masks.map(|m| frame.elements(m)).min()
}

fn verdict(
    family: &Family,
    counterexample: Option<Counterexample>,
    substructures: u64,
) -> PropertyVerdict {
    PropertyVerdict {
        holds: counterexample.is_none(),
        counterexample,
        hosts_checked: family.len(),
        substructures_checked: substructures,
        exhaustive: family.is_exhaustive(),
    }
}

fn empty_verdict(family: &Family) -> PropertyVerdict {
    verdict(family, None, 0)
}

/// Every model of `f` in the family has all of its induced substructures as models.
pub fn is_hereditary_over(f: &Formula, family: &Family) -> Result<PropertyVerdict, PreservationError> {
    let Some(sample) = any_host(family) else {
        return Ok(empty_verdict(family));
    };
    let g = compile_sentence(f, &sample)?;
    if let Hosts::Lattice(a) = &family.hosts {
        return hereditary_on_lattice(family, a, &g);
    }
    let (outcomes, total) = scan(family, &g, |frame, host, entries| {
        if host_flags(host, entries) & MODEL == 0 {
            return None;
        }
        lex_first(
            frame,
            entries.iter().filter(|e| e.1 & MODEL == 0).map(|e| e.0),
        )
    })?;
    let cx = outcomes.iter().find(|o| o.value.is_some()).map(|o| Counterexample::Substructure {
        host: family.materialize(o),
        subset: o.value.clone().unwrap(),
    });
    Ok(verdict(family, cx, total))
}

/// A sweep over the lattice marks every member with a non-model below it, so
/// only the first offending host has its submasks listed.
fn hereditary_on_lattice(
    family: &Family,
    a: &Structure,
    g: &CompiledFormula,
) -> Result<PropertyVerdict, PreservationError> {
    let (frame, table, evaluated) = lattice_table(a, g)?;
    let pinned = frame.mask_of(&a.pinned());
    let mut below: Vec<bool> = table.iter().map(|&f| f & ADMITTED != 0 && f & MODEL == 0).collect();
    for bit in (0..frame.len()).filter(|i| pinned >> i & 1 == 0) {
        for m in 0..table.len() {
            if m >> bit & 1 == 1 && below[m ^ (1 << bit)] {
                below[m] = true;
            }
        }
    }
    let cx = subsets_containing(a.universe(), &a.pinned(), None)
        .map(|s| frame.mask_of(&s))
        .find(|&h| table[h as usize] & MODEL != 0 && below[h as usize])
        .map(|host| {
            let bad = frame
                .submasks(host)
                .into_iter()
                .filter(|&m| table[m as usize] & MODEL == 0);
            Counterexample::Substructure {
                host: if host == frame.full() {
                    a.clone()
                } else {
                    a.restrict_sorted(frame.elements(host))
                },
                subset: lex_first(&frame, bad).expect("a non-model lies below"),
            }
        });
    Ok(verdict(family, cx, evaluated))
}

fn has_crux(frame: &Frame, host: u64, entries: &[(u64, u8)], k: usize) -> bool {
    let bad: Vec<u64> = entries
        .iter()
        .filter(|e| e.1 & ADMITTED != 0 && e.1 & MODEL == 0)
        .map(|e| e.0)
        .collect();
    if bad.is_empty() {
        return true;
    }
    frame
        .small_subsets(host, k)
        .into_iter()
        .any(|c| !bad.iter().any(|&b| b & c == c))
}

/// Every model of `f` in the family has a crux of size at most `k`, with the
/// crux condition relativized to the family's membership scope.
pub fn is_k_hereditary_over(
    f: &Formula,
    family: &Family,
    k: usize,
) -> Result<PropertyVerdict, PreservationError> {
    let Some(sample) = any_host(family) else {
        return Ok(empty_verdict(family));
    };
    let g = compile_sentence(f, &sample)?;
    let (outcomes, total) = scan(family, &g, |frame, host, entries| {
        host_flags(host, entries) & MODEL == 0 || has_crux(frame, host, entries, k)
    })?;
    let cx = outcomes.iter().find(|o| !o.value).map(|o| Counterexample::NoCrux {
        host: family.materialize(o),
        k,
    });
    Ok(verdict(family, cx, total))
}

/// Every host of the family whose in-family substructures satisfying `f`
/// form a `k`-ary cover of it satisfies `f` itself.
pub fn is_k_extension_closed_over(
    f: &Formula,
    family: &Family,
    k: usize,
) -> Result<PropertyVerdict, PreservationError> {
    let Some(sample) = any_host(family) else {
        return Ok(empty_verdict(family));
    };
    let g = compile_sentence(f, &sample)?;
    let (outcomes, total) = scan(family, &g, |frame, host, entries| {
        if host_flags(host, entries) & MODEL != 0 {
            return None;
        }
        let good: Vec<u64> = entries
            .iter()
            .filter(|e| e.1 & ADMITTED != 0 && e.1 & MODEL != 0)
            .map(|e| e.0)
            .collect();
        if good.is_empty() {
            return None;
        }
        let covered = frame
            .small_subsets(host, k)
            .into_iter()
            .all(|c| good.iter().any(|&r| r & c == c));
        if !covered {
            return None;
        }
        let mut members: Vec<Vec<Element>> = good.into_iter().map(|m| frame.elements(m)).collect();
        members.sort();
        Some(members)
    })?;
    let cx = outcomes.iter().find(|o| o.value.is_some()).map(|o| {
        Counterexample::Cover(CoverWitness {
            host: family.materialize(o),
            members: o.value.clone().unwrap(),
            k,
        })
    });
    Ok(verdict(family, cx, total))
}

/// Both sides of the duality: `f` being `k`-hereditary and `not f` being
/// `k`-extension closed over the same family.
pub fn duality_sides(
    f: &Formula,
    family: &Family,
    k: usize,
) -> Result<(PropertyVerdict, PropertyVerdict), PreservationError> {
    let left = is_k_hereditary_over(f, family, k)?;
    let right = is_k_extension_closed_over(&Formula::not(f.clone()), family, k)?;
    Ok((left, right))
}

/// Holds iff the two sides of [`duality_sides`] agree.
pub fn check_duality(f: &Formula, family: &Family, k: usize) -> Result<PropertyVerdict, PreservationError> {
    let (left, right) = duality_sides(f, family, k)?;
    let total = left.substructures_checked + right.substructures_checked;
    let cx = (left.holds != right.holds).then(|| Counterexample::Duality {
        k_hereditary: Box::new(left),
        extension_closed: Box::new(right),
    });
    Ok(verdict(family, cx, total))
}

fn require_model(s: &Structure, g: &CompiledFormula) -> Result<(), PreservationError> {
    if g.check(s) {
        Ok(())
    } else {
        Err(PreservationError::PreconditionFailed(
            "the structure does not satisfy the formula".into(),
        ))
    }
}

fn normalize_set(s: &Structure, c: &[Element]) -> Result<Vec<Element>, PreservationError> {
    let mut c = c.to_vec();
    c.sort_unstable();
    c.dedup();
    match c.iter().find(|&&e| !s.contains(e)) {
        Some(&e) => Err(PreservationError::NotInUniverse(e)),
        None => Ok(c),
    }
}

/// Whether `c` is a crux of size at most `k` for `f` in the model `s`: every
/// induced substructure containing `c` (and admitted by `family`, if given)
/// satisfies `f`.
pub fn is_crux(
    s: &Structure,
    c: &[Element],
    f: &Formula,
    k: usize,
    family: Option<&Family>,
) -> Result<bool, PreservationError> {
    let g = compile_sentence(f, s)?;
    require_model(s, &g)?;
    let mut required = normalize_set(s, c)?;
    if required.len() > k {
        return Ok(false);
    }
    required.extend(s.pinned());
    for sub in subsets_containing(s.universe(), &required, None) {
        let b = s.induced_substructure(&sub)?;
        if family.is_none_or(|fam| fam.admits(&b)) && !g.check(&b) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All cruxes of size at most `k` for `f` in the model `s`.
pub fn find_k_cruxes(
    s: &Structure,
    f: &Formula,
    k: usize,
    family: Option<&Family>,
) -> Result<CruxReport, PreservationError> {
    let g = compile_sentence(f, s)?;
    require_model(s, &g)?;
    let frame = Frame::new(s.universe(), &s.pinned())?;
    let bad: Vec<u64> = frame
        .submasks(frame.full())
        .into_par_iter()
        .filter(|&m| {
            let b = s.restrict_sorted(frame.elements(m));
            family.is_none_or(|fam| fam.admits(&b)) && !g.check(&b)
        })
        .collect();
    let cruxes = frame
        .small_subsets(frame.full(), k)
        .into_iter()
        .filter(|&c| !bad.iter().any(|&b| b & c == c))
        .map(|c| frame.elements(c))
        .collect();
    Ok(CruxReport {
        structure_id: super::structure_id(s),
        k,
        cruxes,
        exhaustive: family.is_none_or(Family::is_exhaustive),
    })
}

fn covers(universe: &[Element], members: &[&[Element]], k: usize) -> bool {
    let inside = |c: &[Element]| {
        members
            .iter()
            .any(|m| c.iter().all(|e| m.binary_search(e).is_ok()))
    };
    inside(&[]) && subsets_containing(universe, &[], Some(k)).all(|c| inside(&c))
}

/// `members` are induced substructures of `host` and every subset of the
/// host's universe with at most `k` elements lies inside one of them.
pub fn is_k_ary_cover(host: &Structure, members: &[Structure], k: usize) -> Result<bool, PreservationError> {
    if members.is_empty() {
        return Err(PreservationError::EmptyCollection);
    }
    for m in members {
        if !m.is_substructure_of(host)? {
            return Ok(false);
        }
    }
    let unis: Vec<&[Element]> = members.iter().map(Structure::universe).collect();
    Ok(covers(host.universe(), &unis, k))
}

/// Every subset of `base`'s universe with at most `k` elements lies inside a
/// member, where members are induced substructures of the extension `ext`.
pub fn is_k_ary_cover_in(
    base: &Structure,
    ext: &Structure,
    members: &[Structure],
    k: usize,
) -> Result<bool, PreservationError> {
    if !is_extension(base, ext)? {
        return Err(PreservationError::NotAnExtension);
    }
    if members.is_empty() {
        return Err(PreservationError::EmptyCollection);
    }
    for m in members {
        if !m.is_substructure_of(ext)? {
            return Ok(false);
        }
    }
    let unis: Vec<&[Element]> = members.iter().map(Structure::universe).collect();
    Ok(covers(base.universe(), &unis, k))
}

/// Re-derives a counterexample from scratch. `f` is the formula of the
/// verdict that produced it (for covers, the formula being extension closed).
pub fn recheck_counterexample(
    f: &Formula,
    family: &Family,
    cx: &Counterexample,
) -> Result<bool, PreservationError> {
    match cx {
        Counterexample::Substructure { host, subset } => {
            let g = compile_sentence(f, host)?;
            Ok(g.check(host) && !g.check(&host.induced_substructure(subset)?))
        }
        Counterexample::NoCrux { host, k } => {
            let g = compile_sentence(f, host)?;
            if !g.check(host) {
                return Ok(false);
            }
            let candidates = std::iter::once(Vec::new())
                .chain(subsets_containing(host.universe(), &[], Some(*k)));
            for c in candidates {
                if is_crux(host, &c, f, *k, Some(family))? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Counterexample::Cover(w) => {
            let g = compile_sentence(f, &w.host)?;
            if g.check(&w.host) {
                return Ok(false);
            }
            let members = w.member_structures()?;
            let all_models = members.iter().all(|m| family.admits(m) && g.check(m));
            Ok(all_models && is_k_ary_cover(&w.host, &members, w.k)?)
        }
        Counterexample::Duality {
            k_hereditary,
            extension_closed,
        } => Ok(k_hereditary.holds != extension_closed.holds),
    }
}

/// `exists x1 ... exists xk. forall y. OR_i (y = xi | E(y, xi))` over `{E/2}`.
pub fn dominating_set_sentence(k: usize) -> Formula {
    let xs: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
    let y = || Term::var("y");
    let body = Formula::disj(xs.iter().map(|x| {
        Formula::or(
            Formula::eq(y(), Term::var(x.clone())),
            Formula::atom("E", vec![y(), Term::var(x.clone())]),
        )
    }));
    Formula::quantify_all(crate::Quantifier::Exists, xs, Formula::forall("y", body))
}

/// For a sentence `exists x1 ... exists xm. psi`, the distinct element sets
/// `{a1, ..., am}` of tuples satisfying `psi` in `s`, sorted.
pub fn witness_sets(s: &Structure, f: &Formula) -> Result<Vec<Vec<Element>>, PreservationError> {
    let mut vars = Vec::new();
    let mut body = f;
    while let Formula::Exists(v, b) = body {
        vars.push(v.clone());
        body = b;
    }
    let psi = CompiledFormula::new(body, s.vocab())?;
    let n = s.size();
    let mut out = Vec::new();
    let mut idx = vec![0usize; vars.len()];
    loop {
        let a: Assignment = vars
            .iter()
            .zip(&idx)
            .map(|(v, &i)| (v.clone(), s.universe()[i]))
            .collect();
        if psi.eval(s, &a)? {
            let mut set: Vec<Element> = idx.iter().map(|&i| s.universe()[i]).collect();
            set.sort_unstable();
            set.dedup();
            out.push(set);
        }
        let mut j = 0;
        while j < idx.len() {
            idx[j] += 1;
            if idx[j] < n {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
        if j == idx.len() {
            break;
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{classify_prefix, evaluate_sentence, parse};
    use crate::random::{all_graphs, graph_from_edges, graph_vocab};
    use crate::structure::Vocabulary;

    fn unary() -> Arc<Vocabulary> {
        Arc::new(Vocabulary::of(&[("P", 1)], &[]))
    }

    fn star() -> Structure {
        graph_from_edges(4, &[(1, 2), (1, 3), (1, 4)])
    }

    #[test]
    fn domset_shape() {
        let d1 = dominating_set_sentence(1);
        let expected = parse("exists x1. forall y. ((y = x1) | E(y,x1))", &graph_vocab()).unwrap();
        assert_eq!(d1, expected);
        let p = classify_prefix(&dominating_set_sentence(3)).unwrap();
        assert!(p.is_ek_forall_star(3));
        assert_eq!(p.quantifier_count(), 4);
        let empty2 = graph_from_edges(2, &[]);
        assert!(evaluate_sentence(&empty2, &dominating_set_sentence(2)).unwrap());
        assert!(!evaluate_sentence(&empty2, &dominating_set_sentence(1)).unwrap());
        assert!(!evaluate_sentence(&graph_from_edges(1, &[]), &dominating_set_sentence(0)).unwrap());
    }

    #[test]
    fn star_cruxes() {
        let d1 = dominating_set_sentence(1);
        let s = star();
        assert!(is_crux(&s, &[1], &d1, 1, None).unwrap());
        assert!(!is_crux(&s, &[2], &d1, 1, None).unwrap());
        assert!(is_crux(&s, &[1, 2, 3, 4], &d1, 4, None).unwrap());
        assert!(!is_crux(&s, &[1, 2], &d1, 1, None).unwrap());
        let r = find_k_cruxes(&s, &d1, 1, None).unwrap();
        assert_eq!(r.cruxes, vec![vec![1]]);
        assert!(r.exhaustive);
    }

    #[test]
    fn trivial_cruxes_and_preconditions() {
        let v = unary();
        let s = Structure::builder(v.clone(), [1, 2]).build().unwrap();
        let f = parse("exists x. x = x", &v).unwrap();
        assert_eq!(find_k_cruxes(&s, &f, 0, None).unwrap().cruxes, vec![Vec::<Element>::new()]);
        let g = parse("exists x. P(x)", &v).unwrap();
        assert!(matches!(
            find_k_cruxes(&s, &g, 1, None),
            Err(PreservationError::PreconditionFailed(_))
        ));
        assert!(matches!(
            is_crux(&s, &[1], &g, 1, None),
            Err(PreservationError::PreconditionFailed(_))
        ));
        assert!(matches!(
            is_crux(&s, &[7], &f, 1, None),
            Err(PreservationError::NotInUniverse(7))
        ));
    }

    #[test]
    fn hereditary_examples() {
        let v = unary();
        let s = Structure::builder(v.clone(), [1, 2]).tuple("P", &[1]).build().unwrap();
        let fam = Family::explicit("one", vec![s.clone()]);
        let ex = parse("exists x. P(x)", &v).unwrap();
        let r = is_hereditary_over(&ex, &fam).unwrap();
        assert!(!r.holds);
        let cx = r.counterexample.clone().unwrap();
        assert_eq!(
            cx,
            Counterexample::Substructure {
                host: s.clone(),
                subset: vec![2]
            }
        );
        assert!(recheck_counterexample(&ex, &fam, &cx).unwrap());
        let all = parse("forall x. P(x)", &v).unwrap();
        let big = Family::all_structures(&v, 4).unwrap();
        assert!(is_hereditary_over(&all, &big).unwrap().holds);
        assert!(is_k_hereditary_over(&ex, &big, 1).unwrap().holds);
        assert!(!is_k_hereditary_over(&ex, &big, 0).unwrap().holds);
    }

    #[test]
    fn cover_examples() {
        let v = unary();
        let host = Structure::builder(v.clone(), [1, 2, 3]).tuple("P", &[2]).build().unwrap();
        let pairs: Vec<Structure> = [[1, 2], [1, 3], [2, 3]]
            .iter()
            .map(|p| host.induced_substructure(p).unwrap())
            .collect();
        assert!(is_k_ary_cover(&host, &pairs, 2).unwrap());
        assert!(!is_k_ary_cover(&host, &pairs, 3).unwrap());
        assert!(is_k_ary_cover(&host, std::slice::from_ref(&host), 5).unwrap());
        let singles: Vec<Structure> = (1..=3)
            .map(|e| host.induced_substructure(&[e]).unwrap())
            .collect();
        assert!(is_k_ary_cover(&host, &singles, 1).unwrap());
        assert!(!is_k_ary_cover(&host, &singles[..2], 1).unwrap());
        assert!(!is_k_ary_cover(&host, &singles, 2).unwrap());
        assert_eq!(is_k_ary_cover(&host, &[], 1), Err(PreservationError::EmptyCollection));

        let base = host.induced_substructure(&[1, 2]).unwrap();
        assert!(is_k_ary_cover_in(&base, &host, std::slice::from_ref(&host), 2).unwrap());
        assert!(!is_k_ary_cover_in(&base, &host, &[singles[0].clone(), singles[2].clone()], 1).unwrap());
        assert_eq!(
            is_k_ary_cover_in(&host, &base, std::slice::from_ref(&base), 1),
            Err(PreservationError::NotAnExtension)
        );
        for k in 0..4 {
            assert_eq!(
                is_k_ary_cover_in(&host, &host, &pairs, k).unwrap(),
                is_k_ary_cover(&host, &pairs, k).unwrap()
            );
        }
    }

    #[test]
    fn extension_closure_and_duality() {
        let v = unary();
        let fam = Family::all_structures(&v, 3).unwrap();
        let taut = parse("exists x. x = x", &v).unwrap();
        assert!(is_k_extension_closed_over(&taut, &fam, 2).unwrap().holds);
        let ex = parse("exists x. P(x)", &v).unwrap();
        for k in 0..3 {
            let (l, r) = duality_sides(&ex, &fam, k).unwrap();
            assert_eq!(l.holds, k >= 1);
            assert_eq!(l.holds, r.holds);
            assert!(check_duality(&ex, &fam, k).unwrap().holds);
            if let Some(cx) = &r.counterexample {
                assert!(recheck_counterexample(&Formula::not(ex.clone()), &fam, cx).unwrap());
            }
            if let Some(cx) = &l.counterexample {
                assert!(recheck_counterexample(&ex, &fam, cx).unwrap());
            }
        }
    }

    #[test]
    fn small_graphs_domset_cruxes() {
        let d1 = dominating_set_sentence(1);
        let fam = Family::explicit("g4", all_graphs(4));
        assert!(is_k_hereditary_over(&d1, &fam, 1).unwrap().holds);
        for g in all_graphs(4) {
            if !evaluate_sentence(&g, &d1).unwrap() {
                continue;
            }
            let cruxes = find_k_cruxes(&g, &d1, 1, None).unwrap().cruxes;
            for w in witness_sets(&g, &d1).unwrap() {
                assert!(cruxes.contains(&w), "{w:?} not a crux");
            }
        }
    }

    #[test]
    fn lattice_matches_explicit_list() {
        let v = Arc::new(Vocabulary::of(&[("E", 2)], &["c"]));
        let s = Structure::builder(v.clone(), 1..=4)
            .tuple("E", &[1, 2])
            .tuple("E", &[2, 3])
            .tuple("E", &[3, 1])
            .constant("c", 2)
            .build()
            .unwrap();
        let lattice = Family::substructure_lattice("lat", s.clone());
        let listed = Family::explicit("list", lattice.hosts().collect());
        assert!(matches!(listed.scope(), super::super::Scope::Listed(_)));
        for src in ["exists x. E(c,x)", "forall x. E(x,c) | x = c", "exists x. exists y. E(x,y) & E(y,x)"] {
            let f = parse(src, &v).unwrap();
            for k in 0..3 {
                let a = is_k_hereditary_over(&f, &lattice, k).unwrap();
                let b = is_k_hereditary_over(&f, &listed, k).unwrap();
                assert_eq!(a.holds, b.holds, "{src} k={k}");
                assert_eq!(a.counterexample, b.counterexample);
                let nf = Formula::not(f.clone());
                let a = is_k_extension_closed_over(&nf, &lattice, k).unwrap();
                let b = is_k_extension_closed_over(&nf, &listed, k).unwrap();
                assert_eq!(a.counterexample, b.counterexample, "{src} k={k}");
                assert!(check_duality(&f, &lattice, k).unwrap().holds);
            }
            assert_eq!(
                is_hereditary_over(&f, &lattice).unwrap().counterexample,
                is_hereditary_over(&f, &listed).unwrap().counterexample
            );
        }
    }
}
