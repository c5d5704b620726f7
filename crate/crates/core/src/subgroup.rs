//! Subgroups: canonical representation, membership, span, rank, counting and sampling.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use crate::error::{HspError, Result};
use crate::group::{is_prime, GroupElement, GroupSpec, TableGroup};
use crate::linalg::{self, EchelonBasis};
use crate::rng::RngStream;

/// Largest subgroup count [`enumerate_subgroups`] will materialize.
pub const ENUMERATION_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Repr {
    /// One canonical basis per prime component.
    Abelian(Vec<EchelonBasis>),
    /// Sorted element indices.
    Table(Vec<u32>),
}

/// A subgroup of a [`GroupSpec`], held in canonical form so equality is structural.
#[derive(Clone)]
pub struct Subgroup {
    group: GroupSpec,
    repr: Repr,
    order: BigUint,
    rank: OnceLock<usize>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.repr == other.repr && self.group == other.group
    }
}

impl Eq for Subgroup {}

impl Hash for Subgroup {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.repr.hash(state);
    }
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Abelian(bases) => f
                .debug_struct("Subgroup")
                .field("order", &self.order)
                .field(
                    "bases",
                    &bases.iter().map(EchelonBasis::rows).collect::<Vec<_>>(),
                )
                .finish(),
            Repr::Table(els) => f
                .debug_struct("Subgroup")
                .field("order", &self.order)
                .field("elements", els)
                .finish(),
        }
    }
}

impl Subgroup {
    fn from_repr(group: GroupSpec, repr: Repr) -> Self {
        let order = match &repr {
            Repr::Abelian(bases) => bases.iter().fold(BigUint::one(), |acc, b| {
                acc * BigUint::from(b.prime()).pow(b.rank() as u32)
            }),
            Repr::Table(els) => BigUint::from(els.len()),
        };
        Subgroup {
            group,
            repr,
            order,
            rank: OnceLock::new(),
        }
    }

    /// `{e}`.
    pub fn trivial(group: &GroupSpec) -> Self {
        let repr = match group {
            GroupSpec::Abelian(comps) => Repr::Abelian(
                comps
                    .iter()
                    .map(|c| EchelonBasis::zero(c.prime, c.dim))
                    .collect(),
            ),
            GroupSpec::Table(t) => Repr::Table(vec![t.identity()]),
        };
        Self::from_repr(group.clone(), repr)
    }

    /// The whole group.
    pub fn whole(group: &GroupSpec) -> Self {
        let repr = match group {
            GroupSpec::Abelian(comps) => Repr::Abelian(
                comps
                    .iter()
                    .map(|c| {
                        let unit: Vec<Vec<u32>> = (0..c.dim)
                            .map(|i| (0..c.dim).map(|j| u32::from(i == j)).collect())
                            .collect();
                        EchelonBasis::span(c.prime, c.dim, unit.iter().map(Vec::as_slice))
                    })
                    .collect(),
            ),
            GroupSpec::Table(t) => Repr::Table((0..t.order() as u32).collect()),
        };
        Self::from_repr(group.clone(), repr)
    }

    /// Product of per-component subspaces of an abelian group.
    pub fn from_bases(group: &GroupSpec, bases: Vec<EchelonBasis>) -> Result<Self> {
        let comps = match group {
            GroupSpec::Abelian(c) => c,
            GroupSpec::Table(_) => {
                return Err(HspError::structural(
                    "component bases given for a table group",
                ))
            }
        };
        if comps.len() != bases.len() {
            return Err(HspError::structural(format!(
                "{} bases for {} components",
                bases.len(),
                comps.len()
            )));
        }
        for (c, b) in comps.iter().zip(&bases) {
            if c.prime != b.prime() || c.dim != b.dim() {
                return Err(HspError::structural(format!(
                    "basis over F_{}^{} does not match component Z_{}^{}",
                    b.prime(),
                    b.dim(),
                    c.prime,
                    c.dim
                )));
            }
        }
        Ok(Self::from_repr(group.clone(), Repr::Abelian(bases)))
    }

    /// A subgroup of a table group given as an element set; closure is verified.
    pub fn from_elements(group: &GroupSpec, elements: &[u32]) -> Result<Self> {
        let GroupSpec::Table(t) = group else {
            return Err(HspError::structural(
                "element set given for an abelian group",
            ));
        };
        let mut els: Vec<u32> = elements.to_vec();
        els.sort_unstable();
        els.dedup();
        if let Some(&bad) = els.iter().find(|&&x| x as usize >= t.order()) {
            return Err(HspError::structural(format!("index {bad} out of range")));
        }
        if els.binary_search(&t.identity()).is_err() {
            return Err(HspError::domain(
                "element set does not contain the identity",
            ));
        }
        for &a in &els {
            if els.binary_search(&t.inv(a)).is_err() {
                return Err(HspError::domain(format!(
                    "element set not closed under inverse at {a}"
                )));
            }
            for &b in &els {
                if els.binary_search(&t.mul(a, b)).is_err() {
                    return Err(HspError::domain(format!(
                        "element set not closed under product at ({a}, {b})"
                    )));
                }
            }
        }
        Ok(Self::from_repr(group.clone(), Repr::Table(els)))
    }

    /// `<W>`: the smallest subgroup containing every element of `generators`.
    ///
    /// Abelian groups echelonize each prime component separately; the
    /// components have coprime orders, so the projections of the generators
    /// span the projections of `<W>`. Table groups take a breadth-first closure.
    pub fn span(group: &GroupSpec, generators: &[GroupElement]) -> Result<Self> {
        for w in generators {
            group.check(w)?;
        }
        let repr = match group {
            GroupSpec::Abelian(comps) => {
                let offsets = group.offsets();
                Repr::Abelian(
                    comps
                        .iter()
                        .enumerate()
                        .map(|(i, c)| {
                            let (lo, hi) = (offsets[i], offsets[i + 1]);
                            EchelonBasis::span(
                                c.prime,
                                c.dim,
                                generators.iter().map(|w| match w {
                                    GroupElement::Residues(r) => &r[lo..hi],
                                    GroupElement::Index(_) => unreachable!(),
                                }),
                            )
                        })
                        .collect(),
                )
            }
            GroupSpec::Table(t) => {
                let gens: Vec<u32> = generators
                    .iter()
                    .map(|w| match w {
                        GroupElement::Index(i) => *i,
                        GroupElement::Residues(_) => unreachable!(),
                    })
                    .collect();
                Repr::Table(bitset_to_vec(&table_closure(t, &gens)))
            }
        };
        Ok(Self::from_repr(group.clone(), repr))
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    /// `|H|`.
    pub fn order(&self) -> &BigUint {
        &self.order
    }

    /// `|G| / |H|`.
    pub fn index(&self) -> BigUint {
        let (q, r) = self.group.order().div_rem(&self.order);
        debug_assert!(r == BigUint::ZERO, "Lagrange");
        q
    }

    /// Per-component ranks `k_i` (abelian only; empty for table groups).
    pub fn component_ranks(&self) -> Vec<usize> {
        match &self.repr {
            Repr::Abelian(bases) => bases.iter().map(EchelonBasis::rank).collect(),
            Repr::Table(_) => Vec::new(),
        }
    }

    /// Component bases (abelian only).
    pub fn bases(&self) -> Option<&[EchelonBasis]> {
        match &self.repr {
            Repr::Abelian(b) => Some(b),
            Repr::Table(_) => None,
        }
    }

    /// Sorted element indices (table only).
    pub fn table_elements(&self) -> Option<&[u32]> {
        match &self.repr {
            Repr::Table(e) => Some(e),
            Repr::Abelian(_) => None,
        }
    }

    /// `r(H)`, the size of a smallest generating set. `r({e}) = 0`.
    ///
    /// For abelian products this is `max_i k_i`. For table groups it is found
    /// by a breadth-first search over the distinct subgroups generated by
    /// `1, 2, ...` elements, which is practical for `|H| <= 256`.
    pub fn rank(&self) -> usize {
        *self.rank.get_or_init(|| match (&self.repr, &self.group) {
            (Repr::Abelian(bases), _) => bases.iter().map(EchelonBasis::rank).max().unwrap_or(0),
            (Repr::Table(els), GroupSpec::Table(t)) => table_rank(t, els),
            _ => unreachable!(),
        })
    }

    pub fn contains(&self, x: &GroupElement) -> Result<bool> {
        self.group.check(x)?;
        Ok(self.contains_unchecked(x))
    }

    pub(crate) fn contains_unchecked(&self, x: &GroupElement) -> bool {
        match (&self.repr, x) {
            (Repr::Abelian(bases), GroupElement::Residues(r)) => {
                let mut off = 0;
                bases.iter().all(|b| {
                    let ok = b.contains(&r[off..off + b.dim()]);
                    off += b.dim();
                    ok
                })
            }
            (Repr::Table(els), GroupElement::Index(i)) => els.binary_search(i).is_ok(),
            _ => false,
        }
    }

    /// Canonical representative of the left coset `xH`.
    ///
    /// Abelian: `x` reduced against each echelon basis. Table: the smallest
    /// element index in `xH`.
    pub fn coset_rep(&self, x: &GroupElement) -> Result<GroupElement> {
        self.group.check(x)?;
        Ok(self.coset_rep_unchecked(x))
    }

    pub(crate) fn coset_rep_unchecked(&self, x: &GroupElement) -> GroupElement {
        match (&self.repr, &self.group, x) {
            (Repr::Abelian(bases), _, GroupElement::Residues(r)) => {
                let mut out = Vec::with_capacity(r.len());
                let mut off = 0;
                for b in bases {
                    out.extend(b.reduce(&r[off..off + b.dim()]));
                    off += b.dim();
                }
                GroupElement::Residues(out)
            }
            (Repr::Table(els), GroupSpec::Table(t), GroupElement::Index(i)) => {
                GroupElement::Index(els.iter().map(|&h| t.mul(*i, h)).min().unwrap_or(*i))
            }
            _ => unreachable!("element kind checked by caller"),
        }
    }

    /// Whether `self <= other`.
    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        if self.group != other.group {
            return false;
        }
        match (&self.repr, &other.repr) {
            (Repr::Abelian(a), Repr::Abelian(b)) => a
                .iter()
                .zip(b)
                .all(|(x, y)| x.rows().iter().all(|row| y.contains(row))),
            (Repr::Table(a), Repr::Table(b)) => a.iter().all(|x| b.binary_search(x).is_ok()),
            _ => false,
        }
    }

    /// Every element, when `|H| <= limit`.
    pub fn elements(&self, limit: usize) -> Result<Vec<GroupElement>> {
        if self.order > BigUint::from(limit) {
            return Err(HspError::capacity(format!(
                "subgroup order exceeds enumeration limit {limit}"
            )));
        }
        Ok(match &self.repr {
            Repr::Abelian(bases) => {
                let mut acc: Vec<Vec<u32>> = vec![Vec::new()];
                for b in bases {
                    let part = b.elements();
                    acc = acc
                        .iter()
                        .flat_map(|prefix| {
                            part.iter().map(move |v| {
                                let mut w = prefix.clone();
                                w.extend_from_slice(v);
                                w
                            })
                        })
                        .collect();
                }
                acc.into_iter().map(GroupElement::Residues).collect()
            }
            Repr::Table(els) => els.iter().map(|&i| GroupElement::Index(i)).collect(),
        })
    }

    /// A generating set of size `r(H)` for abelian subgroups: the `j`-th
    /// generator collects the `j`-th basis vector of every component.
    pub fn minimal_generators(&self) -> Option<Vec<GroupElement>> {
        let bases = self.bases()?;
        let rank = self.rank();
        Some(
            (0..rank)
                .map(|j| {
                    let mut v = Vec::new();
                    for b in bases {
                        match b.rows().get(j) {
                            Some(row) => v.extend_from_slice(row),
                            None => v.extend(std::iter::repeat_n(0, b.dim())),
                        }
                    }
                    GroupElement::Residues(v)
                })
                .collect(),
        )
    }
}

/// `|G| / |H|` for `H <= G`.
pub fn index(group: &GroupSpec, h: &Subgroup) -> Result<BigUint> {
    if h.group() != group {
        return Err(HspError::structural(
            "subgroup belongs to a different group",
        ));
    }
    Ok(h.index())
}

type Bitset = Vec<u64>;

fn bitset_new(n: usize) -> Bitset {
    vec![0; n.div_ceil(64)]
}

#[inline]
fn bit_get(b: &Bitset, i: u32) -> bool {
    b[i as usize / 64] >> (i % 64) & 1 == 1
}

#[inline]
fn bit_set(b: &mut Bitset, i: u32) {
    b[i as usize / 64] |= 1 << (i % 64);
}

fn bitset_to_vec(b: &Bitset) -> Vec<u32> {
    let mut out = Vec::new();
    for (w, &word) in b.iter().enumerate() {
        let mut word = word;
        while word != 0 {
            let t = word.trailing_zeros();
            out.push(w as u32 * 64 + t);
            word &= word - 1;
        }
    }
    out
}

/// Closure of `{e} ∪ gens` under right multiplication by the generators.
/// In a finite group this is `<gens>`.
fn table_closure(t: &TableGroup, gens: &[u32]) -> Bitset {
    let mut seen = bitset_new(t.order());
    let mut queue = VecDeque::new();
    bit_set(&mut seen, t.identity());
    queue.push_back(t.identity());
    while let Some(x) = queue.pop_front() {
        for &g in gens {
            let y = t.mul(x, g);
            if !bit_get(&seen, y) {
                bit_set(&mut seen, y);
                queue.push_back(y);
            }
        }
    }
    seen
}

fn table_rank(t: &TableGroup, els: &[u32]) -> usize {
    if els.len() == 1 {
        return 0;
    }
    let mut target = bitset_new(t.order());
    for &x in els {
        bit_set(&mut target, x);
    }
    // Frontier of distinct subgroups generated by `r` elements, with a generating set each.
    let mut frontier: Vec<(Bitset, Vec<u32>)> = vec![(table_closure(t, &[]), Vec::new())];
    let mut r = 0;
    loop {
        r += 1;
        let mut seen: HashSet<Bitset> = HashSet::new();
        let mut next = Vec::new();
        for (set, gens) in &frontier {
            for &x in els {
                if bit_get(set, x) {
                    continue;
                }
                let mut g2 = gens.clone();
                g2.push(x);
                let closed = table_closure(t, &g2);
                if closed == target {
                    return r;
                }
                if seen.insert(closed.clone()) {
                    next.push((closed, g2));
                }
            }
        }
        frontier = next;
    }
}

/// Number of rank-`k` subgroups of `Z_p^n`: the Gaussian binomial
/// `prod_{j<k} (p^n - p^j) / (p^k - p^j)`, exact.
pub fn subgroup_count(prime: u32, dim: usize, rank: usize) -> Result<BigUint> {
    if !is_prime(prime) {
        return Err(HspError::domain(format!("{prime} is not prime")));
    }
    if rank > dim {
        return Err(HspError::domain(format!(
            "rank {rank} exceeds dimension {dim}"
        )));
    }
    let p = BigUint::from(prime);
    let pn = p.pow(dim as u32);
    let pk = p.pow(rank as u32);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for j in 0..rank {
        let pj = p.pow(j as u32);
        num *= &pn - &pj;
        den *= &pk - &pj;
    }
    let (q, r) = num.div_rem(&den);
    debug_assert!(r == BigUint::ZERO);
    Ok(q)
}

/// Every rank-`k` subgroup of `Z_p^n`, each once.
pub fn enumerate_subgroups(prime: u32, dim: usize, rank: usize) -> Result<Vec<Subgroup>> {
    let count = subgroup_count(prime, dim, rank)?;
    if count > BigUint::from(ENUMERATION_LIMIT) {
        return Err(HspError::capacity(format!(
            "{count} rank-{rank} subgroups of Z_{prime}^{dim} exceed the enumeration limit {ENUMERATION_LIMIT}"
        )));
    }
    let group = GroupSpec::elementary(prime, dim)?;
    Ok(linalg::enumerate_subspaces(prime, dim, rank)
        .into_iter()
        .map(|b| Subgroup::from_repr(group.clone(), Repr::Abelian(vec![b])))
        .collect())
}

/// Uniformly random rank-`k` subgroup of `Z_p^n`, `1 <= k < n`.
pub fn uniform_random_subgroup(
    prime: u32,
    dim: usize,
    rank: usize,
    rng: &mut RngStream,
) -> Result<Subgroup> {
    check_rank_params(prime, dim, rank)?;
    let group = GroupSpec::elementary(prime, dim)?;
    let basis = linalg::random_subspace(prime, dim, rank, rng);
    Ok(Subgroup::from_repr(group, Repr::Abelian(vec![basis])))
}

pub(crate) fn check_rank_params(prime: u32, dim: usize, rank: usize) -> Result<()> {
    if !is_prime(prime) {
        return Err(HspError::domain(format!("{prime} is not prime")));
    }
    if rank < 1 || rank >= dim {
        return Err(HspError::domain(format!(
            "rank must satisfy 1 <= k < n, got k={rank}, n={dim}"
        )));
    }
    Ok(())
}
