//! Finite groups: structured abelian products `Z_{p_1}^{n_1} x ... x Z_{p_m}^{n_m}`
//! and small groups given by an explicit multiplication table.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;

use crate::error::{HspError, Result};
use crate::rng::RngStream;

/// Largest table group accepted.
pub const MAX_TABLE_ORDER: usize = 4096;

/// Table groups up to this order get an exhaustive associativity check on load.
pub const ASSOCIATIVITY_CHECK_ORDER: usize = 256;

/// One factor `Z_p^n` of a structured abelian group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Component {
    pub prime: u32,
    pub dim: usize,
}

impl Component {
    pub fn new(prime: u32, dim: usize) -> Self {
        Component { prime, dim }
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.prime).pow(self.dim as u32)
    }
}

/// A finite group of order at most [`MAX_TABLE_ORDER`] given by its Cayley table.
#[derive(Debug, PartialEq, Eq)]
pub struct TableGroup {
    order: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
    identity: u32,
}

impl TableGroup {
    /// Validates `rows` as a group table: closure, a two-sided identity, inverses
    /// and (for order up to [`ASSOCIATIVITY_CHECK_ORDER`]) associativity.
    pub fn new(rows: Vec<Vec<u32>>) -> Result<Self> {
        let order = rows.len();
        if order == 0 {
            return Err(HspError::domain(
                "table group must have at least one element",
            ));
        }
        if order > MAX_TABLE_ORDER {
            return Err(HspError::capacity(format!(
                "table group of order {order} exceeds the limit {MAX_TABLE_ORDER}"
            )));
        }
        let mut mul = Vec::with_capacity(order * order);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != order {
                return Err(HspError::domain(format!(
                    "row {i} has {} entries, expected {order}",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&v| v as usize >= order) {
                return Err(HspError::domain(format!(
                    "row {i} contains out-of-range index {bad}"
                )));
            }
            mul.extend_from_slice(row);
        }
        let at = |a: usize, b: usize| mul[a * order + b] as usize;

        let identity = (0..order)
            .find(|&e| (0..order).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or_else(|| HspError::domain("table has no identity element"))?;

        let mut inv = Vec::with_capacity(order);
        for a in 0..order {
            let b = (0..order)
                .find(|&b| at(a, b) == identity)
                .ok_or_else(|| HspError::domain(format!("element {a} has no inverse")))?;
            if at(b, a) != identity {
                return Err(HspError::domain(format!(
                    "element {a} has no two-sided inverse"
                )));
            }
            inv.push(b as u32);
        }

        if order <= ASSOCIATIVITY_CHECK_ORDER {
            for a in 0..order {
                for b in 0..order {
                    let ab = at(a, b);
                    for c in 0..order {
                        if at(ab, c) != at(a, at(b, c)) {
                            return Err(HspError::domain(format!(
                                "table is not associative at ({a}, {b}, {c})"
                            )));
                        }
                    }
                }
            }
        }

        Ok(TableGroup {
            order,
            mul,
            inv,
            identity: identity as u32,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    pub fn row(&self, a: u32) -> &[u32] {
        let start = a as usize * self.order;
        &self.mul[start..start + self.order]
    }
}

/// A finite group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    Abelian(Vec<Component>),
    Table(Arc<TableGroup>),
}

/// An element of a [`GroupSpec`].
///
/// Abelian elements are packed residue vectors: the residues of every
/// component laid out one after the other in component order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Residues(Vec<u32>),
    Index(u32),
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Residues(r) => {
                write!(f, "(")?;
                for (i, v) in r.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, ")")
            }
            GroupElement::Index(i) => write!(f, "#{i}"),
        }
    }
}

pub(crate) fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let p = p as u64;
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl GroupSpec {
    /// `prod Z_{p_i}^{n_i}` with distinct primes and positive exponents.
    pub fn abelian(components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(HspError::domain(
                "abelian group needs at least one component",
            ));
        }
        for (i, c) in components.iter().enumerate() {
            if !is_prime(c.prime) {
                return Err(HspError::domain(format!(
                    "component modulus {} is not prime",
                    c.prime
                )));
            }
            if c.dim == 0 {
                return Err(HspError::domain(format!(
                    "component {} has exponent 0",
                    c.prime
                )));
            }
            if components[..i].iter().any(|o| o.prime == c.prime) {
                return Err(HspError::domain(format!("prime {} repeated", c.prime)));
            }
        }
        Ok(GroupSpec::Abelian(components))
    }

    /// `Z_p^n`.
    pub fn elementary(prime: u32, dim: usize) -> Result<Self> {
        Self::abelian(vec![Component::new(prime, dim)])
    }

    pub fn table(rows: Vec<Vec<u32>>) -> Result<Self> {
        Ok(GroupSpec::Table(Arc::new(TableGroup::new(rows)?)))
    }

    pub fn components(&self) -> &[Component] {
        match self {
            GroupSpec::Abelian(c) => c,
            GroupSpec::Table(_) => &[],
        }
    }

    /// Offset of each component inside a packed residue vector, plus the total length.
    pub fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.components().len() + 1);
        let mut acc = 0;
        out.push(0);
        for c in self.components() {
            acc += c.dim;
            out.push(acc);
        }
        out
    }

    fn packed_len(&self) -> usize {
        self.components().iter().map(|c| c.dim).sum()
    }

    /// Checks that `a` is an element of this group.
    pub fn check(&self, a: &GroupElement) -> Result<()> {
        match (self, a) {
            (GroupSpec::Abelian(comps), GroupElement::Residues(r)) => {
                if r.len() != self.packed_len() {
                    return Err(HspError::structural(format!(
                        "element has {} residues, group expects {}",
                        r.len(),
                        self.packed_len()
                    )));
                }
                let mut off = 0;
                for c in comps {
                    if let Some(v) = r[off..off + c.dim].iter().find(|&&v| v >= c.prime) {
                        return Err(HspError::structural(format!(
                            "residue {v} not reduced modulo {}",
                            c.prime
                        )));
                    }
                    off += c.dim;
                }
                Ok(())
            }
            (GroupSpec::Table(t), GroupElement::Index(i)) => {
                if (*i as usize) < t.order() {
                    Ok(())
                } else {
                    Err(HspError::structural(format!(
                        "index {i} out of range for table group of order {}",
                        t.order()
                    )))
                }
            }
            _ => Err(HspError::structural(
                "element kind does not match group kind",
            )),
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self {
            GroupSpec::Abelian(_) => GroupElement::Residues(vec![0; self.packed_len()]),
            GroupSpec::Table(t) => GroupElement::Index(t.identity()),
        }
    }

    /// The group operation. Abelian groups add componentwise modulo each prime.
    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    pub fn inv(&self, a: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        Ok(self.inv_unchecked(a))
    }

    /// `a^{-1} b`.
    pub fn quotient(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.quotient_unchecked(a, b))
    }

    pub(crate) fn mul_unchecked(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        match (self, a, b) {
            (GroupSpec::Abelian(comps), GroupElement::Residues(x), GroupElement::Residues(y)) => {
                let mut out = Vec::with_capacity(x.len());
                let mut off = 0;
                for c in comps {
                    let p = c.prime as u64;
                    for j in off..off + c.dim {
                        out.push(((x[j] as u64 + y[j] as u64) % p) as u32);
                    }
                    off += c.dim;
                }
                GroupElement::Residues(out)
            }
            (GroupSpec::Table(t), GroupElement::Index(x), GroupElement::Index(y)) => {
                GroupElement::Index(t.mul(*x, *y))
            }
            _ => unreachable!("element kind checked by caller"),
        }
    }

    pub(crate) fn inv_unchecked(&self, a: &GroupElement) -> GroupElement {
        match (self, a) {
            (GroupSpec::Abelian(comps), GroupElement::Residues(x)) => {
                let mut out = Vec::with_capacity(x.len());
                let mut off = 0;
                for c in comps {
                    for &v in &x[off..off + c.dim] {
                        out.push(if v == 0 { 0 } else { c.prime - v });
                    }
                    off += c.dim;
                }
                GroupElement::Residues(out)
            }
            (GroupSpec::Table(t), GroupElement::Index(x)) => GroupElement::Index(t.inv(*x)),
            _ => unreachable!("element kind checked by caller"),
        }
    }

    pub(crate) fn quotient_unchecked(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        match (self, a, b) {
            (GroupSpec::Abelian(comps), GroupElement::Residues(x), GroupElement::Residues(y)) => {
                let mut out = Vec::with_capacity(x.len());
                let mut off = 0;
                for c in comps {
                    let p = c.prime;
                    for j in off..off + c.dim {
                        out.push(if y[j] >= x[j] {
                            y[j] - x[j]
                        } else {
                            p - x[j] + y[j]
                        });
                    }
                    off += c.dim;
                }
                GroupElement::Residues(out)
            }
            (GroupSpec::Table(t), GroupElement::Index(x), GroupElement::Index(y)) => {
                GroupElement::Index(t.mul(t.inv(*x), *y))
            }
            _ => unreachable!("element kind checked by caller"),
        }
    }

    /// `|G|`, exact.
    pub fn order(&self) -> BigUint {
        match self {
            GroupSpec::Abelian(comps) => {
                comps.iter().fold(BigUint::one(), |acc, c| acc * c.order())
            }
            GroupSpec::Table(t) => BigUint::from(t.order()),
        }
    }

    /// `|G|` if it fits in a `usize`.
    pub fn small_order(&self) -> Option<usize> {
        match self {
            GroupSpec::Abelian(comps) => comps.iter().try_fold(1usize, |acc, c| {
                (0..c.dim).try_fold(acc, |a, _| a.checked_mul(c.prime as usize))
            }),
            GroupSpec::Table(t) => Some(t.order()),
        }
    }

    /// A uniformly random element.
    pub fn uniform_element(&self, rng: &mut RngStream) -> GroupElement {
        match self {
            GroupSpec::Abelian(comps) => {
                let mut out = Vec::with_capacity(self.packed_len());
                for c in comps {
                    for _ in 0..c.dim {
                        out.push(rng.random_range(0..c.prime));
                    }
                }
                GroupElement::Residues(out)
            }
            GroupSpec::Table(t) => GroupElement::Index(rng.random_range(0..t.order() as u32)),
        }
    }

    /// Every element, in a fixed order. Fails when `|G| > limit`.
    ///
    /// Abelian elements are listed in mixed-radix order with the last residue
    /// varying fastest; table elements by index.
    pub fn elements(&self, limit: usize) -> Result<Vec<GroupElement>> {
        let order = self.small_order().filter(|&n| n <= limit).ok_or_else(|| {
            HspError::capacity(format!("group order exceeds enumeration limit {limit}"))
        })?;
        Ok((0..order).map(|i| self.element_at(i)).collect())
    }

    /// The `i`-th element in the order used by [`GroupSpec::elements`].
    pub fn element_at(&self, mut i: usize) -> GroupElement {
        match self {
            GroupSpec::Abelian(comps) => {
                let mut radices = Vec::with_capacity(self.packed_len());
                for c in comps {
                    radices.extend(std::iter::repeat_n(c.prime as usize, c.dim));
                }
                let mut out = vec![0u32; radices.len()];
                for j in (0..radices.len()).rev() {
                    out[j] = (i % radices[j]) as u32;
                    i /= radices[j];
                }
                GroupElement::Residues(out)
            }
            GroupSpec::Table(_) => GroupElement::Index(i as u32),
        }
    }

    /// Inverse of [`GroupSpec::element_at`].
    pub fn index_of(&self, a: &GroupElement) -> usize {
        match (self, a) {
            (GroupSpec::Abelian(comps), GroupElement::Residues(r)) => {
                let mut idx = 0usize;
                let mut j = 0;
                for c in comps {
                    for _ in 0..c.dim {
                        idx = idx * c.prime as usize + r[j] as usize;
                        j += 1;
                    }
                }
                idx
            }
            (GroupSpec::Table(_), GroupElement::Index(i)) => *i as usize,
            _ => panic!("element kind does not match group kind"),
        }
    }

    /// Same group as a Cayley table, indexed as in [`GroupSpec::element_at`].
    pub fn to_table(&self) -> Result<GroupSpec> {
        match self {
            GroupSpec::Table(_) => Ok(self.clone()),
            GroupSpec::Abelian(_) => {
                let elems = self.elements(MAX_TABLE_ORDER)?;
                let rows = elems
                    .iter()
                    .map(|a| {
                        elems
                            .iter()
                            .map(|b| self.index_of(&self.mul_unchecked(a, b)) as u32)
                            .collect()
                    })
                    .collect();
                GroupSpec::table(rows)
            }
        }
    }

    pub fn is_abelian_product(&self) -> bool {
        matches!(self, GroupSpec::Abelian(_))
    }
}
