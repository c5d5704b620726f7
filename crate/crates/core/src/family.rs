//! Candidate families of hidden subgroups.

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{HspError, Result};
use crate::group::GroupSpec;
use crate::linalg::{self, EchelonBasis};
use crate::subgroup::{self, Subgroup, ENUMERATION_LIMIT};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyKind {
    /// All products `H_1 x ... x H_m` with `rank(H_i) = k_i`.
    RahspRanks(Vec<usize>),
    /// An explicit list of distinct subgroups.
    ExplicitList(Vec<Subgroup>),
}

/// A family of candidate subgroups together with the summary quantities the
/// learner and the bound evaluators need.
#[derive(Debug, Clone)]
pub struct FamilyDescriptor {
    group: GroupSpec,
    kind: FamilyKind,
    subgroup_rank: usize,
    max_index: BigUint,
    min_index: BigUint,
    size: BigUint,
}

impl FamilyDescriptor {
    /// The rAHSP family over `group = prod Z_{p_i}^{n_i}` with ranks `k_i`, `1 <= k_i < n_i`.
    pub fn rahsp(group: &GroupSpec, ranks: Vec<usize>) -> Result<Self> {
        let comps = group.components();
        if !group.is_abelian_product() {
            return Err(HspError::domain(
                "rank family requires a structured abelian group",
            ));
        }
        if comps.len() != ranks.len() {
            return Err(HspError::domain(format!(
                "{} ranks given for {} components",
                ranks.len(),
                comps.len()
            )));
        }
        let mut index = BigUint::one();
        let mut size = BigUint::one();
        for (c, &k) in comps.iter().zip(&ranks) {
            subgroup::check_rank_params(c.prime, c.dim, k)?;
            index *= BigUint::from(c.prime).pow((c.dim - k) as u32);
            size *= subgroup::subgroup_count(c.prime, c.dim, k)?;
        }
        Ok(FamilyDescriptor {
            group: group.clone(),
            subgroup_rank: ranks.iter().copied().max().unwrap_or(0),
            kind: FamilyKind::RahspRanks(ranks),
            max_index: index.clone(),
            min_index: index,
            size,
        })
    }

    /// An explicit family. Duplicates are dropped.
    pub fn explicit(group: &GroupSpec, members: Vec<Subgroup>) -> Result<Self> {
        if members.is_empty() {
            return Err(HspError::domain("candidate family is empty"));
        }
        let mut distinct: Vec<Subgroup> = Vec::with_capacity(members.len());
        for h in members {
            if h.group() != group {
                return Err(HspError::structural(
                    "family member belongs to a different group",
                ));
            }
            if !distinct.contains(&h) {
                distinct.push(h);
            }
        }
        let indices: Vec<BigUint> = distinct.iter().map(Subgroup::index).collect();
        Ok(FamilyDescriptor {
            group: group.clone(),
            subgroup_rank: distinct.iter().map(Subgroup::rank).max().unwrap_or(0),
            max_index: indices.iter().max().cloned().unwrap_or_default(),
            min_index: indices.iter().min().cloned().unwrap_or_default(),
            size: BigUint::from(distinct.len()),
            kind: FamilyKind::ExplicitList(distinct),
        })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    /// `sr(H) = max_{H in family} r(H)`.
    pub fn subgroup_rank(&self) -> usize {
        self.subgroup_rank
    }

    /// `sr` as used by the learner's plan: never below 1, so the probe loop is nonempty.
    pub fn planning_rank(&self) -> usize {
        self.subgroup_rank.max(1)
    }

    /// `max_{H} |G|/|H|`.
    pub fn max_index(&self) -> &BigUint {
        &self.max_index
    }

    /// `min_{H} |G|/|H|`.
    pub fn min_index(&self) -> &BigUint {
        &self.min_index
    }

    /// Number of candidate subgroups.
    pub fn size(&self) -> &BigUint {
        &self.size
    }

    pub fn contains(&self, h: &Subgroup) -> bool {
        if h.group() != &self.group {
            return false;
        }
        match &self.kind {
            FamilyKind::RahspRanks(ranks) => &h.component_ranks() == ranks,
            FamilyKind::ExplicitList(list) => list.contains(h),
        }
    }

    /// Every member, as long as there are at most `ENUMERATION_LIMIT` of them.
    pub fn members(&self) -> Result<Vec<Subgroup>> {
        match &self.kind {
            FamilyKind::ExplicitList(list) => Ok(list.clone()),
            FamilyKind::RahspRanks(ranks) => {
                if self.size > BigUint::from(ENUMERATION_LIMIT) {
                    return Err(HspError::capacity(format!(
                        "family of {} subgroups exceeds the enumeration limit {ENUMERATION_LIMIT}",
                        self.size
                    )));
                }
                let mut acc: Vec<Vec<EchelonBasis>> = vec![Vec::new()];
                for (c, &k) in self.group.components().iter().zip(ranks) {
                    let part = linalg::enumerate_subspaces(c.prime, c.dim, k);
                    acc = acc
                        .iter()
                        .flat_map(|prefix| {
                            part.iter().map(move |b| {
                                let mut v = prefix.clone();
                                v.push(b.clone());
                                v
                            })
                        })
                        .collect();
                }
                acc.into_iter()
                    .map(|bases| Subgroup::from_bases(&self.group, bases))
                    .collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{Component, GroupElement};

    #[test]
    fn rahsp_summary() {
        let g = GroupSpec::abelian(vec![Component::new(2, 2), Component::new(3, 2)]).unwrap();
        let f = FamilyDescriptor::rahsp(&g, vec![1, 1]).unwrap();
        assert_eq!(f.size(), &BigUint::from(12u32));
        assert_eq!(f.max_index(), &BigUint::from(6u32));
        assert_eq!(f.min_index(), f.max_index());
        assert_eq!(f.subgroup_rank(), 1);
        let members = f.members().unwrap();
        assert_eq!(members.len(), 12);
        assert!(members
            .iter()
            .all(|h| f.contains(h) && h.index() == BigUint::from(6u32)));
    }

    #[test]
    fn rahsp_rejects_bad_ranks() {
        let g = GroupSpec::elementary(2, 3).unwrap();
        assert!(FamilyDescriptor::rahsp(&g, vec![3]).is_err());
        assert!(FamilyDescriptor::rahsp(&g, vec![0]).is_err());
        assert!(FamilyDescriptor::rahsp(&g, vec![1, 1]).is_err());
    }

    #[test]
    fn explicit_with_trivial_member() {
        let g = GroupSpec::elementary(2, 2).unwrap();
        let t = Subgroup::trivial(&g);
        let h = Subgroup::span(&g, &[GroupElement::Residues(vec![1, 1])]).unwrap();
        let f = FamilyDescriptor::explicit(&g, vec![t.clone(), h.clone(), t]).unwrap();
        assert_eq!(f.size(), &BigUint::from(2u32));
        assert_eq!(f.max_index(), &BigUint::from(4u32));
        assert_eq!(f.min_index(), &BigUint::from(2u32));
        assert_eq!(f.subgroup_rank(), 1);

        let only_trivial = FamilyDescriptor::explicit(&g, vec![Subgroup::trivial(&g)]).unwrap();
        assert_eq!(only_trivial.subgroup_rank(), 0);
        assert_eq!(only_trivial.planning_rank(), 1);
        assert!(FamilyDescriptor::explicit(&g, vec![]).is_err());
    }
}
