//! Hidden-subgroup instances, the coset-labeling function and metered example sampling.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rand::Rng;

use crate::error::{HspError, Result};
use crate::family::FamilyDescriptor;
use crate::group::{Component, GroupElement, GroupSpec};
use crate::linalg;
use crate::rng::{mix64, RngStream};
use crate::subgroup::Subgroup;

/// Largest index `|G|/|H|` for which 64-bit labels are handed out.
///
/// At `2^30` cosets the chance that two distinct cosets share a label is
/// below `2^-4`; tests that must be exact compare coset representatives.
pub const MAX_LABELED_INDEX: u64 = 1 << 30;

/// A hidden-subgroup instance: group, hidden subgroup, candidate family and
/// the salt of the labeling function.
#[derive(Debug, Clone)]
pub struct HspInstance {
    group: GroupSpec,
    hidden: Subgroup,
    family: FamilyDescriptor,
    salt: u64,
}

/// One uniform example `(x, f(x))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    pub point: GroupElement,
    pub label: u64,
}

impl HspInstance {
    pub fn new(
        group: GroupSpec,
        hidden: Subgroup,
        family: FamilyDescriptor,
        salt: u64,
    ) -> Result<Self> {
        if hidden.group() != &group || family.group() != &group {
            return Err(HspError::structural(
                "instance parts belong to different groups",
            ));
        }
        if !family.contains(&hidden) {
            return Err(HspError::domain(
                "hidden subgroup is not a member of the candidate family",
            ));
        }
        if hidden.index() > BigUint::from(MAX_LABELED_INDEX) {
            return Err(HspError::capacity(format!(
                "index {} exceeds the labeling limit {MAX_LABELED_INDEX}",
                hidden.index()
            )));
        }
        Ok(HspInstance {
            group,
            hidden,
            family,
            salt,
        })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn hidden(&self) -> &Subgroup {
        &self.hidden
    }

    pub fn family(&self) -> &FamilyDescriptor {
        &self.family
    }

    pub fn salt(&self) -> u64 {
        self.salt
    }

    /// Same instance with a different label salt.
    pub fn with_salt(&self, salt: u64) -> Self {
        HspInstance {
            salt,
            ..self.clone()
        }
    }

    /// Canonical representative of `xH`.
    pub fn coset_rep(&self, x: &GroupElement) -> Result<GroupElement> {
        self.hidden.coset_rep(x)
    }

    /// `f(x)`: a salted hash of the canonical representative of `xH`.
    ///
    /// `f(x) = f(y)` iff `x^{-1} y` lies in the hidden subgroup (up to 64-bit
    /// hash collisions between distinct cosets).
    pub fn label(&self, x: &GroupElement) -> Result<u64> {
        self.group.check(x)?;
        Ok(self.label_unchecked(x))
    }

    fn label_unchecked(&self, x: &GroupElement) -> u64 {
        let rep = self.hidden.coset_rep_unchecked(x);
        let mut h = mix64(self.salt);
        match &rep {
            GroupElement::Residues(r) => {
                for &v in r {
                    h = mix64(h ^ (v as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93));
                }
            }
            GroupElement::Index(i) => h = mix64(h ^ *i as u64),
        }
        h
    }

    /// A sampler drawing uniform examples from this instance.
    pub fn sampler(&self, rng: RngStream) -> MeteredSampler<'_> {
        MeteredSampler {
            instance: self,
            rng,
            drawn: 0,
            transcript: None,
        }
    }
}

/// Source of i.i.d. uniform examples that counts every draw.
///
/// This is the learner's only access to the hidden function.
pub struct MeteredSampler<'a> {
    instance: &'a HspInstance,
    rng: RngStream,
    drawn: u64,
    transcript: Option<Vec<Example>>,
}

impl<'a> MeteredSampler<'a> {
    /// Keep a copy of every example drawn from now on.
    pub fn recording(mut self) -> Self {
        self.transcript = Some(Vec::new());
        self
    }

    pub fn draw(&mut self) -> Example {
        let point = self.instance.group.uniform_element(&mut self.rng);
        let label = self.instance.label_unchecked(&point);
        self.drawn += 1;
        let ex = Example { point, label };
        if let Some(t) = self.transcript.as_mut() {
            t.push(ex.clone());
        }
        ex
    }

    pub fn draw_many(&mut self, count: usize) -> Vec<Example> {
        (0..count).map(|_| self.draw()).collect()
    }

    /// Total examples drawn so far.
    pub fn drawn(&self) -> u64 {
        self.drawn
    }

    pub fn group(&self) -> &'a GroupSpec {
        &self.instance.group
    }

    pub fn family(&self) -> &'a FamilyDescriptor {
        &self.instance.family
    }

    /// Examples recorded since [`MeteredSampler::recording`]; empty if recording was never enabled.
    pub fn transcript(&self) -> &[Example] {
        self.transcript.as_deref().unwrap_or(&[])
    }
}

/// Parameters of an rAHSP instance: one `(p_i, n_i, k_i)` per prime component.
/// A single component is a generalized Simon problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RahspParams {
    parts: Vec<(u32, usize, usize)>,
}

impl RahspParams {
    pub fn new(parts: Vec<(u32, usize, usize)>) -> Result<Self> {
        if parts.is_empty() {
            return Err(HspError::domain("at least one component is required"));
        }
        let comps = parts
            .iter()
            .map(|&(p, n, _)| Component::new(p, n))
            .collect();
        GroupSpec::abelian(comps)?;
        for &(p, n, k) in &parts {
            crate::subgroup::check_rank_params(p, n, k)?;
        }
        Ok(RahspParams { parts })
    }

    /// `GSP(p, n, k)`: a rank-`k` subgroup hidden in `Z_p^n`.
    pub fn gsp(prime: u32, dim: usize, rank: usize) -> Result<Self> {
        Self::new(vec![(prime, dim, rank)])
    }

    pub fn parts(&self) -> &[(u32, usize, usize)] {
        &self.parts
    }

    pub fn group(&self) -> GroupSpec {
        GroupSpec::Abelian(
            self.parts
                .iter()
                .map(|&(p, n, _)| Component::new(p, n))
                .collect(),
        )
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.parts.iter().map(|&(_, _, k)| k).collect()
    }

    pub fn family(&self) -> Result<FamilyDescriptor> {
        FamilyDescriptor::rahsp(&self.group(), self.ranks())
    }

    /// `Some((p, n, k))` for a single-component instance.
    pub fn as_gsp(&self) -> Option<(u32, usize, usize)> {
        match self.parts.as_slice() {
            [one] => Some(*one),
            _ => None,
        }
    }
}

impl fmt::Display for RahspParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some((p, n, k)) = self.as_gsp() {
            return write!(f, "{p},{n},{k}");
        }
        for (i, (p, n, k)) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}^{n}:{k}")?;
        }
        Ok(())
    }
}

impl FromStr for RahspParams {
    type Err = HspError;

    /// Accepts `p,n,k` or `p1^n1:k1,p2^n2:k2,...`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |what: &str| HspError::domain(format!("cannot parse `{s}`: {what}"));
        let int = |t: &str| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| bad("expected an integer"))
        };
        if s.contains('^') {
            let parts = s
                .split(',')
                .map(|term| {
                    let (pn, k) = term.split_once(':').ok_or_else(|| bad("missing `:k`"))?;
                    let (p, n) = pn.split_once('^').ok_or_else(|| bad("missing `^n`"))?;
                    Ok((int(p)? as u32, int(n)? as usize, int(k)? as usize))
                })
                .collect::<Result<Vec<_>>>()?;
            RahspParams::new(parts)
        } else {
            let v = s.split(',').map(int).collect::<Result<Vec<_>>>()?;
            match v.as_slice() {
                &[p, n, k] => RahspParams::gsp(p as u32, n as usize, k as usize),
                _ => Err(bad("expected p,n,k")),
            }
        }
    }
}

/// A random instance: the hidden subgroup is a product of independent
/// uniform rank-`k_i` subgroups and the label salt is drawn from `rng`.
pub fn random_instance(params: &RahspParams, rng: &mut RngStream) -> Result<HspInstance> {
    let group = params.group();
    let family = params.family()?;
    let bases = params
        .parts()
        .iter()
        .map(|&(p, n, k)| linalg::random_subspace(p, n, k, rng))
        .collect();
    let hidden = Subgroup::from_bases(&group, bases)?;
    let salt = rng.random();
    HspInstance::new(group, hidden, family, salt)
}
