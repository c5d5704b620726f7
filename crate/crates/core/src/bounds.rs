//! Closed-form sample-complexity bounds and the entropy helpers behind them.
//!
//! Every count stays an exact big integer until the final real-valued step.
//! Logarithms are base 2. Asymptotic constants are not applied: each function
//! returns the bare formula value.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{HspError, Result};
use crate::family::{FamilyDescriptor, FamilyKind};
use crate::oracle::RahspParams;

/// `log2(v)` for an arbitrarily large integer, to double precision.
pub fn log2_big(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 64 {
        return (v.to_u64().unwrap_or(0) as f64).log2();
    }
    let shift = bits - 64;
    let top = (v >> shift).to_u64().unwrap_or(u64::MAX);
    (top as f64).log2() + shift as f64
}

/// `sqrt(v * scale)` computed in the log domain, so `v` may exceed `f64` range.
fn sqrt_scaled(v: &BigUint, scale: f64) -> f64 {
    if let Some(x) = v.to_f64().filter(|x| x.is_finite() && *x < 1e300) {
        return (x * scale).sqrt();
    }
    (0.5 * (log2_big(v) + scale.log2())).exp2()
}

/// Bound summary for one family.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub lower: f64,
    pub upper: f64,
    /// The common value when lower and upper formulas coincide (single component).
    pub theta: Option<f64>,
    pub group_order: BigUint,
    pub family_size: BigUint,
    pub min_subgroup_order: BigUint,
    pub max_subgroup_order: BigUint,
    pub subgroup_rank: usize,
}

fn member_indices(family: &FamilyDescriptor) -> Vec<BigUint> {
    match family.kind() {
        FamilyKind::RahspRanks(_) => vec![family.max_index().clone()],
        FamilyKind::ExplicitList(list) => list.iter().map(|h| h.index()).collect(),
    }
}

/// Information-theoretic lower bound
/// `max{ min_H log|F| / log(|G|/|H|), min_H sqrt((|G|/|H|) log|F| / log(|G|/|H|)) }`.
pub fn lower_bound(family: &FamilyDescriptor) -> Result<f64> {
    if *family.size() < BigUint::from(2u32) {
        return Err(HspError::domain(
            "lower bound needs at least two candidate subgroups",
        ));
    }
    let log_size = log2_big(family.size());
    let mut first = f64::INFINITY;
    let mut second = f64::INFINITY;
    for idx in member_indices(family) {
        if idx <= BigUint::one() {
            return Err(HspError::domain(
                "lower bound is undefined for a candidate of index 1",
            ));
        }
        let ratio = log_size / log2_big(&idx);
        first = first.min(ratio);
        second = second.min(sqrt_scaled(&idx, ratio));
    }
    Ok(first.max(second))
}

/// Upper bound `max{ sr, sqrt(max_H (|G|/|H|) * sr) }`.
pub fn upper_bound(family: &FamilyDescriptor) -> Result<f64> {
    let sr = family.subgroup_rank();
    if sr == 0 {
        return Err(HspError::domain(
            "upper bound needs subgroup rank at least 1",
        ));
    }
    Ok((sr as f64).max(sqrt_scaled(family.max_index(), sr as f64)))
}

/// Bounds specialised to rank families:
/// lower `max{ min_i k_i, min_i sqrt(k_i I) }`, upper `max_i max{ k_i, sqrt(k_i I) }`,
/// with `I = prod_j p_j^{n_j - k_j}`.
pub fn rahsp_bounds(params: &RahspParams) -> Result<BoundReport> {
    let family = params.family()?;
    let index = family.max_index();
    let ks: Vec<f64> = params.ranks().iter().map(|&k| k as f64).collect();
    let roots: Vec<f64> = ks.iter().map(|&k| sqrt_scaled(index, k)).collect();
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let lower = min(&ks).max(min(&roots));
    let upper = ks
        .iter()
        .zip(&roots)
        .map(|(&k, &r)| k.max(r))
        .fold(0.0, f64::max);
    let group_order = params.group().order();
    let subgroup_order = &group_order / index;
    Ok(BoundReport {
        lower,
        upper,
        theta: params.as_gsp().map(|_| upper),
        family_size: family.size().clone(),
        min_subgroup_order: subgroup_order.clone(),
        max_subgroup_order: subgroup_order,
        subgroup_rank: family.subgroup_rank(),
        group_order,
    })
}

/// Sample complexity of the generalized Simon problem, `max{k, sqrt(k p^{n-k})}`.
pub fn gsp_theta(prime: u32, dim: usize, rank: usize) -> Result<f64> {
    crate::subgroup::check_rank_params(prime, dim, rank)?;
    let index = BigUint::from(prime).pow((dim - rank) as u32);
    Ok((rank as f64).max(sqrt_scaled(&index, rank as f64)))
}

/// `-q log q - (1-q) log(1-q)`, with the endpoints defined as 0.
pub fn binary_entropy(q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(HspError::domain(format!("probability {q} outside [0, 1]")));
    }
    let term = |x: f64| if x == 0.0 { 0.0 } else { -x * x.log2() };
    Ok(term(q) + term(1.0 - q))
}

/// `(1 - delta) log|F| - H(delta)`: the mutual information an example
/// sequence must carry to identify the hidden subgroup with error `delta`.
pub fn fano_floor(delta: f64, family_size: &BigUint) -> Result<f64> {
    if !(0.0..0.5).contains(&delta) {
        return Err(HspError::domain(format!(
            "delta must lie in [0, 1/2), got {delta}"
        )));
    }
    if *family_size < BigUint::from(2u32) {
        return Err(HspError::domain("family must have at least two members"));
    }
    Ok((1.0 - delta) * log2_big(family_size) - binary_entropy(delta)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{GroupElement, GroupSpec};
    use crate::subgroup::Subgroup;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn log2_of_large_values() {
        assert_eq!(log2_big(&BigUint::from(1024u32)), 10.0);
        let big = BigUint::from(2u32).pow(3000);
        assert!(close(log2_big(&big), 3000.0, 1e-9));
        let big = BigUint::from(3u32).pow(700);
        assert!(close(log2_big(&big), 700.0 * 3f64.log2(), 1e-9));
    }

    #[test]
    fn lower_bound_simon_three() {
        let fam = RahspParams::gsp(2, 3, 1).unwrap().family().unwrap();
        // max{log 7 / 2, sqrt(4 log 7 / 2)}
        let expect = (4.0 * 7f64.log2() / 2.0).sqrt();
        assert!(close(lower_bound(&fam).unwrap(), expect, 1e-12));
        assert!(close(lower_bound(&fam).unwrap(), 2.370, 1e-3));
    }

    #[test]
    fn lower_bound_two_index_two_subgroups() {
        let g = GroupSpec::elementary(2, 2).unwrap();
        let a = Subgroup::span(&g, &[GroupElement::Residues(vec![1, 0])]).unwrap();
        let b = Subgroup::span(&g, &[GroupElement::Residues(vec![0, 1])]).unwrap();
        let fam = FamilyDescriptor::explicit(&g, vec![a, b]).unwrap();
        assert!(close(lower_bound(&fam).unwrap(), 2f64.sqrt(), 1e-12));
    }

    #[test]
    fn lower_bound_domain() {
        let g = GroupSpec::elementary(2, 2).unwrap();
        let single = FamilyDescriptor::explicit(&g, vec![Subgroup::trivial(&g)]).unwrap();
        assert!(lower_bound(&single).is_err());
        let with_whole =
            FamilyDescriptor::explicit(&g, vec![Subgroup::trivial(&g), Subgroup::whole(&g)])
                .unwrap();
        assert!(lower_bound(&with_whole).is_err());
    }

    #[test]
    fn upper_bound_branches() {
        let fam = RahspParams::gsp(2, 4, 1).unwrap().family().unwrap();
        assert!(close(upper_bound(&fam).unwrap(), 8f64.sqrt(), 1e-12));
        let fam = RahspParams::gsp(2, 6, 4).unwrap().family().unwrap();
        assert_eq!(upper_bound(&fam).unwrap(), 4.0);
    }

    #[test]
    fn rahsp_report_values() {
        let r = rahsp_bounds(&RahspParams::gsp(2, 6, 2).unwrap()).unwrap();
        assert!(close(r.lower, 32f64.sqrt(), 1e-12));
        assert_eq!(r.lower, r.upper);
        assert_eq!(r.theta, Some(r.upper));

        let r = rahsp_bounds(&"2^3:1,3^3:1".parse().unwrap()).unwrap();
        assert!(close(r.lower, 6.0, 1e-12));
        assert!(r.theta.is_none());
        assert_eq!(r.group_order, BigUint::from(216u32));
        assert_eq!(r.max_subgroup_order, BigUint::from(6u32));
    }

    #[test]
    fn gsp_theta_values() {
        assert!(close(gsp_theta(3, 5, 2).unwrap(), 54f64.sqrt(), 1e-12));
        assert_eq!(gsp_theta(2, 10, 9).unwrap(), 9.0);
        for n in 2..60 {
            let v = gsp_theta(2, n, 1).unwrap();
            assert!(close(v, 2f64.powi(n as i32 - 1).sqrt(), 1e-9 * v));
        }
        assert!(gsp_theta(2, 4, 4).is_err());
        // Big exponent stays finite.
        assert!(gsp_theta(3, 1200, 1).unwrap().is_finite());
    }

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!(close(binary_entropy(0.25).unwrap(), 0.8113, 1e-4));
        assert!(binary_entropy(1.5).is_err());
    }

    #[test]
    fn fano_values() {
        assert!(close(
            fano_floor(0.0, &BigUint::from(8u32)).unwrap(),
            3.0,
            1e-12
        ));
        assert!(close(
            fano_floor(1.0 / 3.0, &BigUint::from(7u32)).unwrap(),
            0.953,
            1e-3
        ));
        assert!(fano_floor(0.5, &BigUint::from(8u32)).is_err());
        assert!(fano_floor(0.1, &BigUint::one()).is_err());
        let mut prev = f64::INFINITY;
        for i in 0..50 {
            let v = fano_floor(i as f64 / 100.0, &BigUint::from(64u32)).unwrap();
            assert!(v < prev);
            assert!(v > 6.0 / 2.0 - 1.0);
            prev = v;
        }
    }
}
