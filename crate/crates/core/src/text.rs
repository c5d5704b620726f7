//! Plain-text formats for groups, subgroups and instances.
//!
//! ```text
//! abelian
//! component p=2 n=3
//! component p=3 n=2
//! hidden rank=1,1
//! basis 1 0 1
//! basis 1 2
//! salt=42
//! ```
//!
//! A table group is written `table n=<N>` followed by `N` rows of `N`
//! indices. Its hidden subgroup is written `hidden elements=<i,j,...>`, and an
//! instance over a table group may list further candidates with
//! `candidate elements=<...>` lines. Blank lines and `#` comments are ignored.

use std::fmt::Write as _;

use crate::error::{HspError, Result};
use crate::family::{FamilyDescriptor, FamilyKind};
use crate::group::{Component, GroupSpec};
use crate::linalg::EchelonBasis;
use crate::oracle::HspInstance;
use crate::subgroup::Subgroup;

struct Lines<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        Lines { lines, pos: 0 }
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.lines.get(self.pos).copied()
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let out = self.peek();
        self.pos += out.is_some() as usize;
        out
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let last = self.lines.last().map_or(0, |l| l.0);
        self.next().ok_or_else(|| {
            HspError::parse(
                last + 1,
                format!("unexpected end of input, expected {what}"),
            )
        })
    }

    fn last_line(&self) -> usize {
        self.lines.last().map_or(0, |l| l.0)
    }
}

fn field<'a>(line: usize, text: &'a str, key: &str) -> Result<&'a str> {
    text.split_whitespace()
        .find_map(|tok| tok.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .ok_or_else(|| HspError::parse(line, format!("missing `{key}=`")))
}

fn num<T: std::str::FromStr>(line: usize, tok: &str) -> Result<T> {
    tok.trim()
        .parse()
        .map_err(|_| HspError::parse(line, format!("`{tok}` is not a valid number")))
}

fn num_list<T: std::str::FromStr>(line: usize, text: &str) -> Result<Vec<T>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(|t| num(line, t)).collect()
}

fn read_group(lines: &mut Lines<'_>) -> Result<GroupSpec> {
    let (ln, head) = lines.expect("`abelian` or `table n=<N>`")?;
    let with_line = |e: HspError| match e {
        HspError::Parse { .. } => e,
        other => HspError::parse(ln, other.to_string()),
    };
    if head == "abelian" {
        let mut comps = Vec::new();
        while let Some((l, text)) = lines.peek() {
            if !text.starts_with("component") {
                break;
            }
            lines.next();
            comps.push(Component::new(
                num(l, field(l, text, "p")?)?,
                num(l, field(l, text, "n")?)?,
            ));
        }
        GroupSpec::abelian(comps).map_err(with_line)
    } else if head.starts_with("table") {
        let n: usize = num(ln, field(ln, head, "n")?)?;
        if n > crate::group::MAX_TABLE_ORDER {
            return Err(HspError::capacity(format!(
                "table group of order {n} exceeds the limit"
            )));
        }
        let mut rows = Vec::with_capacity(n);
        for _ in 0..n {
            let (l, text) = lines.expect("a table row")?;
            rows.push(
                text.split_whitespace()
                    .map(|t| num(l, t))
                    .collect::<Result<Vec<u32>>>()?,
            );
        }
        GroupSpec::table(rows).map_err(|e| match e {
            HspError::Capacity(_) => e,
            other => with_line(other),
        })
    } else {
        Err(HspError::parse(
            ln,
            format!("expected `abelian` or `table n=<N>`, found `{head}`"),
        ))
    }
}

fn read_subgroup(lines: &mut Lines<'_>, group: &GroupSpec) -> Result<Subgroup> {
    let (ln, head) = lines.expect("`hidden ...`")?;
    if !head.starts_with("hidden") {
        return Err(HspError::parse(
            ln,
            format!("expected `hidden`, found `{head}`"),
        ));
    }
    let reline = |e: HspError| HspError::parse(ln, e.to_string());
    match group {
        GroupSpec::Abelian(comps) => {
            let ranks: Vec<usize> = num_list(ln, field(ln, head, "rank")?)?;
            if ranks.len() != comps.len() {
                return Err(HspError::parse(
                    ln,
                    format!("{} ranks for {} components", ranks.len(), comps.len()),
                ));
            }
            let mut bases = Vec::with_capacity(comps.len());
            for (c, &k) in comps.iter().zip(&ranks) {
                let mut rows = Vec::with_capacity(k);
                for _ in 0..k {
                    let (l, text) = lines.expect("`basis ...`")?;
                    let rest = text.strip_prefix("basis").ok_or_else(|| {
                        HspError::parse(l, format!("expected `basis`, found `{text}`"))
                    })?;
                    let row: Vec<u32> = rest
                        .split_whitespace()
                        .map(|t| num(l, t))
                        .collect::<Result<_>>()?;
                    if row.len() != c.dim || row.iter().any(|&v| v >= c.prime) {
                        return Err(HspError::parse(
                            l,
                            format!("basis row must have {} residues below {}", c.dim, c.prime),
                        ));
                    }
                    rows.push(row);
                }
                let basis = EchelonBasis::span(c.prime, c.dim, rows.iter().map(Vec::as_slice));
                if basis.rank() != k {
                    return Err(HspError::parse(
                        ln,
                        format!(
                            "basis rows for Z_{}^{} are linearly dependent",
                            c.prime, c.dim
                        ),
                    ));
                }
                bases.push(basis);
            }
            Subgroup::from_bases(group, bases).map_err(reline)
        }
        GroupSpec::Table(_) => {
            let els: Vec<u32> = num_list(ln, field(ln, head, "elements")?)?;
            Subgroup::from_elements(group, &els).map_err(reline)
        }
    }
}

pub fn parse_group(text: &str) -> Result<GroupSpec> {
    let mut lines = Lines::new(text);
    let g = read_group(&mut lines)?;
    if let Some((l, extra)) = lines.next() {
        return Err(HspError::parse(
            l,
            format!("unexpected trailing line `{extra}`"),
        ));
    }
    Ok(g)
}

/// Parses a subgroup section against a known group.
pub fn parse_subgroup(group: &GroupSpec, text: &str) -> Result<Subgroup> {
    let mut lines = Lines::new(text);
    let h = read_subgroup(&mut lines, group)?;
    if let Some((l, extra)) = lines.next() {
        return Err(HspError::parse(
            l,
            format!("unexpected trailing line `{extra}`"),
        ));
    }
    Ok(h)
}

/// Parses a full instance file.
///
/// Abelian instances use the rank family of the hidden subgroup. Table
/// instances use the hidden subgroup plus every `candidate` line.
pub fn parse_instance(text: &str) -> Result<HspInstance> {
    let mut lines = Lines::new(text);
    let group = read_group(&mut lines)?;
    let hidden = read_subgroup(&mut lines, &group)?;
    let mut candidates = vec![hidden.clone()];
    let mut salt = None;
    while let Some((l, text)) = lines.next() {
        if let Some(v) = text.strip_prefix("salt=") {
            salt = Some(num::<u64>(l, v)?);
        } else if text.starts_with("candidate") {
            if group.is_abelian_product() {
                return Err(HspError::parse(
                    l,
                    "candidate lines are only allowed for table groups",
                ));
            }
            let els: Vec<u32> = num_list(l, field(l, text, "elements")?)?;
            candidates.push(
                Subgroup::from_elements(&group, &els)
                    .map_err(|e| HspError::parse(l, e.to_string()))?,
            );
        } else {
            return Err(HspError::parse(l, format!("unexpected line `{text}`")));
        }
    }
    let salt = salt.ok_or_else(|| HspError::parse(lines.last_line(), "missing `salt=<u64>`"))?;
    let family = match &group {
        GroupSpec::Abelian(_) => FamilyDescriptor::rahsp(&group, hidden.component_ranks())?,
        GroupSpec::Table(_) => FamilyDescriptor::explicit(&group, candidates)?,
    };
    HspInstance::new(group, hidden, family, salt)
}

pub fn format_group(group: &GroupSpec) -> String {
    let mut out = String::new();
    match group {
        GroupSpec::Abelian(comps) => {
            out.push_str("abelian\n");
            for c in comps {
                let _ = writeln!(out, "component p={} n={}", c.prime, c.dim);
            }
        }
        GroupSpec::Table(t) => {
            let _ = writeln!(out, "table n={}", t.order());
            for a in 0..t.order() as u32 {
                let row: Vec<String> = t.row(a).iter().map(u32::to_string).collect();
                let _ = writeln!(out, "{}", row.join(" "));
            }
        }
    }
    out
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

pub fn format_subgroup(h: &Subgroup) -> String {
    let mut out = String::new();
    if let Some(bases) = h.bases() {
        let _ = writeln!(out, "hidden rank={}", join(&h.component_ranks()));
        for b in bases {
            for row in b.rows() {
                let row: Vec<String> = row.iter().map(u32::to_string).collect();
                let _ = writeln!(out, "basis {}", row.join(" "));
            }
        }
    } else if let Some(els) = h.table_elements() {
        let _ = writeln!(out, "hidden elements={}", join(els));
    }
    out
}

pub fn format_instance(inst: &HspInstance) -> String {
    let mut out = format_group(inst.group());
    out.push_str(&format_subgroup(inst.hidden()));
    if let FamilyKind::ExplicitList(list) = inst.family().kind() {
        for h in list.iter().filter(|h| *h != inst.hidden()) {
            if let Some(els) = h.table_elements() {
                let _ = writeln!(out, "candidate elements={}", join(els));
            }
        }
    }
    let _ = writeln!(out, "salt={}", inst.salt());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupElement;

    const MIXED: &str = "\
abelian
component p=2 n=3
component p=3 n=2
hidden rank=1,1
basis 1 0 1
basis 1 2   # generator of the Z_3 part
salt=42
";

    #[test]
    fn parses_abelian_instance() {
        let inst = parse_instance(MIXED).unwrap();
        assert_eq!(inst.salt(), 42);
        assert_eq!(inst.hidden().component_ranks(), vec![1, 1]);
        assert!(inst
            .hidden()
            .contains(&GroupElement::Residues(vec![1, 0, 1, 2, 1]))
            .unwrap());
        assert_eq!(
            parse_instance(&format_instance(&inst)).unwrap().hidden(),
            inst.hidden()
        );
    }

    #[test]
    fn basis_rows_are_canonicalized() {
        let g = parse_group("abelian\ncomponent p=3 n=2\n").unwrap();
        let h = parse_subgroup(&g, "hidden rank=1\nbasis 2 1\n").unwrap();
        assert_eq!(h.bases().unwrap()[0].rows(), &[vec![1, 2]]);
    }

    #[test]
    fn parses_table_instance() {
        let text = "table n=2\n0 1\n1 0\nhidden elements=0\ncandidate elements=0,1\nsalt=3\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.family().size(), &num_bigint::BigUint::from(2u32));
        let again = parse_instance(&format_instance(&inst)).unwrap();
        assert_eq!(again.family().size(), inst.family().size());
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_group("abelian\ncomponent p=4 n=2\n").unwrap_err();
        assert!(matches!(err, HspError::Parse { line: 1, .. }), "{err}");
        let err = parse_instance("abelian\ncomponent p=2 n=2\nhidden rank=1\nbasis 1 2\nsalt=1\n")
            .unwrap_err();
        assert!(matches!(err, HspError::Parse { line: 4, .. }), "{err}");
        let err =
            parse_instance("abelian\ncomponent p=2 n=2\nhidden rank=1\nbasis 1 1\n").unwrap_err();
        assert!(matches!(err, HspError::Parse { .. }), "{err}");
        assert!(parse_group("cyclic n=3").is_err());
        assert!(parse_group("table n=2\n0 1\n").is_err());
    }
}
