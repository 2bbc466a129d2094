//! The instance file format and its printer.
//!
//! ```text
//! [ring]
//! Zmod 4
//! [algebra]
//! Y : 1 : 2
//! [adjunction]
//! X : 2 : 2*Y
//! [module]
//! e0 : 0
//! [differential]
//! 0 : [[0]]
//! ```
//!
//! `[differential]` lists one matrix per expansion index `k`; entry `(i, j)` is the
//! coefficient of `e_i` in `d_k(e_j)`, and `d_0` omits the part `e_j a -> +-e_j da`
//! that is forced by the Leibniz rule. Missing indices are zero. A matrix may span
//! several lines. `#` starts a comment.

use std::fmt::Write as _;
use std::sync::Arc;

use super::grammar::{
    is_bracket_balanced, parse_aelem, parse_matrix, positioned, Cursor, Located, PosChar,
};
use super::InputError;
use crate::dga::{build_adjunction, AElem, ExteriorDGAlgebra};
use crate::expansion::{Expansion, ExpansionError, FreeBModule, Kind, SemiFreeDGModule};
use crate::gmod::{ADerivation, AMap, BasisElement, GradedFreeModule};
use crate::ring::BaseRing;

/// A validated semi-free DG `B`-module read from an instance file.
#[derive(Clone, Debug)]
pub struct Instance {
    module: SemiFreeDGModule,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = (self.module.space(), other.module.space());
        a.adjunction() == b.adjunction()
            && a.module() == b.module()
            && self.module.diff() == other.module.diff()
    }
}

impl Eq for Instance {}

impl Instance {
    pub fn new(module: SemiFreeDGModule) -> Self {
        Instance { module }
    }

    pub fn module(&self) -> &SemiFreeDGModule {
        &self.module
    }

    pub fn space(&self) -> &Arc<FreeBModule> {
        self.module.space()
    }

    pub fn ring(&self) -> BaseRing {
        self.module.space().ring()
    }
}

struct Entry {
    chars: Vec<PosChar>,
    line: usize,
}

struct Section {
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

fn split_sections(text: &str) -> Result<Vec<Section>, InputError> {
    let mut sections: Vec<Section> = Vec::new();
    let mut pending: Option<Entry> = None;
    let mut last_line = 1;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let body = raw.split('#').next().unwrap_or("");
        let chars = positioned(body, line, 1);
        if let Some(entry) = pending.as_mut() {
            entry.chars.push(PosChar {
                ch: '\n',
                line,
                column: 0,
            });
            entry.chars.extend(chars);
            if is_bracket_balanced(&entry.chars) {
                let done = pending.take().expect("pending entry");
                sections
                    .last_mut()
                    .expect("entries belong to a section")
                    .entries
                    .push(done);
            }
            continue;
        }
        let trimmed = body.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(name) = trimmed.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            if name.chars().all(|c| c.is_ascii_alphabetic()) && !name.is_empty() {
                if sections.iter().any(|s| s.name == name) {
                    return Err(InputError::Semantic {
                        line,
                        message: format!("section [{name}] appears twice"),
                    });
                }
                sections.push(Section {
                    name: name.to_string(),
                    line,
                    entries: Vec::new(),
                });
                continue;
            }
        }
        let Some(section) = sections.last_mut() else {
            let column = raw.len() - raw.trim_start().len() + 1;
            return Err(InputError::Syntax {
                line,
                column,
                message: "expected a section header such as [ring]".into(),
            });
        };
        let entry = Entry { chars, line };
        if is_bracket_balanced(&entry.chars) {
            section.entries.push(entry);
        } else {
            pending = Some(entry);
        }
    }
    if let Some(entry) = pending {
        return Err(InputError::Syntax {
            line: last_line,
            column: entry.chars.last().map_or(1, |c| c.column + 1),
            message: format!("unclosed '[' opened on line {}", entry.line),
        });
    }
    Ok(sections)
}

fn end_of(entry: &Entry) -> (usize, usize) {
    entry
        .chars
        .last()
        .map_or((entry.line, 1), |c| (c.line, c.column + 1))
}

fn section<'a>(sections: &'a [Section], name: &str) -> Option<&'a Section> {
    sections.iter().find(|s| s.name == name)
}

fn required<'a>(sections: &'a [Section], name: &str) -> Result<&'a Section, InputError> {
    section(sections, name).ok_or_else(|| InputError::Semantic {
        line: 1,
        message: format!("missing section [{name}]"),
    })
}

fn check_known(sections: &[Section], known: &[&str]) -> Result<(), InputError> {
    for s in sections {
        if !known.contains(&s.name.as_str()) {
            return Err(InputError::Semantic {
                line: s.line,
                message: format!("unknown section [{}]", s.name),
            });
        }
    }
    Ok(())
}

fn single_entry(s: &Section) -> Result<&Entry, InputError> {
    match s.entries.as_slice() {
        [e] => Ok(e),
        _ => Err(InputError::Semantic {
            line: s.line,
            message: format!("section [{}] needs exactly one line", s.name),
        }),
    }
}

fn parse_ring(s: &Section) -> Result<BaseRing, InputError> {
    let entry = single_entry(s)?;
    let mut cur = Cursor::new(&entry.chars, end_of(entry));
    let word = cur.ident()?;
    let ring = match word.as_str() {
        "Q" => BaseRing::Rationals,
        "Zmod" => {
            let (line, _) = cur.position();
            let m = cur.integer()?;
            BaseRing::zmod(m.max(0) as u64).map_err(|e| InputError::Semantic {
                line,
                message: e.to_string(),
            })?
        }
        "Z" => {
            cur.expect('/')?;
            let (line, _) = cur.position();
            let m = cur.integer()?;
            BaseRing::zmod(m.max(0) as u64).map_err(|e| InputError::Semantic {
                line,
                message: e.to_string(),
            })?
        }
        other => {
            return Err(InputError::Syntax {
                line: entry.line,
                column: entry
                    .chars
                    .iter()
                    .find(|c| !c.ch.is_whitespace())
                    .map_or(1, |c| c.column),
                message: format!("unknown ring {other}; expected Q, Zmod <m> or Z/<m>"),
            })
        }
    };
    cur.expect_end()?;
    Ok(ring)
}

/// `name : degree : value`.
fn parse_generator(
    entry: &Entry,
    alg: &ExteriorDGAlgebra,
) -> Result<(String, i64, AElem), InputError> {
    let mut cur = Cursor::new(&entry.chars, end_of(entry));
    let name = cur.ident()?;
    cur.expect(':')?;
    let degree = cur.integer()?;
    cur.expect(':')?;
    let value = parse_aelem(&mut cur, alg)?;
    cur.expect_end()?;
    Ok((name, degree, value))
}

fn semantic(line: usize, e: impl ToString) -> InputError {
    InputError::Semantic {
        line,
        message: e.to_string(),
    }
}

fn parse_algebra(sections: &[Section], ring: BaseRing) -> Result<ExteriorDGAlgebra, InputError> {
    let mut alg = ExteriorDGAlgebra::new(ring);
    if let Some(s) = section(sections, "algebra") {
        for entry in &s.entries {
            let (name, degree, value) = parse_generator(entry, &alg)?;
            alg = alg
                .adjoin(&name, degree, value)
                .map_err(|e| semantic(entry.line, e))?;
        }
    }
    Ok(alg)
}

fn parse_module(s: &Section, alg: &Arc<ExteriorDGAlgebra>) -> Result<GradedFreeModule, InputError> {
    let mut basis = Vec::new();
    for entry in &s.entries {
        let mut cur = Cursor::new(&entry.chars, end_of(entry));
        let name = cur.ident()?;
        cur.expect(':')?;
        let degree = cur.integer()?;
        cur.expect_end()?;
        if basis.iter().any(|b: &BasisElement| b.name == name) {
            return Err(semantic(entry.line, format!("duplicate basis name {name}")));
        }
        basis.push(BasisElement { name, degree });
    }
    GradedFreeModule::new(alg.clone(), basis).map_err(|e| semantic(s.line, e))
}

/// Reads `k : matrix` lines into `A`-linear maps of degree `degree_of(k)`, checking
/// shapes and the degree of every entry. `what` names the maps in messages.
fn parse_indexed_maps(
    s: &Section,
    module: &GradedFreeModule,
    what: &str,
    degree_of: impl Fn(usize) -> i64,
) -> Result<Vec<AMap>, InputError> {
    let alg = module.algebra();
    let p = module.rank();
    let mut maps: Vec<Option<AMap>> = Vec::new();
    for entry in &s.entries {
        let mut cur = Cursor::new(&entry.chars, end_of(entry));
        let (line, column) = cur.position();
        let k = cur.integer()?;
        let k = usize::try_from(k).map_err(|_| InputError::Syntax {
            line,
            column,
            message: "expansion index must be non-negative".into(),
        })?;
        cur.expect(':')?;
        let (mline, mcol) = {
            cur.skip_ws();
            cur.position()
        };
        let rows = parse_matrix(&mut cur, alg)?;
        cur.expect_end()?;
        if rows.len() != p || rows.iter().any(|r| r.len() != p) {
            return Err(InputError::Syntax {
                line: mline,
                column: mcol,
                message: format!("{what}_{k} must be a {p}x{p} matrix"),
            });
        }
        let degree = degree_of(k);
        let mut map = AMap::zero(p, p, degree);
        for (i, row) in rows.into_iter().enumerate() {
            for (
                j,
                Located {
                    value,
                    line,
                    column,
                },
            ) in row.into_iter().enumerate()
            {
                if !value.is_zero() {
                    let expected = module.degree(j) + degree - module.degree(i);
                    match alg.degree_of(&value) {
                        Some(found) if found == expected => {}
                        Some(found) => {
                            return Err(InputError::Syntax {
                                line,
                                column,
                                message: format!(
                                    "coefficient ({i},{j}) of {what}_{k} has degree {found}, expected {expected}"
                                ),
                            })
                        }
                        None => {
                            return Err(InputError::Syntax {
                                line,
                                column,
                                message: format!("coefficient ({i},{j}) of {what}_{k} is not homogeneous"),
                            })
                        }
                    }
                }
                map.entries[i][j] = value;
            }
        }
        if maps.len() <= k {
            maps.resize(k + 1, None);
        }
        if maps[k].is_some() {
            return Err(semantic(entry.line, format!("{what}_{k} is given twice")));
        }
        maps[k] = Some(map);
    }
    Ok(maps
        .into_iter()
        .enumerate()
        .map(|(k, m)| m.unwrap_or_else(|| AMap::zero(p, p, degree_of(k))))
        .collect())
}

fn describe_expansion_error(e: ExpansionError) -> String {
    match e {
        ExpansionError::NotSquareZero(n) => {
            format!("integrability fails: coefficient {n} of d o d is nonzero")
        }
        other => other.to_string(),
    }
}

pub fn parse_instance(text: &str) -> Result<Instance, InputError> {
    let sections = split_sections(text)?;
    check_known(
        &sections,
        &["ring", "algebra", "adjunction", "module", "differential"],
    )?;
    let ring = parse_ring(required(&sections, "ring")?)?;
    let alg = Arc::new(parse_algebra(&sections, ring)?);

    let adj_section = required(&sections, "adjunction")?;
    let adj_entry = single_entry(adj_section)?;
    let (x_name, x_degree, t) = parse_generator(adj_entry, &alg)?;
    if alg.var_index(&x_name).is_some() {
        return Err(semantic(
            adj_entry.line,
            format!("{x_name} is already an exterior variable"),
        ));
    }
    let adj = build_adjunction(alg.clone(), &x_name, x_degree, t)
        .map_err(|e| semantic(adj_entry.line, e))?;

    let module = parse_module(required(&sections, "module")?, &alg)?;
    let space = Arc::new(FreeBModule::new(Arc::new(adj), module).map_err(|e| semantic(1, e))?);
    let (maps, diff_line) = match section(&sections, "differential") {
        Some(s) => (
            parse_indexed_maps(s, space.module(), "partial", |k| -1 - k as i64 * x_degree)?,
            s.line,
        ),
        None => (Vec::new(), 1),
    };
    let p = space.module().rank();
    let delta_0 = ADerivation::new(
        maps.first()
            .cloned()
            .unwrap_or_else(|| AMap::zero(p, p, -1)),
    );
    let rest = maps.get(1..).unwrap_or_default();
    let diff = space
        .derivation(&delta_0, rest)
        .map_err(|e| semantic(diff_line, describe_expansion_error(e)))?;
    let n = SemiFreeDGModule::new(space, diff)
        .map_err(|e| semantic(diff_line, describe_expansion_error(e)))?;
    Ok(Instance::new(n))
}

/// Reads a `[phi]` file: a degree 0 `B`-linear map on the space of `instance`,
/// one matrix per expansion index.
pub fn parse_phi(text: &str, space: &FreeBModule) -> Result<Expansion, InputError> {
    let sections = split_sections(text)?;
    check_known(&sections, &["phi"])?;
    let s = required(&sections, "phi")?;
    let x = space.x_degree();
    let maps = parse_indexed_maps(s, space.module(), "phi", |k| -(k as i64) * x)?;
    space.linear(0, &maps).map_err(|e| semantic(s.line, e))
}

fn ring_text(ring: BaseRing) -> String {
    match ring {
        BaseRing::Rationals => "Q".into(),
        BaseRing::ZMod(m) => format!("Zmod {m}"),
    }
}

pub fn matrix_text(alg: &ExteriorDGAlgebra, map: &AMap) -> String {
    let rows: Vec<String> = map
        .entries
        .iter()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(|c| alg.format(c)).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

/// The coefficient maps of a derivation, with the constant term given by its
/// values on the basis.
pub fn derivation_maps(space: &FreeBModule, d: &Expansion) -> Vec<AMap> {
    let mut maps = space.coefficient_maps(d);
    if let Ok(delta_0) = space.constant_derivation(d) {
        match maps.first_mut() {
            Some(first) => *first = delta_0.values,
            None => maps.push(delta_0.values),
        }
    }
    maps
}

pub fn print_instance(n: &SemiFreeDGModule) -> String {
    let space = n.space();
    let adj = space.adjunction();
    let alg = adj.algebra();
    let mut out = String::new();
    let _ = writeln!(out, "[ring]\n{}", ring_text(space.ring()));
    out.push_str("[algebra]\n");
    for v in alg.variables() {
        let _ = writeln!(
            out,
            "{} : {} : {}",
            v.name,
            v.degree,
            alg.format(&v.d_value)
        );
    }
    let _ = writeln!(
        out,
        "[adjunction]\n{} : {} : {}",
        adj.x_name(),
        adj.x_degree(),
        alg.format(adj.t())
    );
    out.push_str("[module]\n");
    for b in space.module().basis() {
        let _ = writeln!(out, "{} : {}", b.name, b.degree);
    }
    out.push_str("[differential]\n");
    let maps = derivation_maps(space, n.diff());
    if maps.is_empty() {
        let p = space.module().rank();
        let _ = writeln!(out, "0 : {}", matrix_text(alg, &AMap::zero(p, p, -1)));
    }
    for (k, m) in maps.iter().enumerate() {
        let _ = writeln!(out, "{k} : {}", matrix_text(alg, m));
    }
    out
}

pub fn print_phi(space: &FreeBModule, phi: &Expansion) -> String {
    let alg = space.adjunction().algebra();
    let mut out = String::from("[phi]\n");
    debug_assert_eq!(phi.kind(), Kind::Linear);
    for (k, m) in space.coefficient_maps(phi).iter().enumerate() {
        let _ = writeln!(out, "{k} : {}", matrix_text(alg, m));
    }
    out
}
