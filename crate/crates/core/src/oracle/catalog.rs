//! The shipped catalog of small algebras and the routine that regenerates it.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::OnceLock;

use super::algebra::FiniteAlgebra;
use crate::error::{Error, Result};
use crate::term::Signature;

/// Shipped catalog text; must equal [`generate_catalog_text`].
pub const CATALOG_TEXT: &str = include_str!("../../data/catalog.txt");

fn permutations(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(m - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, m - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

type Order = Vec<Vec<bool>>;

/// Bits `leq[i][j]` for `i < j`, row-major.
fn order_key(leq: &Order) -> Vec<bool> {
    let m = leq.len();
    let mut key = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            key.push(leq[i][j]);
        }
    }
    key
}

fn relabel(leq: &Order, p: &[usize]) -> Order {
    let m = leq.len();
    let mut out = vec![vec![false; m]; m];
    for i in 0..m {
        for j in 0..m {
            out[p[i]][p[j]] = leq[i][j];
        }
    }
    out
}

fn naturally_labeled(leq: &Order) -> bool {
    let m = leq.len();
    (0..m).all(|i| (0..i).all(|j| !leq[i][j]))
}

/// Largest key over natural relabelings; chains get all ones.
fn canonical(leq: &Order) -> Order {
    permutations(leq.len())
        .iter()
        .map(|p| relabel(leq, p))
        .filter(naturally_labeled)
        .max_by(|a, b| order_key(a).cmp(&order_key(b)))
        .expect("the identity relabeling is natural")
}

fn bound(leq: &Order, a: usize, b: usize, upper: bool) -> Option<usize> {
    let m = leq.len();
    let below = |x: usize, y: usize| if upper { leq[x][y] } else { leq[y][x] };
    let cands: Vec<usize> = (0..m).filter(|&c| below(a, c) && below(b, c)).collect();
    cands.iter().copied().find(|&c| cands.iter().all(|&d| below(c, d)))
}

fn tables(leq: &Order) -> Option<(Vec<Vec<usize>>, Vec<Vec<usize>>)> {
    let m = leq.len();
    let mut meet = vec![vec![0; m]; m];
    let mut join = vec![vec![0; m]; m];
    for a in 0..m {
        for b in 0..m {
            meet[a][b] = bound(leq, a, b, false)?;
            join[a][b] = bound(leq, a, b, true)?;
        }
    }
    Some((meet, join))
}

fn lattice_name(leq: &Order) -> String {
    let m = leq.len();
    let chain = (0..m).all(|i| (0..m).all(|j| leq[i][j] || leq[j][i]));
    if chain {
        return format!("C{m}");
    }
    // Elements covering the bottom (0) and covered by the top (m − 1).
    let covers = |a: usize, b: usize| a != b && leq[a][b] && (0..m).all(|c| c == a || c == b || !(leq[a][c] && leq[c][b]));
    let atoms = (0..m).filter(|&a| covers(0, a)).count();
    let coatoms = (0..m).filter(|&a| covers(a, m - 1)).count();
    match (m, atoms, coatoms) {
        (4, _, _) => "B2".into(),
        (5, 3, 3) => "M3".into(),
        (5, 2, 2) => "N5".into(),
        (5, 1, 2) => "1+B2".into(),
        (5, 2, 1) => "B2+1".into(),
        _ => format!("L{m}_{atoms}{coatoms}"),
    }
}

/// All lattices with at most `max` elements up to isomorphism, by size and
/// then by descending canonical key.
pub fn enumerate_lattices(max: usize) -> Vec<FiniteAlgebra> {
    let mut out = Vec::new();
    for m in 1..=max {
        let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
        let mut seen: BTreeSet<Vec<bool>> = BTreeSet::new();
        let mut found: Vec<Order> = Vec::new();
        for bits in 0u32..1 << pairs.len() {
            let mut leq = vec![vec![false; m]; m];
            for (i, row) in leq.iter_mut().enumerate() {
                row[i] = true;
            }
            for (k, &(i, j)) in pairs.iter().enumerate() {
                leq[i][j] = bits >> k & 1 == 1;
            }
            let transitive =
                (0..m).all(|a| (0..m).all(|b| (0..m).all(|c| !(leq[a][b] && leq[b][c]) || leq[a][c])));
            if !transitive || tables(&leq).is_none() {
                continue;
            }
            let canon = canonical(&leq);
            if seen.insert(order_key(&canon)) {
                found.push(canon);
            }
        }
        found.sort_by_key(|o| std::cmp::Reverse(order_key(o)));
        for leq in found {
            let (meet, join) = tables(&leq).expect("checked");
            out.push(FiniteAlgebra::lattice(&lattice_name(&leq), Signature::Lat, meet, join));
        }
    }
    out
}

pub fn cyclic_group(m: usize) -> FiniteAlgebra {
    FiniteAlgebra {
        name: format!("Z{m}"),
        size: m,
        sig: Signature::Grp,
        meet: None,
        join: None,
        mul: Some((0..m).map(|a| (0..m).map(|b| (a + b) % m).collect()).collect()),
        inv: Some((0..m).map(|a| (m - a) % m).collect()),
        unit: Some(0),
    }
}

/// The associative operations on `{0, 1}` up to swapping the elements.
pub fn two_element_semigroups() -> Vec<FiniteAlgebra> {
    let digits = |t: &[[usize; 2]; 2]| format!("{}{}{}{}", t[0][0], t[0][1], t[1][0], t[1][1]);
    let mut keys = BTreeSet::new();
    for bits in 0..16usize {
        let t = [[bits >> 3 & 1, bits >> 2 & 1], [bits >> 1 & 1, bits & 1]];
        let assoc = (0..2).all(|a| (0..2).all(|b| (0..2).all(|c| t[t[a][b]][c] == t[a][t[b][c]])));
        if !assoc {
            continue;
        }
        let mut swapped = [[0; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                swapped[a][b] = 1 - t[1 - a][1 - b];
            }
        }
        keys.insert(digits(&t).min(digits(&swapped)));
    }
    keys.into_iter()
        .map(|k| {
            let d: Vec<usize> = k.bytes().map(|c| (c - b'0') as usize).collect();
            FiniteAlgebra {
                name: format!("S2_{k}"),
                size: 2,
                sig: Signature::Sgrp,
                meet: None,
                join: None,
                mul: Some(vec![vec![d[0], d[1]], vec![d[2], d[3]]]),
                inv: None,
                unit: None,
            }
        })
        .collect()
}

/// Lattices up to size 5, the two-element distributive lattice, `Z2 … Z6`
/// and the two-element semigroups, in that order.
pub fn generate_catalog() -> Vec<FiniteAlgebra> {
    let mut out = enumerate_lattices(5);
    let c2 = out.iter().find(|a| a.name == "C2").expect("C2").clone();
    out.push(FiniteAlgebra {
        name: "D2".into(),
        sig: Signature::DLat,
        ..c2
    });
    out.extend((2..=6).map(cyclic_group));
    out.extend(two_element_semigroups());
    out
}

fn write_table(out: &mut String, rows: &[Vec<usize>]) {
    for r in rows {
        let line: Vec<String> = r.iter().map(usize::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
}

pub fn render_catalog(algebras: &[FiniteAlgebra]) -> String {
    let mut out = String::new();
    for (k, a) in algebras.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        writeln!(out, "algebra {} size {} sig {}", a.name, a.size, a.sig).expect("write to string");
        for (name, table) in [("meet", &a.meet), ("join", &a.join), ("mul", &a.mul)] {
            if let Some(t) = table {
                out.push_str(name);
                out.push('\n');
                write_table(&mut out, t);
            }
        }
        if let Some(inv) = &a.inv {
            out.push_str("inv\n");
            write_table(&mut out, std::slice::from_ref(inv));
        }
        if let Some(e) = a.unit {
            writeln!(out, "e\n{e}").expect("write to string");
        }
    }
    out
}

pub fn generate_catalog_text() -> String {
    render_catalog(&generate_catalog())
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Problem {
        line,
        message: message.into(),
    }
}

/// Parses catalog text and checks every algebra's axioms.
pub fn parse_catalog(text: &str) -> Result<Vec<FiniteAlgebra>> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < lines.len() {
        let (ln, header) = lines[pos];
        let words: Vec<&str> = header.split_whitespace().collect();
        let (name, size, sig) = match words.as_slice() {
            ["algebra", name, "size", m, "sig", sig] => {
                let m: usize = m.parse().map_err(|_| parse_err(ln, "bad size"))?;
                let sig = Signature::from_name(sig).ok_or_else(|| parse_err(ln, "unknown signature"))?;
                (name.to_string(), m, sig)
            }
            _ => return Err(parse_err(ln, "expected `algebra <name> size <m> sig <SIG>`")),
        };
        pos += 1;
        let mut a = FiniteAlgebra {
            name,
            size,
            sig,
            meet: None,
            join: None,
            mul: None,
            inv: None,
            unit: None,
        };
        let row = |pos: usize| -> Result<Vec<usize>> {
            let (ln, l) = *lines.get(pos).ok_or_else(|| parse_err(text.lines().count(), "table cut short"))?;
            l.split_whitespace()
                .map(|w| w.parse::<usize>().map_err(|_| parse_err(ln, format!("bad entry `{w}`"))))
                .collect()
        };
        while pos < lines.len() && !lines[pos].1.starts_with("algebra ") {
            let (ln, symbol) = lines[pos];
            pos += 1;
            match symbol {
                "meet" | "join" | "mul" => {
                    let t = (0..size).map(|k| row(pos + k)).collect::<Result<Vec<_>>>()?;
                    pos += size;
                    match symbol {
                        "meet" => a.meet = Some(t),
                        "join" => a.join = Some(t),
                        _ => a.mul = Some(t),
                    }
                }
                "inv" => {
                    a.inv = Some(row(pos)?);
                    pos += 1;
                }
                "e" => {
                    let r = row(pos)?;
                    pos += 1;
                    a.unit = Some(*r.first().ok_or_else(|| parse_err(ln, "missing unit"))?);
                }
                other => return Err(parse_err(ln, format!("unknown symbol `{other}`"))),
            }
        }
        a.check_axioms()?;
        out.push(a);
    }
    Ok(out)
}

/// The shipped catalog, parsed once.
pub fn catalog() -> &'static [FiniteAlgebra] {
    static CATALOG: OnceLock<Vec<FiniteAlgebra>> = OnceLock::new();
    CATALOG.get_or_init(|| parse_catalog(CATALOG_TEXT).expect("shipped catalog parses"))
}

fn filtered(sig: Signature) -> Vec<&'static FiniteAlgebra> {
    catalog().iter().filter(|a| a.sig == sig).collect()
}

/// All lattices of size ≤ 5.
pub fn lattices() -> &'static [&'static FiniteAlgebra] {
    static L: OnceLock<Vec<&'static FiniteAlgebra>> = OnceLock::new();
    L.get_or_init(|| filtered(Signature::Lat))
}

pub fn groups() -> &'static [&'static FiniteAlgebra] {
    static G: OnceLock<Vec<&'static FiniteAlgebra>> = OnceLock::new();
    G.get_or_init(|| filtered(Signature::Grp))
}

pub fn semigroups() -> &'static [&'static FiniteAlgebra] {
    static S: OnceLock<Vec<&'static FiniteAlgebra>> = OnceLock::new();
    S.get_or_init(|| filtered(Signature::Sgrp))
}

/// Looks an algebra up by name.
pub fn algebra(name: &str) -> Option<&'static FiniteAlgebra> {
    catalog().iter().find(|a| a.name == name)
}
