//! Planar-diagram text: one `X(a,b,c,d)` per crossing, labels listed
//! counterclockwise from the incoming under strand.

use std::collections::BTreeMap;

use super::{Arc, CrossingId, Endpoint, LinkDiagram, LinkError, Sign, Slot};

fn parse_tuples(text: &str) -> Result<Vec<[u64; 4]>, LinkError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let mut rest = line.trim();
        while !rest.is_empty() {
            let err = |m: &str| LinkError::MalformedSyntax(format!("line {}: {m}: {}", lineno + 1, raw.trim()));
            // an optional PD[ ... ] wrapper
            if let Some(r) = rest.strip_prefix("PD") {
                rest =
                    r.trim_start().strip_prefix(['[', '(']).ok_or_else(|| err("expected '[' after PD"))?.trim_start();
                continue;
            }
            if let Some(r) = rest.strip_prefix([']', ')']) {
                rest = r.trim_start_matches([',', ' ', '\t', ';']).trim();
                continue;
            }
            let body = rest.strip_prefix('X').ok_or_else(|| err("expected X(a,b,c,d)"))?.trim_start();
            let (open, close) = match body.chars().next() {
                Some('(') => ('(', ')'),
                Some('[') => ('[', ']'),
                _ => return Err(err("expected '(' after X")),
            };
            let end = body.find(close).ok_or_else(|| err("unclosed crossing tuple"))?;
            let inner = &body[open.len_utf8()..end];
            let labels: Vec<&str> = inner.split(',').map(str::trim).collect();
            if labels.len() != 4 {
                return Err(err("a crossing needs exactly four labels"));
            }
            let mut t = [0u64; 4];
            for (slot, s) in t.iter_mut().zip(&labels) {
                *slot = s.parse().map_err(|_| err("labels must be positive integers"))?;
                if *slot == 0 {
                    return Err(err("labels must be positive integers"));
                }
            }
            out.push(t);
            rest = body[end + close.len_utf8()..].trim_start_matches([',', ' ', '\t', ';']).trim();
        }
    }
    if out.is_empty() {
        return Err(LinkError::MalformedSyntax("no crossings found".into()));
    }
    Ok(out)
}

/// Parses PD text into a validated diagram.
///
/// Position 0 is the incoming under arc and position 2 the outgoing one. The
/// direction of the over strand (positions 1 and 3) is inferred so that every
/// arc has exactly one head and one tail. An over strand whose direction is
/// not forced by any under passage (a component lying entirely on top) is
/// oriented so labels increase along it, falling back to entering at
/// position 3.
pub fn parse_pd(text: &str) -> Result<LinkDiagram, LinkError> {
    let tuples = parse_tuples(text)?;
    let n = tuples.len();

    let mut occ: BTreeMap<u64, Vec<(usize, usize)>> = BTreeMap::new();
    for (c, t) in tuples.iter().enumerate() {
        for (p, &l) in t.iter().enumerate() {
            occ.entry(l).or_default().push((c, p));
        }
    }
    if let Some((&label, v)) = occ.iter().find(|(_, v)| v.len() != 2) {
        return Err(LinkError::NonQuadrivalent { label, count: v.len() });
    }

    // enters1[c]: the over strand of c enters at position 1 (else at 3).
    // Each label needs exactly one incoming end; that is a parity constraint
    // between the over-strand directions of the crossings it touches.
    let is_in = |enters1: &[Option<bool>], c: usize, p: usize| -> Option<bool> {
        match p {
            0 => Some(true),
            2 => Some(false),
            1 => enters1[c],
            _ => enters1[c].map(|x| !x),
        }
    };
    let mut enters1: Vec<Option<bool>> = vec![None; n];
    let mut by_crossing: Vec<Vec<u64>> = vec![Vec::new(); n];
    for (&l, v) in &occ {
        for &(c, _) in v {
            by_crossing[c].push(l);
        }
    }

    // propagate forced directions, then seed free ones with the heuristic
    let mut queue: Vec<usize> = (0..n).collect();
    let mut seed_order: Vec<usize> = (0..n).collect();
    let propagate = |enters1: &mut Vec<Option<bool>>, queue: &mut Vec<usize>| -> Result<(), LinkError> {
        while let Some(c) = queue.pop() {
            for &l in &by_crossing[c] {
                let v = &occ[&l];
                let (x, y) = (v[0], v[1]);
                let (ix, iy) = (is_in(enters1, x.0, x.1), is_in(enters1, y.0, y.1));
                match (ix, iy) {
                    (Some(a), Some(b)) => {
                        if a == b {
                            return Err(LinkError::OrientationConflict(format!(
                                "arc {l} would have {} at both ends",
                                if a { "a head" } else { "a tail" }
                            )));
                        }
                    }
                    (Some(a), None) => {
                        let want_in = !a;
                        enters1[y.0] = Some(if y.1 == 1 { want_in } else { !want_in });
                        queue.push(y.0);
                    }
                    (None, Some(b)) => {
                        let want_in = !b;
                        enters1[x.0] = Some(if x.1 == 1 { want_in } else { !want_in });
                        queue.push(x.0);
                    }
                    (None, None) => {}
                }
            }
        }
        Ok(())
    };
    propagate(&mut enters1, &mut queue)?;
    seed_order.retain(|&c| enters1[c].is_none());
    for c in seed_order {
        if enters1[c].is_some() {
            continue;
        }
        let t = tuples[c];
        let succ = |a: u64, b: u64| b == a + 1;
        enters1[c] = Some(succ(t[1], t[3]) && !succ(t[3], t[1]));
        queue.push(c);
        propagate(&mut enters1, &mut queue)?;
    }

    let ids: BTreeMap<u64, u32> = occ.keys().enumerate().map(|(i, &l)| (l, i as u32)).collect();
    let mut from: Vec<Option<Endpoint>> = vec![None; ids.len()];
    let mut to: Vec<Option<Endpoint>> = vec![None; ids.len()];
    let mut signs = Vec::with_capacity(n);
    for (c, t) in tuples.iter().enumerate() {
        let e1 = enters1[c].expect("every direction assigned");
        let roles = if e1 {
            [Slot::UnderIn, Slot::OverIn, Slot::UnderOut, Slot::OverOut]
        } else {
            [Slot::UnderIn, Slot::OverOut, Slot::UnderOut, Slot::OverIn]
        };
        signs.push(if e1 { Sign::Negative } else { Sign::Positive });
        for (p, &l) in t.iter().enumerate() {
            let ep = Endpoint { crossing: CrossingId(c as u32), slot: roles[p] };
            let id = ids[&l] as usize;
            let cell = if ep.slot.is_in() { &mut to[id] } else { &mut from[id] };
            if cell.is_some() {
                return Err(LinkError::OrientationConflict(format!("arc {l} is not consistently oriented")));
            }
            *cell = Some(ep);
        }
    }
    let arcs = from
        .into_iter()
        .zip(to)
        .map(|(f, t)| Arc { from: f.expect("tail assigned"), to: t.expect("head assigned") })
        .collect();
    LinkDiagram::new(signs, arcs, 0)
}

/// Writes the diagram as PD text, labelling arc `i` as `i + 1`.
pub fn to_pd(d: &LinkDiagram) -> String {
    let mut out = String::new();
    for c in d.crossings() {
        let s = d.slots_of(c);
        let l = |slot: Slot| s[slot.index()].0 + 1;
        let (p1, p3) = match d.signs()[c.index()] {
            Sign::Positive => (Slot::OverOut, Slot::OverIn),
            Sign::Negative => (Slot::OverIn, Slot::OverOut),
        };
        out.push_str(&format!("X({},{},{},{})\n", l(Slot::UnderIn), l(p1), l(Slot::UnderOut), l(p3)));
    }
    out
}
