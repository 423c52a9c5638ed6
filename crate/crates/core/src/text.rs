//! Plain-text family format.
//!
//! ```text
//! n=4
//! {}
//! 1,2
//! hex:c
//! ```
//!
//! The first non-blank line declares the ground size. Every following
//! non-blank line is one set: ascending 1-based elements separated by commas,
//! `{}` for the empty set, or `hex:` followed by a lowercase bitmask.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::lattice::{check_n, full_mask, ElementSet, SetFamily};

/// How sets are written by [`write_family`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SetNotation {
    #[default]
    Elements,
    Hex,
}

/// Parses one set line. The message carries no line number.
pub fn parse_set_line(line: &str, n: u32) -> std::result::Result<ElementSet, String> {
    let line = line.trim();
    if line == "{}" {
        return Ok(ElementSet::EMPTY);
    }
    if let Some(hex) = line.strip_prefix("hex:") {
        if hex.is_empty() || !hex.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b)) {
            return Err(format!("invalid hex bitmask {hex:?}"));
        }
        let bits = u32::from_str_radix(hex, 16).map_err(|e| format!("invalid hex bitmask {hex:?}: {e}"))?;
        if bits & !full_mask(n) != 0 {
            return Err(format!("bitmask {hex} has bits above position {n}"));
        }
        return Ok(ElementSet::raw(bits));
    }
    let mut bits = 0u32;
    let mut prev = 0u32;
    for tok in line.split(',') {
        let tok = tok.trim();
        let e: u32 = tok
            .parse()
            .map_err(|_| format!("invalid element {tok:?}"))?;
        if e == 0 || e > n {
            return Err(format!("element {e} outside ground set [{n}]"));
        }
        if e <= prev {
            return Err(format!("elements must be strictly ascending ({e} after {prev})"));
        }
        prev = e;
        bits |= 1 << (e - 1);
    }
    Ok(ElementSet::raw(bits))
}

/// Parses a whole family. Errors carry 1-based line numbers.
pub fn parse_family(input: &str) -> Result<SetFamily> {
    let mut lines = input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing `n=<int>` header".into(),
    })?;
    let n: u32 = header
        .strip_prefix("n=")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| Error::Parse {
            line: hline,
            message: format!("expected `n=<int>`, found {header:?}"),
        })?;
    check_n(n).map_err(|e| Error::Parse {
        line: hline,
        message: e.to_string(),
    })?;

    let mut seen = HashSet::new();
    let mut sets = Vec::new();
    for (line, text) in lines {
        let set = parse_set_line(text, n).map_err(|message| Error::Parse { line, message })?;
        if !seen.insert(set) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate set {set}"),
            });
        }
        sets.push(set);
    }
    SetFamily::new(n, sets)
}

pub fn format_set(set: ElementSet, notation: SetNotation) -> String {
    match notation {
        SetNotation::Elements => set.to_string(),
        SetNotation::Hex => format!("hex:{:x}", set.bits()),
    }
}

/// Canonical text rendering; `parse_family(&write_family(f, _)) == f`.
pub fn write_family(fam: &SetFamily, notation: SetNotation) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "n={}", fam.n());
    for s in fam.iter() {
        out.push_str(&format_set(s, notation));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_all_notations() {
        let f = parse_family("n=4\n\n{}\n1,2\n  hex:c \n2, 4\n").unwrap();
        let shown: Vec<String> = f.iter().map(|s| s.to_string()).collect();
        assert_eq!(shown, vec!["{}", "1,2", "2,4", "3,4"]);
        assert_eq!(f.n(), 4);
    }

    #[test]
    fn header_only_is_empty_family() {
        let f = parse_family("n=3\n").unwrap();
        assert!(f.is_empty());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("", 1),
            ("x=3\n", 1),
            ("n=0\n", 1),
            ("n=3\n1\n2,1\n", 3),
            ("n=3\n1\n\n1\n", 4),
            ("n=3\n4\n", 2),
            ("n=3\nhex:8\n", 2),
            ("n=3\nhex:A\n", 2),
            ("n=3\n1,,2\n", 2),
            ("n=3\n1\nhex:1\n", 3),
        ];
        for (input, line) in cases {
            match parse_family(input) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{input:?}"),
                other => panic!("{input:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn writer_forms() {
        let f = SetFamily::from_lists(3, &[&[], &[1, 3]]).unwrap();
        assert_eq!(write_family(&f, SetNotation::Elements), "n=3\n{}\n1,3\n");
        assert_eq!(write_family(&f, SetNotation::Hex), "n=3\nhex:0\nhex:5\n");
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(n in 1u32..=24, raw in proptest::collection::vec(any::<u32>(), 0..60), hex in any::<bool>()) {
            let mask = full_mask(n);
            let f = SetFamily::new(n, raw.into_iter().map(|b| ElementSet::raw(b & mask))).unwrap();
            let notation = if hex { SetNotation::Hex } else { SetNotation::Elements };
            let text = write_family(&f, notation);
            let back = parse_family(&text).unwrap();
            prop_assert_eq!(&back, &f);
            prop_assert_eq!(write_family(&back, notation), text);
        }
    }
}
