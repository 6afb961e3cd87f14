//! Text formats: group definitions and words.
//!
//! ```text
//! degree = 2
//! a = perm(0 1) [e, e]
//! b = perm() [a, c]
//! ```
//!
//! Words are sequences of generator names with optional exponents and
//! parentheses, e.g. `(ab)^16`, `a b^-1 c`, `e`.

use super::{GeneratorSpec, GroupDef, Letter, Word};
use crate::error::{Error, Result};

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_cycle(body: &str, degree: usize, line: usize, perm: &mut [u8]) -> Result<()> {
    let points = body
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|_| perr(line, format!("bad point `{s}`"))))
        .collect::<Result<Vec<_>>>()?;
    if points.iter().any(|&p| p >= degree) {
        return Err(perr(line, "cycle point out of range"));
    }
    let mut sorted = points.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != points.len() {
        return Err(perr(line, "repeated point in cycle"));
    }
    // compose this cycle after the previous ones
    let mut cyc: Vec<u8> = (0..degree as u8).collect();
    for (k, &p) in points.iter().enumerate() {
        cyc[p] = points[(k + 1) % points.len()] as u8;
    }
    for x in perm.iter_mut() {
        *x = cyc[*x as usize];
    }
    Ok(())
}

/// Parses cycle notation: `0 1`, `(0 1)(2 3)` or empty.
pub(crate) fn parse_perm(body: &str, degree: usize, line: usize) -> Result<Vec<u8>> {
    let mut perm: Vec<u8> = (0..degree as u8).collect();
    let body = body.trim();
    if body.contains('(') {
        let mut rest = body;
        while let Some(start) = rest.find('(') {
            if !rest[..start].trim().is_empty() {
                return Err(perr(line, "text between cycles"));
            }
            let end = rest[start..].find(')').ok_or_else(|| perr(line, "unclosed cycle"))? + start;
            parse_cycle(&rest[start + 1..end], degree, line, &mut perm)?;
            rest = &rest[end + 1..];
        }
        if !rest.trim().is_empty() {
            return Err(perr(line, "trailing text after cycles"));
        }
    } else {
        parse_cycle(body, degree, line, &mut perm)?;
    }
    Ok(perm)
}

impl GroupDef {
    /// Parses the line-based group definition format.
    pub fn parse(text: &str) -> Result<GroupDef> {
        let mut degree = None;
        let mut name = "custom".to_string();
        let mut csp = false;
        let mut raw: Vec<(usize, String, String)> = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (lhs, rhs) = line.split_once('=').ok_or_else(|| perr(lineno, "expected `=`"))?;
            let (lhs, rhs) = (lhs.trim(), rhs.trim());
            match lhs {
                "degree" => degree = Some(rhs.parse::<usize>().map_err(|_| perr(lineno, "bad degree"))?),
                "name" => name = rhs.to_string(),
                "csp" => {
                    csp = rhs
                        .parse::<bool>()
                        .map_err(|_| perr(lineno, "csp must be true or false"))?
                }
                _ => raw.push((lineno, lhs.to_string(), rhs.to_string())),
            }
        }
        let degree = degree.ok_or_else(|| perr(0, "missing `degree = <d>`"))?;
        if !(2..=36).contains(&degree) {
            return Err(perr(0, "degree must be between 2 and 36"));
        }
        let names: Vec<String> = raw.iter().map(|(_, n, _)| n.clone()).collect();
        let lookup = |sym: &str, line: usize| -> Result<Option<(usize, bool)>> {
            let sym = sym.trim();
            let (base, inv) = match sym.strip_suffix("^-1") {
                Some(b) => (b.trim(), true),
                None => (sym, false),
            };
            if base == "e" || base == "1" {
                return Ok(None);
            }
            match names.iter().position(|n| n == base) {
                Some(i) => Ok(Some((i, inv))),
                None => Err(perr(line, format!("undeclared symbol `{base}`"))),
            }
        };
        let mut gens = Vec::new();
        for (line, gname, rhs) in &raw {
            let rest = rhs
                .strip_prefix("perm")
                .ok_or_else(|| perr(*line, "expected `perm(...)`"))?
                .trim_start();
            let rest = rest.strip_prefix('(').ok_or_else(|| perr(*line, "expected `(`"))?;
            // the permutation body may itself contain parentheses
            let mut depth = 1;
            let mut close = None;
            for (i, c) in rest.char_indices() {
                match c {
                    '(' => depth += 1,
                    ')' => {
                        depth -= 1;
                        if depth == 0 {
                            close = Some(i);
                            break;
                        }
                    }
                    _ => {}
                }
            }
            let close = close.ok_or_else(|| perr(*line, "unclosed `perm(`"))?;
            let perm = parse_perm(&rest[..close], degree, *line)?;
            let secs = rest[close + 1..].trim();
            let secs = secs
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(']'))
                .ok_or_else(|| perr(*line, "expected `[s0, s1, ...]`"))?;
            let sections = secs
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| lookup(s, *line))
                .collect::<Result<Vec<_>>>()?;
            if sections.len() != degree {
                return Err(perr(
                    *line,
                    format!("`{gname}` has {} sections, expected {degree}", sections.len()),
                ));
            }
            gens.push(GeneratorSpec {
                name: gname.clone(),
                perm,
                sections,
            });
        }
        GroupDef::new(&name, degree, gens, csp)
    }

    /// Parses a word such as `abab`, `(ad)^4` or `b^-1 a`.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let chars: Vec<char> = text.chars().collect();
        let mut pos = 0;
        let letters = self.parse_seq(&chars, &mut pos)?;
        skip_ws(&chars, &mut pos);
        if pos != chars.len() {
            return Err(Error::Parse {
                line: 1,
                msg: format!("unexpected `{}` in word", chars[pos]),
            });
        }
        Ok(self.reduce(&Word::from_letters(letters)))
    }

    fn parse_seq(&self, chars: &[char], pos: &mut usize) -> Result<Vec<Letter>> {
        let mut out = Vec::new();
        loop {
            skip_ws(chars, pos);
            if *pos >= chars.len() || chars[*pos] == ')' {
                return Ok(out);
            }
            let atom: Vec<Letter> = if chars[*pos] == '(' {
                *pos += 1;
                let inner = self.parse_seq(chars, pos)?;
                if chars.get(*pos) != Some(&')') {
                    return Err(Error::Parse {
                        line: 1,
                        msg: "unclosed `(`".into(),
                    });
                }
                *pos += 1;
                inner
            } else {
                self.parse_symbol(chars, pos)?
            };
            skip_ws(chars, pos);
            let exp = if chars.get(*pos) == Some(&'^') {
                *pos += 1;
                skip_ws(chars, pos);
                let start = *pos;
                if chars.get(*pos) == Some(&'-') {
                    *pos += 1;
                }
                while chars.get(*pos).is_some_and(|c| c.is_ascii_digit()) {
                    *pos += 1;
                }
                let s: String = chars[start..*pos].iter().collect();
                s.parse::<i64>().map_err(|_| Error::Parse {
                    line: 1,
                    msg: format!("bad exponent `{s}`"),
                })?
            } else {
                1
            };
            let unit = if exp < 0 {
                self.inverse(&Word::from_letters(atom)).letters().to_vec()
            } else {
                atom
            };
            for _ in 0..exp.unsigned_abs() {
                out.extend_from_slice(&unit);
            }
        }
    }

    fn parse_symbol(&self, chars: &[char], pos: &mut usize) -> Result<Vec<Letter>> {
        if matches!(chars[*pos], '*' | '.' | '·') {
            *pos += 1;
            return Ok(Vec::new());
        }
        let rest: String = chars[*pos..].iter().collect();
        // longest declared name that matches here
        let best = self
            .generator_names()
            .iter()
            .enumerate()
            .filter(|(_, n)| rest.starts_with(n.as_str()))
            .max_by_key(|(_, n)| n.len());
        if let Some((i, n)) = best {
            *pos += n.chars().count();
            return Ok(vec![Letter::new(i, false)]);
        }
        if chars[*pos] == 'e' || chars[*pos] == '1' {
            *pos += 1;
            return Ok(Vec::new());
        }
        let sym: String = chars[*pos..].iter().take_while(|c| c.is_alphanumeric()).collect();
        Err(Error::UnknownSymbol(if sym.is_empty() {
            chars[*pos].to_string()
        } else {
            sym
        }))
    }
}

fn skip_ws(chars: &[char], pos: &mut usize) {
    while chars.get(*pos).is_some_and(|c| c.is_whitespace()) {
        *pos += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRIG: &str = "degree = 2\na = perm(0 1) [e, e]\nb = perm() [a, c]\nc = perm() [a, d]\nd = perm() [e, b]\n";

    #[test]
    fn parses_grigorchuk_text() {
        let g = GroupDef::parse(GRIG).unwrap();
        let builtin = GroupDef::grigorchuk();
        assert_eq!(g, builtin);
        assert!(!g.has_csp());
    }

    #[test]
    fn rejects_undeclared_symbols() {
        let text = "degree = 2\na = perm(0 1) [e, e]\nb = perm() [a, z]\n";
        assert!(matches!(GroupDef::parse(text), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn rejects_wrong_section_count() {
        let text = "degree = 2\na = perm(0 1) [e, e, e]\n";
        assert!(matches!(GroupDef::parse(text), Err(Error::Parse { line: 2, .. })));
        let text = "degree = 3\na = perm(0 1 2) [e, a]\n";
        assert!(GroupDef::parse(text).is_err());
    }

    #[test]
    fn rejects_bad_permutations() {
        assert!(GroupDef::parse("degree = 2\na = perm(0 2) [e, e]\n").is_err());
        assert!(GroupDef::parse("degree = 3\na = perm(0 1 0) [e, e, e]\n").is_err());
        assert!(GroupDef::parse("a = perm(0 1) [e, e]\n").is_err());
    }

    #[test]
    fn multi_cycle_permutations() {
        let text = "degree = 4\nx = perm((0 1)(2 3)) [e, e, e, e]\n";
        let g = GroupDef::parse(text).unwrap();
        assert_eq!(g.root_perm(&g.generator(0)), vec![1, 0, 3, 2]);
    }

    #[test]
    fn inverse_sections() {
        let text = "degree = 3\na = perm(0 1 2) [e, e, e]\nb = perm() [a, a^-1, b]\n";
        let g = GroupDef::parse(text).unwrap();
        assert_eq!(g, GroupDef::gupta_sidki(3).unwrap());
    }

    #[test]
    fn word_syntax() {
        let g = GroupDef::grigorchuk();
        assert_eq!(g.parse_word("(ab)^2").unwrap(), g.parse_word("abab").unwrap());
        assert_eq!(g.parse_word("e").unwrap(), Word::empty());
        assert_eq!(g.parse_word("a * b . c").unwrap(), g.parse_word("abc").unwrap());
        assert_eq!(g.render(&g.parse_word("(ab)^-1").unwrap()), "ba");
        assert!(matches!(g.parse_word("az"), Err(Error::UnknownSymbol(_))));
        assert!(g.parse_word("(ab").is_err());
        let h = GroupDef::ggs(5, &[1, 2, 0, 0]).unwrap();
        let w = h.parse_word("a2b").unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(h.render(&w), "a2.b");
    }
}
