use super::{GeneratorSpec, GroupDef};
use crate::error::{Error, Result};

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|k| k * k <= p).all(|k| !p.is_multiple_of(k))
}

fn shift(p: usize, by: usize) -> Vec<u8> {
    (0..p).map(|i| ((i + by) % p) as u8).collect()
}

impl GroupDef {
    /// The first Grigorchuk group: `a` swaps the two subtrees,
    /// `b = (a, c)`, `c = (a, d)`, `d = (e, b)`.
    pub fn grigorchuk() -> GroupDef {
        let (a, b, c, d) = (0, 1, 2, 3);
        let gens = vec![
            GeneratorSpec {
                name: "a".into(),
                perm: vec![1, 0],
                sections: vec![None, None],
            },
            GeneratorSpec {
                name: "b".into(),
                perm: vec![0, 1],
                sections: vec![Some((a, false)), Some((c, false))],
            },
            GeneratorSpec {
                name: "c".into(),
                perm: vec![0, 1],
                sections: vec![Some((a, false)), Some((d, false))],
            },
            GeneratorSpec {
                name: "d".into(),
                perm: vec![0, 1],
                sections: vec![None, Some((b, false))],
            },
        ];
        GroupDef::new("grigorchuk", 2, gens, true).expect("valid built-in definition")
    }

    /// The Gupta–Sidki group `G_p`: `a` is the cyclic shift and
    /// `b = (a, a^-1, e, .., e, b)`.
    pub fn gupta_sidki(p: usize) -> Result<GroupDef> {
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidParameters(format!("{p} is not an odd prime")));
        }
        let mut exps = vec![0i64; p - 1];
        exps[0] = 1;
        exps[1] = -1;
        let mut def = GroupDef::ggs(p, &exps)?;
        def.name = format!("gupta-sidki:{p}");
        Ok(def)
    }

    /// GGS group with defining vector `exps`:
    /// `b = (a^{e_1}, .., a^{e_{p-1}}, b)`. Powers of `a` other than
    /// `a^{±1}` appear as extra generators `a2`, `a3`, ...
    pub fn ggs(p: usize, exps: &[i64]) -> Result<GroupDef> {
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidParameters(format!("{p} is not an odd prime")));
        }
        if exps.len() != p - 1 {
            return Err(Error::InvalidParameters(format!(
                "defining vector must have {} entries",
                p - 1
            )));
        }
        let reduced: Vec<usize> = exps.iter().map(|&e| e.rem_euclid(p as i64) as usize).collect();
        if reduced.iter().all(|&e| e == 0) {
            return Err(Error::InvalidParameters("defining vector is zero mod p".into()));
        }
        let mut powers: Vec<usize> = reduced
            .iter()
            .copied()
            .filter(|&e| e != 0 && e != 1 && e != p - 1)
            .collect();
        powers.sort_unstable();
        powers.dedup();
        let mut gens = vec![GeneratorSpec {
            name: "a".into(),
            perm: shift(p, 1),
            sections: vec![None; p],
        }];
        let b_index = 1;
        let mut sections = Vec::with_capacity(p);
        for &e in &reduced {
            sections.push(match e {
                0 => None,
                1 => Some((0, false)),
                e if e == p - 1 => Some((0, true)),
                e => Some((2 + powers.iter().position(|&x| x == e).unwrap(), false)),
            });
        }
        sections.push(Some((b_index, false)));
        gens.push(GeneratorSpec {
            name: "b".into(),
            perm: (0..p as u8).collect(),
            sections,
        });
        for &e in &powers {
            gens.push(GeneratorSpec {
                name: format!("a{e}"),
                perm: shift(p, e),
                sections: vec![None; p],
            });
        }
        let shown: Vec<String> = exps.iter().map(|e| e.to_string()).collect();
        GroupDef::new(&format!("ggs:{p}:{}", shown.join(",")), p, gens, true)
    }

    /// Looks up a built-in by name: `grigorchuk`, `gupta-sidki:<p>` or
    /// `ggs:<p>:<e1,..,e_{p-1}>`.
    pub fn builtin(name: &str) -> Result<GroupDef> {
        let parts: Vec<&str> = name.trim().split(':').collect();
        match parts.as_slice() {
            ["grigorchuk"] => Ok(GroupDef::grigorchuk()),
            ["gupta-sidki" | "gupta_sidki", p] => GroupDef::gupta_sidki(parse_usize(p)?),
            ["ggs", p, v] => {
                let exps = v
                    .split(',')
                    .map(|x| x.trim().parse::<i64>().map_err(|_| bad(x)))
                    .collect::<Result<Vec<_>>>()?;
                GroupDef::ggs(parse_usize(p)?, &exps)
            }
            _ => Err(Error::InvalidParameters(format!("unknown built-in group `{name}`"))),
        }
    }
}

fn bad(s: &str) -> Error {
    Error::InvalidParameters(format!("`{s}` is not an integer"))
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim().parse().map_err(|_| bad(s))
}
