//! Built-in example transducers over the binary alphabet `{0, 1}`, reading
//! the binary expansion least significant digit first.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{Transducer, Transition};
use crate::rational::{self, int, Rational};

pub const NAMES: &[&str] = &["naf", "wnaf", "gray", "block01", "block11", "block10m01", "simple"];

fn build(states: usize, edges: &[(usize, usize, i64, Rational)], finals: &[(usize, i64)]) -> Transducer {
    let transitions = edges
        .iter()
        .map(|(f, t, i, o)| Transition::new(*f, *t, int(*i), o.clone()))
        .collect();
    let finals: BTreeMap<_, _> = finals.iter().map(|&(s, a)| (s, int(a))).collect();
    Transducer::new(states, transitions, finals, None).expect("builtin is valid")
}

/// Hamming weight of the non-adjacent form.
pub fn naf() -> Transducer {
    build(
        3,
        &[
            (1, 1, 0, int(0)),
            (1, 2, 1, int(1)),
            (2, 1, 0, int(0)),
            (2, 3, 1, int(0)),
            (3, 2, 0, int(1)),
            (3, 3, 1, int(0)),
        ],
        &[(1, 0), (2, 0), (3, 1)],
    )
}

/// Hamming weight of the width-`w` non-adjacent form; `w + 1` states.
///
/// State 1 loops on `0|0` and moves to 2 on `1|1`. States `2..w` form a
/// chain on both inputs with output 0. State `w` returns to 1 on `0|0` and
/// moves to `w + 1` on `1|0`; state `w + 1` loops on `1|0` and returns to 2
/// on `0|1`. For `w = 2` this is [`naf`].
pub fn wnaf(w: usize) -> Result<Transducer> {
    if w < 2 {
        return Err(Error::BadParam(format!("wnaf needs w >= 2, got {w}")));
    }
    let top = w + 1;
    let mut edges = vec![(1, 1, 0, int(0)), (1, 2, 1, int(1))];
    for s in 2..w {
        edges.push((s, s + 1, 0, int(0)));
        edges.push((s, s + 1, 1, int(0)));
    }
    edges.extend([
        (w, 1, 0, int(0)),
        (w, top, 1, int(0)),
        (top, 2, 0, int(1)),
        (top, top, 1, int(0)),
    ]);
    Ok(build(top, &edges, &[(top, 1)]))
}

/// Gray code. State 1 emits nothing; the final component is `{2, 3}`.
pub fn gray() -> Transducer {
    build(
        3,
        &[
            (1, 2, 0, int(0)),
            (1, 3, 1, int(0)),
            (2, 2, 0, int(0)),
            (2, 3, 1, int(1)),
            (3, 2, 0, int(1)),
            (3, 3, 1, int(0)),
        ],
        &[(1, 0), (2, 0), (3, 1)],
    )
}

/// Number of `01` blocks.
pub fn block01() -> Transducer {
    simple([int(0), int(0), int(0), int(1)])
}

/// Number of `11` blocks.
pub fn block11() -> Transducer {
    simple([int(0), int(1), int(0), int(0)])
}

/// Number of `10` blocks minus number of `01` blocks. State 1 is transient.
pub fn block10m01() -> Transducer {
    build(
        3,
        &[
            (1, 2, 0, int(0)),
            (1, 3, 1, int(0)),
            (2, 2, 0, int(0)),
            (2, 3, 1, int(1)),
            (3, 3, 1, int(0)),
            (3, 2, 0, int(-1)),
        ],
        &[],
    )
}

/// Two-state machine with output labels `a = (a1, a2, a3, a4)`:
/// `1 -0|a1-> 1`, `2 -1|a2-> 2`, `1 -1|a3-> 2`, `2 -0|a4-> 1`.
pub fn simple(a: [Rational; 4]) -> Transducer {
    let [a1, a2, a3, a4] = a;
    build(2, &[(1, 1, 0, a1), (1, 2, 1, a3), (2, 2, 1, a2), (2, 1, 0, a4)], &[])
}

/// Look up a builtin by name with `key=value` parameters.
///
/// * `wnaf`: `w=<int>` (default 2)
/// * `simple`: `a=(a1,a2,a3,a4)` or any of `a1=..`, `a2=..`, `a3=..`, `a4=..`
///   (default 0)
pub fn builtin(name: &str, params: &[(String, String)]) -> Result<Transducer> {
    if !NAMES.contains(&name) {
        return Err(Error::UnknownBuiltin(name.to_string()));
    }
    let allowed: &[&str] = match name {
        "wnaf" => &["w"],
        "simple" => &["a", "a1", "a2", "a3", "a4"],
        _ => &[],
    };
    if let Some((key, _)) = params.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
        return Err(Error::BadParam(format!("builtin `{name}` has no parameter `{key}`")));
    }
    match name {
        "naf" => Ok(naf()),
        "gray" => Ok(gray()),
        "block01" => Ok(block01()),
        "block11" => Ok(block11()),
        "block10m01" => Ok(block10m01()),
        "wnaf" => {
            let w = match params.iter().rev().find(|(k, _)| k == "w") {
                Some((_, v)) => v
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| Error::BadParam(format!("w must be an integer, got `{v}`")))?,
                None => 2,
            };
            wnaf(w)
        }
        "simple" => {
            let mut a: [Rational; 4] = Default::default();
            for (key, value) in params {
                if key == "a" {
                    let parts: Vec<&str> = value
                        .trim()
                        .trim_start_matches('(')
                        .trim_end_matches(')')
                        .split(',')
                        .collect();
                    if parts.len() != 4 {
                        return Err(Error::BadParam(format!(
                            "a must list four values (a1,a2,a3,a4), got `{value}`"
                        )));
                    }
                    for (slot, part) in a.iter_mut().zip(parts) {
                        *slot = rational::parse(part).map_err(|e| Error::BadParam(e.to_string()))?;
                    }
                } else {
                    let i: usize = key[1..].parse().expect("checked key");
                    a[i - 1] = rational::parse(value).map_err(|e| Error::BadParam(e.to_string()))?;
                }
            }
            Ok(simple(a))
        }
        other => Err(Error::UnknownBuiltin(other.to_string())),
    }
}

/// Every builtin with default parameters, plus `wnaf` for `w = 3..6`.
pub fn all_default() -> Vec<(String, Transducer)> {
    let mut out = vec![
        ("naf".to_string(), naf()),
        ("gray".to_string(), gray()),
        ("block01".to_string(), block01()),
        ("block11".to_string(), block11()),
        ("block10m01".to_string(), block10m01()),
        ("simple".to_string(), simple(Default::default())),
    ];
    for w in 2..=6 {
        out.push((format!("wnaf(w={w})"), wnaf(w).unwrap()));
    }
    out
}
