//! `--shape` grammar for homogeneous maps.
//!
//! ```text
//! tree:m=3:legs=1,2,3[:k=3]
//! loop:link=heawood:cycle=auto|<edges>|<v0>-<v1>-...:mult=1
//! ```
//!
//! A link value may itself contain colons (`link=cycle:7:pi/3`); tokens
//! without `=` continue the previous value.

use std::f64::consts::TAU;
use std::path::Path;

use harmord_core::cone::MetricGraph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CycleSpec {
    Auto,
    Edges(usize),
    Vertices(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShapeSpec {
    Tree {
        legs: Vec<usize>,
        pod_legs: usize,
    },
    Loop {
        link: Option<String>,
        cycle: CycleSpec,
        mult: usize,
    },
}

fn pairs(rest: &[&str]) -> Result<Vec<(String, String)>, String> {
    let mut out: Vec<(String, String)> = Vec::new();
    for tok in rest {
        match tok.split_once('=') {
            Some((k, v)) => out.push((k.trim().to_string(), v.trim().to_string())),
            None => match out.last_mut() {
                Some((_, v)) => {
                    v.push(':');
                    v.push_str(tok);
                }
                None => return Err(format!("expected key=value, got '{tok}'")),
            },
        }
    }
    Ok(out)
}

fn parse_usize(key: &str, v: &str) -> Result<usize, String> {
    v.parse()
        .map_err(|_| format!("{key}: expected a non-negative integer, got '{v}'"))
}

pub fn parse_shape(s: &str) -> Result<ShapeSpec, String> {
    let tokens: Vec<&str> = s.split(':').collect();
    let kv = pairs(&tokens[1..])?;
    match tokens[0] {
        "tree" => {
            let mut m = None;
            let mut legs = None;
            let mut k = None;
            for (key, v) in kv {
                match key.as_str() {
                    "m" => m = Some(parse_usize("m", &v)?),
                    "k" => k = Some(parse_usize("k", &v)?),
                    "legs" => {
                        legs = Some(
                            v.split(',')
                                .map(|x| parse_usize("legs", x.trim()))
                                .collect::<Result<Vec<_>, _>>()?,
                        )
                    }
                    other => return Err(format!("unknown tree key '{other}'")),
                }
            }
            let legs = match (m, legs) {
                (_, Some(legs)) => {
                    if let Some(m) = m {
                        if m != legs.len() {
                            return Err(format!("m = {m} but {} legs given", legs.len()));
                        }
                    }
                    legs
                }
                (Some(m), None) => default_legs(m),
                (None, None) => return Err("tree shape needs m or legs".into()),
            };
            let max_leg = legs.iter().copied().max().unwrap_or(0);
            Ok(ShapeSpec::Tree {
                pod_legs: k.unwrap_or(max_leg.max(2)),
                legs,
            })
        }
        "loop" => {
            let mut link = None;
            let mut cycle = CycleSpec::Auto;
            let mut mult = 1;
            for (key, v) in kv {
                match key.as_str() {
                    "link" => link = Some(v),
                    "mult" => mult = parse_usize("mult", &v)?,
                    "cycle" => {
                        cycle = if v == "auto" {
                            CycleSpec::Auto
                        } else if let Ok(n) = v.parse() {
                            CycleSpec::Edges(n)
                        } else {
                            CycleSpec::Vertices(v.split('-').map(str::to_string).collect())
                        }
                    }
                    other => return Err(format!("unknown loop key '{other}'")),
                }
            }
            Ok(ShapeSpec::Loop { link, cycle, mult })
        }
        other => Err(format!("unknown shape kind '{other}' (expected tree or loop)")),
    }
}

/// Alternating legs `1, 2, 1, 2, ...`, closing with leg 3 when `m` is odd.
fn default_legs(m: usize) -> Vec<usize> {
    let mut legs: Vec<usize> = (0..m).map(|i| i % 2 + 1).collect();
    if m % 2 == 1 && m > 1 {
        legs[m - 1] = 3;
    }
    legs
}

/// A link from a named constructor or a JSON graph file.
pub fn load_link(spec: &str) -> Result<MetricGraph, String> {
    if Path::new(spec).is_file() {
        let text = std::fs::read_to_string(spec).map_err(|e| format!("{spec}: {e}"))?;
        MetricGraph::from_json(&text).map_err(|e| format!("{spec}: {e}"))
    } else {
        MetricGraph::from_spec(spec).map_err(|e| e.to_string())
    }
}

/// Resolves a cycle selector to a closed vertex path.
pub fn select_cycle(graph: &MetricGraph, cycle: &CycleSpec) -> Result<Vec<usize>, String> {
    match cycle {
        CycleSpec::Auto => {
            // shortest simple cycle long enough to close up a homogeneous map
            graph
                .simple_cycles(graph.vertex_count())
                .into_iter()
                .filter_map(|c| graph.cycle_length(&c).map(|l| (l, c)))
                .filter(|(l, _)| *l >= TAU - 1e-9)
                .min_by(|a, b| a.0.total_cmp(&b.0))
                .map(|(_, c)| c)
                .ok_or_else(|| "link has no simple cycle of length >= 2 pi".to_string())
        }
        CycleSpec::Edges(n) => graph
            .simple_cycles(*n)
            .into_iter()
            .find(|c| c.len() == *n)
            .ok_or_else(|| format!("link has no simple cycle with {n} edges")),
        CycleSpec::Vertices(names) => names
            .iter()
            .map(|name| {
                graph
                    .names()
                    .iter()
                    .position(|n| n == name)
                    .or_else(|| name.parse().ok().filter(|&i: &usize| i < graph.vertex_count()))
                    .ok_or_else(|| format!("unknown vertex '{name}'"))
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_shapes() {
        assert_eq!(
            parse_shape("tree:m=3:legs=1,2,3").unwrap(),
            ShapeSpec::Tree {
                legs: vec![1, 2, 3],
                pod_legs: 3
            }
        );
        assert_eq!(
            parse_shape("loop:link=heawood:cycle=auto:mult=1").unwrap(),
            ShapeSpec::Loop {
                link: Some("heawood".into()),
                cycle: CycleSpec::Auto,
                mult: 1
            }
        );
        assert_eq!(
            parse_shape("loop:link=cycle:7:pi/3:cycle=7:mult=2").unwrap(),
            ShapeSpec::Loop {
                link: Some("cycle:7:pi/3".into()),
                cycle: CycleSpec::Edges(7),
                mult: 2
            }
        );
        assert_eq!(
            parse_shape("tree:m=5").unwrap(),
            ShapeSpec::Tree {
                legs: vec![1, 2, 1, 2, 3],
                pod_legs: 3
            }
        );
        assert!(parse_shape("tree:m=2:legs=1,2,3").is_err());
        assert!(parse_shape("blob:m=2").is_err());
        assert!(parse_shape("tree:x=1").is_err());
    }

    #[test]
    fn cycle_selection() {
        let h = load_link("heawood").unwrap();
        let auto = select_cycle(&h, &CycleSpec::Auto).unwrap();
        assert_eq!(auto.len(), 6);
        assert_eq!(select_cycle(&h, &CycleSpec::Edges(8)).unwrap().len(), 8);
        assert!(select_cycle(&h, &CycleSpec::Edges(4)).is_err());
        let c = load_link("cycle:7:pi/3").unwrap();
        let named = select_cycle(&c, &CycleSpec::Vertices(vec!["v0".into(), "1".into()])).unwrap();
        assert_eq!(named, vec![0, 1]);
        assert!(select_cycle(&c, &CycleSpec::Vertices(vec!["nope".into()])).is_err());
    }
}
