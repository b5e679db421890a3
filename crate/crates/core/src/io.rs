//! Line-oriented plain-text interchange format for instances.
//!
//! Layout (vertex indices are 0-based):
//!
//! ```text
//! shapefit-v1 <n> <d> <edge_count>
//! i x1 ... xd            n location lines (section optional)
//! i j v1 ... vd [g|b]    edge_count observation lines, label optional
//! ```
//!
//! Floats are written with 17 significant digits so parsing reproduces the
//! exact f64 bit patterns. Location and observation lines are told apart by
//! token count, which is unambiguous given `d` from the header.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::{EdgeLabel, LocationSet, Observation, ObservationSet};

pub const FORMAT_TAG: &str = "shapefit-v1";

/// A parsed instance: observations plus optional ground-truth locations.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub locations: Option<LocationSet>,
    pub observations: ObservationSet,
}

/// Formats an f64 with 17 significant digits (round-trip exact).
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn format_instance(locations: Option<&LocationSet>, obs: &ObservationSet) -> Result<String> {
    if let Some(t) = locations {
        if t.n() != obs.n() || t.dim() != obs.dim() {
            return Err(Error::InvalidInput(
                "locations and observations disagree on n or d".into(),
            ));
        }
    }
    let mut out = String::new();
    writeln!(out, "{FORMAT_TAG} {} {} {}", obs.n(), obs.dim(), obs.len()).unwrap();
    if let Some(t) = locations {
        for (i, p) in t.iter().enumerate() {
            write!(out, "{i}").unwrap();
            for x in p {
                write!(out, " {}", format_float(*x)).unwrap();
            }
            out.push('\n');
        }
    }
    let labels = obs.labels();
    for (e, o) in obs.iter().enumerate() {
        write!(out, "{} {}", o.i, o.j).unwrap();
        for x in &o.direction {
            write!(out, " {}", format_float(*x)).unwrap();
        }
        if let Some(labels) = labels {
            out.push_str(match labels[e] {
                EdgeLabel::Good => " g",
                EdgeLabel::Bad => " b",
            });
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_instance(
    path: &Path,
    locations: Option<&LocationSet>,
    obs: &ObservationSet,
) -> Result<()> {
    let text = format_instance(locations, obs)?;
    std::fs::write(path, text)?;
    Ok(())
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| parse_err(line, format!("bad float {tok:?}")))
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| parse_err(line, format!("bad index {tok:?}")))
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(0, "empty instance file"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 4 || toks[0] != FORMAT_TAG {
        return Err(parse_err(
            hline,
            format!("expected header \"{FORMAT_TAG} <n> <d> <edges>\""),
        ));
    }
    let n = parse_usize(toks[1], hline)?;
    let d = parse_usize(toks[2], hline)?;
    let edge_count = parse_usize(toks[3], hline)?;
    if d == 0 {
        return Err(parse_err(hline, "dimension must be positive"));
    }

    let mut location_rows: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut observations: Vec<Observation> = Vec::new();
    let mut labels: Vec<EdgeLabel> = Vec::new();
    let mut unlabeled = 0usize;

    for (lineno, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() == d + 1 {
            if !observations.is_empty() {
                return Err(parse_err(lineno, "location line after observation lines"));
            }
            let i = parse_usize(toks[0], lineno)?;
            let coords = toks[1..]
                .iter()
                .map(|t| parse_f64(t, lineno))
                .collect::<Result<Vec<f64>>>()?;
            location_rows.push((i, coords));
        } else if toks.len() == d + 2 || toks.len() == d + 3 {
            let i = parse_usize(toks[0], lineno)?;
            let j = parse_usize(toks[1], lineno)?;
            let direction = toks[2..d + 2]
                .iter()
                .map(|t| parse_f64(t, lineno))
                .collect::<Result<Vec<f64>>>()?;
            if toks.len() == d + 3 {
                labels.push(match toks[d + 2] {
                    "g" => EdgeLabel::Good,
                    "b" => EdgeLabel::Bad,
                    other => {
                        return Err(parse_err(lineno, format!("unknown label {other:?}")))
                    }
                });
            } else {
                unlabeled += 1;
            }
            observations.push(Observation { i, j, direction });
        } else {
            return Err(parse_err(
                lineno,
                format!("line has {} tokens, expected {}, {} or {}", toks.len(), d + 1, d + 2, d + 3),
            ));
        }
    }

    if observations.len() != edge_count {
        return Err(parse_err(
            0,
            format!(
                "header promises {edge_count} observation lines, found {}",
                observations.len()
            ),
        ));
    }
    if !labels.is_empty() && unlabeled > 0 {
        return Err(parse_err(
            0,
            "labels must cover every observation or none",
        ));
    }

    let locations = if location_rows.is_empty() {
        None
    } else {
        if location_rows.len() != n {
            return Err(parse_err(
                0,
                format!("{} location lines for n = {n}", location_rows.len()),
            ));
        }
        let mut points = vec![None; n];
        for (i, coords) in location_rows {
            if i >= n {
                return Err(parse_err(0, format!("location index {i} out of range")));
            }
            if points[i].replace(coords).is_some() {
                return Err(parse_err(0, format!("duplicate location index {i}")));
            }
        }
        Some(LocationSet::new(
            d,
            points.into_iter().map(|p| p.unwrap()).collect(),
        )?)
    };

    let labels = if labels.is_empty() { None } else { Some(labels) };
    let observations = ObservationSet::new(n, d, observations, labels)
        .map_err(|e| Error::InvalidInput(format!("instance validation failed: {e}")))?;

    Ok(Instance {
        locations,
        observations,
    })
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path)?;
    parse_instance(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_locations_and_labels() {
        let t0 = crate::synth::sample_gaussian_locations(7, 3, 4).unwrap();
        let g = crate::graph::sample_erdos_renyi(7, 0.8, 5).unwrap();
        let obs = crate::synth::corrupt_observations(
            &t0,
            &g,
            &crate::synth::CorruptionConfig {
                q: 0.4,
                sigma: 0.03,
                seed: 6,
            },
        )
        .unwrap();
        let text = format_instance(Some(&t0), &obs).unwrap();
        let parsed = parse_instance(&text).unwrap();
        assert_eq!(parsed.locations.as_ref().unwrap().flat(), t0.flat());
        assert_eq!(parsed.observations, obs);
        // Formatting the parse reproduces the bytes.
        let text2 =
            format_instance(parsed.locations.as_ref(), &parsed.observations).unwrap();
        assert_eq!(text, text2);
    }

    #[test]
    fn parses_instances_without_location_section() {
        let text = "shapefit-v1 2 2 1\n0 1 1.0 0.0\n";
        let inst = parse_instance(text).unwrap();
        assert!(inst.locations.is_none());
        assert_eq!(inst.observations.len(), 1);
        assert!(inst.observations.labels().is_none());
    }

    #[test]
    fn rejects_non_unit_direction_naming_edge() {
        let text = "shapefit-v1 2 2 1\n0 1 1.0 1.0\n";
        let err = parse_instance(text).unwrap_err();
        assert!(err.to_string().contains("(0, 1)"), "{err}");
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(parse_instance("").is_err());
        assert!(parse_instance("shapefit-v2 2 2 1\n0 1 1.0 0.0\n").is_err());
        assert!(parse_instance("shapefit-v1 2 2 2\n0 1 1.0 0.0\n").is_err());
        assert!(parse_instance("shapefit-v1 2 2 1\n0 1 1.0 0.0 0.0 0.0\n").is_err());
        assert!(parse_instance("shapefit-v1 2 2 1\n0 1 1.0 0.0 x\n").is_err());
    }

    #[test]
    fn mixed_labeling_is_rejected() {
        let text = "shapefit-v1 3 2 2\n0 1 1.0 0.0 g\n0 2 1.0 0.0\n";
        assert!(parse_instance(text).is_err());
    }
}
