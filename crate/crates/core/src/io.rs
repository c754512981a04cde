//! JSON hyper-graph documents and CSV helpers.
//!
//! Undirected: `{"n": 3, "edges": [[0,1],[1,2]]}`.
//! Directed:   `{"n": 2, "arcs": [{"org": [0], "dst": [1]}]}`.
//! Both accept an optional `"labels"` array of length `n`.

use std::io::{Read, Write};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{AnyHypergraph, Arc, DirectedHypergraph, Hypergraph};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    n: usize,
    #[serde(default)]
    edges: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    arcs: Option<Vec<ArcDoc>>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArcDoc {
    org: Vec<usize>,
    dst: Vec<usize>,
}

#[derive(Serialize)]
struct UndirectedOut<'a> {
    n: usize,
    edges: &'a [Vec<usize>],
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<&'a [String]>,
}

#[derive(Serialize)]
struct DirectedOut<'a> {
    n: usize,
    arcs: Vec<ArcDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<&'a [String]>,
}

pub fn parse_hypergraph(text: &str) -> Result<AnyHypergraph> {
    let raw: RawDocument =
        serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    let parsed = match (raw.edges, raw.arcs) {
        (Some(edges), None) => {
            let h = Hypergraph::new(raw.n, edges)?;
            AnyHypergraph::Undirected(match raw.labels {
                Some(l) => h.with_labels(l)?,
                None => h,
            })
        }
        (None, Some(arcs)) => {
            let arcs = arcs
                .into_iter()
                .map(|a| Arc {
                    org: a.org,
                    dst: a.dst,
                })
                .collect();
            let d = DirectedHypergraph::new(raw.n, arcs)?;
            AnyHypergraph::Directed(match raw.labels {
                Some(l) => d.with_labels(l)?,
                None => d,
            })
        }
        (Some(_), Some(_)) => {
            return Err(Error::Malformed(
                "document has both \"edges\" and \"arcs\"".into(),
            ))
        }
        (None, None) => {
            return Err(Error::Malformed(
                "document needs \"edges\" or \"arcs\"".into(),
            ))
        }
    };
    Ok(parsed)
}

pub fn read_hypergraph<R: Read>(mut reader: R) -> Result<AnyHypergraph> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    parse_hypergraph(&text)
}

pub fn to_json(h: &AnyHypergraph) -> Result<String> {
    let text = match h {
        AnyHypergraph::Undirected(h) => serde_json::to_string(&UndirectedOut {
            n: h.vertex_count(),
            edges: h.edges(),
            labels: h.labels(),
        })?,
        AnyHypergraph::Directed(d) => serde_json::to_string(&DirectedOut {
            n: d.vertex_count(),
            arcs: d
                .arcs()
                .iter()
                .map(|a| ArcDoc {
                    org: a.org.clone(),
                    dst: a.dst.clone(),
                })
                .collect(),
            labels: d.labels(),
        })?,
    };
    Ok(text)
}

/// Formats with 17 significant digits, which round-trips any `f64`.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Row-major CSV dump, one matrix row per line, no header.
pub fn write_matrix_csv<W: Write>(out: W, m: &DMatrix<f64>) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    for i in 0..m.nrows() {
        w.write_record((0..m.ncols()).map(|j| fmt17(m[(i, j)])))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `x,y` points from a CSV file with a header row.
pub fn read_points_csv<R: Read>(reader: R) -> Result<Vec<(f64, f64)>> {
    #[derive(Deserialize)]
    struct Point {
        x: f64,
        y: f64,
    }
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut points = Vec::new();
    for row in r.deserialize() {
        let p: Point = row?;
        points.push((p.x, p.y));
    }
    Ok(points)
}

/// Serde helpers writing non-finite floats as the strings `"inf"`/`"-inf"`/`"nan"`.
pub mod float_or_inf {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str(&super::fmt17(*x))
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("bad float {other:?}"))),
            },
        }
    }

    pub mod vec {
        use serde::ser::SerializeSeq;
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
            #[derive(serde::Serialize)]
            struct W(#[serde(with = "super")] f64);
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for &x in xs {
                seq.serialize_element(&W(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            #[derive(serde::Deserialize)]
            struct W(#[serde(with = "super")] f64);
            Ok(Vec::<W>::deserialize(d)?.into_iter().map(|w| w.0).collect())
        }
    }

    pub mod matrix {
        use serde::ser::SerializeSeq;
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(rows: &[Vec<f64>], s: S) -> Result<S::Ok, S::Error> {
            #[derive(serde::Serialize)]
            struct Row<'a>(#[serde(with = "super::vec")] &'a [f64]);
            let mut seq = s.serialize_seq(Some(rows.len()))?;
            for r in rows {
                seq.serialize_element(&Row(r))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<f64>>, D::Error> {
            #[derive(serde::Deserialize)]
            struct Row(#[serde(with = "super::vec")] Vec<f64>);
            Ok(Vec::<Row>::deserialize(d)?
                .into_iter()
                .map(|r| r.0)
                .collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_examples() {
        let h = parse_hypergraph(r#"{"n":3,"edges":[[0,1],[1,2]]}"#).unwrap();
        match h {
            AnyHypergraph::Undirected(h) => assert_eq!(h.edges(), &[vec![0, 1], vec![1, 2]]),
            _ => panic!("expected undirected"),
        }
        let h = parse_hypergraph(r#"{"n":4,"edges":[[0,1,2,3]]}"#).unwrap();
        assert_eq!((h.edge_count(), h.rank()), (1, 4));

        let err = parse_hypergraph(r#"{"n":2,"edges":[[0,2]]}"#).unwrap_err();
        assert!(matches!(
            err,
            Error::VertexOutOfRange {
                edge: 0,
                vertex: 2,
                ..
            }
        ));
        assert!(err.to_string().contains("vertex 2 out of range"));
    }

    #[test]
    fn parses_directed_with_labels() {
        let text =
            r#"{"n":2,"arcs":[{"org":[0],"dst":[1]},{"org":[1],"dst":[0]}],"labels":["a","b"]}"#;
        let h = parse_hypergraph(text).unwrap();
        assert!(h.is_directed());
        assert_eq!(to_json(&h).unwrap(), text);
    }

    #[test]
    fn rejects_bad_documents() {
        for bad in [
            r#"{"n":2}"#,
            r#"{"n":2,"edges":[[0,1]],"arcs":[]}"#,
            r#"{"n":2,"edges":[[0,1]],"extra":1}"#,
            r#"{"n":2,"edges":[[0,1]],"labels":["a"]}"#,
            r#"{"n":-1,"edges":[]}"#,
            "not json",
        ] {
            assert!(parse_hypergraph(bad).is_err(), "{bad}");
        }
        assert!(matches!(
            parse_hypergraph(r#"{"n":2,"edges":[[0,1],[]]}"#),
            Err(Error::EmptyEdge { edge: 1, .. })
        ));
        assert!(matches!(
            parse_hypergraph(r#"{"n":2,"arcs":[{"org":[],"dst":[1]}]}"#),
            Err(Error::EmptyEdge {
                edge: 0,
                what: "origin"
            })
        ));
    }

    #[test]
    fn csv_helpers() {
        let m = DMatrix::from_row_slice(1, 2, &[0.25, 1.0 / 3.0]);
        let mut buf = Vec::new();
        write_matrix_csv(&mut buf, &m).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let back: Vec<f64> = text.trim().split(',').map(|t| t.parse().unwrap()).collect();
        assert_eq!(back, vec![0.25, 1.0 / 3.0]);

        let pts = read_points_csv("x,y\n0,0\n1, 0.5\n".as_bytes()).unwrap();
        assert_eq!(pts, vec![(0.0, 0.0), (1.0, 0.5)]);
    }
}
