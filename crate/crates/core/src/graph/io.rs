use serde_json::{json, Number, Value};

use super::WeightedGraph;
use crate::error::{Error, Result};
use crate::weight::{self, Rat};

fn perr<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

impl WeightedGraph {
    /// Edge-list text: first line `n`, then `u v [w]` lines. Blank lines and
    /// `#` comments are skipped.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let Some((ln, first)) = lines.next() else {
            return perr(1, "missing vertex count");
        };
        let n: usize = match first.parse() {
            Ok(n) => n,
            Err(_) => return perr(ln, format!("bad vertex count {first:?}")),
        };
        let mut g = WeightedGraph::new(n);
        let mut seen = std::collections::BTreeSet::new();
        for (ln, line) in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() < 2 || parts.len() > 3 {
                return perr(ln, format!("expected `u v [w]`, got {line:?}"));
            }
            let u: usize = parts[0].parse().or_else(|_| perr(ln, format!("bad vertex {:?}", parts[0])))?;
            let v: usize = parts[1].parse().or_else(|_| perr(ln, format!("bad vertex {:?}", parts[1])))?;
            let w = match parts.get(2) {
                Some(s) => match weight::parse(s) {
                    Some(w) => w,
                    None => return perr(ln, format!("bad weight {s:?}")),
                },
                None => Rat::from_integer(1.into()),
            };
            if u >= n || v >= n || u == v {
                return perr(ln, format!("edge ({u},{v}) invalid for n = {n}"));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return perr(ln, format!("duplicate edge ({u},{v})"));
            }
            g.set_weight(u, v, w)?;
        }
        Ok(g)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.n());
        for (u, v, w) in self.edges() {
            s.push_str(&format!("{u} {v} {}\n", weight::format(w)));
        }
        s
    }

    /// `{"n": 3, "edges": [[0, 1, 0.5], ...]}`; weights may be numbers or
    /// `"p/q"` strings.
    pub fn parse_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        let bad = |m: &str| Error::Parse { line: 1, msg: m.to_string() };
        let n = v.get("n").and_then(Value::as_u64).ok_or_else(|| bad("missing integer field n"))? as usize;
        let mut g = WeightedGraph::new(n);
        let edges = match v.get("edges") {
            Some(Value::Array(a)) => a.as_slice(),
            None => &[],
            Some(_) => return Err(bad("edges must be an array")),
        };
        for (i, e) in edges.iter().enumerate() {
            let arr = e.as_array().ok_or_else(|| bad(&format!("edge {i} is not an array")))?;
            if arr.len() < 2 || arr.len() > 3 {
                return Err(bad(&format!("edge {i} must be [u, v] or [u, v, w]")));
            }
            let u = arr[0].as_u64().ok_or_else(|| bad(&format!("edge {i}: bad endpoint")))? as usize;
            let v = arr[1].as_u64().ok_or_else(|| bad(&format!("edge {i}: bad endpoint")))? as usize;
            let w = match arr.get(2) {
                None => Some(Rat::from_integer(1.into())),
                Some(Value::Number(x)) => weight::parse(&x.to_string()),
                Some(Value::String(x)) => weight::parse(x),
                Some(_) => None,
            }
            .ok_or_else(|| bad(&format!("edge {i}: bad weight")))?;
            if u >= n || v >= n || u == v {
                return Err(bad(&format!("edge {i}: ({u},{v}) invalid for n = {n}")));
            }
            if g.has_edge(u, v) {
                return Err(bad(&format!("edge {i}: duplicate ({u},{v})")));
            }
            g.set_weight(u, v, w)?;
        }
        Ok(g)
    }

    pub fn to_json_value(&self) -> Value {
        let edges: Vec<Value> = self
            .edges()
            .map(|(u, v, w)| {
                let s = weight::format(w);
                let wv = if s.contains('/') { Value::String(s) } else { Value::Number(s.parse::<Number>().unwrap()) };
                json!([u, v, wv])
            })
            .collect();
        json!({ "n": self.n(), "edges": edges })
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    /// Detects the format from the first non-blank character.
    pub fn parse_any(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            WeightedGraph::parse_json(text)
        } else {
            WeightedGraph::parse_text(text)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::random_graph;
    use crate::weight::rat;
    use proptest::prelude::*;

    #[test]
    fn text_examples() {
        let g = WeightedGraph::parse_text("3\n0 1 1.0\n0 2 0.5").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.weight(0, 1), rat(1, 1));
        assert_eq!(g.weight(0, 2), rat(1, 2));
        assert_eq!(g.weight(1, 2), rat(0, 1));
        let e = WeightedGraph::parse_text("2\n").unwrap();
        assert_eq!((e.n(), e.edge_count()), (2, 0));
        assert!(matches!(WeightedGraph::parse_text("2\n0 1 1.5"), Err(Error::Domain(_))));
    }

    #[test]
    fn text_errors_carry_line_numbers() {
        match WeightedGraph::parse_text("3\n0 1\n\n0 x 1") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(WeightedGraph::parse_text("3\n0 1\n1 0"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(WeightedGraph::parse_text("x"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(WeightedGraph::parse_text("3\n0 5"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn json_examples() {
        let g = WeightedGraph::parse_json(r#"{"n":3,"edges":[[0,1,0.1],[1,2],[0,2,"1/3"]]}"#).unwrap();
        assert_eq!(g.weight(0, 1), rat(1, 10));
        assert_eq!(g.weight(1, 2), rat(1, 1));
        assert_eq!(g.weight(0, 2), rat(1, 3));
        assert!(matches!(WeightedGraph::parse_json(r#"{"n":2,"edges":[[0,1,2]]}"#), Err(Error::Domain(_))));
        assert!(WeightedGraph::parse_json(r#"{"edges":[]}"#).is_err());
    }

    #[test]
    fn auto_detect() {
        let g = random_graph(6, 0.5, 1).unwrap();
        assert_eq!(WeightedGraph::parse_any(&g.to_json()).unwrap(), g);
        assert_eq!(WeightedGraph::parse_any(&g.to_text()).unwrap(), g);
    }

    fn arb_graph() -> impl Strategy<Value = WeightedGraph> {
        (1usize..9).prop_flat_map(|n| {
            proptest::collection::vec((0..n, 0..n, 0i64..=1000, 1i64..=1000), 0..20).prop_map(move |es| {
                let mut g = WeightedGraph::new(n);
                for (u, v, a, b) in es {
                    if u != v {
                        let (a, b) = if a > b { (b, a) } else { (a, b) };
                        g.set_weight(u, v, rat(a, b.max(1))).unwrap();
                    }
                }
                g
            })
        })
    }

    proptest! {
        #[test]
        fn text_round_trip(g in arb_graph()) {
            prop_assert_eq!(WeightedGraph::parse_text(&g.to_text()).unwrap(), g);
        }

        #[test]
        fn json_round_trip(g in arb_graph()) {
            let s = g.to_json();
            let back = WeightedGraph::parse_json(&s).unwrap();
            prop_assert_eq!(back.to_json(), s);
            prop_assert_eq!(back, g);
        }
    }
}
