//! Text serialization.
//!
//! Edge list: a `#directed=0|1` header, then one `node_a<TAB>node_b` line per
//! edge in lexicographic order, then one line per isolated node (single
//! column) so that degree-0 nodes survive the round trip.
//!
//! User map: `user_id<TAB>item,item,...` with items in frequency order.

use std::io::{BufRead, Write};

use super::{Graph, NodeId, UserItemMap};
use crate::error::{Error, Result};

fn check_name(name: &str) -> Result<()> {
    if name.is_empty() || name.contains(['\t', '\n', '\r']) {
        return Err(Error::format(format!("node name {name:?} cannot be serialized")));
    }
    Ok(())
}

impl Graph {
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "#directed={}", u8::from(self.directed))?;
        for (a, b) in self.edges() {
            let (a, b) = (self.name(a), self.name(b));
            check_name(a)?;
            check_name(b)?;
            writeln!(out, "{a}\t{b}")?;
        }
        let mut touched = vec![false; self.node_count()];
        for (a, b) in self.edges() {
            touched[a as usize] = true;
            touched[b as usize] = true;
        }
        for v in 0..self.node_count() as NodeId {
            if !touched[v as usize] {
                check_name(self.name(v))?;
                writeln!(out, "{}", self.name(v))?;
            }
        }
        Ok(())
    }

    pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .transpose()?
            .ok_or_else(|| Error::format("edge list is empty"))?;
        let directed = match header.trim_end() {
            "#directed=0" => false,
            "#directed=1" => true,
            other => return Err(Error::format(format!("bad edge-list header {other:?}"))),
        };
        let mut nodes = Vec::new();
        let mut edges = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split('\t');
            match (cols.next(), cols.next(), cols.next()) {
                (Some(a), None, _) => nodes.push(a.to_string()),
                (Some(a), Some(b), None) if !a.is_empty() && !b.is_empty() => {
                    edges.push((a.to_string(), b.to_string()))
                }
                _ => {
                    return Err(Error::format(format!(
                        "edge list line {}: expected one or two columns",
                        i + 2
                    )))
                }
            }
        }
        Ok(Graph::from_named_edges(directed, nodes, edges))
    }
}

impl UserItemMap {
    pub fn write_tsv<W: Write>(&self, graph: &Graph, mut out: W) -> Result<()> {
        for (user, items) in self.iter() {
            check_name(user)?;
            let names: Vec<&str> = items.iter().map(|&i| graph.name(i)).collect();
            if let Some(bad) = names.iter().find(|n| n.contains(',')) {
                return Err(Error::format(format!("item {bad:?} contains a comma")));
            }
            writeln!(out, "{user}\t{}", names.join(","))?;
        }
        Ok(())
    }

    /// Read a user map, resolving item names against `graph`'s vocabulary.
    pub fn read_tsv<R: BufRead>(reader: R, graph: &Graph) -> Result<UserItemMap> {
        let mut map = UserItemMap::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let (user, items) = line
                .split_once('\t')
                .ok_or_else(|| Error::format(format!("user map line {}: missing tab", i + 1)))?;
            let ids = items
                .split(',')
                .filter(|s| !s.is_empty())
                .map(|name| {
                    graph.index_of(name).ok_or_else(|| {
                        Error::Consistency(format!("user map item {name:?} is not a graph node"))
                    })
                })
                .collect::<Result<Vec<NodeId>>>()?;
            map.insert(user.to_string(), ids);
        }
        Ok(map)
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn edge_list_layout() {
        let g = Graph::from_named_edges(false, ["rt.com"], [("b.com", "a.com"), ("c.com", "a.com")]);
        let mut out = Vec::new();
        g.write_edge_list(&mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "#directed=0\na.com\tb.com\na.com\tc.com\nrt.com\n"
        );
    }

    #[test]
    fn bad_inputs() {
        assert!(Graph::read_edge_list("".as_bytes()).is_err());
        assert!(Graph::read_edge_list("#directed=2\n".as_bytes()).is_err());
        assert!(Graph::read_edge_list("#directed=0\na\tb\tc\n".as_bytes()).is_err());
        let g = Graph::from_named_edges(false, Vec::<&str>::new(), [("a b", "x\ty")]);
        assert!(g.write_edge_list(Vec::new()).is_err());
    }

    #[test]
    fn user_map_round_trip() {
        let g = Graph::from_named_edges(false, Vec::<&str>::new(), [("a.com", "b.com")]);
        let mut m = UserItemMap::new();
        m.insert("u1".into(), vec![1, 0]);
        m.insert("u2".into(), vec![0]);
        let mut out = Vec::new();
        m.write_tsv(&g, &mut out).unwrap();
        assert_eq!(std::str::from_utf8(&out).unwrap(), "u1\tb.com,a.com\nu2\ta.com\n");
        assert_eq!(UserItemMap::read_tsv(&out[..], &g).unwrap(), m);
        assert!(UserItemMap::read_tsv("u\tzzz\n".as_bytes(), &g).is_err());
    }

    proptest! {
        #[test]
        fn edge_list_round_trips_bit_exactly(
            directed in any::<bool>(),
            n in 1usize..12,
            raw in prop::collection::vec((0usize..12, 0usize..12), 0..30),
        ) {
            let names: Vec<String> = (0..n).map(|i| format!("node{i}")).collect();
            let edges: Vec<(&str, &str)> = raw.iter()
                .map(|&(a, b)| (names[a % n].as_str(), names[b % n].as_str()))
                .collect();
            let g = Graph::from_named_edges(directed, names.iter().map(String::as_str), edges);
            let mut text = Vec::new();
            g.write_edge_list(&mut text).unwrap();
            let back = Graph::read_edge_list(&text[..]).unwrap();
            prop_assert_eq!(&back, &g);
            let mut again = Vec::new();
            back.write_edge_list(&mut again).unwrap();
            prop_assert_eq!(text, again);
        }
    }
}
