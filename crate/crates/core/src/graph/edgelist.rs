//! Plain-text edge lists.
//!
//! ```text
//! # websurf-v1 n=<n> d=<d> p=<p> beta=<beta> variant=<name> seed=<u64>
//! s t
//! ...
//! ```
//!
//! One `s t` line per directed edge in creation order; the root's self-loops
//! are implied and never written. Floats use Rust's shortest round-trip
//! formatting, so read-then-write reproduces the file byte for byte.

use std::io::{BufRead, Write};

use super::{MultiDigraph, ModelConfig};
use crate::error::{Error, Result};

const MAGIC: &str = "# websurf-v1";

#[derive(Clone, Debug, PartialEq)]
pub struct GraphHeader {
    pub n: usize,
    pub d: usize,
    pub p: f64,
    pub beta: f64,
    pub variant: String,
    pub seed: u64,
}

impl GraphHeader {
    pub fn from_config(config: &ModelConfig) -> Self {
        GraphHeader {
            n: config.n,
            d: config.d,
            p: config.p,
            beta: config.beta,
            variant: config.variant.name(),
            seed: config.seed.master_seed,
        }
    }

    fn line(&self) -> String {
        format!(
            "{MAGIC} n={} d={} p={} beta={} variant={} seed={}",
            self.n, self.d, self.p, self.beta, self.variant, self.seed
        )
    }

    fn parse(line: &str) -> Result<Self> {
        let bad = |reason: String| Error::Parse { line: 1, reason };
        let rest = line
            .strip_prefix(MAGIC)
            .ok_or_else(|| bad(format!("missing `{MAGIC}` header")))?;
        let mut fields = std::collections::HashMap::new();
        for tok in rest.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| bad(format!("field `{tok}` is not key=value")))?;
            if fields.insert(k, v).is_some() {
                return Err(bad(format!("duplicate field `{k}`")));
            }
        }
        fn take<'a>(
            fields: &std::collections::HashMap<&str, &'a str>,
            key: &str,
        ) -> Result<&'a str> {
            fields.get(key).copied().ok_or_else(|| Error::Parse {
                line: 1,
                reason: format!("missing field `{key}`"),
            })
        }
        fn num<T: std::str::FromStr>(raw: &str, key: &str) -> Result<T> {
            raw.parse().map_err(|_| Error::Parse {
                line: 1,
                reason: format!("field `{key}` = `{raw}` is not a number"),
            })
        }
        if fields.len() != 6 {
            return Err(bad("expected exactly n, d, p, beta, variant, seed".into()));
        }
        Ok(GraphHeader {
            n: num(take(&fields, "n")?, "n")?,
            d: num(take(&fields, "d")?, "d")?,
            p: num(take(&fields, "p")?, "p")?,
            beta: num(take(&fields, "beta")?, "beta")?,
            variant: take(&fields, "variant")?.to_string(),
            seed: num(take(&fields, "seed")?, "seed")?,
        })
    }
}

pub fn write_edge_list<W: Write>(
    mut out: W,
    header: &GraphHeader,
    g: &MultiDigraph,
) -> std::io::Result<()> {
    writeln!(out, "{}", header.line())?;
    for (s, t) in g.edges() {
        writeln!(out, "{s} {t}")?;
    }
    out.flush()
}

pub fn read_edge_list<R: BufRead>(input: R) -> Result<(GraphHeader, MultiDigraph)> {
    let mut lines = input.lines();
    let first = lines
        .next()
        .ok_or(Error::Parse {
            line: 1,
            reason: "empty input".into(),
        })?
        .map_err(|e| Error::io("<edge list>", e))?;
    let header = GraphHeader::parse(&first)?;
    let mut edges = Vec::with_capacity(header.n.saturating_sub(1) * header.d);
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line.map_err(|e| Error::io("<edge list>", e))?;
        if line.is_empty() {
            continue;
        }
        let mut it = line.split(' ');
        let parse = |tok: Option<&str>| -> Result<usize> {
            tok.and_then(|t| t.parse().ok()).ok_or_else(|| Error::Parse {
                line: lineno,
                reason: format!("expected `s t`, got `{line}`"),
            })
        };
        let s = parse(it.next())?;
        let t = parse(it.next())?;
        if it.next().is_some() {
            return Err(Error::Parse {
                line: lineno,
                reason: "trailing fields".into(),
            });
        }
        edges.push((s, t));
    }
    let g = MultiDigraph::from_edges(header.n, header.d, &edges).map_err(|e| Error::Parse {
        line: 0,
        reason: e.to_string(),
    })?;
    Ok((header, g))
}
