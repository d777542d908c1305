//! word2vec text format: a `<count> <dim>` header, then one
//! `<name> v1 ... v_dim` line per node with six decimals.

use std::io::{BufRead, Write};

use super::EmbeddingMatrix;
use crate::error::{Error, Result};

impl EmbeddingMatrix {
    pub fn write_word2vec<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {}", self.len(), self.dim())?;
        let mut line = String::new();
        for (i, name) in self.vocab().iter().enumerate() {
            if name.is_empty() || name.contains(char::is_whitespace) {
                return Err(Error::format(format!("node name {name:?} cannot be written as a word2vec token")));
            }
            line.clear();
            line.push_str(name);
            for v in self.vector(i) {
                use std::fmt::Write as _;
                write!(line, " {v:.6}").unwrap();
            }
            line.push('\n');
            out.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    pub fn read_word2vec<R: BufRead>(reader: R) -> Result<EmbeddingMatrix> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .transpose()?
            .ok_or_else(|| Error::format("embedding file is empty"))?;
        let mut dims = header.split_whitespace().map(str::parse::<usize>);
        let (count, dim) = match (dims.next(), dims.next(), dims.next()) {
            (Some(Ok(c)), Some(Ok(d)), None) => (c, d),
            _ => return Err(Error::format(format!("bad embedding header {header:?}"))),
        };
        let mut vocab = Vec::with_capacity(count);
        let mut vectors = Vec::with_capacity(count * dim);
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(' ');
            let name = parts.next().unwrap_or_default();
            let before = vectors.len();
            for tok in parts {
                let v: f64 = tok
                    .parse()
                    .map_err(|_| Error::format(format!("embedding line {}: bad number {tok:?}", i + 2)))?;
                vectors.push(v);
            }
            if vectors.len() - before != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: vectors.len() - before,
                });
            }
            vocab.push(name.to_string());
        }
        if vocab.len() != count {
            return Err(Error::format(format!(
                "header announces {count} vectors, found {}",
                vocab.len()
            )));
        }
        EmbeddingMatrix::new(vocab, dim, vectors)
    }
}
