use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamBlock {
    pub name: String,
    pub offset: usize,
    pub len: usize,
    /// Row-major matrix shape when the block is a weight matrix.
    pub shape: Option<(usize, usize)>,
}

impl ParamBlock {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.len
    }
}

/// Named, contiguous, disjoint blocks covering `[0, dim)` of a flat
/// parameter vector.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParamLayout {
    blocks: Vec<ParamBlock>,
}

impl ParamLayout {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vector(mut self, name: impl Into<String>, len: usize) -> Self {
        self.push(name.into(), len, None);
        self
    }

    pub fn with_matrix(mut self, name: impl Into<String>, rows: usize, cols: usize) -> Self {
        self.push(name.into(), rows * cols, Some((rows, cols)));
        self
    }

    fn push(&mut self, name: String, len: usize, shape: Option<(usize, usize)>) {
        assert!(
            self.blocks.iter().all(|b| b.name != name),
            "duplicate block name {name}"
        );
        let offset = self.dim();
        self.blocks.push(ParamBlock {
            name,
            offset,
            len,
            shape,
        });
    }

    pub fn dim(&self) -> usize {
        self.blocks.last().map_or(0, |b| b.offset + b.len)
    }

    pub fn blocks(&self) -> &[ParamBlock] {
        &self.blocks
    }

    pub fn block(&self, name: &str) -> Result<&ParamBlock> {
        self.blocks
            .iter()
            .find(|b| b.name == name)
            .ok_or_else(|| Error::contract(format!("no parameter block named {name:?}")))
    }

    pub fn slice<'a>(&self, theta: &'a [f64], name: &str) -> Result<&'a [f64]> {
        Ok(&theta[self.block(name)?.range()])
    }

    /// Concatenation of several layouts; block names get a `prefix.` qualifier.
    pub fn concat(parts: &[(&str, &ParamLayout)]) -> ParamLayout {
        let mut out = ParamLayout::new();
        for (prefix, layout) in parts {
            for b in &layout.blocks {
                out.push(format!("{prefix}.{}", b.name), b.len, b.shape);
            }
        }
        out
    }
}
