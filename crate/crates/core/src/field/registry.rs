//! Variable registry: names and fixed ordering for base variables, dual
//! variables and transcendental parameters.
//!
//! Every polynomial, rational function and operator carries a shared
//! `Registry`; indices into it are stable identifiers. The global ordering is
//! x-block, then z-block, then parameters.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Which variable block a differential operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Block {
    X,
    Z,
}

impl Block {
    pub fn opposite(self) -> Block {
        match self {
            Block::X => Block::Z,
            Block::Z => Block::X,
        }
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Block::X => write!(f, "x"),
            Block::Z => write!(f, "z"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    /// Base-space variable, with its position inside the x-block.
    X(usize),
    /// Dual-space variable, with its position inside the z-block.
    Z(usize),
    /// Transcendental parameter (a constant of the coefficient field).
    Param(usize),
}

#[derive(Debug)]
pub struct VariableRegistry {
    x_vars: Vec<String>,
    z_vars: Vec<String>,
    params: Vec<String>,
    index: BTreeMap<String, usize>,
}

/// Shared handle; registries are immutable after creation.
pub type Registry = Arc<VariableRegistry>;

pub fn is_valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl VariableRegistry {
    pub fn new<S: AsRef<str>>(x_vars: &[S], z_vars: &[S], params: &[S]) -> Result<Registry> {
        let mut index = BTreeMap::new();
        let mut all = Vec::new();
        for group in [x_vars, z_vars, params] {
            for name in group {
                let name = name.as_ref().to_string();
                if !is_valid_identifier(&name) || name == "D" {
                    return Err(Error::InvalidName { name });
                }
                if index.insert(name.clone(), all.len()).is_some() {
                    return Err(Error::DuplicateName { name });
                }
                all.push(name);
            }
        }
        Ok(Arc::new(VariableRegistry {
            x_vars: x_vars.iter().map(|s| s.as_ref().to_string()).collect(),
            z_vars: z_vars.iter().map(|s| s.as_ref().to_string()).collect(),
            params: params.iter().map(|s| s.as_ref().to_string()).collect(),
            index,
        }))
    }

    pub fn n_vars(&self) -> usize {
        self.x_vars.len() + self.z_vars.len() + self.params.len()
    }

    pub fn x_count(&self) -> usize {
        self.x_vars.len()
    }

    pub fn z_count(&self) -> usize {
        self.z_vars.len()
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    pub fn name(&self, idx: usize) -> &str {
        let nx = self.x_vars.len();
        let nz = self.z_vars.len();
        if idx < nx {
            &self.x_vars[idx]
        } else if idx < nx + nz {
            &self.z_vars[idx - nx]
        } else {
            &self.params[idx - nx - nz]
        }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn kind(&self, idx: usize) -> VarKind {
        let nx = self.x_vars.len();
        let nz = self.z_vars.len();
        if idx < nx {
            VarKind::X(idx)
        } else if idx < nx + nz {
            VarKind::Z(idx - nx)
        } else {
            VarKind::Param(idx - nx - nz)
        }
    }

    pub fn is_param(&self, idx: usize) -> bool {
        matches!(self.kind(idx), VarKind::Param(_))
    }

    pub fn block_size(&self, block: Block) -> usize {
        match block {
            Block::X => self.x_vars.len(),
            Block::Z => self.z_vars.len(),
        }
    }

    /// Global index of the `pos`-th variable of a block.
    pub fn block_var(&self, block: Block, pos: usize) -> usize {
        match block {
            Block::X => pos,
            Block::Z => self.x_vars.len() + pos,
        }
    }

    /// Block and in-block position of a global index; `None` for parameters.
    pub fn block_position(&self, idx: usize) -> Option<(Block, usize)> {
        match self.kind(idx) {
            VarKind::X(p) => Some((Block::X, p)),
            VarKind::Z(p) => Some((Block::Z, p)),
            VarKind::Param(_) => None,
        }
    }

    /// Global indices of a block's variables.
    pub fn block_vars(&self, block: Block) -> Vec<usize> {
        (0..self.block_size(block))
            .map(|p| self.block_var(block, p))
            .collect()
    }

    /// The x↔z partner of a block variable, when the blocks have equal length.
    pub fn exchange_partner(&self, idx: usize) -> Option<usize> {
        if self.x_vars.len() != self.z_vars.len() {
            return None;
        }
        match self.kind(idx) {
            VarKind::X(p) => Some(self.block_var(Block::Z, p)),
            VarKind::Z(p) => Some(self.block_var(Block::X, p)),
            VarKind::Param(_) => None,
        }
    }

    pub fn x_names(&self) -> &[String] {
        &self.x_vars
    }

    pub fn z_names(&self) -> &[String] {
        &self.z_vars
    }

    pub fn param_names(&self) -> &[String] {
        &self.params
    }
}

impl PartialEq for VariableRegistry {
    fn eq(&self, other: &Self) -> bool {
        self.x_vars == other.x_vars && self.z_vars == other.z_vars && self.params == other.params
    }
}

impl Eq for VariableRegistry {}

/// Panics when two values come from different registries.
pub fn assert_same_registry(a: &Registry, b: &Registry) {
    if !Arc::ptr_eq(a, b) && a != b {
        panic!("registry mismatch: values come from different variable registries");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_and_lookup() {
        let reg = VariableRegistry::new(&["x1", "x2"], &["z1", "z2"], &["s"]).unwrap();
        assert_eq!(reg.n_vars(), 5);
        assert_eq!(reg.index_of("z2"), Some(3));
        assert_eq!(reg.kind(3), VarKind::Z(1));
        assert_eq!(reg.kind(4), VarKind::Param(0));
        assert!(reg.is_param(4));
        assert_eq!(reg.block_var(Block::Z, 0), 2);
        assert_eq!(reg.exchange_partner(0), Some(2));
        assert_eq!(reg.exchange_partner(4), None);
    }

    #[test]
    fn rejects_duplicates_and_bad_names() {
        assert!(VariableRegistry::new(&["x1", "x1"], &[], &[]).is_err());
        assert!(VariableRegistry::new(&["2x"], &[], &[]).is_err());
        assert!(VariableRegistry::new(&["D"], &[], &[]).is_err());
    }
}
