//! Name-keyed registries of runtime-selectable strategies.

use crate::error::{Error, Result};
use crate::quad::QuadAlgebra;
use crate::quad::QuadElem;

/// Anything that can be looked up by a stable name.
pub trait Named {
    fn name(&self) -> &'static str;
}

/// Ordered collection of boxed strategies keyed by [`Named::name`].
pub struct Registry<T: ?Sized + Named> {
    entries: Vec<Box<T>>,
}

impl<T: ?Sized + Named> Default for Registry<T> {
    fn default() -> Self {
        Registry { entries: Vec::new() }
    }
}

impl<T: ?Sized + Named> Registry<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a strategy; a later entry with the same name replaces the earlier one.
    pub fn register(&mut self, item: Box<T>) -> &mut Self {
        self.entries.retain(|e| e.name() != item.name());
        self.entries.push(item);
        self
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::Config(format!("unknown strategy '{name}', expected one of {:?}", self.names())))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.entries.iter().map(|b| b.as_ref())
    }
}

/// Choice of the line `B¹/H¹` inside `J¹/H¹` when `i′ = i + 1`, given by a
/// unit `y₀ ∈ O_L^×`: the admissible directions of `L^⊥` are `F_q·y₀·j`.
pub trait Polarization: Named + Send + Sync {
    fn direction(&self, l: &QuadAlgebra) -> QuadElem;
}

/// The line spanned by `j`.
pub struct AlongJ;

impl Named for AlongJ {
    fn name(&self) -> &'static str {
        "default"
    }
}

impl Polarization for AlongJ {
    fn direction(&self, l: &QuadAlgebra) -> QuadElem {
        l.one()
    }
}

/// The line spanned by `√D_L·j`; in the 2×2 model this is the Iwahori-type
/// subgroup generated by upper and lower unipotents of equal depth.
pub struct Iwahori;

impl Named for Iwahori {
    fn name(&self) -> &'static str {
        "appendix"
    }
}

impl Polarization for Iwahori {
    fn direction(&self, l: &QuadAlgebra) -> QuadElem {
        l.sqrt_d()
    }
}

pub fn polarizations() -> Registry<dyn Polarization> {
    let mut r: Registry<dyn Polarization> = Registry::new();
    r.register(Box::new(AlongJ)).register(Box::new(Iwahori));
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_by_name() {
        let r = polarizations();
        assert_eq!(r.names(), vec!["default", "appendix"]);
        assert!(r.get("appendix").is_ok());
        assert!(matches!(r.get("diagonal"), Err(Error::Config(_))));
    }
}
