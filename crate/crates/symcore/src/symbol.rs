use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

/// What a registered name stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    BaseCoordinate,
    FibreCoordinate,
    DerivativeCoordinate,
    Parameter,
}

/// A registered symbol.
///
/// The id is the position in the owning [`SymbolTable`]; it fixes the order used
/// when sorting canonical sums and products.
#[derive(Clone)]
pub struct Symbol {
    id: u32,
    name: Arc<str>,
}

impl Symbol {
    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.name == other.name
    }
}

impl Eq for Symbol {}

impl std::hash::Hash for Symbol {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.id.hash(state);
        self.name.hash(state);
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.id.cmp(&other.id).then_with(|| self.name.cmp(&other.name))
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.name, self.id)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SymbolError {
    #[error("symbol `{0}` registered twice")]
    Duplicate(String),
    #[error("`{0}` is not a valid identifier")]
    InvalidName(String),
}

/// Ordered, duplicate-free list of symbol names with role tags.
#[derive(Clone, Debug, Default)]
pub struct SymbolTable {
    entries: Vec<(Symbol, Role)>,
    by_name: HashMap<Arc<str>, usize>,
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, name: &str, role: Role) -> Result<Symbol, SymbolError> {
        if !is_identifier(name) || crate::expr::Func::from_name(name).is_some() {
            return Err(SymbolError::InvalidName(name.to_string()));
        }
        if self.by_name.contains_key(name) {
            return Err(SymbolError::Duplicate(name.to_string()));
        }
        let name: Arc<str> = Arc::from(name);
        let sym = Symbol {
            id: self.entries.len() as u32,
            name: name.clone(),
        };
        self.by_name.insert(name, self.entries.len());
        self.entries.push((sym.clone(), role));
        Ok(sym)
    }

    pub fn lookup(&self, name: &str) -> Option<&Symbol> {
        self.by_name.get(name).map(|&i| &self.entries[i].0)
    }

    pub fn role(&self, sym: &Symbol) -> Option<Role> {
        self.entries
            .get(sym.id as usize)
            .filter(|(s, _)| s == sym)
            .map(|(_, r)| *r)
    }

    pub fn contains(&self, sym: &Symbol) -> bool {
        self.role(sym).is_some()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, Role)> {
        self.entries.iter().map(|(s, r)| (s, *r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_follow_registration_order() {
        let mut t = SymbolTable::new();
        let a = t.register("t", Role::BaseCoordinate).unwrap();
        let b = t.register("r", Role::FibreCoordinate).unwrap();
        assert!(a < b);
        assert_eq!(t.lookup("r"), Some(&b));
        assert_eq!(t.role(&a), Some(Role::BaseCoordinate));
    }

    #[test]
    fn rejects_duplicates_and_bad_names() {
        let mut t = SymbolTable::new();
        t.register("x1", Role::BaseCoordinate).unwrap();
        assert_eq!(
            t.register("x1", Role::Parameter),
            Err(SymbolError::Duplicate("x1".into()))
        );
        assert!(t.register("1x", Role::Parameter).is_err());
        assert!(t.register("sin", Role::Parameter).is_err());
        assert!(t.register("a-b", Role::Parameter).is_err());
    }
}
