use std::collections::HashMap;
use std::fmt;

use super::PolyError;

/// Index of a variable inside one [`Universe`]. Indices are dense and follow
/// declaration order.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub(crate) u32);

impl Var {
    pub fn new(index: usize) -> Self {
        Var(index as u32)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// An ordered set of uniquely named variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Universe {
    names: Vec<String>,
    lookup: HashMap<String, Var>,
}

impl Universe {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names<I, S>(names: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut universe = Universe::new();
        for name in names {
            universe.add(name)?;
        }
        Ok(universe)
    }

    /// Appends a new variable. Names must be nonempty and unique.
    pub fn add(&mut self, name: impl Into<String>) -> Result<Var, PolyError> {
        let name = name.into();
        if name.is_empty() {
            return Err(PolyError::EmptyName);
        }
        if self.lookup.contains_key(&name) {
            return Err(PolyError::DuplicateVariable(name));
        }
        let var = Var::new(self.names.len());
        self.lookup.insert(name.clone(), var);
        self.names.push(name);
        Ok(var)
    }

    /// Allocates a variable whose name does not clash with any existing one,
    /// starting from `base` and appending primes until it is unique.
    pub fn fresh(&mut self, base: &str) -> Var {
        let mut name = base.to_string();
        while self.lookup.contains_key(&name) {
            name.push('\'');
        }
        self.add(name).expect("fresh name is unique")
    }

    pub fn get(&self, name: &str) -> Option<Var> {
        self.lookup.get(name).copied()
    }

    pub fn lookup(&self, name: &str) -> Result<Var, PolyError> {
        self.get(name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))
    }

    pub fn name(&self, var: Var) -> &str {
        &self.names[var.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn contains(&self, var: Var) -> bool {
        var.index() < self.names.len()
    }

    pub fn vars(&self) -> impl DoubleEndedIterator<Item = Var> + ExactSizeIterator + '_ {
        (0..self.names.len()).map(Var::new)
    }
}
