// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::ops::Not;

/// A propositional variable, numbered from zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    pub fn new(index: usize) -> Var {
        Var(u32::try_from(index).expect("variable index overflows u32"))
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn lit(self, positive: bool) -> Lit {
        Lit::new(self, positive)
    }

    #[inline]
    pub fn positive(self) -> Lit {
        Lit::new(self, true)
    }

    #[inline]
    pub fn negative(self) -> Lit {
        Lit::new(self, false)
    }
}

/// A variable or its negation. Encoded as `2 * var + sign` with sign bit set
/// for negative literals.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    #[inline]
    pub fn new(var: Var, positive: bool) -> Lit {
        Lit(var.0 << 1 | u32::from(!positive))
    }

    #[inline]
    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    /// Dense index usable for per-literal tables.
    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    /// Converts a signed, one-based DIMACS literal.
    pub fn from_dimacs(value: i64) -> Option<Lit> {
        if value == 0 {
            return None;
        }
        let index = usize::try_from(value.unsigned_abs() - 1).ok()?;
        Some(Lit::new(Var::new(index), value > 0))
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var().index() as i64 + 1;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    /// Truth value of this literal under a total assignment of its variable.
    #[inline]
    pub fn eval(self, var_value: bool) -> bool {
        var_value == self.is_positive()
    }
}

impl Not for Lit {
    type Output = Lit;

    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimacs_conversion() {
        let l = Lit::from_dimacs(-3).unwrap();
        assert_eq!(l.var().index(), 2);
        assert!(!l.is_positive());
        assert_eq!(l.to_dimacs(), -3);
        assert_eq!((!l).to_dimacs(), 3);
        assert!(Lit::from_dimacs(0).is_none());
    }
}
