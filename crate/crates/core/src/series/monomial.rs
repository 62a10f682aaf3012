use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

use super::VariableContext;

pub type Exponents = SmallVec<[u16; 12]>;

/// An exponent multi-index.
///
/// Monomials are ordered by total degree first, then lexicographically on
/// the exponent vector. This is the iteration order of every series, so
/// "first" always means "lowest degree, then smallest multi-index".
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    degree: u32,
    exps: Exponents,
}

impl Monomial {
    pub fn one(arity: usize) -> Self {
        Monomial {
            degree: 0,
            exps: SmallVec::from_elem(0, arity),
        }
    }

    pub fn from_exponents(exps: &[u16]) -> Self {
        Monomial {
            degree: exps.iter().map(|&e| u32::from(e)).sum(),
            exps: SmallVec::from_slice(exps),
        }
    }

    pub fn var(arity: usize, index: usize, power: u16) -> Self {
        let mut m = Monomial::one(arity);
        m.exps[index] = power;
        m.degree = u32::from(power);
        m
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn arity(&self) -> usize {
        self.exps.len()
    }

    pub fn exponents(&self) -> &[u16] {
        &self.exps
    }

    pub fn exponent(&self, index: usize) -> u16 {
        self.exps[index]
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            degree: self.degree + other.degree,
            exps: self
                .exps
                .iter()
                .zip(other.exps.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Lowers the exponent of `index` by one, returning the old exponent.
    pub fn differentiate(&self, index: usize) -> Option<(u16, Monomial)> {
        let e = self.exps[index];
        if e == 0 {
            return None;
        }
        let mut m = self.clone();
        m.exps[index] -= 1;
        m.degree -= 1;
        Some((e, m))
    }

    /// Same exponents placed at new positions of a context with `arity` variables.
    pub fn relocate(&self, arity: usize, positions: &[usize]) -> Monomial {
        let mut m = Monomial::one(arity);
        for (&e, &p) in self.exps.iter().zip(positions) {
            m.exps[p] += e;
        }
        m.degree = self.degree;
        m
    }

    pub fn display<'a>(&'a self, ctx: &'a VariableContext) -> MonomialDisplay<'a> {
        MonomialDisplay { mono: self, ctx }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

/// `z1^2*z1b`, or `1` for the unit monomial.
pub struct MonomialDisplay<'a> {
    mono: &'a Monomial,
    ctx: &'a VariableContext,
}

impl fmt::Display for MonomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mono.degree == 0 {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.mono.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "{}", self.ctx.name(i))?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}
