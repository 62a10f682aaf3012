use std::fmt;
use std::sync::Arc;

use super::SeriesError;

/// An ordered list of distinct variable names.
///
/// The position of a name is the position of its exponent in every
/// [`Monomial`](super::Monomial) of a series living in this context.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct VariableContext {
    names: Vec<String>,
}

impl VariableContext {
    pub fn new<I, S>(names: I) -> Result<Arc<Self>, SeriesError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(SeriesError::DuplicateVariable(a.clone()));
            }
        }
        Ok(Arc::new(VariableContext { names }))
    }

    pub fn arity(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn require(&self, name: &str) -> Result<usize, SeriesError> {
        self.index_of(name)
            .ok_or_else(|| SeriesError::UnknownVariable(name.to_string()))
    }

    /// `(z1..zn, z1b..znb, wb)`: home of a complex defining function Θ.
    pub fn theta(n: usize) -> Arc<Self> {
        let mut names: Vec<String> = (1..=n).map(|k| format!("z{k}")).collect();
        names.extend((1..=n).map(|k| format!("z{k}b")));
        names.push("wb".into());
        Arc::new(VariableContext { names })
    }

    /// `(z1..zn, z1b..znb, w)`: home of the conjugate function Θ̄.
    pub fn theta_conjugate(n: usize) -> Arc<Self> {
        let mut names: Vec<String> = (1..=n).map(|k| format!("z{k}")).collect();
        names.extend((1..=n).map(|k| format!("z{k}b")));
        names.push("w".into());
        Arc::new(VariableContext { names })
    }

    /// `(z1..zn, w)`: holomorphic coordinates, used for point maps.
    pub fn holomorphic(n: usize) -> Arc<Self> {
        let mut names: Vec<String> = (1..=n).map(|k| format!("z{k}")).collect();
        names.push("w".into());
        Arc::new(VariableContext { names })
    }

    /// `(x1..xn, y1..yn, v)`: real coordinates of a graphed hypersurface `u = φ(x, y, v)`.
    pub fn graph(n: usize) -> Arc<Self> {
        let mut names: Vec<String> = (1..=n).map(|k| format!("x{k}")).collect();
        names.extend((1..=n).map(|k| format!("y{k}")));
        names.push("v".into());
        Arc::new(VariableContext { names })
    }

    /// `(x1..xn, y, yx1..yxn)`: first-order jet space of a PDE system.
    pub fn jet(n: usize) -> Arc<Self> {
        let mut names: Vec<String> = (1..=n).map(|k| format!("x{k}")).collect();
        names.push("y".into());
        names.extend((1..=n).map(|k| format!("yx{k}")));
        Arc::new(VariableContext { names })
    }

    /// `(x1..xn, a1..an, b)`: home of a fundamental solution `Q(x, a, b)`.
    pub fn solution(n: usize) -> Arc<Self> {
        let mut names: Vec<String> = (1..=n).map(|k| format!("x{k}")).collect();
        names.extend((1..=n).map(|k| format!("a{k}")));
        names.push("b".into());
        Arc::new(VariableContext { names })
    }
}

impl fmt::Display for VariableContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.names.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates() {
        assert!(VariableContext::new(["x", "y", "x"]).is_err());
    }

    #[test]
    fn canonical_layouts() {
        assert_eq!(
            VariableContext::theta(2).names(),
            ["z1", "z2", "z1b", "z2b", "wb"]
        );
        assert_eq!(
            VariableContext::jet(2).names(),
            ["x1", "x2", "y", "yx1", "yx2"]
        );
        assert_eq!(VariableContext::solution(3).index_of("b"), Some(6));
    }
}
