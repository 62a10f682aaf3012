//! Second-order systems `y_{x^{k1} x^{k2}} = F_{k1,k2}(x, y, y_x)` and their
//! general solutions `y = Q(x, a, b)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::hypersurface::{HypersurfaceError, HypersurfaceModel};
use crate::scalar::Coefficient;
use crate::series::{
    linalg, solve_implicit, Monomial, SeriesError, SeriesMatrix, TruncatedSeries, VariableContext,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PdeError {
    #[error("CR dimension {0} is not supported, n must be at least 2")]
    UnsupportedDimension(usize),
    #[error("index {index} out of range 0..{n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("series lives in {found}, expected {expected}")]
    WrongContext { expected: String, found: String },
    #[error("conflicting entries for the unordered pair ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("Jacobian of (Q, Q_x) in the parameters is singular at the origin")]
    RankDeficient,
    #[error("fundamental solution and its first x-derivatives must vanish at the origin")]
    NotCentered,
    #[error(transparent)]
    Hypersurface(#[from] HypersurfaceError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// A symmetric family `F_{k1,k2}` in the jet context `(x1..xn, y, yx1..yxn)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PdeSystem<C> {
    n: usize,
    ctx: Arc<VariableContext>,
    // index pair_index(k1, k2) with k1 <= k2
    entries: Vec<TruncatedSeries<C>>,
}

fn pair_index(n: usize, k1: usize, k2: usize) -> usize {
    let (a, b) = if k1 <= k2 { (k1, k2) } else { (k2, k1) };
    a * n - a * (a + 1) / 2 + b
}

impl<C: Coefficient> PdeSystem<C> {
    /// The system `y_{xx} = 0`.
    pub fn zero(n: usize, order: u32) -> Self {
        let ctx = VariableContext::jet(n);
        let entries = (0..n * (n + 1) / 2)
            .map(|_| TruncatedSeries::zero(&ctx, order))
            .collect();
        PdeSystem { n, ctx, entries }
    }

    /// Builds a system from `(k1, k2, F)` triples; unlisted pairs are zero at
    /// the smallest listed order, and a pair listed twice must agree.
    pub fn from_entries(
        n: usize,
        order: u32,
        entries: impl IntoIterator<Item = (usize, usize, TruncatedSeries<C>)>,
    ) -> Result<Self, PdeError> {
        if n == 0 {
            return Err(PdeError::UnsupportedDimension(n));
        }
        let ctx = VariableContext::jet(n);
        let mut given: BTreeMap<usize, TruncatedSeries<C>> = BTreeMap::new();
        for (k1, k2, f) in entries {
            for k in [k1, k2] {
                if k >= n {
                    return Err(PdeError::IndexOutOfRange { index: k, n });
                }
            }
            if **f.context() != *ctx {
                return Err(PdeError::WrongContext {
                    expected: ctx.to_string(),
                    found: f.context().to_string(),
                });
            }
            let idx = pair_index(n, k1, k2);
            if let Some(prev) = given.get(&idx) {
                if *prev != f {
                    return Err(PdeError::Asymmetric(k1.min(k2), k1.max(k2)));
                }
            }
            given.insert(idx, f);
        }
        let order = given
            .values()
            .map(TruncatedSeries::order)
            .fold(order, u32::min);
        let entries = (0..n * (n + 1) / 2)
            .map(|i| {
                given
                    .remove(&i)
                    .unwrap_or_else(|| TruncatedSeries::zero(&ctx, order))
            })
            .collect();
        Ok(PdeSystem { n, ctx, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn context(&self) -> &Arc<VariableContext> {
        &self.ctx
    }

    pub fn order(&self) -> u32 {
        self.entries
            .iter()
            .map(TruncatedSeries::order)
            .min()
            .unwrap_or(0)
    }

    /// `F_{k1,k2}`, 0-based and symmetric.
    pub fn get(&self, k1: usize, k2: usize) -> &TruncatedSeries<C> {
        assert!(k1 < self.n && k2 < self.n, "index out of range");
        &self.entries[pair_index(self.n, k1, k2)]
    }

    /// Position of `yx_l` in the jet context.
    pub fn slope(&self, l: usize) -> usize {
        self.n + 1 + l
    }

    /// `D_k G = G_{x^k} + y_{x^k} G_y + Σ_l F_{k,l} G_{y_{x^l}}`.
    pub fn total_derivative(
        &self,
        k: usize,
        g: &TruncatedSeries<C>,
    ) -> Result<TruncatedSeries<C>, PdeError> {
        if k >= self.n {
            return Err(PdeError::IndexOutOfRange {
                index: k,
                n: self.n,
            });
        }
        if **g.context() != *self.ctx {
            return Err(PdeError::WrongContext {
                expected: self.ctx.to_string(),
                found: g.context().to_string(),
            });
        }
        let slope = TruncatedSeries::var(&self.ctx, self.slope(k), g.order());
        let mut out = &g.partial(k) + &(&slope * &g.partial(self.n));
        for l in 0..self.n {
            out = &out + &(self.get(k, l) * &g.partial(self.slope(l)));
        }
        Ok(out)
    }

    /// Checks `D_{k3} F_{k1,k2} = D_{k2} F_{k1,k3}` for all `k1` and `k2 < k3`.
    pub fn check_complete_integrability(&self) -> IntegrabilityReport<C> {
        let mut failures = Vec::new();
        let mut order = u32::MAX;
        for k1 in 0..self.n {
            for k2 in 0..self.n {
                for k3 in k2 + 1..self.n {
                    let lhs = self
                        .total_derivative(k3, self.get(k1, k2))
                        .expect("own context");
                    let rhs = self
                        .total_derivative(k2, self.get(k1, k3))
                        .expect("own context");
                    let residual = &lhs - &rhs;
                    order = order.min(residual.order());
                    if let Some((m, c)) = residual.leading_term() {
                        failures.push(IntegrabilityFailure {
                            indices: (k1, k2, k3),
                            monomial: m.clone(),
                            rendered: m.display(&self.ctx).to_string(),
                            coefficient: c.clone(),
                        });
                    }
                }
            }
        }
        IntegrabilityReport {
            order: if order == u32::MAX {
                self.order().saturating_sub(1)
            } else {
                order
            },
            failures,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegrabilityFailure<C> {
    /// `(k1, k2, k3)`, 0-based, with `k2 < k3`.
    pub indices: (usize, usize, usize),
    pub monomial: Monomial,
    pub rendered: String,
    pub coefficient: C,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegrabilityReport<C> {
    pub order: u32,
    pub failures: Vec<IntegrabilityFailure<C>>,
}

impl<C> IntegrabilityReport<C> {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// The determinant `□` of `(Q_{a_μ}; Q_{x^k a_μ})` together with its Cramer
/// minors, for a series `Q` whose first `n` variables are `x` and next `n+1`
/// are the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct CramerMinors<C> {
    n: usize,
    matrix: SeriesMatrix<C>,
    delta: TruncatedSeries<C>,
    // cofactors[r][c]
    cofactors: Vec<Vec<TruncatedSeries<C>>>,
    // keyed by (μ, ν, τ) with μ <= ν
    second: BTreeMap<(usize, usize, usize), TruncatedSeries<C>>,
}

impl<C: Coefficient> CramerMinors<C> {
    pub fn new(q: &TruncatedSeries<C>, n: usize) -> Result<Self, SeriesError> {
        let params: Vec<usize> = (n..=2 * n).collect();
        let first: Vec<_> = params.iter().map(|&p| q.partial(p)).collect();
        let mut rows = vec![first.clone()];
        for k in 0..n {
            rows.push(first.iter().map(|d| d.partial(k)).collect());
        }
        let matrix = SeriesMatrix::from_rows(rows)?;
        let size = n + 1;
        let cofactors: Vec<Vec<_>> = (0..size)
            .map(|r| (0..size).map(|c| cofactor(&matrix, r, c)).collect())
            .collect::<Result<_, _>>()?;
        // Laplace along row 0
        let mut delta = TruncatedSeries::zero(matrix.context(), matrix.order());
        for c in 0..size {
            delta = &delta + &(matrix.get(0, c) * &cofactors[0][c]);
        }

        let mut second = BTreeMap::new();
        for mu in 0..size {
            for nu in mu..size {
                let column: Vec<_> = (0..size)
                    .map(|r| matrix.get(r, nu).partial(params[mu]))
                    .collect();
                for tau in 0..size {
                    let mut acc = TruncatedSeries::zero(matrix.context(), matrix.order());
                    for (r, entry) in column.iter().enumerate() {
                        acc = &acc + &(entry * &cofactors[r][tau]);
                    }
                    second.insert((mu, nu, tau), acc);
                }
            }
        }
        Ok(CramerMinors {
            n,
            matrix,
            delta,
            cofactors,
            second,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &SeriesMatrix<C> {
        &self.matrix
    }

    pub fn delta(&self) -> &TruncatedSeries<C> {
        &self.delta
    }

    /// The determinant with column `mu` replaced by the unit vector at row
    /// `1 + l` (0-based `mu`, `l`).
    pub fn unit_minor(&self, mu: usize, l: usize) -> &TruncatedSeries<C> {
        &self.cofactors[1 + l][mu]
    }

    /// The determinant with column `tau` replaced by the `(mu, nu)` parameter
    /// derivative of column entries; symmetric in `(mu, nu)`.
    pub fn second_minor(&self, mu: usize, nu: usize, tau: usize) -> &TruncatedSeries<C> {
        let key = if mu <= nu {
            (mu, nu, tau)
        } else {
            (nu, mu, tau)
        };
        &self.second[&key]
    }
}

fn cofactor<C: Coefficient>(
    m: &SeriesMatrix<C>,
    row: usize,
    col: usize,
) -> Result<TruncatedSeries<C>, SeriesError> {
    let size = m.rows();
    if size == 1 {
        return Ok(TruncatedSeries::one(m.context(), m.order()));
    }
    let rows: Vec<Vec<_>> = (0..size)
        .filter(|&r| r != row)
        .map(|r| {
            (0..size)
                .filter(|&c| c != col)
                .map(|c| m.get(r, c).clone())
                .collect()
        })
        .collect();
    let det = SeriesMatrix::from_rows(rows)?.determinant()?;
    Ok(if (row + col).is_multiple_of(2) {
        det
    } else {
        -det
    })
}

/// A general solution `y = Q(x, a, b)` in the context `(x1..xn, a1..an, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalSolution<C> {
    n: usize,
    q: TruncatedSeries<C>,
    normalized: bool,
}

impl<C: Coefficient> FundamentalSolution<C> {
    /// Accepts `Q` when `(a, b) ↦ (Q, Q_x)(0, a, b)` has invertible Jacobian at 0.
    pub fn new(n: usize, q: TruncatedSeries<C>) -> Result<Self, PdeError> {
        if n < 2 {
            return Err(PdeError::UnsupportedDimension(n));
        }
        let ctx = VariableContext::solution(n);
        if **q.context() != *ctx {
            return Err(PdeError::WrongContext {
                expected: ctx.to_string(),
                found: q.context().to_string(),
            });
        }
        if !q.constant_term().is_zero() || (0..n).any(|k| !q.linear_coeff(k).is_zero()) {
            return Err(PdeError::NotCentered);
        }
        let jacobian: Vec<Vec<C>> = (0..=n)
            .map(|row| {
                (n..=2 * n)
                    .map(|p| {
                        if row == 0 {
                            q.linear_coeff(p)
                        } else {
                            let mut e = vec![0u16; 2 * n + 1];
                            e[row - 1] += 1;
                            e[p] += 1;
                            q.coeff_of(&e)
                        }
                    })
                    .collect()
            })
            .collect();
        if linalg::determinant(&jacobian).is_zero() {
            return Err(PdeError::RankDeficient);
        }
        let normalized = is_normalized(n, &q);
        Ok(FundamentalSolution { n, q, normalized })
    }

    /// `Q := Θ` with `(a, b) := (z̄, w̄)`.
    pub fn from_model(model: &HypersurfaceModel<C>) -> Result<Self, PdeError> {
        let n = model.n();
        let q = model.theta().relabel(&VariableContext::solution(n))?;
        Self::new(n, q).map_err(|e| match e {
            PdeError::RankDeficient => HypersurfaceError::LeviDegenerate.into(),
            other => other,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> &TruncatedSeries<C> {
        &self.q
    }

    /// Whether `Q = −b + Σ x^k a^k + O(|x|²)`.
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Eliminates `(a, b)` from `y = Q`, `y_{x^k} = Q_{x^k}` and returns
    /// `F_{k1,k2} = Q_{x^{k1} x^{k2}}(x, a(x, y, y_x), b(x, y, y_x))`.
    pub fn recover_system(&self) -> Result<PdeSystem<C>, PdeError> {
        let n = self.n;
        let jet = VariableContext::jet(n);
        let order = self.q.order().saturating_sub(1);
        let mut equations = vec![self.q.clone()];
        equations.extend((0..n).map(|k| self.q.partial(k)));
        let unknowns: Vec<usize> = (n..=2 * n).collect();
        let params: Vec<_> = (0..n)
            .map(|k| (k, TruncatedSeries::var(&jet, k, order)))
            .collect();
        let rhs: Vec<_> = (n..=2 * n)
            .map(|i| TruncatedSeries::var(&jet, i, order))
            .collect();
        let solved = solve_implicit(&equations, &unknowns, &params, &rhs).map_err(|e| match e {
            SeriesError::SingularJacobian => PdeError::RankDeficient,
            other => other.into(),
        })?;
        let mut images: Vec<_> = (0..n)
            .map(|k| TruncatedSeries::var(&jet, k, order))
            .collect();
        images.extend(solved);
        let mut entries = Vec::new();
        for k1 in 0..n {
            for k2 in k1..n {
                let f = self.q.derivative(&[k1, k2]).compose(&images)?;
                entries.push((k1, k2, f));
            }
        }
        PdeSystem::from_entries(n, order, entries)
    }
}

fn is_normalized<C: Coefficient>(n: usize, q: &TruncatedSeries<C>) -> bool {
    let mut low = BTreeMap::new();
    for (m, c) in q.terms() {
        let xdeg: u32 = m.exponents()[..n].iter().map(|&e| u32::from(e)).sum();
        if xdeg <= 1 {
            low.insert(m.clone(), c.clone());
        }
    }
    let arity = 2 * n + 1;
    let mut expected = BTreeMap::new();
    if q.order() >= 1 {
        expected.insert(Monomial::var(arity, 2 * n, 1), -C::one());
    }
    if q.order() >= 2 {
        for k in 0..n {
            let mut e = vec![0u16; arity];
            e[k] = 1;
            e[n + k] = 1;
            expected.insert(Monomial::from_exponents(&e), C::one());
        }
    }
    low == expected
}

/// Associated system of a hypersurface: its Segre varieties are the graphs of
/// the general solution `y = Θ(x, a, b)`.
pub fn derive_associated_system<C: Coefficient>(
    model: &HypersurfaceModel<C>,
) -> Result<PdeSystem<C>, PdeError> {
    FundamentalSolution::from_model(model)?
        .recover_system()
        .map_err(|e| match e {
            PdeError::RankDeficient => HypersurfaceError::LeviDegenerate.into(),
            other => other,
        })
}

/// `∂²G/∂y_{x^{l1}}∂y_{x^{l2}}` expressed in `(x, a, b)`, where
/// `G(x, y, y_x) = T(x, a(x, y, y_x), b(x, y, y_x))`:
///
/// `□⁻³ Σ_{μ,ν} □^μ_{l1} □^ν_{l2} (□ T_{a_μ a_ν} − Σ_τ □^τ_{μν} T_{a_τ})`.
pub fn jet_transfer_second<C: Coefficient>(
    q: &FundamentalSolution<C>,
    t: &TruncatedSeries<C>,
    l1: usize,
    l2: usize,
) -> Result<TruncatedSeries<C>, PdeError> {
    let n = q.n;
    for l in [l1, l2] {
        if l >= n {
            return Err(PdeError::IndexOutOfRange { index: l, n });
        }
    }
    if **t.context() != **q.q.context() {
        return Err(PdeError::WrongContext {
            expected: q.q.context().to_string(),
            found: t.context().to_string(),
        });
    }
    let minors = CramerMinors::new(&q.q, n)?;
    let inv = minors
        .delta()
        .invert_unit()
        .map_err(|_| PdeError::RankDeficient)?;
    let first: Vec<_> = (n..=2 * n).map(|p| t.partial(p)).collect();
    let ctx = t.context();
    let mut acc = TruncatedSeries::zero(ctx, t.order());
    for mu in 0..=n {
        for nu in 0..=n {
            let mut inner = minors.delta() * &first[nu].partial(n + mu);
            for (tau, t_tau) in first.iter().enumerate() {
                inner = &inner - &(minors.second_minor(mu, nu, tau) * t_tau);
            }
            let weight = minors.unit_minor(mu, l1) * minors.unit_minor(nu, l2);
            acc = &acc + &(&weight * &inner);
        }
    }
    Ok(&acc * &inv.pow(3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypersurface::make_model;
    use crate::parser::parse_series;
    use crate::scalar::GaussianRational as G;

    type S = TruncatedSeries<G>;

    fn jet(n: usize, text: &str, order: u32) -> S {
        parse_series(text, &VariableContext::jet(n), order).unwrap()
    }

    fn sol(n: usize, text: &str, order: u32) -> S {
        parse_series(text, &VariableContext::solution(n), order).unwrap()
    }

    fn model(n: usize, text: &str, order: u32) -> HypersurfaceModel<G> {
        make_model(
            n,
            parse_series(text, &VariableContext::theta(n), order).unwrap(),
            order,
        )
        .unwrap()
    }

    #[test]
    fn symmetric_storage() {
        let s = PdeSystem::from_entries(3, 4, [(2, 0, jet(3, "x1", 4))]).unwrap();
        assert_eq!(s.get(0, 2), s.get(2, 0));
        assert!(s.get(1, 1).is_zero());
        let bad = PdeSystem::from_entries(2, 4, [(0, 1, jet(2, "x1", 4)), (1, 0, jet(2, "x2", 4))]);
        assert_eq!(bad, Err(PdeError::Asymmetric(0, 1)));
    }

    #[test]
    fn total_derivatives() {
        let s = PdeSystem::from_entries(2, 5, [(0, 1, jet(2, "y*yx1", 5))]).unwrap();
        assert_eq!(
            s.total_derivative(0, &jet(2, "y", 5)).unwrap(),
            jet(2, "yx1", 4)
        );
        assert_eq!(
            s.total_derivative(0, &jet(2, "yx2", 5)).unwrap(),
            jet(2, "y*yx1", 4)
        );
        assert!(s.total_derivative(0, &jet(2, "x2", 5)).unwrap().is_zero());
        assert!(s.total_derivative(2, &jet(2, "y", 5)).is_err());
    }

    #[test]
    fn integrability() {
        assert!(PdeSystem::<G>::zero(2, 5)
            .check_complete_integrability()
            .passed());
        let s = PdeSystem::from_entries(2, 5, [(0, 0, jet(2, "x2", 5))]).unwrap();
        let report = s.check_complete_integrability();
        assert_eq!(report.failures.len(), 1);
        let f = &report.failures[0];
        assert_eq!(f.indices, (0, 0, 1));
        assert_eq!(f.rendered, "1");
        assert_eq!(f.coefficient, G::from(1));
    }

    #[test]
    fn heisenberg_system_is_flat() {
        let m = model(2, "-wb + z1*z1b + z2*z2b", 7);
        let s = derive_associated_system(&m).unwrap();
        for k1 in 0..2 {
            for k2 in 0..2 {
                assert!(s.get(k1, k2).is_zero());
            }
        }
        assert_eq!(s.order(), 5);
    }

    #[test]
    fn sheared_system_is_constant() {
        let m = model(2, "-wb + z1*z1b + z2*z2b + z1^2 + z1b^2", 7);
        let s = derive_associated_system(&m).unwrap();
        assert_eq!(*s.get(0, 0), S::constant(s.context(), G::from(2), 5));
        assert!(s.get(0, 1).is_zero() && s.get(1, 1).is_zero());
    }

    #[test]
    fn quartic_system_back_substitutes() {
        let m = model(2, "-wb + z1*z1b + z2*z2b + z1^2*z1b^2", 8);
        let s = derive_associated_system(&m).unwrap();
        assert!(s.get(0, 0).depends_on(s.slope(0)));
        assert!(s.check_complete_integrability().passed());
        // Φ(z, Θ, Θ_z) = Θ_zz on the theta context
        let theta = m.theta();
        let ctx = theta.context();
        let mut images: Vec<S> = (0..2).map(|k| S::var(ctx, k, 8)).collect();
        images.push(theta.clone());
        images.extend((0..2).map(|k| theta.partial(k)));
        for (k1, k2) in [(0, 0), (0, 1), (1, 1)] {
            let lhs = s.get(k1, k2).compose(&images).unwrap();
            let rhs = theta.derivative(&[k1, k2]);
            let o = lhs.order().min(rhs.order());
            assert!(lhs.equal_to_order(&rhs, o), "({k1},{k2})");
        }
    }

    #[test]
    fn fundamental_solutions() {
        let flat = FundamentalSolution::new(2, sol(2, "-b + x1*a1 + x2*a2", 6)).unwrap();
        assert!(flat.is_normalized());
        let s = flat.recover_system().unwrap();
        assert!((0..2).all(|k| (0..2).all(|l| s.get(k, l).is_zero())));

        let q = FundamentalSolution::new(2, sol(2, "-b + x1*a1 + x2*a2 + x1^2*a1^2", 7)).unwrap();
        assert!(q.is_normalized());
        let s = q.recover_system().unwrap();
        assert!(!s.get(0, 0).is_zero());
        assert!(s.check_complete_integrability().passed());

        assert_eq!(
            FundamentalSolution::new(2, sol(2, "-b + x1*a1", 6)),
            Err(PdeError::RankDeficient)
        );
        let shifted =
            FundamentalSolution::new(2, sol(2, "-b + 2*x1*a1 + x2*a2 + x1*x2*b", 6)).unwrap();
        assert!(!shifted.is_normalized());
    }

    #[test]
    fn model_and_solution_agree() {
        let m = model(2, "-wb + z1*z1b - z2*z2b + z1^2*z2b^2 + z2^2*z1b^2", 7);
        let a = derive_associated_system(&m).unwrap();
        let q = sol(2, "-b + x1*a1 - x2*a2 + x1^2*a2^2 + x2^2*a1^2", 7);
        let b = FundamentalSolution::new(2, q)
            .unwrap()
            .recover_system()
            .unwrap();
        for (k1, k2) in [(0, 0), (0, 1), (1, 1)] {
            assert_eq!(a.get(k1, k2), b.get(k1, k2));
        }
    }

    #[test]
    fn cramer_minors_of_heisenberg() {
        let q = sol(2, "-b + x1*a1 + x2*a2", 6);
        let minors = CramerMinors::new(&q, 2).unwrap();
        assert_eq!(minors.delta().constant_term(), G::from(-1));
        // column 0 replaced by e_1: [[0, a2.., -1], [1, 0, 0], [0, 1, 0]]
        let m = minors.matrix();
        let e1: Vec<S> = (0..3)
            .map(|r| {
                if r == 1 {
                    S::one(m.context(), m.order())
                } else {
                    S::zero(m.context(), m.order())
                }
            })
            .collect();
        let direct = m.with_column(0, &e1).unwrap().determinant().unwrap();
        assert_eq!(*minors.unit_minor(0, 0), direct);
        for mu in 0..3 {
            for nu in 0..3 {
                for tau in 0..3 {
                    assert!(minors.second_minor(mu, nu, tau).is_zero());
                }
            }
        }
    }

    #[test]
    fn second_minors_match_direct_determinants() {
        let q = sol(
            2,
            "-b + x1*a1 + x2*a2 + x1^2*a1*b + x1*x2*a2^2 + x2*a1^2*a2",
            6,
        );
        let minors = CramerMinors::new(&q, 2).unwrap();
        let m = minors.matrix();
        for (mu, nu) in [(0, 0), (0, 2), (1, 2)] {
            let col: Vec<S> = (0..3).map(|r| m.get(r, nu).partial(2 + mu)).collect();
            for tau in 0..3 {
                let direct = m.with_column(tau, &col).unwrap().determinant().unwrap();
                assert_eq!(*minors.second_minor(mu, nu, tau), direct);
                assert_eq!(
                    minors.second_minor(mu, nu, tau),
                    minors.second_minor(nu, mu, tau)
                );
            }
        }
    }

    #[test]
    fn transfer_in_flat_chart() {
        let flat = FundamentalSolution::new(2, sol(2, "-b + x1*a1 + x2*a2", 6)).unwrap();
        let t = sol(2, "a1^2", 6);
        let r = jet_transfer_second(&flat, &t, 0, 0).unwrap();
        assert_eq!(r.truncate(2), S::constant(r.context(), G::from(2), 2));
        assert!(jet_transfer_second(&flat, &t, 0, 1).unwrap().is_zero());
        let t = sol(2, "x1^2 + x1*x2", 6);
        assert!(jet_transfer_second(&flat, &t, 1, 1).unwrap().is_zero());
    }

    #[test]
    fn transfer_matches_pulled_back_derivatives() {
        let phi = parse_series(
            "x1^2 + y1^2 + x2^2 + y2^2 + v*x1*y2 + x1^2*y1^2",
            &VariableContext::graph(2),
            8,
        )
        .unwrap();
        let m = crate::hypersurface::from_graph::<G>(&phi, 2, 8).unwrap();
        let q = FundamentalSolution::from_model(&m).unwrap();
        let system = derive_associated_system(&m).unwrap();
        let theta = q.q();
        let ctx = theta.context();
        let mut images: Vec<S> = (0..2).map(|k| S::var(ctx, k, 8)).collect();
        images.push(theta.clone());
        images.extend((0..2).map(|k| theta.partial(k)));
        for (k1, k2) in [(0, 0), (0, 1)] {
            let t = theta.derivative(&[k1, k2]);
            for (l1, l2) in [(0, 0), (0, 1), (1, 1)] {
                let direct = system
                    .get(k1, k2)
                    .derivative(&[system.slope(l1), system.slope(l2)])
                    .compose(&images)
                    .unwrap();
                let transferred = jet_transfer_second(&q, &t, l1, l2).unwrap();
                let swapped = jet_transfer_second(&q, &t, l2, l1).unwrap();
                assert_eq!(transferred, swapped);
                let o = direct.order().min(transferred.order());
                assert!(o >= 4);
                assert!(
                    direct.equal_to_order(&transferred, o),
                    "({k1},{k2},{l1},{l2})"
                );
            }
        }
    }
}
