//! Fourth-order flatness tensors.
//!
//! Two constructions are provided. [`hachtroudi_tensor`] works on any
//! second-order system in jet coordinates. [`main_theorem_tensor`] works
//! directly on `Θ` through the determinant `Δ` and its Cramer minors, and
//! equals `Δ³` times the first one pulled back along `y = Θ`, `y_x = Θ_z`.

use std::collections::{BTreeMap, HashMap};

use crate::hypersurface::{HypersurfaceError, HypersurfaceModel};
use crate::pde::{derive_associated_system, CramerMinors, PdeError, PdeSystem};
use crate::scalar::Coefficient;
use crate::series::{Monomial, SeriesError, TruncatedSeries};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FlatnessError {
    #[error("Levi form is degenerate at the origin")]
    LeviDegenerate,
    #[error("defining function known to order {0}, at least 4 is needed")]
    InsufficientOrder(u32),
    #[error(transparent)]
    Pde(#[from] PdeError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

impl From<HypersurfaceError> for FlatnessError {
    fn from(e: HypersurfaceError) -> Self {
        match e {
            HypersurfaceError::LeviDegenerate => FlatnessError::LeviDegenerate,
            other => FlatnessError::Pde(PdeError::Hypersurface(other)),
        }
    }
}

fn from_pde(e: PdeError) -> FlatnessError {
    match e {
        PdeError::Hypersurface(HypersurfaceError::LeviDegenerate) | PdeError::RankDeficient => {
            FlatnessError::LeviDegenerate
        }
        other => FlatnessError::Pde(other),
    }
}

/// Components `W(k1, k2, l1, l2)`, symmetric in `(k1, k2)` and in `(l1, l2)`.
/// Indices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatnessTensor<C> {
    n: usize,
    // keys with k1 <= k2 and l1 <= l2
    components: BTreeMap<(usize, usize, usize, usize), TruncatedSeries<C>>,
    certified_order: u32,
}

/// A nonzero coefficient of a tensor component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness<C> {
    /// `(k1, k2, l1, l2)` with `k1 <= k2`, `l1 <= l2`, 0-based.
    pub component: (usize, usize, usize, usize),
    pub monomial: Monomial,
    pub rendered: String,
    pub coefficient: C,
}

fn key(k1: usize, k2: usize, l1: usize, l2: usize) -> (usize, usize, usize, usize) {
    (k1.min(k2), k1.max(k2), l1.min(l2), l1.max(l2))
}

impl<C: Coefficient> FlatnessTensor<C> {
    fn build(
        n: usize,
        mut component: impl FnMut(usize, usize, usize, usize) -> TruncatedSeries<C>,
    ) -> Self {
        let mut components = BTreeMap::new();
        for k1 in 0..n {
            for k2 in k1..n {
                for l1 in 0..n {
                    for l2 in l1..n {
                        components.insert((k1, k2, l1, l2), component(k1, k2, l1, l2));
                    }
                }
            }
        }
        let certified_order = components
            .values()
            .map(TruncatedSeries::order)
            .min()
            .unwrap_or(0);
        FlatnessTensor {
            n,
            components,
            certified_order,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Degree up to which every component is exact.
    pub fn certified_order(&self) -> u32 {
        self.certified_order
    }

    pub fn get(&self, k1: usize, k2: usize, l1: usize, l2: usize) -> &TruncatedSeries<C> {
        &self.components[&key(k1, k2, l1, l2)]
    }

    /// Stored components in lexicographic order of their indices.
    pub fn components(
        &self,
    ) -> impl Iterator<Item = (&(usize, usize, usize, usize), &TruncatedSeries<C>)> {
        self.components.iter()
    }

    /// `Σ_k W(k, k2, k, l2)`.
    pub fn trace(&self, k2: usize, l2: usize) -> TruncatedSeries<C> {
        let first = self.get(0, k2, 0, l2);
        (1..self.n).fold(first.clone(), |acc, k| &acc + self.get(k, k2, k, l2))
    }

    pub fn is_trace_free(&self) -> bool {
        (0..self.n).all(|k2| {
            (0..self.n).all(|l2| self.trace(k2, l2).truncate(self.certified_order).is_zero())
        })
    }

    /// The first nonzero coefficient up to the certified order: smallest
    /// component index, then smallest monomial in graded order.
    pub fn witness(&self) -> Option<Witness<C>> {
        for (&component, series) in &self.components {
            if let Some((m, c)) = series.truncate(self.certified_order).leading_term() {
                return Some(Witness {
                    component,
                    monomial: m.clone(),
                    rendered: m.display(series.context()).to_string(),
                    coefficient: c.clone(),
                });
            }
        }
        None
    }

    /// First component and monomial, up to `order`, where the tensors differ.
    pub fn first_difference(&self, other: &Self, order: u32) -> Option<Mismatch<C>> {
        for (&component, a) in &self.components {
            let b = other.components.get(&component)?;
            if let Some((m, _)) = a.first_difference(b, order) {
                return Some(Mismatch {
                    component,
                    rendered: m.display(a.context()).to_string(),
                    left: a.coeff(&m),
                    right: b.coeff(&m),
                    monomial: m,
                });
            }
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch<C> {
    pub component: (usize, usize, usize, usize),
    pub monomial: Monomial,
    pub rendered: String,
    pub left: C,
    pub right: C,
}

fn delta(i: usize, j: usize) -> bool {
    i == j
}

/// Hachtroudi's tensor of `y_{x^{k1} x^{k2}} = F_{k1,k2}`.
pub fn hachtroudi_tensor<C: Coefficient>(system: &PdeSystem<C>) -> FlatnessTensor<C> {
    let n = system.n();
    let mut second: HashMap<(usize, usize, usize, usize), TruncatedSeries<C>> = HashMap::new();
    let mut d2 = |k1: usize, k2: usize, l1: usize, l2: usize| -> TruncatedSeries<C> {
        second
            .entry(key(k1, k2, l1, l2))
            .or_insert_with(|| {
                system
                    .get(k1, k2)
                    .partial(system.slope(l1))
                    .partial(system.slope(l2))
            })
            .clone()
    };
    let w1 = C::from_ratio(1, n as i64 + 2);
    let w2 = C::from_ratio(1, (n as i64 + 1) * (n as i64 + 2));
    FlatnessTensor::build(n, |k1, k2, l1, l2| {
        let mut out = d2(k1, k2, l1, l2);
        let mut traces = TruncatedSeries::zero(out.context(), out.order());
        for lp in 0..n {
            if delta(k1, l1) {
                traces = &traces + &d2(lp, k2, lp, l2);
            }
            if delta(k1, l2) {
                traces = &traces + &d2(lp, k2, l1, lp);
            }
            if delta(k2, l1) {
                traces = &traces + &d2(k1, lp, lp, l2);
            }
            if delta(k2, l2) {
                traces = &traces + &d2(k1, lp, l1, lp);
            }
        }
        out = &out - &traces.scale(&w1);
        let pairs = usize::from(delta(k1, l1) && delta(k2, l2))
            + usize::from(delta(k2, l1) && delta(k1, l2));
        if pairs > 0 {
            let mut full = TruncatedSeries::zero(out.context(), out.order());
            for lp in 0..n {
                for lpp in 0..n {
                    full = &full + &d2(lp, lpp, lp, lpp);
                }
            }
            out = &out + &full.scale(&(C::from_int(pairs as i64) * w2.clone()));
        }
        out
    })
}

/// `Δ` and its Cramer minors for the matrix with rows `Θ_{t̄_μ}`, `Θ_{z_k t̄_μ}`.
pub type MinorFamily<C> = CramerMinors<C>;

pub fn minors<C: Coefficient>(
    model: &HypersurfaceModel<C>,
) -> Result<MinorFamily<C>, FlatnessError> {
    let family = CramerMinors::new(model.theta(), model.n())?;
    if family.delta().constant_term().is_zero() {
        return Err(FlatnessError::LeviDegenerate);
    }
    Ok(family)
}

/// The fourth-order tensor of `Θ` whose vanishing characterizes
/// pseudosphericity; exact to degree `order(Θ) − 4`.
pub fn main_theorem_tensor<C: Coefficient>(
    model: &HypersurfaceModel<C>,
) -> Result<FlatnessTensor<C>, FlatnessError> {
    if model.order() < 4 {
        return Err(FlatnessError::InsufficientOrder(model.order()));
    }
    let n = model.n();
    let family = minors(model)?;
    let theta = model.theta();
    let tbar: Vec<usize> = (0..=n).map(|mu| model.tbar(mu)).collect();

    // Θ_{z_a z_b t̄_τ} and the bracket {Δ Θ_{z_a z_b t̄_μ t̄_ν} − Σ_τ Δ^τ_{μν} Θ_{z_a z_b t̄_τ}}
    let mut third: HashMap<(usize, usize), Vec<TruncatedSeries<C>>> = HashMap::new();
    let mut bracket_cache: HashMap<(usize, usize, usize, usize), TruncatedSeries<C>> =
        HashMap::new();
    let mut bracket = |a: usize, b: usize, mu: usize, nu: usize| -> TruncatedSeries<C> {
        let (a, b) = (a.min(b), a.max(b));
        let (mu, nu) = (mu.min(nu), mu.max(nu));
        if let Some(v) = bracket_cache.get(&(a, b, mu, nu)) {
            return v.clone();
        }
        let thirds = third
            .entry((a, b))
            .or_insert_with(|| {
                let zz = theta.derivative(&[a, b]);
                tbar.iter().map(|&t| zz.partial(t)).collect()
            })
            .clone();
        let mut v = family.delta() * &thirds[nu].partial(tbar[mu]);
        for (tau, t3) in thirds.iter().enumerate() {
            v = &v - &(family.second_minor(mu, nu, tau) * t3);
        }
        bracket_cache.insert((a, b, mu, nu), v.clone());
        v
    };
    // Σ_{μ,ν} Δ^μ_{[0_{1+l1}]} Δ^ν_{[0_{1+l2}]} {…}(a, b, μ, ν)
    let mut contraction_cache: HashMap<(usize, usize, usize, usize), TruncatedSeries<C>> =
        HashMap::new();
    let mut contraction = |a: usize, b: usize, l1: usize, l2: usize| -> TruncatedSeries<C> {
        let k = key(a, b, l1, l2);
        if let Some(v) = contraction_cache.get(&k) {
            return v.clone();
        }
        let mut acc: Option<TruncatedSeries<C>> = None;
        for mu in 0..=n {
            for nu in 0..=n {
                let weight = family.unit_minor(mu, l1) * family.unit_minor(nu, l2);
                let term = &weight * &bracket(a, b, mu, nu);
                acc = Some(match acc {
                    Some(s) => &s + &term,
                    None => term,
                });
            }
        }
        let v = acc.expect("n >= 1");
        contraction_cache.insert(k, v.clone());
        v
    };

    let w1 = C::from_ratio(1, n as i64 + 2);
    let w2 = C::from_ratio(1, (n as i64 + 1) * (n as i64 + 2));
    Ok(FlatnessTensor::build(n, |k1, k2, l1, l2| {
        let mut out = contraction(k1, k2, l1, l2);
        for lp in 0..n {
            if delta(k1, l1) {
                out = &out - &contraction(lp, k2, lp, l2).scale(&w1);
            }
            if delta(k1, l2) {
                out = &out - &contraction(lp, k2, l1, lp).scale(&w1);
            }
            if delta(k2, l1) {
                out = &out - &contraction(k1, lp, lp, l2).scale(&w1);
            }
            if delta(k2, l2) {
                out = &out - &contraction(k1, lp, l1, lp).scale(&w1);
            }
        }
        let pairs = usize::from(delta(k1, l1) && delta(k2, l2))
            + usize::from(delta(k2, l1) && delta(k1, l2));
        if pairs > 0 {
            let weight = C::from_int(pairs as i64) * w2.clone();
            for lp in 0..n {
                for lpp in 0..n {
                    out = &out + &contraction(lp, lpp, lp, lpp).scale(&weight);
                }
            }
        }
        out
    }))
}

/// Both constructions of the tensor of one model, and their comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheck<C> {
    pub main_theorem: FlatnessTensor<C>,
    pub pulled_back: FlatnessTensor<C>,
    /// Common certified order of the two tensors.
    pub order: u32,
    pub mismatch: Option<Mismatch<C>>,
}

impl<C> CrossCheck<C> {
    pub fn agree(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Compares [`main_theorem_tensor`] with `Δ³` times the Hachtroudi tensor of
/// the associated system, pulled back along `x = z`, `y = Θ`, `y_x = Θ_z`.
pub fn cross_check<C: Coefficient>(
    model: &HypersurfaceModel<C>,
) -> Result<CrossCheck<C>, FlatnessError> {
    let main_theorem = main_theorem_tensor(model)?;
    let pulled_back = pulled_back_hachtroudi(model)?;
    let order = main_theorem
        .certified_order()
        .min(pulled_back.certified_order());
    let mismatch = main_theorem.first_difference(&pulled_back, order);
    Ok(CrossCheck {
        main_theorem,
        pulled_back,
        order,
        mismatch,
    })
}

fn pulled_back_hachtroudi<C: Coefficient>(
    model: &HypersurfaceModel<C>,
) -> Result<FlatnessTensor<C>, FlatnessError> {
    let n = model.n();
    let delta = model.levi()?.delta;
    let system = derive_associated_system(model).map_err(from_pde)?;
    let jet_tensor = hachtroudi_tensor(&system);
    let theta = model.theta();
    let ctx = theta.context();
    let mut images: Vec<_> = (0..n)
        .map(|k| TruncatedSeries::var(ctx, k, theta.order()))
        .collect();
    images.push(theta.clone());
    images.extend((0..n).map(|k| theta.partial(k)));
    let cube = &(&delta * &delta) * &delta;
    let mut failure = None;
    let tensor = FlatnessTensor::build(n, |k1, k2, l1, l2| {
        match jet_tensor.get(k1, k2, l1, l2).compose(&images) {
            Ok(s) => &s * &cube,
            Err(e) => {
                failure.get_or_insert(e);
                TruncatedSeries::zero(ctx, 0)
            }
        }
    });
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(tensor),
    }
}

/// Outcome of the pseudosphericity test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict<C> {
    /// Every tensor coefficient of degree at most `d` vanishes.
    VanishesToOrder(u32),
    NonVanishing(Witness<C>),
}

impl<C> Verdict<C> {
    pub fn vanishes(&self) -> bool {
        matches!(self, Verdict::VanishesToOrder(_))
    }
}

/// Evaluates the tensor of `model` truncated at `order`; vanishing is only
/// ever certified up to the resulting jet order.
pub fn is_pseudospherical<C: Coefficient>(
    model: &HypersurfaceModel<C>,
    order: u32,
) -> Result<Verdict<C>, FlatnessError> {
    let model = if order < model.order() {
        crate::hypersurface::make_model(model.n(), model.theta().truncate(order), order)?
    } else {
        model.clone()
    };
    let tensor = main_theorem_tensor(&model)?;
    Ok(verdict_of(&tensor))
}

pub fn verdict_of<C: Coefficient>(tensor: &FlatnessTensor<C>) -> Verdict<C> {
    match tensor.witness() {
        Some(w) => Verdict::NonVanishing(w),
        None => Verdict::VanishesToOrder(tensor.certified_order()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypersurface::make_model;
    use crate::parser::parse_series;
    use crate::scalar::GaussianRational as G;
    use crate::series::VariableContext;

    type S = TruncatedSeries<G>;

    fn model(n: usize, text: &str, order: u32) -> HypersurfaceModel<G> {
        make_model(
            n,
            parse_series(text, &VariableContext::theta(n), order).unwrap(),
            order,
        )
        .unwrap()
    }

    fn jet(n: usize, text: &str, order: u32) -> S {
        parse_series(text, &VariableContext::jet(n), order).unwrap()
    }

    /// Evaluates the displayed Hachtroudi expression over all `n^4` index
    /// tuples with no symmetric storage and no shared subexpressions.
    fn brute_force(system: &PdeSystem<G>) -> Vec<((usize, usize, usize, usize), S)> {
        let n = system.n();
        let p = |l: usize| system.slope(l);
        let f2 = |a: usize, b: usize, l1: usize, l2: usize| {
            system.get(a, b).partial(p(l1)).partial(p(l2))
        };
        let kd = |i: usize, j: usize| if i == j { G::from(1) } else { G::from(0) };
        let mut out = Vec::new();
        for k1 in 0..n {
            for k2 in 0..n {
                for l1 in 0..n {
                    for l2 in 0..n {
                        let mut w = f2(k1, k2, l1, l2);
                        for lp in 0..n {
                            let t = &(&f2(lp, k2, lp, l2).scale(&kd(k1, l1))
                                + &f2(lp, k2, l1, lp).scale(&kd(k1, l2)))
                                + &(&f2(k1, lp, lp, l2).scale(&kd(k2, l1))
                                    + &f2(k1, lp, l1, lp).scale(&kd(k2, l2)));
                            w = &w - &t.scale(&G::from_ratio(1, n as i64 + 2));
                        }
                        let c = &(kd(k1, l1) * kd(k2, l2)) + &(kd(k2, l1) * kd(k1, l2));
                        for lp in 0..n {
                            for lpp in 0..n {
                                let term = f2(lp, lpp, lp, lpp).scale(&c);
                                w = &w
                                    + &term
                                        .scale(&G::from_ratio(1, (n as i64 + 1) * (n as i64 + 2)));
                            }
                        }
                        out.push(((k1, k2, l1, l2), w));
                    }
                }
            }
        }
        out
    }

    #[test]
    fn hachtroudi_of_trivial_systems() {
        let zero = hachtroudi_tensor(&PdeSystem::<G>::zero(2, 5));
        assert!(zero.components().all(|(_, s)| s.is_zero()));
        let s = PdeSystem::from_entries(
            2,
            5,
            [(0, 0, jet(2, "x1*y + y^2", 5)), (0, 1, jet(2, "x2^3", 5))],
        )
        .unwrap();
        assert!(hachtroudi_tensor(&s).components().all(|(_, s)| s.is_zero()));
    }

    #[test]
    fn hachtroudi_of_square_slope() {
        let s = PdeSystem::from_entries(2, 5, [(0, 0, jet(2, "yx1^2", 5))]).unwrap();
        let t = hachtroudi_tensor(&s);
        let c = |v: G| S::constant(s.context(), v, 3);
        assert_eq!(*t.get(0, 0, 0, 0), c(G::from_ratio(1, 3)));
        assert_eq!(*t.get(1, 1, 1, 1), c(G::from_ratio(1, 3)));
        assert_eq!(*t.get(0, 1, 0, 1), c(G::from_ratio(-1, 3)));
        assert!(t.get(0, 0, 1, 1).is_zero());
        assert!(t.get(0, 0, 0, 1).is_zero());
        for (idx, w) in brute_force(&s) {
            assert_eq!(*t.get(idx.0, idx.1, idx.2, idx.3), w, "{idx:?}");
        }
        assert!(t.is_trace_free());
    }

    #[test]
    fn hachtroudi_matches_brute_force_for_n3() {
        let s = PdeSystem::from_entries(
            3,
            6,
            [
                (0, 0, jet(3, "yx1^2*x2 + yx2*yx3", 6)),
                (0, 2, jet(3, "y*yx1*yx3 - 1/2*yx2^2", 6)),
                (1, 1, jet(3, "i*yx1*yx2*x3", 6)),
            ],
        )
        .unwrap();
        let t = hachtroudi_tensor(&s);
        for (idx, w) in brute_force(&s) {
            assert_eq!(*t.get(idx.0, idx.1, idx.2, idx.3), w, "{idx:?}");
        }
        assert!(t.is_trace_free());
    }

    #[test]
    fn heisenberg_minors() {
        let m = model(2, "-wb + z1*z1b + z2*z2b", 6);
        let f = minors(&m).unwrap();
        assert_eq!(f.delta().constant_term(), G::from(-1));
        let mat = f.matrix();
        let mut e2: Vec<S> = (0..3)
            .map(|_| S::zero(mat.context(), mat.order()))
            .collect();
        e2[1] = S::one(mat.context(), mat.order());
        assert_eq!(
            *f.unit_minor(0, 0),
            mat.with_column(0, &e2).unwrap().determinant().unwrap()
        );
        for mu in 0..3 {
            for nu in 0..3 {
                for tau in 0..3 {
                    assert!(f.second_minor(mu, nu, tau).is_zero());
                }
            }
        }
        let degenerate = model(2, "-wb + z1*z1b", 6);
        assert_eq!(
            minors(&degenerate).unwrap_err(),
            FlatnessError::LeviDegenerate
        );
    }

    #[test]
    fn cramer_consistency() {
        let m = model(2, "-wb + z1*z1b - z2*z2b + z1^2*z2b^2 + z2^2*z1b^2", 6);
        let f = minors(&m).unwrap();
        let mat = f.matrix();
        for l in 0..2 {
            for r in 0..3 {
                let mut acc = S::zero(mat.context(), mat.order());
                for mu in 0..3 {
                    acc = &acc + &(mat.get(r, mu) * f.unit_minor(mu, l));
                }
                let expected = if r == 1 + l {
                    f.delta().clone()
                } else {
                    S::zero(mat.context(), mat.order())
                };
                assert!(acc.equal_to_order(&expected, acc.order().min(expected.order())));
            }
        }
    }

    #[test]
    fn heisenberg_is_flat() {
        let m = model(2, "-wb + z1*z1b - z2*z2b", 6);
        let t = main_theorem_tensor(&m).unwrap();
        assert_eq!(t.certified_order(), 2);
        assert!(t.witness().is_none());
        assert_eq!(
            is_pseudospherical(&m, 6).unwrap(),
            Verdict::VanishesToOrder(2)
        );
    }

    #[test]
    fn quartic_bump_is_not_flat() {
        let m = model(2, "-wb + z1*z1b + z2*z2b + z1^2*z1b^2", 6);
        let check = cross_check(&m).unwrap();
        assert!(check.agree(), "{:?}", check.mismatch);
        assert!(check.main_theorem.is_trace_free());
        assert!(check.pulled_back.is_trace_free());
        let Verdict::NonVanishing(w) = verdict_of(&check.main_theorem) else {
            panic!("expected a witness");
        };
        assert_eq!(w.component, (0, 0, 0, 0));
        assert_eq!(
            check.pulled_back.get(0, 0, 0, 0).coeff(&w.monomial),
            w.coefficient
        );
    }

    #[test]
    fn insufficient_order() {
        let m = model(2, "-wb + z1*z1b + z2*z2b", 3);
        assert_eq!(
            main_theorem_tensor(&m).unwrap_err(),
            FlatnessError::InsufficientOrder(3)
        );
    }
}
