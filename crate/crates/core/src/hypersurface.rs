//! Real hypersurfaces `w = Θ(z, z̄, w̄)` of `ℂ^{n+1}` through the origin.

use std::sync::Arc;

use crate::scalar::Coefficient;
use crate::series::{
    linalg, solve_implicit, Monomial, SeriesError, SeriesMatrix, TruncatedSeries, VariableContext,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HypersurfaceError {
    #[error("CR dimension {0} is not supported, n must be at least 2")]
    UnsupportedDimension(usize),
    #[error("defining function lives in {found}, expected {expected}")]
    WrongContext { expected: String, found: String },
    #[error("defining function is not of the form -wb + O(2): {0}")]
    Normalization(String),
    #[error("reality identity {identity} fails at {monomial} with coefficient {coefficient}")]
    Reality {
        identity: u8,
        monomial: String,
        coefficient: String,
    },
    #[error("Levi form is degenerate at the origin")]
    LeviDegenerate,
    #[error("graphing function has a non-real coefficient at {0}")]
    NonRealGraph(String),
    #[error("graphing function must vanish to second order at the origin")]
    GraphNotSecondOrder,
    #[error("point map is not a local biholomorphism fixing the origin: {0}")]
    NonInvertibleMap(String),
    #[error("the coefficient field has no imaginary unit")]
    NoImaginaryUnit,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// A validated defining function: `Θ = −w̄ + O(2)` and both reality identities
/// hold to the order of `Θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct HypersurfaceModel<C> {
    n: usize,
    theta: TruncatedSeries<C>,
}

/// First failure of a reality identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealityFailure<C> {
    /// 1 for `w̄ = Θ̄(z̄, z, Θ)`, 2 for `w = Θ(z, z̄, Θ̄)`.
    pub identity: u8,
    pub monomial: Monomial,
    pub rendered: String,
    pub coefficient: C,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealityReport<C> {
    pub order: u32,
    pub failure: Option<RealityFailure<C>>,
}

impl<C> RealityReport<C> {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeviData<C> {
    pub delta: TruncatedSeries<C>,
    pub delta_at_origin: C,
    /// Numbers of positive and negative eigenvalues of the Levi form.
    pub signature: (usize, usize),
}

/// Validates `theta` as the defining function of a hypersurface, truncating it
/// at `order` first when that is lower than its own order.
pub fn make_model<C: Coefficient>(
    n: usize,
    theta: TruncatedSeries<C>,
    order: u32,
) -> Result<HypersurfaceModel<C>, HypersurfaceError> {
    if n < 2 {
        return Err(HypersurfaceError::UnsupportedDimension(n));
    }
    let ctx = VariableContext::theta(n);
    if **theta.context() != *ctx {
        return Err(HypersurfaceError::WrongContext {
            expected: ctx.to_string(),
            found: theta.context().to_string(),
        });
    }
    let theta = theta.truncate(order);
    check_normalization(n, &theta)?;
    let report = check_reality(n, &theta)?;
    if let Some(f) = report.failure {
        return Err(HypersurfaceError::Reality {
            identity: f.identity,
            monomial: f.rendered,
            coefficient: f.coefficient.to_string(),
        });
    }
    Ok(HypersurfaceModel { n, theta })
}

/// Checks `Θ = −w̄ + O(2)`.
pub fn check_normalization<C: Coefficient>(
    n: usize,
    theta: &TruncatedSeries<C>,
) -> Result<(), HypersurfaceError> {
    if theta.order() < 1 {
        return Err(HypersurfaceError::Normalization("order below 1".into()));
    }
    if !theta.constant_term().is_zero() {
        return Err(HypersurfaceError::Normalization(format!(
            "constant term {}",
            theta.constant_term()
        )));
    }
    let wb = 2 * n;
    for i in 0..=wb {
        let expected = if i == wb { -C::one() } else { C::zero() };
        let found = theta.linear_coeff(i);
        if found != expected {
            return Err(HypersurfaceError::Normalization(format!(
                "coefficient {found} at {}",
                theta.context().name(i)
            )));
        }
    }
    Ok(())
}

/// `Θ̄(z̄, z, w)` in the context `(z, z̄, w)`: coefficients conjugated, `z ↔ z̄`
/// swapped and `w̄` renamed to `w`.
pub fn conjugate_series<C: Coefficient>(
    n: usize,
    theta: &TruncatedSeries<C>,
) -> TruncatedSeries<C> {
    let positions: Vec<usize> = (n..2 * n).chain(0..n).chain([2 * n]).collect();
    theta
        .conj_coefficients()
        .relocate(&VariableContext::theta_conjugate(n), &positions)
}

/// Evaluates both reality identities of `theta` to its order.
pub fn check_reality<C: Coefficient>(
    n: usize,
    theta: &TruncatedSeries<C>,
) -> Result<RealityReport<C>, HypersurfaceError> {
    let ctx = theta.context().clone();
    let order = theta.order();
    let conj = conjugate_series(n, theta);
    let cctx = conj.context().clone();

    let mut images: Vec<_> = (0..2 * n)
        .map(|i| TruncatedSeries::var(&ctx, i, order))
        .collect();
    images.push(theta.clone());
    let first = conj.compose(&images)?;
    let wb = TruncatedSeries::var(&ctx, 2 * n, order);

    let mut images: Vec<_> = (0..2 * n)
        .map(|i| TruncatedSeries::var(&cctx, i, order))
        .collect();
    images.push(conj.clone());
    let second = theta.compose(&images)?;
    let w = TruncatedSeries::var(&cctx, 2 * n, order);

    let checks = [(1u8, first, wb), (2u8, second, w)];
    let checked = checks
        .iter()
        .map(|(_, l, _)| l.order())
        .min()
        .unwrap_or(order);
    for (identity, lhs, rhs) in checks {
        let o = lhs.order();
        if let Some((monomial, coefficient)) = lhs.first_difference(&rhs, o) {
            let rendered = monomial.display(lhs.context()).to_string();
            return Ok(RealityReport {
                order: checked,
                failure: Some(RealityFailure {
                    identity,
                    monomial,
                    rendered,
                    coefficient,
                }),
            });
        }
    }
    Ok(RealityReport {
        order: checked,
        failure: None,
    })
}

/// Defining function of `u = φ(x, y, v)` where `z = x + i y`, `w = u + i v`.
pub fn from_graph<C: Coefficient>(
    phi: &TruncatedSeries<C>,
    n: usize,
    order: u32,
) -> Result<HypersurfaceModel<C>, HypersurfaceError> {
    if n < 2 {
        return Err(HypersurfaceError::UnsupportedDimension(n));
    }
    let gctx = VariableContext::graph(n);
    if **phi.context() != *gctx {
        return Err(HypersurfaceError::WrongContext {
            expected: gctx.to_string(),
            found: phi.context().to_string(),
        });
    }
    let phi = phi.truncate(order);
    if !phi.constant_term().is_zero() || (0..=2 * n).any(|i| !phi.linear_coeff(i).is_zero()) {
        return Err(HypersurfaceError::GraphNotSecondOrder);
    }
    if let Some((m, _)) = phi.terms().find(|(_, c)| !c.is_real()) {
        return Err(HypersurfaceError::NonRealGraph(
            m.display(&gctx).to_string(),
        ));
    }
    let i = C::imaginary_unit().ok_or(HypersurfaceError::NoImaginaryUnit)?;
    let o = phi.order();

    // (z, z̄, w̄, w)
    let mut names: Vec<String> = VariableContext::theta(n).names().to_vec();
    names.push("w".into());
    let ext = VariableContext::new(names)?;
    let var = |k: usize| TruncatedSeries::var(&ext, k, o);
    let half = C::from_ratio(1, 2);
    let half_i = (C::from_int(2) * i).inverse();
    let mut images = Vec::with_capacity(2 * n + 1);
    for k in 0..n {
        images.push((&var(k) + &var(n + k)).scale(&half));
    }
    for k in 0..n {
        images.push((&var(k) - &var(n + k)).scale(&half_i));
    }
    images.push((&var(2 * n + 1) - &var(2 * n)).scale(&half_i));
    let equation = &(&var(2 * n + 1) + &var(2 * n)).scale(&half) - &phi.compose(&images)?;

    let tctx = VariableContext::theta(n);
    let params: Vec<_> = (0..=2 * n)
        .map(|k| (k, TruncatedSeries::var(&tctx, k, o)))
        .collect();
    let mut solved = solve_implicit(
        &[equation],
        &[2 * n + 1],
        &params,
        &[TruncatedSeries::zero(&tctx, o)],
    )?;
    make_model(n, solved.remove(0), o)
}

/// Transports the model by `(z, w) ↦ (zmap(z, w), wmap(z, w))`, all maps in the
/// context `(z1..zn, w)`.
pub fn apply_biholomorphism<C: Coefficient>(
    model: &HypersurfaceModel<C>,
    zmap: &[TruncatedSeries<C>],
    wmap: &TruncatedSeries<C>,
) -> Result<HypersurfaceModel<C>, HypersurfaceError> {
    let n = model.n;
    let hctx = VariableContext::holomorphic(n);
    if zmap.len() != n {
        return Err(HypersurfaceError::NonInvertibleMap(format!(
            "expected {n} coordinate images, found {}",
            zmap.len()
        )));
    }
    for f in zmap.iter().chain([wmap]) {
        if **f.context() != *hctx {
            return Err(HypersurfaceError::WrongContext {
                expected: hctx.to_string(),
                found: f.context().to_string(),
            });
        }
        if !f.constant_term().is_zero() {
            return Err(HypersurfaceError::NonInvertibleMap(
                "the origin is moved".into(),
            ));
        }
    }
    let linear: Vec<Vec<C>> = zmap
        .iter()
        .chain([wmap])
        .map(|f| (0..=n).map(|j| f.linear_coeff(j)).collect())
        .collect();
    if linalg::determinant(&linear).is_zero() {
        return Err(HypersurfaceError::NonInvertibleMap(
            "singular linear part".into(),
        ));
    }

    let ctx = model.theta.context().clone();
    let order = zmap
        .iter()
        .chain([wmap])
        .map(TruncatedSeries::order)
        .fold(model.theta.order(), u32::min);
    let theta = model.theta.truncate(order);
    let var = |k: usize| TruncatedSeries::var(&ctx, k, order);

    // (z, Θ) and (z̄, w̄) as images of the holomorphic coordinates
    let mut on_m: Vec<_> = (0..n).map(var).collect();
    on_m.push(theta.clone());
    let conj_images: Vec<_> = (n..=2 * n).map(var).collect();

    let mut equations = Vec::with_capacity(2 * n + 1);
    for f in zmap {
        equations.push(f.compose(&on_m)?);
    }
    for f in zmap.iter().chain([wmap]) {
        equations.push(f.conj_coefficients().compose(&conj_images)?);
    }
    let targets: Vec<_> = (0..=2 * n).map(var).collect();
    let unknowns: Vec<usize> = (0..=2 * n).collect();
    let inverse = solve_implicit(&equations, &unknowns, &[], &targets).map_err(|e| match e {
        SeriesError::SingularJacobian => {
            HypersurfaceError::NonInvertibleMap("image is not graphed over the w'-axis".into())
        }
        other => other.into(),
    })?;
    let image = wmap.compose(&on_m)?.compose(&inverse)?;
    let o = image.order();
    make_model(n, image, o)
}

impl<C: Coefficient> HypersurfaceModel<C> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.theta.order()
    }

    pub fn theta(&self) -> &TruncatedSeries<C> {
        &self.theta
    }

    pub fn context(&self) -> &Arc<VariableContext> {
        self.theta.context()
    }

    /// Position of `t̄_μ` (`z̄_1..z̄_n, w̄`) in the context.
    pub fn tbar(&self, mu: usize) -> usize {
        debug_assert!(mu <= self.n);
        self.n + mu
    }

    pub fn conjugate_theta(&self) -> TruncatedSeries<C> {
        conjugate_series(self.n, &self.theta)
    }

    pub fn check_reality(&self) -> RealityReport<C> {
        check_reality(self.n, &self.theta).expect("validated model composes")
    }

    /// Rows `Θ_{t̄_μ}` and `Θ_{z_k t̄_μ}`, columns `μ = z̄_1..z̄_n, w̄`.
    pub fn delta_matrix(&self) -> SeriesMatrix<C> {
        let first: Vec<_> = (0..=self.n)
            .map(|mu| self.theta.partial(self.tbar(mu)))
            .collect();
        let mut rows = vec![first.clone()];
        for k in 0..self.n {
            rows.push(first.iter().map(|d| d.partial(k)).collect());
        }
        SeriesMatrix::from_rows(rows).expect("square and uniform")
    }

    pub fn levi(&self) -> Result<LeviData<C>, HypersurfaceError> {
        let delta = self.delta_matrix().determinant()?;
        let delta_at_origin = delta.constant_term();
        if delta_at_origin.is_zero() {
            return Err(HypersurfaceError::LeviDegenerate);
        }
        let hermitian: Vec<Vec<C>> = (0..self.n)
            .map(|j| {
                (0..self.n)
                    .map(|k| {
                        let mut exps = vec![0u16; 2 * self.n + 1];
                        exps[j] += 1;
                        exps[self.n + k] += 1;
                        self.theta.coeff_of(&exps)
                    })
                    .collect()
            })
            .collect();
        let (pos, neg, zero) = linalg::hermitian_inertia(&hermitian);
        if zero > 0 {
            return Err(HypersurfaceError::LeviDegenerate);
        }
        Ok(LeviData {
            delta,
            delta_at_origin,
            signature: (pos, neg),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_series;
    use crate::scalar::GaussianRational as G;
    use num_traits::Zero;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type S = TruncatedSeries<G>;

    fn theta(n: usize, text: &str, order: u32) -> S {
        parse_series(text, &VariableContext::theta(n), order).unwrap()
    }

    fn model(n: usize, text: &str, order: u32) -> Result<HypersurfaceModel<G>, HypersurfaceError> {
        make_model(n, theta(n, text, order), order)
    }

    #[test]
    fn heisenberg_models_are_valid() {
        assert!(model(2, "-wb + z1*z1b + z2*z2b", 6).is_ok());
        assert!(model(2, "-wb + z1*z1b - z2*z2b", 6).is_ok());
    }

    #[test]
    fn off_diagonal_fails_reality() {
        let err = model(2, "-wb + z1*z2b", 6).unwrap_err();
        assert_eq!(
            err,
            HypersurfaceError::Reality {
                identity: 1,
                monomial: "z2*z1b".into(),
                coefficient: "1".into()
            }
        );
    }

    #[test]
    fn dimension_and_normalization() {
        let ctx = VariableContext::theta(1);
        let t: S = parse_series("-wb + z1*z1b", &ctx, 4).unwrap();
        assert_eq!(
            make_model(1, t, 4),
            Err(HypersurfaceError::UnsupportedDimension(1))
        );
        assert!(matches!(
            model(2, "-2*wb + z1*z1b + z2*z2b", 4),
            Err(HypersurfaceError::Normalization(_))
        ));
        assert!(matches!(
            model(2, "-wb + z1 + z1*z1b + z2*z2b", 4),
            Err(HypersurfaceError::Normalization(_))
        ));
    }

    #[test]
    fn conjugation() {
        let m = model(2, "-wb + z1*z1b + z2*z2b", 5).unwrap();
        let cctx = VariableContext::theta_conjugate(2);
        let expected: S = parse_series("-w + z1b*z1 + z2b*z2", &cctx, 5).unwrap();
        assert_eq!(m.conjugate_theta(), expected);

        let t = theta(2, "-wb + i*z1^2*z1b", 5);
        let expected: S = parse_series("-w - i*z1b^2*z1", &cctx, 5).unwrap();
        assert_eq!(conjugate_series(2, &t), expected);
        let back = conjugate_series(
            2,
            &conjugate_series(2, &t)
                .relabel(&VariableContext::theta(2))
                .unwrap(),
        );
        assert_eq!(back.relabel(&VariableContext::theta(2)).unwrap(), t);
    }

    #[test]
    fn reality_reports() {
        let ok = theta(2, "-wb + z1*z1b + z2*z2b + z1^2*z1b^2", 6);
        assert!(check_reality(2, &ok).unwrap().passed());
        let bad = theta(2, "-wb + z1^2", 6);
        let f = check_reality(2, &bad).unwrap().failure.unwrap();
        assert_eq!(f.monomial.degree(), 2);
    }

    #[test]
    fn graph_conversion() {
        let g = VariableContext::graph(2);
        let phi: S = parse_series("x1^2 + y1^2 + x2^2 + y2^2", &g, 6).unwrap();
        let m = from_graph(&phi, 2, 6).unwrap();
        assert_eq!(*m.theta(), theta(2, "-wb + 2*z1*z1b + 2*z2*z2b", 6));

        let flat = from_graph(&S::zero(&g, 6), 2, 6).unwrap();
        assert_eq!(*flat.theta(), theta(2, "-wb", 6));

        let phi: S = parse_series("x1^2 + y1^2 + x2^2 + y2^2 + v*x1^2", &g, 6).unwrap();
        let m = from_graph(&phi, 2, 6).unwrap();
        assert!(
            m.theta().depends_on(4)
                && m.theta()
                    .terms()
                    .any(|(mm, _)| mm.exponent(4) > 0 && mm.degree() > 1)
        );
        assert!(m.check_reality().passed());

        let phi: S = parse_series("i*x1^2", &g, 6).unwrap();
        assert!(matches!(
            from_graph(&phi, 2, 6),
            Err(HypersurfaceError::NonRealGraph(_))
        ));
        let phi: S = parse_series("x1 + x1^2", &g, 6).unwrap();
        assert_eq!(
            from_graph(&phi, 2, 6).unwrap_err(),
            HypersurfaceError::GraphNotSecondOrder
        );
    }

    #[test]
    fn levi_data() {
        let l = model(2, "-wb + z1*z1b + z2*z2b", 6)
            .unwrap()
            .levi()
            .unwrap();
        assert_eq!(l.delta_at_origin, G::from(-1));
        assert_eq!(l.signature, (2, 0));
        let l = model(3, "-wb + z1*z1b + z2*z2b + z3*z3b", 6)
            .unwrap()
            .levi()
            .unwrap();
        assert_eq!(l.delta_at_origin, G::from(1));
        let l = model(2, "-wb + z1*z1b - z2*z2b", 6)
            .unwrap()
            .levi()
            .unwrap();
        assert_eq!(l.signature, (1, 1));
        let m = model(2, "-wb + z1*z1b", 6).unwrap();
        assert_eq!(m.levi(), Err(HypersurfaceError::LeviDegenerate));
    }

    fn hol(n: usize, text: &str, order: u32) -> S {
        parse_series(text, &VariableContext::holomorphic(n), order).unwrap()
    }

    #[test]
    fn point_maps() {
        let m = model(2, "-wb + z1*z1b + z2*z2b", 6).unwrap();
        let id =
            apply_biholomorphism(&m, &[hol(2, "z1", 6), hol(2, "z2", 6)], &hol(2, "w", 6)).unwrap();
        assert_eq!(id, m);

        let shear = apply_biholomorphism(
            &m,
            &[hol(2, "z1", 6), hol(2, "z2", 6)],
            &hol(2, "w + z1^2", 6),
        )
        .unwrap();
        assert_eq!(
            *shear.theta(),
            theta(2, "-wb + z1*z1b + z2*z2b + z1^2 + z1b^2", 6)
        );

        let scaled = apply_biholomorphism(
            &m,
            &[hol(2, "2*z1", 6), hol(2, "2*z2", 6)],
            &hol(2, "4*w", 6),
        )
        .unwrap();
        assert_eq!(*scaled.theta(), *m.theta());

        let err = apply_biholomorphism(&m, &[hol(2, "z1", 6), hol(2, "z1", 6)], &hol(2, "w", 6));
        assert!(matches!(err, Err(HypersurfaceError::NonInvertibleMap(_))));
    }

    #[test]
    fn signature_survives_linear_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ctx = VariableContext::holomorphic(3);
        let m = model(
            3,
            "-wb + z1*z1b - z2*z2b + z3*z3b + z1^2*z2b^2 + z2^2*z1b^2",
            6,
        )
        .unwrap();
        let base = m.levi().unwrap();
        let mut tried = 0;
        while tried < 6 {
            let zmap: Vec<S> = (0..3)
                .map(|_| {
                    let mut s = S::zero(&ctx, 6);
                    for j in 0..3 {
                        let c = G::from_parts(
                            (rng.random_range(-2..=2), 1),
                            (rng.random_range(-2..=2), 1),
                        );
                        s = &s + &S::var(&ctx, j, 6).scale(&c);
                    }
                    s
                })
                .collect();
            let Ok(image) = apply_biholomorphism(&m, &zmap, &S::var(&ctx, 3, 6)) else {
                continue;
            };
            tried += 1;
            let levi = image.levi().unwrap();
            assert_eq!(levi.signature, base.signature);
            assert!(!levi.delta_at_origin.is_zero());
        }
    }
}
