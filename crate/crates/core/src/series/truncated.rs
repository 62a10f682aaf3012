use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::{Monomial, SeriesError, VariableContext};
use crate::scalar::Coefficient;

/// A multivariate formal power series truncated at a guaranteed total degree.
///
/// `order` is the degree up to which every coefficient is trustworthy;
/// nothing of higher degree is ever stored. Two series are equal "to order
/// `d`" when their coefficients agree in every degree `<= d`.
///
/// The arithmetic operators panic when the operands live in different
/// contexts; the `try_*` methods report that as an error instead.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncatedSeries<C> {
    ctx: Arc<VariableContext>,
    order: u32,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coefficient> TruncatedSeries<C> {
    pub fn zero(ctx: &Arc<VariableContext>, order: u32) -> Self {
        TruncatedSeries {
            ctx: ctx.clone(),
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ctx: &Arc<VariableContext>, value: C, order: u32) -> Self {
        let mut s = Self::zero(ctx, order);
        if !value.is_zero() {
            s.terms.insert(Monomial::one(ctx.arity()), value);
        }
        s
    }

    pub fn one(ctx: &Arc<VariableContext>, order: u32) -> Self {
        Self::constant(ctx, C::one(), order)
    }

    pub fn var(ctx: &Arc<VariableContext>, index: usize, order: u32) -> Self {
        assert!(index < ctx.arity(), "variable index out of range");
        Self::monomial(ctx, Monomial::var(ctx.arity(), index, 1), C::one(), order)
    }

    pub fn var_named(
        ctx: &Arc<VariableContext>,
        name: &str,
        order: u32,
    ) -> Result<Self, SeriesError> {
        Ok(Self::var(ctx, ctx.require(name)?, order))
    }

    pub fn monomial(ctx: &Arc<VariableContext>, mono: Monomial, coeff: C, order: u32) -> Self {
        Self::from_terms(ctx, order, [(mono, coeff)])
    }

    /// Builds a series, summing repeated monomials and dropping zeros and
    /// terms above `order`.
    pub fn from_terms<I>(ctx: &Arc<VariableContext>, order: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, C)>,
    {
        let mut map: BTreeMap<Monomial, C> = BTreeMap::new();
        for (m, c) in terms {
            assert_eq!(m.arity(), ctx.arity(), "monomial arity mismatch");
            if m.degree() > order {
                continue;
            }
            accumulate(&mut map, m, &c);
        }
        map.retain(|_, c| !c.is_zero());
        TruncatedSeries {
            ctx: ctx.clone(),
            order,
            terms: map,
        }
    }

    pub fn context(&self) -> &Arc<VariableContext> {
        &self.ctx
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// No nonzero coefficient up to the guaranteed order.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mono: &Monomial) -> C {
        self.terms.get(mono).cloned().unwrap_or_else(C::zero)
    }

    pub fn coeff_of(&self, exps: &[u16]) -> C {
        self.coeff(&Monomial::from_exponents(exps))
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&Monomial::one(self.ctx.arity()))
    }

    /// Coefficient of the degree-one monomial in variable `index`.
    pub fn linear_coeff(&self, index: usize) -> C {
        self.coeff(&Monomial::var(self.ctx.arity(), index, 1))
    }

    /// First nonzero term in monomial order.
    pub fn leading_term(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next()
    }

    /// Lowest total degree of a stored term.
    pub fn valuation(&self) -> Option<u32> {
        self.leading_term().map(|(m, _)| m.degree())
    }

    pub fn homogeneous_part(&self, degree: u32) -> Self {
        TruncatedSeries {
            ctx: self.ctx.clone(),
            order: self.order,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Drops everything above `order`; never raises the guaranteed order.
    pub fn truncate(&self, order: u32) -> Self {
        let order = order.min(self.order);
        TruncatedSeries {
            ctx: self.ctx.clone(),
            order,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= order)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn depends_on(&self, index: usize) -> bool {
        self.terms.keys().any(|m| m.exponent(index) > 0)
    }

    /// `true` iff the coefficients agree in every degree `<= order`.
    pub fn equal_to_order(&self, other: &Self, order: u32) -> bool {
        self.first_difference(other, order).is_none()
    }

    /// First monomial (in monomial order, degree `<= order`) where the two
    /// series differ, with the coefficient of `self - other` there.
    pub fn first_difference(&self, other: &Self, order: u32) -> Option<(Monomial, C)> {
        let diff = self.sub_unchecked(other, order.min(self.order).min(other.order));
        diff.terms.into_iter().next()
    }

    fn check_context(&self, other: &Self) -> Result<(), SeriesError> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx == other.ctx {
            Ok(())
        } else {
            Err(SeriesError::ContextMismatch {
                left: self.ctx.to_string(),
                right: other.ctx.to_string(),
            })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_context(other)?;
        let order = self.order.min(other.order);
        let mut terms = self.truncate(order).terms;
        for (m, c) in other.terms.iter().filter(|(m, _)| m.degree() <= order) {
            accumulate(&mut terms, m.clone(), c);
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(TruncatedSeries {
            ctx: self.ctx.clone(),
            order,
            terms,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_context(other)?;
        Ok(self.sub_unchecked(other, self.order.min(other.order)))
    }

    fn sub_unchecked(&self, other: &Self, order: u32) -> Self {
        let mut terms = self.truncate(order).terms;
        for (m, c) in other.terms.iter().filter(|(m, _)| m.degree() <= order) {
            match terms.get_mut(m) {
                Some(v) => *v -= c,
                None => {
                    terms.insert(m.clone(), -c.clone());
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
        TruncatedSeries {
            ctx: self.ctx.clone(),
            order,
            terms,
        }
    }

    /// Cauchy product truncated at the smaller of the two orders.
    pub fn try_mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_context(other)?;
        let order = self.order.min(other.order);
        Ok(TruncatedSeries {
            ctx: self.ctx.clone(),
            order,
            terms: mul_terms(&self.terms, &other.terms, order),
        })
    }

    pub fn scale(&self, factor: &C) -> Self {
        if factor.is_zero() {
            return Self::zero(&self.ctx, self.order);
        }
        TruncatedSeries {
            ctx: self.ctx.clone(),
            order: self.order,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), C::product(c, factor)))
                .collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut result = Self::one(&self.ctx, self.order);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Formal partial derivative in variable `index`; the order drops by one.
    pub fn partial(&self, index: usize) -> Self {
        assert!(index < self.ctx.arity(), "variable index out of range");
        let order = self.order.saturating_sub(1);
        let terms = self
            .terms
            .iter()
            .filter_map(|(m, c)| {
                let (e, dm) = m.differentiate(index)?;
                (dm.degree() <= order).then(|| {
                    let mut c = c.clone();
                    c *= &C::from_int(i64::from(e));
                    (dm, c)
                })
            })
            .collect();
        TruncatedSeries {
            ctx: self.ctx.clone(),
            order,
            terms,
        }
    }

    pub fn partial_named(&self, name: &str) -> Result<Self, SeriesError> {
        Ok(self.partial(self.ctx.require(name)?))
    }

    /// Iterated partial derivative along `indices`.
    pub fn derivative(&self, indices: &[usize]) -> Self {
        indices.iter().fold(self.clone(), |s, &i| s.partial(i))
    }

    /// Multiplicative inverse of a series with nonzero constant term.
    pub fn invert_unit(&self) -> Result<Self, SeriesError> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(SeriesError::NotAUnit);
        }
        let inv0 = c0.inverse();
        // a = c0 (1 - u)  =>  1/a = (1/c0) Σ u^k, with u of positive valuation
        let one = Self::one(&self.ctx, self.order);
        let u = &one - &self.scale(&inv0);
        let mut acc = one.clone();
        for _ in 0..self.order {
            acc = &one + &(&u * &acc);
        }
        Ok(acc.scale(&inv0))
    }

    /// Formal composition `self(images[0], .., images[k-1])`.
    ///
    /// All images must share one target context. Every variable that `self`
    /// actually depends on must be replaced by a series with zero constant
    /// term. The guaranteed order of the result is
    /// `min(self.order, image_i.order + mindeg_i - 1)` where `mindeg_i` is the
    /// lowest degree of a term of `self` containing variable `i`.
    pub fn compose(&self, images: &[Self]) -> Result<Self, SeriesError> {
        self.compose_capped(images, u32::MAX)
    }

    /// [`compose`](Self::compose), computing nothing above degree `cap`.
    pub fn compose_capped(&self, images: &[Self], cap: u32) -> Result<Self, SeriesError> {
        let arity = self.ctx.arity();
        if images.len() != arity {
            return Err(SeriesError::ArityMismatch {
                expected: arity,
                found: images.len(),
            });
        }
        let target = match images.first() {
            Some(img) => img.ctx.clone(),
            None => {
                return Err(SeriesError::ArityMismatch {
                    expected: 1,
                    found: 0,
                })
            }
        };
        for img in images {
            if img.ctx != target {
                return Err(SeriesError::ContextMismatch {
                    left: target.to_string(),
                    right: img.ctx.to_string(),
                });
            }
        }

        let mut order = self.order.min(cap);
        for (i, img) in images.iter().enumerate() {
            let mindeg = self
                .terms
                .keys()
                .filter(|m| m.exponent(i) > 0)
                .map(Monomial::degree)
                .min();
            if let Some(mindeg) = mindeg {
                if !img.constant_term().is_zero() {
                    return Err(SeriesError::NonAdmissibleComposition(
                        self.ctx.name(i).to_string(),
                    ));
                }
                order = order.min(img.order.saturating_add(mindeg - 1));
            }
        }

        let mut terms: Vec<(&Monomial, &C)> = self
            .terms
            .iter()
            .filter(|(m, _)| m.degree() <= order)
            .collect();
        terms.sort_by(|a, b| a.0.exponents().cmp(b.0.exponents()));

        let mut powers = PowerCache::new(images, order);
        let composed = compose_rec(&terms, 0, arity, &mut powers, &target, order);
        Ok(TruncatedSeries {
            ctx: target,
            order,
            terms: composed,
        })
    }

    /// Composition by variable name: variables listed in `assignment` are
    /// replaced, every other variable maps to the same-named variable of
    /// `target`.
    pub fn substitute(
        &self,
        target: &Arc<VariableContext>,
        assignment: &[(&str, Self)],
    ) -> Result<Self, SeriesError> {
        let mut images = Vec::with_capacity(self.ctx.arity());
        for name in self.ctx.names() {
            match assignment.iter().find(|(n, _)| n == name) {
                Some((_, s)) => images.push(s.clone()),
                None => images.push(Self::var(target, target.require(name)?, self.order)),
            }
        }
        for (n, _) in assignment {
            self.ctx.require(n)?;
        }
        self.compose(&images)
    }

    pub fn conj_coefficients(&self) -> Self {
        TruncatedSeries {
            ctx: self.ctx.clone(),
            order: self.order,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.conj()))
                .collect(),
        }
    }

    /// The same coefficients under new variable names.
    pub fn relabel(&self, ctx: &Arc<VariableContext>) -> Result<Self, SeriesError> {
        if ctx.arity() != self.ctx.arity() {
            return Err(SeriesError::ArityMismatch {
                expected: self.ctx.arity(),
                found: ctx.arity(),
            });
        }
        Ok(TruncatedSeries {
            ctx: ctx.clone(),
            order: self.order,
            terms: self.terms.clone(),
        })
    }

    /// Moves variable `i` to position `positions[i]` of `target`.
    pub fn relocate(&self, target: &Arc<VariableContext>, positions: &[usize]) -> Self {
        assert_eq!(positions.len(), self.ctx.arity());
        let arity = target.arity();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.relocate(arity, positions), c.clone()));
        Self::from_terms(target, self.order, terms)
    }

    pub fn with_order_lowered(self, order: u32) -> Self {
        if order >= self.order {
            self
        } else {
            self.truncate(order)
        }
    }
}

fn accumulate<C: Coefficient>(map: &mut BTreeMap<Monomial, C>, m: Monomial, c: &C) {
    match map.get_mut(&m) {
        Some(v) => *v += c,
        None => {
            map.insert(m, c.clone());
        }
    }
}

/// Truncated product of two term maps, ignoring the operands' orders.
fn mul_terms<C: Coefficient>(
    a: &BTreeMap<Monomial, C>,
    b: &BTreeMap<Monomial, C>,
    cap: u32,
) -> BTreeMap<Monomial, C> {
    let mut out: BTreeMap<Monomial, C> = BTreeMap::new();
    for (ma, ca) in a {
        if ma.degree() > cap {
            break;
        }
        let room = cap - ma.degree();
        for (mb, cb) in b {
            if mb.degree() > room {
                break;
            }
            accumulate(&mut out, ma.mul(mb), &C::product(ca, cb));
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

struct PowerCache<'a, C> {
    images: &'a [TruncatedSeries<C>],
    cap: u32,
    cache: Vec<Vec<BTreeMap<Monomial, C>>>,
}

impl<'a, C: Coefficient> PowerCache<'a, C> {
    fn new(images: &'a [TruncatedSeries<C>], cap: u32) -> Self {
        PowerCache {
            images,
            cap,
            cache: vec![Vec::new(); images.len()],
        }
    }

    fn get(&mut self, var: usize, exp: u16) -> &BTreeMap<Monomial, C> {
        let cap = self.cap;
        let img = &self.images[var];
        let powers = &mut self.cache[var];
        if powers.is_empty() {
            let mut one = BTreeMap::new();
            one.insert(Monomial::one(img.ctx.arity()), C::one());
            powers.push(one);
        }
        while powers.len() <= usize::from(exp) {
            let next = mul_terms(powers.last().unwrap(), &img.terms, cap);
            powers.push(next);
        }
        &powers[usize::from(exp)]
    }
}

/// Horner-style evaluation: terms sorted lexicographically by exponents,
/// grouped on the exponent of `var`.
fn compose_rec<C: Coefficient>(
    terms: &[(&Monomial, &C)],
    var: usize,
    arity: usize,
    powers: &mut PowerCache<'_, C>,
    target: &Arc<VariableContext>,
    cap: u32,
) -> BTreeMap<Monomial, C> {
    let mut out = BTreeMap::new();
    if terms.is_empty() {
        return out;
    }
    if var == arity {
        let mut c = C::zero();
        for (_, t) in terms {
            c += t;
        }
        if !c.is_zero() {
            out.insert(Monomial::one(target.arity()), c);
        }
        return out;
    }
    let mut start = 0;
    while start < terms.len() {
        let e = terms[start].0.exponent(var);
        let mut end = start;
        while end < terms.len() && terms[end].0.exponent(var) == e {
            end += 1;
        }
        let inner = compose_rec(&terms[start..end], var + 1, arity, powers, target, cap);
        if e == 0 {
            for (m, c) in &inner {
                accumulate(&mut out, m.clone(), c);
            }
        } else if !inner.is_empty() {
            let p = powers.get(var, e);
            for (m, c) in mul_terms(p, &inner, cap) {
                accumulate(&mut out, m, &c);
            }
        }
        start = end;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

macro_rules! binop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl<'a, C: Coefficient> $tr<&'a TruncatedSeries<C>> for &'a TruncatedSeries<C> {
            type Output = TruncatedSeries<C>;
            fn $m(self, rhs: &TruncatedSeries<C>) -> TruncatedSeries<C> {
                match self.$try(rhs) {
                    Ok(s) => s,
                    Err(e) => panic!("{e}"),
                }
            }
        }

        impl<C: Coefficient> $tr for TruncatedSeries<C> {
            type Output = TruncatedSeries<C>;
            fn $m(self, rhs: TruncatedSeries<C>) -> TruncatedSeries<C> {
                (&self).$m(&rhs)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl<C: Coefficient> Neg for &TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;
    fn neg(self) -> TruncatedSeries<C> {
        self.scale(&-C::one())
    }
}

impl<C: Coefficient> Neg for TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;
    fn neg(self) -> TruncatedSeries<C> {
        -&self
    }
}

impl<C: Coefficient> fmt::Display for TruncatedSeries<C> {
    /// Prints the stored polynomial in the expression grammar.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let term = format_term(m, c, &self.ctx);
            match (idx, term.strip_prefix('-')) {
                (0, _) => write!(f, "{term}")?,
                (_, Some(rest)) => write!(f, " - {rest}")?,
                (_, None) => write!(f, " + {term}")?,
            }
        }
        Ok(())
    }
}

fn format_term<C: Coefficient>(m: &Monomial, c: &C, ctx: &VariableContext) -> String {
    let mono = m.display(ctx).to_string();
    let coeff = c.to_string();
    let compound = coeff.len() > 1 && coeff[1..].contains(['+', '-']);
    if m.degree() == 0 {
        return if compound {
            format!("({coeff})")
        } else {
            coeff
        };
    }
    if c.is_one() {
        mono
    } else if (-c.clone()).is_one() {
        format!("-{mono}")
    } else if compound {
        format!("({coeff})*{mono}")
    } else {
        format!("{coeff}*{mono}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational as G;

    fn ctx2() -> Arc<VariableContext> {
        VariableContext::theta(2)
    }

    fn z(ctx: &Arc<VariableContext>, name: &str, order: u32) -> TruncatedSeries<G> {
        TruncatedSeries::var_named(ctx, name, order).unwrap()
    }

    fn c(ctx: &Arc<VariableContext>, v: i64, order: u32) -> TruncatedSeries<G> {
        TruncatedSeries::constant(ctx, G::from(v), order)
    }

    #[test]
    fn additive_inverse_and_constants() {
        let ctx = ctx2();
        let z1 = z(&ctx, "z1", 4);
        assert!((&z1 + &(-&z1)).is_zero());
        let s = &(&c(&ctx, 1, 4) + &z1) + &(&c(&ctx, 1, 4) - &z1);
        assert_eq!(s, c(&ctx, 2, 4));
    }

    #[test]
    fn heisenberg_plus_conjugate_flip_at_z1z1b() {
        let ctx = ctx2();
        let theta = &(&(&z(&ctx, "z1", 4) * &z(&ctx, "z1b", 4))
            + &(&z(&ctx, "z2", 4) * &z(&ctx, "z2b", 4)))
            - &z(&ctx, "wb", 4);
        // swap z <-> zb; the Heisenberg terms are symmetric under it
        let flipped = theta.relocate(&ctx, &[2, 3, 0, 1, 4]);
        let sum = &theta + &flipped;
        assert_eq!(sum.coeff_of(&[1, 0, 1, 0, 0]), G::from(2));
        assert_eq!(sum.coeff_of(&[0, 0, 0, 0, 1]), G::from(-2));
    }

    #[test]
    fn products_and_truncation() {
        let ctx = ctx2();
        let z1 = z(&ctx, "z1", 4);
        let p = &(&c(&ctx, 1, 4) + &z1) * &(&c(&ctx, 1, 4) - &z1);
        assert_eq!(p, &c(&ctx, 1, 4) - &(&z1 * &z1));

        let low = &z(&ctx, "z1", 1) * &z(&ctx, "z1b", 1);
        assert!(low.is_zero());
        assert_eq!(low.order(), 1);
    }

    #[test]
    fn square_of_levi_sum() {
        let ctx = ctx2();
        let o = 6;
        let q =
            &(&z(&ctx, "z1", o) * &z(&ctx, "z1b", o)) + &(&z(&ctx, "z2", o) * &z(&ctx, "z2b", o));
        let sq = &q * &q;
        assert_eq!(sq.len(), 3);
        assert_eq!(sq.coeff_of(&[2, 0, 2, 0, 0]), G::from(1));
        assert_eq!(sq.coeff_of(&[1, 1, 1, 1, 0]), G::from(2));
        assert_eq!(sq.coeff_of(&[0, 2, 0, 2, 0]), G::from(1));
    }

    #[test]
    fn partials() {
        let ctx = ctx2();
        let o = 5;
        let s = &(&z(&ctx, "z1", o) * &z(&ctx, "z1", o)) * &z(&ctx, "z1b", o);
        let d = s.partial_named("z1").unwrap();
        assert_eq!(
            d,
            (&z(&ctx, "z1", o) * &z(&ctx, "z1b", o))
                .scale(&G::from(2))
                .truncate(4)
        );
        assert_eq!(d.order(), 4);

        let theta = &(&(&z(&ctx, "z1", o) * &z(&ctx, "z1b", o))
            + &(&z(&ctx, "z2", o) * &z(&ctx, "z2b", o)))
            - &z(&ctx, "wb", o);
        assert_eq!(
            theta.partial_named("wb").unwrap().constant_term(),
            G::from(-1)
        );
        assert_eq!(theta.partial(0).partial(2), c(&ctx, 1, 3));
        assert!(theta.partial_named("q").is_err());
    }

    #[test]
    fn geometric_substitution() {
        let u_ctx = VariableContext::new(["u"]).unwrap();
        let ctx = ctx2();
        let geo = (&c(&u_ctx, 1, 2) - &z(&u_ctx, "u", 2))
            .invert_unit()
            .unwrap();
        let sum = &z(&ctx, "z1", 2) + &z(&ctx, "z2", 2);
        let out = geo.compose(std::slice::from_ref(&sum)).unwrap();
        let expected = &(&c(&ctx, 1, 2) + &sum) + &(&sum * &sum);
        assert_eq!(out, expected);
    }

    #[test]
    fn identity_substitution() {
        let ctx = ctx2();
        let s = &(&z(&ctx, "z1", 5) * &z(&ctx, "wb", 5)) + &c(&ctx, 3, 5);
        assert_eq!(s.substitute(&ctx, &[]).unwrap(), s);
    }

    #[test]
    fn composition_rejects_constant_images() {
        let ctx = ctx2();
        let s = z(&ctx, "z1", 3);
        let mut images: Vec<_> = (0..5).map(|i| TruncatedSeries::var(&ctx, i, 3)).collect();
        images[0] = &images[0] + &c(&ctx, 1, 3);
        assert!(matches!(
            s.compose(&images),
            Err(SeriesError::NonAdmissibleComposition(_))
        ));
        // images of unused variables may be anything
        images.swap(0, 1);
        images[0] = TruncatedSeries::var(&ctx, 0, 3);
        assert!(s.compose(&images).is_ok());
    }

    #[test]
    fn composition_order_uses_min_degree() {
        let ctx = VariableContext::new(["u", "v"]).unwrap();
        // u^2 at order 6, u := v + O(4): exact up to degree 5
        let s = z(&ctx, "u", 6).pow(2);
        let img = z(&ctx, "v", 4);
        let out = s.compose(&[img.clone(), img]).unwrap();
        assert_eq!(out.order(), 5);
    }

    #[test]
    fn inversion() {
        let ctx = ctx2();
        let inv = (&c(&ctx, 1, 3) - &z(&ctx, "z1", 3)).invert_unit().unwrap();
        let z1 = z(&ctx, "z1", 3);
        let expected = &(&(&c(&ctx, 1, 3) + &z1) + &z1.pow(2)) + &z1.pow(3);
        assert_eq!(inv, expected);

        let half = c(&ctx, 2, 3).invert_unit().unwrap();
        assert_eq!(half.constant_term(), G::from_parts((1, 2), (0, 1)));

        let m = &(&z(&ctx, "z1", 4) * &z(&ctx, "z1b", 4)) - &c(&ctx, 1, 4);
        let inv = m.invert_unit().unwrap();
        let zz = &z(&ctx, "z1", 4) * &z(&ctx, "z1b", 4);
        assert_eq!(inv, -&(&(&c(&ctx, 1, 4) + &zz) + &(&zz * &zz)));

        assert!(matches!(
            z(&ctx, "z1", 3).invert_unit(),
            Err(SeriesError::NotAUnit)
        ));
    }

    #[test]
    fn display_reparses_visually() {
        let ctx = ctx2();
        let s = &(&(&z(&ctx, "z1", 4) * &z(&ctx, "z1b", 4)) - &z(&ctx, "wb", 4))
            + &z(&ctx, "z2", 4)
                .pow(2)
                .scale(&G::from_parts((3, 2), (-1, 2)));
        assert_eq!(s.to_string(), "-wb + (3/2-1/2*i)*z2^2 + z1*z1b");
    }

    #[test]
    #[should_panic]
    fn mixing_contexts_panics() {
        let a = z(&ctx2(), "z1", 2);
        let b = z(&VariableContext::jet(2), "y", 2);
        let _ = &a + &b;
    }
}
