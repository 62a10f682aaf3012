use super::{linalg, SeriesError, TruncatedSeries};
use crate::scalar::Coefficient;

/// Solves `G(p, u) = rhs` for the unknowns `u` as series in the context of
/// `rhs`, degree by degree.
///
/// * `equations`: `G_0..G_k`, all in one context `S`;
/// * `unknowns`: the positions in `S` of `u_0..u_k`;
/// * `param_images`: `(position in S, image)` for every other variable of `S`;
/// * `rhs`: right-hand sides, all in the output context.
///
/// Each step adds `J⁻¹ r_d` to `u`, where `J = ∂G/∂u(0)` and `r_d` is the
/// degree-`d` part of the residual `rhs − G(p, u)`. The result is unique and
/// exact to `min` of the input orders.
pub fn solve_implicit<C: Coefficient>(
    equations: &[TruncatedSeries<C>],
    unknowns: &[usize],
    param_images: &[(usize, TruncatedSeries<C>)],
    rhs: &[TruncatedSeries<C>],
) -> Result<Vec<TruncatedSeries<C>>, SeriesError> {
    let k = equations.len();
    if k == 0 || unknowns.len() != k || rhs.len() != k {
        return Err(SeriesError::ArityMismatch {
            expected: k,
            found: unknowns.len().min(rhs.len()),
        });
    }
    let system_ctx = equations[0].context().clone();
    let out_ctx = rhs[0].context().clone();
    for g in equations {
        if **g.context() != *system_ctx {
            return Err(SeriesError::ContextMismatch {
                left: system_ctx.to_string(),
                right: g.context().to_string(),
            });
        }
    }
    let arity = system_ctx.arity();
    let mut slots: Vec<Option<Slot>> = vec![None; arity];
    for (j, &u) in unknowns.iter().enumerate() {
        if u >= arity || slots[u].is_some() {
            return Err(SeriesError::DimensionMismatch(format!(
                "unknown position {u}"
            )));
        }
        slots[u] = Some(Slot::Unknown(j));
    }
    for (idx, (p, img)) in param_images.iter().enumerate() {
        if *p >= arity || slots[*p].is_some() {
            return Err(SeriesError::DimensionMismatch(format!(
                "parameter position {p}"
            )));
        }
        if **img.context() != *out_ctx {
            return Err(SeriesError::ContextMismatch {
                left: out_ctx.to_string(),
                right: img.context().to_string(),
            });
        }
        slots[*p] = Some(Slot::Param(idx));
    }
    if let Some(free) = slots.iter().position(Option::is_none) {
        return Err(SeriesError::UnknownVariable(format!(
            "no image for `{}`",
            system_ctx.name(free)
        )));
    }
    if equations.iter().any(|g| !g.constant_term().is_zero())
        || rhs.iter().any(|r| !r.constant_term().is_zero())
    {
        return Err(SeriesError::NotCentered);
    }

    let jacobian: Vec<Vec<C>> = equations
        .iter()
        .map(|g| unknowns.iter().map(|&u| g.linear_coeff(u)).collect())
        .collect();
    let jinv = linalg::invert(&jacobian).ok_or(SeriesError::SingularJacobian)?;

    let order = equations
        .iter()
        .chain(rhs)
        .chain(param_images.iter().map(|(_, s)| s))
        .map(TruncatedSeries::order)
        .min()
        .unwrap_or(0);

    let mut solution: Vec<TruncatedSeries<C>> = (0..k)
        .map(|_| TruncatedSeries::zero(&out_ctx, order))
        .collect();
    for degree in 1..=order {
        let images: Vec<TruncatedSeries<C>> = slots
            .iter()
            .map(|s| match s.expect("all slots filled") {
                Slot::Unknown(j) => solution[j].clone(),
                Slot::Param(i) => param_images[i].1.clone(),
            })
            .collect();
        let mut residuals = Vec::with_capacity(k);
        for (g, r) in equations.iter().zip(rhs) {
            let value = g.compose_capped(&images, degree)?;
            let res = r.truncate(degree).try_sub(&value)?;
            residuals.push(res.homogeneous_part(degree));
        }
        for (j, row) in jinv.iter().enumerate() {
            let mut terms = Vec::new();
            for (coef, r) in row.iter().zip(&residuals) {
                if coef.is_zero() {
                    continue;
                }
                terms.extend(r.terms().map(|(m, c)| (m.clone(), C::product(c, coef))));
            }
            let delta = TruncatedSeries::from_terms(&out_ctx, order, terms);
            solution[j] = &solution[j] + &delta;
        }
    }
    Ok(solution)
}

#[derive(Clone, Copy)]
enum Slot {
    Unknown(usize),
    Param(usize),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational as G;
    use crate::series::VariableContext;

    type S = TruncatedSeries<G>;

    /// Theta context, solving `w = Θ`, `w_{z_k} = Θ_{z_k}` for `(zb, wb)`.
    fn solve_segre(theta: &S, n: usize) -> Vec<S> {
        let jet = VariableContext::jet(n);
        let o = theta.order();
        let mut eqs = vec![theta.clone()];
        eqs.extend((0..n).map(|k| theta.partial(k)));
        let unknowns: Vec<usize> = (n..=2 * n).collect();
        let params: Vec<(usize, S)> = (0..n).map(|k| (k, S::var(&jet, k, o))).collect();
        let rhs: Vec<S> = (n..=2 * n).map(|i| S::var(&jet, i, o)).collect();
        solve_implicit(&eqs, &unknowns, &params, &rhs).unwrap()
    }

    #[test]
    fn linear_model() {
        let ctx = VariableContext::theta(2);
        let o = 5;
        let theta = &(&S::var(&ctx, 0, o) * &S::var(&ctx, 2, o))
            + &(&(&S::var(&ctx, 1, o) * &S::var(&ctx, 3, o)) - &S::var(&ctx, 4, o));
        let flat = -&S::var(&ctx, 4, o);
        let jet = VariableContext::jet(2);
        // for the linear model only wb is determined by w; zb by w_z
        let eqs = vec![flat.clone(), S::var(&ctx, 2, o), S::var(&ctx, 3, o)];
        let sol = solve_implicit(
            &eqs,
            &[4, 2, 3],
            &[(0, S::var(&jet, 0, o)), (1, S::var(&jet, 1, o))],
            &[S::var(&jet, 2, o), S::var(&jet, 3, o), S::var(&jet, 4, o)],
        )
        .unwrap();
        assert_eq!(sol[0], -&S::var(&jet, 2, o));
        assert_eq!(sol[1], S::var(&jet, 3, o));

        let sol = solve_segre(&theta, 2);
        let (x1, x2, y, p1, p2) = (
            S::var(&jet, 0, o),
            S::var(&jet, 1, o),
            S::var(&jet, 2, o),
            S::var(&jet, 3, o),
            S::var(&jet, 4, o),
        );
        assert_eq!(sol[0], p1.truncate(4));
        assert_eq!(sol[1], p2.truncate(4));
        let expected_wb = &(&-&y + &(&x1 * &p1)) + &(&x2 * &p2);
        assert_eq!(sol[2], expected_wb.truncate(4));
    }

    #[test]
    fn singular_and_uncentered() {
        let ctx = VariableContext::new(["p", "u"]).unwrap();
        let out = VariableContext::new(["p", "t"]).unwrap();
        let p = S::var(&ctx, 0, 3);
        let u = S::var(&ctx, 1, 3);
        let eq = &u * &u;
        let r = solve_implicit(
            &[eq],
            &[1],
            &[(0, S::var(&out, 0, 3))],
            &[S::var(&out, 1, 3)],
        );
        assert_eq!(r, Err(SeriesError::SingularJacobian));
        let eq = &(&u + &p) + &S::one(&ctx, 3);
        let r = solve_implicit(
            &[eq],
            &[1],
            &[(0, S::var(&out, 0, 3))],
            &[S::var(&out, 1, 3)],
        );
        assert_eq!(r, Err(SeriesError::NotCentered));
    }

    #[test]
    fn nonlinear_roundtrip() {
        // u + p u + u^2 = t
        let ctx = VariableContext::new(["p", "u"]).unwrap();
        let out = VariableContext::new(["p", "t"]).unwrap();
        let o = 7;
        let p = S::var(&ctx, 0, o);
        let u = S::var(&ctx, 1, o);
        let eq = &(&u + &(&p * &u)) + &(&u * &u);
        let sol = solve_implicit(
            std::slice::from_ref(&eq),
            &[1],
            &[(0, S::var(&out, 0, o))],
            &[S::var(&out, 1, o)],
        )
        .unwrap();
        let back = eq.compose(&[S::var(&out, 0, o), sol[0].clone()]).unwrap();
        assert_eq!(back, S::var(&out, 1, o));
    }
}
