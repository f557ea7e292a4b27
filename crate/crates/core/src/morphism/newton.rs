use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use super::EuclideanTwistorData;
use crate::error::{Result, TwistorError};
use crate::jet::{Jet, SmoothMap};
use crate::linalg::singular_values;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions<S> {
    pub max_iterations: usize,
    /// Target on the Euclidean norm of `h(x) − q`.
    pub tol: S,
    /// Continuation steps used by [`evaluate_morphism`] when a direct solve fails.
    pub continuation_steps: usize,
}

impl<S: Real> Default for NewtonOptions<S> {
    fn default() -> Self {
        NewtonOptions {
            max_iterations: 50,
            tol: S::lit(1e-12).max(S::default_epsilon() * S::lit(64.0)),
            continuation_steps: 16,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NewtonReport<S> {
    pub point: Vec<S>,
    pub iterations: usize,
    pub residual: S,
    /// Residual norm before each step.
    pub history: Vec<S>,
}

fn residual<S: Real>(h: &dyn SmoothMap<S>, x: &DVector<S>, target: &DVector<S>) -> Result<DVector<S>> {
    Ok(DVector::from_vec(h.value_at(x.as_slice())?) - target)
}

/// Damped Newton iteration for `h(x) = target` from `seed`.
pub fn invert_h<S: Real>(
    h: &dyn SmoothMap<S>,
    target: &[S],
    seed: &[S],
    opts: &NewtonOptions<S>,
) -> Result<NewtonReport<S>> {
    if target.len() != h.codomain_dim() || seed.len() != h.domain_dim() {
        return Err(TwistorError::DimensionMismatch("target or seed has the wrong length".into()));
    }
    let target = DVector::from_column_slice(target);
    let mut x = DVector::from_column_slice(seed);
    let mut r = residual(h, &x, &target)?;
    let mut history = Vec::new();
    for it in 0..=opts.max_iterations {
        let norm = r.norm();
        history.push(norm);
        log::debug!("newton iteration {it}: residual {}", norm.to_f64_lossy());
        if norm <= opts.tol {
            // one polishing step, kept only if it helps
            let (mut x, mut norm, mut iterations) = (x, norm, it);
            if norm > S::zero() {
                let jac = h.jet_at(x.as_slice(), 1)?.jacobian()?;
                if let Some(step) = jac.lu().solve(&r) {
                    let trial = &x - step;
                    let rt = residual(h, &trial, &target)?.norm();
                    if rt < norm {
                        x = trial;
                        norm = rt;
                        iterations += 1;
                        history.push(rt);
                    }
                }
            }
            return Ok(NewtonReport {
                point: x.as_slice().to_vec(),
                iterations,
                residual: norm,
                history,
            });
        }
        if it == opts.max_iterations {
            break;
        }
        let jac = h.jet_at(x.as_slice(), 1)?.jacobian()?;
        let sv = singular_values(&jac);
        let (top, bottom) = (sv[0], *sv.last().expect("square Jacobian"));
        if bottom <= S::lit(1e-14) * S::one().max(top) {
            return Err(TwistorError::SingularJacobian(bottom.to_f64_lossy()));
        }
        let step = jac
            .lu()
            .solve(&r)
            .ok_or_else(|| TwistorError::SingularJacobian(bottom.to_f64_lossy()))?;
        let mut t = S::one();
        loop {
            let trial = &x - &step * t;
            let rt = residual(h, &trial, &target)?;
            if rt.norm() < norm || t < S::lit(1e-4) {
                x = trial;
                r = rt;
                break;
            }
            t *= S::lit(0.5);
        }
    }
    Err(TwistorError::MaxIterations {
        iterations: opts.max_iterations,
        residual: r.norm().to_f64_lossy(),
    })
}

/// Newton from `seed`, falling back to continuation along the segment from
/// `h(seed)` to `target`.
fn solve<S: Real>(
    h: &dyn SmoothMap<S>,
    target: &[S],
    seed: &[S],
    opts: &NewtonOptions<S>,
) -> Result<NewtonReport<S>> {
    match invert_h(h, target, seed, opts) {
        Ok(rep) => Ok(rep),
        Err(TwistorError::MaxIterations { .. }) | Err(TwistorError::SingularJacobian(_)) => {
            let start = h.value_at(seed)?;
            let steps = opts.continuation_steps.max(1);
            let mut x = seed.to_vec();
            let mut last = None;
            for s in 1..=steps {
                let t = S::lit(s as f64 / steps as f64);
                let q: Vec<S> = start.iter().zip(target).map(|(&a, &b)| a + (b - a) * t).collect();
                let rep = invert_h(h, &q, &x, opts)?;
                x = rep.point.clone();
                last = Some(rep);
            }
            Ok(last.expect("at least one step"))
        }
        Err(e) => Err(e),
    }
}

/// `π₁ ∘ h⁻¹(q)` for `q` in real coordinates; returns the `n` complex `z`.
pub fn evaluate_morphism<S: Real>(
    data: &EuclideanTwistorData<S>,
    q: &[S],
    opts: &NewtonOptions<S>,
) -> Result<Vec<Complex<S>>> {
    let rep = solve(data.h.as_ref(), q, &data.seed, opts)?;
    Ok((0..data.n).map(|j| Complex::new(rep.point[2 * j], rep.point[2 * j + 1])).collect())
}

/// `φ = π₁ ∘ h⁻¹` as a smooth map. Jets come from the implicit function
/// theorem: with `X₀ = h⁻¹(q₀)` and `A = dh(X₀)⁻¹`, the iteration
/// `δ ← δ − A(h(X₀ + δ) − q)` on nilpotent jets gains one order per step.
#[derive(Debug, Clone)]
pub struct MorphismMap<S: Real> {
    pub data: EuclideanTwistorData<S>,
    pub opts: NewtonOptions<S>,
}

impl<S: Real> MorphismMap<S> {
    pub fn new(data: EuclideanTwistorData<S>) -> Self {
        MorphismMap {
            data,
            opts: NewtonOptions::default(),
        }
    }

    /// Jets of `h⁻¹` (all `2(n+p)` real components) pushed through `q`.
    pub fn inverse_jets(&self, q: &[Jet<S>]) -> Result<Vec<Jet<S>>> {
        let h = self.data.h.as_ref();
        let q0: Vec<S> = q.iter().map(|j| j.value()).collect();
        let rep = solve(h, &q0, &self.data.seed, &self.opts)?;
        let (nvars, order) = (q[0].nvars(), q[0].order());
        let jac = h.jet_at(&rep.point, 1)?.jacobian()?;
        let sv = singular_values(&jac);
        let a = jac
            .try_inverse()
            .ok_or_else(|| TwistorError::SingularJacobian(sv.last().map_or(0.0, |s| s.to_f64_lossy())))?;
        let dim = q.len();
        let mut x: Vec<Jet<S>> = rep.point.iter().map(|&v| Jet::constant(v, nvars, order)).collect();
        for _ in 0..order {
            let r: Vec<Jet<S>> = h.eval(&x)?.iter().zip(q).map(|(hx, qi)| hx - qi).collect();
            x = (0..dim)
                .map(|i| {
                    let mut xi = x[i].clone();
                    for (j, rj) in r.iter().enumerate() {
                        xi = &xi - &rj.scale(a[(i, j)]);
                    }
                    xi
                })
                .collect();
        }
        Ok(x)
    }

    pub fn jacobian_of_h(&self, x: &[S]) -> Result<DMatrix<S>> {
        self.data.h.jet_at(x, 1)?.jacobian()
    }
}

impl<S: Real> SmoothMap<S> for MorphismMap<S> {
    fn domain_dim(&self) -> usize {
        2 * self.data.k()
    }
    fn codomain_dim(&self) -> usize {
        2 * self.data.n
    }
    fn eval(&self, x: &[Jet<S>]) -> Result<Vec<Jet<S>>> {
        if x.len() != self.domain_dim() {
            return Err(TwistorError::DimensionMismatch(format!(
                "{} inputs for a map from ℝ^{}",
                x.len(),
                self.domain_dim()
            )));
        }
        let mut inv = self.inverse_jets(x)?;
        inv.truncate(2 * self.data.n);
        Ok(inv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::ComplexMap;
    use crate::twistor::mu_len;

    fn identity_data() -> EuclideanTwistorData<f64> {
        let h = ComplexMap::new(2, 2, |a| Ok(a.z.clone()));
        let mu = ComplexMap::new(2, mu_len(2), |a| Ok(vec![a.constant(Complex::new(0.0, 0.0))]));
        EuclideanTwistorData::new(1, 1, h, mu).unwrap()
    }

    #[test]
    fn identity_inverse() {
        let d = identity_data();
        let q = [0.3, -1.0, 2.0, 0.5];
        let rep = invert_h(d.h.as_ref(), &q, &[0.0; 4], &NewtonOptions::default()).unwrap();
        assert_eq!(rep.point, q.to_vec());
        let z = evaluate_morphism(&d, &q, &NewtonOptions::default()).unwrap();
        assert_eq!(z, vec![Complex::new(0.3, -1.0)]);
    }

    #[test]
    fn cubic_inverse_jets() {
        // h(z) = z + z³ near 0, inverse series z = q − q³ + 3q⁵ …
        let h = ComplexMap::<f64>::new(1, 1, |a| Ok(vec![&a.z[0] + &a.z[0].powi(3)]));
        let mu = ComplexMap::<f64>::new(1, 0, |_| Ok(vec![]));
        let d = EuclideanTwistorData::new(1, 0, h, mu).unwrap();
        let m = MorphismMap::new(d);
        let jet = m.jet_at(&[0.0, 0.0], 5).unwrap();
        assert!((jet.comps[0].coeff(&[1, 0]) - 1.0).abs() < 1e-14);
        assert!((jet.comps[0].coeff(&[3, 0]) + 1.0).abs() < 1e-13);
        assert!((jet.comps[0].coeff(&[5, 0]) - 3.0).abs() < 1e-12);
        let dz3 = jet.dz_power(3, 0).unwrap();
        // ∂_q³ (q − q³) = −6 in the real part, real view of a holomorphic function
        assert!((dz3[0] - Complex::new(-3.0, 0.0)).norm() < 1e-11);
    }

    #[test]
    fn errors_are_distinct() {
        let sq = ComplexMap::<f64>::new(1, 1, |a| Ok(vec![a.z[0].powi(2)]));
        assert!(matches!(
            invert_h(&sq, &[1.0, 0.0], &[0.0, 0.0], &NewtonOptions::default()),
            Err(TwistorError::SingularJacobian(_))
        ));
        // exp never vanishes
        let ex = ComplexMap::<f64>::new(1, 1, |a| Ok(vec![a.z[0].exp()]));
        let opts = NewtonOptions {
            max_iterations: 5,
            ..NewtonOptions::default()
        };
        assert!(matches!(
            invert_h(&ex, &[0.0, 0.0], &[0.0, 0.0], &opts),
            Err(TwistorError::MaxIterations { .. })
        ));
    }
}
