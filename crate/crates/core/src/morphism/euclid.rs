use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Result, TwistorError};
use crate::jet::{ComplexMap, DiffOp, Jet, SmoothMap};
use crate::linalg::min_singular_value;
use crate::scalar::Real;
use crate::twistor::mu_len;

/// Twistor data on `ℂⁿ × ℂᵖ`: the projection `h` and the fibre coordinate
/// `μ`, both given on the complex coordinates `(z, ξ)` (z first).
#[derive(Clone)]
pub struct EuclideanTwistorData<S: Real> {
    pub n: usize,
    pub p: usize,
    /// `(z, ξ) ↦ q ∈ ℂ^{n+p}`.
    pub h: Arc<ComplexMap<S>>,
    /// `(z, ξ) ↦ μ ∈ ℂ^{k(k-1)/2}`, `k = n + p`.
    pub mu: Arc<ComplexMap<S>>,
    /// Real coordinates of a point where `h` is a local diffeomorphism;
    /// Newton continuation starts there.
    pub seed: Vec<S>,
}

impl<S: Real> fmt::Debug for EuclideanTwistorData<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EuclideanTwistorData")
            .field("n", &self.n)
            .field("p", &self.p)
            .field("seed", &self.seed)
            .finish()
    }
}

impl<S: Real> EuclideanTwistorData<S> {
    pub fn new(n: usize, p: usize, h: ComplexMap<S>, mu: ComplexMap<S>) -> Result<Self> {
        let k = n + p;
        if n == 0 || h.domain_dim() != 2 * k || h.codomain_dim() != 2 * k {
            return Err(TwistorError::DimensionMismatch(format!(
                "h must map ℂ^{k} to ℂ^{k}"
            )));
        }
        if mu.domain_dim() != 2 * k || mu.codomain_dim() != 2 * mu_len(k) {
            return Err(TwistorError::DimensionMismatch(format!(
                "μ must map ℂ^{k} to ℂ^{}",
                mu_len(k)
            )));
        }
        Ok(EuclideanTwistorData {
            n,
            p,
            h: Arc::new(h),
            mu: Arc::new(mu),
            seed: vec![S::zero(); 2 * k],
        })
    }

    pub fn with_seed(mut self, seed: Vec<S>) -> Self {
        self.seed = seed;
        self
    }

    pub fn k(&self) -> usize {
        self.n + self.p
    }

    /// Chart image `w = q − M(μ) q̄` as complex jets at `pt`.
    pub fn chart_jets(&self, pt: &[S], order: usize) -> Result<Vec<Jet<Complex<S>>>> {
        let x = Jet::variables(pt, order);
        let q = self.h.eval_complex(&x)?;
        let mu = self.mu.eval_complex(&x)?;
        let k = self.k();
        let mut it = mu.iter();
        let mut m = vec![vec![None; k]; k];
        for i in 0..k {
            for j in i + 1..k {
                let v = it.next().expect("μ length checked").clone();
                m[j][i] = Some(-&v);
                m[i][j] = Some(v);
            }
        }
        Ok((0..k)
            .map(|i| {
                let mut w = q[i].clone();
                for j in 0..k {
                    if let Some(mij) = &m[i][j] {
                        w = &w - &(mij * &q[j].conj());
                    }
                }
                w
            })
            .collect())
    }
}

fn wirtinger_norm<S: Real>(fs: &[Jet<Complex<S>>], ops: &[DiffOp<S>]) -> Result<S> {
    let mut acc = S::zero();
    for f in fs {
        for op in ops {
            acc += op.apply(f)?.norm_sqr();
        }
    }
    Ok(acc.sqrt())
}

/// `max ‖∂μ/∂ξ‖` over `samples`, with both `∂_ξ` and `∂_ξ̄` of every component.
pub fn verify_horizontality<S: Real>(data: &EuclideanTwistorData<S>, samples: &[Vec<S>]) -> Result<S> {
    let nv = 2 * data.k();
    let ops: Vec<DiffOp<S>> = (data.n..data.k())
        .flat_map(|j| [DiffOp::dz_coord(nv, j), DiffOp::dzbar_coord(nv, j)])
        .collect();
    let mut worst = S::zero();
    for pt in samples {
        let mu = data.mu.eval_complex(&Jet::variables(pt, 1))?;
        worst = worst.max(wirtinger_norm(&mu, &ops)?);
    }
    Ok(worst)
}

/// `max(‖∂̄w‖, ‖∂̄_z μ‖)` over `samples`, `w` the chart image of `h`.
pub fn verify_chart_holomorphy<S: Real>(data: &EuclideanTwistorData<S>, samples: &[Vec<S>]) -> Result<S> {
    let k = data.k();
    let nv = 2 * k;
    let all: Vec<DiffOp<S>> = (0..k).map(|j| DiffOp::dzbar_coord(nv, j)).collect();
    let base: Vec<DiffOp<S>> = (0..data.n).map(|j| DiffOp::dzbar_coord(nv, j)).collect();
    let mut worst = S::zero();
    for pt in samples {
        let w = data.chart_jets(pt, 1)?;
        let mu = data.mu.eval_complex(&Jet::variables(pt, 1))?;
        worst = worst.max(wirtinger_norm(&w, &all)?).max(wirtinger_norm(&mu, &base)?);
    }
    Ok(worst)
}

/// Smallest singular value of the real Jacobian of `h` at `pt`.
pub fn jacobian_min_sv<S: Real>(h: &dyn SmoothMap<S>, pt: &[S]) -> Result<S> {
    Ok(min_singular_value(&h.jet_at(pt, 1)?.jacobian()?))
}
