//! Index bookkeeping for dense truncated multivariate Taylor expansions.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Multi-index layout of all monomials of total degree `<= order` in `nvars`
/// variables, graded by degree, with a precomputed product table.
#[derive(Debug)]
pub struct JetLayout {
    nvars: usize,
    order: usize,
    monomials: Vec<Vec<u8>>,
    degrees: Vec<usize>,
    index: HashMap<Vec<u8>, usize>,
    /// Triples `(i, j, k)` with `monomials[i] + monomials[j] == monomials[k]`.
    products: Vec<(u32, u32, u32)>,
}

impl JetLayout {
    /// Shared layout for `(nvars, order)`; layouts are cached process-wide.
    pub fn shared(nvars: usize, order: usize) -> Arc<JetLayout> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<JetLayout>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry((nvars, order))
            .or_insert_with(|| Arc::new(JetLayout::build(nvars, order)))
            .clone()
    }

    fn build(nvars: usize, order: usize) -> JetLayout {
        assert!(order < 256, "jet order too large");
        let mut monomials = Vec::new();
        for degree in 0..=order {
            let mut current = vec![0u8; nvars];
            push_degree(&mut monomials, &mut current, 0, degree);
        }
        let degrees: Vec<usize> = monomials
            .iter()
            .map(|m| m.iter().map(|&e| e as usize).sum())
            .collect();
        let index: HashMap<Vec<u8>, usize> = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let mut products = Vec::new();
        let mut sum = vec![0u8; nvars];
        for (i, a) in monomials.iter().enumerate() {
            for (j, b) in monomials.iter().enumerate() {
                // graded order: every later `b` has degree >= degrees[j]
                if degrees[i] + degrees[j] > order {
                    break;
                }
                for v in 0..nvars {
                    sum[v] = a[v] + b[v];
                }
                let k = index[&sum];
                products.push((i as u32, j as u32, k as u32));
            }
        }
        JetLayout {
            nvars,
            order,
            monomials,
            degrees,
            index,
            products,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomial(&self, i: usize) -> &[u8] {
        &self.monomials[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degrees[i]
    }

    /// Position of a multi-index, `None` when its degree exceeds the order.
    pub fn position(&self, multi: &[u8]) -> Option<usize> {
        self.index.get(multi).copied()
    }

    /// Position of the linear monomial in variable `var`.
    pub fn linear(&self, var: usize) -> Option<usize> {
        if self.order == 0 {
            return None;
        }
        let mut m = vec![0u8; self.nvars];
        m[var] = 1;
        self.position(&m)
    }

    pub(crate) fn products(&self) -> &[(u32, u32, u32)] {
        &self.products
    }
}

fn push_degree(out: &mut Vec<Vec<u8>>, current: &mut Vec<u8>, var: usize, remaining: usize) {
    let nvars = current.len();
    if nvars == 0 {
        if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if var == nvars - 1 {
        current[var] = remaining as u8;
        out.push(current.clone());
        current[var] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        current[var] = e as u8;
        push_degree(out, current, var + 1, remaining - e);
    }
    current[var] = 0;
}

/// Number of monomials of degree `<= order` in `nvars` variables.
pub fn monomial_count(nvars: usize, order: usize) -> usize {
    // C(nvars + order, order)
    let mut c: usize = 1;
    for i in 1..=order {
        c = c * (nvars + i) / i;
    }
    c
}
