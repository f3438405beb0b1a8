use std::fmt;
use std::ops::{Deref, DerefMut};

use thiserror::Error;

use super::{Arithmetic, Exec};
use crate::multiword::{dxtw_mul, tw_add, tw_div, tw_mul, tw_sub, TripleWord};
use crate::sparse::CsrMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("dimension mismatch in {kernel}: expected length {expected}, found {found}")]
pub struct DimensionError {
    pub kernel: &'static str,
    pub expected: usize,
    pub found: usize,
}

fn check(kernel: &'static str, expected: usize, found: usize) -> Result<(), DimensionError> {
    if expected == found {
        Ok(())
    } else {
        Err(DimensionError { kernel, expected, found })
    }
}

/// A dense vector of elements in arithmetic `A`, stored as an array of
/// structures (all words of one element are adjacent).
pub struct MultiwordVector<A: Arithmetic> {
    data: Vec<A::Elem>,
}

impl<A: Arithmetic> MultiwordVector<A> {
    pub fn zeros(n: usize) -> Self {
        Self { data: vec![A::zero(); n] }
    }

    pub fn from_f64(xs: &[f64]) -> Self {
        Self { data: xs.iter().map(|&x| A::from_f64(x)).collect() }
    }

    pub fn from_elems(data: Vec<A::Elem>) -> Self {
        Self { data }
    }

    pub fn into_elems(self) -> Vec<A::Elem> {
        self.data
    }

    /// FP64 view, each element summed high to low.
    pub fn collapse(&self) -> Vec<f64> {
        self.data.iter().map(|&e| A::collapse(e)).collect()
    }

    /// Exact widening of every element to a triple word.
    pub fn to_tw(&self) -> Vec<TripleWord> {
        self.data.iter().map(|&e| A::to_tw(e)).collect()
    }
}

impl<A: Arithmetic> Clone for MultiwordVector<A> {
    fn clone(&self) -> Self {
        Self { data: self.data.clone() }
    }
}

impl<A: Arithmetic> fmt::Debug for MultiwordVector<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiwordVector").field("mode", &A::MODE).field("data", &self.data).finish()
    }
}

impl<A: Arithmetic> PartialEq for MultiwordVector<A> {
    fn eq(&self, other: &Self) -> bool {
        self.data == other.data
    }
}

impl<A: Arithmetic> Deref for MultiwordVector<A> {
    type Target = [A::Elem];

    fn deref(&self) -> &[A::Elem] {
        &self.data
    }
}

impl<A: Arithmetic> DerefMut for MultiwordVector<A> {
    fn deref_mut(&mut self) -> &mut [A::Elem] {
        &mut self.data
    }
}

/// `y = A x`. Each row accumulates `a_ij * x_j` from zero, left to right,
/// with the mixed FP64 x multi-word product; rows are split across threads
/// in contiguous blocks.
pub fn spmv<A: Arithmetic>(exec: &Exec, m: &CsrMatrix, x: &[A::Elem], y: &mut [A::Elem]) -> Result<(), DimensionError> {
    check("spmv (x)", m.n_cols(), x.len())?;
    check("spmv (y)", m.n_rows(), y.len())?;
    exec.for_each_block(y, |offset, chunk| {
        for (k, yi) in chunk.iter_mut().enumerate() {
            let (cols, vals) = m.row(offset + k);
            let mut acc = A::zero();
            for (&j, &v) in cols.iter().zip(vals) {
                acc = A::add(acc, A::mul_f64(v, x[j]));
            }
            *yi = acc;
        }
    });
    Ok(())
}

/// `x^T y`, reduced over `exec.partitions()` contiguous blocks.
pub fn dot<A: Arithmetic>(exec: &Exec, x: &[A::Elem], y: &[A::Elem]) -> Result<A::Elem, DimensionError> {
    check("dot", x.len(), y.len())?;
    let partials = exec.map_partitions(x.len(), |range| {
        let mut acc = A::zero();
        for i in range {
            acc = A::add(acc, A::mul(x[i], y[i]));
        }
        acc
    });
    Ok(combine::<A>(partials))
}

fn combine<A: Arithmetic>(partials: Vec<A::Elem>) -> A::Elem {
    let mut it = partials.into_iter();
    let first = it.next().unwrap_or_else(A::zero);
    it.fold(first, A::add)
}

/// `y <- y + alpha x`.
pub fn axpy<A: Arithmetic>(
    exec: &Exec,
    alpha: A::Elem,
    x: &[A::Elem],
    y: &mut [A::Elem],
) -> Result<(), DimensionError> {
    check("axpy", y.len(), x.len())?;
    exec.for_each_block(y, |offset, chunk| {
        for (yi, &xi) in chunk.iter_mut().zip(&x[offset..]) {
            *yi = A::add(*yi, A::mul(alpha, xi));
        }
    });
    Ok(())
}

/// `p <- r + beta p`.
pub fn scal_then_add<A: Arithmetic>(
    exec: &Exec,
    beta: A::Elem,
    p: &mut [A::Elem],
    r: &[A::Elem],
) -> Result<(), DimensionError> {
    check("scal_then_add", p.len(), r.len())?;
    exec.for_each_block(p, |offset, chunk| {
        for (pi, &ri) in chunk.iter_mut().zip(&r[offset..]) {
            *pi = A::add(ri, A::mul(beta, *pi));
        }
    });
    Ok(())
}

/// Renormalizes every element in place. A no-op outside the quasi modes.
pub fn normalize_vector<A: Arithmetic>(exec: &Exec, v: &mut [A::Elem]) {
    if !A::MODE.is_quasi() {
        return;
    }
    exec.for_each_block(v, |_, chunk| {
        for e in chunk {
            *e = A::normalize(*e);
        }
    });
}

/// Euclidean norm in FP64: elements are collapsed first, squares are summed
/// per partition and the partitions combined in order.
pub fn norm2_fp64<A: Arithmetic>(exec: &Exec, x: &[A::Elem]) -> f64 {
    let partials = exec.map_partitions(x.len(), |range| {
        let mut acc = 0.0;
        for &e in &x[range] {
            let c = A::collapse(e);
            acc += c * c;
        }
        acc
    });
    partials.into_iter().reduce(|a, b| a + b).unwrap_or(0.0).sqrt()
}

fn sum_squares_tw(exec: &Exec, n: usize, term: impl Fn(usize) -> TripleWord + Sync + Send) -> TripleWord {
    let partials = exec.map_partitions(n, |range| {
        let mut acc = TripleWord::zero();
        for i in range {
            let d = term(i);
            acc = tw_add(acc, tw_mul(d, d));
        }
        acc
    });
    let mut it = partials.into_iter();
    let first = it.next().unwrap_or_default();
    it.fold(first, tw_add)
}

/// `sqrt(num / den)` with the ratio formed in TW; falls back to the absolute
/// norm when the reference norm is zero.
fn ratio_sqrt(num: TripleWord, den: TripleWord) -> f64 {
    if den.collapse() == 0.0 {
        num.collapse().sqrt()
    } else {
        tw_div(num, den).collapse().sqrt()
    }
}

/// `||x - x*|| / ||x*||` with TW accumulation and a single FP64 square root.
pub fn relative_error_tw<A: Arithmetic>(exec: &Exec, x: &[A::Elem], x_star: &[f64]) -> Result<f64, DimensionError> {
    check("relative_error_tw", x_star.len(), x.len())?;
    let num = sum_squares_tw(exec, x.len(), |i| tw_sub(A::to_tw(x[i]), TripleWord::from_f64(x_star[i])));
    let den = sum_squares_tw(exec, x.len(), |i| TripleWord::from_f64(x_star[i]));
    Ok(ratio_sqrt(num, den))
}

/// `||b - A x|| / ||b||` with the residual and the norms accumulated in TW.
pub fn true_residual_tw<A: Arithmetic>(
    exec: &Exec,
    m: &CsrMatrix,
    x: &[A::Elem],
    b: &[f64],
) -> Result<f64, DimensionError> {
    check("true_residual_tw (x)", m.n_cols(), x.len())?;
    check("true_residual_tw (b)", m.n_rows(), b.len())?;
    let xt: Vec<TripleWord> = x.iter().map(|&e| A::to_tw(e)).collect();
    let mut r = vec![TripleWord::zero(); b.len()];
    exec.for_each_block(&mut r, |offset, chunk| {
        for (k, ri) in chunk.iter_mut().enumerate() {
            let i = offset + k;
            let (cols, vals) = m.row(i);
            let mut acc = TripleWord::from_f64(b[i]);
            for (&j, &v) in cols.iter().zip(vals) {
                acc = tw_sub(acc, dxtw_mul(v, xt[j]));
            }
            *ri = acc;
        }
    });
    let num = sum_squares_tw(exec, r.len(), |i| r[i]);
    let den = sum_squares_tw(exec, b.len(), |i| TripleWord::from_f64(b[i]));
    Ok(ratio_sqrt(num, den))
}

/// TW-accurate `(relative error norm, true relative residual norm)`; the
/// error norm is `None` without a reference solution.
pub fn norm_metrics_tw<A: Arithmetic>(
    exec: &Exec,
    m: &CsrMatrix,
    x: &[A::Elem],
    x_star: Option<&[f64]>,
    b: &[f64],
) -> Result<(Option<f64>, f64), DimensionError> {
    let err = x_star.map(|xs| relative_error_tw::<A>(exec, x, xs)).transpose()?;
    Ok((err, true_residual_tw::<A>(exec, m, x, b)?))
}
