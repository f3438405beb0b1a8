use std::cell::Cell;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::eft::Scalar;

thread_local! {
    static OPS: Cell<u64> = const { Cell::new(0) };
}

#[inline]
fn bump() {
    OPS.with(|c| c.set(c.get() + 1));
}

/// FP64 value that counts every add, sub, mul, div and fma it performs in a
/// thread-local counter. Negation and comparisons are free.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct CountingScalar(pub f64);

/// Operations counted on this thread since the last reset.
pub fn op_count() -> u64 {
    OPS.with(Cell::get)
}

pub fn reset_op_count() {
    OPS.with(|c| c.set(0));
}

/// Runs `f` and returns its result with the number of operations it
/// performed on this thread.
pub fn count_ops<R>(f: impl FnOnce() -> R) -> (R, u64) {
    let before = op_count();
    let r = f();
    (r, op_count() - before)
}

macro_rules! counted {
    ($tr:ident $m:ident $op:tt) => {
        impl $tr for CountingScalar {
            type Output = CountingScalar;
            #[inline]
            fn $m(self, rhs: CountingScalar) -> CountingScalar {
                bump();
                CountingScalar(self.0 $op rhs.0)
            }
        }
    };
}
counted!(Add add +);
counted!(Sub sub -);
counted!(Mul mul *);
counted!(Div div /);

impl Neg for CountingScalar {
    type Output = CountingScalar;

    #[inline]
    fn neg(self) -> CountingScalar {
        CountingScalar(-self.0)
    }
}

impl Scalar for CountingScalar {
    #[inline]
    fn from_f64(x: f64) -> Self {
        CountingScalar(x)
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self.0
    }

    #[inline]
    fn mul_add(self, b: Self, c: Self) -> Self {
        bump();
        CountingScalar(self.0.mul_add(b.0, c.0))
    }
}
