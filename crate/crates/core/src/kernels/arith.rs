use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::multiword::{
    dw_add, dw_div, dw_mul, dxdw_mul, dxqdw_mul, dxqtw_mul, dxtw_mul, normalize_dw, normalize_tw, qdw_add, qdw_div,
    qdw_mul, qtw_add, qtw_div, qtw_mul, tw_add, tw_div, tw_mul, DoubleWord, TripleWord,
};

/// The five arithmetics a solve or kernel can run in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Fp64,
    Dw,
    Qdw,
    Tw,
    Qtw,
}

impl Mode {
    pub const ALL: [Mode; 5] = [Mode::Fp64, Mode::Dw, Mode::Qdw, Mode::Tw, Mode::Qtw];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Fp64 => "fp64",
            Mode::Dw => "dw",
            Mode::Qdw => "qdw",
            Mode::Tw => "tw",
            Mode::Qtw => "qtw",
        }
    }

    /// FP64 words per vector element.
    pub fn words(self) -> usize {
        match self {
            Mode::Fp64 => 1,
            Mode::Dw | Mode::Qdw => 2,
            Mode::Tw | Mode::Qtw => 3,
        }
    }

    pub fn is_quasi(self) -> bool {
        matches!(self, Mode::Qdw | Mode::Qtw)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown arithmetic mode `{0}` (expected fp64, dw, qdw, tw or qtw)")]
pub struct ParseModeError(pub String);

impl FromStr for Mode {
    type Err = ParseModeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ParseModeError(s.to_string()))
    }
}

/// Static description of one arithmetic: its element type and the scalar
/// operations the kernels are written against.
///
/// `mul_f64` is the mixed FP64 x multi-word product used wherever a matrix
/// value enters.
pub trait Arithmetic: Copy + Send + Sync + 'static {
    type Elem: Copy + Default + fmt::Debug + PartialEq + Send + Sync + 'static;
    const MODE: Mode;

    fn from_f64(x: f64) -> Self::Elem;
    fn collapse(a: Self::Elem) -> f64;
    /// Exact widening to a triple word (the value is unchanged).
    fn to_tw(a: Self::Elem) -> TripleWord;
    fn add(a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn mul(a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn div(a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn neg(a: Self::Elem) -> Self::Elem;
    fn mul_f64(a: f64, b: Self::Elem) -> Self::Elem;
    /// Value-preserving renormalization; identity outside the quasi modes.
    fn normalize(a: Self::Elem) -> Self::Elem;

    #[inline(always)]
    fn zero() -> Self::Elem {
        Self::from_f64(0.0)
    }

    #[inline(always)]
    fn sub(a: Self::Elem, b: Self::Elem) -> Self::Elem {
        Self::add(a, Self::neg(b))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Fp64;
#[derive(Clone, Copy, Debug)]
pub struct Dw;
#[derive(Clone, Copy, Debug)]
pub struct Qdw;
#[derive(Clone, Copy, Debug)]
pub struct Tw;
#[derive(Clone, Copy, Debug)]
pub struct Qtw;

impl Arithmetic for Fp64 {
    type Elem = f64;
    const MODE: Mode = Mode::Fp64;

    #[inline(always)]
    fn from_f64(x: f64) -> f64 {
        x
    }
    #[inline(always)]
    fn collapse(a: f64) -> f64 {
        a
    }
    #[inline(always)]
    fn to_tw(a: f64) -> TripleWord {
        TripleWord::from_f64(a)
    }
    #[inline(always)]
    fn add(a: f64, b: f64) -> f64 {
        a + b
    }
    #[inline(always)]
    fn mul(a: f64, b: f64) -> f64 {
        a * b
    }
    #[inline(always)]
    fn div(a: f64, b: f64) -> f64 {
        a / b
    }
    #[inline(always)]
    fn neg(a: f64) -> f64 {
        -a
    }
    #[inline(always)]
    fn mul_f64(a: f64, b: f64) -> f64 {
        a * b
    }
    #[inline(always)]
    fn normalize(a: f64) -> f64 {
        a
    }
}

macro_rules! dw_family {
    ($name:ident, $mode:expr, $add:ident, $mul:ident, $div:ident, $mixed:ident, $norm:expr) => {
        impl Arithmetic for $name {
            type Elem = DoubleWord;
            const MODE: Mode = $mode;

            #[inline(always)]
            fn from_f64(x: f64) -> DoubleWord {
                DoubleWord::from_f64(x)
            }
            #[inline(always)]
            fn collapse(a: DoubleWord) -> f64 {
                a.collapse()
            }
            #[inline(always)]
            fn to_tw(a: DoubleWord) -> TripleWord {
                TripleWord::new(a.w0, a.w1, 0.0)
            }
            #[inline(always)]
            fn add(a: DoubleWord, b: DoubleWord) -> DoubleWord {
                $add(a, b)
            }
            #[inline(always)]
            fn mul(a: DoubleWord, b: DoubleWord) -> DoubleWord {
                $mul(a, b)
            }
            #[inline(always)]
            fn div(a: DoubleWord, b: DoubleWord) -> DoubleWord {
                $div(a, b)
            }
            #[inline(always)]
            fn neg(a: DoubleWord) -> DoubleWord {
                -a
            }
            #[inline(always)]
            fn mul_f64(a: f64, b: DoubleWord) -> DoubleWord {
                $mixed(a, b)
            }
            #[inline(always)]
            fn normalize(a: DoubleWord) -> DoubleWord {
                $norm(a)
            }
        }
    };
}

macro_rules! tw_family {
    ($name:ident, $mode:expr, $add:ident, $mul:ident, $div:ident, $mixed:ident, $norm:expr) => {
        impl Arithmetic for $name {
            type Elem = TripleWord;
            const MODE: Mode = $mode;

            #[inline(always)]
            fn from_f64(x: f64) -> TripleWord {
                TripleWord::from_f64(x)
            }
            #[inline(always)]
            fn collapse(a: TripleWord) -> f64 {
                a.collapse()
            }
            #[inline(always)]
            fn to_tw(a: TripleWord) -> TripleWord {
                a
            }
            #[inline(always)]
            fn add(a: TripleWord, b: TripleWord) -> TripleWord {
                $add(a, b)
            }
            #[inline(always)]
            fn mul(a: TripleWord, b: TripleWord) -> TripleWord {
                $mul(a, b)
            }
            #[inline(always)]
            fn div(a: TripleWord, b: TripleWord) -> TripleWord {
                $div(a, b)
            }
            #[inline(always)]
            fn neg(a: TripleWord) -> TripleWord {
                -a
            }
            #[inline(always)]
            fn mul_f64(a: f64, b: TripleWord) -> TripleWord {
                $mixed(a, b)
            }
            #[inline(always)]
            fn normalize(a: TripleWord) -> TripleWord {
                $norm(a)
            }
        }
    };
}

dw_family!(Dw, Mode::Dw, dw_add, dw_mul, dw_div, dxdw_mul, |a| a);
dw_family!(Qdw, Mode::Qdw, qdw_add, qdw_mul, qdw_div, dxqdw_mul, normalize_dw);
tw_family!(Tw, Mode::Tw, tw_add, tw_mul, tw_div, dxtw_mul, |a| a);
tw_family!(Qtw, Mode::Qtw, qtw_add, qtw_mul, qtw_div, dxqtw_mul, normalize_tw);

/// Calls `$body` with the type alias `$a` bound to the marker type of
/// `$mode`.
#[macro_export]
macro_rules! with_arithmetic {
    ($mode:expr, $a:ident => $body:expr) => {
        match $mode {
            $crate::kernels::Mode::Fp64 => {
                type $a = $crate::kernels::Fp64;
                $body
            }
            $crate::kernels::Mode::Dw => {
                type $a = $crate::kernels::Dw;
                $body
            }
            $crate::kernels::Mode::Qdw => {
                type $a = $crate::kernels::Qdw;
                $body
            }
            $crate::kernels::Mode::Tw => {
                type $a = $crate::kernels::Tw;
                $body
            }
            $crate::kernels::Mode::Qtw => {
                type $a = $crate::kernels::Qtw;
                $body
            }
        }
    };
}
