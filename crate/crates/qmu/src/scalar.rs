//! Floating-point abstraction the numeric kernels are generic over.

use num_complex::Complex;

/// Working precision of the library.
///
/// Every evaluator in this crate is generic over a `Scalar`; `f64` is what
/// the verification harness runs at, `f32` exists for callers that want
/// cheap low-precision evaluation. The bound collects what the kernels
/// actually use: float arithmetic, float constants, and conversions from
/// `f64` literals.
pub trait Scalar:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + core::fmt::Debug
    + core::fmt::Display
    + core::fmt::LowerExp
    + Send
    + Sync
    + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Complex number over a [`Scalar`].
pub type C<T> = Complex<T>;

/// Converts an `f64` literal into the working precision.
pub(crate) fn real<T: Scalar>(v: f64) -> T {
    T::from_f64(v).expect("constant must be representable in the working precision")
}

/// Complex constant from `f64` parts.
pub(crate) fn cx<T: Scalar>(re: f64, im: f64) -> C<T> {
    Complex::new(real(re), real(im))
}

/// Principal-branch complex power `z^w = exp(w log z)`.
///
/// `z` must be nonzero; every call site guards that.
pub(crate) fn cpow<T: Scalar>(z: C<T>, w: C<T>) -> C<T> {
    if w.re.is_zero() && w.im.is_zero() {
        return Complex::new(T::one(), T::zero());
    }
    (w * z.ln()).exp()
}

/// Whether both parts of a complex value are finite.
pub(crate) fn finite<T: Scalar>(z: C<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
