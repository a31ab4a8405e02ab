//! Quaternion model of SU(2).
//!
//! SU(2) is the unit sphere of the quaternions `H = span{1, i, j, k}`. Under
//! this identification the matrix trace of `q = w + xi + yj + zk` is `2w`, and
//! the trace pairing `tr(X·conj(Y))` is twice the Euclidean dot product on
//! `R^4`, which is invariant under `X -> p·X·q` for unit `p, q`.

mod isometry;

pub use isometry::{conjugation_defect, so4_factor, DefectMap, Isometry4};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuatError {
    #[error("axis undefined: quaternion is ±1 (imaginary norm {imag_norm:e})")]
    AxisUndefined { imag_norm: f64 },
    #[error("trace mismatch: tr(p) = {lhs}, tr(q) = {rhs}")]
    TraceMismatch { lhs: f64, rhs: f64 },
    #[error("degenerate center: p = ±1 commutes with everything")]
    DegenerateCenter,
    #[error("zero quaternion cannot be normalized")]
    ZeroNorm,
    #[error("quaternion norm {norm} is not 1 within tolerance")]
    NotUnit { norm: f64 },
    #[error("direction representative norm {norm:e} is below 1e-9")]
    DegenerateDirection { norm: f64 },
    #[error("matrix is not orthogonal (|M^T M - I| = {defect:e})")]
    NotOrthogonal { defect: f64 },
    #[error("isometry reverses orientation")]
    NotSpecialOrthogonal,
}

/// Element of `H` (not necessarily unit).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quaternion<T> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Quaternion<T> {
    #[inline]
    pub fn new(w: T, x: T, y: T, z: T) -> Self {
        Self { w, x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn one() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::zero())
    }

    /// The basis element `e_k` of `{1, i, j, k}`.
    pub fn basis(k: usize) -> Self {
        let mut c = [T::zero(); 4];
        c[k] = T::one();
        Self::from_array(c)
    }

    pub fn from_array(c: [T; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }

    pub fn to_array(self) -> [T; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn from_parts(w: T, v: ImaginaryVector<T>) -> Self {
        Self::new(w, v.x, v.y, v.z)
    }

    pub fn imag(self) -> ImaginaryVector<T> {
        ImaginaryVector::new(self.x, self.y, self.z)
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn dot(self, o: Self) -> T {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm_squared(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.norm_squared().sqrt()
    }

    pub fn scale(self, s: T) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// `tr(X)` under the SU(2) identification, extended linearly to `H`.
    pub fn trace(self) -> T {
        self.w + self.w
    }
}

impl<T: Real> Add for Quaternion<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> Sub for Quaternion<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Neg for Quaternion<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl<T: Real> Mul for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let a = self;
        Self::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }
}

/// Vector of the imaginary subspace `H⁰ = span{i, j, k}`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ImaginaryVector<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> ImaginaryVector<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> T {
        self.dot(self).sqrt()
    }

    pub fn scale(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn to_quaternion(self) -> Quaternion<T> {
        Quaternion::from_parts(T::zero(), self)
    }

    /// Some unit vector orthogonal to `self` (which must be nonzero).
    pub fn any_orthogonal(self) -> Self {
        let (ax, ay, az) = (self.x.abs(), self.y.abs(), self.z.abs());
        let helper = if ax <= ay && ax <= az {
            Self::new(T::one(), T::zero(), T::zero())
        } else if ay <= az {
            Self::new(T::zero(), T::one(), T::zero())
        } else {
            Self::new(T::zero(), T::zero(), T::one())
        };
        let c = self.cross(helper);
        c.scale(T::one() / c.norm())
    }
}

impl<T: Real> Add for ImaginaryVector<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> Sub for ImaginaryVector<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

/// Point of SU(2).
///
/// The components are kept on the unit sphere: every product renormalizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UnitQuaternion<T>(Quaternion<T>);

impl<T: Real> UnitQuaternion<T> {
    pub fn identity() -> Self {
        Self(Quaternion::one())
    }

    pub fn i() -> Self {
        Self(Quaternion::basis(1))
    }

    pub fn j() -> Self {
        Self(Quaternion::basis(2))
    }

    pub fn k() -> Self {
        Self(Quaternion::basis(3))
    }

    /// Normalizes `(w, x, y, z)`; panics on the zero vector.
    pub fn new(w: T, x: T, y: T, z: T) -> Self {
        Self::try_normalize(Quaternion::new(w, x, y, z)).expect("zero quaternion")
    }

    pub fn try_normalize(q: Quaternion<T>) -> Result<Self, QuatError> {
        let n = q.norm();
        if !(n > T::zero()) {
            return Err(QuatError::ZeroNorm);
        }
        Ok(Self(q.scale(T::one() / n)))
    }

    /// Accepts `q` verbatim when its norm is 1 within `1e-12`; no rescaling,
    /// so decoded coordinates stay bit-exact.
    pub fn from_unit(q: Quaternion<T>) -> Result<Self, QuatError> {
        let n = q.norm();
        if (n - T::one()).abs() > T::tol(1e-12) {
            return Err(QuatError::NotUnit { norm: n.as_f64() });
        }
        Ok(Self(q))
    }

    /// `cos(angle) + sin(angle)·axis` for a unit imaginary `axis`.
    pub fn from_axis_angle(axis: ImaginaryVector<T>, angle: T) -> Self {
        let u = axis.scale(T::one() / axis.norm());
        Self(Quaternion::from_parts(angle.cos(), u.scale(angle.sin())))
    }

    #[inline]
    pub fn quaternion(self) -> Quaternion<T> {
        self.0
    }

    pub fn w(self) -> T {
        self.0.w
    }

    pub fn imag(self) -> ImaginaryVector<T> {
        self.0.imag()
    }

    pub fn inverse(self) -> Self {
        Self(self.0.conj())
    }

    pub fn renormalized(self) -> Self {
        Self::try_normalize(self.0).unwrap_or_else(|_| Self::identity())
    }

    pub fn pow(self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { self };
        let mut acc = Self::identity();
        let mut b = base;
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b;
            }
            b = b * b;
            e >>= 1;
        }
        acc
    }

    /// Matrix trace, in `[-2, 2]`.
    pub fn trace(self) -> T {
        self.0.trace()
    }

    /// Rotation angle `arccos(tr/2)`, in `[0, π]`.
    pub fn theta(self) -> T {
        // atan2 keeps full precision near ±1, unlike acos
        self.0.imag().norm().atan2(self.0.w)
    }

    /// Unit imaginary part; undefined at `±1`.
    pub fn axis(self) -> Result<ImaginaryVector<T>, QuatError> {
        let v = self.0.imag();
        let n = v.norm();
        if n < T::tol(1e-12) {
            return Err(QuatError::AxisUndefined { imag_norm: n.as_f64() });
        }
        Ok(v.scale(T::one() / n))
    }

    /// The velocity-one subgroup through `self`: `cos t + sin t · axis`.
    pub fn one_param(self, t: T) -> Result<Self, QuatError> {
        let axis = self.axis()?;
        Ok(Self::from_axis_angle(axis, t))
    }

    /// `self · x · self⁻¹`.
    pub fn conjugate(self, x: Self) -> Self {
        self * x * self.inverse()
    }

    pub fn distance(self, o: Self) -> T {
        (self.0 - o.0).norm()
    }

    pub fn is_central(self, tol: T) -> bool {
        self.0.imag().norm() < tol
    }
}

impl<T: Real> Mul for UnitQuaternion<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        let p = self.0 * o.0;
        // renormalize
        let n2 = p.norm_squared();
        let corr = (T::lit(3.0) - n2) * T::lit(0.5);
        if (n2 - T::one()).abs() < T::lit(1e-6) {
            Self(p.scale(corr))
        } else {
            Self(p.scale(T::one() / n2.sqrt()))
        }
    }
}

impl<T: Real> Neg for UnitQuaternion<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl<T: Real + fmt::Display> fmt::Display for UnitQuaternion<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = self.0;
        write!(f, "{} + {}i + {}j + {}k", q.w, q.x, q.y, q.z)
    }
}

/// Line through a nonzero imaginary vector: a point of `P(H⁰)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveDirection<T> {
    representative: ImaginaryVector<T>,
}

impl<T: Real> ProjectiveDirection<T> {
    pub fn new(v: ImaginaryVector<T>) -> Result<Self, QuatError> {
        let n = v.norm();
        if !(n >= T::tol(1e-9)) {
            return Err(QuatError::DegenerateDirection { norm: n.as_f64() });
        }
        Ok(Self { representative: v })
    }

    /// Direction of the imaginary part of `q`.
    pub fn of_imaginary_part(q: Quaternion<T>) -> Result<Self, QuatError> {
        Self::new(q.imag())
    }

    pub fn representative(&self) -> ImaginaryVector<T> {
        self.representative
    }

    /// Unit representative with a sign fixed by the largest coordinate.
    pub fn unit(&self) -> ImaginaryVector<T> {
        let v = self.representative;
        let u = v.scale(T::one() / v.norm());
        let big = [u.x, u.y, u.z]
            .into_iter()
            .fold(T::zero(), |m, c| if c.abs() > m.abs() { c } else { m });
        if big < T::zero() {
            u.scale(-T::one())
        } else {
            u
        }
    }

    /// Sign-free angle `arccos(|<u,v>| / |u||v|)`, in `[0, π/2]`.
    pub fn angle_to(&self, other: &Self) -> T {
        let u = self.representative;
        let v = other.representative;
        // atan2 form keeps precision near 0
        let cross = u.cross(v).norm();
        let dot = u.dot(v).abs();
        cross.atan2(dot)
    }
}

/// Uniform (Haar) sample on SU(2): a normalized 4D Gaussian.
pub fn haar<T, R>(rng: &mut R) -> UnitQuaternion<T>
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    loop {
        let q = Quaternion::new(
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        );
        if q.norm() > T::lit(1e-6) {
            return UnitQuaternion::try_normalize(q).expect("nonzero");
        }
    }
}

/// Point at `angle` on the circle `{X : X·p·X⁻¹ = q}`.
///
/// The circle is `X₀·ξ_p(t)` where `X₀` is the shortest rotation carrying
/// the axis of `p` to the axis of `q`.
pub fn conj_solve<T: Real>(
    p: UnitQuaternion<T>,
    q: UnitQuaternion<T>,
    angle: T,
) -> Result<UnitQuaternion<T>, QuatError> {
    if (p.trace() - q.trace()).abs() >= T::tol(1e-9) {
        return Err(QuatError::TraceMismatch {
            lhs: p.trace().as_f64(),
            rhs: q.trace().as_f64(),
        });
    }
    let u = p.axis().map_err(|_| QuatError::DegenerateCenter)?;
    let v = q.axis().map_err(|_| QuatError::DegenerateCenter)?;
    let x0 = base_conjugator(u, v);
    Ok(x0 * UnitQuaternion::from_axis_angle(u, angle))
}

/// Unit quaternion `X` with `X·u·X⁻¹ = v` for unit imaginary `u`, `v`.
pub fn base_conjugator<T: Real>(u: ImaginaryVector<T>, v: ImaginaryVector<T>) -> UnitQuaternion<T> {
    // 1 - v·u = (1 + <u,v>) + u×v
    let c = T::one() + u.dot(v);
    if c > T::lit(1e-8) {
        UnitQuaternion::try_normalize(Quaternion::from_parts(c, u.cross(v)))
            .expect("nonzero rotation quaternion")
    } else {
        // near-antipodal axes: a half turn about an axis orthogonal to u sends
        // u to -u, then a short rotation finishes the job
        let w = u.any_orthogonal();
        let half_turn = UnitQuaternion(w.to_quaternion());
        let image = u.scale(-T::one());
        let fix = UnitQuaternion::try_normalize(Quaternion::from_parts(
            T::one() + image.dot(v),
            image.cross(v),
        ))
        .expect("nonzero rotation quaternion");
        fix * half_turn
    }
}
