//! Linear maps of `H = R^4` built from two-sided quaternion multiplication.

use nalgebra::{Matrix4, Vector4};

use super::{QuatError, Quaternion, UnitQuaternion};
use crate::scalar::Real;

fn to_vec<T: Real>(q: Quaternion<T>) -> Vector4<T> {
    Vector4::new(q.w, q.x, q.y, q.z)
}

fn from_vec<T: Real>(v: &Vector4<T>) -> Quaternion<T> {
    Quaternion::new(v[0], v[1], v[2], v[3])
}

/// Matrix (basis `{1,i,j,k}`) of the linear map `f`.
fn matrix_of<T: Real>(f: impl Fn(Quaternion<T>) -> Quaternion<T>) -> Matrix4<T> {
    let mut m = Matrix4::zeros();
    for k in 0..4 {
        m.set_column(k, &to_vec(f(Quaternion::basis(k))));
    }
    m
}

/// Orthogonal transformation of `H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry4<T: Real> {
    matrix: Matrix4<T>,
    orientation_preserving: bool,
}

impl<T: Real> Isometry4<T> {
    /// Checks `MᵀM = I` within `1e-10`.
    pub fn from_matrix(matrix: Matrix4<T>) -> Result<Self, QuatError> {
        let defect = (matrix.transpose() * matrix - Matrix4::identity()).amax();
        if !(defect <= T::tol(1e-10)) {
            return Err(QuatError::NotOrthogonal { defect: defect.as_f64() });
        }
        Ok(Self {
            matrix,
            orientation_preserving: matrix.determinant() > T::zero(),
        })
    }

    /// `X ↦ p·X·q`.
    pub fn two_sided(p: UnitQuaternion<T>, q: UnitQuaternion<T>) -> Self {
        let (p, q) = (p.quaternion(), q.quaternion());
        Self {
            matrix: matrix_of(|x| p * x * q),
            orientation_preserving: true,
        }
    }

    pub fn matrix(&self) -> &Matrix4<T> {
        &self.matrix
    }

    pub fn is_orientation_preserving(&self) -> bool {
        self.orientation_preserving
    }

    pub fn apply(&self, x: Quaternion<T>) -> Quaternion<T> {
        from_vec(&(self.matrix * to_vec(x)))
    }
}

/// Writes an orientation-preserving isometry as `X ↦ p·X·q`.
///
/// The maps `T_ab : X ↦ e_a·X·e_b` are mutually orthogonal in the Frobenius
/// pairing with squared norm 4, so `p_a q_b = <M, T_ab> / 4`. The nearest
/// rank-one matrix to that 4×4 array gives `(p, q)`, fixed up to a common
/// sign by making the largest coordinate of `p` positive.
pub fn so4_factor<T: Real>(phi: &Isometry4<T>) -> Result<(UnitQuaternion<T>, UnitQuaternion<T>), QuatError> {
    if !phi.orientation_preserving {
        return Err(QuatError::NotSpecialOrthogonal);
    }
    let m = &phi.matrix;
    let quarter = T::lit(0.25);
    let mut outer = Matrix4::zeros();
    for a in 0..4 {
        for b in 0..4 {
            let (ea, eb) = (Quaternion::<T>::basis(a), Quaternion::<T>::basis(b));
            let t = matrix_of(|x| ea * x * eb);
            outer[(a, b)] = m.dot(&t) * quarter;
        }
    }
    let svd = outer.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let top = (0..4)
        .max_by(|&i, &j| {
            svd.singular_values[i]
                .partial_cmp(&svd.singular_values[j])
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("four singular values");
    // left factor from the right singular vector; u from the SVD loses
    // accuracy when the three trailing singular values coincide
    let q_vec = v_t.row(top).transpose();
    let mut q = from_vec(&q_vec);
    let mut p = from_vec(&(outer * q_vec));
    let big = p
        .to_array()
        .into_iter()
        .fold(T::zero(), |m, c| if c.abs() > m.abs() { c } else { m });
    if big < T::zero() {
        p = -p;
        q = -q;
    }
    Ok((
        UnitQuaternion::try_normalize(p)?,
        UnitQuaternion::try_normalize(q)?,
    ))
}

/// The linear map `X ↦ a·X·b⁻¹ − X` with its singular structure.
///
/// Nonzero kernel elements are exactly the (scaled) quaternions conjugating
/// `b` to `a`.
#[derive(Debug, Clone)]
pub struct DefectMap<T: Real> {
    pub matrix: Matrix4<T>,
    pub singular_values: [T; 4],
    pub rank: usize,
    pub kernel: Vec<Quaternion<T>>,
    pub image: Vec<Quaternion<T>>,
}

impl<T: Real> DefectMap<T> {
    pub fn apply(&self, x: Quaternion<T>) -> Quaternion<T> {
        from_vec(&(self.matrix * to_vec(x)))
    }
}

/// Builds `X ↦ a_i·X·a_j⁻¹ − X`; singular values below `1e-9` count as zero.
pub fn conjugation_defect<T: Real>(a_i: UnitQuaternion<T>, a_j: UnitQuaternion<T>) -> DefectMap<T> {
    let (l, r) = (a_i.quaternion(), a_j.inverse().quaternion());
    let matrix = matrix_of(|x| l * x * r - x);
    let svd = matrix.svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let tol = T::tol(1e-9);
    let mut singular_values = [T::zero(); 4];
    let mut kernel = Vec::new();
    let mut image = Vec::new();
    for k in 0..4 {
        let s = svd.singular_values[k];
        singular_values[k] = s;
        if s > tol {
            image.push(from_vec(&u.column(k).into_owned()));
        } else {
            kernel.push(from_vec(&v_t.row(k).transpose()));
        }
    }
    DefectMap {
        matrix,
        singular_values,
        rank: image.len(),
        kernel,
        image,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::haar;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type Q = UnitQuaternion<f64>;

    fn same_up_to_sign(a: Q, b: Q, tol: f64) -> bool {
        a.distance(b) < tol || a.distance(-b) < tol
    }

    #[test]
    fn factor_identity_and_left_multiplication() {
        let (p, q) = so4_factor(&Isometry4::from_matrix(Matrix4::<f64>::identity()).unwrap()).unwrap();
        assert!(same_up_to_sign(p, Q::identity(), 1e-12));
        assert!(same_up_to_sign(q, Q::identity(), 1e-12));
        assert!((p * q).distance(Q::identity()) < 1e-12);

        let left_i = Isometry4::two_sided(Q::i(), Q::identity());
        let (p, q) = so4_factor(&left_i).unwrap();
        assert!(same_up_to_sign(p, Q::i(), 1e-12));
        assert!(same_up_to_sign(q, Q::identity(), 1e-12));
    }

    #[test]
    fn factor_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let p0: Q = haar(&mut rng);
            let q0: Q = haar(&mut rng);
            let (p, q) = so4_factor(&Isometry4::two_sided(p0, q0)).unwrap();
            let same = (p.distance(p0) < 1e-12 && q.distance(q0) < 1e-12)
                || (p.distance(-p0) < 1e-12 && q.distance(-q0) < 1e-12);
            assert!(same, "p0={p0:?} q0={q0:?} p={p:?} q={q:?}");
        }
    }

    #[test]
    fn reflections_are_rejected() {
        let mut m = Matrix4::<f64>::identity();
        m[(3, 3)] = -1.0;
        let iso = Isometry4::from_matrix(m).unwrap();
        assert!(!iso.is_orientation_preserving());
        assert_eq!(so4_factor(&iso), Err(QuatError::NotSpecialOrthogonal));
        let mut bad = Matrix4::<f64>::identity();
        bad[(0, 1)] = 0.1;
        assert!(matches!(Isometry4::from_matrix(bad), Err(QuatError::NotOrthogonal { .. })));
    }

    #[test]
    fn defect_map_of_equal_arguments() {
        let d = conjugation_defect(Q::i(), Q::i());
        assert_eq!(d.rank, 2);
        // kernel = span{1, i}
        for k in &d.kernel {
            assert!(k.y.abs() < 1e-12 && k.z.abs() < 1e-12);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a: Q = haar(&mut rng);
        let d = conjugation_defect(a, a);
        assert!(d.apply(Quaternion::one()).norm() < 1e-14);
        assert!(d.apply(a.quaternion()).norm() < 1e-14);
    }

    #[test]
    fn defect_map_of_conjugate_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let a: Q = haar(&mut rng);
            let g: Q = haar(&mut rng);
            let b = g.conjugate(a);
            let d = conjugation_defect(a, b);
            assert_eq!(d.rank, 2);
            assert!(d.singular_values.iter().filter(|s| **s > 1e-6).count() == 2);
            // image is not contained in the imaginary subspace
            assert!(d.image.iter().any(|v| v.w.abs() > 1e-6));
            // kernel elements conjugate b to a
            for k in &d.kernel {
                let x = Q::try_normalize(*k).unwrap();
                assert!(x.conjugate(b).distance(a) < 1e-9);
            }
        }
    }
}
