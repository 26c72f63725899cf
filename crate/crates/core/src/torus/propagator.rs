use faer::{c64, Mat, MatRef};

use super::observable::frequency_to_translation;
use super::{weyl_quantize, TorusHilbert, TrigObservable, TranslationTable};
use crate::classical::{CatMap, Mat2};
use crate::error::{Error, Result};
use crate::linalg::{mat_pow, op_norm, unitarity_defect, PhaseTable};

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    matrix: Mat<c64>,
}

impl UnitaryOperator {
    /// Wraps a matrix after checking ‖U†U − I‖ < tol.
    pub fn new(matrix: Mat<c64>, tol: f64) -> Result<Self> {
        let d = unitarity_defect(matrix.as_ref())?;
        if d >= tol {
            return Err(Error::numerical("unitarity", d));
        }
        Ok(UnitaryOperator { matrix })
    }

    pub(crate) fn new_unchecked(matrix: Mat<c64>) -> Self {
        UnitaryOperator { matrix }
    }

    pub fn matrix(&self) -> MatRef<'_, c64> {
        self.matrix.as_ref()
    }

    pub fn into_matrix(self) -> Mat<c64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn pow(&self, p: u64) -> Mat<c64> {
        mat_pow(self.matrix.as_ref(), p)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        crate::io::encode_operator(&self.matrix)
    }
}

/// Generators of the theta group (matrices ≡ I or [[0,1],[1,0]] mod 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    /// [[0,−1],[1,0]]
    S,
    /// [[1,0],[2k,1]]
    Lower(i64),
    /// [[1,2k],[0,1]]
    Upper(i64),
    /// −I
    Parity,
}

impl Generator {
    pub fn matrix(&self) -> Mat2 {
        match *self {
            Generator::S => [[0, -1], [1, 0]],
            Generator::Lower(k) => [[1, 0], [2 * k, 1]],
            Generator::Upper(k) => [[1, 2 * k], [0, 1]],
            Generator::Parity => [[-1, 0], [0, -1]],
        }
    }
}

/// Write a quantizable map as a product g₁g₂⋯g_k of theta-group generators.
pub fn theta_factorization(map: &CatMap) -> Result<Vec<Generator>> {
    if !map.is_quantizable() {
        return Err(Error::QuantizationCondition { a: map.a, b: map.b, c: map.c, d: map.d });
    }
    let mut w = map.matrix();
    let mut gens = Vec::new();
    for _ in 0..4096 {
        let (a, b, c, d) = (w[0][0], w[0][1], w[1][0], w[1][1]);
        if c == 0 {
            if a == -1 {
                gens.push(Generator::Parity);
                w = [[-a, -b], [0, -d]];
            }
            let b = w[0][1];
            debug_assert_eq!(b % 2, 0);
            if b != 0 {
                gens.push(Generator::Upper(b / 2));
            }
            return Ok(gens);
        }
        if a != 0 && c.abs() >= a.abs() {
            let k = (c as f64 / (2.0 * a as f64)).round() as i64;
            gens.push(Generator::Lower(k));
            w = [[a, b], [c - 2 * k * a, d - 2 * k * b]];
        } else {
            gens.push(Generator::S);
            w = [[c, d], [-a, -b]];
        }
    }
    Err(Error::numerical("theta-group factorization did not terminate", f64::NAN))
}

/// Exact quantization of one generator.
pub fn quantize_generator(h: TorusHilbert, g: Generator) -> Mat<c64> {
    let n = h.n;
    let nn = n as i64;
    let phases = PhaseTable::new(n);
    match g {
        Generator::S => {
            let s = 1.0 / (n as f64).sqrt();
            Mat::from_fn(n, n, |k, j| phases.get(2 * (j as i64 * k as i64 % nn)) * s)
        }
        Generator::Lower(k) => Mat::from_fn(n, n, |i, j| {
            if i == j {
                let j = j as i128;
                phases.get_i128(2 * k as i128 * j * j)
            } else {
                c64::new(0.0, 0.0)
            }
        }),
        Generator::Parity => Mat::from_fn(n, n, |i, j| {
            if (i + j) % n == 0 {
                c64::new(1.0, 0.0)
            } else {
                c64::new(0.0, 0.0)
            }
        }),
        Generator::Upper(k) => {
            let f = quantize_generator(h, Generator::S);
            let l = quantize_generator(h, Generator::Lower(-k));
            &f * &l * f.adjoint()
        }
    }
}

/// Rotate the global phase so that the first significant entry in row-major
/// order is real and positive.
fn fix_phase(m: &mut Mat<c64>) {
    let n = m.nrows();
    let thresh = 1e-8 / (n as f64).sqrt();
    'outer: for i in 0..n {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            if z.norm() > thresh {
                let rot = z.conj() / z.norm();
                for jj in 0..m.ncols() {
                    for ii in 0..n {
                        m[(ii, jj)] *= rot;
                    }
                }
                break 'outer;
            }
        }
    }
}

/// Quantized cat map U_N with U T(n) U† = T(Mn).
///
/// For |b| = 1 the discrete quadratic Gaussian kernel
/// U[j′, j] = (iNb)^{−1/2} exp(iπ(a j² − 2 j j′ + d j′²)/(Nb)) is used;
/// otherwise the map is factored into theta-group generators whose
/// quantizations are exact.
pub fn cat_propagator(h: TorusHilbert, map: &CatMap) -> Result<UnitaryOperator> {
    if !map.is_quantizable() {
        return Err(Error::QuantizationCondition { a: map.a, b: map.b, c: map.c, d: map.d });
    }
    let n = h.n;
    let mut m = if map.b.abs() == 1 {
        let phases = PhaseTable::new(n);
        let (a, b, d) = (map.a as i128, map.b as i128, map.d as i128);
        let scale = 1.0 / (n as f64).sqrt();
        Mat::from_fn(n, n, |jp, j| {
            let (j, jp) = (j as i128, jp as i128);
            // 1/b = b when |b| = 1
            phases.get_i128(b * (a * j * j - 2 * j * jp + d * jp * jp)) * scale
        })
    } else {
        let gens = theta_factorization(map)?;
        let mut u = crate::linalg::identity(n);
        for g in gens {
            u = &u * quantize_generator(h, g);
        }
        u
    };
    fix_phase(&mut m);
    Ok(UnitaryOperator::new_unchecked(m))
}

/// max over the given n of ‖U T(n) U† − T(Mn)‖_op.
pub fn intertwining_defect(h: TorusHilbert, u: &UnitaryOperator, map: &CatMap, ns: &[(i64, i64)]) -> Result<f64> {
    let t = TranslationTable::new(h);
    let mut worst = 0.0f64;
    for &n in ns {
        let mn = (map.a * n.0 + map.b * n.1, map.c * n.0 + map.d * n.1);
        let lhs = u.matrix() * t.left_apply(n, &u.matrix().adjoint().to_owned());
        let diff = lhs - t.matrix(mn);
        worst = worst.max(op_norm(diff.as_ref())?);
    }
    Ok(worst)
}

/// ‖U^{−t} Op(A) U^t − Op(A ∘ M^t)‖_op.
pub fn egorov_defect(h: TorusHilbert, map: &CatMap, a: &TrigObservable, t: i64) -> Result<f64> {
    let u = cat_propagator(h, map)?;
    let ut = if t >= 0 {
        u.pow(t as u64)
    } else {
        mat_pow(u.matrix().adjoint().to_owned().as_ref(), t.unsigned_abs())
    };
    let mt = map.power(t)?;
    egorov_defect_powered(h, ut.as_ref(), &mt, a)
}

/// Egorov defect given U^t and M^t, so batches can share the powers.
pub fn egorov_defect_powered(h: TorusHilbert, ut: MatRef<'_, c64>, mt: &Mat2, a: &TrigObservable) -> Result<f64> {
    let a = TrigObservable::new(a.coefficients().clone())?;
    let table = TranslationTable::new(h);
    let ut_own = ut.to_owned();
    let mut op_ut: Mat<c64> = Mat::zeros(h.n, h.n);
    for (&m, &c) in a.coefficients() {
        op_ut += table.left_apply(frequency_to_translation(m), &ut_own) * faer::Scale(c);
    }
    let lhs = ut.adjoint() * op_ut;
    let rhs = weyl_quantize(h, &a.compose_linear(mt))?;
    op_norm((lhs - rhs).as_ref())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::mat2_mul;

    fn compose(gens: &[Generator]) -> Mat2 {
        gens.iter().fold([[1, 0], [0, 1]], |acc, g| mat2_mul(&acc, &g.matrix()))
    }

    fn assert_intertwines(n: usize, map: &CatMap) {
        let h = TorusHilbert::new(n).unwrap();
        let u = cat_propagator(h, map).unwrap();
        assert!(unitarity_defect(u.matrix()).unwrap() < 1e-12);
        let d = intertwining_defect(h, &u, map, &[(1, 0), (0, 1), (1, 1), (-2, 3)]).unwrap();
        assert!(d < 1e-10, "N = {n}, {map:?}: {d:e}");
    }

    #[test]
    fn kernel_route_intertwines() {
        for n in [1, 2, 4, 7, 64, 65] {
            assert_intertwines(n, &CatMap::standard());
        }
    }

    #[test]
    fn factorization_route_intertwines() {
        let maps = [CatMap::new(1, 2, 2, 5).unwrap(), CatMap::new(5, 2, 2, 1).unwrap(), CatMap::new(7, 4, 12, 7).unwrap(), CatMap::new(-3, 2, 4, -3).unwrap()];
        for m in &maps {
            for n in [3, 8, 31] {
                assert_intertwines(n, m);
            }
        }
    }

    #[test]
    fn factorization_reproduces_matrix() {
        for m in [CatMap::standard(), CatMap::new(7, 4, 12, 7).unwrap(), CatMap::new(-3, 2, 4, -3).unwrap(), CatMap::new(1, 2, 2, 5).unwrap()] {
            let gens = theta_factorization(&m).unwrap();
            assert_eq!(compose(&gens), m.matrix(), "{gens:?}");
        }
    }

    #[test]
    fn non_quantizable_rejected() {
        let arnold = CatMap::new(2, 1, 1, 1).unwrap();
        let h = TorusHilbert::new(8).unwrap();
        assert!(matches!(cat_propagator(h, &arnold), Err(Error::QuantizationCondition { .. })));
    }

    #[test]
    fn phase_convention_first_entry_positive() {
        let h = TorusHilbert::new(16).unwrap();
        let u = cat_propagator(h, &CatMap::standard()).unwrap();
        assert!(u.matrix()[(0, 0)].re > 0.0 && u.matrix()[(0, 0)].im.abs() < 1e-15);
    }

    #[test]
    fn egorov_zero_time_is_exact() {
        let h = TorusHilbert::new(32).unwrap();
        let a = TrigObservable::cos_mode((1, 0), 2.0);
        assert_eq!(egorov_defect(h, &CatMap::standard(), &a, 0).unwrap(), 0.0);
    }

    #[test]
    fn egorov_one_and_five_steps() {
        let h = TorusHilbert::new(128).unwrap();
        let a = TrigObservable::cos_mode((1, 0), 2.0);
        assert!(egorov_defect(h, &CatMap::standard(), &a, 1).unwrap() < 1e-10);
        assert!(egorov_defect(h, &CatMap::standard(), &a, 5).unwrap() < 1e-9);
        assert!(egorov_defect(h, &CatMap::standard(), &a, -2).unwrap() < 1e-9);
    }
}
