//! Concrete su(2) matrix algebra.
//!
//! The basis is `E_J = i·σ_J`. Structure constants are measured from the
//! matrices, never assumed; the measured sign `s` in `c_{JKL} = 2s·ε_{JKL}`
//! is what the field modules use to translate between group elements and
//! coefficient fields.

use crate::error::{Error, Result};
use crate::report::RunReport;
use crate::tensor::levi;
use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Mat2c = Matrix2<Complex64>;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const CI: Complex64 = Complex64::new(0.0, 1.0);

pub fn pauli() -> [Mat2c; 3] {
    [
        Mat2c::new(C0, C1, C1, C0),
        Mat2c::new(C0, -CI, CI, C0),
        Mat2c::new(C1, C0, C0, -C1),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Su2Basis {
    pub e: [Mat2c; 3],
}

impl Su2Basis {
    /// `E_J = i σ_J`.
    pub fn standard() -> Self {
        let s = pauli();
        Self {
            e: [s[0] * CI, s[1] * CI, s[2] * CI],
        }
    }

    /// `U E_J U†` for a unitary `U`.
    pub fn conjugated(u: &Mat2c) -> Self {
        let std = Self::standard();
        let ud = u.adjoint();
        Self {
            e: std.e.map(|m| u * m * ud),
        }
    }

    pub fn scaled(factor: f64) -> Self {
        let std = Self::standard();
        Self {
            e: std.e.map(|m| m * Complex64::new(factor, 0.0)),
        }
    }
}

impl Default for Su2Basis {
    fn default() -> Self {
        Self::standard()
    }
}

/// Structure constants `[E_J, E_K] = Σ_L c_{JKL} E_L` and their sign
/// relative to `2ε_{JKL}`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureData {
    pub basis: Su2Basis,
    pub c: [[[f64; 3]; 3]; 3],
    pub sign: f64,
}

impl StructureData {
    /// Structure data of the standard basis. Panics only if the standard
    /// basis itself were broken.
    pub fn standard() -> Self {
        derive_structure_constants(&Su2Basis::standard()).expect("standard basis is valid")
    }
}

pub fn commutator(x: &Mat2c, y: &Mat2c) -> Mat2c {
    x * y - y * x
}

/// `⟨X, Y⟩ = −½ Re Tr(XY)`.
pub fn inner(x: &Mat2c, y: &Mat2c) -> f64 {
    debug_assert!(skew_hermitian_defect(x) < 1e-9 && skew_hermitian_defect(y) < 1e-9);
    -0.5 * (x * y).trace().re
}

fn skew_hermitian_defect(x: &Mat2c) -> f64 {
    max_abs_c(&(x + x.adjoint()))
}

pub fn max_abs_c(m: &Mat2c) -> f64 {
    m.iter().fold(0.0_f64, |a, z| a.max(z.norm()))
}

/// Computes `c_{JKL} = ⟨[E_J, E_K], E_L⟩` and the sign read off `c_{123}`.
pub fn derive_structure_constants(basis: &Su2Basis) -> Result<StructureData> {
    let mut c = [[[0.0; 3]; 3]; 3];
    let mut deviation = 0.0_f64;
    for j in 0..3 {
        for k in 0..3 {
            let br = commutator(&basis.e[j], &basis.e[k]);
            for l in 0..3 {
                let v = -0.5 * (br * basis.e[l]).trace().re;
                c[j][k][l] = v;
                deviation = deviation.max((v.abs() - 2.0 * levi(j, k, l).abs()).abs());
            }
        }
    }
    if deviation > 1e-10 {
        return Err(Error::ConventionError { deviation });
    }
    let sign = if c[0][1][2] < 0.0 { -1.0 } else { 1.0 };
    Ok(StructureData {
        basis: basis.clone(),
        c,
        sign,
    })
}

/// `exp(X)` for traceless skew-hermitian `X`, using `X² = −θ² I`.
pub fn su2_exp(x: &Mat2c) -> Mat2c {
    let theta = x.determinant().re.max(0.0).sqrt();
    let sinc = if theta < 1e-8 {
        1.0 - theta * theta / 6.0
    } else {
        theta.sin() / theta
    };
    Mat2c::identity() * Complex64::new(theta.cos(), 0.0) + x * Complex64::new(sinc, 0.0)
}

/// `Σ_J a_J E_J` in the standard basis.
pub fn su2_from_coeffs(a: [f64; 3]) -> Mat2c {
    let e = Su2Basis::standard().e;
    (0..3).fold(Mat2c::zeros(), |acc, j| acc + e[j] * Complex64::new(a[j], 0.0))
}

/// Deviation of `g` from SU(2): `max(|g†g − I|, |det g − 1|)`.
pub fn su2_defect(g: &Mat2c) -> f64 {
    let u = max_abs_c(&(g.adjoint() * g - Mat2c::identity()));
    u.max((g.determinant() - C1).norm())
}

pub fn random_skew_hermitian(rng: &mut impl Rng) -> Mat2c {
    su2_from_coeffs([
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    ])
}

pub fn random_su2(rng: &mut impl Rng) -> Mat2c {
    su2_exp(&(random_skew_hermitian(rng) * Complex64::new(2.0, 0.0)))
}

fn random_complex(rng: &mut impl Rng) -> Mat2c {
    Mat2c::from_fn(|_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

const IDENTITY_TOL: f64 = 1e-12;
const RANDOM_TRIPLES: usize = 100;

/// Identity suite for the standard basis.
pub fn verify_identities() -> RunReport {
    verify_identities_for(&Su2Basis::standard(), 0x5eed)
}

/// Runs every algebra identity on `basis`; failures are recorded in the report.
pub fn verify_identities_for(basis: &Su2Basis, seed: u64) -> RunReport {
    let mut rep = RunReport::new("algebra-verify");
    let e = &basis.e;
    let id = Mat2c::identity();

    let skew = e
        .iter()
        .map(|m| skew_hermitian_defect(m).max(m.trace().norm()))
        .fold(0.0, f64::max);
    rep.check_le("skew_hermitian_traceless", skew, IDENTITY_TOL);

    let sq = e.iter().map(|m| max_abs_c(&(m * m + id))).fold(0.0, f64::max);
    rep.check_le("square_is_minus_identity", sq, IDENTITY_TOL);

    let mut ortho = 0.0_f64;
    for j in 0..3 {
        for k in 0..3 {
            let v = -(e[j] * e[k]).trace().re;
            let want = if j == k { 2.0 } else { 0.0 };
            ortho = ortho.max((v - want).abs());
        }
    }
    rep.check_le("trace_orthonormality", ortho, IDENTITY_TOL);

    // [E_J, E_K] = −2 ε_{JKL} E_L
    let mut comm = 0.0_f64;
    for j in 0..3 {
        for k in 0..3 {
            let mut want = Mat2c::zeros();
            for l in 0..3 {
                want += e[l] * Complex64::new(-2.0 * levi(j, k, l), 0.0);
            }
            comm = comm.max(max_abs_c(&(commutator(&e[j], &e[k]) - want)));
        }
    }
    rep.check_le("commutation_relations", comm, IDENTITY_TOL);

    match derive_structure_constants(basis) {
        Ok(sd) => {
            let mut dev = 0.0_f64;
            let mut asym = 0.0_f64;
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        dev = dev.max((sd.c[j][k][l].abs() - 2.0 * levi(j, k, l).abs()).abs());
                        asym = asym.max((sd.c[j][k][l] + sd.c[k][j][l]).abs());
                    }
                }
            }
            rep.check_le("structure_constant_magnitude", dev, IDENTITY_TOL);
            rep.check_le("structure_constant_antisymmetry", asym, IDENTITY_TOL);
            let c123 = sd.c[0][1][2];
            let triple = -(e[0] * commutator(&e[1], &e[2])).trace().re;
            rep.set("measured_c123", c123);
            rep.set("measured_sign", sd.sign);
            rep.set("measured_minus_trace_e1_e2e3", triple);
            // The commonly quoted identity −Tr(E_J[E_K,E_L]) = +4ε_{JKL} does not
            // hold with these commutation relations; record what is measured.
            let discrepancy = (triple - 4.0).abs() > 1e-9;
            rep.set("triple_product_sign_discrepancy", discrepancy);
            rep.push(
                "triple_product_magnitude",
                (triple.abs() - 4.0).abs(),
                IDENTITY_TOL,
                (triple.abs() - 4.0).abs() <= IDENTITY_TOL,
                Some(format!(
                    "−Tr(E1[E2,E3]) = {triple}; the +4ε form of this identity has the opposite sign"
                )),
            );
        }
        Err(Error::ConventionError { deviation }) => {
            rep.push(
                "structure_constant_magnitude",
                deviation,
                IDENTITY_TOL,
                false,
                Some("basis violates |c| = 2|ε|".into()),
            );
        }
        Err(other) => unreachable!("unexpected error {other}"),
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cyc = 0.0_f64;
    let mut adinv = 0.0_f64;
    for _ in 0..RANDOM_TRIPLES {
        let (x, y, z) = (
            random_complex(&mut rng),
            random_complex(&mut rng),
            random_complex(&mut rng),
        );
        let a = (x * commutator(&y, &z)).trace();
        let b = (z * commutator(&x, &y)).trace();
        let c = (y * commutator(&z, &x)).trace();
        cyc = cyc.max((a - b).norm()).max((a - c).norm());

        let (u, v, w) = (
            random_skew_hermitian(&mut rng),
            random_skew_hermitian(&mut rng),
            random_skew_hermitian(&mut rng),
        );
        adinv = adinv.max((inner(&commutator(&u, &v), &w) + inner(&v, &commutator(&u, &w))).abs());
    }
    rep.check_le("trace_cyclicity", cyc, IDENTITY_TOL);
    rep.check_le("ad_invariance", adinv, IDENTITY_TOL);
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Mat2c, b: &Mat2c) -> bool {
        max_abs_c(&(a - b)) < 1e-14
    }

    #[test]
    fn commutator_examples() {
        let e = Su2Basis::standard().e;
        assert!(close(&commutator(&e[0], &e[1]), &(e[2] * Complex64::new(-2.0, 0.0))));
        assert!(close(&commutator(&e[1], &e[2]), &(e[0] * Complex64::new(-2.0, 0.0))));
        assert!(close(&commutator(&e[0], &e[0]), &Mat2c::zeros()));
    }

    #[test]
    fn inner_examples() {
        let e = Su2Basis::standard().e;
        assert!((inner(&e[0], &e[0]) - 1.0).abs() < 1e-15);
        assert!(inner(&e[0], &e[1]).abs() < 1e-15);
        assert_eq!(inner(&Mat2c::zeros(), &e[2]), 0.0);
    }

    #[test]
    fn structure_constants_standard() {
        let sd = StructureData::standard();
        assert_eq!(sd.c[0][1][2], -2.0);
        assert_eq!(sd.sign, -1.0);
        assert_eq!(sd.c[0][0][1], 0.0);
        let again = derive_structure_constants(&Su2Basis::standard()).unwrap();
        assert_eq!(sd, again);
    }

    #[test]
    fn scaled_basis_is_rejected_and_flagged() {
        let b = Su2Basis::scaled(2.0);
        assert!(matches!(
            derive_structure_constants(&b),
            Err(Error::ConventionError { .. })
        ));
        let rep = verify_identities_for(&b, 1);
        assert!(!rep.passed);
        assert!(!rep.check("trace_orthonormality").unwrap().passed);
    }

    #[test]
    fn conjugated_basis_passes() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = random_su2(&mut rng);
        let rep = verify_identities_for(&Su2Basis::conjugated(&u), 3);
        assert!(rep.passed, "{}", rep.to_json());
    }

    #[test]
    fn exp_is_in_su2_and_matches_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let x = random_skew_hermitian(&mut rng);
            let g = su2_exp(&x);
            assert!(su2_defect(&g) < 1e-14);
            let mut term = Mat2c::identity();
            let mut sum = Mat2c::identity();
            for n in 1..30 {
                term = term * x * Complex64::new(1.0 / n as f64, 0.0);
                sum += term;
            }
            assert!(max_abs_c(&(sum - g)) < 1e-13);
        }
    }
}
