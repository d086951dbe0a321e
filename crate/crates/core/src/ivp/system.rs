use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::IvpError;
use crate::residue::PoleSpec;

/// `A a = b` for the Laurent coefficients. Unknowns are ordered pole-major,
/// order-minor: `a_{1,1}, .., a_{r_1,1}, a_{1,2}, ..`; row `n` imposes
/// `phi^(n)(0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct IvpSystem {
    pub matrix: DMatrix<Complex64>,
    pub rhs: DVector<Complex64>,
}

/// Row `n` encodes `phi_n - L_n = sum_i d^n/dt^n [P_i(t) e^(w_i t)]_(t=0)`,
/// whose coefficient of `a_{j+1,i}` is `C(n, j) w_i^(n-j)` for `j <= n`.
pub fn assemble_ivp_system(
    poles: &[PoleSpec],
    l_values: &[Complex64],
    initial_values: &[Complex64],
) -> Result<IvpSystem, IvpError> {
    let k: usize = poles.iter().map(|p| p.order).sum();
    if initial_values.len() != k {
        return Err(IvpError::ShapeMismatch {
            expected: k,
            got: initial_values.len(),
        });
    }
    if l_values.len() < k {
        return Err(IvpError::ShapeMismatch {
            expected: k,
            got: l_values.len(),
        });
    }
    let mut matrix = DMatrix::from_element(k, k, Complex64::new(0.0, 0.0));
    for n in 0..k {
        let mut col = 0;
        for p in poles {
            // C(n, j) built incrementally
            let mut binom = 1.0;
            for j in 0..p.order {
                if j > 0 {
                    binom *= (n + 1 - j) as f64 / j as f64;
                }
                if j <= n {
                    matrix[(n, col)] = p.location.powu((n - j) as u32) * binom;
                }
                col += 1;
            }
        }
    }
    let rhs = DVector::from_iterator(
        k,
        initial_values.iter().zip(l_values).map(|(phi, l)| phi - l),
    );
    Ok(IvpSystem { matrix, rhs })
}

/// Solves the system by LU with partial pivoting and returns the solution
/// with the 2-norm condition number `sigma_max/sigma_min`. Fails with
/// `GenericityFailure` when `sigma_min/sigma_max < tol`.
pub fn solve_ivp_system(system: &IvpSystem, tol: f64) -> Result<(Vec<Complex64>, f64), IvpError> {
    let k = system.matrix.nrows();
    if system.matrix.ncols() != k || system.rhs.len() != k {
        return Err(IvpError::ShapeMismatch {
            expected: k,
            got: system.matrix.ncols().min(system.rhs.len()),
        });
    }
    if k == 0 {
        return Ok((Vec::new(), 1.0));
    }
    let sv = system.matrix.clone().singular_values();
    let smax = sv.max();
    let smin = sv.min();
    let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
    if !(ratio >= tol) {
        return Err(IvpError::GenericityFailure { ratio });
    }
    let x = system
        .matrix
        .clone()
        .lu()
        .solve(&system.rhs)
        .ok_or(IvpError::GenericityFailure { ratio })?;
    Ok((x.iter().copied().collect(), 1.0 / ratio))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_simple_pole() {
        let s = assemble_ivp_system(&[PoleSpec::simple(c(2.0, 0.0))], &[c(0.25, 0.0)], &[c(1.0, 0.0)])
            .unwrap();
        assert_eq!(s.matrix[(0, 0)], c(1.0, 0.0));
        assert_eq!(s.rhs[0], c(0.75, 0.0));
    }

    #[test]
    fn vandermonde() {
        let poles = [PoleSpec::simple(c(0.0, 1.0)), PoleSpec::simple(c(0.0, -1.0))];
        let s = assemble_ivp_system(&poles, &[c(0.0, 0.0); 2], &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(s.matrix[(1, 0)], c(0.0, 1.0));
        assert_eq!(s.matrix[(1, 1)], c(0.0, -1.0));
        let (a, cond) = solve_ivp_system(&s, 1e-10).unwrap();
        assert!((a[0] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((a[1] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((cond - 1.0).abs() < 1e-12);
    }

    #[test]
    fn double_pole_at_origin_is_identity() {
        let s = assemble_ivp_system(
            &[PoleSpec::new(c(0.0, 0.0), 2).unwrap()],
            &[c(0.1, 0.0), c(0.2, 0.0)],
            &[c(1.0, 0.0), c(2.0, 0.0)],
        )
        .unwrap();
        assert_eq!(s.matrix, DMatrix::identity(2, 2));
        let (a, _) = solve_ivp_system(&s, 1e-10).unwrap();
        assert_eq!(a, vec![c(0.9, 0.0), c(1.8, 0.0)]);
    }

    #[test]
    fn repeated_pole_is_not_generic() {
        let p = PoleSpec::simple(c(0.3, 0.0));
        let s = assemble_ivp_system(&[p, p], &[c(0.0, 0.0); 2], &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(
            solve_ivp_system(&s, 1e-10),
            Err(IvpError::GenericityFailure { .. })
        ));
    }

    #[test]
    fn shape_mismatch() {
        let p = PoleSpec::new(c(0.0, 0.0), 2).unwrap();
        assert!(assemble_ivp_system(&[p], &[c(0.0, 0.0); 2], &[c(1.0, 0.0)]).is_err());
    }
}
