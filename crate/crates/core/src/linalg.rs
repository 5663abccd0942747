use nalgebra::{ComplexField, DMatrix};

use crate::network::C64;

pub const DEFAULT_SVD_REL_TOL: f64 = 1e-10;

/// Moore–Penrose pseudoinverse; singular values below `rel_tol * σ_max` are
/// treated as zero.
///
/// The singular triplets come from the Hermitian eigendecomposition of
/// [[0, A], [A†, 0]], whose eigenvalues are ±σ. nalgebra's bidiagonal SVD
/// can return a factorisation that does not reproduce A on some
/// rank-deficient inputs, so it is only a checked fallback here.
pub fn pseudoinverse<T>(m: &DMatrix<T>, rel_tol: f64) -> DMatrix<T>
where
    T: ComplexField<RealField = f64>,
{
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return DMatrix::zeros(c, r);
    }
    let primary = pinv_jordan_wielandt(m, rel_tol);
    let defect = penrose_defect(m, &primary);
    if defect <= PENROSE_TOL {
        return primary;
    }
    [1e-14, 1e-12]
        .into_iter()
        .filter_map(|eps| pinv_svd(m, rel_tol, eps))
        .map(|p| (penrose_defect(m, &p), p))
        .chain(std::iter::once((defect, primary)))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, p)| p)
        .expect("primary candidate")
}

const PENROSE_TOL: f64 = 1e-9;

fn pinv_jordan_wielandt<T>(m: &DMatrix<T>, rel_tol: f64) -> DMatrix<T>
where
    T: ComplexField<RealField = f64>,
{
    let (r, c) = m.shape();
    let n = r + c;
    let mut j = DMatrix::<T>::zeros(n, n);
    j.view_mut((0, r), (r, c)).copy_from(m);
    j.view_mut((r, 0), (c, r)).copy_from(&m.adjoint());
    let eig = j.symmetric_eigen();
    let smax = eig.eigenvalues.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let cut = rel_tol * smax;
    let keep: Vec<usize> = (0..n).filter(|&k| eig.eigenvalues[k].abs() > cut && smax > 0.0).collect();
    let top = DMatrix::from_fn(r, keep.len(), |i, k| eig.eigenvectors[(i, keep[k])].clone());
    let bottom = DMatrix::from_fn(c, keep.len(), |i, k| {
        eig.eigenvectors[(r + i, keep[k])].clone().unscale(eig.eigenvalues[keep[k]])
    });
    bottom * top.adjoint()
}

fn pinv_svd<T>(m: &DMatrix<T>, rel_tol: f64, eps: f64) -> Option<DMatrix<T>>
where
    T: ComplexField<RealField = f64>,
{
    let (r, c) = m.shape();
    let svd = m.clone().try_svd(true, true, eps, 10_000)?;
    let u = svd.u?;
    let v_t = svd.v_t?;
    let sigma = &svd.singular_values;
    let cut = rel_tol * sigma.iter().cloned().fold(0.0, f64::max);
    let mut out = DMatrix::<T>::zeros(c, r);
    for (i, &s) in sigma.iter().enumerate() {
        if s > cut && s > 0.0 {
            out += (v_t.row(i).adjoint() * u.column(i).adjoint()).map(|x| x.unscale(s));
        }
    }
    Some(out)
}

/// Relative defect of the two Penrose identities AXA = A and XAX = X.
pub fn penrose_defect<T>(a: &DMatrix<T>, x: &DMatrix<T>) -> f64
where
    T: ComplexField<RealField = f64>,
{
    let scale = |m: &DMatrix<T>| m.iter().fold(0.0f64, |acc, z| acc.max(z.clone().modulus())).max(f64::MIN_POSITIVE);
    let axa = max_abs_diff(&(a * x * a), a) / scale(a);
    let xax = max_abs_diff(&(x * a * x), x) / scale(x);
    axa.max(xax)
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff<T>(a: &DMatrix<T>, b: &DMatrix<T>) -> f64
where
    T: ComplexField<RealField = f64>,
{
    a.iter().zip(b.iter()).map(|(x, y)| (x.clone() - y.clone()).modulus()).fold(0.0, f64::max)
}

/// max of the self-adjointness and idempotence defects of `p`.
pub fn projector_defect(p: &DMatrix<C64>) -> f64 {
    let herm = max_abs_diff(p, &p.adjoint());
    let idem = max_abs_diff(&(p * p), p);
    herm.max(idem)
}
