//! Real-coefficient polynomial roots via companion-matrix eigenvalues.
//!
//! The companion matrix is balanced and reduced with the shifted Francis QR
//! iteration for upper Hessenberg matrices. Roots are then polished with a few
//! Newton steps; close real pairs are refined as roots of the derivative,
//! which recovers double roots to full precision.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_QR_ITERATIONS: usize = 60;

/// Evaluates a polynomial given by coefficients in descending degree order.
pub fn poly_eval<T: Real>(coeffs: &[T], z: Complex<T>) -> Complex<T> {
    coeffs.iter().fold(Complex::zero(), |acc, &c| {
        acc * z + Complex::new(c, T::zero())
    })
}

/// Coefficients of the derivative, descending order.
pub fn poly_derivative<T: Real>(coeffs: &[T]) -> Vec<T> {
    let n = coeffs.len().saturating_sub(1);
    coeffs[..n]
        .iter()
        .enumerate()
        .map(|(i, &c)| c * T::count(n - i))
        .collect()
}

/// All complex roots, with multiplicity, of the polynomial whose coefficients
/// are given from the leading term down to the constant term.
pub fn real_poly_roots<T: Real>(coeffs: &[T]) -> Result<Vec<Complex<T>>> {
    let lead = *coeffs
        .first()
        .ok_or_else(|| Error::Degree("empty coefficient list".into()))?;
    if lead.is_zero() || !lead.is_finite() {
        return Err(Error::Degree("leading coefficient must be nonzero".into()));
    }
    // Trailing zero coefficients are exact roots at the origin.
    let zeros = coeffs.iter().rev().take_while(|c| c.is_zero()).count();
    let coeffs = &coeffs[..coeffs.len() - zeros];
    let mut roots = vec![Complex::new(T::zero(), T::zero()); zeros];
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return Ok(roots);
    }
    // Companion matrix, 1-based storage to follow the classical hqr layout.
    let n = degree;
    let mut a = vec![vec![T::zero(); n + 1]; n + 1];
    for k in 1..=n {
        a[1][k] = -coeffs[k] / lead;
    }
    for j in 2..=n {
        a[j][j - 1] = T::one();
    }
    balance(&mut a, n);
    let raw = hqr(&mut a, n)?;
    roots.extend(polish(coeffs, raw));
    sort_roots(&mut roots);
    Ok(roots)
}

fn balance<T: Real>(a: &mut [Vec<T>], n: usize) {
    let radix = T::lit(2.0);
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 1..=n {
            let mut r = T::zero();
            let mut c = T::zero();
            for j in 1..=n {
                if j != i {
                    c = c + a[j][i].abs();
                    r = r + a[i][j].abs();
                }
            }
            if !c.is_zero() && !r.is_zero() {
                let mut g = r / radix;
                let mut f = T::one();
                let s = c + r;
                while c < g {
                    f = f * radix;
                    c = c * sqrdx;
                }
                g = r * radix;
                while c > g {
                    f = f / radix;
                    c = c / sqrdx;
                }
                if (c + r) / f < T::lit(0.95) * s {
                    done = false;
                    let g = T::one() / f;
                    for j in 1..=n {
                        a[i][j] = a[i][j] * g;
                    }
                    for j in 1..=n {
                        a[j][i] = a[j][i] * f;
                    }
                }
            }
        }
    }
}

fn sign<T: Real>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Eigenvalues of an upper Hessenberg matrix (1-based storage, destroyed).
#[allow(clippy::many_single_char_names)]
fn hqr<T: Real>(a: &mut [Vec<T>], n: usize) -> Result<Vec<Complex<T>>> {
    let mut wr = vec![T::zero(); n + 1];
    let mut wi = vec![T::zero(); n + 1];
    let mut anorm = T::zero();
    for i in 1..=n {
        for j in (i.max(2) - 1)..=n {
            anorm = anorm + a[i][j].abs();
        }
    }
    let mut nn = n;
    let mut t = T::zero();
    let (mut p, mut q, mut r);
    let (mut x, mut y, mut z);
    let mut w;
    while nn >= 1 {
        let mut its = 0;
        loop {
            // Look for a single small subdiagonal element.
            let mut l = nn;
            while l >= 2 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s.is_zero() {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = T::zero();
                    break;
                }
                l -= 1;
            }
            x = a[nn][nn];
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = T::zero();
                nn -= 1;
                break;
            }
            y = a[nn - 1][nn - 1];
            w = a[nn][nn - 1] * a[nn - 1][nn];
            if l == nn - 1 {
                p = T::lit(0.5) * (y - x);
                q = p * p + w;
                z = q.abs().sqrt();
                x = x + t;
                if q >= T::zero() {
                    z = p + sign(z, p);
                    wr[nn - 1] = x + z;
                    wr[nn] = x + z;
                    if !z.is_zero() {
                        wr[nn] = x - w / z;
                    }
                    wi[nn - 1] = T::zero();
                    wi[nn] = T::zero();
                } else {
                    wr[nn - 1] = x + p;
                    wr[nn] = x + p;
                    wi[nn - 1] = -z;
                    wi[nn] = z;
                }
                nn -= 2;
                break;
            }
            if its == MAX_QR_ITERATIONS {
                return Err(Error::Numerical {
                    msg: "QR iteration on the companion matrix did not converge".into(),
                    iterations: its,
                    residual: a[nn][nn - 1].abs().to_f64().unwrap_or(f64::NAN),
                });
            }
            if its == 10 || its == 20 {
                // Exceptional shift.
                t = t + x;
                for i in 1..=nn {
                    a[i][i] = a[i][i] - x;
                }
                let s = a[nn][nn - 1].abs() + a[nn - 1][nn - 2].abs();
                x = T::lit(0.75) * s;
                y = x;
                w = T::lit(-0.4375) * s * s;
            }
            its += 1;
            let mut m = nn - 2;
            loop {
                z = a[m][m];
                r = x - z;
                let s0 = y - z;
                p = (r * s0 - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - r - s0;
                r = a[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p = p / s;
                q = q / s;
                r = r / s;
                if m == l {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nn {
                a[i][i - 2] = T::zero();
                if i != m + 2 {
                    a[i][i - 3] = T::zero();
                }
            }
            let mut k = m;
            while k < nn {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = T::zero();
                    if k != nn - 1 {
                        r = a[k + 2][k - 1];
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if !x.is_zero() {
                        p = p / x;
                        q = q / x;
                        r = r / x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if !s.is_zero() {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * x;
                    }
                    p = p + s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q = q / p;
                    r = r / p;
                    for j in k..=nn {
                        p = a[k][j] + q * a[k + 1][j];
                        if k != nn - 1 {
                            p = p + r * a[k + 2][j];
                            a[k + 2][j] = a[k + 2][j] - p * z;
                        }
                        a[k + 1][j] = a[k + 1][j] - p * y;
                        a[k][j] = a[k][j] - p * x;
                    }
                    let mmin = nn.min(k + 3);
                    for i in l..=mmin {
                        p = x * a[i][k] + y * a[i][k + 1];
                        if k != nn - 1 {
                            p = p + z * a[i][k + 2];
                            a[i][k + 2] = a[i][k + 2] - p * r;
                        }
                        a[i][k + 1] = a[i][k + 1] - p * q;
                        a[i][k] = a[i][k] - p;
                    }
                }
                k += 1;
            }
        }
    }
    Ok((1..=n).map(|i| Complex::new(wr[i], wi[i])).collect())
}

fn newton<T: Real>(f: &[T], df: &[T], mut z: Complex<T>, steps: usize) -> Complex<T> {
    let mut best = z;
    let mut best_res = poly_eval(f, z).norm();
    for _ in 0..steps {
        let d = poly_eval(df, z);
        if d.norm().is_zero() {
            break;
        }
        z = z - poly_eval(f, z) / d;
        let res = poly_eval(f, z).norm();
        if !(res < best_res) {
            break;
        }
        best = z;
        best_res = res;
    }
    best
}

fn polish<T: Real>(coeffs: &[T], mut roots: Vec<Complex<T>>) -> Vec<Complex<T>> {
    let df = poly_derivative(coeffs);
    let ddf = poly_derivative(&df);
    let scale = coeffs.iter().fold(T::zero(), |m, c| m.max(c.abs()));
    for r in roots.iter_mut() {
        *r = newton(coeffs, &df, *r, 8);
    }
    // Real pairs that sit within sqrt(eps) of each other are treated as a
    // double root and refined as a root of the derivative.
    let cluster = T::epsilon().sqrt() * T::lit(64.0) * (T::one() + scale);
    let n = roots.len();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (roots[i], roots[j]);
            if (a - b).norm() < cluster && a.im.abs() < cluster && b.im.abs() < cluster {
                let mid = Complex::new((a.re + b.re) * T::lit(0.5), T::zero());
                let refined = newton(&df, &ddf, mid, 16);
                let res_new = poly_eval(coeffs, refined).norm();
                let res_old = poly_eval(coeffs, a).norm().max(poly_eval(coeffs, b).norm());
                if res_new <= res_old {
                    roots[i] = refined;
                    roots[j] = refined;
                }
            }
        }
    }
    sort_roots(&mut roots);
    roots
}

/// Ascending by real part, then imaginary part.
fn sort_roots<T: Real>(roots: &mut [Complex<T>]) {
    roots.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reals(roots: &[Complex<f64>]) -> Vec<f64> {
        roots.iter().map(|z| z.re).collect()
    }

    #[test]
    fn quartic_zero() {
        let r = real_poly_roots(&[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(r.len(), 4);
        assert!(r.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn quadratic() {
        // (z - 1)(z + 2) = z^2 + z - 2
        let r = real_poly_roots(&[1.0, 1.0, -2.0]).unwrap();
        let re = reals(&r);
        assert!((re[0] + 2.0).abs() < 1e-14 && (re[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gap_quartic_with_double_root() {
        let c = [1.0, -1.0, 0.0, 5.0 / 27.0, -1.0 / 27.0];
        let r = real_poly_roots(&c).unwrap();
        let s13 = 13f64.sqrt();
        let expect = [(1.0 - s13) / 6.0, 1.0 / 3.0, 1.0 / 3.0, (1.0 + s13) / 6.0];
        for (z, e) in r.iter().zip(expect) {
            assert!((z.re - e).abs() < 1e-12, "{z} vs {e}");
            assert!(z.im.abs() < 1e-12);
            assert!(poly_eval(&c, *z).norm() <= 1e-9);
        }
    }

    #[test]
    fn complex_pair() {
        // z^2 + 1
        let r = real_poly_roots(&[1.0f64, 0.0, 1.0]).unwrap();
        assert!((r[0].im + 1.0).abs() < 1e-14 && (r[1].im - 1.0).abs() < 1e-14);
    }

    #[test]
    fn degree_errors() {
        assert!(matches!(
            real_poly_roots(&[0.0, 1.0]),
            Err(Error::Degree(_))
        ));
        assert!(matches!(real_poly_roots::<f64>(&[]), Err(Error::Degree(_))));
        assert!(real_poly_roots(&[3.0]).unwrap().is_empty());
    }

    #[test]
    fn single_precision_roots() {
        let r = real_poly_roots(&[1.0f32, -3.0, 2.0]).unwrap();
        assert!((r[0].re - 1.0).abs() < 1e-5 && (r[1].re - 2.0).abs() < 1e-5);
    }
}
