//! Small trivariate polynomials with exact gradient and Hessian. Used for the
//! radial bump fields of the perturbed spheres, where hand-chained analytic
//! derivatives keep the curvature data exact.

use crate::scalar::Real;

/// Sum of monomials `coeff * x^i y^j z^k`.
#[derive(Debug, Clone)]
pub struct TriPoly<T> {
    terms: Vec<(u8, u8, u8, T)>,
}

impl<T: Real> TriPoly<T> {
    pub fn new(terms: Vec<(u8, u8, u8, T)>) -> Self {
        Self { terms }
    }

    pub fn eval(&self, p: &[T; 3]) -> T {
        let mut s = T::zero();
        for &(i, j, k, c) in &self.terms {
            s += c * pow(p[0], i) * pow(p[1], j) * pow(p[2], k);
        }
        s
    }

    pub fn gradient(&self, p: &[T; 3]) -> [T; 3] {
        let mut g = [T::zero(); 3];
        for &(i, j, k, c) in &self.terms {
            if i > 0 {
                g[0] += c * T::of_usize(i as usize) * pow(p[0], i - 1) * pow(p[1], j) * pow(p[2], k);
            }
            if j > 0 {
                g[1] += c * T::of_usize(j as usize) * pow(p[0], i) * pow(p[1], j - 1) * pow(p[2], k);
            }
            if k > 0 {
                g[2] += c * T::of_usize(k as usize) * pow(p[0], i) * pow(p[1], j) * pow(p[2], k - 1);
            }
        }
        g
    }

    /// Symmetric Hessian, row-major.
    pub fn hessian(&self, p: &[T; 3]) -> [[T; 3]; 3] {
        let mut h = [[T::zero(); 3]; 3];
        for &(i, j, k, c) in &self.terms {
            let e = [i, j, k];
            for a in 0..3 {
                for b in a..3 {
                    let mut ea = e;
                    let fa = ea[a];
                    if fa == 0 {
                        continue;
                    }
                    ea[a] -= 1;
                    let fb = ea[b];
                    if fb == 0 {
                        continue;
                    }
                    ea[b] -= 1;
                    let factor = T::of_usize(fa as usize) * T::of_usize(fb as usize);
                    let v = c
                        * factor
                        * pow(p[0], ea[0])
                        * pow(p[1], ea[1])
                        * pow(p[2], ea[2]);
                    h[a][b] += v;
                    if a != b {
                        h[b][a] += v;
                    }
                }
            }
        }
        h
    }

    /// Sum of coefficient magnitudes; bounds `|eval|` on the unit sphere.
    pub fn coeff_l1(&self) -> T {
        self.terms.iter().map(|&(_, _, _, c)| c.abs()).sum()
    }

    pub fn scale(&mut self, s: T) {
        for t in &mut self.terms {
            t.3 = t.3 * s;
        }
    }
}

fn pow<T: Real>(x: T, n: u8) -> T {
    let mut r = T::one();
    for _ in 0..n {
        r = r * x;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    // p = x^2 y + 3 z^3
    fn sample() -> TriPoly<f64> {
        TriPoly::new(vec![(2, 1, 0, 1.0), (0, 0, 3, 3.0)])
    }

    #[test]
    fn eval_grad_hess_agree_with_hand_derivatives() {
        let p = sample();
        let at = [1.5, -2.0, 0.5];
        assert!((p.eval(&at) - (1.5f64.powi(2) * -2.0 + 3.0 * 0.125)).abs() < 1e-14);
        let g = p.gradient(&at);
        assert!((g[0] - 2.0 * 1.5 * -2.0).abs() < 1e-14);
        assert!((g[1] - 1.5f64.powi(2)).abs() < 1e-14);
        assert!((g[2] - 9.0 * 0.25).abs() < 1e-14);
        let h = p.hessian(&at);
        assert!((h[0][0] - 2.0 * -2.0).abs() < 1e-14);
        assert!((h[0][1] - 2.0 * 1.5).abs() < 1e-14);
        assert_eq!(h[0][1], h[1][0]);
        assert!((h[2][2] - 18.0 * 0.5).abs() < 1e-14);
        assert_eq!(h[1][2], 0.0);
    }

    #[test]
    fn hessian_matches_finite_differences() {
        let p = sample();
        let at = [0.3, 0.7, -0.2];
        let h = 1e-5;
        for a in 0..3 {
            for b in 0..3 {
                let mut pp = at;
                pp[a] += h;
                pp[b] += h;
                let mut pm = at;
                pm[a] += h;
                pm[b] -= h;
                let mut mp = at;
                mp[a] -= h;
                mp[b] += h;
                let mut mm = at;
                mm[a] -= h;
                mm[b] -= h;
                let fd =
                    (p.eval(&pp) - p.eval(&pm) - p.eval(&mp) + p.eval(&mm)) / (4.0 * h * h);
                assert!(
                    (fd - p.hessian(&at)[a][b]).abs() < 1e-5,
                    "entry ({a},{b})"
                );
            }
        }
    }
}
