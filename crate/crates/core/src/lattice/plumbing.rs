use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{integral_pairing, Class, HClass, IntersectionLattice, Zmod};
use crate::error::{Error, Result};
use crate::rational::{frac, mat_mul, rat, transpose, Matrix, Rational};

fn check_p(p: i64) -> Result<()> {
    if p < 2 {
        return Err(Error::InvalidParameter(format!("p = {p} < 2")));
    }
    Ok(())
}

/// Tridiagonal Gram matrix of C_p: diagonal (-2, ..., -2, -(p+2)), off-diagonal 1.
pub fn plumbing_matrix(p: i64) -> Result<Matrix> {
    check_p(p)?;
    let n = (p - 1) as usize;
    let mut m = crate::rational::zeros(n, n);
    for i in 0..n {
        m[i][i] = rat(if i + 1 == n { -(p + 2) } else { -2 });
        if i + 1 < n {
            m[i][i + 1] = rat(1);
            m[i + 1][i] = rat(1);
        }
    }
    Ok(m)
}

/// Closed form `(P^{-1})_{ij} = -j + ij(p+1)/p^2` for `j <= i`, symmetric.
pub fn plumbing_inverse(p: i64) -> Result<Matrix> {
    check_p(p)?;
    let n = (p - 1) as usize;
    let entry = |i: i64, j: i64| rat(-j) + frac(i * j * (p + 1), p * p);
    Ok((1..=n as i64)
        .map(|i| {
            (1..=n as i64)
                .map(|j| if j <= i { entry(i, j) } else { entry(j, i) })
                .collect()
        })
        .collect())
}

/// `p^2·P^{-1}`, which is integral.
pub fn plumbing_inverse_scaled(p: i64) -> Result<Vec<Vec<i64>>> {
    check_p(p)?;
    let entry = |i: i64, j: i64| -j * p * p + i * j * (p + 1);
    Ok((1..p)
        .map(|i| {
            (1..p)
                .map(|j| if j <= i { entry(i, j) } else { entry(j, i) })
                .collect()
        })
        .collect())
}

/// Gram matrix of `v_i = u_{p-1} + ... + u_i`.
pub fn v_basis_gram(p: i64) -> Result<Matrix> {
    let pm = plumbing_matrix(p)?;
    let n = pm.len();
    let t: Matrix = (0..n)
        .map(|i| (0..n).map(|k| rat((k >= i) as i64)).collect())
        .collect();
    Ok(mat_mul(&mat_mul(&t, &pm), &transpose(&t)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Gamma,
    Delta,
}

/// Change of coordinates on `H_2(C_p, ∂)`, with `δ_1 = γ_1`, `δ_i = γ_i − γ_{i−1}`.
pub fn basis_convert(coeffs: &[i64], from: Basis, to: Basis) -> Vec<i64> {
    let n = coeffs.len();
    match (from, to) {
        (Basis::Delta, Basis::Gamma) => (0..n)
            .map(|i| coeffs[i] - coeffs.get(i + 1).copied().unwrap_or(0))
            .collect(),
        (Basis::Gamma, Basis::Delta) => (0..n).map(|i| coeffs[i..].iter().sum()).collect(),
        _ => coeffs.to_vec(),
    }
}

/// A relative class `⟨t_1, ..., t_{p-1}⟩` in δ coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelClassCp {
    pub p: i64,
    pub delta: Vec<i64>,
}

impl RelClassCp {
    pub fn new(p: i64, delta: Vec<i64>) -> Result<Self> {
        check_p(p)?;
        if delta.len() as i64 != p - 1 {
            return Err(Error::InvalidParameter(format!(
                "relative class for p = {p} needs {} coordinates, got {}",
                p - 1,
                delta.len()
            )));
        }
        Ok(Self { p, delta })
    }

    pub fn from_coords(p: i64, coeffs: Vec<i64>, basis: Basis) -> Result<Self> {
        let delta = basis_convert(&coeffs, basis, Basis::Delta);
        Self::new(p, delta)
    }

    pub fn gamma(&self) -> Vec<i64> {
        basis_convert(&self.delta, Basis::Delta, Basis::Gamma)
    }

    pub fn coords(&self, basis: Basis) -> Vec<i64> {
        basis_convert(&self.delta, Basis::Delta, basis)
    }

    pub fn neg(&self) -> Self {
        Self {
            p: self.p,
            delta: self.delta.iter().map(|x| -x).collect(),
        }
    }
}

/// Rational intersection form on `H_2(C_p, ∂; Q)`, computed as `γ^T P^{-1} γ'`.
pub fn rel_pairing(e: &RelClassCp, e2: &RelClassCp) -> Result<Rational> {
    if e.p != e2.p {
        return Err(Error::InvalidParameter(format!(
            "p mismatch: {} vs {}",
            e.p, e2.p
        )));
    }
    let inv = plumbing_inverse(e.p)?;
    let (g, h) = (e.gamma(), e2.gamma());
    let mut s = Rational::from_integer(0.into());
    for (i, &gi) in g.iter().enumerate() {
        for (j, &hj) in h.iter().enumerate() {
            if gi != 0 && hj != 0 {
                s += &inv[i][j] * rat(gi * hj);
            }
        }
    }
    Ok(s)
}

/// `∂(Σ a_i δ_i) = Σ a_i` in `Z/p^2`.
pub fn boundary(e: &RelClassCp) -> Zmod {
    Zmod::new(e.delta.iter().sum(), e.p * e.p)
}

/// Representative of `m` in `Z/p^2 / ±1`.
pub fn residue_class(m: Zmod) -> i64 {
    m.value.min(m.modulus - m.value)
}

pub fn boundary_residue_class(e: &RelClassCp) -> i64 {
    residue_class(boundary(e))
}

/// An embedded C_p: spheres `u_1, ..., u_{p-1}` with Gram matrix `plumbing_matrix(p)`.
#[derive(Clone, Debug)]
pub struct ConfigCp {
    p: i64,
    ambient: Arc<IntersectionLattice>,
    spheres: Vec<HClass>,
}

impl ConfigCp {
    pub fn new(p: i64, ambient: &Arc<IntersectionLattice>, spheres: Vec<HClass>) -> Result<Self> {
        let pm = plumbing_matrix(p)?;
        if spheres.len() as i64 != p - 1 {
            return Err(Error::InvalidParameter(format!(
                "C_{p} needs {} spheres",
                p - 1
            )));
        }
        for (i, u) in spheres.iter().enumerate() {
            for (j, v) in spheres.iter().enumerate() {
                let g = u.dot(v)?;
                if g != pm[i][j] {
                    return Err(Error::InvalidParameter(format!(
                        "sphere Gram entry ({}, {}) is {}, expected {}",
                        i + 1,
                        j + 1,
                        g,
                        pm[i][j]
                    )));
                }
            }
            if !super::same_lattice(u.lattice(), ambient) {
                return Err(Error::LatticeMismatch);
            }
        }
        Ok(Self {
            p,
            ambient: ambient.clone(),
            spheres,
        })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn ambient(&self) -> &Arc<IntersectionLattice> {
        &self.ambient
    }

    pub fn spheres(&self) -> &[HClass] {
        &self.spheres
    }

    pub fn last(&self) -> &HClass {
        self.spheres.last().expect("p >= 2")
    }

    /// Intersection numbers `(κ·u_1, ..., κ·u_{p-1})`, which are the γ-coordinates of κ restricted to C_p.
    pub fn intersections(&self, kappa: &HClass) -> Result<Vec<i64>> {
        self.spheres
            .iter()
            .map(|u| integral_pairing(kappa, u))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{from_ints, identity, inverse};

    #[test]
    fn plumbing_examples() {
        assert_eq!(plumbing_matrix(2).unwrap(), from_ints(&[vec![-4]]));
        assert_eq!(
            plumbing_matrix(3).unwrap(),
            from_ints(&[vec![-2, 1], vec![1, -5]])
        );
        assert_eq!(
            plumbing_matrix(4).unwrap(),
            from_ints(&[vec![-2, 1, 0], vec![1, -2, 1], vec![0, 1, -6]])
        );
        assert!(plumbing_matrix(1).is_err());
        assert!(plumbing_inverse(0).is_err());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(plumbing_inverse(2).unwrap(), vec![vec![frac(-1, 4)]]);
        assert_eq!(
            plumbing_inverse(3).unwrap(),
            vec![
                vec![frac(-5, 9), frac(-1, 9)],
                vec![frac(-1, 9), frac(-2, 9)]
            ]
        );
        assert_eq!(plumbing_inverse(5).unwrap()[3][3], frac(-4, 25));
    }

    #[test]
    fn closed_form_inverse_matches_gauss_jordan() {
        for p in 2..=20 {
            let pm = plumbing_matrix(p).unwrap();
            let closed = plumbing_inverse(p).unwrap();
            assert_eq!(mat_mul(&pm, &closed), identity((p - 1) as usize));
            assert_eq!(inverse(&pm).unwrap(), closed);
            let scaled = plumbing_inverse_scaled(p).unwrap();
            for (row, srow) in closed.iter().zip(&scaled) {
                for (v, &s) in row.iter().zip(srow) {
                    assert_eq!(v * rat(p * p), rat(s));
                }
            }
        }
    }

    #[test]
    fn basis_convert_examples() {
        assert_eq!(
            basis_convert(&[1, 0, 0], Basis::Delta, Basis::Gamma),
            vec![1, 0, 0]
        );
        for t in 0..5 {
            assert_eq!(
                basis_convert(&[t, t + 1], Basis::Delta, Basis::Gamma),
                vec![-1, t + 1]
            );
        }
    }

    #[test]
    fn delta_pairings_match_closed_forms() {
        for p in 2..=20 {
            let n = (p - 1) as usize;
            let unit = |i: usize| {
                let mut v = vec![0; n];
                v[i] = 1;
                RelClassCp::new(p, v).unwrap()
            };
            for i in 0..n {
                for j in 0..n {
                    let expected = if i == j {
                        frac(-(p * p - p - 1), p * p)
                    } else {
                        frac(p + 1, p * p)
                    };
                    assert_eq!(rel_pairing(&unit(i), &unit(j)).unwrap(), expected);
                }
            }
        }
        let g1 = RelClassCp::from_coords(2, vec![1], Basis::Gamma).unwrap();
        assert_eq!(rel_pairing(&g1, &g1).unwrap(), frac(-1, 4));
    }

    #[test]
    fn gamma_is_dual_to_spheres() {
        for p in 2..=20 {
            let pm = plumbing_matrix(p).unwrap();
            let n = (p - 1) as usize;
            for k in 0..n {
                for l in 0..n {
                    let mut g = vec![0; n];
                    g[k] = 1;
                    let gamma_k = RelClassCp::from_coords(p, g, Basis::Gamma).unwrap();
                    let image: Vec<i64> = (0..n)
                        .map(|i| crate::rational::to_i64(&pm[i][l]).unwrap())
                        .collect();
                    let u_l = RelClassCp::from_coords(p, image, Basis::Gamma).unwrap();
                    assert_eq!(rel_pairing(&gamma_k, &u_l).unwrap(), rat((k == l) as i64));
                }
            }
        }
    }

    #[test]
    fn v_basis_squares() {
        for p in 2..=12 {
            let v = v_basis_gram(p).unwrap();
            for (i, row) in v.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    assert_eq!(*x, rat(if i == j { -(p + 2) } else { -(p + 1) }));
                }
            }
        }
    }

    #[test]
    fn boundary_examples() {
        let e = RelClassCp::new(3, vec![1, 2]).unwrap();
        assert_eq!(boundary(&e), Zmod::new(3, 9));
        let g3 = RelClassCp::from_coords(5, vec![0, 0, 1, 0], Basis::Gamma).unwrap();
        assert_eq!(boundary(&g3).value, 3);
        assert_eq!(
            boundary(&RelClassCp::new(4, vec![0, 0, 0]).unwrap()).value,
            0
        );
        assert_eq!(residue_class(Zmod::new(3, 4)), 1);
        assert_eq!(residue_class(Zmod::new(4, 9)), 4);
        assert_eq!(residue_class(Zmod::new(0, 9)), 0);
    }

    #[test]
    fn config_validates_gram() {
        let l = IntersectionLattice::from_ints(&["f", "e"], &[vec![0, 0], vec![0, -1]]).unwrap();
        let sigma = HClass::new(&l, vec![1, -2]).unwrap();
        assert!(ConfigCp::new(2, &l, vec![sigma]).is_ok());
        assert!(ConfigCp::new(2, &l, vec![HClass::new(&l, vec![1, -1]).unwrap()]).is_err());
        assert!(ConfigCp::new(3, &l, vec![HClass::new(&l, vec![1, -2]).unwrap()]).is_err());
    }
}
