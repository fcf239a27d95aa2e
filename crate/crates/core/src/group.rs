//! The hyperoctahedral group of signed permutations acting on `l_p^n`.
//!
//! `u = (perm, signs)` acts by `(u x)_{perm[i]} = signs[i] * x_i`; every such
//! operator is an isometry of `l_p^n` for all `p`.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::linalg::Matrix;
use crate::scalar::{from_usize, Scalar};
use crate::spaces::Vector;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedPermutation {
    perm: Vec<usize>,
    negate: Vec<bool>,
}

impl SignedPermutation {
    pub fn new(perm: Vec<usize>, negate: Vec<bool>) -> Option<Self> {
        let n = perm.len();
        if negate.len() != n {
            return None;
        }
        let mut seen = vec![false; n];
        for &j in &perm {
            if j >= n || std::mem::replace(&mut seen[j], true) {
                return None;
            }
        }
        Some(Self { perm, negate })
    }

    pub fn identity(n: usize) -> Self {
        Self { perm: (0..n).collect(), negate: vec![false; n] }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        let negate = (0..n).map(|_| rng.random::<bool>()).collect();
        Self { perm, negate }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn apply<T: Scalar>(&self, x: &Vector<T>) -> Vector<T> {
        assert_eq!(x.dim(), self.dim());
        let mut out = vec![T::zero(); self.dim()];
        for (i, (&j, &neg)) in self.perm.iter().zip(&self.negate).enumerate() {
            out[j] = if neg { -x[i] } else { x[i] };
        }
        Vector::from_raw(out)
    }

    pub fn inverse(&self) -> Self {
        let n = self.dim();
        let mut perm = vec![0; n];
        let mut negate = vec![false; n];
        for (i, (&j, &neg)) in self.perm.iter().zip(&self.negate).enumerate() {
            perm[j] = i;
            negate[j] = neg;
        }
        Self { perm, negate }
    }

    /// `u^-1 l u` as a matrix: entry `(i, j)` is `s_i s_j l[perm i][perm j]`.
    pub fn conjugate<T: Scalar>(&self, l: &Matrix<T>) -> Matrix<T> {
        let n = self.dim();
        assert!(l.rows() == n && l.cols() == n);
        Matrix::from_fn(n, n, |i, j| {
            let v = l.get(self.perm[i], self.perm[j]);
            if self.negate[i] != self.negate[j] {
                -v
            } else {
                v
            }
        })
    }
}

/// All `2^n n!` signed permutations of `n` coordinates. Intended for small
/// `n` (the group has 384 elements at `n = 4`).
pub fn enumerate_signed_permutations(n: usize) -> Vec<SignedPermutation> {
    let mut perms = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    permute(&mut current, 0, &mut perms);
    let mut out = Vec::with_capacity(perms.len() << n);
    for perm in perms {
        for mask in 0u64..(1u64 << n) {
            let negate = (0..n).map(|i| mask >> i & 1 == 1).collect();
            out.push(SignedPermutation { perm: perm.clone(), negate });
        }
    }
    out
}

fn permute(v: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == v.len() {
        out.push(v.clone());
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, out);
        v.swap(k, i);
    }
}

/// Brute-force group average `(1/|U|) sum_u u^-1 l u`.
pub fn group_average<T: Scalar>(l: &Matrix<T>) -> Matrix<T> {
    let n = l.rows();
    let group = enumerate_signed_permutations(n);
    let mut acc = Matrix::zeros(n, n);
    for u in &group {
        let c = u.conjugate(l);
        for (a, b) in acc.as_mut_slice().iter_mut().zip(c.as_slice()) {
            *a += *b;
        }
    }
    acc.scaled(from_usize::<T>(group.len()).recip())
}
