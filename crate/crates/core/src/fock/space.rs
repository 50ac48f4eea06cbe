//! Truncated product Fock space and normal-ordered ladder monomials.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::dense::DenseMatrix;

/// Product of single-mode spaces with occupations 0..=cutoff, indexed
/// row-major (first mode most significant).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockSpace {
    labels: Vec<&'static str>,
    cutoffs: Vec<usize>,
    strides: Vec<usize>,
    dim: usize,
}

impl FockSpace {
    pub fn new(modes: &[(&'static str, usize)]) -> Self {
        let cutoffs: Vec<usize> = modes.iter().map(|m| m.1).collect();
        let mut strides = vec![1; cutoffs.len()];
        for k in (0..cutoffs.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * (cutoffs[k + 1] + 1);
        }
        let dim = cutoffs.iter().map(|c| c + 1).product();
        FockSpace {
            labels: modes.iter().map(|m| m.0).collect(),
            cutoffs,
            strides,
            dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modes(&self) -> usize {
        self.cutoffs.len()
    }

    pub fn labels(&self) -> &[&'static str] {
        &self.labels
    }

    pub fn cutoff(&self, mode: usize) -> usize {
        self.cutoffs[mode]
    }

    pub fn mode(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| *l == label)
    }

    pub fn index(&self, occ: &[usize]) -> usize {
        occ.iter().zip(&self.strides).map(|(n, s)| n * s).sum()
    }

    pub fn occupation(&self, index: usize, mode: usize) -> usize {
        (index / self.strides[mode]) % (self.cutoffs[mode] + 1)
    }

    pub fn occupations(&self, index: usize) -> Vec<usize> {
        (0..self.modes())
            .map(|m| self.occupation(index, m))
            .collect()
    }

    /// Total probability on states with any mode at its cutoff.
    pub fn boundary_population(&self, psi: &[Complex64]) -> f64 {
        psi.iter()
            .enumerate()
            .filter(|(i, _)| (0..self.modes()).any(|m| self.occupation(*i, m) == self.cutoffs[m]))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Product state from one amplitude vector per mode.
    pub fn product_state(&self, factors: &[Vec<Complex64>]) -> Vec<Complex64> {
        let mut psi = vec![Complex64::new(0.0, 0.0); self.dim];
        for (i, a) in psi.iter_mut().enumerate() {
            let mut v = Complex64::new(1.0, 0.0);
            for (m, f) in factors.iter().enumerate() {
                v *= f.get(self.occupation(i, m)).copied().unwrap_or_default();
            }
            *a = v;
        }
        psi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Create,
    Annihilate,
}

/// coeff × product of ladder operators, applied right to left.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coeff: Complex64,
    pub ops: Vec<(usize, Ladder)>,
}

/// Sum of monomials acting on a [`FockSpace`] without storing a matrix.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Operator {
    pub terms: Vec<Monomial>,
}

impl Operator {
    pub fn zero() -> Self {
        Operator { terms: Vec::new() }
    }

    pub fn push(&mut self, coeff: Complex64, ops: &[(usize, Ladder)]) {
        if coeff != Complex64::new(0.0, 0.0) {
            self.terms.push(Monomial {
                coeff,
                ops: ops.to_vec(),
            });
        }
    }

    pub fn adjoint(&self) -> Self {
        Operator {
            terms: self
                .terms
                .iter()
                .map(|t| Monomial {
                    coeff: t.coeff.conj(),
                    ops: t
                        .ops
                        .iter()
                        .rev()
                        .map(|&(m, l)| {
                            (
                                m,
                                match l {
                                    Ladder::Create => Ladder::Annihilate,
                                    Ladder::Annihilate => Ladder::Create,
                                },
                            )
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    /// Image of basis state `index` under one monomial, if inside the truncation.
    fn apply_basis(space: &FockSpace, t: &Monomial, index: usize) -> Option<(usize, f64)> {
        let mut idx = index;
        let mut amp = 1.0;
        for &(m, l) in t.ops.iter().rev() {
            let n = space.occupation(idx, m);
            match l {
                Ladder::Annihilate => {
                    if n == 0 {
                        return None;
                    }
                    amp *= (n as f64).sqrt();
                    idx -= space.strides[m];
                }
                Ladder::Create => {
                    if n == space.cutoffs[m] {
                        return None;
                    }
                    amp *= ((n + 1) as f64).sqrt();
                    idx += space.strides[m];
                }
            }
        }
        Some((idx, amp))
    }

    pub fn apply(&self, space: &FockSpace, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); space.dim];
        for (i, &a) in psi.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for t in &self.terms {
                if let Some((j, amp)) = Self::apply_basis(space, t, i) {
                    out[j] += t.coeff * a * amp;
                }
            }
        }
        out
    }

    /// Largest column sum of |entries|, a bound on the operator norm.
    pub fn one_norm(&self, space: &FockSpace) -> f64 {
        let mut best: f64 = 0.0;
        let mut col = Vec::new();
        for i in 0..space.dim {
            col.clear();
            for t in &self.terms {
                if let Some((j, amp)) = Self::apply_basis(space, t, i) {
                    match col.iter_mut().find(|(k, _)| *k == j) {
                        Some((_, v)) => *v += t.coeff * amp,
                        None => col.push((j, t.coeff * amp)),
                    }
                }
            }
            best = best.max(col.iter().map(|(_, v): &(usize, Complex64)| v.norm()).sum());
        }
        best
    }

    pub fn to_dense(&self, space: &FockSpace) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(space.dim);
        for i in 0..space.dim {
            for t in &self.terms {
                if let Some((j, amp)) = Self::apply_basis(space, t, i) {
                    m[(j, i)] += t.coeff * amp;
                }
            }
        }
        m
    }
}

pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

pub fn axpy(y: &mut [Complex64], k: Complex64, x: &[Complex64]) {
    for (a, b) in y.iter_mut().zip(x) {
        *a += k * b;
    }
}

pub fn sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[Complex64], k: Complex64) -> Vec<Complex64> {
    a.iter().map(|x| x * k).collect()
}

/// Normalized truncated coherent-state amplitudes and the norm captured
/// before normalization.
pub fn coherent_amplitudes(alpha: Complex64, cutoff: usize) -> (Vec<Complex64>, f64) {
    let mut c = Vec::with_capacity(cutoff + 1);
    let mut v = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..=cutoff {
        if n > 0 {
            v = v * alpha / (n as f64).sqrt();
        }
        c.push(v);
    }
    let norm: f64 = c.iter().map(|x| x.norm_sqr()).sum();
    let k = 1.0 / norm.sqrt();
    (c.into_iter().map(|x| x * k).collect(), norm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        let s = FockSpace::new(&[("a", 3), ("b", 2), ("c", 4)]);
        assert_eq!(s.dim(), 4 * 3 * 5);
        for i in 0..s.dim() {
            assert_eq!(s.index(&s.occupations(i)), i);
        }
    }

    #[test]
    fn canonical_commutator_below_cutoff() {
        let s = FockSpace::new(&[("a", 6), ("b", 2)]);
        let mut aad = Operator::zero();
        aad.push(
            Complex64::new(1.0, 0.0),
            &[(0, Ladder::Annihilate), (0, Ladder::Create)],
        );
        let mut ada = Operator::zero();
        ada.push(
            Complex64::new(1.0, 0.0),
            &[(0, Ladder::Create), (0, Ladder::Annihilate)],
        );
        for i in 0..s.dim() {
            if s.occupation(i, 0) >= 6 {
                continue;
            }
            let mut e = vec![Complex64::new(0.0, 0.0); s.dim()];
            e[i] = Complex64::new(1.0, 0.0);
            let d = sub(&aad.apply(&s, &e), &ada.apply(&s, &e));
            assert!((norm_sqr(&sub(&d, &e))).sqrt() < 1e-14);
        }
    }

    #[test]
    fn annihilator_entries() {
        let s = FockSpace::new(&[("a", 5)]);
        let mut a = Operator::zero();
        a.push(Complex64::new(1.0, 0.0), &[(0, Ladder::Annihilate)]);
        let m = a.to_dense(&s);
        for n in 1..=5 {
            assert_eq!(m[(n - 1, n)].re, (n as f64).sqrt());
        }
    }

    #[test]
    fn coherent_norm() {
        let (c, norm) = coherent_amplitudes(Complex64::new(1.0, 0.5), 24);
        assert!(1.0 - norm < 1e-12);
        assert!((norm_sqr(&c) - 1.0).abs() < 1e-14);
    }
}
