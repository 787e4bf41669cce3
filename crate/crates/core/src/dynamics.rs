//! Single-excitation evolution under H = A(G).
//!
//! The fast path diagonalizes every Z_2^d(l) with the same normalized
//! Walsh–Hadamard transform W: `U(tau) = W diag(exp(-i lambda tau)) W`.
//! The dense path is an independent oracle built on a full symmetric
//! eigendecomposition of the adjacency matrix.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::cayley::{Adjacency, CayleyGraph};
use crate::error::{check_range, Error, Result};
use crate::spectral::{spectral_table_for, SpectralTable};

/// Largest matrix order the dense oracle accepts (d = 10).
pub const DENSE_ORACLE_CAP: usize = 1 << 10;

/// Samples used by [`fidelity_series`] callers that take the default grid.
pub const DEFAULT_SAMPLES: usize = 512;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes whose length is a power of two (any length for
    /// non-Cayley graphs evolved through the dense oracle).
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Invalid("empty state vector".into()));
        }
        Ok(Self { amplitudes })
    }

    /// Excitation localized on one node.
    pub fn basis(len: usize, node: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::Invalid("empty state vector".into()));
        }
        check_range("node index", node, 0, len - 1)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); len];
        amplitudes[node] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn amplitude(&self, node: usize) -> Complex64 {
        self.amplitudes[node]
    }

    pub fn probability(&self, node: usize) -> f64 {
        self.amplitudes[node].norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Invalid("cannot normalize a zero state".into()));
        }
        self.amplitudes.iter_mut().for_each(|a| *a /= n);
        Ok(self)
    }

    /// Largest absolute amplitude difference.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        assert_eq!(self.len(), other.len(), "state lengths differ");
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Normalized in-place Walsh–Hadamard butterfly. Self-inverse.
pub fn hadamard_in_place(data: &mut [Complex64]) -> Result<()> {
    let n = data.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::Invalid(format!("length {n} is not a power of two")));
    }
    let mut h = 1;
    while h < n {
        for block in data.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
    let scale = 1.0 / (n as f64).sqrt();
    data.iter_mut().for_each(|v| *v *= scale);
    Ok(())
}

pub fn hadamard_transform(state: &StateVector) -> Result<StateVector> {
    let mut out = state.clone();
    hadamard_in_place(&mut out.amplitudes)?;
    Ok(out)
}

/// `exp(-i lambda tau)` per Hadamard row, computed once per distinct level.
fn phase_factors(table: &SpectralTable, tau: f64) -> Vec<Complex64> {
    let mut cache: HashMap<i64, Complex64> = HashMap::new();
    table
        .eigenvalues()
        .iter()
        .map(|&e| {
            *cache
                .entry(e)
                .or_insert_with(|| Complex64::from_polar(1.0, -(e as f64) * tau))
        })
        .collect()
}

fn check_table_len(state: &StateVector, table: &SpectralTable) -> Result<()> {
    if state.len() != table.len() {
        return Err(Error::DimensionMismatch {
            expected: table.len(),
            actual: state.len(),
        });
    }
    Ok(())
}

/// Applies `U(tau) = exp(-i A tau)` through the Hadamard eigenbasis.
pub fn evolve(state: &StateVector, tau: f64, table: &SpectralTable) -> Result<StateVector> {
    check_table_len(state, table)?;
    let mut amps = state.amplitudes.clone();
    evolve_in_place(&mut amps, tau, table)?;
    Ok(StateVector { amplitudes: amps })
}

pub fn evolve_in_place(amps: &mut [Complex64], tau: f64, table: &SpectralTable) -> Result<()> {
    if amps.len() != table.len() {
        return Err(Error::DimensionMismatch {
            expected: table.len(),
            actual: amps.len(),
        });
    }
    hadamard_in_place(amps)?;
    for (a, p) in amps.iter_mut().zip(phase_factors(table, tau)) {
        *a *= p;
    }
    hadamard_in_place(amps)
}

/// Global phase `exp(-i k pi / 2)` attached to the permutation at `tau = pi/2`.
pub fn transfer_phase(table: &SpectralTable) -> Complex64 {
    Complex64::from_polar(1.0, -(table.phase_offset() as f64) * FRAC_PI_2)
}

/// Full eigendecomposition of a dense symmetric matrix, reused across
/// evolutions.
#[derive(Clone, Debug)]
pub struct DenseOracle {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl DenseOracle {
    pub fn new(adjacency: &Adjacency) -> Result<Self> {
        let n = adjacency.nrows();
        if n > DENSE_ORACLE_CAP {
            return Err(Error::TooLarge {
                size: n,
                cap: DENSE_ORACLE_CAP,
            });
        }
        if !adjacency.is_square() || n == 0 {
            return Err(Error::Invalid("adjacency matrix must be square".into()));
        }
        if *adjacency != adjacency.transpose() {
            return Err(Error::Invalid("adjacency matrix is not symmetric".into()));
        }
        let eig = SymmetricEigen::new(adjacency.map(|v| v as f64));
        Ok(Self {
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        self.eigenvalues.as_slice()
    }

    pub fn evolve(&self, state: &StateVector, tau: f64) -> Result<StateVector> {
        if state.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: state.len(),
            });
        }
        let v = &self.eigenvectors;
        let re = DVector::from_iterator(state.len(), state.amplitudes.iter().map(|a| a.re));
        let im = DVector::from_iterator(state.len(), state.amplitudes.iter().map(|a| a.im));
        let (cre, cim) = (v.tr_mul(&re), v.tr_mul(&im));
        let mut rot_re = DVector::zeros(self.dim());
        let mut rot_im = DVector::zeros(self.dim());
        for j in 0..self.dim() {
            let c = Complex64::new(cre[j], cim[j]) * Complex64::from_polar(1.0, -self.eigenvalues[j] * tau);
            rot_re[j] = c.re;
            rot_im[j] = c.im;
        }
        let (out_re, out_im) = (v * rot_re, v * rot_im);
        Ok(StateVector {
            amplitudes: out_re
                .iter()
                .zip(out_im.iter())
                .map(|(&r, &i)| Complex64::new(r, i))
                .collect(),
        })
    }
}

/// One-shot dense evolution; prefer [`DenseOracle`] for repeated use.
pub fn evolve_dense_oracle(state: &StateVector, tau: f64, adjacency: &Adjacency) -> Result<StateVector> {
    DenseOracle::new(adjacency)?.evolve(state, tau)
}

/// Ascending eigenvalues of a dense symmetric matrix.
pub fn dense_eigenvalues(adjacency: &Adjacency) -> Result<Vec<f64>> {
    let mut ev = DenseOracle::new(adjacency)?.eigenvalues().to_vec();
    ev.sort_by(|a, b| a.total_cmp(b));
    Ok(ev)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FidelitySeries {
    pub d: usize,
    pub l: usize,
    pub source: usize,
    pub target: usize,
    pub taus: Vec<f64>,
    pub p_return: Vec<f64>,
    pub p_target: Vec<f64>,
}

/// `samples` points spaced uniformly over `[0, tau_max]`, both ends included.
pub fn uniform_grid(tau_max: f64, samples: usize) -> Result<Vec<f64>> {
    if samples < 2 {
        return Err(Error::OutOfRange {
            what: "samples",
            value: samples as i64,
            min: 2,
            max: i64::MAX,
        });
    }
    if !tau_max.is_finite() || tau_max < 0.0 {
        return Err(Error::Invalid(format!("tau_max {tau_max} must be finite and non-negative")));
    }
    let step = tau_max / (samples - 1) as f64;
    Ok((0..samples)
        .map(|i| if i == samples - 1 { tau_max } else { i as f64 * step })
        .collect())
}

/// `<y| U(tau) |source>` for a fixed source and a few observed nodes.
///
/// With `W` symmetric and `W_{yb} W_{b,source} = (-1)^{b.(y ^ source)} / N`,
/// each observed amplitude is `sum_levels exp(-i lambda tau) w_y(lambda)`
/// where the real weights `w_y` are summed once per eigenvalue level. A time
/// point then costs O(#levels) instead of two transforms.
#[derive(Clone, Debug)]
pub struct ProjectedAmplitudes {
    levels: Vec<f64>,
    weights: Vec<Vec<f64>>,
}

impl ProjectedAmplitudes {
    pub fn new(table: &SpectralTable, source: usize, observed: &[usize]) -> Result<Self> {
        let n = table.len();
        check_range("source node", source, 0, n - 1)?;
        let mut distinct: Vec<i64> = table.eigenvalues().to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let level_of: HashMap<i64, usize> = distinct.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let rows: Vec<usize> = table.eigenvalues().iter().map(|e| level_of[e]).collect();
        let inv_n = 1.0 / n as f64;
        let weights = observed
            .iter()
            .map(|&y| {
                check_range("observed node", y, 0, n - 1)?;
                let mut w = vec![0.0; distinct.len()];
                let flip = y ^ source;
                for (b, &level) in rows.iter().enumerate() {
                    if (b & flip).count_ones().is_multiple_of(2) {
                        w[level] += inv_n;
                    } else {
                        w[level] -= inv_n;
                    }
                }
                Ok(w)
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            levels: distinct.iter().map(|&e| e as f64).collect(),
            weights,
        })
    }

    /// Amplitude at the `which`-th observed node.
    pub fn amplitude(&self, which: usize, tau: f64) -> Complex64 {
        self.levels
            .iter()
            .zip(&self.weights[which])
            .map(|(&e, &w)| Complex64::from_polar(w, -e * tau))
            .sum()
    }

    pub fn probability(&self, which: usize, tau: f64) -> f64 {
        self.amplitude(which, tau).norm_sqr()
    }
}

/// Return and transfer probabilities from `source` over a uniform grid.
pub fn fidelity_series(
    graph: &CayleyGraph,
    source: usize,
    target: usize,
    tau_max: f64,
    samples: usize,
) -> Result<FidelitySeries> {
    let n = graph.node_count();
    check_range("source node", source, 0, n - 1)?;
    check_range("target node", target, 0, n - 1)?;
    let table = spectral_table_for(graph)?;
    let taus = uniform_grid(tau_max, samples)?;
    let proj = ProjectedAmplitudes::new(&table, source, &[source, target])?;
    let (p_return, p_target) = taus
        .par_iter()
        .map(|&tau| (proj.probability(0, tau), proj.probability(1, tau)))
        .unzip();
    Ok(FidelitySeries {
        d: graph.dim(),
        l: graph.level(),
        source,
        target,
        taus,
        p_return,
        p_target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::{adjacency_matrix, build_path_graph, standard_graph};
    use crate::spectral::build_spectral_table;
    use crate::cayley::CoordPerm;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_state(n: usize, rng: &mut impl Rng) -> StateVector {
        let amps = (0..n)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        StateVector::new(amps).unwrap().normalized().unwrap()
    }

    fn table(d: usize, l: usize) -> SpectralTable {
        build_spectral_table(d, l, &CoordPerm::identity(d)).unwrap()
    }

    #[test]
    fn hadamard_small() {
        let s = StateVector::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let h = hadamard_transform(&s).unwrap();
        let r = 1.0 / 2f64.sqrt();
        assert!((h.amplitude(0) - c(r, 0.0)).norm() < 1e-15);
        assert!((h.amplitude(1) - c(r, 0.0)).norm() < 1e-15);
        assert!(hadamard_in_place(&mut [c(1.0, 0.0); 3]).is_err());
    }

    #[test]
    fn hadamard_involution_and_flatness() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for d in 1..=10 {
            let s = random_state(1 << d, &mut rng);
            let twice = hadamard_transform(&hadamard_transform(&s).unwrap()).unwrap();
            assert!(twice.max_deviation(&s) < 1e-13);
            let delta = hadamard_transform(&StateVector::basis(1 << d, 3 % (1 << d)).unwrap()).unwrap();
            let flat = (-(d as f64) / 2.0).exp2();
            assert!(delta.amplitudes().iter().all(|a| (a.norm() - flat).abs() < 1e-14));
        }
    }

    #[test]
    fn hadamard_matches_sign_vectors() {
        // row b of W is the sign vector with negatives b
        use crate::bits::BitVector;
        use crate::spectral::SignVector;
        let d = 4;
        for x in 0..16 {
            let w = hadamard_transform(&StateVector::basis(16, x).unwrap()).unwrap();
            for b in 0..16 {
                let s = SignVector::from_negatives(BitVector::new(b, d).unwrap());
                assert!((w.amplitude(b).re - s.amplitude(x)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn two_node_swap() {
        let t = table(1, 1);
        let psi = evolve(&StateVector::basis(2, 0).unwrap(), PI / 2.0, &t).unwrap();
        assert!((psi.amplitude(1) - c(0.0, -1.0)).norm() < 1e-14);
        assert!((transfer_phase(&t) - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn transfers_d3() {
        let psi = evolve(&StateVector::basis(8, 0).unwrap(), PI / 2.0, &table(3, 1)).unwrap();
        assert!((psi.probability(7) - 1.0).abs() < 1e-12);
        let psi = evolve(&StateVector::basis(8, 0).unwrap(), PI / 2.0, &table(3, 2)).unwrap();
        assert!((psi.probability(1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let r = evolve(&StateVector::basis(4, 0).unwrap(), 1.0, &table(3, 1));
        assert_eq!(r, Err(Error::DimensionMismatch { expected: 8, actual: 4 }));
    }

    #[test]
    fn dense_oracle_matches_fast_path() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for d in 1..=6 {
            for l in 1..=d {
                let g = standard_graph(d, l).unwrap();
                let oracle = DenseOracle::new(&adjacency_matrix(&g)).unwrap();
                let t = table(d, l);
                for _ in 0..5 {
                    let s = random_state(1 << d, &mut rng);
                    let tau = rng.gen_range(0.0..2.0 * PI);
                    let fast = evolve(&s, tau, &t).unwrap();
                    let dense = oracle.evolve(&s, tau).unwrap();
                    assert!(fast.max_deviation(&dense) < 1e-10, "d={d} l={l}");
                }
            }
        }
    }

    #[test]
    fn dense_oracle_against_taylor() {
        // third-order Taylor expansion of exp(-iA tau) at small tau
        let a = adjacency_matrix(&standard_graph(3, 2).unwrap()).map(|v| v as f64);
        let tau = 1e-3;
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let s = random_state(8, &mut rng);
        let apply = |v: &[Complex64]| -> Vec<Complex64> {
            (0..8).map(|i| (0..8).map(|j| v[j] * a[(i, j)]).sum()).collect()
        };
        let a1 = apply(s.amplitudes());
        let a2 = apply(&a1);
        let a3 = apply(&a2);
        let mi = c(0.0, -tau);
        let taylor: Vec<Complex64> = (0..8)
            .map(|i| s.amplitude(i) + mi * a1[i] + mi * mi / 2.0 * a2[i] + mi * mi * mi / 6.0 * a3[i])
            .collect();
        let dense = evolve_dense_oracle(&s, tau, &adjacency_matrix(&standard_graph(3, 2).unwrap())).unwrap();
        let taylor = StateVector::new(taylor).unwrap();
        // truncation error ~ (4 tau)^4 / 24
        assert!(dense.max_deviation(&taylor) < 1e-10);
    }

    #[test]
    fn dense_oracle_path3_transfer() {
        let p3 = build_path_graph(3).unwrap();
        let psi = evolve_dense_oracle(&StateVector::basis(3, 0).unwrap(), PI / 2f64.sqrt(), &p3).unwrap();
        assert!((psi.probability(2) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dense_oracle_limits() {
        let s = StateVector::basis(8, 2).unwrap();
        let a = adjacency_matrix(&standard_graph(3, 3).unwrap());
        assert!(evolve_dense_oracle(&s, 0.0, &a).unwrap().max_deviation(&s) < 1e-14);
        let big = Adjacency::zeros(2048, 2048);
        assert!(matches!(
            DenseOracle::new(&big),
            Err(Error::TooLarge { size: 2048, cap: 1024 })
        ));
        let mut asym = Adjacency::zeros(2, 2);
        asym[(0, 1)] = 1;
        assert!(DenseOracle::new(&asym).is_err());
    }

    #[test]
    fn unitarity_composition_reversal() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        for d in [1usize, 4, 7, 10] {
            for l in [1, d.div_ceil(2), d] {
                let t = table(d, l);
                let s = random_state(1 << d, &mut rng);
                let (t1, t2) = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
                let a = evolve(&s, t1, &t).unwrap();
                assert!((a.norm() - 1.0).abs() < 1e-12);
                let ab = evolve(&a, t2, &t).unwrap();
                let direct = evolve(&s, t1 + t2, &t).unwrap();
                assert!(ab.max_deviation(&direct) < 1e-10);
                let back = evolve(&a, -t1, &t).unwrap();
                assert!(back.max_deviation(&s) < 1e-10);
            }
        }
    }

    #[test]
    fn period_pi_is_identity_up_to_phase() {
        for d in 1..=8 {
            for l in 1..=d {
                let t = table(d, l);
                for x in [0, (1 << d) - 1, (1 << d) / 3] {
                    let psi = evolve(&StateVector::basis(1 << d, x).unwrap(), PI, &t).unwrap();
                    assert!((psi.probability(x) - 1.0).abs() < 1e-10, "d={d} l={l}");
                }
            }
        }
    }

    #[test]
    fn projection_matches_full_evolution() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(17);
        for (d, l) in [(1, 1), (3, 2), (5, 1), (6, 4), (7, 7)] {
            let t = table(d, l);
            let n = 1usize << d;
            let source = rng.gen_range(0..n);
            let observed: Vec<usize> = (0..4).map(|_| rng.gen_range(0..n)).collect();
            let proj = ProjectedAmplitudes::new(&t, source, &observed).unwrap();
            for _ in 0..5 {
                let tau = rng.gen_range(-4.0..4.0);
                let psi = evolve(&StateVector::basis(n, source).unwrap(), tau, &t).unwrap();
                for (i, &y) in observed.iter().enumerate() {
                    assert!((proj.amplitude(i, tau) - psi.amplitude(y)).norm() < 1e-12);
                }
            }
        }
        assert!(ProjectedAmplitudes::new(&table(2, 1), 0, &[4]).is_err());
    }

    #[test]
    fn grid_and_series() {
        let g = uniform_grid(PI, 3).unwrap();
        assert_eq!(g, vec![0.0, PI / 2.0, PI]);
        assert!(uniform_grid(PI, 1).is_err());
        assert!(uniform_grid(f64::NAN, 4).is_err());

        let graph = standard_graph(3, 1).unwrap();
        let s = fidelity_series(&graph, 0, 7, PI, 5).unwrap();
        assert_eq!(s.taus.len(), 5);
        assert!((s.p_return[0] - 1.0).abs() < 1e-12);
        assert!((s.p_target[2] - 1.0).abs() < 1e-12);
        assert!(s.p_target.iter().chain(&s.p_return).all(|&p| (0.0..=1.0 + 1e-12).contains(&p)));
        assert!(fidelity_series(&graph, 0, 8, PI, 5).is_err());
    }
}
