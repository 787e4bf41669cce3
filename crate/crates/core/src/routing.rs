//! Node permutations realized at `tau = pi/2` and routes built from them.
//!
//! At `tau = pi/2` the evolution on Z_2^d(l) is `exp(-i k pi/2)` times an
//! XOR by a fixed mask: all ones for `l = 1`, ones on the undressed
//! coordinates for `1 < l < d`, and zero for `l = d`. Rotating the dressing
//! by a coordinate permutation moves the zeros of the mask, so any mask of
//! weight `0..=d-2` or `d` is one step away; weight `d - 1` takes two.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::{BitVector, MAX_DIM};
use crate::cayley::{build_cayley_graph, build_generating_set, CayleyGraph, CoordPerm};
use crate::dynamics::{evolve, evolve_in_place, StateVector};
use crate::error::{check_range, Error, Result};
use crate::spectral::spectral_table_for;

/// Node permutation `x -> x XOR mask` with its global phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PermutationSpec {
    pub d: usize,
    pub mask: BitVector,
    /// `k` in `exp(-i k pi/2)`, in `0..4`; `None` when the common phase is
    /// not a quarter turn.
    pub global_phase_k: Option<i64>,
}

impl PermutationSpec {
    pub fn apply(&self, node: usize) -> usize {
        node ^ self.mask.index()
    }

    pub fn is_identity(&self) -> bool {
        self.mask.is_zero()
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            d: self.d,
            mask: self.mask.xor(other.mask),
            global_phase_k: match (self.global_phase_k, other.global_phase_k) {
                (Some(a), Some(b)) => Some((a + b).rem_euclid(4)),
                _ => None,
            },
        }
    }

    /// 1-based transpositions `(a, b)` with `a < b`, ordered by `a`.
    pub fn cycles(&self) -> Vec<(usize, usize)> {
        (0..1usize << self.d)
            .filter_map(|x| {
                let y = self.apply(x);
                (x < y).then_some((x + 1, y + 1))
            })
            .collect()
    }

    /// Cycle notation, `()` for the identity.
    pub fn cycle_string(&self) -> String {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return "()".to_string();
        }
        cycles.iter().map(|(a, b)| format!("({a},{b})")).collect()
    }
}

impl fmt::Display for PermutationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.cycle_string())
    }
}

/// Mask flipped by Z_2^d(l) under `perm` at `tau = pi/2`.
pub fn transfer_mask(d: usize, l: usize, perm: &CoordPerm) -> Result<BitVector> {
    check_range("d", d, 1, MAX_DIM)?;
    check_range("l", l, 1, d)?;
    if perm.dim() != d {
        return Err(Error::InvalidPermutation {
            perm: perm.images().to_vec(),
            d,
        });
    }
    if l == 1 {
        return BitVector::ones(d);
    }
    let undressed: Vec<usize> = (l + 1..=d).map(|i| perm.image(i)).collect();
    BitVector::from_coords(&undressed, d)
}

pub fn predicted_permutation(d: usize, l: usize, perm: &CoordPerm) -> Result<PermutationSpec> {
    let mask = transfer_mask(d, l, perm)?;
    let max_eigenvalue = (1i64 << l) + d as i64 - l as i64 - 1;
    Ok(PermutationSpec {
        d,
        mask,
        global_phase_k: Some(max_eigenvalue.rem_euclid(4)),
    })
}

/// A permutation read off numerically from the evolution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtractedPermutation {
    pub permutation: PermutationSpec,
    pub phase: Complex64,
    /// Largest probability found off the image node, over all sources.
    pub max_leak: f64,
}

fn quarter_turn(phase: Complex64, tol: f64) -> Option<i64> {
    let k = (-phase.arg() / FRAC_PI_2).round() as i64;
    let k = k.rem_euclid(4);
    let nearest = Complex64::from_polar(1.0, -(k as f64) * FRAC_PI_2);
    ((phase - nearest).norm() <= tol).then_some(k)
}

/// Evolves every node basis state for `tau` and checks that each lands on
/// a single node, all with the same phase.
pub fn extract_permutation(graph: &CayleyGraph, tau: f64, tolerance: f64) -> Result<ExtractedPermutation> {
    if !(tolerance > 0.0 && tolerance <= 1e-3) {
        return Err(Error::Invalid(format!("tolerance {tolerance} outside (0, 1e-3]")));
    }
    if !tau.is_finite() || tau < 0.0 {
        return Err(Error::Invalid(format!("tau {tau} must be finite and non-negative")));
    }
    let table = spectral_table_for(graph)?;
    let n = graph.node_count();
    let images: Vec<(usize, Complex64, f64)> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut amps = vec![Complex64::new(0.0, 0.0); n];
            amps[x] = Complex64::new(1.0, 0.0);
            evolve_in_place(&mut amps, tau, &table)?;
            let (y, amp) = amps
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
                .map(|(y, a)| (y, *a))
                .expect("non-empty state");
            let leak = (1.0 - amp.norm_sqr()).max(0.0);
            Ok((y, amp, leak))
        })
        .collect::<Result<_>>()?;

    let (worst, &(_, _, max_leak)) = images
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .2.total_cmp(&b.1 .2))
        .expect("non-empty graph");
    if max_leak > tolerance {
        return Err(Error::NotAPermutation {
            node: worst,
            leaked: max_leak,
        });
    }

    let phase = images[0].1 / images[0].1.norm();
    let mask = images[0].0;
    for (x, &(y, amp, _)) in images.iter().enumerate() {
        if y != x ^ mask {
            return Err(Error::Invalid(format!(
                "node {x} maps to {y}, not a translation by {mask}"
            )));
        }
        let deviation = (amp / amp.norm() - phase).norm();
        if deviation > tolerance {
            return Err(Error::PhaseMismatch { node: x, deviation });
        }
    }
    Ok(ExtractedPermutation {
        permutation: PermutationSpec {
            d: graph.dim(),
            mask: BitVector::new(mask, graph.dim())?,
            global_phase_k: quarter_turn(phase, tolerance),
        },
        phase,
        max_leak,
    })
}

/// One dressing switched on for `pi/2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteStep {
    pub l: usize,
    /// 1-based coordinates carrying the dressing (size `l`).
    pub dressed_coords: Vec<usize>,
}

impl RouteStep {
    pub fn coord_perm(&self, d: usize) -> Result<CoordPerm> {
        CoordPerm::with_dressed_first(&self.dressed_coords, d)
    }

    pub fn mask(&self, d: usize) -> Result<BitVector> {
        transfer_mask(d, self.l, &self.coord_perm(d)?)
    }

    pub fn graph(&self, d: usize) -> Result<CayleyGraph> {
        let gen = build_generating_set(d, self.l)?;
        build_cayley_graph(&gen, &self.coord_perm(d)?, BitVector::zero(d)?)
    }

    /// Step realizing `mask` in one go, if one exists.
    fn for_mask(mask: BitVector) -> Option<Self> {
        let d = mask.dim();
        let w = mask.weight();
        if w == d {
            return Some(Self {
                l: 1,
                dressed_coords: vec![1],
            });
        }
        if w + 2 <= d || w == 0 {
            let dressed: Vec<usize> = (1..=d).filter(|&i| mask.bit(i) == 0).collect();
            return Some(Self {
                l: dressed.len(),
                dressed_coords: dressed,
            });
        }
        None
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoutePlan {
    pub d: usize,
    pub source: usize,
    pub target: usize,
    pub steps: Vec<RouteStep>,
    pub net_mask: BitVector,
}

impl RoutePlan {
    pub fn total_duration(&self) -> f64 {
        self.steps.len() as f64 * FRAC_PI_2
    }
}

/// Plans a route from `source` to `target` (0-based node indices).
///
/// With `m = source XOR target` of weight `w`: `w = 0` needs no step,
/// `1 <= w <= d - 2` and `w = d` take one step, and `w = d - 1` (for
/// `d >= 3`) takes the all-ones flip followed by a weight-one flip.
pub fn plan_route(d: usize, source: usize, target: usize) -> Result<RoutePlan> {
    let src = BitVector::new(source, d)?;
    let dst = BitVector::new(target, d)?;
    let m = src.xor(dst);
    let w = m.weight();
    let steps = if w == 0 {
        Vec::new()
    } else if let Some(step) = RouteStep::for_mask(m) {
        vec![step]
    } else if d >= 3 {
        let rest = m.xor(BitVector::ones(d)?);
        vec![
            RouteStep::for_mask(BitVector::ones(d)?).expect("all-ones is one step"),
            RouteStep::for_mask(rest).expect("weight one is one step for d >= 3"),
        ]
    } else {
        return Err(Error::Unroutable {
            d,
            source_node: source,
            target,
        });
    };
    Ok(RoutePlan {
        d,
        source,
        target,
        steps,
        net_mask: m,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RouteOutcome {
    pub state: StateVector,
    pub fidelity: f64,
}

/// Runs each step's dressing for `pi/2` in sequence, starting from the
/// source basis state.
pub fn execute_route(plan: &RoutePlan) -> Result<RouteOutcome> {
    let n = 1usize << plan.d;
    let mut state = StateVector::basis(n, plan.source)?;
    for step in &plan.steps {
        let table = spectral_table_for(&step.graph(plan.d)?)?;
        state = evolve(&state, FRAC_PI_2, &table)?;
    }
    let fidelity = state.probability(plan.target);
    Ok(RouteOutcome { state, fidelity })
}

/// Upper bound on any plan's duration.
pub const MAX_ROUTE_DURATION: f64 = PI;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::standard_graph;
    use crate::spectral::parity_mask;

    #[test]
    fn cycles_d3() {
        let id = CoordPerm::identity(3);
        let p1 = predicted_permutation(3, 1, &id).unwrap();
        assert_eq!(p1.cycle_string(), "(1,8)(2,7)(3,6)(4,5)");
        assert_eq!(p1.global_phase_k, Some(3));
        let p2 = predicted_permutation(3, 2, &id).unwrap();
        assert_eq!(p2.cycle_string(), "(1,2)(3,4)(5,6)(7,8)");
        let p3 = predicted_permutation(3, 3, &id).unwrap();
        assert!(p3.is_identity());
        assert_eq!(p3.cycle_string(), "()");
    }

    #[test]
    fn mask_agrees_with_parity_slots() {
        for d in 1..=8 {
            for l in 1..=d {
                let perm = CoordPerm::new((1..=d).rev().collect()).unwrap();
                assert_eq!(transfer_mask(d, l, &perm).unwrap(), parity_mask(d, l, &perm).unwrap());
                let p = predicted_permutation(d, l, &perm).unwrap();
                assert!(p.compose(&p).is_identity());
            }
        }
    }

    #[test]
    fn extraction_d3() {
        let g = standard_graph(3, 2).unwrap();
        let e = extract_permutation(&g, FRAC_PI_2, 1e-8).unwrap();
        assert_eq!(e.permutation, predicted_permutation(3, 2, &CoordPerm::identity(3)).unwrap());

        let h = standard_graph(3, 1).unwrap();
        assert!(matches!(
            extract_permutation(&h, FRAC_PI_2 / 2.0, 1e-8),
            Err(Error::NotAPermutation { .. })
        ));

        let e = extract_permutation(&h, 0.0, 1e-8).unwrap();
        assert!(e.permutation.is_identity());
        assert_eq!(e.permutation.global_phase_k, Some(0));
        assert!(extract_permutation(&h, 1.0, 0.1).is_err());
    }

    #[test]
    fn non_quarter_phase() {
        // K8 returns to the identity at tau = pi/4 with phase exp(i pi/4)
        let g = standard_graph(3, 3).unwrap();
        let e = extract_permutation(&g, PI / 4.0, 1e-8).unwrap();
        assert!(e.permutation.is_identity());
        assert_eq!(e.permutation.global_phase_k, None);
        assert!((e.phase - Complex64::from_polar(1.0, PI / 4.0)).norm() < 1e-10);
    }

    #[test]
    fn plans_d3() {
        let p = plan_route(3, 0, 1).unwrap();
        assert_eq!(p.steps, vec![RouteStep { l: 2, dressed_coords: vec![1, 2] }]);
        assert!((p.total_duration() - FRAC_PI_2).abs() < 1e-15);
        let p = plan_route(3, 0, 7).unwrap();
        assert_eq!(p.steps, vec![RouteStep { l: 1, dressed_coords: vec![1] }]);
        let p = plan_route(3, 5, 5).unwrap();
        assert!(p.steps.is_empty());
        assert_eq!(execute_route(&p).unwrap().fidelity, 1.0);
    }

    #[test]
    fn two_step_plan_d4() {
        let src: BitVector = "0000".parse().unwrap();
        let dst: BitVector = "0111".parse().unwrap();
        let p = plan_route(4, src.index(), dst.index()).unwrap();
        assert_eq!(p.steps.len(), 2);
        assert_eq!(p.steps[0].mask(4).unwrap().to_string(), "1111");
        assert_eq!(p.steps[1].mask(4).unwrap().to_string(), "1000");
        assert_eq!(p.net_mask.to_string(), "0111");
        assert!((p.total_duration() - PI).abs() < 1e-15);
        assert!((execute_route(&p).unwrap().fidelity - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unroutable_small() {
        assert!(matches!(plan_route(2, 0, 1), Err(Error::Unroutable { d: 2, .. })));
        assert!(matches!(plan_route(2, 0, 2), Err(Error::Unroutable { .. })));
        assert_eq!(plan_route(2, 0, 3).unwrap().steps.len(), 1);
        assert_eq!(plan_route(1, 0, 1).unwrap().steps.len(), 1);
        assert!(plan_route(3, 0, 8).is_err());
    }

    #[test]
    fn step_masks_compose_to_net_mask() {
        for d in 3..=6 {
            for t in 0..1usize << d {
                let p = plan_route(d, 0, t).unwrap();
                let net = p
                    .steps
                    .iter()
                    .fold(BitVector::zero(d).unwrap(), |acc, s| acc.xor(s.mask(d).unwrap()));
                assert_eq!(net, p.net_mask);
                assert_eq!(net.index(), t);
                for s in &p.steps {
                    assert_eq!(s.dressed_coords.len(), s.l);
                }
            }
        }
    }
}
