//! C ABI for hyperroute.
//!
//! Networks and route plans are opaque heap handles created by `*_new` /
//! `hr_route_plan` and released with the matching `*_free`. Every fallible
//! call returns an [`HrStatus`]; outputs go through caller-provided pointers.
//! Node indices are 0-based; coordinates in permutations and route steps are
//! 1-based.

use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use hyperroute::dynamics::evolve_in_place;
use hyperroute::spectral::spectral_table_for;
use hyperroute::{
    build_cayley_graph, build_generating_set, execute_route, extract_permutation, plan_route,
    predicted_permutation, BitVector, CayleyGraph, CoordPerm, Error, RoutePlan, SpectralTable,
};
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HrStatus {
    Ok = 0,
    NullPointer = 1,
    OutOfRange = 2,
    InvalidPermutation = 3,
    DimensionMismatch = 4,
    BufferTooSmall = 5,
    NotAPermutation = 6,
    PhaseMismatch = 7,
    Unroutable = 8,
    InvalidInput = 9,
    Panic = 10,
}

impl From<Error> for HrStatus {
    fn from(e: Error) -> Self {
        match e {
            Error::OutOfRange { .. } => HrStatus::OutOfRange,
            Error::InvalidPermutation { .. } => HrStatus::InvalidPermutation,
            Error::DimensionMismatch { .. } => HrStatus::DimensionMismatch,
            Error::NotAPermutation { .. } => HrStatus::NotAPermutation,
            Error::PhaseMismatch { .. } => HrStatus::PhaseMismatch,
            Error::Unroutable { .. } => HrStatus::Unroutable,
            Error::TooLarge { .. } | Error::NoValidOffset { .. } | Error::Invalid(_) => {
                HrStatus::InvalidInput
            }
        }
    }
}

/// Opaque network handle: a Z_2^d(l) graph with its spectral table.
pub struct HrNetwork {
    graph: CayleyGraph,
    table: SpectralTable,
}

/// Opaque route plan handle.
pub struct HrRoute {
    plan: RoutePlan,
}

fn guard(f: impl FnOnce() -> Result<(), HrStatus>) -> HrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HrStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => HrStatus::Panic,
    }
}

unsafe fn read_perm(d: usize, perm: *const u32, perm_len: usize) -> Result<CoordPerm, HrStatus> {
    if perm.is_null() {
        return Ok(CoordPerm::identity(d));
    }
    let images: Vec<usize> = slice::from_raw_parts(perm, perm_len)
        .iter()
        .map(|&p| p as usize)
        .collect();
    if images.len() != d {
        return Err(HrStatus::InvalidPermutation);
    }
    Ok(CoordPerm::new(images)?)
}

unsafe fn out_ref<'a, T>(p: *mut T) -> Result<&'a mut T, HrStatus> {
    p.as_mut().ok_or(HrStatus::NullPointer)
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn hr_status_message(status: HrStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        HrStatus::Ok => b"ok\0",
        HrStatus::NullPointer => b"null pointer argument\0",
        HrStatus::OutOfRange => b"argument out of range\0",
        HrStatus::InvalidPermutation => b"invalid coordinate permutation\0",
        HrStatus::DimensionMismatch => b"dimension mismatch\0",
        HrStatus::BufferTooSmall => b"output buffer too small\0",
        HrStatus::NotAPermutation => b"evolution is not a permutation\0",
        HrStatus::PhaseMismatch => b"permutation phases disagree\0",
        HrStatus::Unroutable => b"no route between the requested nodes\0",
        HrStatus::InvalidInput => b"invalid input\0",
        HrStatus::Panic => b"internal panic\0",
    };
    s.as_ptr().cast()
}

/// Builds Z_2^d(l) rotated by `perm` (1-based images, `perm_len == d`).
/// Pass `perm = NULL` for the identity.
///
/// # Safety
/// `perm` must be NULL or point to `perm_len` readable `u32`s; `out` must be
/// a valid pointer. The handle written to `out` must be released with
/// [`hr_network_free`].
#[no_mangle]
pub unsafe extern "C" fn hr_network_new(
    d: u32,
    l: u32,
    perm: *const u32,
    perm_len: usize,
    out: *mut *mut HrNetwork,
) -> HrStatus {
    guard(|| {
        let out = out_ref(out)?;
        *out = ptr::null_mut();
        let (d, l) = (d as usize, l as usize);
        let gen = build_generating_set(d, l)?;
        let perm = read_perm(d, perm, perm_len)?;
        let graph = build_cayley_graph(&gen, &perm, BitVector::zero(d)?)?;
        let table = spectral_table_for(&graph)?;
        *out = Box::into_raw(Box::new(HrNetwork { graph, table }));
        Ok(())
    })
}

/// # Safety
/// `net` must be NULL or a handle from [`hr_network_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hr_network_free(net: *mut HrNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Number of nodes, 0 for NULL.
///
/// # Safety
/// `net` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hr_network_node_count(net: *const HrNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.graph.node_count())
}

/// Degree `|S^l_d|`, 0 for NULL.
///
/// # Safety
/// `net` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hr_network_degree(net: *const HrNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.graph.degree())
}

/// Phase offset `k` (the permutation at `tau = pi/2` carries `exp(-i k pi/2)`).
///
/// # Safety
/// `net` must be a live handle and `out_k` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hr_network_phase_offset(net: *const HrNetwork, out_k: *mut i64) -> HrStatus {
    guard(|| {
        let net = net.as_ref().ok_or(HrStatus::NullPointer)?;
        *out_ref(out_k)? = net.table.phase_offset();
        Ok(())
    })
}

/// Writes the `2^d` eigenvalues indexed by Walsh–Hadamard row.
///
/// # Safety
/// `out` must point to `len` writable `int64_t`s.
#[no_mangle]
pub unsafe extern "C" fn hr_network_eigenvalues(net: *const HrNetwork, out: *mut i64, len: usize) -> HrStatus {
    guard(|| {
        let net = net.as_ref().ok_or(HrStatus::NullPointer)?;
        if out.is_null() {
            return Err(HrStatus::NullPointer);
        }
        let ev = net.table.eigenvalues();
        if len < ev.len() {
            return Err(HrStatus::BufferTooSmall);
        }
        slice::from_raw_parts_mut(out, ev.len()).copy_from_slice(ev);
        Ok(())
    })
}

/// Evolves a state (split real/imaginary arrays of length `2^d`) for `tau`.
/// Output arrays may alias the inputs.
///
/// # Safety
/// All four arrays must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn hr_network_evolve(
    net: *const HrNetwork,
    re_in: *const f64,
    im_in: *const f64,
    len: usize,
    tau: f64,
    re_out: *mut f64,
    im_out: *mut f64,
) -> HrStatus {
    guard(|| {
        let net = net.as_ref().ok_or(HrStatus::NullPointer)?;
        if re_in.is_null() || im_in.is_null() || re_out.is_null() || im_out.is_null() {
            return Err(HrStatus::NullPointer);
        }
        if len != net.graph.node_count() {
            return Err(HrStatus::DimensionMismatch);
        }
        let mut amps: Vec<Complex64> = (0..len)
            .map(|i| Complex64::new(*re_in.add(i), *im_in.add(i)))
            .collect();
        evolve_in_place(&mut amps, tau, &net.table)?;
        for (i, a) in amps.iter().enumerate() {
            *re_out.add(i) = a.re;
            *im_out.add(i) = a.im;
        }
        Ok(())
    })
}

/// `|<target| U(tau) |source>|^2`.
///
/// # Safety
/// `net` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hr_network_transfer_probability(
    net: *const HrNetwork,
    source: usize,
    target: usize,
    tau: f64,
    out: *mut f64,
) -> HrStatus {
    guard(|| {
        let net = net.as_ref().ok_or(HrStatus::NullPointer)?;
        let out = out_ref(out)?;
        let n = net.graph.node_count();
        if source >= n || target >= n {
            return Err(HrStatus::OutOfRange);
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); n];
        amps[source] = Complex64::new(1.0, 0.0);
        evolve_in_place(&mut amps, tau, &net.table)?;
        *out = amps[target].norm_sqr();
        Ok(())
    })
}

/// Numerically extracts the XOR mask realized at `tau`. Returns
/// `NotAPermutation` or `PhaseMismatch` when the evolution does not permute
/// nodes within `tolerance`; `out_leak` is filled in either case when the
/// leak is known.
///
/// # Safety
/// `net` must be a live handle; `out_mask` and `out_leak` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hr_network_extract_mask(
    net: *const HrNetwork,
    tau: f64,
    tolerance: f64,
    out_mask: *mut u32,
    out_leak: *mut f64,
) -> HrStatus {
    guard(|| {
        let net = net.as_ref().ok_or(HrStatus::NullPointer)?;
        let out_mask = out_ref(out_mask)?;
        let out_leak = out_ref(out_leak)?;
        match extract_permutation(&net.graph, tau, tolerance) {
            Ok(e) => {
                *out_mask = e.permutation.mask.index() as u32;
                *out_leak = e.max_leak;
                Ok(())
            }
            Err(Error::NotAPermutation { leaked, .. }) => {
                *out_leak = leaked;
                Err(HrStatus::NotAPermutation)
            }
            Err(e) => Err(e.into()),
        }
    })
}

/// Predicted mask and phase offset of Z_2^d(l) under `perm` at `tau = pi/2`.
///
/// # Safety
/// `perm` must be NULL or hold `perm_len` `u32`s; outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn hr_predicted_mask(
    d: u32,
    l: u32,
    perm: *const u32,
    perm_len: usize,
    out_mask: *mut u32,
    out_k: *mut i64,
) -> HrStatus {
    guard(|| {
        let out_mask = out_ref(out_mask)?;
        let out_k = out_ref(out_k)?;
        let perm = read_perm(d as usize, perm, perm_len)?;
        let p = predicted_permutation(d as usize, l as usize, &perm)?;
        *out_mask = p.mask.index() as u32;
        *out_k = p.global_phase_k.unwrap_or(0);
        Ok(())
    })
}

/// Plans a route between 0-based node indices.
///
/// # Safety
/// `out` must be valid; the handle must be released with [`hr_route_free`].
#[no_mangle]
pub unsafe extern "C" fn hr_route_plan(d: u32, source: usize, target: usize, out: *mut *mut HrRoute) -> HrStatus {
    guard(|| {
        let out = out_ref(out)?;
        *out = ptr::null_mut();
        let plan = plan_route(d as usize, source, target)?;
        *out = Box::into_raw(Box::new(HrRoute { plan }));
        Ok(())
    })
}

/// # Safety
/// `route` must be NULL or a handle from [`hr_route_plan`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hr_route_free(route: *mut HrRoute) {
    if !route.is_null() {
        drop(Box::from_raw(route));
    }
}

/// # Safety
/// `route` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hr_route_step_count(route: *const HrRoute) -> usize {
    route.as_ref().map_or(0, |r| r.plan.steps.len())
}

/// Total duration (a multiple of pi/2); negative for NULL.
///
/// # Safety
/// `route` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hr_route_duration(route: *const HrRoute) -> f64 {
    route.as_ref().map_or(-1.0, |r| r.plan.total_duration())
}

/// Dressing level and 1-based dressed coordinates of step `index`.
///
/// # Safety
/// `coords` must hold `cap` writable `u32`s; other outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn hr_route_step(
    route: *const HrRoute,
    index: usize,
    out_l: *mut u32,
    coords: *mut u32,
    cap: usize,
    out_len: *mut usize,
) -> HrStatus {
    guard(|| {
        let route = route.as_ref().ok_or(HrStatus::NullPointer)?;
        let step = route.plan.steps.get(index).ok_or(HrStatus::OutOfRange)?;
        let out_len = out_ref(out_len)?;
        *out_ref(out_l)? = step.l as u32;
        *out_len = step.dressed_coords.len();
        if coords.is_null() {
            return Err(HrStatus::NullPointer);
        }
        if cap < step.dressed_coords.len() {
            return Err(HrStatus::BufferTooSmall);
        }
        for (i, &c) in step.dressed_coords.iter().enumerate() {
            *coords.add(i) = c as u32;
        }
        Ok(())
    })
}

/// Executes the plan and reports the probability found at the target.
///
/// # Safety
/// `route` must be a live handle and `out_fidelity` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hr_route_execute(route: *const HrRoute, out_fidelity: *mut f64) -> HrStatus {
    guard(|| {
        let route = route.as_ref().ok_or(HrStatus::NullPointer)?;
        let out = out_ref(out_fidelity)?;
        *out = execute_route(&route.plan)?.fidelity;
        Ok(())
    })
}
