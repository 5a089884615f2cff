//! C ABI over `eopgap`. Objects are opaque handles released with the
//! matching `*_free`; every call returns an [`EopgapStatus`] and leaves a
//! message for [`eopgap_last_error`] on failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use eopgap::eop::{self, OptimizerConfig};
use eopgap::io::{self, LoadedState};
use eopgap::qdense::{DensityOperator, Entropies, PartySpec, PureState, Region};
use eopgap::recovery::{self, QuadratureWeight};
use eopgap::stab::{self, StabilizerTableau};
use eopgap::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EopgapStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Version = 4,
    Capacity = 5,
    Internal = 6,
    Io = 7,
    Panic = 8,
}

/// A pure state or a density operator.
pub struct EopgapState {
    inner: LoadedState,
}

pub struct EopgapTableau {
    inner: StabilizerTableau,
}

/// Canonical counts of a tripartite stabilizer state.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct EopgapCounts {
    pub local_a: usize,
    pub local_b: usize,
    pub local_c: usize,
    pub e_ab: usize,
    pub e_bc: usize,
    pub e_ac: usize,
    pub g: usize,
}

/// Fidelity bound of the local Petz recovery.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct EopgapRecovery {
    pub fidelity: f64,
    pub minus_two_log_f: f64,
    pub g_estimate: f64,
    pub bound_satisfied: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> EopgapStatus {
    match e {
        Error::Parse { .. } | Error::Json(_) => EopgapStatus::Parse,
        Error::Version(_) => EopgapStatus::Version,
        Error::Capacity(_) => EopgapStatus::Capacity,
        Error::Internal(_) => EopgapStatus::Internal,
        Error::Io(_) => EopgapStatus::Io,
        _ => EopgapStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), EopgapStatus>) -> EopgapStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EopgapStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside eopgap".into());
            EopgapStatus::Panic
        }
    }
}

fn fail(e: Error) -> EopgapStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, EopgapStatus> {
    if p.is_null() {
        set_error("null string argument".into());
        return Err(EopgapStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not UTF-8".into());
        EopgapStatus::InvalidArgument
    })
}

unsafe fn ref_arg<'a, T>(p: *const T) -> Result<&'a T, EopgapStatus> {
    p.as_ref().ok_or_else(|| {
        set_error("null handle".into());
        EopgapStatus::NullPointer
    })
}

unsafe fn out_arg<'a, T>(p: *mut T) -> Result<&'a mut T, EopgapStatus> {
    p.as_mut().ok_or_else(|| {
        set_error("null output pointer".into());
        EopgapStatus::NullPointer
    })
}

fn regions(s: &str) -> Vec<Region> {
    s.split(';').filter(|p| !p.trim().is_empty()).map(Region::parse).collect()
}

fn config(restarts: usize, seed: u64) -> OptimizerConfig {
    OptimizerConfig { restarts, seed, ..Default::default() }
}

/// Copies the last error message of this thread into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length, or 0
/// if there is none.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn eopgap_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match &*e.borrow() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn eopgap_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Parses a JSON state file or a tableau text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eopgap_state_parse(text: *const c_char, out: *mut *mut EopgapState) -> EopgapStatus {
    guard(|| {
        let text = str_arg(text)?;
        let out = out_arg(out)?;
        let inner = match io::parse_input(text).map_err(fail)? {
            LoadedState::Tableau(t) => LoadedState::Pure(stab::to_dense(&t).map_err(fail)?),
            other => other,
        };
        *out = Box::into_raw(Box::new(EopgapState { inner }));
        Ok(())
    })
}

/// Pure state on parties `A, B, …` with the given dimensions; `amplitudes`
/// holds `2·Π dims` reals, real and imaginary parts interleaved.
///
/// # Safety
/// `dims` must point to `n_parties` values and `amplitudes` to `len` values.
#[no_mangle]
pub unsafe extern "C" fn eopgap_state_pure_new(
    dims: *const usize,
    n_parties: usize,
    amplitudes: *const f64,
    len: usize,
    out: *mut *mut EopgapState,
) -> EopgapStatus {
    guard(|| {
        if dims.is_null() || amplitudes.is_null() {
            set_error("null array".into());
            return Err(EopgapStatus::NullPointer);
        }
        let out = out_arg(out)?;
        let dims = std::slice::from_raw_parts(dims, n_parties);
        let data = std::slice::from_raw_parts(amplitudes, len);
        let spec = PartySpec::new(dims.iter().enumerate().map(|(i, &d)| (label(i), d))).map_err(fail)?;
        if data.len() != 2 * spec.total_dim() {
            return Err(fail(Error::Dimension(format!(
                "expected {} reals, got {}",
                2 * spec.total_dim(),
                data.len()
            ))));
        }
        let amps = data.chunks_exact(2).map(|p| eopgap::linalg::c(p[0], p[1])).collect();
        let psi = PureState::new(spec, eopgap::linalg::CVec::from_vec(amps)).map_err(fail)?;
        *out = Box::into_raw(Box::new(EopgapState { inner: LoadedState::Pure(psi) }));
        Ok(())
    })
}

fn label(i: usize) -> String {
    PartySpec::uniform(i + 1, 1).expect("n >= 1").labels()[i].to_string()
}

/// # Safety
/// `state` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn eopgap_state_free(state: *mut EopgapState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Von Neumann entropy (nats) of a region such as `"A,B"`.
///
/// # Safety
/// Pointers must be valid; `region` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn eopgap_state_entropy(
    state: *const EopgapState,
    region: *const c_char,
    out: *mut f64,
) -> EopgapStatus {
    guard(|| {
        let state = ref_arg(state)?;
        let region = Region::parse(str_arg(region)?);
        let out = out_arg(out)?;
        *out = match &state.inner {
            LoadedState::Pure(p) => p.region_entropy(&region),
            LoadedState::Density(d) => d.region_entropy(&region),
            LoadedState::Tableau(_) => unreachable!("tableaux are converted on load"),
        }
        .map_err(fail)?;
        Ok(())
    })
}

fn density_of(state: &EopgapState) -> DensityOperator {
    match &state.inner {
        LoadedState::Pure(p) => p.density(),
        LoadedState::Density(d) => d.clone(),
        LoadedState::Tableau(_) => unreachable!("tableaux are converted on load"),
    }
}

/// `E_p(a : b)` and the gap `2E_p − I(a:b)` of the marginal on `a ∪ b`.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn eopgap_eop_bipartite(
    state: *const EopgapState,
    a: *const c_char,
    b: *const c_char,
    restarts: usize,
    seed: u64,
    eop_out: *mut f64,
    gap_out: *mut f64,
) -> EopgapStatus {
    guard(|| {
        let state = ref_arg(state)?;
        let (a, b) = (Region::parse(str_arg(a)?), Region::parse(str_arg(b)?));
        let eop_out = out_arg(eop_out)?;
        let gap_out = out_arg(gap_out)?;
        let rho = density_of(state);
        let r = eop::eop_bipartite_regions(&rho, &a, &b, &config(restarts, seed)).map_err(fail)?;
        *eop_out = r.value;
        *gap_out = eop::bipartite_gap_of(&r);
        Ok(())
    })
}

fn pure_of(state: &EopgapState) -> Result<PureState, EopgapStatus> {
    match &state.inner {
        LoadedState::Pure(p) => Ok(p.clone()),
        LoadedState::Density(d) => eopgap::qdense::canonical_purification(d).map_err(fail),
        LoadedState::Tableau(_) => unreachable!("tableaux are converted on load"),
    }
}

/// Generalized gap `g(α)` for `alpha` such as `"A;B;C"`; density inputs
/// are purified canonically.
///
/// # Safety
/// Pointers must be valid; `alpha` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn eopgap_generalized_gap(
    state: *const EopgapState,
    alpha: *const c_char,
    restarts: usize,
    seed: u64,
    gap_out: *mut f64,
) -> EopgapStatus {
    guard(|| {
        let state = ref_arg(state)?;
        let alpha = regions(str_arg(alpha)?);
        let gap_out = out_arg(gap_out)?;
        let psi = pure_of(state)?;
        *gap_out = eop::generalized_gap(&psi, &alpha, &config(restarts, seed)).map_err(fail)?.gap;
        Ok(())
    })
}

/// Local Petz recovery at the optimizer's best partition for `alpha`.
///
/// # Safety
/// Pointers must be valid; `alpha` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn eopgap_recovery_bound(
    state: *const EopgapState,
    alpha: *const c_char,
    restarts: usize,
    seed: u64,
    out: *mut EopgapRecovery,
) -> EopgapStatus {
    guard(|| {
        let state = ref_arg(state)?;
        let alpha = regions(str_arg(alpha)?);
        let out = out_arg(out)?;
        let psi = pure_of(state)?;
        let res = eop::generalized_eop(&psi, &alpha, &config(restarts, seed)).map_err(fail)?;
        let rep = recovery::recovery_report(&psi, &res, &QuadratureWeight::petz()).map_err(fail)?;
        *out = EopgapRecovery {
            fidelity: rep.fidelity,
            minus_two_log_f: rep.minus_two_log_f,
            g_estimate: rep.g_estimate,
            bound_satisfied: rep.bound_satisfied,
        };
        Ok(())
    })
}

/// Parses tableau text (`n=…` header, one Pauli string per line).
///
/// # Safety
/// `text` must be NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn eopgap_tableau_parse(text: *const c_char, out: *mut *mut EopgapTableau) -> EopgapStatus {
    guard(|| {
        let text = str_arg(text)?;
        let out = out_arg(out)?;
        let inner = stab::parse_tableau(text).map_err(fail)?;
        *out = Box::into_raw(Box::new(EopgapTableau { inner }));
        Ok(())
    })
}

/// Uniformly random `n`-qubit stabilizer state.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn eopgap_tableau_random(n_qubits: usize, seed: u64, out: *mut *mut EopgapTableau) -> EopgapStatus {
    guard(|| {
        let out = out_arg(out)?;
        let inner = stab::random_stabilizer(n_qubits, seed).map_err(fail)?;
        *out = Box::into_raw(Box::new(EopgapTableau { inner }));
        Ok(())
    })
}

/// # Safety
/// `tab` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn eopgap_tableau_free(tab: *mut EopgapTableau) {
    if !tab.is_null() {
        drop(Box::from_raw(tab));
    }
}

/// Entropy in bits of the qubits `qubits[0..len]`.
///
/// # Safety
/// `tab` and `out` must be valid; `qubits` must point to `len` values.
#[no_mangle]
pub unsafe extern "C" fn eopgap_tableau_entropy_bits(
    tab: *const EopgapTableau,
    qubits: *const usize,
    len: usize,
    out: *mut usize,
) -> EopgapStatus {
    guard(|| {
        let tab = ref_arg(tab)?;
        let out = out_arg(out)?;
        let qs = slice(qubits, len)?;
        *out = stab::region_entropy_bits(&tab.inner, qs).map_err(fail)?;
        Ok(())
    })
}

unsafe fn slice<'a>(p: *const usize, len: usize) -> Result<&'a [usize], EopgapStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        set_error("null array".into());
        return Err(EopgapStatus::NullPointer);
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// Canonical counts for the qubit partition `(a, b, c)`.
///
/// # Safety
/// `tab` and `out` must be valid; each array must hold its stated length.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn eopgap_tableau_counts(
    tab: *const EopgapTableau,
    a: *const usize,
    na: usize,
    b: *const usize,
    nb: usize,
    c: *const usize,
    nc: usize,
    out: *mut EopgapCounts,
) -> EopgapStatus {
    guard(|| {
        let tab = ref_arg(tab)?;
        let out = out_arg(out)?;
        let k = stab::tripartite_counts(&tab.inner, slice(a, na)?, slice(b, nb)?, slice(c, nc)?).map_err(fail)?;
        *out = EopgapCounts {
            local_a: k.locals[0],
            local_b: k.locals[1],
            local_c: k.locals[2],
            e_ab: k.e_ab,
            e_bc: k.e_bc,
            e_ac: k.e_ac,
            g: k.g,
        };
        Ok(())
    })
}
