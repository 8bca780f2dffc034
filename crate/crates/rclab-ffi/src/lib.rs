//! C ABI for the rclab circuit laboratory.
//!
//! The surface follows one convention throughout: functions that can
//! fail return [`RclabStatus`] and write their result through an out
//! pointer; heap objects cross the boundary as opaque handles with
//! explicit `*_free` functions; strings are NUL-terminated UTF-8 and
//! owned by whoever the function documentation says.  On any non-OK
//! status a thread-local message describing the failure is available
//! via [`rclab_last_error`].  Panics are caught at the boundary and
//! reported as [`RclabStatus::Panic`]; no unwind ever crosses into C.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use rclab::attention::{self, AttentionParams};
use rclab::checker::{check_rc, RealizabilityReport};
use rclab::circuit::Circuit;
use rclab::embed::{embed_greedy, embed_layered_shells, embedding_stats, verify_embedding, Placer};
use rclab::flux::annulus_achievability;
use rclab::thermo::erasure_cumulative_budget;
use rclab::uniform::{parity_member, FamilyId};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RclabStatus {
    /// The call succeeded and any out parameters were written.
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// An argument was rejected; `rclab_last_error` says why.
    InvalidArgument = 2,
    /// The computation ran but a verified constraint was violated.
    ConstraintFailed = 3,
    /// An internal panic was caught at the boundary.
    Panic = 4,
    /// A string argument was not valid UTF-8.
    Utf8 = 5,
}

/// Opaque circuit handle.
pub struct RclabCircuit {
    inner: Circuit,
}

/// Opaque realizability-report handle.
pub struct RclabReport {
    inner: RealizabilityReport,
}

/// Capacity-model parameters; a plain value struct, no handle needed.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RclabAttentionParams {
    /// Lattice dimension, at least 1.
    pub d: u32,
    pub heads: f64,
    pub kappa: f64,
    pub c_head: f64,
    pub k_d: f64,
    pub eta_d: f64,
    pub t_env: f64,
}

/// Headline measurements of a verified embedding.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RclabEmbedStats {
    /// Latest firing tick of any gate.
    pub makespan: i64,
    /// Largest L-infinity distance of any placed site from the center.
    pub radius: i64,
    /// Number of placed gates, leveling buffers included.
    pub size: usize,
    /// Peak per-tick signal crossings of the causal sphere.
    pub maxcut: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().map(|c| if c == '\0' { ' ' } else { c }).collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("NULs stripped");
    });
}

fn guard(body: impl FnOnce() -> RclabStatus) -> RclabStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic with non-string payload".into());
            set_error(&format!("internal panic: {msg}"));
            RclabStatus::Panic
        }
    }
}

/// Copy `value` through an out pointer, failing on NULL.
unsafe fn write_out<T>(out: *mut T, value: T) -> RclabStatus {
    if out.is_null() {
        set_error("out pointer is NULL");
        return RclabStatus::NullPointer;
    }
    out.write(value);
    RclabStatus::Ok
}

fn from_params(p: &RclabAttentionParams) -> AttentionParams {
    AttentionParams {
        d: p.d,
        heads: p.heads,
        kappa: p.kappa,
        c_head: p.c_head,
        k_d: p.k_d,
        eta_d: p.eta_d,
        t_env: p.t_env,
    }
}

/// Library version as a static NUL-terminated string; never freed by
/// the caller.
#[no_mangle]
pub extern "C" fn rclab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copy the calling thread's last error message into `buf` (truncated
/// to `cap` bytes including the terminating NUL) and return the full
/// message length excluding the NUL.  `buf` may be NULL to query the
/// length alone.  The message is replaced by every non-OK call on the
/// same thread.
#[no_mangle]
pub unsafe extern "C" fn rclab_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            buf.add(n).write(0);
        }
        bytes.len()
    })
}

/// Build the n-input parity-tree circuit.  On success the caller owns
/// the handle and must release it with `rclab_circuit_free`.
#[no_mangle]
pub unsafe extern "C" fn rclab_parity_circuit(n: u32, out: *mut *mut RclabCircuit) -> RclabStatus {
    guard(|| match parity_member(n) {
        Ok(inner) => write_out(out, Box::into_raw(Box::new(RclabCircuit { inner }))),
        Err(e) => {
            set_error(&e.to_string());
            RclabStatus::InvalidArgument
        }
    })
}

/// Parse a circuit from its text encoding.  On success the caller owns
/// the handle and must release it with `rclab_circuit_free`.
#[no_mangle]
pub unsafe extern "C" fn rclab_circuit_decode(
    text: *const c_char,
    out: *mut *mut RclabCircuit,
) -> RclabStatus {
    guard(|| {
        if text.is_null() {
            set_error("text pointer is NULL");
            return RclabStatus::NullPointer;
        }
        let text = match CStr::from_ptr(text).to_str() {
            Ok(t) => t,
            Err(e) => {
                set_error(&format!("circuit text is not UTF-8: {e}"));
                return RclabStatus::Utf8;
            }
        };
        match Circuit::decode(text) {
            Ok(inner) => write_out(out, Box::into_raw(Box::new(RclabCircuit { inner }))),
            Err(e) => {
                set_error(&e.to_string());
                RclabStatus::InvalidArgument
            }
        }
    })
}

/// Serialize a circuit to its text encoding.  On success `*out` is a
/// NUL-terminated string the caller must release with
/// `rclab_string_free`.
#[no_mangle]
pub unsafe extern "C" fn rclab_circuit_encode(
    circuit: *const RclabCircuit,
    out: *mut *mut c_char,
) -> RclabStatus {
    guard(|| {
        let Some(c) = circuit.as_ref() else {
            set_error("circuit handle is NULL");
            return RclabStatus::NullPointer;
        };
        match CString::new(c.inner.encode()) {
            Ok(s) => write_out(out, s.into_raw()),
            Err(_) => {
                set_error("encoding contains an interior NUL");
                RclabStatus::InvalidArgument
            }
        }
    })
}

/// Number of gates; 0 when the handle is NULL.
#[no_mangle]
pub unsafe extern "C" fn rclab_circuit_gate_count(circuit: *const RclabCircuit) -> usize {
    circuit.as_ref().map_or(0, |c| c.inner.gates.len())
}

/// Number of input gates; 0 when the handle is NULL.
#[no_mangle]
pub unsafe extern "C" fn rclab_circuit_input_count(circuit: *const RclabCircuit) -> usize {
    circuit.as_ref().map_or(0, |c| c.inner.input_ids().len())
}

/// Number of output ports; 0 when the handle is NULL.
#[no_mangle]
pub unsafe extern "C" fn rclab_circuit_output_count(circuit: *const RclabCircuit) -> usize {
    circuit.as_ref().map_or(0, |c| c.inner.output_ids().len())
}

/// Release a circuit handle; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn rclab_circuit_free(circuit: *mut RclabCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

/// Release a string produced by this library; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn rclab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Embed a circuit into the d-dimensional lattice, verify every causal
/// constraint, and report the embedding's measurements.  `greedy`
/// selects the greedy placer instead of the layered-shell placer.
/// Returns `ConstraintFailed` if verification finds any violation; the
/// stats are only written on `Ok`.
#[no_mangle]
pub unsafe extern "C" fn rclab_embed_circuit(
    circuit: *const RclabCircuit,
    d: u32,
    greedy: bool,
    out: *mut RclabEmbedStats,
) -> RclabStatus {
    guard(|| {
        let Some(c) = circuit.as_ref() else {
            set_error("circuit handle is NULL");
            return RclabStatus::NullPointer;
        };
        let built = if greedy {
            embed_greedy(&c.inner, d).map(|e| (e, c.inner.clone()))
        } else {
            embed_layered_shells(&c.inner, d).map(|(e, leveled)| (e, leveled.circuit))
        };
        let (embedding, placed) = match built {
            Ok(pair) => pair,
            Err(e) => {
                set_error(&e.to_string());
                return RclabStatus::InvalidArgument;
            }
        };
        let violations = verify_embedding(&embedding, &placed);
        if !violations.is_empty() {
            set_error(&format!(
                "embedding violates {} constraint(s); first: {}",
                violations.len(),
                violations[0]
            ));
            return RclabStatus::ConstraintFailed;
        }
        let stats = embedding_stats(&embedding);
        write_out(
            out,
            RclabEmbedStats {
                makespan: stats.makespan,
                radius: stats.radius,
                size: stats.size,
                maxcut: stats.maxcut,
            },
        )
    })
}

/// Run the parity-family realizability sweep with the layered-shell
/// placer over `sizes` and return a report handle the caller must
/// release with `rclab_report_free`.  A sweep whose laws fail still
/// returns `Ok`; interrogate the report getters.
#[no_mangle]
pub unsafe extern "C" fn rclab_check_parity(
    d: u32,
    sizes: *const u32,
    n_sizes: usize,
    out: *mut *mut RclabReport,
) -> RclabStatus {
    guard(|| {
        if sizes.is_null() {
            set_error("sizes pointer is NULL");
            return RclabStatus::NullPointer;
        }
        let sizes = std::slice::from_raw_parts(sizes, n_sizes);
        match check_rc(FamilyId::Parity, sizes, d, Placer::Shell) {
            Ok(inner) => write_out(out, Box::into_raw(Box::new(RclabReport { inner }))),
            Err(e) => {
                set_error(&e.to_string());
                RclabStatus::InvalidArgument
            }
        }
    })
}

/// Fitted log-size versus log-makespan slope; NaN when the handle is
/// NULL.
#[no_mangle]
pub unsafe extern "C" fn rclab_report_size_slope(report: *const RclabReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.inner.size_law.slope)
}

/// Fitted log-maxcut versus log-makespan slope; NaN when the handle is
/// NULL.
#[no_mangle]
pub unsafe extern "C" fn rclab_report_width_slope(report: *const RclabReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.inner.width_law.slope)
}

/// Fitted packing constant of the minimum-time law; NaN when the
/// handle is NULL.
#[no_mangle]
pub unsafe extern "C" fn rclab_report_k_fit(report: *const RclabReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.inner.min_time.k_fit)
}

/// Whether every law in the sweep passed; false when the handle is
/// NULL.
#[no_mangle]
pub unsafe extern "C" fn rclab_report_pass(report: *const RclabReport) -> bool {
    report.as_ref().is_some_and(|r| r.inner.pass)
}

/// Release a report handle; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn rclab_report_free(report: *mut RclabReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Normalized capacity parameters for dimension `d`: every constant 1.
#[no_mangle]
pub unsafe extern "C" fn rclab_attention_defaults(
    d: u32,
    out: *mut RclabAttentionParams,
) -> RclabStatus {
    guard(|| {
        let p = AttentionParams::normalized(d);
        if let Err(e) = p.validate() {
            set_error(&e.to_string());
            return RclabStatus::InvalidArgument;
        }
        write_out(
            out,
            RclabAttentionParams {
                d: p.d,
                heads: p.heads,
                kappa: p.kappa,
                c_head: p.c_head,
                k_d: p.k_d,
                eta_d: p.eta_d,
                t_env: p.t_env,
            },
        )
    })
}

/// Information a T-tick computation can move across its boundary, in
/// bits.
#[no_mangle]
pub unsafe extern "C" fn rclab_cut_capacity(
    params: *const RclabAttentionParams,
    t: f64,
    out: *mut f64,
) -> RclabStatus {
    guard(|| {
        let Some(p) = params.as_ref() else {
            set_error("params pointer is NULL");
            return RclabStatus::NullPointer;
        };
        match attention::cut_capacity(t, &from_params(p)) {
            Ok(v) => write_out(out, v),
            Err(e) => {
                set_error(&e.to_string());
                RclabStatus::InvalidArgument
            }
        }
    })
}

/// Joint minimum time for moving `i_star` bits across the boundary and
/// dissipating `e_req` bits of erasure: the larger of the throughput
/// and Landauer bounds.
#[no_mangle]
pub unsafe extern "C" fn rclab_min_time(
    params: *const RclabAttentionParams,
    i_star: f64,
    e_req: f64,
    out: *mut f64,
) -> RclabStatus {
    guard(|| {
        let Some(p) = params.as_ref() else {
            set_error("params pointer is NULL");
            return RclabStatus::NullPointer;
        };
        match attention::joint_min_time(i_star, e_req, &from_params(p)) {
            Ok(r) => write_out(out, r.t_joint),
            Err(e) => {
                set_error(&e.to_string());
                RclabStatus::InvalidArgument
            }
        }
    })
}

/// Minimum over the tail t in [T/2, T] of the fraction of the crossing
/// bound achieved by the thin-annulus outflow construction.
#[no_mangle]
pub unsafe extern "C" fn rclab_annulus_min_fraction(
    d: u32,
    eps: f64,
    ticks: u32,
    out: *mut f64,
) -> RclabStatus {
    guard(|| match annulus_achievability(d, eps, ticks) {
        Ok(report) => write_out(out, report.min_fraction_tail),
        Err(e) => {
            set_error(&e.to_string());
            RclabStatus::InvalidArgument
        }
    })
}

/// Total erasures (bits) a T-tick, d-dimensional computation may
/// perform inside the dissipation budget: eta * T^d / (d * T_env).
#[no_mangle]
pub unsafe extern "C" fn rclab_erasure_budget(
    t: f64,
    d: u32,
    eta: f64,
    t_env: f64,
    out: *mut f64,
) -> RclabStatus {
    guard(|| match erasure_cumulative_budget(t, d, eta, t_env) {
        Ok(v) => write_out(out, v),
        Err(e) => {
            set_error(&e.to_string());
            RclabStatus::InvalidArgument
        }
    })
}
