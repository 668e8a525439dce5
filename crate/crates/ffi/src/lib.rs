//! C bindings for `qcx`.
//!
//! Observables and circuits cross the boundary as opaque handles that the
//! caller releases with the matching `*_free` function. Every fallible call
//! returns a [`QcxStatus`]; on failure a description is kept per thread and
//! can be fetched with [`qcx_last_error_message`]. Panics never unwind into
//! C: they are caught and reported as `QCX_STATUS_PANIC`.
//!
//! Strings returned by this library are owned by the caller and must be
//! released with [`qcx_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use qcx::algorithms::run_vqe;
use qcx::ansatz::{hartree_fock_circuit, uccsd_circuit, UccsdSpec};
use qcx::backend::{expectation, StatevectorAccelerator};
use qcx::ir::parse_kernel;
use qcx::optim::Optimizer;
use qcx::pauli::parse_hamiltonian;
use qcx::{qalloc, Accelerator, AcceleratorConfig, CompositeInstruction, HeterogeneousMap, PauliOperator};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcxStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Hamiltonian or kernel text failed to parse.
    ParseError = 3,
    /// An argument was out of range or inconsistent.
    InvalidArgument = 4,
    /// The simulator rejected the circuit.
    BackendError = 5,
    /// An algorithm or optimizer failed.
    AlgorithmError = 6,
    /// An output buffer was too small; the required length was written.
    BufferTooSmall = 7,
    /// A Rust panic was caught at the boundary.
    Panic = 99,
}

/// Opaque Pauli-sum observable.
pub struct QcxObservable(PauliOperator);

/// Opaque circuit, possibly with free variables.
pub struct QcxCircuit(CompositeInstruction);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<Vec<u8>>) {
    let mut bytes = message.into();
    bytes.retain(|&b| b != 0);
    let c = CString::new(bytes).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(QcxStatus, String);

type FfiResult<T = ()> = Result<T, Failure>;

fn fail<T>(status: QcxStatus, message: impl std::fmt::Display) -> FfiResult<T> {
    Err(Failure(status, message.to_string()))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> FfiResult) -> QcxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QcxStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let what = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {what}"));
            QcxStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return fail(QcxStatus::NullPointer, format!("{what} is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .or_else(|_| fail(QcxStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn read_ref<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or(Failure(QcxStatus::NullPointer, format!("{what} is null")))
}

unsafe fn write_out<T>(p: *mut T, value: T, what: &str) -> FfiResult {
    if p.is_null() {
        return fail(QcxStatus::NullPointer, format!("{what} is null"));
    }
    p.write(value);
    Ok(())
}

unsafe fn read_slice<'a>(p: *const f64, len: usize, what: &str) -> FfiResult<&'a [f64]> {
    if len == 0 {
        Ok(&[])
    } else if p.is_null() {
        fail(QcxStatus::NullPointer, format!("{what} is null"))
    } else {
        Ok(std::slice::from_raw_parts(p, len))
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', "")).map_or(std::ptr::null_mut(), CString::into_raw)
}

fn accelerator(shots: i64, seed: u64) -> FfiResult<Arc<dyn Accelerator>> {
    let config = if shots == 0 {
        AcceleratorConfig::exact()
    } else {
        AcceleratorConfig::sampled(shots, seed)
    };
    StatevectorAccelerator::new(config)
        .map(|a| Arc::new(a) as Arc<dyn Accelerator>)
        .or_else(|e| fail(QcxStatus::InvalidArgument, e))
}

/// Library version as a static NUL-terminated string. Do not free.
#[no_mangle]
pub extern "C" fn qcx_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL if none. The
/// caller frees the copy with [`qcx_string_free`].
#[no_mangle]
pub extern "C" fn qcx_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null_mut(), |c| c.clone().into_raw()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn qcx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a Hamiltonian in the text format (one `coef [P<q>]*` term per
/// line) into `*out`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qcx_observable_parse(text: *const c_char, out: *mut *mut QcxObservable) -> QcxStatus {
    guard(|| {
        let text = read_str(text, "text")?;
        let op = parse_hamiltonian(text).or_else(|e| fail(QcxStatus::ParseError, e))?;
        write_out(out, Box::into_raw(Box::new(QcxObservable(op))), "out")
    })
}

/// Number of qubits the observable acts on.
///
/// # Safety
/// `obs` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qcx_observable_n_qubits(obs: *const QcxObservable, out: *mut usize) -> QcxStatus {
    guard(|| write_out(out, read_ref(obs, "obs")?.0.n_qubits(), "out"))
}

/// Number of Pauli terms in the observable.
///
/// # Safety
/// `obs` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qcx_observable_n_terms(obs: *const QcxObservable, out: *mut usize) -> QcxStatus {
    guard(|| write_out(out, read_ref(obs, "obs")?.0.len(), "out"))
}

/// Text form of the observable, or NULL for a null handle.
///
/// # Safety
/// `obs` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn qcx_observable_to_string(obs: *const QcxObservable) -> *mut c_char {
    obs.as_ref().map_or(std::ptr::null_mut(), |o| into_c_string(o.0.to_string()))
}

/// Releases an observable. NULL is ignored.
///
/// # Safety
/// `obs` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn qcx_observable_free(obs: *mut QcxObservable) {
    if !obs.is_null() {
        drop(Box::from_raw(obs));
    }
}

/// Parses kernel source (`__qpu__ void name(qbit q, double t) { ... }` or
/// the line form starting `kernel name(t)`) into `*out`.
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qcx_circuit_parse(source: *const c_char, out: *mut *mut QcxCircuit) -> QcxStatus {
    guard(|| {
        let source = read_str(source, "source")?;
        let c = parse_kernel(source).or_else(|e| fail(QcxStatus::ParseError, e))?;
        write_out(out, Box::into_raw(Box::new(QcxCircuit(c))), "out")
    })
}

/// Closed-shell Hartree-Fock preparation for `ne` electrons in `nq`
/// spin-orbitals.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qcx_hf_circuit(ne: usize, nq: usize, out: *mut *mut QcxCircuit) -> QcxStatus {
    guard(|| {
        let c = hartree_fock_circuit(ne, nq).or_else(|e| fail(QcxStatus::InvalidArgument, e))?;
        write_out(out, Box::into_raw(Box::new(QcxCircuit(c))), "out")
    })
}

/// UCCSD ansatz on top of the Hartree-Fock state, one variable per
/// excitation.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qcx_uccsd_circuit(ne: usize, nq: usize, out: *mut *mut QcxCircuit) -> QcxStatus {
    guard(|| {
        let spec = UccsdSpec::new(ne, nq).or_else(|e| fail(QcxStatus::InvalidArgument, e))?;
        let c = uccsd_circuit(spec).or_else(|e| fail(QcxStatus::InvalidArgument, e))?;
        write_out(out, Box::into_raw(Box::new(QcxCircuit(c))), "out")
    })
}

/// Number of qubits the circuit touches.
///
/// # Safety
/// `circuit` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qcx_circuit_n_qubits(circuit: *const QcxCircuit, out: *mut usize) -> QcxStatus {
    guard(|| write_out(out, read_ref(circuit, "circuit")?.0.n_qubits(), "out"))
}

/// Number of free variables, i.e. the parameter count expected by
/// [`qcx_expectation`] and produced by [`qcx_vqe`].
///
/// # Safety
/// `circuit` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qcx_circuit_n_variables(circuit: *const QcxCircuit, out: *mut usize) -> QcxStatus {
    guard(|| write_out(out, read_ref(circuit, "circuit")?.0.n_variables(), "out"))
}

/// Number of gates after flattening.
///
/// # Safety
/// `circuit` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qcx_circuit_n_instructions(circuit: *const QcxCircuit, out: *mut usize) -> QcxStatus {
    guard(|| write_out(out, read_ref(circuit, "circuit")?.0.n_instructions(), "out"))
}

/// Line-form text of the circuit, readable by [`qcx_circuit_parse`], or
/// NULL for a null handle.
///
/// # Safety
/// `circuit` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn qcx_circuit_to_string(circuit: *const QcxCircuit) -> *mut c_char {
    circuit.as_ref().map_or(std::ptr::null_mut(), |c| into_c_string(c.0.pretty_print()))
}

/// Releases a circuit. NULL is ignored.
///
/// # Safety
/// `circuit` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn qcx_circuit_free(circuit: *mut QcxCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

/// `<psi(params)| obs |psi(params)>` for the circuit with its variables
/// bound to `params` (in declaration order). `shots = 0` evaluates exactly;
/// otherwise each term is estimated from `shots` samples drawn with `seed`.
///
/// # Safety
/// Handles must be live, `params` must hold `n_params` values (it may be
/// NULL when `n_params` is 0) and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcx_expectation(
    obs: *const QcxObservable,
    circuit: *const QcxCircuit,
    params: *const f64,
    n_params: usize,
    shots: i64,
    seed: u64,
    out: *mut f64,
) -> QcxStatus {
    guard(|| {
        let obs = &read_ref(obs, "obs")?.0;
        let circuit = &read_ref(circuit, "circuit")?.0;
        let params = read_slice(params, n_params, "params")?;
        if params.len() != circuit.n_variables() {
            return fail(
                QcxStatus::InvalidArgument,
                format!("circuit has {} variables, got {} parameters", circuit.n_variables(), params.len()),
            );
        }
        let bound = circuit.evaluate(params).or_else(|e| fail(QcxStatus::InvalidArgument, e))?;
        let acc = accelerator(shots, seed)?;
        let value = expectation(obs, &bound, acc.as_ref()).or_else(|e| fail(QcxStatus::BackendError, e))?;
        write_out(out, value, "out")
    })
}

/// Minimizes `<obs>` over the circuit's variables with the named optimizer
/// (`"nelder-mead"` when NULL), starting from zeros.
///
/// Writes the minimum to `*energy`, the variable count to `*n_params` and,
/// if `params_capacity` is large enough, the optimal parameters to
/// `params`. Returns `QCX_STATUS_BUFFER_TOO_SMALL` (after writing `*energy`
/// and `*n_params`) when it is not.
///
/// # Safety
/// Handles must be live, `optimizer` NULL or NUL-terminated, `params` must
/// have room for `params_capacity` values (or be NULL when that is 0), and
/// `energy`, `n_params` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcx_vqe(
    obs: *const QcxObservable,
    circuit: *const QcxCircuit,
    optimizer: *const c_char,
    shots: i64,
    seed: u64,
    energy: *mut f64,
    params: *mut f64,
    params_capacity: usize,
    n_params: *mut usize,
) -> QcxStatus {
    guard(|| {
        let obs = read_ref(obs, "obs")?.0.clone();
        let circuit = read_ref(circuit, "circuit")?.0.clone();
        let name = if optimizer.is_null() {
            "nelder-mead"
        } else {
            read_str(optimizer, "optimizer")?
        };
        if energy.is_null() || n_params.is_null() {
            return fail(QcxStatus::NullPointer, "energy and n_params must be non-null");
        }
        let opt = qcx::registry::get_optimizer(name).or_else(|e| fail(QcxStatus::InvalidArgument, e))?;
        let n = obs.n_qubits().max(circuit.n_qubits()).max(1);
        let mut buffer = qalloc(n).or_else(|e| fail(QcxStatus::BackendError, e))?;
        let options = HeterogeneousMap::new()
            .with("observable", obs)
            .with("ansatz", circuit)
            .with("optimizer", Arc::<dyn Optimizer>::from(opt))
            .with("accelerator", accelerator(shots, seed)?);
        run_vqe(options, &mut buffer).or_else(|e| fail(QcxStatus::AlgorithmError, e))?;
        let e: f64 = buffer.get("opt-val").or_else(|e| fail(QcxStatus::AlgorithmError, e))?;
        let x: Vec<f64> = buffer.get("opt-params").or_else(|e| fail(QcxStatus::AlgorithmError, e))?;
        energy.write(e);
        n_params.write(x.len());
        if x.len() > params_capacity {
            return fail(
                QcxStatus::BufferTooSmall,
                format!("{} parameters do not fit in a buffer of {params_capacity}", x.len()),
            );
        }
        if !x.is_empty() {
            if params.is_null() {
                return fail(QcxStatus::NullPointer, "params is null");
            }
            std::ptr::copy_nonoverlapping(x.as_ptr(), params, x.len());
        }
        Ok(())
    })
}
