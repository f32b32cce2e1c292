//! C ABI over the `wordorder` library.
//!
//! Every fallible function returns a [`WoStatus`]. On anything but
//! `WO_STATUS_OK` the calling thread's last error holds a stable code such
//! as `"rate.degenerate_profile"` and a message, readable with
//! [`wo_last_error_code`] and [`wo_last_error_message`].
//!
//! Array outputs follow one protocol: `len` points to the capacity of `out`
//! on entry and receives the number of elements required on return. When
//! the capacity is too small nothing is written to `out` (which may then be
//! NULL) and `WO_STATUS_BUFFER_TOO_SMALL` is returned.
//!
//! Strings returned through `char **` are owned by the caller and released
//! with [`wo_string_free`]. Handles are released with their `_free`
//! function; passing NULL to a `_free` function is a no-op.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{self, AssertUnwindSafe};
use std::ptr;

use wordorder::coding;
use wordorder::deplen;
use wordorder::distributions::{random_model, JointSequenceModel};
use wordorder::infotheory::{self, Objective};
use wordorder::rate::{self, GammaGrid, HilbergVariant, ProfileOptions, UidClass};
use wordorder::ring::{self, Filter, RingKernel, WordOrder, ALL_ORDERS};
use wordorder::transducer::CostTransducer;
use wordorder::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    BufferTooSmall = 3,
    InvalidArgument = 4,
    /// A library error; see the last error code.
    DomainError = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WoUidClass {
    Full = 0,
    Strong = 1,
    Neither = 2,
}

/// Parameters of `a * i^-gamma + b`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WoHilbergFit {
    pub a: f64,
    pub gamma: f64,
    pub b: f64,
    pub rms_residual: f64,
}

pub const WO_OBJECTIVE_UNCERTAINTY: u32 = 0;
pub const WO_OBJECTIVE_PREDICTABILITY: u32 = 1;
pub const WO_HILBERG_PURE: u32 = 0;
pub const WO_HILBERG_RELAXED: u32 = 1;

/// Opaque joint sequence model.
pub struct WoModel(JointSequenceModel);

/// Opaque transition kernel on the ring of word orders.
pub struct WoKernel(RingKernel);

struct LastError {
    code: CString,
    message: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<LastError>> = const { RefCell::new(None) };
}

fn set_last_error(code: &str, message: &str) {
    let clean = |s: &str| CString::new(s.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(LastError { code: clean(code), message: clean(message) }));
}

enum Fail {
    Status(WoStatus, String),
    Domain(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Domain(e)
    }
}

type FfiResult = Result<(), Fail>;

fn guard(f: impl FnOnce() -> FfiResult) -> WoStatus {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WoStatus::Ok,
        Ok(Err(Fail::Domain(e))) => {
            set_last_error(e.code(), &e.to_string());
            WoStatus::DomainError
        }
        Ok(Err(Fail::Status(s, msg))) => {
            let code = match s {
                WoStatus::NullPointer => "ffi.null_pointer",
                WoStatus::InvalidUtf8 => "ffi.invalid_utf8",
                WoStatus::BufferTooSmall => "ffi.buffer_too_small",
                _ => "ffi.invalid_argument",
            };
            set_last_error(code, &msg);
            s
        }
        Err(_) => {
            set_last_error("ffi.panic", "internal panic");
            WoStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(WoStatus::NullPointer, format!("{what} is NULL"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail::Status(WoStatus::InvalidArgument, msg.into())
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Fail::Status(WoStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn str_list(items: *const *const c_char, len: usize, what: &str) -> Result<Vec<String>, Fail> {
    if len == 0 {
        return Ok(Vec::new());
    }
    if items.is_null() {
        return Err(null(what));
    }
    std::slice::from_raw_parts(items, len)
        .iter()
        .map(|p| str_arg(*p, what).map(String::from))
        .collect()
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn write_slice<T: Copy>(src: &[T], out: *mut T, len: *mut usize) -> FfiResult {
    let len = out_arg(len, "len")?;
    let capacity = *len;
    *len = src.len();
    if capacity < src.len() {
        return Err(Fail::Status(
            WoStatus::BufferTooSmall,
            format!("need {} elements, capacity {capacity}", src.len()),
        ));
    }
    if !src.is_empty() {
        if out.is_null() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    }
    Ok(())
}

unsafe fn write_string(s: &str, out: *mut *mut c_char) -> FfiResult {
    let out = out_arg(out, "out")?;
    let c = CString::new(s).map_err(|_| invalid("string contains NUL"))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn model_ref<'a>(model: *const WoModel) -> Result<&'a JointSequenceModel, Fail> {
    model.as_ref().map(|m| &m.0).ok_or_else(|| null("model"))
}

unsafe fn context_order(model: &JointSequenceModel, order: *const *const c_char, order_len: usize) -> Result<Vec<String>, Fail> {
    if order.is_null() && order_len == 0 {
        return Ok(model.context_roles().into_iter().map(String::from).collect());
    }
    str_list(order, order_len, "order")
}

fn objective(code: u32) -> Result<Objective, Fail> {
    match code {
        WO_OBJECTIVE_UNCERTAINTY => Ok(Objective::Uncertainty),
        WO_OBJECTIVE_PREDICTABILITY => Ok(Objective::Predictability),
        other => Err(invalid(format!("unknown objective {other}"))),
    }
}

unsafe fn word_order(p: *const c_char, what: &str) -> Result<WordOrder, Fail> {
    Ok(str_arg(p, what)?.parse::<WordOrder>()?)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wo_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Code of the calling thread's last error, or NULL. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn wo_last_error_code() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |e| e.code.as_ptr()))
}

/// Message of the calling thread's last error, or NULL.
#[no_mangle]
pub extern "C" fn wo_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |e| e.message.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wo_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse a model file.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wo_model_from_json(json: *const c_char, out: *mut *mut WoModel) -> WoStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let model = JointSequenceModel::from_json(str_arg(json, "json")?)?;
        *out = Box::into_raw(Box::new(WoModel(model)));
        Ok(())
    })
}

/// Seeded random model with roles `target`, `context_1`, ….
///
/// # Safety
/// `sizes` must hold `n` elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wo_model_random(sizes: *const usize, n: usize, seed: u64, out: *mut *mut WoModel) -> WoStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let model = random_model(slice_arg(sizes, n, "sizes")?, seed)?;
        *out = Box::into_raw(Box::new(WoModel(model)));
        Ok(())
    })
}

/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wo_model_free(model: *mut WoModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Serialize a model; free the result with `wo_string_free`.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wo_model_to_json(model: *const WoModel, out: *mut *mut c_char) -> WoStatus {
    guard(|| write_string(&model_ref(model)?.to_json(), out))
}

/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wo_model_num_roles(model: *const WoModel, out: *mut usize) -> WoStatus {
    guard(|| {
        *out_arg(out, "out")? = model_ref(model)?.num_roles();
        Ok(())
    })
}

/// `H(target | context)` in bits.
///
/// # Safety
/// `model` must be a live handle, `target` a string, `context` an array of
/// `context_len` strings (may be NULL when empty), `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wo_conditional_entropy(
    model: *const WoModel,
    target: *const c_char,
    context: *const *const c_char,
    context_len: usize,
    out: *mut f64,
) -> WoStatus {
    guard(|| {
        let ctx = str_list(context, context_len, "context")?;
        let v = infotheory::conditional_entropy(model_ref(model)?, str_arg(target, "target")?, &ctx)?;
        *out_arg(out, "out")? = v;
        Ok(())
    })
}

/// `I(target; new | given)` in bits.
///
/// # Safety
/// As for [`wo_conditional_entropy`].
#[no_mangle]
pub unsafe extern "C" fn wo_conditional_mutual_information(
    model: *const WoModel,
    target: *const c_char,
    new_role: *const c_char,
    given: *const *const c_char,
    given_len: usize,
    out: *mut f64,
) -> WoStatus {
    guard(|| {
        let given = str_list(given, given_len, "given")?;
        let v = infotheory::conditional_mutual_information(
            model_ref(model)?,
            str_arg(target, "target")?,
            str_arg(new_role, "new_role")?,
            &given,
        )?;
        *out_arg(out, "out")? = v;
        Ok(())
    })
}

/// Uncertainty (`WO_OBJECTIVE_UNCERTAINTY`) or predictability profile over
/// placements `0..=n`. A NULL `order` with `order_len == 0` uses the
/// model's role order.
///
/// # Safety
/// `model` must be a live handle; `order` an array of `order_len` strings;
/// `out`/`len` follow the array protocol.
#[no_mangle]
pub unsafe extern "C" fn wo_placement_profile(
    model: *const WoModel,
    order: *const *const c_char,
    order_len: usize,
    objective_code: u32,
    out: *mut f64,
    len: *mut usize,
) -> WoStatus {
    guard(|| {
        let model = model_ref(model)?;
        let order = context_order(model, order, order_len)?;
        let profile = match objective(objective_code)? {
            Objective::Uncertainty => infotheory::uncertainty_profile(model, &order)?,
            Objective::Predictability => infotheory::predictability_profile(model, &order)?,
        };
        write_slice(&profile.values, out, len)
    })
}

/// Optimal target placements, ascending.
///
/// # Safety
/// As for [`wo_placement_profile`].
#[no_mangle]
pub unsafe extern "C" fn wo_optimal_placement(
    model: *const WoModel,
    order: *const *const c_char,
    order_len: usize,
    objective_code: u32,
    out: *mut usize,
    len: *mut usize,
) -> WoStatus {
    guard(|| {
        let model = model_ref(model)?;
        let order = context_order(model, order, order_len)?;
        let set = infotheory::optimal_target_placement(model, &order, objective(objective_code)?)?;
        write_slice(&set.into_iter().collect::<Vec<_>>(), out, len)
    })
}

/// Sum of dependency lengths with the head at `head_pos` (1-based).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wo_dependency_sum(m: usize, head_pos: usize, out: *mut u64) -> WoStatus {
    guard(|| {
        *out_arg(out, "out")? = deplen::dependency_sum(m, head_pos)?;
        Ok(())
    })
}

/// Cost of every head position under a transducer spec such as
/// `"identity"`, `"square"` or `"exp:2"` (NULL means identity).
///
/// # Safety
/// `g` must be NULL or a string; `out`/`len` follow the array protocol.
#[no_mangle]
pub unsafe extern "C" fn wo_dependency_landscape(m: usize, g: *const c_char, out: *mut f64, len: *mut usize) -> WoStatus {
    guard(|| {
        let g = if g.is_null() { CostTransducer::identity() } else { CostTransducer::parse(str_arg(g, "g")?)? };
        write_slice(&deplen::landscape(m, &g)?.costs, out, len)
    })
}

/// Name of the word order at ring index `index` (0 = SOV), or NULL.
#[no_mangle]
pub extern "C" fn wo_order_name(index: usize) -> *const c_char {
    const NAMES: [&str; 6] = ["SOV\0", "SVO\0", "VSO\0", "VOS\0", "OVS\0", "OSV\0"];
    debug_assert!(ALL_ORDERS.iter().zip(NAMES).all(|(o, n)| n.starts_with(o.name())));
    NAMES.get(index).map_or(ptr::null(), |n| n.as_ptr().cast())
}

/// # Safety
/// `a` and `b` must be strings; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wo_ring_distance(a: *const c_char, b: *const c_char, out: *mut u32) -> WoStatus {
    guard(|| {
        let d = ring::ring_distance(word_order(a, "a")?, word_order(b, "b")?);
        *out_arg(out, "out")? = d as u32;
        Ok(())
    })
}

/// Predicted destinations as a bit mask over ring indices (bit 0 = SOV).
/// `filter` may be NULL.
///
/// # Safety
/// `from` must be a string, `filter` NULL or a string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wo_predict(from: *const c_char, use_ring: bool, filter: *const c_char, out: *mut u32) -> WoStatus {
    guard(|| {
        let filter = if filter.is_null() { None } else { Some(str_arg(filter, "filter")?.parse::<Filter>()?) };
        let dest = ring::predicted_destinations(word_order(from, "from")?, use_ring, filter)?;
        *out_arg(out, "out")? = dest.iter().map(|o| 1u32 << o.index()).sum();
        Ok(())
    })
}

/// Parse a kernel (same JSON as the `kernel` field of a simulation config).
///
/// # Safety
/// `json` must be a string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wo_kernel_from_json(json: *const c_char, out: *mut *mut WoKernel) -> WoStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let kernel: RingKernel = serde_json::from_str(str_arg(json, "json")?).map_err(Error::from)?;
        kernel.validate()?;
        *out = Box::into_raw(Box::new(WoKernel(kernel)));
        Ok(())
    })
}

/// # Safety
/// `kernel` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wo_kernel_free(kernel: *mut WoKernel) {
    if !kernel.is_null() {
        drop(Box::from_raw(kernel));
    }
}

unsafe fn kernel_ref<'a>(kernel: *const WoKernel) -> Result<&'a RingKernel, Fail> {
    kernel.as_ref().map(|k| &k.0).ok_or_else(|| null("kernel"))
}

/// Row-major 6×6 transition matrix in ring order (36 values).
///
/// # Safety
/// `kernel` must be a live handle; `out`/`len` follow the array protocol.
#[no_mangle]
pub unsafe extern "C" fn wo_kernel_transition_matrix(kernel: *const WoKernel, out: *mut f64, len: *mut usize) -> WoStatus {
    guard(|| {
        let m = ring::transition_matrix(kernel_ref(kernel)?)?;
        let flat: Vec<f64> = m.iter().flatten().copied().collect();
        write_slice(&flat, out, len)
    })
}

/// Ensemble counts per step, `(steps + 1) * 6` values in ring order.
///
/// # Safety
/// `kernel` must be a live handle, `start` a string; `out`/`len` follow
/// the array protocol.
#[no_mangle]
pub unsafe extern "C" fn wo_evolve(
    kernel: *const WoKernel,
    start: *const c_char,
    steps: usize,
    ensemble_size: usize,
    seed: u64,
    out: *mut u64,
    len: *mut usize,
) -> WoStatus {
    guard(|| {
        let traj = ring::evolve(kernel_ref(kernel)?, word_order(start, "start")?, steps, ensemble_size, seed)?;
        let flat: Vec<u64> = traj.counts.iter().flatten().copied().collect();
        write_slice(&flat, out, len)
    })
}

/// Plug-in conditional entropy profile (positions 1, 2, …) of a text,
/// tokenized on whitespace or, with `chars`, per character.
///
/// # Safety
/// `text` must be a string; `out`/`len` follow the array protocol.
#[no_mangle]
pub unsafe extern "C" fn wo_rate_profile(
    text: *const c_char,
    chars: bool,
    max_order: usize,
    out: *mut f64,
    len: *mut usize,
) -> WoStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let tokens: Vec<String> = if chars {
            text.chars().filter(|c| !matches!(c, '\n' | '\r')).map(String::from).collect()
        } else {
            text.split_whitespace().map(String::from).collect()
        };
        let table = rate::ngram_counts(&tokens, max_order)?;
        let profile = rate::conditional_entropy_profile(&table, &ProfileOptions::default())?;
        write_slice(&profile.values, out, len)
    })
}

/// # Safety
/// `model` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wo_uid_classify(model: *const WoModel, cap: usize, out: *mut WoUidClass) -> WoStatus {
    guard(|| {
        let report = rate::uid_classify(model_ref(model)?, cap)?;
        *out_arg(out, "out")? = match report.class {
            UidClass::FullUid => WoUidClass::Full,
            UidClass::StrongUid => WoUidClass::Strong,
            UidClass::Neither => WoUidClass::Neither,
        };
        Ok(())
    })
}

/// Fit `a i^-gamma (+ b)` to `values[k]` at position `k + 1`.
///
/// # Safety
/// `values` must hold `n` elements; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wo_hilberg_fit(values: *const f64, n: usize, variant: u32, out: *mut WoHilbergFit) -> WoStatus {
    guard(|| {
        let variant = match variant {
            WO_HILBERG_PURE => HilbergVariant::Pure,
            WO_HILBERG_RELAXED => HilbergVariant::Relaxed,
            other => return Err(invalid(format!("unknown Hilberg variant {other}"))),
        };
        let fit = rate::hilberg_fit(slice_arg(values, n, "values")?, variant, &GammaGrid::default())?;
        *out_arg(out, "out")? = WoHilbergFit { a: fit.a, gamma: fit.gamma, b: fit.b, rms_residual: fit.rms_residual };
        Ok(())
    })
}

/// Largest value of a rate profile and its first position (1-based).
///
/// # Safety
/// `values` must hold `n` elements; `value` and `position` writable.
#[no_mangle]
pub unsafe extern "C" fn wo_peak_cost(values: *const f64, n: usize, value: *mut f64, position: *mut usize) -> WoStatus {
    guard(|| {
        let profile = infotheory::EntropyProfile::new(
            infotheory::ProfileKind::EntropyRate,
            slice_arg(values, n, "values")?.to_vec(),
        );
        let (v, i) = rate::peak_cost(&profile)?;
        *out_arg(value, "value")? = v;
        *out_arg(position, "position")? = i;
        Ok(())
    })
}

/// `ceil(-log2 p)` for each of `n` probabilities into `out` (`n` values).
///
/// # Safety
/// `probabilities` must hold `n` elements and `out` room for `n`.
#[no_mangle]
pub unsafe extern "C" fn wo_optimal_lengths(
    probabilities: *const f64,
    n: usize,
    allow_full_reduction: bool,
    out: *mut u32,
) -> WoStatus {
    guard(|| {
        let lengths = coding::optimal_lengths(slice_arg(probabilities, n, "probabilities")?, allow_full_reduction)?;
        if n > 0 && out.is_null() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(lengths.as_ptr(), out, n);
        Ok(())
    })
}

/// Tie-corrected Kendall tau of `n` pairs `(x[k], y[k])`.
///
/// # Safety
/// `x` and `y` must hold `n` elements; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wo_kendall_tau(x: *const f64, y: *const f64, n: usize, out: *mut f64) -> WoStatus {
    guard(|| {
        let (x, y) = (slice_arg(x, n, "x")?, slice_arg(y, n, "y")?);
        let pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
        *out_arg(out, "out")? = coding::kendall_tau(&pairs)?;
        Ok(())
    })
}
