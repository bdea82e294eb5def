//! C ABI for the Spatial Pooler engine.
//!
//! The pooler lives behind an opaque handle; every function returns a status
//! code and reports results through out-parameters. Input frames cross the
//! boundary as one byte per bit (zero = clear). `htm_sp_last_error` exposes
//! the message of the most recent failure on the calling thread.
//!
//! The generated header is written to `include/htm_sp.h` at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use htm_sp::parallel::{plan_kernels, step_parallel, KernelPlan};
use htm_sp::{load_snapshot, save_snapshot, BinaryFrame, SpConfig, SpState};

/// Status code of every fallible FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HtmSpStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidConfig = 2,
    InvalidInput = 3,
    IoError = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Which backend executes a step.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HtmSpBackend {
    Sequential = 0,
    Parallel = 1,
}

/// Plain-data mirror of the pooler configuration.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HtmSpConfig {
    pub num_columns: u64,
    pub synapses_per_column: u64,
    pub min_overlap: u32,
    pub winners_set_size: u64,
    pub perm_increment: f64,
    pub perm_decrement: f64,
    pub initial_permanence: f64,
    pub connected_threshold: f64,
    pub initial_inhibition_radius: u64,
    pub max_boost: f64,
    pub duty_cycle_period: u32,
    pub input_size: u64,
    pub rng_seed: u64,
}

impl From<&HtmSpConfig> for SpConfig {
    fn from(c: &HtmSpConfig) -> SpConfig {
        SpConfig {
            num_columns: c.num_columns as usize,
            synapses_per_column: c.synapses_per_column as usize,
            min_overlap: c.min_overlap,
            winners_set_size: c.winners_set_size as usize,
            perm_increment: c.perm_increment,
            perm_decrement: c.perm_decrement,
            initial_permanence: c.initial_permanence,
            connected_threshold: c.connected_threshold,
            initial_inhibition_radius: c.initial_inhibition_radius as usize,
            max_boost: c.max_boost,
            duty_cycle_period: c.duty_cycle_period,
            input_size: c.input_size as usize,
            rng_seed: c.rng_seed,
        }
    }
}

/// Opaque pooler handle.
pub struct HtmSp {
    state: SpState,
    plan: KernelPlan,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: impl Into<String>) {
    let message = message.into();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(message).ok();
    });
}

fn guard<F: FnOnce() -> HtmSpStatus>(f: F) -> HtmSpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic");
            HtmSpStatus::Panic
        }
    }
}

fn status_for(err: &htm_sp::Error) -> HtmSpStatus {
    match err {
        htm_sp::Error::Config(_) => HtmSpStatus::InvalidConfig,
        htm_sp::Error::Io { .. } | htm_sp::Error::Format(_) => HtmSpStatus::IoError,
        _ => HtmSpStatus::InvalidInput,
    }
}

/// Message of the most recent error on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn htm_sp_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |s| s.as_ptr())
    })
}

/// Fills `out` with the default configuration (2048 columns, 128 synapses,
/// min overlap 8, winners 40, 240x134 input).
///
/// # Safety
/// `out` must point to writable memory for one `HtmSpConfig`.
#[no_mangle]
pub unsafe extern "C" fn htm_sp_config_default(out: *mut HtmSpConfig) -> HtmSpStatus {
    guard(|| {
        if out.is_null() {
            set_last_error("out is NULL");
            return HtmSpStatus::NullArgument;
        }
        let d = SpConfig::default();
        unsafe {
            *out = HtmSpConfig {
                num_columns: d.num_columns as u64,
                synapses_per_column: d.synapses_per_column as u64,
                min_overlap: d.min_overlap,
                winners_set_size: d.winners_set_size as u64,
                perm_increment: d.perm_increment,
                perm_decrement: d.perm_decrement,
                initial_permanence: d.initial_permanence,
                connected_threshold: d.connected_threshold,
                initial_inhibition_radius: d.initial_inhibition_radius as u64,
                max_boost: d.max_boost,
                duty_cycle_period: d.duty_cycle_period,
                input_size: d.input_size as u64,
                rng_seed: d.rng_seed,
            };
        }
        HtmSpStatus::Ok
    })
}

/// Creates a pooler from `config`, storing the handle in `out`.
///
/// # Safety
/// `config` must point to a valid `HtmSpConfig` and `out` to a writable
/// pointer slot. A returned handle must be released with [`htm_sp_free`].
#[no_mangle]
pub unsafe extern "C" fn htm_sp_new(
    config: *const HtmSpConfig,
    out: *mut *mut HtmSp,
) -> HtmSpStatus {
    guard(|| {
        if config.is_null() || out.is_null() {
            set_last_error("config or out is NULL");
            return HtmSpStatus::NullArgument;
        }
        let rust_config: SpConfig = unsafe { (&*config).into() };
        match SpState::init(rust_config.clone()) {
            Ok(state) => {
                let plan = plan_kernels(&rust_config);
                let handle = Box::new(HtmSp { state, plan });
                unsafe { *out = Box::into_raw(handle) };
                HtmSpStatus::Ok
            }
            Err(e) => {
                set_last_error(e.to_string());
                status_for(&e)
            }
        }
    })
}

/// Releases a handle created by [`htm_sp_new`] or [`htm_sp_load`]. NULL is
/// ignored.
///
/// # Safety
/// `sp` must be a pointer previously returned by this library and not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn htm_sp_free(sp: *mut HtmSp) {
    if !sp.is_null() {
        drop(unsafe { Box::from_raw(sp) });
    }
}

/// Number of columns of the pooler behind `sp`.
///
/// # Safety
/// `sp` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn htm_sp_num_columns(sp: *const HtmSp, out: *mut u64) -> HtmSpStatus {
    guard(|| {
        if sp.is_null() || out.is_null() {
            set_last_error("sp or out is NULL");
            return HtmSpStatus::NullArgument;
        }
        unsafe { *out = (*sp).state.num_columns() as u64 };
        HtmSpStatus::Ok
    })
}

/// Current inhibition radius.
///
/// # Safety
/// `sp` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn htm_sp_inhibition_radius(
    sp: *const HtmSp,
    out: *mut u64,
) -> HtmSpStatus {
    guard(|| {
        if sp.is_null() || out.is_null() {
            set_last_error("sp or out is NULL");
            return HtmSpStatus::NullArgument;
        }
        unsafe { *out = (*sp).state.inhibition_radius() as u64 };
        HtmSpStatus::Ok
    })
}

/// Number of compute steps processed so far.
///
/// # Safety
/// `sp` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn htm_sp_iteration(sp: *const HtmSp, out: *mut u64) -> HtmSpStatus {
    guard(|| {
        if sp.is_null() || out.is_null() {
            set_last_error("sp or out is NULL");
            return HtmSpStatus::NullArgument;
        }
        unsafe { *out = (*sp).state.iteration() };
        HtmSpStatus::Ok
    })
}

/// Runs one pooler step over `input_len` bits given as one byte per bit.
///
/// Active column indices are written ascending into `active_out` (capacity
/// `active_capacity`); `active_len` receives the count. When the buffer is
/// too small, `active_len` still receives the required count and the call
/// returns `BufferTooSmall` without writing indices.
///
/// # Safety
/// `sp` must be a live handle, `input` must hold `input_len` readable bytes,
/// `active_out` must hold `active_capacity` writable `u64` slots and
/// `active_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn htm_sp_step(
    sp: *mut HtmSp,
    input: *const u8,
    input_len: usize,
    learn: bool,
    backend: HtmSpBackend,
    active_out: *mut u64,
    active_capacity: usize,
    active_len: *mut usize,
) -> HtmSpStatus {
    guard(|| {
        if sp.is_null() || input.is_null() || active_len.is_null() {
            set_last_error("sp, input or active_len is NULL");
            return HtmSpStatus::NullArgument;
        }
        if active_out.is_null() && active_capacity > 0 {
            set_last_error("active_out is NULL but active_capacity > 0");
            return HtmSpStatus::NullArgument;
        }
        let handle = unsafe { &mut *sp };
        let bytes = unsafe { std::slice::from_raw_parts(input, input_len) };
        let frame = BinaryFrame::from_fn(input_len, |i| bytes[i] != 0);
        let result = match backend {
            HtmSpBackend::Sequential => handle.state.step(&frame, learn),
            HtmSpBackend::Parallel => {
                step_parallel(&mut handle.state, &frame, &handle.plan, learn)
                    .map(|(active, _records)| active)
            }
        };
        match result {
            Ok(active) => {
                unsafe { *active_len = active.len() };
                if active.len() > active_capacity {
                    set_last_error(format!(
                        "active buffer holds {active_capacity}, need {}",
                        active.len()
                    ));
                    return HtmSpStatus::BufferTooSmall;
                }
                for (i, &c) in active.iter().enumerate() {
                    unsafe { *active_out.add(i) = c as u64 };
                }
                HtmSpStatus::Ok
            }
            Err(e) => {
                set_last_error(e.to_string());
                status_for(&e)
            }
        }
    })
}

unsafe fn path_from_cstr(path: *const c_char) -> Result<PathBuf, HtmSpStatus> {
    if path.is_null() {
        set_last_error("path is NULL");
        return Err(HtmSpStatus::NullArgument);
    }
    match unsafe { CStr::from_ptr(path) }.to_str() {
        Ok(s) => Ok(PathBuf::from(s)),
        Err(_) => {
            set_last_error("path is not valid UTF-8");
            Err(HtmSpStatus::InvalidInput)
        }
    }
}

/// Writes a versioned snapshot of the pooler state to `path`.
///
/// # Safety
/// `sp` must be a live handle; `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn htm_sp_save(sp: *const HtmSp, path: *const c_char) -> HtmSpStatus {
    guard(|| {
        if sp.is_null() {
            set_last_error("sp is NULL");
            return HtmSpStatus::NullArgument;
        }
        let path = match unsafe { path_from_cstr(path) } {
            Ok(p) => p,
            Err(status) => return status,
        };
        match save_snapshot(unsafe { &(*sp).state }, path) {
            Ok(()) => HtmSpStatus::Ok,
            Err(e) => {
                set_last_error(e.to_string());
                status_for(&e)
            }
        }
    })
}

/// Restores a pooler from a snapshot written by [`htm_sp_save`].
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be a writable pointer
/// slot. A returned handle must be released with [`htm_sp_free`].
#[no_mangle]
pub unsafe extern "C" fn htm_sp_load(path: *const c_char, out: *mut *mut HtmSp) -> HtmSpStatus {
    guard(|| {
        if out.is_null() {
            set_last_error("out is NULL");
            return HtmSpStatus::NullArgument;
        }
        let path = match unsafe { path_from_cstr(path) } {
            Ok(p) => p,
            Err(status) => return status,
        };
        match load_snapshot(path) {
            Ok(state) => {
                let plan = plan_kernels(state.config());
                unsafe { *out = Box::into_raw(Box::new(HtmSp { state, plan })) };
                HtmSpStatus::Ok
            }
            Err(e) => {
                set_last_error(e.to_string());
                status_for(&e)
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_config() -> HtmSpConfig {
        let mut config = HtmSpConfig {
            num_columns: 0,
            synapses_per_column: 0,
            min_overlap: 0,
            winners_set_size: 0,
            perm_increment: 0.0,
            perm_decrement: 0.0,
            initial_permanence: 0.0,
            connected_threshold: 0.0,
            initial_inhibition_radius: 0,
            max_boost: 1.0,
            duty_cycle_period: 1,
            input_size: 0,
            rng_seed: 0,
        };
        unsafe { assert_eq!(htm_sp_config_default(&mut config), HtmSpStatus::Ok) };
        config.num_columns = 32;
        config.synapses_per_column = 16;
        config.min_overlap = 2;
        config.winners_set_size = 4;
        config.initial_inhibition_radius = 6;
        config.input_size = 128;
        config.rng_seed = 9;
        config
    }

    fn input_bytes(len: usize, step: usize) -> Vec<u8> {
        (0..len).map(|i| u8::from(i % step == 0)).collect()
    }

    #[test]
    fn defaults_match_the_engine() {
        let mut config = test_config();
        unsafe { assert_eq!(htm_sp_config_default(&mut config), HtmSpStatus::Ok) };
        assert_eq!(config.num_columns, 2048);
        assert_eq!(config.synapses_per_column, 128);
        assert_eq!(config.min_overlap, 8);
        assert_eq!(config.winners_set_size, 40);
        assert_eq!(config.input_size, 240 * 134);
    }

    #[test]
    fn create_step_and_free() {
        let config = test_config();
        let mut sp: *mut HtmSp = std::ptr::null_mut();
        unsafe {
            assert_eq!(htm_sp_new(&config, &mut sp), HtmSpStatus::Ok);
            assert!(!sp.is_null());

            let mut columns = 0u64;
            assert_eq!(htm_sp_num_columns(sp, &mut columns), HtmSpStatus::Ok);
            assert_eq!(columns, 32);

            let input = input_bytes(128, 3);
            let mut active = vec![0u64; 32];
            let mut count = 0usize;
            let status = htm_sp_step(
                sp,
                input.as_ptr(),
                input.len(),
                true,
                HtmSpBackend::Sequential,
                active.as_mut_ptr(),
                active.len(),
                &mut count,
            );
            assert_eq!(status, HtmSpStatus::Ok);
            assert!(count <= 32);

            let mut iteration = 0u64;
            assert_eq!(htm_sp_iteration(sp, &mut iteration), HtmSpStatus::Ok);
            assert_eq!(iteration, 1);

            htm_sp_free(sp);
        }
    }

    #[test]
    fn backends_agree_across_the_boundary() {
        let config = test_config();
        let mut seq: *mut HtmSp = std::ptr::null_mut();
        let mut par: *mut HtmSp = std::ptr::null_mut();
        unsafe {
            assert_eq!(htm_sp_new(&config, &mut seq), HtmSpStatus::Ok);
            assert_eq!(htm_sp_new(&config, &mut par), HtmSpStatus::Ok);
            for step in 0..20 {
                let input = input_bytes(128, 2 + step % 4);
                let mut active_a = vec![0u64; 32];
                let mut active_b = vec![0u64; 32];
                let (mut count_a, mut count_b) = (0usize, 0usize);
                assert_eq!(
                    htm_sp_step(
                        seq,
                        input.as_ptr(),
                        input.len(),
                        true,
                        HtmSpBackend::Sequential,
                        active_a.as_mut_ptr(),
                        active_a.len(),
                        &mut count_a,
                    ),
                    HtmSpStatus::Ok
                );
                assert_eq!(
                    htm_sp_step(
                        par,
                        input.as_ptr(),
                        input.len(),
                        true,
                        HtmSpBackend::Parallel,
                        active_b.as_mut_ptr(),
                        active_b.len(),
                        &mut count_b,
                    ),
                    HtmSpStatus::Ok
                );
                assert_eq!(count_a, count_b);
                assert_eq!(&active_a[..count_a], &active_b[..count_b]);
            }
            htm_sp_free(seq);
            htm_sp_free(par);
        }
    }

    #[test]
    fn snapshot_roundtrip_over_ffi() {
        let config = test_config();
        let dir = tempfile::tempdir().unwrap();
        let path = std::ffi::CString::new(
            dir.path().join("sp.json").to_str().unwrap().to_string(),
        )
        .unwrap();
        let mut sp: *mut HtmSp = std::ptr::null_mut();
        unsafe {
            assert_eq!(htm_sp_new(&config, &mut sp), HtmSpStatus::Ok);
            let input = input_bytes(128, 3);
            let mut active = vec![0u64; 32];
            let mut count = 0usize;
            for _ in 0..5 {
                htm_sp_step(
                    sp,
                    input.as_ptr(),
                    input.len(),
                    true,
                    HtmSpBackend::Sequential,
                    active.as_mut_ptr(),
                    active.len(),
                    &mut count,
                );
            }
            assert_eq!(htm_sp_save(sp, path.as_ptr()), HtmSpStatus::Ok);

            let mut restored: *mut HtmSp = std::ptr::null_mut();
            assert_eq!(htm_sp_load(path.as_ptr(), &mut restored), HtmSpStatus::Ok);
            assert_eq!((*sp).state, (*restored).state);
            htm_sp_free(sp);
            htm_sp_free(restored);
        }
    }

    #[test]
    fn errors_set_codes_and_messages() {
        unsafe {
            // NULL arguments
            assert_eq!(
                htm_sp_new(std::ptr::null(), std::ptr::null_mut()),
                HtmSpStatus::NullArgument
            );

            // invalid config names the invariant
            let mut config = test_config();
            config.winners_set_size = 1000;
            let mut sp: *mut HtmSp = std::ptr::null_mut();
            assert_eq!(htm_sp_new(&config, &mut sp), HtmSpStatus::InvalidConfig);
            let message = CStr::from_ptr(htm_sp_last_error()).to_str().unwrap();
            assert!(message.contains("winners_set_size"), "{message}");

            // wrong frame length
            let config = test_config();
            assert_eq!(htm_sp_new(&config, &mut sp), HtmSpStatus::Ok);
            let input = input_bytes(64, 2);
            let mut active = vec![0u64; 32];
            let mut count = 0usize;
            assert_eq!(
                htm_sp_step(
                    sp,
                    input.as_ptr(),
                    input.len(),
                    false,
                    HtmSpBackend::Sequential,
                    active.as_mut_ptr(),
                    active.len(),
                    &mut count,
                ),
                HtmSpStatus::InvalidInput
            );

            // undersized output buffer
            let input = input_bytes(128, 2);
            let mut tiny = vec![0u64; 1];
            let status = htm_sp_step(
                sp,
                input.as_ptr(),
                input.len(),
                false,
                HtmSpBackend::Sequential,
                tiny.as_mut_ptr(),
                tiny.len(),
                &mut count,
            );
            if status == HtmSpStatus::BufferTooSmall {
                assert!(count > 1);
            }
            htm_sp_free(sp);

            // missing snapshot file
            let mut restored: *mut HtmSp = std::ptr::null_mut();
            let path = std::ffi::CString::new("/no/such/snapshot.json").unwrap();
            assert_eq!(
                htm_sp_load(path.as_ptr(), &mut restored),
                HtmSpStatus::IoError
            );
        }
    }
}
