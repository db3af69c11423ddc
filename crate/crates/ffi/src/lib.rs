//! C ABI for the simulation engine.
//!
//! A model is an opaque `AzppModel` handle created from a TOML configuration
//! and released with `azpp_model_free`. Every fallible call returns an
//! `AzppStatus`; on failure `azpp_last_error_message` describes the error
//! for the calling thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use azpp_core::cognition::Mode;
use azpp_core::environment::PatchState;
use azpp_core::output::{unix_ms, write_run};
use azpp_core::{run, Model, SimConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AzppStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidConfig = 4,
    Finished = 5,
    OutOfRange = 6,
    BufferTooSmall = 7,
    IoError = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AzppMode {
    Quiet = 0,
    Fight = 1,
    Flight = 2,
}

impl From<Mode> for AzppMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Quiet => AzppMode::Quiet,
            Mode::Fight => AzppMode::Fight,
            Mode::Flight => AzppMode::Flight,
        }
    }
}

/// Grid-wide observables of the last executed tick. Tie statistics are NaN
/// when there are fewer than two agents.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AzppGlobalMetrics {
    pub tick: u64,
    pub destroyed_count: u64,
    pub active_count: u64,
    pub avg_tie_strength: f64,
    pub tie_strength_dispersion: f64,
    pub mean_contagion: f64,
    pub n_attacks: u32,
}

/// One agent's current state.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AzppAgentMetrics {
    pub agent_id: u32,
    pub affect: f64,
    pub probability: f64,
    pub contagion: f64,
    pub disposition: f64,
    pub mode: AzppMode,
    pub x: u64,
    pub y: u64,
    pub radius: u64,
    pub damage: f64,
}

/// Opaque simulation handle.
pub struct AzppModel {
    inner: Model,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: AzppStatus, msg: impl Into<String>) -> AzppStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> AzppStatus) -> AzppStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(AzppStatus::Panic, "internal panic"),
    }
}

unsafe fn str_arg<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, AzppStatus> {
    if ptr.is_null() {
        return Err(fail(AzppStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        fail(
            AzppStatus::InvalidUtf8,
            format!("{what} is not valid UTF-8"),
        )
    })
}

unsafe fn config_arg(toml: *const c_char) -> Result<SimConfig, AzppStatus> {
    if toml.is_null() {
        return Ok(SimConfig::default());
    }
    let text = str_arg(toml, "config")?;
    let config = SimConfig::from_toml(text).map_err(|e| fail(AzppStatus::ParseError, e))?;
    config
        .validate()
        .map_err(|e| fail(AzppStatus::InvalidConfig, e.to_string()))?;
    Ok(config)
}

unsafe fn model_ref<'a>(model: *const AzppModel) -> Result<&'a Model, AzppStatus> {
    model
        .as_ref()
        .map(|m| &m.inner)
        .ok_or_else(|| fail(AzppStatus::NullPointer, "model is null"))
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn azpp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn azpp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Create a model from a TOML configuration (NULL for all defaults).
///
/// # Safety
/// `config_toml` must be NULL or a valid NUL-terminated string; `out` must
/// be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn azpp_model_new(
    config_toml: *const c_char,
    out: *mut *mut AzppModel,
) -> AzppStatus {
    guard(|| {
        if out.is_null() {
            return fail(AzppStatus::NullPointer, "out is null");
        }
        let config = tri!(config_arg(config_toml));
        match Model::new(config) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(AzppModel { inner }));
                AzppStatus::Ok
            }
            Err(e) => fail(AzppStatus::InvalidConfig, e.to_string()),
        }
    })
}

/// Release a model. NULL is ignored.
///
/// # Safety
/// `model` must be NULL or a handle from `azpp_model_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn azpp_model_free(model: *mut AzppModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Execute one tick. Returns `Finished` once the configured tick count has
/// been reached. `out` may be NULL.
///
/// # Safety
/// `model` must be a live handle; `out` must be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn azpp_model_step(
    model: *mut AzppModel,
    out: *mut AzppGlobalMetrics,
) -> AzppStatus {
    guard(|| {
        let Some(m) = model.as_mut() else {
            return fail(AzppStatus::NullPointer, "model is null");
        };
        if m.inner.is_finished() {
            return fail(AzppStatus::Finished, "model has run all ticks");
        }
        let step = m.inner.step();
        if let Some(out) = out.as_mut() {
            let g = step.frame.global;
            *out = AzppGlobalMetrics {
                tick: step.frame.tick,
                destroyed_count: g.destroyed_count as u64,
                active_count: g.active_count as u64,
                avg_tie_strength: g.avg_tie_strength.unwrap_or(f64::NAN),
                tie_strength_dispersion: g.tie_strength_dispersion.unwrap_or(f64::NAN),
                mean_contagion: g.mean_contagion,
                n_attacks: step.attacks.len() as u32,
            };
        }
        AzppStatus::Ok
    })
}

/// Number of ticks executed so far.
///
/// # Safety
/// `model` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn azpp_model_tick(model: *const AzppModel, out: *mut u64) -> AzppStatus {
    guard(|| {
        let m = tri!(model_ref(model));
        let Some(out) = out.as_mut() else {
            return fail(AzppStatus::NullPointer, "out is null");
        };
        *out = m.tick();
        AzppStatus::Ok
    })
}

/// # Safety
/// `model` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn azpp_model_agent_count(
    model: *const AzppModel,
    out: *mut usize,
) -> AzppStatus {
    guard(|| {
        let m = tri!(model_ref(model));
        let Some(out) = out.as_mut() else {
            return fail(AzppStatus::NullPointer, "out is null");
        };
        *out = m.agents().len();
        AzppStatus::Ok
    })
}

/// Current state of agent `index`.
///
/// # Safety
/// `model` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn azpp_model_agent(
    model: *const AzppModel,
    index: usize,
    out: *mut AzppAgentMetrics,
) -> AzppStatus {
    guard(|| {
        let m = tri!(model_ref(model));
        let Some(out) = out.as_mut() else {
            return fail(AzppStatus::NullPointer, "out is null");
        };
        let Some(a) = m.agents().get(index) else {
            return fail(AzppStatus::OutOfRange, format!("no agent {index}"));
        };
        let s = &a.state;
        *out = AzppAgentMetrics {
            agent_id: a.profile.agent_id,
            affect: s.affect,
            probability: s.probability,
            contagion: s.contagion_in,
            disposition: s.disposition,
            mode: s.mode.into(),
            x: s.position.x as u64,
            y: s.position.y as u64,
            radius: a.radius as u64,
            damage: s.damage,
        };
        AzppStatus::Ok
    })
}

/// # Safety
/// `model` must be a live handle; `width` and `height` must be valid.
#[no_mangle]
pub unsafe extern "C" fn azpp_model_grid_size(
    model: *const AzppModel,
    width: *mut usize,
    height: *mut usize,
) -> AzppStatus {
    guard(|| {
        let m = tri!(model_ref(model));
        if width.is_null() || height.is_null() {
            return fail(AzppStatus::NullPointer, "width or height is null");
        }
        *width = m.grid().width();
        *height = m.grid().height();
        AzppStatus::Ok
    })
}

/// Copy the grid row-major into `buf`: 0 Calm, 1 Active, 2 Destroyed.
/// `len` must be at least width × height.
///
/// # Safety
/// `model` must be a live handle; `buf` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn azpp_model_grid_cells(
    model: *const AzppModel,
    buf: *mut u8,
    len: usize,
) -> AzppStatus {
    guard(|| {
        let m = tri!(model_ref(model));
        if buf.is_null() {
            return fail(AzppStatus::NullPointer, "buf is null");
        }
        let cells = m.grid().cells();
        if len < cells.len() {
            return fail(
                AzppStatus::BufferTooSmall,
                format!("need {} bytes, got {len}", cells.len()),
            );
        }
        let dst = std::slice::from_raw_parts_mut(buf, cells.len());
        for (d, c) in dst.iter_mut().zip(cells) {
            *d = match c {
                PatchState::Calm => 0,
                PatchState::Active => 1,
                PatchState::Destroyed => 2,
            };
        }
        AzppStatus::Ok
    })
}

/// Run a configuration (NULL for defaults) to completion and write the full
/// set of outputs into `out_dir`.
///
/// # Safety
/// `config_toml` must be NULL or a valid string; `out_dir` must be valid.
#[no_mangle]
pub unsafe extern "C" fn azpp_run(
    config_toml: *const c_char,
    out_dir: *const c_char,
) -> AzppStatus {
    guard(|| {
        let config = tri!(config_arg(config_toml));
        let dir = tri!(str_arg(out_dir, "out_dir"));
        let started = unix_ms();
        let result = match run(&config) {
            Ok(r) => r,
            Err(e) => return fail(AzppStatus::InvalidConfig, e.to_string()),
        };
        match write_run(&result, Path::new(dir), started) {
            Ok(_) => AzppStatus::Ok,
            Err(e) => fail(AzppStatus::IoError, e.to_string()),
        }
    })
}
