//! C ABI for `lateral-zda`.
//!
//! Models and trajectories cross the boundary as opaque handles that the
//! caller releases with the matching `*_free` function. Every fallible call
//! returns a [`ZdaStatus`]; on failure a human-readable message is kept per
//! thread and can be fetched with [`zda_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use lateral_zda::analysis::{classify, disruptive_condition, ObservabilityClass};
use lateral_zda::detect::{detect, DetectorConfig};
use lateral_zda::model::{a_stability_margin, build_model, eigenvalues_a, LateralModel, OutputCase, VehicleParams};
use lateral_zda::scenario::{Preset, ScenarioFile};
use lateral_zda::sim::{integrate, Trajectory};
use lateral_zda::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZdaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    DegenerateGeometry = 3,
    Config = 4,
    Io = 5,
    Parse = 6,
    OutOfRange = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZdaOutputCase {
    YawRate = 0,
    LateralAccel = 1,
    Both = 2,
}

impl From<ZdaOutputCase> for OutputCase {
    fn from(c: ZdaOutputCase) -> Self {
        match c {
            ZdaOutputCase::YawRate => OutputCase::YawRate,
            ZdaOutputCase::LateralAccel => OutputCase::LateralAccel,
            ZdaOutputCase::Both => OutputCase::Both,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZdaObservability {
    StronglyObservable = 0,
    StronglyDetectableOnly = 1,
    NotStronglyDetectable = 2,
}

/// Vehicle constants in SI units.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ZdaVehicleParams {
    pub mass: f64,
    pub yaw_inertia: f64,
    pub front_axle: f64,
    pub rear_axle: f64,
    pub front_stiffness: f64,
    pub rear_stiffness: f64,
}

impl From<ZdaVehicleParams> for VehicleParams {
    fn from(p: ZdaVehicleParams) -> Self {
        VehicleParams {
            mass: p.mass,
            yaw_inertia: p.yaw_inertia,
            front_axle: p.front_axle,
            rear_axle: p.rear_axle,
            front_stiffness: p.front_stiffness,
            rear_stiffness: p.rear_stiffness,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ZdaCoefficients {
    pub vx: f64,
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
    pub b2: f64,
    pub e1: f64,
    pub e2: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ZdaZeroReport {
    /// False when the output case has no invariant zero; `zero` is then 0.
    pub has_zero: bool,
    pub zero: f64,
    pub stable: bool,
    pub classification: ZdaObservability,
    pub attack_exists: bool,
    pub disruptive: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ZdaDetectorConfig {
    pub ay_quiet_threshold: f64,
    pub ax_alarm_threshold: f64,
    pub window: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ZdaVerdict {
    pub attacked: bool,
    /// Meaningful only when `attacked` is true.
    pub first_alarm_time: f64,
    pub peak_ax: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ZdaSample {
    pub t: f64,
    pub vy: f64,
    pub r: f64,
    pub ay: f64,
    pub ax: f64,
    pub delta: f64,
    pub mz_attack: f64,
}

/// Opaque lateral model.
pub struct ZdaModel(LateralModel);

/// Opaque simulated trajectory.
pub struct ZdaTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> ZdaStatus {
    match err {
        Error::InvalidParameter { .. } => ZdaStatus::InvalidParameter,
        Error::DegenerateGeometry => ZdaStatus::DegenerateGeometry,
        Error::Config(_) => ZdaStatus::Config,
        Error::Io { .. } => ZdaStatus::Io,
        Error::Parse { .. } => ZdaStatus::Parse,
    }
}

fn fail(status: ZdaStatus, msg: impl Into<String>) -> ZdaStatus {
    set_last_error(msg);
    status
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guarded(f: impl FnOnce() -> Result<(), ZdaStatus>) -> ZdaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            ZdaStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => fail(ZdaStatus::Panic, "internal panic"),
    }
}

fn lift(err: Error) -> ZdaStatus {
    fail(status_of(&err), err.to_string())
}

unsafe fn deref<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, ZdaStatus> {
    ptr.as_ref()
        .ok_or_else(|| fail(ZdaStatus::NullPointer, format!("`{what}` is NULL")))
}

unsafe fn write_out<T>(ptr: *mut T, value: T, what: &str) -> Result<(), ZdaStatus> {
    if ptr.is_null() {
        return Err(fail(ZdaStatus::NullPointer, format!("`{what}` is NULL")));
    }
    ptr.write(value);
    Ok(())
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len`). Returns the buffer size needed to hold
/// the full message including the terminator, or 0 when there is no error.
///
/// # Safety
/// `buf` must be NULL or point to at least `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn zda_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else {
            return 0;
        };
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n - 1) = 0;
        }
        bytes.len()
    })
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn zda_status_name(status: ZdaStatus) -> *const c_char {
    let name: &'static CStr = match status {
        ZdaStatus::Ok => c"ok",
        ZdaStatus::NullPointer => c"null pointer",
        ZdaStatus::InvalidParameter => c"invalid parameter",
        ZdaStatus::DegenerateGeometry => c"degenerate geometry",
        ZdaStatus::Config => c"configuration error",
        ZdaStatus::Io => c"I/O error",
        ZdaStatus::Parse => c"parse error",
        ZdaStatus::OutOfRange => c"index out of range",
        ZdaStatus::Panic => c"internal panic",
    };
    name.as_ptr()
}

/// Table values of the reference SUV.
#[no_mangle]
pub extern "C" fn zda_suv_params() -> ZdaVehicleParams {
    let p = VehicleParams::SUV;
    ZdaVehicleParams {
        mass: p.mass,
        yaw_inertia: p.yaw_inertia,
        front_axle: p.front_axle,
        rear_axle: p.rear_axle,
        front_stiffness: p.front_stiffness,
        rear_stiffness: p.rear_stiffness,
    }
}

/// Builds a model at speed `vx`. Release with [`zda_model_free`].
///
/// # Safety
/// `params` must point to a valid `ZdaVehicleParams`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zda_model_new(
    params: *const ZdaVehicleParams,
    vx: f64,
    out: *mut *mut ZdaModel,
) -> ZdaStatus {
    guarded(|| {
        let params = *deref(params, "params")?;
        let model = build_model(params.into(), vx).map_err(lift)?;
        write_out(out, Box::into_raw(Box::new(ZdaModel(model))), "out")
    })
}

/// # Safety
/// `model` must be NULL or a handle from [`zda_model_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn zda_model_free(model: *mut ZdaModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zda_model_coefficients(
    model: *const ZdaModel,
    out: *mut ZdaCoefficients,
) -> ZdaStatus {
    guarded(|| {
        let m = &deref(model, "model")?.0;
        let c = ZdaCoefficients {
            vx: m.vx,
            a11: m.a11,
            a12: m.a12,
            a21: m.a21,
            a22: m.a22,
            b2: m.b2,
            e1: m.e1,
            e2: m.e2,
        };
        write_out(out, c, "out")
    })
}

/// Eigenvalues of the state matrix, ascending by real part.
///
/// # Safety
/// `model` must be a live handle; `re` and `im` must each point to two
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn zda_model_eigenvalues(
    model: *const ZdaModel,
    re: *mut f64,
    im: *mut f64,
) -> ZdaStatus {
    guarded(|| {
        let m = &deref(model, "model")?.0;
        if re.is_null() || im.is_null() {
            return Err(fail(ZdaStatus::NullPointer, "`re` or `im` is NULL"));
        }
        for (i, ev) in eigenvalues_a(m).iter().enumerate() {
            re.add(i).write(ev.re);
            im.add(i).write(ev.im);
        }
        Ok(())
    })
}

/// Hurwitz margin `(a+b)^2 - m (a Cf - b Cr) vx^2 / (Cf Cr)` in m^2.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zda_model_stability_margin(model: *const ZdaModel, out: *mut f64) -> ZdaStatus {
    guarded(|| {
        let m = &deref(model, "model")?.0;
        write_out(out, a_stability_margin(m), "out")
    })
}

/// `a Cf - b Cr` in N m/rad; negative keeps the lateral-acceleration zero stable.
///
/// # Safety
/// `params` must point to a valid `ZdaVehicleParams`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zda_disruptive_condition(
    params: *const ZdaVehicleParams,
    out: *mut f64,
) -> ZdaStatus {
    guarded(|| {
        let params: VehicleParams = (*deref(params, "params")?).into();
        params.validate().map_err(lift)?;
        write_out(out, disruptive_condition(&params), "out")
    })
}

/// Invariant zero and observability class for one output case.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zda_classify(
    model: *const ZdaModel,
    case: ZdaOutputCase,
    out: *mut ZdaZeroReport,
) -> ZdaStatus {
    guarded(|| {
        let m = &deref(model, "model")?.0;
        let report = classify(m, case.into()).map_err(lift)?;
        let zero = report.zeros.first();
        let c = ZdaZeroReport {
            has_zero: zero.is_some(),
            zero: zero.map_or(0.0, |z| z.value.re),
            stable: zero.is_some_and(|z| z.stable),
            classification: match report.classification {
                ObservabilityClass::StronglyObservable => ZdaObservability::StronglyObservable,
                ObservabilityClass::StronglyDetectableOnly => ZdaObservability::StronglyDetectableOnly,
                ObservabilityClass::NotStronglyDetectable => ZdaObservability::NotStronglyDetectable,
            },
            attack_exists: report.attack_exists,
            disruptive: report.disruptive,
        };
        write_out(out, c, "out")
    })
}

fn simulate_file(file: &ScenarioFile) -> Result<Trajectory, ZdaStatus> {
    let scenario = file.to_scenario().map_err(lift)?;
    integrate(&scenario).map_err(lift)
}

/// Simulates a built-in preset ("fig3".."fig6"). Release with
/// [`zda_trajectory_free`].
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zda_simulate_preset(
    name: *const c_char,
    out: *mut *mut ZdaTrajectory,
) -> ZdaStatus {
    guarded(|| {
        if name.is_null() {
            return Err(fail(ZdaStatus::NullPointer, "`name` is NULL"));
        }
        let name = CStr::from_ptr(name)
            .to_str()
            .map_err(|_| fail(ZdaStatus::Config, "preset name is not UTF-8"))?;
        let preset: Preset = name.parse().map_err(lift)?;
        let traj = simulate_file(&preset.scenario_file())?;
        write_out(out, Box::into_raw(Box::new(ZdaTrajectory(traj))), "out")
    })
}

/// Simulates the TOML scenario file at `path`.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zda_simulate_scenario_file(
    path: *const c_char,
    out: *mut *mut ZdaTrajectory,
) -> ZdaStatus {
    guarded(|| {
        if path.is_null() {
            return Err(fail(ZdaStatus::NullPointer, "`path` is NULL"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| fail(ZdaStatus::Config, "path is not UTF-8"))?;
        let file = ScenarioFile::load(path).map_err(lift)?;
        let traj = simulate_file(&file)?;
        write_out(out, Box::into_raw(Box::new(ZdaTrajectory(traj))), "out")
    })
}

/// # Safety
/// `traj` must be NULL or a live trajectory handle.
#[no_mangle]
pub unsafe extern "C" fn zda_trajectory_free(traj: *mut ZdaTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Number of samples; 0 for NULL.
///
/// # Safety
/// `traj` must be NULL or a live trajectory handle.
#[no_mangle]
pub unsafe extern "C" fn zda_trajectory_len(traj: *const ZdaTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.len())
}

/// True if the run stopped at the state-norm ceiling; the stop time goes to
/// `t_out` when it is not NULL.
///
/// # Safety
/// `traj` must be NULL or a live trajectory handle; `t_out` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn zda_trajectory_diverged(traj: *const ZdaTrajectory, t_out: *mut f64) -> bool {
    let Some(t) = traj.as_ref().and_then(|t| t.0.diverged_at) else {
        return false;
    };
    if !t_out.is_null() {
        t_out.write(t);
    }
    true
}

/// # Safety
/// `traj` must be a live trajectory handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zda_trajectory_sample(
    traj: *const ZdaTrajectory,
    index: usize,
    out: *mut ZdaSample,
) -> ZdaStatus {
    guarded(|| {
        let t = &deref(traj, "traj")?.0;
        if index >= t.len() {
            return Err(fail(
                ZdaStatus::OutOfRange,
                format!("sample {index} out of range (len {})", t.len()),
            ));
        }
        let s = ZdaSample {
            t: t.t[index],
            vy: t.vy[index],
            r: t.r[index],
            ay: t.ay[index],
            ax: t.ax[index],
            delta: t.delta[index],
            mz_attack: t.mz_attack[index],
        };
        write_out(out, s, "out")
    })
}

#[no_mangle]
pub extern "C" fn zda_detector_default() -> ZdaDetectorConfig {
    let d = DetectorConfig::default();
    ZdaDetectorConfig {
        ay_quiet_threshold: d.ay_quiet_threshold,
        ax_alarm_threshold: d.ax_alarm_threshold,
        window: d.window,
    }
}

/// Runs the longitudinal-acceleration detector. A NULL `cfg` uses defaults.
///
/// # Safety
/// `traj` must be a live handle; `cfg` NULL or valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zda_detect(
    traj: *const ZdaTrajectory,
    cfg: *const ZdaDetectorConfig,
    out: *mut ZdaVerdict,
) -> ZdaStatus {
    guarded(|| {
        let t = &deref(traj, "traj")?.0;
        let cfg = cfg.as_ref().map_or_else(DetectorConfig::default, |c| DetectorConfig {
            ay_quiet_threshold: c.ay_quiet_threshold,
            ax_alarm_threshold: c.ax_alarm_threshold,
            window: c.window,
        });
        let v = detect(t, &cfg).map_err(lift)?;
        let verdict = ZdaVerdict {
            attacked: v.attacked,
            first_alarm_time: v.first_alarm_time.unwrap_or(0.0),
            peak_ax: v.peak_ax,
        };
        write_out(out, verdict, "out")
    })
}
