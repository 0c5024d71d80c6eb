//! C ABI over crosskit. Objects are opaque handles released with their
//! `*_free` function; strings returned to the caller are released with
//! [`ck_string_free`]. Every call returns a [`CkStatus`]; on failure
//! [`ck_last_error`] describes the most recent error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use crosskit::drawing::{render_svg, CombinatorialDrawing};
use crosskit::exact::{crossing_number_exact, Budget};
use crosskit::graph::{complete, random_graph};
use crosskit::graphon::{sylvester_convex_probability, PlanarRegion};
use crosskit::pipeline::{draw_cr_with, estimate_cr_with, DrawOptions, DrawReport, EstimateOptions, EstimateReport};
use crosskit::weight::{rat, Rat};
use crosskit::{Error, WeightedGraph};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CkStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Domain = 4,
    Structure = 5,
    Budget = 6,
    Region = 7,
    Io = 8,
    Json = 9,
    Panic = 10,
}

pub struct CkGraph {
    inner: WeightedGraph,
}

pub struct CkDrawing {
    inner: CombinatorialDrawing,
    report: Option<DrawReport>,
}

pub struct CkEstimate {
    inner: EstimateReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CkStatus {
    match e {
        Error::Parse { .. } => CkStatus::Parse,
        Error::Domain(_) => CkStatus::Domain,
        Error::Structure(_) => CkStatus::Structure,
        Error::Budget(_) => CkStatus::Budget,
        Error::Region(_) => CkStatus::Region,
        Error::Io(_) => CkStatus::Io,
        Error::Json(_) => CkStatus::Json,
    }
}

struct Fail(CkStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CkStatus::Ok
        }
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            CkStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(CkStatus::NullArgument, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(CkStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn obj<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

fn owned(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn ck_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. Free with [`ck_string_free`].
#[no_mangle]
pub extern "C" fn ck_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// # Safety
/// `s` is null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ck_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses the text (`n` then `u v [w]` lines) or JSON graph format.
///
/// # Safety
/// `text` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ck_graph_parse(text: *const c_char, out: *mut *mut CkGraph) -> CkStatus {
    guard(|| {
        let g = WeightedGraph::parse_any(str_arg(text, "text")?)?;
        put(out, Box::into_raw(Box::new(CkGraph { inner: g })), "out")
    })
}

/// Edgeless graph on `n` vertices.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ck_graph_new(n: usize, out: *mut *mut CkGraph) -> CkStatus {
    guard(|| put(out, Box::into_raw(Box::new(CkGraph { inner: WeightedGraph::new(n) })), "out"))
}

/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ck_graph_complete(n: usize, out: *mut *mut CkGraph) -> CkStatus {
    guard(|| put(out, Box::into_raw(Box::new(CkGraph { inner: complete(n) })), "out"))
}

/// `G(n, p)` with unit weights.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ck_graph_random(n: usize, p: f64, seed: u64, out: *mut *mut CkGraph) -> CkStatus {
    guard(|| put(out, Box::into_raw(Box::new(CkGraph { inner: random_graph(n, p, seed)? })), "out"))
}

/// Sets the weight of `uv` to `num/den` in `[0, 1]`; zero removes the edge.
///
/// # Safety
/// `g` is a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn ck_graph_set_weight(g: *mut CkGraph, u: usize, v: usize, num: i64, den: i64) -> CkStatus {
    guard(|| {
        let g = g.as_mut().ok_or_else(|| null("graph"))?;
        if den == 0 {
            return Err(Fail(CkStatus::Domain, "zero denominator".into()));
        }
        g.inner.set_weight(u, v, rat(num, den))?;
        Ok(())
    })
}

/// # Safety
/// `g` is null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn ck_graph_vertex_count(g: *const CkGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.n())
}

/// # Safety
/// `g` is null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn ck_graph_edge_count(g: *const CkGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.edge_count())
}

/// JSON form of the graph. Free with [`ck_string_free`].
///
/// # Safety
/// `g` is a live graph handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ck_graph_to_json(g: *const CkGraph, out: *mut *mut c_char) -> CkStatus {
    guard(|| {
        let g = obj(g, "graph")?;
        put(out, owned(g.inner.to_json()), "out")
    })
}

/// # Safety
/// `g` is null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ck_graph_free(g: *mut CkGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Exact crossing number with at most `nodes` search nodes. `*exact` is 0 when the
/// budget ran out and the value is only an upper bound. `drawing` may be null.
///
/// # Safety
/// `g` is a live graph handle; `value` and `exact` are writable; `drawing` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn ck_exact(g: *const CkGraph, nodes: u64, seed: u64, value: *mut f64, exact: *mut i32, drawing: *mut *mut CkDrawing) -> CkStatus {
    guard(|| {
        let g = obj(g, "graph")?;
        let s = crossing_number_exact(&g.inner, &Budget { nodes, seed, ..Budget::default() })?;
        put(value, s.value, "value")?;
        put(exact, s.exact as i32, "exact")?;
        if !drawing.is_null() {
            drawing.write(Box::into_raw(Box::new(CkDrawing { inner: s.drawing, report: None })));
        }
        Ok(())
    })
}

/// Quotient estimate of `cr(G)`.
///
/// # Safety
/// `g` is a live graph handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ck_estimate(g: *const CkGraph, epsilon: f64, max_classes: usize, seed: u64, out: *mut *mut CkEstimate) -> CkStatus {
    guard(|| {
        let g = obj(g, "graph")?;
        let r = estimate_cr_with(&g.inner, &EstimateOptions::new(epsilon, max_classes, seed))?;
        put(out, Box::into_raw(Box::new(CkEstimate { inner: r })), "out")
    })
}

/// # Safety
/// `e` is null or a live estimate handle.
#[no_mangle]
pub unsafe extern "C" fn ck_estimate_value(e: *const CkEstimate) -> f64 {
    e.as_ref().map_or(f64::NAN, |e| e.inner.estimate)
}

/// `estimate / n⁴`.
///
/// # Safety
/// `e` is null or a live estimate handle.
#[no_mangle]
pub unsafe extern "C" fn ck_estimate_normalized(e: *const CkEstimate) -> f64 {
    e.as_ref().map_or(f64::NAN, |e| e.inner.normalized)
}

/// # Safety
/// `e` is null or a live estimate handle.
#[no_mangle]
pub unsafe extern "C" fn ck_estimate_class_count(e: *const CkEstimate) -> usize {
    e.as_ref().map_or(0, |e| e.inner.k)
}

/// Class of each vertex; `classes` must hold one entry per vertex of the estimated graph.
///
/// # Safety
/// `e` is a live estimate handle; `classes` points to `len` writable entries.
#[no_mangle]
pub unsafe extern "C" fn ck_estimate_classes(e: *const CkEstimate, classes: *mut usize, len: usize) -> CkStatus {
    guard(|| {
        let e = obj(e, "estimate")?;
        if classes.is_null() {
            return Err(null("classes"));
        }
        if len != e.inner.n {
            return Err(Fail(CkStatus::Domain, format!("classes buffer holds {len} entries, graph has {}", e.inner.n)));
        }
        let out = std::slice::from_raw_parts_mut(classes, len);
        for (i, c) in e.inner.partition.classes().iter().enumerate() {
            for &v in c {
                out[v] = i;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `e` is a live estimate handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ck_estimate_to_json(e: *const CkEstimate, out: *mut *mut c_char) -> CkStatus {
    guard(|| {
        let e = obj(e, "estimate")?;
        put(out, owned(e.inner.to_json().to_string()), "out")
    })
}

/// # Safety
/// `e` is null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ck_estimate_free(e: *mut CkEstimate) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Drawing of `G` from a blown-up quotient drawing, weights rounded to multiples of `1/q`.
///
/// # Safety
/// `g` is a live graph handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ck_draw(g: *const CkGraph, epsilon: f64, q: u64, seed: u64, out: *mut *mut CkDrawing) -> CkStatus {
    guard(|| {
        let g = obj(g, "graph")?;
        let (d, r) = draw_cr_with(&g.inner, &DrawOptions::new(epsilon, q, seed))?;
        put(out, Box::into_raw(Box::new(CkDrawing { inner: d, report: Some(r) })), "out")
    })
}

/// # Safety
/// `d` is null or a live drawing handle.
#[no_mangle]
pub unsafe extern "C" fn ck_drawing_crossing_weight(d: *const CkDrawing) -> f64 {
    d.as_ref().map_or(f64::NAN, |d| d.inner.crossing_weight())
}

/// Exact crossing weight as a decimal or `p/q` string. Free with [`ck_string_free`].
///
/// # Safety
/// `d` is a live drawing handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ck_drawing_crossing_weight_exact(d: *const CkDrawing, out: *mut *mut c_char) -> CkStatus {
    guard(|| {
        let d = obj(d, "drawing")?;
        let w: Rat = d.inner.crossing_weight_exact();
        put(out, owned(crosskit::weight::format(&w)), "out")
    })
}

/// Drawing document, with the construction report when the drawing came from [`ck_draw`].
///
/// # Safety
/// `d` is a live drawing handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ck_drawing_to_json(d: *const CkDrawing, out: *mut *mut c_char) -> CkStatus {
    guard(|| {
        let d = obj(d, "drawing")?;
        let mut v = d.inner.to_json();
        if let Some(r) = &d.report {
            v["report"] = r.to_json();
        }
        put(out, owned(v.to_string()), "out")
    })
}

/// # Safety
/// `d` is a live drawing handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ck_drawing_to_svg(d: *const CkDrawing, out: *mut *mut c_char) -> CkStatus {
    guard(|| {
        let d = obj(d, "drawing")?;
        put(out, owned(render_svg(&d.inner)), "out")
    })
}

/// # Safety
/// `d` is null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ck_drawing_free(d: *mut CkDrawing) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Convex-position probability of four uniform points of `region`
/// (`square`, `disk`, `triangle`, `annulus:R`, `boxes:...`, `parallelogram:a,b,c,d`)
/// with its 99% confidence radius.
///
/// # Safety
/// `region` is a NUL-terminated string; `estimate` and `radius` are writable.
#[no_mangle]
pub unsafe extern "C" fn ck_sylvester(region: *const c_char, samples: u64, seed: u64, threads: usize, estimate: *mut f64, radius: *mut f64) -> CkStatus {
    guard(|| {
        let r = PlanarRegion::parse(str_arg(region, "region")?)?;
        let e = sylvester_convex_probability(&r, samples, seed, threads)?;
        put(estimate, e.estimate, "estimate")?;
        put(radius, e.radius, "radius")
    })
}
