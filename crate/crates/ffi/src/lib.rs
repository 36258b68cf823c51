//! C interface to the wlap partitioner.
//!
//! Graphs and partitions are opaque handles owned by the caller and released
//! with the matching `_free` function. Every fallible call returns a
//! [`WlapStatus`]; on failure `wlap_last_error_message` describes the most
//! recent error on the calling thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use wlap::coarsen::default_threshold;
use wlap::pipeline::run_graph;
use wlap::refine::DEFAULT_EPSILON;
use wlap::{DoublyWeightedGraph, Error, Partition, Strategy};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WlapStatus {
    Ok = 0,
    InvalidArgument = 1,
    Parse = 2,
    Solver = 3,
    Io = 4,
    Disconnected = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WlapStrategy {
    Random = 0,
    RegionGrowing = 1,
    Spectral = 2,
    WeightedSpectral = 3,
}

fn strategy_from_raw(raw: u32) -> Option<Strategy> {
    [
        (WlapStrategy::Random, Strategy::Random),
        (WlapStrategy::RegionGrowing, Strategy::RegionGrowing),
        (WlapStrategy::Spectral, Strategy::Spectral),
        (WlapStrategy::WeightedSpectral, Strategy::WeightedSpectral),
    ]
    .into_iter()
    .find(|&(c, _)| c as u32 == raw)
    .map(|(_, s)| s)
}

/// Opaque graph handle.
pub struct WlapGraph {
    inner: DoublyWeightedGraph,
}

/// Opaque partition handle with the metrics of the run that produced it.
pub struct WlapPartition {
    inner: Partition,
    ncut: f64,
    coarse_wcut: f64,
    edge_cut: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    let c = CString::new(text).expect("interior NULs were replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> WlapStatus {
    match e {
        Error::Parse { .. } => WlapStatus::Parse,
        Error::NoConvergence { .. } => WlapStatus::Solver,
        Error::Io(_) | Error::Csv(_) => WlapStatus::Io,
        Error::Disconnected { .. } => WlapStatus::Disconnected,
        _ => WlapStatus::InvalidArgument,
    }
}

/// Runs `body`, converting errors and panics into a status.
fn guard(body: impl FnOnce() -> Result<(), WlapError>) -> WlapStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => WlapStatus::Ok,
        Ok(Err(WlapError(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("internal panic: {message}"));
            WlapStatus::Panic
        }
    }
}

struct WlapError(WlapStatus, String);

impl From<Error> for WlapError {
    fn from(e: Error) -> Self {
        WlapError(status_of(&e), e.to_string())
    }
}

fn invalid(message: &str) -> WlapError {
    WlapError(WlapStatus::InvalidArgument, message.to_string())
}

unsafe fn graph_ref<'a>(g: *const WlapGraph) -> Result<&'a DoublyWeightedGraph, WlapError> {
    unsafe { g.as_ref() }.map(|g| &g.inner).ok_or_else(|| invalid("graph handle is null"))
}

unsafe fn partition_ref<'a>(p: *const WlapPartition) -> Result<&'a WlapPartition, WlapError> {
    unsafe { p.as_ref() }.ok_or_else(|| invalid("partition handle is null"))
}

unsafe fn c_str<'a>(s: *const c_char) -> Result<&'a str, WlapError> {
    if s.is_null() {
        return Err(invalid("string argument is null"));
    }
    unsafe { CStr::from_ptr(s) }
        .to_str()
        .map_err(|_| invalid("string argument is not UTF-8"))
}

unsafe fn input_slice<'a, T>(data: *const T, len: usize, what: &str) -> Result<&'a [T], WlapError> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(invalid(&format!("{what} is null")));
    }
    Ok(unsafe { slice::from_raw_parts(data, len) })
}

fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), WlapError> {
    if out.is_null() {
        return Err(invalid("output pointer is null"));
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn wlap_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a NUL-terminated METIS graph.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn wlap_graph_parse_metis(text: *const c_char, out: *mut *mut WlapGraph) -> WlapStatus {
    guard(|| {
        let text = unsafe { c_str(text) }?;
        let inner = wlap::io::parse_metis(text.as_bytes())?;
        write_out(out, WlapGraph { inner })
    })
}

/// Reads a METIS graph file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn wlap_graph_read_metis(path: *const c_char, out: *mut *mut WlapGraph) -> WlapStatus {
    guard(|| {
        let path = unsafe { c_str(path) }?;
        let inner = wlap::io::read_metis_file(path)?;
        write_out(out, WlapGraph { inner })
    })
}

/// Builds a graph from 0-based compressed rows. Both directions of every edge
/// must be listed. `adjwgt` and `vwgt` may be NULL for unit weights.
///
/// # Safety
/// `xadj` must hold `n + 1` entries, `adjncy` and `adjwgt` (if non-NULL)
/// `xadj[n]` entries, `vwgt` (if non-NULL) `n` entries.
#[no_mangle]
pub unsafe extern "C" fn wlap_graph_from_csr(
    n: usize,
    xadj: *const usize,
    adjncy: *const usize,
    adjwgt: *const f64,
    vwgt: *const f64,
    out: *mut *mut WlapGraph,
) -> WlapStatus {
    guard(|| {
        if n == 0 {
            return Err(invalid("graph must have at least one vertex"));
        }
        let xadj = unsafe { input_slice(xadj, n + 1, "xadj") }?.to_vec();
        let nnz = xadj[n];
        let adjncy = unsafe { input_slice(adjncy, nnz, "adjncy") }?.to_vec();
        let adjwgt = if adjwgt.is_null() {
            vec![1.0; nnz]
        } else {
            unsafe { input_slice(adjwgt, nnz, "adjwgt") }?.to_vec()
        };
        let vwgt = if vwgt.is_null() {
            vec![1.0; n]
        } else {
            unsafe { input_slice(vwgt, n, "vwgt") }?.to_vec()
        };
        let inner = DoublyWeightedGraph::from_csr(vwgt, xadj, adjncy, adjwgt)?;
        write_out(out, WlapGraph { inner })
    })
}

/// # Safety
/// `g` must be NULL or a handle from this library that was not freed yet.
#[no_mangle]
pub unsafe extern "C" fn wlap_graph_free(g: *mut WlapGraph) {
    if !g.is_null() {
        drop(unsafe { Box::from_raw(g) });
    }
}

/// Vertex count, or 0 for a NULL handle.
///
/// # Safety
/// `g` must be NULL or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn wlap_graph_vertex_count(g: *const WlapGraph) -> usize {
    unsafe { g.as_ref() }.map_or(0, |g| g.inner.n())
}

/// Undirected edge count (a self-loop counts once), or 0 for a NULL handle.
///
/// # Safety
/// `g` must be NULL or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn wlap_graph_edge_count(g: *const WlapGraph) -> usize {
    unsafe { g.as_ref() }.map_or(0, |g| g.inner.edge_count())
}

/// Partitions a connected graph into `k` blocks with the multilevel
/// pipeline. `strategy` is one of the `WlapStrategy` values;
/// `threshold == 0` and a negative `epsilon` select the defaults.
///
/// # Safety
/// `g` must be a live graph handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn wlap_partition(
    g: *const WlapGraph,
    k: usize,
    strategy: u32,
    seed: u64,
    threshold: usize,
    epsilon: f64,
    out: *mut *mut WlapPartition,
) -> WlapStatus {
    guard(|| {
        let g = unsafe { graph_ref(g) }?;
        let strategy = strategy_from_raw(strategy).ok_or_else(|| invalid("unknown strategy"))?;
        if k == 0 || k > g.n() {
            return Err(invalid("k must be between 1 and the vertex count"));
        }
        if !g.is_connected() {
            let (_, components) = g.components();
            return Err(Error::Disconnected { components }.into());
        }
        let threshold = if threshold == 0 { default_threshold(k) } else { threshold };
        let epsilon = if epsilon < 0.0 { DEFAULT_EPSILON } else { epsilon };
        let run = run_graph(g, "", strategy, k, seed, threshold, epsilon)?;
        write_out(
            out,
            WlapPartition {
                inner: run.partition,
                ncut: run.record.ncut,
                coarse_wcut: run.record.wcut_coarse,
                edge_cut: run.record.edge_cut,
            },
        )
    })
}

/// # Safety
/// `p` must be NULL or a handle from this library that was not freed yet.
#[no_mangle]
pub unsafe extern "C" fn wlap_partition_free(p: *mut WlapPartition) {
    if !p.is_null() {
        drop(unsafe { Box::from_raw(p) });
    }
}

/// Number of vertices covered, or 0 for a NULL handle.
///
/// # Safety
/// `p` must be NULL or a live partition handle.
#[no_mangle]
pub unsafe extern "C" fn wlap_partition_len(p: *const WlapPartition) -> usize {
    unsafe { p.as_ref() }.map_or(0, |p| p.inner.len())
}

/// Block count, or 0 for a NULL handle.
///
/// # Safety
/// `p` must be NULL or a live partition handle.
#[no_mangle]
pub unsafe extern "C" fn wlap_partition_k(p: *const WlapPartition) -> usize {
    unsafe { p.as_ref() }.map_or(0, |p| p.inner.k())
}

/// Copies the block ids into `buffer`, which must hold exactly
/// `wlap_partition_len(p)` entries.
///
/// # Safety
/// `p` must be a live partition handle and `buffer` writable for `len` entries.
#[no_mangle]
pub unsafe extern "C" fn wlap_partition_copy(p: *const WlapPartition, buffer: *mut usize, len: usize) -> WlapStatus {
    guard(|| {
        let p = unsafe { partition_ref(p) }?;
        if len != p.inner.len() {
            return Err(invalid("buffer length does not match the partition"));
        }
        if buffer.is_null() {
            return Err(invalid("buffer is null"));
        }
        let dst = unsafe { slice::from_raw_parts_mut(buffer, len) };
        dst.copy_from_slice(p.inner.assignment());
        Ok(())
    })
}

/// Normalized cut of the partition on the input graph; NaN for NULL.
///
/// # Safety
/// `p` must be NULL or a live partition handle.
#[no_mangle]
pub unsafe extern "C" fn wlap_partition_ncut(p: *const WlapPartition) -> f64 {
    unsafe { p.as_ref() }.map_or(f64::NAN, |p| p.ncut)
}

/// Weighted cut of the initial clustering on the coarsest graph; NaN for NULL.
///
/// # Safety
/// `p` must be NULL or a live partition handle.
#[no_mangle]
pub unsafe extern "C" fn wlap_partition_coarse_wcut(p: *const WlapPartition) -> f64 {
    unsafe { p.as_ref() }.map_or(f64::NAN, |p| p.coarse_wcut)
}

/// Total weight of cut edges; NaN for NULL.
///
/// # Safety
/// `p` must be NULL or a live partition handle.
#[no_mangle]
pub unsafe extern "C" fn wlap_partition_edge_cut(p: *const WlapPartition) -> f64 {
    unsafe { p.as_ref() }.map_or(f64::NAN, |p| p.edge_cut)
}

unsafe fn evaluate(
    g: *const WlapGraph,
    assignment: *const usize,
    n: usize,
    k: usize,
    out: *mut f64,
    metric: fn(&DoublyWeightedGraph, &Partition) -> wlap::Result<f64>,
) -> WlapStatus {
    guard(|| {
        let g = unsafe { graph_ref(g) }?;
        if n != g.n() {
            return Err(invalid("assignment length does not match the graph"));
        }
        if out.is_null() {
            return Err(invalid("output pointer is null"));
        }
        let labels = unsafe { input_slice(assignment, n, "assignment") }?;
        let p = Partition::new(k, labels.to_vec())?;
        let value = metric(g, &p)?;
        unsafe { *out = value };
        Ok(())
    })
}

/// Normalized cut of an arbitrary assignment with every block nonempty.
///
/// # Safety
/// `g` must be a live graph handle, `assignment` readable for `n` entries and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wlap_graph_ncut(
    g: *const WlapGraph,
    assignment: *const usize,
    n: usize,
    k: usize,
    out: *mut f64,
) -> WlapStatus {
    unsafe { evaluate(g, assignment, n, k, out, DoublyWeightedGraph::ncut) }
}

/// Weighted cut (by the graph's vertex weights) of an assignment.
///
/// # Safety
/// Same as [`wlap_graph_ncut`].
#[no_mangle]
pub unsafe extern "C" fn wlap_graph_wcut(
    g: *const WlapGraph,
    assignment: *const usize,
    n: usize,
    k: usize,
    out: *mut f64,
) -> WlapStatus {
    unsafe { evaluate(g, assignment, n, k, out, DoublyWeightedGraph::wcut) }
}
