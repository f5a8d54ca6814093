//! C ABI over the planar-fvs solvers.
//!
//! Handles are opaque; every fallible call returns a `PFVS_*` status code and
//! writes its result through an out-parameter. The matching header lives in
//! `include/planar_fvs.h`.

use std::ffi::CStr;
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Duration;

use planar_fvs::approx2::two_approx;
use planar_fvs::exact::{solve_exact, ExactConfig, ExactError};
use planar_fvs::graph::{parse_edge_list, MultiGraph};
use planar_fvs::heuristics::{hybrid_solve, HybridConfig};
use planar_fvs::ptas::{ptas_solve, PtasConfig, PtasError, PtasVariant};

pub const PFVS_OK: i32 = 0;
pub const PFVS_NULL_ARGUMENT: i32 = -1;
pub const PFVS_INVALID_ARGUMENT: i32 = -2;
pub const PFVS_NOT_PLANAR: i32 = -3;
pub const PFVS_TIMEOUT: i32 = -4;
pub const PFVS_INFEASIBLE: i32 = -5;
pub const PFVS_PARSE_ERROR: i32 = -6;
pub const PFVS_PANIC: i32 = -7;

/// Opaque multigraph handle.
pub struct PfvsGraph(MultiGraph);

/// Opaque solution handle: a sorted vertex-id array.
pub struct PfvsSolution(Vec<u32>);

fn guard(f: impl FnOnce() -> i32) -> i32 {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(PFVS_PANIC)
}

/// # Safety
/// The returned pointer must be released with `pfvs_graph_free`.
#[no_mangle]
pub extern "C" fn pfvs_graph_new() -> *mut PfvsGraph {
    Box::into_raw(Box::new(PfvsGraph(MultiGraph::new())))
}

/// # Safety
/// `g` must be a pointer from `pfvs_graph_new`/`pfvs_graph_parse` or null.
#[no_mangle]
pub unsafe extern "C" fn pfvs_graph_free(g: *mut PfvsGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` and `out_id` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pfvs_graph_add_vertex(g: *mut PfvsGraph, out_id: *mut u32) -> i32 {
    if g.is_null() || out_id.is_null() {
        return PFVS_NULL_ARGUMENT;
    }
    guard(|| {
        *out_id = (*g).0.add_vertex();
        PFVS_OK
    })
}

/// Adds an edge, creating endpoints as needed. Fails (without changing the
/// graph) when the edge multiplicity is already at its cap.
///
/// # Safety
/// `g` must be a valid graph pointer.
#[no_mangle]
pub unsafe extern "C" fn pfvs_graph_add_edge(g: *mut PfvsGraph, u: u32, v: u32) -> i32 {
    if g.is_null() {
        return PFVS_NULL_ARGUMENT;
    }
    guard(|| {
        if (*g).0.add_edge(u, v) {
            PFVS_OK
        } else {
            PFVS_INVALID_ARGUMENT
        }
    })
}

/// Parse the `u v`-per-line edge-list format into a fresh graph handle.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pfvs_graph_parse(text: *const c_char, out: *mut *mut PfvsGraph) -> i32 {
    if text.is_null() || out.is_null() {
        return PFVS_NULL_ARGUMENT;
    }
    guard(|| {
        let Ok(s) = CStr::from_ptr(text).to_str() else {
            return PFVS_PARSE_ERROR;
        };
        match parse_edge_list(s) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(PfvsGraph(g)));
                PFVS_OK
            }
            Err(_) => PFVS_PARSE_ERROR,
        }
    })
}

/// # Safety
/// `g` must be a valid graph pointer.
#[no_mangle]
pub unsafe extern "C" fn pfvs_graph_vertex_count(g: *const PfvsGraph) -> u64 {
    if g.is_null() {
        return 0;
    }
    (*g).0.vertex_count() as u64
}

/// # Safety
/// `g` must be a valid graph pointer.
#[no_mangle]
pub unsafe extern "C" fn pfvs_graph_edge_count(g: *const PfvsGraph) -> u64 {
    if g.is_null() {
        return 0;
    }
    (*g).0.edge_count() as u64
}

unsafe fn emit(out: *mut *mut PfvsSolution, set: impl IntoIterator<Item = u32>) -> i32 {
    *out = Box::into_raw(Box::new(PfvsSolution(set.into_iter().collect())));
    PFVS_OK
}

/// # Safety
/// `g` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pfvs_solve_two_approx(
    g: *const PfvsGraph,
    out: *mut *mut PfvsSolution,
) -> i32 {
    if g.is_null() || out.is_null() {
        return PFVS_NULL_ARGUMENT;
    }
    guard(|| emit(out, two_approx(&(*g).0).vertex_set))
}

/// # Safety
/// `g` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pfvs_solve_exact(
    g: *const PfvsGraph,
    budget_ms: u64,
    out: *mut *mut PfvsSolution,
) -> i32 {
    if g.is_null() || out.is_null() {
        return PFVS_NULL_ARGUMENT;
    }
    guard(|| {
        let cfg = ExactConfig {
            time_budget: Duration::from_millis(budget_ms),
            kernelize_first: true,
        };
        match solve_exact(&(*g).0, &cfg) {
            Ok(s) => emit(out, s.vertex_set),
            Err(ExactError::Timeout) => PFVS_TIMEOUT,
            Err(ExactError::TooLarge(_)) => PFVS_INVALID_ARGUMENT,
        }
    })
}

/// `variant`: 0 vanilla, 1 minimal, 2 optimized.
///
/// # Safety
/// `g` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pfvs_solve_ptas(
    g: *const PfvsGraph,
    r: u64,
    variant: i32,
    leaf_budget_ms: u64,
    out: *mut *mut PfvsSolution,
) -> i32 {
    if g.is_null() || out.is_null() {
        return PFVS_NULL_ARGUMENT;
    }
    guard(|| {
        let variant = match variant {
            0 => PtasVariant::Vanilla,
            1 => PtasVariant::Minimal,
            2 => PtasVariant::Optimized,
            _ => return PFVS_INVALID_ARGUMENT,
        };
        let cfg = PtasConfig {
            r: r as usize,
            variant,
            leaf_budget: Duration::from_millis(leaf_budget_ms),
        };
        match ptas_solve(&(*g).0, &cfg) {
            Ok(s) => emit(out, s.vertex_set),
            Err(PtasError::LeafUnsolved(_)) => PFVS_TIMEOUT,
            Err(PtasError::Separator(_)) => PFVS_NOT_PLANAR,
        }
    })
}

/// # Safety
/// `g` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pfvs_solve_hybrid(
    g: *const PfvsGraph,
    frequency: u64,
    out: *mut *mut PfvsSolution,
) -> i32 {
    if g.is_null() || out.is_null() {
        return PFVS_NULL_ARGUMENT;
    }
    if frequency == 0 {
        return PFVS_INVALID_ARGUMENT;
    }
    guard(|| {
        let cfg = HybridConfig {
            frequency: frequency as usize,
        };
        emit(out, hybrid_solve(&(*g).0, &cfg).vertex_set)
    })
}

/// # Safety
/// `s` must be a valid solution pointer or null.
#[no_mangle]
pub unsafe extern "C" fn pfvs_solution_len(s: *const PfvsSolution) -> u64 {
    if s.is_null() {
        return 0;
    }
    (*s).0.len() as u64
}

/// # Safety
/// `s` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pfvs_solution_get(
    s: *const PfvsSolution,
    index: u64,
    out: *mut u32,
) -> i32 {
    if s.is_null() || out.is_null() {
        return PFVS_NULL_ARGUMENT;
    }
    match (&(*s).0).get(index as usize) {
        Some(&v) => {
            *out = v;
            PFVS_OK
        }
        None => PFVS_INVALID_ARGUMENT,
    }
}

/// Independent feasibility check: writes 1 to `out_feasible` iff removing the
/// solution leaves `g` acyclic.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pfvs_verify(
    g: *const PfvsGraph,
    s: *const PfvsSolution,
    out_feasible: *mut i32,
) -> i32 {
    if g.is_null() || s.is_null() || out_feasible.is_null() {
        return PFVS_NULL_ARGUMENT;
    }
    guard(|| {
        let set = (*s).0.iter().copied().collect();
        match (*g).0.is_fvs(&set) {
            Ok(ok) => {
                *out_feasible = i32::from(ok);
                PFVS_OK
            }
            Err(_) => PFVS_INVALID_ARGUMENT,
        }
    })
}

/// # Safety
/// `s` must come from a `pfvs_solve_*` call or be null.
#[no_mangle]
pub unsafe extern "C" fn pfvs_solution_free(s: *mut PfvsSolution) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;
    use std::ptr;

    #[test]
    fn c5_through_the_abi() {
        unsafe {
            let g = pfvs_graph_new();
            for i in 0..5u32 {
                assert_eq!(pfvs_graph_add_edge(g, i, (i + 1) % 5), PFVS_OK);
            }
            assert_eq!(pfvs_graph_vertex_count(g), 5);
            assert_eq!(pfvs_graph_edge_count(g), 5);
            let mut s: *mut PfvsSolution = ptr::null_mut();
            assert_eq!(pfvs_solve_exact(g, 5000, &mut s), PFVS_OK);
            assert_eq!(pfvs_solution_len(s), 1);
            let mut feasible = 0;
            assert_eq!(pfvs_verify(g, s, &mut feasible), PFVS_OK);
            assert_eq!(feasible, 1);
            pfvs_solution_free(s);
            pfvs_graph_free(g);
        }
    }

    #[test]
    fn parse_and_solvers() {
        unsafe {
            let text = CString::new("0 1\n1 2\n2 0\n2 3\n3 4\n4 2\n").unwrap();
            let mut g: *mut PfvsGraph = ptr::null_mut();
            assert_eq!(pfvs_graph_parse(text.as_ptr(), &mut g), PFVS_OK);
            let mut s: *mut PfvsSolution = ptr::null_mut();
            assert_eq!(pfvs_solve_two_approx(g, &mut s), PFVS_OK);
            let mut feasible = 0;
            assert_eq!(pfvs_verify(g, s, &mut feasible), PFVS_OK);
            assert_eq!(feasible, 1);
            pfvs_solution_free(s);

            let mut s: *mut PfvsSolution = ptr::null_mut();
            assert_eq!(pfvs_solve_hybrid(g, 41, &mut s), PFVS_OK);
            assert_eq!(pfvs_solution_len(s), 1); // vertex 2 hits both cycles
            let mut v = u32::MAX;
            assert_eq!(pfvs_solution_get(s, 0, &mut v), PFVS_OK);
            assert_eq!(v, 2);
            assert_eq!(pfvs_solution_get(s, 1, &mut v), PFVS_INVALID_ARGUMENT);
            pfvs_solution_free(s);

            let mut s: *mut PfvsSolution = ptr::null_mut();
            assert_eq!(pfvs_solve_ptas(g, 60, 1, 5000, &mut s), PFVS_OK);
            assert_eq!(pfvs_solution_len(s), 1);
            pfvs_solution_free(s);
            let mut s: *mut PfvsSolution = ptr::null_mut();
            assert_eq!(pfvs_solve_ptas(g, 60, 9, 5000, &mut s), PFVS_INVALID_ARGUMENT);
            pfvs_graph_free(g);
        }
    }

    #[test]
    fn error_codes() {
        unsafe {
            assert_eq!(pfvs_graph_add_edge(ptr::null_mut(), 0, 1), PFVS_NULL_ARGUMENT);
            let bad = CString::new("0 1\nbroken\n").unwrap();
            let mut g: *mut PfvsGraph = ptr::null_mut();
            assert_eq!(pfvs_graph_parse(bad.as_ptr(), &mut g), PFVS_PARSE_ERROR);
            let mut s: *mut PfvsSolution = ptr::null_mut();
            let g = pfvs_graph_new();
            pfvs_graph_add_edge(g, 0, 1);
            pfvs_graph_add_edge(g, 0, 1);
            // a third parallel edge is rejected
            assert_eq!(pfvs_graph_add_edge(g, 0, 1), PFVS_INVALID_ARGUMENT);
            assert_eq!(pfvs_solve_hybrid(g, 0, &mut s), PFVS_INVALID_ARGUMENT);
            pfvs_graph_free(g);
        }
    }
}
