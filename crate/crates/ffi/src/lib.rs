//! C ABI over `rcspkit`.
//!
//! Objects are opaque handles created by `*_parse` functions and released by
//! the matching `*_free`. Every fallible call returns an [`RcspStatus`]; on
//! failure [`rcsp_last_error`] describes the error for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rcspkit::classify::{
    dichotomy_verdict, find_ordered_maltsev_order, is_safely_cw_bijunctive, is_totally_rectangular,
    safely_nand_free, safely_or_free, Complexity,
};
use rcspkit::formula::parse_document;
use rcspkit::partial_ops::{is_invariant, make_ordered_maltsev};
use rcspkit::reconfigure::{solve_auto, Answer, Method};
use rcspkit::relfile::parse_relation_file;
use rcspkit::{ConstraintLanguage, Digraph, Error, ErrorKind, Relation, TotalOrder};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RcspStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    ValidationError = 4,
    CapExceeded = 5,
    NoMethod = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RcspMethod {
    Greedy = 0,
    Bfs = 1,
}

pub struct RcspRelation {
    inner: Relation,
}

pub struct RcspLanguage {
    inner: ConstraintLanguage,
}

pub struct RcspInstance {
    inner: rcspkit::RcspInstance,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

struct Failure(RcspStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match (&e, e.kind()) {
            (Error::Parse { .. }, _) => RcspStatus::ParseError,
            (Error::NoMethod(_), _) => RcspStatus::NoMethod,
            (_, ErrorKind::Guard) => RcspStatus::CapExceeded,
            (_, ErrorKind::Validation) => RcspStatus::ValidationError,
        };
        Failure(status, e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> RcspStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            RcspStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            RcspStatus::Panic
        }
    }
}

fn null() -> Failure {
    Failure(RcspStatus::NullPointer, "null pointer argument".into())
}

unsafe fn utf8<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(RcspStatus::InvalidUtf8, e.to_string()))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(null)
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    out.write(value);
    Ok(())
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn rcsp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses relation file text and returns the relation called `name`, or the
/// first one when `name` is null.
///
/// # Safety
/// `text` and a non-null `name` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rcsp_relation_parse(
    text: *const c_char,
    name: *const c_char,
    out: *mut *mut RcspRelation,
) -> RcspStatus {
    guard(|| {
        let file = parse_relation_file(utf8(text)?)?;
        let relation = if name.is_null() {
            file.relations.first().map(|(_, r)| r.clone())
        } else {
            let name = utf8(name)?;
            file.relation(name).cloned()
        }
        .ok_or_else(|| Failure(RcspStatus::ValidationError, "no such relation".into()))?;
        write(out, Box::into_raw(Box::new(RcspRelation { inner: relation })))
    })
}

/// # Safety
/// `relation` must come from [`rcsp_relation_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rcsp_relation_free(relation: *mut RcspRelation) {
    if !relation.is_null() {
        drop(Box::from_raw(relation));
    }
}

/// # Safety
/// `relation` must be a live handle and the out pointers writable.
#[no_mangle]
pub unsafe extern "C" fn rcsp_relation_shape(
    relation: *const RcspRelation,
    out_domain: *mut u32,
    out_arity: *mut usize,
    out_len: *mut usize,
) -> RcspStatus {
    guard(|| {
        let r = &handle(relation)?.inner;
        write(out_domain, r.domain().size())?;
        write(out_arity, r.arity())?;
        write(out_len, r.len())
    })
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RcspBooleanFlags {
    pub safely_or_free: bool,
    pub safely_nand_free: bool,
    pub safely_cw_bijunctive: bool,
}

/// The safe Boolean properties of a relation over {0,1}.
///
/// # Safety
/// `relation` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rcsp_relation_boolean_flags(
    relation: *const RcspRelation,
    out: *mut RcspBooleanFlags,
) -> RcspStatus {
    guard(|| {
        let r = &handle(relation)?.inner;
        let flags = RcspBooleanFlags {
            safely_or_free: safely_or_free(r)?.holds,
            safely_nand_free: safely_nand_free(r)?.holds,
            safely_cw_bijunctive: is_safely_cw_bijunctive(r)?.holds,
        };
        write(out, flags)
    })
}

/// Invariance under the ordered partial Maltsev operation of the order
/// listing `order[0] < order[1] < ...`.
///
/// # Safety
/// `order` must point to `order_len` values; `relation` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rcsp_relation_maltsev_invariant(
    relation: *const RcspRelation,
    order: *const u32,
    order_len: usize,
    out: *mut bool,
) -> RcspStatus {
    guard(|| {
        let r = &handle(relation)?.inner;
        if order.is_null() {
            return Err(null());
        }
        let order = TotalOrder::from_permutation(std::slice::from_raw_parts(order, order_len).to_vec())?;
        let m = make_ordered_maltsev(r.domain(), &order)?;
        write(out, is_invariant(r, &m)?.holds())
    })
}

/// Whether the binary relation, read as a digraph, is totally rectangular.
///
/// # Safety
/// `relation` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rcsp_relation_totally_rectangular(
    relation: *const RcspRelation,
    out: *mut bool,
) -> RcspStatus {
    guard(|| {
        let g = Digraph::new(handle(relation)?.inner.clone())?;
        write(out, is_totally_rectangular(&g)?.holds)
    })
}

/// Parses a language from either a relation file or instance-format text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rcsp_language_parse(
    text: *const c_char,
    out: *mut *mut RcspLanguage,
) -> RcspStatus {
    guard(|| {
        let source = utf8(text)?;
        let is_document = source
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#'))
            .is_some_and(|l| l.split_whitespace().next() == Some("domain"));
        let language = if is_document {
            parse_document(source)?.language
        } else {
            parse_relation_file(source)?.language()?
        };
        write(out, Box::into_raw(Box::new(RcspLanguage { inner: language })))
    })
}

/// # Safety
/// `language` must come from [`rcsp_language_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rcsp_language_free(language: *mut RcspLanguage) {
    if !language.is_null() {
        drop(Box::from_raw(language));
    }
}

/// Complexity of reconfiguration over a Boolean language: `true` for
/// polynomial time, `false` for PSPACE-complete.
///
/// # Safety
/// `language` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rcsp_language_is_polynomial(
    language: *const RcspLanguage,
    out: *mut bool,
) -> RcspStatus {
    guard(|| {
        let verdict = dichotomy_verdict(&handle(language)?.inner)?;
        write(out, verdict.dichotomy == Complexity::P)
    })
}

/// The full classification report (`kv` selects key-value lines). Release
/// the string with [`rcsp_string_free`].
///
/// # Safety
/// `language` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rcsp_language_report(
    language: *const RcspLanguage,
    kv: bool,
    out: *mut *mut c_char,
) -> RcspStatus {
    guard(|| {
        let verdict = dichotomy_verdict(&handle(language)?.inner)?;
        let text = if kv { verdict.to_kv() } else { verdict.to_string() };
        write(out, CString::new(text).expect("reports contain no NUL").into_raw())
    })
}

/// Searches for an order preserving the language. On success `*out_found`
/// tells whether one exists; if so the order is written to `out_order`
/// (least first), which must hold at least the domain size.
///
/// # Safety
/// `out_order` must have room for `capacity` values; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rcsp_language_find_order(
    language: *const RcspLanguage,
    out_order: *mut u32,
    capacity: usize,
    out_found: *mut bool,
) -> RcspStatus {
    guard(|| {
        let lang = &handle(language)?.inner;
        let search = find_ordered_maltsev_order(lang)?;
        match search.found {
            Some(order) => {
                let perm = order.permutation();
                if out_order.is_null() {
                    return Err(null());
                }
                if capacity < perm.len() {
                    return Err(Failure(RcspStatus::ValidationError, "order buffer too small".into()));
                }
                ptr::copy_nonoverlapping(perm.as_ptr(), out_order, perm.len());
                write(out_found, true)
            }
            None => write(out_found, false),
        }
    })
}

/// Parses an instance (domain, relations, constraints, start and target).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rcsp_instance_parse(
    text: *const c_char,
    out: *mut *mut RcspInstance,
) -> RcspStatus {
    guard(|| {
        let inst = rcspkit::parse_instance(utf8(text)?)?;
        write(out, Box::into_raw(Box::new(RcspInstance { inner: inst })))
    })
}

/// # Safety
/// `instance` must come from [`rcsp_instance_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rcsp_instance_free(instance: *mut RcspInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Decides whether start and target are connected, with the greedy solver
/// when an order is available and the exhaustive search otherwise.
///
/// # Safety
/// `instance` must be live and the out pointers writable.
#[no_mangle]
pub unsafe extern "C" fn rcsp_instance_solve(
    instance: *const RcspInstance,
    out_connected: *mut bool,
    out_method: *mut RcspMethod,
) -> RcspStatus {
    guard(|| {
        let result = solve_auto(&handle(instance)?.inner)?;
        write(out_connected, result.answer == Answer::Yes)?;
        write(
            out_method,
            match result.method {
                Method::Greedy => RcspMethod::Greedy,
                Method::Bfs => RcspMethod::Bfs,
            },
        )
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rcsp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
