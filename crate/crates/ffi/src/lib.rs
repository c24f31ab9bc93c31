// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

//! C ABI over the count sketch, the basic aggregator and the LDP message
//! codec.
//!
//! Every function returns a [`FreqmdpStatus`]. On failure the message is
//! kept per thread and read with [`freqmdp_last_error_message`]. Handles are
//! opaque and released with their `_free` function. Functions that fill a
//! caller buffer always report the required size, and return
//! `FREQMDP_STATUS_BUFFER_TOO_SMALL` when it does not fit.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use freqmdp::dpnoise::GeomParam;
use freqmdp::hashing::seeded_rng;
use freqmdp::oneshot::basic::{sketch_noise, BasicAggregator, BasicMessage};
use freqmdp::oneshot::ldp::{ldp_party_message, ldp_width, LdpAggregator, SparseLdpMessage};
use freqmdp::oneshot::{FrequencyOracle, PartyDataset};
use freqmdp::sketch::{CountSketch, NoisyCountSketch};
use freqmdp::{Error, FrequencyVector};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FreqmdpStatus {
    Ok = 0,
    InvalidArgument = 1,
    IncompatibleSketch = 2,
    ProtocolViolation = 3,
    WrongProtocol = 4,
    Decode = 5,
    Overflow = 6,
    NullPointer = 7,
    BufferTooSmall = 8,
    Panic = 9,
    Other = 10,
}

/// Count sketch under construction.
pub struct FreqmdpSketch(CountSketch);

/// Sums per-party noisy sketch estimates.
pub struct FreqmdpBasicAggregator(BasicAggregator);

/// Decodes and aggregates sparse one-item messages.
pub struct FreqmdpLdpAggregator(LdpAggregator);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> FreqmdpStatus {
    match e {
        Error::InvalidArgument(_) | Error::Config(_) => FreqmdpStatus::InvalidArgument,
        Error::IncompatibleSketch(_) => FreqmdpStatus::IncompatibleSketch,
        Error::ProtocolViolation(_) => FreqmdpStatus::ProtocolViolation,
        Error::WrongProtocol(_) => FreqmdpStatus::WrongProtocol,
        Error::Decode(_) => FreqmdpStatus::Decode,
        Error::Overflow => FreqmdpStatus::Overflow,
        _ => FreqmdpStatus::Other,
    }
}

enum Fail {
    Lib(Error),
    Null(&'static str),
    Small(usize, usize),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> FreqmdpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FreqmdpStatus::Ok,
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(name))) => {
            set_error(format!("{name} is null"));
            FreqmdpStatus::NullPointer
        }
        Ok(Err(Fail::Small(need, cap))) => {
            set_error(format!("buffer holds {cap} bytes, {need} needed"));
            FreqmdpStatus::BufferTooSmall
        }
        Err(_) => {
            set_error("internal panic".into());
            FreqmdpStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(name))
}

unsafe fn as_mut<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(name))
}

unsafe fn input<'a>(p: *const u8, len: usize) -> Result<&'a [u8], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null("input buffer"));
    }
    Ok(slice::from_raw_parts(p, len))
}

/// Copies `bytes` out, writing the required size to `written` first.
unsafe fn output(bytes: &[u8], buf: *mut u8, cap: usize, written: *mut usize) -> Result<(), Fail> {
    *as_mut(written, "written")? = bytes.len();
    if bytes.len() > cap {
        return Err(Fail::Small(bytes.len(), cap));
    }
    if !bytes.is_empty() {
        if buf.is_null() {
            return Err(Fail::Null("output buffer"));
        }
        ptr::copy_nonoverlapping(bytes.as_ptr(), buf, bytes.len());
    }
    Ok(())
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> Result<(), Fail> {
    *as_mut(out, "out")? = Box::into_raw(Box::new(v));
    Ok(())
}

/// Copies the calling thread's last error message, NUL-terminated and
/// truncated to `cap`. Returns the full message length without the NUL.
#[no_mangle]
pub unsafe extern "C" fn freqmdp_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = msg.len().min(cap - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Empty sketch with `rows` seeded hash pairs over `[0, domain)`.
#[no_mangle]
pub unsafe extern "C" fn freqmdp_sketch_new(
    rows: usize,
    width: usize,
    domain: u64,
    seed: u64,
    out: *mut *mut FreqmdpSketch,
) -> FreqmdpStatus {
    guard(|| put(out, FreqmdpSketch(CountSketch::new(rows, width, domain, seed)?)))
}

#[no_mangle]
pub unsafe extern "C" fn freqmdp_sketch_free(sketch: *mut FreqmdpSketch) {
    if !sketch.is_null() {
        drop(Box::from_raw(sketch));
    }
}

#[no_mangle]
pub unsafe extern "C" fn freqmdp_sketch_update(sketch: *mut FreqmdpSketch, item: u64, delta: i64) -> FreqmdpStatus {
    guard(|| Ok(as_mut(sketch, "sketch")?.0.update(item, delta)?))
}

/// Median-of-rows point estimate.
#[no_mangle]
pub unsafe extern "C" fn freqmdp_sketch_estimate(sketch: *const FreqmdpSketch, item: u64, out: *mut f64) -> FreqmdpStatus {
    guard(|| {
        *as_mut(out, "out")? = as_ref(sketch, "sketch")?.0.estimate(item)?;
        Ok(())
    })
}

/// Serializes the exact (noiseless) sketch.
#[no_mangle]
pub unsafe extern "C" fn freqmdp_sketch_to_bytes(
    sketch: *const FreqmdpSketch,
    buf: *mut u8,
    cap: usize,
    written: *mut usize,
) -> FreqmdpStatus {
    guard(|| output(&as_ref(sketch, "sketch")?.0.to_bytes(), buf, cap, written))
}

#[no_mangle]
pub unsafe extern "C" fn freqmdp_sketch_from_bytes(bytes: *const u8, len: usize, out: *mut *mut FreqmdpSketch) -> FreqmdpStatus {
    guard(|| put(out, FreqmdpSketch(CountSketch::from_bytes(input(bytes, len)?)?)))
}

/// Adds two-sided geometric noise calibrated to `eps` and the sketch's
/// `2 * rows` sensitivity, then serializes. The handle is left unchanged.
#[no_mangle]
pub unsafe extern "C" fn freqmdp_sketch_privatize(
    sketch: *const FreqmdpSketch,
    eps: f64,
    noise_seed: u64,
    buf: *mut u8,
    cap: usize,
    written: *mut usize,
) -> FreqmdpStatus {
    guard(|| {
        let s = &as_ref(sketch, "sketch")?.0;
        let noise: GeomParam = sketch_noise(eps, s.rows())?;
        let noisy = s.clone().add_noise(noise, &mut seeded_rng(noise_seed))?;
        output(&noisy.to_bytes(), buf, cap, written)
    })
}

#[no_mangle]
pub unsafe extern "C" fn freqmdp_basic_aggregator_new(out: *mut *mut FreqmdpBasicAggregator) -> FreqmdpStatus {
    guard(|| put(out, FreqmdpBasicAggregator(BasicAggregator::new())))
}

#[no_mangle]
pub unsafe extern "C" fn freqmdp_basic_aggregator_free(agg: *mut FreqmdpBasicAggregator) {
    if !agg.is_null() {
        drop(Box::from_raw(agg));
    }
}

/// Ingests one party's serialized noisy sketch.
#[no_mangle]
pub unsafe extern "C" fn freqmdp_basic_aggregator_ingest(
    agg: *mut FreqmdpBasicAggregator,
    party: u64,
    bytes: *const u8,
    len: usize,
) -> FreqmdpStatus {
    guard(|| {
        let a = as_mut(agg, "aggregator")?;
        let sketch = NoisyCountSketch::from_bytes(input(bytes, len)?)?;
        Ok(a.0.ingest(BasicMessage { party, sketch })?)
    })
}

#[no_mangle]
pub unsafe extern "C" fn freqmdp_basic_aggregator_estimate(
    agg: *const FreqmdpBasicAggregator,
    item: u64,
    out: *mut f64,
) -> FreqmdpStatus {
    guard(|| {
        *as_mut(out, "out")? = as_ref(agg, "aggregator")?.0.estimate(item)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn freqmdp_ldp_width(eps: f64, out: *mut usize) -> FreqmdpStatus {
    guard(|| {
        *as_mut(out, "out")? = ldp_width(eps)?;
        Ok(())
    })
}

/// Encodes one party's single item as an Elias-gamma bit string.
/// `written` receives the byte count, `bits` the exact bit length.
#[no_mangle]
pub unsafe extern "C" fn freqmdp_ldp_encode(
    party: u64,
    item: u64,
    eps: f64,
    domain: u64,
    hash_seed: u64,
    noise_seed: u64,
    buf: *mut u8,
    cap: usize,
    written: *mut usize,
    bits: *mut usize,
) -> FreqmdpStatus {
    guard(|| {
        let d = PartyDataset::new(party, FrequencyVector::from_items([item]))?;
        let msg = ldp_party_message(&d, eps, domain, hash_seed, false, &mut seeded_rng(noise_seed))?;
        let (bytes, n) = msg.encode_bits()?;
        *as_mut(bits, "bits")? = n;
        output(&bytes, buf, cap, written)
    })
}

#[no_mangle]
pub unsafe extern "C" fn freqmdp_ldp_aggregator_new(eps: f64, domain: u64, out: *mut *mut FreqmdpLdpAggregator) -> FreqmdpStatus {
    guard(|| put(out, FreqmdpLdpAggregator(LdpAggregator::new(eps, domain)?)))
}

#[no_mangle]
pub unsafe extern "C" fn freqmdp_ldp_aggregator_free(agg: *mut FreqmdpLdpAggregator) {
    if !agg.is_null() {
        drop(Box::from_raw(agg));
    }
}

#[no_mangle]
pub unsafe extern "C" fn freqmdp_ldp_aggregator_ingest(
    agg: *mut FreqmdpLdpAggregator,
    party: u64,
    hash_seed: u64,
    bytes: *const u8,
    len: usize,
) -> FreqmdpStatus {
    guard(|| {
        let a = as_mut(agg, "aggregator")?;
        let msg = SparseLdpMessage::decode_bits(party, a.0.width(), hash_seed, input(bytes, len)?)?;
        Ok(a.0.ingest(msg)?)
    })
}

#[no_mangle]
pub unsafe extern "C" fn freqmdp_ldp_aggregator_estimate(agg: *const FreqmdpLdpAggregator, item: u64, out: *mut f64) -> FreqmdpStatus {
    guard(|| {
        *as_mut(out, "out")? = as_ref(agg, "aggregator")?.0.estimate(item)?;
        Ok(())
    })
}
