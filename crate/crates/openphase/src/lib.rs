#![no_std]
// `!(x <= tol)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod holonomy;
pub mod lindblad;
pub mod matops;
pub mod oracle;
pub mod stirap;
