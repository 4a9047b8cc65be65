//! Natural density of sets of positive integers, and the maps that preserve
//! it.
//!
//! The crate works with exact rationals throughout ([`Rat`]) and covers
//!
//! * intervals, μ, m-interval classification and tilings ([`interval`]),
//! * sets given by rules, interval unions or explicit bitmaps ([`sets`]),
//! * prefix and interval densities and the interval criterion for having a
//!   density ([`density`]),
//! * the 2^n shuffle and other one-to-one maps ([`maps`], [`fndsl`]),
//! * the covering condition that decides whether a map preserves density
//!   ([`covering`]), and
//! * explicit constructions of sets that exercise all of the above
//!   ([`adversary`]).
//!
//! ```
//! use natdensity::{density::prefix_density, adversary::no_density_example, Rat};
//!
//! let s = no_density_example();
//! assert_eq!(prefix_density(&s, 7).unwrap(), Rat::frac(5, 7));
//! assert_eq!(prefix_density(&s, 15).unwrap(), Rat::frac(1, 3));
//! ```

pub mod adversary;
pub mod covering;
pub mod density;
pub mod error;
pub mod fndsl;
pub mod interval;
pub mod maps;
pub mod rat;
pub mod sets;
pub mod setspec;

pub use error::{Error, Result};
pub use interval::{Interval, IntervalUnion};
pub use maps::{NatMap, SharedMap};
pub use rat::Rat;
pub use sets::NatSet;
