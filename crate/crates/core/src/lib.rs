//! Entropy-conserving binarization of byte streams.
//!
//! A stream over an alphabet of `m` byte symbols is split into `m - 1` binary
//! planes. Plane `k` flags the occurrences of the `k`-th symbol of a chosen
//! order among the symbols not yet peeled off. The planes' binary entropies,
//! weighted by their lengths, add up to the source entropy for every order,
//! so an adaptive binary coder on each plane compresses the whole stream
//! close to its empirical entropy.
//!
//! ```
//! use ecbin::codec::{decode, encode, OrderPolicy};
//!
//! let data = b"AABCBACBBACCABACB";
//! let (container, summary) = encode(data, &OrderPolicy::Frequency, 1).unwrap();
//! assert_eq!(summary.plane_bits, 28);
//! assert_eq!(decode(&container, 1).unwrap(), data);
//! ```

pub mod alphabet;
pub mod baselines;
pub mod bench;
pub mod binarizer;
pub mod bincoder;
pub mod bits;
pub mod codec;
pub mod container;
pub mod entropy;

pub use alphabet::{Alphabet, BinarizationOrder};
pub use binarizer::{binarize, debinarize, PlaneSet};
pub use bits::BitPlane;
pub use codec::{decode, encode, OrderPolicy};
pub use entropy::EntropyReport;
