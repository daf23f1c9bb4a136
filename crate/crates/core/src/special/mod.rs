//! Gamma, confluent hypergeometric, real-order Hermite and Airy functions.

mod airy;
mod gamma;
mod hermite;
mod kummer;

pub use airy::{airy_ai, airy_ai_prime_zero, airy_ai_zero, AiryPair};
pub use gamma::{gamma, ln_gamma, rgamma, sin_pi};
pub use hermite::{hermite_nu, hermite_value, recurrence_shift, HermiteEval, MAX_HERMITE_ARG_SQ};
pub use kummer::{kummer_1f1, MAX_SERIES_TERMS};
