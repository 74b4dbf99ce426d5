//! Exact rational arithmetic and the sparse polynomial kernel.

mod parse;
mod poly;
mod rat;
mod resultant;

pub use parse::poly_parse;
pub use poly::{cmp_rev_lex, Exponent, Poly};
pub use rat::{fmt_rat, int, parse_rat, primitive_ray, rat, rat_to_f64, rational_root, ExtRat, Rat};
pub use resultant::{determinant, resultant_in, sylvester_matrix};
