//! Many-sorted first-order problems over finite domains, with sort inference,
//! symmetry breaking and a CSP view of domain symmetries.

pub mod catalog;
pub mod corpus;
pub mod csp;
pub mod io;
pub mod logic;
pub mod oracle;
pub mod sorts;
pub mod symbreak;

mod unionfind;
