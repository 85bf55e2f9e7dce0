//! Numerical companion for extreme values of Dirichlet L-functions on the line
//! Re s = 1: characters, L-function evaluation, prime sums, the auxiliary
//! weighted series with their Rouché circles, Kronecker-type shift
//! certificates, critical points of ζ and the theorem-bound scanner.

pub mod acceptance;
pub mod auxseries;
pub mod characters;
pub mod config;
pub mod constants;
pub mod critzeros;
pub mod diophantine;
pub mod hp;
pub mod lfengine;
pub mod numeric;
pub mod primesums;
pub mod scanner;
