pub mod diagonalize;
pub mod error;
pub mod freudenthal;
pub mod io;
pub mod classify;
pub mod jordan;
pub mod lie;
pub mod octonion;
pub mod scalar;
pub mod verify;
