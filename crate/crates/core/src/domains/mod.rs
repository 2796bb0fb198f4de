pub mod maximum;
pub mod samegame;
pub mod tsptw;
