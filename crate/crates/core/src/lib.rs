pub mod cli;
pub mod dga;
pub mod expansion;
pub mod ext;
pub mod gmod;
pub mod lift;
pub mod ring;
pub mod sample;
