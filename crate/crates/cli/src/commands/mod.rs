pub mod dist;
pub mod simulate;
pub mod solve;
pub mod twostep;
