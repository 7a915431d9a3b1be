pub mod abln;
pub mod bde;
pub mod formula;
pub mod oracle;
pub mod reductions;
pub mod regex;
pub mod system;
pub mod verdict;
