pub mod cli;
pub mod fixtures;
pub mod fpt;
pub mod kauffman;
pub mod link;
pub mod poly;
pub mod treewidth;
