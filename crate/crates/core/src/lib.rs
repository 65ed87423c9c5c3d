pub mod algebra;
pub mod atlas;
pub mod cech;
pub mod document;
pub mod exec;
pub mod jet;
pub mod oracle;
pub mod parse;
pub mod residue;
