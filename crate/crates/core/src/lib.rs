pub mod ball;
pub mod beta;
pub mod cns;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod interval;
pub mod hausdorff;
pub mod linalg;
pub mod params;
pub mod poly;
pub mod real;
pub mod render;
pub mod scalar;
pub mod tiles;
pub mod tiling;
