//! Row-major nested-array serde for the fixed-size matrices in scenario files.

use nalgebra::SMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub fn serialize<S, const R: usize, const C: usize>(
    m: &SMatrix<f64, R, C>,
    ser: S,
) -> Result<S::Ok, S::Error>
where
    S: Serializer,
{
    let rows: Vec<Vec<f64>> = (0..R)
        .map(|i| (0..C).map(|j| m[(i, j)]).collect())
        .collect();
    rows.serialize(ser)
}

pub fn deserialize<'de, D, const R: usize, const C: usize>(
    de: D,
) -> Result<SMatrix<f64, R, C>, D::Error>
where
    D: Deserializer<'de>,
{
    use serde::de::Error;
    let rows = Vec::<Vec<f64>>::deserialize(de)?;
    if rows.len() != R || rows.iter().any(|r| r.len() != C) {
        return Err(D::Error::custom(format!("expected a {R}x{C} matrix")));
    }
    Ok(SMatrix::from_fn(|i, j| rows[i][j]))
}
