use std::path::Path;

use semiclass_core::measures::HusimiGrid;

use crate::error::{CliError, CliResult};

/// Writes a rectangular grid of nonnegative values as binary PGM, rows top
/// to bottom, scaled so the maximum maps to 255. An all-zero grid gives
/// all-zero bytes.
pub fn render_grid_pgm(grid: &[Vec<f64>], path: &Path) -> CliResult<()> {
    let bytes = grid_pgm_bytes(grid)?;
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

pub fn grid_pgm_bytes(grid: &[Vec<f64>]) -> CliResult<Vec<u8>> {
    let height = grid.len();
    let width = grid.first().map_or(0, Vec::len);
    if height == 0 || width == 0 || grid.iter().any(|row| row.len() != width) {
        return Err(CliError::Report("PGM grid must be nonempty and rectangular".into()));
    }
    let flat: Vec<f64> = grid.iter().flatten().copied().collect();
    semiclass_core::io::pgm_bytes(&flat, width, height)
        .map_err(|e| CliError::Core { context: "PGM encoding".into(), source: e })
}

/// Husimi grid as raster rows: x to the right, ξ upwards.
pub fn husimi_rows(grid: &HusimiGrid) -> Vec<Vec<f64>> {
    (0..grid.g).rev().map(|j| (0..grid.g).map(|i| grid.at(i, j)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let b = grid_pgm_bytes(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(&b[..11], b"P5\n2 2\n255\n");
        assert_eq!(&b[11..], &[0, 255, 255, 0]);
    }

    #[test]
    fn zero_grid() {
        let b = grid_pgm_bytes(&vec![vec![0.0; 3]; 2]).unwrap();
        assert!(b[11..].iter().all(|&x| x == 0));
    }

    #[test]
    fn ragged_or_empty_rejected() {
        assert!(grid_pgm_bytes(&[]).is_err());
        assert!(grid_pgm_bytes(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }
}
