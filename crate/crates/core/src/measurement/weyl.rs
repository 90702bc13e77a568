use crate::linalg::{c, ComplexMatrix, C64};

/// Displacement operators `D_{jk} = X^j Z^k` for `j, k ∈ 0..d`, listed with
/// index `j·d + k`. `X|m> = |m+1 mod d>`, `Z|m> = ω^m |m>`, `ω = e^{2πi/d}`.
/// No extra phase factor is attached.
pub fn heisenberg_weyl(d: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(d * d);
    for j in 0..d {
        for k in 0..d {
            // (X^j Z^k)|m> = ω^{km} |m + j>
            out.push(ComplexMatrix::from_fn(d, d, |row, col| {
                if row == (col + j) % d {
                    omega_pow(d, k * col)
                } else {
                    c(0., 0.)
                }
            }));
        }
    }
    out
}

fn omega_pow(d: usize, e: usize) -> C64 {
    let theta = std::f64::consts::TAU * ((e % d) as f64) / d as f64;
    C64::from_polar(1.0, theta)
}
