use crate::error::{Error, Result};

/// `f((x_1..x_l), r) = x_1·2/r + Σ_{k≥2} x_k·(2^k/r)·Π_{j<k} exp(-x_j·2^j/r)`.
pub fn f_seq(xs: &[f64], r: f64) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::domain("f_seq needs a non-empty sequence"));
    }
    if r.is_nan() || r <= 0.0 {
        return Err(Error::domain(format!("f_seq needs r > 0, got {r}")));
    }
    let mut total = 0.0;
    let mut log_survive = 0.0f64;
    let mut scale = 1.0;
    for &x in xs {
        scale *= 2.0;
        total += x * scale / r * log_survive.exp();
        log_survive -= x * scale / r;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(f_seq(&[3.0], 7.0).unwrap(), 6.0 / 7.0);
        assert_eq!(f_seq(&[7.0], 7.0).unwrap(), 2.0);
        assert_eq!(f_seq(&[0.0; 12], 2.0).unwrap(), 0.0);
        let two = f_seq(&[1.0, 1.0], 4.0).unwrap();
        assert!((two - (0.5 + (-0.5f64).exp())).abs() < 1e-15);
        assert!(f_seq(&[], 1.0).is_err());
        assert!(f_seq(&[1.0], 0.0).is_err());
    }
}
