/// Chebyshev polynomial of the first kind, `T_degree(x)`.
///
/// Uses the three-term recurrence on `[-1, 1]` and the `cosh`/`arcosh`
/// closed form outside it, where the recurrence would need `degree` steps
/// and overflows long before the closed form does.
pub fn chebyshev_t(degree: u32, x: f64) -> f64 {
    match degree {
        0 => return 1.0,
        1 => return x,
        2 => return 2.0 * x * x - 1.0,
        _ => {}
    }
    if x.abs() <= 1.0 {
        let (mut prev, mut cur) = (1.0, x);
        for _ in 1..degree {
            let next = 2.0 * x * cur - prev;
            prev = cur;
            cur = next;
        }
        cur
    } else if x > 1.0 {
        (f64::from(degree) * x.acosh()).cosh()
    } else {
        let sign = if degree.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * (f64::from(degree) * (-x).acosh()).cosh()
    }
}

/// `T_degree(1 + eps)` for `eps >= 0`, accurate when `eps` is tiny.
///
/// `acosh(1 + eps)` is evaluated as `ln1p(eps + sqrt(eps (2 + eps)))` so the
/// argument never passes through `x*x - 1`.
pub fn chebyshev_t_one_plus(degree: u32, eps: f64) -> f64 {
    debug_assert!(eps >= 0.0);
    if degree <= 2 {
        return chebyshev_t(degree, 1.0 + eps);
    }
    let theta = (eps + (eps * (2.0 + eps)).sqrt()).ln_1p();
    (f64::from(degree) * theta).cosh()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_degrees() {
        assert_eq!(chebyshev_t(1, 0.3), 0.3);
        assert_eq!(chebyshev_t(5, 1.0), 1.0);
        assert_eq!(chebyshev_t(0, 7.5), 1.0);
        assert_eq!(chebyshev_t(2, 1.25), 2.125);
    }

    #[test]
    fn degree_three_outside_interval() {
        // 4x^3 - 3x at x = 2
        let v = chebyshev_t(3, 2.0);
        assert!((v - 26.0).abs() <= 1e-12 * 26.0, "{v}");
        let v = chebyshev_t(3, -2.0);
        assert!((v + 26.0).abs() <= 1e-12 * 26.0, "{v}");
    }

    #[test]
    fn closed_form_matches_recurrence_outside() {
        for degree in 3..20u32 {
            for &x in &[1.0001, 1.01, 1.3, 2.0, 3.7] {
                let (mut a, mut b) = (1.0f64, x);
                for _ in 1..degree {
                    let c = 2.0 * x * b - a;
                    a = b;
                    b = c;
                }
                let got = chebyshev_t(degree, x);
                assert!((got - b).abs() <= 1e-10 * b.abs(), "T_{degree}({x}) = {got} vs {b}");
                let near = chebyshev_t_one_plus(degree, x - 1.0);
                assert!((near - b).abs() <= 1e-10 * b.abs());
            }
        }
    }

    #[test]
    fn bounded_on_unit_interval() {
        for degree in 0..=64u32 {
            for k in 0..=400 {
                let x = -1.0 + 2.0 * f64::from(k) / 400.0;
                assert!(chebyshev_t(degree, x).abs() <= 1.0 + 1e-12);
            }
        }
    }
}
