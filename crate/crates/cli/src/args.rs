//! Parsers for the compact value specs accepted on the command line.

use tdchan::verification::linspace;

/// `"x"` or the grid `"a:b:steps"` (`steps ≥ 2`, `a ≠ b`).
pub fn parse_t_spec(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [x] => Ok(vec![parse_f64(x, "t")?]),
        [a, b, steps] => parse_grid(a, b, steps),
        _ => Err(format!("t: expected a number or a:b:steps, got '{s}'")),
    }
}

/// Grid spec `"a:b:steps"` only.
pub fn parse_grid_spec(s: &str) -> Result<Vec<f64>, String> {
    match s.split(':').collect::<Vec<_>>().as_slice() {
        [a, b, steps] => parse_grid(a, b, steps),
        _ => Err(format!("t-grid: expected a:b:steps, got '{s}'")),
    }
}

fn parse_grid(a: &str, b: &str, steps: &str) -> Result<Vec<f64>, String> {
    let a = parse_f64(a, "grid start")?;
    let b = parse_f64(b, "grid end")?;
    let steps: usize = steps.trim().parse().map_err(|_| format!("grid steps: '{steps}' is not an integer"))?;
    if steps < 2 {
        return Err(format!("grid steps must be at least 2, got {steps}"));
    }
    if a == b {
        return Err(format!("grid endpoints must differ, got {a}:{b}"));
    }
    Ok(linspace(a, b, steps))
}

/// `"d"` or the inclusive range `"a:b"`.
pub fn parse_d_spec(s: &str) -> Result<Vec<usize>, String> {
    let int = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("d: '{x}' is not a nonnegative integer"));
    match s.split(':').collect::<Vec<_>>().as_slice() {
        [x] => Ok(vec![int(x)?]),
        [a, b] => {
            let (a, b) = (int(a)?, int(b)?);
            if a > b {
                return Err(format!("d range {a}:{b} is empty"));
            }
            Ok((a..=b).collect())
        }
        _ => Err(format!("d: expected an integer or a:b, got '{s}'")),
    }
}

/// Comma-separated decimals. Only syntax is checked here.
pub fn parse_lambda(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|x| parse_f64(x, "lambda")).collect()
}

fn parse_f64(s: &str, what: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("{what}: '{s}' is not a number"))?;
    if !v.is_finite() {
        return Err(format!("{what}: '{s}' is not finite"));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_specs() {
        assert_eq!(parse_t_spec("-0.5").unwrap(), vec![-0.5]);
        assert_eq!(parse_t_spec("-1:0:5").unwrap(), vec![-1.0, -0.75, -0.5, -0.25, 0.0]);
        assert!(parse_t_spec("-1:0:1").is_err());
        assert!(parse_t_spec("0:0:3").is_err());
        assert!(parse_t_spec("a").is_err());
        assert!(parse_t_spec("1:2").is_err());
        assert!(parse_t_spec("nan").is_err());
    }

    #[test]
    fn grids_are_monotone() {
        for spec in ["-1:0:101", "0.2:-0.3:7"] {
            let g = parse_grid_spec(spec).unwrap();
            let up = g[1] > g[0];
            assert!(g.windows(2).all(|w| (w[1] > w[0]) == up));
        }
        assert!(parse_grid_spec("-0.5").is_err());
    }

    #[test]
    fn d_specs() {
        assert_eq!(parse_d_spec("3").unwrap(), vec![3]);
        assert_eq!(parse_d_spec("3:6").unwrap(), vec![3, 4, 5, 6]);
        assert!(parse_d_spec("6:3").is_err());
        assert!(parse_d_spec("-1").is_err());
    }

    #[test]
    fn lambda_lists() {
        assert_eq!(parse_lambda("1,0,0").unwrap(), vec![1.0, 0.0, 0.0]);
        assert_eq!(parse_lambda(" 0.25, 0.75").unwrap(), vec![0.25, 0.75]);
        assert!(parse_lambda("0.5,,0.5").is_err());
    }
}
