use gevreykit::Complex64;

/// `"re,im"` or a bare real `"re"`.
pub fn complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|_| format!("bad number {p:?} in {s:?}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected re,im, got {s:?}")),
    }
}

/// `"r1:r2:count@angle"`: `count` moduli evenly spaced from `r1` to `r2` on
/// the ray `arg z = angle` (radians). `"r@angle"` is a single point.
pub fn grid(s: &str) -> Result<Vec<Complex64>, String> {
    let (radial, angle) = s
        .split_once('@')
        .ok_or_else(|| format!("grid {s:?} lacks @angle"))?;
    let angle: f64 = angle
        .trim()
        .parse()
        .map_err(|_| format!("bad angle in grid {s:?}"))?;
    let parts: Vec<&str> = radial.split(':').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|_| format!("bad number {p:?} in grid {s:?}"));
    let (r1, r2, count) = match parts.as_slice() {
        [r] => (num(r)?, num(r)?, 1usize),
        [a, b, n] => (
            num(a)?,
            num(b)?,
            n.parse().map_err(|_| format!("bad count {n:?} in grid {s:?}"))?,
        ),
        _ => return Err(format!("grid {s:?} is not r1:r2:count@angle")),
    };
    if count == 0 || !(r1 > 0.0 && r2 > 0.0) {
        return Err(format!("grid {s:?} needs positive radii and count"));
    }
    Ok((0..count)
        .map(|i| {
            let r = if count == 1 {
                r1
            } else {
                r1 + (r2 - r1) * i as f64 / (count - 1) as f64
            };
            Complex64::from_polar(r, angle)
        })
        .collect())
}

/// Comma-separated reals.
pub fn reals(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad number {p:?} in {s:?}"))
        })
        .collect()
}

/// `"alpha,beta"`.
pub fn pair(s: &str) -> Result<(f64, f64), String> {
    match reals(s)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(format!("expected two numbers, got {s:?}")),
    }
}

/// `"m,n"` approximant orders.
pub fn orders(s: &str) -> Result<(usize, usize), String> {
    match s.split(',').map(|p| p.trim().parse::<usize>()).collect::<Result<Vec<_>, _>>() {
        Ok(v) if v.len() == 2 => Ok((v[0], v[1])),
        _ => Err(format!("expected m,n, got {s:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(complex("5,0").unwrap(), Complex64::new(5.0, 0.0));
        assert_eq!(complex(" -1.5 , 2 ").unwrap(), Complex64::new(-1.5, 2.0));
        assert_eq!(complex("3").unwrap(), Complex64::new(3.0, 0.0));
        assert!(complex("1,2,3").is_err());
        assert!(complex("x").is_err());
    }

    #[test]
    fn grid_forms() {
        let g = grid("5:10:2@0").unwrap();
        assert_eq!(g, vec![Complex64::new(5.0, 0.0), Complex64::new(10.0, 0.0)]);
        let g = grid("2:4:3@1.5707963267948966").unwrap();
        assert_eq!(g.len(), 3);
        assert!((g[1].norm() - 3.0).abs() < 1e-15 && g[1].re.abs() < 1e-15);
        assert_eq!(grid("7@0").unwrap(), vec![Complex64::new(7.0, 0.0)]);
        assert!(grid("5:10:2").is_err());
        assert!(grid("5:10:0@0").is_err());
        assert!(grid("-1:2:3@0").is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(reals("5, 10,20").unwrap(), vec![5.0, 10.0, 20.0]);
        assert_eq!(pair("0,0.785").unwrap(), (0.0, 0.785));
        assert!(pair("1").is_err());
        assert_eq!(orders("8,8").unwrap(), (8, 8));
        assert!(orders("8").is_err());
    }
}
