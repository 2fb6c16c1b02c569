//! Independent oracles for the acceptance gate. Everything here is
//! computed from first principles with its own numerics (composite
//! Simpson, exhaustive search) so agreement with the library is evidence,
//! not tautology.

/// Unnormalized standard bump kernel on the unit disc.
fn bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

/// Composite Simpson rule with `n` panels (`n` even).
fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    assert!(n >= 2 && n.is_multiple_of(2));
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + k as f64 * h);
    }
    acc * h / 3.0
}

/// Normalized radial pinning profile at distance `d` from an isolated
/// center, evaluated as a direct two-dimensional quadrature of the
/// convolution of the unit-mass bump mollifier (radius `(r1-r0)/2`) with
/// the indicator of the disc of radius `(r0+r1)/2`.
///
/// The double integral runs over the mollifier support in Cartesian
/// coordinates; for each offset `x` the admissible `|y|` range is the
/// disc chord clipped to the kernel radius, so the inner integrand is
/// smooth and the outer integrand is only kinked where the clipping
/// switches. Splitting at those abscissas, and substituting `x = x_v -
/// w^2` on the piece whose chord vanishes at `x_v` (the chord scales as
/// `sqrt(x_v - x)` there, which would cost Simpson its order), keeps the
/// composite rule at full accuracy: the result is good to ~1e-10, far
/// below the 1e-6 gate.
pub fn profile_quadrature(r0: f64, r1: f64, d: f64) -> f64 {
    let eps = 0.5 * (r1 - r0);
    let disc_r = r0 + eps;
    let mass = 2.0 * std::f64::consts::PI * simpson(&|t| t * bump(t), 0.0, 1.0, 4096);

    // Clip switch: chord half-height equals kernel half-height.
    let mut cuts = vec![-eps, eps];
    if d > 0.0 {
        let x_eq = (disc_r * disc_r - eps * eps - d * d) / (2.0 * d);
        if x_eq > -eps && x_eq < eps {
            cuts.push(x_eq);
        }
    }
    // Chord vanishes where |d + x| = disc_r.
    let x_v = disc_r - d;
    for x0 in [x_v, -disc_r - d] {
        if x0 > -eps && x0 < eps {
            cuts.push(x0);
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let inner = |x: f64| -> f64 {
        let ker2 = eps * eps - x * x;
        if ker2 <= 0.0 {
            return 0.0;
        }
        let chord2 = disc_r * disc_r - (d + x) * (d + x);
        if chord2 <= 0.0 {
            return 0.0;
        }
        let y_hi = ker2.sqrt().min(chord2.sqrt());
        2.0 * simpson(&|y| bump((x * x + y * y).sqrt() / eps), 0.0, y_hi, 800)
    };

    let mut total = 0.0;
    for pair in cuts.windows(2) {
        if pair[1] <= pair[0] {
            continue;
        }
        total += if pair[1] == x_v {
            let w_hi = (x_v - pair[0]).sqrt();
            simpson(&|w| 2.0 * w * inner(x_v - w * w), 0.0, w_hi, 1000)
        } else {
            simpson(&inner, pair[0], pair[1], 1000)
        };
    }
    total / (eps * eps * mass)
}

/// Exhaustive minimal periodic 1-Lipschitz row selection on an
/// `n_cols x j_max` occupancy grid (rows 1..=j_max). Enumerates every
/// feasible assignment by depth-first search with adjacency pruning and
/// folds the pointwise minimum, which is itself feasible because the
/// feasible set is a lattice.
pub fn exhaustive_min_selection(
    n_cols: usize,
    j_max: u32,
    occupied: &dyn Fn(usize, u32) -> bool,
) -> Option<Vec<u32>> {
    let rows: Vec<Vec<u32>> = (0..n_cols)
        .map(|k| (1..=j_max).filter(|&j| occupied(k, j)).collect())
        .collect();
    if rows.iter().any(|r| r.is_empty()) {
        return None;
    }
    if n_cols == 1 {
        return Some(vec![rows[0][0]]);
    }
    let mut best: Option<Vec<u32>> = None;
    let mut pick = vec![0u32; n_cols];
    fn dfs(
        k: usize,
        rows: &[Vec<u32>],
        pick: &mut Vec<u32>,
        best: &mut Option<Vec<u32>>,
    ) {
        if k == rows.len() {
            if pick[0].abs_diff(pick[rows.len() - 1]) <= 1 {
                match best {
                    Some(b) => {
                        for (bi, pi) in b.iter_mut().zip(pick.iter()) {
                            *bi = (*bi).min(*pi);
                        }
                    }
                    None => *best = Some(pick.clone()),
                }
            }
            return;
        }
        for &j in &rows[k] {
            if k > 0 && j.abs_diff(pick[k - 1]) > 1 {
                continue;
            }
            pick[k] = j;
            dfs(k + 1, rows, pick, best);
        }
    }
    dfs(0, &rows, &mut pick, &mut best);
    best
}

/// Prints the per-criterion verdict line and panics on failure.
pub fn verdict(id: u32, label: &str, pass: bool, detail: String) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {id:2} ({label}): {detail}");
    assert!(pass, "criterion {id} ({label}) failed: {detail}");
}
