//! Nelder–Mead simplex search, maximising a smooth function of a few angles.

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct SimplexResult<const N: usize> {
    pub point: [f64; N],
    pub value: f64,
    pub iterations: usize,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Maximises `f` starting from an axis-aligned simplex of edge `step` at
/// `start`. Stops when the spread of values across the simplex drops below
/// `tolerance` or after `max_iterations` steps.
pub(crate) fn maximize<const N: usize, F>(
    f: F,
    start: [f64; N],
    step: f64,
    tolerance: f64,
    max_iterations: usize,
) -> SimplexResult<N>
where
    F: Fn(&[f64; N]) -> f64,
{
    // Work with -f so the ordering below reads as minimisation.
    let cost = |p: &[f64; N]| -f(p);
    let mut verts: Vec<([f64; N], f64)> = Vec::with_capacity(N + 1);
    verts.push((start, cost(&start)));
    for k in 0..N {
        let mut p = start;
        p[k] += step;
        verts.push((p, cost(&p)));
    }

    let mut iterations = 0;
    loop {
        verts.sort_by(|l, r| l.1.total_cmp(&r.1));
        let spread = verts[N].1 - verts[0].1;
        if spread < tolerance || iterations >= max_iterations {
            break;
        }
        iterations += 1;

        let mut centroid = [0.0; N];
        for (p, _) in &verts[..N] {
            for k in 0..N {
                centroid[k] += p[k] / N as f64;
            }
        }
        let along = |t: f64| {
            let mut p = [0.0; N];
            for k in 0..N {
                p[k] = centroid[k] + t * (verts[N].0[k] - centroid[k]);
            }
            p
        };

        let reflected = along(-REFLECT);
        let fr = cost(&reflected);
        if fr < verts[0].1 {
            let expanded = along(-EXPAND);
            let fe = cost(&expanded);
            verts[N] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
            continue;
        }
        if fr < verts[N - 1].1 {
            verts[N] = (reflected, fr);
            continue;
        }
        let (contracted, fc) = if fr < verts[N].1 {
            let p = along(-CONTRACT);
            (p, cost(&p))
        } else {
            let p = along(CONTRACT);
            (p, cost(&p))
        };
        if fc < verts[N].1.min(fr) {
            verts[N] = (contracted, fc);
            continue;
        }
        let best = verts[0].0;
        for v in verts.iter_mut().skip(1) {
            for (x, b) in v.0.iter_mut().zip(best) {
                *x = b + SHRINK * (*x - b);
            }
            v.1 = cost(&v.0);
        }
    }
    SimplexResult {
        point: verts[0].0,
        value: -verts[0].1,
        iterations,
    }
}

/// Repeats [`maximize`] from the previous optimum with a shrinking initial
/// simplex until a restart no longer improves the value by `tolerance`.
pub(crate) fn maximize_with_restarts<const N: usize, F>(
    f: F,
    start: [f64; N],
    step: f64,
    tolerance: f64,
    max_iterations: usize,
) -> SimplexResult<N>
where
    F: Fn(&[f64; N]) -> f64,
{
    let mut best = maximize(&f, start, step, tolerance, max_iterations);
    let mut step = step;
    for _ in 0..4 {
        step *= 0.1;
        let next = maximize(&f, best.point, step, tolerance, max_iterations);
        let gained = next.value - best.value;
        if next.value > best.value {
            best = SimplexResult {
                iterations: best.iterations + next.iterations,
                ..next
            };
        }
        if gained < tolerance {
            break;
        }
    }
    best
}
