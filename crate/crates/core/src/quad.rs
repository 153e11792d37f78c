//! Adaptive Simpson quadrature.

/// Absolute tolerance used for every reported integral.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Maximum bisection depth per subinterval.
pub const MAX_DEPTH: u32 = 40;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub tol: f64,
    pub max_depth: u32,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_depth: MAX_DEPTH,
        }
    }
}

impl Quadrature {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    /// ∫_a^b f. Reversed limits give the negated integral. Node placement
    /// depends only on the integrand values, so repeated calls are identical.
    pub fn integrate<F>(&self, f: F, a: f64, b: f64) -> f64
    where
        F: Fn(f64) -> f64,
    {
        self.integrate_vec(|x| [f(x)], a, b)[0]
    }

    /// Componentwise ∫_a^b of a vector-valued integrand. A panel is accepted
    /// only when every component meets the tolerance, so one integrand
    /// evaluation serves all components.
    pub fn integrate_vec<F, const N: usize>(&self, f: F, a: f64, b: f64) -> [f64; N]
    where
        F: Fn(f64) -> [f64; N],
    {
        if a == b {
            return [0.0; N];
        }
        if b < a {
            return self.integrate_vec(f, b, a).map(|v| -v);
        }
        // Four initial panels so that integrands that happen to vanish on the
        // first three Simpson nodes are not accepted outright.
        let panels = 4;
        let h = (b - a) / panels as f64;
        let mut total = [0.0; N];
        for k in 0..panels {
            let lo = a + h * k as f64;
            let hi = if k + 1 == panels { b } else { lo + h };
            let mid = 0.5 * (lo + hi);
            let (flo, fmid, fhi) = (f(lo), f(mid), f(hi));
            let whole = simpson(lo, hi, &flo, &fmid, &fhi);
            let part = refine(
                &f,
                Panel {
                    lo,
                    mid,
                    hi,
                    flo,
                    fmid,
                    fhi,
                    whole,
                },
                self.tol / panels as f64,
                self.max_depth,
            );
            for (t, p) in total.iter_mut().zip(part) {
                *t += p;
            }
        }
        total
    }
}

#[derive(Clone, Copy)]
struct Panel<const N: usize> {
    lo: f64,
    mid: f64,
    hi: f64,
    flo: [f64; N],
    fmid: [f64; N],
    fhi: [f64; N],
    whole: [f64; N],
}

#[inline]
fn simpson<const N: usize>(
    lo: f64,
    hi: f64,
    flo: &[f64; N],
    fmid: &[f64; N],
    fhi: &[f64; N],
) -> [f64; N] {
    let w = (hi - lo) / 6.0;
    std::array::from_fn(|i| w * (flo[i] + 4.0 * fmid[i] + fhi[i]))
}

fn refine<F, const N: usize>(f: &F, p: Panel<N>, tol: f64, depth: u32) -> [f64; N]
where
    F: Fn(f64) -> [f64; N],
{
    let left_mid = 0.5 * (p.lo + p.mid);
    let right_mid = 0.5 * (p.mid + p.hi);
    let (flm, frm) = (f(left_mid), f(right_mid));
    let left = simpson(p.lo, p.mid, &p.flo, &flm, &p.fmid);
    let right = simpson(p.mid, p.hi, &p.fmid, &frm, &p.fhi);
    let delta: [f64; N] = std::array::from_fn(|i| left[i] + right[i] - p.whole[i]);
    if depth == 0
        || delta.iter().all(|d| d.abs() <= 15.0 * tol)
        || delta.iter().any(|d| !d.is_finite())
    {
        return std::array::from_fn(|i| left[i] + right[i] + delta[i] / 15.0);
    }
    let l = refine(
        f,
        Panel {
            lo: p.lo,
            mid: left_mid,
            hi: p.mid,
            flo: p.flo,
            fmid: flm,
            fhi: p.fmid,
            whole: left,
        },
        tol / 2.0,
        depth - 1,
    );
    let r = refine(
        f,
        Panel {
            lo: p.mid,
            mid: right_mid,
            hi: p.hi,
            flo: p.fmid,
            fmid: frm,
            fhi: p.fhi,
            whole: right,
        },
        tol / 2.0,
        depth - 1,
    );
    std::array::from_fn(|i| l[i] + r[i])
}

/// ∫_a^b f with the default tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    Quadrature::default().integrate(f, a, b)
}
