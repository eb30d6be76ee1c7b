//! Planar nodal curves `z = f(r)` with derivatives up to third order.
//!
//! Three flavours: the catenoid graph `f(r) = k·arccosh(r/k) + b`, the
//! explicit Toda graph `f = q_ε`, and sampled curves backed by a C² cubic
//! spline (used for nodal sets extracted from grid fields).

use crate::error::{Error, Result};
use crate::profile::Constants;
use crate::reduced::TodaSolution;

#[derive(Debug, Clone)]
pub enum CurveKind {
    /// `f(r) = k arccosh(r/k) + b`, defined for `r >= k`.
    Catenoid { k: f64, b: f64 },
    /// `f = q_ε`, the explicit solution of the radial Toda equation.
    Toda(TodaSolution),
    /// C² cubic spline through strictly increasing samples.
    Sampled,
}

#[derive(Debug, Clone)]
pub struct NodalCurve {
    pub kind: CurveKind,
    domain: (f64, f64),
    spline: Option<Spline>,
}

impl NodalCurve {
    /// Catenoid graph. Evaluation below `r = k` is a domain error.
    pub fn catenoid(k: f64, b: f64) -> Result<Self> {
        if !(k > 0.0) || !b.is_finite() {
            return Err(Error::Domain(format!(
                "catenoid curve requires k > 0 (got k = {k}, b = {b})"
            )));
        }
        Ok(NodalCurve {
            kind: CurveKind::Catenoid { k, b },
            domain: (k, f64::INFINITY),
            spline: None,
        })
    }

    /// Explicit Toda graph `z = q_ε(r)`, defined for all r >= 0.
    pub fn toda(eps: f64, constants: Constants) -> Result<Self> {
        let sol = TodaSolution::new(eps, constants)?;
        Ok(NodalCurve {
            kind: CurveKind::Toda(sol),
            domain: (0.0, f64::INFINITY),
            spline: None,
        })
    }

    /// Sampled curve with C² cubic-spline evaluation. Abscissae must be
    /// strictly increasing, all values finite.
    pub fn from_samples(r: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        let spline = Spline::new(r, f)?;
        let domain = (spline.x[0], *spline.x.last().unwrap());
        Ok(NodalCurve {
            kind: CurveKind::Sampled,
            domain,
            spline: Some(spline),
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// True when the curve meets the r axis (catenoid topology, apex at
    /// `f = 0`), false when it crosses the z axis (two separated graphs).
    pub fn apex_on_r_axis(&self) -> bool {
        match &self.kind {
            CurveKind::Catenoid { .. } => true,
            CurveKind::Toda(_) => false,
            CurveKind::Sampled => {
                let (lo, _) = self.domain;
                lo > 1e-9
            }
        }
    }

    /// f, f', f'' or f''' at r (order 0..=3).
    pub fn eval(&self, r: f64, order: usize) -> Result<f64> {
        if !r.is_finite() {
            return Err(Error::Domain(format!("curve eval at non-finite r = {r}")));
        }
        match &self.kind {
            CurveKind::Catenoid { k, b } => catenoid_eval(*k, *b, r, order),
            CurveKind::Toda(sol) => {
                if r < 0.0 {
                    return Err(Error::Domain(format!("Toda curve eval at r = {r} < 0")));
                }
                Ok(match order {
                    0 => sol.eval(r, 0),
                    1 => sol.eval(r, 1),
                    2 => sol.eval(r, 2),
                    3 => sol.third_derivative(r),
                    _ => return Err(Error::Domain(format!("curve eval order {order} > 3"))),
                })
            }
            CurveKind::Sampled => {
                let s = self.spline.as_ref().unwrap();
                if r < self.domain.0 - 1e-12 || r > self.domain.1 + 1e-12 {
                    return Err(Error::Domain(format!(
                        "sampled curve eval at r = {r} outside [{}, {}]",
                        self.domain.0, self.domain.1
                    )));
                }
                s.eval(r.clamp(self.domain.0, self.domain.1), order)
            }
        }
    }

    /// Serialize as CSV columns (r, f, f', f'').
    pub fn to_csv(&self, n: usize) -> String {
        let (lo, hi) = self.domain;
        let hi = if hi.is_finite() { hi } else { lo + 100.0 };
        let mut out = String::from("r,f,fp,fpp\n");
        let samples: Vec<f64> = match (&self.kind, &self.spline) {
            (CurveKind::Sampled, Some(s)) if s.x.len() <= n => s.x.clone(),
            _ => (0..n)
                .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                .collect(),
        };
        for r in samples {
            let f = self.eval(r, 0).unwrap_or(f64::NAN);
            let fp = self.eval(r, 1).unwrap_or(f64::NAN);
            let fpp = self.eval(r, 2).unwrap_or(f64::NAN);
            out.push_str(&format!("{r},{f},{fp},{fpp}\n"));
        }
        out
    }
}

fn catenoid_eval(k: f64, b: f64, r: f64, order: usize) -> Result<f64> {
    if r < k {
        return Err(Error::Domain(format!(
            "catenoid graph undefined for r = {r} < k = {k}"
        )));
    }
    let s2 = r * r - k * k;
    match order {
        0 => {
            // arccosh(r/k) = ln(r/k + sqrt((r/k)² - 1))
            let x = r / k;
            Ok(k * (x + (x * x - 1.0).sqrt()).ln() + b)
        }
        1 => Ok(k / s2.sqrt()),
        2 => Ok(-k * r / (s2 * s2.sqrt())),
        3 => Ok(k * (2.0 * r * r + k * k) / (s2 * s2 * s2.sqrt())),
        _ => Err(Error::Domain(format!("curve eval order {order} > 3"))),
    }
}

/// Natural C² cubic spline with a smoothed piecewise-constant third
/// derivative. The spline's f'' is piecewise linear, so f''' is piecewise
/// constant; a 5-interval moving average tames its jumps (the third
/// derivative only enters small correction terms downstream).
#[derive(Debug, Clone)]
pub struct Spline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
    /// Smoothed third derivative per interval.
    d3: Vec<f64>,
}

impl Spline {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 4 {
            return Err(Error::Domain(format!(
                "spline needs >= 4 samples of equal length (got {} / {})",
                x.len(),
                y.len()
            )));
        }
        for w in x.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Domain(
                    "spline abscissae must be strictly increasing".into(),
                ));
            }
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("spline values must be finite".into()));
        }
        let n = x.len();
        // Tridiagonal system for natural spline second derivatives.
        let mut a = vec![0.0; n];
        let mut bdiag = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        bdiag[0] = 1.0;
        bdiag[n - 1] = 1.0;
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            a[i] = h0 / 6.0;
            bdiag[i] = (h0 + h1) / 3.0;
            c[i] = h1 / 6.0;
            rhs[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
        }
        // Thomas algorithm.
        let mut cp = vec![0.0; n];
        let mut dp = vec![0.0; n];
        cp[0] = c[0] / bdiag[0];
        dp[0] = rhs[0] / bdiag[0];
        for i in 1..n {
            let denom = bdiag[i] - a[i] * cp[i - 1];
            cp[i] = c[i] / denom;
            dp[i] = (rhs[i] - a[i] * dp[i - 1]) / denom;
        }
        let mut m = vec![0.0; n];
        m[n - 1] = dp[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = dp[i] - cp[i] * m[i + 1];
        }
        // Raw third derivative per interval, then 5-interval average.
        let raw: Vec<f64> = (0..n - 1)
            .map(|i| (m[i + 1] - m[i]) / (x[i + 1] - x[i]))
            .collect();
        let ni = raw.len();
        let mut d3 = vec![0.0; ni];
        for (i, d) in d3.iter_mut().enumerate() {
            let lo = i.saturating_sub(2);
            let hi = (i + 2).min(ni - 1);
            let mut acc = 0.0;
            for item in raw.iter().take(hi + 1).skip(lo) {
                acc += item;
            }
            *d = acc / (hi - lo + 1) as f64;
        }
        Ok(Spline { x, y, m, d3 })
    }

    fn interval(&self, q: f64) -> usize {
        match self.x.binary_search_by(|v| v.partial_cmp(&q).unwrap()) {
            Ok(i) => i.min(self.x.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.x.len() - 2),
        }
    }

    pub fn eval(&self, q: f64, order: usize) -> Result<f64> {
        let i = self.interval(q);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - q) / h;
        let b = (q - self.x[i]) / h;
        match order {
            0 => Ok(a * self.y[i]
                + b * self.y[i + 1]
                + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0),
            1 => Ok((self.y[i + 1] - self.y[i]) / h
                + ((3.0 * b * b - 1.0) * self.m[i + 1] - (3.0 * a * a - 1.0) * self.m[i]) * h
                    / 6.0),
            2 => Ok(a * self.m[i] + b * self.m[i + 1]),
            3 => Ok(self.d3[i]),
            _ => Err(Error::Domain(format!("spline eval order {order} > 3"))),
        }
    }
}

/// Growth-rate fit: least squares of `f(r)` against `k ln r + c` over a
/// window. Returns `(k, c, rms misfit, short_window_warning)`.
pub fn fit_log_tail(curve: &NodalCurve, window: (f64, f64)) -> Result<(f64, f64, f64, bool)> {
    let (lo, hi) = window;
    let (dlo, dhi) = curve.domain();
    if !(lo >= dlo - 1e-9 && hi <= dhi + 1e-9 && hi > lo) {
        return Err(Error::Domain(format!(
            "fit window [{lo}, {hi}] outside curve domain [{dlo}, {dhi}]"
        )));
    }
    let warning = hi < 10.0 * lo;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    if let (CurveKind::Sampled, Some(s)) = (&curve.kind, &curve.spline) {
        // Sampled curves: fit the stored samples (spline-free, exact there).
        for (x, y) in s.x.iter().zip(&s.y) {
            if *x >= lo && *x <= hi {
                xs.push(x.ln());
                ys.push(*y);
            }
        }
    }
    if xs.len() < 8 {
        xs.clear();
        ys.clear();
        let n = 256;
        for i in 0..n {
            let r = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            xs.push(r.ln());
            ys.push(curve.eval(r, 0)?);
        }
    }
    let (k, c, rms) = crate::util::linear_fit(&xs, &ys);
    Ok((k, c, rms, warning))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn constants() -> Constants {
        Constants::get()
    }

    #[test]
    fn catenoid_apex_value() {
        let c = NodalCurve::catenoid(2.0, 0.5).unwrap();
        assert!((c.eval(2.0, 0).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn catenoid_closed_form_point() {
        // f(4) = 2 arccosh(2) for k = 2, b = 0.
        let c = NodalCurve::catenoid(2.0, 0.0).unwrap();
        let v = c.eval(4.0, 0).unwrap();
        assert!((v - 2.6339157938496336).abs() < 1e-12, "f(4) = {v:.12}");
        let fp = c.eval(4.0, 1).unwrap();
        assert!((fp - 2.0 / 12.0f64.sqrt()).abs() < 1e-14);
        assert!(fp > 0.0);
    }

    #[test]
    fn catenoid_rejects_left_of_waist() {
        let c = NodalCurve::catenoid(2.0, 0.0).unwrap();
        assert!(c.eval(1.5, 0).is_err());
        assert!(NodalCurve::catenoid(-1.0, 0.0).is_err());
    }

    #[test]
    fn catenoid_slope_times_r_tends_to_k() {
        let k = 3.0;
        let c = NodalCurve::catenoid(k, 0.0).unwrap();
        let r = 1e6 * k;
        let v = r * c.eval(r, 1).unwrap();
        assert!((v - k).abs() < 1e-6, "r f' = {v}");
    }

    #[test]
    fn catenoid_derivatives_match_finite_differences() {
        let c = NodalCurve::catenoid(2.0, 1.0).unwrap();
        let r = 5.0;
        let h = 1e-5;
        for order in 1..=2usize {
            let fd =
                (c.eval(r + h, order - 1).unwrap() - c.eval(r - h, order - 1).unwrap()) / (2.0 * h);
            let an = c.eval(r, order).unwrap();
            assert!((fd - an).abs() < 1e-7, "order {order}: {fd} vs {an}");
        }
        let fd3 = (c.eval(r + h, 2).unwrap() - c.eval(r - h, 2).unwrap()) / (2.0 * h);
        assert!((fd3 - c.eval(r, 3).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn toda_curve_has_flat_apex() {
        let c = NodalCurve::toda(0.1, constants()).unwrap();
        assert!((c.eval(0.0, 1).unwrap()).abs() < 1e-14);
        assert!(!c.apex_on_r_axis());
        assert!(c.eval(5.0, 1).unwrap() >= 0.0);
    }

    #[test]
    fn sampled_spline_reproduces_smooth_function() {
        let xs: Vec<f64> = (0..200).map(|i| 1.0 + 0.05 * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| (x / 3.0).sin()).collect();
        let c = NodalCurve::from_samples(xs, ys).unwrap();
        for i in 0..50 {
            let r = 1.5 + 0.15 * i as f64;
            let err = (c.eval(r, 0).unwrap() - (r / 3.0).sin()).abs();
            assert!(err < 1e-5, "spline err {err:.2e} at {r}");
            let errp = (c.eval(r, 1).unwrap() - (r / 3.0).cos() / 3.0).abs();
            assert!(errp < 1e-3);
        }
    }

    #[test]
    fn sampled_requires_monotone_abscissae() {
        assert!(NodalCurve::from_samples(vec![0.0, 1.0, 1.0, 2.0], vec![0.0; 4]).is_err());
        assert!(
            NodalCurve::from_samples(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 1.0, f64::NAN, 2.0])
                .is_err()
        );
    }

    #[test]
    fn log_fit_recovers_exact_log_curve() {
        let xs: Vec<f64> = (0..500).map(|i| 10.0 + i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| 3.0 * x.ln() + 1.0).collect();
        let c = NodalCurve::from_samples(xs, ys).unwrap();
        let (k, off, rms, warn) = fit_log_tail(&c, (10.0, 500.0)).unwrap();
        assert!((k - 3.0).abs() < 1e-6);
        assert!((off - 1.0).abs() < 1e-5);
        assert!(rms < 1e-6);
        assert!(!warn);
    }

    #[test]
    fn log_fit_flags_short_windows() {
        let c = NodalCurve::catenoid(2.0, 0.0).unwrap();
        let (_, _, _, warn) = fit_log_tail(&c, (20.0, 60.0)).unwrap();
        assert!(warn);
    }

    #[test]
    fn log_fit_on_catenoid_tail() {
        // k arccosh(r/k) ≈ k ln(2r/k) for large r.
        let c = NodalCurve::catenoid(6.0, 0.0).unwrap();
        let (k, _, _, _) = fit_log_tail(&c, (60.0, 600.0)).unwrap();
        assert!((k - 6.0).abs() < 2e-2, "fit k = {k}");
        // far window: the arccosh tail is within its log asymptote to O(k²/r²)
        let (k_far, _, _, _) = fit_log_tail(&c, (1e3, 1e4)).unwrap();
        assert!((k_far - 6.0).abs() < 1e-3, "far fit k = {k_far}");
    }

    #[test]
    fn log_fit_on_toda_tail_gives_sqrt2() {
        let c = NodalCurve::toda(0.05, constants()).unwrap();
        let (k, _, _, _) = fit_log_tail(&c, (1e3, 1e4)).unwrap();
        assert!((k - SQRT_2).abs() < 1e-2, "fit k = {k}");
    }
}
