//! Rate-distortion solver: `R(Δ) = min I(V;Y)` over reconstruction channels
//! `P(Y|V)` whose induced joint meets the distortion constraint.
//!
//! Both objective terms are convex in the channel (mutual information with
//! the input fixed, and every supported distortion measure), so a Lagrangian
//! sweep traces the exact curve: for each multiplier `lambda` the inner loop
//! minimizes `I(V;Y) + lambda * d` by damped multiplicative updates on the
//! channel rows, and bisection on `lambda` then pins the requested
//! distortion. A brute-force grid scan over binary channels serves as an
//! independent cross-check on small instances.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distortion::{evaluate, gradient, DistortionMeasure};
use crate::model::CdoSource;
use crate::prob::{compose, log2, mutual_information, sqrt, Channel, JointPmf, Matrix, Pmf};
use crate::{Error, Result};

/// Entries of the working channel never drop below this; multiplicative
/// updates then keep every induced joint strictly positive where it matters.
const CHANNEL_FLOOR: f64 = 1e-290;

/// Internally, a requested distortion of exactly zero is solved at this
/// value: the constraint set `d = 0` has empty interior, while the rate at
/// this distortion differs from the true limit by far less than any
/// reported tolerance (the curve may fall off as fast as `sqrt(delta)`, so
/// the floor must sit well below the square of the tightest rate
/// tolerance).
const DELTA_FLOOR: f64 = 1e-12;

/// Largest multiplier tried when extending the sweep past the grid.
const LAMBDA_MAX: f64 = 1.1e9; // 2^30

/// Relative jitter applied to restarted initial channels.
const RESTART_JITTER: f64 = 1e-3;

// ---------------------------------------------------------------------------
// Options and results
// ---------------------------------------------------------------------------

/// Tuning knobs for the Lagrangian sweep.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Strictly increasing multipliers swept before bisection.
    pub lambda_grid: Vec<f64>,
    /// Iteration cap for one inner minimization.
    pub max_iters: usize,
    /// Stop the inner loop once the objective improves by less than this.
    pub obj_tol: f64,
    /// Initial step fraction; halved whenever a step fails to decrease
    /// the objective.
    pub inner_damping: f64,
    /// Number of independent starts (uniform, then jittered) per multiplier.
    pub restarts: usize,
    /// Seed for the jittered restarts.
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        // 64 geometric points spanning 2^-10 .. 2^10.
        let lambda_grid = (0..64)
            .map(|i| libm::exp2(-10.0 + 20.0 * i as f64 / 63.0))
            .collect();
        SolverOptions {
            lambda_grid,
            max_iters: 20_000,
            obj_tol: 1e-10,
            inner_damping: 1.0,
            restarts: 3,
            seed: 0,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.obj_tol <= 0.0 {
            return Err(Error::OutOfRange {
                what: "obj_tol",
                value: self.obj_tol,
            });
        }
        if !(0.0 < self.inner_damping && self.inner_damping <= 1.0) {
            return Err(Error::OutOfRange {
                what: "inner_damping",
                value: self.inner_damping,
            });
        }
        if self.lambda_grid.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut prev = 0.0;
        for &l in &self.lambda_grid {
            if l <= prev {
                return Err(Error::OutOfRange {
                    what: "lambda_grid (must be positive and strictly increasing)",
                    value: l,
                });
            }
            prev = l;
        }
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::OutOfRange {
                what: "restarts/max_iters",
                value: 0.0,
            });
        }
        Ok(())
    }
}

/// One solved point of the rate-distortion curve.
#[derive(Debug, Clone)]
pub struct RdPoint {
    /// The requested distortion bound.
    pub delta: f64,
    /// Achieved rate in bits per letter.
    pub rate: f64,
    /// Multiplier at which the point was found (0 for zero-rate points).
    pub lambda: f64,
    /// The achieving reconstruction channel `P(Y|V)`.
    pub channel: Channel,
    /// False when some inner minimization hit its iteration cap.
    pub converged: bool,
}

/// A rate-distortion curve: points sorted by distortion with
/// non-increasing, convex rates.
#[derive(Debug, Clone)]
pub struct RdCurve {
    points: Vec<RdPoint>,
}

impl RdCurve {
    pub fn points(&self) -> &[RdPoint] {
        &self.points
    }
}

/// Outcome of one inner Lagrangian minimization.
#[derive(Debug, Clone)]
pub struct LagrangianSolution {
    pub channel: Channel,
    pub rate: f64,
    pub distortion: f64,
    pub objective: f64,
    pub converged: bool,
}

// ---------------------------------------------------------------------------
// Induced joints
// ---------------------------------------------------------------------------

/// The joints `(P_VY, P_XY)` induced by a reconstruction channel.
///
/// `P_XY(x, y) = sum_v P_XV(x, v) c(y|v)`, where `P_XV` couples the state
/// with the encoder's observation: the diagonal prior in visible mode, the
/// state-outcome joint in hidden mode (the reconstruction is then driven by
/// the same outcome letter the distortion references).
pub fn induced_joints(s: &CdoSource, c: &Channel) -> Result<(JointPmf, JointPmf)> {
    let view = s.view();
    if c.num_inputs() != view.v_size {
        return Err(Error::LengthMismatch {
            expected: view.v_size,
            got: c.num_inputs(),
        });
    }
    let p_xv = compose(s.prior(), &view.v_channel)?;
    let p_v = p_xv.col_marginal();
    let pvy = compose(&p_v, c)?;

    let mut m = Matrix::zeros(s.num_states(), c.num_outputs());
    for x in 0..s.num_states() {
        for y in 0..c.num_outputs() {
            let mut acc = 0.0;
            for v in 0..view.v_size {
                acc += p_xv.prob(x, v) * c.prob(v, y);
            }
            m[(x, y)] = acc;
        }
    }
    Ok((pvy, JointPmf::new(m)?))
}

// ---------------------------------------------------------------------------
// Inner Lagrangian minimization
// ---------------------------------------------------------------------------

struct Problem<'a> {
    source: &'a CdoSource,
    measure: &'a DistortionMeasure,
    /// Joint of state and observation, `M x V`.
    p_xv: JointPmf,
    /// Observation marginal, length `V`.
    p_v: Pmf,
    n_y: usize,
}

impl<'a> Problem<'a> {
    fn new(source: &'a CdoSource, measure: &'a DistortionMeasure) -> Result<Self> {
        let view = source.view();
        let p_xv = compose(source.prior(), &view.v_channel)?;
        let p_v = p_xv.col_marginal();
        Ok(Problem {
            source,
            measure,
            p_xv,
            p_v,
            n_y: measure.output_size(source),
        })
    }

    fn n_v(&self) -> usize {
        self.p_v.len()
    }

    fn joints(&self, c: &Channel) -> Result<(JointPmf, JointPmf)> {
        let pvy = compose(&self.p_v, c)?;
        let mut m = Matrix::zeros(self.p_xv.rows(), self.n_y);
        for x in 0..self.p_xv.rows() {
            for y in 0..self.n_y {
                let mut acc = 0.0;
                for v in 0..self.n_v() {
                    acc += self.p_xv.prob(x, v) * c.prob(v, y);
                }
                m[(x, y)] = acc;
            }
        }
        Ok((pvy, JointPmf::new(m)?))
    }

    fn objective(&self, lambda: f64, pvy: &JointPmf, pxy: &JointPmf) -> Result<(f64, f64, f64)> {
        let rate = mutual_information(pvy).max(0.0);
        let dist = evaluate(self.measure, self.source, pxy)?;
        Ok((rate + lambda * dist, rate, dist))
    }
}

fn floor_rows(m: &mut Matrix) {
    let (rows, cols) = m.shape();
    for v in 0..rows {
        let mut sum = 0.0;
        for y in 0..cols {
            let e = m[(v, y)].max(CHANNEL_FLOOR);
            m[(v, y)] = e;
            sum += e;
        }
        for y in 0..cols {
            m[(v, y)] /= sum;
        }
    }
}

fn initial_channel(n_v: usize, n_y: usize, restart: usize, seed: u64) -> Channel {
    let mut m = Matrix::zeros(n_v, n_y);
    let base = 1.0 / n_y as f64;
    if restart == 0 {
        for v in 0..n_v {
            for y in 0..n_y {
                m[(v, y)] = base;
            }
        }
    } else {
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed.wrapping_add(restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        for v in 0..n_v {
            for y in 0..n_y {
                let u: f64 = rng.gen::<f64>() * 2.0 - 1.0;
                m[(v, y)] = base * (1.0 + RESTART_JITTER * u);
            }
        }
    }
    floor_rows(&mut m);
    Channel::new(m).expect("rows normalized by construction")
}

/// One damped multiplicative descent from a given starting channel.
fn minimize_from(
    prob: &Problem,
    lambda: f64,
    start: Channel,
    opts: &SolverOptions,
    mut trace: Option<&mut Vec<f64>>,
) -> Result<LagrangianSolution> {
    let n_v = prob.n_v();
    let n_y = prob.n_y;
    let mut c = start;
    let (mut pvy, mut pxy) = prob.joints(&c)?;
    let (mut f, mut rate, mut dist) = prob.objective(lambda, &pvy, &pxy)?;
    if let Some(t) = trace.as_deref_mut() {
        t.push(f);
    }

    let mut converged = false;
    let mut small_steps = 0u32;
    for _ in 0..opts.max_iters {
        let q = pvy.col_marginal();
        let grad = gradient(prob.measure, prob.source, &pxy)?;

        // Conditional expected distortion slope per (observation, output):
        // dtil(v, y) = sum_x P(x|v) * dd/dpxy(x, y).
        let mut dtil = Matrix::zeros(n_v, n_y);
        for v in 0..n_v {
            let pv = prob.p_v.prob(v);
            if pv <= 0.0 {
                continue;
            }
            for y in 0..n_y {
                let mut acc = 0.0;
                for x in 0..prob.p_xv.rows() {
                    acc += prob.p_xv.prob(x, v) * grad[(x, y)];
                }
                dtil[(v, y)] = (acc / pv).clamp(-1e15, 1e15);
            }
        }

        // Candidate: per row, c(y|v) proportional to q(y) * 2^(-lambda*dtil).
        let mut cand = Matrix::zeros(n_v, n_y);
        for v in 0..n_v {
            let mut emax = f64::NEG_INFINITY;
            for y in 0..n_y {
                emax = emax.max(-lambda * dtil[(v, y)]);
            }
            for y in 0..n_y {
                cand[(v, y)] = q.prob(y) * libm::exp2(-lambda * dtil[(v, y)] - emax);
            }
        }
        floor_rows(&mut cand);

        // Damped acceptance: move toward the candidate, halving the step
        // until the objective decreases. The candidate minimizes a strictly
        // convex surrogate whose gradient matches the objective's on the
        // simplex, so it always points downhill.
        let mut t = opts.inner_damping;
        let mut accepted = false;
        while t > 1e-9 {
            let mut m = Matrix::zeros(n_v, n_y);
            for v in 0..n_v {
                for y in 0..n_y {
                    let old = c.prob(v, y);
                    m[(v, y)] = old + t * (cand[(v, y)] - old);
                }
            }
            floor_rows(&mut m);
            let c_new = Channel::new(m).expect("rows normalized by construction");
            let (pvy_new, pxy_new) = prob.joints(&c_new)?;
            let (f_new, rate_new, dist_new) = prob.objective(lambda, &pvy_new, &pxy_new)?;
            if f_new < f {
                let delta_f = f - f_new;
                c = c_new;
                pvy = pvy_new;
                pxy = pxy_new;
                f = f_new;
                rate = rate_new;
                dist = dist_new;
                accepted = true;
                if let Some(tr) = trace.as_deref_mut() {
                    tr.push(f);
                }
                if delta_f < opts.obj_tol {
                    small_steps += 1;
                } else {
                    small_steps = 0;
                }
                break;
            }
            t *= 0.5;
        }
        if !accepted || small_steps >= 4 {
            // Either no step length decreases the objective (stationary
            // point) or progress has flattened out for good.
            converged = true;
            break;
        }
    }

    Ok(LagrangianSolution {
        channel: c,
        rate,
        distortion: dist,
        objective: f,
        converged,
    })
}

/// Approximately minimize `I(V;Y) + lambda * d` over reconstruction
/// channels; best of `opts.restarts` starts. Non-convergence is reported
/// through the flag, not as an error.
pub fn lagrangian_minimize(
    s: &CdoSource,
    m: &DistortionMeasure,
    lambda: f64,
    opts: &SolverOptions,
) -> Result<LagrangianSolution> {
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::OutOfRange {
            what: "lambda",
            value: lambda,
        });
    }
    opts.validate()?;
    let prob = Problem::new(s, m)?;
    let mut best: Option<LagrangianSolution> = None;
    for r in 0..opts.restarts {
        let start = initial_channel(prob.n_v(), prob.n_y, r, opts.seed);
        let sol = minimize_from(&prob, lambda, start, opts, None)?;
        let better = match &best {
            None => true,
            Some(b) => sol.objective < b.objective,
        };
        if better {
            best = Some(sol);
        }
    }
    Ok(best.expect("at least one restart"))
}

// ---------------------------------------------------------------------------
// Zero-rate anchor
// ---------------------------------------------------------------------------

/// The smallest distortion achievable at rate zero, together with the
/// output distribution achieving it. At rate zero the induced joint is the
/// product `P_X x q`, so the minimum over `q` has a closed form for every
/// supported measure.
pub fn zero_rate_distortion(s: &CdoSource, m: &DistortionMeasure) -> (f64, Pmf) {
    let n_y = m.output_size(s);
    match m {
        DistortionMeasure::BhattacharyyaWootters => {
            // Maximize sum_z sqrt(q(z)) * w(z) with
            // w(z) = sum_x sqrt(P_X(x) P_XZ(x, z)): optimal q is w^2 normalized.
            let p_xz = s.joint_xz();
            let mut w = vec![0.0; n_y];
            let mut total = 0.0;
            for (z, wz) in w.iter_mut().enumerate() {
                for x in 0..s.num_states() {
                    *wz += sqrt(s.prior().prob(x) * p_xz.prob(x, z));
                }
                total += *wz * *wz;
            }
            let q = Pmf::normalized(w.iter().map(|&x| x * x).collect())
                .unwrap_or_else(|_| Pmf::uniform(n_y));
            ((1.0 - total).max(0.0), q)
        }
        DistortionMeasure::InformationalDivergence => {
            // d(P_X x q) = I(X;Z) + D(P_Z || q), minimized at q = P_Z.
            let q = s.joint_xz().col_marginal();
            (s.mi_lower_bound(), q)
        }
        DistortionMeasure::ExpectedLetter(cost) => {
            // Point mass on the cheapest output column.
            let mut best_y = 0;
            let mut best = f64::INFINITY;
            for y in 0..n_y {
                let mean: f64 = (0..s.num_states())
                    .map(|x| s.prior().prob(x) * cost[(x, y)])
                    .sum();
                if mean < best {
                    best = mean;
                    best_y = y;
                }
            }
            let mut q = vec![0.0; n_y];
            q[best_y] = 1.0;
            (best, Pmf::new(q).expect("point mass"))
        }
    }
}

fn constant_channel(n_v: usize, q: &Pmf) -> Channel {
    let rows: Vec<Vec<f64>> = (0..n_v).map(|_| q.as_slice().to_vec()).collect();
    Channel::from_rows(&rows).expect("rows copy a pmf")
}

// ---------------------------------------------------------------------------
// solve_point / solve_curve
// ---------------------------------------------------------------------------

/// Compute one point `R(delta)` by sweeping the multiplier grid and
/// bisecting between the bracketing multipliers.
pub fn solve_point(
    s: &CdoSource,
    m: &DistortionMeasure,
    delta: f64,
    opts: &SolverOptions,
) -> Result<RdPoint> {
    if delta < 0.0 || !delta.is_finite() {
        return Err(Error::OutOfRange {
            what: "delta",
            value: delta,
        });
    }
    opts.validate()?;
    let target = delta.max(DELTA_FLOOR);

    let (d_zero, q_star) = zero_rate_distortion(s, m);
    let n_v = s.view().v_size;
    if target + 1e-12 >= d_zero {
        return Ok(RdPoint {
            delta,
            rate: 0.0,
            lambda: 0.0,
            channel: constant_channel(n_v, &q_star),
            converged: true,
        });
    }

    // Sweep upward until the constraint is met; the first feasible
    // multiplier has the smallest rate among feasible grid points.
    let mut lo = 0.0;
    let mut hi: Option<(f64, LagrangianSolution)> = None;
    let mut min_dist = d_zero;
    for &lambda in &opts.lambda_grid {
        let sol = lagrangian_minimize(s, m, lambda, opts)?;
        min_dist = min_dist.min(sol.distortion);
        if sol.distortion <= target {
            hi = Some((lambda, sol));
            break;
        }
        lo = lambda;
    }
    if hi.is_none() {
        // Extend geometrically past the grid before giving up.
        let mut lambda = opts.lambda_grid.last().copied().unwrap_or(1.0);
        while hi.is_none() && lambda < LAMBDA_MAX {
            lambda *= 2.0;
            let sol = lagrangian_minimize(s, m, lambda, opts)?;
            min_dist = min_dist.min(sol.distortion);
            if sol.distortion <= target {
                hi = Some((lambda, sol));
            } else {
                lo = lambda;
            }
        }
    }
    let (mut hi_lambda, mut hi_sol) = match hi {
        Some(h) => h,
        None => {
            return Err(Error::InfeasibleDelta {
                delta,
                min_distortion: min_dist,
            })
        }
    };

    // Bisect toward the constraint boundary; keep the feasible endpoint.
    // The distortion tolerance tightens proportionally for very small
    // targets, where the absolute 1e-6 window would span the whole
    // constraint range and stop refinement before it starts.
    let d_tol = (0.05 * target).min(1e-6);
    for _ in 0..64 {
        if target - hi_sol.distortion <= d_tol {
            break;
        }
        let mid = if lo > 0.0 {
            sqrt(lo * hi_lambda)
        } else {
            hi_lambda * 0.5
        };
        if !(mid > lo && mid < hi_lambda) {
            break;
        }
        let sol = lagrangian_minimize(s, m, mid, opts)?;
        if sol.distortion <= target {
            let rate_change = (hi_sol.rate - sol.rate).abs();
            hi_lambda = mid;
            hi_sol = sol;
            if rate_change <= 1e-6 {
                break;
            }
        } else {
            lo = mid;
        }
    }

    Ok(RdPoint {
        delta,
        rate: hi_sol.rate.max(0.0),
        lambda: hi_lambda,
        channel: hi_sol.channel,
        converged: hi_sol.converged,
    })
}

/// Solve a sorted list of distortion values and enforce the curve
/// invariants (non-increasing, convex) on the collected rates.
pub fn solve_curve(
    s: &CdoSource,
    m: &DistortionMeasure,
    deltas: &[f64],
    opts: &SolverOptions,
) -> Result<RdCurve> {
    if deltas.is_empty() {
        return Err(Error::EmptyInput);
    }
    for w in deltas.windows(2) {
        if w[1] < w[0] {
            return Err(Error::OutOfRange {
                what: "deltas (must be sorted ascending)",
                value: w[1],
            });
        }
    }
    let mut points = Vec::with_capacity(deltas.len());
    for &d in deltas {
        points.push(solve_point(s, m, d, opts)?);
    }

    // Project the rates onto their lower convex envelope, then clamp to
    // non-increasing. Solved points already sit on a convex curve up to
    // solver wobble, so this only removes numerical noise.
    let rates: Vec<f64> = points.iter().map(|p| p.rate).collect();
    let projected = lower_envelope(deltas, &rates);
    for (p, r) in points.iter_mut().zip(projected) {
        p.rate = r;
    }
    for i in 1..points.len() {
        if points[i].rate > points[i - 1].rate {
            points[i].rate = points[i - 1].rate;
        }
    }
    Ok(RdCurve { points })
}

/// Lower convex envelope values of `(x, y)` points with ascending `x`.
fn lower_envelope(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n <= 2 {
        return y.to_vec();
    }
    // Monotone-chain lower hull over distinct x; ties keep the lower y.
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(n);
    for i in 0..n {
        let p = (x[i], y[i]);
        if let Some(last) = hull.last_mut() {
            if (last.0 - p.0).abs() == 0.0 {
                if p.1 < last.1 {
                    *last = p;
                }
                continue;
            }
        }
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    // Evaluate the hull at each x by linear interpolation.
    let mut out = Vec::with_capacity(n);
    let mut seg = 0;
    for i in 0..n {
        while seg + 1 < hull.len() && hull[seg + 1].0 < x[i] {
            seg += 1;
        }
        let v = if seg + 1 >= hull.len() || hull[seg].0 == x[i] {
            if x[i] >= hull[hull.len() - 1].0 {
                hull[hull.len() - 1].1
            } else {
                hull[seg].1
            }
        } else {
            let (x0, y0) = hull[seg];
            let (x1, y1) = hull[seg + 1];
            y0 + (y1 - y0) * (x[i] - x0) / (x1 - x0)
        };
        out.push(v.min(y[i]));
    }
    out
}

// ---------------------------------------------------------------------------
// Brute-force oracle
// ---------------------------------------------------------------------------

/// Exhaustive scan over binary reconstruction channels: returns the
/// smallest `I(V;Y)` among channels with distortion at most `delta + step`
/// (the slack absorbs grid resolution), or `+inf` if none qualifies.
///
/// Restricted to at most two observation letters and exactly two outputs;
/// everything is recomputed from first principles so the scan is an
/// independent check on the solver.
pub fn grid_oracle(
    s: &CdoSource,
    m: &DistortionMeasure,
    delta: f64,
    step: f64,
) -> Result<f64> {
    let view = s.view();
    let n_v = view.v_size;
    let n_y = m.output_size(s);
    if n_v > 2 {
        return Err(Error::AlphabetTooLarge {
            what: "observation",
            size: n_v,
            max: 2,
        });
    }
    if n_y != 2 {
        return Err(Error::AlphabetTooLarge {
            what: "reconstruction",
            size: n_y,
            max: 2,
        });
    }
    if !(step > 0.0 && step <= 1e-2) {
        return Err(Error::OutOfRange {
            what: "step",
            value: step,
        });
    }

    let p_xv = compose(s.prior(), &view.v_channel)?;
    let p_v = p_xv.col_marginal();
    let n_x = s.num_states();
    let p_xz = s.joint_xz();

    let steps = libm::round(1.0 / step) as usize;
    let grid = |k: usize| k as f64 / steps as f64;

    let mut best = f64::INFINITY;
    let mut row1_range = 0..=steps;
    if n_v == 1 {
        row1_range = 0..=0;
    }
    for k1 in row1_range {
        for k0 in 0..=steps {
            let rows = [
                [grid(k0), 1.0 - grid(k0)],
                [grid(k1), 1.0 - grid(k1)],
            ];

            // Induced joints, written out directly.
            let mut q = [0.0f64; 2];
            for v in 0..n_v {
                for y in 0..2 {
                    q[y] += p_v.prob(v) * rows[v][y];
                }
            }
            let mut pxy = [[0.0f64; 2]; 4];
            for (x, row) in pxy.iter_mut().enumerate().take(n_x) {
                for (y, cell) in row.iter_mut().enumerate() {
                    for v in 0..n_v {
                        *cell += p_xv.prob(x, v) * rows[v][y];
                    }
                }
            }

            // Distortion from the definition of each measure.
            let dist = match m {
                DistortionMeasure::BhattacharyyaWootters => {
                    let mut ov = 0.0;
                    for (x, row) in pxy.iter().enumerate().take(n_x) {
                        for (z, &cell) in row.iter().enumerate() {
                            ov += sqrt(p_xz.prob(x, z) * cell);
                        }
                    }
                    1.0 - ov * ov
                }
                DistortionMeasure::InformationalDivergence => {
                    let mut d = 0.0;
                    'outer: for (x, row) in pxy.iter().enumerate().take(n_x) {
                        let px = row[0] + row[1];
                        for (z, &cell) in row.iter().enumerate() {
                            let r = px * s.measurement().prob(x, z);
                            if r > 0.0 {
                                if cell <= 0.0 {
                                    d = f64::INFINITY;
                                    break 'outer;
                                }
                                d += r * log2(r / cell);
                            }
                        }
                    }
                    d
                }
                DistortionMeasure::ExpectedLetter(cost) => {
                    let mut d = 0.0;
                    for (x, row) in pxy.iter().enumerate().take(n_x) {
                        for (y, &cell) in row.iter().enumerate() {
                            d += cell * cost[(x, y)];
                        }
                    }
                    d
                }
            };
            if dist > delta + step {
                continue;
            }

            // I(V;Y) from the definition.
            let mut mi = 0.0;
            for v in 0..n_v {
                for (y, &qy) in q.iter().enumerate() {
                    let p = p_v.prob(v) * rows[v][y];
                    if p > 0.0 && qy > 0.0 {
                        mi += p * log2(p / (p_v.prob(v) * qy));
                    }
                }
            }
            if mi < best {
                best = mi;
            }
        }
    }
    Ok(best.max(0.0))
}

// ---------------------------------------------------------------------------
// Classical special case
// ---------------------------------------------------------------------------

/// Rate-distortion function of a plain discrete memoryless source under a
/// letter-to-letter cost matrix, solved through the same machinery with a
/// synthetic visible source.
pub fn classical_rd(
    px: &Pmf,
    letter: &Matrix,
    delta: f64,
    opts: &SolverOptions,
) -> Result<f64> {
    if letter.rows() != px.len() {
        return Err(Error::LengthMismatch {
            expected: px.len(),
            got: letter.rows(),
        });
    }
    let n_y = letter.cols();
    // The measurement channel is irrelevant to the expected-letter measure;
    // any valid channel with the right shape works.
    let uniform_rows: Vec<Vec<f64>> = (0..px.len())
        .map(|_| vec![1.0 / n_y as f64; n_y])
        .collect();
    let s = CdoSource::new(
        px.clone(),
        Channel::from_rows(&uniform_rows)?,
        crate::model::Mode::Visible,
    )?;
    let m = DistortionMeasure::ExpectedLetter(letter.clone());
    Ok(solve_point(&s, &m, delta, opts)?.rate)
}
