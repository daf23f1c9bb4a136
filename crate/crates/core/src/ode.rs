//! Adaptive Dormand-Prince 8(5,3) integration of planar linear systems.
//!
//! Breakpoints (jumps or kinks of the coefficients) are always step
//! endpoints, and right-hand sides are evaluated strictly inside the current
//! step so one-sided limits are used at discontinuities.

use crate::error::{Error, Result};

pub type State = [f64; 2];

pub trait PlanarSystem {
    fn rhs(&self, x: f64, y: State) -> State;

    /// Upper bound on the step size near `x`.
    fn max_step(&self, _x: f64) -> f64 {
        f64::INFINITY
    }
}

impl<S: PlanarSystem + ?Sized> PlanarSystem for &S {
    fn rhs(&self, x: f64, y: State) -> State {
        (**self).rhs(x, y)
    }

    fn max_step(&self, x: f64) -> f64 {
        (**self).max_step(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    /// Relative tolerance on the Euclidean norm of the state.
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-300,
            max_steps: 2_000_000,
        }
    }
}

/// Accepted nodes of an integration, in integration order.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub xs: Vec<f64>,
    pub ys: Vec<State>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn last(&self) -> (f64, State) {
        let n = self.xs.len() - 1;
        (self.xs[n], self.ys[n])
    }

    fn ascending(&self) -> bool {
        self.xs.len() < 2 || self.xs[1] > self.xs[0]
    }

    /// Solution at `x`, from one step off the nearest accepted node.
    ///
    /// `x` must lie inside the integrated range.
    pub fn eval<S: PlanarSystem>(&self, sys: &S, x: f64) -> State {
        let n = self.xs.len();
        let idx = if self.ascending() {
            self.xs.partition_point(|&k| k <= x)
        } else {
            self.xs.partition_point(|&k| k >= x)
        };
        let (i0, i1) = match idx {
            0 => (0, 0),
            k if k >= n => (n - 1, n - 1),
            k => (k - 1, k),
        };
        let near = if (x - self.xs[i0]).abs() <= (x - self.xs[i1]).abs() {
            i0
        } else {
            i1
        };
        let h = x - self.xs[near];
        if h == 0.0 {
            return self.ys[near];
        }
        dop853_step(sys, self.xs[near], self.ys[near], h).0
    }

    pub fn scale(&mut self, factor: f64) {
        for y in &mut self.ys {
            y[0] *= factor;
            y[1] *= factor;
        }
    }
}

/// Integrates `y' = f(x, y)` from `from` to `to`, stopping at every
/// breakpoint strictly between them.
pub fn integrate<S: PlanarSystem>(
    sys: &S,
    from: f64,
    to: f64,
    y0: State,
    breakpoints: &[f64],
    control: StepControl,
) -> Result<Trajectory> {
    if from == to {
        return Err(Error::Precondition("integration interval is empty".into()));
    }
    if !(y0[0].is_finite() && y0[1].is_finite()) || (y0[0] == 0.0 && y0[1] == 0.0) {
        return Err(Error::Precondition(
            "initial state must be finite and nonzero".into(),
        ));
    }
    let dir = (to - from).signum();
    let mut stops: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&b| (b - from) * dir > 0.0 && (to - b) * dir > 0.0)
        .collect();
    stops.sort_by(|a, b| (a * dir).total_cmp(&(b * dir)));
    stops.push(to);

    let mut traj = Trajectory {
        xs: vec![from],
        ys: vec![y0],
    };
    let (mut x, mut y) = (from, y0);
    let mut h = dir * (1e-3 * (to - from).abs()).min(sys.max_step(from)).max(1e-6);
    let mut steps = 0usize;
    for &stop in &stops {
        while (stop - x) * dir > 0.0 {
            steps += 1;
            if steps > control.max_steps {
                return Err(Error::Stiffness { at: x });
            }
            let limit = sys.max_step(x);
            if h.abs() > limit {
                h = dir * limit;
            }
            let last = (x + h - stop) * dir >= 0.0;
            let step = if last { stop - x } else { h };
            let (y_new, err) = step_with_error(sys, x, y, step, control);
            if !(err.is_finite()) {
                return Err(Error::Stiffness { at: x });
            }
            let fac = (err.powf(1.0 / 8.0) / 0.9).clamp(1.0 / 6.0, 3.0);
            if err <= 1.0 {
                x = if last { stop } else { x + step };
                y = y_new;
                traj.xs.push(x);
                traj.ys.push(y);
                if !last {
                    h = step / fac;
                }
            } else {
                h = step / fac;
                if h.abs() <= 1e-14 * x.abs().max(1.0) {
                    return Err(Error::Stiffness { at: x });
                }
            }
        }
    }
    Ok(traj)
}

fn step_with_error<S: PlanarSystem>(
    sys: &S,
    x: f64,
    y: State,
    h: f64,
    control: StepControl,
) -> (State, f64) {
    let (y_new, err5, err3) = dop853_step(sys, x, y, h);
    let norm = |v: State| (v[0] * v[0] + v[1] * v[1]).sqrt();
    let sk = control.atol + control.rtol * norm(y).max(norm(y_new));
    let e5 = (err5[0] / sk).powi(2) + (err5[1] / sk).powi(2);
    let e3 = (err3[0] / sk).powi(2) + (err3[1] / sk).powi(2);
    let mut deno = e5 + 0.01 * e3;
    if deno <= 0.0 {
        deno = 1.0;
    }
    (y_new, h.abs() * e5 * (1.0 / (2.0 * deno)).sqrt())
}

/// One Dormand-Prince 8(5,3) step; returns the 8th-order update and the
/// unscaled 5th- and 3rd-order error vectors.
pub fn dop853_step<S: PlanarSystem>(sys: &S, x: f64, y: State, h: f64) -> (State, State, State) {
    let (lo, hi) = if h > 0.0 { (x, x + h) } else { (x + h, x) };
    let (lo_in, hi_in) = (lo.next_up(), hi.next_down());
    let at = |c: f64| {
        let t = x + c * h;
        if lo_in <= hi_in {
            t.clamp(lo_in, hi_in)
        } else {
            t
        }
    };
    let mut k = [[0.0f64; 2]; 12];
    for s in 0..12 {
        let mut ys = y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                ys[0] += h * a * kj[0];
                ys[1] += h * a * kj[1];
            }
        }
        k[s] = sys.rhs(at(C[s]), ys);
    }
    let mut y_new = y;
    let mut err5 = [0.0; 2];
    let mut err3 = [0.0; 2];
    for d in 0..2 {
        let mut sum = 0.0;
        let mut e5 = 0.0;
        for s in 0..12 {
            sum += B[s] * k[s][d];
            e5 += ER[s] * k[s][d];
        }
        y_new[d] += h * sum;
        err5[d] = e5;
        err3[d] = sum - BHH[0] * k[0][d] - BHH[1] * k[8][d] - BHH[2] * k[11][d];
    }
    (y_new, err5, err3)
}

const A: [[f64; 11]; 12] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [
        5.26001519587677318785587544488E-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        1.97250569845378994544595329183E-2,
        5.91751709536136983633785987549E-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        2.95875854768068491816892993775E-2,
        0.0,
        8.87627564304205475450678981324E-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        2.41365134159266685502369798665E-1,
        0.0,
        -8.84549479328286085344864962717E-1,
        9.24834003261792003115737966543E-1,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.7037037037037037037037037037E-2,
        0.0,
        0.0,
        1.70828608729473871279604482173E-1,
        1.25467687566822425016691814123E-1,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.7109375E-2,
        0.0,
        0.0,
        1.70252211019544039314978060272E-1,
        6.02165389804559606850219397283E-2,
        -1.7578125E-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.70920001185047927108779319836E-2,
        0.0,
        0.0,
        1.70383925712239993810214054705E-1,
        1.07262030446373284651809199168E-1,
        -1.53194377486244017527936158236E-2,
        8.27378916381402288758473766002E-3,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        6.24110958716075717114429577812E-1,
        0.0,
        0.0,
        -3.36089262944694129406857109825E0,
        -8.68219346841726006818189891453E-1,
        2.75920996994467083049415600797E1,
        2.01540675504778934086186788979E1,
        -4.34898841810699588477366255144E1,
        0.0,
        0.0,
        0.0,
    ],
    [
        4.77662536438264365890433908527E-1,
        0.0,
        0.0,
        -2.48811461997166764192642586468E0,
        -5.90290826836842996371446475743E-1,
        2.12300514481811942347288949897E1,
        1.52792336328824235832596922938E1,
        -3.32882109689848629194453265587E1,
        -2.03312017085086261358222928593E-2,
        0.0,
        0.0,
    ],
    [
        -9.3714243008598732571704021658E-1,
        0.0,
        0.0,
        5.18637242884406370830023853209E0,
        1.09143734899672957818500254654E0,
        -8.14978701074692612513997267357E0,
        -1.85200656599969598641566180701E1,
        2.27394870993505042818970056734E1,
        2.49360555267965238987089396762E0,
        -3.0467644718982195003823669022E0,
        0.0,
    ],
    [
        2.27331014751653820792359768449E0,
        0.0,
        0.0,
        -1.05344954667372501984066689879E1,
        -2.00087205822486249909675718444E0,
        -1.79589318631187989172765950534E1,
        2.79488845294199600508499808837E1,
        -2.85899827713502369474065508674E0,
        -8.87285693353062954433549289258E0,
        1.23605671757943030647266201528E1,
        6.43392746015763530355970484046E-1,
    ],
];
const C: [f64; 12] = [
    0.0,
    0.526001519587677318785587544488E-01,
    0.789002279381515978178381316732E-01,
    0.118350341907227396726757197510E+00,
    0.281649658092772603273242802490E+00,
    0.333333333333333333333333333333E+00,
    0.25E+00,
    0.307692307692307692307692307692E+00,
    0.651282051282051282051282051282E+00,
    0.6E+00,
    0.857142857142857142857142857142E+00,
    1.0,
];
const B: [f64; 12] = [
    5.42937341165687622380535766363E-2,
    0.0,
    0.0,
    0.0,
    0.0,
    4.45031289275240888144113950566E0,
    1.89151789931450038304281599044E0,
    -5.8012039600105847814672114227E0,
    3.1116436695781989440891606237E-1,
    -1.52160949662516078556178806805E-1,
    2.01365400804030348374776537501E-1,
    4.47106157277725905176885569043E-2,
];
const ER: [f64; 12] = [
    0.1312004499419488073250102996E-01,
    0.0,
    0.0,
    0.0,
    0.0,
    -0.1225156446376204440720569753E+01,
    -0.4957589496572501915214079952E+00,
    0.1664377182454986536961530415E+01,
    -0.3503288487499736816886487290E+00,
    0.3341791187130174790297318841E+00,
    0.8192320648511571246570742613E-01,
    -0.2235530786388629525884427845E-01,
];
const BHH: [f64; 3] = [
    0.244094488188976377952755905512E+00,
    0.733846688281611857341361741547E+00,
    0.220588235294117647058823529412E-01,
];

#[cfg(test)]
mod tests {
    use super::*;

    struct Rotation;

    impl PlanarSystem for Rotation {
        fn rhs(&self, _x: f64, y: State) -> State {
            [y[1], -y[0]]
        }
    }

    struct Jump;

    impl PlanarSystem for Jump {
        fn rhs(&self, x: f64, y: State) -> State {
            let k = if x < 1.0 { 1.0 } else { 2.0 };
            [k * y[1], -k * y[0]]
        }
    }

    #[test]
    fn harmonic_rotation_is_accurate() {
        let t = integrate(
            &Rotation,
            0.0,
            20.0,
            [1.0, 0.0],
            &[],
            StepControl::default(),
        )
        .unwrap();
        let (x, y) = t.last();
        assert_eq!(x, 20.0);
        assert!((y[0] - 20f64.cos()).abs() < 1e-10, "{}", y[0] - 20f64.cos());
        assert!((y[1] + 20f64.sin()).abs() < 1e-10);
    }

    #[test]
    fn backward_integration_and_dense_eval() {
        let t = integrate(
            &Rotation,
            3.0,
            -2.0,
            [3f64.cos(), -3f64.sin()],
            &[],
            StepControl::default(),
        )
        .unwrap();
        for &x in &[2.71, 0.0, -1.234] {
            let y = t.eval(&Rotation, x);
            assert!((y[0] - x.cos()).abs() < 1e-11);
        }
    }

    #[test]
    fn breakpoints_are_respected() {
        let t = integrate(&Jump, 0.0, 3.0, [1.0, 0.0], &[1.0], StepControl::default()).unwrap();
        assert!(t.xs.contains(&1.0));
        let (_, y) = t.last();
        let phase: f64 = 1.0 + 2.0 * 2.0;
        assert!((y[0] - phase.cos()).abs() < 1e-10, "{}", y[0] - phase.cos());
    }

    #[test]
    fn tableau_is_consistent() {
        for s in 0..12 {
            let row: f64 = A[s].iter().sum();
            assert!((row - C[s]).abs() < 1e-13, "row {s}");
        }
        assert!((B.iter().sum::<f64>() - 1.0).abs() < 1e-13);
    }
}
