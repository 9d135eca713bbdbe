//! Finitely supported chirality-valued states on ℤ.

use crate::linalg::CVector;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Chirality {
    L,
    R,
}

impl Chirality {
    #[inline]
    pub fn index(self) -> usize {
        match self {
            Chirality::L => 0,
            Chirality::R => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Chirality::L => "L",
            Chirality::R => "R",
        }
    }
}

/// Canonical flat index of `(n, chirality)` inside the window `[0, n0]`.
#[inline]
pub fn flat_index(n: usize, chirality: Chirality) -> usize {
    2 * n + chirality.index()
}

/// A state stored densely on the window `[lo, lo + len)`; zero outside.
///
/// Each site holds `[⟨L|ψ(n), ⟨R|ψ(n)]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WaveState {
    lo: i64,
    amps: Vec<[C64; 2]>,
}

impl WaveState {
    pub fn zero() -> WaveState {
        WaveState::default()
    }

    pub fn from_window(lo: i64, amps: Vec<[C64; 2]>) -> WaveState {
        WaveState { lo, amps }
    }

    /// Zero state stored on `[lo, hi]`.
    pub fn zeros(lo: i64, hi: i64) -> WaveState {
        let len = (hi - lo + 1).max(0) as usize;
        WaveState {
            lo,
            amps: vec![[ZERO; 2]; len],
        }
    }

    pub fn delta(n: i64, chirality: Chirality, value: C64) -> WaveState {
        let mut amp = [ZERO; 2];
        amp[chirality.index()] = value;
        WaveState {
            lo: n,
            amps: vec![amp],
        }
    }

    /// Site `n`, chirality `L` with amplitude one.
    pub fn delta_l(n: i64) -> WaveState {
        WaveState::delta(n, Chirality::L, C64::new(1.0, 0.0))
    }

    pub fn delta_r(n: i64) -> WaveState {
        WaveState::delta(n, Chirality::R, C64::new(1.0, 0.0))
    }

    /// Lower end of the stored window.
    #[inline]
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Upper end of the stored window (`lo - 1` when empty).
    #[inline]
    pub fn hi(&self) -> i64 {
        self.lo + self.amps.len() as i64 - 1
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[[C64; 2]] {
        &self.amps
    }

    #[inline]
    pub fn get(&self, n: i64) -> [C64; 2] {
        let idx = n - self.lo;
        if idx < 0 || idx >= self.amps.len() as i64 {
            [ZERO; 2]
        } else {
            self.amps[idx as usize]
        }
    }

    #[inline]
    pub fn component(&self, n: i64, chirality: Chirality) -> C64 {
        self.get(n)[chirality.index()]
    }

    /// Grows the stored window so that it contains `[lo, hi]`.
    pub fn ensure_window(&mut self, lo: i64, hi: i64) {
        if self.amps.is_empty() {
            *self = WaveState::zeros(lo, hi);
            return;
        }
        if lo < self.lo {
            let extra = (self.lo - lo) as usize;
            let mut amps = vec![[ZERO; 2]; extra];
            amps.append(&mut self.amps);
            self.amps = amps;
            self.lo = lo;
        }
        if hi > self.hi() {
            let extra = (hi - self.hi()) as usize;
            self.amps.extend(std::iter::repeat_n([ZERO; 2], extra));
        }
    }

    pub fn set(&mut self, n: i64, value: [C64; 2]) {
        self.ensure_window(n, n);
        let idx = (n - self.lo) as usize;
        self.amps[idx] = value;
    }

    pub fn set_component(&mut self, n: i64, chirality: Chirality, value: C64) {
        let mut v = self.get(n);
        v[chirality.index()] = value;
        self.set(n, v);
    }

    /// Iterates over the stored window as `(n, [L, R])`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, [C64; 2])> + '_ {
        self.amps
            .iter()
            .enumerate()
            .map(move |(i, v)| (self.lo + i as i64, *v))
    }

    /// Drops exactly-zero sites at both ends of the window.
    pub fn trimmed(&self) -> WaveState {
        let nonzero = |v: &[C64; 2]| v[0] != ZERO || v[1] != ZERO;
        let Some(first) = self.amps.iter().position(nonzero) else {
            return WaveState::zero();
        };
        let last = self.amps.iter().rposition(nonzero).unwrap();
        WaveState {
            lo: self.lo + first as i64,
            amps: self.amps[first..=last].to_vec(),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps
            .iter()
            .map(|v| v[0].norm_sqr() + v[1].norm_sqr())
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// The state restricted to (and stored on) `[lo, hi]`.
    pub fn restrict(&self, lo: i64, hi: i64) -> WaveState {
        let mut out = WaveState::zeros(lo, hi);
        for (i, amp) in out.amps.iter_mut().enumerate() {
            *amp = self.get(lo + i as i64);
        }
        out
    }

    /// l² norm over `[lo, hi]`.
    pub fn window_norm(&self, lo: i64, hi: i64) -> f64 {
        (lo..=hi)
            .map(|n| {
                let v = self.get(n);
                v[0].norm_sqr() + v[1].norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Restriction to `[0, n0]` as a flat vector, index `2n + (0 for L, 1 for R)`.
    pub fn window_vector(&self, n0: usize) -> CVector {
        CVector::from_fn(2 * (n0 + 1), |i, _| self.get((i / 2) as i64)[i % 2])
    }

    /// Inverse of [`WaveState::window_vector`]: a state supported on `[0, n0]`.
    pub fn from_window_vector(v: &CVector) -> WaveState {
        let sites = v.len() / 2;
        let amps = (0..sites).map(|n| [v[2 * n], v[2 * n + 1]]).collect();
        WaveState { lo: 0, amps }
    }

    pub fn scaled(&self, factor: C64) -> WaveState {
        WaveState {
            lo: self.lo,
            amps: self
                .amps
                .iter()
                .map(|v| [v[0] * factor, v[1] * factor])
                .collect(),
        }
    }

    /// `self += factor · other`.
    pub fn add_scaled(&mut self, other: &WaveState, factor: C64) {
        if other.is_empty() {
            return;
        }
        self.ensure_window(other.lo(), other.hi());
        for (n, v) in other.iter() {
            let idx = (n - self.lo) as usize;
            self.amps[idx][0] += factor * v[0];
            self.amps[idx][1] += factor * v[1];
        }
    }

    pub fn sum(&self, other: &WaveState) -> WaveState {
        let mut out = self.clone();
        out.add_scaled(other, C64::new(1.0, 0.0));
        out
    }

    /// Largest entrywise difference over `[lo, hi]`.
    pub fn max_abs_diff(&self, other: &WaveState, lo: i64, hi: i64) -> f64 {
        (lo..=hi)
            .flat_map(|n| {
                let (x, y) = (self.get(n), other.get(n));
                [(x[0] - y[0]).norm(), (x[1] - y[1]).norm()]
            })
            .fold(0.0, f64::max)
    }

    /// Largest entry modulus over `[lo, hi]`.
    pub fn max_abs(&self, lo: i64, hi: i64) -> f64 {
        (lo..=hi)
            .flat_map(|n| {
                let x = self.get(n);
                [x[0].norm(), x[1].norm()]
            })
            .fold(0.0, f64::max)
    }
}

/// Split of a state into the part on `[0, n0]`, the part moving towards the
/// window from outside, and the part moving away from it.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub comp: WaveState,
    pub incoming: WaveState,
    pub outgoing: WaveState,
}

/// Length of incoming support: the least `N ≥ 0` such that `⟨R|ψ(−n)` and
/// `⟨L|ψ(n0 + n)` vanish for every `n ≥ max(N, 1)`.
///
/// Sites inside `[0, n0]` never count as incoming.
pub fn incoming_length(psi: &WaveState, n0: usize) -> usize {
    let n0 = n0 as i64;
    let mut nu = 0usize;
    for (n, v) in psi.iter() {
        if n <= -1 && v[1] != ZERO {
            nu = nu.max((-n) as usize + 1);
        }
        if n >= n0 + 1 && v[0] != ZERO {
            nu = nu.max((n - n0) as usize + 1);
        }
    }
    nu
}

pub fn decompose(psi: &WaveState, n0: usize) -> Decomposition {
    let n0 = n0 as i64;
    let mut comp = WaveState::zero();
    let mut incoming = WaveState::zero();
    let mut outgoing = WaveState::zero();
    for (n, v) in psi.iter() {
        if (0..=n0).contains(&n) {
            if v != [ZERO; 2] {
                comp.set(n, v);
            }
            continue;
        }
        // Left of the window R moves in; right of it L moves in.
        let (inc, out) = if n < 0 {
            ([ZERO, v[1]], [v[0], ZERO])
        } else {
            ([v[0], ZERO], [ZERO, v[1]])
        };
        if inc != [ZERO; 2] {
            incoming.set(n, inc);
        }
        if out != [ZERO; 2] {
            outgoing.set(n, out);
        }
    }
    Decomposition {
        comp,
        incoming,
        outgoing,
    }
}
