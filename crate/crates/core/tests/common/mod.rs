//! Independent reference computations. Nothing here calls the solvers or the
//! round engine; states are plain amplitude pairs.
#![allow(dead_code)]

use mdiqkd_core::qmath::{BasisLabel, Complex64, Unitary};

pub type Qubit = [Complex64; 2];

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn ket(a: f64, b: f64) -> Qubit {
    [c(a, 0.0), c(b, 0.0)]
}

pub fn zero() -> Qubit {
    ket(1.0, 0.0)
}

pub fn one() -> Qubit {
    ket(0.0, 1.0)
}

pub fn plus() -> Qubit {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ket(s, s)
}

pub fn minus() -> Qubit {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ket(s, -s)
}

pub fn overlap_sq(a: &Qubit, b: &Qubit) -> f64 {
    (a[0].conj() * b[0] + a[1].conj() * b[1]).norm_sqr()
}

pub type Mat2 = [[Complex64; 2]; 2];

pub fn mat(a: f64, b: f64, cc: f64, d: f64) -> Mat2 {
    [[c(a, 0.0), c(b, 0.0)], [c(cc, 0.0), c(d, 0.0)]]
}

pub fn apply(m: &Mat2, v: &Qubit) -> Qubit {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

pub fn matmul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn pauli_x() -> Mat2 {
    mat(0.0, 1.0, 1.0, 0.0)
}

pub fn pauli_z() -> Mat2 {
    mat(1.0, 0.0, 0.0, -1.0)
}

pub fn pauli_y() -> Mat2 {
    [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]
}

pub fn hadamard() -> Mat2 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    mat(s, s, s, -s)
}

pub fn identity() -> Mat2 {
    mat(1.0, 0.0, 0.0, 1.0)
}

/// BB84-4 operators in catalog order `Z, X, H, HXZ` with their fixed bits.
pub fn bb84_ops() -> Vec<(Mat2, u8)> {
    let hxz = matmul(&hadamard(), &matmul(&pauli_x(), &pauli_z()));
    vec![(pauli_z(), 0), (pauli_x(), 1), (hadamard(), 0), (hxz, 1)]
}

/// `bases[b][k]`: Z = {|0>,|1>}, X = {|+>,|->}.
pub fn bb84_bases() -> [[Qubit; 2]; 2] {
    [[zero(), one()], [plus(), minus()]]
}

/// Helstrom bound `(1 + sqrt(1 - 4 p q |<a|b>|^2)) / 2`.
pub fn helstrom(p: f64, fid: f64) -> f64 {
    0.5 * (1.0 + (1.0 - 4.0 * p * (1.0 - p) * fid).max(0.0).sqrt())
}

/// Best projective two-outcome measurement on a qubit for min-error
/// discrimination, found by a grid over the Bloch sphere refined around the
/// best point until the angular step is below `resolution`.
pub fn projective_grid_success(states: &[Qubit], priors: &[f64], resolution: f64) -> f64 {
    let eval = |theta: f64, phi: f64| -> f64 {
        let v0: Qubit = [c((theta / 2.0).cos(), 0.0), Complex64::from_polar((theta / 2.0).sin(), phi)];
        let v1: Qubit = [c(-(theta / 2.0).sin(), 0.0), Complex64::from_polar((theta / 2.0).cos(), phi)];
        [v0, v1]
            .iter()
            .map(|v| {
                states
                    .iter()
                    .zip(priors)
                    .map(|(s, p)| p * overlap_sq(v, s))
                    .fold(0.0, f64::max)
            })
            .sum()
    };
    let pi = std::f64::consts::PI;
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    let n = 64;
    for i in 0..=n {
        for j in 0..2 * n {
            let th = pi * i as f64 / n as f64;
            let ph = pi * j as f64 / n as f64;
            let v = eval(th, ph);
            if v > best.0 {
                best = (v, th, ph);
            }
        }
    }
    let mut step = pi / n as f64;
    while step > resolution {
        let (_, th0, ph0) = best;
        for i in -4..=4 {
            for j in -4..=4 {
                let th = th0 + step * i as f64 / 4.0;
                let ph = ph0 + step * j as f64 / 4.0;
                let v = eval(th, ph);
                if v > best.0 {
                    best = (v, th, ph);
                }
            }
        }
        step /= 2.0;
    }
    best.0
}

/// Exact error rate on kept BB84-4 rounds when a channel acts between Alice and
/// Bob, by enumerating Alice's state, Bob's operator, the channel branch, the
/// measurement basis and the outcome. `channel` lists `(probability, state map)`
/// branches applied to Alice's state.
pub fn bb84_kept_error_rate(channel: &dyn Fn(&Qubit) -> Vec<(f64, Qubit)>) -> f64 {
    let bases = bb84_bases();
    let ops = bb84_ops();
    let mut kept = 0.0;
    let mut err = 0.0;
    for a_b in 0..2 {
        for a_k in 0..2 {
            let sent = bases[a_b][a_k];
            for (oi, (u, bob_bit)) in ops.iter().enumerate() {
                for (pb, received) in channel(&sent) {
                    let encoded = apply(u, &received);
                    for m in 0..2 {
                        let swaps = oi >= 2;
                        if swaps != (a_b != m) {
                            continue;
                        }
                        for out in 0..2 {
                            let w = 0.25 * 0.25 * 0.5 * pb * overlap_sq(&bases[m][out], &encoded);
                            if w == 0.0 {
                                continue;
                            }
                            // Alice: the member of Bob's pair that sends her state to this outcome
                            let pair = if swaps { [2, 3] } else { [0, 1] };
                            let alice_bit = pair
                                .iter()
                                .find(|&&o| overlap_sq(&bases[m][out], &apply(&ops[o].0, &sent)) > 0.5)
                                .map(|&o| ops[o].1)
                                .expect("one member fits");
                            kept += w;
                            if alice_bit != *bob_bit {
                                err += w;
                            }
                        }
                    }
                }
            }
        }
    }
    err / kept
}

/// Intercept-resend with a uniformly chosen Z or X basis, as channel branches.
pub fn intercept_resend_branches(s: &Qubit) -> Vec<(f64, Qubit)> {
    let mut out = Vec::new();
    for basis in bb84_bases() {
        for v in basis {
            out.push((0.5 * overlap_sq(&v, s), v));
        }
    }
    out
}

/// Depolarizing channel as Pauli branches.
pub fn depolarizing_branches(p: f64) -> impl Fn(&Qubit) -> Vec<(f64, Qubit)> {
    move |s: &Qubit| {
        vec![
            (1.0 - p + p / 4.0, *s),
            (p / 4.0, apply(&pauli_x(), s)),
            (p / 4.0, apply(&pauli_y(), s)),
            (p / 4.0, apply(&pauli_z(), s)),
        ]
    }
}

/// Three-sigma binomial band.
pub fn within_3sigma(observed: f64, p: f64, n: f64) -> bool {
    (observed - p).abs() <= 3.0 * (p * (1.0 - p) / n).sqrt() + 1e-12
}

pub fn to_mat(u: &Unitary) -> Mat2 {
    [[u.entry(0, 0), u.entry(0, 1)], [u.entry(1, 0), u.entry(1, 1)]]
}

pub fn vectors(label: BasisLabel) -> [Qubit; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match label {
        BasisLabel::Z => [zero(), one()],
        BasisLabel::X => [plus(), minus()],
        BasisLabel::Y => [[c(s, 0.0), c(0.0, s)], [c(s, 0.0), c(0.0, -s)]],
        BasisLabel::General(t) => [ket(t.cos(), t.sin()), ket(t.sin(), -t.cos())],
    }
}

/// Transition probabilities `|<t_k|U|s_j>|^2`, row `j`, column `k`.
pub fn transitions(u: &Mat2, s: BasisLabel, t: BasisLabel) -> [[f64; 2]; 2] {
    let (sv, tv) = (vectors(s), vectors(t));
    let mut out = [[0.0; 2]; 2];
    for j in 0..2 {
        let image = apply(u, &sv[j]);
        for k in 0..2 {
            out[j][k] = overlap_sq(&tv[k], &image);
        }
    }
    out
}

pub fn maps_onto(u: &Mat2, s: BasisLabel, t: BasisLabel) -> bool {
    transitions(u, s, t)
        .iter()
        .all(|row| row.iter().all(|p| (p - 0.0).abs() < 1e-9 || (p - 1.0).abs() < 1e-9))
}
