//! Reference arithmetic for the acceptance suite, written against plain
//! 4-vectors over the basis `(LH, LV, RH, RV)` so that it shares no code with
//! the simulator it checks.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C;

pub type Vec4 = [C; 4];
pub type Mat4 = [[C; 4]; 4];

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

fn diag(d: [f64; 4]) -> Mat4 {
    let mut m = [[c(0.0); 4]; 4];
    for k in 0..4 {
        m[k][k] = c(d[k]);
    }
    m
}

/// Arm-resolved observable by tag (`piL`, `piR`, `xL`, `xR`, `zL`, `zR`),
/// written out entry by entry.
pub fn observable(tag: &str) -> Option<Mat4> {
    let (z, one) = (c(0.0), c(1.0));
    Some(match tag {
        "piL" => diag([1.0, 1.0, 0.0, 0.0]),
        "piR" => diag([0.0, 0.0, 1.0, 1.0]),
        "zL" => diag([1.0, -1.0, 0.0, 0.0]),
        "zR" => diag([0.0, 0.0, 1.0, -1.0]),
        "xL" => [[z, one, z, z], [one, z, z, z], [z, z, z, z], [z, z, z, z]],
        "xR" => [[z, z, z, z], [z, z, z, z], [z, z, z, one], [z, z, one, z]],
        _ => return None,
    })
}

pub fn apply(m: &Mat4, v: &Vec4) -> Vec4 {
    let mut out = [c(0.0); 4];
    for (r, row) in m.iter().enumerate() {
        out[r] = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
    out
}

/// `<f|i>`.
pub fn bra_ket(f: &Vec4, i: &Vec4) -> C {
    f.iter().zip(i).map(|(a, b)| a.conj() * b).sum()
}

/// `<post|A|pre> / <post|pre>`.
pub fn weak_value(a: &Mat4, pre: &Vec4, post: &Vec4) -> C {
    bra_ket(post, &apply(a, pre)) / bra_ket(post, pre)
}

/// `(|L> + e^{i phi}|R>)(cos(theta/2)|H> + sin(theta/2)|V>)/sqrt2`.
pub fn delayed_pre(theta: f64, phi: f64) -> Vec4 {
    let (s, co) = (theta / 2.0).sin_cos();
    let e = C::from_polar(1.0, phi);
    let h = FRAC_1_SQRT_2;
    [c(h * co), c(h * s), e * h * co, e * h * s]
}

/// `(|LH> + |RV>)/sqrt2`.
pub fn delayed_post() -> Vec4 {
    let h = FRAC_1_SQRT_2;
    [c(h), c(0.0), c(0.0), c(h)]
}
