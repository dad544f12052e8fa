//! Spectroscopic labelling of winding-indexed bound states.
//!
//! Bound states carry the winding index `(N_Theta, N_Omega, 2 kappa)`; in the
//! ring-radius limit they line up with hydrogenic `n l_j` orbitals with
//! `m_j = kappa`. Half-integers are stored doubled so equality stays exact.

use crate::error::{Error, Result};
use crate::spectrum::StateIndex;

const L_LETTERS: &[u8] = b"spdfghiklmnoqrtuvwxyz";

/// Hydrogenic label `n l_j` with magnetic quantum number `m_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpectroLabel {
    /// Principal quantum number, `n >= 1`.
    pub n: u32,
    /// Orbital angular momentum, `l <= n - 1`.
    pub l: u32,
    /// Doubled total angular momentum `2j` (odd, `j = l +- 1/2`).
    pub two_j: u32,
    /// Doubled magnetic quantum number `2 m_j` (odd, `|m_j| <= j`).
    pub two_mj: i32,
}

impl SpectroLabel {
    pub fn new(n: u32, l: u32, two_j: u32, two_mj: i32) -> Result<Self> {
        let label = SpectroLabel { n, l, two_j, two_mj };
        label.validate()?;
        Ok(label)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| Err(Error::InvalidLabel { reason });
        if self.n < 1 {
            return bad(format!("n = {} must be >= 1", self.n));
        }
        if self.l > self.n - 1 {
            return bad(format!("l = {} exceeds n - 1 = {}", self.l, self.n - 1));
        }
        if self.two_j % 2 == 0 || self.two_mj.rem_euclid(2) == 0 {
            return bad("j and m_j must be half-integers".into());
        }
        let j_ok =
            self.two_j == 2 * self.l + 1 || (self.l >= 1 && self.two_j == 2 * self.l - 1);
        if !j_ok {
            return bad(format!(
                "j = {}/2 is not l +- 1/2 for l = {}",
                self.two_j, self.l
            ));
        }
        if self.two_mj.unsigned_abs() > self.two_j {
            return bad(format!(
                "|m_j| = {}/2 exceeds j = {}/2",
                self.two_mj.abs(),
                self.two_j
            ));
        }
        Ok(())
    }

    /// Spin-orbit quantum number `k`: `|k| = j + 1/2`, positive when
    /// `l = j + 1/2`.
    pub fn spin_orbit(&self) -> i32 {
        let abs_k = ((self.two_j + 1) / 2) as i32;
        if 2 * self.l == self.two_j + 1 {
            abs_k
        } else {
            -abs_k
        }
    }

    /// Radial quantum number `M = n - |k|`.
    pub fn radial_nodes(&self) -> u32 {
        self.n - (self.two_j + 1) / 2
    }
}

/// Map a winding index onto its hydrogenic label.
///
/// `N` is `N_Theta + 1` for `N_Theta >= 0` and `N_Theta` otherwise; then
/// `k = -N - sgn(N)(|kappa| - 1/2)`, `n = N_Omega + |k|`, `j = |k| - 1/2`,
/// `l = j + sgn(k)/2` and `m_j = kappa`.
pub fn winding_to_label(index: &StateIndex) -> Result<SpectroLabel> {
    let invalid = || Error::InvalidIndex {
        n_theta: index.n_theta,
        n_omega: index.n_omega,
        two_kappa: index.two_kappa,
    };
    if index.two_kappa.rem_euclid(2) == 0 {
        return Err(invalid());
    }
    let n_big = if index.n_theta >= 0 {
        index.n_theta + 1
    } else {
        index.n_theta
    };
    // k = -N - sgn(N)(|kappa| - 1/2), with |kappa| - 1/2 = (|2kappa| - 1)/2
    let half_shift = (index.two_kappa.abs() - 1) / 2;
    let k = -n_big - n_big.signum() * half_shift;
    let abs_k = k.unsigned_abs();
    if index.n_omega < 0 {
        return Err(invalid());
    }
    let n = index.n_omega as u32 + abs_k;
    let two_j = 2 * abs_k - 1;
    let l = if k > 0 { abs_k } else { abs_k - 1 };
    SpectroLabel::new(n, l, two_j, index.two_kappa).map_err(|_| invalid())
}

/// Exact inverse of [`winding_to_label`].
pub fn label_to_winding(label: &SpectroLabel) -> Result<StateIndex> {
    label.validate()?;
    let k = label.spin_orbit();
    let m = label.radial_nodes();
    // The excluded hydrogenic corner k > 0, M = 0 shows up as l = n.
    if k > 0 && m == 0 {
        return Err(Error::InvalidLabel {
            reason: format!("label {} implies the excluded state k > 0, M = 0", format_label(label)),
        });
    }
    // N = -sgn(k) (|k| - |kappa| + 1/2); with doubled ints the parenthesis
    // is |k| - (|2 m_j| - 1)/2
    let abs_kappa_shift = (label.two_mj.abs() - 1) / 2;
    let n_big = -k.signum() * (k.abs() - abs_kappa_shift);
    if n_big == 0 {
        return Err(Error::InvalidLabel {
            reason: format!("label {} has |m_j| too large for its j", format_label(label)),
        });
    }
    let n_theta = if n_big >= 1 { n_big - 1 } else { n_big };
    Ok(StateIndex {
        n_theta,
        n_omega: m as i32,
        two_kappa: label.two_mj,
    })
}

/// Render `n l_j` as e.g. `2p1/2`.
pub fn format_label(label: &SpectroLabel) -> String {
    let letter = L_LETTERS
        .get(label.l as usize)
        .copied()
        .unwrap_or(b'?') as char;
    format!("{}{}{}/2", label.n, letter, label.two_j)
}

/// Render with the magnetic quantum number, e.g. `2p1/2 (mj=-1/2)`.
pub fn format_label_mj(label: &SpectroLabel) -> String {
    format!("{} (mj={}/2)", format_label(label), label.two_mj)
}

/// Parse the `<n><letter><2j>/2` grammar produced by [`format_label`];
/// an optional ` (mj=<2mj>/2)` suffix fixes `m_j`, otherwise `mj_default`
/// is used.
pub fn parse_label(text: &str, mj_default: Option<i32>) -> Result<SpectroLabel> {
    let bad = |why: &str| Error::InvalidLabel {
        reason: format!("cannot parse {text:?}: {why}"),
    };
    let s = text.trim();
    let (core, mj_part) = match s.find(" (mj=") {
        Some(pos) => {
            let tail = &s[pos + 5..];
            let tail = tail.strip_suffix(')').ok_or_else(|| bad("unterminated mj suffix"))?;
            let tail = tail.strip_suffix("/2").ok_or_else(|| bad("mj must end in /2"))?;
            let mj: i32 = tail.parse().map_err(|_| bad("bad mj numerator"))?;
            (&s[..pos], Some(mj))
        }
        None => (s, None),
    };
    let letter_pos = core
        .find(|c: char| c.is_ascii_alphabetic())
        .ok_or_else(|| bad("missing orbital letter"))?;
    let n: u32 = core[..letter_pos].parse().map_err(|_| bad("bad n"))?;
    let letter = core.as_bytes()[letter_pos];
    let l = L_LETTERS
        .iter()
        .position(|&c| c == letter)
        .ok_or_else(|| bad("unknown orbital letter"))? as u32;
    let rest = &core[letter_pos + 1..];
    let rest = rest.strip_suffix("/2").ok_or_else(|| bad("j must end in /2"))?;
    let two_j: u32 = rest.parse().map_err(|_| bad("bad j numerator"))?;
    let two_mj = mj_part
        .or(mj_default)
        .ok_or_else(|| bad("no mj given and no default"))?;
    SpectroLabel::new(n, l, two_j, two_mj)
}

/// Every admissible label with `n <= n_max`, sorted by `(n, l, j, m_j)`.
pub fn enumerate_labels(n_max: u32) -> Vec<SpectroLabel> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        for l in 0..n {
            for two_j in [2 * l as i32 - 1, 2 * l as i32 + 1] {
                if two_j < 1 {
                    continue;
                }
                let two_j = two_j as u32;
                // skip the excluded k > 0, M = 0 corner (l = n would be needed)
                let mut mj = -(two_j as i32);
                while mj <= two_j as i32 {
                    if let Ok(label) = SpectroLabel::new(n, l, two_j, mj) {
                        if label_to_winding(&label).is_ok() {
                            out.push(label);
                        }
                    }
                    mj += 2;
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::exact_k;

    #[test]
    fn worked_inversion_2p12() {
        // 2p1/2 with m_j = -1/2 corresponds to (N_Theta, N_Omega, kappa) =
        // (-1, 1, -1/2)
        let label = SpectroLabel::new(2, 1, 1, -1).unwrap();
        let idx = label_to_winding(&label).unwrap();
        assert_eq!(idx, StateIndex { n_theta: -1, n_omega: 1, two_kappa: -1 });
        assert_eq!(winding_to_label(&idx).unwrap(), label);
    }

    #[test]
    fn ground_state_label() {
        let idx = StateIndex { n_theta: 0, n_omega: 0, two_kappa: 1 };
        let label = winding_to_label(&idx).unwrap();
        assert_eq!((label.n, label.l, label.two_j, label.two_mj), (1, 0, 1, 1));
        assert_eq!(format_label(&label), "1s1/2");
        assert_eq!(label.spin_orbit(), -1);
    }

    #[test]
    fn two_s_half_label() {
        let idx = StateIndex { n_theta: 0, n_omega: 1, two_kappa: -1 };
        let label = winding_to_label(&idx).unwrap();
        assert_eq!(format_label(&label), "2s1/2");
        assert_eq!(label.two_mj, -1);
    }

    #[test]
    fn d52_inversion() {
        // 3d5/2: j = 5/2 so |k| = 3; l = 2 = j - 1/2 means k = -3, N = 3
        let label = SpectroLabel::new(3, 2, 5, 1).unwrap();
        let idx = label_to_winding(&label).unwrap();
        assert_eq!(idx, StateIndex { n_theta: 2, n_omega: 0, two_kappa: 1 });
        assert_eq!(winding_to_label(&idx).unwrap(), label);
    }

    #[test]
    fn format_examples() {
        assert_eq!(format_label(&SpectroLabel::new(1, 0, 1, 1).unwrap()), "1s1/2");
        assert_eq!(format_label(&SpectroLabel::new(2, 1, 1, -1).unwrap()), "2p1/2");
        assert_eq!(format_label(&SpectroLabel::new(4, 3, 7, 1).unwrap()), "4f7/2");
        assert_eq!(
            format_label_mj(&SpectroLabel::new(2, 1, 1, -1).unwrap()),
            "2p1/2 (mj=-1/2)"
        );
    }

    #[test]
    fn parse_round_trip() {
        for label in enumerate_labels(5) {
            let text = format_label_mj(&label);
            assert_eq!(parse_label(&text, None).unwrap(), label);
            let bare = format_label(&label);
            assert_eq!(parse_label(&bare, Some(label.two_mj)).unwrap(), label);
        }
        assert!(parse_label("2x1/2", Some(1)).is_err());
        assert!(parse_label("2p", Some(1)).is_err());
    }

    #[test]
    fn label_winding_round_trip_n6() {
        let mut seen = 0;
        for label in enumerate_labels(6) {
            let idx = label_to_winding(&label).unwrap();
            assert!(idx.admissible(), "{label:?} -> {idx:?}");
            assert_eq!(winding_to_label(&idx).unwrap(), label);
            seen += 1;
        }
        assert!(seen > 0);
    }

    #[test]
    fn k_matches_angular_exact_k() {
        // the k produced by the label map equals the a = 0 angular eigenvalue
        for n_theta in -4..=4i32 {
            for two_kappa in [-5i32, -3, -1, 1, 3, 5] {
                let idx = StateIndex { n_theta, n_omega: 1, two_kappa };
                let n_big = if n_theta >= 0 { n_theta + 1 } else { n_theta };
                let label = winding_to_label(&idx);
                let k_angular = exact_k(n_big, two_kappa).unwrap();
                if let Ok(label) = label {
                    assert_eq!(label.spin_orbit(), k_angular, "idx {idx:?}");
                }
            }
        }
    }

    #[test]
    fn invalid_labels_rejected() {
        assert!(SpectroLabel::new(1, 1, 3, 1).is_err()); // l > n-1
        assert!(SpectroLabel::new(2, 1, 5, 1).is_err()); // j not l +- 1/2
        assert!(SpectroLabel::new(2, 1, 1, 3).is_err()); // |mj| > j
        assert!(SpectroLabel::new(2, 1, 2, 1).is_err()); // j integer
        // 2p3/2 with n = 2 means k = -2, M = 0: fine; but 1p1/2 impossible
        assert!(SpectroLabel::new(1, 1, 1, 1).is_err());
    }

    #[test]
    fn enumerate_counts() {
        assert_eq!(enumerate_labels(1).len(), 2); // 1s1/2, mj = +-1/2
        // n = 2 adds 2s1/2 (2), 2p1/2 (2), 2p3/2 (4)
        assert_eq!(enumerate_labels(2).len(), 10);
    }
}
