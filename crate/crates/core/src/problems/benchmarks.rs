use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::BoundsBox;

use super::Evaluator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Dtlz,
    Zdt,
}

/// One scalable benchmark instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct ProblemSpec {
    family: Family,
    id: u8,
    m: usize,
    d: usize,
    bounds: BoundsBox,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    family: Family,
    id: u8,
    #[serde(default = "two")]
    m: usize,
    d: usize,
}

fn two() -> usize {
    2
}

impl TryFrom<RawSpec> for ProblemSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        match raw.family {
            Family::Dtlz => ProblemSpec::dtlz(raw.id, raw.m, raw.d),
            Family::Zdt if raw.m == 2 => ProblemSpec::zdt(raw.id, raw.d),
            Family::Zdt => Err(Error::Config(format!("ZDT problems have 2 objectives, not {}", raw.m))),
        }
    }
}

impl From<ProblemSpec> for RawSpec {
    fn from(p: ProblemSpec) -> Self {
        RawSpec { family: p.family, id: p.id, m: p.m, d: p.d }
    }
}

impl ProblemSpec {
    pub fn dtlz(id: u8, m: usize, d: usize) -> Result<Self> {
        if !(1..=7).contains(&id) {
            return Err(Error::Config(format!("unknown problem DTLZ{id}")));
        }
        if !(2..=3).contains(&m) || d < m {
            return Err(Error::Config(format!("DTLZ{id} needs M in {{2, 3}} and D >= M (got M={m}, D={d})")));
        }
        Ok(Self { family: Family::Dtlz, id, m, d, bounds: BoundsBox::uniform(d, 0.0, 1.0)? })
    }

    pub fn zdt(id: u8, d: usize) -> Result<Self> {
        if !matches!(id, 1..=4 | 6) {
            return Err(Error::Config(format!("unknown problem ZDT{id}")));
        }
        if d < 2 {
            return Err(Error::Config(format!("ZDT{id} needs D >= 2 (got {d})")));
        }
        let bounds = if id == 4 {
            let mut lower = vec![-5.0; d];
            let mut upper = vec![5.0; d];
            lower[0] = 0.0;
            upper[0] = 1.0;
            BoundsBox::new(lower, upper)?
        } else {
            BoundsBox::uniform(d, 0.0, 1.0)?
        };
        Ok(Self { family: Family::Zdt, id, m: 2, d, bounds })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn id(&self) -> u8 {
        self.id
    }

    pub fn num_objectives(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn bounds(&self) -> &BoundsBox {
        &self.bounds
    }

    /// e.g. `DTLZ2-M2-D30`.
    pub fn name(&self) -> String {
        let fam = match self.family {
            Family::Dtlz => "DTLZ",
            Family::Zdt => "ZDT",
        };
        format!("{fam}{}-M{}-D{}", self.id, self.m, self.d)
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        if !self.bounds.contains(x) {
            return Err(Error::contract(format!(
                "{}: decision vector outside the bounds (or of length {} instead of {})",
                self.name(),
                x.len(),
                self.d
            )));
        }
        Ok(match self.family {
            Family::Dtlz => dtlz(self.id, self.m, x),
            Family::Zdt => zdt(self.id, x),
        })
    }
}

impl Evaluator for ProblemSpec {
    fn num_objectives(&self) -> usize {
        self.m
    }

    fn bounds(&self) -> &BoundsBox {
        &self.bounds
    }

    fn evaluate(&mut self, x: &[f64], _fe_index: usize) -> Result<Vec<f64>> {
        ProblemSpec::evaluate(self, x)
    }
}

fn rastrigin_g(xm: &[f64]) -> f64 {
    100.0
        * (xm.len() as f64
            + xm.iter()
                .map(|&v| (v - 0.5).powi(2) - (20.0 * PI * (v - 0.5)).cos())
                .sum::<f64>())
}

fn sphere_g(xm: &[f64]) -> f64 {
    xm.iter().map(|&v| (v - 0.5).powi(2)).sum()
}

/// `(1 + g)` times the spherical coordinates of `angles` (M - 1 of them).
fn spherical(angles: &[f64], g: f64) -> Vec<f64> {
    let m = angles.len() + 1;
    (0..m)
        .map(|i| {
            let mut v = 1.0 + g;
            for a in &angles[..m - 1 - i] {
                v *= a.cos();
            }
            if i > 0 {
                v *= angles[m - 1 - i].sin();
            }
            v
        })
        .collect()
}

fn dtlz(id: u8, m: usize, x: &[f64]) -> Vec<f64> {
    let (head, xm) = x.split_at(m - 1);
    let half_pi = PI / 2.0;
    match id {
        1 => {
            let g = rastrigin_g(xm);
            (0..m)
                .map(|i| {
                    let mut v = 0.5 * (1.0 + g);
                    for &h in &head[..m - 1 - i] {
                        v *= h;
                    }
                    if i > 0 {
                        v *= 1.0 - head[m - 1 - i];
                    }
                    v
                })
                .collect()
        }
        2 => spherical(&head.iter().map(|h| h * half_pi).collect::<Vec<_>>(), sphere_g(xm)),
        3 => spherical(&head.iter().map(|h| h * half_pi).collect::<Vec<_>>(), rastrigin_g(xm)),
        4 => spherical(&head.iter().map(|h| h.powi(100) * half_pi).collect::<Vec<_>>(), sphere_g(xm)),
        5 | 6 => {
            let g = if id == 5 { sphere_g(xm) } else { xm.iter().map(|v| v.powf(0.1)).sum() };
            let angles: Vec<f64> = head
                .iter()
                .enumerate()
                .map(|(j, &h)| if j == 0 { h * half_pi } else { PI / (4.0 * (1.0 + g)) * (1.0 + 2.0 * g * h) })
                .collect();
            spherical(&angles, g)
        }
        7 => {
            let g = 1.0 + 9.0 / xm.len() as f64 * xm.iter().sum::<f64>();
            let h = m as f64 - head.iter().map(|&f| f / (1.0 + g) * (1.0 + (3.0 * PI * f).sin())).sum::<f64>();
            let mut f = head.to_vec();
            f.push((1.0 + g) * h);
            f
        }
        _ => unreachable!("validated at construction"),
    }
}

fn zdt(id: u8, x: &[f64]) -> Vec<f64> {
    let n = x.len() as f64;
    let tail = &x[1..];
    match id {
        1 | 2 | 3 => {
            let f1 = x[0];
            let g = 1.0 + 9.0 * tail.iter().sum::<f64>() / (n - 1.0);
            let r = f1 / g;
            let f2 = match id {
                1 => g * (1.0 - r.sqrt()),
                2 => g * (1.0 - r * r),
                _ => g * (1.0 - r.sqrt() - r * (10.0 * PI * f1).sin()),
            };
            vec![f1, f2]
        }
        4 => {
            let f1 = x[0];
            let g = 1.0 + 10.0 * (n - 1.0) + tail.iter().map(|v| v * v - 10.0 * (4.0 * PI * v).cos()).sum::<f64>();
            vec![f1, g * (1.0 - (f1 / g).sqrt())]
        }
        6 => {
            let f1 = zdt6_f1(x[0]);
            let g = 1.0 + 9.0 * (tail.iter().sum::<f64>() / (n - 1.0)).powf(0.25);
            vec![f1, g * (1.0 - (f1 / g).powi(2))]
        }
        _ => unreachable!("validated at construction"),
    }
}

pub(crate) fn zdt6_f1(x1: f64) -> f64 {
    1.0 - (-4.0 * x1).exp() * (6.0 * PI * x1).sin().powi(6)
}
