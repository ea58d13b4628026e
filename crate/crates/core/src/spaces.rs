//! Hermitian spaces of signature `(n-1, 1)` over `Q(sqrt(-D))`, represented
//! by their dimension and local invariants at the ramified primes.

use rug::ops::Pow;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::arith::ntheory::{hilbert_int, kronecker, least_nonresidue, Place};
use crate::dirichlet::{make_field, FieldData};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SpaceSpec {
    pub field: FieldData,
    pub n: u32,
    pub inv: BTreeMap<u64, i32>,
}

/// Diagonal unit model of `L tensor Z_p` at a ramified prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalGram {
    pub p: u64,
    pub units: Vec<u64>,
}

impl SpaceSpec {
    /// Builds and validates a spec.
    pub fn new(field: FieldData, n: u32, inv: BTreeMap<u64, i32>) -> Result<Self> {
        let spec = SpaceSpec { field, n, inv };
        validate_space(&spec)?;
        Ok(spec)
    }

    pub fn from_parts(d: i64, n: u32, inv: &[(u64, i32)]) -> Result<Self> {
        SpaceSpec::new(make_field(d)?, n, inv.iter().copied().collect())
    }

    pub fn d(&self) -> u64 {
        self.field.d
    }

    pub fn inv_at(&self, l: u64) -> i32 {
        self.inv[&l]
    }

    /// Same invariants, dimension `n`.
    pub fn with_dim(&self, n: u32) -> SpaceSpec {
        SpaceSpec {
            field: self.field.clone(),
            n,
            inv: self.inv.clone(),
        }
    }

    /// Isotropic for `n = 2` iff `inv_l = (-1/l)` at every ramified prime.
    pub fn is_anisotropic(&self) -> bool {
        match self.n {
            1 => true,
            2 => !self.inv.iter().all(|(&l, &s)| s == kronecker(-1, l as i64)),
            _ => false,
        }
    }

    pub fn canonical(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inv: Vec<String> = self.inv.iter().map(|(l, s)| format!("{l}:{s}")).collect();
        write!(f, "D={};n={};inv={}", self.field.d, self.n, inv.join(","))
    }
}

/// Parses `7:-1,11:1` or `7=-1,11=1`.
pub fn parse_inv(s: &str) -> Result<BTreeMap<u64, i32>> {
    let mut out = BTreeMap::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (l, v) = item
            .split_once([':', '='])
            .ok_or_else(|| Error::InvalidInput(format!("bad invariant entry '{item}'")))?;
        let l: u64 = l
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad prime in '{item}'")))?;
        let v: i32 = v
            .trim()
            .trim_start_matches('+')
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad sign in '{item}'")))?;
        if out.insert(l, v).is_some() {
            return Err(Error::InvalidInput(format!("invariant at {l} given twice")));
        }
    }
    Ok(out)
}

impl FromStr for SpaceSpec {
    type Err = Error;

    /// `D=7;n=3;inv=7:-1`.
    fn from_str(s: &str) -> Result<Self> {
        let mut d = None;
        let mut n = None;
        let mut inv = None;
        for part in s.split(';').map(str::trim).filter(|t| !t.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("bad spec field '{part}'")))?;
            match k.trim() {
                "D" => {
                    d = Some(
                        v.trim()
                            .parse::<i64>()
                            .map_err(|_| Error::InvalidInput(format!("bad D '{v}'")))?,
                    )
                }
                "n" => {
                    n = Some(
                        v.trim()
                            .parse::<u32>()
                            .map_err(|_| Error::InvalidInput(format!("bad n '{v}'")))?,
                    )
                }
                "inv" => inv = Some(parse_inv(v)?),
                other => return Err(Error::InvalidInput(format!("unknown spec field '{other}'"))),
            }
        }
        let d = d.ok_or_else(|| Error::InvalidInput("spec needs D".into()))?;
        let n = n.ok_or_else(|| Error::InvalidInput("spec needs n".into()))?;
        let inv = inv.ok_or_else(|| Error::InvalidInput("spec needs inv".into()))?;
        SpaceSpec::new(make_field(d)?, n, inv)
    }
}

#[derive(Serialize, Deserialize)]
struct SpecJson {
    #[serde(rename = "D")]
    d: i64,
    n: u32,
    inv: BTreeMap<String, i32>,
}

impl Serialize for SpaceSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpecJson {
            d: self.field.d as i64,
            n: self.n,
            inv: self.inv.iter().map(|(l, v)| (l.to_string(), *v)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpaceSpec {
    fn deserialize<De: serde::Deserializer<'de>>(de: De) -> std::result::Result<Self, De::Error> {
        use serde::de::Error as _;
        let j = SpecJson::deserialize(de)?;
        let mut inv = BTreeMap::new();
        for (k, v) in j.inv {
            let l: u64 = k.parse().map_err(|_| De::Error::custom(format!("bad prime '{k}'")))?;
            inv.insert(l, v);
        }
        let field = make_field(j.d).map_err(De::Error::custom)?;
        SpaceSpec::new(field, j.n, inv).map_err(De::Error::custom)
    }
}

pub fn validate_space(spec: &SpaceSpec) -> Result<()> {
    if spec.n == 0 {
        return Err(Error::DimensionTooSmall(0, 1));
    }
    for (&l, &v) in &spec.inv {
        if !spec.field.primes.contains(&l) {
            return Err(Error::UnknownPrime(l));
        }
        if v != 1 && v != -1 {
            return Err(Error::InvalidInput(format!(
                "invariant at {l} must be +1 or -1, got {v}"
            )));
        }
    }
    for l in &spec.field.primes {
        if !spec.inv.contains_key(l) {
            return Err(Error::InvalidInput(format!("missing invariant at {l}")));
        }
    }
    let prod: i32 = spec.inv.values().product();
    if prod != -1 {
        return Err(Error::InvalidInvariantProduct(prod));
    }
    Ok(())
}

/// All `2^(o(D)-1)` sign vectors with product `-1`, in lexicographic order
/// (with `-1 < +1`) over the primes of `D`.
pub fn enumerate_spaces(field: &FieldData, n: u32) -> Vec<SpaceSpec> {
    let o = field.primes.len();
    let mut out = Vec::new();
    for mask in 0..(1u32 << o) {
        // bit i set means inv = +1 at primes[i]; iterate from the most
        // significant prime so that the order is lexicographic
        let signs: Vec<i32> = (0..o)
            .map(|i| if mask >> (o - 1 - i) & 1 == 1 { 1 } else { -1 })
            .collect();
        if signs.iter().product::<i32>() != -1 {
            continue;
        }
        let inv = field.primes.iter().copied().zip(signs).collect();
        out.push(SpaceSpec {
            field: field.clone(),
            n,
            inv,
        });
    }
    out
}

/// Orthogonal complement of a vector of norm `p` in a self-dual lattice:
/// dimension `n-1`, invariants twisted by `(p, -D)_l`.
pub fn companion_space(spec: &SpaceSpec, p: u64) -> Result<SpaceSpec> {
    if spec.n < 3 {
        return Err(Error::DimensionTooSmall(spec.n, 3));
    }
    let d = spec.field.d as i64;
    if kronecker(-d, p as i64) != 1 {
        return Err(Error::NotSplit(p));
    }
    let inv = spec
        .inv
        .iter()
        .map(|(&l, &s)| (l, s * hilbert_int(p as i64, -d, Place::Finite(l))))
        .collect();
    SpaceSpec::new(spec.field.clone(), spec.n - 1, inv)
}

pub fn local_gram(spec: &SpaceSpec, p: u64) -> LocalGram {
    let mut units = vec![1u64; spec.n as usize];
    if spec.inv_at(p) == -1 {
        units[0] = least_nonresidue(p);
    }
    LocalGram { p, units }
}

/// `l* = (-1/l) inv_l l`.
pub fn ell_star(spec: &SpaceSpec, l: u64) -> i64 {
    kronecker(-1, l as i64) as i64 * spec.inv_at(l) as i64 * l as i64
}

/// `beta_l = (-1)^(n+1) (-1/l)^[n/2] inv_l l^[n/2]`.
pub fn beta_ell(spec: &SpaceSpec, l: u64) -> Rational {
    let half = spec.n / 2;
    let mut sign = if spec.n.is_multiple_of(2) { -1i64 } else { 1 };
    if half % 2 == 1 {
        sign *= kronecker(-1, l as i64) as i64;
    }
    sign *= spec.inv_at(l) as i64;
    Rational::from(rug::Integer::from(l).pow(half) * sign)
}
