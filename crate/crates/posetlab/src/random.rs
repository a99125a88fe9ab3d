//! Random subfamilies of the Boolean lattice and the experiments built on
//! them: the removal construction below the threshold, largest-free-
//! subfamily search, and observational threshold sweeps.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::embed::{
    creates_copy_with, copies_through, is_p_free, max_antichain_witness,
};
use crate::error::{Error, Result};
use crate::extremal::params::{density_exponent, max_free_levels, SubposetMode};
use crate::family::{middle_levels, SetFamily, MAX_GROUND};
use crate::par;
use crate::poset::Poset;
use crate::rng::keyed_hash;

/// Independent membership sampling: each code joins with probability p,
/// decided by a keyed hash so single codes are reproducible in isolation.
/// Membership: hash * den < num * 2^64, exactly.
pub fn sample_lattice(n: u32, p: &BigRational, seed: u64) -> Result<SetFamily> {
    if n == 0 || n > MAX_GROUND {
        return Err(Error::BadParam(format!("ground size {n} out of range")));
    }
    if p < &BigRational::zero() || p > &BigRational::one() {
        return Err(Error::BadParam(format!("probability {p} outside [0,1]")));
    }
    let num = p.numer().abs().to_biguint().unwrap();
    let den = p.denom().abs().to_biguint().unwrap();
    let fast = num.to_u64().zip(den.to_u64());
    let mut f = SetFamily::empty(n)?;
    for code in 0..1u32 << n {
        let h = keyed_hash(seed, code as u64);
        let keep = match fast {
            Some((nu, de)) => (h as u128) * (de as u128) < (nu as u128) << 64,
            None => BigUint::from(h) * &den < num.clone() << 64u32,
        };
        if keep {
            f.insert(code);
        }
    }
    Ok(f)
}

const MAX_REMOVAL_MEMBERS: usize = 400;

/// Intersects the random sample with the e(P)+1 middle levels, then
/// deletes copy-heavy sets until the family is P-free: each step removes
/// the member lying on the most remaining copies, ties to the smallest
/// code. Returns the family and the number of deletions.
pub fn removal_construction(
    n: u32,
    p: &BigRational,
    seed: u64,
    poset: &Poset,
    induced: bool,
) -> Result<(SetFamily, u64)> {
    let e = max_free_levels(poset, induced)?;
    let window = middle_levels(n, (e + 1).min(n + 1))?;
    let sample = sample_lattice(n, p, seed)?;
    let mut family = SetFamily::empty(n)?;
    for code in window.codes() {
        if sample.contains(code) {
            family.insert(code);
        }
    }
    if poset.size() > 2 && family.len() > MAX_REMOVAL_MEMBERS {
        return Err(Error::TooLarge {
            what: "removal construction family size",
            requested: family.len() as u64,
            limit: MAX_REMOVAL_MEMBERS as u64,
        });
    }
    let mut removed = 0u64;
    loop {
        let mut best: Option<(u128, u32)> = None;
        for code in family.codes() {
            let through = copies_through(poset, &family, code, induced);
            if through > 0 {
                let better = match best {
                    None => true,
                    Some((b, _)) => through > b,
                };
                if better {
                    best = Some((through, code));
                }
            }
        }
        match best {
            None => break,
            Some((_, code)) => {
                family.remove(code);
                removed += 1;
            }
        }
    }
    debug_assert!(is_p_free(poset, &family, induced));
    Ok((family, removed))
}

#[derive(Debug, Clone)]
pub struct LargestFreeOutcome {
    pub size: u64,
    pub witness: SetFamily,
    pub exact: bool,
}

const MAX_EXACT_SAMPLE: usize = 24;

fn is_two_chain(p: &Poset) -> bool {
    p.size() == 2 && p.strict_pairs().len() == 1
}

/// Largest P-free subfamily of a sample. Exact for two-element chains
/// (maximum antichain) and for samples of at most 24 sets; otherwise the
/// better of a window sweep with greedy augmentation and greedy deletion.
pub fn largest_free_in_sample(
    sample: &SetFamily,
    poset: &Poset,
    induced: bool,
) -> Result<LargestFreeOutcome> {
    let n = sample.ground_n();
    if is_two_chain(poset) {
        let witness_codes = max_antichain_witness(&sample.codes());
        let witness = SetFamily::from_codes(n, &witness_codes)?;
        return Ok(LargestFreeOutcome {
            size: witness.len() as u64,
            witness,
            exact: true,
        });
    }
    if sample.len() <= MAX_EXACT_SAMPLE {
        let mut best = SetFamily::empty(n)?;
        let mut current = SetFamily::empty(n)?;
        let mut codes = sample.codes();
        codes.sort_by_key(|&c| ((2 * c.count_ones() as i64 - n as i64).abs(), c));
        dfs_free(poset, induced, &codes, 0, &mut current, &mut best);
        return Ok(LargestFreeOutcome {
            size: best.len() as u64,
            witness: best,
            exact: true,
        });
    }

    let e = max_free_levels(poset, induced)?.max(1);
    let mut best: Option<SetFamily> = None;
    for lo in 0..=n.saturating_sub(e - 1) {
        let mut cand = SetFamily::empty(n)?;
        for code in sample.codes() {
            let s = code.count_ones();
            if s >= lo && s <= lo + e - 1 {
                cand.insert(code);
            }
        }
        // Augment greedily with whatever else fits.
        let mut extras = sample.codes();
        extras.sort_by_key(|&c| ((2 * c.count_ones() as i64 - n as i64).abs(), c));
        for code in extras {
            if !cand.contains(code) {
                cand.insert(code);
                if creates_copy_with(poset, &cand, code, induced) {
                    cand.remove(code);
                }
            }
        }
        if best.as_ref().map_or(true, |b| cand.len() > b.len()) {
            best = Some(cand);
        }
    }
    let witness = best.unwrap();
    debug_assert!(is_p_free(poset, &witness, induced));
    Ok(LargestFreeOutcome {
        size: witness.len() as u64,
        witness,
        exact: false,
    })
}

fn dfs_free(
    p: &Poset,
    induced: bool,
    codes: &[u32],
    idx: usize,
    current: &mut SetFamily,
    best: &mut SetFamily,
) {
    if current.len() + (codes.len() - idx) <= best.len() {
        return;
    }
    if idx == codes.len() {
        if current.len() > best.len() {
            *best = current.clone();
        }
        return;
    }
    let code = codes[idx];
    current.insert(code);
    if !creates_copy_with(p, current, code, induced) {
        dfs_free(p, induced, codes, idx + 1, current, best);
    }
    current.remove(code);
    dfs_free(p, induced, codes, idx + 1, current, best);
}

/// Dyadic approximation of n^(-gamma) with 32 fractional bits; keeps the
/// sampling probability an exact rational for reproducibility.
pub fn power_law_probability(n: u32, gamma: &BigRational) -> BigRational {
    let g = gamma.to_f64().expect("gamma fits in f64");
    let p = (n as f64).powf(-g).clamp(0.0, 1.0);
    let scaled = (p * (1u64 << 32) as f64).round() as u64;
    BigRational::new(BigInt::from(scaled), BigInt::from(1u64 << 32))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub poset: String,
    pub induced: bool,
    pub n: Vec<u32>,
    pub gamma: Vec<String>,
    pub seeds: Vec<u64>,
    pub p_mode: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub n: u32,
    pub gamma: String,
    pub p: String,
    pub seed: u64,
    pub size: u64,
    pub normalized: String,
    pub exact: bool,
    pub regime: String,
}

/// Observational table: for each ground size, exponent and seed, the
/// largest-free size divided by p * binom(n, n/2), annotated by which
/// side of the density exponent the row sits on.
pub fn threshold_sweep(
    poset: &Poset,
    induced: bool,
    ns: &[u32],
    gammas: &[BigRational],
    seeds: &[u64],
) -> Result<Vec<SweepRow>> {
    let mode = if induced {
        SubposetMode::Induced
    } else {
        SubposetMode::Weak
    };
    let d = density_exponent(poset, induced, mode)?;
    let mut jobs = Vec::new();
    for &n in ns {
        for gamma in gammas {
            for &seed in seeds {
                jobs.push((n, gamma.clone(), seed));
            }
        }
    }
    let rows = par::map_vec(&jobs, |(n, gamma, seed)| -> Result<SweepRow> {
        let p = power_law_probability(*n, gamma);
        let sample = sample_lattice(*n, &p, *seed)?;
        let outcome = largest_free_in_sample(&sample, poset, induced)?;
        let binom = BigRational::from_integer(crate::arith::middle_binomial(*n as u64).into());
        let denom = &p * &binom;
        let normalized = if denom.is_zero() {
            "inf".to_string()
        } else {
            (BigRational::from_integer((outcome.size as i64).into()) / denom).to_string()
        };
        let regime = match gamma.cmp(&d) {
            std::cmp::Ordering::Greater => "gamma>d",
            std::cmp::Ordering::Equal => "gamma=d",
            std::cmp::Ordering::Less => "gamma<d",
        };
        Ok(SweepRow {
            n: *n,
            gamma: gamma.to_string(),
            p: p.to_string(),
            seed: *seed,
            size: outcome.size,
            normalized,
            exact: outcome.exact,
            regime: regime.to_string(),
        })
    });
    rows.into_iter().collect()
}

pub fn sweep_rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("n,p,seed,size,normalized,exact_flag\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n, r.p, r.seed, r.size, r.normalized, r.exact
        ));
    }
    out
}
