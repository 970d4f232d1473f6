//! Kronecker-packed fast path for big polynomial products and divisions.
//!
//! A term's `t`-polynomial (integer coefficients over a part-wide common
//! denominator) packs into one big integer at base `2^b`; a monomial-pair
//! product is then a single big-integer multiplication, and accumulation is
//! big-integer addition. The base is chosen from operand bit bounds with
//! enough headroom that balanced unpacking is unambiguous; the division path
//! additionally re-verifies `q * den = num` before reporting success, so a
//! wrong headroom estimate degrades to the slow path, never to a wrong
//! answer.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::qt::{kronecker_pack, kronecker_unpack};
use super::{DiffAlgError, Mono, MultiPoly, QT};

/// Packed image of one part: uniform denominator, per-term packed integers.
struct PackedPart {
    terms: Vec<(Mono, i32, i32, BigInt)>,
    den: BigInt,
    max_bits: u64,
}

fn part_den(p: &MultiPoly) -> BigInt {
    let mut d = BigInt::one();
    for (_, q) in p.terms() {
        d = d.lcm(q.content_denom());
    }
    d
}

fn pack_part(p: &MultiPoly, b: u64, den: &BigInt) -> PackedPart {
    let mut terms = Vec::with_capacity(p.num_terms());
    let mut max_bits = 0;
    for (m, q) in p.terms() {
        max_bits = max_bits.max(q.scaled_bits(den));
        let (ints, tp, op) = q.scaled_ints(den);
        terms.push((*m, tp, op, kronecker_pack(&ints, b)));
    }
    PackedPart { terms, den: den.clone(), max_bits }
}

fn part_stats(p: &MultiPoly, den: &BigInt) -> (u64, usize) {
    let mut bits = 0;
    let mut len = 1;
    for (_, q) in p.terms() {
        bits = bits.max(q.scaled_bits(den));
        len = len.max(q.poly_len());
    }
    (bits, len)
}

fn ceil_log2(n: usize) -> u64 {
    (usize::BITS - n.next_power_of_two().leading_zeros()) as u64
}

/// Base for products of `a` and `b` terms accumulated at most `acc` times.
fn product_base(bits_a: u64, len_a: usize, bits_b: u64, len_b: usize, acc: usize) -> u64 {
    bits_a + bits_b + ceil_log2(len_a.min(len_b)) + ceil_log2(acc.max(2)) + 4
}

type Buckets = BTreeMap<(Mono, i32, i32), BigInt>;
type HashBuckets = rustc_hash::FxHashMap<(Mono, i32, i32), BigInt>;

fn unpack_into(buckets: HashBuckets, b: u64, den: &BigInt) -> MultiPoly {
    let mut out = MultiPoly::zero();
    for ((m, tp, op), n) in buckets {
        if n.is_zero() {
            continue;
        }
        let q = QT::from_scaled(kronecker_unpack(&n, b), tp, op, den);
        out.insert_add(m, q);
    }
    out
}

/// `a * b` through the packed representation.
pub(super) fn mul_packed(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if a.is_zero() || b.is_zero() {
        return MultiPoly::zero();
    }
    let t0 = std::time::Instant::now();
    let den_a = part_den(a);
    let den_b = part_den(b);
    let (bits_a, len_a) = part_stats(a, &den_a);
    let (bits_b, len_b) = part_stats(b, &den_b);
    let bb = product_base(bits_a, len_a, bits_b, len_b, a.num_terms().min(b.num_terms()));
    let pa = pack_part(a, bb, &den_a);
    let pb = pack_part(b, bb, &den_b);
    let t_pack = t0.elapsed();
    let den = &pa.den * &pb.den;
    let mut buckets: HashBuckets = HashBuckets::default();
    for (ma, ta, oa, na) in pa.terms.iter() {
        for (mb, tb, ob, nb) in pb.terms.iter() {
            let key = (ma.mul(mb), ta + tb, oa + ob);
            let prod = na * nb;
            *buckets.entry(key).or_default() += prod;
        }
    }
    let t_loop = t0.elapsed() - t_pack;
    let nb = buckets.len();
    let r = unpack_into(buckets, bb, &den);
    if std::env::var_os("ISING_MUL_DEBUG").is_some() {
        eprintln!(
            "[mul] {}x{} bb={bb} bits=({bits_a},{bits_b}) len=({len_a},{len_b}) buckets={nb}: pack {:.2?} loop {:.2?} unpack {:.2?}",
            a.num_terms(),
            b.num_terms(),
            t_pack,
            t_loop,
            t0.elapsed() - t_pack - t_loop
        );
    }
    r
}

/// `a * a`, halving the pair loop.
pub(super) fn square_packed(a: &MultiPoly) -> MultiPoly {
    if a.is_zero() {
        return MultiPoly::zero();
    }
    let den_a = part_den(a);
    let (bits_a, len_a) = part_stats(a, &den_a);
    let bb = product_base(bits_a, len_a, bits_a + 1, len_a, a.num_terms());
    let pa = pack_part(a, bb, &den_a);
    let den = &pa.den * &pa.den;
    let mut buckets: HashBuckets = HashBuckets::default();
    let mut push = |key: (Mono, i32, i32), prod: BigInt| {
        *buckets.entry(key).or_default() += prod;
    };
    for i in 0..pa.terms.len() {
        let (ma, ta, oa, na) = &pa.terms[i];
        push((ma.mul(ma), 2 * ta, 2 * oa), na * na);
        for (mb, tb, ob, nb) in pa.terms.iter().skip(i + 1) {
            push((ma.mul(mb), ta + tb, oa + ob), (na * nb) << 1);
        }
    }
    unpack_into(buckets, bb, &den)
}

/// Base estimate for a division of `num` by `den`.
pub(super) fn division_base(num: &MultiPoly, den: &MultiPoly) -> u64 {
    let den_num = part_den(num);
    let den_den = part_den(den);
    let (bits_n, len_n) = part_stats(num, &den_num);
    let (bits_d, len_d) = part_stats(den, &den_den);
    (bits_n.max(bits_d) + bits_d + ceil_log2(len_n.max(len_d)) + 96).max(128)
}

/// Exact division `num / den` carried out in packed form at base `2^bb`.
///
/// The remainder lives in buckets over a dynamic denominator `d_rem`; when a
/// leading-coefficient division introduces a new denominator factor, all
/// buckets are rescaled. Returns `None` if the packed run exceeds its bit
/// budget (caller retries at a larger base or falls back) and `Err` when the
/// quotient provably leaves the ring.
pub(super) fn exact_div_packed(
    num: &MultiPoly,
    den: &MultiPoly,
    bb: u64,
) -> Option<Result<MultiPoly, DiffAlgError>> {
    let (dm, dc) = match den.leading() {
        Some(l) => l,
        None => return Some(Err(DiffAlgError::ZeroDivisor)),
    };
    if num.is_zero() {
        return Some(Ok(MultiPoly::zero()));
    }
    let den_num = part_den(num);
    let den_den = part_den(den);
    let pd = pack_part(den, bb, &den_den);
    let mut rem: Buckets = BTreeMap::new();
    for (m, tp, op, n) in pack_part(num, bb, &den_num).terms {
        rem.insert((m, tp, op), n);
    }
    let mut d_rem = den_num.clone();
    let mut q = MultiPoly::zero();
    while let Some((&(rm, _, _), _)) = rem.iter().next_back() {
        // gather every bucket of the leading monomial into one QT
        let lo = (rm, i32::MIN, i32::MIN);
        let hi = (rm, i32::MAX, i32::MAX);
        let mut lt = QT::zero();
        let keys: Vec<(Mono, i32, i32)> = rem.range(lo..=hi).map(|(k, _)| *k).collect();
        for k in &keys {
            let n = rem.remove(k).unwrap();
            let piece = QT::from_scaled(kronecker_unpack(&n, bb), k.1, k.2, &d_rem);
            lt = lt.add(&piece);
        }
        if lt.is_zero() {
            continue;
        }
        let qm = match rm.try_div(dm) {
            Some(m) => m,
            None => return Some(Err(DiffAlgError::NotDivisible)),
        };
        let qc = match lt.div_rational(dc) {
            Some(c) => c,
            None => return Some(Err(DiffAlgError::NotDivisible)),
        };
        // the upcoming subtractions have denominator den(qc) * den(den);
        // rescale the remainder when it needs refining
        let needed = qc.content_denom() * &pd.den;
        let new_den = d_rem.lcm(&needed);
        if new_den != d_rem {
            let f = &new_den / &d_rem;
            for v in rem.values_mut() {
                *v *= &f;
            }
            d_rem = new_den;
        }
        let scale = &d_rem / &needed;
        // per-digit growth bound: abort (caller widens the base) before a
        // subtraction product could overflow its digit
        if qc.scaled_bits(qc.content_denom()) + pd.max_bits + scale.bits() + 48 > bb {
            return None;
        }
        let (q_ints, qtp, qop) = qc.scaled_ints(qc.content_denom());
        let qn = kronecker_pack(&q_ints, bb);
        // the leading den term cancels the removed leading buckets exactly;
        // subtract only the tail
        for (m2, t2, o2, n2) in pd.terms.iter().take(pd.terms.len() - 1) {
            let key = (qm.mul(m2), qtp + t2, qop + o2);
            let sub = &qn * n2 * &scale;
            match rem.entry(key) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(-sub);
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    *o.get_mut() -= sub;
                    if o.get().is_zero() {
                        o.remove();
                    }
                }
            }
        }
        q.insert_add(qm, qc);
    }
    Some(Ok(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{rat, ratio};
    use crate::diffalg::Mono;

    fn make_poly(seed: u64, terms: usize) -> MultiPoly {
        // deterministic pseudo-random polynomial over the Toda generators
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as i64
        };
        let mut p = MultiPoly::zero();
        for _ in 0..terms {
            let m = Mono {
                s: (next().unsigned_abs() % 6) as u8,
                x: (next().unsigned_abs() % 6) as u8,
                k: 0,
                e: 0,
                v: 0,
            };
            let num = next() % 1000 - 500;
            let den = 1 + next().unsigned_abs() % 24;
            let tp = (next() % 3 - 1) as i32;
            let op = (next() % 2 - 1) as i32;
            let c = QT::from_poly(
                &[ratio(num, den as i64), ratio(next() % 50, 1 + next().unsigned_abs() as i64 % 8), rat(next() % 20)],
                tp,
                op,
            );
            p.insert_add(m, c);
        }
        p
    }

    #[test]
    fn packed_mul_matches_naive() {
        let a = make_poly(7, 40);
        let b = make_poly(13, 35);
        let naive = a.mul_naive(&b);
        let packed = mul_packed(&a, &b);
        assert_eq!(naive, packed);
        let sq = square_packed(&a);
        assert_eq!(sq, a.mul_naive(&a));
    }

    #[test]
    fn packed_div_roundtrip() {
        let a = make_poly(3, 30);
        let b = make_poly(29, 20);
        let prod = mul_packed(&a, &b);
        // generous base: no fallback needed
        let bb = division_base(&prod, &b) + 2048;
        let q = exact_div_packed(&prod, &b, bb).expect("within budget").expect("divisible");
        assert_eq!(q, a);
        // the public dispatcher (estimate + retry + verify) agrees
        assert_eq!(prod.exact_div(&b).unwrap(), a);
        // genuine non-divisibility is reported, not mangled
        let bad = prod.add(&MultiPoly::monomial(Mono { s: 1, ..Mono::ONE }, QT::one()));
        assert!(matches!(bad.exact_div(&b), Err(DiffAlgError::NotDivisible)));
    }

    #[test]
    fn kronecker_roundtrip() {
        use num_bigint::BigInt;
        let p: Vec<BigInt> = [-3i64, 0, 17, -250, 1, 0, -1].iter().map(|&c| BigInt::from(c)).collect();
        let packed = kronecker_pack(&p, 16);
        let mut un = kronecker_unpack(&packed, 16);
        while un.last().map(|c| c == &BigInt::from(0)).unwrap_or(false) {
            un.pop();
        }
        assert_eq!(un, p);
    }
}
