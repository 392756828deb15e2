//! Bit-level lowering of expressions. Vectors are LSB first; all
//! arithmetic is unsigned and wraps at the operand width.

use alloc::format;
use alloc::vec::Vec;

use super::ast::{BinaryOp, Expr, UnaryOp};
use super::lexer::Pos;
use super::HdlError;
use crate::ts::Formula;

pub(crate) type Bits = Vec<Formula>;

/// A named signal as seen by expressions: its bits and the index of bit 0.
#[derive(Debug, Clone)]
pub(crate) struct SigRef {
    pub bits: Bits,
    pub lsb: i64,
}

pub(crate) type Lookup<'a> = dyn FnMut(&str, Pos) -> Result<SigRef, HdlError> + 'a;

pub(crate) const UNSIZED_WIDTH: usize = 32;

pub(crate) fn constant_bits(value: u64, width: usize) -> Bits {
    (0..width).map(|i| Formula::constant(i < 64 && (value >> i) & 1 == 1)).collect()
}

/// Value of a fully constant vector, if it fits in 64 bits.
pub(crate) fn const_value(bits: &[Formula]) -> Option<u64> {
    let mut v = 0u64;
    for (i, b) in bits.iter().enumerate() {
        let bit = b.as_const()?;
        if bit {
            if i >= 64 {
                return None;
            }
            v |= 1 << i;
        }
    }
    Some(v)
}

pub(crate) fn resize(mut bits: Bits, width: usize) -> Bits {
    bits.resize(width, Formula::ff());
    bits
}

pub(crate) fn reduce_or(bits: &[Formula]) -> Formula {
    Formula::or_all(bits.iter().cloned())
}

fn add(a: &[Formula], b: &[Formula], carry_in: Formula) -> Bits {
    let mut carry = carry_in;
    let mut out = Vec::with_capacity(a.len());
    for (x, y) in a.iter().zip(b) {
        let p = x.xor(y);
        out.push(p.xor(&carry));
        carry = x.and(y).or(&carry.and(&p));
    }
    out
}

/// `a - b` and the borrow-free flag (`a >= b`).
fn sub(a: &[Formula], b: &[Formula]) -> (Bits, Formula) {
    let mut carry = Formula::tt();
    let mut out = Vec::with_capacity(a.len());
    for (x, y) in a.iter().zip(b) {
        let ny = y.not();
        let p = x.xor(&ny);
        out.push(p.xor(&carry));
        carry = x.and(&ny).or(&carry.and(&p));
    }
    (out, carry)
}

fn mul(a: &[Formula], b: &[Formula]) -> Bits {
    let w = a.len();
    let mut acc = constant_bits(0, w);
    for (i, bi) in b.iter().enumerate().take(w) {
        if bi.is_false() {
            continue;
        }
        let shifted: Bits = (0..w).map(|j| if j >= i { a[j - i].and(bi) } else { Formula::ff() }).collect();
        acc = add(&acc, &shifted, Formula::ff());
    }
    acc
}

fn equal(a: &[Formula], b: &[Formula]) -> Formula {
    Formula::and_all(a.iter().zip(b).map(|(x, y)| x.iff(y)))
}

fn shift(value: &[Formula], amount: &[Formula], left: bool) -> Bits {
    let w = value.len();
    let shift_const = |v: &[Formula], k: usize| -> Bits {
        (0..w)
            .map(|j| {
                let src = if left { j.checked_sub(k) } else { Some(j + k).filter(|&s| s < w) };
                src.map(|s| v[s].clone()).unwrap_or_else(Formula::ff)
            })
            .collect()
    };
    if let Some(k) = const_value(amount) {
        return shift_const(value, k.min(w as u64) as usize);
    }
    let mut cur: Bits = value.to_vec();
    for (i, bit) in amount.iter().enumerate() {
        let k = if i < 32 { 1usize << i } else { usize::MAX };
        let shifted = if k >= w { constant_bits(0, w) } else { shift_const(&cur, k) };
        cur = cur.iter().zip(&shifted).map(|(c, s)| Formula::ite(bit, s, c)).collect();
    }
    cur
}

fn const_index(e: &Expr, lookup: &mut Lookup<'_>, what: &str) -> Result<i64, HdlError> {
    let bits = lower(e, 0, lookup)?;
    const_value(&bits)
        .map(|v| v as i64)
        .ok_or_else(|| HdlError::Elaboration(format!("{what} must be a constant expression, found `{e}`")))
}

fn bit_at(sig: &SigRef, index: i64, name: &str) -> Result<Formula, HdlError> {
    let off = index - sig.lsb;
    if off < 0 || off as usize >= sig.bits.len() {
        return Err(HdlError::Elaboration(format!("index {index} out of range for `{name}`")));
    }
    Ok(sig.bits[off as usize].clone())
}

/// Lower `e` to bits. `ctx` is the context width arithmetic operands are
/// extended to before evaluation (0 for self-determined).
pub(crate) fn lower(e: &Expr, ctx: usize, lookup: &mut Lookup<'_>) -> Result<Bits, HdlError> {
    Ok(match e {
        Expr::Number { width, value } => {
            let w = match width {
                Some(w) => *w as usize,
                None if *value >> UNSIZED_WIDTH != 0 => 64,
                None => UNSIZED_WIDTH,
            };
            constant_bits(*value, w)
        }
        Expr::Ident(name, pos) => lookup(name, *pos)?.bits,
        Expr::Index(name, idx, pos) => {
            let sig = lookup(name, *pos)?;
            let ib = lower(idx, 0, lookup)?;
            match const_value(&ib) {
                Some(i) => alloc::vec![bit_at(&sig, i as i64, name)?],
                None => {
                    let mut acc = Formula::ff();
                    for (off, bit) in sig.bits.iter().enumerate() {
                        let k = sig.lsb + off as i64;
                        if k < 0 {
                            continue;
                        }
                        let w = ib.len().max(64);
                        let hit = equal(&resize(ib.clone(), w), &constant_bits(k as u64, w));
                        acc = Formula::ite(&hit, bit, &acc);
                    }
                    alloc::vec![acc]
                }
            }
        }
        Expr::Slice(name, hi, lo, pos) => {
            let sig = lookup(name, *pos)?;
            let hi = const_index(hi, lookup, "slice bound")?;
            let lo = const_index(lo, lookup, "slice bound")?;
            let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
            (lo..=hi).map(|i| bit_at(&sig, i, name)).collect::<Result<_, _>>()?
        }
        Expr::Concat(items) => {
            let mut out = Vec::new();
            for item in items.iter().rev() {
                out.extend(lower(item, 0, lookup)?);
            }
            out
        }
        Expr::Replicate(count, items) => {
            let n = const_index(count, lookup, "replication count")?;
            let mut unit = Vec::new();
            for item in items.iter().rev() {
                unit.extend(lower(item, 0, lookup)?);
            }
            let mut out = Vec::new();
            for _ in 0..n.max(0) {
                out.extend(unit.iter().cloned());
            }
            out
        }
        Expr::Unary(op, a) => match op {
            UnaryOp::LogNot => alloc::vec![reduce_or(&lower(a, 0, lookup)?).not()],
            UnaryOp::RedOr => alloc::vec![reduce_or(&lower(a, 0, lookup)?)],
            UnaryOp::RedNor => alloc::vec![reduce_or(&lower(a, 0, lookup)?).not()],
            UnaryOp::RedAnd => alloc::vec![Formula::and_all(lower(a, 0, lookup)?)],
            UnaryOp::RedNand => alloc::vec![Formula::and_all(lower(a, 0, lookup)?).not()],
            UnaryOp::RedXor | UnaryOp::RedXnor => {
                let bits = lower(a, 0, lookup)?;
                let x = bits.iter().fold(Formula::ff(), |acc, b| acc.xor(b));
                alloc::vec![if *op == UnaryOp::RedXor { x } else { x.not() }]
            }
            UnaryOp::BitNot => {
                let bits = lower(a, ctx, lookup)?;
                let w = bits.len().max(ctx);
                resize(bits, w).iter().map(|b| b.not()).collect()
            }
            UnaryOp::Plus => {
                let bits = lower(a, ctx, lookup)?;
                let w = bits.len().max(ctx);
                resize(bits, w)
            }
            UnaryOp::Neg => {
                let bits = lower(a, ctx, lookup)?;
                let w = bits.len().max(ctx);
                sub(&constant_bits(0, w), &resize(bits, w)).0
            }
        },
        Expr::Binary(op, a, b) => lower_binary(*op, a, b, ctx, lookup)?,
        Expr::Ternary(c, t, f) => {
            let cond = reduce_or(&lower(c, 0, lookup)?);
            let tb = lower(t, ctx, lookup)?;
            let fb = lower(f, ctx, lookup)?;
            let w = tb.len().max(fb.len()).max(ctx);
            let (tb, fb) = (resize(tb, w), resize(fb, w));
            tb.iter().zip(&fb).map(|(x, y)| Formula::ite(&cond, x, y)).collect()
        }
    })
}

fn lower_binary(op: BinaryOp, a: &Expr, b: &Expr, ctx: usize, lookup: &mut Lookup<'_>) -> Result<Bits, HdlError> {
    use BinaryOp::*;
    Ok(match op {
        LogAnd | LogOr | LogImpl | LogEquiv => {
            let x = reduce_or(&lower(a, 0, lookup)?);
            let y = reduce_or(&lower(b, 0, lookup)?);
            alloc::vec![match op {
                LogAnd => x.and(&y),
                LogOr => x.or(&y),
                LogImpl => x.implies(&y),
                _ => x.iff(&y),
            }]
        }
        Eq | Ne | Lt | Le | Gt | Ge => {
            let w = lower(a, 0, lookup)?.len().max(lower(b, 0, lookup)?.len());
            let x = resize(lower(a, w, lookup)?, w);
            let y = resize(lower(b, w, lookup)?, w);
            alloc::vec![match op {
                Eq => equal(&x, &y),
                Ne => equal(&x, &y).not(),
                Ge => sub(&x, &y).1,
                Lt => sub(&x, &y).1.not(),
                Le => sub(&y, &x).1,
                _ => sub(&y, &x).1.not(),
            }]
        }
        Shl | Shr => {
            let v = lower(a, ctx, lookup)?;
            let w = v.len().max(ctx);
            let amount = lower(b, 0, lookup)?;
            shift(&resize(v, w), &amount, op == Shl)
        }
        Add | Sub | Mul | BitAnd | BitOr | BitXor | BitXnor => {
            let x = lower(a, ctx, lookup)?;
            let y = lower(b, ctx, lookup)?;
            let w = x.len().max(y.len()).max(ctx);
            let (x, y) = (resize(x, w), resize(y, w));
            match op {
                Add => add(&x, &y, Formula::ff()),
                Sub => sub(&x, &y).0,
                Mul => mul(&x, &y),
                BitAnd => x.iter().zip(&y).map(|(p, q)| p.and(q)).collect(),
                BitOr => x.iter().zip(&y).map(|(p, q)| p.or(q)).collect(),
                BitXor => x.iter().zip(&y).map(|(p, q)| p.xor(q)).collect(),
                _ => x.iter().zip(&y).map(|(p, q)| p.iff(q)).collect(),
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hdl::parser::Parser;
    use crate::hdl::tokenize;

    fn eval_const(src: &str) -> u64 {
        let mut p = Parser::new(tokenize(src).unwrap());
        let e = p.expr().unwrap();
        let mut none = |n: &str, _p: Pos| -> Result<SigRef, HdlError> { Err(HdlError::Elaboration(n.into())) };
        const_value(&lower(&e, 0, &mut none).unwrap()).unwrap()
    }

    #[test]
    fn constant_arithmetic_wraps_at_width() {
        assert_eq!(eval_const("2'd3 + 2'd1"), 0);
        assert_eq!(eval_const("3 + 4"), 7);
        assert_eq!(eval_const("4'd2 - 4'd3"), 15);
        assert_eq!(eval_const("5 * 6"), 30);
        assert_eq!(eval_const("1 << 4"), 16);
        assert_eq!(eval_const("{2'b10, 2'b01}"), 9);
        assert_eq!(eval_const("{3{1'b1}}"), 7);
    }

    #[test]
    fn comparisons_are_unsigned() {
        assert_eq!(eval_const("3 < 4"), 1);
        assert_eq!(eval_const("4'd15 > 4'd3"), 1);
        assert_eq!(eval_const("2 >= 2"), 1);
        assert_eq!(eval_const("2 <= 1"), 0);
        assert_eq!(eval_const("1 ? 5 : 6"), 5);
        assert_eq!(eval_const("!(3 == 3) || 0"), 0);
    }
}
