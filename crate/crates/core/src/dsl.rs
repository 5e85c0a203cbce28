//! A small language for decorated symmetric cobordisms.
//!
//! ```text
//! expr   := term { "." term }
//! term   := factor { ("⊗" | "*") factor }
//! factor := generator [ "(" int "," int ")" ] | "(" expr ")" | "id" "(" int ")"
//! ```
//!
//! `a . b` applies `b` first. Levels are allowed on `cap` and `tube` only.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::ring::Scalar;
use crate::tqft::{Basis, Context, Generator, TqftOperator};

/// Parsed expression; `pos` is the character offset of the node's first token
/// (or of the operator, for binary nodes). Equality ignores positions.
#[derive(Clone, Debug)]
pub enum CobExpr {
    Gen { gen: Generator, level: Option<(i64, i64)>, pos: usize },
    Identity { n: usize, pos: usize },
    /// `left ∘ right`.
    Compose { left: Box<CobExpr>, right: Box<CobExpr>, pos: usize },
    Tensor { left: Box<CobExpr>, right: Box<CobExpr>, pos: usize },
}

impl PartialEq for CobExpr {
    fn eq(&self, o: &CobExpr) -> bool {
        use CobExpr::*;
        match (self, o) {
            (Gen { gen: a, level: la, .. }, Gen { gen: b, level: lb, .. }) => a == b && la == lb,
            (Identity { n: a, .. }, Identity { n: b, .. }) => a == b,
            (Compose { left: a, right: b, .. }, Compose { left: c, right: d, .. })
            | (Tensor { left: a, right: b, .. }, Tensor { left: c, right: d, .. }) => a == c && b == d,
            _ => false,
        }
    }
}

impl Eq for CobExpr {}

impl CobExpr {
    pub fn generator(gen: Generator) -> CobExpr {
        CobExpr::Gen { gen, level: None, pos: 0 }
    }

    pub fn leveled(gen: Generator, a: i64, b: i64) -> CobExpr {
        CobExpr::Gen { gen, level: Some((a, b)), pos: 0 }
    }

    pub fn identity(n: usize) -> CobExpr {
        CobExpr::Identity { n, pos: 0 }
    }

    pub fn compose(left: CobExpr, right: CobExpr) -> CobExpr {
        CobExpr::Compose { left: Box::new(left), right: Box::new(right), pos: 0 }
    }

    pub fn tensor(left: CobExpr, right: CobExpr) -> CobExpr {
        CobExpr::Tensor { left: Box::new(left), right: Box::new(right), pos: 0 }
    }

    pub fn pos(&self) -> usize {
        match self {
            CobExpr::Gen { pos, .. }
            | CobExpr::Identity { pos, .. }
            | CobExpr::Compose { pos, .. }
            | CobExpr::Tensor { pos, .. } => *pos,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            CobExpr::Gen { .. } | CobExpr::Identity { .. } => 1,
            CobExpr::Compose { left, right, .. } | CobExpr::Tensor { left, right, .. } => {
                1 + left.size() + right.size()
            }
        }
    }
}

// Canonical printing: composition chains nest to the right, tensor chains to
// the left, so parse(print(e)) == e.
impl fmt::Display for CobExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CobExpr::Gen { gen, level: None, .. } => write!(f, "{gen}"),
            CobExpr::Gen { gen, level: Some((a, b)), .. } => write!(f, "{gen}({a},{b})"),
            CobExpr::Identity { n, .. } => write!(f, "id({n})"),
            CobExpr::Compose { left, right, .. } => {
                if matches!(**left, CobExpr::Compose { .. }) {
                    write!(f, "({left}) . {right}")
                } else {
                    write!(f, "{left} . {right}")
                }
            }
            CobExpr::Tensor { left, right, .. } => {
                if matches!(**left, CobExpr::Compose { .. }) {
                    write!(f, "({left})")?;
                } else {
                    write!(f, "{left}")?;
                }
                if matches!(**right, CobExpr::Gen { .. } | CobExpr::Identity { .. }) {
                    write!(f, " ⊗ {right}")
                } else {
                    write!(f, " ⊗ ({right})")
                }
            }
        }
    }
}

// ---- lexer ----------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    LParen,
    RParen,
    Comma,
    Dot,
    Tensor,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => out.push((Tok::LParen, i)),
            ')' => out.push((Tok::RParen, i)),
            ',' => out.push((Tok::Comma, i)),
            '.' => out.push((Tok::Dot, i)),
            '*' | '⊗' => out.push((Tok::Tensor, i)),
            '-' | '−' | '0'..='9' => {
                let positive = c != '-' && c != '−';
                let mut j = if positive { i } else { i + 1 };
                let digits_start = j;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j == digits_start {
                    return Err(Error::Parse { pos: start, msg: "expected digits after '-'".into() });
                }
                let s: String = chars[digits_start..j].iter().collect();
                let v: i64 = s
                    .parse()
                    .map_err(|_| Error::Parse { pos: start, msg: format!("integer {s} out of range") })?;
                out.push((Tok::Int(if positive { v } else { -v }), start));
                i = j;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                out.push((Tok::Ident(chars[i..j].iter().collect()), start));
                i = j;
                continue;
            }
            other => {
                return Err(Error::Parse { pos: start, msg: format!("unexpected character {other:?}") })
            }
        }
        i += 1;
    }
    out.push((Tok::End, chars.len()));
    Ok(out)
}

// ---- parser ---------------------------------------------------------------

struct Parser {
    toks: Vec<(Tok, usize)>,
    i: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn pos(&self) -> usize {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(Error::Parse { pos: self.pos(), msg: format!("expected {what}") })
        }
    }

    fn int(&mut self) -> Result<i64> {
        match self.bump() {
            (Tok::Int(v), _) => Ok(v),
            (_, pos) => Err(Error::Parse { pos, msg: "expected an integer".into() }),
        }
    }

    fn expr(&mut self) -> Result<CobExpr> {
        let mut terms = vec![self.term()?];
        let mut ops = Vec::new();
        while *self.peek() == Tok::Dot {
            ops.push(self.bump().1);
            terms.push(self.term()?);
        }
        // Right-nested: a . b . c = a ∘ (b ∘ c).
        let mut acc = terms.pop().unwrap();
        while let Some(left) = terms.pop() {
            let pos = ops.pop().unwrap();
            acc = CobExpr::Compose { left: Box::new(left), right: Box::new(acc), pos };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<CobExpr> {
        let mut acc = self.factor()?;
        while *self.peek() == Tok::Tensor {
            let pos = self.bump().1;
            let right = self.factor()?;
            acc = CobExpr::Tensor { left: Box::new(acc), right: Box::new(right), pos };
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<CobExpr> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Ident(name) if name == "id" => {
                self.expect(Tok::LParen, "'(' after id")?;
                let n = self.int()?;
                self.expect(Tok::RParen, "')'")?;
                if n < 0 {
                    return Err(Error::Parse { pos, msg: "id needs a non-negative arity".into() });
                }
                Ok(CobExpr::Identity { n: n as usize, pos })
            }
            Tok::Ident(name) => {
                let gen: Generator = name
                    .parse()
                    .map_err(|_| Error::Parse { pos, msg: format!("unknown generator {name:?}") })?;
                let mut level = None;
                if gen.accepts_level() && *self.peek() == Tok::LParen {
                    self.bump();
                    let a = self.int()?;
                    self.expect(Tok::Comma, "','")?;
                    let b = self.int()?;
                    self.expect(Tok::RParen, "')'")?;
                    level = Some((a, b));
                } else if *self.peek() == Tok::LParen {
                    return Err(Error::Parse { pos: self.pos(), msg: format!("{gen} does not take a level") });
                }
                Ok(CobExpr::Gen { gen, level, pos })
            }
            Tok::End => Err(Error::Parse { pos, msg: "unexpected end of input".into() }),
            other => Err(Error::Parse { pos, msg: format!("unexpected {other:?}") }),
        }
    }
}

pub fn parse(text: &str) -> Result<CobExpr> {
    let mut p = Parser { toks: lex(text)?, i: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(Error::Parse { pos: p.pos(), msg: "trailing input".into() });
    }
    Ok(e)
}

// ---- typing and evaluation -------------------------------------------------

/// `(inputs, outputs)`, or an arity error located at the offending node.
pub fn typecheck(e: &CobExpr) -> Result<(usize, usize)> {
    match e {
        CobExpr::Gen { gen, level, pos } => {
            if level.is_some() && !gen.accepts_level() {
                return Err(Error::Arity { pos: *pos, msg: format!("{gen} does not take a level") });
            }
            Ok(gen.arity())
        }
        CobExpr::Identity { n, .. } => Ok((*n, *n)),
        CobExpr::Compose { left, right, pos } => {
            let (li, lo) = typecheck(left)?;
            let (ri, ro) = typecheck(right)?;
            if ro != li {
                return Err(Error::Arity {
                    pos: *pos,
                    msg: format!("{left} takes {li} circle(s) but {right} produces {ro}"),
                });
            }
            Ok((ri, lo))
        }
        CobExpr::Tensor { left, right, .. } => {
            let (li, lo) = typecheck(left)?;
            let (ri, ro) = typecheck(right)?;
            Ok((li + ri, lo + ro))
        }
    }
}

#[derive(Clone, Debug)]
pub enum Evaluated {
    Operator(TqftOperator),
    Scalar(Scalar),
}

/// Operator of a well-typed expression, built in `basis`.
pub fn evaluate_operator(e: &CobExpr, ctx: &Context, basis: Basis) -> Result<TqftOperator> {
    typecheck(e)?;
    eval(e, ctx, basis)
}

fn eval(e: &CobExpr, ctx: &Context, basis: Basis) -> Result<TqftOperator> {
    Ok(match e {
        CobExpr::Gen { gen, level, .. } => ctx.operator_in_basis(&ctx.elementary(*gen, *level)?, basis),
        CobExpr::Identity { n, .. } => ctx.operator_in_basis(&ctx.identity(*n), basis),
        CobExpr::Compose { left, right, .. } => eval(left, ctx, basis)?.compose(&eval(right, ctx, basis)?)?,
        CobExpr::Tensor { left, right, .. } => eval(left, ctx, basis)?.tensor(&eval(right, ctx, basis)?)?,
    })
}

/// Closed expressions evaluate to a scalar, the rest to an idempotent-basis operator.
pub fn evaluate(e: &CobExpr, ctx: &Context) -> Result<Evaluated> {
    let op = evaluate_operator(e, ctx, Basis::Idempotent)?;
    Ok(match op.as_scalar() {
        Some(s) => Evaluated::Scalar(s),
        None => Evaluated::Operator(op),
    })
}

// ---- random expressions ----------------------------------------------------

/// Random well-typed expression with `n_in` inputs; no intermediate boundary
/// exceeds `max_arity` circles.
pub fn random_expr<R: Rng>(rng: &mut R, n_in: usize, depth: u32, max_arity: usize) -> CobExpr {
    if depth == 0 || rng.gen_bool(0.3) {
        return random_leaf(rng, n_in, max_arity);
    }
    if n_in >= 2 && rng.gen_bool(0.3) {
        let a = rng.gen_range(1..n_in);
        let l = random_expr(rng, a, depth - 1, max_arity.saturating_sub(n_in - a).max(1));
        let (_, lo) = typecheck(&l).unwrap();
        let r = random_expr(rng, n_in - a, depth - 1, max_arity.saturating_sub(lo).max(1));
        let e = CobExpr::tensor(l, r);
        if typecheck(&e).unwrap().1 <= max_arity {
            return e;
        }
        return random_leaf(rng, n_in, max_arity);
    }
    let inner = random_expr(rng, n_in, depth - 1, max_arity);
    let (_, mid) = typecheck(&inner).unwrap();
    CobExpr::compose(random_expr(rng, mid, depth - 1, max_arity), inner)
}

fn random_leaf<R: Rng>(rng: &mut R, n_in: usize, max_arity: usize) -> CobExpr {
    let gens: Vec<Generator> = Generator::ALL
        .iter()
        .copied()
        .filter(|g| g.arity().0 == n_in && g.arity().1 <= max_arity)
        .collect();
    if gens.is_empty() || rng.gen_bool(0.15) {
        // Pad with identities around a generator acting on the first circles.
        if n_in >= 2 && rng.gen_bool(0.7) {
            let a = rng.gen_range(1..n_in);
            let l = random_leaf(rng, a, max_arity.saturating_sub(n_in - a).max(1));
            return CobExpr::tensor(l, CobExpr::identity(n_in - a));
        }
        return CobExpr::identity(n_in);
    }
    let gen = gens[rng.gen_range(0..gens.len())];
    if gen.accepts_level() && rng.gen_bool(0.5) {
        CobExpr::leveled(gen, rng.gen_range(-1..=1), rng.gen_range(-1..=1))
    } else {
        CobExpr::generator(gen)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn scalar(text: &str, d: usize) -> Scalar {
        match evaluate(&parse(text).unwrap(), &Context::new(d).unwrap()).unwrap() {
            Evaluated::Scalar(s) => s,
            Evaluated::Operator(op) => panic!("{text} is not closed: {op:?}"),
        }
    }

    #[test]
    fn parses_examples() {
        let e = parse("cup . K . xcap").unwrap();
        assert_eq!(
            e,
            CobExpr::compose(
                CobExpr::generator(Generator::Cup),
                CobExpr::compose(CobExpr::generator(Generator::K), CobExpr::generator(Generator::Xcap))
            )
        );
        assert_eq!(parse("tube(-1,0)").unwrap(), CobExpr::leveled(Generator::Tube, -1, 0));
        assert_eq!(parse("tube(−1, 0)").unwrap(), CobExpr::leveled(Generator::Tube, -1, 0));
        assert_eq!(parse("xcap * xcap").unwrap(), parse("xcap ⊗ xcap").unwrap());
        assert_eq!(typecheck(&parse("pants . copants").unwrap()).unwrap(), (2, 2));
        assert_eq!(typecheck(&parse("cap").unwrap()).unwrap(), (0, 1));
        assert_eq!(typecheck(&parse("cup . cap").unwrap()).unwrap(), (0, 0));
        assert_eq!(typecheck(&parse("id(2) . twist").unwrap()).unwrap(), (2, 2));
    }

    #[test]
    fn reports_positions() {
        assert!(matches!(parse("cup . "), Err(Error::Parse { pos: 6, .. })));
        assert!(matches!(parse("cup . frob"), Err(Error::Parse { pos: 6, .. })));
        assert!(matches!(parse("K(1,0)"), Err(Error::Parse { pos: 1, .. })));
        assert!(matches!(parse("cap # cup"), Err(Error::Parse { pos: 4, .. })));
        assert!(matches!(parse("(cap"), Err(Error::Parse { pos: 4, .. })));
        assert!(matches!(typecheck(&parse("cup . pants").unwrap()), Err(Error::Arity { pos: 4, .. })));
    }

    #[test]
    fn closed_examples() {
        assert_eq!(scalar("cup . K . xcap", 3), Scalar::integer(1));
        assert_eq!(scalar("cup . cap", 2), Scalar::t_monomial(-4, crate::ring::ratio(1, 2)));
        let ctx = Context::new(4).unwrap();
        assert!(scalar("cup . K . K . xcap", 4).agrees(&ctx.closed_invariant(2, 0).unwrap()));
    }

    #[test]
    fn klein_relations() {
        for d in 1..=4 {
            let ctx = Context::new(d).unwrap();
            let op = |t: &str| evaluate_operator(&parse(t).unwrap(), &ctx, Basis::Idempotent).unwrap();
            // A puncture carried around the Möbius band.
            assert!(op("omega . copants . (xcap ⊗ id(1))").agrees(&op("copants . (xcap ⊗ id(1))")));
            // Two crosscaps make a punctured Klein bottle.
            assert!(op("copants . (xcap ⊗ xcap)").agrees(&op("copants . (id(1) ⊗ omega) . pants . cap")));
        }
    }

    #[test]
    fn print_parse_roundtrip() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..300 {
            let n = rng.gen_range(0..=2);
            let e = random_expr(&mut rng, n, 4, 3);
            let (i, o) = typecheck(&e).unwrap();
            assert_eq!(i, n);
            assert!(o <= 3);
            assert_eq!(parse(&e.to_string()).unwrap(), e, "{e}");
        }
    }
}
