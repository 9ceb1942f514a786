#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use revtree::{parse_expr, TreeExpr};

const ORDINALS: &[&str] = &["1", "2", "3", "w", "w + 1", "w + 2", "w*2", "w*2 + 1"];
const SMALL_ORDINALS: &[&str] = &["1", "2", "3", "w", "w + 1"];
const BRANCHING: &[&str] = &["1", "2", "3", "w"];
const MULTS: &[&str] = &["1", "2", "3", "w"];

fn pick<'a>(rng: &mut StdRng, xs: &[&'a str]) -> &'a str {
    xs.choose(rng).unwrap()
}

/// A connected expression of nesting depth at most `depth`.
fn connected(rng: &mut StdRng, depth: usize) -> String {
    let roll = if depth <= 1 {
        rng.gen_range(0..2)
    } else {
        rng.gen_range(0..4)
    };
    match roll {
        0 => format!("chain({})", pick(rng, ORDINALS)),
        1 => format!("kary({}, {})", pick(rng, BRANCHING), pick(rng, ORDINALS)),
        2 => format!(
            "sum({}, {})",
            pick(rng, SMALL_ORDINALS),
            any_expr(rng, depth - 1)
        ),
        _ => format!("root({})", any_expr(rng, depth - 1)),
    }
}

/// Any expression of nesting depth at most `depth`.
fn any_expr(rng: &mut StdRng, depth: usize) -> String {
    match rng.gen_range(0..10) {
        0 => format!("delta({})", pick(rng, &["1", "2", "w"])),
        1..=4 if depth > 1 => {
            let n = rng.gen_range(1..=3);
            let parts: Vec<String> = (0..n)
                .map(|_| format!("{}: {}", pick(rng, MULTS), connected(rng, depth - 1)))
                .collect();
            format!("union{{ {} }}", parts.join(", "))
        }
        _ => connected(rng, depth),
    }
}

/// Source text of a random expression of depth at most `depth`.
pub fn random_text(rng: &mut StdRng, depth: usize) -> String {
    any_expr(rng, depth)
}

/// `count` random parseable expressions of depth at most `depth`, from `seed`.
pub fn random_exprs(seed: u64, count: usize, depth: usize) -> Vec<TreeExpr> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let text = random_text(&mut rng, depth);
        if let Ok(e) = parse_expr(&text) {
            if revtree::expr::try_normalize(&e).is_ok() {
                out.push(e);
            }
        }
    }
    out
}

pub fn expr_from_seed(seed: u64, depth: usize) -> TreeExpr {
    random_exprs(seed, 1, depth).pop().unwrap()
}

pub fn e(text: &str) -> TreeExpr {
    revtree::normalize(&parse_expr(text).unwrap())
}
