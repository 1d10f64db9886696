//! Closures of braid words, used as a source of valid planar test diagrams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Arc, CrossingId, Endpoint, LinkDiagram, LinkError, Sign, Slot};

/// `σ_i` for positive values, `σ_i^{-1}` for negative ones (1-based).
pub type BraidGenerator = i32;

/// Builds the closure of `word` on `strands` strands.
///
/// Strands run upward; `σ_i` crosses positions `i` and `i + 1` with the
/// strand coming from the left on top, which makes it a positive crossing.
/// Crossing `k` is the `k`-th letter. Positions never touched by the word
/// close into zero-crossing circles.
pub fn generate_braid_closure(word: &[BraidGenerator], strands: usize) -> Result<LinkDiagram, LinkError> {
    if strands < 2 {
        return Err(LinkError::BadGeneratorIndex { index: 0, max: strands.saturating_sub(1) });
    }
    let mut pending: Vec<Option<Endpoint>> = vec![None; strands];
    let mut first_in: Vec<Option<Endpoint>> = vec![None; strands];
    let mut signs = Vec::with_capacity(word.len());
    let mut arcs = Vec::with_capacity(2 * word.len());

    for (k, &g) in word.iter().enumerate() {
        let i = g.unsigned_abs() as usize;
        if g == 0 || i >= strands {
            return Err(LinkError::BadGeneratorIndex { index: g, max: strands - 1 });
        }
        let c = CrossingId(k as u32);
        let (left, right) = (i - 1, i);
        let sign = if g > 0 { Sign::Positive } else { Sign::Negative };
        // the left strand moves right; it is on top for a positive letter
        let (left_in, left_out, right_in, right_out) = match sign {
            Sign::Positive => (Slot::OverIn, Slot::OverOut, Slot::UnderIn, Slot::UnderOut),
            Sign::Negative => (Slot::UnderIn, Slot::UnderOut, Slot::OverIn, Slot::OverOut),
        };
        for (pos, slot) in [(left, left_in), (right, right_in)] {
            let head = Endpoint { crossing: c, slot };
            match pending[pos] {
                Some(tail) => arcs.push(Arc { from: tail, to: head }),
                None => first_in[pos] = Some(head),
            }
        }
        pending[right] = Some(Endpoint { crossing: c, slot: left_out });
        pending[left] = Some(Endpoint { crossing: c, slot: right_out });
        signs.push(sign);
    }

    let mut zero = 0;
    for pos in 0..strands {
        match (pending[pos], first_in[pos]) {
            (Some(tail), Some(head)) => arcs.push(Arc { from: tail, to: head }),
            (None, None) => zero += 1,
            _ => unreachable!("a touched position has both a first head and a last tail"),
        }
    }
    LinkDiagram::new(signs, arcs, zero)
}

pub fn random_braid_word<R: Rng>(rng: &mut R, strands: usize, length: usize) -> Vec<BraidGenerator> {
    (0..length)
        .map(|_| {
            let i = rng.gen_range(1..strands as i32);
            if rng.gen_bool(0.5) {
                i
            } else {
                -i
            }
        })
        .collect()
}

/// Closure of a random word drawn from a ChaCha stream seeded with `seed`.
pub fn random_braid_diagram(strands: usize, length: usize, seed: u64) -> Result<LinkDiagram, LinkError> {
    if strands < 2 {
        return Err(LinkError::BadGeneratorIndex { index: 0, max: strands.saturating_sub(1) });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let word = random_braid_word(&mut rng, strands, length);
    generate_braid_closure(&word, strands)
}
