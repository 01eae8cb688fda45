use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use troprank::matrix::TropMatrix;
use troprank::oracle::factor_rank_le_k_budgeted;
use troprank::permanent::tropical_rank;
use troprank::rank3::decide_factor_rank_le3;
use troprank::value::TropValue;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut slow_total = std::time::Duration::ZERO;
    let (mut decided_no, mut troprank4, mut oracle_checked) = (0, 0, 0);
    for _ in 0..40 {
        let a = TropMatrix::from_fn(4, 4, |_, _| TropValue::from_int(rng.gen_range(0..7))).unwrap();
        match decide_factor_rank_le3(&a) {
            Ok(None) => {
                decided_no += 1;
                if tropical_rank(&a).unwrap() == 4 { troprank4 += 1; continue; }
                let t = std::time::Instant::now();
                let r = factor_rank_le_k_budgeted(&a, 3, 60_000_000).unwrap();
                let el = t.elapsed();
                slow_total += el;
                oracle_checked += 1;
                assert!(r.is_none(), "decider said NO but oracle found witness for {a:?}");
                if el.as_secs() > 3 { println!("slow refutation: {el:?}"); }
            }
            Ok(Some(_)) => {
                let r = factor_rank_le_k_budgeted(&a, 3, 60_000_000).unwrap();
                assert!(r.is_some());
            }
            Err(_) => {}
        }
    }
    println!("decided_no={decided_no} of which troprank4={troprank4}, oracle_checked={oracle_checked}, oracle time total {slow_total:?}");
}
