#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use solvkit::words::{Symbol, Word};

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

pub struct GoldenResult {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

/// Runs every `NAME.args` case and compares stdout and exit code byte for byte.
pub fn run_golden() -> Vec<GoldenResult> {
    let dir = golden_dir();
    let mut names: Vec<String> = fs::read_dir(&dir)
        .expect("golden dir")
        .filter_map(|e| {
            let p = e.ok()?.path();
            if p.extension()? != "args" {
                return None;
            }
            Some(p.file_stem()?.to_string_lossy().into_owned())
        })
        .collect();
    names.sort();
    names
        .into_iter()
        .map(|name| {
            let args_text = fs::read_to_string(dir.join(format!("{name}.args"))).unwrap();
            let args: Vec<&str> = args_text.lines().collect();
            let want_out = fs::read(dir.join(format!("{name}.stdout"))).unwrap_or_default();
            let want_code: i32 = fs::read_to_string(dir.join(format!("{name}.code")))
                .map(|s| s.trim().parse().expect("numeric exit code"))
                .unwrap_or(0);
            let out = Command::new(env!("CARGO_BIN_EXE_solvkit"))
                .args(&args)
                .current_dir(&dir)
                .output()
                .expect("spawn solvkit");
            let code = out.status.code().unwrap_or(-1);
            let ok = out.stdout == want_out && code == want_code;
            let detail = if ok {
                String::new()
            } else {
                format!(
                    "exit {code} (want {want_code})\n--- got\n{}--- want\n{}",
                    String::from_utf8_lossy(&out.stdout),
                    String::from_utf8_lossy(&want_out)
                )
            };
            GoldenResult { name, ok, detail }
        })
        .collect()
}

/// Random word over `z_1..z_rank` with `1..=max_len` letters of exponent ±1.
pub fn random_word(rng: &mut ChaCha8Rng, rank: usize, max_len: usize) -> Word {
    let len = rng.gen_range(1..=max_len);
    (0..len).fold(Word::identity(), |acc, _| {
        let g = rng.gen_range(1..=rank);
        let e = if rng.gen_bool(0.5) { 1 } else { -1 };
        acc.mul(&Word::letter(Symbol::gen(g), e))
    })
}

/// Exponent-sum vector computed letter by letter.
pub fn exponent_sums(w: &Word, rank: usize) -> Vec<i64> {
    let mut v = vec![0i64; rank];
    for (s, e) in w.letters() {
        v[s.index - 1] += i64::try_from(e).unwrap();
    }
    v
}

pub fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| {
        let (mut a, mut b) = (g.abs(), x.abs());
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    })
}
