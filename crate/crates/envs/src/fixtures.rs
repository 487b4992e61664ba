//! Hand-authored instance files for the non-procedural games.

use std::fs;
use std::path::{Path, PathBuf};

use lpp_core::grid::{Game, Split, TaskInstance};

use crate::{EnvError, TEST_INSTANCES, TRAIN_INSTANCES};

pub const FIXTURES_ENV: &str = "LPP_FIXTURES";

/// `$LPP_FIXTURES` if set, otherwise the fixtures shipped with this crate.
pub fn fixture_dir() -> PathBuf {
    match std::env::var_os(FIXTURES_ENV) {
        Some(d) => PathBuf::from(d),
        None => PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures")),
    }
}

pub fn fixture_path(dir: &Path, game: Game, split: Split, n: usize) -> PathBuf {
    dir.join(game.id()).join(split.to_string()).join(format!("{n:02}.json"))
}

/// Loads `<dir>/<game>/{train,test}/NN.json`, train first.
pub fn load(game: Game, dir: &Path) -> Result<Vec<TaskInstance>, EnvError> {
    let mut out = Vec::with_capacity(TRAIN_INSTANCES + TEST_INSTANCES);
    for (split, count) in [(Split::Train, TRAIN_INSTANCES), (Split::Test, TEST_INSTANCES)] {
        for n in 0..count {
            let path = fixture_path(dir, game, split, n);
            let fail = |message: String| EnvError::Fixture {
                path: path.display().to_string(),
                message,
            };
            let text = fs::read_to_string(&path).map_err(|e| fail(e.to_string()))?;
            let inst = TaskInstance::from_json(&text).map_err(|e| fail(e.to_string()))?;
            if inst.game != game || inst.split != split {
                return Err(fail(format!("expected {game} {split}, found {} {}", inst.game, inst.split)));
            }
            out.push(inst);
        }
    }
    Ok(out)
}
