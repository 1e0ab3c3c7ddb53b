//! Rewrites the built-in fixtures under `crates/core/fixtures/`.

use std::path::PathBuf;

use zetacont::fixtures::{fixture_path, CoefficientFixture, BUILTIN_MODULI};

fn main() -> zetacont::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    for m in BUILTIN_MODULI {
        let path = fixture_path(&dir, m);
        std::fs::write(&path, CoefficientFixture::generate(m)?.to_json())?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
