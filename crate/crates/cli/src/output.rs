use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use indstab::numfmt::round_sig15;
use serde::Serialize;
use serde_json::{Number, Value};

use crate::error::CliError;

/// Rounds every float in the tree to 15 significant digits. Non-finite
/// values are already `null` after serialization.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64().and_then(|x| Number::from_f64(round_sig15(x))) {
                *n = x;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

pub fn json_text<T: Serialize>(doc: &T) -> Result<String, CliError> {
    let mut v = serde_json::to_value(doc).map_err(|e| CliError::Io(e.to_string()))?;
    round_floats(&mut v);
    let mut text = serde_json::to_string_pretty(&v).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Writes `text` to `path`, or stdout when absent.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            let mut w = BufWriter::new(file);
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
            lock.flush()?;
        }
    }
    Ok(())
}
