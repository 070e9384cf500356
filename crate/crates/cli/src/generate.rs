//! `maxsat generate`: reproducible random WPMax2SAT / WPMax3SAT files.

use std::path::{Path, PathBuf};

use anyhow::Result;
use maxsat_core::gen::GenSpec;
use maxsat_core::wcnf::write_wcnf;

use crate::write_atomic;

pub fn file_name(spec: &GenSpec, index: u64) -> String {
    format!(
        "{}-v{}-c{}-s{}-{:03}.wcnf",
        spec.family, spec.vars, spec.clauses, spec.seed, index
    )
}

/// WCNF text of the `index`-th instance, headed by the generator settings.
pub fn render(spec: &GenSpec, index: u64) -> Result<String> {
    let inst = spec.instance(index)?;
    let mut text = format!(
        "c generated family={} vars={} clauses={} weights={}..={} hard={} seed={} index={}\n",
        spec.family, spec.vars, spec.clauses, spec.min_weight, spec.max_weight, spec.hard_fraction, spec.seed, index
    );
    text.push_str(&write_wcnf(&inst)?);
    Ok(text)
}

/// Writes `count` instances into `out` and returns their paths.
pub fn write_instances(spec: &GenSpec, count: u64, out: &Path) -> Result<Vec<PathBuf>> {
    spec.validate()?;
    let mut paths = Vec::new();
    for i in 0..count {
        let path = out.join(file_name(spec, i));
        write_atomic(&path, render(spec, i)?.as_bytes())?;
        paths.push(path);
    }
    Ok(paths)
}
