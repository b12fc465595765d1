//! Reading inputs named on the command line.

use std::path::Path;
use std::sync::Arc;

use poslog::logic::syntax::name_index;
use poslog::morley::{close_fragment, Fragment};
use poslog::text::{parse, parse_formula, parse_formula_inferring, Parsed, SourceDocument};
use poslog::{corpus, FiniteStructure, Formula, Limits, Signature, Theory, UniverseClass, Var};

use crate::args::RunConfig;
use crate::CliError;

/// A file on disk, or else a shipped corpus document of that name.
pub fn document(path: &Path) -> Result<SourceDocument, CliError> {
    if path.exists() {
        return Ok(SourceDocument::from_path(path)?);
    }
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or_default();
    match corpus::FILES.iter().find(|(n, _)| *n == name) {
        Some((_, text)) if path.parent().is_none_or(|p| p.as_os_str().is_empty()) => {
            Ok(SourceDocument::from_text(text)?)
        }
        _ => Err(CliError::Usage(format!("no such file: {}", path.display()))),
    }
}

fn expected(path: &Path, kind: &str) -> CliError {
    CliError::Usage(format!("{} does not declare a {kind}", path.display()))
}

pub fn limits(cfg: &RunConfig) -> Limits {
    let mut l = Limits::default();
    if let Some(w) = cfg.width_cap {
        l.width_cap = w as usize;
    }
    if let Some(c) = cfg.ceiling {
        l.ceiling = c as usize;
    }
    l
}

pub fn theory(cfg: &RunConfig) -> Result<Option<Arc<Theory>>, CliError> {
    let Some(p) = &cfg.theory else {
        return Ok(None);
    };
    match parse(&document(p)?)? {
        Parsed::Theory(t) => Ok(Some(t)),
        _ => Err(expected(p, "theory")),
    }
}

pub fn require_theory(cfg: &RunConfig) -> Result<Arc<Theory>, CliError> {
    theory(cfg)?.ok_or_else(|| CliError::Usage("--theory is required".into()))
}

pub fn class(cfg: &RunConfig) -> Result<Option<UniverseClass>, CliError> {
    let Some(p) = &cfg.class else {
        return Ok(None);
    };
    let c = match parse(&document(p)?)? {
        Parsed::Class(c) => c,
        _ => return Err(expected(p, "class")),
    };
    Ok(Some(match theory(cfg)? {
        Some(t) => c.with_theory(t)?,
        None => c,
    }))
}

pub fn require_class(cfg: &RunConfig) -> Result<UniverseClass, CliError> {
    class(cfg)?.ok_or_else(|| CliError::Usage("--class is required".into()))
}

/// The signature of `--theory`, else of `--class`.
pub fn signature(cfg: &RunConfig) -> Result<Option<Arc<Signature>>, CliError> {
    if let Some(t) = theory(cfg)? {
        return Ok(Some(t.signature.clone()));
    }
    Ok(class(cfg)?.map(|c| c.signature.clone()))
}

/// A formula over the configured signature, or over the signature read
/// off the formula when none is configured.
pub fn formula(cfg: &RunConfig, text: &str) -> Result<(Arc<Signature>, Formula), CliError> {
    match signature(cfg)? {
        Some(sig) => {
            let f = parse_formula(&sig, text)?;
            Ok((sig, f))
        }
        None => {
            let (sig, f) = parse_formula_inferring(text)?;
            Ok((Arc::new(sig), f))
        }
    }
}

pub fn vars(cfg: &RunConfig, sig: &Signature) -> Result<Vec<Var>, CliError> {
    let mut out = Vec::new();
    for item in cfg.vars.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, sort) = match item.split_once(':') {
            Some((n, s)) => (n.trim(), s.trim().to_string()),
            None => {
                let s = sig.default_sort().ok_or_else(|| {
                    CliError::Usage(format!(
                        "variable `{item}` needs a sort: the signature has several"
                    ))
                })?;
                (item, s.to_string())
            }
        };
        let index = name_index(name)
            .ok_or_else(|| CliError::Usage(format!("`{name}` is not a variable name")))?;
        if !sig.sorts().iter().any(|s| s.as_str() == sort) {
            return Err(CliError::Usage(format!("undeclared sort `{sort}`")));
        }
        let v = Var::new(sort.as_str(), index);
        if out.contains(&v) {
            return Err(CliError::Usage(format!("variable `{name}` listed twice")));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(CliError::Usage("--vars lists no variables".into()));
    }
    Ok(out)
}

/// A class member by name, or a structure file.
pub fn structure(cfg: &RunConfig, arg: &str) -> Result<FiniteStructure, CliError> {
    if let Some(c) = class(cfg)? {
        if let Some(m) = c.member(arg) {
            return Ok(m.clone());
        }
    }
    let p = Path::new(arg);
    if !p.exists() {
        return Err(CliError::Usage(format!(
            "`{arg}` is neither a class member nor a file"
        )));
    }
    match parse(&document(p)?)? {
        Parsed::Structure(s) => Ok(s),
        _ => Err(expected(p, "structure")),
    }
}

/// The `--fragment` seed, else the theory's sentences, closed.
pub fn fragment(cfg: &RunConfig, t: &Theory) -> Result<Fragment, CliError> {
    let seed: Vec<Formula> = match &cfg.fragment {
        Some(p) => match parse(&document(p)?)? {
            Parsed::Fragment(f) => f.formulas,
            _ => return Err(expected(p, "fragment")),
        },
        None => t.sentences.iter().cloned().collect(),
    };
    Ok(close_fragment(t.signature.clone(), seed, limits(cfg))?)
}
