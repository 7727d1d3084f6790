use std::fs;
use std::io::Read;

use crate::input::known;
use crate::{CliError, FetchArgs, Result};

pub fn run(args: &FetchArgs) -> Result<String> {
    let dataset = known(&args.dataset)?;
    let target = dataset.cache_path();
    let bytes = match (&args.from, &args.url) {
        (Some(path), _) => fs::read(path)?,
        (None, url) => {
            let url = url.as_deref().or(dataset.url).ok_or_else(|| {
                CliError::Usage(format!("dataset '{}' has no built-in URL; pass --url or --from", dataset.name))
            })?;
            download(url)?
        }
    };
    if let Some(dir) = target.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(&target, &bytes)?;
    Ok(format!("{} bytes -> {}\n", bytes.len(), target.display()))
}

fn download(url: &str) -> Result<Vec<u8>> {
    let fail = |message: String| CliError::Download {
        url: url.into(),
        message,
    };
    let mut response = ureq::get(url).call().map_err(|e| fail(e.to_string()))?;
    let mut bytes = Vec::new();
    response
        .body_mut()
        .as_reader()
        .read_to_end(&mut bytes)
        .map_err(|e| fail(e.to_string()))?;
    Ok(bytes)
}
