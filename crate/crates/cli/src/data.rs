use std::time::Duration;

use logvol::ingest::{fetch_ecb, parse_csv_column, unpack_if_zip, parse_csv_series, parse_ecb_hist, FetchConfig, LevelSeries};
use logvol::ReturnSeries;

use crate::args::DataArgs;
use crate::config::Settings;
use crate::Failure;

pub struct Loaded {
    pub returns: ReturnSeries,
    /// Rows dropped for missing values.
    pub dropped: usize,
}

pub fn load(args: &DataArgs, settings: &Settings) -> Result<Loaded, Failure> {
    let levels: LevelSeries = match (&args.ecb, &args.data) {
        (Some(_), Some(_)) => return Err(Failure::Usage("give either --data or --ecb, not both".into())),
        (None, None) => return Err(Failure::Usage("no input: pass --data FILE or --ecb [URL]".into())),
        (Some(source), None) => {
            let currency = args.currency.as_deref().ok_or_else(|| Failure::Usage("--ecb needs --currency".into()))?;
            let cfg = FetchConfig {
                cache_dir: settings.cache_dir.clone(),
                timeout: Duration::from_secs(settings.timeout_secs),
                refresh: false,
            };
            parse_ecb_hist(&fetch_ecb(source, &cfg)?, currency)?
        }
        (None, Some(path)) => {
            let bytes = std::fs::read(path).map_err(|e| Failure::io(path, e))?;
            match (&args.currency, &args.column) {
                (Some(_), Some(_)) => return Err(Failure::Usage("--currency and --column are exclusive".into())),
                (Some(c), None) => parse_ecb_hist(&unpack_if_zip(bytes)?, c)?,
                (None, Some(col)) => parse_csv_column(&bytes, col)?,
                (None, None) => parse_csv_series(&bytes)?,
            }
        }
    };
    let levels = if args.from.is_some() || args.to.is_some() {
        levels.window(args.from, args.to)?
    } else {
        levels
    };
    let returns = if args.returns {
        match &levels.dates {
            Some(d) => ReturnSeries::with_dates(levels.values.clone(), d.clone())?,
            None => ReturnSeries::new(levels.values.clone())?,
        }
    } else {
        levels.returns()?
    };
    Ok(Loaded { returns, dropped: levels.dropped })
}
