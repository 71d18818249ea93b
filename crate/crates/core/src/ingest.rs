//! Exchange-rate data: ECB reference-rate history parsing, a generic CSV
//! reader, percent log-returns and a cached fetcher.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Duration;

use chrono::NaiveDate;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::ReturnSeries;

pub const DEFAULT_ECB_URL: &str = "https://www.ecb.europa.eu/stats/eurofxref/eurofxref-hist.zip";
/// Environment variable naming the download cache directory.
pub const CACHE_DIR_ENV: &str = "LOGVOL_CACHE_DIR";

/// Price levels in ascending date order.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSeries {
    pub dates: Option<Vec<NaiveDate>>,
    pub values: Vec<f64>,
    /// Rows skipped because the value was missing.
    pub dropped: usize,
}

impl LevelSeries {
    /// Percent log-returns, dated by the later of the two levels.
    pub fn returns(&self) -> Result<ReturnSeries> {
        let r = levels_to_returns(&self.values)?;
        match &self.dates {
            Some(d) => ReturnSeries::with_dates(r.values().to_vec(), d[1..].to_vec()),
            None => Ok(r),
        }
    }

    /// Keeps observations dated within `[from, to]`.
    pub fn window(&self, from: Option<NaiveDate>, to: Option<NaiveDate>) -> Result<LevelSeries> {
        let Some(dates) = &self.dates else {
            return Err(Error::invalid("date window requested on an undated series"));
        };
        let keep: Vec<usize> = (0..dates.len())
            .filter(|&i| from.is_none_or(|f| dates[i] >= f) && to.is_none_or(|t| dates[i] <= t))
            .collect();
        Ok(LevelSeries {
            dates: Some(keep.iter().map(|&i| dates[i]).collect()),
            values: keep.iter().map(|&i| self.values[i]).collect(),
            dropped: self.dropped,
        })
    }
}

/// r_t = 100 (log P_t - log P_{t-1}).
pub fn levels_to_returns(levels: &[f64]) -> Result<ReturnSeries> {
    if levels.len() < 2 {
        return Err(Error::invalid("need at least two levels to form a return"));
    }
    if let Some(i) = levels.iter().position(|p| !(*p > 0.0) || !p.is_finite()) {
        return Err(Error::invalid(format!("level at index {i} is not positive: {}", levels[i])));
    }
    ReturnSeries::new(levels.windows(2).map(|w| 100.0 * (w[1].ln() - w[0].ln())).collect())
}

fn parse_date(s: &str, row: usize) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d").map_err(|_| Error::Malformed(format!("row {row}: bad date '{s}'")))
}

fn is_missing(s: &str) -> bool {
    let s = s.trim();
    s.is_empty() || s.eq_ignore_ascii_case("N/A") || s.eq_ignore_ascii_case("NA")
}

fn sort_by_date(mut rows: Vec<(NaiveDate, f64)>) -> Result<(Vec<NaiveDate>, Vec<f64>)> {
    rows.sort_by_key(|r| r.0);
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::Malformed(format!("duplicate date {}", w[0].0)));
    }
    Ok(rows.into_iter().unzip())
}

fn reader(bytes: &[u8]) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes)
}

/// Extracts the first CSV member when `bytes` is a zip archive.
pub fn unpack_if_zip(bytes: Vec<u8>) -> Result<Vec<u8>> {
    if !bytes.starts_with(b"PK\x03\x04") {
        return Ok(bytes);
    }
    let mut archive = zip::ZipArchive::new(std::io::Cursor::new(bytes)).map_err(|e| Error::Malformed(format!("zip archive: {e}")))?;
    for i in 0..archive.len() {
        let mut f = archive.by_index(i).map_err(|e| Error::Malformed(format!("zip archive: {e}")))?;
        let name = f.name().map(|n| n.to_string()).unwrap_or_default();
        if name.to_ascii_lowercase().ends_with(".csv") {
            let mut out = Vec::new();
            f.read_to_end(&mut out).map_err(|e| Error::Malformed(format!("zip member {name}: {e}")))?;
            return Ok(out);
        }
    }
    Err(Error::Malformed("zip archive holds no .csv file".into()))
}

/// Levels of one currency from the ECB `eurofxref-hist` layout
/// (`Date,USD,JPY,...`, newest row first, `N/A` for missing values).
pub fn parse_ecb_hist(bytes: &[u8], currency: &str) -> Result<LevelSeries> {
    let mut rdr = reader(bytes);
    let mut records = rdr.records();
    let header = match records.next() {
        Some(Ok(h)) => h,
        Some(Err(e)) => return Err(Error::Malformed(format!("header: {e}"))),
        None => return Err(Error::Malformed("empty file".into())),
    };
    if header.get(0).map(|s| s.trim_start_matches('\u{feff}')) != Some("Date") {
        return Err(Error::Malformed("header does not start with 'Date'".into()));
    }
    let codes: Vec<&str> = header.iter().skip(1).filter(|c| !c.is_empty()).collect();
    let col = match header.iter().position(|c| c.eq_ignore_ascii_case(currency)) {
        Some(c) if c > 0 => c,
        _ => {
            return Err(Error::UnknownCurrency {
                requested: currency.to_string(),
                available: codes.join(","),
            })
        }
    };
    let mut rows = Vec::new();
    let mut dropped = 0;
    for (i, rec) in records.enumerate() {
        let rec = rec.map_err(|e| Error::Malformed(format!("row {}: {e}", i + 2)))?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let date = parse_date(rec.get(0).unwrap_or(""), i + 2)?;
        let cell = rec.get(col).unwrap_or("");
        if is_missing(cell) {
            dropped += 1;
            continue;
        }
        let v: f64 = cell.parse().map_err(|_| Error::Malformed(format!("row {}: bad value '{cell}'", i + 2)))?;
        rows.push((date, v));
    }
    let (dates, values) = sort_by_date(rows)?;
    Ok(LevelSeries { dates: Some(dates), values, dropped })
}

/// Two-column `date,value` or single-column `value` CSV, with or without a
/// header row. Dated rows are sorted ascending.
pub fn parse_csv_series(bytes: &[u8]) -> Result<LevelSeries> {
    let mut rdr = reader(bytes);
    let mut dated = Vec::new();
    let mut plain = Vec::new();
    let mut dropped = 0;
    let mut width = None;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Malformed(format!("row {}: {e}", i + 1)))?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let w = rec.len().min(2);
        let value_cell = rec.get(w - 1).unwrap_or("");
        if i == 0 && !is_missing(value_cell) && value_cell.parse::<f64>().is_err() {
            continue;
        }
        if *width.get_or_insert(w) != w {
            return Err(Error::Malformed(format!("row {}: expected {} columns", i + 1, width.unwrap())));
        }
        if is_missing(value_cell) {
            dropped += 1;
            continue;
        }
        let v: f64 = value_cell.parse().map_err(|_| Error::Malformed(format!("row {}: bad value '{value_cell}'", i + 1)))?;
        if w == 2 {
            dated.push((parse_date(rec.get(0).unwrap_or(""), i + 1)?, v));
        } else {
            plain.push(v);
        }
    }
    match width {
        None => Err(Error::Malformed("no data rows".into())),
        Some(2) => {
            let (dates, values) = sort_by_date(dated)?;
            Ok(LevelSeries { dates: Some(dates), values, dropped })
        }
        Some(_) => Ok(LevelSeries { dates: None, values: plain, dropped }),
    }
}

/// Headered CSV: takes the named value column, plus a `date` column when the
/// header has one.
pub fn parse_csv_column(bytes: &[u8], column: &str) -> Result<LevelSeries> {
    let mut rdr = reader(bytes);
    let mut records = rdr.records();
    let header = match records.next() {
        Some(rec) => rec.map_err(|e| Error::Malformed(format!("row 1: {e}")))?,
        None => return Err(Error::Malformed("empty file".into())),
    };
    let vi = header
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| Error::Malformed(format!("no column '{column}' in header")))?;
    let di = header.iter().position(|h| h.eq_ignore_ascii_case("date"));
    let mut dated = Vec::new();
    let mut plain = Vec::new();
    let mut dropped = 0;
    for (i, rec) in records.enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| Error::Malformed(format!("row {row}: {e}")))?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let cell = rec.get(vi).unwrap_or("");
        if is_missing(cell) {
            dropped += 1;
            continue;
        }
        let v: f64 = cell.parse().map_err(|_| Error::Malformed(format!("row {row}: bad value '{cell}'")))?;
        match di {
            Some(d) => dated.push((parse_date(rec.get(d).unwrap_or(""), row)?, v)),
            None => plain.push(v),
        }
    }
    if dated.is_empty() && plain.is_empty() {
        return Err(Error::Malformed("no data rows".into()));
    }
    if di.is_some() {
        let (dates, values) = sort_by_date(dated)?;
        Ok(LevelSeries { dates: Some(dates), values, dropped })
    } else {
        Ok(LevelSeries { dates: None, values: plain, dropped })
    }
}

/// Blocking HTTP GET returning the body.
pub trait Transport {
    fn get(&self, url: &str, timeout: Duration) -> Result<Vec<u8>>;
}

pub struct UreqTransport;

impl Transport for UreqTransport {
    fn get(&self, url: &str, timeout: Duration) -> Result<Vec<u8>> {
        let agent: ureq::Agent = ureq::Agent::config_builder().timeout_global(Some(timeout)).build().into();
        let mut resp = agent.get(url).call().map_err(|e| match e {
            ureq::Error::StatusCode(code) => Error::Network(format!("{url}: HTTP status {code}")),
            e => Error::Network(format!("{url}: {e}")),
        })?;
        resp.body_mut()
            .with_config()
            .limit(256 << 20)
            .read_to_vec()
            .map_err(|e| Error::Network(format!("{url}: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FetchConfig {
    pub cache_dir: Option<PathBuf>,
    pub timeout: Duration,
    /// Ignore an existing cache entry for a URL and download again.
    pub refresh: bool,
}

impl Default for FetchConfig {
    fn default() -> Self {
        Self {
            cache_dir: std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from),
            timeout: Duration::from_secs(60),
            refresh: false,
        }
    }
}

const INDEX_FILE: &str = "index.json";

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io { path: path.display().to_string(), message: e.to_string() }
}

fn read_index(dir: &Path) -> BTreeMap<String, String> {
    std::fs::read(dir.join(INDEX_FILE))
        .ok()
        .and_then(|b| serde_json::from_slice(&b).ok())
        .unwrap_or_default()
}

fn store(dir: &Path, source: &str, bytes: &[u8]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let hash = Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect::<String>();
    let file = dir.join(format!("{hash}.csv"));
    if !file.exists() {
        std::fs::write(&file, bytes).map_err(|e| io_err(&file, e))?;
    }
    let mut index = read_index(dir);
    index.insert(source.to_string(), hash);
    let idx = dir.join(INDEX_FILE);
    let json = serde_json::to_vec_pretty(&index).map_err(|e| io_err(&idx, e))?;
    std::fs::write(&idx, json).map_err(|e| io_err(&idx, e))
}

fn cached(dir: &Path, source: &str) -> Option<Vec<u8>> {
    let hash = read_index(dir).remove(source)?;
    let bytes = std::fs::read(dir.join(format!("{hash}.csv"))).ok()?;
    let actual = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect::<String>();
    (actual == hash).then_some(bytes)
}

fn check_body(bytes: &[u8], source: &str) -> Result<()> {
    let text = bytes.strip_prefix("\u{feff}".as_bytes()).unwrap_or(bytes);
    if text.iter().all(|b| b.is_ascii_whitespace()) {
        return Err(Error::Malformed(format!("{source}: empty body")));
    }
    if !text.starts_with(b"Date") {
        return Err(Error::Malformed(format!("{source}: body does not start with a 'Date' header")));
    }
    Ok(())
}

/// ECB history from a URL or local path, unzipped and checked for the
/// `Date` header. Copies are cached by SHA-256; a URL already in the cache is
/// served from it without a request.
pub fn fetch_ecb_with(source: &str, config: &FetchConfig, transport: &dyn Transport) -> Result<Vec<u8>> {
    let remote = source.starts_with("http://") || source.starts_with("https://");
    if remote && !config.refresh {
        if let Some(bytes) = config.cache_dir.as_deref().and_then(|d| cached(d, source)) {
            return Ok(bytes);
        }
    }
    let raw = if remote {
        transport.get(source, config.timeout)?
    } else {
        std::fs::read(source).map_err(|e| io_err(Path::new(source), e))?
    };
    let bytes = unpack_if_zip(raw)?;
    check_body(&bytes, source)?;
    if let Some(dir) = &config.cache_dir {
        store(dir, source, &bytes)?;
    }
    Ok(bytes)
}

pub fn fetch_ecb(source: &str, config: &FetchConfig) -> Result<Vec<u8>> {
    fetch_ecb_with(source, config, &UreqTransport)
}
