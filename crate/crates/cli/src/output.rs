use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use rsl_core::limits::LimitReport;
use rsl_core::reconstruct::ReconstructionResult;

use crate::CliError;

/// Writes `bytes` to `path` through a temporary file in the same directory
/// and a rename, so readers never see a partial file. Without a path the
/// bytes go to stdout.
pub fn write_atomic(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| CliError::Io(e.to_string()))?;
        return Ok(());
    };
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

fn coordinate_names(dim: usize) -> Vec<String> {
    match dim {
        1..=3 => ["x", "y", "z"][..dim].iter().map(|s| s.to_string()).collect(),
        _ => (0..dim).map(|k| format!("x{k}")).collect(),
    }
}

/// Stage table of a tower report: the Betti number in the highest reported
/// dimension at each stage of the first tower.
pub fn stages_csv(report: &LimitReport) -> String {
    let mut s = String::from("stage,beta,n,rank_m\n");
    let Some(tower) = report.towers.first() else {
        return s;
    };
    let m = tower.report.dims.last().copied().unwrap_or(0);
    for (i, stage) in report.stages.iter().enumerate() {
        let rank = tower.report.stages.get(i).and_then(|t| t.betti.get(m)).copied().unwrap_or(0);
        s.push_str(&format!("{},{:?},{},{}\n", stage.stage, stage.beta, stage.n, rank));
    }
    s
}

/// Every composite rank of every tower.
pub fn rank_table_csv(report: &LimitReport) -> String {
    let mut s = String::from("tower,dim,i,j,rank\n");
    for t in &report.towers {
        for (d, table) in t.report.rank_table.iter().enumerate() {
            for (i, row) in table.iter().enumerate() {
                for (j, r) in row.iter().enumerate().skip(i) {
                    s.push_str(&format!("{},{d},{i},{j},{r}\n", t.name));
                }
            }
        }
    }
    s
}

pub fn curve_csv(result: &ReconstructionResult) -> Option<String> {
    let curve = result.curve.as_ref()?;
    let mut s = String::from("index,");
    s.push_str(&coordinate_names(curve.dim()).join(","));
    s.push('\n');
    for (i, p) in curve.points.iter().enumerate() {
        let row: Vec<String> = p.iter().map(|v| format!("{v:?}")).collect();
        s.push_str(&format!("{i},{}\n", row.join(",")));
    }
    Some(s)
}

/// Which report a JSON document holds, decided by its distinguishing field.
pub enum Report {
    Limit(Box<LimitReport>),
    Reconstruction(Box<ReconstructionResult>),
}

pub fn parse_report(text: &str) -> Result<Report, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::Usage(format!("report: {e}")))?;
    let schema = |e: serde_json::Error| CliError::Usage(format!("report does not match its schema: {e}"));
    let Value::Object(map) = &value else {
        return Err(CliError::Usage("report must be a JSON object".into()));
    };
    if map.contains_key("experiment") {
        Ok(Report::Limit(Box::new(serde_json::from_value(value).map_err(schema)?)))
    } else if map.contains_key("footpoint_covering") {
        Ok(Report::Reconstruction(Box::new(serde_json::from_value(value).map_err(schema)?)))
    } else {
        Err(CliError::Usage("report does not match any schema: missing field `experiment`".into()))
    }
}
