use std::io;

use serde::Serialize;

use crate::Format;

/// One summary row; the CSV columns are fixed.
#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub command: String,
    #[serde(rename = "p/n")]
    pub size: String,
    pub epsilon: String,
    pub checks: u128,
    pub failures: u128,
    pub wall_ms: u128,
}

/// Prints the rows in the requested format; `lines` is the text rendering.
pub fn emit(format: Format, rows: &[Summary], lines: &[String]) -> kal::Result<()> {
    match format {
        Format::Text => {
            for line in lines {
                println!("{line}");
            }
        }
        Format::Json => {
            let text = if rows.len() == 1 {
                serde_json::to_string(&rows[0])?
            } else {
                serde_json::to_string(rows)?
            };
            println!("{text}");
        }
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(io::stdout());
            for row in rows {
                writer
                    .serialize(row)
                    .map_err(|e| kal::Error::Io(io::Error::other(e)))?;
            }
            writer.flush()?;
        }
    }
    Ok(())
}
