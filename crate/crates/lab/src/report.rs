//! CSV tables with a provenance comment line.

use std::io::Write;
use std::path::Path;

use crate::config::ConfigHash;
use crate::LabError;

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    /// File stem of the table.
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: Vec<&'static str>) -> Self {
        Table {
            name: name.into(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Fixed six-decimal rendering so tables diff cleanly.
pub fn num(x: f64) -> String {
    format!("{x:.6}")
}

pub struct Provenance<'a> {
    pub command: &'a str,
    pub hash: ConfigHash,
}

impl Provenance<'_> {
    pub fn comment(&self) -> String {
        format!(
            "# contagion-lab {} command={} config_hash={}",
            env!("CARGO_PKG_VERSION"),
            self.command,
            self.hash
        )
    }
}

pub fn write_table<W: Write>(table: &Table, prov: &Provenance<'_>, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{}", prov.comment())?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()
}

pub fn save_tables(tables: &[Table], prov: &Provenance<'_>, dir: &Path) -> Result<(), LabError> {
    let fail = |path: &Path| {
        let path = path.to_owned();
        move |source| LabError::Write { path, source }
    };
    std::fs::create_dir_all(dir).map_err(fail(dir))?;
    for t in tables {
        let path = dir.join(format!("{}.csv", t.name));
        let file = std::fs::File::create(&path).map_err(fail(&path))?;
        write_table(t, prov, std::io::BufWriter::new(file)).map_err(fail(&path))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comment_then_header() {
        let mut t = Table::new("demo", vec!["a", "b"]);
        t.push(vec!["1".into(), num(0.5)]);
        let mut buf = Vec::new();
        write_table(
            &t,
            &Provenance {
                command: "demo",
                hash: ConfigHash(0xab),
            },
            &mut buf,
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# contagion-lab ") && lines[0].ends_with("config_hash=00000000000000ab"));
        assert_eq!(&lines[1..], ["a,b", "1,0.500000"]);
    }
}
