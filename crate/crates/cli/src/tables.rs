use std::io::Write;

use mdiqkd_core::opsets::{build_catalog, coding_bit, CatalogKind, Cell, CodingScheme};
use serde::Serialize;

use crate::{CliError, CliResult};

/// One row per (Alice basis, operator, measurement basis).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub alice_basis: &'static str,
    pub operator: String,
    pub measurement_basis: &'static str,
    /// `Y` if the operator maps Alice's basis onto some protocol basis, `N` if
    /// no measurement basis works for this pair.
    pub valid: &'static str,
    pub kept: &'static str,
    pub flip: Option<u8>,
    pub bit: Option<u8>,
}

pub fn table_rows(kind: CatalogKind, theta: Option<f64>, coding: Option<CodingScheme>) -> CliResult<Vec<TableRow>> {
    let cat = build_catalog(kind, theta).map_err(|e| CliError::Config(e.to_string()))?;
    let scheme = coding.unwrap_or(CodingScheme::default_for(kind));
    let mut rows = Vec::new();
    for s in cat.bases() {
        for e in cat.entries() {
            let valid = cat
                .basis_image(&e.label, s.label())
                .map_err(|e| CliError::Runtime(e.to_string()))?
                .is_some();
            for t in cat.bases() {
                let cell = Cell::new(s.label(), t.label());
                let kept = cat.is_kept(&e.label, cell).map_err(|e| CliError::Runtime(e.to_string()))?;
                let (flip, bit) = if kept {
                    (
                        cat.flip_parity(&e.label, cell).ok(),
                        coding_bit(scheme, &cat, &e.label, cell).ok(),
                    )
                } else {
                    (None, None)
                };
                rows.push(TableRow {
                    alice_basis: s.label().tag(),
                    operator: e.label.to_string(),
                    measurement_basis: t.label().tag(),
                    valid: if valid { "Y" } else { "N" },
                    kept: if kept { "Y" } else { "N" },
                    flip,
                    bit,
                });
            }
        }
    }
    Ok(rows)
}

pub fn write_tables<W: Write>(rows: &[TableRow], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Runtime(e.to_string()))
}
