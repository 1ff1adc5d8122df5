/** Minimal CSV reader for harness results files (no quoting, fixed header). */

export interface Table {
  columns: string[];
  rows: string[][];
}

export class MissingColumn extends Error {
  constructor(public readonly column: string) {
    super(`missing column: ${column}`);
  }
}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV: no header row");
  }
  const columns = lines[0].split(",");
  const rows = lines.slice(1).map((l) => l.split(","));
  for (const r of rows) {
    if (r.length !== columns.length) {
      throw new Error(`ragged CSV row: expected ${columns.length} cells, got ${r.length}`);
    }
  }
  return { columns, rows };
}

export function numericColumn(table: Table, name: string): number[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new MissingColumn(name);
  }
  return table.rows.map((r) => {
    const v = Number(r[idx]);
    if (!Number.isFinite(v)) {
      throw new Error(`non-finite value in column ${name}: ${r[idx]}`);
    }
    return v;
  });
}

export function stringColumn(table: Table, name: string): string[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new MissingColumn(name);
  }
  return table.rows.map((r) => r[idx]);
}
