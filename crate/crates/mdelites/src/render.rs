//! Plain-text rendering of a bin timeline.

use mdelites_core::HistoryRecord;

const HEADERS: [&str; 8] = [
    "Time",
    "Origin",
    "Updates",
    "Fitness",
    "Couriers",
    "Emissions",
    "Distance",
    "Time",
];

/// One row per record, columns separated by two spaces. Origin is left
/// aligned, numbers right aligned; fitness and the continuous
/// characteristics have two decimals.
pub fn render_timeline(records: &[&HistoryRecord]) -> String {
    let rows: Vec<[String; 8]> = records
        .iter()
        .map(|r| {
            let c = &r.characteristics;
            [
                r.time.to_string(),
                r.origin.to_string(),
                r.updates.to_string(),
                format!("{:.2}", r.fitness),
                c.couriers.to_string(),
                format!("{:.2}", c.emissions),
                format!("{:.2}", c.distance),
                format!("{:.2}", c.time_span),
            ]
        })
        .collect();
    let mut widths = HEADERS.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let mut push_row = |cells: [&str; 8]| {
        let mut line = String::new();
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            if i == 1 {
                line.push_str(&format!("{cell:<w$}", w = widths[i]));
            } else {
                line.push_str(&format!("{cell:>w$}", w = widths[i]));
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    };
    push_row(HEADERS);
    for row in &rows {
        push_row(row.each_ref().map(String::as_str));
    }
    out
}
