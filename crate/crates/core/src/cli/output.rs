use std::io::Write;

/// Round to `precision` significant digits, then print the shortest
/// decimal that reads back to the rounded value.
pub fn format_number(x: f64, precision: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let x = if precision >= 17 {
        x
    } else {
        format!("{:.*e}", precision.saturating_sub(1), x)
            .parse()
            .unwrap_or(x)
    };
    let a = x.abs();
    if x == 0.0 {
        "0".into()
    } else if (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn json_number(x: f64, precision: usize) -> String {
    if x.is_finite() {
        format_number(x, precision)
    } else {
        "null".into()
    }
}

/// Numeric table written as CSV or as `{"columns": [...], "rows": [[...]]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn write_csv<W: Write + ?Sized>(
        &self,
        out: &mut W,
        precision: usize,
    ) -> std::io::Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| format_number(x, precision)).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn write_json<W: Write + ?Sized>(
        &self,
        out: &mut W,
        precision: usize,
    ) -> std::io::Result<()> {
        let columns: Vec<String> = self.columns.iter().map(|c| format!("\"{c}\"")).collect();
        writeln!(
            out,
            "{{\n  \"columns\": [{}],\n  \"rows\": [",
            columns.join(", ")
        )?;
        for (i, row) in self.rows.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|&x| json_number(x, precision)).collect();
            let sep = if i + 1 == self.rows.len() { "" } else { "," };
            writeln!(out, "    [{}]{sep}", cells.join(", "))?;
        }
        writeln!(out, "  ]\n}}")
    }
}

/// Rounds every float in a JSON value to `precision` significant digits.
pub fn round_json(value: &mut serde_json::Value, precision: usize) {
    use serde_json::Value;
    match value {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                let r: f64 = format_number(x, precision).parse().unwrap_or(x);
                if let Some(num) = serde_json::Number::from_f64(r) {
                    *n = num;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(|v| round_json(v, precision)),
        Value::Object(map) => map.values_mut().for_each(|v| round_json(v, precision)),
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortest_round_trip() {
        assert_eq!(
            format_number(1.0 / std::f64::consts::PI, 17),
            "0.3183098861837907"
        );
        assert_eq!(format_number(1.0, 17), "1");
        assert_eq!(format_number(0.0, 17), "0");
        assert_eq!(format_number(-0.0, 17), "0");
        assert_eq!(format_number(1.5e-20, 17), "1.5e-20");
        assert_eq!(format_number(1.0 / 3.0, 6), "0.333333");
        assert_eq!(format_number(f64::NAN, 17), "nan");
        for &x in &[0.1, 1e-7, 123456.789, 2.0f64.sqrt(), 6.02e23] {
            assert_eq!(format_number(x, 17).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(vec!["a", "b"]);
        t.rows.push(vec![1.0, 0.5]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf, 17).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n1,0.5\n");
        let mut buf = Vec::new();
        t.write_json(&mut buf, 17).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["rows"][0][1], 0.5);
    }
}
