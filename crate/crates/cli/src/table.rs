//! Column-oriented result tables written as CSV or as a JSON mirror.

use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    U(u64),
    S(String),
    B(bool),
    Empty,
}

impl Cell {
    /// Floats use 17 significant digits so CSV round-trips are lossless.
    fn csv(&self) -> String {
        match self {
            Cell::F(x) => format!("{x:.16e}"),
            Cell::I(x) => x.to_string(),
            Cell::U(x) => x.to_string(),
            Cell::S(s) => s.clone(),
            Cell::B(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::F(x) => Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::I(x) => Value::from(*x),
            Cell::U(x) => Value::from(*x),
            Cell::S(s) => Value::from(s.as_str()),
            Cell::B(b) => Value::from(*b),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}
impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::U(x as u64)
    }
}
impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::U(x)
    }
}
impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::U(x as u64)
    }
}
impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::I(x)
    }
}
impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::B(b)
    }
}
impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::S(s.to_string())
    }
}
impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::S(s)
    }
}
impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &'static [&'static str]) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))
                .expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    /// Array of objects keyed by column name, in column order.
    pub fn to_json(&self) -> Vec<u8> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (c, v) in self.columns.iter().zip(row) {
                    m.insert((*c).to_string(), v.json());
                }
                Value::Object(m)
            })
            .collect();
        let mut out = serde_json::to_vec_pretty(&rows).expect("json");
        out.push(b'\n');
        out
    }
}
