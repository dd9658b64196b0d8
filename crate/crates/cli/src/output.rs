use serde::Serialize;
use serde_json::Value;

/// Outcome of a command that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Mismatch,
    Incomplete,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Mismatch => 1,
            Status::Incomplete => 3,
        }
    }

    /// `Mismatch` unless `ok`.
    pub fn from_ok(ok: bool) -> Self {
        if ok {
            Status::Ok
        } else {
            Status::Mismatch
        }
    }
}

/// A command's result in both output formats.
pub struct Reply {
    pub json: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub status: Status,
}

impl Reply {
    pub fn new<T: Serialize>(result: &T, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        Reply { json: serde_json::to_value(result).expect("results serialize"), header, rows, status: Status::Ok }
    }

    pub fn with_status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }

    pub fn csv(&self) -> String {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            wtr.write_record(row).expect("in-memory write");
        }
        String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

pub fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}
