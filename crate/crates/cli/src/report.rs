use std::fmt::Write;

/// Output format selected on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Negative,
    Error,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Negative => 1,
            Status::Error => 2,
        }
    }

    fn word(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Negative => "negative",
            Status::Error => "error",
        }
    }
}

struct Item {
    key: String,
    value: String,
    text: Option<String>,
}

/// A command's findings, rendered either for people or as versioned
/// `key value` lines.
pub struct Report {
    command: String,
    status: Status,
    items: Vec<Item>,
}

pub const HEADER: &str = "hopf-dse-report v1";

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            status: Status::Ok,
            items: Vec::new(),
        }
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn set_status(&mut self, s: Status) {
        self.status = s;
    }

    /// Worsens the status to `Negative` unless `ok`.
    pub fn require(&mut self, ok: bool) {
        if !ok && self.status == Status::Ok {
            self.status = Status::Negative;
        }
    }

    /// A field printed as `key value` in both formats.
    pub fn field(&mut self, key: &str, value: impl ToString) {
        self.items.push(Item {
            key: key.to_string(),
            value: value.to_string(),
            text: None,
        });
    }

    /// A field with its own human-readable line.
    pub fn line(&mut self, key: &str, value: impl ToString, text: impl ToString) {
        self.items.push(Item {
            key: key.to_string(),
            value: value.to_string(),
            text: Some(text.to_string()),
        });
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Text => {
                for it in &self.items {
                    match &it.text {
                        Some(t) => writeln!(out, "{}", t).unwrap(),
                        None => writeln!(out, "{}: {}", it.key, it.value).unwrap(),
                    }
                }
            }
            Format::Structured => {
                writeln!(out, "{}", HEADER).unwrap();
                writeln!(out, "command {}", self.command).unwrap();
                for it in &self.items {
                    writeln!(out, "{} {}", it.key, it.value.replace('\n', " ")).unwrap();
                }
                writeln!(out, "status {}", self.status.word()).unwrap();
                writeln!(out, "end").unwrap();
            }
        }
        out
    }
}
