use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Fail,
}

/// Human-readable lines plus stable `key<TAB>value` entries.
#[derive(Clone, Debug)]
pub struct Report {
    pub lines: Vec<String>,
    pub entries: Vec<(String, String)>,
    pub status: Status,
}

impl Default for Report {
    fn default() -> Self {
        Report { lines: Vec::new(), entries: Vec::new(), status: Status::Pass }
    }
}

impl Report {
    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn entry(&mut self, key: impl Into<String>, value: impl ToString) {
        // values stay on one line so the format is line-structured
        let v = value.to_string().replace(['\t', '\n'], " ");
        self.entries.push((key.into(), v));
    }

    /// Records a failed check; the caller prints the witness.
    pub fn fail(&mut self) {
        self.status = Status::Fail;
    }

    pub fn verdict(&mut self, key: impl Into<String>, ok: bool) {
        self.entry(key, if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.fail();
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn merge(&mut self, other: Report) {
        self.lines.extend(other.lines);
        self.entries.extend(other.entries);
        self.status = self.status.max(other.status);
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn human(&self) -> String {
        let mut s = String::new();
        for l in &self.lines {
            let _ = writeln!(s, "{}", l);
        }
        let _ = writeln!(s, "{}", if self.passed() { "PASS" } else { "FAIL" });
        s
    }

    pub fn machine(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(s, "{}\t{}", k, v);
        }
        let _ = writeln!(s, "status\t{}", if self.passed() { "PASS" } else { "FAIL" });
        s
    }
}
