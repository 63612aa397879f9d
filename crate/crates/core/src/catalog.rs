//! Maritime search objects.

use std::collections::HashSet;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Parsed, Result};

/// A search object. The size is both its height and width in metres.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SearchObject {
    pub name: String,
    pub size_m: u32,
}

impl SearchObject {
    pub fn new(name: impl Into<String>, size_m: u32) -> Result<Self> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(Error::Config("object name must not be empty".into()));
        }
        if size_m == 0 {
            return Err(Error::Config(format!(
                "object {name:?} must have positive size"
            )));
        }
        Ok(SearchObject { name, size_m })
    }
}

/// An ordered collection of uniquely named objects.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Catalog {
    objects: Vec<SearchObject>,
}

const DEFAULT_OBJECTS: [(&str, u32); 17] = [
    ("Raft 1-person", 1),
    ("Raft 4-person", 4),
    ("Raft 6-person", 6),
    ("Raft 8-person", 8),
    ("Raft 10-person", 10),
    ("Raft 15-person", 15),
    ("Raft 20-person", 20),
    ("Raft 25-person", 25),
    ("Power boat 2", 2),
    ("Power boat 16", 16),
    ("Power boat 24", 24),
    ("Sail boat 5", 5),
    ("Sail boat 12", 12),
    ("Sail boat 21", 21),
    ("Ship 37", 37),
    ("Ship 69", 69),
    ("Ship 92", 92),
];

impl Catalog {
    pub fn new(objects: Vec<SearchObject>) -> Result<Self> {
        let mut seen = HashSet::new();
        for o in &objects {
            if !seen.insert(o.name.as_str()) {
                return Err(Error::Config(format!("duplicate object name {:?}", o.name)));
            }
        }
        Ok(Catalog { objects })
    }

    /// The helicopter-table catalog. Objects whose size duplicates another
    /// entry (person 1, power boats 6 and 10, sail boats 8, 15 and 25) are
    /// represented by that entry.
    pub fn default_catalog() -> Self {
        Catalog {
            objects: DEFAULT_OBJECTS
                .iter()
                .map(|&(name, size_m)| SearchObject {
                    name: name.to_string(),
                    size_m,
                })
                .collect(),
        }
    }

    pub fn get(&self, name: &str) -> Option<&SearchObject> {
        self.objects.iter().find(|o| o.name == name)
    }

    pub fn objects(&self) -> &[SearchObject] {
        &self.objects
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SearchObject> {
        self.objects.iter()
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    /// Parses an objects file: header `name,size_m`, one object per row.
    pub fn load<R: Read>(source: R) -> Result<Parsed<Catalog>> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(source);
        let headers = rdr
            .headers()
            .map_err(|e| Error::parse(1, e.to_string()))?
            .clone();
        let mut warnings = Vec::new();
        if headers.is_empty() {
            warnings.push("objects file is empty".to_string());
            return Ok(Parsed::new(Catalog::default(), warnings));
        }
        if headers != vec!["name", "size_m"] {
            return Err(Error::parse(1, "expected header `name,size_m`"));
        }

        let mut objects = Vec::new();
        let mut seen = HashSet::new();
        for record in rdr.records() {
            let record = record.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                Error::parse(line, e.to_string())
            })?;
            let line = record.position().map_or(0, |p| p.line());
            let name = &record[0];
            let size: i64 = record[1].parse().map_err(|_| {
                Error::parse(line, format!("size {:?} is not an integer", &record[1]))
            })?;
            if size <= 0 || size > u32::MAX as i64 {
                return Err(Error::parse(
                    line,
                    format!("size must be a positive integer, got {size}"),
                ));
            }
            if name.is_empty() {
                return Err(Error::parse(line, "empty object name"));
            }
            if !seen.insert(name.to_string()) {
                return Err(Error::parse(
                    line,
                    format!("duplicate object name {name:?}"),
                ));
            }
            objects.push(SearchObject {
                name: name.to_string(),
                size_m: size as u32,
            });
        }
        if objects.is_empty() {
            warnings.push("objects file contains no objects".to_string());
        }
        Ok(Parsed::new(Catalog { objects }, warnings))
    }

    pub fn write<W: Write>(&self, sink: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(sink);
        wtr.write_record(["name", "size_m"]).map_err(csv_io)?;
        for o in &self.objects {
            wtr.write_record([o.name.as_str(), &o.size_m.to_string()])
                .map_err(csv_io)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

impl<'a> IntoIterator for &'a Catalog {
    type Item = &'a SearchObject;
    type IntoIter = std::slice::Iter<'a, SearchObject>;

    fn into_iter(self) -> Self::IntoIter {
        self.objects.iter()
    }
}

pub(crate) fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
