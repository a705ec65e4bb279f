use serde_json::{json, Value};

use crate::rdf::{PrefixMap, Term, Variable};

/// Query result: one column per projected variable, rows sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionTable {
    pub variables: Vec<Variable>,
    pub rows: Vec<Vec<Term>>,
}

/// SPARQL JSON results encoding of a single term.
pub fn term_json(term: &Term) -> Value {
    match term {
        Term::Iri(iri) => json!({"type": "iri", "value": iri.as_str()}),
        Term::Blank(b) => json!({"type": "bnode", "value": b.label()}),
        Term::Literal(lit) if lit.is_plain_string() => json!({"type": "literal", "value": lit.lexical()}),
        Term::Literal(lit) => json!({
            "type": "literal",
            "value": lit.lexical(),
            "datatype": lit.datatype().as_str(),
        }),
    }
}

impl SolutionTable {
    pub fn new(variables: Vec<Variable>, mut rows: Vec<Vec<Term>>) -> Self {
        rows.sort();
        rows.dedup();
        SolutionTable { variables, rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Values of one column, in row order.
    pub fn column(&self, var: &str) -> Vec<&Term> {
        match self.variables.iter().position(|v| v.name() == var) {
            Some(i) => self.rows.iter().map(|r| &r[i]).collect(),
            None => Vec::new(),
        }
    }

    /// `{"head":{"vars":[...]},"results":{"bindings":[...]}}`
    pub fn to_json(&self) -> Value {
        let bindings: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, Value> = self
                    .variables
                    .iter()
                    .zip(row)
                    .map(|(v, t)| (v.name().to_string(), term_json(t)))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        json!({
            "head": {"vars": self.variables.iter().map(Variable::name).collect::<Vec<_>>()},
            "results": {"bindings": bindings},
        })
    }

    /// Fixed-width text table with a row count footer.
    pub fn to_text(&self) -> String {
        self.to_text_with(&PrefixMap::new())
    }

    /// As [`to_text`](Self::to_text), with IRIs compacted where a prefix fits.
    pub fn to_text_with(&self, prefixes: &PrefixMap) -> String {
        let header: Vec<String> = self.variables.iter().map(|v| v.to_string()).collect();
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|t| prefixes.render(t)).collect())
            .collect();
        let widths: Vec<usize> = (0..header.len())
            .map(|i| {
                cells
                    .iter()
                    .map(|r| r[i].chars().count())
                    .chain([header[i].chars().count()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |values: &[String]| -> String {
            values
                .iter()
                .zip(&widths)
                .map(|(v, w)| format!("{v:<w$}"))
                .collect::<Vec<_>>()
                .join(" | ")
                .trim_end()
                .to_string()
        };
        let mut out = String::new();
        if !header.is_empty() {
            out.push_str(&line(&header));
            out.push('\n');
            out.push_str(
                &widths
                    .iter()
                    .map(|w| "-".repeat(*w))
                    .collect::<Vec<_>>()
                    .join("-+-"),
            );
            out.push('\n');
            for row in &cells {
                out.push_str(&line(row));
                out.push('\n');
            }
        }
        let n = self.rows.len();
        out.push_str(&format!("({n} row{})\n", if n == 1 { "" } else { "s" }));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{Iri, Literal};

    #[test]
    fn json_shape() {
        let table = SolutionTable::new(
            vec![Variable::new("data").unwrap()],
            vec![vec![Term::Iri(Iri::new("http://example.org/cloudengine#Swift").unwrap())]],
        );
        assert_eq!(
            table.to_json(),
            json!({
                "head": {"vars": ["data"]},
                "results": {"bindings": [
                    {"data": {"type": "iri", "value": "http://example.org/cloudengine#Swift"}}
                ]}
            })
        );
    }

    #[test]
    fn text_has_header_and_count() {
        let table = SolutionTable::new(
            vec![Variable::new("x").unwrap()],
            vec![vec![Term::Literal(Literal::string("b"))], vec![Term::Literal(Literal::string("a"))]],
        );
        assert_eq!(table.to_text(), "?x\n---\n\"a\"\n\"b\"\n(2 rows)\n");
        let empty = SolutionTable::new(vec![Variable::new("x").unwrap()], vec![]);
        assert!(empty.to_text().ends_with("(0 rows)\n"));
    }
}
