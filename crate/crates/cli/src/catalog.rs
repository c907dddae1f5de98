//! The catalog of built-in groups, cochain families and user group files.

use std::path::Path;

use cyclic_bench::groups::{builtin, Group, GroupSpec};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct GroupEntry {
    pub name: String,
    pub kind: &'static str,
    pub order: Option<usize>,
    pub rank: Option<usize>,
    pub generators: Vec<String>,
    /// Families that build on this group with their default parameters.
    pub cochains: Vec<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Parameter {
    pub name: &'static str,
    #[serde(rename = "type")]
    pub ty: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub default: Option<&'static str>,
    pub description: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyEntry {
    pub family: &'static str,
    pub description: &'static str,
    pub groups: &'static str,
    pub parameters: Vec<Parameter>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Catalog {
    /// Name patterns accepted by `--group`.
    pub patterns: Vec<&'static str>,
    pub groups: Vec<GroupEntry>,
    pub cochain_families: Vec<FamilyEntry>,
    pub user_groups: Vec<GroupEntry>,
    /// User files that failed to load, with the reason.
    pub user_errors: Vec<(String, String)>,
}

const SHIPPED: [&str; 10] = ["Z/2", "Z/3", "Z/4", "S3", "V4", "Z", "Z2", "Z3", "F2", "F3"];

fn applicable(g: &Group) -> Vec<&'static str> {
    use cyclic_bench::groups::GroupKind;
    let mut out = vec!["zero", "length-power", "exponential", "indicator", "table"];
    if g.kind() != GroupKind::FiniteTable {
        out.push("homomorphism");
    }
    if g.kind() == GroupKind::FreeAbelian && g.rank().is_some_and(|r| r >= 2) {
        out.push("area");
    }
    out.extend(["sum", "product", "scale", "coboundary"]);
    out
}

fn entry(name: String, g: &Group, source: Option<String>) -> GroupEntry {
    GroupEntry {
        name,
        kind: g.kind().name(),
        order: g.order(),
        rank: g.rank(),
        generators: g.generators().iter().map(|x| g.format_element(x)).collect(),
        cochains: applicable(g),
        source,
    }
}

fn p(
    name: &'static str,
    ty: &'static str,
    default: Option<&'static str>,
    description: &'static str,
) -> Parameter {
    Parameter {
        name,
        ty,
        default,
        description,
    }
}

fn families() -> Vec<FamilyEntry> {
    vec![
        FamilyEntry {
            family: "zero",
            description: "the zero cochain",
            groups: "any",
            parameters: vec![p("arity", "integer", None, "number of arguments")],
        },
        FamilyEntry {
            family: "homomorphism",
            description: "g ↦ Σ values[k]·(exponent sum of generator k)",
            groups: "free, free abelian",
            parameters: vec![p(
                "values",
                "list of rationals",
                None,
                "one value per generator",
            )],
        },
        FamilyEntry {
            family: "length-power",
            description: "Π L(gᵢ)^power",
            groups: "any",
            parameters: vec![
                p("arity", "integer", None, "number of arguments"),
                p("power", "integer", None, "exponent"),
            ],
        },
        FamilyEntry {
            family: "exponential",
            description: "base^{ΣL(gᵢ)} off degenerate tuples, 0 on them",
            groups: "any",
            parameters: vec![
                p("arity", "integer", None, "number of arguments"),
                p("base", "rational ≥ 1", None, "growth base"),
            ],
        },
        FamilyEntry {
            family: "indicator",
            description: "value at one tuple, 0 elsewhere",
            groups: "any",
            parameters: vec![
                p("tuple", "list of elements", None, "the support"),
                p("value", "scalar", Some("1"), "value at the tuple"),
            ],
        },
        FamilyEntry {
            family: "area",
            description: "(g, h) ↦ g_i h_j − g_j h_i, a 2-cocycle",
            groups: "free abelian of rank ≥ 2",
            parameters: vec![p("pair", "[i, j]", Some("[0, 1]"), "coordinates")],
        },
        FamilyEntry {
            family: "table",
            description: "finitely supported, listed values",
            groups: "any",
            parameters: vec![
                p("arity", "integer", None, "number of arguments"),
                p(
                    "entries",
                    "list of [[elements], scalar]",
                    None,
                    "nonzero values",
                ),
            ],
        },
        FamilyEntry {
            family: "sum",
            description: "pointwise sum",
            groups: "any",
            parameters: vec![p(
                "terms",
                "list of cochains",
                None,
                "summands of equal arity",
            )],
        },
        FamilyEntry {
            family: "product",
            description: "pointwise product",
            groups: "any",
            parameters: vec![p(
                "factors",
                "list of cochains",
                None,
                "factors of equal arity",
            )],
        },
        FamilyEntry {
            family: "scale",
            description: "scalar multiple",
            groups: "any",
            parameters: vec![
                p("factor", "scalar", None, "multiplier"),
                p("inner", "cochain", None, "the cochain"),
            ],
        },
        FamilyEntry {
            family: "coboundary",
            description: "bar coboundary δφ",
            groups: "any",
            parameters: vec![p("inner", "cochain", None, "φ")],
        },
    ]
}

/// Built-ins, plus every `*.toml` group file in `user_dir` (sorted by name).
pub fn list_builtins(user_dir: Option<&Path>) -> Catalog {
    let groups = SHIPPED
        .iter()
        .map(|n| entry(n.to_string(), &builtin(n).expect("shipped group"), None))
        .collect();
    let mut user_groups = Vec::new();
    let mut user_errors = Vec::new();
    if let Some(dir) = user_dir {
        let mut paths: Vec<_> = match std::fs::read_dir(dir) {
            Ok(rd) => rd.filter_map(|e| e.ok().map(|e| e.path())).collect(),
            Err(e) => {
                user_errors.push((dir.display().to_string(), e.to_string()));
                Vec::new()
            }
        };
        paths.retain(|p| p.extension().is_some_and(|e| e == "toml"));
        paths.sort();
        for path in paths {
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let loaded = std::fs::read_to_string(&path)
                .map_err(|e| e.to_string())
                .and_then(|t| {
                    GroupSpec::parse(&t)
                        .and_then(|s| s.build())
                        .map_err(|e| e.to_string())
                });
            match loaded {
                Ok(g) => user_groups.push(entry(name, &g, Some(path.display().to_string()))),
                Err(e) => user_errors.push((path.display().to_string(), e)),
            }
        }
    }
    Catalog {
        patterns: vec!["Z/<k>", "S<n>", "V4", "Z", "Z<k>", "F<k>"],
        groups,
        cochain_families: families(),
        user_groups,
        user_errors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2_offers_the_area_cocycle() {
        let c = list_builtins(None);
        let z2 = c.groups.iter().find(|g| g.name == "Z2").unwrap();
        assert_eq!(z2.rank, Some(2));
        assert!(z2.cochains.contains(&"area"));
        assert!(c.cochain_families.iter().any(|f| f.family == "area"));
        assert!(!c
            .groups
            .iter()
            .find(|g| g.name == "S3")
            .unwrap()
            .cochains
            .contains(&"area"));
    }

    #[test]
    fn user_tables_are_listed_and_an_empty_directory_adds_nothing() {
        let dir = tempfile::tempdir().unwrap();
        assert!(list_builtins(Some(dir.path())).user_groups.is_empty());
        std::fs::write(
            dir.path().join("c3.toml"),
            "kind = \"finite-table\"\ngenerators = [1]\ntable = [[0, 1, 2], [1, 2, 0], [2, 0, 1]]\n",
        )
        .unwrap();
        std::fs::write(dir.path().join("bad.toml"), "kind = \"finite-table\"\n").unwrap();
        let c = list_builtins(Some(dir.path()));
        assert_eq!(c.user_groups.len(), 1);
        assert_eq!(c.user_groups[0].order, Some(3));
        assert_eq!(c.user_errors.len(), 1);
        assert_eq!(c.groups.len(), SHIPPED.len());
    }
}
