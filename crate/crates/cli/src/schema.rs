//! JSON Schema of the experiment config, as printed by `fracspec schema`.

use serde_json::{json, Value};

pub fn config_schema() -> Value {
    let number_or_rational = json!({
        "oneOf": [
            { "type": "number" },
            { "type": "string", "description": "exact rational such as \"1/3\" or \"0.25\"" }
        ]
    });
    json!({
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "fracspec experiment config",
        "type": "object",
        "required": ["kind", "params"],
        "additionalProperties": false,
        "properties": {
            "kind": { "enum": ["SEQUENCE_ANALYSIS", "EXEMPLAR", "IFS_CLASSICAL", "GAP_TRIPLE", "PAIR_TRIPLE", "LINK_CHECK"] },
            "name": { "type": "string", "description": "file stem for outputs; defaults to the config file stem" },
            "seed": { "type": "integer", "minimum": 0, "description": "seed for sampled diagnostics" },
            "series": { "type": "boolean", "default": true, "description": "write CSV series next to the report" },
            "params": { "type": "object" }
        },
        "allOf": [
            { "if": { "properties": { "kind": { "const": "SEQUENCE_ANALYSIS" } } },
              "then": { "properties": { "params": { "$ref": "#/$defs/sequence_analysis" } } } },
            { "if": { "properties": { "kind": { "const": "EXEMPLAR" } } },
              "then": { "properties": { "params": { "$ref": "#/$defs/exemplar" } } } },
            { "if": { "properties": { "kind": { "const": "IFS_CLASSICAL" } } },
              "then": { "properties": { "params": { "$ref": "#/$defs/ifs_classical" } } } },
            { "if": { "properties": { "kind": { "const": "GAP_TRIPLE" } } },
              "then": { "properties": { "params": { "$ref": "#/$defs/gap_triple" } } } },
            { "if": { "properties": { "kind": { "const": "PAIR_TRIPLE" } } },
              "then": { "properties": { "params": { "$ref": "#/$defs/pair_triple" } } } },
            { "if": { "properties": { "kind": { "const": "LINK_CHECK" } } },
              "then": { "properties": { "params": { "$ref": "#/$defs/link_check" } } } }
        ],
        "$defs": {
            "positive": { "type": "number", "exclusiveMinimum": 0 },
            "positives": { "type": "array", "items": { "$ref": "#/$defs/positive" } },
            "vector": { "type": "array", "items": { "type": "number" }, "minItems": 1 },
            "entries": { "type": "integer", "minimum": 1, "description": "eigen-entries; at most the entry budget (default 2000000)" },
            "interval": { "type": "array", "items": { "type": "number" }, "minItems": 2, "maxItems": 2 },
            "sequence_analysis": {
                "type": "object",
                "required": ["sequence"],
                "additionalProperties": false,
                "properties": {
                    "sequence": {
                        "type": "object",
                        "minProperties": 1,
                        "maxProperties": 1,
                        "additionalProperties": false,
                        "properties": {
                            "values": { "$ref": "#/$defs/positives", "minItems": 1 },
                            "formula": {
                                "type": "object",
                                "required": ["exponent", "cap"],
                                "additionalProperties": false,
                                "description": "mu_n = n^-exponent * log(n+1)^-log_exponent",
                                "properties": {
                                    "exponent": { "$ref": "#/$defs/positive" },
                                    "log_exponent": { "type": "number", "default": 0 },
                                    "cap": { "$ref": "#/$defs/entries" }
                                }
                            },
                            "file": { "type": "string", "description": "CSV n,mu_n with header, relative to the config" }
                        }
                    },
                    "exponents": { "$ref": "#/$defs/positives" },
                    "tolerance": { "$ref": "#/$defs/positive", "default": 0.02 }
                }
            },
            "exemplar": {
                "type": "object",
                "required": ["exemplar", "cap"],
                "additionalProperties": false,
                "properties": {
                    "exemplar": {
                        "type": "object",
                        "minProperties": 1,
                        "maxProperties": 1,
                        "additionalProperties": false,
                        "properties": {
                            "two_slope": {
                                "type": "object",
                                "required": ["alpha", "beta", "gaps"],
                                "additionalProperties": false,
                                "properties": {
                                    "alpha": { "$ref": "#/$defs/positive" },
                                    "beta": { "$ref": "#/$defs/positive" },
                                    "gaps": { "oneOf": [
                                        { "const": "linear" },
                                        { "type": "object", "required": ["constant"], "additionalProperties": false,
                                          "properties": { "constant": { "$ref": "#/$defs/positive" } } },
                                        { "type": "object", "required": ["custom"], "additionalProperties": false,
                                          "properties": { "custom": { "$ref": "#/$defs/positives", "minItems": 1 } } }
                                    ] }
                                }
                            },
                            "step": { "oneOf": [
                                { "type": "object", "required": ["q"], "additionalProperties": false,
                                  "properties": { "q": { "type": "number", "exclusiveMinimum": 1 } } },
                                { "type": "object", "required": ["breaks"], "additionalProperties": false,
                                  "properties": { "breaks": { "$ref": "#/$defs/positives", "minItems": 1 } } }
                            ] }
                        }
                    },
                    "cap": { "$ref": "#/$defs/entries" },
                    "exponents": { "$ref": "#/$defs/positives" },
                    "tolerance": { "$ref": "#/$defs/positive", "default": 0.02 },
                    "lambda": { "type": "number", "exclusiveMinimum": 1, "default": 2 }
                }
            },
            "map": {
                "type": "object",
                "required": ["ratio", "translation"],
                "additionalProperties": false,
                "properties": {
                    "ratio": number_or_rational,
                    "translation": { "oneOf": [
                        number_or_rational,
                        { "$ref": "#/$defs/vector" }
                    ] },
                    "matrix": { "type": "array", "items": { "$ref": "#/$defs/vector" }, "description": "orthogonal; identity by default" },
                    "reflect": { "type": "boolean", "default": false }
                }
            },
            "level": { "type": "array", "items": { "$ref": "#/$defs/map" }, "minItems": 1 },
            "ifs": {
                "type": "object",
                "minProperties": 1,
                "additionalProperties": false,
                "properties": {
                    "stationary": { "$ref": "#/$defs/level" },
                    "periodic": { "type": "array", "items": { "$ref": "#/$defs/level" }, "minItems": 1,
                                  "description": "levels repeated cyclically" },
                    "explicit": { "type": "array", "items": { "$ref": "#/$defs/level" }, "minItems": 1,
                                  "description": "finitely many levels" },
                    "osc_box": { "type": "object", "required": ["lo", "hi"], "additionalProperties": false,
                                 "properties": { "lo": { "$ref": "#/$defs/vector" }, "hi": { "$ref": "#/$defs/vector" } } }
                }
            },
            "test_function": {
                "type": "object",
                "minProperties": 1,
                "maxProperties": 1,
                "additionalProperties": false,
                "properties": {
                    "constant": { "type": "number" },
                    "affine": { "type": "object", "required": ["gradient"], "additionalProperties": false,
                                "properties": { "gradient": { "$ref": "#/$defs/vector" }, "offset": { "type": "number" } } },
                    "smoothed_indicator": { "type": "object", "required": ["lo", "hi", "ramp"], "additionalProperties": false,
                                            "properties": { "lo": { "$ref": "#/$defs/vector" }, "hi": { "$ref": "#/$defs/vector" },
                                                            "ramp": { "$ref": "#/$defs/positive" } } },
                    "table": { "type": "object", "required": ["points", "tolerance"], "additionalProperties": false,
                               "properties": {
                                   "points": { "type": "array", "items": {
                                       "type": "object", "required": ["x", "value"], "additionalProperties": false,
                                       "properties": { "x": { "$ref": "#/$defs/vector" }, "value": { "type": "number" } } } },
                                   "tolerance": { "$ref": "#/$defs/positive" } } }
                }
            },
            "ifs_classical": {
                "type": "object",
                "required": ["ifs", "depth"],
                "additionalProperties": false,
                "properties": {
                    "ifs": { "$ref": "#/$defs/ifs" },
                    "depth": { "type": "integer", "minimum": 1, "description": "word length of the attractor cloud; within the word budget" },
                    "seed_point": { "$ref": "#/$defs/vector" },
                    "translation_depth": { "type": "integer", "minimum": 1 },
                    "contraction": { "type": "object", "required": ["points", "depth"], "additionalProperties": false,
                                     "properties": { "points": { "type": "integer", "minimum": 1 },
                                                     "depth": { "type": "integer", "minimum": 1 } } }
                }
            },
            "gap_triple": {
                "type": "object",
                "required": ["ifs", "entries"],
                "additionalProperties": false,
                "properties": {
                    "ifs": { "$ref": "#/$defs/ifs" },
                    "entries": { "$ref": "#/$defs/entries" },
                    "interval": { "$ref": "#/$defs/interval" },
                    "zeta_s": { "$ref": "#/$defs/positives" },
                    "export_entries": { "type": "boolean", "default": false }
                }
            },
            "pair_triple": {
                "type": "object",
                "required": ["ifs", "entries"],
                "additionalProperties": false,
                "properties": {
                    "ifs": { "$ref": "#/$defs/ifs" },
                    "entries": { "$ref": "#/$defs/entries" },
                    "max_depth": { "type": "integer", "minimum": 1 },
                    "seed_pair": { "type": "object", "required": ["x", "y"], "additionalProperties": false,
                                   "properties": { "x": { "$ref": "#/$defs/vector" }, "y": { "$ref": "#/$defs/vector" } } },
                    "zeta_s": { "$ref": "#/$defs/positives" },
                    "residue": { "type": "boolean", "default": true },
                    "functionals": { "type": "array", "items": {
                        "type": "object", "required": ["name", "function"], "additionalProperties": false,
                        "properties": {
                            "name": { "type": "string" },
                            "function": { "$ref": "#/$defs/test_function" },
                            "method": { "enum": ["ratio", "increment"], "default": "ratio" }
                        } } },
                    "export_entries": { "type": "boolean", "default": false }
                }
            },
            "link_check": {
                "type": "object",
                "required": ["ifs", "entries"],
                "additionalProperties": false,
                "properties": {
                    "ifs": { "$ref": "#/$defs/ifs" },
                    "entries": { "$ref": "#/$defs/entries" },
                    "interval": { "$ref": "#/$defs/interval" },
                    "d": { "type": "number", "exclusiveMinimum": 0, "maximum": 1 }
                }
            }
        }
    })
}
