//! Scalar expressions of `(rho, T)` read from configuration files.
//!
//! Available variables: `rho`, `T`, `c`, `m`, `k_b` and `gamma` (= m c²/(k_B T)).
//! Functions follow `evalexpr` (`math::ln`, `math::exp`, `math::sqrt`, `^`, ...).

use std::fmt;

use evalexpr::{
    build_operator_tree, ContextWithMutableVariables, DefaultNumericTypes, HashMapContext, Node, Value,
};

use crate::state_models::PhysicalConstants;

#[derive(Clone)]
pub struct Expression {
    source: String,
    tree: Node<DefaultNumericTypes>,
}

impl fmt::Debug for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Expression").field(&self.source).finish()
    }
}

impl Expression {
    pub fn parse(source: &str) -> Result<Self, String> {
        let tree = build_operator_tree::<DefaultNumericTypes>(&float_literals(source))
            .map_err(|e| format!("`{source}`: {e}"))?;
        let expr = Self {
            source: source.to_owned(),
            tree,
        };
        // probe once so that unknown identifiers fail at load time
        expr.eval(1.0, 1.0, &PhysicalConstants::default())?;
        Ok(expr)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, rho: f64, temperature: f64, k: &PhysicalConstants) -> Result<f64, String> {
        let mut ctx = HashMapContext::<DefaultNumericTypes>::new();
        let vars = [
            ("rho", rho),
            ("T", temperature),
            ("c", k.c),
            ("m", k.m),
            ("k_b", k.k_b),
            ("gamma", k.gamma(temperature)),
        ];
        for (name, value) in vars {
            ctx.set_value(name.into(), Value::Float(value))
                .map_err(|e| e.to_string())?;
        }
        self.tree
            .eval_number_with_context(&ctx)
            .map_err(|e| format!("`{}`: {e}", self.source))
    }
}

/// Rewrites bare integer literals as floats so that `3/2` means 1.5.
fn float_literals(source: &str) -> String {
    let chars: Vec<char> = source.chars().collect();
    let mut out = String::with_capacity(source.len() + 8);
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let starts_number = ch.is_ascii_digit()
            && (i == 0 || !(chars[i - 1].is_alphanumeric() || chars[i - 1] == '_' || chars[i - 1] == '.'));
        if !starts_number {
            out.push(ch);
            i += 1;
            continue;
        }
        let start = i;
        let digits = |i: &mut usize| {
            while *i < chars.len() && chars[*i].is_ascii_digit() {
                *i += 1;
            }
        };
        digits(&mut i);
        let mut is_float = false;
        if chars.get(i) == Some(&'.') {
            is_float = true;
            i += 1;
            digits(&mut i);
        }
        if matches!(chars.get(i), Some('e' | 'E')) {
            let mut j = i + 1;
            if matches!(chars.get(j), Some('+' | '-')) {
                j += 1;
            }
            if chars.get(j).is_some_and(|c| c.is_ascii_digit()) {
                is_float = true;
                i = j;
                digits(&mut i);
            }
        }
        out.extend(&chars[start..i]);
        if !is_float {
            out.push_str(".0");
        }
    }
    out
}
