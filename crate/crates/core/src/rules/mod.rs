//! The transformation catalog and its deterministic rewrite engine.
//!
//! Every rule belongs to one of four categories. A rule either carries a
//! deterministic transformer (usable offline by the mock backend and by the
//! extractor's replay step) or is marked engine-unsupported, in which case
//! only a language-model backend can apply it.
//!
//! Transformers work on the token stream from [`crate::lexer`]; string
//! literals and comments are never rewritten. When a rule matches several
//! sites, every non-overlapping site is rewritten in one pass, scanning left
//! to right (sites nested inside a rewritten region are left for a later
//! application).

mod edits;
mod loops;
mod naming;
mod organization;
mod python;

pub(crate) use naming::rename_identifier;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::CodeSnippet;
use crate::error::{Error, Result};
use crate::features;
use crate::lexer::Lexed;

pub use naming::function_name_index;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleCategory {
    Naming = 1,
    Loops = 2,
    Math = 3,
    Organization = 4,
}

impl RuleCategory {
    pub const ALL: [RuleCategory; 4] = [
        RuleCategory::Naming,
        RuleCategory::Loops,
        RuleCategory::Math,
        RuleCategory::Organization,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn name(self) -> &'static str {
        match self {
            RuleCategory::Naming => "naming",
            RuleCategory::Loops => "loops",
            RuleCategory::Math => "math",
            RuleCategory::Organization => "organization",
        }
    }

    pub fn from_id(id: u8) -> Option<RuleCategory> {
        RuleCategory::ALL.into_iter().find(|c| c.id() == id)
    }
}

impl fmt::Display for RuleCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Rewrites the whole snippet; `None` when no site qualifies.
type Transformer = fn(&Lexed<'_>) -> Option<String>;

pub struct TransformationRule {
    pub rule_id: &'static str,
    pub category: RuleCategory,
    pub description: &'static str,
    /// Whether the inverse rewrite is also in the catalog (or the rule is its own inverse).
    pub reversible_hint: bool,
    transformer: Option<Transformer>,
}

impl TransformationRule {
    pub fn is_deterministic(&self) -> bool {
        self.transformer.is_some()
    }

    /// Short human-readable name, e.g. "camel to snake" for `naming.camel_to_snake`.
    pub fn display_name(&self) -> String {
        self.rule_id
            .split_once('.')
            .map(|(_, n)| n)
            .unwrap_or(self.rule_id)
            .replace('_', " ")
    }
}

impl fmt::Debug for TransformationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransformationRule")
            .field("rule_id", &self.rule_id)
            .field("category", &self.category)
            .field("deterministic", &self.is_deterministic())
            .finish()
    }
}

impl PartialEq for TransformationRule {
    fn eq(&self, other: &Self) -> bool {
        self.rule_id == other.rule_id
    }
}

impl Eq for TransformationRule {}

macro_rules! rule {
    ($id:literal, $cat:ident, $desc:literal, $rev:literal, $t:expr) => {
        TransformationRule {
            rule_id: $id,
            category: RuleCategory::$cat,
            description: $desc,
            reversible_hint: $rev,
            transformer: $t,
        }
    };
}

/// Catalog order is the static priority within each category. The additive
/// suffix rule leads naming: a later re-casing of the name keeps its trace.
static RULES: &[TransformationRule] = &[
    rule!("naming.add_suffix", Naming, "Append a suffix to the function name (data -> dataVal)", false, Some(naming::add_suffix)),
    rule!("naming.camel_to_snake", Naming, "Rename the function from camelCase to snake_case (testStream -> test_stream)", true, Some(naming::camel_to_snake)),
    rule!("naming.snake_to_camel", Naming, "Rename the function from snake_case to camelCase (my_var -> myVar)", true, Some(naming::snake_to_camel)),
    rule!("naming.to_pascal", Naming, "Rename the function to PascalCase (remove -> Remove)", false, Some(naming::to_pascal)),
    rule!("naming.to_upper", Naming, "Rename the function to UPPERCASE (value -> VALUE)", true, Some(naming::to_upper)),
    rule!("naming.to_lower", Naming, "Rename the function to lowercase (Value -> value)", true, Some(naming::to_lower)),
    rule!("loops.for_to_while", Loops, "Rewrite a counted for loop as an equivalent while loop", true, Some(loops::for_to_while)),
    rule!("loops.while_to_do_while", Loops, "Rewrite while(c){...} as a guarded do{...} while(c);", false, Some(loops::while_to_do_while)),
    rule!("loops.while_to_for", Loops, "Rewrite a while loop as a for loop", true, None),
    rule!("loops.flatten_nested_loop", Loops, "Flatten two nested counted loops into a single loop", false, None),
    rule!("loops.step_increment", Loops, "Change the loop step (i++ -> i+=2) with compensating body changes", false, None),
    rule!("loops.reverse_loop", Loops, "Iterate the loop in reverse order where order is irrelevant", false, None),
    rule!("math.group_ops", Math, "Regroup an associative chain (x + y + z -> x + (y + z))", false, None),
    rule!("math.mul_to_add", Math, "Replace multiplication by two with addition (2 * x -> x + x)", false, None),
    rule!("math.factorization", Math, "Factor a common term (a*b + a*c -> a*(b + c))", true, None),
    rule!("math.identity_transform", Math, "Apply an algebraic identity (x*x - y*y -> (x - y)*(x + y))", false, None),
    rule!("math.div_to_reciprocal", Math, "Rewrite division as multiplication by a reciprocal", false, None),
    rule!("math.pow_to_mul", Math, "Rewrite a power as repeated multiplication", false, None),
    rule!("math.expand_distributive", Math, "Expand a product over a sum (a*(b + c) -> a*b + a*c)", true, None),
    rule!("organization.optimize_cond", Organization, "Negate an if/else condition and swap the branches", false, Some(organization::optimize_cond)),
    rule!("organization.add_braces", Organization, "Wrap a single-statement body in braces", false, Some(organization::add_braces)),
    rule!("organization.inline_temp", Organization, "Inline a temporary that is immediately returned", false, Some(organization::inline_temp)),
    rule!("organization.split_decl", Organization, "Split a multi-variable declaration into one per variable", false, Some(organization::split_decl)),
    rule!("organization.reorder_decl", Organization, "Swap two adjacent independent constant declarations", true, Some(organization::reorder_decl)),
    rule!("organization.reorder_cond", Organization, "Swap the operands of a side-effect-free && / || condition", true, Some(organization::reorder_cond)),
    rule!("organization.swap_params", Organization, "Swap the arguments of a symmetric call such as max/min", true, Some(organization::swap_params)),
    rule!("organization.format_spacing", Organization, "Put spaces around assignment operators (x=5 -> x = 5)", false, Some(organization::format_spacing)),
    rule!("organization.adjust_op_space", Organization, "Put spaces around binary operators (y+z -> y + z)", false, Some(organization::adjust_op_space)),
    rule!("organization.insert_blank_line", Organization, "Insert a blank line after the first statement line", false, Some(organization::insert_blank_line)),
];

/// The static catalog.
#[derive(Debug, Clone, Copy)]
pub struct RuleCatalog {
    rules: &'static [TransformationRule],
}

pub fn catalog() -> RuleCatalog {
    RuleCatalog { rules: RULES }
}

impl RuleCatalog {
    pub fn rules(&self) -> &'static [TransformationRule] {
        self.rules
    }

    /// Rules of one category, in static priority order.
    pub fn category(&self, cat: RuleCategory) -> Vec<&'static TransformationRule> {
        self.rules.iter().filter(|r| r.category == cat).collect()
    }

    pub fn lookup(&self, rule_id: &str) -> Option<&'static TransformationRule> {
        self.rules.iter().find(|r| r.rule_id == rule_id)
    }

    /// Position of the rule within its category's priority order.
    pub fn priority(&self, rule: &TransformationRule) -> usize {
        self.category(rule.category)
            .iter()
            .position(|r| r.rule_id == rule.rule_id)
            .unwrap_or(usize::MAX)
    }

    pub fn deterministic(&self) -> Vec<&'static TransformationRule> {
        self.rules.iter().filter(|r| r.is_deterministic()).collect()
    }
}

pub fn lookup(rule_id: &str) -> Result<&'static TransformationRule> {
    catalog()
        .lookup(rule_id)
        .ok_or_else(|| Error::UnknownRule(rule_id.to_string()))
}

/// Entry in the `rules export` listing.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RuleExport {
    pub rule_id: String,
    pub category: RuleCategory,
    pub description: String,
    pub deterministic: bool,
}

pub fn export() -> Vec<RuleExport> {
    RULES
        .iter()
        .map(|r| RuleExport {
            rule_id: r.rule_id.to_string(),
            category: r.category,
            description: r.description.to_string(),
            deterministic: r.is_deterministic(),
        })
        .collect()
}

fn rewrite(rule: &TransformationRule, text: &str, snippet: &CodeSnippet) -> Option<String> {
    let t = rule.transformer?;
    let lx = Lexed::new(text, snippet.language);
    t(&lx).filter(|out| out != text)
}

/// True iff the deterministic transformer would change the snippet.
pub fn is_applicable(rule: &TransformationRule, snippet: &CodeSnippet) -> bool {
    rewrite(rule, &snippet.text, snippet).is_some()
}

pub fn apply(rule: &TransformationRule, snippet: &CodeSnippet) -> Result<CodeSnippet> {
    if !rule.is_deterministic() {
        return Err(Error::EngineUnsupported(rule.rule_id.to_string()));
    }
    rewrite(rule, &snippet.text, snippet)
        .map(|t| snippet.with_text(t))
        .ok_or_else(|| Error::NotApplicable(rule.rule_id.to_string()))
}

/// Whether `after` looks like `before` with `rule` applied: the rewrite must
/// move `before` strictly closer to `after`.
pub fn detect(rule: &TransformationRule, before: &CodeSnippet, after: &CodeSnippet) -> bool {
    match apply(rule, before) {
        Ok(candidate) => features::closer(before, &candidate, after, 0.0).improved,
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests;
