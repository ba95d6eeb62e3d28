use thiserror::Error;

/// Text placed before the user's query.
pub const PROMPT_PREFIX: &str = "Below is an instruction that describes a task, paired with an input that provides further context. Write a response that appropriately completes the request.### Instruction: Give me an enumerated list of best practices for ";
/// Text placed after the user's query.
pub const PROMPT_SUFFIX: &str = " with a description of each of them.";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("query is empty")]
pub struct EmptyQuery;

/// Wraps the trimmed query in the fixed instruction template.
pub fn build_prompt(user_query: &str) -> Result<String, EmptyQuery> {
    let query = user_query.trim();
    if query.is_empty() {
        return Err(EmptyQuery);
    }
    let mut prompt = String::with_capacity(PROMPT_PREFIX.len() + query.len() + PROMPT_SUFFIX.len());
    prompt.push_str(PROMPT_PREFIX);
    prompt.push_str(query);
    prompt.push_str(PROMPT_SUFFIX);
    Ok(prompt)
}
