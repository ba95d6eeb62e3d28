//! Bridge to a generative language model: prompt construction, the
//! generation endpoint contract and parsing of enumerated-list completions.

mod endpoint;
mod parse;
mod prompt;

pub use endpoint::{
    Fixture, FixtureError, FixtureGenerator, FixtureSet, GenerateError, GenerateRequest, GenerateResponse,
    GenerationEndpointConfig, Generator, HttpGenerator,
};
pub use parse::{parse_practices, GeneratedPractice};
pub use prompt::{build_prompt, EmptyQuery, PROMPT_PREFIX, PROMPT_SUFFIX};
