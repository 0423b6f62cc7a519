use std::io::{BufRead, Write};

use stockbabble_core::dialogue::ChatResponse;

use crate::render;
use crate::LocalChat;

/// Line-oriented chat. A bare number picks that suggestion from the last
/// response.
pub struct Repl {
    chat: LocalChat,
    suggestions: Vec<String>,
}

/// Outcome of one input line.
#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    /// Nothing to send (blank line).
    Skip,
    /// The text actually sent and the engine's reply.
    Reply { sent: String, response: ChatResponse },
    /// A number that does not match a suggestion.
    NoSuchSuggestion(usize),
}

impl Repl {
    pub fn new(chat: LocalChat) -> Self {
        Self {
            chat,
            suggestions: Vec::new(),
        }
    }

    pub fn submit(&mut self, line: &str) -> Step {
        let line = line.trim();
        if line.is_empty() {
            return Step::Skip;
        }
        let sent = match line.parse::<usize>() {
            Ok(n) => match n.checked_sub(1).and_then(|i| self.suggestions.get(i)) {
                Some(s) => s.clone(),
                None => return Step::NoSuchSuggestion(n),
            },
            Err(_) => line.to_string(),
        };
        match self.chat.engine.handle(&mut self.chat.session, &sent) {
            Ok(response) => {
                self.suggestions = response.suggestions.clone();
                Step::Reply { sent, response }
            }
            Err(_) => Step::Skip,
        }
    }

    /// Runs until end of input.
    pub fn run(&mut self, input: impl BufRead, mut output: impl Write) -> std::io::Result<()> {
        writeln!(
            output,
            "StockBabble. Type a question, a suggestion number, or Ctrl-D to quit."
        )?;
        write!(output, "you> ")?;
        output.flush()?;
        for line in input.lines() {
            let line = line?;
            match self.submit(&line) {
                Step::Skip => {}
                Step::NoSuchSuggestion(n) => writeln!(output, "There is no suggestion {n}.")?,
                Step::Reply { sent, response } => {
                    if sent != line.trim() {
                        writeln!(output, "you> {sent}")?;
                    }
                    output.write_all(render::response(&response).as_bytes())?;
                }
            }
            write!(output, "you> ")?;
            output.flush()?;
        }
        writeln!(output)?;
        Ok(())
    }
}
