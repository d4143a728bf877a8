#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace recur {

// A token is one vocabulary symbol. Data tokens are arbitrary non-whitespace
// strings (a word may carry leading indentation); "\n" is the explicit
// line-break token. The five reserved markers below are never valid data
// tokens.
using Token = std::string;
using TokenSeq = std::vector<Token>;

namespace tok {
inline const Token CallOpen = "<call>";
inline const Token CallClose = "</call>";
inline const Token RetOpen = "<return>";
inline const Token RetClose = "</return>";
inline const Token Sep = "[SEP]";
inline const Token Newline = "\n";
}  // namespace tok

// The four markers that delimit call/return blocks.
bool is_structural_marker(const Token& t);
// Structural markers plus [SEP].
bool is_reserved_marker(const Token& t);

// Serializes tokens to UTF-8 text. Tokens are joined with single spaces,
// except that no space is emitted adjacent to "\n", after an opening
// call/return marker, or before a closing one, so blocks render as
// "<call>x y</call>".
std::string render(const TokenSeq& seq);

// Splits text into tokens. Marker literals are recognized even when glued to
// surrounding text; other whitespace separates word tokens; newlines become
// "\n" tokens. Leading indentation inside a line is dropped (generators that
// care about indentation keep it inside a word token).
TokenSeq tokenize(std::string_view text);

TokenSeq concat(TokenSeq a, const TokenSeq& b);
void append(TokenSeq& a, const TokenSeq& b);
TokenSeq subseq(const TokenSeq& s, std::size_t begin, std::size_t end);

}  // namespace recur
