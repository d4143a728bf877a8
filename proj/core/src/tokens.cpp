#include "recur/tokens.hpp"

#include <array>
#include <cassert>

namespace recur {

bool is_structural_marker(const Token& t) {
    return t == tok::CallOpen || t == tok::CallClose || t == tok::RetOpen ||
           t == tok::RetClose;
}

bool is_reserved_marker(const Token& t) {
    return is_structural_marker(t) || t == tok::Sep;
}

std::string render(const TokenSeq& seq) {
    std::string out;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i > 0) {
            const Token& prev = seq[i - 1];
            const Token& cur = seq[i];
            bool tight = prev == tok::Newline || cur == tok::Newline ||
                         prev == tok::CallOpen || prev == tok::RetOpen ||
                         cur == tok::CallClose || cur == tok::RetClose;
            if (!tight)
                out += ' ';
        }
        out += seq[i];
    }
    return out;
}

namespace {

const std::array<const Token*, 5> kMarkers = {
    &tok::CallOpen, &tok::CallClose, &tok::RetOpen, &tok::RetClose, &tok::Sep};

// Returns the marker literal starting at text[pos], or nullptr.
const Token* marker_at(std::string_view text, std::size_t pos) {
    for (const Token* m : kMarkers) {
        if (text.compare(pos, m->size(), *m) == 0)
            return m;
    }
    return nullptr;
}

}  // namespace

TokenSeq tokenize(std::string_view text) {
    TokenSeq out;
    std::string word;
    std::string indent;     // spaces seen at the start of a line
    bool line_start = true; // before any word on the current line
    auto flush = [&] {
        if (!word.empty()) {
            out.push_back(word);
            word.clear();
        }
    };
    std::size_t i = 0;
    while (i < text.size()) {
        if (const Token* m = marker_at(text, i)) {
            flush();
            indent.clear();
            line_start = false;
            out.push_back(*m);
            i += m->size();
            continue;
        }
        char c = text[i];
        if (c == '\n') {
            flush();
            indent.clear();
            line_start = true;
            out.push_back(tok::Newline);
            ++i;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            if (line_start && word.empty() && c == ' ')
                indent += c; // keep leading indentation with the first word
            flush();
            ++i;
            continue;
        }
        if (word.empty() && !indent.empty()) {
            word = indent;
            indent.clear();
        }
        word += c;
        line_start = false;
        ++i;
    }
    flush();
    return out;
}

TokenSeq concat(TokenSeq a, const TokenSeq& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

void append(TokenSeq& a, const TokenSeq& b) {
    a.insert(a.end(), b.begin(), b.end());
}

TokenSeq subseq(const TokenSeq& s, std::size_t begin, std::size_t end) {
    assert(begin <= end && end <= s.size());
    return TokenSeq(s.begin() + begin, s.begin() + end);
}

}  // namespace recur
