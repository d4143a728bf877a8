#pragma once

#include <string>
#include <vector>

#include "recur/turing.hpp"

namespace recur {

// Machines shipped with the library, addressable by name from the CLI and
// tests. Deterministic: parity, increment, palindrome, countdown, toggler
// (toggler never halts; it exists for cost measurements). Alternating:
// exists_one, all_ones, bool_eval.
std::vector<std::string> builtin_machine_names();
bool is_builtin_machine(const std::string& name);
const std::string& builtin_machine_text(const std::string& name);

TuringMachine builtin_tm(const std::string& name);
AlternatingTM builtin_atm(const std::string& name);

// Resolves a CLI --machine argument: a builtin name or a descriptor file
// path. Returns the descriptor text.
std::string load_machine_text(const std::string& name_or_path);

}  // namespace recur
