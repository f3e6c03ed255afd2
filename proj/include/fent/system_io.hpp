#pragma once

// Line-oriented system-description files.
//
//   rank 2
//   system markov
//     alphabet 0 1
//     stationary 1/2 1/2
//     transition all
//       9/10 1/10
//       1/10 9/10
//   end
//
// Kinds: bernoulli, coset-bernoulli, markov, hidden-markov, finite-action,
// direct-sum. '#' starts a comment. print_system emits the normalized form, and
// parse(print(s)) prints back byte-identically.

#include <string>
#include <string_view>

#include "fent/systems.hpp"

namespace fent {

// Throws ParseError (1-based line/column) on malformed text. Does not validate
// invariants; call validate() for that.
System parse_system(std::string_view text);
System load_system(const std::string& path);
std::string print_system(const System& system);

}  // namespace fent
