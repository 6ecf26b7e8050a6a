#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>

#include "mdplv/mdp.hpp"

namespace mdplv {

/// Parse/validation failure; line/column are 1-based and refer to the input
/// text when the failure is syntactic (0 when semantic).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, int line = 0, int column = 0)
      : std::runtime_error(std::move(message)), line(line), column(column) {}
  int line = 0;
  int column = 0;
};

/// Reads a .mdp.json document and returns a validated model. Throws
/// ParseError on syntax errors (with position) and on any semantic violation
/// (unknown states, bad rationals, distribution sums, ...).
Mdp parse_model(std::string_view text);

/// Canonical writer: keys in (states, initial, targets, actions) order,
/// states and actions sorted, rationals in lowest terms, two-space indent,
/// LF newlines. write(parse(text)) reproduces canonical text byte for byte.
/// Terminal designations are a normalization artifact and are not serialized.
std::string write_model(const Mdp& mdp);

struct GeneratorSpec {
  std::string family;  // fig1 | chain | grid | random_ecfree | random_ec | deadzone
  std::int64_t size = 1;
  std::uint64_t seed = 0;
};

struct GeneratedModel {
  Mdp mdp;
  nlohmann::ordered_json meta;  // planted-structure ground truth for tests
};

/// Deterministic benchmark families; the same spec always yields a
/// byte-identical model.
///   fig1          4-state model with one nontrivial EC, value 1/2 (size/seed unused)
///   chain         `size` states stepping to the goal with probability 1
///   grid          size x size lattice with slip and drop-out
///   random_ecfree layered random model without end components
///   random_ec     random_ecfree plus one planted EC (recorded in meta)
///   deadzone      small profitable region plus a large low-value tree that
///                 epsilon-optimal strategies never enter
GeneratedModel generate(const GeneratorSpec& spec);

}  // namespace mdplv
