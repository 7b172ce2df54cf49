#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "swarmdec/core_model.hpp"
#include "swarmdec/error.hpp"

namespace swarmdec {

/// One group transition, e.g. "2X1+5X2 -> X1+6X2".
struct Reaction {
    int lhs_x1 = 0;
    int lhs_x2 = 0;
    int rhs_x1 = 0;
    int rhs_x2 = 0;

    int group_size() const noexcept { return lhs_x1 + lhs_x2; }
    /// Whether the rule shrinks the group's minority species.
    bool is_majority() const noexcept;

    friend bool operator==(const Reaction&, const Reaction&) = default;
};

/// A validated rule listing: G-1 reactions, one per composition, sorted by lhs_x1.
struct ReactionSchema {
    int group_size = 0;
    std::vector<Reaction> reactions;

    friend bool operator==(const ReactionSchema&, const ReactionSchema&) = default;
};

enum class SchemaErrorKind {
    Syntax,
    Arity,
    Step,
    Composition,
    Duplicate,
    Missing,
    Asymmetry,
    Empty,
};

const char* to_string(SchemaErrorKind kind) noexcept;

class SchemaError : public Error {
public:
    SchemaError(SchemaErrorKind kind, int line, int column, const std::string& message);

    SchemaErrorKind kind() const noexcept { return kind_; }
    /// 1-based; 0 when the error concerns the schema as a whole.
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    SchemaErrorKind kind_;
    int line_;
    int column_;
};

enum class PolarityErrorKind { Length, Character, GroupSize };

class PolarityStringError : public Error {
public:
    PolarityStringError(PolarityErrorKind kind, const std::string& message)
        : Error(message), kind_(kind) {}
    PolarityErrorKind kind() const noexcept { return kind_; }

private:
    PolarityErrorKind kind_;
};

/// Parses newline-separated reactions. Accepts "->" or the UTF-8 arrow,
/// ignores blank lines and lines starting with '#'.
ReactionSchema parse_schema(std::string_view text);

RuleSet ruleset_of_schema(const ReactionSchema& schema);
ReactionSchema schema_of_ruleset(const RuleSet& rules);

/// Canonical text: ascending lhs X1-count, "->", one reaction per line.
std::string format_reaction(const Reaction& r);
std::string format_schema(const ReactionSchema& schema);

RuleSet parse_polarity_string(std::string_view s, int group_size);

}  // namespace swarmdec
