#include "swarmdec/schema_dsl.hpp"

#include <algorithm>
#include <map>
#include <optional>

namespace swarmdec {

namespace {

constexpr std::string_view kUnicodeArrow = "\xE2\x86\x92";

struct Side {
    int x1 = 0;
    int x2 = 0;
};

class LineParser {
public:
    LineParser(std::string_view line, int line_no) : text_(line), line_no_(line_no) {}

    Reaction parse() {
        const Side lhs = side();
        arrow();
        const Side rhs = side();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return Reaction{lhs.x1, lhs.x2, rhs.x1, rhs.x2};
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw SchemaError(SchemaErrorKind::Syntax, line_no_, static_cast<int>(pos_) + 1, what);
    }

    void skip_space() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }

    bool peek(char c) {
        skip_space();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    void arrow() {
        skip_space();
        if (text_.substr(pos_).starts_with("->")) {
            pos_ += 2;
        } else if (text_.substr(pos_).starts_with(kUnicodeArrow)) {
            pos_ += kUnicodeArrow.size();
        } else {
            fail("expected '->'");
        }
    }

    Side side() {
        Side s;
        bool seen[2] = {false, false};
        auto add = [&](int species, int coeff, std::size_t at) {
            if (seen[species]) {
                pos_ = at;
                fail("species X" + std::to_string(species + 1) + " repeated on one side");
            }
            seen[species] = true;
            (species == 0 ? s.x1 : s.x2) = coeff;
        };
        auto [sp, c, at] = term();
        add(sp, c, at);
        if (peek('+')) {
            ++pos_;
            auto [sp2, c2, at2] = term();
            add(sp2, c2, at2);
        }
        return s;
    }

    struct Term {
        int species;
        int coefficient;
        std::size_t start;
    };

    Term term() {
        skip_space();
        const std::size_t start = pos_;
        int coeff = 1;
        if (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
            if (text_[pos_] == '0') fail("coefficient must not start with 0");
            long long v = 0;
            while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
                v = v * 10 + (text_[pos_] - '0');
                if (v > 1'000'000) fail("coefficient too large");
                ++pos_;
            }
            coeff = static_cast<int>(v);
        }
        if (pos_ + 2 > text_.size() || text_[pos_] != 'X' ||
            (text_[pos_ + 1] != '1' && text_[pos_ + 1] != '2')) {
            fail("expected species X1 or X2");
        }
        const int species = text_[pos_ + 1] - '1';
        pos_ += 2;
        if (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
            fail("unknown species");
        }
        return Term{species, coeff, start};
    }

    std::string_view text_;
    int line_no_;
    std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

void append_side(std::string& out, int x1, int x2) {
    auto term = [&](int coeff, const char* species) {
        if (coeff == 0) return;
        if (!out.empty() && out.back() != ' ') out += '+';
        if (coeff != 1) out += std::to_string(coeff);
        out += species;
    };
    term(x1, "X1");
    term(x2, "X2");
}

}  // namespace

bool Reaction::is_majority() const noexcept {
    // X1 is the minority when it is below half; the rule is Majority when the
    // minority shrinks.
    const bool x1_minority = 2 * lhs_x1 < group_size();
    return x1_minority ? rhs_x1 < lhs_x1 : rhs_x1 > lhs_x1;
}

const char* to_string(SchemaErrorKind kind) noexcept {
    switch (kind) {
        case SchemaErrorKind::Syntax: return "syntax";
        case SchemaErrorKind::Arity: return "arity";
        case SchemaErrorKind::Step: return "step";
        case SchemaErrorKind::Composition: return "composition";
        case SchemaErrorKind::Duplicate: return "duplicate";
        case SchemaErrorKind::Missing: return "missing";
        case SchemaErrorKind::Asymmetry: return "asymmetry";
        case SchemaErrorKind::Empty: return "empty";
    }
    return "unknown";
}

SchemaError::SchemaError(SchemaErrorKind kind, int line, int column, const std::string& message)
    : Error(std::string(to_string(kind)) + " error" +
            (line > 0 ? " at " + std::to_string(line) + ":" + std::to_string(column) : "") +
            ": " + message),
      kind_(kind),
      line_(line),
      column_(column) {}

ReactionSchema parse_schema(std::string_view text) {
    ReactionSchema schema;
    std::map<int, int> seen_line;  // lhs_x1 -> line number
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view raw = text.substr(start, end - start);
        start = end + 1;
        ++line_no;

        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
        const std::string_view content = trim(raw);
        if (content.empty() || content.front() == '#') continue;

        Reaction r = LineParser(raw, line_no).parse();
        const int g = r.group_size();
        if (schema.group_size == 0) {
            if (g < 3 || g % 2 == 0) {
                throw SchemaError(SchemaErrorKind::Arity, line_no, 1,
                                  "group size " + std::to_string(g) + " must be odd and >= 3");
            }
            schema.group_size = g;
        }
        if (g != schema.group_size || r.rhs_x1 + r.rhs_x2 != schema.group_size) {
            throw SchemaError(SchemaErrorKind::Arity, line_no, 1,
                              "coefficients must sum to G=" + std::to_string(schema.group_size) +
                                  " on both sides");
        }
        if (std::abs(r.rhs_x1 - r.lhs_x1) != 1) {
            throw SchemaError(SchemaErrorKind::Step, line_no, 1, "exactly one agent must change opinion");
        }
        if (r.lhs_x1 < 1 || r.lhs_x1 > schema.group_size - 1) {
            throw SchemaError(SchemaErrorKind::Composition, line_no, 1,
                              "a unanimous group has no rule");
        }
        if (auto it = seen_line.find(r.lhs_x1); it != seen_line.end()) {
            throw SchemaError(SchemaErrorKind::Duplicate, line_no, 1,
                              "composition already defined on line " + std::to_string(it->second));
        }
        seen_line.emplace(r.lhs_x1, line_no);
        schema.reactions.push_back(r);
        if (end == text.size()) break;
    }

    if (schema.reactions.empty()) {
        throw SchemaError(SchemaErrorKind::Empty, 0, 0, "schema contains no reactions");
    }
    if (static_cast<int>(schema.reactions.size()) != schema.group_size - 1) {
        throw SchemaError(SchemaErrorKind::Missing, 0, 0,
                          "expected " + std::to_string(schema.group_size - 1) + " reactions, got " +
                              std::to_string(schema.reactions.size()));
    }
    std::sort(schema.reactions.begin(), schema.reactions.end(),
              [](const Reaction& a, const Reaction& b) { return a.lhs_x1 < b.lhs_x1; });
    const int g = schema.group_size;
    for (int k = 1; 2 * k < g; ++k) {
        const Reaction& low = schema.reactions[static_cast<std::size_t>(k - 1)];
        const Reaction& high = schema.reactions[static_cast<std::size_t>(g - k - 1)];
        if (low.is_majority() != high.is_majority()) {
            throw SchemaError(SchemaErrorKind::Asymmetry, seen_line.at(high.lhs_x1), 1,
                              "compositions " + std::to_string(k) + " and " + std::to_string(g - k) +
                                  " disagree on polarity");
        }
    }
    return schema;
}

RuleSet ruleset_of_schema(const ReactionSchema& schema) {
    const int g = schema.group_size;
    std::vector<RulePolarity> pol(static_cast<std::size_t>((g - 1) / 2));
    for (const Reaction& r : schema.reactions) {
        const int m = std::min(r.lhs_x1, g - r.lhs_x1);
        pol[static_cast<std::size_t>(m - 1)] = r.is_majority() ? RulePolarity::Majority : RulePolarity::Minority;
    }
    return RuleSet(g, std::move(pol));
}

ReactionSchema schema_of_ruleset(const RuleSet& rules) {
    const int g = rules.group_size();
    ReactionSchema schema;
    schema.group_size = g;
    for (int k = 1; k < g; ++k) {
        const int dk = signed_weight(k, g, rules.polarity_for(k));
        schema.reactions.push_back(Reaction{k, g - k, k + dk, g - k - dk});
    }
    return schema;
}

std::string format_reaction(const Reaction& r) {
    std::string out;
    append_side(out, r.lhs_x1, r.lhs_x2);
    out += " -> ";
    append_side(out, r.rhs_x1, r.rhs_x2);
    return out;
}

std::string format_schema(const ReactionSchema& schema) {
    std::string out;
    for (const Reaction& r : schema.reactions) {
        out += format_reaction(r);
        out += '\n';
    }
    return out;
}

RuleSet parse_polarity_string(std::string_view s, int group_size) {
    if (!is_valid_group_size(group_size)) {
        throw PolarityStringError(PolarityErrorKind::GroupSize,
                                  "group size must be odd and >= 3, got " + std::to_string(group_size));
    }
    const auto expected = static_cast<std::size_t>((group_size - 1) / 2);
    if (s.size() != expected) {
        throw PolarityStringError(PolarityErrorKind::Length,
                                  "polarity string '" + std::string(s) + "' has length " +
                                      std::to_string(s.size()) + ", group size " +
                                      std::to_string(group_size) + " needs " + std::to_string(expected));
    }
    std::vector<RulePolarity> pol;
    pol.reserve(expected);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == 'M') {
            pol.push_back(RulePolarity::Majority);
        } else if (s[i] == 'm') {
            pol.push_back(RulePolarity::Minority);
        } else {
            throw PolarityStringError(PolarityErrorKind::Character,
                                      "invalid polarity character '" + std::string(1, s[i]) +
                                          "' at position " + std::to_string(i + 1) + " (expected M or m)");
        }
    }
    return RuleSet(group_size, std::move(pol));
}

}  // namespace swarmdec
